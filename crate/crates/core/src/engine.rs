//! Execution of the three-step iterative processes.
//!
//! Process A draws selections from the raw images `T_i(·)`; process B draws
//! them from the metric-projection images `P_{T_i}(·)`. One iteration
//! evaluates, in order: `z_n, u'_n` from the first map at `x_n`, the
//! `w`-line, `u_n, v'_n` from the second map at `w_n` (one evaluation,
//! reused), the `y`-line, `v_n` from the third map at `y_n`, and the
//! `x`-line. Every run is deterministic given its seed, and the per-step
//! Fejér bound `‖x_{n+1}−p‖ ≤ ‖x_n−p‖ + θ_n` can be audited afterwards from
//! the recorded trace.

use crate::catalog::Problem;
use crate::error::{Error, Result};
use crate::geometry::{
    convex_combine, dist_point_to_set, project, uniform_point, CompactSet, Vector,
};
use crate::mappings::{MultiMap, ProximalMap};
use crate::report::{CheckReport, Violation};
use crate::schedules::{CoefficientTuple, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};

/// Slack allowed before a selection is declared outside its image set.
pub const SELECTION_TOL: f64 = 1e-10;

/// Numerical drift past which an intermediate iterate is re-projected onto
/// the domain.
pub const REPROJECT_TOL: f64 = 1e-12;

/// Drift past which the step errors out instead of silently re-projecting:
/// convex combinations of domain points cannot leave a convex domain, so a
/// gap this large is a real bug or a dishonest map.
pub const DOMAIN_DRIFT_TOL: f64 = 1e-9;

/// Which image sets the selections are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessMode {
    /// Raw images `T_i(·)`.
    A,
    /// Metric-projection images `P_{T_i}(·)`.
    B,
}

impl fmt::Display for ProcessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessMode::A => write!(f, "A"),
            ProcessMode::B => write!(f, "B"),
        }
    }
}

/// How a single point is chosen from an image set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// Metric projection of the anchor onto the image.
    Nearest,
    /// Uniform draw from the image, deterministic given the run seed.
    SeededRandom,
    /// First listed point / center / lower corner.
    FirstListed,
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SelectionStrategy::Nearest => "nearest",
            SelectionStrategy::SeededRandom => "seeded_random",
            SelectionStrategy::FirstListed => "first_listed",
        };
        write!(f, "{s}")
    }
}

/// Choose one point of `image`.
pub fn select<R: Rng>(
    strategy: SelectionStrategy,
    image: &CompactSet,
    anchor: &Vector,
    rng: &mut R,
) -> Result<Vector> {
    match strategy {
        SelectionStrategy::Nearest => project(anchor, image),
        SelectionStrategy::SeededRandom => {
            if anchor.dim() != image.dim() {
                return Err(Error::DimensionMismatch { expected: image.dim(), got: anchor.dim() });
            }
            Ok(uniform_point(image, rng))
        }
        SelectionStrategy::FirstListed => {
            if anchor.dim() != image.dim() {
                return Err(Error::DimensionMismatch { expected: image.dim(), got: anchor.dim() });
            }
            Ok(match image {
                CompactSet::Singleton { point } => point.clone(),
                CompactSet::FinitePointSet { points } => points[0].clone(),
                CompactSet::Ball { center, .. } => center.clone(),
                CompactSet::AxisBox { lower, .. } => lower.clone(),
            })
        }
    }
}

/// Stopping rules for a run. `max_iter` always applies; the optional rules
/// stop earlier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_iter: u64,
    /// Stop once `max_i dist(x_n, T_i x_n) <= tol`.
    pub residual_tol: Option<f64>,
    /// Stop once `‖x_{n+1} − x_n‖ < tol` held over `window` consecutive
    /// steps.
    pub stagnation: Option<StagnationRule>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagnationRule {
    pub tol: f64,
    pub window: u32,
}

impl StopRule {
    pub fn residual(max_iter: u64, tol: f64) -> Self {
        StopRule { max_iter, residual_tol: Some(tol), stagnation: None }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::Invalid { what: "max_iter must be >= 1".into() });
        }
        if let Some(t) = self.residual_tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Invalid { what: format!("residual_tol {t} must be >= 0") });
            }
        }
        if let Some(s) = self.stagnation {
            if !(s.tol.is_finite() && s.tol >= 0.0) || s.window == 0 {
                return Err(Error::Invalid {
                    what: "stagnation needs tol >= 0 and window >= 1".into(),
                });
            }
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ResidualTol,
    Stagnation,
    MaxIter,
    /// The run aborted with an error; the trace holds the records up to the
    /// failing step.
    Failed,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::ResidualTol => "residual_tol",
            StopReason::Stagnation => "stagnation",
            StopReason::MaxIter => "max_iter",
            StopReason::Failed => "failed",
        };
        write!(f, "{s}")
    }
}

/// What to do when process A is requested on a problem whose fixed points
/// are not known to satisfy `T_i(p) = {p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonSingletonPolicy {
    /// Record a warning in the trace metadata and run anyway.
    #[default]
    Warn,
    /// Refuse to run.
    Refuse,
}

/// Everything that parameterizes a run besides the problem, start point,
/// and schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub mode: ProcessMode,
    pub strategy: SelectionStrategy,
    pub seed: u64,
    pub stop: StopRule,
    #[serde(default)]
    pub nonsingleton_policy: NonSingletonPolicy,
}

/// The five selections drawn during one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Selections {
    /// `z_n` from the first map at `x_n`.
    pub z: Vector,
    /// `u_n` from the second map at `w_n`.
    pub u: Vector,
    /// `u'_n` from the first map at `x_n`.
    pub u_prime: Vector,
    /// `v_n` from the third map at `y_n`.
    pub v: Vector,
    /// `v'_n` from the second map at `w_n`.
    pub v_prime: Vector,
}

/// Everything recorded for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub n: u64,
    pub x: Vector,
    pub w: Vector,
    pub y: Vector,
    pub selections: Selections,
    /// `dist(x_n, T_i x_n)` for the three base maps.
    pub residuals: [f64; 3],
    pub dx_w: f64,
    pub dx_y: f64,
    /// `b_n + e_n + γ_n`.
    pub err_weight: f64,
    /// `(s_n, s'_n, s''_n)` as realized.
    pub errors: [Vector; 3],
    /// `θ_n = M · err_weight` with the run-level `M` (see
    /// [`Trace::observed_error_bound`]); filled once the run finishes.
    pub theta: f64,
    /// `dist(x_n, 𝓕)` when the fixed-point set is known.
    pub dist_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub problem_label: String,
    pub schedule_label: String,
    pub mode: ProcessMode,
    pub strategy: SelectionStrategy,
    pub seed: u64,
    pub stop_reason: StopReason,
    pub warnings: Vec<String>,
    pub dim: usize,
}

/// Per-iteration records plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// `max_n max_k ‖errors_k(n) − p‖` over the realized trace; with no
    /// reference point, plain norms. This is the default `M` of the Fejér
    /// monitor, restricted to the realized horizon.
    pub fn observed_error_bound(&self, p: Option<&Vector>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for rec in &self.records {
            for err in &rec.errors {
                let v = match p {
                    Some(p) => err.dist(p)?,
                    None => err.norm(),
                };
                worst = worst.max(v);
            }
        }
        Ok(worst)
    }

    /// Serialize rows as CSV:
    /// `n,x_0..x_{d-1},r1,r2,r3,dx_w,dx_y,theta,dist_F`, one row per
    /// iteration, `dist_F` empty when the fixed-point set is unknown.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write!(out, "n")?;
        for i in 0..self.meta.dim {
            write!(out, ",x_{i}")?;
        }
        writeln!(out, ",r1,r2,r3,dx_w,dx_y,theta,dist_F")?;
        for rec in &self.records {
            write!(out, "{}", rec.n)?;
            for c in rec.x.coords() {
                write!(out, ",{c}")?;
            }
            write!(
                out,
                ",{},{},{},{},{},{}",
                rec.residuals[0], rec.residuals[1], rec.residuals[2], rec.dx_w, rec.dx_y, rec.theta
            )?;
            match rec.dist_f {
                Some(d) => writeln!(out, ",{d}")?,
                None => writeln!(out, ",")?,
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// A failed run carrying the trace accumulated before the failure.
#[derive(Debug, Clone)]
pub struct RunError {
    pub error: Error,
    pub trace: Trace,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run failed after {} iterations: {}", self.trace.len(), self.error)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Output of a single iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub next_x: Vector,
    pub w: Vector,
    pub y: Vector,
    pub selections: Selections,
}

fn image_of(map: &MultiMap, at: &Vector, mode: ProcessMode) -> Result<CompactSet> {
    match mode {
        ProcessMode::A => map.evaluate(at),
        ProcessMode::B => ProximalMap::new(map.clone()).evaluate_proximal(at),
    }
}

fn check_selection(which: &'static str, sel: &Vector, image: &CompactSet, n: u64) -> Result<()> {
    let gap = dist_point_to_set(sel, image)?;
    if gap > SELECTION_TOL {
        return Err(Error::SelectionOutsideImage { which, dist: gap, tol: SELECTION_TOL, n });
    }
    Ok(())
}

/// Clamp the tiny negative residue floating point can leave in
/// `1 − (sum of coefficients)`.
fn head_weight(rest: f64) -> f64 {
    let w = 1.0 - rest;
    if (-1e-12..0.0).contains(&w) {
        0.0
    } else {
        w
    }
}

fn pull_into_domain(
    which: &'static str,
    v: Vector,
    domain: &CompactSet,
    n: u64,
) -> Result<Vector> {
    if !v.is_finite() {
        return Err(Error::NonFiniteIterate { n });
    }
    let gap = dist_point_to_set(&v, domain)?;
    if gap > DOMAIN_DRIFT_TOL {
        return Err(Error::IterateLeftDomain { which, dist: gap, tol: DOMAIN_DRIFT_TOL, n });
    }
    if gap > REPROJECT_TOL {
        project(&v, domain)
    } else {
        Ok(v)
    }
}

/// One iteration of the process from `x` with the coefficients for index
/// `n`, in the fixed evaluation order of the scheme.
#[allow(clippy::too_many_arguments)]
pub fn step<R: Rng>(
    x: &Vector,
    n: u64,
    maps: &[MultiMap; 3],
    domain: &CompactSet,
    coeffs: &CoefficientTuple,
    mode: ProcessMode,
    strategy: SelectionStrategy,
    rng: &mut R,
) -> Result<StepOutput> {
    let [s, s_prime, s_second] = &coeffs.errors;

    let image1 = image_of(&maps[0], x, mode)?;
    let z = select(strategy, &image1, x, rng)?;
    let u_prime = select(strategy, &image1, x, rng)?;
    check_selection("z", &z, &image1, n)?;
    check_selection("u'", &u_prime, &image1, n)?;

    let w = convex_combine(
        &[x.clone(), z.clone(), s.clone()],
        &[head_weight(coeffs.a + coeffs.b), coeffs.a, coeffs.b],
    )?;
    let w = pull_into_domain("w", w, domain, n)?;

    let image2 = image_of(&maps[1], &w, mode)?;
    let u = select(strategy, &image2, &w, rng)?;
    let v_prime = select(strategy, &image2, &w, rng)?;
    check_selection("u", &u, &image2, n)?;
    check_selection("v'", &v_prime, &image2, n)?;

    let y = convex_combine(
        &[x.clone(), u.clone(), u_prime.clone(), s_prime.clone()],
        &[head_weight(coeffs.c + coeffs.d + coeffs.e), coeffs.c, coeffs.d, coeffs.e],
    )?;
    let y = pull_into_domain("y", y, domain, n)?;

    let image3 = image_of(&maps[2], &y, mode)?;
    let v = select(strategy, &image3, &y, rng)?;
    check_selection("v", &v, &image3, n)?;

    let next_x = convex_combine(
        &[x.clone(), v.clone(), v_prime.clone(), s_second.clone()],
        &[
            head_weight(coeffs.alpha + coeffs.beta + coeffs.gamma),
            coeffs.alpha,
            coeffs.beta,
            coeffs.gamma,
        ],
    )?;
    let next_x = pull_into_domain("x", next_x, domain, n)?;

    Ok(StepOutput { next_x, w, y, selections: Selections { z, u, u_prime, v, v_prime } })
}

/// Run the process until a stop rule fires.
///
/// Each iteration records the pre-step state, selections, residuals, and
/// monitor quantities; the trace is bit-identical across runs with equal
/// inputs. The schedule is expected to be validated (strictly, or with
/// warnings accepted) before calling.
pub fn run(
    problem: &Problem,
    x1: &Vector,
    schedule: &Schedule,
    settings: &RunSettings,
) -> std::result::Result<Trace, Box<RunError>> {
    let mut meta = TraceMeta {
        problem_label: problem.label.clone(),
        schedule_label: schedule.label().to_string(),
        mode: settings.mode,
        strategy: settings.strategy,
        seed: settings.seed,
        stop_reason: StopReason::Failed,
        warnings: Vec::new(),
        dim: problem.dim(),
    };
    let fail = |error: Error, records: Vec<TraceRecord>, meta: &TraceMeta| {
        Box::new(RunError { error, trace: Trace { records, meta: meta.clone() } })
    };

    if let Err(e) = settings.stop.validate() {
        return Err(fail(e, Vec::new(), &meta));
    }
    if x1.dim() != problem.dim() || schedule.dim() != problem.dim() {
        return Err(fail(
            Error::DimensionMismatch {
                expected: problem.dim(),
                got: if x1.dim() != problem.dim() { x1.dim() } else { schedule.dim() },
            },
            Vec::new(),
            &meta,
        ));
    }
    let start_gap = match dist_point_to_set(x1, &problem.domain) {
        Ok(g) => g,
        Err(e) => return Err(fail(e, Vec::new(), &meta)),
    };
    if start_gap > DOMAIN_DRIFT_TOL {
        return Err(fail(
            Error::InitialPointOutsideDomain { dist: start_gap },
            Vec::new(),
            &meta,
        ));
    }

    if settings.mode == ProcessMode::A {
        match &problem.fixed_points {
            Some(f) if !f.strict_singleton_images => match settings.nonsingleton_policy {
                NonSingletonPolicy::Warn => meta.warnings.push(format!(
                    "mode A on `{}`: fixed points are not known to have singleton images; \
                     the Fejér bound is only guaranteed under that hypothesis",
                    problem.label
                )),
                NonSingletonPolicy::Refuse => {
                    return Err(fail(
                        Error::NonSingletonFixedPointImages { label: problem.label.clone() },
                        Vec::new(),
                        &meta,
                    ))
                }
            },
            _ => {}
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut x = match pull_into_domain("x", x1.clone(), &problem.domain, 0) {
        Ok(v) => v,
        Err(e) => return Err(fail(e, Vec::new(), &meta)),
    };
    let mut recent_moves: VecDeque<f64> = VecDeque::new();

    let mut stop = StopReason::MaxIter;
    for n in 1..=settings.stop.max_iter {
        let mut residuals = [0.0f64; 3];
        for (i, map) in problem.maps.iter().enumerate() {
            residuals[i] = match map.residual(&x) {
                Ok(r) => r,
                Err(e) => return Err(fail(e, records, &meta)),
            };
        }
        let dist_f = match &problem.fixed_points {
            Some(f) => match f.dist_to(&x) {
                Ok(d) => Some(d),
                Err(e) => return Err(fail(e, records, &meta)),
            },
            None => None,
        };
        let coeffs = match schedule.coefficients_at(n) {
            Ok(c) => c,
            Err(e) => return Err(fail(e, records, &meta)),
        };
        let out = match step(
            &x,
            n,
            &problem.maps,
            &problem.domain,
            &coeffs,
            settings.mode,
            settings.strategy,
            &mut rng,
        ) {
            Ok(o) => o,
            Err(e) => return Err(fail(e, records, &meta)),
        };

        let dx_w = x.dist(&out.w).expect("dims equal");
        let dx_y = x.dist(&out.y).expect("dims equal");
        records.push(TraceRecord {
            n,
            x: x.clone(),
            w: out.w,
            y: out.y,
            selections: out.selections,
            residuals,
            dx_w,
            dx_y,
            err_weight: coeffs.error_weight(),
            errors: coeffs.errors,
            theta: 0.0,
            dist_f,
        });

        if let Some(tol) = settings.stop.residual_tol {
            if residuals.iter().cloned().fold(0.0, f64::max) <= tol {
                stop = StopReason::ResidualTol;
                break;
            }
        }
        let moved = x.dist(&out.next_x).expect("dims equal");
        if let Some(rule) = settings.stop.stagnation {
            recent_moves.push_back(moved);
            if recent_moves.len() > rule.window as usize {
                recent_moves.pop_front();
            }
            if recent_moves.len() == rule.window as usize
                && recent_moves.iter().all(|m| *m < rule.tol)
            {
                stop = StopReason::Stagnation;
                break;
            }
        }
        x = out.next_x;
    }

    meta.stop_reason = stop;
    let mut trace = Trace { records, meta };

    // Fill the CSV theta column with the run-level M: errors measured
    // against the first known fixed point, else by plain norm.
    let p0 = problem.fixed_points.as_ref().map(|f| f.points[0].clone());
    let m = trace
        .observed_error_bound(p0.as_ref())
        .expect("trace vectors share the run dimension");
    for rec in &mut trace.records {
        rec.theta = m * rec.err_weight;
    }
    Ok(trace)
}

/// Audit the per-step Fejér bound `‖x_{n+1}−p‖ ≤ ‖x_n−p‖ + θ_n + tol` over
/// every consecutive pair of a trace.
///
/// `m` defaults to the observed error bound against `p`; callers may pass a
/// larger constant. Requires `p ∈ 𝓕` of the traced problem for the bound to
/// be meaningful.
pub fn fejer_check(trace: &Trace, p: &Vector, m: Option<f64>, tol: f64) -> Result<CheckReport> {
    if trace.records.len() < 2 {
        return Err(Error::TraceTooShort { min: 2, got: trace.records.len() });
    }
    let m = match m {
        Some(m) => m,
        None => trace.observed_error_bound(Some(p))?,
    };
    let mut violations = Vec::new();
    let mut checked = 0;
    for pair in trace.records.windows(2) {
        let theta = m * pair[0].err_weight;
        let lhs = pair[1].x.dist(p)?;
        let rhs = pair[0].x.dist(p)? + theta;
        checked += 1;
        if lhs > rhs + tol {
            violations.push(Violation {
                x: Some(pair[0].x.clone()),
                y: Some(pair[1].x.clone()),
                index: Some(pair[0].n),
                lhs,
                rhs,
            });
        }
    }
    Ok(CheckReport::new(checked, violations, Vec::new()))
}
