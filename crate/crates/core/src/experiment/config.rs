//! TOML experiment configuration: parsing with exhaustive error collection,
//! resolution against the catalog, and re-emission.
//!
//! Schema (all tables top-level):
//!
//! ```toml
//! [problem]
//! catalog = "half_interval"      # catalog label
//! params = []                    # optional catalog parameters
//! x1 = [1.0]                     # start point, must lie in the domain
//! # [problem.fixed_points]       # optional override of catalog metadata
//! # points = [[0.0]]
//! # strict_singleton_images = true
//!
//! [schedule]
//! builtin = "constant_decay"     # or a [schedule.coeffs] table
//! # window = [0.3, 0.75]         # optional with builtin, required with coeffs
//! # [schedule.coeffs]
//! # a = { kind = "constant", value = 0.3 }
//! # b = { kind = "power_decay", scale = 1.0, shift = 1.0, power = 2.0 }
//! # ... (c, d, e, alpha, beta, gamma)
//! # [schedule.errors]            # optional, default zero
//! # kind = "zero" | "constant" | "seeded_uniform"
//! # point = [0.5]                # constant
//! # lower = [0.0]; upper = [1.0]; seed = 7   # seeded_uniform
//!
//! [run]
//! mode = "A"                     # A | B
//! seeds = [1, 2, 3]
//! # strategy = "nearest"         # nearest | seeded_random | first_listed
//! # max_iter = 10000
//! # residual_tol = 1e-8
//! # stagnation_tol = 1e-12       # requires stagnation_window
//! # stagnation_window = 10
//! # strict = false               # strict schedule validation
//! # nonsingleton_policy = "warn" # warn | refuse
//!
//! [output]
//! dir = "out"
//! # plots = false
//! ```

use crate::catalog::{self, Problem};
use crate::engine::{
    NonSingletonPolicy, ProcessMode, RunSettings, SelectionStrategy, StagnationRule, StopRule,
};
use crate::error::Result;
use crate::geometry::{dist_point_to_set, Vector};
use crate::mappings::KnownFixedPoints;
use crate::schedules::{CoeffRules, ErrorRule, Schedule};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

pub const DEFAULT_MAX_ITER: u64 = 10_000;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

/// One schema problem, located by a dotted path into the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub schedule: ScheduleSpec,
    pub run: RunSpec,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub catalog: String,
    pub params: Vec<f64>,
    pub x1: Vector,
    pub fixed_points: Option<FixedPointsSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointsSpec {
    pub points: Vec<Vector>,
    pub strict_singleton_images: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpec {
    pub builtin: Option<String>,
    pub coeffs: Option<CoeffRules>,
    pub window: Option<(f64, f64)>,
    pub errors: ErrorRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub mode: ProcessMode,
    pub strategy: SelectionStrategy,
    pub seeds: Vec<u64>,
    pub stop: StopRule,
    pub strict: bool,
    pub nonsingleton_policy: NonSingletonPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub plots: bool,
}

impl ProblemSpec {
    /// Build the catalog problem, applying the fixed-point override.
    pub fn build(&self) -> Result<Problem> {
        let mut problem = catalog::problem(&self.catalog, &self.params)?;
        if let Some(fp) = &self.fixed_points {
            problem.fixed_points =
                Some(KnownFixedPoints::new(fp.points.clone(), fp.strict_singleton_images)?);
        }
        Ok(problem)
    }
}

impl ScheduleSpec {
    pub fn build(&self, dim: usize) -> Result<Schedule> {
        let base = match (&self.builtin, &self.coeffs) {
            (Some(name), None) => Schedule::builtin(name, dim)?,
            (None, Some(coeffs)) => {
                let window = self.window.unwrap_or((0.3, 0.75));
                Schedule::new("custom", dim, *coeffs, window, ErrorRule::Zero)?
            }
            _ => {
                return Err(crate::error::Error::Invalid {
                    what: "schedule needs exactly one of `builtin` or `coeffs`".into(),
                })
            }
        };
        let base = match (self.window, &self.builtin) {
            (Some(window), Some(name)) => {
                Schedule::new(name.clone(), dim, *base.coeff_rules(), window, ErrorRule::Zero)?
            }
            _ => base,
        };
        base.with_errors(self.errors.clone())
    }
}

impl RunSpec {
    pub fn settings_for_seed(&self, seed: u64) -> RunSettings {
        RunSettings {
            mode: self.mode,
            strategy: self.strategy,
            seed,
            stop: self.stop,
            nonsingleton_policy: self.nonsingleton_policy,
        }
    }
}

// ---------------------------------------------------------------------------
// Raw (serde) layer
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: Option<RawProblem>,
    schedule: Option<RawSchedule>,
    run: Option<RawRun>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    catalog: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Vec<f64>>,
    x1: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_points: Option<RawFixedPoints>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixedPoints {
    points: Option<Vec<Vec<f64>>>,
    strict_singleton_images: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(skip_serializing_if = "Option::is_none")]
    builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<CoeffRules>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<RawErrors>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawErrors {
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<String>,
    seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iter: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stagnation_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stagnation_window: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonsingleton_policy: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plots: Option<bool>,
}

struct Collector {
    errors: Vec<ConfigError>,
}

impl Collector {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(ConfigError { path: path.to_string(), message: message.into() });
    }

    fn vector(&mut self, path: &str, raw: &[f64]) -> Option<Vector> {
        match Vector::new(raw.to_vec()) {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(path, e.to_string());
                None
            }
        }
    }
}

/// Parse and fully validate a TOML experiment document.
///
/// Semantic problems are collected, not fail-fast: a document with an
/// unknown catalog label *and* a start point outside the domain reports
/// both, each tagged with its path.
pub fn parse_config(text: &str) -> std::result::Result<ExperimentConfig, Vec<ConfigError>> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        vec![ConfigError { path: "<document>".into(), message: e.to_string() }]
    })?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> std::result::Result<ExperimentConfig, Vec<ConfigError>> {
    let mut c = Collector { errors: Vec::new() };

    // --- problem ---
    let rp = raw.problem.unwrap_or_default();
    let params = rp.params.unwrap_or_default();
    let catalog_label = rp.catalog.unwrap_or_else(|| {
        c.push("problem.catalog", "missing required field");
        String::new()
    });
    let mut problem = None;
    if !catalog_label.is_empty() {
        match catalog::problem(&catalog_label, &params) {
            Ok(p) => problem = Some(p),
            Err(e) => c.push("problem.catalog", e.to_string()),
        }
    }
    let fixed_points = rp.fixed_points.map(|fp| {
        let strict = fp.strict_singleton_images.unwrap_or(true);
        let mut points = Vec::new();
        match fp.points {
            Some(raw_pts) if !raw_pts.is_empty() => {
                for (i, p) in raw_pts.iter().enumerate() {
                    if let Some(v) = c.vector(&format!("problem.fixed_points.points[{i}]"), p) {
                        points.push(v);
                    }
                }
            }
            _ => c.push("problem.fixed_points.points", "must list at least one point"),
        }
        FixedPointsSpec { points, strict_singleton_images: strict }
    });
    let x1 = match rp.x1 {
        Some(coords) => c.vector("problem.x1", &coords),
        None => {
            c.push("problem.x1", "missing required field");
            None
        }
    };
    if let (Some(p), Some(x)) = (&problem, &x1) {
        if x.dim() != p.dim() {
            c.push(
                "problem.x1",
                format!("dimension {} does not match the domain dimension {}", x.dim(), p.dim()),
            );
        } else {
            match dist_point_to_set(x, &p.domain) {
                Ok(gap) if gap > crate::mappings::DOMAIN_TOL => c.push(
                    "problem.x1",
                    format!("lies outside the problem domain (distance {gap:.3e})"),
                ),
                Ok(_) => {}
                Err(e) => c.push("problem.x1", e.to_string()),
            }
        }
        if let Some(fp) = &fixed_points {
            for (i, q) in fp.points.iter().enumerate() {
                if q.dim() != p.dim() {
                    c.push(
                        &format!("problem.fixed_points.points[{i}]"),
                        format!("dimension {} does not match the domain {}", q.dim(), p.dim()),
                    );
                }
            }
        }
    }

    // --- schedule ---
    let rs = raw.schedule.unwrap_or_default();
    let window = match rs.window {
        None => None,
        Some(w) if w.len() == 2 => Some((w[0], w[1])),
        Some(w) => {
            c.push("schedule.window", format!("expected [a, b], got {} entries", w.len()));
            None
        }
    };
    match (&rs.builtin, &rs.coeffs) {
        (None, None) => c.push("schedule", "needs `builtin` or a `coeffs` table"),
        (Some(_), Some(_)) => c.push("schedule", "`builtin` and `coeffs` are mutually exclusive"),
        _ => {}
    }
    let errors = match rs.errors {
        None => ErrorRule::Zero,
        Some(re) => resolve_errors(re, &mut c),
    };
    let schedule_spec =
        ScheduleSpec { builtin: rs.builtin.clone(), coeffs: rs.coeffs, window, errors };
    if c.errors.is_empty() {
        if let Some(p) = &problem {
            // Surface schedule construction problems (bad window, error-rule
            // dimensions) during parsing rather than at run time.
            if let Err(e) = schedule_spec.build(p.dim()) {
                c.push("schedule", e.to_string());
            }
            // Error terms must be points of the domain, else the very first
            // combination can leave it.
            match &schedule_spec.errors {
                ErrorRule::Zero => {}
                ErrorRule::Constant { point } => {
                    if point.dim() == p.dim()
                        && !p.domain.contains(point, crate::mappings::DOMAIN_TOL).unwrap_or(false)
                    {
                        c.push("schedule.errors.point", "lies outside the problem domain");
                    }
                }
                ErrorRule::SeededUniform { lower, upper, .. } => {
                    // Corners inside a convex domain put the whole box inside.
                    if lower.dim() == p.dim() && upper.dim() == p.dim() {
                        let corners =
                            crate::geometry::CompactSet::axis_box(lower.clone(), upper.clone())
                                .map(|b| crate::geometry::box_vertices(&b))
                                .unwrap_or_default();
                        let inside = corners.iter().all(|corner| {
                            p.domain.contains(corner, crate::mappings::DOMAIN_TOL).unwrap_or(false)
                        });
                        if !inside {
                            c.push(
                                "schedule.errors",
                                "the [lower, upper] box is not contained in the problem domain",
                            );
                        }
                    }
                }
            }
        }
    }

    // --- run ---
    let rr = raw.run.unwrap_or_default();
    let mode = match rr.mode.as_deref() {
        Some("A") => ProcessMode::A,
        Some("B") => ProcessMode::B,
        Some(other) => {
            c.push("run.mode", format!("expected \"A\" or \"B\", got \"{other}\""));
            ProcessMode::A
        }
        None => {
            c.push("run.mode", "missing required field");
            ProcessMode::A
        }
    };
    let strategy = match rr.strategy.as_deref() {
        None | Some("nearest") => SelectionStrategy::Nearest,
        Some("seeded_random") => SelectionStrategy::SeededRandom,
        Some("first_listed") => SelectionStrategy::FirstListed,
        Some(other) => {
            c.push(
                "run.strategy",
                format!("expected nearest | seeded_random | first_listed, got \"{other}\""),
            );
            SelectionStrategy::Nearest
        }
    };
    let seeds = match rr.seeds {
        Some(s) if !s.is_empty() => s,
        Some(_) => {
            c.push("run.seeds", "must list at least one seed");
            Vec::new()
        }
        None => {
            c.push("run.seeds", "missing required field");
            Vec::new()
        }
    };
    let stagnation = match (rr.stagnation_tol, rr.stagnation_window) {
        (None, None) => None,
        (Some(tol), Some(window)) => Some(StagnationRule { tol, window }),
        _ => {
            c.push(
                "run.stagnation_tol",
                "stagnation_tol and stagnation_window must be set together",
            );
            None
        }
    };
    let residual_tol = match (rr.residual_tol, &stagnation) {
        (Some(t), _) => Some(t),
        (None, Some(_)) => None,
        (None, None) => Some(DEFAULT_RESIDUAL_TOL),
    };
    let stop = StopRule {
        max_iter: rr.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        residual_tol,
        stagnation,
    };
    let nonsingleton_policy = match rr.nonsingleton_policy.as_deref() {
        None | Some("warn") => NonSingletonPolicy::Warn,
        Some("refuse") => NonSingletonPolicy::Refuse,
        Some(other) => {
            c.push("run.nonsingleton_policy", format!("expected warn | refuse, got \"{other}\""));
            NonSingletonPolicy::Warn
        }
    };

    // --- output ---
    let ro = raw.output.unwrap_or_default();
    let output = OutputSpec {
        dir: PathBuf::from(ro.dir.unwrap_or_else(|| "out".into())),
        plots: ro.plots.unwrap_or(false),
    };

    if !c.errors.is_empty() {
        return Err(c.errors);
    }
    Ok(ExperimentConfig {
        problem: ProblemSpec {
            catalog: catalog_label,
            params,
            x1: x1.expect("validated above"),
            fixed_points,
        },
        schedule: schedule_spec,
        run: RunSpec { mode, strategy, seeds, stop, strict: rr.strict.unwrap_or(false), nonsingleton_policy },
        output,
    })
}

fn resolve_errors(re: RawErrors, c: &mut Collector) -> ErrorRule {
    match re.kind.as_deref() {
        None | Some("zero") => ErrorRule::Zero,
        Some("constant") => match re.point {
            Some(p) => match c.vector("schedule.errors.point", &p) {
                Some(point) => ErrorRule::Constant { point },
                None => ErrorRule::Zero,
            },
            None => {
                c.push("schedule.errors.point", "required for kind = \"constant\"");
                ErrorRule::Zero
            }
        },
        Some("seeded_uniform") => {
            let lower = re.lower.and_then(|p| c.vector("schedule.errors.lower", &p));
            let upper = re.upper.and_then(|p| c.vector("schedule.errors.upper", &p));
            match (lower, upper) {
                (Some(lower), Some(upper)) => {
                    ErrorRule::SeededUniform { lower, upper, seed: re.seed.unwrap_or(0) }
                }
                _ => {
                    c.push(
                        "schedule.errors",
                        "kind = \"seeded_uniform\" requires `lower` and `upper`",
                    );
                    ErrorRule::Zero
                }
            }
        }
        Some(other) => {
            c.push(
                "schedule.errors.kind",
                format!("expected zero | constant | seeded_uniform, got \"{other}\""),
            );
            ErrorRule::Zero
        }
    }
}

/// Emit a config back to TOML in the same schema `parse_config` reads.
pub fn emit(config: &ExperimentConfig) -> String {
    let errors = match &config.schedule.errors {
        ErrorRule::Zero => None,
        ErrorRule::Constant { point } => Some(RawErrors {
            kind: Some("constant".into()),
            point: Some(point.coords().to_vec()),
            ..Default::default()
        }),
        ErrorRule::SeededUniform { lower, upper, seed } => Some(RawErrors {
            kind: Some("seeded_uniform".into()),
            lower: Some(lower.coords().to_vec()),
            upper: Some(upper.coords().to_vec()),
            seed: Some(*seed),
            ..Default::default()
        }),
    };
    let raw = RawConfig {
        problem: Some(RawProblem {
            catalog: Some(config.problem.catalog.clone()),
            params: if config.problem.params.is_empty() {
                None
            } else {
                Some(config.problem.params.clone())
            },
            x1: Some(config.problem.x1.coords().to_vec()),
            fixed_points: config.problem.fixed_points.as_ref().map(|fp| RawFixedPoints {
                points: Some(fp.points.iter().map(|p| p.coords().to_vec()).collect()),
                strict_singleton_images: Some(fp.strict_singleton_images),
            }),
        }),
        schedule: Some(RawSchedule {
            builtin: config.schedule.builtin.clone(),
            coeffs: config.schedule.coeffs,
            window: config.schedule.window.map(|(a, b)| vec![a, b]),
            errors,
        }),
        run: Some(RawRun {
            mode: Some(config.run.mode.to_string()),
            strategy: Some(config.run.strategy.to_string()),
            seeds: Some(config.run.seeds.clone()),
            max_iter: Some(config.run.stop.max_iter),
            residual_tol: config.run.stop.residual_tol,
            stagnation_tol: config.run.stop.stagnation.map(|s| s.tol),
            stagnation_window: config.run.stop.stagnation.map(|s| s.window),
            strict: Some(config.run.strict),
            nonsingleton_policy: Some(
                match config.run.nonsingleton_policy {
                    NonSingletonPolicy::Warn => "warn",
                    NonSingletonPolicy::Refuse => "refuse",
                }
                .into(),
            ),
        }),
        output: Some(RawOutput {
            dir: Some(config.output.dir.display().to_string()),
            plots: Some(config.output.plots),
        }),
    };
    toml::to_string(&raw).expect("config serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [problem]
        catalog = "half_interval"
        x1 = [1.0]

        [schedule]
        builtin = "constant_decay"

        [run]
        mode = "A"
        seeds = [1]
    "#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.problem.catalog, "half_interval");
        assert_eq!(cfg.run.stop.max_iter, DEFAULT_MAX_ITER);
        assert_eq!(cfg.run.stop.residual_tol, Some(DEFAULT_RESIDUAL_TOL));
        assert_eq!(cfg.run.strategy, SelectionStrategy::Nearest);
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
        assert!(!cfg.run.strict);
    }

    #[test]
    fn x1_outside_domain_is_reported_with_its_path() {
        let text = MINIMAL.replace("x1 = [1.0]", "x1 = [2.0]");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "problem.x1"), "{errs:?}");
    }

    #[test]
    fn multiple_errors_are_collected_together() {
        let text = r#"
            [problem]
            catalog = "no_such_problem"
            x1 = [1.0]

            [schedule]

            [run]
            mode = "C"
            seeds = []
        "#;
        let errs = parse_config(text).unwrap_err();
        let paths: Vec<&str> = errs.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"problem.catalog"));
        assert!(paths.contains(&"schedule"));
        assert!(paths.contains(&"run.mode"));
        assert!(paths.contains(&"run.seeds"));
    }

    #[test]
    fn missing_required_fields_are_reported() {
        let errs = parse_config("").unwrap_err();
        let paths: Vec<&str> = errs.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"problem.catalog"));
        assert!(paths.contains(&"problem.x1"));
        assert!(paths.contains(&"run.mode"));
    }

    #[test]
    fn error_terms_outside_the_domain_are_rejected() {
        let constant = format!(
            "{MINIMAL}\n[schedule.errors]\nkind = \"constant\"\npoint = [1.5]\n"
        );
        let errs = parse_config(&constant).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "schedule.errors.point"), "{errs:?}");

        let uniform = format!(
            "{MINIMAL}\n[schedule.errors]\nkind = \"seeded_uniform\"\nlower = [0.0]\nupper = [2.0]\nseed = 1\n"
        );
        let errs = parse_config(&uniform).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "schedule.errors"), "{errs:?}");

        let fine = format!(
            "{MINIMAL}\n[schedule.errors]\nkind = \"seeded_uniform\"\nlower = [0.0]\nupper = [1.0]\nseed = 1\n"
        );
        assert!(parse_config(&fine).is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[problem.extras]\nfoo = 1\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn harmonic_b_parses_but_fails_strict_validation_later() {
        let text = r#"
            [problem]
            catalog = "half_interval"
            x1 = [1.0]

            [schedule]
            window = [0.3, 0.85]
            [schedule.coeffs]
            a = { kind = "constant", value = 0.3 }
            b = { kind = "power_decay", scale = 0.5, shift = 0.0, power = 1.0 }
            c = { kind = "constant", value = 0.3 }
            d = { kind = "constant", value = 0.2 }
            e = { kind = "constant", value = 0.0 }
            alpha = { kind = "constant", value = 0.3 }
            beta = { kind = "constant", value = 0.2 }
            gamma = { kind = "constant", value = 0.0 }

            [run]
            mode = "A"
            seeds = [1]
            strict = true
        "#;
        let cfg = parse_config(text).unwrap();
        let schedule = cfg.schedule.build(1).unwrap();
        let err = schedule.validate(10_000, true).unwrap_err();
        assert!(err.to_string().contains("summability"));
    }

    #[test]
    fn round_trip_through_emit() {
        let texts = [
            MINIMAL.to_string(),
            r#"
            [problem]
            catalog = "shrink_ball"
            x1 = [0.8, 0.0]
            [problem.fixed_points]
            points = [[0.0, 0.0]]
            strict_singleton_images = true

            [schedule]
            builtin = "constant_decay"
            window = [0.3, 0.8]
            [schedule.errors]
            kind = "seeded_uniform"
            lower = [0.0, 0.0]
            upper = [0.1, 0.1]
            seed = 3

            [run]
            mode = "B"
            strategy = "seeded_random"
            seeds = [1, 2]
            max_iter = 500
            residual_tol = 1e-6
            stagnation_tol = 1e-13
            stagnation_window = 8
            strict = false
            nonsingleton_policy = "refuse"

            [output]
            dir = "results"
            plots = true
            "#
            .to_string(),
        ];
        for text in texts {
            let cfg = parse_config(&text).unwrap();
            let again = parse_config(&emit(&cfg)).unwrap();
            assert_eq!(cfg, again);
        }
    }
}
