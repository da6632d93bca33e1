//! Standalone numeric verification of the auxiliary results the convergence
//! analysis rests on: the Hausdorff bound for condition-(C) maps, the
//! perturbed-recurrence limit lemma, and the four-point convexity
//! inequality in its inner-product form φ(t) = t².

use crate::error::{Error, Result};
use crate::geometry::{hausdorff, Vector};
use crate::mappings::MultiMap;
use crate::report::{CheckReport, Violation};
use crate::schedules::{tail_consistent_with_summability, SeqRule, DEFAULT_TAIL_THRESHOLD};

/// Check `H(Tx, Ty) ≤ 2 dist(x, Tx) + ‖x−y‖` over the supplied pairs.
///
/// The caller is expected to have verified condition (C) for the map on the
/// same grid; without it the bound need not hold.
pub fn lemma25_check(
    map: &MultiMap,
    pairs: &[(Vector, Vector)],
    tol: f64,
) -> Result<CheckReport> {
    let mut violations = Vec::new();
    for (x, y) in pairs {
        let img_x = map.evaluate(x)?;
        let img_y = map.evaluate(y)?;
        let lhs = hausdorff(&img_x, &img_y)?.value;
        let rhs = 2.0 * crate::geometry::dist_point_to_set(x, &img_x)? + x.dist(y)?;
        if lhs > rhs + tol {
            violations.push(Violation {
                x: Some(x.clone()),
                y: Some(y.clone()),
                index: None,
                lhs,
                rhs,
            });
        }
    }
    Ok(CheckReport::new(pairs.len(), violations, Vec::new()))
}

/// Inputs for the perturbed-recurrence limit oracle:
/// `a_{n+1} = (1 + δ_n) a_n + b_n` with nonnegative terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceTriple {
    pub a1: f64,
    pub delta: SeqRule,
    pub b: SeqRule,
}

/// Result of [`tan_xu_limit`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimitResult {
    /// The final iterate of the extremal recurrence.
    pub limit_estimate: f64,
    /// max − min over the last `horizon / 10` terms; the Cauchy evidence
    /// that the limit exists.
    pub tail_oscillation: f64,
    pub report: CheckReport,
}

/// Iterate the extremal recurrence (equality, the worst case the lemma's
/// inequality admits) to `horizon` and test whether the tail has settled.
///
/// Rejects inputs whose `δ` or `b` fail the summability tail proxy: the
/// lemma's hypothesis is violated and no limit is promised.
pub fn tan_xu_limit(seq: &SequenceTriple, horizon: u64, cauchy_tol: f64) -> Result<LimitResult> {
    if horizon < 100 {
        return Err(Error::HorizonTooSmall { min: 100, got: horizon });
    }
    if !(seq.a1.is_finite() && seq.a1 >= 0.0) {
        return Err(Error::Invalid { what: format!("a1 = {} must be finite and >= 0", seq.a1) });
    }
    for (name, rule) in [("delta", &seq.delta), ("b", &seq.b)] {
        let (tail, ok) = tail_consistent_with_summability(rule, horizon, DEFAULT_TAIL_THRESHOLD);
        if !ok {
            return Err(Error::NotSummable {
                name: name.into(),
                tail,
                threshold: DEFAULT_TAIL_THRESHOLD,
            });
        }
    }

    let window = (horizon / 10).max(1) as usize;
    let mut tail_terms = std::collections::VecDeque::with_capacity(window);
    let mut a = seq.a1;
    for n in 1..=horizon {
        let (dn, bn) = (seq.delta.at(n), seq.b.at(n));
        if dn < 0.0 || bn < 0.0 || !dn.is_finite() || !bn.is_finite() {
            return Err(Error::Invalid {
                what: format!("sequence terms must be nonnegative and finite (n = {n})"),
            });
        }
        if tail_terms.len() == window {
            tail_terms.pop_front();
        }
        tail_terms.push_back(a);
        if n < horizon {
            a = (1.0 + dn) * a + bn;
        }
    }
    let max = tail_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail_terms.iter().cloned().fold(f64::INFINITY, f64::min);
    let osc = max - min;
    let violations = if osc <= cauchy_tol {
        Vec::new()
    } else {
        vec![Violation { x: None, y: None, index: Some(horizon), lhs: osc, rhs: cauchy_tol }]
    };
    Ok(LimitResult {
        limit_estimate: a,
        tail_oscillation: osc,
        report: CheckReport::new(window, violations, Vec::new()),
    })
}

/// Deterministic random four-point tuples with simplex weights, for
/// exercising the convexity checks at scale.
pub fn random_simplex_tuples(
    count: usize,
    dim: usize,
    seed: u64,
) -> (Vec<[Vector; 4]>, Vec<[f64; 4]>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut tuples = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for _ in 0..count {
        let pts: [Vector; 4] = std::array::from_fn(|_| {
            Vector::new((0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
                .expect("finite coords")
        });
        // Normalized exponentials are uniform on the simplex.
        let raw: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-12).ln());
        let total: f64 = raw.iter().sum();
        tuples.push(pts);
        weights.push(raw.map(|w| w / total));
    }
    (tuples, weights)
}

fn validate_weights(weights: &[f64; 4]) -> Result<()> {
    for (i, w) in weights.iter().enumerate() {
        if *w < 0.0 {
            return Err(Error::NegativeWeight { weight: *w, index: i });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum, tol: 1e-12 });
    }
    Ok(())
}

fn norm_sq(v: &Vector) -> f64 {
    let n = v.norm();
    n * n
}

/// The convexity inequality with φ(t) = t²:
/// `‖αx+βy+γz+ηw‖² ≤ α‖x‖² + β‖y‖² + γ‖z‖² + η‖w‖² − αβ‖x−y‖²`.
///
/// Exact in inner-product geometry, so any `tol` at rounding scale passes.
pub fn convexity_identity_check(
    tuples: &[[Vector; 4]],
    weights: &[[f64; 4]],
    tol: f64,
) -> Result<CheckReport> {
    if tuples.len() != weights.len() {
        return Err(Error::Invalid {
            what: format!("{} tuples but {} weight rows", tuples.len(), weights.len()),
        });
    }
    let mut violations = Vec::new();
    for (idx, (pts, ws)) in tuples.iter().zip(weights).enumerate() {
        validate_weights(ws)?;
        let combo = crate::geometry::convex_combine(pts.as_slice(), ws.as_slice())?;
        let lhs = norm_sq(&combo);
        let rhs = ws.iter().zip(pts).map(|(w, p)| w * norm_sq(p)).sum::<f64>()
            - ws[0] * ws[1] * norm_sq(&pts[0].sub(&pts[1])?);
        if lhs > rhs + tol {
            violations.push(Violation {
                x: Some(pts[0].clone()),
                y: Some(pts[1].clone()),
                index: Some(idx as u64),
                lhs,
                rhs,
            });
        }
    }
    Ok(CheckReport::new(tuples.len(), violations, Vec::new()))
}

/// The full four-point identity behind the inequality:
/// `‖Σλᵢxᵢ‖² = Σλᵢ‖xᵢ‖² − Σ_{i<j} λᵢλⱼ‖xᵢ−xⱼ‖²`,
/// checked as an equality to `tol`. Strictly stronger than
/// [`convexity_identity_check`], which keeps only the (0,1) pair term.
pub fn four_point_identity_check(
    tuples: &[[Vector; 4]],
    weights: &[[f64; 4]],
    tol: f64,
) -> Result<CheckReport> {
    if tuples.len() != weights.len() {
        return Err(Error::Invalid {
            what: format!("{} tuples but {} weight rows", tuples.len(), weights.len()),
        });
    }
    let mut violations = Vec::new();
    for (idx, (pts, ws)) in tuples.iter().zip(weights).enumerate() {
        validate_weights(ws)?;
        let combo = crate::geometry::convex_combine(pts.as_slice(), ws.as_slice())?;
        let lhs = norm_sq(&combo);
        let mut rhs = ws.iter().zip(pts).map(|(w, p)| w * norm_sq(p)).sum::<f64>();
        for i in 0..4 {
            for j in (i + 1)..4 {
                rhs -= ws[i] * ws[j] * norm_sq(&pts[i].sub(&pts[j])?);
            }
        }
        if (lhs - rhs).abs() > tol {
            violations.push(Violation {
                x: Some(pts[0].clone()),
                y: Some(pts[1].clone()),
                index: Some(idx as u64),
                lhs,
                rhs,
            });
        }
    }
    Ok(CheckReport::new(tuples.len(), violations, Vec::new()))
}
