//! Coefficient and error sequences for the iterative processes, plus
//! validation of the hypotheses the convergence theorems place on them.
//!
//! Summability of a sequence cannot be decided from finitely many terms, so
//! `validate` uses a tail-sum proxy: the partial sum over the second half of
//! the horizon must stay below a threshold. A pass is reported as
//! "consistent with summability", never as proof.

use crate::error::{Error, Result};
use crate::geometry::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default tail-sum threshold for the summability proxy.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-2;

/// A deterministic scalar sequence `n ↦ value`, indexed from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeqRule {
    Constant { value: f64 },
    /// `scale / (n + shift)^power`.
    PowerDecay { scale: f64, shift: f64, power: f64 },
}

impl SeqRule {
    pub const ZERO: SeqRule = SeqRule::Constant { value: 0.0 };

    pub fn constant(value: f64) -> Self {
        SeqRule::Constant { value }
    }

    /// `1 / (n + 1)^2`, the built-in summable decay.
    pub fn inverse_square_shifted() -> Self {
        SeqRule::PowerDecay { scale: 1.0, shift: 1.0, power: 2.0 }
    }

    pub fn at(&self, n: u64) -> f64 {
        match *self {
            SeqRule::Constant { value } => value,
            SeqRule::PowerDecay { scale, shift, power } => {
                scale / (n as f64 + shift).powf(power)
            }
        }
    }
}

/// Partial sum of `rule` over `n ∈ [lo, hi]`.
pub fn partial_sum(rule: &SeqRule, lo: u64, hi: u64) -> f64 {
    (lo..=hi).map(|n| rule.at(n)).sum()
}

/// Tail-sum summability proxy: the partial sum over the second half of the
/// horizon, compared against `threshold`.
pub fn tail_consistent_with_summability(rule: &SeqRule, horizon: u64, threshold: f64) -> (f64, bool) {
    let lo = (horizon / 2).max(1);
    let tail = partial_sum(rule, lo, horizon);
    (tail, tail <= threshold)
}

/// The eight coefficient sequences of the three-step process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffRules {
    pub a: SeqRule,
    pub b: SeqRule,
    pub c: SeqRule,
    pub d: SeqRule,
    pub e: SeqRule,
    pub alpha: SeqRule,
    pub beta: SeqRule,
    pub gamma: SeqRule,
}

/// Generator for the bounded error sequences `s_n, s'_n, s''_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorRule {
    /// All error terms are the zero vector.
    Zero,
    /// Every error term equals one fixed point of the domain.
    Constant { point: Vector },
    /// Error terms drawn uniformly from a box contained in the domain,
    /// deterministically per (seed, n).
    SeededUniform { lower: Vector, upper: Vector, seed: u64 },
}

/// Per-iteration coefficients and error vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTuple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `(s_n, s'_n, s''_n)`.
    pub errors: [Vector; 3],
}

impl CoefficientTuple {
    /// `b_n + e_n + γ_n`, the weight the Fejér bound places on the errors.
    pub fn error_weight(&self) -> f64 {
        self.b + self.e + self.gamma
    }
}

/// Immutable coefficient/error schedule for one experiment dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    label: String,
    dim: usize,
    coeffs: CoeffRules,
    /// The window `[a, b] ⊂ (0, 1)` the theorem requires each coefficient
    /// sum to stay inside.
    window: (f64, f64),
    errors: ErrorRule,
}

impl Schedule {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        coeffs: CoeffRules,
        window: (f64, f64),
        errors: ErrorRule,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid { what: "schedule dimension must be >= 1".into() });
        }
        let (lo, hi) = window;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::Invalid {
                what: format!("window [{lo}, {hi}] must satisfy 0 < a <= b < 1"),
            });
        }
        match &errors {
            ErrorRule::Zero => {}
            ErrorRule::Constant { point } => {
                if point.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: point.dim() });
                }
            }
            ErrorRule::SeededUniform { lower, upper, .. } => {
                if lower.dim() != dim || upper.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: lower.dim() });
                }
                for (i, (l, u)) in lower.coords().iter().zip(upper.coords()).enumerate() {
                    if l > u {
                        return Err(Error::InvalidBox { coord: i });
                    }
                }
            }
        }
        Ok(Schedule { label: label.into(), dim, coeffs, window, errors })
    }

    /// Built-in schedules:
    /// - `constant_decay`: a = c = α = 0.3, d = β = 0.2,
    ///   b = e = γ = 1/(n+1)², window [0.3, 0.75]. Strict-valid.
    /// - `mann`: α = 0.5, everything else 0. Degenerate; validates only
    ///   non-strictly.
    /// - `ishikawa`: c = α = 0.5, everything else 0. Degenerate.
    pub fn builtin(name: &str, dim: usize) -> Result<Schedule> {
        let zero = SeqRule::ZERO;
        let (coeffs, window) = match name {
            "constant_decay" => (
                CoeffRules {
                    a: SeqRule::constant(0.3),
                    b: SeqRule::inverse_square_shifted(),
                    c: SeqRule::constant(0.3),
                    d: SeqRule::constant(0.2),
                    e: SeqRule::inverse_square_shifted(),
                    alpha: SeqRule::constant(0.3),
                    beta: SeqRule::constant(0.2),
                    gamma: SeqRule::inverse_square_shifted(),
                },
                (0.3, 0.75),
            ),
            "mann" => (
                CoeffRules {
                    a: zero,
                    b: zero,
                    c: zero,
                    d: zero,
                    e: zero,
                    alpha: SeqRule::constant(0.5),
                    beta: zero,
                    gamma: zero,
                },
                (0.3, 0.75),
            ),
            "ishikawa" => (
                CoeffRules {
                    a: zero,
                    b: zero,
                    c: SeqRule::constant(0.5),
                    d: zero,
                    e: zero,
                    alpha: SeqRule::constant(0.5),
                    beta: zero,
                    gamma: zero,
                },
                (0.3, 0.75),
            ),
            _ => {
                return Err(Error::Invalid { what: format!("unknown builtin schedule `{name}`") })
            }
        };
        Schedule::new(name, dim, coeffs, window, ErrorRule::Zero)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn coeff_rules(&self) -> &CoeffRules {
        &self.coeffs
    }

    pub fn error_rule(&self) -> &ErrorRule {
        &self.errors
    }

    /// Replace the error rule, revalidating dimensions.
    pub fn with_errors(self, errors: ErrorRule) -> Result<Schedule> {
        Schedule::new(self.label, self.dim, self.coeffs, self.window, errors)
    }

    /// Upper bound on the error-term norms, from the rule's geometry.
    pub fn error_bound(&self) -> f64 {
        match &self.errors {
            ErrorRule::Zero => 0.0,
            ErrorRule::Constant { point } => point.norm(),
            ErrorRule::SeededUniform { lower, upper, .. } => lower
                .coords()
                .iter()
                .zip(upper.coords())
                .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// The deterministic coefficient/error tuple for index `n >= 1`.
    pub fn coefficients_at(&self, n: u64) -> Result<CoefficientTuple> {
        if n == 0 {
            return Err(Error::ZeroScheduleIndex);
        }
        let c = &self.coeffs;
        let tuple = CoefficientTuple {
            a: c.a.at(n),
            b: c.b.at(n),
            c: c.c.at(n),
            d: c.d.at(n),
            e: c.e.at(n),
            alpha: c.alpha.at(n),
            beta: c.beta.at(n),
            gamma: c.gamma.at(n),
            errors: self.errors_at(n)?,
        };
        for (name, v) in [
            ("a", tuple.a),
            ("b", tuple.b),
            ("c", tuple.c),
            ("d", tuple.d),
            ("e", tuple.e),
            ("alpha", tuple.alpha),
            ("beta", tuple.beta),
            ("gamma", tuple.gamma),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InfeasibleCoefficients {
                    n,
                    what: format!("{name} = {v} outside [0, 1]"),
                });
            }
        }
        let feas = 1.0 + 1e-12;
        if tuple.a + tuple.b > feas {
            return Err(Error::InfeasibleCoefficients {
                n,
                what: format!("a + b = {} > 1", tuple.a + tuple.b),
            });
        }
        if tuple.c + tuple.d + tuple.e > feas {
            return Err(Error::InfeasibleCoefficients {
                n,
                what: format!("c + d + e = {} > 1", tuple.c + tuple.d + tuple.e),
            });
        }
        if tuple.alpha + tuple.beta + tuple.gamma > feas {
            return Err(Error::InfeasibleCoefficients {
                n,
                what: format!("alpha + beta + gamma = {} > 1", tuple.alpha + tuple.beta + tuple.gamma),
            });
        }
        Ok(tuple)
    }

    fn errors_at(&self, n: u64) -> Result<[Vector; 3]> {
        match &self.errors {
            ErrorRule::Zero => Ok(std::array::from_fn(|_| Vector::zero(self.dim))),
            ErrorRule::Constant { point } => Ok(std::array::from_fn(|_| point.clone())),
            ErrorRule::SeededUniform { lower, upper, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(n);
                let mut draw = || -> Result<Vector> {
                    use rand::Rng;
                    let coords = lower
                        .coords()
                        .iter()
                        .zip(upper.coords())
                        .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                        .collect();
                    Vector::new(coords)
                };
                Ok([draw()?, draw()?, draw()?])
            }
        }
    }

    /// `θ_n = M(b_n + e_n + γ_n)` from the per-step Fejér bound.
    pub fn theta_at(&self, n: u64, m: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::ZeroScheduleIndex);
        }
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::Invalid { what: format!("M must be finite and >= 0, got {m}") });
        }
        let c = &self.coeffs;
        Ok(m * (c.b.at(n) + c.e.at(n) + c.gamma.at(n)))
    }

    /// Check the theorem hypotheses over `n <= horizon` with the default
    /// tail threshold.
    pub fn validate(&self, horizon: u64, strict: bool) -> Result<ValidationReport> {
        self.validate_with_threshold(horizon, strict, DEFAULT_TAIL_THRESHOLD)
    }

    /// As [`validate`](Self::validate) with an explicit tail threshold.
    ///
    /// Strict mode turns the first violation into an error; otherwise every
    /// violation becomes a warning and the run is permitted (the degenerate
    /// Mann/Ishikawa modes operate outside the theorem hypotheses this way).
    pub fn validate_with_threshold(
        &self,
        horizon: u64,
        strict: bool,
        tail_threshold: f64,
    ) -> Result<ValidationReport> {
        if horizon < 1 {
            return Err(Error::HorizonTooSmall { min: 1, got: horizon });
        }
        let mut warnings = Vec::new();
        let (lo, hi) = self.window;
        let slack = 1e-12;
        let bound = self.error_bound() + 1e-12;

        let mut window_bad: Option<(u64, String)> = None;
        let mut bound_bad: Option<(u64, String)> = None;
        let mut n_window_bad = 0u64;
        for n in 1..=horizon {
            let t = self.coefficients_at(n)?;
            let sums = [
                ("a_n+b_n", t.a + t.b),
                ("c_n+d_n+e_n", t.c + t.d + t.e),
                ("alpha_n+beta_n+gamma_n", t.alpha + t.beta + t.gamma),
            ];
            for (name, s) in sums {
                if s < lo - slack || s > hi + slack {
                    n_window_bad += 1;
                    if window_bad.is_none() {
                        window_bad =
                            Some((n, format!("{name} = {s} outside window [{lo}, {hi}]")));
                    }
                }
            }
            for (k, err) in t.errors.iter().enumerate() {
                let norm = err.norm();
                if norm > bound && bound_bad.is_none() {
                    bound_bad = Some((
                        n,
                        format!("error term {k} has norm {norm} > bound {}", self.error_bound()),
                    ));
                }
            }
        }
        if let Some((n, what)) = &window_bad {
            if strict {
                return Err(Error::ScheduleViolation { n: *n, what: what.clone() });
            }
            warnings.push(format!(
                "window: first at n={n}: {what} ({n_window_bad} offending sums over horizon {horizon})"
            ));
        }
        if let Some((n, what)) = &bound_bad {
            if strict {
                return Err(Error::ScheduleViolation { n: *n, what: what.clone() });
            }
            warnings.push(format!("error bound: first at n={n}: {what}"));
        }

        let c = &self.coeffs;
        let mut tails = [0.0f64; 3];
        for (i, (name, rule)) in
            [("b", &c.b), ("e", &c.e), ("gamma", &c.gamma)].into_iter().enumerate()
        {
            let (tail, ok) = tail_consistent_with_summability(rule, horizon, tail_threshold);
            tails[i] = tail;
            if !ok {
                if strict {
                    return Err(Error::NotSummable {
                        name: name.into(),
                        tail,
                        threshold: tail_threshold,
                    });
                }
                warnings.push(format!(
                    "summability proxy: tail sum of {name} over [{}, {horizon}] is {tail:.3e} > {tail_threshold:.1e}",
                    (horizon / 2).max(1)
                ));
            }
        }

        Ok(ValidationReport {
            strict_ok: warnings.is_empty(),
            warnings,
            tail_sums: tails,
            horizon,
            tail_threshold,
        })
    }
}

/// Outcome of schedule validation.
///
/// `strict_ok` means the schedule would also pass in strict mode; tail sums
/// are reported as evidence consistent with summability, not as proof of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub strict_ok: bool,
    pub warnings: Vec<String>,
    /// Tail sums of (b, e, gamma) over the second half of the horizon.
    pub tail_sums: [f64; 3],
    pub horizon: u64,
    pub tail_threshold: f64,
}
