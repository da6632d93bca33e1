//! Built-in test problems with analytically known fixed-point structure.
//!
//! Each catalog entry bundles three maps on a common convex domain, the
//! known common fixed points, and a default gauge for condition (II). The
//! entries cover the hypotheses of the convergence theorems, the metric
//! projection path of process (B), and two falsification controls:
//! `suzuki` satisfies condition (C) without being nonexpansive, and
//! `expanding` violates condition (C) outright.

use crate::error::{Error, Result};
use crate::geometry::{CompactSet, Vector};
use crate::mappings::{ConditionGauge, KnownFixedPoints, MultiMap};

/// A fixed-point problem: three maps over one domain.
#[derive(Debug, Clone)]
pub struct Problem {
    pub label: String,
    pub maps: [MultiMap; 3],
    pub domain: CompactSet,
    pub fixed_points: Option<KnownFixedPoints>,
    pub gauge: Option<ConditionGauge>,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}

/// Labels accepted by [`problem`].
pub const LABELS: [&str; 5] = ["half_interval", "shrink_ball", "suzuki", "expanding", "halving"];

/// Build a catalog problem from its label and optional parameter list.
///
/// Parameters:
/// - `half_interval`: three divisors `> 1` (default `[2, 3, 4]`);
///   `T_i x = [0, x / div_i]` on `[0, 1]`.
/// - `shrink_ball`: three radius divisors `> 2` (default `[4, 8, 12]`);
///   `T_i x = Ball(x/2, ‖x‖ / div_i)` on the unit disk in d = 2.
/// - `suzuki`: no parameters; on `[0, 3]`, `Tx = {0}` for `x ≠ 3` and
///   `T3 = {1}`. Checker calibration only: discontinuous at 3, so it is not
///   used in convergence runs.
/// - `expanding`: no parameters; `Tx = {2x}` on `[0, 1]`. Designated
///   negative control.
/// - `halving`: optional dimension (default 1); `T_i x = {x/2}` on
///   `[0, 1]^d`.
pub fn problem(label: &str, params: &[f64]) -> Result<Problem> {
    match label {
        "half_interval" => half_interval(params),
        "shrink_ball" => shrink_ball(params),
        "suzuki" => suzuki(params),
        "expanding" => expanding(params),
        "halving" => halving(params),
        _ => Err(Error::UnknownCatalogLabel { label: label.to_string() }),
    }
}

fn three_params(label: &str, params: &[f64], default: [f64; 3], min: f64) -> Result<[f64; 3]> {
    let chosen = match params.len() {
        0 => default,
        3 => [params[0], params[1], params[2]],
        n => {
            return Err(Error::BadCatalogParams {
                label: label.to_string(),
                what: format!("expected 0 or 3 parameters, got {n}"),
            })
        }
    };
    for p in chosen {
        if !(p.is_finite() && p > min) {
            return Err(Error::BadCatalogParams {
                label: label.to_string(),
                what: format!("divisor {p} must be finite and > {min}"),
            });
        }
    }
    Ok(chosen)
}

fn no_params(label: &str, params: &[f64]) -> Result<()> {
    if params.is_empty() {
        Ok(())
    } else {
        Err(Error::BadCatalogParams {
            label: label.to_string(),
            what: format!("takes no parameters, got {}", params.len()),
        })
    }
}

fn half_interval(params: &[f64]) -> Result<Problem> {
    let divisors = three_params("half_interval", params, [2.0, 3.0, 4.0], 1.0)?;
    let domain = CompactSet::interval(0.0, 1.0)?;
    let maps = std::array::from_fn(|i| {
        let div = divisors[i];
        MultiMap::new(format!("half_interval_{}", i + 1), domain.clone(), move |x| {
            let hi = x.coords()[0] / div;
            CompactSet::interval(0.0, hi).expect("0 <= x/div on [0,1]")
        })
    });
    Ok(Problem {
        label: "half_interval".into(),
        maps,
        domain,
        fixed_points: Some(KnownFixedPoints::new(vec![Vector::scalar(0.0)?], true)?),
        gauge: Some(ConditionGauge::linear(0.5)),
    })
}

fn shrink_ball(params: &[f64]) -> Result<Problem> {
    let divisors = three_params("shrink_ball", params, [4.0, 8.0, 12.0], 2.0)?;
    let center = Vector::zero(2);
    let domain = CompactSet::ball(center.clone(), 1.0)?;
    let maps = std::array::from_fn(|i| {
        let div = divisors[i];
        MultiMap::new(format!("shrink_ball_{}", i + 1), domain.clone(), move |x| {
            CompactSet::ball(x.scale(0.5), x.norm() / div).expect("radius >= 0")
        })
    });
    Ok(Problem {
        label: "shrink_ball".into(),
        maps,
        domain,
        fixed_points: Some(KnownFixedPoints::new(vec![center], true)?),
        gauge: Some(ConditionGauge::linear(0.5)),
    })
}

fn suzuki(params: &[f64]) -> Result<Problem> {
    no_params("suzuki", params)?;
    let domain = CompactSet::interval(0.0, 3.0)?;
    let maps = std::array::from_fn(|i| {
        MultiMap::new(format!("suzuki_{}", i + 1), domain.clone(), |x| {
            let value = if x.coords()[0] == 3.0 { 1.0 } else { 0.0 };
            CompactSet::singleton(Vector::scalar(value).expect("finite"))
        })
    });
    Ok(Problem {
        label: "suzuki".into(),
        maps,
        domain,
        fixed_points: Some(KnownFixedPoints::new(vec![Vector::scalar(0.0)?], true)?),
        gauge: Some(ConditionGauge::linear(0.5)),
    })
}

fn expanding(params: &[f64]) -> Result<Problem> {
    no_params("expanding", params)?;
    let domain = CompactSet::interval(0.0, 1.0)?;
    let maps = std::array::from_fn(|i| {
        MultiMap::new(format!("expanding_{}", i + 1), domain.clone(), |x| {
            CompactSet::singleton(x.scale(2.0))
        })
    });
    Ok(Problem {
        label: "expanding".into(),
        maps,
        domain,
        fixed_points: Some(KnownFixedPoints::new(vec![Vector::scalar(0.0)?], true)?),
        gauge: Some(ConditionGauge::linear(0.5)),
    })
}

fn halving(params: &[f64]) -> Result<Problem> {
    let dim = match params {
        [] => 1usize,
        [d] if d.fract() == 0.0 && *d >= 1.0 && *d <= 16.0 => *d as usize,
        _ => {
            return Err(Error::BadCatalogParams {
                label: "halving".into(),
                what: "expected at most one integer dimension in [1, 16]".into(),
            })
        }
    };
    let domain = CompactSet::axis_box(Vector::zero(dim), Vector::new(vec![1.0; dim])?)?;
    let maps = std::array::from_fn(|i| {
        MultiMap::new(format!("halving_{}", i + 1), domain.clone(), |x| {
            CompactSet::singleton(x.scale(0.5))
        })
    });
    Ok(Problem {
        label: "halving".into(),
        maps,
        domain,
        fixed_points: Some(KnownFixedPoints::new(vec![Vector::zero(dim)], true)?),
        gauge: Some(ConditionGauge::linear(0.5)),
    })
}
