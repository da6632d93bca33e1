//! Vectors, compact set representations, point-to-set distance, Hausdorff
//! distance, and metric projection under the Euclidean norm.
//!
//! Four set representations are supported: singletons, finite point sets,
//! closed balls, and axis-aligned boxes. All are nonempty, closed, bounded,
//! and proximal, so every external point has a nearest point and the
//! Hausdorff distance between them is well defined. Same-kind pairs and
//! singleton-vs-anything pairs have exact closed forms; the remaining mixed
//! pairs fall back to deterministic boundary sampling and are flagged
//! approximate.

mod sample;

pub use sample::{boundary_samples, hausdorff_sampled};
pub(crate) use sample::uniform_point;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest box dimension for which 2^d vertex enumeration is attempted.
pub const MAX_VERTEX_ENUM_DIM: usize = 16;

/// Sample count used when exact `hausdorff` delegates mixed-kind pairs to
/// the sampled estimator.
pub const MIXED_KIND_SAMPLES: usize = 100_000;

/// Seed used for the mixed-kind fallback, fixed so `hausdorff` stays a pure
/// function of its two arguments.
pub const MIXED_KIND_SEED: u64 = 0;

/// A point of the ambient finite-dimensional Euclidean space.
///
/// Coordinates are always finite; the dimension is fixed per experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector {
    coords: Vec<f64>,
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Vector::new(coords).map_err(serde::de::Error::custom)
    }
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid {
                what: "vector dimension must be >= 1".into(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "vector coordinates" });
        }
        Ok(Vector { coords })
    }

    /// 1-D convenience constructor.
    pub fn scalar(x: f64) -> Result<Self> {
        Vector::new(vec![x])
    }

    pub fn zero(dim: usize) -> Self {
        Vector { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, k: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|c| k * c).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// A nonempty closed bounded subset of the ambient space.
///
/// Balls and boxes are convex (hence proximal); finite point sets are
/// proximal by finiteness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompactSet {
    Singleton { point: Vector },
    FinitePointSet { points: Vec<Vector> },
    Ball { center: Vector, radius: f64 },
    AxisBox { lower: Vector, upper: Vector },
}

impl CompactSet {
    pub fn singleton(point: Vector) -> Self {
        CompactSet::Singleton { point }
    }

    pub fn points(points: Vec<Vector>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let d = first.dim();
        for p in &points {
            check_dims(d, p.dim())?;
        }
        Ok(CompactSet::FinitePointSet { points })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidRadius { radius });
        }
        Ok(CompactSet::Ball { center, radius })
    }

    pub fn axis_box(lower: Vector, upper: Vector) -> Result<Self> {
        check_dims(lower.dim(), upper.dim())?;
        for (i, (l, u)) in lower.coords().iter().zip(upper.coords()).enumerate() {
            if l > u {
                return Err(Error::InvalidBox { coord: i });
            }
        }
        Ok(CompactSet::AxisBox { lower, upper })
    }

    /// 1-D interval [lo, hi].
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        CompactSet::axis_box(Vector::scalar(lo)?, Vector::scalar(hi)?)
    }

    pub fn dim(&self) -> usize {
        match self {
            CompactSet::Singleton { point } => point.dim(),
            CompactSet::FinitePointSet { points } => points[0].dim(),
            CompactSet::Ball { center, .. } => center.dim(),
            CompactSet::AxisBox { lower, .. } => lower.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CompactSet::Singleton { .. } => "singleton",
            CompactSet::FinitePointSet { .. } => "finite_point_set",
            CompactSet::Ball { .. } => "ball",
            CompactSet::AxisBox { .. } => "axis_box",
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(dist_point_to_set(x, self)? <= tol)
    }
}

/// Infimum distance from `x` to the set `e`, exact for every representation.
///
/// Zero exactly when `x` belongs to the set.
pub fn dist_point_to_set(x: &Vector, e: &CompactSet) -> Result<f64> {
    check_dims(e.dim(), x.dim())?;
    if !x.is_finite() {
        return Err(Error::NonFinite { context: "query point" });
    }
    let d = match e {
        CompactSet::Singleton { point } => x.dist(point)?,
        CompactSet::FinitePointSet { points } => points
            .iter()
            .map(|p| x.dist(p).expect("dims checked at construction"))
            .fold(f64::INFINITY, f64::min),
        CompactSet::Ball { center, radius } => (x.dist(center)? - radius).max(0.0),
        CompactSet::AxisBox { lower, upper } => x
            .coords()
            .iter()
            .zip(lower.coords())
            .zip(upper.coords())
            .map(|((&c, &l), &u)| {
                let gap = (l - c).max(c - u).max(0.0);
                gap * gap
            })
            .sum::<f64>()
            .sqrt(),
    };
    Ok(d)
}

/// Nearest point of `e` to `x`: `‖x − project(x,e)‖ = dist(x,e)`.
///
/// Finite point sets break ties toward the lowest index so traces stay
/// reproducible.
pub fn project(x: &Vector, e: &CompactSet) -> Result<Vector> {
    check_dims(e.dim(), x.dim())?;
    match e {
        CompactSet::Singleton { point } => Ok(point.clone()),
        CompactSet::FinitePointSet { points } => {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, p) in points.iter().enumerate() {
                let d = x.dist(p)?;
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            Ok(points[best].clone())
        }
        CompactSet::Ball { center, radius } => {
            let gap = x.sub(center)?;
            let n = gap.norm();
            if n <= *radius {
                Ok(x.clone())
            } else {
                Ok(center.add(&gap.scale(radius / n))?)
            }
        }
        CompactSet::AxisBox { lower, upper } => {
            let coords = x
                .coords()
                .iter()
                .zip(lower.coords())
                .zip(upper.coords())
                .map(|((&c, &l), &u)| c.clamp(l, u))
                .collect();
            Vector::new(coords)
        }
    }
}

/// Supremum distance from `x` over the set `e` (the farthest point), in
/// closed form for every representation.
fn farthest_distance(x: &Vector, e: &CompactSet) -> Result<f64> {
    check_dims(e.dim(), x.dim())?;
    let d = match e {
        CompactSet::Singleton { point } => x.dist(point)?,
        CompactSet::FinitePointSet { points } => points
            .iter()
            .map(|p| x.dist(p).expect("dims checked at construction"))
            .fold(0.0, f64::max),
        CompactSet::Ball { center, radius } => x.dist(center)? + radius,
        // ‖·−x‖ is convex, so the sup over the box sits at the per-coordinate
        // farthest vertex; no enumeration needed.
        CompactSet::AxisBox { lower, upper } => x
            .coords()
            .iter()
            .zip(lower.coords())
            .zip(upper.coords())
            .map(|((&c, &l), &u)| {
                let gap = (c - l).abs().max((u - c).abs());
                gap * gap
            })
            .sum::<f64>()
            .sqrt(),
    };
    Ok(d)
}

/// Hausdorff distance together with whether the value came from a closed
/// form or the sampled fallback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffResult {
    pub value: f64,
    pub exact: bool,
}

/// Hausdorff distance `max(sup_{x∈A} dist(x,B), sup_{y∈B} dist(y,A))`.
///
/// Exact for same-kind pairs and for singleton-vs-anything; the remaining
/// mixed pairs delegate to [`hausdorff_sampled`] with fixed sample count and
/// seed, and the result is flagged `exact: false`.
pub fn hausdorff(a: &CompactSet, b: &CompactSet) -> Result<HausdorffResult> {
    check_dims(a.dim(), b.dim())?;
    use CompactSet::*;
    let exact = match (a, b) {
        (Singleton { point }, _) => Some(farthest_distance(point, b)?),
        (_, Singleton { point }) => Some(farthest_distance(point, a)?),
        (FinitePointSet { points: pa }, FinitePointSet { points: pb }) => {
            let d_ab = pa
                .iter()
                .map(|p| dist_point_to_set(p, b))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let d_ba = pb
                .iter()
                .map(|p| dist_point_to_set(p, a))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Some(d_ab.max(d_ba))
        }
        (Ball { center: c1, radius: r1 }, Ball { center: c2, radius: r2 }) => {
            Some(c1.dist(c2)? + (r1 - r2).abs())
        }
        (AxisBox { .. }, AxisBox { .. }) => Some(box_box_hausdorff(a, b)?),
        _ => None,
    };
    match exact {
        Some(value) => Ok(HausdorffResult { value, exact: true }),
        None => Ok(HausdorffResult {
            value: hausdorff_sampled(a, b, MIXED_KIND_SAMPLES, MIXED_KIND_SEED)?,
            exact: false,
        }),
    }
}

/// Directed sups over boxes are attained at vertices because `dist(·, B)` is
/// convex; enumerate both vertex sets, guarded at `MAX_VERTEX_ENUM_DIM`.
fn box_box_hausdorff(a: &CompactSet, b: &CompactSet) -> Result<f64> {
    let dim = a.dim();
    if dim > MAX_VERTEX_ENUM_DIM {
        return Err(Error::VertexEnumerationTooLarge { dim, max: MAX_VERTEX_ENUM_DIM });
    }
    let directed = |from: &CompactSet, to: &CompactSet| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for v in box_vertices(from) {
            worst = worst.max(dist_point_to_set(&v, to)?);
        }
        Ok(worst)
    };
    Ok(directed(a, b)?.max(directed(b, a)?))
}

pub(crate) fn box_vertices(e: &CompactSet) -> Vec<Vector> {
    let CompactSet::AxisBox { lower, upper } = e else {
        return Vec::new();
    };
    let d = lower.dim();
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0u64..(1u64 << d) {
        let coords = (0..d)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    upper.coords()[i]
                } else {
                    lower.coords()[i]
                }
            })
            .collect();
        out.push(Vector { coords });
    }
    out
}

/// Tolerance on the weight sum accepted by [`convex_combine`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// `Σ wᵢ pᵢ` for nonnegative weights summing to one.
pub fn convex_combine(points: &[Vector], weights: &[f64]) -> Result<Vector> {
    if points.len() != weights.len() {
        return Err(Error::WeightCount { weights: weights.len(), points: points.len() });
    }
    if points.is_empty() {
        return Err(Error::WeightCount { weights: 0, points: 0 });
    }
    for (i, &w) in weights.iter().enumerate() {
        if w < 0.0 {
            return Err(Error::NegativeWeight { weight: w, index: i });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSum { sum, tol: WEIGHT_SUM_TOL });
    }
    let d = points[0].dim();
    let mut acc = vec![0.0; d];
    for (p, &w) in points.iter().zip(weights) {
        check_dims(d, p.dim())?;
        for (a, c) in acc.iter_mut().zip(p.coords()) {
            *a += w * c;
        }
    }
    Vector::new(acc)
}
