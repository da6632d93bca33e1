//! Set-valued mappings, the metric-projection wrapper used by process (B),
//! and empirical checkers for the mapping conditions the convergence
//! theorems assume.
//!
//! The checkers are grid-based: the conditions quantify over all pairs of
//! points, which is undecidable for black-box maps, so each check evaluates
//! the defining inequality on a user-supplied grid and reports the grid with
//! any counterexamples. Tolerances are applied so that discretization can
//! only miss a violation, never manufacture one.

use crate::error::{Error, Result};
use crate::geometry::{dist_point_to_set, hausdorff, project, CompactSet, Vector};
use crate::report::{CheckReport, Violation};
use std::fmt;
use std::sync::Arc;

/// Membership slack when testing whether a query point lies in a map's
/// domain.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Slack allowed on nearest-point consistency of proximal images.
pub const PROXIMAL_TOL: f64 = 1e-10;

type MapRule = Arc<dyn Fn(&Vector) -> CompactSet + Send + Sync>;

/// A mapping assigning to each point of its domain a compact image set.
///
/// Evaluation must be deterministic; all catalog maps are.
#[derive(Clone)]
pub struct MultiMap {
    label: String,
    domain: CompactSet,
    rule: MapRule,
}

impl fmt::Debug for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiMap")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl MultiMap {
    pub fn new(
        label: impl Into<String>,
        domain: CompactSet,
        rule: impl Fn(&Vector) -> CompactSet + Send + Sync + 'static,
    ) -> Self {
        MultiMap { label: label.into(), domain, rule: Arc::new(rule) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &CompactSet {
        &self.domain
    }

    /// The image set `Tx`. Errors when `x` lies outside the domain.
    pub fn evaluate(&self, x: &Vector) -> Result<CompactSet> {
        let gap = dist_point_to_set(x, &self.domain)?;
        if gap > DOMAIN_TOL {
            return Err(Error::OutsideDomain { label: self.label.clone(), dist: gap });
        }
        let image = (self.rule)(x);
        if image.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                got: image.dim(),
            });
        }
        Ok(image)
    }

    /// `dist(x, Tx)`: zero exactly at fixed points.
    pub fn residual(&self, x: &Vector) -> Result<f64> {
        dist_point_to_set(x, &self.evaluate(x)?)
    }
}

/// The metric projection `P_T(x) = {y ∈ Tx : ‖x−y‖ = dist(x, Tx)}`.
#[derive(Debug, Clone)]
pub struct ProximalMap {
    base: MultiMap,
}

impl ProximalMap {
    pub fn new(base: MultiMap) -> Self {
        ProximalMap { base }
    }

    pub fn base(&self) -> &MultiMap {
        &self.base
    }

    /// The set of nearest points of `Tx` to `x`. Convex images yield a
    /// singleton; finite point sets keep every tying point.
    pub fn evaluate_proximal(&self, x: &Vector) -> Result<CompactSet> {
        let image = self.base.evaluate(x)?;
        match &image {
            CompactSet::Singleton { .. } => Ok(image),
            CompactSet::Ball { .. } | CompactSet::AxisBox { .. } => {
                Ok(CompactSet::singleton(project(x, &image)?))
            }
            CompactSet::FinitePointSet { points } => {
                let dists: Vec<f64> = points
                    .iter()
                    .map(|p| x.dist(p))
                    .collect::<Result<_>>()?;
                let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
                let ties: Vec<Vector> = points
                    .iter()
                    .zip(&dists)
                    .filter(|(_, d)| **d == best)
                    .map(|(p, _)| p.clone())
                    .collect();
                if ties.len() == 1 {
                    Ok(CompactSet::singleton(ties.into_iter().next().expect("one tie")))
                } else {
                    CompactSet::points(ties)
                }
            }
        }
    }
}

/// Analytically known common fixed points of a problem's maps.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownFixedPoints {
    pub points: Vec<Vector>,
    /// Whether `T_i(p) = {p}` holds at every listed point, the extra
    /// hypothesis process (A)'s convergence theorem needs.
    pub strict_singleton_images: bool,
}

impl KnownFixedPoints {
    pub fn new(points: Vec<Vector>, strict_singleton_images: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyFixedPoints);
        }
        Ok(KnownFixedPoints { points, strict_singleton_images })
    }

    /// `dist(x, 𝓕)` over the listed points.
    pub fn dist_to(&self, x: &Vector) -> Result<f64> {
        let mut best = f64::INFINITY;
        for p in &self.points {
            best = best.min(x.dist(p)?);
        }
        Ok(best)
    }
}

type GaugeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nondecreasing function `g` with `g(0) = 0` and `g(r) > 0` for `r > 0`,
/// as used by conditions (I)/(II).
#[derive(Clone)]
pub struct ConditionGauge {
    label: String,
    g: GaugeFn,
}

impl fmt::Debug for ConditionGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConditionGauge").field("label", &self.label).finish_non_exhaustive()
    }
}

impl ConditionGauge {
    pub fn new(label: impl Into<String>, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ConditionGauge { label: label.into(), g: Arc::new(g) }
    }

    /// `g(r) = slope · r`.
    pub fn linear(slope: f64) -> Self {
        ConditionGauge::new(format!("linear({slope})"), move |r| slope * r)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.g)(r)
    }

    /// Verify the gauge contract on the given radii (zero is always added).
    pub fn validate_on(&self, radii: &[f64]) -> Result<()> {
        if self.eval(0.0).abs() > 1e-12 {
            return Err(Error::InvalidGauge { what: format!("g(0) = {} != 0", self.eval(0.0)) });
        }
        let mut rs: Vec<f64> = radii.iter().cloned().filter(|r| r.is_finite() && *r >= 0.0).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
        let mut prev_r = 0.0;
        let mut prev_g = 0.0;
        for r in rs {
            let gr = self.eval(r);
            if r > 0.0 && gr <= 0.0 {
                return Err(Error::InvalidGauge { what: format!("g({r}) = {gr} <= 0") });
            }
            if r >= prev_r && gr < prev_g - 1e-12 {
                return Err(Error::InvalidGauge {
                    what: format!("g decreases between {prev_r} and {r}"),
                });
            }
            prev_r = r;
            prev_g = gr;
        }
        Ok(())
    }
}

fn require_grid(grid: &[Vector], min: usize) -> Result<()> {
    if grid.len() < min {
        return Err(Error::GridTooSmall { min, got: grid.len() });
    }
    Ok(())
}

/// Evaluate the map at every grid point, failing on out-of-domain points.
fn images_on_grid(map: &MultiMap, grid: &[Vector]) -> Result<Vec<CompactSet>> {
    grid.iter().map(|x| map.evaluate(x)).collect()
}

/// Empirical test of condition (C):
/// `(1/2) dist(x,Tx) ≤ ‖x−y‖  ⟹  H(Tx,Ty) ≤ ‖x−y‖` over all ordered grid
/// pairs.
///
/// The premise is loosened by `tol` and the conclusion is allowed `tol`
/// slack, so a map that truly satisfies (C) cannot fail through
/// discretization alone.
pub fn check_condition_c(map: &MultiMap, grid: &[Vector], tol: f64) -> Result<CheckReport> {
    require_grid(grid, 2)?;
    let images = images_on_grid(map, grid)?;
    let residuals: Vec<f64> = grid
        .iter()
        .zip(&images)
        .map(|(x, img)| dist_point_to_set(x, img))
        .collect::<Result<_>>()?;

    let mut checked = 0;
    let mut violations = Vec::new();
    for (i, x) in grid.iter().enumerate() {
        for (j, y) in grid.iter().enumerate() {
            if i == j {
                continue;
            }
            let dxy = x.dist(y)?;
            if 0.5 * residuals[i] > dxy + tol {
                continue;
            }
            checked += 1;
            let h = hausdorff(&images[i], &images[j])?.value;
            if h > dxy + tol {
                violations.push(Violation {
                    x: Some(x.clone()),
                    y: Some(y.clone()),
                    index: None,
                    lhs: h,
                    rhs: dxy,
                });
            }
        }
    }
    Ok(CheckReport::new(checked, violations, grid.to_vec()))
}

/// Companion check: plain nonexpansiveness `H(Tx,Ty) ≤ ‖x−y‖` over all grid
/// pairs. Maps satisfying condition (C) need not pass this.
pub fn check_nonexpansive(map: &MultiMap, grid: &[Vector], tol: f64) -> Result<CheckReport> {
    require_grid(grid, 2)?;
    let images = images_on_grid(map, grid)?;
    let mut checked = 0;
    let mut violations = Vec::new();
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let dxy = grid[i].dist(&grid[j])?;
            checked += 1;
            let h = hausdorff(&images[i], &images[j])?.value;
            if h > dxy + tol {
                violations.push(Violation {
                    x: Some(grid[i].clone()),
                    y: Some(grid[j].clone()),
                    index: None,
                    lhs: h,
                    rhs: dxy,
                });
            }
        }
    }
    Ok(CheckReport::new(checked, violations, grid.to_vec()))
}

/// Quasi-nonexpansiveness against the known fixed points:
/// `H(Tx, Tp) ≤ ‖x−p‖` for every grid `x` and fixed point `p`.
pub fn check_quasi_nonexpansive(
    map: &MultiMap,
    fixed_points: &KnownFixedPoints,
    grid: &[Vector],
    tol: f64,
) -> Result<CheckReport> {
    require_grid(grid, 1)?;
    let images = images_on_grid(map, grid)?;
    let fixed_images: Vec<CompactSet> = fixed_points
        .points
        .iter()
        .map(|p| map.evaluate(p))
        .collect::<Result<_>>()?;

    let mut checked = 0;
    let mut violations = Vec::new();
    for (x, img) in grid.iter().zip(&images) {
        for (p, pimg) in fixed_points.points.iter().zip(&fixed_images) {
            let dxp = x.dist(p)?;
            checked += 1;
            let h = hausdorff(img, pimg)?.value;
            if h > dxp + tol {
                violations.push(Violation {
                    x: Some(x.clone()),
                    y: Some(p.clone()),
                    index: None,
                    lhs: h,
                    rhs: dxp,
                });
            }
        }
    }
    Ok(CheckReport::new(checked, violations, grid.to_vec()))
}

/// Condition (II) for a family of three maps:
/// `Σᵢ dist(x, Tᵢx) ≥ g(dist(x, 𝓕))` at every grid point.
///
/// The gauge contract (`g(0)=0`, nondecreasing, positive away from zero) is
/// validated on the realized distances first.
pub fn check_condition_ii(
    maps: &[MultiMap; 3],
    gauge: &ConditionGauge,
    fixed_points: &KnownFixedPoints,
    grid: &[Vector],
    tol: f64,
) -> Result<CheckReport> {
    require_grid(grid, 1)?;
    let dists: Vec<f64> = grid
        .iter()
        .map(|x| fixed_points.dist_to(x))
        .collect::<Result<_>>()?;
    gauge.validate_on(&dists)?;

    let mut violations = Vec::new();
    for (x, dist_f) in grid.iter().zip(&dists) {
        let mut total = 0.0;
        for map in maps {
            total += map.residual(x)?;
        }
        let need = gauge.eval(*dist_f);
        if need > total + tol {
            violations.push(Violation {
                x: Some(x.clone()),
                y: None,
                index: None,
                lhs: need,
                rhs: total,
            });
        }
    }
    Ok(CheckReport::new(grid.len(), violations, grid.to_vec()))
}

/// Uniform grid of `count` points on the 1-D interval `[lo, hi]`, hitting
/// both endpoints exactly.
pub fn uniform_grid_1d(lo: f64, hi: f64, count: usize) -> Result<Vec<Vector>> {
    if count < 2 {
        return Err(Error::GridTooSmall { min: 2, got: count });
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Invalid { what: format!("bad interval [{lo}, {hi}]") });
    }
    (0..count)
        .map(|k| Vector::scalar(lo + (hi - lo) * k as f64 / (count - 1) as f64))
        .collect()
}

/// A deterministic grid of roughly `n` points covering a domain set, used by
/// the map checkers when the caller does not supply one.
pub fn domain_grid(domain: &CompactSet, n: usize, seed: u64) -> Result<Vec<Vector>> {
    use rand::SeedableRng;
    let n = n.max(2);
    match domain {
        CompactSet::Singleton { point } => Ok(vec![point.clone()]),
        CompactSet::FinitePointSet { points } => Ok(points.clone()),
        CompactSet::AxisBox { lower, upper } => {
            let d = lower.dim();
            if d == 1 {
                return uniform_grid_1d(lower.coords()[0], upper.coords()[0], n);
            }
            let per_axis = (n as f64).powf(1.0 / d as f64).floor().max(2.0) as usize;
            let mut out = Vec::new();
            let mut idx = vec![0usize; d];
            loop {
                let coords: Vec<f64> = (0..d)
                    .map(|i| {
                        lower.coords()[i]
                            + (upper.coords()[i] - lower.coords()[i]) * idx[i] as f64
                                / (per_axis - 1) as f64
                    })
                    .collect();
                out.push(Vector::new(coords)?);
                let mut axis = 0;
                loop {
                    idx[axis] += 1;
                    if idx[axis] < per_axis {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                    if axis == d {
                        return Ok(out);
                    }
                }
            }
        }
        CompactSet::Ball { center, .. } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut out = vec![center.clone()];
            while out.len() < n {
                out.push(crate::geometry::uniform_point(domain, &mut rng));
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn s(x: f64) -> Vector {
        Vector::scalar(x).unwrap()
    }

    fn v2(x: f64, y: f64) -> Vector {
        Vector::new(vec![x, y]).unwrap()
    }

    #[test]
    fn half_interval_images() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        let t1 = &p.maps[0];
        let img = t1.evaluate(&s(1.0)).unwrap();
        assert_eq!(img, CompactSet::interval(0.0, 0.5).unwrap());
        // Degenerate box at the fixed point equals the singleton {0}.
        let img0 = t1.evaluate(&s(0.0)).unwrap();
        let h = hausdorff(&img0, &CompactSet::singleton(s(0.0))).unwrap();
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn shrink_ball_image_and_proximal_point() {
        let p = catalog::problem("shrink_ball", &[]).unwrap();
        let t1 = &p.maps[0];
        let img = t1.evaluate(&v2(0.8, 0.0)).unwrap();
        assert_eq!(img, CompactSet::ball(v2(0.4, 0.0), 0.2).unwrap());

        let prox = ProximalMap::new(t1.clone());
        let pimg = prox.evaluate_proximal(&v2(0.8, 0.0)).unwrap();
        let expect = CompactSet::singleton(v2(0.6, 0.0));
        assert!(hausdorff(&pimg, &expect).unwrap().value < 1e-12);

        // ‖x − y‖ equals dist(x, Tx) for the proximal point.
        let r = t1.residual(&v2(0.8, 0.0)).unwrap();
        assert!((r - 0.2).abs() < 1e-12);
    }

    #[test]
    fn proximal_of_interval_clamps() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        let prox = ProximalMap::new(p.maps[0].clone());
        let pimg = prox.evaluate_proximal(&s(1.0)).unwrap();
        assert_eq!(pimg, CompactSet::singleton(s(0.5)));
    }

    #[test]
    fn proximal_at_strict_fixed_point_is_the_point() {
        let p = catalog::problem("halving", &[]).unwrap();
        let prox = ProximalMap::new(p.maps[0].clone());
        let pimg = prox.evaluate_proximal(&s(0.0)).unwrap();
        assert_eq!(pimg, CompactSet::singleton(s(0.0)));
    }

    #[test]
    fn proximal_keeps_symmetric_ties() {
        let dom = CompactSet::interval(0.0, 1.0).unwrap();
        let map = MultiMap::new("two_points", dom, |_| {
            CompactSet::points(vec![Vector::scalar(0.0).unwrap(), Vector::scalar(1.0).unwrap()])
                .unwrap()
        });
        let prox = ProximalMap::new(map);
        let pimg = prox.evaluate_proximal(&s(0.5)).unwrap();
        assert_eq!(
            pimg,
            CompactSet::points(vec![s(0.0), s(1.0)]).unwrap()
        );
    }

    #[test]
    fn residuals_match_hand_values() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        assert!((p.maps[0].residual(&s(1.0)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p.maps[0].residual(&s(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_rejects_points_outside_domain() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        assert!(matches!(
            p.maps[0].evaluate(&s(2.0)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn condition_c_holds_for_half_interval() {
        // This map is nonexpansive (H = |x-y|/2), so it must also satisfy
        // condition (C) on the same grid.
        let p = catalog::problem("half_interval", &[]).unwrap();
        let grid = uniform_grid_1d(0.0, 1.0, 201).unwrap();
        assert!(check_nonexpansive(&p.maps[0], &grid, 1e-9).unwrap().passed);
        let report = check_condition_c(&p.maps[0], &grid, 1e-9).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations.first());
    }

    #[test]
    fn condition_c_holds_for_suzuki_but_nonexpansiveness_fails() {
        let p = catalog::problem("suzuki", &[]).unwrap();
        let grid = uniform_grid_1d(0.0, 3.0, 301).unwrap();
        let c = check_condition_c(&p.maps[0], &grid, 1e-9).unwrap();
        assert!(c.passed, "violations: {:?}", c.violations.first());
        let ne = check_nonexpansive(&p.maps[0], &grid, 1e-9).unwrap();
        assert!(!ne.passed);
    }

    #[test]
    fn condition_c_fails_for_expanding_map() {
        let p = catalog::problem("expanding", &[]).unwrap();
        let grid = uniform_grid_1d(0.0, 1.0, 51).unwrap();
        let report = check_condition_c(&p.maps[0], &grid, 1e-9).unwrap();
        assert!(!report.passed);
        let v = &report.violations[0];
        assert!(v.lhs > v.rhs + 1e-9);
    }

    #[test]
    fn quasi_nonexpansive_holds_on_catalog_maps() {
        for label in ["half_interval", "suzuki"] {
            let p = catalog::problem(label, &[]).unwrap();
            let fixed = p.fixed_points.clone().unwrap();
            let grid = domain_grid(&p.domain, 201, 0).unwrap();
            for map in &p.maps {
                let rep = check_quasi_nonexpansive(map, &fixed, &grid, 1e-9).unwrap();
                assert!(rep.passed, "{label}/{}", map.label());
            }
        }
    }

    #[test]
    fn condition_ii_matches_hand_computation() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        let fixed = p.fixed_points.clone().unwrap();
        let grid = uniform_grid_1d(0.0, 1.0, 101).unwrap();

        let ok = check_condition_ii(&p.maps, &ConditionGauge::linear(0.5), &fixed, &grid, 1e-12)
            .unwrap();
        assert!(ok.passed);

        // Σ dist at x=1 is 23/12 < 10, so a gauge of 10r must fail there.
        let bad = check_condition_ii(&p.maps, &ConditionGauge::linear(10.0), &fixed, &grid, 1e-12)
            .unwrap();
        assert!(!bad.passed);
        let worst = bad.violations.last().unwrap();
        assert!((worst.rhs - 23.0 / 12.0).abs() < 1e-12);
        assert!((worst.lhs - 10.0).abs() < 1e-12);
    }

    #[test]
    fn condition_ii_rejects_broken_gauges() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        let fixed = p.fixed_points.clone().unwrap();
        let grid = uniform_grid_1d(0.0, 1.0, 11).unwrap();
        let flat = ConditionGauge::new("zero", |_| 0.0);
        assert!(matches!(
            check_condition_ii(&p.maps, &flat, &fixed, &grid, 1e-12),
            Err(Error::InvalidGauge { .. })
        ));
    }

    #[test]
    fn catalog_fixed_points_are_honest() {
        for label in ["half_interval", "shrink_ball", "suzuki", "expanding", "halving"] {
            let p = catalog::problem(label, &[]).unwrap();
            let fixed = p.fixed_points.clone().unwrap();
            for q in &fixed.points {
                for map in &p.maps {
                    assert!(map.residual(q).unwrap() <= 1e-10, "{label}/{}", map.label());
                    if fixed.strict_singleton_images {
                        let img = map.evaluate(q).unwrap();
                        let h = hausdorff(&img, &CompactSet::singleton(q.clone())).unwrap();
                        assert!(h.value <= 1e-10, "{label}/{}", map.label());
                    }
                }
            }
        }
    }

    #[test]
    fn proximal_images_agree_with_residuals() {
        let p = catalog::problem("shrink_ball", &[]).unwrap();
        let grid = domain_grid(&p.domain, 50, 1).unwrap();
        for map in &p.maps {
            let prox = ProximalMap::new(map.clone());
            for x in &grid {
                let pimg = prox.evaluate_proximal(x).unwrap();
                let via_prox = dist_point_to_set(x, &pimg).unwrap();
                assert!((via_prox - map.residual(x).unwrap()).abs() < PROXIMAL_TOL);
            }
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        let p = catalog::problem("half_interval", &[]).unwrap();
        assert!(matches!(
            check_condition_c(&p.maps[0], &[], 1e-9),
            Err(Error::GridTooSmall { .. })
        ));
    }
}
