//! Deterministic sampling of compact sets: boundary samples for the sampled
//! Hausdorff estimator and uniform draws for random selection strategies.

use super::{box_vertices, dist_point_to_set, CompactSet, Vector, MAX_VERTEX_ENUM_DIM};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sampled Hausdorff distance: the max of the two directed sampled
/// sup-distances, with the inner infimum computed exactly.
///
/// Samples always lie in their set, so the estimate approaches the true
/// value from below as `n_samples` grows. Deterministic given `seed`.
pub fn hausdorff_sampled(
    a: &CompactSet,
    b: &CompactSet,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if n_samples < 2 {
        return Err(Error::Invalid {
            what: format!("n_samples must be >= 2, got {n_samples}"),
        });
    }
    let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
    rng_a.set_stream(0);
    let mut rng_b = ChaCha8Rng::seed_from_u64(seed);
    rng_b.set_stream(1);

    let directed = |from: &CompactSet, to: &CompactSet, rng: &mut ChaCha8Rng| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in boundary_samples(from, n_samples, rng) {
            worst = worst.max(dist_point_to_set(&s, to)?);
        }
        Ok(worst)
    };
    Ok(directed(a, b, &mut rng_a)?.max(directed(b, a, &mut rng_b)?))
}

/// Points of `e` at which a directed Hausdorff sup can be attained.
///
/// Finite kinds return all their points; balls return sphere samples; boxes
/// return their vertices (where sups of convex functions sit) plus uniform
/// boundary samples.
pub fn boundary_samples<R: Rng>(e: &CompactSet, n: usize, rng: &mut R) -> Vec<Vector> {
    match e {
        CompactSet::Singleton { point } => vec![point.clone()],
        CompactSet::FinitePointSet { points } => points.clone(),
        CompactSet::Ball { center, radius } => {
            if *radius == 0.0 {
                return vec![center.clone()];
            }
            let d = center.dim();
            if d == 1 {
                let c = center.coords()[0];
                return vec![
                    Vector::new(vec![c - radius]).expect("finite by construction"),
                    Vector::new(vec![c + radius]).expect("finite by construction"),
                ];
            }
            (0..n)
                .map(|_| {
                    let dir = unit_direction(d, rng);
                    center
                        .add(&dir.scale(*radius))
                        .expect("dims match by construction")
                })
                .collect()
        }
        CompactSet::AxisBox { lower, upper } => {
            let d = lower.dim();
            let sides: Vec<f64> = upper
                .coords()
                .iter()
                .zip(lower.coords())
                .map(|(u, l)| u - l)
                .collect();
            if sides.iter().all(|s| *s == 0.0) {
                return vec![lower.clone()];
            }
            let mut out = if d <= MAX_VERTEX_ENUM_DIM {
                box_vertices(e)
            } else {
                Vec::new()
            };
            // Face weights: the (d−1)-measure of each axis-normal face pair.
            let weights: Vec<f64> = (0..d)
                .map(|i| sides.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s).product())
                .collect();
            let total: f64 = weights.iter().sum();
            for _ in 0..n {
                let coords: Vec<f64> = if total > 0.0 {
                    let mut pick = rng.random_range(0.0..total);
                    let mut axis = d - 1;
                    for (i, w) in weights.iter().enumerate() {
                        if pick < *w {
                            axis = i;
                            break;
                        }
                        pick -= w;
                    }
                    let hi_side = rng.random::<bool>();
                    (0..d)
                        .map(|j| {
                            if j == axis {
                                if hi_side {
                                    upper.coords()[j]
                                } else {
                                    lower.coords()[j]
                                }
                            } else {
                                lower.coords()[j] + sides[j] * rng.random::<f64>()
                            }
                        })
                        .collect()
                } else {
                    // Every face is measure-zero (>= 2 degenerate sides):
                    // the set equals its boundary, sample it directly.
                    (0..d)
                        .map(|j| lower.coords()[j] + sides[j] * rng.random::<f64>())
                        .collect()
                };
                out.push(Vector::new(coords).expect("finite by construction"));
            }
            out
        }
    }
}

/// A uniformly distributed point of `e`, used by the seeded-random
/// selection strategy.
pub(crate) fn uniform_point<R: Rng>(e: &CompactSet, rng: &mut R) -> Vector {
    match e {
        CompactSet::Singleton { point } => point.clone(),
        CompactSet::FinitePointSet { points } => {
            points[rng.random_range(0..points.len())].clone()
        }
        CompactSet::Ball { center, radius } => {
            if *radius == 0.0 {
                return center.clone();
            }
            let d = center.dim();
            let dir = unit_direction(d, rng);
            let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
            center.add(&dir.scale(r)).expect("dims match by construction")
        }
        CompactSet::AxisBox { lower, upper } => {
            let coords = lower
                .coords()
                .iter()
                .zip(upper.coords())
                .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                .collect();
            Vector::new(coords).expect("finite by construction")
        }
    }
}

fn unit_direction<R: Rng>(d: usize, rng: &mut R) -> Vector {
    loop {
        // Box-Muller pairs; isotropic, so the normalized vector is uniform
        // on the sphere.
        let coords: Vec<f64> = (0..d.div_ceil(2))
            .flat_map(|_| {
                let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.random();
                let r = (-2.0 * u1.ln()).sqrt();
                let t = 2.0 * std::f64::consts::PI * u2;
                [r * t.cos(), r * t.sin()]
            })
            .take(d)
            .collect();
        let v = Vector::new(coords).expect("finite by construction");
        let n = v.norm();
        if n > 1e-12 {
            return v.scale(1.0 / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn sampled_singletons_are_exact() {
        let a = CompactSet::singleton(v(&[1.0, 1.0]));
        assert_eq!(hausdorff_sampled(&a, &a, 10, 7).unwrap(), 0.0);
    }

    #[test]
    fn sampled_balls_approach_closed_form_from_below() {
        let a = CompactSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let b = CompactSet::ball(v(&[3.0, 0.0]), 2.0).unwrap();
        let h = hausdorff_sampled(&a, &b, 100_000, 42).unwrap();
        assert!(h <= 4.0 + 1e-12);
        assert!((h - 4.0).abs() < 2e-3);
    }

    #[test]
    fn sampled_box_vs_ball_matches_grid_brute_force() {
        let a = CompactSet::axis_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let b = CompactSet::ball(v(&[0.5, 0.5]), 0.1).unwrap();
        let h = hausdorff_sampled(&a, &b, 100_000, 42).unwrap();

        // 2-D grid oracle at step 1e-3 over the box; the other direction is
        // zero because the ball sits inside the box.
        let mut brute: f64 = 0.0;
        let n = 1000;
        for i in 0..=n {
            for j in 0..=n {
                let p = v(&[i as f64 / n as f64, j as f64 / n as f64]);
                brute = brute.max(dist_point_to_set(&p, &b).unwrap());
            }
        }
        assert!((h - brute).abs() < 2e-3);
    }

    #[test]
    fn sampled_is_deterministic_given_seed() {
        // Ball pairs have no deterministic vertex samples, so the estimate
        // depends on the seed while staying reproducible for a fixed one.
        let a = CompactSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let b = CompactSet::ball(v(&[3.0, 0.0]), 2.0).unwrap();
        let h1 = hausdorff_sampled(&a, &b, 2_000, 9).unwrap();
        let h2 = hausdorff_sampled(&a, &b, 2_000, 9).unwrap();
        assert_eq!(h1, h2);
        let h3 = hausdorff_sampled(&a, &b, 2_000, 10).unwrap();
        assert_ne!(h1, h3);
    }

    #[test]
    fn sampled_rejects_tiny_sample_counts() {
        let a = CompactSet::singleton(v(&[0.0]));
        assert!(hausdorff_sampled(&a, &a, 1, 0).is_err());
    }

    #[test]
    fn degenerate_boxes_sample_themselves() {
        // A segment embedded in 3-D: every face is measure-zero.
        let seg = CompactSet::axis_box(v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in boundary_samples(&seg, 50, &mut rng) {
            assert!(dist_point_to_set(&s, &seg).unwrap() < 1e-12);
        }
    }

    #[test]
    fn uniform_points_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sets = [
            CompactSet::ball(v(&[0.3, -0.2]), 0.7).unwrap(),
            CompactSet::axis_box(v(&[-1.0, 0.0]), v(&[1.0, 2.0])).unwrap(),
            CompactSet::points(vec![v(&[1.0, 2.0]), v(&[3.0, 4.0])]).unwrap(),
        ];
        for e in &sets {
            for _ in 0..200 {
                let p = uniform_point(e, &mut rng);
                assert!(dist_point_to_set(&p, e).unwrap() < 1e-12);
            }
        }
    }
}
