//! Approximation of `R^Z(θ) = X_{(0,1)} R_u` by `X_{(0,1)} R_v`, with `v` a
//! unit Eisenstein vector found by enumerating lattice points in a 4D cap.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{cap4_rows, enum_cap4, CapRegion4D, Point4};
use crate::linalg3::{frobenius_distance, generators, householder, rz_target, RingMatrix3, RingVector3};
use crate::normeq::solve_norm;
use crate::ring::gamma_divide;

/// Default contraction factor.
pub const DEFAULT_CONTRACTION: f64 = 0.35;

/// The reflection target for `R^Z(θ)` and its search tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HouseholderTarget {
    pub theta: f64,
    pub eps: f64,
    pub contraction: f64,
}

impl HouseholderTarget {
    pub fn new(theta: f64, eps: f64, contraction: f64) -> Result<Self> {
        if !theta.is_finite() || !(eps > 0.0) || !(contraction > 0.0 && contraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta={theta}, eps={eps}, contraction={contraction}"
            )));
        }
        Ok(Self {
            theta,
            eps,
            contraction,
        })
    }

    /// `u = (e^{iθ/2}, -1, 0)/√2`.
    pub fn u_complex(&self) -> [Complex64; 3] {
        [
            Complex64::from_polar(1.0 / SQRT_2, self.theta / 2.0),
            Complex64::new(-1.0 / SQRT_2, 0.0),
            Complex64::new(0.0, 0.0),
        ]
    }

    /// `u` in `R⁴`: `(cos θ/2, sin θ/2, -1, 0)/√2`.
    pub fn u_real(&self) -> [f64; 4] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [c / SQRT_2, s / SQRT_2, -1.0 / SQRT_2, 0.0]
    }

    /// Vector tolerance `ε' = ε/(2√2 c)`.
    pub fn vector_tolerance(&self) -> f64 {
        self.eps / (2.0 * SQRT_2 * self.contraction)
    }

    pub fn region(&self, f: u32) -> CapRegion4D {
        CapRegion4D::for_denominator(self.theta / 2.0, f, self.vector_tolerance())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderOptions {
    pub contraction: f64,
    /// Evaluate every candidate at the first feasible `f` and keep the
    /// closest instead of the first.
    pub best_at_f: bool,
    pub workers: Option<usize>,
    pub max_f: u32,
}

impl Default for HouseholderOptions {
    fn default() -> Self {
        Self {
            contraction: DEFAULT_CONTRACTION,
            best_at_f: false,
            workers: None,
            max_f: 70,
        }
    }
}

/// The reflection vector, the resulting gate and its error.
#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderSolution {
    pub vector: RingVector3,
    pub matrix: RingMatrix3,
    pub distance: f64,
}

/// `‖R_u - R_v‖_F = √(8(1 - |u†v|²))`.
pub fn reflection_error(u: &[Complex64; 3], v: &RingVector3) -> f64 {
    let vc = v.to_complex();
    let ip: Complex64 = (0..3).map(|i| u[i].conj() * vc[i]).sum();
    (8.0 * (1.0 - ip.norm_sqr())).max(0.0).sqrt()
}

/// The unit vector for a lattice point, if `v1`, `v2` are Γ-divisible and
/// the remaining norm is representable.
fn vector_from_point(pt: &Point4, f: u32) -> Option<RingVector3> {
    let v1 = gamma_divide(pt.first.to_eisenstein()?, f).ok()?;
    let v2 = gamma_divide(pt.second.to_eisenstein()?, f).ok()?;
    let n3 = 3i128
        .checked_pow(f)?
        .checked_sub(v1.checked_norm()?)?
        .checked_sub(v2.checked_norm()?)?;
    let v3 = solve_norm(n3)?;
    Some(RingVector3::new([v1, v2, v3], f))
}

/// Unit vectors at exponent `f` within the vector tolerance, in
/// enumeration order.
pub fn candidate_vectors(target: &HouseholderTarget, f: u32) -> Vec<RingVector3> {
    enum_cap4(&target.region(f))
        .iter()
        .filter_map(|pt| vector_from_point(pt, f))
        .collect()
}

/// `X_{(0,1)} R_v`.
pub fn reflection_gate(v: &RingVector3) -> Result<RingMatrix3> {
    generators().x01.checked_mul(&householder(v)?)
}

fn evaluate(v: RingVector3, target: &[[Complex64; 3]; 3], eps: f64) -> Option<HouseholderSolution> {
    let matrix = reflection_gate(&v).ok()?;
    let distance = frobenius_distance(&matrix, target);
    (distance <= eps).then_some(HouseholderSolution {
        vector: v,
        matrix,
        distance,
    })
}

/// Rows are scanned in batches of at least this many points; the first
/// batch holding an acceptable candidate ends the scan.
const BATCH_POINTS: usize = 4096;

/// Enumerated points of the last fully scanned region, keyed by `⌈f/2⌉`.
/// Consecutive exponents `2k - 1` and `2k` share a region.
#[derive(Default)]
struct PointCache {
    key: Option<u32>,
    points: Vec<Point4>,
}

fn search_at(
    target: &HouseholderTarget,
    f: u32,
    best: bool,
    cache: &mut PointCache,
) -> Option<HouseholderSolution> {
    let rz = rz_target(target.theta);
    let eps = target.eps;
    let accept = |pt: &Point4| vector_from_point(pt, f).and_then(|v| evaluate(v, &rz, eps));
    let key = f.div_ceil(2);
    if cache.key != Some(key) {
        cache.key = None;
        cache.points.clear();
        let mut rows = cap4_rows(&target.region(f));
        if !best {
            // First fit: stop at the earliest batch with a hit. Batches are
            // scanned in order, so this matches a scan of the full list.
            let mut start = 0;
            loop {
                let mut exhausted = true;
                for row in rows.by_ref() {
                    cache.points.extend(row);
                    if cache.points.len() - start >= BATCH_POINTS {
                        exhausted = false;
                        break;
                    }
                }
                if let Some(s) = cache.points[start..].par_iter().find_map_first(accept) {
                    cache.points.clear();
                    return Some(s);
                }
                start = cache.points.len();
                if exhausted {
                    cache.key = Some(key);
                    return None;
                }
            }
        }
        cache.points.extend(rows.flatten());
        cache.key = Some(key);
    }
    let points = &cache.points;
    if best {
        points
            .par_iter()
            .enumerate()
            .filter_map(|(i, pt)| accept(pt).map(|s| (i, s)))
            .min_by(|a, b| a.1.distance.total_cmp(&b.1.distance).then(a.0.cmp(&b.0)))
            .map(|p| p.1)
    } else {
        points.par_iter().find_map_first(accept)
    }
}

/// Householder synthesis with default options and contraction `c`.
pub fn synth_householder(theta: f64, eps: f64, contraction: f64) -> Result<RingMatrix3> {
    let opts = HouseholderOptions {
        contraction,
        ..Default::default()
    };
    synth_householder_with(theta, eps, &opts).map(|s| s.matrix)
}

/// Smallest vector exponent `f` admitting `V = X_{(0,1)} R_v` within `ε`
/// of `R^Z(θ)`, searching candidates in enumeration order.
pub fn synth_householder_with(theta: f64, eps: f64, opts: &HouseholderOptions) -> Result<HouseholderSolution> {
    let target = HouseholderTarget::new(theta, eps, opts.contraction)?;
    let run = || {
        let mut cache = PointCache::default();
        for f in 0..=opts.max_f {
            // The reflection numerator lives over χ^{2f}.
            if 3i128.checked_pow(2 * f + 2).is_none() {
                return Err(Error::Overflow);
            }
            if let Some(s) = search_at(&target, f, opts.best_at_f, &mut cache) {
                return Ok(s);
            }
        }
        Err(Error::InvalidParameter(format!(
            "no solution with f ≤ {} for eps={eps}",
            opts.max_f
        )))
    };
    match opts.workers {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(run),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::EisensteinInt;
    use crate::linalg3::{cmatrix_distance, is_unitary, CMatrix3};
    use rand::{Rng, SeedableRng};

    fn reflection_c(u: &[Complex64; 3]) -> CMatrix3 {
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                m[i][j] = Complex64::new(d, 0.0) - 2.0 * u[i] * u[j].conj();
            }
        }
        m
    }

    fn vec_distance(u: &[Complex64; 3], v: &[Complex64; 3]) -> f64 {
        (0..3).map(|i| (u[i] - v[i]).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn reflection_error_examples() {
        let one = EisensteinInt::ONE;
        let z = EisensteinInt::ZERO;
        let v = RingVector3::new([one, z, z], 0);
        let par = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(reflection_error(&par, &v) < 1e-12);
        let orth = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        assert!((reflection_error(&orth, &v) - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reflection_error_matches_direct() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let target = HouseholderTarget::new(0.4, 0.5, 1.0).unwrap();
        let vs: Vec<_> = (0..6).flat_map(|f| candidate_vectors(&target, f)).collect();
        assert!(!vs.is_empty());
        for v in vs {
            let theta = rng.gen_range(-3.0..3.0);
            let u = HouseholderTarget::new(theta, 0.1, 1.0).unwrap().u_complex();
            let direct = cmatrix_distance(&reflection_c(&u), &householder(&v).unwrap().to_complex());
            assert!((reflection_error(&u, &v) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn target_identity() {
        for theta in [-2.0, 0.0, 0.9] {
            let t = HouseholderTarget::new(theta, 0.1, 1.0).unwrap();
            let x01 = generators().x01.to_complex();
            let prod = crate::linalg3::cmatrix_mul(&x01, &reflection_c(&t.u_complex()));
            assert!(cmatrix_distance(&prod, &rz_target(theta)) < 1e-12);
        }
    }

    #[test]
    fn trivial_tolerance_at_f0() {
        let eps = 2.0 * SQRT_2;
        let s = synth_householder_with(0.0, eps, &HouseholderOptions { contraction: 1.0, ..Default::default() }).unwrap();
        assert_eq!(s.vector.fexp, 0);
        assert!(s.distance <= eps);
        assert!(frobenius_distance(&s.matrix, &rz_target(0.0)) <= eps);
    }

    #[test]
    fn streaming_search_matches_full_scan() {
        for (theta, eps) in [(0.37, 1e-2), (-1.09, 1e-3), (1.33, 3e-3), (0.15, 1e-4)] {
            let got = synth_householder_with(theta, eps, &HouseholderOptions::default()).unwrap();
            let target = HouseholderTarget::new(theta, eps, DEFAULT_CONTRACTION).unwrap();
            let rz = rz_target(theta);
            let naive = (0..=got.vector.fexp)
                .find_map(|f| {
                    enum_cap4(&target.region(f))
                        .iter()
                        .find_map(|pt| vector_from_point(pt, f).and_then(|v| evaluate(v, &rz, eps)))
                })
                .unwrap();
            assert_eq!(naive.vector, got.vector);
            assert_eq!(naive.matrix, got.matrix);
        }
    }

    #[test]
    fn no_exact_solution_at_theta_zero() {
        let s = synth_householder_with(0.0, 0.3, &HouseholderOptions::default()).unwrap();
        assert!(s.vector.fexp > 0);
        assert!(s.distance <= 0.3);
        assert!(is_unitary(&s.matrix));
        assert!(s.vector.is_unit());
    }

    #[test]
    fn candidates_obey_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        for _ in 0..10 {
            let theta = rng.gen_range(-3.1..3.1);
            let eps = rng.gen_range(0.01..0.3);
            let c = rng.gen_range(0.3..1.0);
            let t = HouseholderTarget::new(theta, eps, c).unwrap();
            let u = t.u_complex();
            let ep = t.vector_tolerance();
            let rz = rz_target(theta);
            for f in 0..=10 {
                for v in candidate_vectors(&t, f) {
                    assert!(v.is_unit());
                    let vc = v.to_complex();
                    let d = vec_distance(&u, &vc);
                    assert!(d <= ep * (1.0 + 1e-9) + 1e-12);
                    let delta = (1.0 - d * d / 4.0).sqrt();
                    assert!(delta <= 1.0);
                    let err = reflection_error(&u, &v);
                    assert!(err <= 2.0 * SQRT_2 * d * delta + 1e-9);
                    let scale = 3f64.powi(f as i32);
                    let n3 = v.entries[2].norm() as f64;
                    assert!(n3 <= scale * ep * ep * (1.0 - ep * ep / 4.0) * 1.01 + 1e-9);
                    let m = reflection_gate(&v).unwrap();
                    let dist = frobenius_distance(&m, &rz);
                    assert!((dist - err).abs() < 1e-9);
                    // Acceptance is exactly the matrix test.
                    assert_eq!(evaluate(v, &rz, eps).is_some(), dist <= eps);
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn small_eps_run() {
        let s = synth_householder_with(1.1, 1e-4, &HouseholderOptions::default()).unwrap();
        assert!(s.distance <= 1e-4);
        assert!(is_unitary(&s.matrix));
        assert!(s.matrix.fexp() <= 2 * s.vector.fexp);
    }

    #[test]
    fn best_at_f_is_no_worse() {
        let first = synth_householder_with(0.7, 1e-3, &HouseholderOptions::default()).unwrap();
        let best = synth_householder_with(
            0.7,
            1e-3,
            &HouseholderOptions {
                best_at_f: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(first.vector.fexp, best.vector.fexp);
        assert!(best.distance <= first.distance);
    }

    #[test]
    fn deterministic_across_workers() {
        for (theta, eps) in [(0.3, 1e-3), (-2.2, 1e-5)] {
            let a = synth_householder_with(theta, eps, &HouseholderOptions { workers: Some(1), ..Default::default() }).unwrap();
            let b = synth_householder_with(theta, eps, &HouseholderOptions { workers: Some(8), ..Default::default() }).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(synth_householder(0.1, 0.1, 0.0).is_err());
        assert!(synth_householder(0.1, 0.1, 1.5).is_err());
        assert!(synth_householder(0.1, -1.0, 0.5).is_err());
    }
}
