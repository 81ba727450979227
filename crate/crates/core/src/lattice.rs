//! Lattice points of the Eisenstein lattice inside half-plane∩disk regions
//! (two dimensions) and hyperplane∩ball caps (four dimensions).
//!
//! A point is kept as doubled half-integer coordinates `(2p, 2q)` with
//! `p + q ∈ Z`; its image in the plane is `(p, √3 q)`. Loop bounds are
//! computed in floating point and widened by a guard band, then every
//! candidate is re-checked against the region predicate, so the bounds can
//! only ever over-approximate.

use std::f64::consts::SQRT_2;

use crate::ring::{HalfIntPair, SQRT3};

const GUARD: f64 = 1e-9;

/// `η(ε) = 1 - ε²/2`: the real part a unit-vector entry must reach for the
/// column error to stay below `ε`.
pub fn eta(eps: f64) -> f64 {
    1.0 - eps * eps / 2.0
}

fn guard(r: f64) -> f64 {
    GUARD * r.abs().max(1.0)
}

/// `(r2 - r1)(r2 + r1)` without squaring large numbers first.
fn radicand(r2: f64, r1: f64) -> f64 {
    ((r2 - r1) * (r2 + r1)).max(0.0)
}

/// `4·r²`, exact when `r` is a (not too large) integer.
#[derive(Clone, Copy, Debug, PartialEq)]
enum RadiusSq {
    Exact(i128),
    Float(f64),
}

impl RadiusSq {
    fn of(r: f64) -> Self {
        if r >= 0.0 && r.fract() == 0.0 && r < 9.0e15 {
            let k = r as i128;
            Self::Exact(4 * k * k)
        } else {
            Self::Float(4.0 * r * r)
        }
    }

    fn admits(&self, four_norm: i128) -> bool {
        match *self {
            Self::Exact(k) => four_norm <= k,
            Self::Float(k) => (four_norm as f64) <= k,
        }
    }
}

/// `{ (p, √3q) : p cos α + √3 q sin α ≥ r1, p² + 3q² ≤ r2² }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchRegion2D {
    pub alpha: f64,
    pub r1: f64,
    pub r2: f64,
}

impl SearchRegion2D {
    pub fn new(alpha: f64, r1: f64, r2: f64) -> Self {
        Self { alpha, r1, r2 }
    }

    /// The region for denominator exponent `f` and column tolerance `eps`:
    /// `r1 = 3^⌈f/2⌉ η(ε)`, `r2 = 3^⌈f/2⌉`.
    pub fn for_denominator(alpha: f64, f: u32, eps: f64) -> Self {
        let r2 = 3f64.powi(f.div_ceil(2) as i32);
        Self::new(alpha, r2 * eta(eps), r2)
    }

    pub fn contains(&self, pt: HalfIntPair) -> bool {
        let (s, c) = self.alpha.sin_cos();
        let lhs = 0.5 * (pt.two_p as f64 * c + SQRT3 * pt.two_q as f64 * s);
        lhs >= self.r1 && RadiusSq::of(self.r2).admits(four_norm(pt))
    }

    pub fn area(&self) -> f64 {
        let r2 = self.r2;
        if self.r1 >= r2 {
            return 0.0;
        }
        if self.r1 <= -r2 {
            return std::f64::consts::PI * r2 * r2;
        }
        let phi = (self.r1 / r2).acos();
        r2 * r2 * (phi - phi.sin() * phi.cos())
    }
}

fn four_norm(pt: HalfIntPair) -> i128 {
    pt.two_p * pt.two_p + 3 * pt.two_q * pt.two_q
}

/// Range of `2q` covering the region, widened by the guard band.
fn two_q_bounds(alpha: f64, r1: f64, r2: f64) -> Option<(i128, i128)> {
    let g = guard(r2);
    if r2 < 0.0 || r1 > r2 + g {
        return None;
    }
    let (s, c) = alpha.sin_cos();
    let r1c = r1.max(-r2);
    let ch = radicand(r2, r1c).sqrt();
    let e1 = r1c * s + ch * c;
    let e2 = r1c * s - ch * c;
    // The arc reaches the top (bottom) of the disk iff that point is
    // inside the half-plane.
    let y_max = if r2 * s >= r1c - g { r2 } else { e1.max(e2) };
    let y_min = if -r2 * s >= r1c - g { -r2 } else { e1.min(e2) };
    let lo = (2.0 * (y_min - g) / SQRT3).ceil();
    let hi = (2.0 * (y_max + g) / SQRT3).floor();
    (lo <= hi).then_some((lo as i128, hi as i128))
}

/// Range of `2p` for a fixed `2q`, widened by the guard band.
fn two_p_bounds(alpha: f64, r1: f64, r2: f64, two_q: i128) -> Option<(i128, i128)> {
    let g = guard(r2);
    let y = SQRT3 * two_q as f64 / 2.0;
    let t = radicand(r2, y.abs()).sqrt();
    let (s, c) = alpha.sin_cos();
    let mut lo = -t - g;
    let mut hi = t + g;
    if c.abs() > 1e-6 {
        let edge = (r1 - y * s) / c;
        let eg = g / c.abs();
        if c > 0.0 {
            lo = lo.max(edge - eg);
        } else {
            hi = hi.min(edge + eg);
        }
    }
    if lo > hi {
        return None;
    }
    let mut a = (2.0 * lo).ceil() as i128;
    let b = (2.0 * hi).floor() as i128;
    if (a - two_q).rem_euclid(2) != 0 {
        a += 1;
    }
    (a <= b).then_some((a, b))
}

/// Iterator over the lattice points of a [`SearchRegion2D`], in
/// `(q ascending, p ascending)` order.
#[derive(Clone, Debug)]
pub struct Enum2D {
    alpha: f64,
    r1: f64,
    r2: f64,
    filter: Option<SearchRegion2D>,
    two_q: i128,
    two_q_hi: i128,
    two_p: i128,
    two_p_hi: i128,
}

impl Enum2D {
    fn new(alpha: f64, r1: f64, r2: f64, filter: bool) -> Self {
        let region = SearchRegion2D::new(alpha, r1, r2);
        let (lo, hi) = two_q_bounds(alpha, r1, r2).unwrap_or((1, 0));
        let mut it = Self {
            alpha,
            r1,
            r2,
            filter: filter.then_some(region),
            two_q: lo,
            two_q_hi: hi,
            two_p: 1,
            two_p_hi: 0,
        };
        it.load_row();
        it
    }

    fn load_row(&mut self) {
        while self.two_q <= self.two_q_hi {
            if let Some((a, b)) = two_p_bounds(self.alpha, self.r1, self.r2, self.two_q) {
                self.two_p = a;
                self.two_p_hi = b;
                return;
            }
            self.two_q += 1;
        }
    }
}

impl Iterator for Enum2D {
    type Item = HalfIntPair;

    fn next(&mut self) -> Option<HalfIntPair> {
        loop {
            if self.two_q > self.two_q_hi {
                return None;
            }
            if self.two_p > self.two_p_hi {
                self.two_q += 1;
                self.load_row();
                continue;
            }
            let pt = HalfIntPair {
                two_p: self.two_p,
                two_q: self.two_q,
            };
            self.two_p += 2;
            match &self.filter {
                Some(region) if !region.contains(pt) => continue,
                _ => return Some(pt),
            }
        }
    }
}

/// Lattice points `(p, √3q)` of the region.
pub fn enum_2d(region: &SearchRegion2D) -> Enum2D {
    Enum2D::new(region.alpha, region.r1, region.r2, true)
}

/// A lattice point `(p1, √3q1, p2, √3q2)` of `L₁ ⊕ L₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point4 {
    pub first: HalfIntPair,
    pub second: HalfIntPair,
}

impl Point4 {
    pub fn coords(&self) -> [f64; 4] {
        [
            self.first.p(),
            SQRT3 * self.first.q(),
            self.second.p(),
            SQRT3 * self.second.q(),
        ]
    }

    fn four_norm(&self) -> i128 {
        four_norm(self.first) + four_norm(self.second)
    }
}

/// `{ y : uᵀy ≥ r1, yᵀy ≤ r2² }` in `R⁴`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapRegion4D {
    pub u: [f64; 4],
    pub r1: f64,
    pub r2: f64,
}

impl CapRegion4D {
    pub fn new(u: [f64; 4], r1: f64, r2: f64) -> Self {
        Self { u, r1, r2 }
    }

    /// The reflection-search cap: `u = (cos α, sin α, -1, 0)/√2`.
    pub fn householder(alpha: f64, r1: f64, r2: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self::new([c / SQRT_2, s / SQRT_2, -1.0 / SQRT_2, 0.0], r1, r2)
    }

    pub fn for_denominator(alpha: f64, f: u32, eps: f64) -> Self {
        let r2 = 3f64.powi(f.div_ceil(2) as i32);
        Self::householder(alpha, r2 * eta(eps), r2)
    }

    pub fn contains(&self, pt: &Point4) -> bool {
        let y = pt.coords();
        let dot: f64 = self.u.iter().zip(y).map(|(a, b)| a * b).sum();
        dot >= self.r1 && RadiusSq::of(self.r2).admits(pt.four_norm())
    }

    /// The angle `α` when `u` has the reflection-search shape.
    fn reflection_angle(&self) -> Option<f64> {
        let [a, b, c, d] = self.u;
        let tol = 1e-12;
        let shaped = d == 0.0
            && (c + 1.0 / SQRT_2).abs() < tol
            && (a * a + b * b - 0.5).abs() < tol;
        shaped.then(|| b.atan2(a))
    }

    /// Volume of the cap: `π r2⁴/24 · (12φ - 8 sin 2φ + sin 4φ)`, `φ = arccos(r1/r2)`.
    pub fn volume(&self) -> f64 {
        let ratio = (self.r1 / self.r2).clamp(-1.0, 1.0);
        let phi = ratio.acos();
        std::f64::consts::PI * self.r2.powi(4) / 24.0
            * (12.0 * phi - 8.0 * (2.0 * phi).sin() + (4.0 * phi).sin())
    }
}

/// Range of `p2` for fixed `q2` such that the inner disk cap is nonempty:
/// `√2 r1 + p2 ≤ √(R² - p2²)` with `R² = r2² - 3q2²`.
fn p2_interval(r1: f64, r2: f64, two_q2: i128) -> Option<(f64, f64)> {
    let g = guard(r2);
    let y4 = SQRT3 * two_q2 as f64 / 2.0;
    let big_r = radicand(r2, y4.abs()).sqrt();
    if r1 > big_r + g {
        return None;
    }
    let disc = radicand(big_r, r1.abs()).sqrt();
    // Valid p2: λ1 = √2 r1 + p2 ≤ 0 (the whole disk is inside the
    // half-plane), or the quadratic root interval.
    let hi = if r1 < -big_r {
        big_r
    } else {
        ((-r1 + disc) / SQRT_2).max(-SQRT_2 * r1).min(big_r)
    };
    let lo = if big_r >= SQRT_2 * r1 {
        -big_r
    } else {
        (-r1 - disc) / SQRT_2
    };
    Some((lo - g, hi + g))
}

/// Lattice points of a [`CapRegion4D`], ordered by `(q2, p2, q1, p1)`.
pub fn enum_cap4(region: &CapRegion4D) -> Vec<Point4> {
    cap4_rows(region).flatten().collect()
}

/// The points of [`enum_cap4`] grouped by `(q2, p2)` row, in the same
/// order. Rows are produced lazily, so a caller can stop early.
pub fn cap4_rows(region: &CapRegion4D) -> Cap4Rows {
    let inner = match region.reflection_angle() {
        Some(alpha) => RowSource::Reduced(ReducedRows::new(*region, alpha)),
        None => RowSource::Box(Some(*region)),
    };
    Cap4Rows { inner }
}

/// Iterator returned by [`cap4_rows`]; empty rows are skipped.
#[derive(Clone, Debug)]
pub struct Cap4Rows {
    inner: RowSource,
}

#[derive(Clone, Debug)]
enum RowSource {
    Reduced(ReducedRows),
    Box(Option<CapRegion4D>),
}

impl Iterator for Cap4Rows {
    type Item = Vec<Point4>;

    fn next(&mut self) -> Option<Vec<Point4>> {
        match &mut self.inner {
            RowSource::Reduced(rows) => rows.next(),
            RowSource::Box(region) => region.take().map(|r| enum_cap4_box(&r)),
        }
    }
}

#[derive(Clone, Debug)]
struct ReducedRows {
    region: CapRegion4D,
    alpha: f64,
    two_q2: i128,
    two_q2_hi: i128,
    two_p2: i128,
    two_p2_hi: i128,
}

impl ReducedRows {
    fn new(region: CapRegion4D, alpha: f64) -> Self {
        let (r1, r2) = (region.r1, region.r2);
        let (lo, hi) = if r2 < 0.0 || r1 > r2 + guard(r2) {
            (1, 0)
        } else {
            // |y4| = √3|q2| ≤ √(r2² - r1²) when r1 ≥ 0.
            let y4_max = if r1 > 0.0 { radicand(r2, r1).sqrt() } else { r2 };
            let q_lim = (2.0 * (y4_max + guard(r2)) / SQRT3).floor() as i128;
            (-q_lim, q_lim)
        };
        let mut rows = Self {
            region,
            alpha,
            two_q2: lo,
            two_q2_hi: hi,
            two_p2: 1,
            two_p2_hi: 0,
        };
        rows.load_p2_range();
        rows
    }

    /// Sets the `p2` range for the current `q2`, advancing `q2` past empty
    /// intervals.
    fn load_p2_range(&mut self) {
        let (r1, r2) = (self.region.r1, self.region.r2);
        while self.two_q2 <= self.two_q2_hi {
            if let Some((lo, hi)) = p2_interval(r1, r2, self.two_q2) {
                let mut two_p2 = (2.0 * lo).ceil() as i128;
                if (two_p2 - self.two_q2).rem_euclid(2) != 0 {
                    two_p2 += 1;
                }
                self.two_p2 = two_p2;
                self.two_p2_hi = (2.0 * hi).floor() as i128;
                return;
            }
            self.two_q2 += 1;
        }
    }

    fn row(&self, second: HalfIntPair) -> Vec<Point4> {
        let (r1, r2) = (self.region.r1, self.region.r2);
        let p2 = second.p();
        let y4 = SQRT3 * second.q();
        let lambda1 = SQRT_2 * r1 + p2;
        let lambda2 = radicand(r2, y4.abs()) - p2 * p2;
        if lambda2 < -guard(r2) {
            return Vec::new();
        }
        let lambda2 = lambda2.max(0.0).sqrt();
        Enum2D::new(self.alpha, lambda1, lambda2, false)
            .map(|first| Point4 { first, second })
            .filter(|pt| self.region.contains(pt))
            .collect()
    }
}

impl Iterator for ReducedRows {
    type Item = Vec<Point4>;

    fn next(&mut self) -> Option<Vec<Point4>> {
        while self.two_q2 <= self.two_q2_hi {
            if self.two_p2 > self.two_p2_hi {
                self.two_q2 += 1;
                self.load_p2_range();
                continue;
            }
            let second = HalfIntPair {
                two_p: self.two_p2,
                two_q: self.two_q2,
            };
            self.two_p2 += 2;
            let row = self.row(second);
            if !row.is_empty() {
                return Some(row);
            }
        }
        None
    }
}

fn enum_cap4_box(region: &CapRegion4D) -> Vec<Point4> {
    let mut out = Vec::new();
    if region.r2 < 0.0 {
        return out;
    }
    let lim_p = (2.0 * region.r2 + 1.0).floor() as i128;
    let lim_q = (2.0 * region.r2 / SQRT3 + 1.0).floor() as i128;
    for tq2 in -lim_q..=lim_q {
        for tp2 in -lim_p..=lim_p {
            if (tp2 - tq2).rem_euclid(2) != 0 {
                continue;
            }
            for tq1 in -lim_q..=lim_q {
                for tp1 in -lim_p..=lim_p {
                    if (tp1 - tq1).rem_euclid(2) != 0 {
                        continue;
                    }
                    let pt = Point4 {
                        first: HalfIntPair {
                            two_p: tp1,
                            two_q: tq1,
                        },
                        second: HalfIntPair {
                            two_p: tp2,
                            two_q: tq2,
                        },
                    };
                    if region.contains(&pt) {
                        out.push(pt);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::FRAC_1_SQRT_2;
    use std::collections::BTreeSet;

    fn brute_2d(region: &SearchRegion2D) -> BTreeSet<HalfIntPair> {
        let lp = (2.0 * region.r2.abs()).ceil() as i128 + 2;
        let lq = (2.0 * region.r2.abs() / SQRT3).ceil() as i128 + 2;
        let mut out = BTreeSet::new();
        for two_q in -lq..=lq {
            for two_p in -lp..=lp {
                if (two_p - two_q).rem_euclid(2) != 0 {
                    continue;
                }
                let pt = HalfIntPair { two_p, two_q };
                if region.contains(pt) {
                    out.insert(pt);
                }
            }
        }
        out
    }

    fn collected(region: &SearchRegion2D) -> Vec<HalfIntPair> {
        enum_2d(region).collect()
    }

    #[test]
    fn unit_disk_tangent() {
        let pts = collected(&SearchRegion2D::new(0.0, 1.0, 1.0));
        assert_eq!(pts, vec![HalfIntPair { two_p: 2, two_q: 0 }]);
    }

    #[test]
    fn empty_when_plane_misses_disk() {
        assert!(collected(&SearchRegion2D::new(0.3, 2.0, 1.0)).is_empty());
    }

    #[test]
    fn matches_box_scan() {
        let r = SearchRegion2D::new(0.0, 0.9, 3.0);
        let pts = collected(&r);
        assert_eq!(pts.iter().copied().collect::<BTreeSet<_>>(), brute_2d(&r));
        assert!(pts.windows(2).all(|w| (w[0].two_q, w[0].two_p) < (w[1].two_q, w[1].two_p)));
    }

    #[test]
    fn random_regions_match_box_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let alpha = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let r2 = rng.gen_range(0.0..50.0);
            let r1 = rng.gen_range(-1.2 * r2..1.1 * r2);
            let region = SearchRegion2D::new(alpha, r1, r2);
            let pts = collected(&region);
            let set: BTreeSet<_> = pts.iter().copied().collect();
            assert_eq!(set.len(), pts.len());
            assert_eq!(set, brute_2d(&region), "{region:?}");
        }
    }

    #[test]
    fn density_approaches_lattice_density() {
        let region = SearchRegion2D::new(0.4, 150.0, 400.0);
        let count = enum_2d(&region).count() as f64;
        let ratio = count / region.area();
        assert!((ratio - 2.0 / SQRT3).abs() < 0.01, "ratio {ratio}");
    }

    fn brute_4d(region: &CapRegion4D) -> BTreeSet<Point4> {
        enum_cap4_box(region).into_iter().collect()
    }

    #[test]
    fn tangent_cap_is_nearly_empty() {
        let region = CapRegion4D::householder(0.3, 3.0, 3.0);
        let pts = enum_cap4(&region);
        assert_eq!(pts.iter().copied().collect::<BTreeSet<_>>(), brute_4d(&region));
        assert!(pts.len() <= 1);
    }

    #[test]
    fn reduced_enumeration_matches_box_at_small_f() {
        let region = CapRegion4D::for_denominator(0.0, 2, 0.5);
        let pts = enum_cap4(&region);
        assert!(!pts.is_empty());
        assert_eq!(pts.iter().copied().collect::<BTreeSet<_>>(), brute_4d(&region));
    }

    #[test]
    fn random_caps_match_box_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..12 {
            let alpha = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let r2 = rng.gen_range(0.0..6.0);
            let r1 = rng.gen_range(-1.2 * r2..1.05 * r2);
            let region = CapRegion4D::householder(alpha, r1, r2);
            let pts = enum_cap4(&region);
            let set: BTreeSet<_> = pts.iter().copied().collect();
            assert_eq!(set.len(), pts.len());
            assert_eq!(set, brute_4d(&region), "{region:?}");
        }
    }

    #[test]
    fn deeply_negative_r1_keeps_whole_disk_rows() {
        // -r2 < r1 < -r2/√2: rows with √2 r1 + p2 ≤ 0 lie past the root interval.
        let region = CapRegion4D::new([-0.595234700006467, -0.3817009980445572, -FRAC_1_SQRT_2, 0.0], -1.902005617274639, 2.037109166297044);
        let set: BTreeSet<_> = enum_cap4(&region).into_iter().collect();
        assert_eq!(set, brute_4d(&region));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..12 {
            let alpha = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let r2 = rng.gen_range(0.5..5.0);
            let r1 = rng.gen_range(-r2..-r2 * FRAC_1_SQRT_2);
            let region = CapRegion4D::householder(alpha, r1, r2);
            let set: BTreeSet<_> = enum_cap4(&region).into_iter().collect();
            assert_eq!(set, brute_4d(&region), "{region:?}");
        }
    }

    #[test]
    fn general_direction_uses_box_fallback() {
        let u = [0.5, 0.5, 0.5, 0.5];
        let region = CapRegion4D::new(u, 1.0, 2.0);
        let pts = enum_cap4(&region);
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| region.contains(p)));
    }

    #[test]
    fn count_tracks_cap_volume() {
        for f in 2..=8u32 {
            let region = CapRegion4D::for_denominator(0.37, f, 0.6);
            let count = enum_cap4(&region).len() as f64;
            let expected = region.volume() * 4.0 / 3.0;
            assert!(
                count >= expected / 3.0 && count <= expected * 3.0,
                "f={f}: {count} vs {expected}"
            );
        }
    }

    #[test]
    fn yielded_points_satisfy_both_inequalities() {
        let region = CapRegion4D::for_denominator(-0.8, 5, 0.3);
        for pt in enum_cap4(&region) {
            let y = pt.coords();
            let dot: f64 = region.u.iter().zip(y).map(|(a, b)| a * b).sum();
            let nrm: f64 = y.iter().map(|v| v * v).sum();
            assert!(dot >= region.r1 - 1e-9);
            assert!(nrm <= region.r2 * region.r2 + 1e-9);
        }
    }
}
