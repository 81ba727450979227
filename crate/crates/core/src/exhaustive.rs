//! Exhaustive search over diagonal triplets `(x1, y2, z3)` followed by exact
//! completion of the off-diagonal entries.
//!
//! Pruning rests on the cofactor identity `adj(V) = det(V)·V†`. For a
//! numerator matrix over `χ^f` with determinant unit `w` it reads
//!
//! ```text
//! x2·y1 = x1·y2 - w(-1)^f χ^f conj(z3)
//! x3·z1 = x1·z3 - w(-1)^f χ^f conj(y2)
//! y3·z2 = y2·z3 - w(-1)^f χ^f conj(x1)
//! ```
//!
//! With deficits `Nᵢ = 3^f - |diagᵢ|²`, the row and column norms force
//! `|x2|² + |y1|² = N1 + N2 - N3`, so `|x2|²` and `|y1|²` are the roots of a
//! quadratic whose discriminant must be a perfect square. The same holds for
//! the other two pairs. These tests reject almost every triplet before any
//! norm equation is solved.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{enum_2d, SearchRegion2D};
use crate::linalg3::{frobenius_distance, is_unitary, rz_target, RingMatrix3};
use crate::normeq::all_norm_solutions;
use crate::ring::{gamma_divide, pow3, EisensteinInt, Unit};

/// How the total tolerance `ε` is shared between the three columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BudgetSplit {
    /// `εᵢ = ε/√3` for every column.
    #[default]
    Symmetric,
    /// Each column may use up to `ε`, subject to `Σ εᵢ² ≤ ε²` on the
    /// actual column errors. Admits every diagonal within `ε`.
    Joint,
}

/// Whether the Horn prefilter admits diagonals on the boundary of the
/// unitary-diagonal region.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HornMode {
    /// `|x1| + |y2| - |z3| ≤ √3^f`: exactly the diagonals of unitaries.
    #[default]
    Inclusive,
    /// `<` instead of `≤`. Rejects every boundary diagonal, including any
    /// diagonal entry of full modulus (so no solution at `f = 0`). Tends to
    /// raise `N_R` at large `ε`.
    Strict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveOptions {
    pub budget: BudgetSplit,
    pub horn: HornMode,
    /// Worker threads; `None` uses the global pool. Output does not depend
    /// on this value.
    pub workers: Option<usize>,
    /// Largest denominator exponent tried before giving up.
    pub max_f: u32,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        Self {
            budget: BudgetSplit::Symmetric,
            horn: HornMode::Inclusive,
            workers: None,
            max_f: 36,
        }
    }
}

/// Diagonal numerators over `χ^f` (already divided by `Γ(f)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateTriplet {
    pub x1: EisensteinInt,
    pub y2: EisensteinInt,
    pub z3: EisensteinInt,
    pub f: u32,
}

impl CandidateTriplet {
    pub fn new(x1: EisensteinInt, y2: EisensteinInt, z3: EisensteinInt, f: u32) -> Self {
        Self { x1, y2, z3, f }
    }

    pub fn diagonal(&self) -> [EisensteinInt; 3] {
        [self.x1, self.y2, self.z3]
    }

    /// `3^f - |dᵢ|²` for each diagonal entry.
    pub fn deficits(&self) -> [i128; 3] {
        let s = pow3(self.f);
        self.diagonal().map(|d| s - d.norm())
    }

    /// `(max deficit, x1, y2, z3)`: the search order.
    fn order_key(&self) -> (i128, EisensteinInt, EisensteinInt, EisensteinInt) {
        let d = self.deficits();
        (d[0].max(d[1]).max(d[2]), self.x1, self.y2, self.z3)
    }
}

/// Region angles for the three diagonal entries of `R^Z(θ)`.
fn region_angles(theta: f64) -> [f64; 3] {
    [-theta / 2.0, theta / 2.0, 0.0]
}

/// One diagonal candidate with its cached float image.
#[derive(Clone, Copy, Debug)]
struct Entry {
    num: EisensteinInt,
    norm: i128,
    /// `num / χ^f` as a complex number.
    value: Complex64,
}

fn region_entries(alpha: f64, f: u32, eps_i: f64, reduced_only: bool) -> Vec<Entry> {
    let region = SearchRegion2D::for_denominator(alpha, f, eps_i);
    let r2 = region.r2;
    enum_2d(&region)
        .filter_map(|h| {
            let prime = h.to_eisenstein()?;
            let num = gamma_divide(prime, f).ok()?;
            if reduced_only && num.is_chi_divisible() {
                return None;
            }
            Some(Entry {
                num,
                norm: num.norm(),
                value: prime.to_complex() / r2,
            })
        })
        .collect()
}

/// Γ-divisible lattice points of the three regions, each in
/// `(q, p)` order, returned as numerators over `χ^f`.
fn candidate_lists(theta: f64, f: u32, budgets: [f64; 3], reduced_only: bool) -> [Vec<Entry>; 3] {
    let angles = region_angles(theta);
    [0, 1, 2].map(|i| region_entries(angles[i], f, budgets[i], reduced_only))
}

/// The Cartesian product of the three region enumerations, in lexicographic
/// order of the per-region enumeration indices.
pub fn enumerate_candidates(
    theta: f64,
    f: u32,
    budgets: (f64, f64, f64),
) -> impl Iterator<Item = CandidateTriplet> {
    let [a, b, c] = candidate_lists(theta, f, [budgets.0, budgets.1, budgets.2], false);
    let nums = |v: Vec<Entry>| v.into_iter().map(|e| e.num).collect::<Vec<_>>();
    let (a, b, c) = (nums(a), nums(b), nums(c));
    a.into_iter().flat_map(move |x1| {
        let c = c.clone();
        b.clone()
            .into_iter()
            .flat_map(move |y2| c.clone().into_iter().map(move |z3| CandidateTriplet::new(x1, y2, z3, f)))
    })
}

/// `√A + √B ≤ √C + √D` for non-negative integers; `None` on overflow.
fn sqrt_sum_le(a: i128, b: i128, c: i128, d: i128) -> Option<bool> {
    let s = a.checked_add(b)?.checked_sub(c)?.checked_sub(d)?;
    let p = a.checked_mul(b)?.checked_mul(4)?;
    let q = c.checked_mul(d)?.checked_mul(4)?;
    let s2 = s.checked_mul(s)?;
    if s >= 0 {
        // √P + s ≤ √Q
        let rhs = q.checked_sub(p)?.checked_sub(s2)?;
        if rhs < 0 {
            return Some(false);
        }
        Some(s2.checked_mul(4)?.checked_mul(p)? <= rhs.checked_mul(rhs)?)
    } else {
        // √P ≤ √Q + |s|
        let lhs = p.checked_sub(q)?.checked_sub(s2)?;
        if lhs <= 0 {
            return Some(true);
        }
        Some(lhs.checked_mul(lhs)? <= s2.checked_mul(4)?.checked_mul(q)?)
    }
}

/// Horn's condition for a unitary diagonal: `|x1| + |y2| - |z3| ≤ √3^f`
/// and its two cyclic variants.
///
/// Compared in double precision; within a relative band of `1e-9` the
/// comparison is redone exactly. If the exact form overflows the triplet is
/// accepted, since this is only a prefilter.
pub fn horn_check(t: &CandidateTriplet) -> bool {
    horn_check_with(t, HornMode::Inclusive)
}

/// [`horn_check`] with a choice of boundary handling.
pub fn horn_check_with(t: &CandidateTriplet, mode: HornMode) -> bool {
    let Some(s) = 3i128.checked_pow(t.f) else {
        return true;
    };
    let [n1, n2, n3] = t.diagonal().map(|d| d.norm());
    let bound = (s as f64).sqrt();
    let band = 1e-9 * bound.max(1.0);
    let one = |a: i128, b: i128, c: i128| {
        let lhs = (a as f64).sqrt() + (b as f64).sqrt() - (c as f64).sqrt();
        if lhs < bound - band {
            true
        } else if lhs > bound + band {
            false
        } else {
            match mode {
                HornMode::Inclusive => sqrt_sum_le(a, b, c, s).unwrap_or(true),
                // √a + √b < √c + √s  ⟺  not (√c + √s ≤ √a + √b).
                HornMode::Strict => sqrt_sum_le(c, s, a, b).is_none_or(|le| !le),
            }
        }
    };
    one(n1, n2, n3) && one(n1, n3, n2) && one(n2, n3, n1)
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// `(-1)^f χ^f`, exactly.
fn signed_chi_power(f: u32) -> EisensteinInt {
    let c = EisensteinInt::CHI.pow(f);
    if f % 2 == 1 {
        -c
    } else {
        c
    }
}

/// Off-diagonal norms `[|x2|², |x3|², |y1|², |y3|², |z1|², |z2|²]` and the
/// products `[x2·y1, x3·z1, y3·z2]` admitted by the cofactor identity for
/// one determinant unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct OffDiagonalPlan {
    norms: [i128; 6],
    products: [EisensteinInt; 3],
}

/// All plans for determinant unit `w`. Empty when the triplet cannot be
/// completed with that determinant.
fn plans_for_unit(t: &CandidateTriplet, w: Unit, chi_f: EisensteinInt) -> Option<Vec<OffDiagonalPlan>> {
    let [n1, n2, n3] = t.deficits();
    let wc = w.to_eisenstein().checked_mul(chi_f)?;
    let cof = |p: EisensteinInt, q: EisensteinInt, r: EisensteinInt| -> Option<EisensteinInt> {
        p.checked_mul(q)?.checked_sub(wc.checked_mul(r.conj())?)
    };
    let p12 = cof(t.x1, t.y2, t.z3)?;
    let p13 = cof(t.x1, t.z3, t.y2)?;
    let p23 = cof(t.y2, t.z3, t.x1)?;
    let (m12, m13, m23) = (p12.checked_norm()?, p13.checked_norm()?, p23.checked_norm()?);
    let s12 = n1 + n2 - n3;
    let s13 = n1 - n2 + n3;
    let s23 = n2 + n3 - n1;
    let mut out = Vec::new();
    for (s, m) in [(s12, m12), (s13, m13), (s23, m23)] {
        if s < 0 {
            return Some(out);
        }
        let disc = s.checked_mul(s)?.checked_sub(m.checked_mul(4)?)?;
        match isqrt_exact(disc) {
            Some(r) if (s + r) % 2 == 0 => {}
            _ => return Some(out),
        }
    }
    let r = isqrt_exact(s12 * s12 - 4 * m12).expect("checked above");
    let mut roots = vec![(s12 + r) / 2];
    if r != 0 {
        roots.push((s12 - r) / 2);
    }
    for a in roots {
        let c = s12 - a;
        let (b, e, d, g) = (n1 - a, n1 - c, n2 - c, n2 - a);
        if [a, b, c, d, e, g].iter().any(|&v| v < 0) {
            continue;
        }
        if b.checked_mul(e)? != m13 || d.checked_mul(g)? != m23 {
            continue;
        }
        out.push(OffDiagonalPlan {
            norms: [a, b, c, d, e, g],
            products: [p12, p13, p23],
        });
    }
    Some(out)
}

/// Every plan over the six determinant units; `None` on overflow.
fn completion_plans(t: &CandidateTriplet) -> Option<Vec<OffDiagonalPlan>> {
    let chi_f = signed_chi_power(t.f);
    let mut out = Vec::new();
    for w in Unit::all() {
        out.extend(plans_for_unit(t, w, chi_f)?);
    }
    Some(out)
}

/// Pairs `(u, v)` with `|u|² = nu`, `|v|² = nv`, `u·v = prod`.
fn factor_pairs(
    nu: i128,
    nv: i128,
    prod: EisensteinInt,
    sols: &mut impl FnMut(i128) -> Vec<EisensteinInt>,
) -> Vec<(EisensteinInt, EisensteinInt)> {
    let mut out = Vec::new();
    if nu == 0 || nv == 0 {
        if !prod.is_zero() {
            return out;
        }
        for u in sols(nu) {
            for v in sols(nv) {
                out.push((u, v));
            }
        }
        return out;
    }
    for u in sols(nu) {
        if let Some(v) = prod.div_exact(u) {
            out.push((u, v));
        }
    }
    out
}

fn complete_with(
    t: &CandidateTriplet,
    plans: &[OffDiagonalPlan],
    sols: &mut impl FnMut(i128) -> Vec<EisensteinInt>,
) -> Option<RingMatrix3> {
    for plan in plans {
        let [a, b, c, d, e, g] = plan.norms;
        let [p12, p13, p23] = plan.products;
        for (x2, y1) in factor_pairs(a, c, p12, sols) {
            for (x3, z1) in factor_pairs(b, e, p13, sols) {
                for (y3, z2) in factor_pairs(d, g, p23, sols) {
                    let m = RingMatrix3::new(
                        [[t.x1, y1, z1], [x2, t.y2, z2], [x3, y3, t.z3]],
                        t.f,
                    );
                    if is_unitary(&m) {
                        return Some(m);
                    }
                }
            }
        }
    }
    None
}

/// A unitary with diagonal `t` over `χ^f`, or `None` if there is none.
/// The result is stored reduced, so its exponent may be below `t.f` when
/// every entry is divisible by `χ`.
///
/// Exhaustive: the off-diagonal norms are fixed by the cofactor quadratic,
/// each product pair is factored over every solution of its norm equation,
/// and the result is checked for exact unitarity.
pub fn complete_unitary(t: &CandidateTriplet) -> Option<RingMatrix3> {
    let plans = completion_plans(t)?;
    complete_with(t, &plans, &mut all_norm_solutions)
}

/// Budgets `εᵢ` used to build the three regions.
fn region_budgets(eps: f64, split: BudgetSplit) -> [f64; 3] {
    match split {
        BudgetSplit::Symmetric => [eps / 3f64.sqrt(); 3],
        BudgetSplit::Joint => [eps; 3],
    }
}

/// `2 - 2 Re(d e^{-iα})`, the squared error of one column.
fn column_error(value: Complex64, alpha: f64) -> f64 {
    2.0 - 2.0 * (value * Complex64::from_polar(1.0, -alpha)).re
}

/// Candidates of the exponent-`f` search that survive every exact
/// prefilter, sorted in search order.
fn surviving_triplets(theta: f64, f: u32, eps: f64, split: BudgetSplit, horn: HornMode) -> Vec<CandidateTriplet> {
    let budgets = region_budgets(eps, split);
    let [la, lb, lc] = candidate_lists(theta, f, budgets, f > 0);
    if la.is_empty() || lb.is_empty() || lc.is_empty() {
        return Vec::new();
    }
    let angles = region_angles(theta);
    let scale = pow3(f) as f64;
    let chi_f = signed_chi_power(f);

    // z3 sorted by the argument of its conjugate, for window lookups.
    let mut lc_sorted: Vec<(f64, usize)> = lc
        .iter()
        .enumerate()
        .map(|(k, e)| (e.value.conj().arg(), k))
        .collect();
    lc_sorted.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let angles_sorted: Vec<f64> = lc_sorted.iter().map(|p| p.0).collect();
    let min_abs_z = lc.iter().map(|e| e.value.norm()).fold(f64::INFINITY, f64::min);
    let max_def3 = lc.iter().map(|e| 1.0 - e.norm as f64 / scale).fold(0.0, f64::max);
    let joint = split == BudgetSplit::Joint;
    let eps_sq = eps * eps;

    let mut found: Vec<CandidateTriplet> = la
        .par_iter()
        .flat_map_iter(|ea| {
            let mut local = Vec::new();
            let mut window = Vec::new();
            let n1 = 1.0 - ea.norm as f64 / scale;
            let e1 = column_error(ea.value, angles[0]);
            for eb in &lb {
                let n2 = 1.0 - eb.norm as f64 / scale;
                let e2 = column_error(eb.value, angles[1]);
                if joint && e1 + e2 > eps_sq * (1.0 + 1e-9) {
                    continue;
                }
                // |X1 Y2 - w Z̄3| ≤ (n1 + n2 - n3)/2 ≤ (n1 + n2)/2.
                let t = ea.value * eb.value;
                let rho = 0.5 * (n1 + n2).max(0.0) + 1e-9;
                if n1 + n2 + 1e-9 < 0.0 || n1 + n2 - max_def3 > 2.0 + 1e-9 {
                    continue;
                }
                let lens = (t.norm() * min_abs_z).sqrt();
                let ratio = if lens > 0.0 { rho / (2.0 * lens) } else { f64::INFINITY };
                let delta = if ratio >= 1.0 { 4.0 } else { 2.0 * ratio.asin() + 1e-9 };
                for w in Unit::all() {
                    let wv = w.to_complex();
                    window.clear();
                    collect_window(&angles_sorted, &lc_sorted, t.arg() - wv.arg(), delta, &mut window);
                    for &k in &window {
                        let ec = &lc[k];
                        if joint && e1 + e2 + column_error(ec.value, angles[2]) > eps_sq * (1.0 + 1e-9) {
                            continue;
                        }
                        // Float images of the three cofactor bounds.
                        let n3 = 1.0 - ec.norm as f64 / scale;
                        let tol = 1e-9;
                        if (t - wv * ec.value.conj()).norm() > 0.5 * (n1 + n2 - n3) + tol
                            || (ea.value * ec.value - wv * eb.value.conj()).norm() > 0.5 * (n1 + n3 - n2) + tol
                            || (eb.value * ec.value - wv * ea.value.conj()).norm() > 0.5 * (n2 + n3 - n1) + tol
                        {
                            continue;
                        }
                        let cand = CandidateTriplet::new(ea.num, eb.num, ec.num, f);
                        let admissible = plans_for_unit(&cand, w, chi_f).is_none_or(|p| !p.is_empty());
                        if admissible && horn_check_with(&cand, horn) {
                            local.push(cand);
                        }
                    }
                }
            }
            local
        })
        .collect();
    found.sort_by(|p, q| p.order_key().cmp(&q.order_key()));
    found.dedup();
    found
}

/// Pushes indices of `sorted` whose angle lies within `delta` of `centre`
/// modulo `2π`.
fn collect_window(angles: &[f64], sorted: &[(f64, usize)], centre: f64, delta: f64, out: &mut Vec<usize>) {
    use std::f64::consts::{PI, TAU};
    if delta >= PI {
        out.extend(sorted.iter().map(|p| p.1));
        return;
    }
    let c = (centre + PI).rem_euclid(TAU) - PI;
    let mut push_range = |lo: f64, hi: f64| {
        let i = angles.partition_point(|&a| a < lo);
        let j = angles.partition_point(|&a| a <= hi);
        out.extend(sorted[i..j].iter().map(|p| p.1));
    };
    let (lo, hi) = (c - delta, c + delta);
    push_range(lo.max(-PI - 1.0), hi.min(PI + 1.0));
    if lo < -PI {
        push_range(lo + TAU, PI + 1.0);
    }
    if hi > PI {
        push_range(-PI - 1.0, hi - TAU);
    }
}

fn diag_within_budget(v: &RingMatrix3, theta: f64, eps: f64, split: BudgetSplit) -> bool {
    let c = v.to_complex();
    let angles = region_angles(theta);
    let errs: Vec<f64> = (0..3).map(|i| column_error(c[i][i], angles[i])).collect();
    match split {
        BudgetSplit::Symmetric => {
            let e = eps * eps / 3.0;
            errs.iter().all(|&x| x <= e * (1.0 + 1e-9) + 1e-15)
        }
        BudgetSplit::Joint => errs.iter().sum::<f64>() <= eps * eps * (1.0 + 1e-9) + 1e-15,
    }
}

/// First completable candidate at exponent `f`, if any.
fn search_at(theta: f64, f: u32, eps: f64, split: BudgetSplit, horn: HornMode) -> Option<RingMatrix3> {
    let target = rz_target(theta);
    let mut cache: HashMap<i128, Vec<EisensteinInt>> = HashMap::new();
    let mut sols = |n: i128| cache.entry(n).or_insert_with(|| all_norm_solutions(n)).clone();
    for cand in surviving_triplets(theta, f, eps, split, horn) {
        let Some(plans) = completion_plans(&cand) else {
            continue;
        };
        if let Some(v) = complete_with(&cand, &plans, &mut sols) {
            if frobenius_distance(&v, &target) <= eps {
                return Some(v);
            }
        }
    }
    None
}

/// Exhaustive synthesis with the default options.
pub fn synth_exhaustive(theta: f64, eps: f64) -> Result<RingMatrix3> {
    synth_exhaustive_with(theta, eps, &ExhaustiveOptions::default())
}

/// Returns a unitary `V` with `‖R^Z(θ) - V‖_F ≤ ε` at the smallest
/// denominator exponent admitted by the budget split. Deterministic for
/// any worker count.
pub fn synth_exhaustive_with(theta: f64, eps: f64, opts: &ExhaustiveOptions) -> Result<RingMatrix3> {
    if !(eps > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta={theta}, eps={eps}")));
    }
    let run = || {
        for f in 0..=opts.max_f {
            if 3i128.checked_pow(2 * f.div_ceil(2) + 2).is_none() {
                return Err(Error::Overflow);
            }
            if let Some(v) = search_at(theta, f, eps, opts.budget, opts.horn) {
                debug_assert!(diag_within_budget(&v, theta, eps, opts.budget));
                return Ok(v);
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

/// Whether the diagonal of `v` meets the per-column budgets.
pub fn within_budget(v: &RingMatrix3, theta: f64, eps: f64, split: BudgetSplit) -> bool {
    diag_within_budget(v, theta, eps, split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::eta;
    use crate::linalg3::generators;
    use rand::{Rng, SeedableRng};

    fn e(a: i128, b: i128) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    #[test]
    fn identity_triplet_at_f0() {
        let all: Vec<_> = enumerate_candidates(0.0, 0, (0.1, 0.1, 0.1)).collect();
        let one = EisensteinInt::ONE;
        assert!(all.contains(&CandidateTriplet::new(one, one, one, 0)));
        let t = CandidateTriplet::new(one, one, one, 0);
        assert!(horn_check(&t));
        assert_eq!(complete_unitary(&t), Some(RingMatrix3::identity()));
    }

    #[test]
    fn candidates_meet_region_constraints() {
        let eps_i = 0.9;
        let r2 = 3f64;
        for t in enumerate_candidates(0.0, 1, (eps_i, eps_i, eps_i)) {
            for d in t.diagonal() {
                let prime = d * crate::ring::gamma(1);
                let v = prime.to_complex() / r2;
                assert!(v.re >= eta(eps_i) - 1e-12);
                assert!(prime.norm() <= 9);
            }
        }
    }

    #[test]
    fn candidate_count_matches_box_scan() {
        let (theta, f, eps) = (0.7, 4, 0.3);
        let count = enumerate_candidates(theta, f, (eps, eps, eps)).count();
        let r2 = 9.0;
        let scan = |alpha: f64| {
            let mut n = 0usize;
            for a in -20i128..=20 {
                for b in -20i128..=20 {
                    let x = e(a, b);
                    let v = x.to_complex();
                    let re = v.re * alpha.cos() + v.im * alpha.sin();
                    if re >= r2 * eta(eps) && x.norm() <= 81 && gamma_divide(x, f).is_ok() {
                        n += 1;
                    }
                }
            }
            n
        };
        let [a0, a1, a2] = region_angles(theta);
        assert_eq!(count, scan(a0) * scan(a1) * scan(a2));
        assert!(count > 0);
    }

    #[test]
    fn horn_examples() {
        let one = EisensteinInt::ONE;
        assert!(horn_check(&CandidateTriplet::new(one, one, one, 0)));
        let w = EisensteinInt::OMEGA;
        assert!(horn_check(&CandidateTriplet::new(one, w, w, 1)));
        // Non-strict Horn admits (1, 1, 3) at f = 2, yet no completion exists.
        let t = CandidateTriplet::new(one, one, e(3, 0), 2);
        assert!(horn_check(&t));
        assert_eq!(complete_unitary(&t), None);
        // |x1| + |y2| - |z3| = 3 + 3 - 1 > 3.
        assert!(!horn_check(&CandidateTriplet::new(e(3, 0), e(3, 0), one, 2)));
    }

    #[test]
    fn strict_horn_rejects_the_boundary() {
        let one = EisensteinInt::ONE;
        let w = EisensteinInt::OMEGA;
        let strict = |t: &CandidateTriplet| horn_check_with(t, HornMode::Strict);
        // Identity and any entry of full modulus sit on the boundary.
        assert!(!strict(&CandidateTriplet::new(one, one, one, 0)));
        assert!(!strict(&CandidateTriplet::new(one, w, e(3, 0), 2)));
        // H has all |entries| = 1 over √3: 1 + 1 - 1 < √3.
        let h = &generators().h;
        let d = [0, 1, 2].map(|i| h.entries()[i][i]);
        assert!(strict(&CandidateTriplet::new(d[0], d[1], d[2], h.fexp())));
    }

    #[test]
    fn strict_horn_is_a_subset() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let f = rng.gen_range(0..5u32);
            let r = 3i128.pow(f.div_ceil(2)) as i64;
            let mut g = || e(rng.gen_range(-r..=r) as i128, rng.gen_range(-r..=r) as i128);
            let t = CandidateTriplet::new(g(), g(), g(), f);
            if horn_check_with(&t, HornMode::Strict) {
                assert!(horn_check(&t), "{t:?}");
            }
        }
    }

    #[test]
    fn strict_search_skips_f0_and_stays_sound() {
        let opts = ExhaustiveOptions {
            horn: HornMode::Strict,
            ..Default::default()
        };
        for theta in [0.0, 0.4, -1.1] {
            let v = synth_exhaustive_with(theta, 1.0, &opts).unwrap();
            assert!(v.fexp() > 0);
            assert!(is_unitary(&v));
            assert!(frobenius_distance(&v, &rz_target(theta)) <= 1.0);
        }
        assert_eq!(synth_exhaustive(0.0, 1.0).unwrap().fexp(), 0);
    }

    #[test]
    fn exact_sqrt_comparison() {
        assert_eq!(sqrt_sum_le(1, 1, 1, 1), Some(true));
        assert_eq!(sqrt_sum_le(4, 1, 9, 0), Some(true));
        assert_eq!(sqrt_sum_le(4, 1, 8, 0), Some(false));
        assert_eq!(sqrt_sum_le(2, 2, 8, 0), Some(true));
        assert_eq!(sqrt_sum_le(0, 9, 1, 3), Some(false));
    }

    #[test]
    fn h_diagonal_completes() {
        let h = &generators().h;
        let d = [0, 1, 2].map(|i| h.entries()[i][i]);
        let t = CandidateTriplet::new(d[0], d[1], d[2], h.fexp());
        assert!(horn_check(&t));
        let v = complete_unitary(&t).expect("H is a witness");
        assert!(is_unitary(&v));
        assert_eq!([0, 1, 2].map(|i| v.entries()[i][i]), d);
    }

    /// Every unit column `(x1, x2, x3)` with `Σ|xᵢ|² = 3^f`.
    fn unit_columns(f: u32) -> Vec<[EisensteinInt; 3]> {
        let s = pow3(f);
        let mut out = Vec::new();
        for n1 in 0..=s {
            let s1 = all_norm_solutions(n1);
            if s1.is_empty() {
                continue;
            }
            for n2 in 0..=s - n1 {
                let s2 = all_norm_solutions(n2);
                let s3 = all_norm_solutions(s - n1 - n2);
                for &a in &s1 {
                    for &b in &s2 {
                        for &c in &s3 {
                            out.push([a, b, c]);
                        }
                    }
                }
            }
        }
        out
    }

    fn dot(u: &[EisensteinInt; 3], v: &[EisensteinInt; 3]) -> EisensteinInt {
        (0..3).fold(EisensteinInt::ZERO, |acc, i| acc + u[i].conj() * v[i])
    }

    fn cross_conj(x: &[EisensteinInt; 3], y: &[EisensteinInt; 3]) -> [EisensteinInt; 3] {
        [
            (x[1] * y[2] - x[2] * y[1]).conj(),
            (x[2] * y[0] - x[0] * y[2]).conj(),
            (x[0] * y[1] - x[1] * y[0]).conj(),
        ]
    }

    /// Every unitary numerator matrix over `χ^f`, as column triples, found
    /// by brute force over pairs of unit columns. The third column of a
    /// unitary is a unit multiple of `conj(x × y)/χ^f`.
    fn all_unitaries(f: u32) -> Vec<[[EisensteinInt; 3]; 3]> {
        let cols = unit_columns(f);
        let chi_f = EisensteinInt::CHI.pow(f);
        let mut out = Vec::new();
        for x in &cols {
            for y in &cols {
                if !dot(x, y).is_zero() {
                    continue;
                }
                let c = cross_conj(x, y);
                let Some(z) = c.iter().map(|v| v.div_exact(chi_f)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                for w in Unit::all() {
                    let w = w.to_eisenstein();
                    out.push([*x, *y, [w * z[0], w * z[1], w * z[2]]]);
                }
            }
        }
        out
    }

    #[test]
    fn completion_agrees_with_brute_force() {
        for f in 0..=2u32 {
            let unitaries = all_unitaries(f);
            let diagonals: std::collections::BTreeSet<_> =
                unitaries.iter().map(|c| [c[0][0], c[1][1], c[2][2]]).collect();
            let s = pow3(f);
            let mut diag_pool = Vec::new();
            for n in 0..=s {
                diag_pool.extend(all_norm_solutions(n));
            }
            let mut checked = 0;
            for &x1 in &diag_pool {
                for &y2 in &diag_pool {
                    for &z3 in &diag_pool {
                        let t = CandidateTriplet::new(x1, y2, z3, f);
                        let expect = diagonals.contains(&[x1, y2, z3]);
                        if expect {
                            assert!(horn_check(&t), "{t:?}");
                        }
                        let got = complete_unitary(&t);
                        assert_eq!(got.is_some(), expect, "{t:?}");
                        if let Some(v) = got {
                            assert!(is_unitary(&v));
                            let lift = EisensteinInt::CHI.pow(f - v.fexp());
                            let diag = [0, 1, 2].map(|i| v.entries()[i][i] * lift);
                            assert_eq!(diag, [x1, y2, z3]);
                        }
                        checked += 1;
                    }
                }
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn trivial_synthesis() {
        let v = synth_exhaustive(0.0, 0.1).unwrap();
        assert_eq!(v, RingMatrix3::identity());
    }

    #[test]
    fn synthesis_meets_tolerance() {
        for (theta, eps) in [(0.7, 0.25), (std::f64::consts::PI / 5.0, 1e-2), (2.0, 0.5), (-1.3, 0.1)] {
            let v = synth_exhaustive(theta, eps).unwrap();
            assert!(is_unitary(&v));
            assert!(frobenius_distance(&v, &rz_target(theta)) <= eps);
            assert!(within_budget(&v, theta, eps, BudgetSplit::Symmetric));
        }
    }

    /// Smallest `f ≤ 3` at which some unitary meets the budget, by brute
    /// force over all unitaries.
    fn min_f_oracle(theta: f64, eps: f64, split: BudgetSplit, pool: &[Vec<RingMatrix3>]) -> Option<u32> {
        pool.iter()
            .position(|ms| ms.iter().any(|m| within_budget(m, theta, eps, split)))
            .map(|f| f as u32)
    }

    #[test]
    fn minimal_f_matches_oracle() {
        use rand::{Rng, SeedableRng};
        let pool: Vec<Vec<RingMatrix3>> = (0..=3u32)
            .map(|f| {
                all_unitaries(f)
                    .into_iter()
                    .map(|c| {
                        let m = [0, 1, 2].map(|i| [c[0][i], c[1][i], c[2][i]]);
                        RingMatrix3::new(m, f)
                    })
                    .collect()
            })
            .collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut compared = 0;
        for _ in 0..20 {
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let eps = rng.gen_range(0.1..1.2);
            for split in [BudgetSplit::Symmetric, BudgetSplit::Joint] {
                let Some(want) = min_f_oracle(theta, eps, split, &pool) else {
                    continue;
                };
                let opts = ExhaustiveOptions {
                    budget: split,
                    ..Default::default()
                };
                let v = synth_exhaustive_with(theta, eps, &opts).unwrap();
                assert_eq!(v.fexp(), want, "theta={theta} eps={eps} {split:?}");
                compared += 1;
            }
        }
        assert!(compared >= 20);
    }

    #[test]
    fn deterministic_across_workers() {
        let base = ExhaustiveOptions::default();
        let one = ExhaustiveOptions {
            workers: Some(1),
            ..base.clone()
        };
        let many = ExhaustiveOptions {
            workers: Some(8),
            ..base
        };
        for (theta, eps) in [(0.3, 0.1), (1.9, 0.05)] {
            let a = synth_exhaustive_with(theta, eps, &one).unwrap();
            let b = synth_exhaustive_with(theta, eps, &many).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(synth_exhaustive(0.1, 0.0).is_err());
        assert!(synth_exhaustive(0.1, f64::NAN).is_err());
    }
}
