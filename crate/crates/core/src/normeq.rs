//! The norm equation `|x|² = N` over `Z[ω]`.
//!
//! Writing `x = a + bω` as half-integers `p = a - b/2`, `q = b/2` turns the
//! equation into `p² + 3q² = N`. We walk `q = 0, ½, 1, …` up to `√(N/3)` and
//! test whether `N - 3q²` is the square of a half-integer `p` with
//! `p + q ∈ Z`. All loops use doubled coordinates, so everything stays in
//! integers.

use crate::ring::{EisensteinInt, HalfIntPair};

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// One solution of `N(x) = n`, or `None` when there is none.
///
/// Deterministic: the smallest `q ≥ 0` is taken first, and the
/// non-negative `p` branch is preferred.
pub fn solve_norm(n: i128) -> Option<EisensteinInt> {
    if n < 0 {
        return None;
    }
    let four_n = 4 * n;
    let mut two_q: i128 = 0;
    while 3 * two_q * two_q <= four_n {
        if let Some(two_p) = isqrt_exact(four_n - 3 * two_q * two_q) {
            if (two_p + two_q) % 2 == 0 {
                return HalfIntPair { two_p, two_q }.to_eisenstein();
            }
        }
        two_q += 1;
    }
    None
}

/// Every `x` with `N(x) = n`, sorted by `(a, b)`.
pub fn all_norm_solutions(n: i128) -> Vec<EisensteinInt> {
    if n < 0 {
        return Vec::new();
    }
    let four_n = 4 * n;
    let mut out = Vec::new();
    let mut two_q: i128 = 0;
    while 3 * two_q * two_q <= four_n {
        if let Some(two_p) = isqrt_exact(four_n - 3 * two_q * two_q) {
            if (two_p + two_q) % 2 == 0 {
                for sp in [two_p, -two_p] {
                    for sq in [two_q, -two_q] {
                        if let Some(x) = (HalfIntPair {
                            two_p: sp,
                            two_q: sq,
                        })
                        .to_eisenstein()
                        {
                            out.push(x);
                        }
                    }
                }
            }
        }
        two_q += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// Precomputed solution lists for every `N ≤ n_max`.
#[derive(Debug, Clone)]
pub struct NormTable {
    solutions: Vec<Vec<EisensteinInt>>,
}

impl NormTable {
    pub fn n_max(&self) -> i128 {
        self.solutions.len() as i128 - 1
    }

    pub fn get(&self, n: i128) -> Option<&[EisensteinInt]> {
        usize::try_from(n)
            .ok()
            .and_then(|i| self.solutions.get(i))
            .map(Vec::as_slice)
    }
}

/// Builds the table by a single sweep over the disk `N(x) ≤ n_max`.
pub fn norm_table(n_max: usize) -> NormTable {
    let mut solutions = vec![Vec::new(); n_max + 1];
    let limit = n_max as i128;
    // |b| ≤ 2√(N/3), and for fixed b, a ranges over a window around b/2.
    let b_max = (4 * limit / 3).isqrt() + 1;
    for b in -b_max..=b_max {
        let rem = 4 * limit - 3 * b * b;
        if rem < 0 {
            continue;
        }
        let w = rem.isqrt() + 2;
        // 2a - b ∈ [-w, w]
        let a_lo = (b - w).div_euclid(2);
        let a_hi = (b + w).div_euclid(2) + 1;
        for a in a_lo..=a_hi {
            let x = EisensteinInt::new(a, b);
            let n = x.norm();
            if n <= limit {
                solutions[n as usize].push(x);
            }
        }
    }
    for s in &mut solutions {
        s.sort();
    }
    NormTable { solutions }
}

/// Trial-division factorization, ascending primes.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut c = 0;
            while n % p == 0 {
                n /= p;
                c += 1;
            }
            out.push((p, c));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `n` is a norm iff every prime `p ≡ 2 (mod 3)` divides it to an even power.
pub fn is_norm(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    if n == 0 {
        return true;
    }
    factorize(n as u128)
        .iter()
        .all(|&(p, c)| p % 3 != 2 || c % 2 == 0)
}

/// Factorization-based solver: combines one solution per prime factor.
/// Split primes `p ≡ 1 (mod 3)` are solved by the enumeration above in
/// `O(√p)`; inert primes contribute `p^{c/2}`; `3` contributes `(1 - ω)^c`.
pub fn solve_norm_factored(n: i128) -> Option<EisensteinInt> {
    if n < 0 {
        return None;
    }
    if n == 0 {
        return Some(EisensteinInt::ZERO);
    }
    let mut acc = EisensteinInt::ONE;
    for (p, c) in factorize(n as u128) {
        let p = p as i128;
        let factor = match p % 3 {
            0 => EisensteinInt::new(1, -1).pow(c),
            2 if c % 2 == 0 => EisensteinInt::from_int(p).pow(c / 2),
            2 => return None,
            _ => solve_norm(p)?.pow(c),
        };
        acc = acc.checked_mul(factor)?;
    }
    Some(acc)
}
