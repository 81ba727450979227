//! Exact 3-vectors and 3×3 matrices over the localized ring, plus the
//! gate constants and float-side helpers used for distance checks.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{chi_divide, chi_inverse_power, pow3, EisensteinInt, RingElement, Unit};

/// A complex 3×3 matrix, row-major.
pub type CMatrix3 = [[Complex64; 3]; 3];

const Z: EisensteinInt = EisensteinInt::ZERO;
const ONE: EisensteinInt = EisensteinInt::ONE;
const W: EisensteinInt = EisensteinInt::OMEGA;
const W2: EisensteinInt = EisensteinInt::new(-1, -1);

/// `(v₁, v₂, v₃)ᵀ / χ^fexp`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RingVector3 {
    pub entries: [EisensteinInt; 3],
    pub fexp: u32,
}

impl RingVector3 {
    pub fn new(entries: [EisensteinInt; 3], fexp: u32) -> Self {
        Self { entries, fexp }
    }

    pub fn norm_sum(&self) -> i128 {
        self.entries.iter().map(|x| x.norm()).sum()
    }

    /// `N(v₁) + N(v₂) + N(v₃) = 3^fexp`.
    pub fn is_unit(&self) -> bool {
        3i128
            .checked_pow(self.fexp)
            .is_some_and(|p| self.norm_sum() == p)
    }

    pub fn to_complex(&self) -> [Complex64; 3] {
        let s = chi_inverse_power(self.fexp);
        self.entries.map(|x| x.to_complex() * s)
    }
}

/// `M / χ^fexp` with `M` a 3×3 matrix of Eisenstein integers.
///
/// Always stored reduced: either `fexp == 0` or some entry of `M` is not
/// divisible by `χ`. Equality is therefore structural.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingMatrix3 {
    entries: [[EisensteinInt; 3]; 3],
    fexp: u32,
}

impl RingMatrix3 {
    pub fn new(entries: [[EisensteinInt; 3]; 3], fexp: u32) -> Self {
        let mut m = Self { entries, fexp };
        m.reduce();
        m
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE, ONE, ONE])
    }

    pub fn diagonal(d: [EisensteinInt; 3]) -> Self {
        Self::new([[d[0], Z, Z], [Z, d[1], Z], [Z, Z, d[2]]], 0)
    }

    /// Permutation matrix sending basis state `j` to `perm[j]`.
    pub fn permutation(perm: [usize; 3]) -> Self {
        let mut e = [[Z; 3]; 3];
        for (j, &i) in perm.iter().enumerate() {
            e[i][j] = ONE;
        }
        Self::new(e, 0)
    }

    pub fn entries(&self) -> &[[EisensteinInt; 3]; 3] {
        &self.entries
    }

    pub fn fexp(&self) -> u32 {
        self.fexp
    }

    pub fn entry(&self, i: usize, j: usize) -> RingElement {
        RingElement::new(self.entries[i][j], self.fexp)
    }

    fn reduce(&mut self) {
        if self.entries.iter().flatten().all(|x| x.is_zero()) {
            self.fexp = 0;
            return;
        }
        while self.fexp > 0 && self.entries.iter().flatten().all(|x| x.is_chi_divisible()) {
            for x in self.entries.iter_mut().flatten() {
                *x = chi_divide(*x).expect("checked divisible");
            }
            self.fexp -= 1;
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = [[Z; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = Z;
                for k in 0..3 {
                    let t = self.entries[i][k]
                        .checked_mul(rhs.entries[k][j])
                        .ok_or(Error::Overflow)?;
                    acc = acc.checked_add(t).ok_or(Error::Overflow)?;
                }
                *cell = acc;
            }
        }
        let fexp = self.fexp.checked_add(rhs.fexp).ok_or(Error::Overflow)?;
        Ok(Self::new(out, fexp))
    }

    /// Conjugate transpose. Since `χ̄ = -χ`, the numerator picks up `(-1)^fexp`.
    pub fn adjoint(&self) -> Self {
        let mut out = [[Z; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let c = self.entries[j][i].conj();
                *cell = if self.fexp % 2 == 1 { -c } else { c };
            }
        }
        Self {
            entries: out,
            fexp: self.fexp,
        }
    }

    pub fn scale_unit(&self, u: Unit) -> Self {
        let ue = u.to_eisenstein();
        Self {
            entries: self.entries.map(|r| r.map(|x| ue * x)),
            fexp: self.fexp,
        }
    }

    pub fn column(&self, j: usize) -> RingVector3 {
        RingVector3::new(
            [self.entries[0][j], self.entries[1][j], self.entries[2][j]],
            self.fexp,
        )
    }

    pub fn to_complex(&self) -> CMatrix3 {
        let s = chi_inverse_power(self.fexp);
        self.entries.map(|r| r.map(|x| x.to_complex() * s))
    }

    /// `det(V)` as a reduced ring element.
    pub fn determinant(&self) -> RingElement {
        let m = &self.entries;
        let t1 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
        let t2 = m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]);
        let t3 = m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        RingElement::new(t1 - t2 + t3, 3 * self.fexp)
    }

    /// For a unitary matrix the determinant is one of the six units.
    pub fn det_unit(&self) -> Option<Unit> {
        let d = self.determinant();
        if d.fexp() != 0 {
            return None;
        }
        Unit::from_eisenstein(d.num())
    }

    /// Canonical representative of the class `{u·V}`: the associate whose
    /// first nonzero entry lies in the sector `0 ≤ arg < π/3`. Returns the
    /// representative and the unit `u` with `rep = u·V`.
    pub fn canonical_phase(&self) -> (Self, Unit) {
        let first = self
            .entries
            .iter()
            .flatten()
            .find(|x| !x.is_zero())
            .copied()
            .unwrap_or(ONE);
        let (u, _) = first.canonical_associate();
        (self.scale_unit(u), u)
    }
}

impl fmt::Debug for RingMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ^-{} [", self.fexp)?;
        for (i, r) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} {} {}", r[0], r[1], r[2])?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    f: u32,
    rows: [[EisensteinInt; 3]; 3],
}

impl Serialize for RingMatrix3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            f: self.fexp,
            rows: self.entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingMatrix3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Ok(RingMatrix3::new(j.rows, j.f))
    }
}

/// Exact product; errors on overflow.
pub fn matmul(a: &RingMatrix3, b: &RingMatrix3) -> Result<RingMatrix3> {
    a.checked_mul(b)
}

/// `V†V = I`, checked in numerator arithmetic as `M†M = 3^f·I`.
pub fn is_unitary(v: &RingMatrix3) -> bool {
    let Some(scale) = 3i128.checked_pow(v.fexp) else {
        return false;
    };
    let m = v.entries();
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Z;
            for k in 0..3 {
                let Some(t) = m[k][i].conj().checked_mul(m[k][j]) else {
                    return false;
                };
                let Some(s) = acc.checked_add(t) else {
                    return false;
                };
                acc = s;
            }
            let want = if i == j { EisensteinInt::from_int(scale) } else { Z };
            if acc != want {
                return false;
            }
        }
    }
    true
}

/// `R_v = I - 2vv†` for a unit Eisenstein vector `v`.
///
/// With `v = w/χ^f`, `vv† = ww†/3^f` and `3^f = (-1)^f χ^{2f}`, so the
/// numerator is `(-1)^f (3^f δᵢⱼ - 2wᵢw̄ⱼ)` over `χ^{2f}`.
pub fn householder(v: &RingVector3) -> Result<RingMatrix3> {
    if !v.is_unit() {
        return Err(Error::NotUnit);
    }
    let scale = pow3(v.fexp);
    let w = &v.entries;
    let mut out = [[Z; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let outer = w[i]
                .checked_mul(w[j].conj())
                .and_then(|t| t.checked_mul(EisensteinInt::from_int(2)))
                .ok_or(Error::Overflow)?;
            let diag = if i == j { EisensteinInt::from_int(scale) } else { Z };
            let x = diag.checked_sub(outer).ok_or(Error::Overflow)?;
            *cell = if v.fexp % 2 == 1 { -x } else { x };
        }
    }
    let fexp = v.fexp.checked_mul(2).ok_or(Error::Overflow)?;
    Ok(RingMatrix3::new(out, fexp))
}

/// `‖target - V‖_F` evaluated in floating point.
pub fn frobenius_distance(v: &RingMatrix3, target: &CMatrix3) -> f64 {
    cmatrix_distance(&v.to_complex(), target)
}

pub fn cmatrix_distance(a: &CMatrix3, b: &CMatrix3) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// The unit `u` with `A = u·B`, if any.
pub fn phase_equal(a: &RingMatrix3, b: &RingMatrix3) -> Option<Unit> {
    if a.fexp() != b.fexp() {
        return None;
    }
    let (ea, eb) = (a.entries(), b.entries());
    let (i, j) = (0..9)
        .map(|k| (k / 3, k % 3))
        .find(|&(i, j)| !eb[i][j].is_zero())?;
    let u = Unit::from_eisenstein(ea[i][j].div_exact(eb[i][j])?)?;
    (b.scale_unit(u) == *a).then_some(u)
}

/// `R^Z_{(0,1)}(θ) = Diag(e^{-iθ/2}, e^{iθ/2}, 1)`.
pub fn rz_target(theta: f64) -> CMatrix3 {
    let z = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -theta / 2.0), z, z],
        [z, Complex64::from_polar(1.0, theta / 2.0), z],
        [z, z, Complex64::new(1.0, 0.0)],
    ]
}

pub fn cmatrix_mul(a: &CMatrix3, b: &CMatrix3) -> CMatrix3 {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `D(a,b,c) = Diag(ω^a, ω^b, ω^c)`.
pub fn d_gate(a: u8, b: u8, c: u8) -> RingMatrix3 {
    let w = |k: u8| Unit::new(false, k % 3).to_eisenstein();
    RingMatrix3::diagonal([w(a), w(b), w(c)])
}

/// The gate constants.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub h: RingMatrix3,
    pub h_dagger: RingMatrix3,
    pub s: RingMatrix3,
    pub r: RingMatrix3,
    /// Cyclic shift `|j⟩ ↦ |j+1⟩`.
    pub x: RingMatrix3,
    pub x01: RingMatrix3,
    pub x12: RingMatrix3,
}

impl GeneratorSet {
    fn build() -> Self {
        // H = (1/χ)·[[1,1,1],[1,ω,ω²],[1,ω²,ω]]; χ = i√3.
        let h = RingMatrix3::new([[ONE, ONE, ONE], [ONE, W, W2], [ONE, W2, W]], 1);
        Self {
            h,
            h_dagger: h.adjoint(),
            s: RingMatrix3::diagonal([ONE, W, ONE]),
            r: RingMatrix3::diagonal([ONE, ONE, -ONE]),
            x: RingMatrix3::permutation([1, 2, 0]),
            x01: RingMatrix3::permutation([1, 0, 2]),
            x12: RingMatrix3::permutation([0, 2, 1]),
        }
    }

    /// `X^k`.
    pub fn x_pow(&self, k: u8) -> RingMatrix3 {
        match k % 3 {
            0 => RingMatrix3::identity(),
            1 => self.x,
            _ => RingMatrix3::permutation([2, 0, 1]),
        }
    }
}

pub fn generators() -> &'static GeneratorSet {
    static GENS: OnceLock<GeneratorSet> = OnceLock::new();
    GENS.get_or_init(GeneratorSet::build)
}
