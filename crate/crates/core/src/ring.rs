//! Exact arithmetic in the Eisenstein integers `Z[ω]` and in their
//! localization at `χ = 1 + 2ω = √-3`.
//!
//! Components are `i128`. Every operator checks for overflow and panics
//! loudly instead of wrapping; the `checked_*` variants return `None`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) const SQRT3: f64 = 1.732_050_807_568_877_2;

const OVERFLOW: &str = "Eisenstein integer arithmetic overflowed i128";

/// `a + bω` with `ω = e^{2πi/3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EisensteinInt {
    pub a: i128,
    pub b: i128,
}

impl EisensteinInt {
    pub const ZERO: Self = Self { a: 0, b: 0 };
    pub const ONE: Self = Self { a: 1, b: 0 };
    pub const OMEGA: Self = Self { a: 0, b: 1 };
    /// `χ = 1 + 2ω`, a square root of `-3`.
    pub const CHI: Self = Self { a: 1, b: 2 };

    pub const fn new(a: i128, b: i128) -> Self {
        Self { a, b }
    }

    pub const fn from_int(a: i128) -> Self {
        Self { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Field norm `a² - ab + b²`, i.e. `|x|²`.
    pub fn norm(&self) -> i128 {
        self.checked_norm().expect(OVERFLOW)
    }

    pub fn checked_norm(&self) -> Option<i128> {
        let aa = self.a.checked_mul(self.a)?;
        let ab = self.a.checked_mul(self.b)?;
        let bb = self.b.checked_mul(self.b)?;
        aa.checked_sub(ab)?.checked_add(bb)
    }

    /// Complex conjugate: `a + bω̄ = (a - b) - bω`.
    pub fn conj(&self) -> Self {
        Self {
            a: self.a.checked_sub(self.b).expect(OVERFLOW),
            b: self.b.checked_neg().expect(OVERFLOW),
        }
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(Self {
            a: self.a.checked_add(rhs.a)?,
            b: self.b.checked_add(rhs.b)?,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        Some(Self {
            a: self.a.checked_sub(rhs.a)?,
            b: self.b.checked_sub(rhs.b)?,
        })
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        // (a + bω)(c + dω) = (ac - bd) + (ad + bc - bd)ω, using ω² = -1 - ω.
        let ac = self.a.checked_mul(rhs.a)?;
        let bd = self.b.checked_mul(rhs.b)?;
        let ad = self.a.checked_mul(rhs.b)?;
        let bc = self.b.checked_mul(rhs.a)?;
        Some(Self {
            a: ac.checked_sub(bd)?,
            b: ad.checked_add(bc)?.checked_sub(bd)?,
        })
    }

    pub fn scale(self, k: i128) -> Self {
        Self {
            a: self.a.checked_mul(k).expect(OVERFLOW),
            b: self.b.checked_mul(k).expect(OVERFLOW),
        }
    }

    /// Exact division by a rational integer, if it divides both components.
    pub fn div_int(self, k: i128) -> Option<Self> {
        if k == 0 || self.a % k != 0 || self.b % k != 0 {
            return None;
        }
        Some(Self {
            a: self.a / k,
            b: self.b / k,
        })
    }

    /// Exact division in `Z[ω]`; `None` when `rhs` does not divide `self`.
    pub fn div_exact(self, rhs: Self) -> Option<Self> {
        let n = rhs.checked_norm()?;
        if n == 0 {
            return None;
        }
        self.checked_mul(rhs.conj())?.div_int(n)
    }

    pub fn divides(self, rhs: Self) -> bool {
        if self.is_zero() {
            return rhs.is_zero();
        }
        rhs.div_exact(self).is_some()
    }

    pub fn is_chi_divisible(&self) -> bool {
        // χ | a + bω  ⟺  3 | N(x)  ⟺  a ≡ -b (mod 3)
        (self.a + self.b).rem_euclid(3) == 0
    }

    /// χ-adic valuation; zero maps to 0.
    pub fn chi_valuation(&self) -> u32 {
        if self.is_zero() {
            return 0;
        }
        let mut x = *self;
        let mut v = 0;
        while let Ok(q) = chi_divide(x) {
            x = q;
            v += 1;
        }
        v
    }

    pub fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let (a, b) = (self.a as f64, self.b as f64);
        Complex64::new(a - 0.5 * b, 0.5 * SQRT3 * b)
    }

    /// Half-integer coordinates `(p, q) = (a - b/2, b/2)`; the point
    /// `(p, √3 q)` is the image of `x` in the plane.
    pub fn to_half_integer(&self) -> HalfIntPair {
        HalfIntPair {
            two_p: 2 * self.a - self.b,
            two_q: self.b,
        }
    }

    pub fn from_half_integer(h: HalfIntPair) -> Self {
        h.to_eisenstein()
            .expect("half-integer pair violates p + q ∈ Z")
    }

    /// The unit `u` such that `u·self` lies in the sector `0 ≤ arg < π/3`,
    /// together with that associate. Zero maps to `(+1, 0)`.
    pub fn canonical_associate(&self) -> (Unit, Self) {
        if self.is_zero() {
            return (Unit::ONE, *self);
        }
        for u in Unit::all() {
            let y = u.to_eisenstein() * *self;
            if 0 <= y.b && y.b < y.a {
                return (u, y);
            }
        }
        unreachable!("every nonzero Eisenstein integer has an associate in the first sector")
    }
}

impl fmt::Debug for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders as `a+bω`, the token format used by the command line.
impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < 0 {
            write!(f, "{}-{}ω", self.a, -self.b)
        } else {
            write!(f, "{}+{}ω", self.a, self.b)
        }
    }
}

impl Add for EisensteinInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect(OVERFLOW)
    }
}

impl Sub for EisensteinInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect(OVERFLOW)
    }
}

impl Mul for EisensteinInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect(OVERFLOW)
    }
}

impl Neg for EisensteinInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: self.a.checked_neg().expect(OVERFLOW),
            b: self.b.checked_neg().expect(OVERFLOW),
        }
    }
}

impl From<i128> for EisensteinInt {
    fn from(a: i128) -> Self {
        Self::from_int(a)
    }
}

impl Serialize for EisensteinInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a, self.b).serialize(s)
    }
}

impl<'de> Deserialize<'de> for EisensteinInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, b) = <(i128, i128)>::deserialize(d)?;
        Ok(Self { a, b })
    }
}

/// Field norm of `x`.
pub fn norm(x: EisensteinInt) -> i128 {
    x.norm()
}

/// Divides by `χ`, computed as `x·χ̄ / 3`.
pub fn chi_divide(x: EisensteinInt) -> Result<EisensteinInt> {
    if !x.is_chi_divisible() {
        return Err(Error::NotDivisible {
            value: x,
            divisor: EisensteinInt::CHI,
        });
    }
    let t = x
        .checked_mul(EisensteinInt::CHI.conj())
        .ok_or(Error::Overflow)?;
    Ok(t.div_int(3).expect("χ-divisibility implies exact division"))
}

/// `Γ(f) = (-1)^⌈f/2⌉ χ^(f mod 2)`, the factor relating `χ^f` to `3^⌈f/2⌉`:
/// `Γ(f)·χ^f = 3^⌈f/2⌉`.
pub fn gamma(f: u32) -> EisensteinInt {
    let sign = if f.div_ceil(2) % 2 == 0 { 1 } else { -1 };
    let base = if f % 2 == 1 {
        EisensteinInt::CHI
    } else {
        EisensteinInt::ONE
    };
    base.scale(sign)
}

/// Divides by `Γ(f)`. For even `f` this is a sign flip.
pub fn gamma_divide(x: EisensteinInt, f: u32) -> Result<EisensteinInt> {
    let sign = if f.div_ceil(2) % 2 == 0 { 1 } else { -1 };
    let y = if f % 2 == 1 { chi_divide(x)? } else { x };
    Ok(y.scale(sign))
}

/// Half-integer coordinates stored doubled, so `p = two_p / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfIntPair {
    pub two_p: i128,
    pub two_q: i128,
}

impl HalfIntPair {
    pub fn p(&self) -> f64 {
        self.two_p as f64 / 2.0
    }

    pub fn q(&self) -> f64 {
        self.two_q as f64 / 2.0
    }

    /// `a = p + q`, `b = 2q`; `None` if `p + q` is not an integer.
    pub fn to_eisenstein(&self) -> Option<EisensteinInt> {
        let two_a = self.two_p + self.two_q;
        if two_a % 2 != 0 {
            return None;
        }
        Some(EisensteinInt::new(two_a / 2, self.two_q))
    }
}

/// A unit `±ω^k` of `Z[ω]`.
///
/// Ordered `(+1,ω⁰) < (+1,ω¹) < (+1,ω²) < (-1,ω⁰) < (-1,ω¹) < (-1,ω²)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Unit {
    pub negative: bool,
    pub omega_power: u8,
}

impl Unit {
    pub const ONE: Unit = Unit {
        negative: false,
        omega_power: 0,
    };
    pub const MINUS_ONE: Unit = Unit {
        negative: true,
        omega_power: 0,
    };

    pub fn new(negative: bool, omega_power: u8) -> Self {
        Self {
            negative,
            omega_power: omega_power % 3,
        }
    }

    /// The six units in canonical order.
    pub fn all() -> [Unit; 6] {
        [
            Unit::new(false, 0),
            Unit::new(false, 1),
            Unit::new(false, 2),
            Unit::new(true, 0),
            Unit::new(true, 1),
            Unit::new(true, 2),
        ]
    }

    fn index(&self) -> u8 {
        (self.negative as u8) * 3 + self.omega_power
    }

    pub fn to_eisenstein(&self) -> EisensteinInt {
        let w = match self.omega_power {
            0 => EisensteinInt::ONE,
            1 => EisensteinInt::OMEGA,
            _ => EisensteinInt::new(-1, -1),
        };
        if self.negative {
            -w
        } else {
            w
        }
    }

    pub fn from_eisenstein(x: EisensteinInt) -> Option<Unit> {
        Unit::all().into_iter().find(|u| u.to_eisenstein() == x)
    }

    pub fn inverse(&self) -> Unit {
        Unit::new(self.negative, (3 - self.omega_power) % 3)
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.to_eisenstein().to_complex()
    }
}

impl Mul for Unit {
    type Output = Unit;
    fn mul(self, rhs: Unit) -> Unit {
        Unit::new(
            self.negative != rhs.negative,
            (self.omega_power + rhs.omega_power) % 3,
        )
    }
}

impl PartialOrd for Unit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Unit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Debug for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.negative { "-" } else { "+" };
        write!(f, "{s}ω^{}", self.omega_power)
    }
}

/// `num / χ^fexp`, kept reduced: `fexp == 0` or `χ ∤ num`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct RingElement {
    num: EisensteinInt,
    #[serde(rename = "f")]
    fexp: u32,
}

impl RingElement {
    pub fn new(num: EisensteinInt, fexp: u32) -> Self {
        let mut num = num;
        let mut fexp = fexp;
        if num.is_zero() {
            fexp = 0;
        }
        while fexp > 0 {
            match chi_divide(num) {
                Ok(q) => {
                    num = q;
                    fexp -= 1;
                }
                Err(_) => break,
            }
        }
        Self { num, fexp }
    }

    pub fn from_int(x: EisensteinInt) -> Self {
        Self { num: x, fexp: 0 }
    }

    pub fn num(&self) -> EisensteinInt {
        self.num
    }

    pub fn fexp(&self) -> u32 {
        self.fexp
    }

    pub fn to_complex(&self) -> Complex64 {
        self.num.to_complex() * chi_inverse_power(self.fexp)
    }
}

/// Smallest `f ≥ 0` with `z·χ^f ∈ Z[ω]`.
pub fn sde(z: &RingElement) -> u32 {
    z.fexp
}

/// `χ^{-f}` as a float: `χ = i√3`, so `χ^{-f} = (-i)^f / 3^{f/2}`.
pub fn chi_inverse_power(f: u32) -> Complex64 {
    let mag = 3f64.powf(-(f as f64) / 2.0);
    let phase = match f % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    phase * mag
}

/// `3^k` as `i128`; panics past the representable range.
pub fn pow3(k: u32) -> i128 {
    3i128.checked_pow(k).expect(OVERFLOW)
}
