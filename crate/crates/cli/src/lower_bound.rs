//! Covering lower bound on the gate count needed to `ε`-approximate the
//! worst element of `SU(d)`:
//!
//! `N ≳ (ln A + (d²-1) ln(1/ε)) / ln(d(d-1))`,
//! `A = √(2^{d-1} d) [d(d-1)-1] Γ((d²-1)/2) / (d⁴ π^{3(d-1)/2} G(d+1))`,
//! with Barnes `G(d+1) = Π_{k=1}^{d-1} k!`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{CliError, Result};

/// Largest supported dimension.
pub const MAX_DIMENSION: u32 = 5;

/// The bound as a line in `log₁₀(1/ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundLine {
    pub d: u32,
    pub slope_log10: f64,
    pub intercept: f64,
}

fn ln_barnes_g_succ(d: u32) -> f64 {
    // ln Π_{k=1}^{d-1} k! = Σ_k ln k!.
    (1..d).map(|k| ln_gamma(k as f64 + 1.0)).sum()
}

fn ln_a(d: u32) -> f64 {
    let df = d as f64;
    0.5 * ((df - 1.0) * 2f64.ln() + df.ln()) + (df * (df - 1.0) - 1.0).ln() + ln_gamma((df * df - 1.0) / 2.0)
        - 4.0 * df.ln()
        - 1.5 * (df - 1.0) * std::f64::consts::PI.ln()
        - ln_barnes_g_succ(d)
}

pub fn lower_bound_line(d: u32) -> Result<LowerBoundLine> {
    if d < 2 {
        return Err(CliError::input(format!("dimension must be ≥ 2, got {d}")));
    }
    if d > MAX_DIMENSION {
        return Err(CliError::input(format!("dimension {d} unsupported (max {MAX_DIMENSION})")));
    }
    let df = d as f64;
    let denom = (df * (df - 1.0)).ln();
    Ok(LowerBoundLine {
        d,
        slope_log10: (df * df - 1.0) * 10f64.ln() / denom,
        intercept: ln_a(d) / denom,
    })
}

/// The bound at `ε`.
pub fn lower_bound(d: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(CliError::input(format!("eps must be positive, got {eps}")));
    }
    let df = d as f64;
    lower_bound_line(d)?;
    Ok((ln_a(d) + (df * df - 1.0) * (1.0 / eps).ln()) / (df * (df - 1.0)).ln())
}
