//! Exact evaluation of a token word against `R^Z(θ)`.

use qutrit_core::linalg3::{cmatrix_distance, rz_target};
use qutrit_core::synthesis::{parse_word, product};
use qutrit_core::{RingMatrix3, Unit};
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub matrix: RingMatrix3,
    pub n_r: usize,
    /// Ring unit `u` minimizing `‖R^Z(θ) - u·W‖_F`.
    pub phase: Unit,
    pub distance: f64,
}

/// Multiplies the word exactly and reports the distance to `R^Z(θ)` under
/// the best ring-unit global phase (first minimum in `Unit::all` order).
pub fn verify_word(word: &str, theta: f64) -> Result<Verification> {
    let gates = parse_word(word)?;
    let matrix = product(&gates)?;
    let target = rz_target(theta);
    let (phase, distance) = Unit::all()
        .into_iter()
        .map(|u| (u, cmatrix_distance(&matrix.scale_unit(u).to_complex(), &target)))
        .fold((Unit::ONE, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
    Ok(Verification {
        matrix,
        n_r: gates.iter().filter(|g| g.is_r()).count(),
        phase,
        distance,
    })
}
