//! Exact synthesis of single-qutrit diagonal rotations over Clifford+R.

pub mod error;
pub mod exhaustive;
pub mod householder;
pub mod lattice;
pub mod linalg3;
pub mod normeq;
pub mod ring;
pub mod synthesis;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use linalg3::{RingMatrix3, RingVector3};
pub use ring::{EisensteinInt, HalfIntPair, RingElement, Unit};
