//! Exact arithmetic for Brauer classes, quadratic forms and the ring `R_T`,
//! together with motivic-measure comparisons of twisted flag varieties.

pub mod arith;
pub mod brauer;
pub mod classify;
pub mod csa;
pub mod error;
pub mod field;
pub mod measure;
pub mod qform;
pub mod rt;

pub use brauer::BrauerClass;
pub use classify::{Tri, Verdict};
pub use csa::{BrauerSubgroup, Csa};
pub use error::{Error, Result};
pub use field::{AbstractTorsion, FieldDescriptor, Place, SquareClass};
pub use qform::QuadraticForm;
pub use measure::TwistedVariety;
pub use rt::{RtCanonical, RtElement};
