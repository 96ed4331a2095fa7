pub mod error;
pub mod field;
pub mod matrix;
pub mod stable;
pub mod stats;
pub mod word;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar, Valuation};
pub use matrix::{CartanVector, ExteriorTower, Matrix, WalkElement};
