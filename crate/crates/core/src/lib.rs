//! Exact computations with logarithmic differential forms in positive
//! characteristic.

pub mod error;
pub mod ff;
pub mod linalg;
pub mod poly;
pub mod moore;
pub mod cartier;
pub mod lspace;
pub mod char2;
pub mod identities;
pub mod classify;

pub use error::{Error, Result};
pub use ff::{Fe, Field, FieldSpec};
pub use poly::{Poly, RatFun, Roots};
