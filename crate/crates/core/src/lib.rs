//! Cayley-Dickson algebras over the rationals and the reals, with tools for
//! locating and constructing zero divisors.

pub mod element;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod matrix;
pub mod notation;
pub mod operators;
pub mod sampling;
pub mod scalar;
pub mod spectrum;
pub mod stiefel;
pub mod verify;
pub mod zero_divisors;

pub use element::{multiply, AnyElement, CdElement, Element, FloatElement};
pub use error::{CdError, Result};
pub use notation::{format_element, parse_element};
pub use scalar::{Rational, Scalar};
