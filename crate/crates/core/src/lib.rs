//! Exact arithmetic for vector-valued modular forms of weight 1/2 for the
//! Weil representation of `Z/2NZ`, their Hecke-type operators, generalized
//! Borcherds products and the divisors those products have on `X_0(N)`.

pub mod arith;
mod error;
pub use error::{Error, Result};

pub mod borcherds;
pub mod discform;
pub mod divisors;
pub mod fracq;
pub mod heckeops;
pub mod verify;
pub mod vvforms;
