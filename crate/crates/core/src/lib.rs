//! Exact computational commutative algebra for patching formal modules.
//!
//! The crate is layered bottom-up: [`poly`] provides exact polynomials,
//! [`groebner`] the module Gröbner engine over presented rings.

pub mod error;
pub mod groebner;
pub mod par;
pub mod patch;
pub mod poly;
pub mod surface;
pub mod tower;

pub use error::{Error, Result};
pub use groebner::{Budget, FreeVec, PolyRing, SubmoduleBasis};
pub use poly::{Coeff, Field, ModuleOrder, Monomial, MonomialOrder, Poly, PositionOrder};
