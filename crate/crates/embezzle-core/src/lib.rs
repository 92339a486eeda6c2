//! Exact and numerical machinery for entanglement embezzlement over Cuntz
//! algebras: a symbolic word calculus with the unique quasi-free states, a
//! finite-truncation representation with measured residuals, protocol
//! transformations, and an exact classifier of the minimal embezzling
//! Type-III_λ factor from Schmidt data.

pub mod classify;
pub mod element;
pub mod error;
pub mod factor;
pub mod grammar;
pub mod lambda;
pub mod linalg;
pub mod poly;
pub mod protocol;
pub mod report;
pub mod scalar;
pub mod schmidt;
pub mod trunc;
pub mod state;
pub mod word;

pub use element::{BiElement, Coeff, Element};
pub use error::{CoreError, Result};
pub use scalar::{RadScalar, RadSum, Rat};
pub use schmidt::{AlphaSystem, LambdaRep, SchmidtSpec, SpecKind, System};
pub use word::{Monomial, Word};
