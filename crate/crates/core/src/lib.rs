//! Verification, reconstruction and fitting of the solutions of two
//! entropy-related functional equations on `]0,1]`:
//!
//! ```text
//! f(xy) + f((1−x)y) − f(y) = (f(x) + f(1−x))·y^q
//! f(xy) = g(x)·f(y) + g(y)·f(x),   g(x) = (x^α + x^β)/2
//! ```
//!
//! including exact construction of non-regular (derivation-based)
//! solutions over the rational function field Q(t).

pub mod cocycle;
pub mod equations;
pub mod error;
pub mod exactfield;
pub mod families;
pub mod fit;
pub mod reconstruct;

pub use equations::{ResidualReport, Verdict};
pub use error::{Error, Result};
pub use exactfield::{Derivation, FieldElement, Poly};
pub use families::{ProbVector, SolutionFamily};
