//! Finite-dimensional toolkit for completely positive (CP) maps and
//! CP-semigroups over `N^k`: Choi–Kraus calculus, Markov unitalization,
//! matrix *-algebra machinery (commutants, central carriers), and
//! machine-checkable dilation certificates with the corner-restriction
//! algorithm that turns a dilation of the unitalization into a strong
//! dilation of the base semigroup.
//!
//! Everything is dense, complex, and tolerance-disciplined: predicates
//! return [`report::VerificationReport`]s carrying every residual and the
//! threshold it was compared against.

pub mod algebra;
pub mod constructors;
pub mod cpmap;
pub mod dilation;
pub mod error;
pub mod numerics;
pub mod report;
pub mod semigroup;

pub use error::{Error, Result};
pub use numerics::{CMatrix, Tolerance};
pub use report::VerificationReport;
