//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("multi-index arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Kraus family is empty")]
    EmptyKraus,

    #[error("generators {i} and {j} do not commute (residual {residual:.3e})")]
    NotCommuting { i: usize, j: usize, residual: f64 },

    #[error("map {index:?} is not completely positive (Choi min eigenvalue {min_eigenvalue:.3e})")]
    NotCp {
        index: Option<usize>,
        min_eigenvalue: f64,
    },

    #[error("map {index:?} is not contractive (min eigenvalue of I - T(I) is {min_eigenvalue:.3e})")]
    NotContractive {
        index: Option<usize>,
        min_eigenvalue: f64,
    },

    #[error("map is not unital (residual {residual:.3e})")]
    NotUnital { residual: f64 },

    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("embedding is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },

    #[error("Kraus family {family} does not sum to the identity (residual {residual:.3e})")]
    NotUnitalFamily { family: usize, residual: f64 },

    #[error(
        "cross-commutation failure between families {family_a} and {family_b} \
         at operators ({i}, {j}) (residual {residual:.3e})"
    )]
    CrossCommutationFailure {
        family_a: usize,
        family_b: usize,
        i: usize,
        j: usize,
        residual: f64,
    },

    #[error("operator is not a contraction (spectral norm {norm:.6})")]
    NotContraction { norm: f64 },

    #[error("endomap generators are not all single-Kraus conjugations")]
    NotConjugationForm,

    #[error("matrix is not a projection (residual {residual:.3e})")]
    NotProjection { residual: f64 },

    #[error("matrix does not lie in the algebra's span (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("semigroup is not Markov (a generator is not unital)")]
    NotMarkov,

    #[error("certificate is not minimal; precondition of the B = B(K) check fails")]
    NotMinimal,

    #[error("second semigroup is not the unitalization of the first (residual {residual:.3e})")]
    NotUnitalization { residual: f64 },

    #[error("certificate is not a dilation: {reason}")]
    NotADilation { reason: String },
}
