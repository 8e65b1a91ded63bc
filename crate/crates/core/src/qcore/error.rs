use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum QcoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("dimension {0} is not a power of two (or is below 2)")]
    BadDimension(usize),
    #[error("state norm deviates from 1 by {0:e}")]
    NotNormalized(f64),
    #[error("matrix is not hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max defect {0:e})")]
    NotUnitary(f64),
    #[error("operator is not flagged hermitian; expectation values need a hermitian operator")]
    HermitianFlagMissing,
    #[error("trace deviates from 1 by {0:e}")]
    TraceNotOne(f64),
    #[error("matrix has eigenvalue {0:e} below the positivity floor")]
    NotPositive(f64),
    #[error("Kraus operators do not sum to identity (defect {0:e})")]
    IncompleteChannel(f64),
    #[error("POVM elements do not sum to identity (defect {0:e})")]
    IncompletePovm(f64),
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("variance residue {0:e} is too negative to be rounding noise")]
    NegativeVariance(f64),
    #[error("probability {0:e} is too negative to be rounding noise")]
    NegativeProbability(f64),
    #[error("invalid qubit index set: {0}")]
    BadIndexSet(String),
    #[error("empty operator list")]
    Empty,
}
