//! Exact complex linear algebra on few-qubit registers.
//!
//! Dimensions stay tiny (a chain of at most a handful of qubits), so
//! everything is dense, allocation is not a concern, and validation runs at
//! every construction: states are normalized, density matrices are hermitian
//! positive unit-trace, channels are complete, POVMs are positive and
//! complete. Downstream modules lean on these invariants instead of
//! re-checking them.

mod channel;
mod error;
mod operator;
mod state;

pub use channel::{KrausChannel, PovmElement, PovmSet};
pub use error::QcoreError;
pub use operator::LinearOperator;
pub use state::{DensityMatrix, QState, StateVector};

use crate::scalar::Scalar;
use num_complex::Complex;

/// Stock single-qubit operators.
pub mod ops {
    use super::*;

    pub fn identity<T: Scalar>(dim: usize) -> LinearOperator<T> {
        LinearOperator::identity(dim)
    }

    pub fn pauli_x<T: Scalar>() -> LinearOperator<T> {
        let o = T::cre(T::zero());
        let l = T::cre(T::one());
        LinearOperator::new_hermitian_unitary(2, vec![o, l, l, o]).expect("pauli x is exact")
    }

    pub fn pauli_y<T: Scalar>() -> LinearOperator<T> {
        let o = T::cre(T::zero());
        let i = T::c(T::zero(), T::one());
        LinearOperator::new_hermitian_unitary(2, vec![o, -i, i, o]).expect("pauli y is exact")
    }

    pub fn pauli_z<T: Scalar>() -> LinearOperator<T> {
        let o = T::cre(T::zero());
        let l = T::cre(T::one());
        LinearOperator::new_hermitian_unitary(2, vec![l, o, o, -l]).expect("pauli z is exact")
    }

    pub fn hadamard<T: Scalar>() -> LinearOperator<T> {
        let r = T::cre(T::one() / T::lit(2.0).sqrt());
        LinearOperator::new_hermitian_unitary(2, vec![r, r, r, -r]).expect("hadamard is exact")
    }

    /// |0><0|
    pub fn projector0<T: Scalar>() -> LinearOperator<T> {
        let o = T::cre(T::zero());
        let l = T::cre(T::one());
        LinearOperator::new_hermitian(2, vec![l, o, o, o]).expect("projector is exact")
    }

    /// |1><1|
    pub fn projector1<T: Scalar>() -> LinearOperator<T> {
        let o = T::cre(T::zero());
        let l = T::cre(T::one());
        LinearOperator::new_hermitian(2, vec![o, o, o, l]).expect("projector is exact")
    }
}

/// Real expectation value of a hermitian operator. The imaginary residue of
/// the underlying complex arithmetic is checked against the validation
/// window and then discarded.
pub fn expectation<T: Scalar, S: QState<T>>(
    op: &LinearOperator<T>,
    state: &S,
) -> Result<T, QcoreError> {
    if !op.is_hermitian() {
        return Err(QcoreError::HermitianFlagMissing);
    }
    let raw = state.raw_expectation(op)?;
    if raw.im.abs() > T::EPS_VALIDATE {
        return Err(QcoreError::ImaginaryResidue(
            raw.im.abs().to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(raw.re)
}

/// sqrt(<A^2> - <A>^2); tiny negative variance residue is clamped to zero,
/// anything beyond the construction window is reported as an error.
pub fn std_dev<T: Scalar, S: QState<T>>(
    op: &LinearOperator<T>,
    state: &S,
) -> Result<T, QcoreError> {
    let mean = expectation(op, state)?;
    let sq = op.mul(op)?;
    let sq = LinearOperator::new_hermitian(sq.dim(), sq.data().to_vec())?;
    let mean_sq = expectation(&sq, state)?;
    let var = mean_sq - mean * mean;
    if var < -T::EPS_CONSTRUCT {
        return Err(QcoreError::NegativeVariance(
            var.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(var.max(T::zero()).sqrt())
}

/// C = |<[A, B]>| / 2, the commutator lower bound entering every
/// uncertainty relation in this crate.
pub fn commutator_bound<T: Scalar, S: QState<T>>(
    a: &LinearOperator<T>,
    b: &LinearOperator<T>,
    state: &S,
) -> Result<T, QcoreError> {
    let comm = a.mul(b)?.sub(&b.mul(a)?)?;
    let raw = state.raw_expectation(&comm)?;
    Ok(raw.norm() / T::lit(2.0))
}

/// Non-selective channel application.
pub fn apply_channel<T: Scalar>(
    channel: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>, QcoreError> {
    channel.apply(rho)
}

/// Outcome probabilities p_k = Tr(E_k rho), in element order. Tiny negative
/// values inside the construction window clamp to zero; the probabilities
/// must sum to one within the validation window.
pub fn povm_probabilities<T: Scalar, S: QState<T>>(
    povm: &PovmSet<T>,
    state: &S,
) -> Result<Vec<T>, QcoreError> {
    let mut probs = Vec::with_capacity(povm.len());
    let mut total = T::zero();
    for e in povm.elements() {
        let p = expectation(&e.op, state)?;
        if p < -T::EPS_CONSTRUCT {
            return Err(QcoreError::NegativeProbability(
                p.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let p = p.max(T::zero());
        total += p;
        probs.push(p);
    }
    let defect = (total - T::one()).abs();
    if defect > T::EPS_VALIDATE {
        return Err(QcoreError::IncompletePovm(
            defect.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(probs)
}

/// Reduces a register state to the listed qubit factors (0 = most
/// significant), preserving their order.
pub fn partial_trace<T: Scalar>(
    rho: &DensityMatrix<T>,
    keep: &[usize],
) -> Result<DensityMatrix<T>, QcoreError> {
    rho.partial_trace(keep)
}

/// Convenience: the probability-1 complex literal grid used all over tests.
pub fn cplx<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}
