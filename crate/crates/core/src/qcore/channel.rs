use num_complex::Complex;

use super::error::QcoreError;
use super::operator::LinearOperator;
use super::state::DensityMatrix;
use crate::scalar::Scalar;

/// Completely positive trace-preserving map given by Kraus operators.
/// Completeness (sum K^dag K = I) is checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T: Scalar> {
    ops: Vec<LinearOperator<T>>,
}

impl<T: Scalar> KrausChannel<T> {
    pub fn new(ops: Vec<LinearOperator<T>>) -> Result<Self, QcoreError> {
        let first = ops.first().ok_or(QcoreError::Empty)?;
        let dim = first.dim();
        let mut sum = LinearOperator::zero(dim);
        for k in &ops {
            if k.dim() != dim {
                return Err(QcoreError::DimMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            sum = sum.add(&k.adjoint().mul(k)?)?;
        }
        let mut defect = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { T::one() } else { T::zero() };
                let d = (sum.get(i, j) - T::cre(expect)).norm();
                if d > defect {
                    defect = d;
                }
            }
        }
        if defect > T::EPS_VALIDATE {
            return Err(QcoreError::IncompleteChannel(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { ops })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn operators(&self) -> &[LinearOperator<T>] {
        &self.ops
    }

    /// Non-selective application: sum_k K rho K^dag. Trace is preserved by
    /// the completeness invariant; checked again here against rounding.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>, QcoreError> {
        let dim = self.dim();
        if rho.dim() != dim {
            return Err(QcoreError::DimMismatch {
                expected: dim,
                got: rho.dim(),
            });
        }
        let rho_op = rho.as_operator()?;
        let mut acc = LinearOperator::zero(dim);
        for k in &self.ops {
            acc = acc.add(&k.mul(&rho_op)?.mul(&k.adjoint())?)?;
        }
        let trace = acc.trace();
        let trace_defect = (trace.re - T::one()).abs().max(trace.im.abs());
        if trace_defect > T::EPS_VALIDATE {
            return Err(QcoreError::TraceNotOne(
                trace_defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        // Symmetrize rounding noise so the result passes its own validation.
        let n = dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        let half = T::lit(0.5);
        for i in 0..n {
            for j in 0..n {
                let sym = (acc.get(i, j) + acc.get(j, i).conj()) * T::cre(half);
                data[i * n + j] = sym;
            }
        }
        DensityMatrix::new(n, data)
    }

    /// The POVM induced by the Kraus operators, in operator order.
    pub fn induced_povm_elements(&self) -> Result<Vec<LinearOperator<T>>, QcoreError> {
        self.ops
            .iter()
            .map(|k| {
                let e = k.adjoint().mul(k)?;
                LinearOperator::new_hermitian(e.dim(), e.data().to_vec())
            })
            .collect()
    }
}

/// One POVM element with its meter value (+1 or -1 throughout this crate).
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement<T: Scalar> {
    pub value: T,
    pub op: LinearOperator<T>,
}

/// Positive operator-valued measure with outcome labels. Elements must be
/// positive within the documented floor and sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet<T: Scalar> {
    elements: Vec<PovmElement<T>>,
}

impl<T: Scalar> PovmSet<T> {
    pub fn new(elements: Vec<PovmElement<T>>) -> Result<Self, QcoreError> {
        let first = elements.first().ok_or(QcoreError::Empty)?;
        let dim = first.op.dim();
        let mut sum = LinearOperator::zero(dim);
        for e in &elements {
            if e.op.dim() != dim {
                return Err(QcoreError::DimMismatch {
                    expected: dim,
                    got: e.op.dim(),
                });
            }
            if !e.op.is_hermitian() {
                return Err(QcoreError::HermitianFlagMissing);
            }
            let min_eig = e.op.min_eigenvalue()?;
            if min_eig < -T::EPS_VALIDATE {
                return Err(QcoreError::NotPositive(
                    min_eig.to_f64().unwrap_or(f64::NAN),
                ));
            }
            sum = sum.add(&e.op)?;
        }
        let mut defect = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { T::one() } else { T::zero() };
                let d = (sum.get(i, j) - T::cre(expect)).norm();
                if d > defect {
                    defect = d;
                }
            }
        }
        if defect > T::EPS_VALIDATE {
            return Err(QcoreError::IncompletePovm(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements[0].op.dim()
    }

    pub fn elements(&self) -> &[PovmElement<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// sum_k value_k E_k; the operator whose expectation is the meter mean.
    pub fn meter_mean_operator(&self) -> Result<LinearOperator<T>, QcoreError> {
        let dim = self.dim();
        let mut acc = LinearOperator::zero(dim);
        for e in &self.elements {
            acc = acc.add(&e.op.scale(T::cre(e.value)))?;
        }
        LinearOperator::new_hermitian(dim, acc.data().to_vec())
    }
}
