use num_complex::Complex;

use super::error::QcoreError;
use super::operator::LinearOperator;
use crate::scalar::Scalar;

fn is_qubit_dim(dim: usize) -> bool {
    dim >= 2 && dim.is_power_of_two()
}

/// Pure state on a register of qubits, most significant factor first
/// (signal qubit, then probe qubits in chain order).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        if !is_qubit_dim(amps.len()) {
            return Err(QcoreError::BadDimension(amps.len()));
        }
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).sum();
        let defect = (norm_sqr - T::one()).abs();
        if defect > T::EPS_CONSTRUCT {
            return Err(QcoreError::NotNormalized(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { amps })
    }

    /// Normalizes raw amplitudes; errors on (near-)zero vectors.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        if !is_qubit_dim(amps.len()) {
            return Err(QcoreError::BadDimension(amps.len()));
        }
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr < T::EPS_CONSTRUCT {
            return Err(QcoreError::NotNormalized(
                norm_sqr.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let inv = T::one() / norm_sqr.sqrt();
        let amps = amps.into_iter().map(|a| a * T::cre(inv)).collect();
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn ket0() -> Self {
        Self {
            amps: vec![T::cre(T::one()), T::cre(T::zero())],
        }
    }

    pub fn ket1() -> Self {
        Self {
            amps: vec![T::cre(T::zero()), T::cre(T::one())],
        }
    }

    /// (|0> + i|1>)/sqrt(2); +1 eigenstate of Y, the reference signal state.
    pub fn y_plus() -> Self {
        let r = T::one() / T::lit(2.0).sqrt();
        Self {
            amps: vec![T::cre(r), T::c(T::zero(), r)],
        }
    }

    /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> on the Bloch sphere.
    pub fn bloch(theta: T, phi: T) -> Self {
        let half = theta / T::lit(2.0);
        let amp1 = Complex::new(phi.cos(), phi.sin()) * T::cre(half.sin());
        Self {
            amps: vec![T::cre(half.cos()), amp1],
        }
    }

    /// Most significant factor first.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * rhs.dim());
        for a in &self.amps {
            for b in &rhs.amps {
                amps.push(*a * *b);
            }
        }
        Self { amps }
    }

    pub fn inner(&self, rhs: &Self) -> Result<Complex<T>, QcoreError> {
        if self.dim() != rhs.dim() {
            return Err(QcoreError::DimMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.amps.iter().zip(rhs.amps.iter()) {
            acc += a.conj() * *b;
        }
        Ok(acc)
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        let n = self.dim();
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { dim: n, data }
    }
}

/// Mixed state; hermitian, unit trace, positive within the documented floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    pub(super) dim: usize,
    pub(super) data: Vec<Complex<T>>, // row-major
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        if !is_qubit_dim(dim) {
            return Err(QcoreError::BadDimension(dim));
        }
        if data.len() != dim * dim {
            return Err(QcoreError::DimMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let rho = Self { dim, data };
        let as_op = rho.as_operator()?;
        let trace = as_op.trace();
        let trace_defect = (trace.re - T::one()).abs().max(trace.im.abs());
        if trace_defect > T::EPS_CONSTRUCT {
            return Err(QcoreError::TraceNotOne(
                trace_defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let min_eig = as_op.min_eigenvalue()?;
        if min_eig < -T::EPS_VALIDATE {
            return Err(QcoreError::NotPositive(
                min_eig.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Hermitian operator view for spectral checks.
    pub fn as_operator(&self) -> Result<LinearOperator<T>, QcoreError> {
        LinearOperator::new_hermitian(self.dim, self.data.clone())
    }

    pub fn min_eigenvalue(&self) -> Result<T, QcoreError> {
        self.as_operator()?.min_eigenvalue()
    }

    /// Tr(A rho) without any hermiticity requirement on A; complex result.
    pub fn raw_expectation(&self, op: &LinearOperator<T>) -> Result<Complex<T>, QcoreError> {
        if op.dim() != self.dim {
            return Err(QcoreError::DimMismatch {
                expected: self.dim,
                got: op.dim(),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += op.get(i, j) * self.get(j, i);
            }
        }
        Ok(acc)
    }

    /// Reduces to the qubit factors listed in `keep` (0 = most significant),
    /// preserving their order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix<T>, QcoreError> {
        let total_qubits = self.dim.trailing_zeros() as usize;
        if keep.is_empty() {
            return Err(QcoreError::BadIndexSet("empty keep set".into()));
        }
        let mut seen = vec![false; total_qubits];
        for &q in keep {
            if q >= total_qubits {
                return Err(QcoreError::BadIndexSet(format!(
                    "qubit {q} out of range for {total_qubits} qubits"
                )));
            }
            if seen[q] {
                return Err(QcoreError::BadIndexSet(format!("qubit {q} listed twice")));
            }
            seen[q] = true;
        }
        let traced: Vec<usize> = (0..total_qubits).filter(|q| !seen[*q]).collect();
        let kdim = 1usize << keep.len();
        let tdim = 1usize << traced.len();
        // bit position of qubit q in a basis index (most significant first)
        let bit = |q: usize| total_qubits - 1 - q;
        let compose = |kept_idx: usize, traced_idx: usize| -> usize {
            let mut full = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                let b = (kept_idx >> (keep.len() - 1 - pos)) & 1;
                full |= b << bit(q);
            }
            for (pos, &q) in traced.iter().enumerate() {
                let b = (traced_idx >> (traced.len() - 1 - pos)) & 1;
                full |= b << bit(q);
            }
            full
        };
        let mut data = vec![Complex::new(T::zero(), T::zero()); kdim * kdim];
        for i in 0..kdim {
            for j in 0..kdim {
                let mut acc = Complex::new(T::zero(), T::zero());
                for t in 0..tdim {
                    acc += self.get(compose(i, t), compose(j, t));
                }
                data[i * kdim + j] = acc;
            }
        }
        DensityMatrix::new(kdim, data)
    }
}

/// Common interface for expectation values over pure and mixed states.
pub trait QState<T: Scalar> {
    fn dim(&self) -> usize;
    /// <A> as a complex number, no hermiticity requirement.
    fn raw_expectation(&self, op: &LinearOperator<T>) -> Result<Complex<T>, QcoreError>;
    fn density(&self) -> DensityMatrix<T>;
}

impl<T: Scalar> QState<T> for StateVector<T> {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn raw_expectation(&self, op: &LinearOperator<T>) -> Result<Complex<T>, QcoreError> {
        let applied = op.apply_raw(self.amplitudes())?;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.amplitudes().iter().zip(applied.iter()) {
            acc += a.conj() * *b;
        }
        Ok(acc)
    }

    fn density(&self) -> DensityMatrix<T> {
        self.to_density()
    }
}

impl<T: Scalar> QState<T> for DensityMatrix<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn raw_expectation(&self, op: &LinearOperator<T>) -> Result<Complex<T>, QcoreError> {
        DensityMatrix::raw_expectation(self, op)
    }

    fn density(&self) -> DensityMatrix<T> {
        self.clone()
    }
}
