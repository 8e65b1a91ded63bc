use num_complex::Complex;

use super::error::QcoreError;
use crate::scalar::Scalar;

/// Dense square complex matrix with optional verified structure flags.
///
/// Flags are claims made at construction; a claimed flag is checked against
/// the entries within `EPS_CONSTRUCT` and construction fails if violated.
/// An unclaimed flag carries no information (the matrix may still happen to
/// be hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator<T: Scalar> {
    dim: usize,
    data: Vec<Complex<T>>, // row-major
    hermitian: bool,
    unitary: bool,
}

impl<T: Scalar> LinearOperator<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        if dim == 0 {
            return Err(QcoreError::BadDimension(dim));
        }
        if data.len() != dim * dim {
            return Err(QcoreError::DimMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self {
            dim,
            data,
            hermitian: false,
            unitary: false,
        })
    }

    pub fn new_hermitian(dim: usize, data: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        let mut op = Self::new(dim, data)?;
        let defect = op.hermiticity_defect();
        if defect > T::EPS_CONSTRUCT {
            return Err(QcoreError::NotHermitian(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn new_unitary(dim: usize, data: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        let mut op = Self::new(dim, data)?;
        let defect = op.unitarity_defect();
        if defect > T::EPS_CONSTRUCT {
            return Err(QcoreError::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        op.unitary = true;
        Ok(op)
    }

    /// For matrices that are both (reflections such as the Pauli operators
    /// and the probe rotation gate).
    pub fn new_hermitian_unitary(dim: usize, data: Vec<Complex<T>>) -> Result<Self, QcoreError> {
        let mut op = Self::new_hermitian(dim, data)?;
        let defect = op.unitarity_defect();
        if defect > T::EPS_CONSTRUCT {
            return Err(QcoreError::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    fn unitarity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..self.dim {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expect = if i == j { T::one() } else { T::zero() };
                let d = (acc - Complex::new(expect, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        Self {
            dim,
            data,
            hermitian: true,
            unitary: true,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
            hermitian: false,
            unitary: false,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, QcoreError> {
        if self.dim != rhs.dim {
            return Err(QcoreError::DimMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let n = self.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        Self::new(n, data)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, QcoreError> {
        if self.dim != rhs.dim {
            return Err(QcoreError::DimMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| *a + *b)
            .collect();
        Self::new(self.dim, data)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, QcoreError> {
        if self.dim != rhs.dim {
            return Err(QcoreError::DimMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| *a - *b)
            .collect();
        Self::new(self.dim, data)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        let data = self.data.iter().map(|a| *a * factor).collect();
        Self {
            dim: self.dim,
            data,
            hermitian: false,
            unitary: false,
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j).conj();
            }
        }
        Self {
            dim: n,
            data,
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc += self.get(i, i);
        }
        acc
    }

    /// Kronecker product; `self` is the most significant factor.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let n = self.dim * rhs.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for ai in 0..self.dim {
            for aj in 0..self.dim {
                let a = self.get(ai, aj);
                for bi in 0..rhs.dim {
                    for bj in 0..rhs.dim {
                        data[(ai * rhs.dim + bi) * n + (aj * rhs.dim + bj)] = a * rhs.get(bi, bj);
                    }
                }
            }
        }
        Self {
            dim: n,
            data,
            hermitian: self.hermitian && rhs.hermitian,
            unitary: self.unitary && rhs.unitary,
        }
    }

    /// Applies the operator to raw amplitudes; the result is generally
    /// unnormalized (selective measurement updates rely on this).
    pub fn apply_raw(&self, amps: &[Complex<T>]) -> Result<Vec<Complex<T>>, QcoreError> {
        if amps.len() != self.dim {
            return Err(QcoreError::DimMismatch {
                expected: self.dim,
                got: amps.len(),
            });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..self.dim {
                acc += self.get(i, j) * amps[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Smallest eigenvalue of a hermitian matrix, used for positivity
    /// checks. Works on the real symmetric embedding, which has the same
    /// spectrum with doubled multiplicity.
    pub fn min_eigenvalue(&self) -> Result<T, QcoreError> {
        if !self.hermitian {
            return Err(QcoreError::HermitianFlagMissing);
        }
        let eigs = symmetric_eigenvalues(&self.real_embedding());
        Ok(eigs
            .into_iter()
            .fold(T::infinity(), |m, e| if e < m { e } else { m }))
    }

    /// Full eigendecomposition of the real symmetric embedding: 2n pairs
    /// (eigenvalue, real eigenvector). Each complex eigenvalue shows up
    /// twice; summing `a_k * <w_k, v>^2` over all 2n pairs against the
    /// embedding of a unit complex vector reproduces the complex quadratic
    /// form exactly, which is what the spectral test oracle needs.
    pub fn embedded_eigen_pairs(&self) -> Result<Vec<(T, Vec<T>)>, QcoreError> {
        if !self.hermitian {
            return Err(QcoreError::HermitianFlagMissing);
        }
        Ok(symmetric_eigen_pairs(&self.real_embedding()))
    }

    /// [[Re, -Im], [Im, Re]] block matrix, symmetric iff self is hermitian.
    fn real_embedding(&self) -> Vec<Vec<T>> {
        let n = self.dim;
        let mut m = vec![vec![T::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let e = self.get(i, j);
                m[i][j] = e.re;
                m[i][j + n] = -e.im;
                m[i + n][j] = e.im;
                m[i + n][j + n] = e.re;
            }
        }
        m
    }
}

/// Cyclic Jacobi eigenvalue iteration for small real symmetric matrices.
fn jacobi_sweeps<T: Scalar>(m: &mut [Vec<T>], vecs: Option<&mut [Vec<T>]>) {
    let n = m.len();
    let mut vstore = vecs;
    for _ in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off.sqrt() < T::EPS_CONSTRUCT * T::lit(0.01) + T::epsilon() * T::lit(64.0) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= T::epsilon() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * m[p][q]);
                let t = {
                    let sign = if theta < T::zero() {
                        -T::one()
                    } else {
                        T::one()
                    };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                if let Some(v) = vstore.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k][p];
                        let vkq = v[k][q];
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
}

fn symmetric_eigenvalues<T: Scalar>(m: &[Vec<T>]) -> Vec<T> {
    let mut work = m.to_vec();
    jacobi_sweeps(&mut work, None);
    (0..work.len()).map(|i| work[i][i]).collect()
}

fn symmetric_eigen_pairs<T: Scalar>(m: &[Vec<T>]) -> Vec<(T, Vec<T>)> {
    let n = m.len();
    let mut work = m.to_vec();
    let mut vecs = vec![vec![T::zero(); n]; n];
    for (i, row) in vecs.iter_mut().enumerate() {
        row[i] = T::one();
    }
    jacobi_sweeps(&mut work, Some(&mut vecs));
    (0..n)
        .map(|k| (work[k][k], (0..n).map(|i| vecs[i][k]).collect()))
        .collect()
}
