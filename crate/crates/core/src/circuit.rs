//! The three-stage measurement chain: weak probe, main apparatus,
//! projective post-measurement.
//!
//! A stage of strength cos(2 theta) couples the signal qubit to a probe
//! prepared in |0>, rotated by the probe gate S(theta), and read out in the
//! computational basis. Outcome +1 is the first Kraus operator / POVM
//! element everywhere. The selective Kraus update is the default evaluation
//! path; the explicit two-qubit dilation is kept for cross-checking and for
//! the direct error/disturbance definitions.

use num_complex::Complex;
use thiserror::Error;

use crate::qcore::{
    ops, KrausChannel, LinearOperator, PovmElement, PovmSet, QcoreError, StateVector,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::Z => write!(f, "Z"),
            Basis::X => write!(f, "X"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum CircuitError {
    #[error("stage angle {0} outside [0, pi/4]")]
    ThetaOutOfRange(f64),
    #[error("stage strength {0} outside [0, 1]")]
    StrengthOutOfRange(f64),
    #[error("signal state must be a single qubit, got dimension {0}")]
    SignalDimension(usize),
    #[error("main apparatus stage must measure in the Z basis")]
    MaBasisNotZ,
    #[error("post measurement must be a two-outcome qubit POVM")]
    BadPostMeasurement,
    #[error("operation needs the ideal stage form, got a general instrument")]
    NotIdealForm,
    #[error("stage POVM deviates from the partial-projection form by {0:e}")]
    PovmFormDefect(f64),
    #[error("joint table entry {0:e} is too negative to be rounding noise")]
    NegativeTableEntry(f64),
    #[error("joint table sum deviates from 1 by {0:e}")]
    TableNotNormalized(f64),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

/// Probe rotation gate [[cos t, sin t], [sin t, -cos t]]; a reflection, so
/// hermitian, unitary and squaring to the identity.
pub fn s_gate<T: Scalar>(theta: T) -> Result<LinearOperator<T>, CircuitError> {
    check_theta(theta)?;
    let (c, s) = (theta.cos(), theta.sin());
    Ok(LinearOperator::new_hermitian_unitary(
        2,
        vec![T::cre(c), T::cre(s), T::cre(s), T::cre(-c)],
    )?)
}

fn check_theta<T: Scalar>(theta: T) -> Result<(), CircuitError> {
    let quarter_pi = T::FRAC_PI_4();
    if theta < T::zero() || theta > quarter_pi + T::EPS_CONSTRUCT {
        return Err(CircuitError::ThetaOutOfRange(
            theta.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(())
}

/// One measurement stage: angle, basis, strength, Kraus operators grouped
/// into the two outcomes, and the POVM those groups induce. Outcome index 0
/// carries meter value +1. The ideal stage has one operator per outcome;
/// imperfect-optics stages carry extra operators per outcome for light that
/// reaches the same detector in distinguishable (leaked) modes.
#[derive(Debug, Clone)]
pub struct MeasurementStage<T: Scalar> {
    theta: T,
    basis: Basis,
    strength: T,
    kraus: KrausChannel<T>,
    op_outcomes: Vec<usize>,
    povm: PovmSet<T>,
    ideal: bool,
}

impl<T: Scalar> MeasurementStage<T> {
    /// Ideal stage at angle `theta` (strength cos 2 theta).
    pub fn ideal(theta: T, basis: Basis) -> Result<Self, CircuitError> {
        make_stage(theta, basis)
    }

    /// Ideal stage specified by strength in [0, 1].
    pub fn from_strength(strength: T, basis: Basis) -> Result<Self, CircuitError> {
        if strength < T::zero() || strength > T::one() {
            return Err(CircuitError::StrengthOutOfRange(
                strength.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let theta = strength.acos() / T::lit(2.0);
        make_stage(theta, basis)
    }

    /// General two-outcome instrument with the given Kraus pair (outcome +1
    /// first). Completeness is enforced; the partial-projection POVM form is
    /// not, so imperfect hardware models construct stages through here.
    pub fn from_kraus(
        theta: T,
        basis: Basis,
        k_plus: LinearOperator<T>,
        k_minus: LinearOperator<T>,
    ) -> Result<Self, CircuitError> {
        Self::from_outcome_groups(theta, basis, vec![k_plus], vec![k_minus])
    }

    /// General two-outcome instrument where each outcome may collect several
    /// Kraus operators (one per distinguishable mode reaching that
    /// detector). Joint completeness is enforced.
    pub fn from_outcome_groups(
        theta: T,
        basis: Basis,
        plus_ops: Vec<LinearOperator<T>>,
        minus_ops: Vec<LinearOperator<T>>,
    ) -> Result<Self, CircuitError> {
        check_theta(theta)?;
        let mut op_outcomes = vec![0; plus_ops.len()];
        op_outcomes.extend(std::iter::repeat_n(1, minus_ops.len()));
        let mut all = plus_ops;
        all.extend(minus_ops);
        let kraus = KrausChannel::new(all)?;
        let povm = grouped_povm(&kraus, &op_outcomes)?;
        Ok(Self {
            theta,
            basis,
            strength: (T::lit(2.0) * theta).cos(),
            kraus,
            op_outcomes,
            povm,
            ideal: false,
        })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// cos(2 theta); 1 is projective, 0 is no measurement.
    pub fn strength(&self) -> T {
        self.strength
    }

    pub fn kraus(&self) -> &KrausChannel<T> {
        &self.kraus
    }

    /// Outcome index (0 or 1) of each Kraus operator, parallel to
    /// `kraus().operators()`.
    pub fn op_outcomes(&self) -> &[usize] {
        &self.op_outcomes
    }

    /// Kraus operators paired with the meter value of their outcome.
    pub fn ops_with_values(&self) -> impl Iterator<Item = (&LinearOperator<T>, T)> {
        self.kraus
            .operators()
            .iter()
            .zip(self.op_outcomes.iter())
            .map(|(k, o)| (k, self.povm.elements()[*o].value))
    }

    pub fn povm(&self) -> &PovmSet<T> {
        &self.povm
    }

    pub fn is_ideal(&self) -> bool {
        self.ideal
    }

    /// sum of meter-value-weighted POVM elements; cos(2 theta) Z (or X)
    /// for the ideal stage.
    pub fn meter_mean_operator(&self) -> Result<LinearOperator<T>, CircuitError> {
        Ok(self.povm.meter_mean_operator()?)
    }
}

/// E_o = sum of K^dag K over the operators of outcome o; meter values +1, -1.
fn grouped_povm<T: Scalar>(
    kraus: &KrausChannel<T>,
    op_outcomes: &[usize],
) -> Result<PovmSet<T>, CircuitError> {
    let per_op = kraus.induced_povm_elements()?;
    let dim = kraus.dim();
    let mut sums = [LinearOperator::zero(dim), LinearOperator::zero(dim)];
    for (e, o) in per_op.into_iter().zip(op_outcomes) {
        sums[*o] = sums[*o].add(&e)?;
    }
    let values = [T::one(), -T::one()];
    let mut elements = Vec::with_capacity(2);
    for (s, value) in sums.into_iter().zip(values) {
        elements.push(PovmElement {
            value,
            op: LinearOperator::new_hermitian(dim, s.data().to_vec())?,
        });
    }
    Ok(PovmSet::new(elements)?)
}

/// Builds the ideal stage: K+ = cos t |0><0| + sin t |1><1|,
/// K- = sin t |0><0| + cos t |1><1|, conjugated by Hadamard for the X basis.
/// The induced POVM is verified against (I +- cos 2t B)/2.
pub fn make_stage<T: Scalar>(theta: T, basis: Basis) -> Result<MeasurementStage<T>, CircuitError> {
    check_theta(theta)?;
    let (c, s) = (theta.cos(), theta.sin());
    let o = T::cre(T::zero());
    let diag =
        |a: T, b: T| LinearOperator::new(2, vec![T::cre(a), o, o, T::cre(b)]).expect("2x2 literal");
    let mut k_plus = diag(c, s);
    let mut k_minus = diag(s, c);
    if basis == Basis::X {
        let h = ops::hadamard::<T>();
        k_plus = h.mul(&k_plus).and_then(|m| m.mul(&h))?;
        k_minus = h.mul(&k_minus).and_then(|m| m.mul(&h))?;
    }
    let kraus = KrausChannel::new(vec![k_plus, k_minus])?;
    let op_outcomes = vec![0, 1];
    let povm = grouped_povm(&kraus, &op_outcomes)?;

    let strength = (T::lit(2.0) * theta).cos();
    let axis = match basis {
        Basis::Z => ops::pauli_z::<T>(),
        Basis::X => ops::pauli_x::<T>(),
    };
    let mut defect = T::zero();
    for (idx, e) in povm.elements().iter().enumerate() {
        let sign = if idx == 0 { T::one() } else { -T::one() };
        let expect = LinearOperator::identity(2)
            .add(&axis.scale(T::cre(sign * strength)))?
            .scale(T::cre(T::lit(0.5)));
        for i in 0..2 {
            for j in 0..2 {
                let d = (e.op.get(i, j) - expect.get(i, j)).norm();
                if d > defect {
                    defect = d;
                }
            }
        }
    }
    if defect > T::EPS_VALIDATE {
        return Err(CircuitError::PovmFormDefect(
            defect.to_f64().unwrap_or(f64::NAN),
        ));
    }

    Ok(MeasurementStage {
        theta,
        basis,
        strength,
        kraus,
        op_outcomes,
        povm,
        ideal: true,
    })
}

/// Two-qubit dilation unitary of an ideal stage: (signal x probe), probe
/// rotated by S(theta) then flipped by CNOT from the signal. X-basis stages
/// sandwich the signal in Hadamards.
pub fn dilation_unitary<T: Scalar>(
    stage: &MeasurementStage<T>,
) -> Result<LinearOperator<T>, CircuitError> {
    if !stage.ideal {
        return Err(CircuitError::NotIdealForm);
    }
    let id = LinearOperator::identity(2);
    let s = s_gate(stage.theta)?;
    let cnot = {
        let p0 = ops::projector0::<T>();
        let p1 = ops::projector1::<T>();
        p0.tensor(&id).add(&p1.tensor(&ops::pauli_x::<T>()))?
    };
    let mut u = cnot.mul(&id.tensor(&s))?;
    if stage.basis == Basis::X {
        let h2 = ops::hadamard::<T>().tensor(&id);
        u = h2.mul(&u)?.mul(&h2)?;
    }
    Ok(LinearOperator::new_unitary(4, u.data().to_vec())?)
}

/// U^dag (I x Z) U: the meter observable pulled back through the dilation.
/// Closed form Z x (cos 2t Z + sin 2t X) in the Z basis; Hadamard-conjugated
/// on the signal factor in the X basis.
pub fn dilated_output_observable<T: Scalar>(
    stage: &MeasurementStage<T>,
) -> Result<LinearOperator<T>, CircuitError> {
    let u = dilation_unitary(stage)?;
    let meter = LinearOperator::identity(2).tensor(&ops::pauli_z::<T>());
    let m = u.adjoint().mul(&meter)?.mul(&u)?;
    Ok(LinearOperator::new_hermitian(4, m.data().to_vec())?)
}

/// Projective X measurement used as the post stage of the ideal chain.
pub fn x_projective_povm<T: Scalar>() -> PovmSet<T> {
    let id = LinearOperator::identity(2);
    let x = ops::pauli_x::<T>();
    let half = T::cre(T::lit(0.5));
    let make = |sign: T| {
        let e = id.add(&x.scale(T::cre(sign))).expect("2x2 add").scale(half);
        LinearOperator::new_hermitian(2, e.data().to_vec()).expect("projector is hermitian")
    };
    PovmSet::new(vec![
        PovmElement {
            value: T::one(),
            op: make(T::one()),
        },
        PovmElement {
            value: -T::one(),
            op: make(-T::one()),
        },
    ])
    .expect("X projectors form a POVM")
}

/// Full chain: prepared signal, weak probe stage, main apparatus stage
/// (always Z basis) and a two-outcome post measurement (projective X unless
/// an imperfect one is substituted).
#[derive(Debug, Clone)]
pub struct ChainConfig<T: Scalar> {
    signal: StateVector<T>,
    wp: MeasurementStage<T>,
    ma: MeasurementStage<T>,
    post: PovmSet<T>,
}

impl<T: Scalar> ChainConfig<T> {
    pub fn new(
        signal: StateVector<T>,
        wp: MeasurementStage<T>,
        ma: MeasurementStage<T>,
    ) -> Result<Self, CircuitError> {
        Self::with_post(signal, wp, ma, x_projective_povm())
    }

    pub fn with_post(
        signal: StateVector<T>,
        wp: MeasurementStage<T>,
        ma: MeasurementStage<T>,
        post: PovmSet<T>,
    ) -> Result<Self, CircuitError> {
        if signal.dim() != 2 {
            return Err(CircuitError::SignalDimension(signal.dim()));
        }
        if ma.basis() != Basis::Z {
            return Err(CircuitError::MaBasisNotZ);
        }
        if post.dim() != 2 || post.len() != 2 {
            return Err(CircuitError::BadPostMeasurement);
        }
        Ok(Self {
            signal,
            wp,
            ma,
            post,
        })
    }

    pub fn signal(&self) -> &StateVector<T> {
        &self.signal
    }

    pub fn wp(&self) -> &MeasurementStage<T> {
        &self.wp
    }

    pub fn ma(&self) -> &MeasurementStage<T> {
        &self.ma
    }

    pub fn post(&self) -> &PovmSet<T> {
        &self.post
    }
}

/// Joint distribution over (weak probe, main apparatus) or
/// (weak probe, post) outcome pairs; index 0 is outcome +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointTable2<T: Scalar> {
    p: [[T; 2]; 2],
}

impl<T: Scalar> JointTable2<T> {
    pub fn new(p: [[T; 2]; 2]) -> Result<Self, CircuitError> {
        let mut clamped = [[T::zero(); 2]; 2];
        let mut total = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let v = p[i][j];
                if v < -T::EPS_CONSTRUCT {
                    return Err(CircuitError::NegativeTableEntry(
                        v.to_f64().unwrap_or(f64::NAN),
                    ));
                }
                clamped[i][j] = v.max(T::zero());
                total += clamped[i][j];
            }
        }
        let defect = total - T::one();
        if defect.abs() > T::EPS_VALIDATE {
            return Err(CircuitError::TableNotNormalized(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { p: clamped })
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.p[i][j]
    }

    pub fn entries(&self) -> [[T; 2]; 2] {
        self.p
    }

    /// sum_{ij} v_i v_j p_ij with v = (+1, -1).
    pub fn correlator(&self) -> T {
        self.p[0][0] - self.p[0][1] - self.p[1][0] + self.p[1][1]
    }
}

/// Joint distribution over (weak probe, main apparatus, post) outcomes,
/// indexed (i, j, k); index 0 is outcome +1 on every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointTable3<T: Scalar> {
    p: [[[T; 2]; 2]; 2],
}

impl<T: Scalar> JointTable3<T> {
    pub fn new(p: [[[T; 2]; 2]; 2]) -> Result<Self, CircuitError> {
        let mut clamped = [[[T::zero(); 2]; 2]; 2];
        let mut total = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let v = p[i][j][k];
                    if v < -T::EPS_CONSTRUCT {
                        return Err(CircuitError::NegativeTableEntry(
                            v.to_f64().unwrap_or(f64::NAN),
                        ));
                    }
                    clamped[i][j][k] = v.max(T::zero());
                    total += clamped[i][j][k];
                }
            }
        }
        let defect = total - T::one();
        if defect.abs() > T::EPS_VALIDATE {
            return Err(CircuitError::TableNotNormalized(
                defect.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { p: clamped })
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.p[i][j][k]
    }

    pub fn entries(&self) -> [[[T; 2]; 2]; 2] {
        self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalPair {
    /// Weak probe vs main apparatus outcome; the error-side correlator.
    WpMa,
    /// Weak probe vs post outcome; the disturbance-side correlator.
    WpPost,
}

/// <phi| A |phi> for raw (possibly unnormalized) amplitudes.
fn raw_quadratic<T: Scalar>(
    op: &LinearOperator<T>,
    amps: &[Complex<T>],
) -> Result<Complex<T>, QcoreError> {
    let applied = op.apply_raw(amps)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, b) in amps.iter().zip(applied.iter()) {
        acc += a.conj() * *b;
    }
    Ok(acc)
}

/// Exact outcome distribution of the chain, by selective Kraus updates:
/// p(i, j, k) = sum over the operators of outcomes i and j of
/// <psi| K_i'^dag K_j'^dag F_k K_j' K_i' |psi>.
pub fn chain_distribution<T: Scalar>(cfg: &ChainConfig<T>) -> Result<JointTable3<T>, CircuitError> {
    let mut p = [[[T::zero(); 2]; 2]; 2];
    for (k_wp, i) in cfg.wp.kraus().operators().iter().zip(cfg.wp.op_outcomes()) {
        let after_wp = k_wp.apply_raw(cfg.signal.amplitudes())?;
        for (k_ma, j) in cfg.ma.kraus().operators().iter().zip(cfg.ma.op_outcomes()) {
            let after_ma = k_ma.apply_raw(&after_wp)?;
            for (k, element) in cfg.post.elements().iter().enumerate() {
                let raw = raw_quadratic(&element.op, &after_ma)?;
                if raw.im.abs() > T::EPS_VALIDATE {
                    return Err(QcoreError::ImaginaryResidue(
                        raw.im.abs().to_f64().unwrap_or(f64::NAN),
                    )
                    .into());
                }
                p[*i][*j][k] += raw.re;
            }
        }
    }
    JointTable3::new(p)
}

/// Marginalizes the three-outcome table onto an outcome pair.
pub fn marginal_joint<T: Scalar>(table: &JointTable3<T>, pair: MarginalPair) -> JointTable2<T> {
    let mut p = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                match pair {
                    MarginalPair::WpMa => p[i][j] += table.get(i, j, k),
                    MarginalPair::WpPost => p[i][k] += table.get(i, j, k),
                }
            }
        }
    }
    JointTable2 { p }
}
