//! Measurement error, disturbance and the uncertainty-relation report.
//!
//! The measured observable is A = Z, the disturbed one B = X. Error and
//! disturbance come in three flavors: the operator definitions evaluated
//! directly on the instrument (`direct_*`), the three-preparation estimate
//! that only uses meter statistics (`three_state_*`), and the weak-probe
//! estimate extracted from outcome correlators of the full chain
//! (`weak_probe_*`). For an ideal stage all three coincide and are
//! state-independent: eps = sqrt(2(1 - cos 2t)), eta = sqrt(2(1 - sin 2t)).

use num_complex::Complex;
use thiserror::Error;

use crate::circuit::{dilation_unitary, CircuitError, JointTable2, MeasurementStage};
use crate::qcore::{
    expectation, ops, povm_probabilities, LinearOperator, PovmSet, QcoreError, StateVector,
};
use crate::scalar::Scalar;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    ThreeState,
    WeakProbe,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Direct, Method::ThreeState, Method::WeakProbe];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::ThreeState => "three_state",
            Method::WeakProbe => "weak_probe",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = EdrError;

    fn from_str(s: &str) -> Result<Self, EdrError> {
        match s {
            "direct" => Ok(Method::Direct),
            "three_state" => Ok(Method::ThreeState),
            "weak_probe" => Ok(Method::WeakProbe),
            other => Err(EdrError::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum EdrError {
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("weak probe gain is zero; correlators carry no signal")]
    ZeroGain,
    #[error("squared quantity has negative value {0:e} beyond the rounding window")]
    NegativeRadicand(f64),
    #[error("auxiliary preparation has zero norm; the estimate needs all three states")]
    ZeroNormState,
    #[error("variance product below squared commutator bound by {0:e}")]
    RobertsonViolated(f64),
    #[error("unknown method `{0}` (expected direct, three_state or weak_probe)")]
    UnknownMethod(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

fn checked_range<T: Scalar>(name: &'static str, value: T, lo: f64, hi: f64) -> Result<T, EdrError> {
    let (tlo, thi) = (T::lit(lo), T::lit(hi));
    if value < tlo - T::EPS_FLAG || value > thi + T::EPS_FLAG || value.is_nan() {
        return Err(EdrError::OutOfRange {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
            lo,
            hi,
        });
    }
    Ok(value.max(tlo).min(thi))
}

/// One sweep point: the error/disturbance pair with the variances and
/// commutator bound it is judged against, tagged by extraction method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdrPoint<T: Scalar> {
    pub strength: T,
    pub eps: T,
    pub eta: T,
    pub sigma_a: T,
    pub sigma_b: T,
    pub c_bound: T,
    pub method: Method,
}

impl<T: Scalar> EdrPoint<T> {
    /// Validates ranges (rounding noise inside the flag window is clamped):
    /// strength in [0, 1], eps and eta in [0, 2], sigma >= 0, c in [0, 1].
    pub fn new(
        strength: T,
        eps: T,
        eta: T,
        sigma_a: T,
        sigma_b: T,
        c_bound: T,
        method: Method,
    ) -> Result<Self, EdrError> {
        Ok(Self {
            strength: checked_range("strength", strength, 0.0, 1.0)?,
            eps: checked_range("eps", eps, 0.0, 2.0)?,
            eta: checked_range("eta", eta, 0.0, 2.0)?,
            sigma_a: checked_range("sigma_a", sigma_a, 0.0, f64::MAX)?,
            sigma_b: checked_range("sigma_b", sigma_b, 0.0, f64::MAX)?,
            c_bound: checked_range("c_bound", c_bound, 0.0, 1.0)?,
            method,
        })
    }
}

/// Left-hand sides of the four relations evaluated at one point, with
/// satisfied flags against c_bound minus the flag window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdrReport<T: Scalar> {
    pub point: EdrPoint<T>,
    pub tilde_eps: T,
    pub tilde_eta: T,
    pub lhs_heisenberg: T,
    pub lhs_ozawa: T,
    pub lhs_branciard: T,
    pub lhs_branciard_tight: T,
    pub heisenberg_ok: bool,
    pub ozawa_ok: bool,
    pub branciard_ok: bool,
    pub branciard_tight_ok: bool,
}

/// v sqrt(1 - v^2/4), the arc-to-chord rescaling used by the tight relation.
pub fn tilde<T: Scalar>(v: T) -> T {
    v * (T::one() - v * v / T::lit(4.0)).max(T::zero()).sqrt()
}

/// Evaluates all four relations at a point. Errors if the variance product
/// sits below the commutator bound by more than the flag window, since the
/// Branciard combination is then undefined.
pub fn edr_report<T: Scalar>(point: EdrPoint<T>) -> Result<EdrReport<T>, EdrError> {
    let EdrPoint {
        eps,
        eta,
        sigma_a,
        sigma_b,
        c_bound: c,
        ..
    } = point;

    let lhs_heisenberg = eps * eta;
    let lhs_ozawa = eps * eta + eps * sigma_b + sigma_a * eta;

    let disc = sigma_a * sigma_a * sigma_b * sigma_b - c * c;
    if disc < -T::EPS_FLAG {
        return Err(EdrError::RobertsonViolated(
            (-disc).to_f64().unwrap_or(f64::NAN),
        ));
    }
    let d = disc.max(T::zero()).sqrt();
    let two = T::lit(2.0);
    let lhs_branciard =
        (eps * eps * sigma_b * sigma_b + sigma_a * sigma_a * eta * eta + two * eps * eta * d)
            .sqrt();

    let tilde_eps = tilde(eps);
    let tilde_eta = tilde(eta);
    let root = (T::one() - c * c).max(T::zero()).sqrt();
    let lhs_branciard_tight =
        (tilde_eps * tilde_eps + tilde_eta * tilde_eta + two * tilde_eps * tilde_eta * root).sqrt();

    let floor = c - T::EPS_FLAG;
    Ok(EdrReport {
        point,
        tilde_eps,
        tilde_eta,
        lhs_heisenberg,
        lhs_ozawa,
        lhs_branciard,
        lhs_branciard_tight,
        heisenberg_ok: lhs_heisenberg >= floor,
        ozawa_ok: lhs_ozawa >= floor,
        branciard_ok: lhs_branciard >= floor,
        branciard_tight_ok: lhs_branciard_tight >= floor,
    })
}

/// Robertson preparation inequality sigma_a sigma_b >= C, allowing rounding
/// slack one order below the flag window.
pub fn robertson_check<T: Scalar>(sigma_a: T, sigma_b: T, c_bound: T) -> Result<(), EdrError> {
    let slack = sigma_a * sigma_b - c_bound;
    if slack < -T::EPS_VALIDATE {
        return Err(EdrError::RobertsonViolated(
            (-slack).to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(())
}

/// sum_j ||(m_j K_j - K_j A) psi||^2, the squared error of an instrument
/// reporting meter value m_j on outcome j against target observable A.
fn instrument_error_sq<T: Scalar>(
    stage: &MeasurementStage<T>,
    target: &LinearOperator<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    let a_psi = target.apply_raw(psi.amplitudes())?;
    let mut total = T::zero();
    for (k, value) in stage.ops_with_values() {
        let k_psi = k.apply_raw(psi.amplitudes())?;
        let k_a_psi = k.apply_raw(&a_psi)?;
        for (u, v) in k_psi.iter().zip(k_a_psi.iter()) {
            total += (u.scale(value) - v).norm_sqr();
        }
    }
    Ok(total)
}

/// sum_j ||(B K_j - K_j B) psi||^2, the squared disturbance the instrument
/// channel inflicts on observable B.
fn channel_disturbance_sq<T: Scalar>(
    stage: &MeasurementStage<T>,
    b: &LinearOperator<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    let b_psi = b.apply_raw(psi.amplitudes())?;
    let mut total = T::zero();
    for k in stage.kraus().operators() {
        let k_b_psi = k.apply_raw(&b_psi)?;
        let b_k_psi = b.apply_raw(&k.apply_raw(psi.amplitudes())?)?;
        for (u, v) in b_k_psi.iter().zip(k_b_psi.iter()) {
            total += (*u - *v).norm_sqr();
        }
    }
    Ok(total)
}

fn sqrt_clamped<T: Scalar>(sq: T) -> Result<T, EdrError> {
    if sq < -T::EPS_FLAG {
        return Err(EdrError::NegativeRadicand(sq.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(sq.max(T::zero()).sqrt())
}

/// Operator-definition error of the stage measuring A = Z on `psi`.
/// sqrt(2(1 - cos 2t)) for the ideal stage, any state.
pub fn direct_error<T: Scalar>(
    stage: &MeasurementStage<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    sqrt_clamped(instrument_error_sq(stage, &ops::pauli_z(), psi)?)
}

/// Operator-definition disturbance of B = X under the stage channel.
/// sqrt(2(1 - sin 2t)) for the ideal stage, any state.
pub fn direct_disturbance<T: Scalar>(
    stage: &MeasurementStage<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    sqrt_clamped(channel_disturbance_sq(stage, &ops::pauli_x(), psi)?)
}

/// ||phi||^2 times the mean meter value the stage reports on phi after
/// normalization; the quantity the three-state method measures per
/// preparation. Errors if phi has (numerically) zero norm.
fn weighted_meter_mean<T: Scalar>(
    stage: &MeasurementStage<T>,
    phi: &[Complex<T>],
) -> Result<T, EdrError> {
    let norm_sq: T = phi.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq.sqrt() <= T::EPS_CONSTRUCT {
        return Err(EdrError::ZeroNormState);
    }
    let state = StateVector::normalized(phi.to_vec())?;
    let probs = povm_probabilities(stage.povm(), &state)?;
    let mut mean = T::zero();
    for (p, e) in probs.iter().zip(stage.povm().elements()) {
        mean += *p * e.value;
    }
    Ok(norm_sq * mean)
}

/// Three-preparation error estimate: meter statistics on psi, Z psi and
/// (Z + I) psi combine to the squared error without any probe. Equals the
/// operator definition identically.
pub fn three_state_error<T: Scalar>(
    stage: &MeasurementStage<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    let z = ops::pauli_z::<T>();
    let m_sq = {
        let probs = povm_probabilities(stage.povm(), psi)?;
        let mut acc = T::zero();
        for (p, e) in probs.iter().zip(stage.povm().elements()) {
            acc += *p * e.value * e.value;
        }
        acc
    };
    let z_sq = z.mul(&z)?;
    let a_sq = expectation(
        &LinearOperator::new_hermitian(2, z_sq.data().to_vec())?,
        psi,
    )?;

    let z_psi = z.apply_raw(psi.amplitudes())?;
    let mut z_plus_psi = Vec::with_capacity(z_psi.len());
    for (a, b) in z_psi.iter().zip(psi.amplitudes()) {
        z_plus_psi.push(*a + *b);
    }

    let sum = m_sq
        + a_sq
        + weighted_meter_mean(stage, psi.amplitudes())?
        + weighted_meter_mean(stage, &z_psi)?
        - weighted_meter_mean(stage, &z_plus_psi)?;
    sqrt_clamped(sum)
}

/// Three-preparation disturbance estimate: post-measurement statistics after
/// the stage channel on psi, X psi and (X + I) psi. `post` is the
/// two-outcome measurement reading out B = X (projective X in the ideal
/// chain).
pub fn three_state_disturbance<T: Scalar>(
    stage: &MeasurementStage<T>,
    post: &PovmSet<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    let x = ops::pauli_x::<T>();

    // mean and squared-mean post readout on phi sent through the channel
    let channel_readout = |phi: &[Complex<T>], squared: bool| -> Result<T, EdrError> {
        let norm_sq: T = phi.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq.sqrt() <= T::EPS_CONSTRUCT {
            return Err(EdrError::ZeroNormState);
        }
        let mut acc = T::zero();
        for k in stage.kraus().operators() {
            let evolved = k.apply_raw(phi)?;
            for e in post.elements() {
                let applied = e.op.apply_raw(&evolved)?;
                let mut p = T::zero();
                for (a, b) in evolved.iter().zip(applied.iter()) {
                    p += (a.conj() * *b).re;
                }
                let w = if squared { e.value * e.value } else { e.value };
                acc += w * p;
            }
        }
        Ok(acc)
    };

    let m_sq = channel_readout(psi.amplitudes(), true)?;
    let x_sq = x.mul(&x)?;
    let b_sq = expectation(
        &LinearOperator::new_hermitian(2, x_sq.data().to_vec())?,
        psi,
    )?;

    let x_psi = x.apply_raw(psi.amplitudes())?;
    let mut x_plus_psi = Vec::with_capacity(x_psi.len());
    for (a, b) in x_psi.iter().zip(psi.amplitudes()) {
        x_plus_psi.push(*a + *b);
    }

    let sum =
        m_sq + b_sq + channel_readout(psi.amplitudes(), false)? + channel_readout(&x_psi, false)?
            - channel_readout(&x_plus_psi, false)?;
    sqrt_clamped(sum)
}

// A radicand below -window is treated as inconsistent data; anything
// smaller than the flag window (all in-window negatives included) snaps to
// zero so the square root cannot amplify rounding noise near the
// projective endpoint, where the radicand vanishes.
fn weak_probe_quantity<T: Scalar>(corr: T, gain: T, window: T) -> Result<T, EdrError> {
    if gain.abs() <= T::EPS_CONSTRUCT {
        return Err(EdrError::ZeroGain);
    }
    let sq = T::lit(2.0) * (T::one() - corr / gain);
    if sq < -window {
        return Err(EdrError::NegativeRadicand(sq.to_f64().unwrap_or(f64::NAN)));
    }
    if sq < T::EPS_FLAG {
        return Ok(T::zero());
    }
    Ok(sq.sqrt())
}

/// Weak-probe error: eps = sqrt(2(1 - corr/g)) from the probe/apparatus
/// outcome correlator of the error chain (probe in the Z basis), g the probe
/// strength. Radicands below -1e-9 are rejected; the window widens for
/// sampled correlators via [`weak_probe_error_with_window`].
pub fn weak_probe_error<T: Scalar>(table: &JointTable2<T>, gain: T) -> Result<T, EdrError> {
    weak_probe_quantity(table.correlator(), gain, T::EPS_FLAG)
}

/// As [`weak_probe_error`] with an explicit clamp window for shot noise.
pub fn weak_probe_error_with_window<T: Scalar>(corr: T, gain: T, window: T) -> Result<T, EdrError> {
    weak_probe_quantity(corr, gain, window.max(T::EPS_FLAG))
}

/// Weak-probe disturbance: eta = sqrt(2(1 - corr/g)) from the probe/post
/// outcome correlator of the disturbance chain (probe in the X basis).
pub fn weak_probe_disturbance<T: Scalar>(table: &JointTable2<T>, gain: T) -> Result<T, EdrError> {
    weak_probe_quantity(table.correlator(), gain, T::EPS_FLAG)
}

/// As [`weak_probe_disturbance`] with an explicit clamp window.
pub fn weak_probe_disturbance_with_window<T: Scalar>(
    corr: T,
    gain: T,
    window: T,
) -> Result<T, EdrError> {
    weak_probe_quantity(corr, gain, window.max(T::EPS_FLAG))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Heisenberg,
    Ozawa,
    Branciard,
    /// Unit-variance tight form; ignores the sigma arguments.
    BranciardTight,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::Heisenberg,
        BoundKind::Ozawa,
        BoundKind::Branciard,
        BoundKind::BranciardTight,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Heisenberg => "heisenberg",
            BoundKind::Ozawa => "ozawa",
            BoundKind::Branciard => "branciard",
            BoundKind::BranciardTight => "branciard_tight",
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = EdrError;

    fn from_str(s: &str) -> Result<Self, EdrError> {
        match s {
            "heisenberg" => Ok(BoundKind::Heisenberg),
            "ozawa" => Ok(BoundKind::Ozawa),
            "branciard" => Ok(BoundKind::Branciard),
            "branciard_tight" => Ok(BoundKind::BranciardTight),
            other => Err(EdrError::UnknownMethod(other.to_string())),
        }
    }
}

/// Minimum disturbance each relation permits at error `eps`. Heisenberg
/// diverges at eps = 0 (returns +inf). The tight form assumes unit
/// variances, as it is only defined for +-1-valued observables.
pub fn min_disturbance_bound<T: Scalar>(
    kind: BoundKind,
    eps: T,
    sigma_a: T,
    sigma_b: T,
    c_bound: T,
) -> Result<T, EdrError> {
    let eps = checked_range("eps", eps, 0.0, 2.0)?;
    let c = checked_range("c_bound", c_bound, 0.0, 1.0)?;
    let sigma_a = checked_range("sigma_a", sigma_a, 0.0, f64::MAX)?;
    let sigma_b = checked_range("sigma_b", sigma_b, 0.0, f64::MAX)?;

    match kind {
        BoundKind::Heisenberg => {
            if eps == T::zero() {
                Ok(T::infinity())
            } else {
                Ok(c / eps)
            }
        }
        BoundKind::Ozawa => {
            let num = c - eps * sigma_b;
            Ok((num / (sigma_a + eps)).max(T::zero()))
        }
        BoundKind::Branciard => {
            let disc = sigma_a * sigma_a * sigma_b * sigma_b - c * c;
            if disc < -T::EPS_FLAG {
                return Err(EdrError::RobertsonViolated(
                    (-disc).to_f64().unwrap_or(f64::NAN),
                ));
            }
            let d = disc.max(T::zero()).sqrt();
            let short = eps * eps * sigma_b * sigma_b - c * c;
            if short >= T::zero() {
                return Ok(T::zero());
            }
            let root = (eps * eps * d * d - sigma_a * sigma_a * short).sqrt();
            Ok((root - eps * d) / (sigma_a * sigma_a))
        }
        BoundKind::BranciardTight => {
            let te = tilde(eps);
            let root = (T::one() - c * c).max(T::zero()).sqrt();
            let th = (c * (T::one() - te * te).max(T::zero()).sqrt() - te * root).max(T::zero());
            let eta_sq = T::lit(2.0) * (T::one() - (T::one() - th * th).max(T::zero()).sqrt());
            Ok(eta_sq.max(T::zero()).sqrt())
        }
    }
}

/// Squared error via the explicit two-qubit dilation: <(M - Z x I)^2> on
/// psi x |0>, M the pulled-back meter observable. Cross-check for
/// [`direct_error`]; ideal stages only.
pub fn dilated_error<T: Scalar>(
    stage: &MeasurementStage<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    let u = dilation_unitary(stage)?;
    let meter = LinearOperator::identity(2).tensor(&ops::pauli_z::<T>());
    let m = u.adjoint().mul(&meter)?.mul(&u)?;
    let diff = m.sub(&ops::pauli_z::<T>().tensor(&LinearOperator::identity(2)))?;
    let joint = psi.tensor(&StateVector::ket0());
    let applied = diff.apply_raw(joint.amplitudes())?;
    let sq: T = applied.iter().map(|a| a.norm_sqr()).sum();
    sqrt_clamped(sq)
}

/// Squared disturbance via the dilation: <(U^dag (X x I) U - X x I)^2> on
/// psi x |0>. Cross-check for [`direct_disturbance`]; ideal stages only.
pub fn dilated_disturbance<T: Scalar>(
    stage: &MeasurementStage<T>,
    psi: &StateVector<T>,
) -> Result<T, EdrError> {
    let u = dilation_unitary(stage)?;
    let xi = ops::pauli_x::<T>().tensor(&LinearOperator::identity(2));
    let evolved = u.adjoint().mul(&xi)?.mul(&u)?;
    let diff = evolved.sub(&xi)?;
    let joint = psi.tensor(&StateVector::ket0());
    let applied = diff.apply_raw(joint.amplitudes())?;
    let sq: T = applied.iter().map(|a| a.norm_sqr()).sum();
    sqrt_clamped(sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        chain_distribution, make_stage, marginal_joint, x_projective_povm, Basis, ChainConfig,
        MarginalPair,
    };
    use crate::qcore::{commutator_bound, std_dev};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    type SV = StateVector<f64>;
    const PI: f64 = std::f64::consts::PI;

    fn random_qubit(rng: &mut ChaCha12Rng) -> SV {
        let t: f64 = rng.random_range(0.0..PI);
        let p: f64 = rng.random_range(0.0..(2.0 * PI));
        SV::bloch(t, p)
    }

    fn ideal_eps(theta: f64) -> f64 {
        (2.0 * (1.0 - (2.0 * theta).cos())).sqrt()
    }

    fn ideal_eta(theta: f64) -> f64 {
        (2.0 * (1.0 - (2.0 * theta).sin())).sqrt()
    }

    #[test]
    fn direct_error_closed_form_frozen_points() {
        let psi = SV::y_plus();
        for (theta, want) in [(0.0, 0.0), (PI / 4.0, 2f64.sqrt()), (PI / 6.0, 1.0)] {
            let stage = make_stage(theta, Basis::Z).unwrap();
            let eps = direct_error(&stage, &psi).unwrap();
            assert!((eps - want).abs() < 1e-12, "theta {theta}: {eps} vs {want}");
        }
    }

    #[test]
    fn direct_disturbance_closed_form_frozen_points() {
        let psi = SV::y_plus();
        let stage = make_stage(PI / 6.0, Basis::Z).unwrap();
        let eta = direct_disturbance(&stage, &psi).unwrap();
        let want = (2.0 - 3.0f64.sqrt()).sqrt();
        assert!((eta - want).abs() < 1e-12, "{eta} vs {want}");
        assert!((want - 0.517_638_090_205_041_5).abs() < 1e-12);
    }

    #[test]
    fn direct_quantities_are_state_independent() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..100 {
            let psi = random_qubit(&mut rng);
            let theta: f64 = rng.random_range(0.0..PI / 4.0);
            let stage = make_stage(theta, Basis::Z).unwrap();
            assert!((direct_error(&stage, &psi).unwrap() - ideal_eps(theta)).abs() < 1e-10);
            assert!((direct_disturbance(&stage, &psi).unwrap() - ideal_eta(theta)).abs() < 1e-10);
        }
    }

    #[test]
    fn kraus_and_dilation_routes_agree() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for _ in 0..100 {
            let psi = random_qubit(&mut rng);
            let theta: f64 = rng.random_range(0.0..PI / 4.0);
            let stage = make_stage(theta, Basis::Z).unwrap();
            let a = direct_error(&stage, &psi).unwrap();
            let b = dilated_error(&stage, &psi).unwrap();
            assert!((a - b).abs() < 1e-10, "error: kraus {a} vs dilated {b}");
            let c = direct_disturbance(&stage, &psi).unwrap();
            let d = dilated_disturbance(&stage, &psi).unwrap();
            assert!(
                (c - d).abs() < 1e-10,
                "disturbance: kraus {c} vs dilated {d}"
            );
        }
    }

    #[test]
    fn three_state_error_matches_direct() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..100 {
            let psi = random_qubit(&mut rng);
            let theta: f64 = rng.random_range(0.0..PI / 4.0);
            let stage = make_stage(theta, Basis::Z).unwrap();
            let a = three_state_error(&stage, &psi).unwrap();
            let b = direct_error(&stage, &psi).unwrap();
            assert!((a - b).abs() < 1e-10, "three-state {a} vs direct {b}");
        }
    }

    #[test]
    fn three_state_disturbance_matches_direct() {
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let post = x_projective_povm::<f64>();
        for _ in 0..100 {
            let psi = random_qubit(&mut rng);
            let theta: f64 = rng.random_range(0.0..PI / 4.0);
            let stage = make_stage(theta, Basis::Z).unwrap();
            let a = three_state_disturbance(&stage, &post, &psi).unwrap();
            let b = direct_disturbance(&stage, &psi).unwrap();
            assert!((a - b).abs() < 1e-10, "three-state {a} vs direct {b}");
        }
    }

    #[test]
    fn three_state_error_rejects_vanishing_preparation() {
        // (Z + I)|1> = 0, so the third preparation cannot be normalized
        let stage = make_stage(0.3, Basis::Z).unwrap();
        assert!(matches!(
            three_state_error(&stage, &SV::ket1()),
            Err(EdrError::ZeroNormState)
        ));
    }

    #[test]
    fn weak_probe_error_at_reference_settings() {
        let cfg = ChainConfig::new(
            SV::y_plus(),
            crate::circuit::MeasurementStage::from_strength(0.104, Basis::Z).unwrap(),
            make_stage(PI / 6.0, Basis::Z).unwrap(),
        )
        .unwrap();
        let table = marginal_joint(&chain_distribution(&cfg).unwrap(), MarginalPair::WpMa);
        assert!((table.correlator() - 0.052).abs() < 1e-12);
        let eps = weak_probe_error(&table, 0.104).unwrap();
        assert!((eps - 1.0).abs() < 1e-10, "eps = {eps}");
    }

    #[test]
    fn weak_probe_disturbance_at_reference_settings() {
        let cfg = ChainConfig::new(
            SV::y_plus(),
            crate::circuit::MeasurementStage::from_strength(0.104, Basis::X).unwrap(),
            make_stage(PI / 6.0, Basis::Z).unwrap(),
        )
        .unwrap();
        let table = marginal_joint(&chain_distribution(&cfg).unwrap(), MarginalPair::WpPost);
        let eta = weak_probe_disturbance(&table, 0.104).unwrap();
        let want = (2.0 - 3.0f64.sqrt()).sqrt();
        assert!((eta - want).abs() < 1e-10, "eta = {eta}");
    }

    #[test]
    fn weak_probe_methods_agree_with_direct_across_gains() {
        let psi = SV::y_plus();
        for gain in [0.05, 0.104, 0.3, 0.9, 1.0] {
            for theta in [0.0, 0.2, PI / 8.0, PI / 6.0, PI / 4.0] {
                let ma = make_stage(theta, Basis::Z).unwrap();
                let err_chain = ChainConfig::new(
                    psi.clone(),
                    crate::circuit::MeasurementStage::from_strength(gain, Basis::Z).unwrap(),
                    ma.clone(),
                )
                .unwrap();
                let eps = weak_probe_error(
                    &marginal_joint(&chain_distribution(&err_chain).unwrap(), MarginalPair::WpMa),
                    gain,
                )
                .unwrap();
                assert!(
                    (eps - ideal_eps(theta)).abs() < 1e-9,
                    "gain {gain} theta {theta}: {eps}"
                );

                let dist_chain = ChainConfig::new(
                    psi.clone(),
                    crate::circuit::MeasurementStage::from_strength(gain, Basis::X).unwrap(),
                    ma,
                )
                .unwrap();
                let eta = weak_probe_disturbance(
                    &marginal_joint(
                        &chain_distribution(&dist_chain).unwrap(),
                        MarginalPair::WpPost,
                    ),
                    gain,
                )
                .unwrap();
                assert!(
                    (eta - ideal_eta(theta)).abs() < 1e-9,
                    "gain {gain} theta {theta}: {eta}"
                );
            }
        }
    }

    #[test]
    fn weak_probe_rejects_zero_gain_and_deep_negative_radicand() {
        assert!(matches!(
            weak_probe_error_with_window(0.5f64, 0.0, 1e-9),
            Err(EdrError::ZeroGain)
        ));
        // corr/g > 1 beyond the window: radicand -2e-4
        assert!(matches!(
            weak_probe_error_with_window(1.0001f64, 1.0, 1e-9),
            Err(EdrError::NegativeRadicand(_))
        ));
        // inside the window: clamps to zero
        let eps = weak_probe_error_with_window(1.0001f64, 1.0, 1e-3).unwrap();
        assert_eq!(eps, 0.0);
        let eps = weak_probe_error_with_window(1.0 + 4e-10_f64, 1.0, 1e-9).unwrap();
        assert_eq!(eps, 0.0);
    }

    #[test]
    fn report_frozen_values_at_half_strength_ideal_point() {
        // theta = pi/8: eps = eta = sqrt(2 - sqrt(2)), sigma = 1, C = 1
        let e = (2.0 - 2.0f64.sqrt()).sqrt();
        let point =
            EdrPoint::new((PI / 4.0f64).cos(), e, e, 1.0, 1.0, 1.0, Method::Direct).unwrap();
        let report = edr_report(point).unwrap();
        assert!((report.lhs_heisenberg - 0.585_786_437_626_904_9).abs() < 1e-12);
        assert!((report.lhs_ozawa - 2.116_520_167_087_263_5).abs() < 1e-12);
        assert!((report.lhs_branciard - 1.082_392_200_292_393_8).abs() < 1e-12);
        assert!((report.lhs_branciard_tight - 1.0).abs() < 1e-12);
        assert!(!report.heisenberg_ok);
        assert!(report.ozawa_ok);
        assert!(report.branciard_ok);
        assert!(report.branciard_tight_ok);
        // tilde rescaling lands exactly on 1/sqrt(2) here
        assert!((report.tilde_eps - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tilde_identity_on_ideal_curve() {
        for i in 0..=100 {
            let theta = PI / 4.0 * i as f64 / 100.0;
            let te = tilde(ideal_eps(theta));
            let th = tilde(ideal_eta(theta));
            assert!(
                (te * te + th * th - 1.0).abs() < 1e-10,
                "theta {theta}: {}",
                te * te + th * th
            );
        }
    }

    #[test]
    fn report_rejects_robertson_violations() {
        let point = EdrPoint::new(0.5, 1.0, 1.0, 0.5, 0.5, 1.0, Method::Direct).unwrap();
        assert!(matches!(
            edr_report(point),
            Err(EdrError::RobertsonViolated(_))
        ));
        assert!(robertson_check(0.5f64, 0.5, 1.0).is_err());
        assert!(robertson_check(1.0f64, 1.0, 1.0).is_ok());
        assert!(robertson_check(1.0f64, 1.0, 1.0 - 1e-12).is_ok());
    }

    #[test]
    fn point_construction_validates_ranges() {
        assert!(matches!(
            EdrPoint::new(0.5f64, 2.5, 0.5, 1.0, 1.0, 1.0, Method::Direct),
            Err(EdrError::OutOfRange { name: "eps", .. })
        ));
        assert!(matches!(
            EdrPoint::new(0.5f64, 0.5, 0.5, 1.0, 1.0, 1.5, Method::Direct),
            Err(EdrError::OutOfRange {
                name: "c_bound",
                ..
            })
        ));
        // rounding noise inside the window clamps
        let p = EdrPoint::new(0.5f64, -1e-12, 0.5, 1.0, 1.0, 1.0, Method::Direct).unwrap();
        assert_eq!(p.eps, 0.0);
    }

    #[test]
    fn ozawa_and_branciard_hold_on_random_ideal_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(59);
        let z = ops::pauli_z::<f64>();
        let x = ops::pauli_x::<f64>();
        let mut heisenberg_failures = 0usize;
        for _ in 0..2000 {
            let psi = random_qubit(&mut rng);
            let theta: f64 = rng.random_range(0.0..PI / 4.0);
            let sigma_a = std_dev(&z, &psi).unwrap();
            let sigma_b = std_dev(&x, &psi).unwrap();
            let c = commutator_bound(&z, &x, &psi).unwrap();
            let point = EdrPoint::new(
                (2.0 * theta).cos(),
                ideal_eps(theta),
                ideal_eta(theta),
                sigma_a,
                sigma_b,
                c,
                Method::Direct,
            )
            .unwrap();
            let report = edr_report(point).unwrap();
            assert!(report.ozawa_ok, "ozawa violated at {point:?}");
            assert!(report.branciard_ok, "branciard violated at {point:?}");
            assert!(
                report.branciard_tight_ok,
                "tight branciard violated at {point:?}"
            );
            if !report.heisenberg_ok {
                heisenberg_failures += 1;
            }
        }
        assert!(
            heisenberg_failures > 0,
            "the unmodified product relation should fail somewhere"
        );
    }

    #[test]
    fn minimum_disturbance_frozen_values() {
        let b = |kind, eps| min_disturbance_bound::<f64>(kind, eps, 1.0, 1.0, 1.0).unwrap();
        assert!(b(BoundKind::Heisenberg, 0.0).is_infinite());
        assert!((b(BoundKind::Heisenberg, 0.5) - 2.0).abs() < 1e-15);
        assert!((b(BoundKind::Heisenberg, 2.0) - 0.5).abs() < 1e-15);
        assert!((b(BoundKind::Ozawa, 0.0) - 1.0).abs() < 1e-15);
        assert!((b(BoundKind::Ozawa, 0.5) - 1.0 / 3.0).abs() < 1e-15);
        assert!(b(BoundKind::Ozawa, 1.0).abs() < 1e-15);
        assert!((b(BoundKind::Branciard, 0.5) - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((b(BoundKind::Branciard, 0.0) - 1.0).abs() < 1e-12);
        assert!(b(BoundKind::Branciard, 1.0).abs() < 1e-12);
        let e = (2.0 - 2.0f64.sqrt()).sqrt();
        assert!((b(BoundKind::BranciardTight, e) - e).abs() < 1e-12);
        assert!(b(BoundKind::BranciardTight, 2.0f64.sqrt()).abs() < 1e-12);
        assert!((b(BoundKind::BranciardTight, 0.0) - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bounds_plug_back_onto_their_relation() {
        for i in 0..=50 {
            // stay inside each relation's meaningful error range
            // the Heisenberg range starts where eta = C/eps fits in [0, 2]
            for (kind, eps_min, eps_max) in [
                (BoundKind::Heisenberg, 0.5, 2.0),
                (BoundKind::Ozawa, 0.0, 1.0),
                (BoundKind::Branciard, 0.0, 1.0),
                (BoundKind::BranciardTight, 0.0, 2.0f64.sqrt()),
            ] {
                let eps = eps_min + (eps_max - eps_min) * i as f64 / 50.0;
                let eta = min_disturbance_bound(kind, eps, 1.0, 1.0, 1.0).unwrap();
                let point = EdrPoint::new(0.5, eps, eta, 1.0, 1.0, 1.0, Method::Direct).unwrap();
                let report = edr_report(point).unwrap();
                let lhs = match kind {
                    BoundKind::Heisenberg => report.lhs_heisenberg,
                    BoundKind::Ozawa => report.lhs_ozawa,
                    BoundKind::Branciard => report.lhs_branciard,
                    BoundKind::BranciardTight => report.lhs_branciard_tight,
                };
                assert!((lhs - 1.0).abs() < 1e-8, "{kind} at eps {eps}: lhs {lhs}");
            }
        }
    }

    #[test]
    fn bound_ordering_at_unit_variance() {
        for i in 1..50 {
            let eps = 0.02 * i as f64;
            for c in [0.3, 0.7, 0.99, 1.0] {
                let tight =
                    min_disturbance_bound(BoundKind::BranciardTight, eps, 1.0, 1.0, c).unwrap();
                let branciard =
                    min_disturbance_bound(BoundKind::Branciard, eps, 1.0, 1.0, c).unwrap();
                let ozawa = min_disturbance_bound(BoundKind::Ozawa, eps, 1.0, 1.0, c).unwrap();
                assert!(
                    tight + 1e-10 >= branciard && branciard + 1e-10 >= ozawa,
                    "ordering broken at eps {eps}, c {c}: {tight} {branciard} {ozawa}"
                );
            }
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!(matches!(
            "weird".parse::<Method>(),
            Err(EdrError::UnknownMethod(_))
        ));
        for k in BoundKind::ALL {
            assert_eq!(k.as_str().parse::<BoundKind>().unwrap(), k);
        }
    }

    #[test]
    fn commutator_bound_after_probe_matches_sine_of_probe_angle() {
        // the probe channel shrinks |<Y>| by sin 2t_w in either basis
        let psi = SV::y_plus();
        let y = ops::pauli_y::<f64>();
        let x = ops::pauli_x::<f64>();
        let z = ops::pauli_z::<f64>();
        for g in [0.05, 0.104, 0.3, 0.9] {
            let sin2t = (1.0f64 - g * g).sqrt();
            for basis in [Basis::Z, Basis::X] {
                let wp = crate::circuit::MeasurementStage::from_strength(g, basis).unwrap();
                let rho = crate::qcore::apply_channel(wp.kraus(), &psi.to_density()).unwrap();
                let c = commutator_bound(&z, &x, &rho).unwrap();
                let y_mean = expectation(&y, &rho).unwrap();
                assert!((c - sin2t).abs() < 1e-12, "basis {basis}, g {g}: {c}");
                assert!((y_mean.abs() - sin2t).abs() < 1e-12);
            }
        }
        let c_ref = (1.0f64 - 0.104 * 0.104).sqrt();
        assert!((c_ref - 0.994_577_297_146_883_4).abs() < 1e-12);
        // rounds to the five printed digits 0.99458
        assert!((c_ref - 0.99458).abs() < 5e-6);
    }
}
