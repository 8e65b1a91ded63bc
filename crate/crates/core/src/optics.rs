//! Imperfect polarizing beamsplitters and the instrument they induce.
//!
//! A real PBS leaks: a fraction 1/e_r of H light exits the reflected port
//! and 1/e_t of V light exits the transmitted port. Each stage is a Sagnac
//! loop that encounters its PBS twice (split, per-arm rotation, recombine),
//! so leakage enters the outcome statistics twice per photon.
//!
//! The model tracks each leaked amplitude as a separate displaced mode: the
//! two arms' dominant beams recombine coherently into the main output mode
//! of each port (the interferometer is aligned for them), while light that
//! took a suppressed routing at either encounter reaches the detector in a
//! distinguishable mode and adds in intensity. Every mode is one Kraus
//! operator, grouped by detector, and the family is complete by
//! construction, so the instrument is exactly trace-preserving and reduces
//! to the ideal stage as the extinction ratios grow (deviations scale as
//! 1/e, not 1/sqrt(e)).

use thiserror::Error;

use crate::circuit::{
    chain_distribution, s_gate, Basis, ChainConfig, CircuitError, JointTable3, MeasurementStage,
};
use crate::qcore::{ops, LinearOperator, PovmElement, PovmSet, QcoreError, StateVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum OpticsError {
    #[error("{name} extinction ratio must exceed 1, got {value}")]
    InvalidExtinction { name: &'static str, value: f64 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

/// Extinction ratios of one PBS: e_r for the reflected port (H leakage
/// 1/e_r) and e_t for the transmitted port (V leakage 1/e_t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbsSpec<T: Scalar> {
    e_r: T,
    e_t: T,
}

impl<T: Scalar> PbsSpec<T> {
    pub fn new(e_r: T, e_t: T) -> Result<Self, OpticsError> {
        if e_r.is_nan() || e_r <= T::one() {
            return Err(OpticsError::InvalidExtinction {
                name: "e_r",
                value: e_r.to_f64().unwrap_or(f64::NAN),
            });
        }
        if e_t.is_nan() || e_t <= T::one() {
            return Err(OpticsError::InvalidExtinction {
                name: "e_t",
                value: e_t.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { e_r, e_t })
    }

    pub fn e_r(&self) -> T {
        self.e_r
    }

    pub fn e_t(&self) -> T {
        self.e_t
    }
}

/// Intensity splitting per polarization: T_p + R_p = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbsCoefficients<T: Scalar> {
    pub t_h: T,
    pub r_h: T,
    pub t_v: T,
    pub r_v: T,
}

pub fn pbs_coefficients<T: Scalar>(spec: &PbsSpec<T>) -> PbsCoefficients<T> {
    let r_h = T::one() / spec.e_r;
    let t_v = T::one() / spec.e_t;
    PbsCoefficients {
        t_h: T::one() - r_h,
        r_h,
        t_v,
        r_v: T::one() - t_v,
    }
}

/// One PBS per chain stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusSpec<T: Scalar> {
    pub wp_pbs: PbsSpec<T>,
    pub ma_pbs: PbsSpec<T>,
    pub post_pbs: PbsSpec<T>,
}

impl<T: Scalar> ApparatusSpec<T> {
    /// Extinction ratios of the benchtop cubes this models: 100/1000 at the
    /// probe and post stages, a weaker 50/1000 cube in the main apparatus.
    pub fn typical() -> Self {
        let good = PbsSpec::new(T::lit(100.0), T::lit(1000.0)).expect("static ratios");
        let fair = PbsSpec::new(T::lit(50.0), T::lit(1000.0)).expect("static ratios");
        Self {
            wp_pbs: good,
            ma_pbs: fair,
            post_pbs: good,
        }
    }
}

fn diag<T: Scalar>(a: T, b: T) -> LinearOperator<T> {
    let o = T::cre(T::zero());
    LinearOperator::new(2, vec![T::cre(a), o, o, T::cre(b)]).expect("2x2 literal")
}

/// Stage instrument with PBS leakage. Outcome +1 collects the modes at the
/// transmitted-side port, outcome -1 those at the reflected-side port
/// (polarization-flipped, matching the ideal stage's output convention).
pub fn imperfect_stage<T: Scalar>(
    theta: T,
    basis: Basis,
    spec: &PbsSpec<T>,
) -> Result<MeasurementStage<T>, OpticsError> {
    let c = pbs_coefficients(spec);
    let (st_h, sr_h) = (c.t_h.sqrt(), c.r_h.sqrt());
    let (st_v, sr_v) = (c.t_v.sqrt(), c.r_v.sqrt());

    let rot_t = s_gate(theta)?;
    // arm-r rotation: the reflection sending V to cos |H> + sin |V>
    let (cs, sn) = (theta.cos(), theta.sin());
    let rot_r = LinearOperator::new_hermitian_unitary(
        2,
        vec![T::cre(-sn), T::cre(cs), T::cre(cs), T::cre(sn)],
    )?;

    // first encounter: arm t is the transmitted beam, arm r the reflected
    let arms = [
        (&rot_t, diag(st_h, T::zero()), diag(T::zero(), st_v)),
        (&rot_r, diag(T::zero(), sr_v), diag(sr_h, T::zero())),
    ];
    // second encounter, per arm: (to "+" port dominant, leak) then
    // (to "-" port dominant, leak); arm t transmits toward "+", arm r
    // reflects toward "+"
    let second = [
        [
            (diag(st_h, T::zero()), diag(T::zero(), st_v)),
            (diag(T::zero(), sr_v), diag(sr_h, T::zero())),
        ],
        [
            (diag(T::zero(), sr_v), diag(sr_h, T::zero())),
            (diag(st_h, T::zero()), diag(T::zero(), st_v)),
        ],
    ];

    let mut plus_main = LinearOperator::zero(2);
    let mut minus_main = LinearOperator::zero(2);
    let mut plus_ops: Vec<LinearOperator<T>> = Vec::new();
    let mut minus_ops: Vec<LinearOperator<T>> = Vec::new();

    for (arm_idx, (rot, first_dom, first_leak)) in arms.iter().enumerate() {
        for (first, first_is_dom) in [(first_dom, true), (first_leak, false)] {
            let routed = rot.mul(first)?;
            for port in 0..2 {
                let (sec_dom, sec_leak) = &second[arm_idx][port];
                for (sec, sec_is_dom) in [(sec_dom, true), (sec_leak, false)] {
                    let op = sec.mul(&routed)?;
                    if first_is_dom && sec_is_dom {
                        // the aligned beams of both arms share the main mode
                        if port == 0 {
                            plus_main = plus_main.add(&op)?;
                        } else {
                            minus_main = minus_main.add(&op)?;
                        }
                    } else if port == 0 {
                        plus_ops.push(op);
                    } else {
                        minus_ops.push(op);
                    }
                }
            }
        }
    }

    plus_ops.insert(0, plus_main);
    minus_ops.insert(0, minus_main);

    // the "-" port flips polarization, as in the ideal stage's K- convention
    let x = ops::pauli_x::<T>();
    for op in minus_ops.iter_mut() {
        *op = x.mul(op)?;
    }

    if basis == Basis::X {
        let h = ops::hadamard::<T>();
        for op in plus_ops.iter_mut().chain(minus_ops.iter_mut()) {
            *op = h.mul(op)?.mul(&h)?;
        }
    }

    Ok(MeasurementStage::from_outcome_groups(
        theta, basis, plus_ops, minus_ops,
    )?)
}

/// Two-outcome readout through a single imperfect PBS (preceded by a
/// Hadamard waveplate for the X basis). Outcome +1 is the transmitted port.
pub fn pbs_readout_povm<T: Scalar>(
    basis: Basis,
    spec: &PbsSpec<T>,
) -> Result<PovmSet<T>, OpticsError> {
    let c = pbs_coefficients(spec);
    let mut plus = diag(c.t_h, c.t_v);
    let mut minus = diag(c.r_h, c.r_v);
    if basis == Basis::X {
        let h = ops::hadamard::<T>();
        plus = h.mul(&plus)?.mul(&h)?;
        minus = h.mul(&minus)?.mul(&h)?;
    }
    let as_element = |op: LinearOperator<T>, value: T| -> Result<PovmElement<T>, QcoreError> {
        Ok(PovmElement {
            value,
            op: LinearOperator::new_hermitian(2, op.data().to_vec())?,
        })
    };
    Ok(PovmSet::new(vec![
        as_element(plus, T::one())?,
        as_element(minus, -T::one())?,
    ])?)
}

/// Chain with every stage built from its imperfect PBS: probe stage in
/// `wp_basis` at `wp_theta`, main apparatus in Z at `ma_theta`, X readout.
pub fn imperfect_chain<T: Scalar>(
    signal: StateVector<T>,
    wp_basis: Basis,
    wp_theta: T,
    ma_theta: T,
    apparatus: &ApparatusSpec<T>,
) -> Result<ChainConfig<T>, OpticsError> {
    let wp = imperfect_stage(wp_theta, wp_basis, &apparatus.wp_pbs)?;
    let ma = imperfect_stage(ma_theta, Basis::Z, &apparatus.ma_pbs)?;
    let post = pbs_readout_povm(Basis::X, &apparatus.post_pbs)?;
    Ok(ChainConfig::with_post(signal, wp, ma, post)?)
}

/// Outcome distribution of the imperfect chain.
pub fn imperfect_chain_distribution<T: Scalar>(
    signal: StateVector<T>,
    wp_basis: Basis,
    wp_theta: T,
    ma_theta: T,
    apparatus: &ApparatusSpec<T>,
) -> Result<JointTable3<T>, OpticsError> {
    let cfg = imperfect_chain(signal, wp_basis, wp_theta, ma_theta, apparatus)?;
    Ok(chain_distribution(&cfg)?)
}
