//! Exact and sampled statistics of weak-probe error-disturbance experiments
//! on a single polarization qubit.
//!
//! The crate models a three-stage measurement chain: a weak probe of
//! adjustable strength, a main measurement apparatus of variable strength,
//! and a projective post-measurement. From the chain it computes measurement
//! error and disturbance three independent ways (direct dilation evaluation,
//! the three-state method, and weak-probe correlators), evaluates the
//! Heisenberg, Ozawa and both Branciard uncertainty relations, degrades the
//! chain with imperfect polarizing beam splitters, and simulates
//! photon-counting statistics with seeded multinomial draws.
//!
//! All core math is generic over the real scalar via [`scalar::Scalar`];
//! the aliases at the crate root fix `f64`, which is what the command line
//! front end and the acceptance suite use.

// index loops here usually walk several tables in lockstep
#![allow(clippy::needless_range_loop)]

pub mod circuit;
pub mod counts;
pub mod edr;
pub mod optics;
pub mod qcore;
pub mod scalar;
pub mod sweep;
pub mod validate;

pub use scalar::Scalar;

pub type StateVector = qcore::StateVector<f64>;
pub type DensityMatrix = qcore::DensityMatrix<f64>;
pub type LinearOperator = qcore::LinearOperator<f64>;
pub type KrausChannel = qcore::KrausChannel<f64>;
pub type PovmSet = qcore::PovmSet<f64>;

pub type MeasurementStage = circuit::MeasurementStage<f64>;
pub type ChainConfig = circuit::ChainConfig<f64>;
pub type JointTable2 = circuit::JointTable2<f64>;
pub type JointTable3 = circuit::JointTable3<f64>;

pub type EdrPoint = edr::EdrPoint<f64>;
pub type EdrReport = edr::EdrReport<f64>;

pub type PbsSpec = optics::PbsSpec<f64>;
pub type PbsCoefficients = optics::PbsCoefficients<f64>;
pub type ApparatusSpec = optics::ApparatusSpec<f64>;

pub type CountsRecord = counts::CountsRecord<f64>;
pub type RunStats = counts::RunStats<f64>;
