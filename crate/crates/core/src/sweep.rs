//! Strength sweeps and bound curves: turns a configuration into the data
//! tables behind the trade-off and validity plots.
//!
//! This module is the orchestration layer and works in `f64` directly; the
//! generic math lives in the other modules. Counting statistics exist only
//! in the weak-probe scheme, so `monte_carlo` statistics affect weak-probe
//! rows; direct and three-state rows stay exact and carry no error bars.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{
    chain_distribution, marginal_joint, x_projective_povm, Basis, ChainConfig, CircuitError,
    MarginalPair, MeasurementStage,
};
use crate::counts::{
    derive_seed, run_repetitions, sample_counts, ChainSettings, CountsError, CountsRecord,
    NormMode, PointContext,
};
use crate::edr::{
    direct_disturbance, direct_error, edr_report, min_disturbance_bound, three_state_disturbance,
    three_state_error, weak_probe_disturbance, weak_probe_error, BoundKind, EdrError, EdrPoint,
    EdrReport, Method,
};
use crate::optics::{imperfect_stage, pbs_readout_povm, ApparatusSpec, OpticsError, PbsSpec};
use crate::qcore::{
    apply_channel, commutator_bound, ops, std_dev, DensityMatrix, PovmSet, QcoreError, StateVector,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum SweepError {
    /// Bad configuration; maps to the config-error exit code.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    /// Unreadable or malformed configuration input.
    #[error("config parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Edr(#[from] EdrError),
    #[error(transparent)]
    Counts(#[from] CountsError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

impl SweepError {
    fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SweepError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors a caller should treat as configuration mistakes
    /// rather than numerical inconsistencies.
    pub fn is_config(&self) -> bool {
        matches!(self, SweepError::Config { .. } | SweepError::Parse(_))
    }
}

/// Signal state selection: a named cardinal state or explicit Bloch angles
/// (`|psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignalSpec {
    Named(NamedState),
    Bloch { theta: f64, phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedState {
    #[serde(rename = "y+")]
    YPlus,
    #[serde(rename = "y-")]
    YMinus,
    #[serde(rename = "x+")]
    XPlus,
    #[serde(rename = "x-")]
    XMinus,
    #[serde(rename = "z+")]
    ZPlus,
    #[serde(rename = "z-")]
    ZMinus,
}

impl NamedState {
    pub fn as_str(&self) -> &'static str {
        match self {
            NamedState::YPlus => "y+",
            NamedState::YMinus => "y-",
            NamedState::XPlus => "x+",
            NamedState::XMinus => "x-",
            NamedState::ZPlus => "z+",
            NamedState::ZMinus => "z-",
        }
    }
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec::Named(NamedState::YPlus)
    }
}

impl std::fmt::Display for SignalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignalSpec::Named(n) => f.write_str(n.as_str()),
            SignalSpec::Bloch { theta, phi } => write!(f, "{theta},{phi}"),
        }
    }
}

impl std::str::FromStr for SignalSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "y+" => return Ok(SignalSpec::Named(NamedState::YPlus)),
            "y-" => return Ok(SignalSpec::Named(NamedState::YMinus)),
            "x+" => return Ok(SignalSpec::Named(NamedState::XPlus)),
            "x-" => return Ok(SignalSpec::Named(NamedState::XMinus)),
            "z+" => return Ok(SignalSpec::Named(NamedState::ZPlus)),
            "z-" => return Ok(SignalSpec::Named(NamedState::ZMinus)),
            _ => {}
        }
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(theta), Ok(phi)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
                return Ok(SignalSpec::Bloch { theta, phi });
            }
        }
        Err(format!(
            "unknown signal `{s}` (expected y+/y-/x+/x-/z+/z- or `theta,phi` in radians)"
        ))
    }
}

impl SignalSpec {
    pub fn to_state(&self) -> Result<StateVector<f64>, SweepError> {
        match *self {
            SignalSpec::Named(NamedState::YPlus) => Ok(StateVector::y_plus()),
            SignalSpec::Named(NamedState::YMinus) => {
                Ok(
                    StateVector::normalized(vec![f64::cre(1.0), f64::c(0.0, -1.0)])
                        .expect("unit amplitudes"),
                )
            }
            SignalSpec::Named(NamedState::XPlus) => {
                Ok(StateVector::normalized(vec![f64::cre(1.0), f64::cre(1.0)])
                    .expect("unit amplitudes"))
            }
            SignalSpec::Named(NamedState::XMinus) => {
                Ok(StateVector::normalized(vec![f64::cre(1.0), f64::cre(-1.0)])
                    .expect("unit amplitudes"))
            }
            SignalSpec::Named(NamedState::ZPlus) => Ok(StateVector::ket0()),
            SignalSpec::Named(NamedState::ZMinus) => Ok(StateVector::ket1()),
            SignalSpec::Bloch { theta, phi } => {
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(SweepError::config("signal", "bloch angles must be finite"));
                }
                Ok(StateVector::bloch(theta, phi))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApparatusKind {
    Ideal,
    Spec,
}

/// Which beam splitters the chain is built from. `spec` starts from the
/// benchtop ratios of [`ApparatusSpec::typical`] and lets each station be
/// overridden as `[e_r, e_t]`; the overrides are invalid with `ideal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApparatusConfig {
    pub kind: ApparatusKind,
    pub wp: Option<(f64, f64)>,
    pub ma: Option<(f64, f64)>,
    pub post: Option<(f64, f64)>,
}

impl Default for ApparatusConfig {
    fn default() -> Self {
        Self {
            kind: ApparatusKind::Ideal,
            wp: None,
            ma: None,
            post: None,
        }
    }
}

impl ApparatusConfig {
    pub fn spec_with_defaults() -> Self {
        Self {
            kind: ApparatusKind::Spec,
            ..Self::default()
        }
    }

    /// None for the ideal chain, otherwise the resolved extinction ratios.
    pub fn resolve(&self) -> Result<Option<ApparatusSpec<f64>>, SweepError> {
        let ratios = |field: &str, v: Option<(f64, f64)>, dflt: PbsSpec<f64>| match v {
            None => Ok(dflt),
            Some((e_r, e_t)) => PbsSpec::new(e_r, e_t)
                .map_err(|e| SweepError::config(format!("apparatus.{field}"), e.to_string())),
        };
        match self.kind {
            ApparatusKind::Ideal => {
                for (field, v) in [("wp", self.wp), ("ma", self.ma), ("post", self.post)] {
                    if v.is_some() {
                        return Err(SweepError::config(
                            format!("apparatus.{field}"),
                            "extinction ratios require kind = \"spec\"",
                        ));
                    }
                }
                Ok(None)
            }
            ApparatusKind::Spec => {
                let typical = ApparatusSpec::typical();
                Ok(Some(ApparatusSpec {
                    wp_pbs: ratios("wp", self.wp, typical.wp_pbs)?,
                    ma_pbs: ratios("ma", self.ma, typical.ma_pbs)?,
                    post_pbs: ratios("post", self.post, typical.post_pbs)?,
                }))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatMode {
    Exact,
    MonteCarlo,
}

/// Exact probabilities or seeded multinomial counting. The counting fields
/// keep their defaults in `exact` mode and take effect only under
/// `monte_carlo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatisticsConfig {
    pub mode: StatMode,
    pub total: u64,
    pub reps: u32,
    pub seed: u64,
    pub norm: NormMode,
}

impl Default for StatisticsConfig {
    fn default() -> Self {
        Self {
            mode: StatMode::Exact,
            total: 1_000_000,
            reps: 10,
            seed: 0,
            norm: NormMode::GrandTotal,
        }
    }
}

impl StatisticsConfig {
    pub fn monte_carlo(total: u64, reps: u32, seed: u64) -> Self {
        Self {
            mode: StatMode::MonteCarlo,
            total,
            reps,
            seed,
            ..Self::default()
        }
    }
}

/// Full sweep description. An empty TOML document parses to the defaults:
/// 21 evenly spaced strengths, probe strength 0.104, the +1 eigenstate of
/// Y, ideal optics, exact statistics, all three methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub wp_strength: f64,
    pub signal: SignalSpec,
    pub apparatus: ApparatusConfig,
    pub statistics: StatisticsConfig,
    pub methods: Vec<Method>,
}

pub fn default_grid() -> Vec<f64> {
    (0..21).map(|i| i as f64 / 20.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            wp_strength: 0.104,
            signal: SignalSpec::default(),
            apparatus: ApparatusConfig::default(),
            statistics: StatisticsConfig::default(),
            methods: Method::ALL.to_vec(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        for (i, &s) in self.grid.iter().enumerate() {
            if !s.is_finite() || !(0.0..=1.0).contains(&s) {
                return Err(SweepError::config(
                    format!("grid[{i}]"),
                    format!("strength {s} outside [0, 1]"),
                ));
            }
        }
        if !self.wp_strength.is_finite() || self.wp_strength <= 0.0 || self.wp_strength > 1.0 {
            return Err(SweepError::config(
                "wp_strength",
                format!("{} outside (0, 1]", self.wp_strength),
            ));
        }
        if self.statistics.total == 0 {
            return Err(SweepError::config("statistics.total", "must be at least 1"));
        }
        if self.statistics.reps == 0 {
            return Err(SweepError::config("statistics.reps", "must be at least 1"));
        }
        self.signal.to_state()?;
        self.apparatus.resolve()?;
        Ok(())
    }
}

/// Parses a TOML document into a validated config (defaults filled,
/// unknown keys rejected).
pub fn parse_config(toml_text: &str) -> Result<SweepConfig, SweepError> {
    let cfg: SweepConfig =
        toml::from_str(toml_text).map_err(|e| SweepError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a config back to TOML; `parse_config` of the result
/// reproduces the identical config.
pub fn emit_config(cfg: &SweepConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}

/// One output row: sampled or exact error/disturbance at one strength under
/// one method, with the uncertainty-relation left-hand sides and their
/// verdicts against the commutator bound. Error bars are the RMS spread
/// over repetitions and are absent for exact statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRow {
    pub method: Method,
    pub strength: f64,
    pub eps: f64,
    pub eta: f64,
    pub eps_err: Option<f64>,
    pub eta_err: Option<f64>,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub c_bound: f64,
    pub lhs_heisenberg: f64,
    pub lhs_ozawa: f64,
    pub lhs_branciard: f64,
    pub lhs_branciard_tight: f64,
    pub heisenberg_ok: bool,
    pub ozawa_ok: bool,
    pub branciard_ok: bool,
    pub branciard_tight_ok: bool,
}

impl FigureRow {
    fn from_report(report: &EdrReport<f64>, eps_err: Option<f64>, eta_err: Option<f64>) -> Self {
        let p = report.point;
        FigureRow {
            method: p.method,
            strength: p.strength,
            eps: p.eps,
            eta: p.eta,
            eps_err,
            eta_err,
            sigma_a: p.sigma_a,
            sigma_b: p.sigma_b,
            c_bound: p.c_bound,
            lhs_heisenberg: report.lhs_heisenberg,
            lhs_ozawa: report.lhs_ozawa,
            lhs_branciard: report.lhs_branciard,
            lhs_branciard_tight: report.lhs_branciard_tight,
            heisenberg_ok: report.heisenberg_ok,
            ozawa_ok: report.ozawa_ok,
            branciard_ok: report.branciard_ok,
            branciard_tight_ok: report.branciard_tight_ok,
        }
    }
}

/// Prebuilt per-sweep machinery: signal, probe stages and their channel
/// outputs, post readout.
struct SweepFixture {
    psi: StateVector<f64>,
    apparatus: Option<ApparatusSpec<f64>>,
    post: PovmSet<f64>,
    wp_z: MeasurementStage<f64>,
    wp_x: MeasurementStage<f64>,
    /// Signal after the non-selective probe channel, per probe basis; the
    /// state that actually enters the main apparatus in each chain.
    rho_after_wp_z: DensityMatrix<f64>,
    rho_after_wp_x: DensityMatrix<f64>,
}

fn wp_theta(strength: f64) -> f64 {
    0.5 * strength.acos()
}

impl SweepFixture {
    fn build(cfg: &SweepConfig) -> Result<Self, SweepError> {
        let psi = cfg.signal.to_state()?;
        let apparatus = cfg.apparatus.resolve()?;
        let g = cfg.wp_strength;
        let (wp_z, wp_x, post) = match &apparatus {
            None => (
                MeasurementStage::from_strength(g, Basis::Z)?,
                MeasurementStage::from_strength(g, Basis::X)?,
                x_projective_povm(),
            ),
            Some(a) => (
                imperfect_stage(wp_theta(g), Basis::Z, &a.wp_pbs)?,
                imperfect_stage(wp_theta(g), Basis::X, &a.wp_pbs)?,
                pbs_readout_povm(Basis::X, &a.post_pbs)?,
            ),
        };
        let rho_after_wp_z = apply_channel(wp_z.kraus(), &psi.to_density())?;
        let rho_after_wp_x = apply_channel(wp_x.kraus(), &psi.to_density())?;
        Ok(Self {
            psi,
            apparatus,
            post,
            wp_z,
            wp_x,
            rho_after_wp_z,
            rho_after_wp_x,
        })
    }

    fn ma_stage(&self, strength: f64) -> Result<MeasurementStage<f64>, SweepError> {
        Ok(match &self.apparatus {
            None => MeasurementStage::from_strength(strength, Basis::Z)?,
            Some(a) => imperfect_stage(wp_theta(strength), Basis::Z, &a.ma_pbs)?,
        })
    }
}

/// Runs the configured sweep. One row per grid point per requested method,
/// ordered by (strength, method); Monte Carlo sub-streams are keyed by
/// (seed, grid index, repetition), so the output is deterministic and
/// independent of evaluation order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<FigureRow>, SweepError> {
    cfg.validate()?;
    let fixture = SweepFixture::build(cfg)?;
    let methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| cfg.methods.contains(m))
        .collect();

    let mut rows = Vec::with_capacity(cfg.grid.len() * methods.len());
    for (grid_index, &strength) in cfg.grid.iter().enumerate() {
        let ma = fixture.ma_stage(strength)?;
        for &method in &methods {
            rows.push(point_row(cfg, &fixture, &ma, strength, grid_index, method)?);
        }
    }
    rows.sort_by(|a, b| {
        a.strength
            .partial_cmp(&b.strength)
            .expect("validated finite strengths")
            .then(a.method.cmp(&b.method))
    });
    Ok(rows)
}

/// Samples the raw eight-way counts behind a Monte Carlo sweep, one record
/// per (grid point, repetition), grid-major, for the chain whose probe reads
/// the given basis. Sub-stream seeds match `run_sweep`: the Z-probe record of
/// repetition r at grid index i is exactly the table behind that sweep row's
/// error estimate, and the X-probe record the one behind its disturbance.
pub fn sample_sweep_counts(
    cfg: &SweepConfig,
    probe_basis: Basis,
) -> Result<Vec<CountsRecord<f64>>, SweepError> {
    cfg.validate()?;
    let fixture = SweepFixture::build(cfg)?;
    let (wp, chain_tag) = match probe_basis {
        Basis::Z => (&fixture.wp_z, 0),
        Basis::X => (&fixture.wp_x, 1),
    };
    let stats = &cfg.statistics;
    let mut records = Vec::with_capacity(cfg.grid.len() * stats.reps as usize);
    for (grid_index, &strength) in cfg.grid.iter().enumerate() {
        let chain = ChainConfig::with_post(
            fixture.psi.clone(),
            wp.clone(),
            fixture.ma_stage(strength)?,
            fixture.post.clone(),
        )?;
        let p = chain_distribution(&chain)?;
        let point_seed = derive_seed(stats.seed, &[grid_index as u64]);
        let settings = ChainSettings {
            wp_strength: cfg.wp_strength,
            ma_strength: strength,
            wp_basis: probe_basis,
        };
        for rep in 0..stats.reps {
            records.push(sample_counts(
                &p,
                stats.total,
                derive_seed(point_seed, &[rep as u64, chain_tag]),
                settings,
            )?);
        }
    }
    Ok(records)
}

fn point_row(
    cfg: &SweepConfig,
    fixture: &SweepFixture,
    ma: &MeasurementStage<f64>,
    strength: f64,
    grid_index: usize,
    method: Method,
) -> Result<FigureRow, SweepError> {
    let z = ops::pauli_z::<f64>();
    let x = ops::pauli_x::<f64>();
    let psi = &fixture.psi;

    match method {
        Method::Direct | Method::ThreeState => {
            // judged in the prepared state: the probe never runs
            let sigma_a = std_dev(&z, psi)?;
            let sigma_b = std_dev(&x, psi)?;
            let c_bound = commutator_bound(&z, &x, psi)?;
            let (eps, eta) = match method {
                Method::Direct => (direct_error(ma, psi)?, direct_disturbance(ma, psi)?),
                _ => (
                    three_state_error(ma, psi)?,
                    three_state_disturbance(ma, &fixture.post, psi)?,
                ),
            };
            let report = edr_report(EdrPoint::new(
                strength, eps, eta, sigma_a, sigma_b, c_bound, method,
            )?)?;
            Ok(FigureRow::from_report(&report, None, None))
        }
        Method::WeakProbe => {
            // judged in the state entering the main apparatus, after the
            // non-selective probe channel; both probe bases shrink the
            // commutator bound identically, so it is read off the Z chain
            let sigma_a = std_dev(&z, &fixture.rho_after_wp_z)?;
            let sigma_b = std_dev(&x, &fixture.rho_after_wp_x)?;
            let c_bound = commutator_bound(&z, &x, &fixture.rho_after_wp_z)?;
            let error_chain = ChainConfig::with_post(
                psi.clone(),
                fixture.wp_z.clone(),
                ma.clone(),
                fixture.post.clone(),
            )?;
            let disturbance_chain = ChainConfig::with_post(
                psi.clone(),
                fixture.wp_x.clone(),
                ma.clone(),
                fixture.post.clone(),
            )?;
            let g = cfg.wp_strength;
            match cfg.statistics.mode {
                StatMode::Exact => {
                    let table_e =
                        marginal_joint(&chain_distribution(&error_chain)?, MarginalPair::WpMa);
                    let table_d = marginal_joint(
                        &chain_distribution(&disturbance_chain)?,
                        MarginalPair::WpPost,
                    );
                    let eps = weak_probe_error(&table_e, g)?;
                    let eta = weak_probe_disturbance(&table_d, g)?;
                    let report = edr_report(EdrPoint::new(
                        strength, eps, eta, sigma_a, sigma_b, c_bound, method,
                    )?)?;
                    Ok(FigureRow::from_report(&report, None, None))
                }
                StatMode::MonteCarlo => {
                    let stats = run_repetitions(
                        &error_chain,
                        &disturbance_chain,
                        g,
                        cfg.statistics.total,
                        cfg.statistics.reps,
                        derive_seed(cfg.statistics.seed, &[grid_index as u64]),
                        cfg.statistics.norm,
                        PointContext {
                            strength,
                            sigma_a,
                            sigma_b,
                            c_bound,
                        },
                    )?;
                    let report = edr_report(EdrPoint::new(
                        strength,
                        stats.mean_eps,
                        stats.mean_eta,
                        sigma_a,
                        sigma_b,
                        c_bound,
                        method,
                    )?)?;
                    Ok(FigureRow::from_report(
                        &report,
                        stats.spread_eps,
                        stats.spread_eta,
                    ))
                }
            }
        }
    }
}

/// One row of a lower-bound curve; `min_eta` is absent where the bound is
/// infinite (Heisenberg at eps = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub kind: BoundKind,
    pub c: f64,
    pub eps: f64,
    pub min_eta: Option<f64>,
}

/// Tabulates the minimal disturbance permitted by one relation over an
/// error grid at unit marginal deviations.
pub fn emit_bounds_curve(
    kind: BoundKind,
    c: f64,
    eps_grid: &[f64],
) -> Result<Vec<BoundsRow>, SweepError> {
    if !c.is_finite() || !(0.0..=1.0).contains(&c) {
        return Err(SweepError::config("c", format!("{c} outside [0, 1]")));
    }
    let mut rows = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        if !eps.is_finite() || !(0.0..=2.0).contains(&eps) {
            return Err(SweepError::config(
                format!("eps_grid[{i}]"),
                format!("error value {eps} outside [0, 2]"),
            ));
        }
        let bound = min_disturbance_bound(kind, eps, 1.0, 1.0, c)?;
        rows.push(BoundsRow {
            kind,
            c,
            eps,
            min_eta: bound.is_finite().then_some(bound),
        });
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str = "method,strength,eps,eta,eps_err,eta_err,sigma_a,sigma_b,\
c_bound,lhs_heisenberg,lhs_ozawa,lhs_branciard,lhs_branciard_tight,heisenberg_ok,ozawa_ok,\
branciard_ok,branciard_tight_ok";

pub const BOUNDS_CSV_HEADER: &str = "kind,c,eps,min_eta";

fn push_opt(out: &mut String, v: Option<f64>) {
    out.push(',');
    if let Some(v) = v {
        out.push_str(&v.to_string());
    }
}

/// CSV with the fixed sweep header; absent error bars render as empty
/// cells, verdicts as true/false. Rows are newline-terminated.
pub fn sweep_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(r.method.as_str());
        for v in [r.strength, r.eps, r.eta] {
            out.push(',');
            out.push_str(&v.to_string());
        }
        push_opt(&mut out, r.eps_err);
        push_opt(&mut out, r.eta_err);
        for v in [
            r.sigma_a,
            r.sigma_b,
            r.c_bound,
            r.lhs_heisenberg,
            r.lhs_ozawa,
            r.lhs_branciard,
            r.lhs_branciard_tight,
        ] {
            out.push(',');
            out.push_str(&v.to_string());
        }
        for b in [
            r.heisenberg_ok,
            r.ozawa_ok,
            r.branciard_ok,
            r.branciard_tight_ok,
        ] {
            out.push(',');
            out.push_str(if b { "true" } else { "false" });
        }
        out.push('\n');
    }
    out
}

/// CSV for bound curves; an infinite bound renders as an empty cell.
pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from(BOUNDS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(r.kind.as_str());
        out.push(',');
        out.push_str(&r.c.to_string());
        out.push(',');
        out.push_str(&r.eps.to_string());
        push_opt(&mut out, r.min_eta);
        out.push('\n');
    }
    out
}
