//! Monte Carlo orchestration: ergodic averages over independent channel
//! draws, sweeps along one axis, log-scale regression, rate regions and
//! CSV output.
//!
//! Trial `t` of every point always uses channel substream `(seed, t)`, so a
//! result depends only on its inputs and never on how trials were scheduled
//! across threads.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::capacity::{
    broadcast_cut_bound, mac_cut_bound, noncoherent_mac_bound, BoundPair, CapacityError,
};
use crate::channel::{sample_realization, ConfigError, Purpose, RngStream, SystemConfig};
use crate::strategies::{
    dcm_effective_link, dcm_rate, equal_power_allocation, nc_af_effective_link, nc_af_rate,
    Direction, RatePair, StrategyError,
};

/// Exact CSV header.
pub const CSV_HEADER: &str =
    "axis,axis_value,metric,direction,mean_bits,stderr_bits,trials,M,N,K,P,P_R,sigma2,alpha,seed";

/// Header of the companion file holding scaling fits.
pub const FIT_CSV_HEADER: &str = "metric,direction,slope_bits_per_doubling,intercept_bits,r_squared";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("sweep needs at least one axis value")]
    EmptyAxis,
    #[error("axis values must be strictly ascending ({prev} then {next})")]
    NotAscending { prev: f64, next: f64 },
    #[error("invalid value {value} for axis {axis}")]
    BadAxisValue { axis: Axis, value: f64 },
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("scaling fit needs at least 2 points with positive abscissa (got {0})")]
    TooFewPoints(usize),
    #[error("unknown {what} {value:?}")]
    Unknown { what: &'static str, value: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<CapacityError> for HarnessError {
    fn from(e: CapacityError) -> Self {
        HarnessError::Strategy(e.into())
    }
}

/// Quantities a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    /// Broadcast cut.
    UbBroadcast,
    /// Multiple-access cut.
    UbMac,
    /// Minimum of both cuts.
    UbCoherent,
    /// Dual channel matching rate.
    Dcm,
    /// Non-coherent multiple-access bound.
    NcUb,
    /// Normalize-and-forward rate.
    NcAf,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::UbBroadcast,
        Metric::UbMac,
        Metric::UbCoherent,
        Metric::Dcm,
        Metric::NcUb,
        Metric::NcAf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::UbBroadcast => "ub_bc",
            Metric::UbMac => "ub_mac",
            Metric::UbCoherent => "ub_coherent",
            Metric::Dcm => "dcm",
            Metric::NcUb => "nc_ub",
            Metric::NcAf => "nc_af",
        }
    }

    /// Whether the metric only exists for the half-slot split.
    pub fn requires_half_slot(self) -> bool {
        matches!(self, Metric::NcUb | Metric::NcAf)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| HarnessError::Unknown {
                what: "metric",
                value: s.to_string(),
            })
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    RelayCount,
    RelayPower,
    Alpha,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::RelayCount => "relay_count",
            Axis::RelayPower => "relay_power",
            Axis::Alpha => "alpha",
        }
    }

    pub fn value_of(self, cfg: &SystemConfig) -> f64 {
        match self {
            Axis::RelayCount => cfg.relays as f64,
            Axis::RelayPower => cfg.relay_power,
            Axis::Alpha => cfg.alpha,
        }
    }

    /// `base` with this axis set to `value`. With `couple_terminal_power`,
    /// a relay-power point also sets `P = P_R`.
    pub fn apply(
        self,
        base: &SystemConfig,
        value: f64,
        couple_terminal_power: bool,
    ) -> Result<SystemConfig, HarnessError> {
        let mut cfg = *base;
        match self {
            Axis::RelayCount => {
                if !(value >= 1.0 && value.fract() == 0.0 && value.is_finite()) {
                    return Err(HarnessError::BadAxisValue { axis: self, value });
                }
                cfg.relays = value as usize;
            }
            Axis::RelayPower => {
                cfg.relay_power = value;
                if couple_terminal_power {
                    cfg.terminal_power = value;
                }
            }
            Axis::Alpha => cfg.alpha = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sweep along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub metrics: Vec<Metric>,
    /// Relay-power sweeps only: keep `P = P_R` at every point.
    pub couple_terminal_power: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.axis_values.is_empty() {
            return Err(HarnessError::EmptyAxis);
        }
        if self.trials == 0 {
            return Err(HarnessError::ZeroTrials);
        }
        for w in self.axis_values.windows(2) {
            if w[1].is_nan() || w[1] <= w[0] {
                return Err(HarnessError::NotAscending { prev: w[0], next: w[1] });
            }
        }
        for &v in &self.axis_values {
            check_point(&self.axis.apply(&self.base, v, self.couple_terminal_power)?, &self.metrics)?;
        }
        Ok(())
    }
}

/// Aggregate of one metric in one direction at one axis point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: Axis,
    pub axis_value: f64,
    pub metric: Metric,
    pub direction: Direction,
    pub mean_bits: f64,
    pub stderr_bits: f64,
    pub trials: u64,
    pub config: SystemConfig,
    pub seed: u64,
}

/// Least-squares fit of rate against log₂ of the axis value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope_bits_per_doubling: f64,
    pub intercept_bits: f64,
    pub r_squared: f64,
}

/// A fit tagged with the series it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub metric: Metric,
    pub direction: Direction,
    pub fit: ScalingFit,
}

/// Per-trial values for a set of metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSamples {
    pub metrics: Vec<Metric>,
    /// `values[t][i]` is metric `metrics[i]` at trial `t`.
    pub values: Vec<Vec<RatePair>>,
}

impl TrialSamples {
    pub fn series(&self, metric: Metric, dir: Direction) -> Vec<f64> {
        let Some(i) = self.metrics.iter().position(|&m| m == metric) else {
            return Vec::new();
        };
        self.values.iter().map(|row| row[i].get(dir)).collect()
    }

    pub fn append(&mut self, other: TrialSamples) {
        debug_assert_eq!(self.metrics, other.metrics);
        self.values.extend(other.values);
    }
}

/// Sorted, de-duplicated metric list in reporting order.
pub fn canonical_metrics(metrics: &[Metric]) -> Vec<Metric> {
    let mut m = metrics.to_vec();
    m.sort();
    m.dedup();
    m
}

fn check_point(cfg: &SystemConfig, metrics: &[Metric]) -> Result<(), HarnessError> {
    cfg.validate()?;
    if metrics.iter().any(|m| m.requires_half_slot()) && (cfg.alpha - 0.5).abs() > 1e-12 {
        return Err(CapacityError::UnsupportedAlpha(cfg.alpha).into());
    }
    Ok(())
}

fn pair_of(b: BoundPair) -> RatePair {
    RatePair::new(b.r12_bits, b.r21_bits)
}

/// Evaluates the requested metrics on trial `trial`'s channel draw.
pub fn evaluate_trial(
    cfg: &SystemConfig,
    seed: u64,
    trial: u64,
    metrics: &[Metric],
) -> Result<Vec<RatePair>, HarnessError> {
    let real = sample_realization(cfg, RngStream::new(seed, trial, Purpose::Channel));
    let alloc = equal_power_allocation(cfg);
    let wants = |m: Metric| metrics.contains(&m);

    let needs_cuts = wants(Metric::UbBroadcast) || wants(Metric::UbMac) || wants(Metric::UbCoherent);
    let cuts = if needs_cuts {
        Some((broadcast_cut_bound(&real, cfg)?, mac_cut_bound(&real, cfg)?))
    } else {
        None
    };

    metrics
        .iter()
        .map(|&metric| {
            Ok(match metric {
                Metric::UbBroadcast => pair_of(cuts.expect("cuts computed").0),
                Metric::UbMac => pair_of(cuts.expect("cuts computed").1),
                Metric::UbCoherent => {
                    let (bc, mac) = cuts.expect("cuts computed");
                    pair_of(bc.min(mac))
                }
                Metric::Dcm => {
                    let l12 = dcm_effective_link(&real, cfg, &alloc, Direction::T1ToT2)?;
                    let l21 = dcm_effective_link(&real, cfg, &alloc, Direction::T2ToT1)?;
                    dcm_rate(&l12, &l21, cfg)?
                }
                Metric::NcUb => pair_of(noncoherent_mac_bound(&real, cfg)?),
                Metric::NcAf => {
                    let l12 = nc_af_effective_link(&real, cfg, &alloc, Direction::T1ToT2)?;
                    let l21 = nc_af_effective_link(&real, cfg, &alloc, Direction::T2ToT1)?;
                    nc_af_rate(&l12, &l21, cfg)?
                }
            })
        })
        .collect()
}

/// Runs trials `range` in parallel on the current rayon pool; results are
/// returned in trial order.
pub fn run_trials(
    cfg: &SystemConfig,
    range: Range<u64>,
    seed: u64,
    metrics: &[Metric],
) -> Result<TrialSamples, HarnessError> {
    let metrics = canonical_metrics(metrics);
    check_point(cfg, &metrics)?;
    let values = range
        .into_par_iter()
        .map(|t| evaluate_trial(cfg, seed, t, &metrics))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrialSamples { metrics, values })
}

/// Mean and standard error (sample standard deviation / √n).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Turns per-trial samples into rows ordered by (metric, direction).
pub fn aggregate(
    samples: &TrialSamples,
    cfg: &SystemConfig,
    axis: Axis,
    seed: u64,
) -> Vec<SweepRow> {
    let trials = samples.values.len() as u64;
    let mut rows = Vec::with_capacity(samples.metrics.len() * 2);
    for &metric in &samples.metrics {
        for direction in Direction::BOTH {
            let (mean, stderr) = mean_stderr(&samples.series(metric, direction));
            rows.push(SweepRow {
                axis,
                axis_value: axis.value_of(cfg),
                metric,
                direction,
                mean_bits: mean,
                stderr_bits: stderr,
                trials,
                config: *cfg,
                seed,
            });
        }
    }
    rows
}

/// Ergodic means of `metrics` at one configuration over trials `0..trials`.
pub fn run_point(
    cfg: &SystemConfig,
    axis: Axis,
    trials: u64,
    seed: u64,
    metrics: &[Metric],
) -> Result<Vec<SweepRow>, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::ZeroTrials);
    }
    let samples = run_trials(cfg, 0..trials, seed, metrics)?;
    Ok(aggregate(&samples, cfg, axis, seed))
}

/// `run_point` at every axis value, rows concatenated in axis order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, HarnessError> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &value in &spec.axis_values {
        let cfg = spec.axis.apply(&spec.base, value, spec.couple_terminal_power)?;
        rows.extend(run_point(&cfg, spec.axis, spec.trials, spec.seed, &spec.metrics)?);
    }
    Ok(rows)
}

/// Ordinary least squares of `mean_bits` on `log₂(axis_value)`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit, HarnessError> {
    if points.len() < 2 || points.iter().any(|&(x, _)| x.is_nan() || x <= 0.0) {
        return Err(HarnessError::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::TooFewPoints(1));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(ScalingFit {
        slope_bits_per_doubling: slope,
        intercept_bits: intercept,
        r_squared,
    })
}

/// `(axis_value, mean_bits)` points of one series, in row order.
pub fn series_points(rows: &[SweepRow], metric: Metric, dir: Direction) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.metric == metric && r.direction == dir)
        .map(|r| (r.axis_value, r.mean_bits))
        .collect()
}

/// Fits every (metric, direction) series present in `rows`.
pub fn fit_all(rows: &[SweepRow]) -> Result<Vec<FitRow>, HarnessError> {
    let mut keys: Vec<(Metric, Direction)> = rows.iter().map(|r| (r.metric, r.direction)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(metric, direction)| {
            Ok(FitRow {
                metric,
                direction,
                fit: fit_scaling(&series_points(rows, metric, direction))?,
            })
        })
        .collect()
}

/// Rate region spanned by one simultaneously achievable pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    /// Corner points, counter-clockwise from the origin; coincident corners
    /// are merged, so a zero pair yields a single vertex.
    pub vertices: Vec<(f64, f64)>,
}

impl RateRegion {
    /// Largest `(r12, r21)` in the region.
    pub fn corner(&self) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((0.0, 0.0), |acc, &(a, b)| (acc.0.max(a), acc.1.max(b)))
    }

    /// Corner-wise containment in another rectangle region.
    pub fn is_within(&self, outer: &RateRegion) -> bool {
        let (a, b) = self.corner();
        let (oa, ob) = outer.corner();
        a <= oa && b <= ob
    }
}

pub fn rate_region(pair: RatePair) -> RateRegion {
    let (a, b) = (pair.r12_bits.max(0.0), pair.r21_bits.max(0.0));
    let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(4);
    for v in [(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)] {
        if vertices.last() != Some(&v) && !(vertices.len() > 1 && vertices[0] == v) {
            vertices.push(v);
        }
    }
    RateRegion { vertices }
}

/// C-style `%.9g`: nine significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e9)`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The CSV text for `rows`, header included.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let c = &r.config;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.axis,
            format_sig9(r.axis_value),
            r.metric,
            r.direction,
            format_sig9(r.mean_bits),
            format_sig9(r.stderr_bits),
            r.trials,
            c.terminal_antennas,
            c.relay_antennas,
            c.relays,
            format_sig9(c.terminal_power),
            format_sig9(c.relay_power),
            format_sig9(c.noise_variance),
            format_sig9(c.alpha),
            r.seed,
        );
    }
    out
}

pub fn render_fit_csv(fits: &[FitRow]) -> String {
    let mut out = String::from(FIT_CSV_HEADER);
    out.push('\n');
    for f in fits {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            f.metric,
            f.direction,
            format_sig9(f.fit.slope_bits_per_doubling),
            format_sig9(f.fit.intercept_bits),
            format_sig9(f.fit.r_squared),
        );
    }
    out
}

/// Companion path for fits: `out.csv` → `out.fit.csv`.
pub fn fit_csv_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.fit.csv"))
}

/// Writes `rows` to `path`; fits, when given, go to [`fit_csv_path`].
pub fn emit_csv(rows: &[SweepRow], fits: Option<&[FitRow]>, path: &Path) -> Result<(), HarnessError> {
    let write = |p: &Path, text: String| {
        fs::write(p, text).map_err(|source| HarnessError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    write(path, render_csv(rows))?;
    if let Some(fits) = fits {
        write(&fit_csv_path(path), render_fit_csv(fits))?;
    }
    Ok(())
}
