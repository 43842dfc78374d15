//! Achievable rates for the two amplify-and-forward relay strategies.
//!
//! * Dual channel matching (coherent relays): relay k applies
//!   `W_k = G_k* H_k* + H_k^(r)* G_k^(r)*`, normalized by `√β_k`.
//! * Normalize-and-forward (non-coherent relays): relay k scales its
//!   received signal by the ensemble-average receive power.
//!
//! In both cases each terminal strips its own echoed signal exactly, which
//! leaves an equivalent M×M link `y = A x + noise` with Hermitian noise
//! covariance. [`simulate_slot`] replays one slot at signal level and
//! checks that reduction numerically.

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::capacity::{mimo_mutual_information, CapacityError};
use crate::channel::{complex_normal, ChannelRealization, RelayChannels, RngStream, SystemConfig};
use crate::matcore::{CMatrix, MatError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("relay {relay}: normalization constant must be positive (got {value})")]
    DegenerateNormalization { relay: usize, value: f64 },
    #[error("power allocation uses {total} but the budget is {budget}")]
    OverBudget { total: f64, budget: f64 },
    #[error("power allocation has {got} entries for {expected} relays")]
    AllocationLength { got: usize, expected: usize },
    #[error("relay power {0} is negative or not finite")]
    BadRelayPower(f64),
}

impl From<MatError> for StrategyError {
    fn from(e: MatError) -> Self {
        StrategyError::Capacity(e.into())
    }
}

/// Transmit direction through the relays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    T1ToT2,
    T2ToT1,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::T1ToT2, Direction::T2ToT1];

    pub fn label(self) -> &'static str {
        match self {
            Direction::T1ToT2 => "12",
            Direction::T2ToT1 => "21",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Relay processing rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Coherent dual channel matching.
    DualChannelMatching,
    /// Non-coherent normalize-and-forward.
    NormalizeForward,
}

/// Per-relay transmit powers γ_k.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    gamma: Vec<f64>,
}

impl PowerAllocation {
    /// Checks non-negativity and `Σ γ_k ≤ budget` (1e-9 relative slack).
    pub fn new(gamma: Vec<f64>, budget: f64) -> Result<Self, StrategyError> {
        if let Some(&bad) = gamma.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(StrategyError::BadRelayPower(bad));
        }
        let total: f64 = gamma.iter().sum();
        if total > budget * (1.0 + 1e-9) {
            return Err(StrategyError::OverBudget { total, budget });
        }
        Ok(Self { gamma })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// Every γ_k multiplied by `factor` (no budget check).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            gamma: self.gamma.iter().map(|g| g * factor).collect(),
        }
    }

    fn check_len(&self, relays: usize) -> Result<(), StrategyError> {
        if self.gamma.len() != relays {
            return Err(StrategyError::AllocationLength {
                got: self.gamma.len(),
                expected: relays,
            });
        }
        Ok(())
    }
}

/// `γ_k = P_R / K` for every relay.
pub fn equal_power_allocation(cfg: &SystemConfig) -> PowerAllocation {
    let k = cfg.relays.max(1);
    PowerAllocation {
        gamma: vec![cfg.relay_power / k as f64; k],
    }
}

/// Equivalent point-to-point link after self-interference cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLink {
    /// M×M effective channel.
    pub signal: CMatrix,
    /// M×M noise covariance, Hermitian positive definite.
    pub noise_cov: CMatrix,
}

/// Simultaneously achievable rates, bits per full-slot channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePair {
    pub r12_bits: f64,
    pub r21_bits: f64,
}

impl RatePair {
    pub fn new(r12_bits: f64, r21_bits: f64) -> Self {
        Self { r12_bits, r21_bits }
    }

    pub fn get(&self, dir: Direction) -> f64 {
        match dir {
            Direction::T1ToT2 => self.r12_bits,
            Direction::T2ToT1 => self.r21_bits,
        }
    }
}

/// `W_k = G_k* H_k* + H_k^(r)* G_k^(r)*`, N×N. `relay` is zero-based.
pub fn dcm_weight(real: &ChannelRealization, relay: usize) -> CMatrix {
    weight_of(&real.relays()[relay])
}

fn weight_of(r: &RelayChannels) -> CMatrix {
    let a = r.to_t2.adjoint().matmul(&r.from_t1.adjoint()).expect("N×M · M×N");
    let b = r.to_t1.adjoint().matmul(&r.from_t2.adjoint()).expect("N×M · M×N");
    a.add(&b).expect("both N×N")
}

/// Receive covariance at a relay conditioned on its channels:
/// `(P E/M) H H* + (P F/M) G^(r) G^(r)* + σ² I_N`.
fn relay_receive_cov(r: &RelayChannels, cfg: &SystemConfig, m: usize) -> CMatrix {
    let mut cov = CMatrix::identity(r.from_t1.rows()).scale(cfg.noise_variance);
    let scale = cfg.terminal_power / m as f64;
    cov.add_scaled(&r.from_t1.gram(), scale * r.gain_from_t1)
        .expect("N×N");
    cov.add_scaled(&r.from_t2.gram(), scale * r.gain_from_t2)
        .expect("N×N");
    cov
}

fn normalization_of(
    r: &RelayChannels,
    w: &CMatrix,
    cfg: &SystemConfig,
    m: usize,
    relay: usize,
) -> Result<f64, StrategyError> {
    let cov = relay_receive_cov(r, cfg, m);
    let beta = w.matmul(&cov)?.mul_adjoint(w)?.trace().re;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(StrategyError::DegenerateNormalization { relay, value: beta });
    }
    Ok(beta)
}

/// `β_k = tr(W_k R_k W_k*)`, so that `E{t_k* t_k} = 1` given the channels.
pub fn dcm_normalization(
    real: &ChannelRealization,
    cfg: &SystemConfig,
    relay: usize,
) -> Result<f64, StrategyError> {
    let r = &real.relays()[relay];
    normalization_of(r, &weight_of(r), cfg, real.terminal_antennas(), relay)
}

/// Channels seen in one direction: (source → relay, relay → destination,
/// source gain, destination gain).
fn oriented(r: &RelayChannels, dir: Direction) -> (&CMatrix, &CMatrix, f64, f64) {
    match dir {
        Direction::T1ToT2 => (&r.from_t1, &r.to_t2, r.gain_from_t1, r.gain_to_t2),
        Direction::T2ToT1 => (&r.from_t2, &r.to_t1, r.gain_from_t2, r.gain_to_t1),
    }
}

/// Effective link under dual channel matching, after the destination
/// removes its own signal.
pub fn dcm_effective_link(
    real: &ChannelRealization,
    cfg: &SystemConfig,
    alloc: &PowerAllocation,
    dir: Direction,
) -> Result<EffectiveLink, StrategyError> {
    alloc.check_len(real.relay_count())?;
    let m = real.terminal_antennas();
    let mut signal = CMatrix::zeros(m, m);
    let mut noise = CMatrix::identity(m).scale(cfg.noise_variance);
    for (k, (r, &gamma)) in real.relays().iter().zip(alloc.as_slice()).enumerate() {
        let w = weight_of(r);
        let beta = normalization_of(r, &w, cfg, m, k)?;
        let (inbound, outbound, src_gain, dst_gain) = oriented(r, dir);
        let out_w = outbound.matmul(&w)?;
        let amp = (gamma * dst_gain * cfg.terminal_power * src_gain / (m as f64 * beta)).sqrt();
        signal.add_scaled(&out_w.matmul(inbound)?, amp)?;
        noise.add_scaled(&out_w.gram(), gamma * dst_gain * cfg.noise_variance / beta)?;
    }
    Ok(EffectiveLink { signal, noise_cov: noise })
}

/// Both directions' DCM rates with white unit-power inputs (`Q_x = I_M`)
/// and the fixed half-slot split.
pub fn dcm_rate(
    link12: &EffectiveLink,
    link21: &EffectiveLink,
    _cfg: &SystemConfig,
) -> Result<RatePair, StrategyError> {
    let m = link12.signal.cols();
    let qx = CMatrix::identity(m);
    Ok(RatePair {
        r12_bits: 0.5 * mimo_mutual_information(&link12.signal, &qx, &link12.noise_cov)?,
        r21_bits: 0.5 * mimo_mutual_information(&link21.signal, &qx, &link21.noise_cov)?,
    })
}

/// `c_k = γ_k g_k / (N (P (E_k + F_k) + σ²))` where `g_k` is the relay's
/// gain toward the destination.
fn nc_scale(r: &RelayChannels, cfg: &SystemConfig, n: usize, gamma: f64, dst_gain: f64) -> f64 {
    let avg_rx = n as f64 * (cfg.terminal_power * (r.gain_from_t1 + r.gain_from_t2) + cfg.noise_variance);
    gamma * dst_gain / avg_rx
}

/// Effective link under normalize-and-forward.
pub fn nc_af_effective_link(
    real: &ChannelRealization,
    cfg: &SystemConfig,
    alloc: &PowerAllocation,
    dir: Direction,
) -> Result<EffectiveLink, StrategyError> {
    alloc.check_len(real.relay_count())?;
    let m = real.terminal_antennas();
    let n = real.relay_antennas();
    let mut signal = CMatrix::zeros(m, m);
    let mut noise = CMatrix::identity(m).scale(cfg.noise_variance);
    for (r, &gamma) in real.relays().iter().zip(alloc.as_slice()) {
        let (inbound, outbound, src_gain, dst_gain) = oriented(r, dir);
        let c = nc_scale(r, cfg, n, gamma, dst_gain);
        let amp = (c * cfg.terminal_power * src_gain / m as f64).sqrt();
        signal.add_scaled(&outbound.matmul(inbound)?, amp)?;
        noise.add_scaled(&outbound.gram(), c * cfg.noise_variance)?;
    }
    Ok(EffectiveLink { signal, noise_cov: noise })
}

/// Input covariance for the normalize-and-forward rate. Terminals send
/// unit power per antenna, which is what the `√(P/M)` channel scaling
/// already assumes.
pub fn nc_af_input_covariance(terminal_antennas: usize) -> CMatrix {
    CMatrix::identity(terminal_antennas)
}

/// Both directions' normalize-and-forward rates over a half slot.
pub fn nc_af_rate(
    link12: &EffectiveLink,
    link21: &EffectiveLink,
    _cfg: &SystemConfig,
) -> Result<RatePair, StrategyError> {
    let qx = nc_af_input_covariance(link12.signal.cols());
    Ok(RatePair {
        r12_bits: 0.5 * mimo_mutual_information(&link12.signal, &qx, &link12.noise_cov)?,
        r21_bits: 0.5 * mimo_mutual_information(&link21.signal, &qx, &link21.noise_cov)?,
    })
}

/// Signal-level record of one slot.
#[derive(Debug, Clone)]
pub struct SlotTranscript {
    pub strategy: Strategy,
    /// T1's transmitted symbols.
    pub x: Vec<Complex64>,
    /// T2's transmitted symbols.
    pub u: Vec<Complex64>,
    /// Relay receive vectors.
    pub relay_rx: Vec<Vec<Complex64>>,
    /// Relay transmit vectors before the √γ_k power scaling.
    pub relay_tx: Vec<Vec<Complex64>>,
    /// Received at T2.
    pub y: Vec<Complex64>,
    /// Received at T1.
    pub v: Vec<Complex64>,
    /// `y` after T2 subtracts its own echo.
    pub y_clean: Vec<Component>,
    /// `v` after T1 subtracts its own echo.
    pub v_clean: Vec<Component>,
    /// ‖(y − echo) − (A x + noise)‖ / ‖y‖ at T2.
    pub residual_12: f64,
    /// Same at T1.
    pub residual_21: f64,
}

/// One entry of a cleaned receive vector split into its useful signal and
/// aggregated noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub received: Complex64,
    pub signal: Complex64,
    pub noise: Complex64,
}

impl SlotTranscript {
    /// Empirical `t_k* t_k` per relay.
    pub fn relay_powers(&self) -> Vec<f64> {
        self.relay_tx.iter().map(|t| norm_sqr(t)).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_12.max(self.residual_21)
    }

    /// Plain-text sections for x, u, r_k, t_k, y, v and the residual norms.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# strategy {:?}", self.strategy);
        write_vec(&mut out, "x", &self.x);
        write_vec(&mut out, "u", &self.u);
        for (k, r) in self.relay_rx.iter().enumerate() {
            write_vec(&mut out, &format!("r_{}", k + 1), r);
        }
        for (k, t) in self.relay_tx.iter().enumerate() {
            write_vec(&mut out, &format!("t_{}", k + 1), t);
        }
        write_vec(&mut out, "y", &self.y);
        write_vec(&mut out, "v", &self.v);
        let _ = writeln!(out, "[residuals]");
        let _ = writeln!(out, "residual_12,{}", self.residual_12);
        let _ = writeln!(out, "residual_21,{}", self.residual_21);
        out
    }
}

fn write_vec(out: &mut String, name: &str, v: &[Complex64]) {
    let _ = writeln!(out, "[{name}]");
    for (i, z) in v.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", z.re, z.im);
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn axpy(acc: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (o, xi) in acc.iter_mut().zip(x) {
        *o += xi * a;
    }
}

/// Per-relay linear map applied to the received vector (before `√γ_k`).
fn relay_map(
    r: &RelayChannels,
    cfg: &SystemConfig,
    m: usize,
    n: usize,
    relay: usize,
    strategy: Strategy,
) -> Result<CMatrix, StrategyError> {
    Ok(match strategy {
        Strategy::DualChannelMatching => {
            let w = weight_of(r);
            let beta = normalization_of(r, &w, cfg, m, relay)?;
            w.scale(1.0 / beta.sqrt())
        }
        Strategy::NormalizeForward => {
            let avg_rx = n as f64
                * (cfg.terminal_power * (r.gain_from_t1 + r.gain_from_t2) + cfg.noise_variance);
            CMatrix::identity(n).scale(1.0 / avg_rx.sqrt())
        }
    })
}

/// Replays one slot: terminals transmit, relays process and forward, each
/// terminal subtracts its own echo using full CSI. The cleaned signal is
/// compared with `A x + noise` built from the effective-link formulas.
pub fn simulate_slot(
    real: &ChannelRealization,
    cfg: &SystemConfig,
    alloc: &PowerAllocation,
    strategy: Strategy,
    stream: RngStream,
) -> Result<SlotTranscript, StrategyError> {
    alloc.check_len(real.relay_count())?;
    let m = real.terminal_antennas();
    let n = real.relay_antennas();
    let sigma = cfg.noise_variance.sqrt();
    let mut rng = stream.rng();
    let mut draw = |len: usize, scale: f64| -> Vec<Complex64> {
        (0..len).map(|_| complex_normal(&mut rng) * scale).collect()
    };

    let x = draw(m, 1.0);
    let u = draw(m, 1.0);
    let relay_noise: Vec<Vec<Complex64>> = (0..real.relay_count()).map(|_| draw(n, sigma)).collect();
    let z = draw(m, sigma);
    let w = draw(m, sigma);

    let tx_amp = |gain: f64| (cfg.terminal_power * gain / m as f64).sqrt();
    let mut y = z.clone();
    let mut v = w.clone();
    // Echo (self-interference) and the noise forwarded by the relays, as
    // reconstructed by each terminal from CSI.
    let mut echo_y = vec![Complex64::new(0.0, 0.0); m];
    let mut echo_v = vec![Complex64::new(0.0, 0.0); m];
    let mut fwd_noise_y = z.clone();
    let mut fwd_noise_v = w.clone();
    let mut relay_rx = Vec::with_capacity(real.relay_count());
    let mut relay_tx = Vec::with_capacity(real.relay_count());

    for (k, (r, &gamma)) in real.relays().iter().zip(alloc.as_slice()).enumerate() {
        let hx = r.from_t1.matvec(&x)?;
        let gu = r.from_t2.matvec(&u)?;
        let mut rx = relay_noise[k].clone();
        axpy(&mut rx, tx_amp(r.gain_from_t1), &hx);
        axpy(&mut rx, tx_amp(r.gain_from_t2), &gu);

        let map = relay_map(r, cfg, m, n, k, strategy)?;
        let tx = map.matvec(&rx)?;

        let amp_y = (gamma * r.gain_to_t2).sqrt();
        let amp_v = (gamma * r.gain_to_t1).sqrt();
        axpy(&mut y, amp_y, &r.to_t2.matvec(&tx)?);
        axpy(&mut v, amp_v, &r.to_t1.matvec(&tx)?);

        let to_y = r.to_t2.matmul(&map)?;
        let to_v = r.to_t1.matmul(&map)?;
        axpy(&mut echo_y, amp_y * tx_amp(r.gain_from_t2), &to_y.matvec(&gu)?);
        axpy(&mut echo_v, amp_v * tx_amp(r.gain_from_t1), &to_v.matvec(&hx)?);
        axpy(&mut fwd_noise_y, amp_y, &to_y.matvec(&relay_noise[k])?);
        axpy(&mut fwd_noise_v, amp_v, &to_v.matvec(&relay_noise[k])?);

        relay_rx.push(rx);
        relay_tx.push(tx);
    }

    let (link12, link21) = match strategy {
        Strategy::DualChannelMatching => (
            dcm_effective_link(real, cfg, alloc, Direction::T1ToT2)?,
            dcm_effective_link(real, cfg, alloc, Direction::T2ToT1)?,
        ),
        Strategy::NormalizeForward => (
            nc_af_effective_link(real, cfg, alloc, Direction::T1ToT2)?,
            nc_af_effective_link(real, cfg, alloc, Direction::T2ToT1)?,
        ),
    };
    let sig_y = link12.signal.matvec(&x)?;
    let sig_v = link21.signal.matvec(&u)?;

    let clean = |rx: &[Complex64], echo: &[Complex64], sig: &[Complex64], noise: &[Complex64]| {
        rx.iter()
            .zip(echo)
            .zip(sig.iter().zip(noise))
            .map(|((r, e), (s, nz))| Component {
                received: r - e,
                signal: *s,
                noise: *nz,
            })
            .collect::<Vec<_>>()
    };
    let y_clean = clean(&y, &echo_y, &sig_y, &fwd_noise_y);
    let v_clean = clean(&v, &echo_v, &sig_v, &fwd_noise_v);
    let residual = |c: &[Component], total: &[Complex64]| {
        let err: f64 = c
            .iter()
            .map(|e| (e.received - e.signal - e.noise).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = norm_sqr(total).sqrt();
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    };
    let residual_12 = residual(&y_clean, &y);
    let residual_21 = residual(&v_clean, &v);

    Ok(SlotTranscript {
        strategy,
        x,
        u,
        relay_rx,
        relay_tx,
        y,
        v,
        y_clean,
        v_clean,
        residual_12,
        residual_21,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_realization, FadingLaw, Purpose};

    fn s(v: f64) -> CMatrix {
        CMatrix::from_real_rows(&[&[v]]).unwrap()
    }

    fn unit_relay(h: f64, g: f64, hr: f64, gr: f64) -> RelayChannels {
        RelayChannels {
            from_t1: s(h),
            to_t2: s(g),
            to_t1: s(hr),
            from_t2: s(gr),
            gain_from_t1: 1.0,
            gain_from_t2: 1.0,
            gain_to_t2: 1.0,
            gain_to_t1: 1.0,
        }
    }

    fn scalar_real(r: RelayChannels) -> ChannelRealization {
        ChannelRealization::from_relays(1, 1, FadingLaw::Constant(1.0), vec![r]).unwrap()
    }

    fn scalar_cfg(relay_power: f64) -> SystemConfig {
        SystemConfig {
            terminal_antennas: 1,
            relay_antennas: 1,
            relays: 1,
            terminal_power: 1.0,
            relay_power,
            noise_variance: 1.0,
            alpha: 0.5,
            fading: FadingLaw::Constant(1.0),
        }
    }

    fn random_setup(k: usize, seed: u64) -> (ChannelRealization, SystemConfig) {
        let cfg = SystemConfig { relays: k, ..SystemConfig::default() };
        (sample_realization(&cfg, RngStream::new(seed, 0, Purpose::Channel)), cfg)
    }

    #[test]
    fn equal_allocation() {
        let cfg = SystemConfig { relays: 1, relay_power: 5.0, ..SystemConfig::default() };
        assert_eq!(equal_power_allocation(&cfg).as_slice(), &[5.0]);
        let cfg = SystemConfig { relays: 4, relay_power: 2.0, ..SystemConfig::default() };
        assert_eq!(equal_power_allocation(&cfg).as_slice(), &[0.5; 4]);
        for k in [1, 3, 7, 64, 1000] {
            let cfg = SystemConfig { relays: k, relay_power: 10.0, ..SystemConfig::default() };
            let a = equal_power_allocation(&cfg);
            assert!((a.total() - 10.0).abs() <= 1e-12 * 10.0);
            assert!(PowerAllocation::new(a.as_slice().to_vec(), 10.0).is_ok());
        }
    }

    #[test]
    fn allocation_validation() {
        assert!(matches!(
            PowerAllocation::new(vec![1.0, 1.5], 2.0),
            Err(StrategyError::OverBudget { .. })
        ));
        assert!(matches!(
            PowerAllocation::new(vec![-1.0], 2.0),
            Err(StrategyError::BadRelayPower(_))
        ));
        let (real, cfg) = random_setup(3, 1);
        let short = PowerAllocation::new(vec![1.0], 10.0).unwrap();
        assert!(matches!(
            dcm_effective_link(&real, &cfg, &short, Direction::T1ToT2),
            Err(StrategyError::AllocationLength { got: 1, expected: 3 })
        ));
    }

    #[test]
    fn weight_examples() {
        let zero = scalar_real(unit_relay(0.0, 0.0, 0.0, 0.0));
        assert_eq!(dcm_weight(&zero, 0), CMatrix::zeros(1, 1));
        let real = scalar_real(unit_relay(1.0, 2.0, 3.0, 4.0));
        assert_eq!(dcm_weight(&real, 0), s(14.0));

        let (real, _) = random_setup(3, 2);
        for k in 0..3 {
            let r = &real.relays()[k];
            let oracle = r
                .from_t1
                .matmul(&r.to_t2)
                .unwrap()
                .add(&r.from_t2.matmul(&r.to_t1).unwrap())
                .unwrap()
                .adjoint();
            assert!(dcm_weight(&real, k).max_abs_diff(&oracle).unwrap() < 1e-14);
        }
    }

    #[test]
    fn normalization_examples() {
        let real = scalar_real(unit_relay(1.0, 1.0, 1.0, 1.0));
        let beta = dcm_normalization(&real, &scalar_cfg(1.0), 0).unwrap();
        assert!((beta - 12.0).abs() < 1e-14);

        // Vanishing terminal power: R_r collapses to σ² I.
        let (real, cfg) = random_setup(2, 3);
        let quiet = SystemConfig { terminal_power: 1e-300, ..cfg };
        let w = dcm_weight(&real, 1);
        let beta = dcm_normalization(&real, &quiet, 1).unwrap();
        let expect = w.gram().trace().re;
        assert!((beta - expect).abs() < 1e-12 * expect);

        // Noise-free: β is linear in P.
        let silent = SystemConfig { noise_variance: 1e-300, ..cfg };
        let doubled = SystemConfig { terminal_power: 2.0 * cfg.terminal_power, ..silent };
        let b1 = dcm_normalization(&real, &silent, 0).unwrap();
        let b2 = dcm_normalization(&real, &doubled, 0).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-12 * b2);

        let dead = scalar_real(unit_relay(0.0, 0.0, 0.0, 0.0));
        assert!(matches!(
            dcm_normalization(&dead, &scalar_cfg(1.0), 0),
            Err(StrategyError::DegenerateNormalization { .. })
        ));
    }

    #[test]
    fn dcm_link_scalar_example() {
        let real = scalar_real(unit_relay(1.0, 1.0, 1.0, 1.0));
        let cfg = scalar_cfg(1.0);
        let alloc = equal_power_allocation(&cfg);
        let link = dcm_effective_link(&real, &cfg, &alloc, Direction::T1ToT2).unwrap();
        assert!((link.signal[(0, 0)].re - 2.0 / 12f64.sqrt()).abs() < 1e-15);
        assert!((link.noise_cov[(0, 0)].re - (4.0 / 12.0 + 1.0)).abs() < 1e-15);

        let l21 = dcm_effective_link(&real, &cfg, &alloc, Direction::T2ToT1).unwrap();
        let rates = dcm_rate(&link, &l21, &cfg).unwrap();
        let expect = 0.5 * (1.0_f64 + (4.0 / 12.0) / (4.0 / 12.0 + 1.0)).log2();
        assert!((rates.r12_bits - expect).abs() < 1e-15);
        assert!((rates.r21_bits - expect).abs() < 1e-15);
    }

    #[test]
    fn dcm_link_with_dead_channels() {
        let real = scalar_real(unit_relay(0.0, 0.0, 1.0, 1.0));
        let cfg = scalar_cfg(1.0);
        let alloc = equal_power_allocation(&cfg);
        let link = dcm_effective_link(&real, &cfg, &alloc, Direction::T1ToT2).unwrap();
        assert_eq!(link.signal, CMatrix::zeros(1, 1));
        assert_eq!(link.noise_cov, s(1.0));
        let rates = dcm_rate(&link, &link, &cfg).unwrap();
        assert_eq!(rates, RatePair::default());
    }

    #[test]
    fn dcm_link_is_homogeneous_in_relay_power() {
        let (real, cfg) = random_setup(6, 4);
        let alloc = equal_power_allocation(&cfg);
        let c = 3.5;
        for dir in Direction::BOTH {
            let a = dcm_effective_link(&real, &cfg, &alloc, dir).unwrap();
            let b = dcm_effective_link(&real, &cfg, &alloc.scaled(c), dir).unwrap();
            let aa = a.signal.gram().scale(c);
            assert!(b.signal.gram().max_abs_diff(&aa).unwrap() < 1e-10 * aa.max_abs());
            let sig2 = CMatrix::identity(2).scale(cfg.noise_variance);
            let na = a.noise_cov.sub(&sig2).unwrap().scale(c);
            let nb = b.noise_cov.sub(&sig2).unwrap();
            assert!(nb.max_abs_diff(&na).unwrap() < 1e-10 * na.max_abs());
            assert!(a.noise_cov.is_hermitian());
        }
    }

    #[test]
    fn dcm_rate_grows_with_relay_power() {
        let (real, cfg) = random_setup(8, 5);
        let rate_at = |p: f64| {
            let c = SystemConfig { relay_power: p, ..cfg };
            let alloc = equal_power_allocation(&c);
            let l12 = dcm_effective_link(&real, &c, &alloc, Direction::T1ToT2).unwrap();
            let l21 = dcm_effective_link(&real, &c, &alloc, Direction::T2ToT1).unwrap();
            dcm_rate(&l12, &l21, &c).unwrap()
        };
        let lo = rate_at(10.0);
        let hi = rate_at(20.0);
        assert!(hi.r12_bits >= lo.r12_bits);
        assert!(hi.r21_bits >= lo.r21_bits);
    }

    #[test]
    fn nc_link_scalar_example() {
        for pr in [1.0, 3.0, 10.0] {
            let real = scalar_real(unit_relay(1.0, 1.0, 1.0, 1.0));
            let cfg = scalar_cfg(pr);
            let alloc = equal_power_allocation(&cfg);
            let l12 = nc_af_effective_link(&real, &cfg, &alloc, Direction::T1ToT2).unwrap();
            assert!((l12.signal[(0, 0)].re - (pr / 3.0).sqrt()).abs() < 1e-14);
            assert!((l12.noise_cov[(0, 0)].re - (pr / 3.0 + 1.0)).abs() < 1e-14);
            let l21 = nc_af_effective_link(&real, &cfg, &alloc, Direction::T2ToT1).unwrap();
            let rates = nc_af_rate(&l12, &l21, &cfg).unwrap();
            let expect = 0.5 * (1.0 + (pr / 3.0) / (pr / 3.0 + 1.0)).log2();
            assert!((rates.r12_bits - expect).abs() < 1e-14);
        }
        let real = scalar_real(unit_relay(1.0, 1.0, 1.0, 1.0));
        let cfg = scalar_cfg(3.0);
        let alloc = equal_power_allocation(&cfg);
        let l = nc_af_effective_link(&real, &cfg, &alloc, Direction::T1ToT2).unwrap();
        let r = nc_af_rate(&l, &l, &cfg).unwrap();
        assert!((r.r12_bits - 0.5 * 1.5f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn nc_link_small_terminal_power_limit() {
        let (real, cfg) = random_setup(4, 6);
        let quiet = SystemConfig { terminal_power: 1e-300, ..cfg };
        let alloc = equal_power_allocation(&quiet);
        let link = nc_af_effective_link(&real, &quiet, &alloc, Direction::T1ToT2).unwrap();
        assert!(link.signal.max_abs() < 1e-140);
        let mut expect = CMatrix::identity(2).scale(cfg.noise_variance);
        for (r, g) in real.relays().iter().zip(alloc.as_slice()) {
            let c = g * r.gain_to_t2 / (2.0 * cfg.noise_variance);
            expect.add_scaled(&r.to_t2.gram(), c * cfg.noise_variance).unwrap();
        }
        assert!(link.noise_cov.max_abs_diff(&expect).unwrap() < 1e-12);
        let rates = nc_af_rate(&link, &link, &quiet).unwrap();
        assert!(rates.r12_bits < 1e-200);
    }

    #[test]
    fn rates_exchange_under_mirroring() {
        let cfg = SystemConfig { relays: 5, fading: FadingLaw::Constant(1.0), ..SystemConfig::default() };
        let real = sample_realization(&cfg, RngStream::new(7, 0, Purpose::Channel));
        let mirror = real.mirrored();
        let alloc = equal_power_allocation(&cfg);
        let rates = |r: &ChannelRealization, strategy: Strategy| {
            let (l12, l21) = match strategy {
                Strategy::DualChannelMatching => (
                    dcm_effective_link(r, &cfg, &alloc, Direction::T1ToT2).unwrap(),
                    dcm_effective_link(r, &cfg, &alloc, Direction::T2ToT1).unwrap(),
                ),
                Strategy::NormalizeForward => (
                    nc_af_effective_link(r, &cfg, &alloc, Direction::T1ToT2).unwrap(),
                    nc_af_effective_link(r, &cfg, &alloc, Direction::T2ToT1).unwrap(),
                ),
            };
            match strategy {
                Strategy::DualChannelMatching => dcm_rate(&l12, &l21, &cfg).unwrap(),
                Strategy::NormalizeForward => nc_af_rate(&l12, &l21, &cfg).unwrap(),
            }
        };
        for strategy in [Strategy::DualChannelMatching, Strategy::NormalizeForward] {
            let a = rates(&real, strategy);
            let b = rates(&mirror, strategy);
            assert!((a.r12_bits - b.r21_bits).abs() < 1e-12);
            assert!((a.r21_bits - b.r12_bits).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_slot_reconstructs_signal() {
        let (real, cfg) = random_setup(4, 8);
        let tiny = SystemConfig { noise_variance: 1e-300, ..cfg };
        let alloc = equal_power_allocation(&tiny);
        for strategy in [Strategy::DualChannelMatching, Strategy::NormalizeForward] {
            let slot = simulate_slot(&real, &tiny, &alloc, strategy, RngStream::new(1, 0, Purpose::Signals)).unwrap();
            let num: f64 = slot
                .y_clean
                .iter()
                .map(|c| (c.received - c.signal).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let den: f64 = slot.y_clean.iter().map(|c| c.signal.norm_sqr()).sum::<f64>().sqrt();
            assert!(num <= 1e-10 * den, "{strategy:?}: {num} vs {den}");
        }
    }

    #[test]
    fn slot_cancellation_is_exact() {
        let (real, cfg) = random_setup(6, 9);
        let alloc = equal_power_allocation(&cfg);
        for strategy in [Strategy::DualChannelMatching, Strategy::NormalizeForward] {
            for t in 0..20 {
                let slot = simulate_slot(&real, &cfg, &alloc, strategy, RngStream::new(3, t, Purpose::Signals)).unwrap();
                assert!(slot.max_residual() <= 1e-10, "{strategy:?} residual {}", slot.max_residual());
            }
        }
    }

    #[test]
    fn dcm_relay_power_is_unit_on_average() {
        let (real, cfg) = random_setup(3, 10);
        let alloc = equal_power_allocation(&cfg);
        let slots = 10_000;
        let mut acc = vec![0.0; 3];
        for t in 0..slots {
            let slot = simulate_slot(&real, &cfg, &alloc, Strategy::DualChannelMatching, RngStream::new(4, t, Purpose::Signals)).unwrap();
            for (a, p) in acc.iter_mut().zip(slot.relay_powers()) {
                *a += p;
            }
        }
        for a in acc {
            let mean = a / slots as f64;
            assert!((0.97..=1.03).contains(&mean), "E t*t = {mean}");
        }
    }

    #[test]
    fn scalar_dcm_normalization_matches_signal_level_estimate() {
        let real = scalar_real(unit_relay(1.0, 1.0, 1.0, 1.0));
        let cfg = scalar_cfg(1.0);
        let alloc = equal_power_allocation(&cfg);
        let slots = 20_000;
        let mean = (0..slots)
            .map(|t| {
                simulate_slot(&real, &cfg, &alloc, Strategy::DualChannelMatching, RngStream::new(5, t, Purpose::Signals))
                    .unwrap()
                    .relay_powers()[0]
            })
            .sum::<f64>()
            / slots as f64;
        assert!((mean - 1.0).abs() < 0.02, "E t*t = {mean}");
    }

    #[test]
    fn transcript_dump_sections() {
        let (real, cfg) = random_setup(2, 11);
        let alloc = equal_power_allocation(&cfg);
        let slot = simulate_slot(&real, &cfg, &alloc, Strategy::NormalizeForward, RngStream::new(1, 0, Purpose::Signals)).unwrap();
        let dump = slot.dump();
        for section in ["[x]", "[u]", "[r_1]", "[r_2]", "[t_1]", "[t_2]", "[y]", "[v]", "[residuals]"] {
            assert!(dump.contains(section), "missing {section}");
        }
        assert!(dump.contains("residual_12,"));
    }
}
