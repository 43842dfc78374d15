//! Cut-set upper bounds for the two-way relay network.
//!
//! Rates are bits per channel use of a full slot. The coherent bound is the
//! minimum of a broadcast cut (terminal to all relays, active for a fraction
//! `alpha` of the slot) and a multiple-access cut (all relays to the far
//! terminal with transmit CSI, active for `1 - alpha`).

use thiserror::Error;

use crate::channel::{ChannelRealization, SystemConfig};
use crate::matcore::{eigvals_hermitian, logdet_hpd, CMatrix, Cholesky, HermitianSpectrum, MatError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("waterfilling needs at least one positive eigenvalue")]
    NoPositiveMode,
    #[error("{name} must be positive and finite (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error(
        "the non-coherent bounds are defined only for alpha = 1/2 (equal transmit and receive phases); got alpha = {0}"
    )]
    UnsupportedAlpha(f64),
}

/// Outcome of waterfilling over a set of parallel eigenmodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillResult {
    /// Water level ν.
    pub water_level: f64,
    /// Power per mode, in the order of the input spectrum.
    pub powers: Vec<f64>,
    pub capacity_bits: f64,
}

/// Upper bounds on the two directional rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundPair {
    pub r12_bits: f64,
    pub r21_bits: f64,
}

impl BoundPair {
    pub fn new(r12_bits: f64, r21_bits: f64) -> Self {
        Self { r12_bits, r21_bits }
    }

    pub fn min(self, other: Self) -> Self {
        Self {
            r12_bits: self.r12_bits.min(other.r12_bits),
            r21_bits: self.r21_bits.min(other.r21_bits),
        }
    }
}

/// `log₂ det(I + H Q H* R⁻¹)` evaluated in whitened form
/// `log₂ det(I + L⁻¹ H Q H* L⁻*)` with `L L* = R`.
pub fn mimo_mutual_information(
    channel: &CMatrix,
    input_cov: &CMatrix,
    noise_cov: &CMatrix,
) -> Result<f64, CapacityError> {
    input_cov.check_hermitian()?;
    if input_cov.rows() != channel.cols() || noise_cov.rows() != channel.rows() {
        return Err(MatError::DimensionMismatch {
            op: "mimo_mutual_information",
            lhs: channel.dims(),
            rhs: input_cov.dims(),
        }
        .into());
    }
    let chol = Cholesky::factor(noise_cov)?;
    let whitened = chol.solve_lower(channel)?;
    let signal = whitened.matmul(input_cov)?.mul_adjoint(&whitened)?;
    let arg = signal
        .hermitian_part()?
        .add(&CMatrix::identity(channel.rows()))?;
    Ok(logdet_hpd(&arg)?.max(0.0))
}

/// Maximizes `Σ log₂(1 + p_l λ_l / σ²)` subject to `Σ p_l = budget`,
/// `p_l ≥ 0`, by the active-set water level.
pub fn waterfill(
    spectrum: &HermitianSpectrum,
    budget: f64,
    noise_variance: f64,
) -> Result<WaterfillResult, CapacityError> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(CapacityError::NonPositive { name: "budget", value: budget });
    }
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(CapacityError::NonPositive {
            name: "noise variance",
            value: noise_variance,
        });
    }
    // Descending, so the positive modes form a prefix.
    let lambdas = spectrum.values();
    let positive = lambdas.iter().take_while(|&&l| l > 0.0).count();
    if positive == 0 {
        return Err(CapacityError::NoPositiveMode);
    }
    let floors: Vec<f64> = lambdas[..positive].iter().map(|l| noise_variance / l).collect();

    let mut active = positive;
    let mut level = 0.0;
    while active > 0 {
        level = (budget + floors[..active].iter().sum::<f64>()) / active as f64;
        if level > floors[active - 1] {
            break;
        }
        active -= 1;
    }
    let mut powers = vec![0.0; lambdas.len()];
    let mut capacity = 0.0;
    for l in 0..active {
        powers[l] = level - floors[l];
        capacity += (1.0 + powers[l] * lambdas[l] / noise_variance).log2();
    }
    Ok(WaterfillResult {
        water_level: level,
        powers,
        capacity_bits: capacity,
    })
}

/// Broadcast cut: all relays jointly decode with receive CSI, terminals
/// send white Gaussian inputs.
///
/// `r12 = α log₂ det(I + P/(Mσ²) Σ_k E_k H_k* H_k)`, and `r21` likewise with
/// `F_k` and the T2 → relay channels.
pub fn broadcast_cut_bound(
    real: &ChannelRealization,
    cfg: &SystemConfig,
) -> Result<BoundPair, CapacityError> {
    let m = real.terminal_antennas();
    let snr = cfg.terminal_power / (m as f64 * cfg.noise_variance);
    let mut acc12 = CMatrix::identity(m);
    let mut acc21 = CMatrix::identity(m);
    for r in real.relays() {
        acc12.add_scaled(&r.from_t1.gram_adjoint(), snr * r.gain_from_t1)?;
        acc21.add_scaled(&r.from_t2.gram_adjoint(), snr * r.gain_from_t2)?;
    }
    Ok(BoundPair {
        r12_bits: cfg.alpha * logdet_hpd(&acc12)?.max(0.0),
        r21_bits: cfg.alpha * logdet_hpd(&acc21)?.max(0.0),
    })
}

/// Eigenvalues of `(1/K) Σ_k w_k C_k C_k*`, i.e. of `Φ Φ*` for the stacked
/// relay-to-terminal matrix.
fn stacked_gram_spectrum<'a>(
    m: usize,
    k: usize,
    terms: impl Iterator<Item = (&'a CMatrix, f64)>,
) -> Result<HermitianSpectrum, CapacityError> {
    let mut acc = CMatrix::zeros(m, m);
    for (c, w) in terms {
        acc.add_scaled(&c.gram(), w)?;
    }
    Ok(eigvals_hermitian(&acc.scale(1.0 / k as f64))?)
}

fn mac_direction(
    spectrum: &HermitianSpectrum,
    relays: usize,
    cfg: &SystemConfig,
) -> Result<f64, CapacityError> {
    // Noise σ²/K after the 1/√K scaling is the same as gain K·λ at noise σ².
    let gains = spectrum.scaled(relays as f64);
    if gains.max() <= 0.0 {
        return Ok(0.0);
    }
    let wf = waterfill(&gains, cfg.relay_power, cfg.noise_variance)?;
    Ok((1.0 - cfg.alpha) * wf.capacity_bits)
}

/// Multiple-access cut: the relays cooperate as one NK-antenna transmitter
/// with full CSI and sum power `P_R`, waterfilling over the eigenmodes of
/// `Φ Φ*`.
pub fn mac_cut_bound(
    real: &ChannelRealization,
    cfg: &SystemConfig,
) -> Result<BoundPair, CapacityError> {
    let m = real.terminal_antennas();
    let k = real.relay_count();
    let spec12 = stacked_gram_spectrum(m, k, real.relays().iter().map(|r| (&r.to_t2, r.gain_to_t2)))?;
    let spec21 = stacked_gram_spectrum(m, k, real.relays().iter().map(|r| (&r.to_t1, r.gain_to_t1)))?;
    Ok(BoundPair {
        r12_bits: mac_direction(&spec12, k, cfg)?,
        r21_bits: mac_direction(&spec21, k, cfg)?,
    })
}

/// Per-direction minimum of the broadcast and multiple-access cuts.
pub fn coherent_upper_bound(
    real: &ChannelRealization,
    cfg: &SystemConfig,
) -> Result<BoundPair, CapacityError> {
    Ok(broadcast_cut_bound(real, cfg)?.min(mac_cut_bound(real, cfg)?))
}

/// Multiple-access cut without relay CSI: white relay inputs
/// `Q = P_R/(NK) I`, half-slot receive phase.
pub fn noncoherent_mac_bound(
    real: &ChannelRealization,
    cfg: &SystemConfig,
) -> Result<BoundPair, CapacityError> {
    if (cfg.alpha - 0.5).abs() > 1e-12 {
        return Err(CapacityError::UnsupportedAlpha(cfg.alpha));
    }
    let m = real.terminal_antennas();
    let nk = (real.relay_antennas() * real.relay_count()) as f64;
    let snr = cfg.relay_power / (nk * cfg.noise_variance);
    let mut acc12 = CMatrix::identity(m);
    let mut acc21 = CMatrix::identity(m);
    for r in real.relays() {
        acc12.add_scaled(&r.to_t2.gram(), snr * r.gain_to_t2)?;
        acc21.add_scaled(&r.to_t1.gram(), snr * r.gain_to_t1)?;
    }
    Ok(BoundPair {
        r12_bits: 0.5 * logdet_hpd(&acc12)?.max(0.0),
        r21_bits: 0.5 * logdet_hpd(&acc21)?.max(0.0),
    })
}
