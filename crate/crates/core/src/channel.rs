//! System configuration and reproducible sampling of the random relay network.
//!
//! Every relay k sees four MIMO channels and four large-scale gains:
//!
//! ```text
//!   T1 --from_t1 (N×M), gain_from_t1--> relay k --to_t2 (M×N), gain_to_t2--> T2
//!   T2 --from_t2 (N×M), gain_from_t2--> relay k --to_t1 (M×N), gain_to_t1--> T1
//! ```
//!
//! Randomness comes from [`RngStream`], a ChaCha20 stream keyed by
//! `(seed, purpose)` and positioned by the trial index, so every trial can be
//! regenerated independently of evaluation order.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::matcore::CMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{name} must be at least 1 (got {value})")]
    ZeroCount { name: &'static str, value: usize },
    #[error("{name} must be positive and finite (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("alpha must lie in [0, 1] (got {0})")]
    AlphaOutOfRange(f64),
    #[error("invalid fading law: {0}")]
    Fading(String),
    #[error("relay {relay}: {what} has shape {got:?}, expected {expected:?}")]
    Shape {
        relay: usize,
        what: &'static str,
        got: (usize, usize),
        expected: (usize, usize),
    },
}

/// Distribution of the path-loss/shadowing factors. The same law applies
/// independently to all four gains of every relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingLaw {
    Uniform { lo: f64, hi: f64 },
    Constant(f64),
}

impl Default for FadingLaw {
    fn default() -> Self {
        FadingLaw::Uniform { lo: 0.5, hi: 1.5 }
    }
}

impl FadingLaw {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, ConfigError> {
        let law = FadingLaw::Uniform { lo, hi };
        law.validate()?;
        Ok(law)
    }

    pub fn constant(value: f64) -> Result<Self, ConfigError> {
        let law = FadingLaw::Constant(value);
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            FadingLaw::Uniform { lo, hi } => {
                if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
                    return Err(ConfigError::Fading(format!(
                        "uniform({lo}, {hi}) needs 0 < lo <= hi"
                    )));
                }
            }
            FadingLaw::Constant(c) => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(ConfigError::Fading(format!("constant({c}) needs c > 0")));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            FadingLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            FadingLaw::Constant(c) => c,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            FadingLaw::Uniform { lo, hi } => (lo..=hi).contains(&x),
            FadingLaw::Constant(c) => x == c,
        }
    }

    /// Draws one factor. A constant law consumes no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            FadingLaw::Constant(c) => c,
        }
    }
}

impl fmt::Display for FadingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingLaw::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            FadingLaw::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

impl FromStr for FadingLaw {
    type Err = ConfigError;

    /// Accepts `uniform:LO:HI` or `constant:C`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| ConfigError::Fading(format!("cannot parse number {t:?} in {s:?}")))
        };
        match parts.as_slice() {
            ["uniform", lo, hi] => FadingLaw::uniform(num(lo)?, num(hi)?),
            ["constant", c] => FadingLaw::constant(num(c)?),
            _ => Err(ConfigError::Fading(format!(
                "{s:?} (expected uniform:LO:HI or constant:C)"
            ))),
        }
    }
}

/// All scalar parameters of one experiment point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Antennas at each terminal (M).
    pub terminal_antennas: usize,
    /// Antennas at each relay (N).
    pub relay_antennas: usize,
    /// Number of relays (K).
    pub relays: usize,
    /// Terminal transmit power P, linear.
    pub terminal_power: f64,
    /// Sum relay power P_R, linear.
    pub relay_power: f64,
    /// Noise variance per receive antenna, linear.
    pub noise_variance: f64,
    /// Fraction of the slot spent in the terminals' transmit phase.
    pub alpha: f64,
    pub fading: FadingLaw,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            terminal_antennas: 2,
            relay_antennas: 2,
            relays: 32,
            terminal_power: 10.0,
            relay_power: 10.0,
            noise_variance: 1.0,
            alpha: 0.5,
            fading: FadingLaw::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("M", self.terminal_antennas),
            ("N", self.relay_antennas),
            ("K", self.relays),
        ] {
            if value == 0 {
                return Err(ConfigError::ZeroCount { name, value });
            }
        }
        for (name, value) in [
            ("P", self.terminal_power),
            ("P_R", self.relay_power),
            ("sigma2", self.noise_variance),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ConfigError::AlphaOutOfRange(self.alpha));
        }
        self.fading.validate()
    }
}

/// What a random stream is used for. Distinct purposes never share a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Channel matrices and fading factors.
    Channel,
    /// Transmitted symbols and noise in slot simulation.
    Signals,
    /// Free tag for tests and examples.
    Custom(u32),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Channel => 1,
            Purpose::Signals => 2,
            Purpose::Custom(t) => (1 << 32) | u64::from(t),
        }
    }
}

/// Address of an independent random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub trial: u64,
    pub purpose: Purpose,
}

impl RngStream {
    pub fn new(seed: u64, trial: u64, purpose: Purpose) -> Self {
        Self { seed, trial, purpose }
    }

    /// ChaCha20 keyed by (seed, purpose), stream id = trial.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.purpose.tag().to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(self.trial);
        rng
    }
}

/// Circularly-symmetric complex Gaussian with unit total variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

pub fn complex_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Channels and large-scale gains of one relay.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannels {
    /// T1 → relay, N×M.
    pub from_t1: CMatrix,
    /// Relay → T2, M×N.
    pub to_t2: CMatrix,
    /// Relay → T1, M×N.
    pub to_t1: CMatrix,
    /// T2 → relay, N×M.
    pub from_t2: CMatrix,
    pub gain_from_t1: f64,
    pub gain_from_t2: f64,
    pub gain_to_t2: f64,
    pub gain_to_t1: f64,
}

impl RelayChannels {
    /// Swaps the roles of the two terminals.
    pub fn mirrored(&self) -> Self {
        Self {
            from_t1: self.from_t2.clone(),
            to_t2: self.to_t1.clone(),
            to_t1: self.to_t2.clone(),
            from_t2: self.from_t1.clone(),
            gain_from_t1: self.gain_from_t2,
            gain_from_t2: self.gain_from_t1,
            gain_to_t2: self.gain_to_t1,
            gain_to_t1: self.gain_to_t2,
        }
    }
}

/// One draw of the whole network.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    terminal_antennas: usize,
    relay_antennas: usize,
    fading: FadingLaw,
    relays: Vec<RelayChannels>,
}

impl ChannelRealization {
    /// Assembles a realization from explicit relay channels, checking every
    /// shape against (M, N).
    pub fn from_relays(
        terminal_antennas: usize,
        relay_antennas: usize,
        fading: FadingLaw,
        relays: Vec<RelayChannels>,
    ) -> Result<Self, ConfigError> {
        let (m, n) = (terminal_antennas, relay_antennas);
        for (k, r) in relays.iter().enumerate() {
            for (what, mat, expected) in [
                ("from_t1", &r.from_t1, (n, m)),
                ("to_t2", &r.to_t2, (m, n)),
                ("to_t1", &r.to_t1, (m, n)),
                ("from_t2", &r.from_t2, (n, m)),
            ] {
                if mat.dims() != expected {
                    return Err(ConfigError::Shape {
                        relay: k,
                        what,
                        got: mat.dims(),
                        expected,
                    });
                }
            }
        }
        Ok(Self {
            terminal_antennas,
            relay_antennas,
            fading,
            relays,
        })
    }

    pub fn terminal_antennas(&self) -> usize {
        self.terminal_antennas
    }

    pub fn relay_antennas(&self) -> usize {
        self.relay_antennas
    }

    pub fn fading(&self) -> FadingLaw {
        self.fading
    }

    pub fn relays(&self) -> &[RelayChannels] {
        &self.relays
    }

    pub fn relay_count(&self) -> usize {
        self.relays.len()
    }

    /// The same network seen with T1 and T2 exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            relays: self.relays.iter().map(RelayChannels::mirrored).collect(),
            ..self.clone()
        }
    }

    /// Plain-text dump: `k,name,row,col,re,im` per matrix entry and
    /// `k,fading,E,F,P,Q` per relay, relays numbered from 1, after two `#` header lines.
    pub fn dump(&self) -> String {
        let mut out = String::from("# k,name,row,col,re,im\n# k,fading,E,F,P,Q\n");
        for (idx, r) in self.relays.iter().enumerate() {
            let k = idx + 1;
            for (name, mat) in [
                ("H", &r.from_t1),
                ("G", &r.to_t2),
                ("Hr", &r.to_t1),
                ("Gr", &r.from_t2),
            ] {
                for i in 0..mat.rows() {
                    for j in 0..mat.cols() {
                        let z = mat[(i, j)];
                        let _ = writeln!(out, "{k},{name},{i},{j},{},{}", z.re, z.im);
                    }
                }
            }
            let _ = writeln!(
                out,
                "{k},fading,{},{},{},{}",
                r.gain_from_t1, r.gain_from_t2, r.gain_to_t2, r.gain_to_t1
            );
        }
        out
    }
}

/// Draws every relay's four channel matrices (i.i.d. CN(0,1) entries) and
/// four fading factors from `stream`.
pub fn sample_realization(cfg: &SystemConfig, stream: RngStream) -> ChannelRealization {
    let (m, n) = (cfg.terminal_antennas, cfg.relay_antennas);
    let mut rng = stream.rng();
    let relays = (0..cfg.relays)
        .map(|_| {
            let from_t1 = complex_normal_matrix(n, m, &mut rng);
            let to_t2 = complex_normal_matrix(m, n, &mut rng);
            let to_t1 = complex_normal_matrix(m, n, &mut rng);
            let from_t2 = complex_normal_matrix(n, m, &mut rng);
            RelayChannels {
                from_t1,
                to_t2,
                to_t1,
                from_t2,
                gain_from_t1: cfg.fading.sample(&mut rng),
                gain_from_t2: cfg.fading.sample(&mut rng),
                gain_to_t2: cfg.fading.sample(&mut rng),
                gain_to_t1: cfg.fading.sample(&mut rng),
            }
        })
        .collect();
    ChannelRealization {
        terminal_antennas: m,
        relay_antennas: n,
        fading: cfg.fading,
        relays,
    }
}

/// Largest entrywise deviation of `(1/K) Σ_k P_k G_k G_k*` from its
/// large-K limit `μ N I_M`.
pub fn ensemble_mean_check(real: &ChannelRealization) -> f64 {
    let m = real.terminal_antennas();
    let k = real.relay_count().max(1) as f64;
    let mut acc = CMatrix::zeros(m, m);
    for r in real.relays() {
        acc.add_scaled(&r.to_t2.gram(), r.gain_to_t2)
            .expect("to_t2 is M×N by construction");
    }
    let target = real.fading().mean() * real.relay_antennas() as f64;
    let mut worst = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            let expect = if i == j { target } else { 0.0 };
            worst = worst.max((acc[(i, j)] / k - expect).norm());
        }
    }
    worst
}
