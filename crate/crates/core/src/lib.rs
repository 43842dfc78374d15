//! Monte Carlo evaluation of cut-set upper bounds and amplify-and-forward
//! achievable rates for the MIMO two-way relay channel.
//!
//! Two terminals with `M` antennas exchange messages through `K` relays with
//! `N` antennas each. The crate samples channel realizations, evaluates the
//! broadcast and multiple-access cut-set bounds, the coherent dual channel
//! matching rate and the non-coherent normalize-and-forward rate, and sweeps
//! them over the relay count, the relay power or the time split.
//!
//! ```
//! use relay_capacity::channel::{sample_realization, Purpose, RngStream, SystemConfig};
//! use relay_capacity::capacity::coherent_upper_bound;
//!
//! let cfg = SystemConfig { relays: 16, ..SystemConfig::default() };
//! let real = sample_realization(&cfg, RngStream::new(42, 0, Purpose::Channel));
//! let ub = coherent_upper_bound(&real, &cfg).unwrap();
//! assert!(ub.r12_bits > 0.0 && ub.r21_bits > 0.0);
//! ```

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod harness;
pub mod matcore;
pub mod strategies;

pub use capacity::{BoundPair, CapacityError, WaterfillResult};
pub use channel::{ChannelRealization, FadingLaw, Purpose, RngStream, SystemConfig};
pub use harness::{Axis, Metric, ScalingFit, SweepRow, SweepSpec};
pub use matcore::{CMatrix, HermitianSpectrum};
pub use strategies::{Direction, RatePair, Strategy};
