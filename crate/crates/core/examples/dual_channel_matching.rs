//! Effective end-to-end channel and rate pair of coherent dual channel
//! matching.
//!
//! cargo run --release --example dual_channel_matching

use relay_capacity::capacity::coherent_upper_bound;
use relay_capacity::channel::{sample_realization, Purpose, RngStream, SystemConfig};
use relay_capacity::strategies::{dcm_effective_link, dcm_rate, equal_power_allocation, Direction};

fn main() {
    for k in [4, 64, 1024] {
        let cfg = SystemConfig { relays: k, ..SystemConfig::default() };
        let real = sample_realization(&cfg, RngStream::new(42, 0, Purpose::Channel));
        let alloc = equal_power_allocation(&cfg);
        let l12 = dcm_effective_link(&real, &cfg, &alloc, Direction::T1ToT2).unwrap();
        let l21 = dcm_effective_link(&real, &cfg, &alloc, Direction::T2ToT1).unwrap();
        let rate = dcm_rate(&l12, &l21, &cfg).unwrap();
        let ub = coherent_upper_bound(&real, &cfg).unwrap();
        println!(
            "K = {k:>4}: dcm ({:.3}, {:.3}) bits, upper bound ({:.3}, {:.3}) bits, |A12|_F = {:.3}",
            rate.r12_bits,
            rate.r21_bits,
            ub.r12_bits,
            ub.r21_bits,
            l12.signal.frobenius_norm()
        );
    }
}
