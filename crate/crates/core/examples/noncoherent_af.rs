//! Normalize-and-forward against the non-coherent bound as P = P_R grows.
//!
//! cargo run --release --example noncoherent_af

use relay_capacity::capacity::noncoherent_mac_bound;
use relay_capacity::channel::{sample_realization, Purpose, RngStream, SystemConfig};
use relay_capacity::strategies::{equal_power_allocation, nc_af_effective_link, nc_af_rate, Direction};

fn main() {
    for power in [1e1, 1e2, 1e3, 1e4] {
        let cfg = SystemConfig {
            relays: 128,
            terminal_power: power,
            relay_power: power,
            ..SystemConfig::default()
        };
        let (mut af, mut ub) = (0.0, 0.0);
        let trials = 40;
        for t in 0..trials {
            let real = sample_realization(&cfg, RngStream::new(42, t, Purpose::Channel));
            let alloc = equal_power_allocation(&cfg);
            let l12 = nc_af_effective_link(&real, &cfg, &alloc, Direction::T1ToT2).unwrap();
            let l21 = nc_af_effective_link(&real, &cfg, &alloc, Direction::T2ToT1).unwrap();
            af += nc_af_rate(&l12, &l21, &cfg).unwrap().r12_bits;
            ub += noncoherent_mac_bound(&real, &cfg).unwrap().r12_bits;
        }
        let n = trials as f64;
        println!("P = P_R = {power:>7}: nc_af {:.3} bits, bound {:.3} bits", af / n, ub / n);
    }
}
