//! Broadcast and multiple-access cuts for one realization, and their
//! ergodic averages as the relay count grows.
//!
//! cargo run --release --example cut_set_bounds

use relay_capacity::capacity::{broadcast_cut_bound, coherent_upper_bound, mac_cut_bound};
use relay_capacity::channel::{sample_realization, Purpose, RngStream, SystemConfig};

fn main() {
    let cfg = SystemConfig { relays: 64, ..SystemConfig::default() };
    let real = sample_realization(&cfg, RngStream::new(42, 0, Purpose::Channel));
    let bc = broadcast_cut_bound(&real, &cfg).unwrap();
    let mac = mac_cut_bound(&real, &cfg).unwrap();
    let ub = coherent_upper_bound(&real, &cfg).unwrap();
    println!("K = 64, one draw (bits):");
    println!("  broadcast cut  r12 {:.4}  r21 {:.4}", bc.r12_bits, bc.r21_bits);
    println!("  mac cut        r12 {:.4}  r21 {:.4}", mac.r12_bits, mac.r21_bits);
    println!("  upper bound    r12 {:.4}  r21 {:.4}", ub.r12_bits, ub.r21_bits);

    println!("\nergodic upper bound, 50 draws per point:");
    for k in [8, 32, 128, 512] {
        let cfg = SystemConfig { relays: k, ..cfg };
        let mean = (0..50)
            .map(|t| {
                let real = sample_realization(&cfg, RngStream::new(42, t, Purpose::Channel));
                coherent_upper_bound(&real, &cfg).unwrap().r12_bits
            })
            .sum::<f64>()
            / 50.0;
        println!("  K = {k:>3}: {mean:.4} bits");
    }
}
