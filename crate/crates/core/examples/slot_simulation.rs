//! Replays one transmission slot and checks that echo cancellation leaves
//! exactly the effective-link signal plus noise.
//!
//! cargo run --release --example slot_simulation

use relay_capacity::channel::{sample_realization, Purpose, RngStream, SystemConfig};
use relay_capacity::strategies::{equal_power_allocation, simulate_slot, Strategy};

fn main() {
    let cfg = SystemConfig { relays: 4, ..SystemConfig::default() };
    let real = sample_realization(&cfg, RngStream::new(42, 0, Purpose::Channel));
    let alloc = equal_power_allocation(&cfg);
    for strategy in [Strategy::DualChannelMatching, Strategy::NormalizeForward] {
        let slot = simulate_slot(&real, &cfg, &alloc, strategy, RngStream::new(42, 0, Purpose::Signals)).unwrap();
        let powers: Vec<String> = slot.relay_powers().iter().map(|p| format!("{p:.3}")).collect();
        println!("{strategy:?}");
        println!("  relay transmit powers: {}", powers.join(", "));
        println!("  residual after cancellation: {:.2e} / {:.2e}", slot.residual_12, slot.residual_21);
        for (i, c) in slot.y_clean.iter().enumerate() {
            println!(
                "  y[{i}] = {:.4} (signal {:.4}, noise {:.4})",
                c.received, c.signal, c.noise
            );
        }
    }
}
