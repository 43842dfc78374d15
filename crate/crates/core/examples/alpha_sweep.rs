//! Upper bound against the transmit fraction alpha.
//!
//! cargo run --release --example alpha_sweep

use relay_capacity::channel::SystemConfig;
use relay_capacity::harness::{run_sweep, Axis, Metric, SweepSpec};
use relay_capacity::strategies::Direction;

fn main() {
    let spec = SweepSpec {
        base: SystemConfig { relays: 128, ..SystemConfig::default() },
        axis: Axis::Alpha,
        axis_values: (1..=9).map(|i| i as f64 / 10.0).collect(),
        trials: 50,
        seed: 42,
        metrics: vec![Metric::UbBroadcast, Metric::UbMac, Metric::UbCoherent],
        couple_terminal_power: false,
    };
    let rows = run_sweep(&spec).unwrap();
    println!("alpha   ub_bc   ub_mac  ub_coherent   (direction 12, bits)");
    for &alpha in &spec.axis_values {
        let get = |m: Metric| {
            rows.iter()
                .find(|r| r.axis_value == alpha && r.metric == m && r.direction == Direction::T1ToT2)
                .unwrap()
                .mean_bits
        };
        println!(
            "{alpha:.1}   {:>6.3}  {:>6.3}  {:>6.3}",
            get(Metric::UbBroadcast),
            get(Metric::UbMac),
            get(Metric::UbCoherent)
        );
    }
}
