//! Relay-power sweep at fixed K with P tied to P_R.
//!
//! cargo run --release --example noncoherent_scaling

use relay_capacity::channel::SystemConfig;
use relay_capacity::harness::{fit_scaling, run_sweep, series_points, Axis, Metric, SweepSpec};
use relay_capacity::strategies::Direction;

fn main() {
    let spec = SweepSpec {
        base: SystemConfig { relays: 256, ..SystemConfig::default() },
        axis: Axis::RelayPower,
        axis_values: vec![1e2, 1e3, 1e4, 1e5],
        trials: 100,
        seed: 42,
        metrics: vec![Metric::NcUb, Metric::NcAf],
        couple_terminal_power: true,
    };
    let rows = run_sweep(&spec).unwrap();
    for metric in [Metric::NcUb, Metric::NcAf] {
        let pts = series_points(&rows, metric, Direction::T1ToT2);
        let fit = fit_scaling(&pts).unwrap();
        let means: Vec<String> = pts.iter().map(|(_, y)| format!("{y:.3}")).collect();
        println!(
            "{metric}: [{}] bits, slope {:.3} bits per doubling of P_R",
            means.join(", "),
            fit.slope_bits_per_doubling
        );
    }
}
