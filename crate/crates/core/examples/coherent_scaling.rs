//! Relay-count sweep of the coherent upper bound and dual channel matching,
//! with a log2(K) fit and CSV output.
//!
//! cargo run --release --example coherent_scaling [out.csv]

use relay_capacity::channel::SystemConfig;
use relay_capacity::harness::{emit_csv, fit_all, run_sweep, Axis, Metric, SweepSpec};

fn main() {
    let spec = SweepSpec {
        base: SystemConfig::default(),
        axis: Axis::RelayCount,
        axis_values: vec![32.0, 128.0, 512.0],
        trials: 100,
        seed: 42,
        metrics: vec![Metric::UbCoherent, Metric::Dcm],
        couple_terminal_power: false,
    };
    let rows = run_sweep(&spec).unwrap();
    for r in &rows {
        println!(
            "K = {:>4} {:>12} {}: {:.4} +- {:.4} bits",
            r.axis_value, r.metric, r.direction, r.mean_bits, r.stderr_bits
        );
    }
    let fits = fit_all(&rows).unwrap();
    for f in &fits {
        println!(
            "{} {}: {:.3} bits per doubling of K (r^2 {:.4})",
            f.metric, f.direction, f.fit.slope_bits_per_doubling, f.fit.r_squared
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        emit_csv(&rows, Some(&fits), path.as_ref()).unwrap();
        println!("wrote {path}");
    }
}
