//! Draws one channel realization and checks how close the averaged relay
//! Gram matrix is to its large-K limit.
//!
//! cargo run --release --example channel_sampling

use relay_capacity::channel::{ensemble_mean_check, sample_realization, Purpose, RngStream, SystemConfig};

fn main() {
    let cfg = SystemConfig { relays: 4, ..SystemConfig::default() };
    let real = sample_realization(&cfg, RngStream::new(42, 0, Purpose::Channel));
    println!("first relay, terminal 1 -> relay channel:");
    let h = &real.relays()[0].from_t1;
    for i in 0..h.rows() {
        let row: Vec<String> = (0..h.cols()).map(|j| format!("{:.3}", h[(i, j)])).collect();
        println!("  [{}]", row.join(", "));
    }

    for k in [16, 256, 4096] {
        let cfg = SystemConfig { relays: k, ..cfg };
        let devs: Vec<f64> = (0..20)
            .map(|t| ensemble_mean_check(&sample_realization(&cfg, RngStream::new(42, t, Purpose::Channel))))
            .collect();
        let mean = devs.iter().sum::<f64>() / devs.len() as f64;
        println!("K = {k:>4}: mean relative deviation from N*mu*I = {mean:.4}");
    }
}
