//! Large-K checks of the non-coherent rates against closed-form limits
//! computed independently of the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use relay_capacity::channel::SystemConfig;
use relay_capacity::harness::{run_point, Axis, Metric};
use relay_capacity::strategies::Direction;

/// `E{f(E, F)}` for independent uniform(lo, hi) gains, midpoint rule.
fn uniform_expectation(lo: f64, hi: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let n = 400;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += f(lo + (i as f64 + 0.5) * h, lo + (j as f64 + 0.5) * h);
        }
    }
    acc / (n * n) as f64
}

/// `E{log₂ det(I + c W W*)}` for a 2×2 matrix W with CN(0, 1) entries.
fn wishart_logdet_2x2(c: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cn = || -> (f64, f64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        (re * s, im * s)
    };
    let mut acc = 0.0;
    for _ in 0..samples {
        let w: Vec<(f64, f64)> = (0..4).map(|_| cn()).collect();
        // rows (w0, w1) and (w2, w3)
        let n0 = w[0].0.powi(2) + w[0].1.powi(2) + w[1].0.powi(2) + w[1].1.powi(2);
        let n1 = w[2].0.powi(2) + w[2].1.powi(2) + w[3].0.powi(2) + w[3].1.powi(2);
        // <row0, row1> = w0 conj(w2) + w1 conj(w3)
        let cross_re = w[0].0 * w[2].0 + w[0].1 * w[2].1 + w[1].0 * w[3].0 + w[1].1 * w[3].1;
        let cross_im = w[0].1 * w[2].0 - w[0].0 * w[2].1 + w[1].1 * w[3].0 - w[1].0 * w[3].1;
        let det = (1.0 + c * n0) * (1.0 + c * n1) - c * c * (cross_re.powi(2) + cross_im.powi(2));
        acc += det.log2();
    }
    acc / samples as f64
}

#[test]
fn normalize_forward_matches_large_relay_limit() {
    let (p, p_r, sigma2, m) = (1e4, 1e4, 1.0, 2.0);
    let cfg = SystemConfig {
        relays: 256,
        terminal_power: p,
        relay_power: p_r,
        ..SystemConfig::default()
    };
    let mu = 1.0;
    let a = uniform_expectation(0.5, 1.5, |e, f| e / (p * (e + f) + sigma2));
    let b = uniform_expectation(0.5, 1.5, |e, f| 1.0 / (p * (e + f) + sigma2));
    let rho = p * p_r * mu * a / (sigma2 * (p_r * mu * b + 1.0));
    let oracle = 0.5 * wishart_logdet_2x2(rho / m, 20_000, 9);

    let rows = run_point(&cfg, Axis::RelayPower, 200, 42, &[Metric::NcAf]).unwrap();
    for row in &rows {
        assert!(
            (row.mean_bits - oracle).abs() < 0.5,
            "{}: {} vs oracle {oracle}",
            row.direction,
            row.mean_bits
        );
    }
}

#[test]
fn noncoherent_bound_matches_large_relay_limit() {
    let cfg = SystemConfig {
        relays: 1024,
        terminal_power: 1e3,
        relay_power: 1e3,
        ..SystemConfig::default()
    };
    // (1/(NK)) Σ P_k G_k G_k* → μ I_M, so the bound tends to (M/2) log₂(1 + P_R μ / σ²).
    let limit = (1.0f64 + 1e3).log2();
    let rows = run_point(&cfg, Axis::RelayPower, 50, 42, &[Metric::NcUb]).unwrap();
    for row in &rows {
        assert!((row.mean_bits - limit).abs() < 0.05, "{} vs {limit}", row.mean_bits);
    }
}

#[test]
fn normalize_forward_stays_below_bound_across_powers() {
    for p in [1e1, 1e2, 1e3] {
        let cfg = SystemConfig {
            relays: 64,
            terminal_power: p,
            relay_power: p,
            ..SystemConfig::default()
        };
        let rows = run_point(&cfg, Axis::RelayPower, 40, 7, &[Metric::NcUb, Metric::NcAf]).unwrap();
        for dir in Direction::BOTH {
            let get = |metric| {
                rows.iter()
                    .find(|r| r.metric == metric && r.direction == dir)
                    .unwrap()
                    .mean_bits
            };
            assert!(get(Metric::NcAf) <= get(Metric::NcUb), "P = {p}, {dir}");
        }
    }
}
