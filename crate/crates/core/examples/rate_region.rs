//! Achievable and outer rate regions at one configuration.
//!
//! cargo run --release --example rate_region

use relay_capacity::channel::SystemConfig;
use relay_capacity::harness::{rate_region, run_point, Axis, Metric};
use relay_capacity::strategies::{Direction, RatePair};

fn main() {
    let cfg = SystemConfig { relays: 64, ..SystemConfig::default() };
    let rows = run_point(&cfg, Axis::RelayCount, 100, 42, &[Metric::UbCoherent, Metric::Dcm]).unwrap();
    let pair = |m: Metric| {
        let get = |d: Direction| rows.iter().find(|r| r.metric == m && r.direction == d).unwrap().mean_bits;
        RatePair::new(get(Direction::T1ToT2), get(Direction::T2ToT1))
    };
    let outer = rate_region(pair(Metric::UbCoherent));
    let inner = rate_region(pair(Metric::Dcm));
    println!("outer (upper bound): {:.3?}", outer.vertices);
    println!("inner (dcm):         {:.3?}", inner.vertices);
    println!("inner inside outer: {}", inner.is_within(&outer));
}
