//! Waterfilling over a few eigenvalue profiles.
//!
//! cargo run --release --example waterfilling

use relay_capacity::capacity::waterfill;
use relay_capacity::matcore::{eigvals_hermitian, CMatrix, HermitianSpectrum};

fn main() {
    for (gains, budget) in [
        (vec![4.0, 1.0], 1.0),
        (vec![4.0, 1.0], 10.0),
        (vec![2.0, 0.5, 0.05], 3.0),
    ] {
        let wf = waterfill(&HermitianSpectrum::from_values(gains.clone()), budget, 1.0).unwrap();
        println!(
            "gains {gains:?}, budget {budget}: level {:.4}, powers {:.4?}, {:.4} bits",
            wf.water_level, wf.powers, wf.capacity_bits
        );
    }

    // The spectrum usually comes from a Hermitian matrix.
    let a = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
    let spectrum = eigvals_hermitian(&a).unwrap();
    let wf = waterfill(&spectrum, 2.0, 1.0).unwrap();
    println!("eigenvalues {:?} -> {:.4} bits", spectrum.values(), wf.capacity_bits);
}
