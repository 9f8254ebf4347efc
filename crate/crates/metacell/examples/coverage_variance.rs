//! Coverage (mean success probability) and its across-network variance as
//! a function of the decoding threshold. The variance of the conditional
//! success probability measures how unevenly reliability is distributed
//! over the network: its peak marks the threshold where links differ most.
//!
//! Run with: cargo run --release --example coverage_variance

use metacell::model::NetworkConfig;
use metacell::moments::{self, EvalPath, MomentQuery, Variant};
use num_complex::Complex64;

fn main() {
    let p = NetworkConfig::default().to_params().unwrap();
    println!(
        "{:>9} {:>10} {:>10} {:>10}",
        "theta_dB", "M1", "M2", "variance"
    );
    let mut peak = (f64::NEG_INFINITY, 0i32);
    for th_db in (-15..=15).step_by(1) {
        let theta = 10f64.powf(th_db as f64 / 10.0);
        let q = |b: f64| MomentQuery {
            order_b: Complex64::new(b, 0.0),
            theta_backhaul: theta,
            theta_device: theta,
            variant: Variant::Hybrid,
            eval_path: EvalPath::DirectQuadrature,
        };
        let m1 = moments::moment_total(&q(1.0), &p).unwrap().value.re;
        let m2 = moments::moment_total(&q(2.0), &p).unwrap().value.re;
        let var = m2 - m1 * m1;
        if var > peak.0 {
            peak = (var, th_db);
        }
        println!("{th_db:>9} {m1:>10.4} {m2:>10.4} {var:>10.4}");
    }
    println!(
        "\nreliability is most uneven at {:+} dB (variance {:.4})",
        peak.1, peak.0
    );
}
