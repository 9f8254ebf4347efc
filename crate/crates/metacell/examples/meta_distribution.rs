//! The meta distribution of the SIR/SNR: what fraction of links in the
//! network achieves reliability at least x at a given decoding threshold.
//! Computes the exact Gil-Pelaez inversion and the two-moment Beta
//! approximation side by side, for the hybrid network and the all-sub-6GHz
//! baseline.
//!
//! Run with: cargo run --release --example meta_distribution

use metacell::metadist::{self, GilPelaezOptions};
use metacell::model::NetworkConfig;
use metacell::moments::Variant;

fn main() {
    let p = NetworkConfig::default().to_params().unwrap();
    let xs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let opts = GilPelaezOptions::default();

    for (label, variant) in [
        ("hybrid (mm-wave access, sub-6GHz backhaul)", Variant::Hybrid),
        ("all-sub-6GHz baseline", Variant::UWaveOnly),
    ] {
        println!("\n=== {label} ===");
        for th_db in [-10.0, 0.0, 10.0] {
            let theta = 10f64.powf(th_db / 10.0);
            let curve =
                metadist::meta_sir(theta, theta, &p, variant, &xs, &opts).unwrap();
            println!(
                "\n  threshold {th_db:+.0} dB: M1 = {:.4}, M2 = {:.4}{}",
                curve.m1,
                curve.m2,
                match curve.beta {
                    Some(f) => format!(", Beta fit (a = {:.3}, b = {:.3})", f.a, f.b),
                    None => ", Beta fit degenerate".into(),
                }
            );
            println!("  {:>6} {:>12} {:>12}", "x", "exact CCDF", "Beta CCDF");
            for (i, &x) in xs.iter().enumerate() {
                let beta = curve
                    .ccdf_beta
                    .get(i)
                    .map(|v| format!("{v:>12.4}"))
                    .unwrap_or_else(|| format!("{:>12}", "-"));
                println!("  {x:>6.1} {:>12.4} {beta}", curve.ccdf_exact[i]);
            }
        }
    }
}
