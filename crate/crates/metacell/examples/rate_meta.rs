//! Meta distribution of the data rate: the fraction of links that sustain
//! a 1 Gbit/s device target with reliability at least x, and how it
//! improves with the small-cell antenna array size (larger arrays mean
//! more beamforming gain on the mm-wave access hop).
//!
//! Run with: cargo run --release --example rate_meta

use metacell::metadist::{self, beta_ccdf, beta_fit, GilPelaezOptions};
use metacell::model::NetworkConfig;
use metacell::moments;
use num_complex::Complex64;

fn main() {
    let rates = (1e9, 1e9, 0.0); // device 1 Gbit/s, backhaul unconstrained
    let xs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();

    // Full inversion at the default array size.
    let p = NetworkConfig::default().to_params().unwrap();
    let curve = metadist::meta_rate(rates, &p, &xs, &GilPelaezOptions::default()).unwrap();
    println!("rate meta distribution at N = 10 elements (1 Gbit/s device target):");
    println!("  Q1 = {:.4}, Q2 = {:.4}", curve.m1, curve.m2);
    println!("  {:>5} {:>12} {:>12}", "x", "exact CCDF", "Beta CCDF");
    for (i, &x) in xs.iter().enumerate() {
        println!(
            "  {x:>5.1} {:>12.4} {:>12.4}",
            curve.ccdf_exact[i], curve.ccdf_beta[i]
        );
    }

    // Array-size trend via the cheap two-moment Beta approximation.
    println!("\nBeta-approximated CCDF vs array size:");
    print!("{:>5}", "x");
    let ns = [10u32, 20, 40, 50];
    for n in ns {
        print!(" {:>9}", format!("N={n}"));
    }
    println!();
    let mut curves = Vec::new();
    for n in ns {
        let mut cfg = NetworkConfig::default();
        cfg.small_tier.n_antenna_elements = n;
        let p = cfg.to_params().unwrap();
        let q1 = moments::rate_moment(Complex64::new(1.0, 0.0), rates, &p).unwrap().value.re;
        let q2 = moments::rate_moment(Complex64::new(2.0, 0.0), rates, &p).unwrap().value.re;
        let fit = beta_fit(q1, q2).unwrap();
        curves.push(
            xs.iter()
                .map(|&x| beta_ccdf(&fit, x).unwrap())
                .collect::<Vec<_>>(),
        );
    }
    for (i, &x) in xs.iter().enumerate() {
        print!("{x:>5.1}");
        for c in &curves {
            print!(" {:>9.4}", c[i]);
        }
        println!();
    }
    println!("\n(each column dominates the previous one: bigger arrays shift");
    println!(" the whole reliability distribution upward)");
}
