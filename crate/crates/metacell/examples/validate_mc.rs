//! Cross-validation: the analytic moment engine against the independent
//! Monte Carlo simulator. The simulation shares no approximation with the
//! analytics (it uses exact per-geometry success probabilities, not the
//! sectorized-gain/Alzer machinery), so agreement here is meaningful.
//!
//! Also prints two diagnostics the analytic model relies on: the
//! correlation between the backhaul and access success probabilities
//! (assumed independent in the dual-hop product) and the empirical meta
//! distribution against the Gil-Pelaez curve.
//!
//! Run with: cargo run --release --example validate_mc

use metacell::mcsim::{self, SimOptions, ThetaPair};
use metacell::metadist::{self, GilPelaezOptions};
use metacell::model::NetworkConfig;
use metacell::moments::{self, EvalPath, MomentQuery, Variant};
use num_complex::Complex64;

fn main() {
    let p = NetworkConfig::default().to_params().unwrap();
    let thetas_db = [-10.0, -5.0, 0.0, 5.0, 10.0];
    let pairs: Vec<ThetaPair> = thetas_db
        .iter()
        .map(|&db| {
            let t = 10f64.powf(db / 10.0);
            ThetaPair { theta_backhaul: t, theta_device: t }
        })
        .collect();
    let sim = SimOptions {
        realizations: 20_000,
        seed: 1,
        ..SimOptions::default()
    };
    let out = mcsim::run(&p, Variant::Hybrid, &pairs, &sim).unwrap();

    println!("moment cross-validation ({} realizations):", sim.realizations);
    println!(
        "{:>9} {:>12} {:>12} {:>10} {:>8}",
        "theta_dB", "analytic M1", "MC M1", "std err", "z"
    );
    for (k, &db) in thetas_db.iter().enumerate() {
        let theta = 10f64.powf(db / 10.0);
        let m1 = moments::moment_total(
            &MomentQuery {
                order_b: Complex64::new(1.0, 0.0),
                theta_backhaul: theta,
                theta_device: theta,
                variant: Variant::Hybrid,
                eval_path: EvalPath::DirectQuadrature,
            },
            &p,
        )
        .unwrap()
        .value
        .re;
        let (est, se) = mcsim::empirical_moment(&out.csp[k], 1.0, sim.blocks);
        println!(
            "{db:>9} {m1:>12.5} {est:>12.5} {se:>10.5} {:>8.2}",
            (est - m1) / se
        );
    }
    println!(
        "\nbackhaul/access CSP correlation: {:+.4} (dual-hop product assumes ~0)",
        out.corr_backhaul_access
    );

    // Distribution-level check at 0 dB.
    let xs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let curve =
        metadist::meta_sir(1.0, 1.0, &p, Variant::Hybrid, &xs, &GilPelaezOptions::default())
            .unwrap();
    let emp = mcsim::empirical_meta(&out.csp[2], &xs);
    println!("\nmeta distribution at 0 dB:");
    println!("  {:>5} {:>10} {:>10}", "x", "analytic", "simulated");
    for (i, &x) in xs.iter().enumerate() {
        println!("  {x:>5.1} {:>10.4} {:>10.4}", curve.ccdf_exact[i], emp[i]);
    }
}
