//! Tier-association probabilities: how likely the typical device is to be
//! served directly by a macro station versus through a LOS/NLOS small
//! cell, as the small-cell density grows — closed form against adaptive
//! quadrature, plus a Monte Carlo spot check.
//!
//! Run with: cargo run --release --example association

use metacell::assoc;
use metacell::mcsim::{self, SimOptions, ThetaPair};
use metacell::model::NetworkConfig;
use metacell::moments::Variant;

fn main() {
    println!("SBS density sweep (per km^2), default configuration otherwise\n");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>14}",
        "lambda2", "direct", "sbs_los", "sbs_nlos", "closed-form A1"
    );
    for lam2 in [5.0, 10.0, 20.0, 40.0, 70.0, 100.0, 150.0] {
        let mut cfg = NetworkConfig::default();
        cfg.small_tier.density_per_km2 = lam2;
        let p = cfg.to_params().unwrap();
        let a = assoc::assoc_probs(&p).unwrap();
        let cf = assoc::closed_form_a1(&p).unwrap();
        println!(
            "{lam2:>8} {:>12.6} {:>12.6} {:>12.6} {cf:>14.6}",
            a.a1, a.a2_los, a.a2_nlos
        );
    }

    // Monte Carlo agreement at the default operating point.
    let p = NetworkConfig::default().to_params().unwrap();
    let a = assoc::assoc_probs(&p).unwrap();
    let sim = SimOptions {
        realizations: 20_000,
        ..SimOptions::default()
    };
    let th = [ThetaPair {
        theta_backhaul: 1.0,
        theta_device: 1.0,
    }];
    let out = mcsim::run(&p, Variant::Hybrid, &th, &sim).unwrap();
    let n = sim.realizations as f64;
    println!("\nMonte Carlo check at the default point ({} realizations):", sim.realizations);
    for (name, (mc, an)) in [
        ("direct ", (out.assoc.direct as f64 / n, a.a1)),
        ("SBS LOS", (out.assoc.access_los as f64 / n, a.a2_los)),
        ("SBS NLOS", (out.assoc.access_nlos as f64 / n, a.a2_nlos)),
    ] {
        println!("  {name}: simulated {mc:.6} vs analytic {an:.6}");
    }
}
