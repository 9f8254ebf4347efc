//! Mean local delay (expected number of transmission attempts until the
//! first success, M_{-1}) and network jitter (its across-network
//! variance). On the hybrid network the delay saturates almost immediately
//! in the small-cell density: the noise-limited mm-wave access hop is so
//! reliable that the sub-6GHz backhaul dominates, pinning the delay near
//! its single-link limit 1/(1 - theta). The all-sub-6GHz baseline keeps a
//! visibly larger, interference-limited delay.
//!
//! Run with: cargo run --release --example local_delay

use metacell::model::NetworkConfig;
use metacell::moments::{self, EvalPath, MomentQuery, Variant};
use num_complex::Complex64;

fn main() {
    let th_db = -10.0;
    let theta = 10f64.powf(th_db / 10.0);
    println!("threshold {th_db} dB; backhaul-limit delay 1/(1-theta) = {:.4}\n", 1.0 / (1.0 - theta));
    println!(
        "{:>8} {:>14} {:>12} {:>16}",
        "lambda2", "hybrid delay", "jitter", "sub-6GHz delay"
    );
    for lam2 in [20.0, 40.0, 70.0, 100.0, 150.0] {
        let mut cfg = NetworkConfig::default();
        cfg.small_tier.density_per_km2 = lam2;
        let p = cfg.to_params().unwrap();
        let d = moments::mean_local_delay(theta, theta, &p).unwrap();
        let j = moments::network_jitter(theta, theta, &p).unwrap();
        let uw = moments::moment_total(
            &MomentQuery {
                order_b: Complex64::new(-1.0, 0.0),
                theta_backhaul: theta,
                theta_device: theta,
                variant: Variant::UWaveOnly,
                eval_path: EvalPath::Series,
            },
            &p,
        )
        .unwrap();
        let fmt = |part: &moments::MomentResult| {
            if part.diverged {
                "divergent".to_string()
            } else {
                format!("{:.6}", part.value.re)
            }
        };
        println!(
            "{lam2:>8} {:>14} {:>12.6} {:>16}",
            fmt(&d),
            j.value.re,
            fmt(&uw)
        );
    }

    // The delay genuinely diverges once the threshold is too aggressive:
    // at theta >= 1 a Rayleigh backhaul link cannot keep a finite mean
    // retry count.
    let p = NetworkConfig::default().to_params().unwrap();
    let d = moments::mean_local_delay(1.5, 1.5, &p).unwrap();
    println!(
        "\nat theta = 1.5 the mean local delay {}",
        if d.diverged { "diverges (as it must)" } else { "is finite (unexpected)" }
    );
}
