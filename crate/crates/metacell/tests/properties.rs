//! Randomized invariant tests: configuration round trips, association
//! normalization, Beta-fit round trips, moment orderings and the
//! characteristic-function bound, over generated parameter ranges.

use metacell::metadist::{beta_ccdf, beta_fit};
use metacell::model::NetworkConfig;
use metacell::moments::{self, EvalPath, MomentQuery, Variant};
use metacell::{assoc, cli, mcsim};
use num_complex::Complex64;
use proptest::prelude::*;

/// A valid configuration drawn from broad physical ranges.
fn arb_config() -> impl Strategy<Value = NetworkConfig> {
    (
        0.5f64..8.0,    // lambda1 per km^2
        5.0f64..200.0,  // lambda2 per km^2
        30.0f64..400.0, // LOS ball radius
        0.2f64..1.0,    // p_los
        0.05f64..1.0,   // p_nlos
        1u32..64,       // antenna elements
        30.0f64..45.0,  // SBS power dBm
        3.0f64..4.5,    // alpha1
        3.0f64..4.5,    // alpha2 NLOS
    )
        .prop_map(
            |(l1, l2, d, pl, pn, n, p2, a1, a2n)| {
                let mut cfg = NetworkConfig::default();
                cfg.macro_tier.density_per_km2 = l1;
                cfg.small_tier.density_per_km2 = l2;
                cfg.mmwave.los_ball_d_m = d;
                cfg.mmwave.p_los = pl;
                cfg.mmwave.p_nlos = pn;
                cfg.small_tier.n_antenna_elements = n;
                cfg.small_tier.power_dbm = p2;
                cfg.macro_tier.ple_alpha1 = a1;
                cfg.small_tier.ple_alpha_nlos = a2n;
                cfg
            },
        )
}

proptest! {
    /// Human units -> SI -> human units is the identity.
    #[test]
    fn config_unit_round_trip(cfg in arb_config()) {
        let p = cfg.to_params().unwrap();
        let back = NetworkConfig::from_params(&p);
        prop_assert!((back.macro_tier.density_per_km2 - cfg.macro_tier.density_per_km2).abs()
            <= 1e-9 * cfg.macro_tier.density_per_km2);
        prop_assert!((back.small_tier.power_dbm - cfg.small_tier.power_dbm).abs() <= 1e-9);
        prop_assert!((back.mmwave.los_ball_d_m - cfg.mmwave.los_ball_d_m).abs() <= 1e-9);
        prop_assert!((p.a_hat * p.a_bar - 1.0).abs() <= 1e-12);
    }

    /// Association probabilities are a distribution over the three outcomes.
    #[test]
    fn association_is_a_distribution(cfg in arb_config()) {
        let p = cfg.to_params().unwrap();
        let a = assoc::assoc_probs(&p).unwrap();
        prop_assert!(a.a1 >= 0.0 && a.a2_los >= 0.0 && a.a2_nlos >= 0.0);
        prop_assert!((a.a1 + a.a2_los + a.a2_nlos - 1.0).abs() <= 1e-6);
    }

    /// Beta shapes survive the moment round trip, and the fitted CCDF is
    /// monotone with the right endpoints.
    #[test]
    fn beta_fit_round_trip(a in 0.05f64..50.0, b in 0.05f64..50.0) {
        let m1 = a / (a + b);
        let m2 = m1 * (a + 1.0) / (a + b + 1.0);
        let fit = beta_fit(m1, m2).unwrap();
        prop_assert!((fit.a - a).abs() <= 1e-6 * a.max(1.0), "a: {} vs {}", fit.a, a);
        prop_assert!((fit.b - b).abs() <= 1e-6 * b.max(1.0), "b: {} vs {}", fit.b, b);
        let mut prev = 1.0f64;
        for i in 0..=20 {
            let v = beta_ccdf(&fit, i as f64 / 20.0).unwrap();
            prop_assert!(v <= prev + 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&v));
            prev = v;
        }
    }

    /// Empirical moment machinery obeys the same ordering as the analytic
    /// moments for any sample set on [0, 1].
    #[test]
    fn empirical_moment_ordering(samples in prop::collection::vec(0.0f64..=1.0, 2..200)) {
        let (m1, _) = mcsim::empirical_moment(&samples, 1.0, 10);
        let (m2, _) = mcsim::empirical_moment(&samples, 2.0, 10);
        let (m0, _) = mcsim::empirical_moment(&samples, 0.0, 10);
        prop_assert!((m0 - 1.0).abs() <= 1e-12);
        prop_assert!(m1 * m1 <= m2 + 1e-12);
        prop_assert!(m2 <= m1 + 1e-12);
        let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let ccdf = mcsim::empirical_meta(&samples, &xs);
        prop_assert!(ccdf.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    /// Grid parsing produces the advertised endpoints and count.
    #[test]
    fn grid_parse_contract(start in -100.0f64..100.0, span in 0.001f64..100.0, n in 2usize..50) {
        let stop = start + span;
        let spec = format!("{start}:{stop}:{n}");
        let g = cli::parse_grid(&spec).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert!((g[0] - start).abs() <= 1e-9 * (1.0 + start.abs()));
        prop_assert!((g[n - 1] - stop).abs() <= 1e-6 * (1.0 + stop.abs()));
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    // The quadrature-backed moment properties are much more expensive per
    // case; a handful of random cases on top of the deterministic
    // acceptance grid is enough.
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    /// Backhaul SIR moments: M_0 = 1, the characteristic-function bound,
    /// and monotonicity in both the order and the threshold.
    #[test]
    fn backhaul_moment_invariants(theta in 0.01f64..50.0, t in 0.1f64..100.0, alpha in 2.5f64..5.0) {
        let m0 = moments::moment_backhaul(Complex64::new(0.0, 0.0), theta, alpha).unwrap();
        prop_assert!((m0.value.re - 1.0).abs() <= 1e-10);
        let mjt = moments::moment_backhaul(Complex64::new(0.0, t), theta, alpha).unwrap();
        prop_assert!(mjt.value.norm() <= 1.0 + 1e-9);
        let mut prev = 1.0 + 1e-12;
        for b in [0.5, 1.0, 2.0, 4.0] {
            let m = moments::moment_backhaul(Complex64::new(b, 0.0), theta, alpha).unwrap();
            prop_assert!(m.value.re <= prev && m.value.re >= 0.0);
            prev = m.value.re;
        }
    }

    /// Total-moment ordering and bound at random thresholds.
    #[test]
    fn total_moment_invariants(theta_db in -12.0f64..12.0, t in 0.2f64..30.0) {
        let p = NetworkConfig::default().to_params().unwrap();
        let theta = 10f64.powf(theta_db / 10.0);
        let q = |b: Complex64| MomentQuery {
            order_b: b,
            theta_backhaul: theta,
            theta_device: theta,
            variant: Variant::Hybrid,
            eval_path: EvalPath::DirectQuadrature,
        };
        let m1 = moments::moment_total(&q(Complex64::new(1.0, 0.0)), &p).unwrap().value.re;
        let m2 = moments::moment_total(&q(Complex64::new(2.0, 0.0)), &p).unwrap().value.re;
        prop_assert!(0.0 < m2 && m2 <= m1 && m1 < 1.0);
        prop_assert!(m1 * m1 <= m2 + 1e-10);
        let mjt = moments::imaginary_moment(t, theta, theta, &p, Variant::Hybrid).unwrap();
        prop_assert!(mjt.norm() <= 1.0 + 1e-9);
    }
}
