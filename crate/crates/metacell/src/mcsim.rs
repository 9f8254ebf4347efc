//! Monte Carlo simulation of the two-tier network: an independent oracle
//! for the analytic moment and meta-distribution machinery.
//!
//! Each realization drops both tiers as Poisson processes on discs around
//! a typical device at the origin, applies the LOS-ball blockage thinning
//! to the small-cell tier, associates the device by maximum biased average
//! received power, and then computes the *conditional* success probability
//! of the resulting link(s) in closed form given the geometry:
//! Rayleigh-fading SIR products for the sub-6GHz links and the exact
//! normalized-gamma survival function for the mm-wave access SNR (no Alzer
//! bound — the simulation deliberately shares no approximation with the
//! analytic path). The population of per-realization CSPs then yields
//! empirical moments and the empirical meta distribution.
//!
//! Reproducibility: realization `i` uses a counter-based ChaCha8 stream
//! `i + 1` derived from the master seed, so results are independent of
//! thread scheduling and realization count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::model::Params;
use crate::moments::Variant;
use crate::specfun;
use crate::{MetaError, Result};

use std::f64::consts::PI;

/// Simulation controls.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub realizations: usize,
    pub seed: u64,
    /// Disc radius per tier is `radius_multiplier / sqrt(density)`, also
    /// at least ten LOS-ball radii for the small-cell tier.
    pub radius_multiplier: f64,
    /// Block count for jackknife standard errors.
    pub blocks: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            realizations: 20_000,
            seed: 1,
            radius_multiplier: 30.0,
            blocks: 100,
        }
    }
}

/// Threshold pair evaluated in one pass.
#[derive(Debug, Clone, Copy)]
pub struct ThetaPair {
    pub theta_backhaul: f64,
    pub theta_device: f64,
}

/// How often the device ended up on each link type.
#[derive(Debug, Clone, Copy, Default)]
pub struct AssocCounts {
    pub direct: usize,
    pub access_los: usize,
    pub access_nlos: usize,
}

/// Output of a simulation run.
#[derive(Debug, Clone)]
pub struct SimOutput {
    /// `csp[k][i]` = conditional success probability of realization `i`
    /// at threshold pair `k`.
    pub csp: Vec<Vec<f64>>,
    pub assoc: AssocCounts,
    /// Realizations redrawn because the macro tier came up empty.
    pub resampled_empty: usize,
    /// Pearson correlation between the backhaul and access CSP factors at
    /// the first threshold pair, over SBS-served realizations (diagnostic
    /// for the independence assumption behind the dual-hop product).
    pub corr_backhaul_access: f64,
}

/// One sampled network geometry around the typical device.
pub struct Realization {
    /// Macro-tier distances from the origin, meters.
    pub mbs: Vec<(f64, f64)>,
    /// Visible small-tier points: position and LOS mark.
    pub sbs: Vec<(f64, f64, bool)>,
    pub resamples: usize,
}

fn draw_disc(rng: &mut impl Rng, radius: f64) -> (f64, f64) {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    (r * phi.cos(), r * phi.sin())
}

fn poisson_count(rng: &mut impl Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

/// Sample one geometry. The macro tier is guaranteed non-empty (empty
/// draws are redrawn and counted — the typical device always has some
/// serving candidate in the infinite process).
pub fn sample_realization(p: &Params, variant: Variant, rng: &mut impl Rng, opts: &SimOptions) -> Realization {
    let r1 = opts.radius_multiplier / p.lambda1.sqrt();
    let r2 = (opts.radius_multiplier / p.lambda2.sqrt()).max(10.0 * p.d);
    let mut resamples = 0usize;
    loop {
        let n1 = poisson_count(rng, p.lambda1 * PI * r1 * r1);
        let n2 = poisson_count(rng, p.lambda2 * PI * r2 * r2);
        let mbs: Vec<(f64, f64)> = (0..n1).map(|_| draw_disc(rng, r1)).collect();
        let mut sbs = Vec::with_capacity(n2);
        for _ in 0..n2 {
            let (x, y) = draw_disc(rng, r2);
            let r = (x * x + y * y).sqrt();
            match variant {
                Variant::UWaveOnly => sbs.push((x, y, false)),
                _ => {
                    // LOS-ball blockage thinning: inside the ball a point
                    // is visible (LOS) w.p. p_los, outside it is visible
                    // (NLOS) w.p. p_nlos; otherwise it is blocked.
                    let u: f64 = rng.gen();
                    if r < p.d {
                        if u < p.p_los {
                            sbs.push((x, y, true));
                        }
                    } else if u < p.p_nlos {
                        sbs.push((x, y, false));
                    }
                }
            }
        }
        if mbs.is_empty() {
            resamples += 1;
            continue;
        }
        return Realization { mbs, sbs, resamples };
    }
}

fn dist(a: (f64, f64)) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}

/// Interference sources beyond the simulated window, folded in exactly in
/// expectation: conditioned on the in-window geometry, the unobserved far
/// field is still a Poisson process, so its Rayleigh-SIR contribution to
/// the CSP is the probability generating functional
/// `exp(-2 pi lambda int_R^inf (1 - 1/(1 + theta l0 r^{-alpha})) r dr)`,
/// whose leading term is used (the integrand is already O((r0/R)^alpha)).
/// This removes the window-truncation bias instead of asking for an
/// impractically large disc.
#[derive(Debug, Clone, Copy)]
pub struct FarField {
    pub lambda: f64,
    pub radius: f64,
}

impl FarField {
    fn log_factor(&self, theta: f64, loss_serving: f64, alpha: f64) -> f64 {
        -2.0 * PI * self.lambda * theta * loss_serving * self.radius.powf(2.0 - alpha)
            / (alpha - 2.0)
    }
}

/// Rayleigh-SIR conditional success probability given the geometry:
/// `prod_i 1 / (1 + theta * loss_serving / loss_i)` over interferer path
/// losses `loss = r^alpha`.
pub fn csp_sir_rayleigh(theta: f64, loss_serving: f64, interferer_losses: &[f64]) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    let mut csp = 1.0;
    for &li in interferer_losses {
        csp /= 1.0 + theta * loss_serving / li;
    }
    csp
}

/// Direct-link CSP: the device decodes its MBS against the rest of the
/// macro tier.
pub fn csp_direct(
    theta: f64,
    serving_idx: usize,
    mbs: &[(f64, f64)],
    alpha1: f64,
    far: Option<FarField>,
) -> f64 {
    let l0 = dist(mbs[serving_idx]).powf(alpha1);
    let mut csp = 1.0;
    for (i, &pt) in mbs.iter().enumerate() {
        if i != serving_idx {
            csp /= 1.0 + theta * l0 / dist(pt).powf(alpha1);
        }
    }
    if let Some(f) = far {
        csp *= f.log_factor(theta, l0, alpha1).exp();
    }
    csp
}

/// Backhaul CSP of an SBS at `sbs_pos`: sub-6GHz Rayleigh SIR from its
/// nearest MBS against the other macro stations, measured at the SBS.
pub fn csp_backhaul(
    theta: f64,
    sbs_pos: (f64, f64),
    mbs: &[(f64, f64)],
    alpha1: f64,
    far: Option<FarField>,
) -> f64 {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for (i, &m) in mbs.iter().enumerate() {
        let d = ((m.0 - sbs_pos.0).powi(2) + (m.1 - sbs_pos.1).powi(2)).sqrt();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    let l0 = best_d.powf(alpha1);
    let mut csp = 1.0;
    for (i, &m) in mbs.iter().enumerate() {
        if i != best {
            let d = ((m.0 - sbs_pos.0).powi(2) + (m.1 - sbs_pos.1).powi(2)).sqrt();
            csp /= 1.0 + theta * l0 / d.powf(alpha1);
        }
    }
    if let Some(f) = far {
        // The window is centered on the device, not the SBS, but the SBS
        // sits within a couple of cell radii of the origin while the window
        // edge is tens of mean cell spacings away, so the origin-centered
        // correction is accurate to higher order.
        csp *= f.log_factor(theta, l0, alpha1).exp();
    }
    csp
}

/// mm-wave access CSP: exact Nakagami-m SNR survival
/// `Gamma(m, m nu / Omega) / Gamma(m)` with
/// `nu = theta sigma^2 r^alpha / (P2 G2 [zeta2])`.
pub fn csp_access(theta: f64, r: f64, los: bool, p: &Params) -> Result<f64> {
    let (m, omega, alpha) = if los {
        (p.m_los, p.omega_los, p.alpha2_los)
    } else {
        (p.m_nlos, p.omega_nlos, p.alpha2_nlos)
    };
    let nu = theta * p.nu_dot() * r.powf(alpha);
    specfun::upper_gamma_ratio(m, m as f64 * nu / omega)
}

/// mm-wave backhaul CSP (mm-wave-backhaul variant): noise-limited link
/// from the nearest MBS with arrays on both ends.
fn csp_backhaul_mmwave(theta: f64, sbs_pos: (f64, f64), mbs: &[(f64, f64)], p: &Params) -> Result<f64> {
    let r = mbs
        .iter()
        .map(|&m| ((m.0 - sbs_pos.0).powi(2) + (m.1 - sbs_pos.1).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    let (m, omega, alpha) = if r < p.d {
        (p.m_los, p.omega_los, p.alpha2_los)
    } else {
        (p.m_nlos, p.omega_nlos, p.alpha2_nlos)
    };
    let mut den = p.p1 * p.g2_max * p.g2_max;
    if p.include_near_field_in_snr {
        den *= p.zeta2;
    }
    let nu = theta * p.noise_sigma2 * r.powf(alpha) / den;
    specfun::upper_gamma_ratio(m, m as f64 * nu / omega)
}

enum Serving {
    Direct(usize),
    SmallCell(usize),
}

/// Biased-average-power association over the sampled geometry.
fn associate(rz: &Realization, p: &Params, variant: Variant) -> Serving {
    // Only ratios matter; weight = P B G zeta / r^alpha per candidate.
    let w1_num = match variant {
        Variant::UWaveOnly => p.p1 * p.b1,
        _ => p.p1 * p.b1 * p.g1() * p.zeta1,
    };
    let w2_num = match variant {
        Variant::UWaveOnly => p.p2 * p.b2,
        _ => p.p2 * p.b2 * p.g2() * p.zeta2,
    };
    let mut best_w = f64::NEG_INFINITY;
    let mut serving = Serving::Direct(0);
    for (i, &m) in rz.mbs.iter().enumerate() {
        let w = w1_num / dist(m).powf(p.alpha1);
        if w > best_w {
            best_w = w;
            serving = Serving::Direct(i);
        }
    }
    for (i, &(x, y, los)) in rz.sbs.iter().enumerate() {
        let alpha = match variant {
            Variant::UWaveOnly => p.alpha2_nlos,
            _ if los => p.alpha2_los,
            _ => p.alpha2_nlos,
        };
        let w = w2_num / dist((x, y)).powf(alpha);
        if w > best_w {
            best_w = w;
            serving = Serving::SmallCell(i);
        }
    }
    serving
}

/// Per-realization accumulator.
struct RealizationOutcome {
    csp: Vec<f64>,
    assoc: AssocCounts,
    resamples: usize,
    /// (backhaul, access) CSP factors at the first threshold pair when
    /// SBS-served.
    hop_pair: Option<(f64, f64)>,
}

fn simulate_one(
    index: usize,
    p: &Params,
    variant: Variant,
    thetas: &[ThetaPair],
    opts: &SimOptions,
) -> Result<RealizationOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64 + 1);
    let rz = sample_realization(p, variant, &mut rng, opts);
    let far1 = Some(FarField {
        lambda: p.lambda1,
        radius: opts.radius_multiplier / p.lambda1.sqrt(),
    });
    let serving = associate(&rz, p, variant);
    let mut assoc = AssocCounts::default();
    let mut csp = Vec::with_capacity(thetas.len());
    let mut hop_pair = None;
    match serving {
        Serving::Direct(i) => {
            assoc.direct = 1;
            let alpha = p.alpha1;
            for th in thetas {
                csp.push(csp_direct(th.theta_device, i, &rz.mbs, alpha, far1));
            }
        }
        Serving::SmallCell(i) => {
            let (x, y, los) = rz.sbs[i];
            if los {
                assoc.access_los = 1;
            } else {
                assoc.access_nlos = 1;
            }
            for (k, th) in thetas.iter().enumerate() {
                let bh = match variant {
                    Variant::MmWaveBackhaul => {
                        csp_backhaul_mmwave(th.theta_backhaul, (x, y), &rz.mbs, p)?
                    }
                    _ => csp_backhaul(th.theta_backhaul, (x, y), &rz.mbs, p.alpha1, far1),
                };
                let acc = match variant {
                    Variant::UWaveOnly => {
                        // Own-tier SIR on orthogonal sub-6GHz spectrum.
                        let r0 = dist((x, y)).powf(p.alpha2_nlos);
                        let losses: Vec<f64> = rz
                            .sbs
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, &(sx, sy, _))| dist((sx, sy)).powf(p.alpha2_nlos))
                            .collect();
                        let far2 = FarField {
                            lambda: p.lambda2,
                            radius: (opts.radius_multiplier / p.lambda2.sqrt()).max(10.0 * p.d),
                        };
                        csp_sir_rayleigh(th.theta_device, r0, &losses)
                            * far2.log_factor(th.theta_device, r0, p.alpha2_nlos).exp()
                    }
                    _ => csp_access(th.theta_device, dist((x, y)), los, p)?,
                };
                if k == 0 {
                    hop_pair = Some((bh, acc));
                }
                csp.push(bh * acc);
            }
        }
    }
    Ok(RealizationOutcome {
        csp,
        assoc,
        resamples: rz.resamples,
        hop_pair,
    })
}

/// Run the simulation: every threshold pair is evaluated on every
/// realization in one geometry pass.
pub fn run(p: &Params, variant: Variant, thetas: &[ThetaPair], opts: &SimOptions) -> Result<SimOutput> {
    if thetas.is_empty() {
        return Err(MetaError::Precondition("need at least one threshold pair".into()));
    }
    if opts.realizations == 0 {
        return Err(MetaError::Precondition("need at least one realization".into()));
    }
    let outcomes: Vec<RealizationOutcome> = (0..opts.realizations)
        .into_par_iter()
        .map(|i| simulate_one(i, p, variant, thetas, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut csp = vec![Vec::with_capacity(opts.realizations); thetas.len()];
    let mut assoc = AssocCounts::default();
    let mut resampled_empty = 0usize;
    let mut pairs = Vec::new();
    for o in &outcomes {
        for (k, &v) in o.csp.iter().enumerate() {
            csp[k].push(v);
        }
        assoc.direct += o.assoc.direct;
        assoc.access_los += o.assoc.access_los;
        assoc.access_nlos += o.assoc.access_nlos;
        resampled_empty += o.resamples;
        if let Some(hp) = o.hop_pair {
            pairs.push(hp);
        }
    }
    Ok(SimOutput {
        csp,
        assoc,
        resampled_empty,
        corr_backhaul_access: pearson(&pairs),
    })
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return 0.0;
    }
    let (mx, my) = pairs
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (mx / n, my / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Empirical estimate of `E[CSP^b]` with a block-jackknife standard error.
pub fn empirical_moment(samples: &[f64], b: f64, blocks: usize) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let powered: Vec<f64> = samples.iter().map(|&s| s.powf(b)).collect();
    let est = powered.iter().sum::<f64>() / n as f64;
    let nb = blocks.clamp(2, n);
    let mut block_means = Vec::with_capacity(nb);
    for c in powered.chunks(n.div_ceil(nb)) {
        block_means.push(c.iter().sum::<f64>() / c.len() as f64);
    }
    let bm = block_means.iter().sum::<f64>() / block_means.len() as f64;
    let var = block_means.iter().map(|&m| (m - bm) * (m - bm)).sum::<f64>()
        / (block_means.len().saturating_sub(1)) as f64;
    let se = (var / block_means.len() as f64).sqrt();
    (est, se)
}

/// Empirical meta distribution: fraction of realizations whose CSP
/// exceeds each grid point.
pub fn empirical_meta(samples: &[f64], xs: &[f64]) -> Vec<f64> {
    let n = samples.len().max(1) as f64;
    xs.iter()
        .map(|&x| samples.iter().filter(|&&s| s > x).count() as f64 / n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NetworkConfig;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn defaults() -> Params {
        NetworkConfig::default().to_params().unwrap()
    }

    fn small_opts(n: usize) -> SimOptions {
        SimOptions {
            realizations: n,
            seed: 7,
            ..SimOptions::default()
        }
    }

    #[test]
    fn deterministic_under_reruns_and_parallelism() {
        let p = defaults();
        let th = [ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 }];
        let a = run(&p, Variant::Hybrid, &th, &small_opts(500)).unwrap();
        let b = run(&p, Variant::Hybrid, &th, &small_opts(500)).unwrap();
        assert_eq!(a.csp[0], b.csp[0]);
        // Prefix stability: the first realizations do not depend on how
        // many are requested (counter-based streams).
        let c = run(&p, Variant::Hybrid, &th, &small_opts(200)).unwrap();
        assert_eq!(&a.csp[0][..200], &c.csp[0][..]);
    }

    #[test]
    fn conditional_csp_matches_brute_force_fading() {
        // Fix a tiny geometry and check the closed-form conditional CSPs
        // against direct fading simulation.
        let mbs = vec![(100.0, 0.0), (0.0, 300.0), (-400.0, -100.0)];
        let alpha = 4.0;
        let theta = 1.3;
        let analytic = csp_direct(theta, 0, &mbs, alpha, None);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 400_000;
        let mut hits = 0usize;
        let l0 = dist(mbs[0]).powf(alpha);
        for _ in 0..trials {
            let h0: f64 = -rng.gen::<f64>().ln(); // Exp(1)
            let i: f64 = mbs[1..]
                .iter()
                .map(|&m| -rng.gen::<f64>().ln() / dist(m).powf(alpha))
                .sum();
            if h0 / l0 > theta * i {
                hits += 1;
            }
        }
        let emp = hits as f64 / trials as f64;
        assert!(
            (emp - analytic).abs() < 4.0 * (analytic * (1.0 - analytic) / trials as f64).sqrt() + 1e-3,
            "empirical {emp} vs analytic {analytic}"
        );
    }

    #[test]
    fn access_csp_matches_gamma_sampling() {
        let p = defaults();
        let r = 120.0;
        let theta = 2.0;
        let analytic = csp_access(theta, r, true, &p).unwrap();
        // Nakagami-m power fading = Gamma(shape m, mean Omega).
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gamma = rand_distr::Gamma::new(p.m_los as f64, p.omega_los / p.m_los as f64).unwrap();
        let nu = theta * p.nu_dot() * r.powf(p.alpha2_los);
        let trials = 400_000;
        let hits = (0..trials).filter(|_| gamma.sample(&mut rng) > nu).count();
        let emp = hits as f64 / trials as f64;
        assert!((emp - analytic).abs() < 4.0 * (analytic * (1.0 - analytic) / trials as f64).sqrt() + 1e-3);
    }

    #[test]
    fn association_frequencies_match_analytics() {
        let p = defaults();
        let th = [ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 }];
        let out = run(&p, Variant::Hybrid, &th, &small_opts(20_000)).unwrap();
        let n = 20_000.0;
        // Frozen analytic association probabilities at defaults.
        let a1 = 1.7668642783e-3;
        let a2l = 0.9981890000;
        let se = |pr: f64| (pr * (1.0 - pr) / n).sqrt();
        assert!(
            ((out.assoc.direct as f64 / n) - a1).abs() < 4.0 * se(a1) + 1e-4,
            "direct fraction {}",
            out.assoc.direct as f64 / n
        );
        assert!(((out.assoc.access_los as f64 / n) - a2l).abs() < 4.0 * se(a2l) + 1e-3);
    }

    #[test]
    fn moment_estimate_matches_analytics() {
        let p = defaults();
        let th = [
            ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 },
            ThetaPair { theta_backhaul: 10.0, theta_device: 10.0 },
        ];
        let opts = small_opts(20_000);
        let out = run(&p, Variant::Hybrid, &th, &opts).unwrap();
        for (k, want) in [(0usize, 0.5608431308f64), (1, 0.2013790684)] {
            let (est, se) = empirical_moment(&out.csp[k], 1.0, opts.blocks);
            assert!(
                (est - want).abs() < 4.0 * se + 0.01,
                "theta index {k}: estimate {est} +- {se} vs analytic {want}"
            );
        }
    }

    #[test]
    fn window_doubling_invariance() {
        // Doubling the simulation window must not shift the estimate by
        // more than statistical noise (far-field truncation is negligible).
        let p = defaults();
        let th = [ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 }];
        let base = small_opts(6_000);
        let wide = SimOptions { radius_multiplier: 60.0, ..base };
        let (m_base, se_base) = {
            let o = run(&p, Variant::Hybrid, &th, &base).unwrap();
            empirical_moment(&o.csp[0], 1.0, base.blocks)
        };
        let (m_wide, se_wide) = {
            let o = run(&p, Variant::Hybrid, &th, &wide).unwrap();
            empirical_moment(&o.csp[0], 1.0, wide.blocks)
        };
        let se = (se_base * se_base + se_wide * se_wide).sqrt();
        assert!(
            (m_base - m_wide).abs() < 4.0 * se + 5e-3,
            "{m_base} vs {m_wide} (se {se})"
        );
    }

    #[test]
    fn empirical_meta_is_monotone_and_bounded() {
        let p = defaults();
        let th = [ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 }];
        let out = run(&p, Variant::Hybrid, &th, &small_opts(5_000)).unwrap();
        let xs: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        let ccdf = empirical_meta(&out.csp[0], &xs);
        let mut prev = 1.0 + 1e-12;
        for v in ccdf {
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn uwave_variant_moment_matches_analytics() {
        let p = defaults();
        let th = [ThetaPair { theta_backhaul: 1.0, theta_device: 1.0 }];
        let opts = small_opts(20_000);
        let out = run(&p, Variant::UWaveOnly, &th, &opts).unwrap();
        let (est, se) = empirical_moment(&out.csp[0], 1.0, opts.blocks);
        let want = 0.3764008831;
        assert!(
            (est - want).abs() < 4.0 * se + 0.01,
            "uwave estimate {est} +- {se} vs {want}"
        );
    }

    #[test]
    fn empirical_moment_machinery() {
        let samples: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let (est, se) = empirical_moment(&samples, 1.0, 100);
        assert_relative_eq!(est, 0.5, epsilon = 1e-12);
        assert!(se > 0.0 && se < 0.05);
        let (est2, _) = empirical_moment(&samples, 2.0, 100);
        assert_relative_eq!(est2, 1.0 / 3.0, epsilon = 1e-4);
        let ccdf = empirical_meta(&samples, &[0.25, 0.75]);
        assert_relative_eq!(ccdf[0], 0.75, epsilon = 1e-3);
        assert_relative_eq!(ccdf[1], 0.25, epsilon = 1e-3);
    }

    #[test]
    fn resampling_is_counted_for_sparse_macro_tier() {
        let mut cfg = NetworkConfig::default();
        cfg.macro_tier.density_per_km2 = 2.0;
        let p = cfg.to_params().unwrap();
        // Tiny window: mean MBS count ~0.008, so nearly every realization
        // needs redraws.
        let opts = SimOptions {
            realizations: 50,
            seed: 3,
            radius_multiplier: 0.05,
            blocks: 10,
        };
        let th = [ThetaPair { theta_backhaul: 0.5, theta_device: 0.5 }];
        let out = run(&p, Variant::Hybrid, &th, &opts).unwrap();
        assert!(out.resampled_empty > 50);
        assert_eq!(out.csp[0].len(), 50);
    }
}
