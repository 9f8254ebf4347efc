//! From moments to distribution: Gil-Pelaez inversion of the imaginary
//! moments `M_jt` into the CCDF of the conditional success probability
//! (the meta distribution), and the two-moment Beta approximation.
//!
//! The inversion formula is
//!
//! `F_bar(x) = 1/2 + (1/pi) int_0^inf Im(e^{-jt ln x} M_jt) / t dt`.
//!
//! The expensive part — evaluating `M_jt` — is independent of `x`, so the
//! inverter caches the moment values at fixed quadrature nodes once (in
//! parallel) and reuses them for every point of the CCDF grid. The
//! integrand decays slowly and oscillates with frequency `|ln x - mu|`
//! (with `mu` the mean log-CSP), so plain truncation rings; instead the
//! cumulative panel sums are averaged over one full oscillation period at
//! the tail, which cancels the leading oscillatory remainder.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::Params;
use crate::moments::{self, Variant};
use crate::specfun;
use crate::{MetaError, Result};

use std::f64::consts::PI;

/// Tuning of the Gil-Pelaez inverter.
#[derive(Debug, Clone, Copy)]
pub struct GilPelaezOptions {
    /// Width of one cached integration panel in `t`.
    pub panel_width: f64,
    /// Truncation point of the outer integral.
    pub t_max: f64,
}

impl Default for GilPelaezOptions {
    fn default() -> Self {
        Self {
            panel_width: 0.5,
            t_max: 400.0,
        }
    }
}

/// 15-point Kronrod nodes/weights on [0, 1] used for each panel.
/// (Full rule, both halves, already shifted from [-1, 1].)
fn panel_nodes() -> [(f64, f64); 15] {
    const XGK: [f64; 8] = [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ];
    let mut out = [(0.0, 0.0); 15];
    let mut k = 0;
    for i in 0..8 {
        out[k] = (0.5 * (1.0 - XGK[i]), 0.5 * WGK[i]);
        k += 1;
        if XGK[i] != 0.0 {
            out[k] = (0.5 * (1.0 + XGK[i]), 0.5 * WGK[i]);
            k += 1;
        }
    }
    out
}

/// A cached Gil-Pelaez inverter: moment values at fixed nodes, reusable
/// across an arbitrary CCDF grid.
pub struct GilPelaezInverter {
    /// (t, weight * M_jt / t) per node, panel-major order.
    nodes: Vec<(f64, Complex64)>,
    nodes_per_panel: usize,
    panel_width: f64,
    /// Estimated mean log-CSP, used to pick the averaging window.
    mu_log: f64,
}

impl GilPelaezInverter {
    /// Build the node cache by evaluating the imaginary-moment function at
    /// every quadrature node (parallelized — this is the expensive step).
    pub fn build<F>(moment: F, opts: &GilPelaezOptions) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        if !(opts.panel_width > 0.0 && opts.t_max > opts.panel_width) {
            return Err(MetaError::Precondition(
                "panel_width must be positive and smaller than t_max".into(),
            ));
        }
        let base = panel_nodes();
        let n_panels = (opts.t_max / opts.panel_width).ceil() as usize;
        // Evaluate in chunks of panels so the cache can stop early once
        // |M_jt| has decayed to nothing: beyond that point the integrand
        // contributes < 1e-13 and — for strongly decaying moments — the
        // hypergeometric factors eventually leave their numerically
        // trustworthy range anyway.
        const CHUNK_PANELS: usize = 20;
        const NEGLIGIBLE: f64 = 1e-14;
        let mut nodes = Vec::with_capacity(n_panels * base.len());
        let mut prev_chunk_max = f64::INFINITY;
        for chunk_start in (0..n_panels).step_by(CHUNK_PANELS) {
            let chunk_end = (chunk_start + CHUNK_PANELS).min(n_panels);
            let ts: Vec<f64> = (chunk_start..chunk_end)
                .flat_map(|k| {
                    let lo = k as f64 * opts.panel_width;
                    let w = opts.panel_width;
                    base.iter().map(move |&(u, _)| lo + u * w)
                })
                .collect();
            let moments: Vec<Result<Complex64>> =
                ts.par_iter().map(|&t| moment(t)).collect();
            let mut chunk_max = 0.0f64;
            let mut failed = false;
            let mut chunk_nodes = Vec::with_capacity(ts.len());
            for (i, (t, m)) in ts.iter().zip(moments).enumerate() {
                match m {
                    Ok(m) if m.re.is_finite() && m.im.is_finite() => {
                        chunk_max = chunk_max.max(m.norm());
                        let w = base[i % base.len()].1 * opts.panel_width;
                        chunk_nodes.push((*t, w * m / *t));
                    }
                    Ok(_) | Err(MetaError::QuadratureFailure { .. }) => {
                        failed = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if failed {
                // Tolerable only in the already-negligible tail.
                if prev_chunk_max < 1e-10 && !nodes.is_empty() {
                    break;
                }
                return Err(MetaError::NonConvergence {
                    what: "imaginary moment for Gil-Pelaez inversion",
                    terms: nodes.len(),
                });
            }
            nodes.extend(chunk_nodes);
            if chunk_max < NEGLIGIBLE {
                break;
            }
            prev_chunk_max = chunk_max;
        }
        // Slope of the phase at the origin estimates E[ln CSP].
        let (t0, wm0) = nodes[0];
        let m0 = wm0 * t0 / (base[0].1 * opts.panel_width);
        let mu_log = (m0.im / t0).min(0.0);
        Ok(Self {
            nodes,
            nodes_per_panel: base.len(),
            panel_width: opts.panel_width,
            mu_log,
        })
    }

    fn n_panels(&self) -> usize {
        self.nodes.len() / self.nodes_per_panel
    }

    /// CCDF of the conditional success probability at `x`.
    pub fn ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x >= 1.0 {
            return 0.0;
        }
        let lx = x.ln();
        // Cumulative integral after each panel.
        let mut cumulative = Vec::with_capacity(self.n_panels());
        let mut acc = 0.0f64;
        for panel in self.nodes.chunks(self.nodes_per_panel) {
            for &(t, wm) in panel {
                // Im(e^{-jt lx} * M) with the weight and 1/t prefolded.
                acc += (Complex64::new(0.0, -t * lx).exp() * wm).im;
            }
            cumulative.push(acc);
        }
        // Average the cumulative sums over one oscillation period of the
        // remainder to cancel truncation ringing. The remainder has two
        // oscillatory components: the bulk of the distribution rings at
        // `|lx - mu|`, while the upper support endpoint (CSP -> 1)
        // contributes a slowly-decaying component ringing at `|lx|`. Use
        // the slower bulk period when it fits well inside the integration
        // range; near `x = e^mu` that period outgrows the range, and there
        // the smooth bulk has already decayed, so the endpoint period is
        // the right one.
        let period = |freq: f64| {
            (2.0 * PI / (freq.max(1e-3) * self.panel_width)).ceil() as usize
        };
        let mut window = period((lx - self.mu_log).abs());
        if window > 2 * cumulative.len() / 5 {
            window = period(lx.abs());
        }
        let window = window.clamp(1, cumulative.len());
        let tail: f64 =
            cumulative[cumulative.len() - window..].iter().sum::<f64>() / window as f64;
        (0.5 + tail / PI).clamp(0.0, 1.0)
    }

    /// CCDF over a grid (parallel over grid points).
    pub fn ccdf_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.par_iter().map(|&x| self.ccdf(x)).collect()
    }
}

/// Parameters of a Beta(a, b) distribution matched to the first two
/// moments of the CSP.
#[derive(Debug, Clone, Copy)]
pub struct BetaFit {
    pub a: f64,
    pub b: f64,
}

/// Match Beta shape parameters to `(M1, M2)`:
/// `b = (M1 - M2)(1 - M1) / (M2 - M1^2)`, `a = b M1 / (1 - M1)`.
pub fn beta_fit(m1: f64, m2: f64) -> Result<BetaFit> {
    if !(0.0 < m1 && m1 < 1.0) {
        return Err(MetaError::Degenerate(
            "Beta fit needs a mean strictly inside (0, 1)",
        ));
    }
    let var = m2 - m1 * m1;
    if var <= 0.0 || m2 >= m1 {
        return Err(MetaError::Degenerate(
            "Beta fit needs positive variance (M1^2 < M2 < M1)",
        ));
    }
    let b = (m1 - m2) * (1.0 - m1) / var;
    let a = b * m1 / (1.0 - m1);
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(MetaError::Degenerate("Beta fit produced invalid shape"));
    }
    Ok(BetaFit { a, b })
}

/// CCDF of the fitted Beta law: `1 - I_x(a, b)`.
pub fn beta_ccdf(fit: &BetaFit, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x >= 1.0 {
        return Ok(0.0);
    }
    Ok(1.0 - specfun::reg_inc_beta(x, fit.a, fit.b)?)
}

/// A computed meta-distribution curve: exact (Gil-Pelaez) and Beta CCDFs
/// over a reliability grid, plus the moments behind the fit.
#[derive(Debug, Clone)]
pub struct MetaCurve {
    pub x: Vec<f64>,
    pub ccdf_exact: Vec<f64>,
    /// Beta-approximation CCDF; empty when the fit is degenerate.
    pub ccdf_beta: Vec<f64>,
    pub m1: f64,
    pub m2: f64,
    pub beta: Option<BetaFit>,
}

fn real_moment(
    b: f64,
    theta2: f64,
    theta_d: f64,
    p: &Params,
    variant: Variant,
) -> Result<f64> {
    let q = moments::MomentQuery {
        order_b: Complex64::new(b, 0.0),
        theta_backhaul: theta2,
        theta_device: theta_d,
        variant,
        eval_path: moments::EvalPath::DirectQuadrature,
    };
    Ok(moments::moment_total(&q, p)?.value.re)
}

fn curve_from_moment<F>(
    moment: F,
    m1: f64,
    m2: f64,
    xs: &[f64],
    opts: &GilPelaezOptions,
) -> Result<MetaCurve>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let inv = GilPelaezInverter::build(moment, opts)?;
    let ccdf_exact = inv.ccdf_many(xs);
    let beta = beta_fit(m1, m2).ok();
    let ccdf_beta = match &beta {
        Some(fit) => xs
            .iter()
            .map(|&x| beta_ccdf(fit, x))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Ok(MetaCurve {
        x: xs.to_vec(),
        ccdf_exact,
        ccdf_beta,
        m1,
        m2,
        beta,
    })
}

/// Meta distribution of the SIR/SNR: CCDF of the CSP at thresholds
/// `(theta2, theta_d)` over the reliability grid `xs`.
pub fn meta_sir(
    theta2: f64,
    theta_d: f64,
    p: &Params,
    variant: Variant,
    xs: &[f64],
    opts: &GilPelaezOptions,
) -> Result<MetaCurve> {
    let m1 = real_moment(1.0, theta2, theta_d, p, variant)?;
    let m2 = real_moment(2.0, theta2, theta_d, p, variant)?;
    curve_from_moment(
        |t| moments::imaginary_moment(t, theta2, theta_d, p, variant),
        m1,
        m2,
        xs,
        opts,
    )
}

/// Meta distribution of the data rate: CCDF of the conditional probability
/// of sustaining per-link rates `(t1, t2, t_bh)` in bit/s.
pub fn meta_rate(
    rates: (f64, f64, f64),
    p: &Params,
    xs: &[f64],
    opts: &GilPelaezOptions,
) -> Result<MetaCurve> {
    let m1 = moments::rate_moment(Complex64::new(1.0, 0.0), rates, p)?;
    let m2 = moments::rate_moment(Complex64::new(2.0, 0.0), rates, p)?;
    curve_from_moment(
        |t| Ok(moments::rate_moment(Complex64::new(0.0, t), rates, p)?.value),
        m1.value.re,
        m2.value.re,
        xs,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn beta21_moment(t: f64) -> Result<Complex64> {
        // Beta(2, 1): M_b = 2 / (b + 2).
        Ok(2.0 / Complex64::new(2.0, t))
    }

    #[test]
    fn point_mass_step() {
        let p0: f64 = 0.3;
        let inv = GilPelaezInverter::build(
            |t| Ok(Complex64::new(0.0, t * p0.ln()).exp()),
            &GilPelaezOptions::default(),
        )
        .unwrap();
        // Well away from the jump the CCDF is 0/1 to a few permille.
        assert!((inv.ccdf(0.1) - 1.0).abs() < 5e-3);
        assert!((inv.ccdf(0.25) - 1.0).abs() < 5e-3);
        assert!(inv.ccdf(0.35).abs() < 5e-3);
        assert!(inv.ccdf(0.8).abs() < 5e-3);
        // At the jump itself Gil-Pelaez converges to the midpoint.
        assert!((inv.ccdf(p0) - 0.5).abs() < 2e-2);
    }

    #[test]
    fn beta_2_1_inversion() {
        // F_bar(x) = 1 - x^2 exactly.
        let inv =
            GilPelaezInverter::build(beta21_moment, &GilPelaezOptions::default()).unwrap();
        for x in [0.05, 0.2, 0.5, 0.8, 0.95] {
            assert!(
                (inv.ccdf(x) - (1.0 - x * x)).abs() < 1e-4,
                "x = {x}: {} vs {}",
                inv.ccdf(x),
                1.0 - x * x
            );
        }
        assert_eq!(inv.ccdf(-0.5), 1.0);
        assert_eq!(inv.ccdf(1.5), 0.0);
    }

    #[test]
    fn mean_ccdf_identity() {
        // int_0^1 F_bar(x) dx = M1 for any [0,1] variable.
        let inv =
            GilPelaezInverter::build(beta21_moment, &GilPelaezOptions::default()).unwrap();
        let n = 400;
        let mean: f64 = (0..n)
            .map(|i| inv.ccdf((i as f64 + 0.5) / n as f64))
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(mean, 2.0 / 3.0, epsilon = 2e-4);
    }

    #[test]
    fn beta_fit_round_trip() {
        // Moments of Beta(2, 1) must reproduce a = 2, b = 1 ...
        let fit = beta_fit(2.0 / 3.0, 0.5).unwrap();
        assert_relative_eq!(fit.a, 2.0, max_relative = 1e-10);
        assert_relative_eq!(fit.b, 1.0, max_relative = 1e-10);
        // ... and the Beta CCDF must then match the inversion closely.
        let inv =
            GilPelaezInverter::build(beta21_moment, &GilPelaezOptions::default()).unwrap();
        for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let exact = inv.ccdf(x);
            let approx = beta_ccdf(&fit, x).unwrap();
            assert!((exact - approx).abs() < 1e-4);
        }
    }

    #[test]
    fn beta_fit_rejects_degenerate_inputs() {
        assert!(beta_fit(1.0, 1.0).is_err()); // deterministic success
        assert!(beta_fit(0.5, 0.25).is_err()); // zero variance
        assert!(beta_fit(0.5, 0.6).is_err()); // M2 > M1 impossible on [0,1]
        assert!(beta_fit(0.0, 0.0).is_err());
    }

    #[test]
    fn beta_ccdf_basic_shape() {
        let fit = BetaFit { a: 3.0, b: 2.0 };
        assert_eq!(beta_ccdf(&fit, 0.0).unwrap(), 1.0);
        assert_eq!(beta_ccdf(&fit, 1.0).unwrap(), 0.0);
        let mut prev = 1.0;
        for i in 1..10 {
            let v = beta_ccdf(&fit, i as f64 / 10.0).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }
}
