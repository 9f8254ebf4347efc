//! The b-th moment engine for the conditional success probability (CSP):
//! per-link moments (sub-6GHz backhaul, mm-wave access, direct MBS link),
//! their composition into the total network moment, network-variant
//! switches, imaginary moments for distribution inversion, local-delay and
//! rate moments.
//!
//! For order `b` (complex in general) the total moment decomposes as
//!
//! `M_b,T = M_b,BH * M_b,2 + M_b,1`
//!
//! where `M_b,BH` is the backhaul SIR moment (a closed hypergeometric
//! form), `M_b,2` the access moment integrated against the SBS association
//! densities, and `M_b,1` the direct-link moment integrated against the
//! MBS association density. The access moment offers two evaluation paths:
//! `DirectQuadrature` raises the Alzer-bounded CSP to the power `b` inside
//! the radial integrals, and `Series` expands `(1-u)^b` by the generalized
//! binomial theorem and integrates term by term — retained as an
//! independent fidelity check and as the default for negative orders,
//! where it acts as the standard truncation of the (otherwise divergent)
//! local-delay expansion.

use num_complex::Complex64;

use crate::assoc;
use crate::model::Params;
use crate::quad::{self, QuadOptions};
use crate::specfun::{self, BinomialCoeffs, SeriesControl};
use crate::{MetaError, Result};

use std::f64::consts::PI;

/// Network variant selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Sub-6GHz backhaul + mm-wave access (the main model).
    Hybrid,
    /// Both tiers sub-6GHz, orthogonal spectrum, no antenna arrays.
    UWaveOnly,
    /// mm-wave SNR backhaul + mm-wave access.
    MmWaveBackhaul,
}

/// Evaluation path for the access moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    /// Generalized-binomial expansion, truncated at
    /// [`ACCESS_SERIES_TERMS`] terms.
    Series,
    /// `exp(b ln CSP)` inside the radial integrals.
    DirectQuadrature,
}

/// Truncation depth of the access-moment binomial series.
pub const ACCESS_SERIES_TERMS: usize = 64;

/// One moment evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct MomentQuery {
    pub order_b: Complex64,
    pub theta_backhaul: f64,
    pub theta_device: f64,
    pub variant: Variant,
    pub eval_path: EvalPath,
}

/// A per-link moment with its divergence marker (negative-order moments
/// have genuine poles).
#[derive(Debug, Clone, Copy)]
pub struct MomentPart {
    pub value: Complex64,
    pub diverged: bool,
}

/// Total moment with its per-link decomposition.
#[derive(Debug, Clone, Copy)]
pub struct MomentResult {
    pub value: Complex64,
    pub m_backhaul: Complex64,
    pub m_access: Complex64,
    pub m_direct: Complex64,
    pub diverged: bool,
}

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

fn qopts() -> QuadOptions {
    QuadOptions::default()
}

fn is_negative_real(b: Complex64) -> bool {
    b.im == 0.0 && b.re < 0.0
}

/// Backhaul (or any isolated Rayleigh SIR link) moment
/// `1 / 2F1(b, -2/alpha; 1 - 2/alpha; -theta)`.
///
/// The expression depends on nothing but the order, the threshold and the
/// path-loss exponent: SIR moments are scale-free in density and power.
/// For negative real orders the hypergeometric factor is a polynomial
/// that can cross zero — the mean-local-delay pole — which is reported
/// through the `diverged` flag rather than as an infinity.
pub fn moment_backhaul(b: Complex64, theta2: f64, alpha1: f64) -> Result<MomentPart> {
    if alpha1 <= 2.0 {
        return Err(MetaError::Precondition(format!(
            "backhaul moment requires alpha1 > 2, got {alpha1}"
        )));
    }
    if theta2 < 0.0 {
        return Err(MetaError::Domain("SIR threshold must be nonnegative".into()));
    }
    let f = specfun::gauss_2f1(b, -2.0 / alpha1, 1.0 - 2.0 / alpha1, -theta2, &ctl())?;
    if is_negative_real(b) && f.re <= 0.0 {
        return Ok(MomentPart {
            value: Complex64::new(f64::INFINITY, 0.0),
            diverged: true,
        });
    }
    Ok(MomentPart {
        value: f.inv(),
        diverged: false,
    })
}

/// Stable `ln(1 - w^m)` for `w = 1 - e^{-g}` (the Alzer CSP logarithm):
/// for large `g` this is `ln m - g` up to exponentially small corrections.
fn ln_alzer_csp(m: u32, g: f64) -> f64 {
    if g <= 0.0 {
        return 0.0; // CSP = 1
    }
    if g > 35.0 {
        return (m as f64).ln() - g;
    }
    let w = -(-g).exp_m1(); // 1 - e^{-g}, accurately
    let wm = w.powi(m as i32);
    (-wm).ln_1p()
}

/// `(1 - e^{-g})^m` — the Alzer outage factor `u` whose powers the series
/// path integrates.
fn alzer_outage(m: u32, g: f64) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    (-(-g).exp_m1()).powi(m as i32)
}

struct AccessBranch {
    /// Blockage probability multiplying the CSP.
    p_branch: f64,
    m: u32,
    omega: f64,
    alpha: f64,
    /// Integration range in the squared-distance coordinate.
    u_lo: f64,
    u_hi: f64,
    los: bool,
}

impl AccessBranch {
    /// Association weight (density in `u`) of this branch.
    fn weight(&self, u: f64, p: &Params) -> f64 {
        let d2 = p.d * p.d;
        let l = u.powf(self.alpha / 2.0);
        let mbs_excl = PI * p.lambda1 * (p.a_bar * l).powf(2.0 / p.alpha1);
        let sbs_excl = if self.los {
            PI * p.lambda2 * p.p_los * u
        } else {
            PI * p.lambda2 * (p.p_los * d2 + p.p_nlos * (u - d2))
        };
        PI * p.lambda2 * self.p_branch * (-mbs_excl - sbs_excl).exp()
    }

    fn branches(p: &Params) -> Vec<AccessBranch> {
        let d2 = p.d * p.d;
        let mut out = Vec::new();
        if p.p_los > 0.0 {
            out.push(AccessBranch {
                p_branch: p.p_los,
                m: p.m_los,
                omega: p.omega_los,
                alpha: p.alpha2_los,
                u_lo: 0.0,
                u_hi: d2,
                los: true,
            });
        }
        if p.p_nlos > 0.0 {
            out.push(AccessBranch {
                p_branch: p.p_nlos,
                m: p.m_nlos,
                omega: p.omega_nlos,
                alpha: p.alpha2_nlos,
                u_lo: d2,
                u_hi: d2 + 60.0 / (PI * p.lambda2 * p.p_nlos),
                los: false,
            });
        }
        out
    }
}

/// Access (mm-wave SNR) moment `M_b,2`, integrating the b-th power of the
/// Alzer-bounded CSP against the SBS association densities.
pub fn moment_access(b: Complex64, theta_d: f64, p: &Params, path: EvalPath) -> Result<Complex64> {
    if theta_d < 0.0 {
        return Err(MetaError::Domain("SNR threshold must be nonnegative".into()));
    }
    if path == EvalPath::DirectQuadrature && is_negative_real(b) && p.include_near_field_in_snr {
        // With zeta_2 inside the SNR argument the noise term dominates the
        // far NLOS tail and 1/CSP^|b| genuinely diverges; only the
        // truncated series gives the conventional regularized value.
        return Err(MetaError::Precondition(
            "negative-order access moment diverges under include_near_field_in_snr; use EvalPath::Series".into(),
        ));
    }
    let nu_dot = p.nu_dot();
    let mut total = Complex64::new(0.0, 0.0);
    for br in AccessBranch::branches(p) {
        let zeta = specfun::alzer_zeta(br.m);
        let ln_p_branch = br.p_branch.ln();
        let value = match path {
            EvalPath::DirectQuadrature => {
                let f = |u: f64| -> Complex64 {
                    if u <= 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let l = u.powf(br.alpha / 2.0);
                    let g = zeta * theta_d * nu_dot * l / br.omega;
                    let ln_csp = ln_p_branch + ln_alzer_csp(br.m, g);
                    br.weight(u, p) * (b * ln_csp).exp()
                };
                quad::integrate(&f, br.u_lo, br.u_hi, &qopts())?.value
            }
            EvalPath::Series => {
                let coeffs: Vec<Complex64> =
                    BinomialCoeffs::new(b).take(ACCESS_SERIES_TERMS).collect();
                let p_pow = (b * ln_p_branch).exp();
                let f = |u: f64| -> Complex64 {
                    if u <= 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let l = u.powf(br.alpha / 2.0);
                    let g = zeta * theta_d * nu_dot * l / br.omega;
                    let x = alzer_outage(br.m, g);
                    let mut sum = Complex64::new(0.0, 0.0);
                    let mut xk = 1.0f64;
                    for c in &coeffs {
                        sum += c * xk;
                        if xk < 1e-18 {
                            break;
                        }
                        xk *= x;
                    }
                    br.weight(u, p) * p_pow * sum
                };
                quad::integrate(&f, br.u_lo, br.u_hi, &qopts())?.value
            }
        };
        total += value;
    }
    Ok(total)
}

/// Direct-link moment `M_b,1`: the b-th Rayleigh SIR moment of the
/// MBS-served device, integrated against the MBS association density.
///
/// In the squared-distance coordinate `s = l1^{2/alpha1}` the integrand is
/// `pi lam1 exp(-pi lam1 s F(b, theta)) * P(no better SBS)`, where `F` is
/// the same hypergeometric factor as the backhaul moment and the SBS
/// exclusion probability is piecewise over the LOS-ball geometry; the
/// integral is split at the two breakpoints accordingly.
pub fn moment_direct(b: Complex64, theta_d: f64, p: &Params) -> Result<MomentPart> {
    if theta_d < 0.0 {
        return Err(MetaError::Domain("SIR threshold must be nonnegative".into()));
    }
    let f_hyp = specfun::gauss_2f1(b, -2.0 / p.alpha1, 1.0 - 2.0 / p.alpha1, -theta_d, &ctl())?;
    if is_negative_real(b) && f_hyp.re <= 0.0 {
        return Ok(MomentPart {
            value: Complex64::new(f64::INFINITY, 0.0),
            diverged: true,
        });
    }
    let integrand = |s: f64| -> Complex64 {
        let l1 = s.powf(p.alpha1 / 2.0);
        PI * p.lambda1 * (-(PI * p.lambda1 * s) * f_hyp).exp() * assoc::mbs_win_prob(l1, p)
    };
    // Breakpoints where the SBS-exclusion switches branch: a_hat * l1 at
    // the LOS-ball path-loss edges.
    let s1 = (p.d.powf(p.alpha2_los) / p.a_hat).powf(2.0 / p.alpha1);
    let s2 = (p.d.powf(p.alpha2_nlos) / p.a_hat).powf(2.0 / p.alpha1);
    let decay = PI * p.lambda1 * f_hyp.re.max(0.05);
    let s_cut = s2.max(s1) + 60.0 / decay;
    let o = qopts();
    let mut v = quad::integrate(&integrand, 0.0, s1.min(s2), &o)?.value;
    if s2 > s1 {
        v += quad::integrate(&integrand, s1, s2, &o)?.value;
    }
    v += quad::integrate(&integrand, s1.max(s2), s_cut, &o)?.value;
    Ok(MomentPart { value: v, diverged: false })
}

/// Backhaul moment for the mm-wave-backhaul variant: the SBS receives from
/// its closest MBS over a noise-limited mm-wave link (array gain on both
/// ends, same LOS-ball blockage), so the moment is the Alzer CSP raised to
/// `b` against the nearest-MBS distance distribution.
pub fn moment_backhaul_mmwave(b: Complex64, theta2: f64, p: &Params) -> Result<MomentPart> {
    if theta2 < 0.0 {
        return Err(MetaError::Domain("SNR threshold must be nonnegative".into()));
    }
    // Transmit side is the MBS (power p1) with an equally sized array at
    // both ends of the backhaul link.
    let mut den = p.p1 * p.g2_max * p.g2_max;
    if p.include_near_field_in_snr {
        den *= p.zeta2;
    }
    let nu_dot = p.noise_sigma2 / den;
    let o = qopts();
    let mut total = Complex64::new(0.0, 0.0);
    let r_cut = (60.0 / (PI * p.lambda1)).sqrt();
    for (lo, hi, m, omega, alpha, p_branch) in [
        (0.0, p.d.min(r_cut), p.m_los, p.omega_los, p.alpha2_los, p.p_los),
        (p.d.min(r_cut), r_cut, p.m_nlos, p.omega_nlos, p.alpha2_nlos, p.p_nlos),
    ] {
        if p_branch <= 0.0 || hi <= lo {
            continue;
        }
        let zeta = specfun::alzer_zeta(m);
        let ln_p_branch = p_branch.ln();
        let f = |r: f64| -> Complex64 {
            let g = zeta * theta2 * nu_dot * r.powf(alpha) / omega;
            let ln_csp = ln_p_branch + ln_alzer_csp(m, g);
            2.0 * PI * p.lambda1 * r * (-PI * p.lambda1 * r * r).exp() * (b * ln_csp).exp()
        };
        total += quad::integrate(&f, lo, hi, &o)?.value;
    }
    Ok(MomentPart { value: total, diverged: false })
}

/// Single-tier moment of the all-sub-6GHz variant: tier `k` in {1, 2},
/// interfered only by its own tier (orthogonal spectrum), diluted by the
/// competing tier's association pressure:
/// `1 / (lam_j/lam_k (P_j B_j / P_k B_k)^{2/alpha_j} + 2F1(b, -2/alpha_k; 1-2/alpha_k; -theta))`.
pub fn moment_tier_uwave(b: Complex64, theta: f64, k: u8, p: &Params) -> Result<MomentPart> {
    // In the all-sub-6GHz variant the SBS tier keeps only its density,
    // power and bias; its path-loss exponent is the (NLOS) sub-6GHz one.
    let alpha2 = p.alpha2_nlos;
    let (alpha_k, competition) = match k {
        1 => (
            p.alpha1,
            (p.lambda2 / p.lambda1) * ((p.p2 * p.b2) / (p.p1 * p.b1)).powf(2.0 / alpha2),
        ),
        2 => (
            alpha2,
            (p.lambda1 / p.lambda2) * ((p.p1 * p.b1) / (p.p2 * p.b2)).powf(2.0 / p.alpha1),
        ),
        _ => {
            return Err(MetaError::Precondition(format!(
                "tier index must be 1 or 2, got {k}"
            )))
        }
    };
    if alpha_k <= 2.0 {
        return Err(MetaError::Precondition(format!(
            "tier moment requires alpha > 2, got {alpha_k}"
        )));
    }
    let f = specfun::gauss_2f1(b, -2.0 / alpha_k, 1.0 - 2.0 / alpha_k, -theta, &ctl())?;
    let den = competition + f;
    if is_negative_real(b) && den.re <= 0.0 {
        return Ok(MomentPart {
            value: Complex64::new(f64::INFINITY, 0.0),
            diverged: true,
        });
    }
    Ok(MomentPart { value: den.inv(), diverged: false })
}

/// Total moment of the all-sub-6GHz variant:
/// `M_b,BH * M'_b,2 + M'_b,1` (dual-hop product + direct term).
pub fn moment_total_uwave(b: Complex64, theta2: f64, theta_d: f64, p: &Params) -> Result<MomentResult> {
    let bh = moment_backhaul(b, theta2, p.alpha1)?;
    let m2 = moment_tier_uwave(b, theta_d, 2, p)?;
    let m1 = moment_tier_uwave(b, theta_d, 1, p)?;
    let diverged = bh.diverged || m2.diverged || m1.diverged;
    let value = if diverged {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        bh.value * m2.value + m1.value
    };
    Ok(MomentResult {
        value,
        m_backhaul: bh.value,
        m_access: m2.value,
        m_direct: m1.value,
        diverged,
    })
}

/// Total network moment for the requested variant.
pub fn moment_total(q: &MomentQuery, p: &Params) -> Result<MomentResult> {
    let b = q.order_b;
    if !(b.re.is_finite() && b.im.is_finite()) {
        return Err(MetaError::Domain("moment order must be finite".into()));
    }
    match q.variant {
        Variant::UWaveOnly => moment_total_uwave(b, q.theta_backhaul, q.theta_device, p),
        Variant::Hybrid | Variant::MmWaveBackhaul => {
            let bh = if q.variant == Variant::Hybrid {
                moment_backhaul(b, q.theta_backhaul, p.alpha1)?
            } else {
                moment_backhaul_mmwave(b, q.theta_backhaul, p)?
            };
            let acc = moment_access(b, q.theta_device, p, q.eval_path)?;
            let dir = moment_direct(b, q.theta_device, p)?;
            let diverged = bh.diverged || dir.diverged;
            let value = if diverged {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                bh.value * acc + dir.value
            };
            Ok(MomentResult {
                value,
                m_backhaul: bh.value,
                m_access: acc,
                m_direct: dir.value,
                diverged,
            })
        }
    }
}

/// Imaginary moment `M_jt,T` feeding Gil-Pelaez inversion.
pub fn imaginary_moment(
    t: f64,
    theta2: f64,
    theta_d: f64,
    p: &Params,
    variant: Variant,
) -> Result<Complex64> {
    let q = MomentQuery {
        order_b: Complex64::new(0.0, t),
        theta_backhaul: theta2,
        theta_device: theta_d,
        variant,
        eval_path: EvalPath::DirectQuadrature,
    };
    Ok(moment_total(&q, p)?.value)
}

/// Mean local delay `M_{-1},T`: the expected number of transmission
/// attempts until success. Uses the truncated-series access path (the
/// conventional regularization of the negative-order expansion) and
/// surfaces the analytic backhaul pole `theta2 >= (alpha1 - 2) / 2` via
/// the `diverged` flag.
pub fn mean_local_delay(theta2: f64, theta_d: f64, p: &Params) -> Result<MomentResult> {
    let q = MomentQuery {
        order_b: Complex64::new(-1.0, 0.0),
        theta_backhaul: theta2,
        theta_device: theta_d,
        variant: Variant::Hybrid,
        eval_path: EvalPath::Series,
    };
    moment_total(&q, p)
}

/// Network jitter: the variance of the local delay,
/// `M_{-2},T - M_{-1},T^2`.
pub fn network_jitter(theta2: f64, theta_d: f64, p: &Params) -> Result<MomentPart> {
    let m1 = mean_local_delay(theta2, theta_d, p)?;
    let q = MomentQuery {
        order_b: Complex64::new(-2.0, 0.0),
        theta_backhaul: theta2,
        theta_device: theta_d,
        variant: Variant::Hybrid,
        eval_path: EvalPath::Series,
    };
    let m2 = moment_total(&q, p)?;
    if m1.diverged || m2.diverged {
        return Ok(MomentPart {
            value: Complex64::new(f64::INFINITY, 0.0),
            diverged: true,
        });
    }
    Ok(MomentPart {
        value: Complex64::new((m2.value.re - m1.value.re * m1.value.re).max(0.0), 0.0),
        diverged: false,
    })
}

/// Per-link rate thresholds derived from Shannon capacity: a link of
/// bandwidth `W` sustains rate `T` iff its SIR/SNR exceeds `2^{T/W} - 1`.
pub fn rate_thresholds(p: &Params, t1: f64, t2: f64, t_bh: f64) -> Result<(f64, f64, f64)> {
    if t1 < 0.0 || t2 < 0.0 || t_bh < 0.0 {
        return Err(MetaError::Domain("rates must be nonnegative".into()));
    }
    let w_dir = p.eta * p.w1;
    let w_bh = (1.0 - p.eta) * p.w1;
    if t1 > 0.0 && w_dir <= 0.0 {
        return Err(MetaError::Precondition(
            "direct rate requires access_fraction_eta > 0".into(),
        ));
    }
    if t_bh > 0.0 && w_bh <= 0.0 {
        return Err(MetaError::Precondition(
            "backhaul rate requires access_fraction_eta < 1".into(),
        ));
    }
    let to_theta = |t: f64, w: f64| if t == 0.0 { 0.0 } else { (t / w).exp2() - 1.0 };
    Ok((
        to_theta(t1, w_dir),
        to_theta(t2, p.w2),
        to_theta(t_bh, w_bh),
    ))
}

/// Moment `Q_b` of the conditional data rate:
/// `Q_b = M_b,BH(2^{T_BH/((1-eta)W1)}-1) * M_b,2(2^{T2/W2}-1) + M_b,1(2^{T1/(eta W1)}-1)`.
pub fn rate_moment(b: Complex64, rates: (f64, f64, f64), p: &Params) -> Result<MomentResult> {
    let (theta1, theta2_acc, theta_bh) = rate_thresholds(p, rates.0, rates.1, rates.2)?;
    let bh = moment_backhaul(b, theta_bh, p.alpha1)?;
    let acc = moment_access(b, theta2_acc, p, EvalPath::DirectQuadrature)?;
    let dir = moment_direct(b, theta1, p)?;
    let diverged = bh.diverged || dir.diverged;
    let value = if diverged {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        bh.value * acc + dir.value
    };
    Ok(MomentResult {
        value,
        m_backhaul: bh.value,
        m_access: acc,
        m_direct: dir.value,
        diverged,
    })
}
