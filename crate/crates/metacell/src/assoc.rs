//! Tier-association probabilities of the typical device under the biased
//! maximum-received-power rule, with closed-form shortcuts for the
//! (alpha1, alpha2_los, alpha2_nlos) = (4, 2, 4) exponent family.
//!
//! The device compares the best MBS, the best LOS SBS and the best NLOS
//! SBS by `P B G zeta / l` (power x bias x gain x near-field x inverse
//! path loss). All expressions below work in the path-loss domain after
//! substituting `u = l^{2/alpha}` (the squared distance), which turns the
//! stochastic-geometry exclusion exponents into polynomials of low degree.

use crate::model::Params;
use crate::quad::{self, QuadOptions};
use crate::specfun::{self, SeriesControl};
use crate::{MetaError, Result};

use std::f64::consts::PI;

/// Probabilities of the three association outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocProbabilities {
    /// Direct MBS service.
    pub a1: f64,
    /// Dual-hop service through a LOS SBS.
    pub a2_los: f64,
    /// Dual-hop service through an NLOS SBS.
    pub a2_nlos: f64,
    /// Quadrature error estimate on the SBS components.
    pub error_estimate: f64,
}

/// Density of association with a LOS SBS at mm-wave path-loss value `l`,
/// supported on `(0, d^{alpha2_los}]`: the probability density that the
/// best LOS SBS sits at path loss `l` *and* beats both the best MBS and
/// every NLOS SBS.
pub fn assoc_density_los(l: f64, p: &Params) -> Result<f64> {
    let d_pow = p.d.powf(p.alpha2_los);
    if !(l > 0.0 && l <= d_pow) {
        return Err(MetaError::Domain(format!(
            "LOS association density support is (0, d^alpha2_los] = (0, {d_pow:.6e}], got l = {l:.6e}"
        )));
    }
    let u = l.powf(2.0 / p.alpha2_los);
    let mbs_excl = PI * p.lambda1 * (p.a_bar * l).powf(2.0 / p.alpha1);
    let los_excl = PI * p.lambda2 * p.p_los * u;
    Ok(
        (2.0 * PI * p.lambda2 * p.p_los / p.alpha2_los)
            * l.powf(2.0 / p.alpha2_los - 1.0)
            * (-mbs_excl - los_excl).exp(),
    )
}

/// Density of association with an NLOS SBS at mm-wave path-loss value `l`,
/// supported on `[d^{alpha2_nlos}, inf)`. The exclusion exponent counts
/// the whole LOS ball (`p_los d^2`) plus the NLOS annulus out to the
/// candidate's distance.
pub fn assoc_density_nlos(l: f64, p: &Params) -> Result<f64> {
    let d_pow = p.d.powf(p.alpha2_nlos);
    if l < d_pow {
        return Err(MetaError::Domain(format!(
            "NLOS association density support is [d^alpha2_nlos, inf) = [{d_pow:.6e}, inf), got l = {l:.6e}"
        )));
    }
    let u = l.powf(2.0 / p.alpha2_nlos);
    let mbs_excl = PI * p.lambda1 * (p.a_bar * l).powf(2.0 / p.alpha1);
    let sbs_excl = PI * p.lambda2 * (p.p_los * p.d * p.d + p.p_nlos * (u - p.d * p.d));
    Ok(
        (2.0 * PI * p.lambda2 * p.p_nlos / p.alpha2_nlos)
            * l.powf(2.0 / p.alpha2_nlos - 1.0)
            * (-mbs_excl - sbs_excl).exp(),
    )
}

/// Integration cutoff for the NLOS branch: beyond this squared distance
/// the exclusion weight has decayed below e^-60.
fn nlos_u_cutoff(p: &Params) -> f64 {
    let d2 = p.d * p.d;
    if p.p_nlos <= 0.0 {
        return d2;
    }
    d2 + 60.0 / (PI * p.lambda2 * p.p_nlos)
}

/// Unconditional association probabilities by adaptive quadrature of the
/// two SBS densities (in the `u = l^{2/alpha}` coordinate); the MBS
/// probability is the complement.
pub fn assoc_probs(p: &Params) -> Result<AssocProbabilities> {
    let opts = QuadOptions::default();
    let d2 = p.d * p.d;

    let f_los = |u: f64| -> f64 {
        if u <= 0.0 || p.p_los <= 0.0 {
            return 0.0;
        }
        let l = u.powf(p.alpha2_los / 2.0);
        let mbs_excl = PI * p.lambda1 * (p.a_bar * l).powf(2.0 / p.alpha1);
        (PI * p.lambda2 * p.p_los) * (-mbs_excl - PI * p.lambda2 * p.p_los * u).exp()
    };
    let f_nlos = |u: f64| -> f64 {
        if p.p_nlos <= 0.0 {
            return 0.0;
        }
        let l = u.powf(p.alpha2_nlos / 2.0);
        let mbs_excl = PI * p.lambda1 * (p.a_bar * l).powf(2.0 / p.alpha1);
        let sbs_excl = PI * p.lambda2 * (p.p_los * d2 + p.p_nlos * (u - d2));
        (PI * p.lambda2 * p.p_nlos) * (-mbs_excl - sbs_excl).exp()
    };

    let los = quad::integrate_real(&f_los, 0.0, d2, &opts)?;
    let nlos = quad::integrate_real(&f_nlos, d2, nlos_u_cutoff(p), &opts)?;
    let a2_los = los.value.re;
    let a2_nlos = nlos.value.re;
    Ok(AssocProbabilities {
        a1: (1.0 - a2_los - a2_nlos).max(0.0),
        a2_los,
        a2_nlos,
        error_estimate: los.error + nlos.error,
    })
}

/// Probability that no SBS (LOS or NLOS) offers a better biased received
/// power than an MBS at sub-6GHz path loss `l1`; the SBS threshold path
/// loss is `a_hat * l1`. Evaluated piecewise over the three ranges of the
/// threshold relative to the LOS-ball edges.
pub fn mbs_win_prob(l1: f64, p: &Params) -> f64 {
    let l = p.a_hat * l1;
    let d2 = p.d * p.d;
    let exponent = if l <= p.d.powf(p.alpha2_los) {
        // Only LOS SBSs can compete, within the disc of squared radius
        // l^{2/alpha2_los}.
        PI * p.lambda2 * p.p_los * l.powf(2.0 / p.alpha2_los)
    } else if l < p.d.powf(p.alpha2_nlos) {
        // Every LOS SBS in the ball competes; NLOS path losses all exceed
        // the threshold.
        PI * p.lambda2 * p.p_los * d2
    } else {
        PI * p.lambda2 * ((p.p_los - p.p_nlos) * d2 + p.p_nlos * l.powf(2.0 / p.alpha2_nlos))
    };
    (-exponent).exp()
}

/// Conditional probability that the device associates with the SBS tier
/// given that its best MBS sits at path loss `l1`.
pub fn cond_assoc_sbs(l1: f64, p: &Params) -> Result<f64> {
    if l1 <= 0.0 {
        return Err(MetaError::Domain(format!(
            "path loss must be positive, got {l1}"
        )));
    }
    Ok(1.0 - mbs_win_prob(l1, p))
}

/// Closed-form MBS association probability for the exponent family
/// (alpha1, alpha2_los, alpha2_nlos) = (4, 2, 4), via the error function.
pub fn closed_form_a1(p: &Params) -> Result<f64> {
    let exact = |x: f64, y: f64| (x - y).abs() < 1e-9;
    if !(exact(p.alpha1, 4.0) && exact(p.alpha2_los, 2.0) && exact(p.alpha2_nlos, 4.0)) {
        return Err(MetaError::Precondition(format!(
            "closed_form_a1 requires exponents (4, 2, 4), got ({}, {}, {})",
            p.alpha1, p.alpha2_los, p.alpha2_nlos
        )));
    }
    let d2 = p.d * p.d;
    // LOS integral: int_0^{d^2} pi lam2 pL exp(-B sqrt(u) - A u) du with
    // A = pi lam2 pL and B = pi lam1 sqrt(a_bar); after t = sqrt(u),
    //   A2L = (1 - e^{-A d^2 - B d})
    //         - B e^{B^2/(4A)} sqrt(pi/(4A)) [erf(sqrt(A) d + B/(2 sqrt(A))) - erf(B/(2 sqrt(A)))].
    let a = PI * p.lambda2 * p.p_los;
    let b = PI * p.lambda1 * p.a_bar.sqrt();
    let a2_los = if a > 0.0 {
        let half_b = b / (2.0 * a.sqrt());
        (1.0 - (-a * d2 - b * p.d).exp())
            - b * (half_b * half_b).exp()
                * (PI / (4.0 * a)).sqrt()
                * (specfun::erf(a.sqrt() * p.d + half_b) - specfun::erf(half_b))
    } else {
        0.0
    };
    // NLOS integral: int_{d^2}^inf pi lam2 pN exp(-B u - pi lam2 (pL d^2 + pN (u - d^2))) du.
    let c = b + PI * p.lambda2 * p.p_nlos;
    let a2_nlos = if p.p_nlos > 0.0 {
        PI * p.lambda2 * p.p_nlos
            * (-PI * p.lambda2 * (p.p_los - p.p_nlos) * d2).exp()
            * (-c * d2).exp()
            / c
    } else {
        0.0
    };
    Ok((1.0 - a2_los - a2_nlos).max(0.0))
}

/// Vanishing-competition limit (`a_bar -> 0`, i.e. an effectively
/// infinitely favored SBS tier) of the SBS association probabilities for
/// the (4, 2, 4) exponent family, in closed form:
/// `A2L = z 1F1(1; 2; -z)` with `z = pi p_los d^2 lambda2` (which equals
/// `1 - e^{-z}`), and `A2N` its complement.
pub fn asymptotic_assoc(p: &Params) -> Result<(f64, f64)> {
    let exact = |x: f64, y: f64| (x - y).abs() < 1e-9;
    if !(exact(p.alpha1, 4.0) && exact(p.alpha2_los, 2.0) && exact(p.alpha2_nlos, 4.0)) {
        return Err(MetaError::Precondition(
            "asymptotic_assoc requires exponents (4, 2, 4)".into(),
        ));
    }
    let z = PI * p.p_los * p.d * p.d * p.lambda2;
    let ctl = SeriesControl::default();
    let a2_los = if z > 0.0 {
        z * specfun::kummer_1f1(1.0, 2.0, -z, &ctl)?
    } else {
        0.0
    };
    Ok((a2_los, 1.0 - a2_los))
}
