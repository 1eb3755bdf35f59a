//! Constants of the transition regime: the thresholds xi0(p) and C0(p) above
//! which the four-subdomain splitting exists, the bracket constants c1, c2,
//! and the roots w_star, w_bar, v_bar that pin where the tangential regimes
//! hand off to the cup and the affine patch.

use crate::cup::{solve_v, w_sup};
use crate::domain::Parameters;
use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;
use crate::special::{gamma_fn, tail_raw};

/// The frozen geometry of the transition regime for one (p, C).
#[derive(Debug, Clone, Copy)]
pub struct TransitionConstants {
    /// threshold gap xi0(p) = 1 - 1/(3^{p+2} Gamma(p))
    pub xi0: f64,
    /// threshold characteristic C0(p) = e^{-xi0}/(1 - xi0)
    pub c0: f64,
    /// lower bracket constant, xi [e (1-xi) Gamma(p-1)]^{1/(p-2)}
    pub c1: f64,
    /// upper bracket constant, xi [2 e (1-xi) Gamma(p)]^{1/(p-2)}
    pub c2: f64,
    /// root of the tangential-breakdown equation in (0, c1)
    pub w_star: f64,
    /// handoff abscissa in (w_star, c2)
    pub w_bar: f64,
    /// companion root of the coupling function at w_bar
    pub v_bar: f64,
    /// D(w_bar), cached for the smoothness checks and the affine slope
    pub d_bar: f64,
}

/// xi0(p) and C0(p). The reciprocal 1/(3^{p+2} Gamma(p)) is formed first so
/// that 1 - xi0 keeps full precision.
pub fn thresholds(p: f64) -> Result<(f64, f64)> {
    if !(p > 2.0) {
        return Err(Error::Domain(format!("thresholds requires p > 2, got {p}")));
    }
    let eta0 = 1.0 / (3f64.powf(p + 2.0) * gamma_fn(p)?);
    let xi0 = 1.0 - eta0;
    let c0 = (eta0 - 1.0).exp() / eta0;
    Ok((xi0, c0))
}

/// The bracket constants c1 < c2 for the transition roots. Requires
/// xi > xi0(p).
pub fn bracket_c(p: f64, xi: f64) -> Result<(f64, f64)> {
    let (xi0, _) = thresholds(p)?;
    if !(xi > xi0) {
        return Err(Error::Domain(format!(
            "bracket_c requires xi > xi0(p) = {xi0}, got {xi}"
        )));
    }
    brackets_from_eta(p, xi, 1.0 - xi)
}

fn brackets_from_eta(p: f64, xi: f64, eta: f64) -> Result<(f64, f64)> {
    let e = std::f64::consts::E;
    let c1 = xi * (e * eta * gamma_fn(p - 1.0)?).powf(1.0 / (p - 2.0));
    let c2 = xi * (2.0 * e * eta * gamma_fn(p)?).powf(1.0 / (p - 2.0));
    Ok((c1, c2))
}

/// Left-hand side of the tangential-breakdown equation:
/// (1/xi - 1) int_w^inf s^{p-2} e^{-s/xi} ds - w^{p-2} e^{-w/xi}.
pub(crate) fn breakdown_lhs(p: f64, xi: f64, eta: f64, w: f64, cfg: &QuadratureConfig) -> f64 {
    eta / xi * tail_raw(p, xi, w, cfg) - w.powf(p - 2.0) * (-w / xi).exp()
}

/// Left-hand side of the handoff equation, to be matched against D(w):
/// (1/xi - 1) p (p-1) e^{w(1/xi - 1)} int_w^inf s^{p-2} e^{-s/xi} ds.
pub(crate) fn handoff_lhs(p: f64, xi: f64, eta: f64, w: f64, cfg: &QuadratureConfig) -> f64 {
    eta / xi * p * (p - 1.0) * (w * eta / xi).exp() * tail_raw(p, xi, w, cfg)
}

/// Solve the transition regime for the given parameters: w_star on (0, c1),
/// w_bar on (w_star, c2), then the companion root and D(w_bar).
pub fn solve_transition(params: &Parameters) -> Result<TransitionConstants> {
    let p = params.p();
    let xi = params.xi();
    let eta = params.one_minus_xi();
    let cfg = *params.quad();

    let (xi0, c0) = thresholds(p)?;
    let eta0 = 1.0 - xi0;
    if !(eta < eta0) {
        return Err(Error::Domain(format!(
            "construction requires C > C0(p) = {c0} (equivalently xi > xi0(p) = {xi0}); got C = {}",
            params.c()
        )));
    }
    let (c1, c2) = brackets_from_eta(p, xi, eta)?;

    // root of the breakdown equation; positive at the left end of the
    // bracket, negative at c1
    let f = |w: f64| breakdown_lhs(p, xi, eta, w, &cfg);
    let lo0 = 1e-12_f64.min(c1 * 1e-3);
    let (fa, fb) = (f(lo0), f(c1));
    if !(fa > 0.0) || !(fb < 0.0) {
        return Err(Error::Bracket(format!(
            "breakdown-root bracket failed on (0, c1): f({lo0}) = {fa}, f({c1}) = {fb}"
        )));
    }
    let w_star = bisect_sign_change(f, lo0, c1);

    // handoff root: lhs - D changes sign between w_star and c2
    let g = |w: f64| -> Result<f64> { Ok(handoff_lhs(p, xi, eta, w, &cfg) - solve_v(p, w)?.d) };
    let (ga, gb) = (g(w_star)?, g(c2)?);
    if !(ga > 0.0) || !(gb < 0.0) {
        return Err(Error::Bracket(format!(
            "handoff-root bracket failed on (w_star, c2): g({w_star}) = {ga}, g({c2}) = {gb}"
        )));
    }
    let (mut lo, mut hi) = (w_star, c2);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w_bar = 0.5 * (lo + hi);
    let pair = solve_v(p, w_bar)?;

    let tc = TransitionConstants {
        xi0,
        c0,
        c1,
        c2,
        w_star,
        w_bar,
        v_bar: pair.v,
        d_bar: pair.d,
    };
    validate(params, &tc, &cfg)?;
    Ok(tc)
}

fn bisect_sign_change<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) > 0 > f(hi)
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn validate(params: &Parameters, tc: &TransitionConstants, cfg: &QuadratureConfig) -> Result<()> {
    let p = params.p();
    let xi = params.xi();
    let eta = params.one_minus_xi();
    let lam = crate::cup::lambda(p);
    let ordered = 0.0 < tc.w_star
        && tc.w_star < tc.c1
        && tc.c1 < tc.c2
        && tc.c2 < xi
        && tc.c2 < w_sup(p)
        && tc.w_star < tc.w_bar
        && tc.w_bar < tc.c2
        && -tc.w_bar < tc.v_bar
        && tc.v_bar < -lam * tc.w_bar;
    if !ordered {
        return Err(Error::Bracket(format!(
            "transition constants violate their ordering: {tc:?}"
        )));
    }
    let r1 = breakdown_lhs(p, xi, eta, tc.w_star, cfg).abs();
    let r2 = (handoff_lhs(p, xi, eta, tc.w_bar, cfg) - tc.d_bar).abs();
    if r1 > 1e-10 || r2 > 1e-10 {
        return Err(Error::Bracket(format!(
            "transition root residuals too large: breakdown {r1}, handoff {r2}"
        )));
    }
    Ok(())
}
