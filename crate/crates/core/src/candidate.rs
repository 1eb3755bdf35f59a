//! The extremal candidate b on Omega_C: the coefficient functions m1 and m3
//! of the tangential regimes, the four-branch evaluation over R1..R4, and the
//! partial derivative in x2 used by the smoothness checks.
//!
//! The exponential prefactors of the displayed integrals are folded into the
//! substitution s = z + xi r before quadrature, so no large exponentials are
//! ever formed.

use crate::cup::{chord_coords, slope_q, slope_r, ChordCoords};
use crate::domain::{classify, tangent_u, Parameters, Point, SubdomainLabel};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_tail};
use crate::special::gamma_fn;
use crate::transition::TransitionConstants;

/// How a point is threaded by the foliation: a tangent foot, barycentric
/// weights in the affine patch, or a chord pair.
#[derive(Debug, Clone, Copy)]
pub enum Foliation {
    Tangent { u: f64 },
    Affine { alphas: [f64; 3] },
    Chord(ChordCoords),
}

/// Value of the candidate at a point together with the foliation data that
/// produced it.
#[derive(Debug, Clone, Copy)]
pub struct BellmanValue {
    pub value: f64,
    pub label: SubdomainLabel,
    pub foliation: Foliation,
}

/// m1(z) = (p/xi) e^{z/xi} int_z^inf s |s|^{p-2} e^{-s/xi} ds, for any real z.
pub fn m1(params: &Parameters, z: f64) -> f64 {
    let p = params.p();
    let xi = params.xi();
    let cfg = params.quad();
    if z >= 0.0 {
        // p int_0^inf (z + xi r)^{p-1} e^{-r} dr
        p * integrate_tail(|r| (z + xi * r).powf(p - 1.0) * (-r).exp(), 0.0, cfg)
    } else {
        // (p/xi) [ e^{z/xi} xi^p Gamma(p) - int_0^{-z} u^{p-1} e^{(u+z)/xi} du ]
        let gamma_p = gamma_fn(p).expect("p > 2");
        let head = (z / xi).exp() * xi.powf(p) * gamma_p;
        let body = integrate(|u| u.powf(p - 1.0) * ((u + z) / xi).exp(), 0.0, -z, cfg);
        p / xi * (head - body)
    }
}

/// m1'(z) from the foliation ODE: m' = (m - p z |z|^{p-2}) / xi.
pub fn m1_prime(params: &Parameters, z: f64) -> f64 {
    let p = params.p();
    (m1(params, z) - p * z * z.abs().powf(p - 2.0)) / params.xi()
}

/// m3(z) for z <= v_bar: the left tangential coefficient, matched to the cup
/// data at v_bar.
pub fn m3(params: &Parameters, tc: &TransitionConstants, z: f64) -> Result<f64> {
    let p = params.p();
    let xi = params.xi();
    if z > tc.v_bar + 1e-9 {
        return Err(Error::Domain(format!(
            "m3 requires z <= v_bar = {}, got {z}",
            tc.v_bar
        )));
    }
    // -(p/xi) e^{z/xi} int_z^{v_bar} (-s)^{p-1} e^{-s/xi} ds
    //   = -p int_0^{(v_bar - z)/xi} (-z - xi r)^{p-1} e^{-r} dr
    let body = integrate(
        |r| (-z - xi * r).powf(p - 1.0) * (-r).exp(),
        0.0,
        (tc.v_bar - z) / xi,
        params.quad(),
    );
    let matching = (tc.v_bar - tc.w_bar).exp()
        * (m1(params, tc.w_bar) - p * tc.w_bar.powf(p - 1.0))
        - p * (-tc.v_bar).powf(p - 1.0);
    Ok(-p * body + ((z - tc.v_bar) / xi).exp() * matching)
}

pub fn m3_prime(params: &Parameters, tc: &TransitionConstants, z: f64) -> Result<f64> {
    let p = params.p();
    Ok((m3(params, tc, z)? - p * z * z.abs().powf(p - 2.0)) / params.xi())
}

/// Barycentric coordinates of x with respect to the affine-patch corners
/// X = (w_bar + xi, C e^{w_bar + xi}) on Gamma_C and Y, Z on Gamma_1.
///
/// Solved in the basis (X - Y, Z - Y): eliminating the x1 equation leaves
/// the stable chord-residual numerator for the X-weight, and the remaining
/// error lives along the short Y-Z edge where it cannot disturb the
/// reconstruction. A naive 2x2 solve is conditioned like X2 / diameter and
/// loses eight digits once the patch has shrunk at large C.
pub(crate) fn barycentric(params: &Parameters, tc: &TransitionConstants, x: Point) -> [f64; 3] {
    let xi = params.xi();
    let eta = params.one_minus_xi();
    let k_bar = tc.w_bar.exp() / eta; // slope of Gamma_C tangent = C e^{w_bar + xi}
    let r_bar = slope_r(tc.v_bar, tc.w_bar);
    let resid = (x.x2 - 1.0) - crate::domain::chord_line_offset(tc, x.x1);
    let snap = |a: f64| if (-1e-6..0.0).contains(&a) { 0.0 } else { a };
    let a1 = snap(resid / (xi * (k_bar - r_bar)));
    let a3 = snap((a1 * xi - (x.x1 - tc.w_bar)) / (tc.w_bar - tc.v_bar));
    let a2 = 1.0 - a1 - a3;
    if (-1e-6..0.0).contains(&a2) {
        [a1, 0.0, 1.0 - a1]
    } else {
        [a1, a2, a3]
    }
}

fn affine_slope(params: &Parameters, tc: &TransitionConstants) -> f64 {
    // (m1(w_bar) - q) / (k(w_bar) - r): the x2-gradient on the affine patch
    let q = slope_q(params.p(), tc.v_bar, tc.w_bar);
    let r = slope_r(tc.v_bar, tc.w_bar);
    (m1(params, tc.w_bar) - q) / (params.k(tc.w_bar) - r)
}

fn eval_r1(params: &Parameters, x: Point, u: f64) -> Result<f64> {
    if u < -1e-9 {
        return Err(Error::Domain(format!(
            "right tangential branch needs a nonnegative foot, got u = {u}"
        )));
    }
    let u = u.max(0.0);
    Ok(m1(params, u) * (x.x1 - u) + u.powf(params.p()))
}

fn eval_r2(params: &Parameters, tc: &TransitionConstants, x: Point) -> f64 {
    let p = params.p();
    let q = slope_q(p, tc.v_bar, tc.w_bar);
    let r = slope_r(tc.v_bar, tc.w_bar);
    let base = q * (x.x1 - tc.w_bar) + tc.w_bar.powf(p);
    base + affine_slope(params, tc) * (x.x2 - r * (x.x1 - tc.w_bar) - tc.w_bar.exp())
}

fn eval_r3(params: &Parameters, tc: &TransitionConstants, x: Point, u: f64) -> Result<f64> {
    Ok(m3(params, tc, u)? * (x.x1 - u) + (-u).powf(params.p()))
}

fn eval_r4(params: &Parameters, cc: &ChordCoords, x: Point) -> f64 {
    cc.pair.q * (x.x1 - cc.pair.w) + cc.pair.w.powf(params.p())
}

/// Evaluate the candidate. On shared boundaries adjacent branches agree, so
/// any of the legal labels gives the same value up to solver tolerance.
pub fn bellman(params: &Parameters, tc: &TransitionConstants, x: Point) -> Result<BellmanValue> {
    let label = classify(params, tc, x)?;
    match label {
        SubdomainLabel::R1 => {
            let u = tangent_u(params, x)?;
            Ok(BellmanValue {
                value: eval_r1(params, x, u)?,
                label,
                foliation: Foliation::Tangent { u },
            })
        }
        SubdomainLabel::R2 => Ok(BellmanValue {
            value: eval_r2(params, tc, x),
            label,
            foliation: Foliation::Affine {
                alphas: barycentric(params, tc, x),
            },
        }),
        SubdomainLabel::R3 => {
            let u = tangent_u(params, x)?;
            let u = u.min(tc.v_bar);
            Ok(BellmanValue {
                value: eval_r3(params, tc, x, u)?,
                label,
                foliation: Foliation::Tangent { u },
            })
        }
        SubdomainLabel::R4 => {
            let cc = chord_coords(params, tc, x)?;
            Ok(BellmanValue {
                value: eval_r4(params, &cc, x),
                label,
                foliation: Foliation::Chord(cc),
            })
        }
    }
}

/// Evaluate one specific branch formula at x, regardless of which subdomain
/// the point is classified into. Used by the boundary-matching checks.
pub fn branch_value(
    params: &Parameters,
    tc: &TransitionConstants,
    x: Point,
    label: SubdomainLabel,
) -> Result<f64> {
    match label {
        SubdomainLabel::R1 => {
            let u = tangent_u(params, x)?;
            eval_r1(params, x, u)
        }
        SubdomainLabel::R2 => Ok(eval_r2(params, tc, x)),
        SubdomainLabel::R3 => {
            let u = tangent_u(params, x)?.min(tc.v_bar);
            eval_r3(params, tc, x, u)
        }
        SubdomainLabel::R4 => {
            let cc = chord_coords(params, tc, x)?;
            Ok(eval_r4(params, &cc, x))
        }
    }
}

/// The partial derivative b_{x2}. In the tangential regimes this is
/// m'(u) e^{-u} (1 - xi); on the affine patch it is a constant; in the cup it
/// is D(w(x)).
pub fn bellman_x2(params: &Parameters, tc: &TransitionConstants, x: Point) -> Result<f64> {
    let label = classify(params, tc, x)?;
    branch_x2(params, tc, x, label)
}

/// Branch-specific b_{x2}, for two-sided boundary comparisons.
pub fn branch_x2(
    params: &Parameters,
    tc: &TransitionConstants,
    x: Point,
    label: SubdomainLabel,
) -> Result<f64> {
    let eta = params.one_minus_xi();
    match label {
        SubdomainLabel::R1 => {
            let u = tangent_u(params, x)?;
            Ok(m1_prime(params, u) * (-u).exp() * eta)
        }
        SubdomainLabel::R2 => Ok(affine_slope(params, tc)),
        SubdomainLabel::R3 => {
            let u = tangent_u(params, x)?.min(tc.v_bar);
            Ok(m3_prime(params, tc, u)? * (-u).exp() * eta)
        }
        SubdomainLabel::R4 => Ok(chord_coords(params, tc, x)?.pair.d),
    }
}

/// Convexity margin of the right tangential regime: positive iff
/// m1' - m1'' > 0 at the foot u. Written as
/// xi u^{p-2} e^{-u/xi} - (1-xi) int_u^inf s^{p-2} e^{-s/xi} ds.
pub(crate) fn h1(params: &Parameters, u: f64) -> f64 {
    let p = params.p();
    let xi = params.xi();
    let eta = params.one_minus_xi();
    xi * u.powf(p - 2.0) * (-u / xi).exp()
        - eta * crate::special::tail_raw(p, xi, u, params.quad())
}

/// Convexity margin of the left tangential regime at u <= v_bar.
pub(crate) fn h3(params: &Parameters, tc: &TransitionConstants, u: f64) -> f64 {
    let p = params.p();
    let xi = params.xi();
    let eta = params.one_minus_xi();
    let finite = integrate(
        |s| (-s / xi).exp() * (-s).powf(p - 2.0),
        u,
        tc.v_bar,
        params.quad(),
    );
    let tail = ((tc.w_bar - tc.v_bar) * eta / xi).exp()
        * crate::special::tail_raw(p, xi, tc.w_bar, params.quad());
    xi * (-u).powf(p - 2.0) * (-u / xi).exp() - eta * (finite + tail)
}
