//! The domain Omega_C between the curves x2 = e^{x1} and x2 = C e^{x1}, the
//! tangency gap xi(C), the tangent coordinate u(x), and the classification of
//! points into the four foliation subdomains.

use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;
use crate::transition::TransitionConstants;

/// Relative slack used for membership and boundary tests.
pub(crate) const BOUNDARY_SLACK: f64 = 1e-12;

/// Problem parameters: the exponent p > 2, the characteristic bound C >= 1,
/// and the derived tangency gap xi solving e^{-xi} = C (1 - xi).
///
/// The complement eta = 1 - xi is stored alongside xi: for large C it is the
/// quantity actually resolved by the solver, and downstream formulas use it
/// directly to avoid cancellation.
#[derive(Debug, Clone)]
pub struct Parameters {
    p: f64,
    c: f64,
    xi: f64,
    eta: f64,
    quad: QuadratureConfig,
}

impl Parameters {
    pub fn new(p: f64, c: f64) -> Result<Self> {
        Self::with_config(p, c, QuadratureConfig::default())
    }

    pub fn with_config(p: f64, c: f64, quad: QuadratureConfig) -> Result<Self> {
        if !(p > 2.0) {
            return Err(Error::Domain(format!("p must exceed 2, got {p}")));
        }
        if !(c >= 1.0) {
            return Err(Error::Domain(format!("C must be at least 1, got {c}")));
        }
        let eta = solve_eta(c);
        Ok(Self {
            p,
            c,
            xi: 1.0 - eta,
            eta,
            quad,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The tangency gap xi(C) in [0, 1).
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// 1 - xi, held at full precision.
    pub fn one_minus_xi(&self) -> f64 {
        self.eta
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    /// Slope of the tangent to Gamma_C through (z, e^z): k(z) = e^z / (1 - xi).
    pub fn k(&self, z: f64) -> f64 {
        z.exp() / self.eta
    }

    /// Membership in Omega_C with relative boundary slack.
    pub fn contains(&self, x: Point) -> bool {
        if !(x.x2 > 0.0) || !x.x1.is_finite() {
            return false;
        }
        let lower = x.x1.exp();
        let upper = self.c * lower;
        x.x2 >= lower * (1.0 - BOUNDARY_SLACK) && x.x2 <= upper * (1.0 + BOUNDARY_SLACK)
    }

    pub(crate) fn require_member(&self, x: Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point ({}, {}) lies outside Omega_C (need e^x1 <= x2 <= C e^x1)",
                x.x1, x.x2
            )))
        }
    }
}

/// A point of the plane; domain membership is checked by the operations that
/// need it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
}

/// Foliation subdomain labels. R1/R3 are the right and left tangential
/// regimes, R2 is the affine patch, R4 is the chord-foliated region along the
/// lower boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SubdomainLabel {
    R1,
    R2,
    R3,
    R4,
}

impl std::fmt::Display for SubdomainLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SubdomainLabel::R1 => "R1",
            SubdomainLabel::R2 => "R2",
            SubdomainLabel::R3 => "R3",
            SubdomainLabel::R4 => "R4",
        };
        f.write_str(s)
    }
}

/// Solve e^{-xi} = C (1 - xi) for xi in [0, 1).
pub fn solve_xi(c: f64) -> Result<f64> {
    if !(c >= 1.0) {
        return Err(Error::Domain(format!("solve_xi requires C >= 1, got {c}")));
    }
    Ok(1.0 - solve_eta(c))
}

/// Solve C eta = e^{eta - 1} for eta = 1 - xi in (0, 1]. Bisection followed
/// by two Newton polish steps; the equation is smooth and monotone on the
/// bracket.
fn solve_eta(c: f64) -> f64 {
    if c == 1.0 {
        return 1.0;
    }
    let g = |eta: f64| c * eta - (eta - 1.0).exp();
    let mut lo = 0.0_f64; // g(0) = -1/e < 0
    let mut hi = 1.0_f64; // g(1) = C - 1 > 0
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut eta = 0.5 * (lo + hi);
    for _ in 0..2 {
        let deriv = c - (eta - 1.0).exp();
        if deriv > 0.0 {
            let step = g(eta) / deriv;
            let next = eta - step;
            if next > 0.0 && next <= 1.0 {
                eta = next;
            }
        }
    }
    eta
}

/// Residual of the tangent-coordinate equation x2 = k(u)(x1 - u) + e^u,
/// written to avoid cancellation when x2 is close to 1.
fn tangent_residual(params: &Parameters, x: Point, u: f64) -> f64 {
    let eu = u.exp();
    eu * (x.x1 - u) / params.one_minus_xi() + (u.exp_m1() - (x.x2 - 1.0))
}

/// The tangent coordinate u(x): the foot on Gamma_1 of the tangent to
/// Gamma_C through x whose tangency point lies to the right of x. The root
/// is bracketed in [x1 - xi, x1]; the residual is strictly decreasing there
/// (its derivative is k(u)(x1 - u - xi) <= 0).
pub fn tangent_u(params: &Parameters, x: Point) -> Result<f64> {
    params.require_member(x)?;
    let a = x.x1 - params.xi();
    let b = x.x1;

    // Residual noise at the endpoints is eps-sized relative to the summands;
    // points whose residual drowns in it sit on the boundary curves and get
    // the exact foot. This matters at Gamma_C, where the tangency makes the
    // root quadratically sensitive to residual fuzz.
    let eps = f64::EPSILON;
    let ga = tangent_residual(params, x, a);
    if ga <= 8.0 * eps * (params.k(a) * params.xi() + x.x2) {
        return Ok(a);
    }
    let gb = tangent_residual(params, x, b);
    if gb >= -8.0 * eps * (b.exp() + x.x2) {
        return Ok(b);
    }

    let (mut lo, mut hi) = (a, b); // g(lo) > 0 > g(hi)
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if tangent_residual(params, x, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Height of the chord line through (v_bar, e^v_bar) and (w_bar, e^w_bar)
/// above abscissa x1, in the stable "offset from 1" form used by membership
/// tests near the corner (0, 1). The slope comes from the expm1 kernel:
/// subtracting the two near-unit exponentials directly would cost eight
/// digits once the cup has shrunk at large C.
pub(crate) fn chord_line_offset(tc: &TransitionConstants, x1: f64) -> f64 {
    let r = tc.v_bar.exp() * (tc.w_bar - tc.v_bar).exp_m1() / (tc.w_bar - tc.v_bar);
    r * (x1 - tc.w_bar) + tc.w_bar.exp_m1()
}

/// Classify a point of Omega_C into its foliation subdomain.
///
/// Decision order: points on or below the chord through the cup endpoints go
/// to R4; otherwise the tangent coordinate decides, with u >= w_bar giving
/// R1, u <= v_bar giving R3 and R2 in between. Boundary points may carry
/// either adjacent label; this order makes the map deterministic.
pub fn classify(params: &Parameters, tc: &TransitionConstants, x: Point) -> Result<SubdomainLabel> {
    params.require_member(x)?;
    let tol = BOUNDARY_SLACK * x.x2.abs().max(1.0);
    if (x.x2 - 1.0) - chord_line_offset(tc, x.x1) <= tol {
        return Ok(SubdomainLabel::R4);
    }
    let u = tangent_u(params, x)?;
    let u_tol = BOUNDARY_SLACK;
    if u >= tc.w_bar - u_tol {
        Ok(SubdomainLabel::R1)
    } else if u <= tc.v_bar + u_tol {
        Ok(SubdomainLabel::R3)
    } else {
        Ok(SubdomainLabel::R2)
    }
}
