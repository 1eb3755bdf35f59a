//! The chord ("cup") machinery: the coupling function F(v, w) pairing the two
//! chord feet on Gamma_1, the slopes q and r, the common derivative value
//! D(w), and the chord coordinates of points in R4.

use crate::domain::{chord_line_offset, Parameters, Point, SubdomainLabel};
use crate::error::{Error, Result};
use crate::transition::TransitionConstants;

/// Bracket constant for the companion root: v lies in (-w, -lambda w) with
/// lambda = (p - 1)/p.
pub fn lambda(p: f64) -> f64 {
    (p - 1.0) / p
}

/// Upper end of the admissible w-interval, (p - 2) / (3 p).
pub fn w_sup(p: f64) -> f64 {
    (p - 2.0) / (3.0 * p)
}

/// A coupled pair of chord feet (v, e^v), (w, e^w) on Gamma_1, with the
/// secant slopes and the shared derivative value D(w).
#[derive(Debug, Clone, Copy)]
pub struct CupPair {
    pub w: f64,
    pub v: f64,
    /// secant slope of t^p |t|-style boundary data: (w^p - (-v)^p)/(w - v)
    pub q: f64,
    /// secant slope of the exponential: (e^w - e^v)/(w - v)
    pub r: f64,
    /// D(w) = p (w^{p-1} + (-v)^{p-1}) / (e^w - e^v)
    pub d: f64,
}

/// Chord coordinates of a point in R4: the pair plus the barycentric
/// position beta = (x1 - v)/(w - v) along the chord.
#[derive(Debug, Clone, Copy)]
pub struct ChordCoords {
    pub pair: CupPair,
    pub beta: f64,
}

/// expm1(s) - s, kept accurate near zero by its series.
fn expm1_minus_linear(s: f64) -> f64 {
    if s.abs() > 0.5 {
        return s.exp_m1() - s;
    }
    // sum s^k / k! for k >= 2
    let mut term = 0.5 * s * s;
    let mut acc = term;
    for k in 3..=16 {
        term *= s / k as f64;
        acc += term;
    }
    acc
}

/// The coupling function F(v, w). Roots in v pair the chord feet.
///
/// Written as w^{p-1} e^v [ E w (1 - t^p) - p (1 + t^{p-1}) (E - s) +
/// p t^{p-1} s E ] with t = -v/w, s = w - v, E = expm1(s). In the displayed
/// form the value near the origin is w^{p+2}-small against w^p-sized
/// summands, which f64 cannot resolve; here every bracketed term is O(w^2)
/// and the sign survives down to w of order 1e-12.
pub fn big_f(p: f64, v: f64, w: f64) -> f64 {
    let t = -v / w;
    let s = w - v;
    let e = s.exp_m1();
    let bracket = e * w * (1.0 - t.powf(p)) - p * (1.0 + t.powf(p - 1.0)) * expm1_minus_linear(s)
        + p * t.powf(p - 1.0) * s * e;
    w.powf(p - 1.0) * v.exp() * bracket
}

pub(crate) fn slope_r(v: f64, w: f64) -> f64 {
    // e^v expm1(w - v) / (w - v), stable for small w - v
    v.exp() * (w - v).exp_m1() / (w - v)
}

pub(crate) fn slope_q(p: f64, v: f64, w: f64) -> f64 {
    (w.powf(p) - (-v).powf(p)) / (w - v)
}

fn d_value(p: f64, v: f64, w: f64) -> f64 {
    p * (w.powf(p - 1.0) + (-v).powf(p - 1.0)) / (v.exp() * (w - v).exp_m1())
}

/// The two asymmetric expressions for D(w), through the left and right foot
/// respectively. The denominators r - e^v and e^w - r are both O((w-v))
/// differences of near-unit values, so they are rebuilt from expm1-type
/// kernels; the check that all three forms of D agree stays meaningful in
/// the shrunken cup at large C.
pub fn d_asymmetric_forms(p: f64, pair: &CupPair) -> (f64, f64) {
    let (v, w, q) = (pair.v, pair.w, pair.q);
    let s = w - v;
    // r - e^v = e^v (expm1(s) - s) / s
    let r_minus_ev = v.exp() * expm1_minus_linear(s) / s;
    // e^w - r = e^v (s e^s - expm1(s)) / s, and s e^s - expm1(s) =
    // sum_{k>=2} s^k (k-1)/k!
    let upper = if s.abs() > 0.5 {
        s * s.exp() - s.exp_m1()
    } else {
        let mut base = 0.5 * s * s; // s^k / k! starting at k = 2
        let mut acc = base;
        for k in 3..=18 {
            base *= s / k as f64;
            acc += base * (k - 1) as f64;
        }
        acc
    };
    let d1 = (q + p * (-v).powf(p - 1.0)) / r_minus_ev;
    let d2 = (p * w.powf(p - 1.0) - q) / (v.exp() * upper / s);
    (d1, d2)
}

/// Find the unique companion root v in (-w, -w(p-1)/p) of F(., w), and fill
/// in the derived slopes. Requires 0 < w < (p-2)/(3p).
pub fn solve_v(p: f64, w: f64) -> Result<CupPair> {
    solve_v_iters(p, w, 120)
}

/// Same as `solve_v` with a caller-chosen bisection budget; scan passes use a
/// reduced budget since only the sign of the chord residual matters there.
pub(crate) fn solve_v_iters(p: f64, w: f64, iters: u32) -> Result<CupPair> {
    if !(w > 0.0 && w < w_sup(p)) {
        return Err(Error::Domain(format!(
            "solve_v requires 0 < w < (p-2)/(3p) = {}, got {w}",
            w_sup(p)
        )));
    }
    let lam = lambda(p);
    let (a, b) = (-w, -lam * w);
    let fa = big_f(p, a, w);
    let fb = big_f(p, b, w);
    if !(fa > 0.0) || !(fb < 0.0) {
        return Err(Error::Bracket(format!(
            "companion-root bracket failed at w = {w}: F(-w,w) = {fa}, F(-lambda w,w) = {fb}"
        )));
    }
    let (mut lo, mut hi) = (a, b); // F(lo) > 0 > F(hi)
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if big_f(p, mid, w) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    Ok(CupPair {
        w,
        v,
        q: slope_q(p, v, w),
        r: slope_r(v, w),
        d: d_value(p, v, w),
    })
}

/// D(w) on (0, (p-2)/(3p)), via the symmetric form
/// p (w^{p-1} + (-v)^{p-1}) / (e^w - e^v).
pub fn d_of_w(p: f64, w: f64) -> Result<f64> {
    Ok(solve_v(p, w)?.d)
}

/// Residual of "x lies on the chord of the pair (v(w), w)", written against
/// the offset x2 - 1 so that sign decisions survive in the thin cup.
fn chord_residual(p: f64, w: f64, x: Point, iters: u32) -> Result<f64> {
    let pair = solve_v_iters(p, w, iters)?;
    Ok(pair.r * (x.x1 - w) + (w.exp_m1() - (x.x2 - 1.0)))
}

/// Chord coordinates of x in R4: the unique coupled pair whose chord passes
/// through x, with the barycentric position along it.
///
/// The corner (0, 1) degenerates to v = w = 0 with beta = 1/2 by convention.
pub fn chord_coords(
    params: &Parameters,
    tc: &TransitionConstants,
    x: Point,
) -> Result<ChordCoords> {
    if crate::domain::classify(params, tc, x)? != SubdomainLabel::R4 {
        return Err(Error::Domain(format!(
            "chord_coords requires a point of R4, got ({}, {})",
            x.x1, x.x2
        )));
    }
    let p = params.p();
    let x2m1 = x.x2 - 1.0;

    // degenerate corner
    if x.x1.abs() < 1e-14 && x2m1.abs() < 1e-14 {
        return Ok(ChordCoords {
            pair: CupPair {
                w: 0.0,
                v: 0.0,
                q: 0.0,
                r: 1.0,
                d: 0.0,
            },
            beta: 0.5,
        });
    }

    let scale = x.x2.abs().max(1.0);
    // On or above the top chord within rounding fuzz: the pair is
    // (v_bar, w_bar). Strictly-below points go through the full solve; the
    // classifier admits points up to 1e-12 above the chord, which would
    // leave the residual scan without a sign change. The band below the
    // chord is a few ulps only, so that derivative probes stepping 1e-15
    // inside still reach the genuine solve.
    if x2m1 - chord_line_offset(tc, x.x1) >= -4.0 * f64::EPSILON * scale {
        let pair = CupPair {
            w: tc.w_bar,
            v: tc.v_bar,
            q: slope_q(p, tc.v_bar, tc.w_bar),
            r: slope_r(tc.v_bar, tc.w_bar),
            d: tc.d_bar,
        };
        return Ok(ChordCoords {
            pair,
            beta: (x.x1 - tc.v_bar) / (tc.w_bar - tc.v_bar),
        });
    }
    // on Gamma_1: the point is a chord endpoint
    if (x2m1 - x.x1.exp_m1()).abs() <= 1e-12 * scale {
        return if x.x1 > 0.0 {
            Ok(ChordCoords {
                pair: solve_v(p, x.x1)?,
                beta: 1.0,
            })
        } else {
            // solve v(w) = x1 for w; v is continuous with v(w) in (-w, -lambda w)
            let g = |w: f64| -> Result<f64> { Ok(solve_v(p, w)?.v - x.x1) };
            let (mut lo, mut hi) = (-x.x1, -x.x1 / lambda(p));
            if !(g(lo)? > 0.0) || !(g(hi)? < 0.0) {
                return Err(Error::Bracket(format!(
                    "lower-boundary chord bracket failed at x1 = {}",
                    x.x1
                )));
            }
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
            Ok(ChordCoords {
                pair: solve_v(p, 0.5 * (lo + hi))?,
                beta: 0.0,
            })
        };
    }

    // interior: scan w for a sign change of the chord residual, then bisect.
    // The residual is negative near the left end and positive at w_bar; the
    // construction asserts a single crossing but not monotonicity, so the
    // scan guards the bracket.
    //
    // The left end is |x1| (for x1 < 0 the companion foot must reach x1), and
    // never below 1e-9: underneath that the coupling residual sinks into
    // rounding noise, and the only points it would serve sit against the
    // degenerate corner where the value is zero anyway.
    let lo_end = x.x1.abs().max(1e-9) * (1.0 + 1e-12);
    let hi_end = tc.w_bar;
    if lo_end >= hi_end {
        return Err(Error::Domain(format!(
            "no admissible chord abscissa for ({}, {})",
            x.x1, x.x2
        )));
    }
    const SCAN: usize = 1024;
    let mut prev_w = lo_end;
    let mut prev_h = chord_residual(p, prev_w, x, 40)?;
    let mut bracket = None;
    for i in 1..=SCAN {
        let w = lo_end + (hi_end - lo_end) * i as f64 / SCAN as f64;
        let h = chord_residual(p, w, x, 40)?;
        if prev_h <= 0.0 && h >= 0.0 {
            bracket = Some((prev_w, w));
            break;
        }
        prev_w = w;
        prev_h = h;
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| Error::Bracket(format!("no chord through ({}, {})", x.x1, x.x2)))?;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if chord_residual(p, mid, x, 120)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pair = solve_v(p, 0.5 * (lo + hi))?;
    Ok(ChordCoords {
        beta: (x.x1 - pair.v) / (pair.w - pair.v),
        pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::{solve_transition, thresholds};

    #[test]
    fn coupling_odd_endpoint_identity() {
        // F(-w, w) = 4 p w^{p-1} (w cosh w - sinh w); both sides lose a few
        // digits to cancellation, so compare at the scale of the summands
        let (p, w) = (3.0, 0.05_f64);
        let direct = big_f(p, -w, w);
        let closed = 4.0 * p * w.powf(p - 1.0) * (w * w.cosh() - w.sinh());
        assert!((direct - closed).abs() < 1e-13 * (4.0 * p * w.powf(p)));
        assert!(direct > 0.0);
    }

    #[test]
    fn coupling_vanishes_at_origin() {
        assert!(big_f(3.0, -1e-8, 1e-8).abs() < 1e-20);
    }

    #[test]
    fn coupling_negative_at_lambda_end() {
        let (p, w) = (3.0, 0.05);
        assert!(big_f(p, -lambda(p) * w, w) < 0.0);
    }

    #[test]
    fn bracket_signs_on_log_grid() {
        for &p in &[2.5, 3.0, 4.0] {
            let top = 0.999 * w_sup(p);
            for i in 0..24 {
                let w = top * (10.0_f64).powf(-4.0 * (23 - i) as f64 / 23.0);
                assert!(big_f(p, -w, w) > 0.0, "p={p}, w={w}");
                assert!(big_f(p, -lambda(p) * w, w) < 0.0, "p={p}, w={w}");
            }
        }
    }

    // Independent oracle: locate the root of F(., w) by a fine scan plus
    // bisection of the scanned cell.
    fn v_scan_oracle(p: f64, w: f64) -> f64 {
        let n = 10_000;
        let (a, b) = (-w, -lambda(p) * w);
        let mut prev = a;
        for i in 1..=n {
            let v = a + (b - a) * i as f64 / n as f64;
            if big_f(p, v, w) <= 0.0 {
                let (mut lo, mut hi) = (prev, v);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if big_f(p, mid, w) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
            prev = v;
        }
        panic!("oracle found no sign change");
    }

    #[test]
    fn solve_v_matches_scan_oracle() {
        let (p, w) = (3.0, 0.1);
        let pair = solve_v(p, w).unwrap();
        let oracle = v_scan_oracle(p, w);
        assert!((pair.v - oracle).abs() < 1e-12);
        assert!(pair.v > -w && pair.v < -w * lambda(p));
        assert!(big_f(p, pair.v, w).abs() < 1e-11);
    }

    #[test]
    fn solve_v_rejects_out_of_range_w() {
        assert!(solve_v(3.0, 0.0).is_err());
        assert!(solve_v(3.0, w_sup(3.0)).is_err());
        assert!(solve_v(3.0, -0.1).is_err());
    }

    #[test]
    fn d_bounds_and_monotonicity() {
        let p = 3.0;
        for &w in &[0.02, 0.05, 0.1] {
            let pair = solve_v(p, w).unwrap();
            let d = pair.d;
            // strict upper bounds through either foot
            assert!(d < p * (p - 1.0) * (-pair.v).powf(p - 2.0) * (-pair.v).exp(), "w={w}");
            assert!(d < p * (p - 1.0) * w.powf(p - 2.0) * (-w).exp(), "w={w}");
            // and the crude lower bound used by the transition brackets
            assert!(d > 0.5 * p * (-w).exp() * w.powf(p - 2.0), "w={w}");
        }
        assert!(d_of_w(p, 0.08).unwrap() > d_of_w(p, 0.04).unwrap());
    }

    #[test]
    fn d_three_expressions_agree() {
        // moderate w and the shrunken-cup regime both stay within 1e-9
        for &(p, w) in &[(2.5, 0.03), (3.0, 0.05), (4.0, 0.1), (3.0, 1e-5), (2.5, 1e-7)] {
            let pair = solve_v(p, w).unwrap();
            let (d1, d2) = d_asymmetric_forms(p, &pair);
            let d3 = pair.d;
            assert!((d1 - d3).abs() < 1e-9 * d3.abs(), "p={p} w={w}: {d1} vs {d3}");
            assert!((d2 - d3).abs() < 1e-9 * d3.abs(), "p={p} w={w}: {d2} vs {d3}");
        }
    }

    fn setup() -> (Parameters, TransitionConstants) {
        let (_, c0) = thresholds(3.0).unwrap();
        let params = Parameters::new(3.0, 2.0 * c0).unwrap();
        let tc = solve_transition(&params).unwrap();
        (params, tc)
    }

    #[test]
    fn chord_coords_degenerate_corner() {
        let (params, tc) = setup();
        let cc = chord_coords(&params, &tc, Point::new(0.0, 1.0)).unwrap();
        assert_eq!(cc.pair.v, 0.0);
        assert_eq!(cc.pair.w, 0.0);
        assert_eq!(cc.beta, 0.5);
    }

    #[test]
    fn chord_coords_lower_boundary_endpoints() {
        let (params, tc) = setup();
        let w0 = 0.5 * tc.w_bar;
        let cc = chord_coords(&params, &tc, Point::new(w0, w0.exp())).unwrap();
        assert!((cc.pair.w - w0).abs() < 1e-11);
        assert!((cc.beta - 1.0).abs() < 1e-9);

        let pair = solve_v(3.0, w0).unwrap();
        let cc = chord_coords(&params, &tc, Point::new(pair.v, pair.v.exp())).unwrap();
        assert!((cc.pair.v - pair.v).abs() < 1e-11);
        assert!(cc.beta.abs() < 1e-9);
    }

    #[test]
    fn chord_coords_round_trip_through_midpoint() {
        let (params, tc) = setup();
        let w0 = 0.5 * tc.w_bar;
        let pair = solve_v(3.0, w0).unwrap();
        let x = Point::new(
            0.5 * (pair.v + pair.w),
            0.5 * (pair.v.exp() + pair.w.exp()),
        );
        let cc = chord_coords(&params, &tc, x).unwrap();
        assert!((cc.pair.w - w0).abs() < 1e-9);
        assert!((cc.pair.v - pair.v).abs() < 1e-9);
        assert!((cc.beta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn chord_coords_rejects_non_r4_points() {
        let (params, tc) = setup();
        assert!(chord_coords(&params, &tc, Point::new(0.0, params.c())).is_err());
    }
}
