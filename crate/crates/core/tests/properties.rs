//! Property tests for the geometric and measure-theoretic invariants that
//! must hold across the whole parameter space, not just at hand-picked
//! points.

use std::sync::OnceLock;

use proptest::prelude::*;

use jnb::cup::{big_f, lambda, w_sup};
use jnb::domain::{classify, solve_xi, tangent_u, Parameters, Point, SubdomainLabel};
use jnb::optimizer::{
    a_infty_characteristic, moments, Piece, PieceKind, PiecewiseTestFunction,
};
use jnb::special::tail_integral;
use jnb::transition::{solve_transition, thresholds, TransitionConstants};

fn reference() -> &'static (Parameters, TransitionConstants) {
    static CELL: OnceLock<(Parameters, TransitionConstants)> = OnceLock::new();
    CELL.get_or_init(|| {
        let (_, c0) = thresholds(3.0).unwrap();
        let params = Parameters::new(3.0, 2.0 * c0).unwrap();
        let tc = solve_transition(&params).unwrap();
        (params, tc)
    })
}

/// Literal form of the four subdomain definitions, used as the independent
/// classification oracle.
fn in_sets(params: &Parameters, tc: &TransitionConstants, x: Point) -> [bool; 4] {
    let (w, v) = (tc.w_bar, tc.v_bar);
    let xi = params.xi();
    let r = (w.exp() - v.exp()) / (w - v);
    let tangent_w = params.k(w) * (x.x1 - w) + w.exp();
    let tangent_v = params.k(v) * (x.x1 - v) + v.exp();
    let chord = r * (x.x1 - w) + w.exp();
    [
        x.x2 <= tangent_w || x.x1 >= w + xi,
        (x.x2 <= tangent_v && x.x2 >= chord && x.x2 >= tangent_w)
            || (x.x1 >= v + xi && x.x1 <= w + xi && x.x2 >= tangent_v && x.x2 >= tangent_w),
        x.x1 <= v + xi && x.x2 >= tangent_v,
        x.x2 <= chord,
    ]
}

/// Random profiles: ordered pieces tiling (0,1), each constant or a log
/// decay whose pivot keeps the closed forms in range.
fn profile_strategy() -> impl Strategy<Value = PiecewiseTestFunction> {
    let breaks = proptest::collection::vec(0.02f64..0.98, 0..3);
    let kinds = proptest::collection::vec((0f64..1.0, -2f64..2.0, 0.1f64..1.0), 4);
    (breaks, kinds, 0.05f64..0.95).prop_map(|(mut cuts, kinds, xi)| {
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 0.01);
        let mut edges = vec![0.0];
        edges.extend(cuts);
        edges.push(1.0);
        let mut pieces = Vec::new();
        for (i, pair) in edges.windows(2).enumerate() {
            let (sel, value, pivot_frac) = kinds[i % kinds.len()];
            let kind = if sel < 0.5 {
                PieceKind::Const { value }
            } else {
                PieceKind::LogDecay {
                    offset: value,
                    pivot: (pair[1] * pivot_frac).max(1e-3),
                }
            };
            pieces.push(Piece {
                a: pair[0],
                b: pair[1],
                kind,
            });
        }
        PiecewiseTestFunction::new(pieces, xi).expect("strategy builds valid profiles")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xi_solves_its_equation(c in 1.0f64..1.0e6) {
        let xi = solve_xi(c).unwrap();
        prop_assert!((0.0..1.0).contains(&xi));
        // the defining relation, at the precision the rounded xi supports
        let resid = ((-xi).exp() - c * (1.0 - xi)).abs();
        prop_assert!(resid < 1e-9 * c.max(1.0));
    }

    #[test]
    fn xi_is_monotone_in_c(c in 1.0f64..1.0e5, bump in 1.01f64..3.0) {
        prop_assert!(solve_xi(c * bump).unwrap() > solve_xi(c).unwrap());
    }

    #[test]
    fn tangent_foot_round_trips(u0 in -2.5f64..2.5, s in 0.05f64..0.95) {
        let (params, _) = reference();
        let x1 = u0 + s * params.xi();
        let x2 = params.k(u0) * (x1 - u0) + u0.exp();
        let u = tangent_u(params, Point::new(x1, x2)).unwrap();
        prop_assert!((u - u0).abs() < 1e-10);
    }

    #[test]
    fn coupling_brackets_hold(p in 2.1f64..5.0, frac in 0.001f64..0.999) {
        let w = frac * w_sup(p);
        prop_assert!(big_f(p, -w, w) > 0.0);
        prop_assert!(big_f(p, -lambda(p) * w, w) < 0.0);
    }

    #[test]
    fn tail_integral_decreases(p in 2.1f64..5.0, xi in 0.3f64..1.0, w in 0.0f64..3.0, dw in 0.01f64..2.0) {
        let near = tail_integral(p, xi, w).unwrap();
        let far = tail_integral(p, xi, w + dw).unwrap();
        prop_assert!(far < near);
    }

    #[test]
    fn classification_matches_set_definitions(x1 in -4.0f64..4.0, t in 0.0f64..1.0) {
        let (params, tc) = reference();
        let base = x1.exp();
        let x = Point::new(x1, base + t * (params.c() - 1.0) * base);
        let sets = in_sets(params, tc, x);
        // skip boundary-ambiguous draws; strict membership in exactly one
        // set is the oracle's precondition
        prop_assume!(sets.iter().filter(|&&b| b).count() == 1);
        let expected = match sets {
            [true, _, _, _] => SubdomainLabel::R1,
            [_, true, _, _] => SubdomainLabel::R2,
            [_, _, true, _] => SubdomainLabel::R3,
            _ => SubdomainLabel::R4,
        };
        prop_assert_eq!(classify(params, tc, x).unwrap(), expected);
    }

    #[test]
    fn moments_satisfy_jensen(phi in profile_strategy()) {
        let m = moments(&phi, 3.0);
        prop_assert!(m.exp_mean >= m.mean.exp() - 1e-12);
        prop_assert!(m.p_mean >= 0.0);
    }

    #[test]
    fn characteristic_is_at_least_one(phi in profile_strategy()) {
        // <e^phi>_J e^{-<phi>_J} >= 1 on every J by Jensen, so the sup is too
        prop_assert!(a_infty_characteristic(&phi) >= 1.0 - 1e-12);
    }
}
