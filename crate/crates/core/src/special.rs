//! Scalar special functions: the gamma function, exponential tail integrals,
//! and the closed form of the John-Nirenberg constant.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_tail, QuadratureConfig};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Gamma function for positive real arguments (Lanczos, g = 7).
pub fn gamma_fn(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("gamma_fn requires p > 0, got {p}")));
    }
    Ok(gamma_pos(p))
}

fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_pos(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    SQRT_2PI * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Tail integral of s^(p-2) e^(-s/xi) over [w, inf).
///
/// Equals xi^(p-1) * Gamma(p-1, w/xi) in terms of the upper incomplete gamma
/// function; computed here by the substitution s = w + xi*r and truncated
/// adaptive quadrature.
pub fn tail_integral(p: f64, xi: f64, w: f64) -> Result<f64> {
    tail_integral_with(p, xi, w, &QuadratureConfig::default())
}

pub fn tail_integral_with(p: f64, xi: f64, w: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::Domain(format!("tail_integral requires p > 2, got {p}")));
    }
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::Domain(format!(
            "tail_integral requires xi in (0, 1], got {xi}"
        )));
    }
    if !(w >= 0.0) {
        return Err(Error::Domain(format!("tail_integral requires w >= 0, got {w}")));
    }
    Ok(tail_raw(p, xi, w, cfg))
}

pub(crate) fn tail_raw(p: f64, xi: f64, w: f64, cfg: &QuadratureConfig) -> f64 {
    // int_w^inf s^(p-2) e^(-s/xi) ds = xi e^(-w/xi) int_0^inf (w + xi r)^(p-2) e^(-r) dr
    let body = integrate_tail(|r| (w + xi * r).powf(p - 2.0) * (-r).exp(), 0.0, cfg);
    xi * (-w / xi).exp() * body
}

/// Signed tail integral of s |s|^(p-2) e^(-s/xi) over [z, inf), any real z.
pub fn signed_tail(p: f64, xi: f64, z: f64) -> Result<f64> {
    signed_tail_with(p, xi, z, &QuadratureConfig::default())
}

pub fn signed_tail_with(p: f64, xi: f64, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::Domain(format!("signed_tail requires p > 2, got {p}")));
    }
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::Domain(format!(
            "signed_tail requires xi in (0, 1], got {xi}"
        )));
    }
    if z >= 0.0 {
        // the integrand reduces to s^(p-1) e^(-s/xi)
        let body = integrate_tail(|r| (z + xi * r).powf(p - 1.0) * (-r).exp(), 0.0, cfg);
        Ok(xi * (-z / xi).exp() * body)
    } else {
        // split at zero: the negative part contributes -int_0^{-z} u^(p-1) e^(u/xi) du
        let pos = xi.powf(p) * gamma_pos(p);
        let neg = integrate(|u| u.powf(p - 1.0) * (u / xi).exp(), 0.0, -z, cfg);
        Ok(pos - neg)
    }
}

/// int_0^1 t^(p-1) e^t dt, by adaptive quadrature (no closed form for
/// non-integer p).
pub(crate) fn lower_exp_moment(p: f64, cfg: &QuadratureConfig) -> f64 {
    integrate(|t| t.powf(p - 1.0) * t.exp(), 0.0, 1.0, cfg)
}

/// The John-Nirenberg constant of BMO^p:
/// omega(p) = [ (p/e) (Gamma(p) - int_0^1 t^(p-1) e^t dt) + 1 ]^(1/p).
pub fn omega(p: f64) -> Result<f64> {
    omega_with(p, &QuadratureConfig::default())
}

pub fn omega_with(p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("omega requires p >= 1, got {p}")));
    }
    let bracket = p / std::f64::consts::E * (gamma_pos(p) - lower_exp_moment(p, cfg)) + 1.0;
    Ok(bracket.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: Gamma(p) = int_0^inf t^(p-1) e^-t dt truncated at 60.
    fn gamma_quadrature_oracle(p: f64) -> f64 {
        let cfg = QuadratureConfig::default();
        integrate(|t| t.powf(p - 1.0) * (-t).exp(), 0.0, 60.0, &cfg)
    }

    #[test]
    fn gamma_integer_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((gamma_fn(3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-11);
    }

    #[test]
    fn gamma_half_integer_vs_oracle() {
        let got = gamma_fn(2.5).unwrap();
        let oracle = gamma_quadrature_oracle(2.5);
        assert!((got - oracle).abs() / oracle < 1e-11);
        // Gamma(2.5) = 0.75 sqrt(pi)
        assert!((got - 1.329_340_388_179_137).abs() < 1e-12);
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.3).is_err());
    }

    #[test]
    fn gamma_recurrence() {
        for &p in &[0.5, 1.5, 3.2] {
            let lhs = gamma_fn(p + 1.0).unwrap();
            let rhs = p * gamma_fn(p).unwrap();
            assert!((lhs - rhs).abs() / rhs.abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn tail_integral_known_values() {
        // p = 3, xi = 1, w = 0: Gamma(2) = 1
        assert!((tail_integral(3.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        // p = 3, xi = 0.5, w = 0: xi^2 Gamma(2) = 0.25
        assert!((tail_integral(3.0, 0.5, 0.0).unwrap() - 0.25).abs() < 1e-12);
        // deep tail is negligible against the full integral
        let full = tail_integral(3.0, 0.9, 0.0).unwrap();
        let deep = tail_integral(3.0, 0.9, 40.0).unwrap();
        assert!(deep < 1e-15 * full);
    }

    #[test]
    fn tail_integral_cross_checked_by_direct_quadrature() {
        let cfg = QuadratureConfig::default();
        for &(p, xi, w) in &[(2.5, 0.7, 0.3), (3.0, 0.99, 1.0), (4.0, 0.5, 2.0)] {
            let got = tail_integral(p, xi, w).unwrap();
            let oracle = integrate(
                |s| s.powf(p - 2.0) * (-s / xi).exp(),
                w,
                w + 80.0 * xi,
                &cfg,
            );
            assert!((got - oracle).abs() < 1e-11 * oracle.max(1.0), "({p},{xi},{w})");
        }
    }

    #[test]
    fn tail_integral_strictly_decreasing_in_w() {
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let w = 0.2 * i as f64;
            let v = tail_integral(3.0, 0.9, w).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn tail_integral_derivative_recurrence() {
        // d/dw tail = -w^(p-2) e^(-w/xi)
        let h = 1e-5;
        for &(p, xi, w) in &[(3.0, 0.9, 0.5), (2.5, 0.8, 1.0), (4.0, 0.99, 2.0)] {
            let fd = (tail_integral(p, xi, w + h).unwrap() - tail_integral(p, xi, w - h).unwrap())
                / (2.0 * h);
            let exact = -w.powf(p - 2.0) * (-w / xi).exp();
            assert!((fd - exact).abs() / exact.abs() < 1e-6, "({p},{xi},{w})");
        }
    }

    #[test]
    fn signed_tail_at_zero_is_gamma() {
        // p = 3, xi = 1, z = 0: Gamma(3) = 2
        assert!((signed_tail(3.0, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn signed_tail_nonnegative_matches_shifted_tail() {
        // for z >= 0 the signed integrand is s^(p-1), i.e. tail_integral with
        // the exponent raised by one
        for &z in &[0.0, 0.4, 1.7] {
            let a = signed_tail(3.0, 0.8, z).unwrap();
            let b = tail_integral(4.0, 0.8, z).unwrap();
            assert!((a - b).abs() < 1e-12 * b.max(1.0), "z = {z}");
        }
    }

    #[test]
    fn signed_tail_negative_split_vs_oracle() {
        let cfg = QuadratureConfig::default();
        let (p, xi, z) = (3.0, 0.99, -1.0);
        let got = signed_tail(p, xi, z).unwrap();
        let neg_piece = integrate(
            |s| s * s.abs().powf(p - 2.0) * (-s / xi).exp(),
            z,
            0.0,
            &cfg,
        );
        let pos_piece = integrate(
            |s| s.powf(p - 1.0) * (-s / xi).exp(),
            0.0,
            z.abs() + 80.0 * xi,
            &cfg,
        );
        let oracle = neg_piece + pos_piece;
        assert!((got - oracle).abs() < 1e-11 * oracle.abs().max(1.0));
    }

    #[test]
    fn omega_closed_values() {
        // int_0^1 t e^t dt = 1, so the bracket is exactly 1 at p = 2
        assert!((omega(2.0).unwrap() - 1.0).abs() < 1e-12);
        // p = 1: bracket = (1/e)(1 - (e - 1)) + 1 = 2/e ... raised to 1/1
        assert!((omega(1.0).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-12);
        // p = 3: int_0^1 t^2 e^t dt = e - 2, bracket = 12/e - 2,
        // omega(3) = 1.3415666...
        let expect = (12.0 / std::f64::consts::E - 2.0).cbrt();
        assert!((omega(3.0).unwrap() - expect).abs() < 1e-12);
        assert!((omega(3.0).unwrap() - 1.3416).abs() < 1e-3);
    }

    #[test]
    fn omega_continuous_across_two() {
        assert!((omega(2.0 - 1e-6).unwrap() - 1.0).abs() < 1e-5);
        assert!((omega(2.0 + 1e-6).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn omega_rejects_small_p() {
        assert!(omega(0.9).is_err());
    }
}
