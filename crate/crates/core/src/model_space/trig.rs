//! Constant-curvature trigonometry in half-angle form.
//!
//! Both solvers avoid `acos` of a law-of-cosines expression: the side solver
//! uses the haversine form and the angle solver the half-angle tangent
//! `tan²(γ/2) = sn(σ−a)·sn(σ−b) / (sn(σ)·sn(σ−c))`, which stay well
//! conditioned near degenerate and straight angles.

use std::f64::consts::PI;

use super::{Curvature, CLAMP_SLACK};
use crate::error::{invalid, Result};

/// Generalised sine `sn_k(x)`: `sin(√k x)/√k`, `x`, or `sinh(√−k x)/√−k`.
pub fn sn_k(k: Curvature, x: f64) -> f64 {
    let kv = k.value();
    if kv > 0.0 {
        let u = kv.sqrt();
        (u * x).sin() / u
    } else if kv < 0.0 {
        let u = (-kv).sqrt();
        (u * x).sinh() / u
    } else {
        x
    }
}

fn check_length(k: Curvature, name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(invalid(format!("{name} must be a finite non-negative length, got {x}")));
    }
    let bound = k.diameter_bound();
    if x > bound * (1.0 + CLAMP_SLACK) {
        return Err(invalid(format!("{name}={x} exceeds the diameter bound {bound} for {k}")));
    }
    Ok(())
}

fn clamp_unit(name: &str, x: f64, lo: f64, hi: f64) -> Result<f64> {
    if x < lo - CLAMP_SLACK || x > hi + CLAMP_SLACK || x.is_nan() {
        return Err(invalid(format!("{name}={x} outside [{lo}, {hi}]")));
    }
    Ok(x.clamp(lo, hi))
}

/// Side opposite the angle `gamma` of the hinge with legs `a`, `b`.
pub fn side_from_sas(k: Curvature, a: f64, b: f64, gamma: f64) -> Result<f64> {
    check_length(k, "a", a)?;
    check_length(k, "b", b)?;
    let gamma = clamp_unit("gamma", gamma, 0.0, PI)?;
    let half = (0.5 * gamma).sin();
    let half2 = half * half;
    let kv = k.value();
    if kv > 0.0 {
        let u = kv.sqrt();
        let d = (0.5 * u * (a - b)).sin();
        let hav = d * d + (u * a).sin() * (u * b).sin() * half2;
        let hav = clamp_unit("haversine", hav, 0.0, 1.0)?;
        Ok(2.0 * hav.sqrt().asin() / u)
    } else if kv < 0.0 {
        let u = (-kv).sqrt();
        let d = (0.5 * u * (a - b)).sinh();
        let h = d * d + (u * a).sinh() * (u * b).sinh() * half2;
        Ok(2.0 * h.max(0.0).sqrt().asinh() / u)
    } else {
        let d = a - b;
        Ok((d * d + 4.0 * a * b * half2).max(0.0).sqrt())
    }
}

/// Comparison angle opposite side `c` in the model triangle with sides
/// `a`, `b`, `c`.
pub fn angle_from_sss(k: Curvature, a: f64, b: f64, c: f64) -> Result<f64> {
    check_length(k, "a", a)?;
    check_length(k, "b", b)?;
    check_length(k, "c", c)?;
    if a == 0.0 || b == 0.0 {
        return Err(invalid("angle is undefined at a vertex with a zero-length side"));
    }
    let sigma = 0.5 * (a + b + c);
    let slack = CLAMP_SLACK * sigma.max(1.0);
    let excess = |x: f64, name: &str| -> Result<f64> {
        if x < -slack {
            Err(invalid(format!(
                "sides ({a}, {b}, {c}) violate the triangle inequality ({name} deficit {x})"
            )))
        } else {
            Ok(x.max(0.0))
        }
    };
    let ea = excess(sigma - a, "a")?;
    let eb = excess(sigma - b, "b")?;
    let ec = excess(sigma - c, "c")?;
    if k.value() > 0.0 {
        let half_peri = 0.5 * k.perimeter_bound();
        if sigma > half_peri * (1.0 + CLAMP_SLACK) {
            return Err(invalid(format!(
                "perimeter {} exceeds 2π/√k = {}",
                2.0 * sigma,
                2.0 * half_peri
            )));
        }
    }
    let s = |x: f64| sn_k(k, x).max(0.0);
    let num = (s(ea) * s(eb)).sqrt();
    let den = (s(sigma.min(k.diameter_bound())) * s(ec)).sqrt();
    Ok(2.0 * num.atan2(den))
}

/// `ρₖ(x)`: `(1 − cos √k x)/k`, `x²/2` or `(1 − cosh √−k x)/k`.
pub fn rho_k(k: Curvature, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(invalid(format!("rho_k needs x ≥ 0, got {x}")));
    }
    let kv = k.value();
    if kv > 0.0 && x > k.perimeter_bound() * (1.0 + CLAMP_SLACK) {
        return Err(invalid(format!("rho_k needs x ≤ 2π/√k, got {x}")));
    }
    Ok(if kv > 0.0 {
        let s = (0.5 * kv.sqrt() * x).sin();
        2.0 * s * s / kv
    } else if kv < 0.0 {
        let s = (0.5 * (-kv).sqrt() * x).sinh();
        -2.0 * s * s / kv
    } else {
        0.5 * x * x
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn sas_examples() {
        assert_abs_diff_eq!(side_from_sas(k(0.0), 3.0, 4.0, FRAC_PI_2).unwrap(), 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            side_from_sas(k(1.0), FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-14
        );
        // hyperbolic Pythagoras: cosh c = cosh a cosh b
        let c = side_from_sas(k(-1.0), 1.0, 1.0, FRAC_PI_2).unwrap();
        let expected = (1.0f64.cosh().powi(2)).acosh();
        assert_abs_diff_eq!(c, expected, epsilon = 1e-13);
        assert_abs_diff_eq!(c, 1.513374, epsilon = 1e-6);
    }

    #[test]
    fn sss_examples() {
        assert_abs_diff_eq!(angle_from_sss(k(0.0), 1.0, 1.0, 1.0).unwrap(), PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            angle_from_sss(k(1.0), FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(angle_from_sss(k(0.0), 3.0, 4.0, 5.0).unwrap(), FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn sss_degenerate_angles() {
        assert_abs_diff_eq!(angle_from_sss(k(0.0), 1.0, 2.0, 3.0).unwrap(), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(angle_from_sss(k(-1.0), 1.0, 2.0, 1.0).unwrap(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn sss_rejects_triangle_violation() {
        assert!(angle_from_sss(k(0.0), 1.0, 1.0, 2.1).is_err());
        assert!(angle_from_sss(k(0.0), 0.0, 1.0, 1.0).is_err());
        // perimeter beyond 2π on the unit sphere
        assert!(angle_from_sss(k(1.0), 3.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn sas_rejects_out_of_range() {
        assert!(side_from_sas(k(1.0), 3.5, 1.0, 1.0).is_err());
        assert!(side_from_sas(k(0.0), -1.0, 1.0, 1.0).is_err());
        assert!(side_from_sas(k(0.0), 1.0, 1.0, 3.5).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_abs_diff_eq!(rho_k(k(0.0), 2.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho_k(k(1.0), FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(rho_k(k(-1.0), 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(rho_k(k(-1.0), 1.0).unwrap(), 1.0f64.cosh() - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sas_tends_to_flat_as_k_vanishes() {
        let flat = side_from_sas(k(0.0), 0.7, 1.1, 1.3).unwrap();
        let e1 = (side_from_sas(k(1e-3), 0.7, 1.1, 1.3).unwrap() - flat).abs();
        let e2 = (side_from_sas(k(5e-4), 0.7, 1.1, 1.3).unwrap() - flat).abs();
        let e3 = (side_from_sas(k(-5e-4), 0.7, 1.1, 1.3).unwrap() - flat).abs();
        assert!(e1 < 1e-3 && e2 < e1 && (e1 / e2 - 2.0).abs() < 0.05);
        assert!((e3 - e2).abs() < 1e-6);
    }
}
