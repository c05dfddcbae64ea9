//! Closed form of the strip kernel for `n = 3`, `q = 2`.

use std::f64::consts::PI;

/// `sinh(X) / (cosh(X) - c)` for large `X`, without overflow.
fn sinh_ratio(x: f64, c: f64) -> f64 {
    let e1 = (-x).exp();
    let e2 = e1 * e1;
    (1.0 - e2) / (1.0 + e2 - 2.0 * c * e1)
}

/// `sinh(X) / X`
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Two-term sinh/cosh expression for `G_t` with `d = |x - y|`.
///
/// Returns `+∞` at the image singularities (coincident points, or both
/// points on the same wall over the same horizontal position).
pub(crate) fn value(d: f64, z: f64, w: f64, t: f64) -> f64 {
    let x = PI * d / (2.0 * t);
    let th1 = PI * (z - w) / (2.0 * t);
    let th2 = PI * (z + w) / (2.0 * t);
    let s1 = (0.5 * th1).sin();
    let s2 = (0.5 * th2).sin();

    if x > 20.0 {
        let r1 = sinh_ratio(x, th1.cos());
        let r2 = sinh_ratio(x, -th2.cos());
        return PI / (4.0 * t * d) * (r1 + r2);
    }

    let sh = (0.5 * x).sinh();
    let ch = (0.5 * x).cosh();
    let den1 = 2.0 * (sh * sh + s1 * s1);
    let den2 = 2.0 * (ch * ch - s2 * s2);
    // sinh(X)/d = (π/2t)·sinhc(X)
    let prefactor = PI / (4.0 * t) * (PI / (2.0 * t)) * sinhc(x);
    prefactor * (1.0 / den1 + 1.0 / den2)
}

/// Planar specialization `π coth(πd/2t) / (2td)`.
pub(crate) fn plane(d: f64, t: f64) -> f64 {
    let x = PI * d / (2.0 * t);
    PI / ((2.0 * t * d) * x.tanh())
}

/// `∂/∂t` of [`plane`].
pub(crate) fn plane_dt(d: f64, t: f64) -> f64 {
    let x = PI * d / (2.0 * t);
    let csch = 1.0 / x.sinh();
    -PI / (2.0 * t * t * d * x.tanh()) + PI * PI * csch * csch / (4.0 * t * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plane_value_at_unit_distance() {
        let expected = PI / (2.0 * (PI / 2.0).tanh());
        assert_relative_eq!(plane(1.0, 1.0), expected, max_relative = 1e-15);
        assert_relative_eq!(value(1.0, 0.0, 0.0, 1.0), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 1.7127, epsilon = 1e-4);
    }

    #[test]
    fn large_separation_uses_exponential_form() {
        for &d in &[10.0, 13.0, 40.0, 500.0] {
            let planar = value(d, 0.0, 0.0, 1.0);
            assert_relative_eq!(planar, plane(d, 1.0), max_relative = 1e-13);
        }
        // continuity across the switch at X = 20
        let d = 40.0 / PI;
        let lo = value(d * (1.0 - 1e-12), 0.4, 0.1, 1.0);
        let hi = value(d * (1.0 + 1e-12), 0.4, 0.1, 1.0);
        assert_relative_eq!(lo, hi, max_relative = 1e-10);
    }

    #[test]
    fn plane_dt_matches_finite_difference() {
        for &(d, t) in &[(1.0, 1.0), (0.3, 2.0), (4.0, 0.5)] {
            let h = 1e-5 * t;
            let fd = (plane(d, t + h) - plane(d, t - h)) / (2.0 * h);
            assert_relative_eq!(plane_dt(d, t), fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn riesz_limit_for_thick_strips() {
        let (d, z, w) = (0.6_f64, 0.3, -0.5);
        let r2 = d * d + (z - w) * (z - w);
        let t = 1e4 * r2.sqrt();
        assert_relative_eq!(value(d, z, w, t), 1.0 / r2, max_relative = 1e-6);
    }

    #[test]
    fn vertical_pair_over_same_base_point() {
        // d = 0: only the sinhc branch is exercised
        let direct: f64 = (-200_000i64..=200_000)
            .map(|j| {
                let v = 0.25 - 2.0 * j as f64 - if j % 2 == 0 { -0.5 } else { 0.5 };
                1.0 / (v * v)
            })
            .sum();
        assert_relative_eq!(value(0.0, 0.25, -0.5, 1.0), direct, max_relative = 1e-5);
    }
}
