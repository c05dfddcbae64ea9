use proptest::prelude::*;

use strip_riesz::kernel::{
    kernel_dt, kernel_dz, kernel_plane, kernel_value, radial_profile, riesz_constant, KernelParams, StripPoint,
};

fn pt(x: &[f64], z: f64) -> StripPoint {
    StripPoint::new(x.to_vec(), z)
}

/// `K_0(x) = ∫_0^∞ exp(-x cosh s) ds` by the trapezoid rule, which converges
/// geometrically for this integrand.
fn bessel_k0(x: f64) -> f64 {
    let h: f64 = 0.01;
    let mut total = 0.5 * (-x).exp();
    let mut s = h;
    loop {
        let v = (-x * s.cosh()).exp();
        total += v;
        if v < 1e-18 * total {
            break;
        }
        s += h;
    }
    total * h
}

fn strip_pair() -> impl Strategy<Value = (usize, f64, f64, Vec<f64>, Vec<f64>, f64, f64)> {
    (2usize..=3, 0.0f64..1.0, 0.1f64..10.0).prop_flat_map(|(n, qf, t)| {
        let q = 1.0 + qf * n as f64;
        (
            Just(n),
            Just(q),
            Just(t),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
            -0.99f64..0.99,
            -0.99f64..0.99,
        )
            .prop_map(|(n, q, t, x, y, a, b)| (n, q, t, x, y, a * t, b * t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_in_its_arguments((n, q, t, x, y, z, w) in strip_pair()) {
        let p = KernelParams::new(n, q, t).unwrap();
        let (a, b) = (pt(&x, z), pt(&y, w));
        let ab = kernel_value(&a, &b, &p).unwrap();
        let ba = kernel_value(&b, &a, &p).unwrap();
        prop_assert!((ab - ba).abs() <= 2.0 * p.tol(), "{} vs {}", ab, ba);
    }

    #[test]
    fn normal_derivative_vanishes_on_the_boundary((n, q, t, x, y, _z, w) in strip_pair(), top in any::<bool>()) {
        let p = KernelParams::new(n, q, t).unwrap();
        let z = if top { t } else { -t };
        let dz = kernel_dz(&pt(&x, z), &pt(&y, w), &p).unwrap();
        prop_assert!(dz.abs() <= 1e-9, "dz = {}", dz);
    }

    #[test]
    fn strictly_above_the_lower_riesz_kernel(n in 2usize..=3, qf in 0.01f64..0.99, t in 0.1f64..10.0, u in 0.01f64..5.0) {
        let q = 1.0 + qf * (n as f64 - 1.0);
        let p = KernelParams::new(n, q, t).unwrap();
        let d = u * t;
        let mut x = vec![0.0; n];
        x[0] = d;
        let g = kernel_plane(&x, &vec![0.0; n], &p).unwrap();
        prop_assert!(t * g > riesz_constant(q).unwrap() * d.powf(1.0 - q));
    }

    #[test]
    fn thickness_derivative_matches_finite_differences((n, q, t, x, y, z, w) in strip_pair()) {
        let p = KernelParams::new(n, q, t).unwrap();
        let (a, b) = (pt(&x, z), pt(&y, w));
        let dt = kernel_dt(&a, &b, &p).unwrap();
        // Scale the heights with t so the points keep their relative place.
        let at = |s: f64| {
            let ps = p.with_t(s).unwrap().with_tol(1e-15).unwrap();
            kernel_value(&pt(&x, z * s / t), &pt(&y, w * s / t), &ps).unwrap()
        };
        let h = 1e-4 * t;
        let fd_scaled = (at(t + h) - at(t - h)) / (2.0 * h);
        let chain = kernel_dz(&a, &b, &p).unwrap() * z / t
            + kernel_dz(&b, &a, &p).unwrap() * w / t;
        let fd = fd_scaled - chain;
        prop_assert!((dt - fd).abs() <= 1e-6 * dt.abs().max(1e-3), "{} vs {}", dt, fd);
    }
}

#[test]
fn converges_monotonically_to_the_whole_space_kernel() {
    for (n, q) in [(2, 1.0), (2, 1.5), (3, 2.0), (3, 3.0)] {
        let (a, b) = (pt(&vec![0.2; n], 0.1), pt(&vec![-0.3; n], -0.4));
        let d2: f64 = 0.25 * n as f64 + 0.25;
        let riesz = d2.powf(-0.5 * q);
        let mut prev = f64::INFINITY;
        let mut t = 10.0;
        while t <= 1e4 {
            let p = KernelParams::new(n, q, t).unwrap();
            let gap = (kernel_value(&a, &b, &p).unwrap() - riesz).abs();
            assert!(gap < prev, "n={n} q={q} t={t}: {gap} after {prev}");
            prev = gap;
            t *= 2.0;
        }
    }
}

#[test]
fn two_sided_bound_with_one_constant() {
    let mut worst: f64 = 0.0;
    for (n, q) in [(2, 1.5), (3, 2.0), (3, 2.5)] {
        let c = riesz_constant(q).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let p = KernelParams::new(n, q, t).unwrap();
            for k in 0..=30 {
                let d = 0.01 * 10f64.powf(k as f64 / 10.0);
                for (z, w) in [(0.0, 0.0), (0.5 * t, -0.7 * t), (0.9 * t, 0.9 * t)] {
                    let mut x = vec![0.0; n];
                    x[0] = d;
                    let g = kernel_value(&pt(&x, z), &pt(&vec![0.0; n], w), &p).unwrap();
                    let ratio = (t * g - c * d.powf(1.0 - q)).abs() / (t * d.powf(-q));
                    worst = worst.max(ratio);
                }
            }
        }
    }
    assert!(worst.is_finite() && worst < 5.0, "fitted constant {worst}");
}

#[test]
fn far_field_approaches_the_lower_riesz_kernel_faster_than_r_to_minus_q() {
    for (n, q) in [(2, 1.5), (3, 2.0), (3, 2.5)] {
        let c = riesz_constant(q).unwrap();
        for t in [1.0, 5.0] {
            let p = KernelParams::new(n, q, t).unwrap();
            for k in 0..=10 {
                let r = 10.0 * 10f64.powf(k as f64 / 5.0);
                let mut x = vec![0.0; n];
                x[0] = r;
                let g = kernel_plane(&x, &vec![0.0; n], &p).unwrap();
                let excess = (g - c / (t * r.powf(q - 1.0))).abs();
                assert!(excess <= r.powf(-q), "n={n} q={q} t={t} r={r}: {excess}");
            }
        }
    }
}

#[test]
fn radial_profile_is_completely_monotone_at_samples() {
    for (n, q) in [(2, 1.5), (3, 2.0), (3, 3.5)] {
        let p = KernelParams::new(n, q, 1.0).unwrap().with_tol(1e-14).unwrap();
        for a in [0.01, 0.1, 0.5, 1.0, 4.0] {
            let h = 1e-2 * a;
            let f = |s: f64| radial_profile(s, &p).unwrap();
            let (fm, f0, fp) = (f(a - h), f(a), f(a + h));
            assert!(f0 > 0.0);
            assert!(fp - fm < 0.0, "f' at {a}");
            assert!(fp - 2.0 * f0 + fm > 0.0, "f'' at {a}");
        }
    }
}

#[test]
fn planar_q1_kernel_is_a_bessel_series() {
    // t G_t(d) = log(1/d) + 2 Σ_m K_0(π m d / t) for the planar q = 1 kernel.
    let mut lowest = f64::INFINITY;
    for t in [0.25, 1.0, 3.0] {
        let p = KernelParams::new(2, 1.0, t).unwrap();
        for d in [0.05, 0.3, 1.0, 2.5, 6.0] {
            let g = kernel_plane(&[d, 0.0], &[0.0, 0.0], &p).unwrap();
            let mut series = -d.ln();
            for m in 1.. {
                let x = std::f64::consts::PI * m as f64 * d / t;
                if x > 45.0 {
                    break;
                }
                series += 2.0 * bessel_k0(x);
            }
            assert!((t * g - series).abs() <= 1e-9 * series.abs().max(1.0), "t={t} d={d}: {} vs {series}", t * g);
            lowest = lowest.min(g);
        }
    }
    // Once d passes 1 and t is small against d the kernel is negative.
    assert!(lowest < 0.0, "smallest sampled value {lowest}");
}
