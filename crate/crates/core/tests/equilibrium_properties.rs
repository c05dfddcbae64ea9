use proptest::prelude::*;

use strip_riesz::equilibrium::{
    capacity, equilibrium, kernel_matrix, solve_weights, DiagonalPolicy, KernelSpec, SolverOptions,
};
use strip_riesz::geometry::{discretize, QuadratureCloud, ShapeSpec};
use strip_riesz::kernel::KernelParams;

fn solve(cloud: &QuadratureCloud, spec: &KernelSpec) -> f64 {
    let (_, r) = equilibrium(cloud, spec, DiagonalPolicy::default(), &SolverOptions::default()).unwrap();
    assert!(r.converged);
    r.energy
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn riesz_energy_scales_homogeneously(s in 0.2f64..5.0, q in 0.5f64..1.9) {
        let cloud = discretize(&ShapeSpec::ellipse(1.0, 0.6), 12).unwrap();
        let spec = KernelSpec::Riesz { s: q };
        let v = solve(&cloud, &spec);
        let vs = solve(&cloud.scaled(s).unwrap(), &spec);
        let expected = s.powf(-q) * v;
        prop_assert!(((vs - expected) / expected).abs() <= 1e-6, "{} vs {}", vs, expected);
    }

    #[test]
    fn certificate_holds_on_random_clouds(seed in 0u64..1000, n in 3usize..40) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let cloud = QuadratureCloud::from_points(points, vec![], vec![1.0; n]).unwrap();
        for spec in [KernelSpec::Riesz { s: 1.0 }, KernelSpec::Log, KernelSpec::Strip(KernelParams::new(2, 1.0, 0.5).unwrap())] {
            let k = kernel_matrix(&cloud, &spec, DiagonalPolicy::default()).unwrap();
            let opts = SolverOptions::default();
            let (w, r) = solve_weights(&k, &opts).unwrap();
            prop_assert!(r.converged);
            prop_assert!(r.frostman_gap <= opts.frostman_tol * r.energy.abs().max(1.0));
            prop_assert!(r.off_support_violation <= opts.frostman_tol * r.energy.abs().max(1.0));
            let floor = (0..n).filter(|&i| w.weights()[i] > 0.0).map(|i| r.potential[i]).fold(f64::INFINITY, f64::min);
            for p in &r.potential {
                prop_assert!(*p >= floor - 1e-7 * r.energy.abs().max(1.0));
            }
        }
    }
}

#[test]
fn capacity_grows_with_the_set() {
    // disk(1/2) ⊂ unit square ⊂ disk(3/4), all centred at the origin
    let spec = KernelSpec::Riesz { s: 1.0 };
    let caps: Vec<f64> = [ShapeSpec::disk(0.5), ShapeSpec::rectangle(1.0, 1.0), ShapeSpec::disk(0.75)]
        .iter()
        .map(|shape| capacity(solve(&discretize(shape, 30).unwrap(), &spec), 1.0).unwrap())
        .collect();
    assert!(caps[0] < caps[1] && caps[1] < caps[2], "{caps:?}");
}

#[test]
fn strip_energy_dominates_the_whole_space_energy() {
    let cloud = discretize(&ShapeSpec::disk(1.0), 14).unwrap();
    for q in [1.3, 1.7] {
        let v = solve(&cloud, &KernelSpec::Riesz { s: q });
        for t in [0.2, 1.0, 10.0] {
            let e = solve(&cloud, &KernelSpec::Strip(KernelParams::new(2, q, t).unwrap()));
            assert!(e >= v, "q={q} t={t}: {e} < {v}");
        }
    }
}

#[test]
fn refinement_deltas_settle() {
    for (shape, spec) in [
        (ShapeSpec::disk(1.0), KernelSpec::Riesz { s: 1.0 }),
        (ShapeSpec::rectangle(1.0, 1.0), KernelSpec::Riesz { s: 0.5 }),
        (ShapeSpec::disk(1.0), KernelSpec::Strip(KernelParams::new(2, 1.0, 0.5).unwrap())),
    ] {
        let e: Vec<f64> = [10, 20, 40].iter().map(|&r| solve(&discretize(&shape, r).unwrap(), &spec)).collect();
        let (d1, d2) = ((e[1] - e[0]).abs(), (e[2] - e[1]).abs());
        assert!(d2 <= 2.0 * d1, "{shape:?} {spec:?}: {e:?}");
    }
}

#[test]
fn certified_solves_agree_across_methods() {
    use strip_riesz::equilibrium::SolverMethod;
    let cloud = discretize(&ShapeSpec::ellipse(1.0, 0.5), 10).unwrap();
    let k = kernel_matrix(&cloud, &KernelSpec::Log, DiagonalPolicy::default()).unwrap();
    let energies: Vec<f64> = [SolverMethod::Auto, SolverMethod::FrankWolfe, SolverMethod::ProjectedGradient]
        .iter()
        .map(|&method| {
            let opts = SolverOptions { method, max_iter: 200_000, ..Default::default() };
            solve_weights(&k, &opts).unwrap().1.energy
        })
        .collect();
    for e in &energies[1..] {
        assert!((e - energies[0]).abs() <= 1e-6 * energies[0].abs().max(1.0), "{energies:?}");
    }
}
