use strip_riesz::analysis::fit::log_grid;
use strip_riesz::analysis::{energy_curve, energy_derivative, large_t_model, AnalysisOptions};
use strip_riesz::geometry::{discretize, ShapeSpec};
use strip_riesz::kernel::{expansion_coeffs, KernelParams};

#[test]
fn curve_is_lipschitz_with_the_measured_derivative() {
    let opts = AnalysisOptions::default();
    let cloud = discretize(&ShapeSpec::disk(1.0), 12).unwrap();
    let params = KernelParams::new(2, 1.0, 1.0).unwrap();
    let grid = log_grid(10.0, 100.0, 6).unwrap();
    let curve = energy_curve(&cloud, &params, &grid, &opts).unwrap();
    let slopes: Vec<f64> = grid
        .iter()
        .map(|&t| energy_derivative(&cloud, &params, t, &opts).unwrap().derivative.abs())
        .collect();
    let e = curve.energies();
    for i in 1..grid.len() {
        let lipschitz = slopes[i - 1].max(slopes[i]);
        assert!((e[i] - e[i - 1]).abs() <= lipschitz * (grid[i] - grid[i - 1]), "interval {i}");
    }
}

#[test]
fn energy_falls_as_the_strip_thickens_for_q_above_one() {
    let opts = AnalysisOptions::default();
    for (shape, n, q) in [(ShapeSpec::rectangle(1.0, 1.0), 2, 1.5), (ShapeSpec::ball(3, 1.0), 3, 2.5)] {
        let cloud = discretize(&shape, 8).unwrap();
        let params = KernelParams::new(n, q, 1.0).unwrap();
        let curve = energy_curve(&cloud, &params, &log_grid(0.3, 300.0, 10).unwrap(), &opts).unwrap();
        let e = curve.energies();
        assert!(e.windows(2).all(|w| w[1] < w[0]), "q={q}: {e:?}");
        assert!(curve.infinity.energy < *e.last().unwrap());
    }
}

#[test]
fn leading_term_dominates_at_thickness_one_thousand() {
    let opts = AnalysisOptions::default();
    for (shape, n, q) in [(ShapeSpec::disk(1.0), 2, 1.0), (ShapeSpec::ellipse(1.0, 0.5), 2, 1.5)] {
        let cloud = discretize(&shape, 12).unwrap();
        let params = KernelParams::new(n, q, 1.0).unwrap();
        let curve = energy_curve(&cloud, &params, &[1e3], &opts).unwrap();
        let gap = (curve.samples[0].energy - curve.infinity.energy).abs();
        let lead = expansion_coeffs(q, 1e3).unwrap().a.abs() / (2e3f64).powf(q);
        assert!(gap <= 1.5 * lead, "q={q}: {gap} vs {lead}");
    }
}

#[test]
fn integrated_derivative_reproduces_the_energy_change() {
    let opts = AnalysisOptions::default();
    for (shape, n, q) in [(ShapeSpec::disk(1.0), 2, 1.0), (ShapeSpec::ball(3, 1.0), 3, 2.0)] {
        let cloud = discretize(&shape, 8).unwrap();
        let params = KernelParams::new(n, q, 1.0).unwrap();
        let grid = log_grid(0.5, 5.0, 25).unwrap();
        let d: Vec<f64> = grid
            .iter()
            .map(|&t| energy_derivative(&cloud, &params, t, &opts).unwrap().derivative)
            .collect();
        let integral: f64 = (1..grid.len()).map(|i| 0.5 * (d[i] + d[i - 1]) * (grid[i] - grid[i - 1])).sum();
        let curve = energy_curve(&cloud, &params, &[grid[0], grid[grid.len() - 1]], &opts).unwrap();
        let change = curve.samples[1].energy - curve.samples[0].energy;
        assert!(((integral - change) / change).abs() <= 0.01, "q={q}: {integral} vs {change}");
    }
}

#[test]
fn planar_prediction_agrees_with_the_general_one() {
    let opts = AnalysisOptions::default();
    for (shape, n, q) in [(ShapeSpec::disk(1.0), 2, 1.0), (ShapeSpec::rectangle(1.0, 0.5), 2, 1.7), (ShapeSpec::ball(3, 1.0), 3, 2.0)] {
        let cloud = discretize(&shape, 8).unwrap();
        let model = large_t_model(&cloud, &KernelParams::new(n, q, 1.0).unwrap(), &opts).unwrap();
        for t in [5.0, 50.0, 500.0] {
            let (a, b) = (model.predict(t).unwrap(), model.predict_planar(t).unwrap());
            assert!((a - b).abs() <= 1e-10 * a.abs(), "q={q} t={t}: {a} vs {b}");
        }
    }
}
