//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strip_riesz::analysis::fit::{fit_line, log_grid};
use strip_riesz::analysis::{
    energy_curve, energy_derivative, large_t_model, low_energy_reference, ps_compare, validate_large_t,
    validate_small_t, AnalysisOptions, PsOptions,
};
use strip_riesz::equilibrium::{
    equilibrium, kernel_matrix, solve_weights, DiagonalPolicy, EnergyReport, KernelSpec, SolverOptions,
};
use strip_riesz::geometry::{discretize, QuadratureCloud, ShapeSpec};
use strip_riesz::kernel::{
    closed_form_n3_q2, kernel_dz, kernel_plane, kernel_value, riesz_constant, KernelParams, StripPoint,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Every solve made by the criteria, audited by the certificate criterion.
static SOLVES: Mutex<Vec<(String, EnergyReport)>> = Mutex::new(Vec::new());

fn record(label: &str, report: &EnergyReport) {
    SOLVES.lock().unwrap().push((label.to_string(), report.clone()));
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: strip_riesz::error::Error) -> String {
    e.to_string()
}

fn constants() -> Outcome {
    let c1 = riesz_constant(2.0).map_err(err)?;
    let c2 = riesz_constant(3.0).map_err(err)?;
    check((c1 - PI / 2.0).abs() <= 1e-12, format!("c_1 = {c1}"))?;
    check((c2 - 1.0).abs() <= 1e-12, format!("c_2 = {c2}"))?;
    Ok(format!("c_1 - pi/2 = {:.1e}, c_2 - 1 = {:.1e}", c1 - PI / 2.0, c2 - 1.0))
}

fn closed_form_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = rng.gen_range(0.1..10.0);
        let params = KernelParams::new(3, 2.0, t).map_err(err)?.with_tol(1e-12).map_err(err)?;
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let a = StripPoint::new(x, rng.gen_range(-0.95..0.95) * t);
        let b = StripPoint::new(y, rng.gen_range(-0.95..0.95) * t);
        let series = kernel_value(&a, &b, &params).map_err(err)?;
        let closed = closed_form_n3_q2(&a, &b, t).map_err(err)?;
        worst = worst.max((series - closed).abs());
    }
    check(worst <= 1e-10, format!("max deviation {worst:.3e}"))?;
    Ok(format!("200 pairs, max deviation {worst:.3e}"))
}

fn neumann() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let qs = [1.0, 1.5, 2.0, 3.0];
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let q = qs[k % qs.len()];
        let t = rng.gen_range(0.1..10.0);
        let params = KernelParams::new(3, q, t).map_err(err)?;
        let top = if k % 2 == 0 { t } else { -t };
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = StripPoint::new(x, top);
        let b = StripPoint::new(y, rng.gen_range(-0.9..0.9) * t);
        let dz = kernel_dz(&a, &b, &params).map_err(err)?;
        worst = worst.max(dz.abs());
    }
    check(worst <= 1e-8, format!("max |dz| {worst:.3e}"))?;
    Ok(format!("50 samples, max |dG/dz| on the boundary {worst:.3e}"))
}

fn lower_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=3usize);
        let q = rng.gen_range(1.0..n as f64);
        if q <= 1.0 {
            continue;
        }
        let t = rng.gen_range(0.1..10.0);
        let d = t * rng.gen_range(0.01..5.0);
        let params = KernelParams::new(n, q, t).map_err(err)?;
        let mut x = vec![0.0; n];
        x[0] = d;
        let g = kernel_plane(&x, &vec![0.0; n], &params).map_err(err)?;
        let bound = riesz_constant(q).map_err(err)? * d.powf(1.0 - q);
        let margin = (t * g - bound) / bound;
        if margin.is_nan() || margin <= 0.0 {
            return Err(format!("n={n} q={q} t={t} d={d}: t G - c d^(1-q) = {}", t * g - bound));
        }
        worst = worst.min(margin);
    }
    Ok(format!("1000 samples, smallest relative margin {worst:.3e}"))
}

/// Second-order image expansion of the kernel at fixed points.
fn kernel_expansion(q: f64, d2: f64, z: f64, w: f64, t: f64) -> f64 {
    let (zeta_q, zeta_q2) = if q == 1.0 {
        (f64::NAN, 1.202_056_903_159_594_2)
    } else {
        (PI * PI / 6.0, PI.powi(4) / 90.0)
    };
    let a = if q == 1.0 {
        2.0 * (0.577_215_664_901_532_9 - (4.0 * t).ln())
    } else {
        2.0 * zeta_q
    };
    let even = 2f64.powf(-(q + 2.0));
    let second = q * zeta_q2 * d2 - q * (q + 1.0) * zeta_q2 * (even * (z - w).powi(2) + (1.0 - even) * (z + w).powi(2));
    (d2 + (z - w).powi(2)).powf(-q / 2.0) + a / (2.0 * t).powf(q) - second / (2.0 * t).powf(q + 2.0)
}

fn improved_expansion() -> Outcome {
    let grid = log_grid(10.0, 1000.0, 25).map_err(err)?;
    let (x, y, z, w) = ([0.3, -0.2], [-0.1, 0.25], 0.3, -0.2);
    let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
    let mut lines = Vec::new();
    for q in [1.0, 2.0] {
        let (mut lt, mut lr) = (Vec::new(), Vec::new());
        for &t in &grid {
            let params = KernelParams::new(2, q, t).map_err(err)?.with_tol(1e-15).map_err(err)?;
            let g = kernel_value(&StripPoint::new(x.to_vec(), z), &StripPoint::new(y.to_vec(), w), &params)
                .map_err(err)?;
            let residual = (g - kernel_expansion(q, d2, z, w, t)).abs();
            // Below this the residual is rounding error in G itself.
            if residual >= 1e-13 {
                lt.push(t.ln());
                lr.push(residual.ln());
            }
        }
        check(lt.len() >= 3, format!("q={q}: only {} samples above the noise floor", lt.len()))?;
        let slope = fit_line(&lt, &lr).map_err(err)?.slope;
        check(slope <= -(q + 3.0) + 0.2, format!("q={q}: residual slope {slope:.3}"))?;
        lines.push(format!("q={q}: slope {slope:.3} over {} samples", lt.len()));
    }
    Ok(lines.join(", "))
}

fn disk_reference() -> Outcome {
    let spec = KernelSpec::Riesz { s: 1.0 };
    let mut energies = Vec::new();
    for res in [20, 40, 80] {
        let cloud = discretize(&ShapeSpec::disk(1.0), res).map_err(err)?;
        let (_, report) = equilibrium(&cloud, &spec, DiagonalPolicy::default(), &SolverOptions::default()).map_err(err)?;
        record(&format!("disk riesz res {res}"), &report);
        energies.push(report.energy);
    }
    let rel: Vec<f64> = energies.iter().map(|e| (e - PI / 2.0).abs() / (PI / 2.0)).collect();
    let (d1, d2) = ((energies[1] - energies[0]).abs(), (energies[2] - energies[1]).abs());
    check(rel[1] <= 0.03 && rel[2] <= 0.03, format!("relative errors {:.4} / {:.4}", rel[1], rel[2]))?;
    check(rel[2] < rel[1] && d2 < d1, format!("no refinement convergence: deltas {d1:.3e}, {d2:.3e}"))?;
    Ok(format!(
        "V_1 = {:.6} / {:.6} (rel {:.2}% / {:.2}%), doubling deltas {d1:.2e} -> {d2:.2e}",
        energies[1],
        energies[2],
        100.0 * rel[1],
        100.0 * rel[2]
    ))
}

fn thick_strip() -> Outcome {
    let opts = AnalysisOptions::default();
    let grid = log_grid(10.0, 1000.0, 9).map_err(err)?;
    let cases = [
        ("disk", ShapeSpec::disk(1.0), 2, 1.0, 30, false, 0.10),
        ("ball", ShapeSpec::ball(3, 1.0), 3, 2.0, 12, true, 0.05),
    ];
    let mut lines = Vec::new();
    for (name, shape, n, q, res, closed, tol) in cases {
        let cloud = discretize(&shape, res).map_err(err)?;
        let params = KernelParams::new(n, q, 1.0).map_err(err)?.with_closed_form(closed);
        let model = large_t_model(&cloud, &params, &opts).map_err(err)?;
        let curve = energy_curve(&cloud, &params, &grid, &opts).map_err(err)?;
        check(curve.all_ok(), format!("{name}: failed solves"))?;
        for r in curve.reports() {
            record(&format!("{name} strip"), r);
        }
        let report = validate_large_t(&curve, &model).map_err(err)?;
        let predicted = report.predicted_coefficient;
        let mut worst: f64 = 0.0;
        for (t, c) in report.t.iter().zip(&report.measured_coefficient) {
            if *t <= 100.0 * (1.0 + 1e-12) {
                worst = worst.max(((c - predicted) / predicted).abs());
            }
        }
        check(worst <= tol, format!("{name}: coefficient error {worst:.4} over [10, 100]"))?;
        let slope = report.fitted_slope.ok_or(format!("{name}: no slope ({:?})", report.verdict))?;
        check(slope <= -(q + 2.0) - 0.5, format!("{name}: remainder slope {slope:.3}"))?;
        lines.push(format!("{name}: coefficient err {:.2}%, remainder slope {slope:.2}", 100.0 * worst));
    }
    Ok(lines.join("; "))
}

fn thin_strip() -> Outcome {
    let opts = AnalysisOptions::default();
    let mut lines = Vec::new();
    for (name, shape, q) in [
        ("disk r=1/2", ShapeSpec::disk(0.5), 1.0),
        ("square", ShapeSpec::rectangle(1.0, 1.0), 1.5),
    ] {
        let cloud = discretize(&shape, 40).map_err(err)?;
        let h = cloud.max_spacing();
        let grid: Vec<f64> = [2.0, 3.0, 4.0, 6.0, 8.0, 12.0].iter().map(|k| k * h).collect();
        let curve = energy_curve(&cloud, &KernelParams::new(2, q, 1.0).map_err(err)?, &grid, &opts).map_err(err)?;
        check(curve.all_ok(), format!("{name}: failed solves"))?;
        for r in curve.reports() {
            record(&format!("{name} thin strip"), r);
        }
        let reference = low_energy_reference(&cloud, q, &opts).map_err(err)?;
        let report = validate_small_t(&curve, reference, true).map_err(err)?;
        check(report.lower_bound_holds, format!("{name}: lower bound violated, margins {:?}", report.margins))?;
        check(report.relative_error <= 0.05, format!("{name}: relative error {:.4}", report.relative_error))?;
        lines.push(format!(
            "{name}: limit {:.5} vs {:.5} ({:.2}%), band {:.2e}",
            report.extrapolated_limit,
            report.reference,
            100.0 * report.relative_error,
            report.band_constant
        ));
    }
    Ok(lines.join("; "))
}

fn derivative() -> Outcome {
    let opts = AnalysisOptions::default();
    let cloud = discretize(&ShapeSpec::disk(1.0), 24).map_err(err)?;
    let params = KernelParams::new(2, 1.0, 1.0).map_err(err)?;
    let solve = |t: f64| -> Result<f64, String> {
        let spec = KernelSpec::Strip(params.with_t(t).map_err(err)?);
        let (_, r) = equilibrium(&cloud, &spec, opts.policy, &opts.solver).map_err(err)?;
        record("disk derivative", &r);
        Ok(r.energy)
    };
    let mut worst: f64 = 0.0;
    for t in [0.2, 0.5, 1.0, 3.0, 10.0] {
        let r = energy_derivative(&cloud, &params, t, &opts).map_err(err)?;
        record("disk derivative", &r.report);
        let h = 1e-3 * t;
        let fd = (solve(t + h)? - solve(t - h)?) / (2.0 * h);
        worst = worst.max(((r.derivative - fd) / fd).abs());
    }
    check(worst <= 1e-3, format!("finite-difference error {worst:.3e}"))?;

    let ball = discretize(&ShapeSpec::ball(3, 1.0), 8).map_err(err)?;
    let p3 = KernelParams::new(3, 2.0, 1.0).map_err(err)?;
    let mut csch: f64 = 0.0;
    for t in [0.3, 1.0, 4.0] {
        let r = energy_derivative(&ball, &p3, t, &opts).map_err(err)?;
        record("ball derivative", &r.report);
        let c = r.csch_integral.ok_or("no csch integral")?;
        csch = csch.max(((r.t_energy_derivative - c) / c).abs());
    }
    check(csch <= 1e-6, format!("csch identity error {csch:.3e}"))?;
    Ok(format!("FD relative error {worst:.2e} at 5 t; csch identity {csch:.2e}"))
}

fn quad(k: &[f64], w: &[f64]) -> f64 {
    let n = w.len();
    (0..n).map(|i| w[i] * (0..n).map(|j| k[i * n + j] * w[j]).sum::<f64>()).sum()
}

/// Exhaustive grid search over the simplex: a full grid with `steps`
/// divisions, then repeated finer grids around the best point found.
fn simplex_search(k: &[f64], n: usize, steps: usize) -> f64 {
    fn scan(k: &[f64], lo: &[f64], h: f64, m: usize, w: &mut Vec<f64>, best: &mut (f64, Vec<f64>)) {
        let n = lo.len() + 1;
        if w.len() == n - 1 {
            let last = 1.0 - w.iter().sum::<f64>();
            if last < -1e-15 {
                return;
            }
            w.push(last.max(0.0));
            let e = quad(k, w);
            if e < best.0 {
                *best = (e, w.clone());
            }
            w.pop();
            return;
        }
        let i = w.len();
        for a in 0..=m {
            let v = lo[i] + a as f64 * h;
            if v < 0.0 {
                continue;
            }
            w.push(v);
            scan(k, lo, h, m, w, best);
            w.pop();
        }
    }
    let mut best = (f64::INFINITY, vec![]);
    let mut h = 1.0 / steps as f64;
    scan(k, &vec![0.0; n - 1], h, steps, &mut Vec::new(), &mut best);
    for _ in 0..5 {
        let lo: Vec<f64> = best.1[..n - 1].iter().map(|c| c - 2.0 * h).collect();
        h /= 10.0;
        scan(k, &lo, h, 40, &mut Vec::new(), &mut best);
    }
    best.0
}

fn certificates() -> Outcome {
    let solves = SOLVES.lock().unwrap().clone();
    check(!solves.is_empty(), "no solves recorded")?;
    let mut converged = 0;
    for (label, r) in &solves {
        if r.converged {
            converged += 1;
            check(
                r.frostman_gap <= 1e-5 * r.energy.abs(),
                format!("{label}: gap {:.3e} at energy {}", r.frostman_gap, r.energy),
            )?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for n in 2..=4usize {
        for spec_k in 0..3 {
            let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
            let cloud = QuadratureCloud::from_points(points, vec![], vec![1.0; n]).map_err(err)?;
            let spec = match spec_k {
                0 => KernelSpec::Riesz { s: 1.0 },
                1 => KernelSpec::Log,
                _ => KernelSpec::Strip(KernelParams::new(2, 1.5, 0.4).map_err(err)?),
            };
            let k = kernel_matrix(&cloud, &spec, DiagonalPolicy::default()).map_err(err)?;
            let (_, r) = solve_weights(&k, &SolverOptions::default()).map_err(err)?;
            let dense: Vec<f64> = (0..n).flat_map(|i| k.row(i).to_vec()).collect();
            let steps = if n == 4 { 100 } else { 400 };
            let grid_min = simplex_search(&dense, n, steps);
            check(r.energy <= grid_min + 1e-12, format!("n={n}: solver {} above grid {grid_min}", r.energy))?;
            worst = worst.max(grid_min - r.energy);
            instances += 1;
        }
    }
    check(worst <= 1e-5, format!("exhaustive search differs by {worst:.3e}"))?;
    Ok(format!(
        "{converged}/{} recorded solves certified; {instances} small instances, max energy gap to search {worst:.2e}",
        solves.len()
    ))
}

fn conjecture_run() -> Outcome {
    let params = KernelParams::new(2, 1.0, 1.0).map_err(err)?;
    let grid = log_grid(0.2, 200.0, 15).map_err(err)?;
    let report = ps_compare(&ShapeSpec::ellipse(1.0, 0.5), &params, &grid, &PsOptions::default()).map_err(err)?;
    for level in [&report.coarse, &report.fine] {
        for r in level.set_curve.reports().chain(level.ball_curve.reports()) {
            record("ellipse comparison", r);
        }
    }
    let large = report.rows.iter().filter(|r| r.large_t).count();
    check(large > 0, "no large-t rows")?;
    check(report.all_within_error, "a margin falls below its error bar")?;
    check(report.large_t_sign_agrees, "large-t margins disagree with the second-moment sign")?;
    let min_margin = report.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(format!(
        "15 rows, smallest margin {min_margin:.3e}, {large} large-t rows with predicted sign {:+}",
        report.large_t_predicted_sign
    ))
}

fn main() {
    // The certificate audit runs last so it sees every recorded solve.
    let criteria: [Criterion; 11] = [
        ("1 constants", constants),
        ("2 closed-form oracle", closed_form_oracle),
        ("3 Neumann boundary", neumann),
        ("4 strict lower bound", lower_bound),
        ("5 kernel expansion", improved_expansion),
        ("6 disk energy", disk_reference),
        ("7 thick strip", thick_strip),
        ("8 thin strip", thin_strip),
        ("9 energy derivative", derivative),
        ("11 ellipse vs disk", conjecture_run),
        ("10 solver certificates", certificates),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] ({secs:.1} s) {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{name}] ({secs:.1} s) {detail}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
