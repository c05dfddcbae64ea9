//! Thin-strip limit of `t E(t)`: the disk of radius 1/2 with q = 1 against
//! its logarithmic energy, and the unit square with q = 1.5 against
//! `c_{1/2} V_{1/2}`.

use strip_riesz::analysis::{energy_curve, low_energy_reference, validate_small_t, AnalysisOptions};
use strip_riesz::geometry::{discretize, ShapeSpec};
use strip_riesz::kernel::KernelParams;

fn main() -> strip_riesz::error::Result<()> {
    let opts = AnalysisOptions::default();
    for (shape, q) in [(ShapeSpec::disk(0.5), 1.0), (ShapeSpec::rectangle(1.0, 1.0), 1.5)] {
        let cloud = discretize(&shape, 40)?;
        let h = cloud.max_spacing();
        let grid: Vec<f64> = [2.0, 3.0, 4.0, 6.0, 8.0, 12.0].iter().map(|k| k * h).collect();
        let curve = energy_curve(&cloud, &KernelParams::new(2, q, 1.0)?, &grid, &opts)?;
        let reference = low_energy_reference(&cloud, q, &opts)?;
        let report = validate_small_t(&curve, reference, shape.is_convex_body())?;
        println!("{shape:?}, q = {q}, {} points", cloud.len());
        for (t, te) in report.t.iter().zip(&report.t_energy) {
            println!("  t = {t:.4}  t E = {te:.8}");
        }
        println!(
            "  extrapolated {:.6}, reference {:.6}, relative error {:.2e}, lower bound {}\n",
            report.extrapolated_limit,
            report.reference,
            report.relative_error,
            if report.lower_bound_holds { "holds" } else { "violated" }
        );
    }
    Ok(())
}
