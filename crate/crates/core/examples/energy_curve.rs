//! `t ↦ E(t)` for the unit disk with q = 1, from thin to thick strips.

use strip_riesz::analysis::{fit::log_grid, shape_energy_curve, AnalysisOptions};
use strip_riesz::geometry::ShapeSpec;
use strip_riesz::kernel::KernelParams;

fn main() -> strip_riesz::error::Result<()> {
    let params = KernelParams::new(2, 1.0, 1.0)?;
    let grid = log_grid(0.2, 200.0, 13)?;
    let (cloud, curve) = shape_energy_curve(&ShapeSpec::disk(1.0), 30, &params, &grid, &AnalysisOptions::default())?;
    println!("unit disk, {} points", cloud.len());
    println!("{:>10} {:>18} {:>14} {:>10}", "t", "E(t)", "t E(t)", "gap");
    for s in curve.samples.iter().chain(std::iter::once(&curve.infinity)) {
        let gap = s.report.as_ref().map_or(f64::NAN, |r| r.frostman_gap);
        println!("{:>10.4} {:>18.12} {:>14.8} {gap:>10.1e}", s.t, s.energy, s.t * s.energy);
    }
    Ok(())
}
