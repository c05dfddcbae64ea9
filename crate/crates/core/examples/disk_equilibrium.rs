//! Riesz 1-energy of the unit disk under grid refinement.
//!
//! The continuum value is π/2; the resolution-doubling deltas should shrink.

use std::time::Instant;

use strip_riesz::equilibrium::{equilibrium, DiagonalPolicy, KernelSpec, SolverOptions};
use strip_riesz::geometry::{discretize, ShapeSpec};

fn main() -> strip_riesz::error::Result<()> {
    let disk = ShapeSpec::disk(1.0);
    let exact = std::f64::consts::FRAC_PI_2;
    let mut previous: Option<f64> = None;
    println!("{:>5} {:>6} {:>14} {:>10} {:>10} {:>8}", "res", "N", "V_1", "rel.err", "delta", "secs");
    for res in [20, 40, 80] {
        let start = Instant::now();
        let cloud = discretize(&disk, res)?;
        let (_, report) = equilibrium(
            &cloud,
            &KernelSpec::Riesz { s: 1.0 },
            DiagonalPolicy::default(),
            &SolverOptions::default(),
        )?;
        let delta = previous.map_or(f64::NAN, |p| (report.energy - p).abs());
        println!(
            "{res:>5} {:>6} {:>14.10} {:>10.2e} {:>10.2e} {:>8.2}  ({}, gap {:.1e})",
            cloud.len(),
            report.energy,
            (report.energy - exact).abs() / exact,
            delta,
            start.elapsed().as_secs_f64(),
            report.method,
            report.frostman_gap,
        );
        previous = Some(report.energy);
    }
    Ok(())
}
