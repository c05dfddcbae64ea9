//! Derivative of the energy in the thickness, against finite differences,
//! and the csch² formula for `(t E)'` when n = 3, q = 2.

use strip_riesz::analysis::{energy_curve, energy_derivative, AnalysisOptions};
use strip_riesz::geometry::{discretize, ShapeSpec};
use strip_riesz::kernel::KernelParams;

fn main() -> strip_riesz::error::Result<()> {
    let opts = AnalysisOptions::default();
    let disk = discretize(&ShapeSpec::disk(1.0), 24)?;
    let params = KernelParams::new(2, 1.0, 1.0)?;
    let energy = |t: f64| -> strip_riesz::error::Result<f64> {
        Ok(energy_curve(&disk, &params, &[t], &opts)?.samples[0].energy)
    };
    println!("disk, q = 1");
    for t in [0.2, 0.5, 1.0, 3.0, 10.0] {
        let d = energy_derivative(&disk, &params, t, &opts)?;
        let h = 1e-3 * t;
        let fd = (energy(t + h)? - energy(t - h)?) / (2.0 * h);
        println!("  t = {t:>5}: E' = {:.10e}, finite difference {fd:.10e}", d.derivative);
    }

    let ball = discretize(&ShapeSpec::ball(3, 1.0), 10)?;
    let params = KernelParams::new(3, 2.0, 1.0)?;
    println!("3-ball, q = 2");
    for t in [0.3, 1.0, 3.0] {
        let d = energy_derivative(&ball, &params, t, &opts)?;
        println!(
            "  t = {t:>4}: (tE)' = {:.12e}, csch² integral {:.12e}",
            d.t_energy_derivative,
            d.csch_integral.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
