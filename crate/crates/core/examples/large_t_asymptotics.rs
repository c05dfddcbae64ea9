//! Thick-strip expansion of the energy: the disk with q = 1 and the 3-ball
//! with q = 2 (closed-form kernel).

use strip_riesz::analysis::{energy_curve, fit::log_grid, large_t_model, validate_large_t, AnalysisOptions};
use strip_riesz::geometry::{discretize, ShapeSpec};
use strip_riesz::kernel::KernelParams;

fn main() -> strip_riesz::error::Result<()> {
    let opts = AnalysisOptions::default();
    for (shape, n, q, res) in [(ShapeSpec::disk(1.0), 2, 1.0, 30), (ShapeSpec::ball(3, 1.0), 3, 2.0, 12)] {
        let cloud = discretize(&shape, res)?;
        let params = KernelParams::new(n, q, 1.0)?;
        let model = large_t_model(&cloud, &params, &opts)?;
        let curve = energy_curve(&cloud, &params, &log_grid(10.0, 1000.0, 9)?, &opts)?;
        let report = validate_large_t(&curve, &model)?;
        println!("{shape:?}, n = {n}, q = {q}, {} points", cloud.len());
        println!("  M_q = {:.8}, predicted coefficient {:.8}", report.m_q, report.predicted_coefficient);
        println!("{:>10} {:>14} {:>14}", "t", "residual", "coefficient");
        for i in 0..report.t.len() {
            println!(
                "{:>10.3} {:>14.3e} {:>14.8}",
                report.t[i], report.residuals[i], report.measured_coefficient[i]
            );
        }
        println!(
            "  remainder slope {:?} ({} samples above noise floor {:.0e}), verdict {:?}\n",
            report.fitted_slope, report.samples_above_floor, report.noise_floor, report.verdict
        );
    }
    Ok(())
}
