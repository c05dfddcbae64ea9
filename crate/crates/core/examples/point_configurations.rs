//! Equal-charge configurations in the disk for the strip kernel at a few
//! thicknesses, compared with the whole-space Riesz optimum.

use strip_riesz::equilibrium::{solve_points, KernelSpec, PointsOptions};
use strip_riesz::geometry::ShapeSpec;
use strip_riesz::kernel::KernelParams;

fn main() -> strip_riesz::error::Result<()> {
    let disk = ShapeSpec::disk(1.0);
    let opts = PointsOptions::default();
    for n in [5, 12, 30] {
        println!("{n} points");
        for t in [0.2, 1.0, f64::INFINITY] {
            let spec = KernelSpec::Strip(KernelParams::new(2, 1.0, t)?);
            let res = solve_points(n, &disk, &spec, &opts)?;
            let on_rim = res.points.iter().filter(|p| p[0].hypot(p[1]) > 1.0 - 1e-6).count();
            println!(
                "  t = {t:>4}: energy {:.10}, {on_rim} on the rim, {} iterations{}",
                res.energy,
                res.iterations,
                if res.converged { "" } else { " (not converged)" }
            );
        }
    }
    Ok(())
}
