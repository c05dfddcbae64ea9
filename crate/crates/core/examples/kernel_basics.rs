//! Strip kernel values, derivatives and truncation plans for a few pairs.

use strip_riesz::kernel::{
    expansion_coeffs, kernel_dt, kernel_dz, kernel_value, kernel_value_truncated, plan_truncation, riesz_constant,
    KernelParams, StripPoint,
};

fn main() -> strip_riesz::error::Result<()> {
    let x = StripPoint::planar(vec![0.0, 0.0]);
    println!("q = 1.5, n = 2, |x - y| = 1");
    println!("{:>8} {:>20} {:>14} {:>14}", "t", "G_t", "dG/dt", "t G_t");
    for t in [0.1, 0.5, 1.0, 5.0, 50.0, f64::INFINITY] {
        let p = KernelParams::new(2, 1.5, t)?;
        let y = StripPoint::planar(vec![1.0, 0.0]);
        let g = kernel_value(&x, &y, &p)?;
        let dt = if t.is_finite() { kernel_dt(&x, &y, &p)? } else { 0.0 };
        println!("{t:>8} {g:>20.14} {dt:>14.6e} {:>14.8}", t * g);
    }
    println!("c_(q-1) at q = 1.5: {:.12}", riesz_constant(1.5)?);

    // a lifted pair touching the top wall: the normal derivative vanishes
    let p = KernelParams::new(2, 2.0, 0.7)?;
    let top = StripPoint::new(vec![0.0, 0.0], 0.7);
    let y = StripPoint::new(vec![0.3, -0.2], -0.1);
    println!("\nq = 2 on the wall z = t: dG/dz = {:.3e}", kernel_dz(&top, &y, &p)?);

    // q = 1 is renormalized and may be negative at large separation
    let p = KernelParams::new(2, 1.0, 1.0)?;
    let far = StripPoint::planar(vec![10.0, 0.0]);
    let (v, plan) = kernel_value_truncated(&x, &far, &p)?;
    println!(
        "\nq = 1, t = 1, |x - y| = 10: accelerated {:.15}, truncated {v:.15} (J = {}, tail <= {:.1e})",
        kernel_value(&x, &far, &p)?,
        plan.j_max,
        plan.tail_bound
    );

    for (q, t) in [(2.0, 1.0), (3.0, 1.0), (1.0, 10.0)] {
        let plan = plan_truncation(&KernelParams::new(3, q, t)?.with_tol(1e-10)?, 2.0)?;
        let c = expansion_coeffs(q, t)?;
        println!(
            "q = {q}, t = {t}: J = {:>7} for tol 1e-10 at separation 2; A = {:.6}, B = {:.6}, C = {:.6}",
            plan.j_max, c.a, c.b, c.c
        );
    }
    Ok(())
}
