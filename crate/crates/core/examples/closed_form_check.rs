//! Series kernel against the sinh/cosh closed form for n = 3, q = 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strip_riesz::kernel::{closed_form_n3_q2, kernel_value, KernelParams, StripPoint};

fn main() -> strip_riesz::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = 10f64.powf(rng.gen_range(-1.0..1.0));
        let series = KernelParams::new(3, 2.0, t)?.with_closed_form(false);
        let point = |rng: &mut ChaCha8Rng| {
            let x = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            StripPoint::new(x, t * rng.gen_range(-1.0..1.0))
        };
        let (a, b) = (point(&mut rng), point(&mut rng));
        let deviation = (kernel_value(&a, &b, &series)? - closed_form_n3_q2(&a, &b, t)?).abs();
        worst = worst.max(deviation);
    }
    println!("200 random pairs, t in [0.1, 10]: max |series - closed form| = {worst:.3e}");
    Ok(())
}
