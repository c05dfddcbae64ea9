//! Special functions needed by the kernel constants and series tails.
//!
//! Everything here is evaluated in plain `f64`: the Lanczos approximation for
//! Gamma, Euler–Maclaurin summation for the Hurwitz (and hence Riemann) zeta
//! function, and the asymptotic series for the digamma function.

use std::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_30`.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function on the real line (poles return `NaN`).
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for `s > 1`, `a > 0`.
///
/// The first few terms are summed directly until the shifted argument is
/// large enough for the Euler–Maclaurin tail to converge to full precision.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    if !(s > 1.0) || !(a > 0.0) {
        return f64::NAN;
    }
    let threshold = s.max(12.0);
    let mut direct = 0.0;
    let mut x = a;
    while x < threshold {
        direct += x.powf(-s);
        x += 1.0;
    }
    let x_pow = x.powf(-s);
    let mut tail = x * x_pow / (s - 1.0) + 0.5 * x_pow;
    // term_k = B_2k / (2k)! * s (s+1) ... (s+2k-2) * x^{-s-2k+1}
    let inv_x2 = 1.0 / (x * x);
    let mut rising = s; // s (s+1) ... (s+2k-2)
    let mut factorial = 2.0; // (2k)!
    let mut power = x_pow / x; // x^{-s-2k+1}, starts at k = 1
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / factorial * rising * power;
        tail += term;
        if term.abs() <= 1e-18 * tail.abs() {
            break;
        }
        let k = (k + 1) as f64;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        power *= inv_x2;
    }
    direct + tail
}

/// Riemann zeta for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Digamma `ψ(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut shift = 0.0;
    let mut x = x;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv_x2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut power = inv_x2;
    for (k, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        series += b / (2.0 * (k + 1) as f64) * power;
        power *= inv_x2;
    }
    shift + x.ln() - 0.5 / x - series
}

/// Generalized binomial coefficient `C(alpha, k)`.
pub fn binomial(alpha: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for l in 0..k {
        c *= (alpha - l as f64) / (l + 1) as f64;
    }
    c
}
