//! Image sums behind the strip kernel.
//!
//! A pair of points is described by the squared horizontal distance `d2` and
//! the two heights `z`, `w`. The image of `(y, w)` under reflection `j` sits at
//! height `2tj + (-1)^j w`, so the vertical offset of image `j` is
//! `v_j = z - 2tj - (-1)^j w`.
//!
//! Every quantity is split into a direct sum over `|j| <= J` and a tail over
//! `|j| > J`. Writing `k = |j|` and `u_k = z - (-1)^k w`, the two images `±k`
//! sit at distances `2tk - u_k` and `2tk + u_k`. Once `2t(J+1) - |u|` exceeds
//! the horizontal distance by a safe factor, each tail term expands as a
//! binomial series in `d^2 / v^2`, and each order sums in closed form through
//! Hurwitz zeta values (one per parity class of `k`). The `q = 1`
//! renormalized leading order sums to a digamma difference. The expansion is
//! truncated by a geometric remainder bound, so the tail error is certified.

use crate::special::{binomial, digamma, hurwitz_zeta, EULER_GAMMA};

/// Smallest direct cutoff; keeps every Hurwitz argument above 4.
const MIN_DIRECT: usize = 8;
/// Highest binomial order attempted before giving up on the bound.
const MAX_ORDER: usize = 80;

/// Horizontal separation and heights of a point pair.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairGeometry {
    pub d2: f64,
    pub z: f64,
    pub w: f64,
}

impl PairGeometry {
    pub fn planar(d2: f64) -> Self {
        PairGeometry { d2, z: 0.0, w: 0.0 }
    }

    fn offset(&self, j: i64, t: f64) -> f64 {
        let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        self.z - 2.0 * t * j as f64 - sign * self.w
    }
}

fn is_unit(q: f64) -> bool {
    q == 1.0
}

/// Direct cutoff `J` that guarantees `2tJ >= 3d`.
fn direct_cutoff(d: f64, t: f64) -> usize {
    let j = (1.5 * d / t).ceil();
    if j.is_finite() && j < 1e9 {
        (j as usize).max(MIN_DIRECT)
    } else {
        1_000_000_000
    }
}

/// Closed-form sums over the tail indices `k > J`, split by parity.
struct Tail {
    four_t: f64,
    /// `(m_P + P/2, u_P)` for parity `P = 0, 1`.
    classes: [(f64, f64); 2],
    v_min: f64,
}

impl Tail {
    fn new(j_cut: usize, pair: &PairGeometry, t: f64) -> Self {
        let j = j_cut as f64;
        // smallest m with 2m + P >= J + 1
        let m_even = ((j + 1.0) / 2.0).ceil();
        let m_odd = (j / 2.0).ceil();
        let u_even = pair.z - pair.w;
        let u_odd = pair.z + pair.w;
        let u_max = u_even.abs().max(u_odd.abs());
        Tail {
            four_t: 4.0 * t,
            classes: [(m_even, u_even), (m_odd + 0.5, u_odd)],
            v_min: 2.0 * t * (j + 1.0) - u_max,
        }
    }

    /// `Σ_{k>J} (2tk + sign·u_k)^{-p}`
    fn power_sum(&self, p: f64, sign: f64) -> f64 {
        self.classes
            .iter()
            .map(|&(base, u)| hurwitz_zeta(p, base + sign * u / self.four_t))
            .sum::<f64>()
            * self.four_t.powf(-p)
    }

    /// `Σ_{k>J} u_k (2tk + sign·u_k)^{-p}`
    fn weighted_power_sum(&self, p: f64, sign: f64) -> f64 {
        self.classes
            .iter()
            .map(|&(base, u)| {
                if u == 0.0 {
                    0.0
                } else {
                    u * hurwitz_zeta(p, base + sign * u / self.four_t)
                }
            })
            .sum::<f64>()
            * self.four_t.powf(-p)
    }

    /// `Σ_{k>J} [(2tk - u_k)^{-1} + (2tk + u_k)^{-1} - 2/(2tk)]`
    fn renormalized_harmonic(&self) -> f64 {
        self.classes
            .iter()
            .map(|&(base, u)| {
                if u == 0.0 {
                    0.0
                } else {
                    let shift = u / self.four_t;
                    2.0 * digamma(base) - digamma(base - shift) - digamma(base + shift)
                }
            })
            .sum::<f64>()
            / self.four_t
    }
}

/// Geometric growth factor bounding `M_{i+1} / M_i` for all later orders.
fn growth(beta: f64, order: usize, ratio: f64) -> f64 {
    let i = order as f64;
    ((beta + i) / (i + 1.0)).max(1.0) * ratio
}

fn remainder_small(magnitude: f64, beta: f64, order: usize, ratio: f64, tol: f64) -> bool {
    let g = growth(beta, order, ratio);
    g < 1.0 && magnitude * g / (1.0 - g) <= tol
}

/// Strip kernel `G_t` (renormalized when `q = 1`).
pub(crate) fn value(pair: &PairGeometry, q: f64, t: f64, tol: f64) -> f64 {
    let d = pair.d2.sqrt();
    let j_cut = direct_cutoff(d, t);
    let unit = is_unit(q);
    let half_q = 0.5 * q;

    let mut direct = 0.0;
    for k in (1..=j_cut as i64).rev() {
        for j in [k, -k] {
            let v = pair.offset(j, t);
            let mut term = (pair.d2 + v * v).powf(-half_q);
            if unit {
                term -= 1.0 / (2.0 * t * k as f64);
            }
            direct += term;
        }
    }
    let v0 = pair.offset(0, t);
    direct += (pair.d2 + v0 * v0).powf(-half_q);
    if unit {
        direct += (EULER_GAMMA - (4.0 * t).ln()) / t;
    }

    let tail = Tail::new(j_cut, pair, t);
    let ratio = pair.d2 / (tail.v_min * tail.v_min);
    let tail_tol = 0.5 * tol;
    let mut tail_sum = 0.0;
    let mut d_pow = 1.0;
    for order in 0..MAX_ORDER {
        let p = q + 2.0 * order as f64;
        let coeff = binomial(-half_q, order) * d_pow;
        if unit && order == 0 {
            tail_sum += tail.renormalized_harmonic();
        } else {
            let sums = tail.power_sum(p, -1.0) + tail.power_sum(p, 1.0);
            tail_sum += coeff * sums;
            if order >= 1 && remainder_small(coeff.abs() * sums, half_q, order, ratio, tail_tol) {
                break;
            }
        }
        if pair.d2 == 0.0 {
            break;
        }
        d_pow *= pair.d2;
    }
    direct + tail_sum
}

/// `∂G_t/∂z` by termwise differentiation.
pub(crate) fn dz(pair: &PairGeometry, q: f64, t: f64, tol: f64) -> f64 {
    let d = pair.d2.sqrt();
    let j_cut = direct_cutoff(d, t);
    let half_q2 = 0.5 * (q + 2.0);

    let mut direct = 0.0;
    for k in (1..=j_cut as i64).rev() {
        for j in [k, -k] {
            let v = pair.offset(j, t);
            direct += -q * v * (pair.d2 + v * v).powf(-half_q2);
        }
    }
    let v0 = pair.offset(0, t);
    direct += -q * v0 * (pair.d2 + v0 * v0).powf(-half_q2);

    let tail = Tail::new(j_cut, pair, t);
    let ratio = pair.d2 / (tail.v_min * tail.v_min);
    let tail_tol = 0.5 * tol;
    let mut tail_sum = 0.0;
    let mut d_pow = 1.0;
    for order in 0..MAX_ORDER {
        let p = q + 1.0 + 2.0 * order as f64;
        let coeff = q * binomial(-half_q2, order) * d_pow;
        let minus = tail.power_sum(p, -1.0);
        let plus = tail.power_sum(p, 1.0);
        tail_sum += coeff * (minus - plus);
        if pair.d2 == 0.0 {
            break;
        }
        if order >= 1 && remainder_small(coeff.abs() * (minus + plus), half_q2, order, ratio, tail_tol)
        {
            break;
        }
        d_pow *= pair.d2;
    }
    direct + tail_sum
}

/// `∂G_t/∂t` by termwise differentiation of the image sum, including the
/// derivative of the `q = 1` renormalization.
pub(crate) fn dt(pair: &PairGeometry, q: f64, t: f64, tol: f64) -> f64 {
    let d = pair.d2.sqrt();
    let j_cut = direct_cutoff(d, t);
    let unit = is_unit(q);
    let half_q2 = 0.5 * (q + 2.0);

    let mut direct = 0.0;
    for k in (1..=j_cut as i64).rev() {
        for j in [k, -k] {
            let v = pair.offset(j, t);
            let mut term = 2.0 * q * j as f64 * v * (pair.d2 + v * v).powf(-half_q2);
            if unit {
                term += 1.0 / (2.0 * t * t * k as f64);
            }
            direct += term;
        }
    }
    if unit {
        direct += ((4.0 * t).ln() - EULER_GAMMA - 1.0) / (t * t);
    }

    let tail = Tail::new(j_cut, pair, t);
    let ratio = pair.d2 / (tail.v_min * tail.v_min);
    let tail_tol = 0.5 * tol;
    let mut tail_sum = 0.0;
    let mut d_pow = 1.0;
    for order in 0..MAX_ORDER {
        let p = q + 2.0 * order as f64;
        let coeff = -(q / t) * binomial(-half_q2, order) * d_pow;
        let (main, main_mag) = if unit && order == 0 {
            (tail.renormalized_harmonic(), f64::INFINITY)
        } else {
            let minus = tail.power_sum(p, -1.0);
            let plus = tail.power_sum(p, 1.0);
            (minus + plus, minus + plus)
        };
        let wm = tail.weighted_power_sum(p + 1.0, -1.0);
        let wp = tail.weighted_power_sum(p + 1.0, 1.0);
        tail_sum += coeff * (main + wm - wp);
        if pair.d2 == 0.0 {
            break;
        }
        let magnitude = coeff.abs() * (main_mag + wm.abs() + wp.abs());
        if order >= 1 && remainder_small(magnitude, half_q2, order, ratio, tail_tol) {
            break;
        }
        d_pow *= pair.d2;
    }
    direct + tail_sum
}

/// Image sum truncated at `|j| <= j_max`, with the exact Hurwitz tail of the
/// leading `(2t|j|)^{-q}` part added back when `q > 1`. The omitted remainder
/// is bounded by [`pair_tail_bound`].
pub(crate) fn value_truncated(pair: &PairGeometry, q: f64, t: f64, j_max: u64) -> f64 {
    let unit = is_unit(q);
    let half_q = 0.5 * q;
    let mut direct = 0.0;
    for k in (1..=j_max as i64).rev() {
        for j in [k, -k] {
            let v = pair.offset(j, t);
            let mut term = (pair.d2 + v * v).powf(-half_q);
            if unit {
                term -= 1.0 / (2.0 * t * k as f64);
            }
            direct += term;
        }
    }
    let v0 = pair.offset(0, t);
    direct += (pair.d2 + v0 * v0).powf(-half_q);
    if unit {
        direct + (EULER_GAMMA - (4.0 * t).ln()) / t
    } else {
        direct + 2.0 * (2.0 * t).powf(-q) * hurwitz_zeta(q, j_max as f64 + 1.0)
    }
}

/// Upper bound on `Σ_{m>=j} m^{-p}`.
fn power_tail_bound(p: f64, j: f64) -> f64 {
    j.powf(-p) + j.powf(1.0 - p) / (p - 1.0)
}

/// Certified bound on what [`value_truncated`] omits, for heights in the
/// closed strip and horizontal separation at most `max_sep`.
///
/// Each omitted pair `±k` deviates from `2(2tk)^{-q}` by at most
/// `q(q+1)(2t)^{-q}(k-1)^{-(q+2)} + q d^2 (2tk)^{-(q+2)}` (second-order Taylor
/// bound on the even combination plus the horizontal correction).
pub(crate) fn pair_tail_bound(q: f64, t: f64, max_sep: f64, j_max: u64) -> f64 {
    let p = q + 2.0;
    let j = j_max as f64;
    let sep = max_sep / (2.0 * t);
    (2.0 * t).powf(-q)
        * (q * (q + 1.0) * power_tail_bound(p, j) + q * sep * sep * power_tail_bound(p, j + 1.0))
}
