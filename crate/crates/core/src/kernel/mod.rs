//! The strip kernel `G_t` on `S(t) = R^n × (-t, t)`.
//!
//! `G_t(x̂, ŷ) = Σ_j |x̂ - ρ_j(ŷ)|^{-q}` sums the Riesz kernel over the images
//! `ρ_j(y, w) = (y, 2tj + (-1)^j w)` of the source point. For `q = 1` the
//! series diverges and is renormalized by subtracting `1/|2tj|` from every
//! `j ≠ 0` term and adding back `(γ - log 4t)/t`. At `t = ∞` the kernel is
//! the plain Riesz kernel `|x̂ - ŷ|^{-q}`.
//!
//! [`kernel_value`] and the derivative routines evaluate the series with a
//! certified tail (see the `series` module docs). [`kernel_value_truncated`]
//! is the slower reference route: a plain truncation at `|j| <= J` with `J`
//! chosen by [`plan_truncation`].

mod closed_form;
pub(crate) mod series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, zeta, EULER_GAMMA};
use series::PairGeometry;

/// Default absolute truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Relative slack allowed on the strip walls `|z| = t`.
const WALL_SLACK: f64 = 1e-12;

/// A point `(x, z)` with horizontal part `x ∈ R^n` and height `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub x: Vec<f64>,
    pub z: f64,
}

impl StripPoint {
    pub fn new(x: Vec<f64>, z: f64) -> Self {
        StripPoint { x, z }
    }

    /// Point on the mid-plane `z = 0`.
    pub fn planar(x: Vec<f64>) -> Self {
        StripPoint { x, z: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Kernel family `(n, q, t)` together with the series tolerance.
///
/// Construction enforces `n >= 1`, `1 <= q < n + 1` and `t > 0` (with
/// `t = f64::INFINITY` meaning the whole-space Riesz kernel).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    n: usize,
    q: f64,
    #[serde(with = "crate::serde_float")]
    t: f64,
    tol: f64,
    closed_form: bool,
}

impl KernelParams {
    pub fn new(n: usize, q: f64, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "horizontal dimension must be at least 1"));
        }
        if !(q >= 1.0 && q < n as f64 + 1.0) {
            return Err(Error::invalid(
                "q",
                format!("exponent {q} outside [1, {})", n + 1),
            ));
        }
        check_thickness(t)?;
        Ok(KernelParams {
            n,
            q,
            t,
            tol: DEFAULT_TOL,
            closed_form: false,
        })
    }

    /// Same family at another thickness.
    pub fn with_t(mut self, t: f64) -> Result<Self> {
        check_thickness(t)?;
        self.t = t;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tol", "tolerance must be positive"));
        }
        self.tol = tol;
        Ok(self)
    }

    /// Opt into the sinh/cosh closed form (only honoured for `n = 3, q = 2`).
    pub fn with_closed_form(mut self, enabled: bool) -> Self {
        self.closed_form = enabled;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn is_whole_space(&self) -> bool {
        self.t.is_infinite()
    }

    /// Whether the closed form will be used for evaluation.
    pub fn uses_closed_form(&self) -> bool {
        self.closed_form && self.n == 3 && self.q == 2.0 && self.t.is_finite()
    }

    /// Energies of sets in the mid-plane need `q < n`.
    pub fn require_planar(&self) -> Result<()> {
        if self.q < self.n as f64 {
            Ok(())
        } else {
            Err(Error::invalid(
                "q",
                format!("planar energies need q < n, got q = {} with n = {}", self.q, self.n),
            ))
        }
    }
}

fn check_thickness(t: f64) -> Result<()> {
    if t > 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("thickness must be positive, got {t}")))
    }
}

/// Largest reflection index kept by a plain truncation, with the certified
/// bound on what is left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub j_max: u64,
    pub tail_bound: f64,
}

/// Constants `(A, B, C)` of the large-`t` expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Image of `p` under the `j`-th reflection.
pub fn reflect(j: i64, p: &StripPoint, t: f64) -> StripPoint {
    let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    StripPoint {
        x: p.x.clone(),
        z: 2.0 * t * j as f64 + sign * p.z,
    }
}

/// Smallest `J` whose plain truncation error is certified below `params.tol`
/// for point pairs in the closed strip with horizontal separation at most
/// `max_horizontal_sep`.
pub fn plan_truncation(params: &KernelParams, max_horizontal_sep: f64) -> Result<TruncationPlan> {
    let t = params.t;
    if !t.is_finite() {
        return Err(Error::Domain("truncation needs a finite thickness".into()));
    }
    if !(max_horizontal_sep >= 0.0) || !max_horizontal_sep.is_finite() {
        return Err(Error::invalid("max_horizontal_sep", "must be finite and nonnegative"));
    }
    let bound = |j: u64| series::pair_tail_bound(params.q, t, max_horizontal_sep, j);
    let tol = params.tol;
    if tol.is_infinite() {
        return Ok(TruncationPlan {
            j_max: 1,
            tail_bound: bound(1),
        });
    }
    const CEILING: u64 = 1 << 40;
    let mut hi = 1u64;
    while bound(hi) > tol {
        if hi >= CEILING {
            return Err(Error::Truncation(format!(
                "no J below {CEILING} certifies tolerance {tol:e}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(TruncationPlan {
            j_max: hi,
            tail_bound: bound(hi),
        });
    }
    // bound(lo) > tol >= bound(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(TruncationPlan {
        j_max: hi,
        tail_bound: bound(hi),
    })
}

fn pair_geometry(xh: &StripPoint, yh: &StripPoint, params: &KernelParams) -> Result<PairGeometry> {
    let n = params.n;
    if xh.dim() != n || yh.dim() != n {
        return Err(Error::invalid(
            "point",
            format!("expected horizontal dimension {n}, got {} and {}", xh.dim(), yh.dim()),
        ));
    }
    for (name, p) in [("x̂", xh), ("ŷ", yh)] {
        if p.x.iter().any(|c| !c.is_finite()) || !p.z.is_finite() {
            return Err(Error::invalid(name, "coordinates must be finite"));
        }
        if params.t.is_finite() && p.z.abs() > params.t * (1.0 + WALL_SLACK) {
            return Err(Error::Domain(format!(
                "height {} of {name} outside the strip |z| <= {}",
                p.z, params.t
            )));
        }
    }
    let d2: f64 = xh.x.iter().zip(&yh.x).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 == 0.0 && xh.z == yh.z {
        return Err(Error::Singular("kernel evaluated at coincident points".into()));
    }
    Ok(PairGeometry {
        d2,
        z: xh.z,
        w: yh.z,
    })
}

/// Dispatch on an already validated pair.
pub(crate) fn value_unchecked(pair: &PairGeometry, params: &KernelParams) -> f64 {
    let q = params.q;
    if params.t.is_infinite() {
        let dz = pair.z - pair.w;
        return (pair.d2 + dz * dz).powf(-0.5 * q);
    }
    if params.uses_closed_form() {
        return closed_form::value(pair.d2.sqrt(), pair.z, pair.w, params.t);
    }
    series::value(pair, q, params.t, params.tol)
}

/// `G_t(x̂, ŷ)` with absolute error at most `params.tol`.
pub fn kernel_value(xh: &StripPoint, yh: &StripPoint, params: &KernelParams) -> Result<f64> {
    let pair = pair_geometry(xh, yh, params)?;
    Ok(value_unchecked(&pair, params))
}

/// `G_t(x̂, ŷ)` by plain truncation at the `J` of [`plan_truncation`], using
/// the pair's own horizontal separation.
pub fn kernel_value_truncated(
    xh: &StripPoint,
    yh: &StripPoint,
    params: &KernelParams,
) -> Result<(f64, TruncationPlan)> {
    let pair = pair_geometry(xh, yh, params)?;
    let plan = plan_truncation(params, pair.d2.sqrt())?;
    let value = series::value_truncated(&pair, params.q, params.t, plan.j_max);
    Ok((value, plan))
}

/// Radial profile `f(a)` with `G_t((x,0), (y,0)) = f(|x - y|^2)`.
pub fn radial_profile(a: f64, params: &KernelParams) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(if a == 0.0 {
            Error::Singular("radial profile at zero distance".into())
        } else {
            Error::Domain(format!("radial profile needs a > 0, got {a}"))
        });
    }
    Ok(profile_unchecked(a, params))
}

pub(crate) fn profile_unchecked(a: f64, params: &KernelParams) -> f64 {
    if params.t.is_infinite() {
        return a.powf(-0.5 * params.q);
    }
    if params.uses_closed_form() {
        return closed_form::plane(a.sqrt(), params.t);
    }
    series::value(&PairGeometry::planar(a), params.q, params.t, params.tol)
}

/// Kernel between two points of the mid-plane.
pub fn kernel_plane(x: &[f64], y: &[f64], params: &KernelParams) -> Result<f64> {
    let n = params.n;
    if x.len() != n || y.len() != n {
        return Err(Error::invalid(
            "point",
            format!("expected dimension {n}, got {} and {}", x.len(), y.len()),
        ));
    }
    let a: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if a == 0.0 {
        return Err(Error::Singular("kernel evaluated at coincident points".into()));
    }
    radial_profile(a, params)
}

fn require_finite_t(params: &KernelParams) -> Result<()> {
    if params.t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("derivative needs a finite thickness".into()))
    }
}

/// `∂G_t/∂z` in the first argument's height.
pub fn kernel_dz(xh: &StripPoint, yh: &StripPoint, params: &KernelParams) -> Result<f64> {
    require_finite_t(params)?;
    let pair = pair_geometry(xh, yh, params)?;
    Ok(series::dz(&pair, params.q, params.t, params.tol))
}

/// `∂G_t/∂t` at fixed points.
pub fn kernel_dt(xh: &StripPoint, yh: &StripPoint, params: &KernelParams) -> Result<f64> {
    require_finite_t(params)?;
    let pair = pair_geometry(xh, yh, params)?;
    Ok(series::dt(&pair, params.q, params.t, params.tol))
}

/// `∂G_t/∂t` on an already validated pair, closed form when available.
pub(crate) fn dt_unchecked(pair: &PairGeometry, params: &KernelParams) -> f64 {
    if params.uses_closed_form() && pair.z == 0.0 && pair.w == 0.0 {
        return closed_form::plane_dt(pair.d2.sqrt(), params.t);
    }
    series::dt(pair, params.q, params.t, params.tol)
}

/// Horizontal gradient `∇_x G_t = -q (x - y) G_{t, q+2}`.
pub fn kernel_grad_x(xh: &StripPoint, yh: &StripPoint, params: &KernelParams) -> Result<Vec<f64>> {
    let pair = pair_geometry(xh, yh, params)?;
    let factor = -params.q * shifted_value(&pair, params);
    Ok(xh.x.iter().zip(&yh.x).map(|(a, b)| factor * (a - b)).collect())
}

/// `G_{t, q+2}` for the gradient identity.
pub(crate) fn shifted_value(pair: &PairGeometry, params: &KernelParams) -> f64 {
    let q2 = params.q + 2.0;
    if params.t.is_infinite() {
        let dz = pair.z - pair.w;
        (pair.d2 + dz * dz).powf(-0.5 * q2)
    } else {
        series::value(pair, q2, params.t, params.tol)
    }
}

/// Sinh/cosh closed form for `n = 3`, `q = 2`.
pub fn closed_form_n3_q2(xh: &StripPoint, yh: &StripPoint, t: f64) -> Result<f64> {
    let params = KernelParams::new(3, 2.0, t)?;
    if !t.is_finite() {
        return Err(Error::Domain("closed form needs a finite thickness".into()));
    }
    let pair = pair_geometry(xh, yh, &params)?;
    let value = closed_form::value(pair.d2.sqrt(), pair.z, pair.w, t);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Singular("point coincides with one of its images".into()))
    }
}

/// Planar closed form `π coth(πd/2t) / (2td)` for `n = 3`, `q = 2`.
pub fn closed_form_plane(d: f64, t: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Singular("closed form at zero distance".into()));
    }
    check_thickness(t)?;
    Ok(closed_form::plane(d, t))
}

/// `∂/∂t` of [`closed_form_plane`].
pub fn closed_form_plane_dt(d: f64, t: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Singular("closed form at zero distance".into()));
    }
    check_thickness(t)?;
    Ok(closed_form::plane_dt(d, t))
}

/// `c_{q-1} = Γ(1/2) Γ((q-1)/2) / (2 Γ(q/2))`.
pub fn riesz_constant(q: f64) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("riesz constant needs q > 1, got {q}")));
    }
    Ok(gamma(0.5) * gamma(0.5 * (q - 1.0)) / (2.0 * gamma(0.5 * q)))
}

/// Constants of the large-`t` expansion; `t` only matters for `q = 1`.
pub fn expansion_coeffs(q: f64, t: f64) -> Result<ExpansionCoeffs> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("expansion needs q >= 1, got {q}")));
    }
    let a = if q == 1.0 {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain("A_1(t) needs a finite positive t".into()));
        }
        2.0 * (EULER_GAMMA - (4.0 * t).ln())
    } else {
        2.0 * zeta(q)
    };
    let z2 = zeta(q + 2.0);
    Ok(ExpansionCoeffs {
        a,
        b: q * z2,
        c: 2.0 * q * (q + 1.0) * 2.0 * (1.0 - 2f64.powf(-(q + 2.0))) * z2,
    })
}
