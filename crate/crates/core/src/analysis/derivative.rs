use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::AnalysisOptions;
use crate::equilibrium::{assemble, kernel_matrix, solve_weights, DiscreteMeasure, EnergyReport, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::QuadratureCloud;
use crate::kernel::{self, series::PairGeometry, KernelParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub t: f64,
    pub energy: f64,
    /// `E'(t) = ∬ ∂G_t/∂t dμ_t dμ_t`
    pub derivative: f64,
    /// `(t E)' = E + t E'`
    pub t_energy_derivative: f64,
    /// `(π²/4t²) ∬ csch²(π|x-y|/2t) dμ_t dμ_t`, planar `n = 3, q = 2` only.
    pub csch_integral: Option<f64>,
    pub report: EnergyReport,
}

/// Matrix of `∂G_t/∂t` over the cloud, with the same self-distances as the
/// kernel matrix.
fn dt_matrix(cloud: &QuadratureCloud, params: &KernelParams, sigma: f64) -> Result<Vec<f64>> {
    let p = *params;
    let (data, _) = assemble(
        cloud,
        sigma,
        &|a, z, w| kernel::dt_unchecked(&PairGeometry { d2: a, z, w }, &p),
        &|r, z| kernel::dt_unchecked(&PairGeometry { d2: r * r, z, w: z }, &p),
    )?;
    Ok(data)
}

fn quadratic(data: &[f64], w: &[f64]) -> f64 {
    let n = w.len();
    data.chunks(n)
        .zip(w)
        .map(|(row, wi)| wi * crate::equilibrium::dot(row, w))
        .sum()
}

/// `(π²/4t²) Σ w_i w_j csch²(π d_ij / 2t)` with `d_ii` the self-distance.
fn csch_integral(cloud: &QuadratureCloud, w: &[f64], self_radius: &[f64], t: f64) -> f64 {
    let pts = cloud.points();
    let f = |d: f64| {
        let s = (PI * d / (2.0 * t)).sinh();
        PI * PI / (4.0 * t * t * s * s)
    };
    let mut total = 0.0;
    for i in 0..pts.len() {
        let mut row = 0.0;
        for j in (i + 1)..pts.len() {
            let d2: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            row += w[j] * f(d2.sqrt());
        }
        total += w[i] * (2.0 * row + w[i] * f(self_radius[i]));
    }
    total
}

/// Solve at `t` and integrate `∂G_t/∂t` against the equilibrium measure.
pub fn energy_derivative(
    cloud: &QuadratureCloud,
    params: &KernelParams,
    t: f64,
    opts: &AnalysisOptions,
) -> Result<DerivativeReport> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "derivative needs a finite positive t"));
    }
    let p = params.with_t(t)?;
    let k = kernel_matrix(cloud, &KernelSpec::Strip(p), opts.policy)?;
    let (w, report) = solve_weights(&k, &opts.solver)?;
    derivative_at(cloud, &p, &w, k.self_radius(), report, opts)
}

fn derivative_at(
    cloud: &QuadratureCloud,
    p: &KernelParams,
    w: &DiscreteMeasure,
    self_radius: &[f64],
    report: EnergyReport,
    opts: &AnalysisOptions,
) -> Result<DerivativeReport> {
    let t = p.t();
    let dt = dt_matrix(cloud, p, opts.policy.sigma)?;
    let derivative = quadratic(&dt, w.weights());
    let energy = report.energy;
    let csch = (p.n() == 3 && p.q() == 2.0 && cloud.is_planar())
        .then(|| csch_integral(cloud, w.weights(), self_radius, t));
    Ok(DerivativeReport {
        t,
        energy,
        derivative,
        t_energy_derivative: energy + t * derivative,
        csch_integral: csch,
        report,
    })
}
