use serde::{Deserialize, Serialize};

use super::AnalysisOptions;
use crate::equilibrium::{equilibrium, DiscreteMeasure, EnergyReport, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::{QuadratureCloud, ShapeSpec};
use crate::kernel::KernelParams;

/// One thickness of an energy curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    #[serde(with = "crate::serde_float")]
    pub t: f64,
    /// `NaN` when the solve failed.
    #[serde(with = "crate::serde_float")]
    pub energy: f64,
    pub report: Option<EnergyReport>,
    pub error: Option<String>,
    #[serde(skip)]
    pub measure: Option<DiscreteMeasure>,
}

impl CurveSample {
    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.energy.is_finite()
    }

    pub fn converged(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.converged)
    }
}

/// `t ↦ E_K(t)` on a cloud, plus the whole-space sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    pub params: KernelParams,
    pub shape: Option<ShapeSpec>,
    pub samples: Vec<CurveSample>,
    pub infinity: CurveSample,
}

impl EnergyCurve {
    pub fn t_grid(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    pub fn all_ok(&self) -> bool {
        self.infinity.is_ok() && self.samples.iter().all(CurveSample::is_ok)
    }

    pub fn all_converged(&self) -> bool {
        self.infinity.converged() && self.samples.iter().all(CurveSample::converged)
    }

    /// Reports of every solve, finite samples first.
    pub fn reports(&self) -> impl Iterator<Item = &EnergyReport> {
        self.samples
            .iter()
            .chain(std::iter::once(&self.infinity))
            .filter_map(|s| s.report.as_ref())
    }
}

fn sample(cloud: &QuadratureCloud, params: &KernelParams, opts: &AnalysisOptions) -> CurveSample {
    let t = params.t();
    match equilibrium(cloud, &KernelSpec::Strip(*params), opts.policy, &opts.solver) {
        Ok((measure, report)) => CurveSample {
            t,
            energy: report.energy,
            report: Some(report),
            error: None,
            measure: Some(measure),
        },
        Err(e) => CurveSample {
            t,
            energy: f64::NAN,
            report: None,
            error: Some(e.to_string()),
            measure: None,
        },
    }
}

/// Strip energies of `cloud` at each `t` of an increasing grid and at `t = ∞`.
///
/// Only `n`, `q`, tolerance and the closed-form flag are taken from `params`.
/// Failed solves are recorded in their sample; the curve is still returned.
pub fn energy_curve(
    cloud: &QuadratureCloud,
    params: &KernelParams,
    t_grid: &[f64],
    opts: &AnalysisOptions,
) -> Result<EnergyCurve> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid", "grid is empty"));
    }
    if t_grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::invalid("t_grid", "thicknesses must be finite and positive"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("t_grid", "grid must be strictly increasing"));
    }
    let t_min = t_grid[0];
    if cloud.max_abs_height() >= t_min {
        return Err(Error::Domain(format!(
            "cloud heights up to {} do not fit in the thinnest strip t = {t_min}",
            cloud.max_abs_height()
        )));
    }
    let samples = t_grid
        .iter()
        .map(|&t| Ok(sample(cloud, &params.with_t(t)?, opts)))
        .collect::<Result<Vec<_>>>()?;
    let infinity = sample(cloud, &params.with_t(f64::INFINITY)?, opts);
    Ok(EnergyCurve {
        params: *params,
        shape: None,
        samples,
        infinity,
    })
}

/// [`energy_curve`] on the discretization of a shape, recording the shape.
pub fn shape_energy_curve(
    shape: &ShapeSpec,
    resolution: usize,
    params: &KernelParams,
    t_grid: &[f64],
    opts: &AnalysisOptions,
) -> Result<(QuadratureCloud, EnergyCurve)> {
    let cloud = crate::geometry::discretize(shape, resolution)?;
    let mut curve = energy_curve(&cloud, params, t_grid, opts)?;
    curve.shape = Some(shape.clone());
    Ok((cloud, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{kernel_matrix, solve_weights};
    use crate::geometry::{discretize, ShapeSpec};

    #[test]
    fn q_above_one_curve_decreases_towards_riesz() {
        let cloud = discretize(&ShapeSpec::disk(1.0), 10).unwrap();
        let params = KernelParams::new(2, 1.5, 1.0).unwrap();
        let grid = [0.3, 1.0, 3.0, 10.0];
        let curve = energy_curve(&cloud, &params, &grid, &AnalysisOptions::default()).unwrap();
        assert!(curve.all_ok() && curve.all_converged());
        let e = curve.energies();
        for w in e.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(e[3] > curve.infinity.energy);

        let k = kernel_matrix(&cloud, &KernelSpec::Riesz { s: 1.5 }, Default::default()).unwrap();
        let (_, r) = solve_weights(&k, &Default::default()).unwrap();
        assert_eq!(r.energy, curve.infinity.energy);
    }

    #[test]
    fn rejects_bad_grids() {
        let cloud = discretize(&ShapeSpec::disk(1.0), 6).unwrap();
        let params = KernelParams::new(2, 1.0, 1.0).unwrap();
        let opts = AnalysisOptions::default();
        assert!(energy_curve(&cloud, &params, &[], &opts).is_err());
        assert!(energy_curve(&cloud, &params, &[1.0, 0.5], &opts).is_err());
        assert!(energy_curve(&cloud, &params, &[-1.0], &opts).is_err());

        let lifted = discretize(&ShapeSpec::rectangle(1.0, 1.0).with_vertical(true), 6).unwrap();
        assert!(matches!(
            energy_curve(&lifted, &params, &[0.2, 1.0], &opts),
            Err(Error::Domain(_))
        ));
    }
}
