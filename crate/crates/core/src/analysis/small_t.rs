use serde::{Deserialize, Serialize};

use super::{fit, AnalysisOptions, EnergyCurve};
use crate::equilibrium::{equilibrium, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::QuadratureCloud;
use crate::kernel::riesz_constant;

/// The quantity `t·E_K(t)` tends to as `t → 0`, on the same cloud:
/// `c_{q-1} V_{q-1}` for `q > 1` and `V_log` for `q = 1`.
pub fn low_energy_reference(cloud: &QuadratureCloud, q: f64, opts: &AnalysisOptions) -> Result<f64> {
    let (spec, factor) = if q == 1.0 {
        (KernelSpec::Log, 1.0)
    } else {
        (KernelSpec::Riesz { s: q - 1.0 }, riesz_constant(q)?)
    };
    let (_, report) = equilibrium(cloud, &spec, opts.policy, &opts.solver)?;
    Ok(factor * report.energy)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallTReport {
    pub t: Vec<f64>,
    pub t_energy: Vec<f64>,
    pub reference: f64,
    /// `t·E - reference` per sample.
    pub margins: Vec<f64>,
    /// For `q = 1`: smallest `κ ≥ 0` with `t·E ≥ reference - κ t` on the
    /// smaller half of the samples; zero otherwise.
    pub band_constant: f64,
    pub lower_bound_holds: bool,
    /// Quadratic extrapolation of `t·E` to `t = 0` from the three smallest samples.
    pub extrapolated_limit: f64,
    pub absolute_error: f64,
    pub relative_error: f64,
    /// False when the shape is not known to be a convex body.
    pub limit_claimed: bool,
    pub notes: Vec<String>,
}

/// Check the small-`t` lower bound and extrapolated limit of a curve.
///
/// `convex` says whether the cloud discretizes a convex body; otherwise the
/// limit is still computed but not claimed.
pub fn validate_small_t(curve: &EnergyCurve, reference: f64, convex: bool) -> Result<SmallTReport> {
    let q = curve.params.q();
    let samples: Vec<_> = curve.samples.iter().filter(|s| s.is_ok()).collect();
    if samples.len() < 3 {
        return Err(Error::invalid("t_grid", "need at least three successful samples"));
    }
    if !reference.is_finite() {
        return Err(Error::Domain("reference energy is infinite".into()));
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let t_energy: Vec<f64> = samples.iter().map(|s| s.t * s.energy).collect();
    let margins: Vec<f64> = t_energy.iter().map(|v| v - reference).collect();
    let slack = 1e-10 * reference.abs().max(1.0);
    let mut notes = Vec::new();

    let (band_constant, lower_bound_holds) = if q == 1.0 {
        let half = t.len().div_ceil(2);
        let kappa = t[..half]
            .iter()
            .zip(&margins)
            .map(|(t, m)| (-m / t).max(0.0))
            .fold(0.0, f64::max);
        let holds = t.iter().zip(&margins).all(|(t, m)| *m >= -kappa * t - slack);
        if kappa > 0.0 {
            notes.push(format!("lower bound needs a linear band, fitted constant {kappa:.3e}"));
        }
        (kappa, holds)
    } else {
        (0.0, margins.iter().all(|m| *m >= -slack))
    };

    let extrapolated_limit = fit::extrapolate_to_zero([t[0], t[1], t[2]], [t_energy[0], t_energy[1], t_energy[2]])?;
    let absolute_error = (extrapolated_limit - reference).abs();
    let relative_error = absolute_error / reference.abs();
    if !convex {
        notes.push("shape is not a known convex body; limit not claimed".into());
    }
    Ok(SmallTReport {
        t,
        t_energy,
        reference,
        margins,
        band_constant,
        lower_bound_holds,
        extrapolated_limit,
        absolute_error,
        relative_error,
        limit_claimed: convex,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::energy_curve;
    use crate::geometry::{discretize, ShapeSpec};
    use crate::kernel::KernelParams;

    #[test]
    fn lower_bound_holds_on_a_disk() {
        let cloud = discretize(&ShapeSpec::disk(1.0), 12).unwrap();
        let opts = AnalysisOptions::default();
        let params = KernelParams::new(2, 1.5, 1.0).unwrap();
        let h = cloud.max_spacing();
        let grid = [2.0 * h, 3.0 * h, 4.0 * h, 8.0 * h];
        let curve = energy_curve(&cloud, &params, &grid, &opts).unwrap();
        let reference = low_energy_reference(&cloud, 1.5, &opts).unwrap();
        let report = validate_small_t(&curve, reference, true).unwrap();
        assert!(report.lower_bound_holds);
        assert!(report.margins.iter().all(|m| *m > 0.0));
        // margins shrink as t decreases
        assert!(report.margins.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn non_convex_shapes_do_not_claim_a_limit() {
        let cloud = discretize(&ShapeSpec::annulus(0.5, 1.0), 10).unwrap();
        let opts = AnalysisOptions::default();
        let params = KernelParams::new(2, 1.0, 1.0).unwrap();
        let curve = energy_curve(&cloud, &params, &[0.4, 0.6, 0.8], &opts).unwrap();
        let reference = low_energy_reference(&cloud, 1.0, &opts).unwrap();
        let report = validate_small_t(&curve, reference, false).unwrap();
        assert!(!report.limit_claimed);
        assert!(!report.notes.is_empty());
    }
}
