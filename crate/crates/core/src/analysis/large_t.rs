use serde::{Deserialize, Serialize};

use super::{fit, AnalysisOptions, EnergyCurve};
use crate::equilibrium::{kernel_matrix, solve_weights, DiscreteMeasure, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::QuadratureCloud;
use crate::kernel::{expansion_coeffs, KernelParams};

/// Moments of the whole-space equilibrium measure that drive the large-`t`
/// expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeTModel {
    pub q: f64,
    /// `E_K(∞)`
    pub e_inf: f64,
    /// `M_q = ∬|x-y|² dμ dμ - 2(q+1) Var(z) + Σ w_i² r_i²`
    pub m_q: f64,
    pub centroid: Vec<f64>,
    /// `∫|x - x_c|² dμ`
    pub centroid_moment: f64,
    /// `∫ z dμ`
    pub vertical_first_moment: f64,
    pub vertical_variance: f64,
    /// Diagonal contribution `Σ w_i² r_i²` of the discrete double integral.
    pub self_moment: f64,
    pub planar: bool,
}

/// `∬ |x - y|² dμ dμ` by direct double summation (off-diagonal only).
pub fn pairwise_second_moment(cloud: &QuadratureCloud, w: &DiscreteMeasure) -> f64 {
    let pts = cloud.points();
    let wt = w.weights();
    let mut total = 0.0;
    for i in 0..pts.len() {
        let mut row = 0.0;
        for j in (i + 1)..pts.len() {
            let d2: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            row += wt[j] * d2;
        }
        total += 2.0 * wt[i] * row;
    }
    total
}

impl LargeTModel {
    /// Model from a solved whole-space measure and the matrix self-distances.
    pub fn from_measure(
        cloud: &QuadratureCloud,
        measure: &DiscreteMeasure,
        e_inf: f64,
        self_radius: &[f64],
        q: f64,
    ) -> Result<Self> {
        if measure.len() != cloud.len() || self_radius.len() != cloud.len() {
            return Err(Error::invalid("measure", "length does not match the cloud"));
        }
        if !e_inf.is_finite() {
            return Err(Error::Domain("whole-space energy is infinite".into()));
        }
        let w = measure.weights();
        let dim = cloud.dim();
        let mut centroid = vec![0.0; dim];
        for (p, wi) in cloud.points().iter().zip(w) {
            for k in 0..dim {
                centroid[k] += wi * p[k];
            }
        }
        let centroid_moment = measure.integrate(|i| {
            cloud.points()[i]
                .iter()
                .zip(&centroid)
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
        });
        let heights = cloud.heights();
        let mz = measure.integrate(|i| heights[i]);
        let vertical_variance = measure.integrate(|i| (heights[i] - mz) * (heights[i] - mz));
        let self_moment: f64 = w.iter().zip(self_radius).map(|(wi, r)| wi * wi * r * r).sum();
        let m_q = 2.0 * centroid_moment - 2.0 * (q + 1.0) * vertical_variance + self_moment;
        Ok(LargeTModel {
            q,
            e_inf,
            m_q,
            centroid,
            centroid_moment,
            vertical_first_moment: mz,
            vertical_variance,
            self_moment,
            planar: cloud.is_planar(),
        })
    }

    /// `E(∞) + A_q(t)/(2t)^q`
    pub fn leading(&self, t: f64) -> Result<f64> {
        let c = expansion_coeffs(self.q, t)?;
        Ok(self.e_inf + c.a / (2.0 * t).powf(self.q))
    }

    /// Coefficient of `(2t)^{-(q+2)}`: `-(B_q M_q - C_q (∫z)²)`.
    pub fn correction_coefficient(&self) -> Result<f64> {
        let c = expansion_coeffs(self.q, 1.0)?;
        Ok(-(c.b * self.m_q - c.c * self.vertical_first_moment.powi(2)))
    }

    /// Three-term prediction of `E_K(t)`.
    pub fn predict(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid("t", "prediction needs a finite positive t"));
        }
        Ok(self.leading(t)? + self.correction_coefficient()? / (2.0 * t).powf(self.q + 2.0))
    }

    /// Planar form `E(∞) + A/(2t)^q - 2B (∫|x-x_c|² + Σw²r²/2)/(2t)^{q+2}`.
    pub fn predict_planar(&self, t: f64) -> Result<f64> {
        if !self.planar {
            return Err(Error::invalid("cloud", "centroid form applies to planar clouds"));
        }
        let c = expansion_coeffs(self.q, t)?;
        let moment = self.centroid_moment + 0.5 * self.self_moment;
        Ok(self.leading(t)? - 2.0 * c.b * moment / (2.0 * t).powf(self.q + 2.0))
    }
}

/// Solve the whole-space problem on `cloud` and build the expansion model.
pub fn large_t_model(cloud: &QuadratureCloud, params: &KernelParams, opts: &AnalysisOptions) -> Result<LargeTModel> {
    let inf = params.with_t(f64::INFINITY)?;
    let k = kernel_matrix(cloud, &KernelSpec::Strip(inf), opts.policy)?;
    let (w, report) = solve_weights(&k, &opts.solver)?;
    if !report.energy.is_finite() {
        return Err(Error::Domain("whole-space energy is infinite".into()));
    }
    LargeTModel::from_measure(cloud, &w, report.energy, k.self_radius(), params.q())
}

/// Three-term large-`t` prediction of the strip energy of `cloud` at `t`.
pub fn large_t_prediction(cloud: &QuadratureCloud, params: &KernelParams, t: f64, opts: &AnalysisOptions) -> Result<f64> {
    large_t_model(cloud, params, opts)?.predict(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NoiseLimited,
}

/// Measured versus predicted large-`t` energies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub t: Vec<f64>,
    pub measured: Vec<f64>,
    pub predicted: Vec<f64>,
    /// measured − predicted
    pub residuals: Vec<f64>,
    /// `(E - E(∞) - A/(2t)^q)·(2t)^{q+2}` per sample.
    pub measured_coefficient: Vec<f64>,
    pub predicted_coefficient: f64,
    /// Largest relative deviation of the measured coefficient over samples
    /// whose correction is at least 100 times the noise floor.
    pub coefficient_error: f64,
    /// Least squares slope of `log|residual|` over samples above the noise floor.
    pub fitted_slope: Option<f64>,
    pub noise_floor: f64,
    pub samples_above_floor: usize,
    pub verdict: Verdict,
    pub m_q: f64,
    pub centroid_moment: f64,
    pub vertical_first_moment: f64,
    pub self_moment: f64,
}

/// Compare a curve with the model's predictions.
///
/// The slope passes when it is at most `-(q+2) + 0.3`. With fewer than three
/// residuals above the noise floor the verdict is `NoiseLimited`.
pub fn validate_large_t(curve: &EnergyCurve, model: &LargeTModel) -> Result<AsymptoticReport> {
    let q = model.q;
    let samples: Vec<_> = curve.samples.iter().filter(|s| s.is_ok()).collect();
    if samples.len() < 5 {
        return Err(Error::invalid("t_grid", "need at least five successful samples"));
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    if (t[t.len() - 1] / t[0]).log10() < 1.5 {
        return Err(Error::invalid("t_grid", "samples must span at least 1.5 decades"));
    }
    let measured: Vec<f64> = samples.iter().map(|s| s.energy).collect();
    let predicted = t.iter().map(|&t| model.predict(t)).collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = measured.iter().zip(&predicted).map(|(m, p)| m - p).collect();

    let predicted_coefficient = model.correction_coefficient()?;
    let measured_coefficient = t
        .iter()
        .zip(&measured)
        .map(|(&t, &e)| Ok((e - model.leading(t)?) * (2.0 * t).powf(q + 2.0)))
        .collect::<Result<Vec<f64>>>()?;
    let scale = measured.iter().fold(model.e_inf.abs(), |m, e| m.max(e.abs()));
    let noise_floor = 10.0 * (curve.params.tol() + 64.0 * f64::EPSILON * scale);
    let coefficient_error = t
        .iter()
        .zip(&measured)
        .zip(&measured_coefficient)
        .filter(|((t, e), _)| model.leading(**t).is_ok_and(|l| (*e - l).abs() >= 100.0 * noise_floor))
        .map(|(_, c)| ((c - predicted_coefficient) / predicted_coefficient).abs())
        .fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(&residuals)
        .filter(|(_, r)| r.abs() > noise_floor)
        .map(|(t, r)| (*t, *r))
        .unzip();
    let (fitted_slope, verdict) = if xs.len() < 3 {
        (None, Verdict::NoiseLimited)
    } else {
        let slope = fit::log_log_slope(&xs, &ys)?;
        let verdict = if slope <= -(q + 2.0) + 0.3 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        (Some(slope), verdict)
    };

    Ok(AsymptoticReport {
        t,
        measured,
        predicted,
        residuals,
        measured_coefficient,
        predicted_coefficient,
        coefficient_error,
        fitted_slope,
        noise_floor,
        samples_above_floor: xs.len(),
        verdict,
        m_q: model.m_q,
        centroid_moment: model.centroid_moment,
        vertical_first_moment: model.vertical_first_moment,
        self_moment: model.self_moment,
    })
}
