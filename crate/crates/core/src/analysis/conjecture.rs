use serde::{Deserialize, Serialize};

use super::{energy_curve, large_t_model, low_energy_reference, AnalysisOptions, EnergyCurve};
use crate::equilibrium::{equilibrium, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::{discretize, match_ball, QuadratureCloud, ShapeSpec};
use crate::kernel::{expansion_coeffs, KernelParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsOptions {
    /// Coarse and fine resolution; error bars are their difference.
    pub resolutions: (usize, usize),
    /// Thicknesses at least this multiple of the diameter count as large.
    pub large_t_factor: f64,
    pub analysis: AnalysisOptions,
}

impl Default for PsOptions {
    fn default() -> Self {
        PsOptions {
            resolutions: (24, 48),
            large_t_factor: 10.0,
            analysis: AnalysisOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsRow {
    pub t: f64,
    #[serde(with = "crate::serde_float")]
    pub energy_set: f64,
    #[serde(with = "crate::serde_float")]
    pub energy_ball: f64,
    /// `E_B(t) - E_K(t)` at the fine resolution.
    #[serde(with = "crate::serde_float")]
    pub margin: f64,
    #[serde(with = "crate::serde_float")]
    pub margin_coarse: f64,
    #[serde(with = "crate::serde_float")]
    pub error_bar: f64,
    pub large_t: bool,
}

impl PsRow {
    pub fn within_error(&self) -> bool {
        self.margin >= -self.error_bar
    }
}

/// One resolution of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsLevel {
    pub resolution: usize,
    pub points_set: usize,
    pub points_ball: usize,
    /// `V_q(K)`, equal to the matched ball's energy by construction.
    pub energy_inf: f64,
    pub ball_radius: f64,
    /// `M_q(K) - M_q(B)` of the whole-space measures.
    pub moment_gap: f64,
    /// `t·E` limit gap of the matched ball over the set.
    pub low_energy_gap: f64,
    pub set_curve: EnergyCurve,
    pub ball_curve: EnergyCurve,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsReport {
    pub shape: ShapeSpec,
    pub params: KernelParams,
    pub coarse: PsLevel,
    pub fine: PsLevel,
    pub rows: Vec<PsRow>,
    /// Sign of `B_q (M_q(K) - M_q(B))`, the large-`t` margin coefficient.
    pub large_t_predicted_sign: f64,
    /// Sign of the small-`t` limit gap `c_{q-1}(V_{q-1}(B) - V_{q-1}(K))`.
    pub small_t_predicted_sign: f64,
    pub all_within_error: bool,
    pub large_t_sign_agrees: bool,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn level(
    shape: &ShapeSpec,
    dim: usize,
    resolution: usize,
    params: &KernelParams,
    t_grid: &[f64],
    opts: &AnalysisOptions,
) -> Result<PsLevel> {
    let q = params.q();
    let set = discretize(shape, resolution)?;
    let unit = discretize(&ShapeSpec::ball(dim, 1.0), resolution)?;
    let riesz = KernelSpec::Riesz { s: q };
    let v_set = equilibrium(&set, &riesz, opts.policy, &opts.solver)?.1.energy;
    let v_unit = equilibrium(&unit, &riesz, opts.policy, &opts.solver)?.1.energy;
    if !v_set.is_finite() || !v_unit.is_finite() {
        return Err(Error::Domain("infinite energy in the comparison".into()));
    }
    let s = match_ball(v_set, v_unit, q)?;
    let ball: QuadratureCloud = unit.scaled(s)?;

    let mut set_curve = energy_curve(&set, params, t_grid, opts)?;
    set_curve.shape = Some(shape.clone());
    let mut ball_curve = energy_curve(&ball, params, t_grid, opts)?;
    ball_curve.shape = Some(ShapeSpec::ball(dim, s));

    let moment_gap = large_t_model(&set, params, opts)?.m_q - large_t_model(&ball, params, opts)?.m_q;
    let low_energy_gap = low_energy_reference(&ball, q, opts)? - low_energy_reference(&set, q, opts)?;
    Ok(PsLevel {
        resolution,
        points_set: set.len(),
        points_ball: ball.len(),
        energy_inf: v_set,
        ball_radius: s,
        moment_gap,
        low_energy_gap,
        set_curve,
        ball_curve,
    })
}

/// Compare strip energies of a convex shape with the ball of equal Riesz
/// energy, at two resolutions.
pub fn ps_compare(shape: &ShapeSpec, params: &KernelParams, t_grid: &[f64], opts: &PsOptions) -> Result<PsReport> {
    if !shape.is_convex_body() {
        return Err(Error::invalid("shape", "comparison needs a built-in convex body"));
    }
    if shape.vertical {
        return Err(Error::invalid("shape", "comparison needs a planar shape"));
    }
    let dim = shape.ambient_dim().expect("built-in shape");
    let q = params.q();
    if params.n() != dim {
        return Err(Error::invalid("n", "kernel dimension does not match the shape"));
    }
    if !(q >= 1.0 && q < dim as f64) {
        return Err(Error::invalid("q", format!("comparison needs 1 <= q < n, got {q}")));
    }
    let (r0, r1) = opts.resolutions;
    if r0 == 0 || r1 <= r0 {
        return Err(Error::invalid("resolutions", "need 0 < coarse < fine"));
    }
    let coarse = level(shape, dim, r0, params, t_grid, &opts.analysis)?;
    let fine = level(shape, dim, r1, params, t_grid, &opts.analysis)?;

    let diameter = shape.diameter().expect("built-in shape");
    let margin = |l: &PsLevel, i: usize| l.ball_curve.samples[i].energy - l.set_curve.samples[i].energy;
    let rows: Vec<PsRow> = t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let (m, mc) = (margin(&fine, i), margin(&coarse, i));
            PsRow {
                t,
                energy_set: fine.set_curve.samples[i].energy,
                energy_ball: fine.ball_curve.samples[i].energy,
                margin: m,
                margin_coarse: mc,
                error_bar: (m - mc).abs(),
                large_t: t >= opts.large_t_factor * diameter,
            }
        })
        .collect();

    let b = expansion_coeffs(q, 1.0)?.b;
    let large_t_predicted_sign = sign(b * fine.moment_gap);
    let small_t_predicted_sign = sign(fine.low_energy_gap);
    let all_within_error = rows.iter().all(|r| r.margin.is_finite() && r.within_error());
    let large_t_sign_agrees = rows
        .iter()
        .filter(|r| r.large_t)
        .all(|r| sign(r.margin) == large_t_predicted_sign);
    Ok(PsReport {
        shape: shape.clone(),
        params: *params,
        coarse,
        fine,
        rows,
        large_t_predicted_sign,
        small_t_predicted_sign,
        all_within_error,
        large_t_sign_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_against_itself_has_zero_margins() {
        let params = KernelParams::new(2, 1.0, 1.0).unwrap();
        let opts = PsOptions {
            resolutions: (8, 12),
            ..Default::default()
        };
        let report = ps_compare(&ShapeSpec::disk(0.7), &params, &[0.5, 2.0, 30.0], &opts).unwrap();
        assert!((report.fine.ball_radius - 0.7).abs() < 1e-12);
        for r in &report.rows {
            assert!(r.margin.abs() < 1e-10 * r.energy_set.abs(), "{r:?}");
        }
    }

    #[test]
    fn rejects_non_convex_and_bad_exponents() {
        let params = KernelParams::new(2, 1.0, 1.0).unwrap();
        let opts = PsOptions::default();
        assert!(ps_compare(&ShapeSpec::annulus(0.5, 1.0), &params, &[1.0], &opts).is_err());
        let p3 = KernelParams::new(2, 2.5, 1.0).unwrap();
        assert!(ps_compare(&ShapeSpec::disk(1.0), &p3, &[1.0], &opts).is_err());
    }
}
