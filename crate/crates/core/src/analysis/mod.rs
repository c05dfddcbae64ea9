//! Energy curves in the strip thickness and checks of their asymptotics.
//!
//! [`energy_curve`] solves the equilibrium problem at each thickness.
//! [`validate_large_t`] and [`validate_small_t`] compare a curve against the
//! large- and small-`t` expansions. [`energy_derivative`] integrates `∂G_t/∂t`
//! against the solved measure. [`ps_compare`] puts a convex set next to the
//! ball with the same Riesz energy.

mod conjecture;
mod curve;
mod derivative;
pub mod fit;
mod large_t;
mod small_t;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{DiagonalPolicy, SolverOptions};

pub use conjecture::{ps_compare, PsLevel, PsOptions, PsReport, PsRow};
pub use curve::{energy_curve, shape_energy_curve, CurveSample, EnergyCurve};
pub use derivative::{energy_derivative, DerivativeReport};
pub use large_t::{
    large_t_model, large_t_prediction, pairwise_second_moment, validate_large_t, AsymptoticReport, LargeTModel,
    Verdict,
};
pub use small_t::{low_energy_reference, validate_small_t, SmallTReport};

/// Diagonal policy and solver settings shared by every solve of an analysis.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub policy: DiagonalPolicy,
    pub solver: SolverOptions,
}
