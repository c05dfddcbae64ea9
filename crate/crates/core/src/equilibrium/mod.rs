//! Kernel matrices over quadrature clouds and discrete equilibrium measures.
//!
//! The continuous energy `∬ k dμ dμ` becomes the quadratic form `wᵀKw` over
//! probability vectors `w` on the cloud. Off-diagonal entries are kernel
//! values; the diagonal is regularized by evaluating the kernel at a
//! cell-scale self-distance `r_i = σ h_i` (and `log(1/r_i)` for the
//! logarithmic kernel).

mod points;
mod solver;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::QuadratureCloud;
use crate::kernel::{self, series::PairGeometry, KernelParams};

pub use points::{solve_points, PointsOptions, PointsResult};
pub use solver::{solve_weights, SolverMethod, SolverOptions};

/// Which kernel a matrix discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Strip kernel `G_t` (whole-space Riesz when `t = ∞`).
    Strip(KernelParams),
    /// Riesz kernel `|x - y|^{-s}`, any `s > 0`.
    Riesz { s: f64 },
    /// Logarithmic kernel `log(1/|x - y|)`.
    Log,
}

impl KernelSpec {
    fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Riesz { s } if !(*s > 0.0) || !s.is_finite() => {
                Err(Error::invalid("s", format!("Riesz exponent must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }

    /// Kernel at squared horizontal distance `a` between heights `z`, `w`.
    fn eval(&self, a: f64, z: f64, w: f64) -> f64 {
        let dz = z - w;
        match self {
            KernelSpec::Strip(p) => {
                if z == 0.0 && w == 0.0 {
                    kernel::profile_unchecked(a, p)
                } else {
                    kernel::value_unchecked(&PairGeometry { d2: a, z, w }, p)
                }
            }
            KernelSpec::Riesz { s } => (a + dz * dz).powf(-0.5 * s),
            KernelSpec::Log => -0.5 * (a + dz * dz).ln(),
        }
    }
}

/// Self-distance regularization of the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPolicy {
    /// `r_i = sigma · h_i`
    pub sigma: f64,
}

impl Default for DiagonalPolicy {
    fn default() -> Self {
        DiagonalPolicy { sigma: 0.5 }
    }
}

/// Dense symmetric kernel matrix over a cloud.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<f64>,
    spec: KernelSpec,
    policy: DiagonalPolicy,
    self_radius: Vec<f64>,
}

impl KernelMatrix {
    /// Matrix from explicit symmetric entries (row-major), mainly for tests
    /// and external kernels. `self_radius` is recorded as zero.
    pub fn from_dense(n: usize, data: Vec<f64>, spec: KernelSpec) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::invalid("data", "expected a nonempty n×n matrix"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("data", "entries must be finite"));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > 1e-14 * a.abs().max(b.abs()) {
                    return Err(Error::invalid("data", "matrix is not symmetric"));
                }
            }
        }
        Ok(KernelMatrix {
            n,
            data,
            spec,
            policy: DiagonalPolicy::default(),
            self_radius: vec![0.0; n],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn policy(&self) -> DiagonalPolicy {
        self.policy
    }

    /// Effective self-distances used on the diagonal.
    pub fn self_radius(&self) -> &[f64] {
        &self.self_radius
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `K v`
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        self.data
            .par_chunks(self.n)
            .map(|row| dot(row, v))
            .collect()
    }

    /// `vᵀ K v`
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.matvec(v))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators for speed and a little extra accuracy
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// Key identifying a pair up to the kernel's symmetries.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PairKey(u64, u64, u64);

fn pair_key(a: f64, z: f64, w: f64) -> PairKey {
    let (lo, hi) = if z <= w { (z, w) } else { (w, z) };
    PairKey(a.to_bits(), lo.to_bits(), hi.to_bits())
}

/// Assemble the kernel matrix of `cloud`.
///
/// Each distinct pair geometry is evaluated once; on grid clouds squared
/// distances are computed from integer offsets so equal separations hit the
/// same cache entry exactly.
pub fn kernel_matrix(cloud: &QuadratureCloud, spec: &KernelSpec, policy: DiagonalPolicy) -> Result<KernelMatrix> {
    spec.validate()?;
    if !(policy.sigma > 0.0) || !policy.sigma.is_finite() {
        return Err(Error::invalid("sigma", "must be positive and finite"));
    }
    if cloud.is_empty() {
        return Err(Error::invalid("cloud", "cloud is empty"));
    }
    if let KernelSpec::Strip(p) = spec {
        if p.n() != cloud.dim() {
            return Err(Error::invalid(
                "n",
                format!("kernel dimension {} does not match cloud dimension {}", p.n(), cloud.dim()),
            ));
        }
        if cloud.is_planar() {
            p.require_planar()?;
        }
        if p.t().is_finite() && cloud.max_abs_height() > p.t() {
            return Err(Error::Domain(format!(
                "cloud heights up to {} do not fit in the strip of half-thickness {}",
                cloud.max_abs_height(),
                p.t()
            )));
        }
    }

    let sigma = policy.sigma;
    let (data, self_radius) = assemble(
        cloud,
        sigma,
        &|a, z, w| spec.eval(a, z, w),
        &|r, z| match spec {
            KernelSpec::Log => -r.ln(),
            _ => spec.eval(r * r, z, z),
        },
    )?;
    let n = cloud.len();
    Ok(KernelMatrix {
        n,
        data,
        spec: *spec,
        policy,
        self_radius,
    })
}

/// Dense symmetric matrix with `eval(a, z, w)` off the diagonal and
/// `self_eval(σ h_i, z_i)` on it, one evaluation per distinct geometry.
pub(crate) fn assemble(
    cloud: &QuadratureCloud,
    sigma: f64,
    eval: &(dyn Fn(f64, f64, f64) -> f64 + Sync),
    self_eval: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = cloud.len();
    let heights = cloud.heights();
    let sq = squared_distance_fn(cloud);

    let mut slots: HashMap<PairKey, usize> = HashMap::new();
    let mut geometries: Vec<(f64, f64, f64)> = Vec::new();
    let mut index = vec![0u32; n * (n - 1) / 2];
    let mut pos = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = sq(i, j);
            if a == 0.0 && heights[i] == heights[j] {
                return Err(Error::invalid("cloud", format!("duplicate points {i} and {j}")));
            }
            let key = pair_key(a, heights[i], heights[j]);
            let next = geometries.len();
            let slot = *slots.entry(key).or_insert_with(|| {
                geometries.push((a, heights[i], heights[j]));
                next
            });
            index[pos] = u32::try_from(slot)
                .map_err(|_| Error::invalid("cloud", "too many distinct separations"))?;
            pos += 1;
        }
    }
    drop(slots);
    let values: Vec<f64> = geometries.par_iter().map(|&(a, z, w)| eval(a, z, w)).collect();

    let self_radius: Vec<f64> = cloud.spacing().iter().map(|h| sigma * h).collect();
    let diagonal: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| self_eval(self_radius[i], heights[i]))
        .collect();

    let mut data = vec![0.0; n * n];
    let mut pos = 0;
    for i in 0..n {
        data[i * n + i] = diagonal[i];
        for j in (i + 1)..n {
            let v = values[index[pos] as usize];
            data[i * n + j] = v;
            data[j * n + i] = v;
            pos += 1;
        }
    }
    if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite kernel entry at ({}, {})",
            bad / n,
            bad % n
        )));
    }
    Ok((data, self_radius))
}

/// Squared horizontal distance between cloud points, exact on lattices.
fn squared_distance_fn(cloud: &QuadratureCloud) -> Box<dyn Fn(usize, usize) -> f64 + Sync + '_> {
    let dim = cloud.dim();
    match cloud.lattice() {
        Some(lat) => {
            let h2 = lat.step * lat.step;
            Box::new(move |i, j| {
                let (a, b) = (&lat.index[i], &lat.index[j]);
                let s: i64 = (0..dim).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum();
                s as f64 * h2
            })
        }
        None => {
            let pts = cloud.points();
            Box::new(move |i, j| {
                pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum()
            })
        }
    }
}

/// Probability weights on the points of a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weights", "measure is empty"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights", "weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weights", format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { weights })
    }

    /// Rescale nonnegative weights to total mass one.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid("weights", "total mass must be positive"));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::normalized(vec![1.0; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `∫ f dμ` for values `f` at the cloud points.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| w * f(i)).sum()
    }
}

/// Outcome of a weight solve together with its optimality certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(with = "crate::serde_float")]
    pub energy: f64,
    pub potential: Vec<f64>,
    /// `max |p_i - F|` over the support, `F` the smallest potential there.
    #[serde(with = "crate::serde_float")]
    pub frostman_gap: f64,
    /// How far any potential off the support dips below `F` (zero if none).
    #[serde(with = "crate::serde_float")]
    pub off_support_violation: f64,
    pub support_size: usize,
    pub iterations: usize,
    pub converged: bool,
    pub method: String,
    pub warnings: Vec<String>,
}

/// `wᵀ K w`
pub fn energy(w: &DiscreteMeasure, k: &KernelMatrix) -> Result<f64> {
    if w.len() != k.len() {
        return Err(Error::invalid(
            "weights",
            format!("measure has {} points, matrix has {}", w.len(), k.len()),
        ));
    }
    Ok(k.quadratic_form(w.weights()))
}

/// Capacity from an energy: `V^{-1/q}` for `q > 0`, `exp(-V)` for `q = 0`.
pub fn capacity(energy_value: f64, q: f64) -> Result<f64> {
    if q < 0.0 || !q.is_finite() {
        return Err(Error::Domain(format!("capacity needs q >= 0, got {q}")));
    }
    if q == 0.0 {
        return Ok((-energy_value).exp());
    }
    if !(energy_value > 0.0) {
        return Err(Error::Domain(format!(
            "capacity of order {q} needs a positive energy, got {energy_value}"
        )));
    }
    Ok(energy_value.powf(-1.0 / q))
}

/// Assemble and solve in one call.
pub fn equilibrium(
    cloud: &QuadratureCloud,
    spec: &KernelSpec,
    policy: DiagonalPolicy,
    opts: &SolverOptions,
) -> Result<(DiscreteMeasure, EnergyReport)> {
    let k = kernel_matrix(cloud, spec, policy)?;
    solve_weights(&k, opts)
}
