//! Equal-charge point configurations minimizing the discrete energy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DiagonalPolicy, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::kernel::{self, series::PairGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointsOptions {
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the relative energy decrease stays below this.
    pub rel_tol: f64,
    pub policy: DiagonalPolicy,
}

impl Default for PointsOptions {
    fn default() -> Self {
        PointsOptions {
            seed: 7,
            max_iter: 10_000,
            rel_tol: 1e-10,
            policy: DiagonalPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointsResult {
    pub points: Vec<Vec<f64>>,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Pair kernel `k(a)` and the factor `g(a)` with `∇_x k = g(a)·(x - y)`,
/// both as functions of the squared distance.
fn pair_terms(spec: &KernelSpec, a: f64) -> (f64, f64) {
    match spec {
        KernelSpec::Riesz { s } => {
            let v = a.powf(-0.5 * s);
            (v, -s * v / a)
        }
        KernelSpec::Log => (-0.5 * a.ln(), -1.0 / a),
        KernelSpec::Strip(p) => {
            let pair = PairGeometry::planar(a);
            (
                kernel::profile_unchecked(a, p),
                -p.q() * kernel::shifted_value(&pair, p),
            )
        }
    }
}

fn self_term(spec: &KernelSpec, r: f64) -> f64 {
    match spec {
        KernelSpec::Log => -r.ln(),
        _ => pair_terms(spec, r * r).0,
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Pair part `(1/N²) Σ_{i≠j} k(x_i, x_j)`; infinite on coincident points.
fn pair_energy(points: &[Vec<f64>], spec: &KernelSpec) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = dist2(&points[i], &points[j]);
            if a == 0.0 {
                return f64::INFINITY;
            }
            total += 2.0 * pair_terms(spec, a).0;
        }
    }
    total / (n * n) as f64
}

/// Diagonal part `(1/N²) Σ_i k_ii` at `σ` times the nearest-neighbour distance.
fn self_energy(points: &[Vec<f64>], spec: &KernelSpec, sigma: f64) -> f64 {
    let n = points.len();
    let mut nearest = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let a = dist2(&points[i], &points[j]);
            nearest[i] = nearest[i].min(a);
            nearest[j] = nearest[j].min(a);
        }
    }
    nearest.iter().map(|r2| self_term(spec, sigma * r2.sqrt())).sum::<f64>() / (n * n) as f64
}

fn gradient(points: &[Vec<f64>], spec: &KernelSpec) -> Vec<Vec<f64>> {
    let n = points.len();
    let dim = points[0].len();
    let mut grad = vec![vec![0.0; dim]; n];
    let scale = 2.0 / (n * n) as f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = dist2(&points[i], &points[j]);
            let g = pair_terms(spec, a).1 * scale;
            for k in 0..dim {
                let d = g * (points[i][k] - points[j][k]);
                grad[i][k] += d;
                grad[j][k] -= d;
            }
        }
    }
    grad
}

/// Locally minimal configuration of `n` equal charges in a planar shape,
/// by projected gradient descent with backtracking from a seeded random
/// start. The descent runs on the pair energy; the reported energy adds the
/// diagonal contribution of the final configuration.
pub fn solve_points(n: usize, shape: &ShapeSpec, spec: &KernelSpec, opts: &PointsOptions) -> Result<PointsResult> {
    if n < 2 {
        return Err(Error::invalid("n", "need at least two points"));
    }
    if shape.vertical {
        return Err(Error::invalid("shape", "point configurations are planar"));
    }
    let dim = shape
        .ambient_dim()
        .ok_or_else(|| Error::invalid("shape", "point-cloud files have no projection"))?;
    if let KernelSpec::Strip(p) = spec {
        if p.n() != dim {
            return Err(Error::invalid("n", "kernel dimension does not match the shape"));
        }
        p.require_planar()?;
    }
    let diameter = shape.diameter().expect("built-in shape");
    let center = if shape.center.is_empty() {
        vec![0.0; dim]
    } else {
        shape.center.clone()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        attempts += 1;
        let candidate: Vec<f64> = center
            .iter()
            .map(|c| c + diameter * (rng.gen::<f64>() - 0.5))
            .collect();
        if shape.contains(&candidate)? || attempts > 1000 * n {
            points.push(shape.project(&candidate)?);
        }
    }

    let mut energy = pair_energy(&points, spec);
    let mut step = 0.01 * diameter;
    let mut quiet = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let grad = gradient(&points, spec);
        let gnorm = grad.iter().flatten().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm == 0.0 {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let scale = step / gnorm;
            let trial: Vec<Vec<f64>> = points
                .iter()
                .zip(&grad)
                .map(|(p, g)| {
                    let moved: Vec<f64> = p.iter().zip(g).map(|(x, gx)| x - scale * gx).collect();
                    shape.project(&moved)
                })
                .collect::<Result<_>>()?;
            let e = pair_energy(&trial, spec);
            if e < energy {
                let decrease = (energy - e) / energy.abs().max(f64::MIN_POSITIVE);
                points = trial;
                energy = e;
                step *= 1.5;
                accepted = true;
                quiet = if decrease < opts.rel_tol { quiet + 1 } else { 0 };
                break;
            }
            step *= 0.5;
        }
        if !accepted || quiet >= 5 || step < 1e-14 * diameter {
            converged = true;
            break;
        }
    }
    let energy = energy + self_energy(&points, spec, opts.policy.sigma);
    Ok(PointsResult {
        points,
        energy,
        iterations,
        converged,
    })
}
