//! Minimization of `wᵀKw` over the probability simplex.
//!
//! The default pipeline first runs an active-set method on the equivalent
//! problem `min ½xᵀAx - 1ᵀx, x >= 0` with `A = K + c·11ᵀ` (the shift `c`
//! makes every entry positive and leaves the simplex minimizer unchanged);
//! each face is solved by Jacobi-preconditioned conjugate gradients, or by a
//! dense Cholesky factorization when CG stalls on a small face. If that does
//! not certify, away-step Frank–Wolfe and then accelerated projected gradient
//! continue from the best iterate. Every result carries a Frostman
//! certificate computed from the final potential `Kw`.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{dot, DiscreteMeasure, EnergyReport, KernelMatrix};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Active set, then Frank–Wolfe, then projected gradient.
    Auto,
    FrankWolfe,
    ProjectedGradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Certificate tolerance relative to the energy.
    pub frostman_tol: f64,
    /// Iteration budget for Frank–Wolfe and projected gradient
    /// (`0` picks `max(20000, 50 N)`).
    pub max_iter: usize,
    /// Relative Frank–Wolfe duality gap at which iterations stop.
    pub gap_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: SolverMethod::Auto,
            frostman_tol: 1e-8,
            max_iter: 0,
            gap_tol: 1e-10,
        }
    }
}

const ACTIVE_SET_ROUNDS: usize = 60;
const CG_RTOL: f64 = 1e-13;
const CHOLESKY_LIMIT: usize = 3000;
const REFRESH_EVERY: usize = 1000;

/// Minimize `wᵀKw` over probability vectors.
pub fn solve_weights(k: &KernelMatrix, opts: &SolverOptions) -> Result<(DiscreteMeasure, EnergyReport)> {
    let n = k.len();
    let budget = if opts.max_iter == 0 {
        (50 * n).max(20_000)
    } else {
        opts.max_iter
    };
    let mut warnings = Vec::new();
    if n == 1 {
        return finish(k, vec![1.0], 0, "trivial", opts, warnings);
    }
    let uniform = vec![1.0 / n as f64; n];
    match opts.method {
        SolverMethod::FrankWolfe => {
            let (w, it) = frank_wolfe(k, uniform, budget, opts.gap_tol, &mut warnings);
            finish(k, w, it, "frank_wolfe", opts, warnings)
        }
        SolverMethod::ProjectedGradient => {
            let (w, it) = projected_gradient(k, uniform, budget, opts, &mut warnings);
            finish(k, w, it, "projected_gradient", opts, warnings)
        }
        SolverMethod::Auto => {
            let (active, rounds) = active_set(k, opts.frostman_tol, &mut warnings);
            let mut total = rounds;
            if let Some(w) = active {
                let report = certificate(k, &w, opts.frostman_tol);
                if report.converged {
                    return finish(k, w, total, "active_set", opts, warnings);
                }
            }
            let (w, it) = frank_wolfe(k, uniform, budget, opts.gap_tol, &mut warnings);
            total += it;
            if certificate(k, &w, opts.frostman_tol).converged {
                return finish(k, w, total, "frank_wolfe", opts, warnings);
            }
            let (w, it) = projected_gradient(k, w, budget, opts, &mut warnings);
            total += it;
            finish(k, w, total, "projected_gradient", opts, warnings)
        }
    }
}

struct Certificate {
    energy: f64,
    potential: Vec<f64>,
    gap: f64,
    off_support: f64,
    support: usize,
    converged: bool,
}

fn certificate(k: &KernelMatrix, w: &[f64], tol: f64) -> Certificate {
    let potential = k.matvec(w);
    let energy = dot(w, &potential);
    let mut floor = f64::INFINITY;
    let mut top = f64::NEG_INFINITY;
    let mut support = 0;
    for (wi, pi) in w.iter().zip(&potential) {
        if *wi > 0.0 {
            support += 1;
            floor = floor.min(*pi);
            top = top.max(*pi);
        }
    }
    let lowest = potential.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = top - floor;
    let off_support = (floor - lowest).max(0.0);
    let scale = energy.abs().max(1e-6 * k.max_abs_entry());
    Certificate {
        energy,
        gap,
        off_support,
        support,
        converged: gap <= tol * scale && off_support <= tol * scale,
        potential,
    }
}

fn finish(
    k: &KernelMatrix,
    w: Vec<f64>,
    iterations: usize,
    method: &str,
    opts: &SolverOptions,
    warnings: Vec<String>,
) -> Result<(DiscreteMeasure, EnergyReport)> {
    let measure = DiscreteMeasure::normalized(w)?;
    let c = certificate(k, measure.weights(), opts.frostman_tol);
    let report = EnergyReport {
        energy: c.energy,
        potential: c.potential,
        frostman_gap: c.gap,
        off_support_violation: c.off_support,
        support_size: c.support,
        iterations,
        converged: c.converged,
        method: method.to_string(),
        warnings,
    };
    Ok((measure, report))
}

fn push_warning(warnings: &mut Vec<String>, msg: &str) {
    if !warnings.iter().any(|w| w == msg) {
        warnings.push(msg.to_string());
    }
}

/// Shift making every entry of `K + c·11ᵀ` positive.
fn positive_shift(k: &KernelMatrix) -> f64 {
    let min = k.min_entry();
    if min > 0.0 {
        0.0
    } else {
        -min + 0.1 * k.max_abs_entry().max(1.0)
    }
}

/// `(K + c·11ᵀ)_{SS} v` for `v` indexed like `set`.
fn shifted_sub_matvec(k: &KernelMatrix, c: f64, set: &[usize], full: bool, v: &[f64]) -> Vec<f64> {
    use rayon::prelude::*;
    let total: f64 = v.iter().sum();
    set.par_iter()
        .map(|&i| {
            let row = k.row(i);
            let s = if full {
                dot(row, v)
            } else {
                set.iter().zip(v).map(|(&j, vj)| row[j] * vj).sum()
            };
            s + c * total
        })
        .collect()
}

enum FaceSolve {
    Solved(Vec<f64>),
    Indefinite,
    Failed,
}

/// Solve `A_SS z = 1` by Jacobi-preconditioned CG, falling back to a dense
/// Cholesky factorization on small faces.
fn solve_face(k: &KernelMatrix, c: f64, set: &[usize], warm: Vec<f64>) -> FaceSolve {
    let m = set.len();
    let full = m == k.len();
    let diag: Vec<f64> = set.iter().map(|&i| k.get(i, i) + c).collect();
    if diag.iter().any(|d| *d <= 0.0) {
        return FaceSolve::Indefinite;
    }
    let mut x = warm;
    let ax = shifted_sub_matvec(k, c, set, full, &x);
    let mut r: Vec<f64> = ax.iter().map(|v| 1.0 - v).collect();
    let b_norm = (m as f64).sqrt();
    let mut zv: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = zv.clone();
    let mut rz = dot(&r, &zv);
    let max_iter = (m + 50).min(5000);
    let mut converged = false;
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= CG_RTOL * b_norm {
            converged = true;
            break;
        }
        let ap = shifted_sub_matvec(k, c, set, full, &p);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return FaceSolve::Indefinite;
        }
        let alpha = rz / curvature;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            zv[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &zv);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = zv[i] + beta * p[i];
        }
    }
    if converged {
        return FaceSolve::Solved(x);
    }
    if m > CHOLESKY_LIMIT {
        return FaceSolve::Failed;
    }
    let a = DMatrix::from_fn(m, m, |i, j| k.get(set[i], set[j]) + c);
    match a.cholesky() {
        Some(chol) => FaceSolve::Solved(chol.solve(&DVector::from_element(m, 1.0)).as_slice().to_vec()),
        None => FaceSolve::Indefinite,
    }
}

fn fingerprint(set: &[usize]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    set.hash(&mut h);
    h.finish()
}

/// Active-set method in `x = w / E'` coordinates. Returns normalized
/// weights when a KKT point is reached.
fn active_set(k: &KernelMatrix, tol: f64, warnings: &mut Vec<String>) -> (Option<Vec<f64>>, usize) {
    let n = k.len();
    let c = positive_shift(k);
    let mut set: Vec<usize> = (0..n).collect();
    let mut x_full = vec![1.0 / n as f64; n];
    let mut seen = HashSet::new();
    for round in 0..ACTIVE_SET_ROUNDS {
        if !seen.insert(fingerprint(&set)) {
            push_warning(warnings, "active set cycled; falling back to Frank-Wolfe");
            return (None, round);
        }
        let warm: Vec<f64> = set.iter().map(|&i| x_full[i].max(0.0)).collect();
        let z = match solve_face(k, c, &set, warm) {
            FaceSolve::Solved(z) => z,
            FaceSolve::Indefinite => {
                push_warning(warnings, "indefinite curvature on a face of the simplex");
                return (None, round);
            }
            FaceSolve::Failed => {
                push_warning(warnings, "conjugate gradients did not converge on a face");
                return (None, round);
            }
        };
        let keep: Vec<bool> = z.iter().map(|v| *v > 0.0).collect();
        if keep.iter().any(|b| !b) {
            let next: Vec<usize> = set
                .iter()
                .zip(&keep)
                .filter(|(_, k)| **k)
                .map(|(i, _)| *i)
                .collect();
            x_full.iter_mut().for_each(|v| *v = 0.0);
            for (&i, zi) in set.iter().zip(&z) {
                if *zi > 0.0 {
                    x_full[i] = *zi;
                }
            }
            if next.is_empty() {
                return (None, round + 1);
            }
            set = next;
            continue;
        }
        x_full.iter_mut().for_each(|v| *v = 0.0);
        for (&i, zi) in set.iter().zip(&z) {
            x_full[i] = *zi;
        }
        // KKT check off the face: (A x)_i >= 1
        let mass: f64 = x_full.iter().sum();
        let ax: Vec<f64> = k.matvec(&x_full).iter().map(|v| v + c * mass).collect();
        let shifted_energy = 1.0 / mass;
        let energy = shifted_energy - c;
        let scale = energy.abs().max(1e-6 * k.max_abs_entry());
        let slack = 0.1 * tol * scale / shifted_energy;
        let mut in_set = vec![false; n];
        for &i in &set {
            in_set[i] = true;
        }
        let violators: Vec<usize> = (0..n).filter(|&i| !in_set[i] && ax[i] < 1.0 - slack).collect();
        if violators.is_empty() {
            let w = x_full.iter().map(|v| v / mass).collect();
            return (Some(w), round + 1);
        }
        for i in violators {
            in_set[i] = true;
        }
        set = (0..n).filter(|&i| in_set[i]).collect();
    }
    push_warning(warnings, "active set hit its round limit");
    (None, ACTIVE_SET_ROUNDS)
}

/// Frank–Wolfe with away steps and exact line search; vertex ties go to the
/// lowest index.
fn frank_wolfe(
    k: &KernelMatrix,
    mut w: Vec<f64>,
    budget: usize,
    gap_tol: f64,
    warnings: &mut Vec<String>,
) -> (Vec<f64>, usize) {
    let n = k.len();
    let mut p = k.matvec(&w);
    let mut e = dot(&w, &p);
    let scale = k.max_abs_entry().max(f64::MIN_POSITIVE);
    let mut it = 0;
    while it < budget {
        if it > 0 && it % REFRESH_EVERY == 0 {
            p = k.matvec(&w);
            e = dot(&w, &p);
        }
        let mut s = 0;
        let mut a = usize::MAX;
        for i in 0..n {
            if p[i] < p[s] {
                s = i;
            }
            if w[i] > 0.0 && (a == usize::MAX || p[i] > p[a]) {
                a = i;
            }
        }
        let fw_gap = e - p[s];
        if fw_gap <= gap_tol * e.abs().max(1e-6 * scale) {
            break;
        }
        let away_gap = p[a] - e;
        let toward = fw_gap >= away_gap;
        let (vertex, gamma_max, dkw, dkd) = if toward {
            (s, 1.0, p[s] - e, k.get(s, s) - 2.0 * p[s] + e)
        } else {
            let wa = w[a];
            let gmax = if wa < 1.0 { wa / (1.0 - wa) } else { f64::INFINITY };
            (a, gmax, e - p[a], e - 2.0 * p[a] + k.get(a, a))
        };
        let gamma = if dkd > 0.0 {
            (-dkw / dkd).min(gamma_max)
        } else {
            push_warning(warnings, "indefinite curvature along a Frank-Wolfe direction");
            gamma_max
        };
        if !gamma.is_finite() || gamma <= 0.0 {
            break;
        }
        let col = k.row(vertex);
        if toward {
            for i in 0..n {
                w[i] *= 1.0 - gamma;
                p[i] = (1.0 - gamma) * p[i] + gamma * col[i];
            }
            w[s] += gamma;
        } else {
            for i in 0..n {
                w[i] *= 1.0 + gamma;
                p[i] = (1.0 + gamma) * p[i] - gamma * col[i];
            }
            w[a] -= gamma;
            if gamma >= gamma_max || w[a] < 0.0 {
                w[a] = 0.0;
            }
        }
        e += 2.0 * gamma * dkw + gamma * gamma * dkd;
        it += 1;
    }
    (w, it)
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cumulative += ui;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if ui - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|vi| (vi - theta).max(0.0)).collect()
}

/// Accelerated projected gradient with function-value restarts.
fn projected_gradient(
    k: &KernelMatrix,
    w0: Vec<f64>,
    budget: usize,
    opts: &SolverOptions,
    warnings: &mut Vec<String>,
) -> (Vec<f64>, usize) {
    let n = k.len();
    // largest eigenvalue by power iteration
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..60 {
        let kv = k.matvec(&v);
        let norm = dot(&kv, &kv).sqrt();
        if norm == 0.0 {
            break;
        }
        lambda = norm;
        v = kv.iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (2.0 * lambda.max(f64::MIN_POSITIVE) * 1.01);
    let mut w = project_simplex(&w0);
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut e = k.quadratic_form(&w);
    let mut it = 0;
    while it < budget {
        let g = k.matvec(&y);
        let next = project_simplex(&y.iter().zip(&g).map(|(yi, gi)| yi - 2.0 * step * gi).collect::<Vec<_>>());
        let e_next = k.quadratic_form(&next);
        it += 1;
        if e_next > e {
            // restart momentum
            y = w.clone();
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = next
            .iter()
            .zip(&w)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        t = t_next;
        w = next;
        e = e_next;
        if it % 50 == 0 && certificate(k, &w, opts.frostman_tol).converged {
            break;
        }
    }
    if it >= budget {
        push_warning(warnings, "projected gradient exhausted its iteration budget");
    }
    (w, it)
}
