//! Small fitting helpers: log grids, least squares lines, extrapolation.

use crate::error::{Error, Result};

/// `count` log-spaced values from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max >= t_min) || !t_max.is_finite() {
        return Err(Error::invalid(
            "t_grid",
            format!("need 0 < t_min <= t_max < inf, got [{t_min}, {t_max}]"),
        ));
    }
    match count {
        0 => Err(Error::invalid("t_grid", "count must be positive")),
        1 => Ok(vec![t_min]),
        _ => {
            let (lo, hi) = (t_min.ln(), t_max.ln());
            let step = (hi - lo) / (count - 1) as f64;
            let mut grid: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
            grid[0] = t_min;
            grid[count - 1] = t_max;
            Ok(grid)
        }
    }
}

/// Least squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("fit", "need at least two paired samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit", "abscissae are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Slope of `log|y|` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|v| *v == 0.0 || !v.is_finite()) || x.iter().any(|v| *v < 0.0) {
        return Err(Error::invalid("fit", "log-log fit needs positive x and nonzero finite y"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    Ok(fit_line(&lx, &ly)?.slope)
}

/// Value at `t = 0` of the quadratic through three samples.
pub fn extrapolate_to_zero(t: [f64; 3], y: [f64; 3]) -> Result<f64> {
    for i in 0..3 {
        for j in 0..i {
            if t[i] == t[j] {
                return Err(Error::invalid("fit", "extrapolation nodes must be distinct"));
            }
        }
    }
    let mut total = 0.0;
    for i in 0..3 {
        let mut basis = 1.0;
        for j in 0..3 {
            if j != i {
                basis *= t[j] / (t[j] - t[i]);
            }
        }
        total += y[i] * basis;
    }
    Ok(total)
}
