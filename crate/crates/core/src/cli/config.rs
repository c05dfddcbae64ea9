//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::fit::log_grid;
use crate::equilibrium::{DiagonalPolicy, SolverMethod, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{ShapeKind, ShapeSpec};
use crate::kernel::{KernelParams, DEFAULT_TOL};

/// Every key a config file or flag may set.
pub const KEYS: &[&str] = &[
    "shape",
    "radius",
    "dim",
    "a",
    "b",
    "width",
    "height",
    "length",
    "inner",
    "outer",
    "path",
    "vertical",
    "center",
    "n",
    "q",
    "t",
    "tol",
    "closed_form",
    "resolution",
    "resolution2",
    "t_min",
    "t_max",
    "count",
    "large_t_min",
    "large_t_max",
    "large_count",
    "small_t_min",
    "small_t_max",
    "small_count",
    "large_t_factor",
    "sigma",
    "method",
    "frostman_tol",
    "max_iter",
    "out",
    "prefix",
    "dist",
    "x",
    "y",
    "z",
    "w",
    "sweep_max",
    "sweep_count",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key = value, found {line:?}"),
        })?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("unknown key {key:?}"),
            });
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Log-spaced thickness grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        log_grid(self.t_min, self.t_max, self.count)
    }
}

/// Explicit point pair for the `kernel` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
    pub w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub max: f64,
    pub count: usize,
}

/// Fully validated settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub shape: ShapeSpec,
    pub params: KernelParams,
    pub resolution: usize,
    pub resolution2: usize,
    pub grid: GridSpec,
    pub large_grid: Option<GridSpec>,
    pub small_grid: Option<GridSpec>,
    pub large_t_factor: f64,
    pub policy: DiagonalPolicy,
    pub solver: SolverOptions,
    pub out: Option<PathBuf>,
    pub prefix: String,
    pub pair: Option<PairSpec>,
    pub sweep: Option<SweepSpec>,
}

struct Values<'a>(&'a BTreeMap<String, String>);

impl Values<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::invalid(key, format!("not a number: {v:?}")))
            })
            .transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(key, format!("must be positive and finite, got {v}")));
        }
        Ok(v)
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.raw(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::invalid(key, format!("not a nonnegative integer: {v:?}")))
            })
            .transpose()
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(Error::invalid(key, format!("not a boolean: {v:?}"))),
        }
    }

    fn vector(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| Error::invalid(key, format!("not a list of numbers: {v:?}")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn grid(&self, prefix: &str, count_key: &str) -> Result<Option<GridSpec>> {
        let (lo, hi) = (format!("{prefix}_min"), format!("{prefix}_max"));
        let set = [lo.as_str(), hi.as_str(), count_key]
            .iter()
            .filter(|k| self.raw(k).is_some())
            .count();
        match set {
            0 => Ok(None),
            3 => {
                let g = GridSpec {
                    t_min: self.f64(&lo)?.unwrap(),
                    t_max: self.f64(&hi)?.unwrap(),
                    count: self.usize(count_key)?.unwrap(),
                };
                g.values().map_err(|e| match e {
                    Error::Invalid { message, .. } => Error::invalid(lo.clone(), message),
                    other => other,
                })?;
                Ok(Some(g))
            }
            _ => Err(Error::invalid(lo, format!("set all of {prefix}_min, {prefix}_max and {count_key}"))),
        }
    }
}

fn shape_from(v: &Values) -> Result<ShapeSpec> {
    let kind = match v.raw("shape").unwrap_or("disk") {
        "disk" => ShapeKind::Disk {
            radius: v.positive("radius", 1.0)?,
        },
        "ball" => ShapeKind::Ball {
            dim: v.usize("dim")?.unwrap_or(3),
            radius: v.positive("radius", 1.0)?,
        },
        "ellipse" => ShapeKind::Ellipse {
            a: v.positive("a", 1.0)?,
            b: v.positive("b", 0.5)?,
        },
        "rectangle" | "square" => ShapeKind::Rectangle {
            width: v.positive("width", 1.0)?,
            height: v.positive("height", v.f64_or("width", 1.0)?)?,
        },
        "segment" => ShapeKind::Segment {
            dim: v.usize("dim")?.unwrap_or(2),
            length: v.positive("length", 1.0)?,
        },
        "annulus" => ShapeKind::Annulus {
            inner: v.positive("inner", 0.5)?,
            outer: v.positive("outer", 1.0)?,
        },
        "file" | "point_cloud_file" => ShapeKind::PointCloudFile {
            path: v
                .raw("path")
                .map(PathBuf::from)
                .ok_or_else(|| Error::invalid("path", "point-cloud shapes need a path"))?,
        },
        other => return Err(Error::invalid("shape", format!("unknown shape {other:?}"))),
    };
    if let ShapeKind::Annulus { inner, outer } = kind {
        if inner >= outer {
            return Err(Error::invalid("inner", "must be smaller than outer"));
        }
    }
    if let ShapeKind::Ball { dim: 0, .. } | ShapeKind::Segment { dim: 0, .. } = kind {
        return Err(Error::invalid("dim", "must be positive"));
    }
    let mut shape = ShapeSpec::new(kind).with_vertical(v.bool("vertical", false)?);
    if let Some(c) = v.vector("center")? {
        if shape.ambient_dim().is_some_and(|d| d != c.len()) {
            return Err(Error::invalid("center", "dimension does not match the shape"));
        }
        shape = shape.with_center(c);
    }
    Ok(shape)
}

impl RunConfig {
    /// Validate a key map for `command`.
    pub fn from_map(map: &BTreeMap<String, String>, command: &str) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::invalid(k.clone(), "unknown key"));
        }
        let v = Values(map);
        let shape = shape_from(&v)?;

        let default_n = match (shape.ambient_dim(), command) {
            (_, "kernel") => 2,
            (Some(d), _) => d - usize::from(shape.vertical),
            (None, _) => 2,
        };
        let n = v.usize("n")?.unwrap_or(default_n);
        let q = v.f64_or("q", 1.0)?;
        let t = match v.raw("t") {
            Some(_) => v.f64("t")?.unwrap(),
            None => 1.0,
        };
        let params = KernelParams::new(n, q, t)
            .map_err(|e| relabel(e, "q"))?
            .with_tol(v.positive("tol", DEFAULT_TOL)?)
            .map_err(|e| relabel(e, "tol"))?
            .with_closed_form(v.bool("closed_form", true)?);

        let resolution = v.usize("resolution")?.unwrap_or(40);
        if resolution < 2 {
            return Err(Error::invalid("resolution", "must be at least 2"));
        }
        let resolution2 = v.usize("resolution2")?.unwrap_or(2 * resolution);
        if resolution2 <= resolution {
            return Err(Error::invalid("resolution2", "must exceed resolution"));
        }
        let grid = GridSpec {
            t_min: v.f64_or("t_min", 0.2)?,
            t_max: v.f64_or("t_max", 200.0)?,
            count: v.usize("count")?.unwrap_or(25),
        };
        grid.values().map_err(|e| relabel(e, "t_min"))?;

        let method = match v.raw("method").unwrap_or("auto") {
            "auto" => SolverMethod::Auto,
            "frank_wolfe" | "frank-wolfe" => SolverMethod::FrankWolfe,
            "projected_gradient" | "projected-gradient" => SolverMethod::ProjectedGradient,
            other => return Err(Error::invalid("method", format!("unknown solver {other:?}"))),
        };
        let solver = SolverOptions {
            method,
            frostman_tol: v.positive("frostman_tol", SolverOptions::default().frostman_tol)?,
            max_iter: v.usize("max_iter")?.unwrap_or(0),
            ..SolverOptions::default()
        };

        let pair = if command == "kernel" {
            Some(pair_from(&v, n)?)
        } else {
            None
        };
        let sweep = match v.usize("sweep_count")? {
            None | Some(0) => None,
            Some(count) => Some(SweepSpec {
                max: v.positive("sweep_max", 4.0)?,
                count,
            }),
        };

        Ok(RunConfig {
            shape,
            params,
            resolution,
            resolution2,
            grid,
            large_grid: v.grid("large_t", "large_count")?,
            small_grid: v.grid("small_t", "small_count")?,
            large_t_factor: v.positive("large_t_factor", 10.0)?,
            policy: DiagonalPolicy {
                sigma: v.positive("sigma", DiagonalPolicy::default().sigma)?,
            },
            solver,
            out: v.raw("out").map(PathBuf::from),
            prefix: v.raw("prefix").unwrap_or("").to_string(),
            pair,
            sweep,
        })
    }

    /// Output path for a file stem, inside `out` (default: current directory).
    pub fn output_path(&self, stem: &str) -> PathBuf {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{}{stem}", self.prefix))
    }
}

fn relabel(e: Error, field: &str) -> Error {
    match e {
        Error::Invalid { field: f, message } if f != "t_grid" => Error::Invalid { field: f, message },
        Error::Invalid { message, .. } => Error::invalid(field, message),
        Error::Domain(m) => Error::invalid(field, m),
        other => other,
    }
}

fn pair_from(v: &Values, n: usize) -> Result<PairSpec> {
    let (x, y) = match (v.vector("x")?, v.vector("y")?, v.f64("dist")?) {
        (Some(x), Some(y), None) => (x, y),
        (None, None, Some(d)) => {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::invalid("dist", "must be finite and nonnegative"));
            }
            let mut y = vec![0.0; n];
            y[0] = d;
            (vec![0.0; n], y)
        }
        (None, None, None) => return Err(Error::invalid("dist", "give --dist or both --x and --y")),
        _ => return Err(Error::invalid("dist", "give either --dist or both --x and --y")),
    };
    if x.len() != n || y.len() != n {
        return Err(Error::invalid("x", format!("points must have {n} coordinates")));
    }
    Ok(PairSpec {
        x,
        y,
        z: v.f64_or("z", 0.0)?,
        w: v.f64_or("w", 0.0)?,
    })
}
