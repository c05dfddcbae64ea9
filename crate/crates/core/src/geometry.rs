//! Compact sets and their quadrature clouds.
//!
//! Built-in shapes are discretized on a regular grid of step
//! `h = diameter / resolution`, centred on the shape. A cell contributes a
//! point at its centre when the centre lies in the shape; its weight is the
//! cell volume times the covered fraction, estimated on a `4^d` sub-grid.
//! Grid clouds remember their integer lattice coordinates so that kernel
//! matrices can reuse one kernel evaluation per distinct separation.
//!
//! A shape may be flagged `vertical`, in which case its last coordinate is
//! read as the height `z` inside the strip rather than as a horizontal axis.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::StripPoint;

const SUBSAMPLES: usize = 4;
const INSIDE_SLACK: f64 = 1e-12;

/// The kinds of compact set the toolkit knows how to discretize.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Disk { radius: f64 },
    Ball { dim: usize, radius: f64 },
    Ellipse { a: f64, b: f64 },
    Rectangle { width: f64, height: f64 },
    Segment { dim: usize, length: f64 },
    Annulus { inner: f64, outer: f64 },
    PointCloudFile { path: PathBuf },
}

/// A shape placed in space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    #[serde(flatten)]
    pub kind: ShapeKind,
    /// Centre of the shape; empty means the origin.
    #[serde(default)]
    pub center: Vec<f64>,
    /// Read the last coordinate as height in the strip.
    #[serde(default)]
    pub vertical: bool,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind) -> Self {
        ShapeSpec {
            kind,
            center: Vec::new(),
            vertical: false,
        }
    }

    pub fn disk(radius: f64) -> Self {
        Self::new(ShapeKind::Disk { radius })
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        Self::new(ShapeKind::Ball { dim, radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::new(ShapeKind::Ellipse { a, b })
    }

    pub fn rectangle(width: f64, height: f64) -> Self {
        Self::new(ShapeKind::Rectangle { width, height })
    }

    pub fn segment(dim: usize, length: f64) -> Self {
        Self::new(ShapeKind::Segment { dim, length })
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Self::new(ShapeKind::Annulus { inner, outer })
    }

    pub fn point_cloud_file(path: impl Into<PathBuf>) -> Self {
        Self::new(ShapeKind::PointCloudFile { path: path.into() })
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        self.center = center;
        self
    }

    pub fn with_vertical(mut self, vertical: bool) -> Self {
        self.vertical = vertical;
        self
    }

    /// Ambient dimension of the shape (horizontal plus vertical, if any).
    /// `None` for point-cloud files, whose dimension lives in the file.
    pub fn ambient_dim(&self) -> Option<usize> {
        match self.kind {
            ShapeKind::Disk { .. }
            | ShapeKind::Ellipse { .. }
            | ShapeKind::Rectangle { .. }
            | ShapeKind::Annulus { .. } => Some(2),
            ShapeKind::Ball { dim, .. } | ShapeKind::Segment { dim, .. } => Some(dim),
            ShapeKind::PointCloudFile { .. } => None,
        }
    }

    /// Convex bodies (full-dimensional), for which the small-thickness limit
    /// is claimed.
    pub fn is_convex_body(&self) -> bool {
        matches!(
            self.kind,
            ShapeKind::Disk { .. }
                | ShapeKind::Ball { .. }
                | ShapeKind::Ellipse { .. }
                | ShapeKind::Rectangle { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        match &self.kind {
            ShapeKind::Disk { radius } => positive("radius", *radius)?,
            ShapeKind::Ball { dim, radius } => {
                if *dim == 0 {
                    return Err(Error::invalid("dim", "must be at least 1"));
                }
                positive("radius", *radius)?
            }
            ShapeKind::Ellipse { a, b } => {
                positive("a", *a)?;
                positive("b", *b)?
            }
            ShapeKind::Rectangle { width, height } => {
                positive("width", *width)?;
                positive("height", *height)?
            }
            ShapeKind::Segment { dim, length } => {
                if *dim == 0 {
                    return Err(Error::invalid("dim", "must be at least 1"));
                }
                positive("length", *length)?
            }
            ShapeKind::Annulus { inner, outer } => {
                positive("inner", *inner)?;
                positive("outer", *outer)?;
                if inner >= outer {
                    return Err(Error::invalid("inner", "must be smaller than outer"));
                }
            }
            ShapeKind::PointCloudFile { .. } => {}
        }
        if let Some(d) = self.ambient_dim() {
            if !self.center.is_empty() && self.center.len() != d {
                return Err(Error::invalid(
                    "center",
                    format!("expected {d} coordinates, got {}", self.center.len()),
                ));
            }
            if self.vertical && d < 2 {
                return Err(Error::invalid("vertical", "needs at least two coordinates"));
            }
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("center", "coordinates must be finite"));
        }
        Ok(())
    }

    fn center_or_origin(&self, dim: usize) -> Vec<f64> {
        if self.center.is_empty() {
            vec![0.0; dim]
        } else {
            self.center.clone()
        }
    }

    /// Half-extents of the axis-aligned bounding box (relative to the centre).
    fn half_extents(&self) -> Vec<f64> {
        match self.kind {
            ShapeKind::Disk { radius } => vec![radius; 2],
            ShapeKind::Ball { dim, radius } => vec![radius; dim],
            ShapeKind::Ellipse { a, b } => vec![a, b],
            ShapeKind::Rectangle { width, height } => vec![0.5 * width, 0.5 * height],
            ShapeKind::Segment { dim, length } => {
                let mut e = vec![0.0; dim];
                e[0] = 0.5 * length;
                e
            }
            ShapeKind::Annulus { outer, .. } => vec![outer; 2],
            ShapeKind::PointCloudFile { .. } => Vec::new(),
        }
    }

    /// Diameter of a built-in shape.
    pub fn diameter(&self) -> Option<f64> {
        Some(match self.kind {
            ShapeKind::Disk { radius } | ShapeKind::Ball { radius, .. } => 2.0 * radius,
            ShapeKind::Ellipse { a, b } => 2.0 * a.max(b),
            ShapeKind::Rectangle { width, height } => width.hypot(height),
            ShapeKind::Segment { length, .. } => length,
            ShapeKind::Annulus { outer, .. } => 2.0 * outer,
            ShapeKind::PointCloudFile { .. } => return None,
        })
    }

    /// Lebesgue measure of a built-in shape in its own dimension.
    pub fn measure(&self) -> Option<f64> {
        use std::f64::consts::PI;
        Some(match self.kind {
            ShapeKind::Disk { radius } => PI * radius * radius,
            ShapeKind::Ball { dim, radius } => unit_ball_volume(dim) * radius.powi(dim as i32),
            ShapeKind::Ellipse { a, b } => PI * a * b,
            ShapeKind::Rectangle { width, height } => width * height,
            ShapeKind::Segment { length, .. } => length,
            ShapeKind::Annulus { inner, outer } => PI * (outer * outer - inner * inner),
            ShapeKind::PointCloudFile { .. } => return None,
        })
    }

    /// Membership test in local coordinates (centre at the origin).
    fn contains_local(&self, p: &[f64]) -> bool {
        let s = 1.0 + INSIDE_SLACK;
        match self.kind {
            ShapeKind::Disk { radius } | ShapeKind::Ball { radius, .. } => {
                norm2(p) <= radius * radius * s
            }
            ShapeKind::Ellipse { a, b } => (p[0] / a).powi(2) + (p[1] / b).powi(2) <= s,
            ShapeKind::Rectangle { width, height } => {
                p[0].abs() <= 0.5 * width * s && p[1].abs() <= 0.5 * height * s
            }
            ShapeKind::Segment { length, .. } => {
                p[0].abs() <= 0.5 * length * s && p[1..].iter().all(|c| c.abs() <= INSIDE_SLACK)
            }
            ShapeKind::Annulus { inner, outer } => {
                let r2 = norm2(p);
                r2 <= outer * outer * s && r2 >= inner * inner / s
            }
            ShapeKind::PointCloudFile { .. } => false,
        }
    }

    /// Whether `p` (global coordinates) lies in the shape.
    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        self.validate()?;
        let dim = self.ambient_dim().ok_or_else(|| {
            Error::invalid("kind", "membership is not defined for point-cloud files")
        })?;
        if p.len() != dim {
            return Err(Error::invalid("point", format!("expected {dim} coordinates")));
        }
        let c = self.center_or_origin(dim);
        let local: Vec<f64> = p.iter().zip(&c).map(|(a, b)| a - b).collect();
        Ok(self.contains_local(&local))
    }

    /// Euclidean projection onto the shape (global coordinates).
    pub fn project(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        let dim = self.ambient_dim().ok_or_else(|| {
            Error::invalid("kind", "projection is not defined for point-cloud files")
        })?;
        if p.len() != dim {
            return Err(Error::invalid("point", format!("expected {dim} coordinates")));
        }
        let c = self.center_or_origin(dim);
        let local: Vec<f64> = p.iter().zip(&c).map(|(a, b)| a - b).collect();
        let projected = match self.kind {
            ShapeKind::Disk { radius } | ShapeKind::Ball { radius, .. } => {
                let r = norm2(&local).sqrt();
                if r <= radius {
                    local
                } else {
                    local.iter().map(|v| v * radius / r).collect()
                }
            }
            ShapeKind::Annulus { inner, outer } => {
                let r = norm2(&local).sqrt();
                if r == 0.0 {
                    vec![inner, 0.0]
                } else {
                    let target = r.clamp(inner, outer);
                    local.iter().map(|v| v * target / r).collect()
                }
            }
            ShapeKind::Rectangle { width, height } => vec![
                local[0].clamp(-0.5 * width, 0.5 * width),
                local[1].clamp(-0.5 * height, 0.5 * height),
            ],
            ShapeKind::Segment { length, .. } => {
                let mut out = vec![0.0; dim];
                out[0] = local[0].clamp(-0.5 * length, 0.5 * length);
                out
            }
            ShapeKind::Ellipse { a, b } => project_ellipse(local[0], local[1], a, b),
            ShapeKind::PointCloudFile { .. } => unreachable!(),
        };
        Ok(projected.iter().zip(&c).map(|(a, b)| a + b).collect())
    }
}

fn norm2(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum()
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    use crate::special::gamma;
    let d = dim as f64;
    std::f64::consts::PI.powf(0.5 * d) / gamma(0.5 * d + 1.0)
}

/// Closest point of the ellipse `(x/a)^2 + (y/b)^2 <= 1` to `(x, y)`.
fn project_ellipse(x: f64, y: f64, a: f64, b: f64) -> Vec<f64> {
    if (x / a).powi(2) + (y / b).powi(2) <= 1.0 {
        return vec![x, y];
    }
    // g(λ) = (a x/(a²+λ))² + (b y/(b²+λ))² - 1 is decreasing and convex on
    // λ >= 0; its root gives the projection. Safeguarded Newton.
    let g = |l: f64| {
        let u = a * x / (a * a + l);
        let v = b * y / (b * b + l);
        u * u + v * v - 1.0
    };
    let dg = |l: f64| {
        let ea = a * a + l;
        let eb = b * b + l;
        -2.0 * (a * a * x * x / (ea * ea * ea) + b * b * y * y / (eb * eb * eb))
    };
    let mut lo = 0.0;
    let mut hi = a.max(b) * x.hypot(y);
    let mut l = 0.0;
    for _ in 0..200 {
        let val = g(l);
        if val.abs() < 1e-15 {
            break;
        }
        if val > 0.0 {
            lo = l;
        } else {
            hi = l;
        }
        let step = l - val / dg(l);
        l = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 * hi.max(1.0) {
            break;
        }
    }
    vec![a * a * x / (a * a + l), b * b * y / (b * b + l)]
}

/// Integer grid coordinates of a cloud, `p = origin + step * index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub step: f64,
    pub origin: Vec<f64>,
    pub index: Vec<Vec<i64>>,
}

/// Discretization of a compact set: points, quadrature weights and local
/// mesh sizes.
///
/// `points` holds the horizontal coordinates; `heights` the vertical ones
/// (all zero for sets in the mid-plane). Weights sum to the measure of the
/// discretized set, not to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    heights: Vec<f64>,
    weights: Vec<f64>,
    spacing: Vec<f64>,
    lattice: Option<Lattice>,
}

impl QuadratureCloud {
    /// Cloud from explicit data. `heights` may be empty for a planar cloud.
    pub fn new(
        points: Vec<Vec<f64>>,
        heights: Vec<f64>,
        weights: Vec<f64>,
        spacing: Vec<f64>,
    ) -> Result<Self> {
        let cloud = QuadratureCloud {
            dim: points.first().map_or(0, Vec::len),
            heights: if heights.is_empty() {
                vec![0.0; points.len()]
            } else {
                heights
            },
            points,
            weights,
            spacing,
            lattice: None,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    /// Cloud from points and weights, with spacing taken as the nearest
    /// neighbour distance.
    pub fn from_points(points: Vec<Vec<f64>>, heights: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let heights = if heights.is_empty() {
            vec![0.0; points.len()]
        } else {
            heights
        };
        let spacing = nearest_neighbour_distances(&points, &heights);
        Self::new(points, heights, weights, spacing)
    }

    fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n == 0 {
            return Err(Error::invalid("points", "cloud is empty"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("points", "points need at least one coordinate"));
        }
        if self.points.iter().any(|p| p.len() != self.dim) {
            return Err(Error::invalid("points", "inconsistent point dimensions"));
        }
        if self.heights.len() != n || self.weights.len() != n || self.spacing.len() != n {
            return Err(Error::invalid("weights", "heights, weights and spacing must match points"));
        }
        if self.weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights", "weights must be positive and finite"));
        }
        if self.spacing.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::invalid("spacing", "spacing must be positive and finite"));
        }
        let finite = self.points.iter().flatten().chain(&self.heights).all(|c| c.is_finite());
        if !finite {
            return Err(Error::invalid("points", "coordinates must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Horizontal dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_planar(&self) -> bool {
        self.heights.iter().all(|z| *z == 0.0)
    }

    pub fn max_abs_height(&self) -> f64 {
        self.heights.iter().fold(0.0, |m, z| m.max(z.abs()))
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().fold(0.0, |m, h| m.max(*h))
    }

    pub fn strip_point(&self, i: usize) -> StripPoint {
        StripPoint::new(self.points[i].clone(), self.heights[i])
    }

    /// Largest horizontal distance between two points.
    pub fn horizontal_diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.max(dist2(p, q));
            }
        }
        best.sqrt()
    }

    /// Homothetic copy `s·K` (points, spacing and weights rescaled).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::invalid("scale", "must be positive and finite"));
        }
        let total_dim = self.dim as i32 + if self.is_planar() { 0 } else { 1 };
        let mut out = self.clone();
        for p in &mut out.points {
            p.iter_mut().for_each(|c| *c *= s);
        }
        out.heights.iter_mut().for_each(|z| *z *= s);
        out.spacing.iter_mut().for_each(|h| *h *= s);
        let factor = s.powi(total_dim);
        out.weights.iter_mut().for_each(|w| *w *= factor);
        if let Some(l) = &mut out.lattice {
            l.step *= s;
            l.origin.iter_mut().for_each(|c| *c *= s);
        }
        Ok(out)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest_neighbour_distances(points: &[Vec<f64>], heights: &[f64]) -> Vec<f64> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let mut best = f64::INFINITY;
            for j in 0..n {
                if i != j {
                    let dz = heights[i] - heights[j];
                    let d2 = dist2(&points[i], &points[j]) + dz * dz;
                    if d2 > 0.0 {
                        best = best.min(d2);
                    }
                }
            }
            if best.is_finite() {
                best.sqrt()
            } else {
                1.0
            }
        })
        .collect()
}

/// Quadrature cloud of `shape` at `resolution` cells across its diameter.
pub fn discretize(shape: &ShapeSpec, resolution: usize) -> Result<QuadratureCloud> {
    if resolution < 2 {
        return Err(Error::invalid("resolution", "must be at least 2"));
    }
    shape.validate()?;
    let raw = match &shape.kind {
        ShapeKind::PointCloudFile { path } => return read_point_cloud(path, shape.vertical),
        ShapeKind::Segment { dim, length } => segment_cloud(shape, *dim, *length, resolution),
        _ => grid_cloud(shape, resolution),
    };
    split_vertical(raw, shape.vertical)
}

/// Cloud in full ambient coordinates before the vertical split.
struct RawCloud {
    coords: Vec<Vec<f64>>,
    weights: Vec<f64>,
    step: f64,
    origin: Vec<f64>,
    index: Vec<Vec<i64>>,
}

fn segment_cloud(shape: &ShapeSpec, dim: usize, length: f64, resolution: usize) -> RawCloud {
    let c = shape.center_or_origin(dim);
    let h = length / resolution as f64;
    let mut origin = c.clone();
    origin[0] = c[0] - 0.5 * length + 0.5 * h;
    let index: Vec<Vec<i64>> = (0..resolution as i64)
        .map(|i| {
            let mut v = vec![0; dim];
            v[0] = i;
            v
        })
        .collect();
    let coords = index.iter().map(|ix| lattice_coords(&origin, h, ix)).collect();
    RawCloud {
        coords,
        weights: vec![h; resolution],
        step: h,
        origin,
        index,
    }
}

fn lattice_coords(origin: &[f64], h: f64, index: &[i64]) -> Vec<f64> {
    origin.iter().zip(index).map(|(o, i)| o + h * *i as f64).collect()
}

fn grid_cloud(shape: &ShapeSpec, resolution: usize) -> RawCloud {
    let dim = shape.ambient_dim().expect("built-in shape");
    let c = shape.center_or_origin(dim);
    let h = shape.diameter().expect("built-in shape") / resolution as f64;
    let extents = shape.half_extents();
    let counts: Vec<i64> = extents
        .iter()
        .map(|e| ((2.0 * e / h) - 1e-9).ceil().max(1.0) as i64)
        .collect();
    let origin: Vec<f64> = c
        .iter()
        .zip(&counts)
        .map(|(ci, m)| ci - 0.5 * (*m - 1) as f64 * h)
        .collect();
    let local_origin: Vec<f64> = origin.iter().zip(&c).map(|(o, ci)| o - ci).collect();

    let sub_offsets: Vec<f64> = (0..SUBSAMPLES)
        .map(|s| ((s as f64 + 0.5) / SUBSAMPLES as f64 - 0.5) * h)
        .collect();
    let n_sub = SUBSAMPLES.pow(dim as u32);
    let cell_volume = h.powi(dim as i32);

    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut index = Vec::new();
    let mut ix = vec![0i64; dim];
    let mut local = vec![0.0; dim];
    let mut sub = vec![0.0; dim];
    loop {
        for k in 0..dim {
            local[k] = local_origin[k] + h * ix[k] as f64;
        }
        if shape.contains_local(&local) {
            let mut covered = 0usize;
            for s in 0..n_sub {
                let mut rest = s;
                for k in 0..dim {
                    sub[k] = local[k] + sub_offsets[rest % SUBSAMPLES];
                    rest /= SUBSAMPLES;
                }
                if shape.contains_local(&sub) {
                    covered += 1;
                }
            }
            // the centre is inside, so at least one sub-sample is too in
            // practice; never emit a zero weight
            let frac = (covered.max(1)) as f64 / n_sub as f64;
            coords.push(lattice_coords(&origin, h, &ix));
            weights.push(frac * cell_volume);
            index.push(ix.clone());
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == dim {
                return RawCloud {
                    coords,
                    weights,
                    step: h,
                    origin,
                    index,
                };
            }
            ix[k] += 1;
            if ix[k] < counts[k] {
                break;
            }
            ix[k] = 0;
            k += 1;
        }
    }
}

fn split_vertical(raw: RawCloud, vertical: bool) -> Result<QuadratureCloud> {
    let n = raw.coords.len();
    let (points, heights) = if vertical {
        let mut pts = Vec::with_capacity(n);
        let mut hs = Vec::with_capacity(n);
        for mut p in raw.coords {
            hs.push(p.pop().expect("vertical shapes have at least two coordinates"));
            pts.push(p);
        }
        (pts, hs)
    } else {
        (raw.coords, vec![0.0; n])
    };
    let mut cloud = QuadratureCloud::new(points, heights, raw.weights, vec![raw.step; n])?;
    cloud.lattice = Some(Lattice {
        step: raw.step,
        origin: raw.origin,
        index: raw.index,
    });
    Ok(cloud)
}

/// Parse a point-cloud file: a `dim n` header, then one point per line
/// (`n` coordinates followed by the weight); `#` starts a comment.
pub fn parse_point_cloud(text: &str, vertical: bool) -> Result<QuadratureCloud> {
    let mut dim: Option<usize> = None;
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut weights = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line_no = lineno + 1;
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        match dim {
            None => {
                let mut parts = line.split_whitespace();
                let (Some("dim"), Some(value), None) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(parse_err("expected header `dim n`".into()));
                };
                let d: usize = value
                    .parse()
                    .map_err(|_| parse_err(format!("bad dimension `{value}`")))?;
                if d == 0 || (vertical && d < 2) {
                    return Err(parse_err(format!("unsupported dimension {d}")));
                }
                dim = Some(d);
            }
            Some(d) => {
                let values: Vec<f64> = line
                    .split_whitespace()
                    .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(format!("bad number `{tok}`"))))
                    .collect::<Result<_>>()?;
                if values.len() != d + 1 {
                    return Err(parse_err(format!(
                        "expected {} values ({d} coordinates and a weight), got {}",
                        d + 1,
                        values.len()
                    )));
                }
                weights.push(values[d]);
                coords.push(values[..d].to_vec());
            }
        }
    }
    if dim.is_none() {
        return Err(Error::Parse {
            line: 0,
            message: "missing `dim n` header".into(),
        });
    }
    let (points, heights) = if vertical {
        let mut hs = Vec::with_capacity(coords.len());
        for p in &mut coords {
            hs.push(p.pop().unwrap_or(0.0));
        }
        (coords, hs)
    } else {
        let n = coords.len();
        (coords, vec![0.0; n])
    };
    QuadratureCloud::from_points(points, heights, weights)
}

pub fn read_point_cloud(path: &Path, vertical: bool) -> Result<QuadratureCloud> {
    let text = fs::read_to_string(path)?;
    parse_point_cloud(&text, vertical)
}

/// Radius `s` of the ball whose Riesz `q`-energy equals `vq_k`, given the
/// unit ball's energy `vq_unit_ball` (`V_q(sB) = s^{-q} V_q(B)`).
pub fn match_ball(vq_k: f64, vq_unit_ball: f64, q: f64) -> Result<f64> {
    if !(vq_k > 0.0) || !vq_k.is_finite() {
        return Err(Error::invalid("vq_k", "energy must be positive and finite"));
    }
    if !(vq_unit_ball > 0.0) || !vq_unit_ball.is_finite() {
        return Err(Error::invalid("vq_unit_ball", "energy must be positive and finite"));
    }
    if !(q >= 1.0) {
        return Err(Error::invalid("q", "must be at least 1"));
    }
    Ok((vq_unit_ball / vq_k).powf(1.0 / q))
}
