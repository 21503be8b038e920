use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{norm, sub};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64, weight: f64) -> Self {
        Ball { center, radius, weight }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        norm(&sub(x, &self.center)) < self.radius
    }

    /// Signed distance from `x` to the sphere bounding the ball.
    pub fn distance(&self, x: &[f64]) -> f64 {
        norm(&sub(x, &self.center)) - self.radius
    }

    /// Image under x ↦ x/|x|², a ball when the origin lies outside.
    pub fn inverted(&self) -> Result<Ball> {
        let d = norm(&self.center);
        if d <= self.radius {
            return Err(Error::InsideSupport { distance: d - self.radius });
        }
        let power = (d - self.radius) * (d + self.radius);
        Ok(Ball {
            center: self.center.iter().map(|c| c / power).collect(),
            radius: self.radius / power,
            weight: self.weight,
        })
    }
}

/// Piecewise-constant density on an axis-aligned grid of cubes.
///
/// Cell `i` (a multi-index) covers `origin + spacing * [i, i + 1)`; values
/// are stored row-major with the first axis varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    origin: Vec<f64>,
    spacing: f64,
    shape: Vec<usize>,
    values: Vec<f64>,
    occupied: Vec<usize>,
}

impl Grid {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if origin.len() != shape.len() {
            return Err(Error::Schema(format!(
                "grid origin has {} coordinates but values nest {} deep",
                origin.len(),
                shape.len()
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Schema(format!("grid spacing {spacing} must be positive")));
        }
        if shape.iter().product::<usize>() != values.len() {
            return Err(Error::Schema("grid values do not match the grid shape".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Schema(format!("grid value {v} at flat index {i} is outside [0, 1]")));
        }
        let occupied = values.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, _)| i).collect();
        Ok(Grid { origin, spacing, shape, values, occupied })
    }

    /// Builds a grid by evaluating `f` at cell centres.
    pub fn sample(origin: Vec<f64>, spacing: f64, shape: Vec<usize>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let count = shape.iter().product();
        let mut values = Vec::with_capacity(count);
        let mut centre = vec![0.0; shape.len()];
        for flat in 0..count {
            let idx = unravel(flat, &shape);
            for (k, c) in centre.iter_mut().enumerate() {
                *c = origin[k] + (idx[k] as f64 + 0.5) * spacing;
            }
            values.push(f(&centre));
        }
        Grid::new(origin, spacing, shape, values)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flat indices of cells with a positive value.
    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn cell_corner(&self, flat: usize) -> Vec<f64> {
        let idx = unravel(flat, &self.shape);
        idx.iter().zip(&self.origin).map(|(&i, o)| o + i as f64 * self.spacing).collect()
    }

    /// Distance from `x` to the closed cube of cell `flat`.
    pub fn cell_distance(&self, flat: usize, x: &[f64]) -> f64 {
        let corner = self.cell_corner(flat);
        corner
            .iter()
            .zip(x)
            .map(|(&lo, &xi)| {
                let d = (lo - xi).max(xi - (lo + self.spacing)).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        let mut flat = 0;
        for (k, (&xk, &ok)) in x.iter().zip(&self.origin).enumerate() {
            let i = ((xk - ok) / self.spacing).floor();
            if i < 0.0 || i >= self.shape[k] as f64 {
                return 0.0;
            }
            flat = flat * self.shape[k] + i as usize;
        }
        self.values[flat]
    }

    fn transformed(&self, scale: f64, flip_first: bool) -> Grid {
        let mut g = self.clone();
        g.spacing = self.spacing / scale;
        g.origin = self.origin.iter().map(|o| o / scale).collect();
        if flip_first {
            let n0 = self.shape[0];
            g.origin[0] = -(self.origin[0] + n0 as f64 * self.spacing) / scale;
            let stride: usize = self.shape[1..].iter().product();
            for i in 0..n0 {
                let src = &self.values[i * stride..(i + 1) * stride];
                g.values[(n0 - 1 - i) * stride..(n0 - i) * stride].copy_from_slice(src);
            }
            g.occupied = g.values.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, _)| i).collect();
        }
        g
    }
}

pub(crate) fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
    idx
}

/// A density 0 ≤ ρ ≤ 1: weighted balls (weights add where balls overlap)
/// plus an optional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    dim: usize,
    balls: Vec<Ball>,
    grid: Option<Grid>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    dim: usize,
    #[serde(default)]
    balls: Vec<Ball>,
    #[serde(default)]
    grid: Option<GridFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    origin: Vec<f64>,
    spacing: f64,
    values: Value,
}

fn flatten_values(v: &Value, depth: usize, shape: &mut Vec<usize>, out: &mut Vec<f64>) -> Result<()> {
    match v {
        Value::Array(items) => {
            if depth == shape.len() && !out.is_empty() {
                return Err(Error::Schema(format!("grid values nest unevenly at depth {depth}")));
            } else if depth == shape.len() {
                shape.push(items.len());
            } else if shape[depth] != items.len() {
                return Err(Error::Schema(format!("grid values are ragged at depth {depth}")));
            }
            for item in items {
                flatten_values(item, depth + 1, shape, out)?;
            }
            Ok(())
        }
        Value::Number(x) if depth == shape.len() && depth > 0 => {
            out.push(x.as_f64().expect("serde_json numbers are finite"));
            Ok(())
        }
        other => Err(Error::Schema(format!("unexpected grid entry {other} at depth {depth}"))),
    }
}

impl Density {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension { dim, reason: "densities live in R^n with n >= 2" });
        }
        Ok(Density { dim, balls: Vec::new(), grid: None })
    }

    /// The characteristic function of one ball.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Density::new(center.len())?.with_ball(Ball::new(center, radius, 1.0))
    }

    pub fn with_ball(mut self, ball: Ball) -> Result<Self> {
        if ball.center.len() != self.dim {
            return Err(Error::Schema(format!("ball centre has {} coordinates, expected {}", ball.center.len(), self.dim)));
        }
        if !(ball.radius > 0.0 && ball.radius.is_finite()) {
            return Err(Error::Schema(format!("ball radius {} must be positive", ball.radius)));
        }
        if !(0.0..=1.0).contains(&ball.weight) {
            return Err(Error::Schema(format!("ball weight {} is outside [0, 1]", ball.weight)));
        }
        self.balls.push(ball);
        Ok(self)
    }

    pub fn with_grid(mut self, grid: Grid) -> Result<Self> {
        if grid.dim() != self.dim {
            return Err(Error::Schema(format!("grid dimension {} differs from density dimension {}", grid.dim(), self.dim)));
        }
        self.grid = Some(grid);
        Ok(self)
    }

    /// Parses the JSON density format and validates the bound ρ ≤ 1.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let mut density = Density::new(file.dim)?;
        for ball in file.balls {
            density = density.with_ball(ball)?;
        }
        if let Some(g) = file.grid {
            let mut shape = Vec::new();
            let mut values = Vec::new();
            flatten_values(&g.values, 0, &mut shape, &mut values)?;
            density = density.with_grid(Grid::new(g.origin, g.spacing, shape, values)?)?;
        }
        density.validate()?;
        Ok(density)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::json!({ "dim": self.dim, "balls": self.balls });
        if let Some(g) = &self.grid {
            obj["grid"] = serde_json::json!({
                "origin": g.origin,
                "spacing": g.spacing,
                "values": nest(&g.values, &g.shape),
            });
        }
        obj
    }

    /// Checks ρ ≤ 1 at sample points where pieces overlap: ball centres,
    /// the middle of every pairwise lens, and occupied grid cell centres.
    pub fn validate(&self) -> Result<()> {
        let mut probes: Vec<Vec<f64>> = self.balls.iter().map(|b| b.center.clone()).collect();
        for (i, a) in self.balls.iter().enumerate() {
            for b in &self.balls[i + 1..] {
                let d = norm(&sub(&b.center, &a.center));
                if d >= a.radius + b.radius || d == 0.0 {
                    continue;
                }
                // overlap along the centre line is [d − r_b, r_a] measured from a
                let t = 0.5 * ((d - b.radius).max(-a.radius) + a.radius.min(d + b.radius)) / d;
                probes.push(a.center.iter().zip(&b.center).map(|(p, q)| p + t * (q - p)).collect());
            }
        }
        if let Some(g) = &self.grid {
            if !self.balls.is_empty() {
                for &c in g.occupied() {
                    let centre: Vec<f64> = g.cell_corner(c).iter().map(|x| x + 0.5 * g.spacing).collect();
                    probes.push(centre);
                }
            }
        }
        for p in &probes {
            let total = self.value_at(p);
            if total > 1.0 + 1e-12 {
                return Err(Error::Schema(format!("density reaches {total} > 1 at {p:?}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.iter().all(|b| b.weight == 0.0) && self.grid.as_ref().is_none_or(|g| g.occupied().is_empty())
    }

    pub fn has_grid(&self) -> bool {
        self.grid.as_ref().is_some_and(|g| !g.occupied().is_empty())
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        let balls: f64 = self.balls.iter().filter(|b| b.contains(x)).map(|b| b.weight).sum();
        balls + self.grid.as_ref().map_or(0.0, |g| g.value_at(x))
    }

    /// Distance from `x` to supp ρ; `+∞` for the zero density.
    pub fn support_distance(&self, x: &[f64]) -> f64 {
        let balls = self.balls.iter().filter(|b| b.weight > 0.0).map(|b| b.distance(x)).fold(f64::INFINITY, f64::min);
        let grid = self
            .grid
            .as_ref()
            .map_or(f64::INFINITY, |g| g.occupied().iter().map(|&c| g.cell_distance(c, x)).fold(f64::INFINITY, f64::min));
        balls.min(grid)
    }

    /// Errors unless `x` lies strictly outside supp ρ.
    pub fn require_exterior(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::param("x", format!("point has {} coordinates, expected {}", x.len(), self.dim)));
        }
        let d = self.support_distance(x);
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::InsideSupport { distance: d })
        }
    }

    /// Centre of the bounding box of the support and the radius of the
    /// smallest sphere about it enclosing the support.
    pub fn enclosing_sphere(&self) -> Option<(Vec<f64>, f64)> {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        let mut any = false;
        for b in self.balls.iter().filter(|b| b.weight > 0.0) {
            any = true;
            for k in 0..self.dim {
                lo[k] = lo[k].min(b.center[k] - b.radius);
                hi[k] = hi[k].max(b.center[k] + b.radius);
            }
        }
        if let Some(g) = &self.grid {
            for &c in g.occupied() {
                any = true;
                let corner = g.cell_corner(c);
                for k in 0..self.dim {
                    lo[k] = lo[k].min(corner[k]);
                    hi[k] = hi[k].max(corner[k] + g.spacing);
                }
            }
        }
        if !any {
            return None;
        }
        let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut radius: f64 = 0.0;
        for b in self.balls.iter().filter(|b| b.weight > 0.0) {
            radius = radius.max(norm(&sub(&b.center, &centre)) + b.radius);
        }
        if let Some(g) = &self.grid {
            let half = 0.5 * g.spacing;
            for &c in g.occupied() {
                let mid: Vec<f64> = g.cell_corner(c).iter().map(|x| x + half).collect();
                radius = radius.max(norm(&sub(&mid, &centre)) + half * (self.dim as f64).sqrt());
            }
        }
        Some((centre, radius))
    }

    /// ρ_a(x) = ρ(a x).
    pub fn scaled(&self, a: f64) -> Density {
        Density {
            dim: self.dim,
            balls: self
                .balls
                .iter()
                .map(|b| Ball::new(b.center.iter().map(|c| c / a).collect(), b.radius / a, b.weight))
                .collect(),
            grid: self.grid.as_ref().map(|g| g.transformed(a, false)),
        }
    }

    /// ρ(−x₁, x₂, …, x_n).
    pub fn reflected(&self) -> Density {
        Density {
            dim: self.dim,
            balls: self
                .balls
                .iter()
                .map(|b| {
                    let mut c = b.center.clone();
                    c[0] = -c[0];
                    Ball::new(c, b.radius, b.weight)
                })
                .collect(),
            grid: self.grid.as_ref().map(|g| g.transformed(1.0, true)),
        }
    }

    /// ρ(x/|x|²) for ball densities.
    pub fn inverted(&self) -> Result<Density> {
        if self.has_grid() {
            return Err(Error::Degenerate("inversion is only implemented for ball densities".into()));
        }
        let balls = self.balls.iter().map(Ball::inverted).collect::<Result<_>>()?;
        Ok(Density { dim: self.dim, balls, grid: None })
    }
}

fn nest(values: &[f64], shape: &[usize]) -> Value {
    if shape.len() == 1 {
        return Value::from(values.to_vec());
    }
    let stride: usize = shape[1..].iter().product();
    Value::Array(values.chunks(stride).map(|c| nest(c, &shape[1..])).collect())
}
