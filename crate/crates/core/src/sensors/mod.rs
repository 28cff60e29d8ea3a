//! Sensor placement on a rectangle `Ω = [0,a] × [0,b]`.
//!
//! Three criteria are supported: minimise the largest sensor eccentricity
//! under a pairwise separation `delta`; maximise the triangle area when every
//! sensor must hear all of `Ω` within a range `Delta`; maximise the
//! zone-weighted triangle area over vertical fault strips. All solvers search
//! a lattice and then zoom in around the incumbent.

mod geometry;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

pub use geometry::Point;
pub use search::{
    eccentricity_field, solve_max_area, solve_minmaxmax, solve_weighted_area, FieldCell,
    SensorSolution,
};

use geometry::{clipped_area, tri_area};

/// Relative slack used when comparing a distance against a threshold.
pub(crate) const THRESHOLD_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    a: f64,
    b: f64,
}

impl Rect {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
            return param(format!(
                "rectangle sides must be positive and finite, got {width} x {height}"
            ));
        }
        Ok(Self {
            a: width,
            b: height,
        })
    }

    pub fn width(&self) -> f64 {
        self.a
    }

    pub fn height(&self) -> f64 {
        self.b
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(0.0, 0.0),
            Point::new(self.a, 0.0),
            Point::new(self.a, self.b),
            Point::new(0.0, self.b),
        ]
    }

    pub fn center(&self) -> Point {
        Point::new(self.a / 2.0, self.b / 2.0)
    }

    pub fn diagonal(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn area(&self) -> f64 {
        self.a * self.b
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.a).contains(&p.x) && (0.0..=self.b).contains(&p.y)
    }

    pub(crate) fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.a), p.y.clamp(0.0, self.b))
    }
}

/// Sensors placed inside a rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSet(Vec<Point>);

impl SensorSet {
    pub fn new(rect: &Rect, points: Vec<Point>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !rect.contains(**p)) {
            return param(format!(
                "sensor ({}, {}) lies outside the rectangle",
                p.x, p.y
            ));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, p) in self.0.iter().enumerate() {
            for q in &self.0[i + 1..] {
                best = best.min(p.dist(*q));
            }
        }
        best
    }
}

/// Consecutive vertical strips `[c_{i-1}, c_i] × [0,b]` with fault weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonePartition {
    /// Strip boundaries including `0` and `a`.
    edges: Vec<f64>,
    weights: Vec<f64>,
}

impl ZonePartition {
    /// Interior cut positions and one weight per strip. The first strip (the
    /// trailing edge) must carry the smallest weight.
    pub fn new(rect: &Rect, cuts: &[f64], weights: &[f64]) -> Result<Self> {
        let zp = Self::with_any_weights(rect, cuts, weights)?;
        let w1 = zp.weights[0];
        if zp.weights[1..].iter().any(|&w| w < w1) {
            return param(format!(
                "first strip weight {w1} must not exceed the other weights {:?}",
                &zp.weights[1..]
            ));
        }
        Ok(zp)
    }

    /// Like [`ZonePartition::new`] without the weight ordering requirement.
    pub fn with_any_weights(rect: &Rect, cuts: &[f64], weights: &[f64]) -> Result<Self> {
        if weights.len() != cuts.len() + 1 {
            return param(format!(
                "{} cuts need {} weights, got {}",
                cuts.len(),
                cuts.len() + 1,
                weights.len()
            ));
        }
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(0.0);
        edges.extend_from_slice(cuts);
        edges.push(rect.width());
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return param(format!(
                "cuts {cuts:?} must increase strictly inside (0, {})",
                rect.width()
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return param(format!("zone weights must be positive, got {weights:?}"));
        }
        Ok(Self {
            edges,
            weights: weights.to_vec(),
        })
    }

    /// `n` strips of equal width.
    pub fn equal_strips(rect: &Rect, weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        let cuts: Vec<f64> = (1..n).map(|i| rect.width() * i as f64 / n as f64).collect();
        Self::with_any_weights(rect, &cuts, weights)
    }

    pub fn cuts(&self) -> &[f64] {
        &self.edges[1..self.edges.len() - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn strips(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Lattice spacing of the first pass.
    pub resolution: f64,
    /// Number of zoom passes after the first.
    pub refinement_levels: usize,
    /// Each zoom pass divides the spacing by this factor.
    pub zoom: usize,
}

impl GridSpec {
    pub fn new(resolution: f64, refinement_levels: usize) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return param(format!(
                "grid resolution must be positive, got {resolution}"
            ));
        }
        Ok(Self {
            resolution,
            refinement_levels,
            zoom: 5,
        })
    }

    /// `min(a, b) / 200` with two 5× zoom passes.
    pub fn default_for(rect: &Rect) -> Self {
        Self {
            resolution: rect.width().min(rect.height()) / 200.0,
            refinement_levels: 2,
            zoom: 5,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0) || !self.resolution.is_finite() {
            return param(format!(
                "grid resolution must be positive, got {}",
                self.resolution
            ));
        }
        if self.zoom < 2 {
            return param("grid zoom factor must be at least 2");
        }
        Ok(())
    }
}

/// Largest distance from `q` to a point of the rectangle, reached at a corner.
pub fn eccentricity(q: Point, rect: &Rect) -> f64 {
    let dx = q.x.abs().max((rect.width() - q.x).abs());
    let dy = q.y.abs().max((rect.height() - q.y).abs());
    dx.hypot(dy)
}

/// Whether a sensor at `q` hears every point of the rectangle within `threshold`.
pub fn coverage_feasible(q: Point, rect: &Rect, threshold: f64) -> bool {
    eccentricity(q, rect) <= threshold * (1.0 + THRESHOLD_RTOL)
}

pub fn triangle_area(points: &[Point]) -> Result<f64> {
    match points {
        [a, b, c] => Ok(tri_area(*a, *b, *c)),
        _ => param(format!("triangle needs 3 points, got {}", points.len())),
    }
}

/// `(1/W) Σ w_i · area(Ω_i ∩ conv(Σ))` for a three-sensor set.
pub fn zone_weighted_value(rect: &Rect, zones: &ZonePartition, sigma: &[Point]) -> Result<f64> {
    if sigma.len() != 3 {
        return param(format!(
            "zone-weighted value needs 3 sensors, got {}",
            sigma.len()
        ));
    }
    Ok(weighted_triangle(
        rect,
        zones,
        [sigma[0], sigma[1], sigma[2]],
    ))
}

pub(crate) fn weighted_triangle(rect: &Rect, zones: &ZonePartition, t: [Point; 3]) -> f64 {
    if geometry::cross(t[0], t[1], t[2]) == 0.0 {
        return 0.0;
    }
    let weighted: f64 = zones
        .strips()
        .zip(zones.weights())
        .map(|((x0, x1), w)| w * clipped_area(&t, x0, x1, 0.0, rect.height()))
        .sum();
    weighted / zones.total_weight()
}

/// Area of each strip's share of the triangle.
pub fn strip_areas(rect: &Rect, zones: &ZonePartition, t: [Point; 3]) -> Vec<f64> {
    zones
        .strips()
        .map(|(x0, x1)| clipped_area(&t, x0, x1, 0.0, rect.height()))
        .collect()
}
