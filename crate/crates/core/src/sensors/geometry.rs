use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub(crate) fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

/// Twice the signed area of `abc`; positive when counter-clockwise.
#[inline]
pub(crate) fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

#[inline]
pub(crate) fn tri_area(a: Point, b: Point, c: Point) -> f64 {
    cross(a, b, c).abs() / 2.0
}

/// Shoelace area of a simple polygon, orientation-free.
pub(crate) fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        twice += p.x * q.y - q.x * p.y;
    }
    twice.abs() / 2.0
}

/// Which side of an axis-aligned line to keep.
#[derive(Debug, Clone, Copy)]
pub(crate) enum HalfPlane {
    XAtLeast(f64),
    XAtMost(f64),
    YAtLeast(f64),
    YAtMost(f64),
}

impl HalfPlane {
    #[inline]
    fn inside(self, p: Point) -> bool {
        match self {
            Self::XAtLeast(v) => p.x >= v,
            Self::XAtMost(v) => p.x <= v,
            Self::YAtLeast(v) => p.y >= v,
            Self::YAtMost(v) => p.y <= v,
        }
    }

    /// Crossing of segment `pq` with the boundary line.
    #[inline]
    fn intersect(self, p: Point, q: Point) -> Point {
        match self {
            Self::XAtLeast(v) | Self::XAtMost(v) => {
                let t = (v - p.x) / (q.x - p.x);
                Point::new(v, p.y + t * (q.y - p.y))
            }
            Self::YAtLeast(v) | Self::YAtMost(v) => {
                let t = (v - p.y) / (q.y - p.y);
                Point::new(p.x + t * (q.x - p.x), v)
            }
        }
    }
}

/// One Sutherland–Hodgman pass; `out` receives the clipped polygon.
pub(crate) fn clip(poly: &[Point], plane: HalfPlane, out: &mut Vec<Point>) {
    out.clear();
    let Some(&last) = poly.last() else { return };
    let mut prev = last;
    let mut prev_in = plane.inside(prev);
    for &cur in poly {
        let cur_in = plane.inside(cur);
        if cur_in {
            if !prev_in {
                out.push(plane.intersect(prev, cur));
            }
            out.push(cur);
        } else if prev_in {
            out.push(plane.intersect(prev, cur));
        }
        prev = cur;
        prev_in = cur_in;
    }
}

/// Area of `poly ∩ [x0,x1]×[y0,y1]`.
pub(crate) fn clipped_area(poly: &[Point], x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let mut a = poly.to_vec();
    let mut b = Vec::with_capacity(poly.len() + 4);
    for plane in [
        HalfPlane::XAtLeast(x0),
        HalfPlane::XAtMost(x1),
        HalfPlane::YAtLeast(y0),
        HalfPlane::YAtMost(y1),
    ] {
        clip(&a, plane, &mut b);
        std::mem::swap(&mut a, &mut b);
        if a.is_empty() {
            return 0.0;
        }
    }
    polygon_area(&a)
}

/// Andrew's monotone chain. Counter-clockwise, collinear points dropped.
pub(crate) fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(Point::lex_cmp);
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_square_by_strip() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        assert!((clipped_area(&sq, 0.5, 1.0, 0.0, 2.0) - 1.0).abs() < 1e-12);
        assert_eq!(clipped_area(&sq, 3.0, 4.0, 0.0, 2.0), 0.0);
        assert_eq!(polygon_area(&sq), 4.0);
    }

    #[test]
    fn hull_of_grid_is_its_corners() {
        let pts: Vec<Point> = (0..5)
            .flat_map(|i| (0..4).map(move |j| Point::new(i as f64, j as f64)))
            .collect();
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert_eq!(polygon_area(&hull), 12.0);
    }

    #[test]
    fn hull_of_collinear_points() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
        ];
        assert_eq!(convex_hull(&pts).len(), 2);
    }
}
