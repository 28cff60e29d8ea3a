use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

use super::geometry::{convex_hull, tri_area, Point};
use super::{
    coverage_feasible, eccentricity, weighted_triangle, GridSpec, Rect, SensorSet, ZonePartition,
};

/// Number of boundary samples in the first pass of the zone-weighted search.
const WEIGHTED_BOUNDARY_SAMPLES: f64 = 120.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSolution {
    /// Sensor positions in lexicographic order.
    pub sensors: SensorSet,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldCell {
    pub x: f64,
    pub y: f64,
    pub eccentricity: f64,
}

/// Lattice covering `[x0,x1] × [y0,y1]` with spacing at most `h`, endpoints included.
fn lattice(x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> Vec<Point> {
    let nx = ((x1 - x0) / h - 1e-9).ceil().max(1.0) as usize;
    let ny = ((y1 - y0) / h - 1e-9).ceil().max(1.0) as usize;
    let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        let x = x0 + (x1 - x0) * i as f64 / nx as f64;
        for j in 0..=ny {
            pts.push(Point::new(x, y0 + (y1 - y0) * j as f64 / ny as f64));
        }
    }
    pts
}

/// Square window of half-width `half` around `c` at spacing `h`, clamped into the rectangle.
fn window(rect: &Rect, c: Point, half: f64, h: f64) -> Vec<Point> {
    let k = (half / h).round() as i64;
    let mut pts: Vec<Point> = (-k..=k)
        .flat_map(|i| (-k..=k).map(move |j| (i, j)))
        .map(|(i, j)| rect.clamp(Point::new(c.x + i as f64 * h, c.y + j as f64 * h)))
        .collect();
    pts.sort_by(Point::lex_cmp);
    pts.dedup();
    pts
}

fn sorted(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(Point::lex_cmp);
    pts
}

fn separated(pts: &[Point], delta: f64) -> bool {
    pts.iter()
        .enumerate()
        .all(|(i, p)| pts[i + 1..].iter().all(|q| p.dist(*q) >= delta))
}

/// Smallest `score` over one point per window, starting from `incumbent`.
/// Only strict improvements replace it, and combinations are visited in window order.
fn product_search<F>(
    windows: &[Vec<Point>],
    incumbent: (Vec<Point>, f64),
    mut score: F,
) -> (Vec<Point>, f64)
where
    F: FnMut(&[Point]) -> Option<f64>,
{
    let mut best = incumbent;
    let mut pick = vec![Point::default(); windows.len()];
    let mut idx = vec![0usize; windows.len()];
    if windows.iter().any(Vec::is_empty) {
        return best;
    }
    loop {
        for (slot, (w, &i)) in pick.iter_mut().zip(windows.iter().zip(&idx)) {
            *slot = w[i];
        }
        if let Some(v) = score(&pick) {
            if v < best.1 {
                best = (pick.clone(), v);
            }
        }
        // odometer increment
        let mut pos = windows.len();
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < windows[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// One sensor at a time, each moved to its best window point; repeats until stable.
fn coordinate_search<F>(
    windows: &[Vec<Point>],
    incumbent: (Vec<Point>, f64),
    mut score: F,
) -> (Vec<Point>, f64)
where
    F: FnMut(&[Point]) -> Option<f64>,
{
    let mut best = incumbent;
    for _ in 0..50 {
        let mut improved = false;
        for (slot, w) in windows.iter().enumerate() {
            let mut trial = best.0.clone();
            for &cand in w {
                trial[slot] = cand;
                if let Some(v) = score(&trial) {
                    if v < best.1 {
                        best = (trial.clone(), v);
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

fn refine<F>(windows: &[Vec<Point>], incumbent: (Vec<Point>, f64), score: F) -> (Vec<Point>, f64)
where
    F: FnMut(&[Point]) -> Option<f64>,
{
    if windows.len() <= 3 {
        product_search(windows, incumbent, score)
    } else {
        coordinate_search(windows, incumbent, score)
    }
}

fn max_ecc(rect: &Rect, pts: &[Point]) -> f64 {
    pts.iter()
        .map(|p| eccentricity(*p, rect))
        .fold(0.0, f64::max)
}

/// Places `p` sensors with pairwise distance at least `delta` so that the
/// largest sensor eccentricity is as small as possible.
///
/// The first pass visits lattice points by increasing eccentricity and stops
/// at the first point that completes a separated set together with points
/// already visited, which is optimal over the lattice.
pub fn solve_minmaxmax(
    rect: &Rect,
    p: usize,
    delta: f64,
    grid: &GridSpec,
) -> Result<SensorSolution> {
    grid.validate()?;
    if p == 0 {
        return param("need at least one sensor");
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return param(format!("separation must be positive, got {delta}"));
    }
    if p >= 2 && delta > rect.diagonal() {
        return Err(Error::Separation {
            p,
            delta,
            packed: 1,
        });
    }

    let mut pts = lattice(0.0, rect.width(), 0.0, rect.height(), grid.resolution);
    let ecc: Vec<f64> = pts.iter().map(|q| eccentricity(*q, rect)).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| ecc[i].total_cmp(&ecc[j]).then(pts[i].lex_cmp(&pts[j])));
    pts = order.iter().map(|&i| pts[i]).collect();

    let Some(found) = first_separated(&pts, p, delta) else {
        return Err(Error::Separation {
            p,
            delta,
            packed: greedy_packing(&pts, delta, p),
        });
    };
    let mut best = (found.clone(), max_ecc(rect, &found));

    let mut h = grid.resolution;
    for _ in 0..grid.refinement_levels {
        let half = h;
        h /= grid.zoom as f64;
        let windows: Vec<Vec<Point>> = best.0.iter().map(|c| window(rect, *c, half, h)).collect();
        best = refine(&windows, best, |pick| {
            separated(pick, delta).then(|| max_ecc(rect, pick))
        });
    }

    let objective = max_ecc(rect, &best.0);
    Ok(SensorSolution {
        sensors: SensorSet::new(rect, sorted(best.0))?,
        objective,
    })
}

/// Scans `pts` in order; returns the first `p`-set with pairwise distance
/// `>= delta` whose last member comes as early as possible.
fn first_separated(pts: &[Point], p: usize, delta: f64) -> Option<Vec<Point>> {
    if p == 1 {
        return pts.first().map(|q| vec![*q]);
    }
    for (t, &q) in pts.iter().enumerate() {
        let far: Vec<Point> = pts[..t]
            .iter()
            .copied()
            .filter(|x| x.dist(q) >= delta)
            .collect();
        if far.len() < p - 1 {
            continue;
        }
        let rest = match p {
            2 => Some(vec![far[0]]),
            3 => separated_pair(&far, delta),
            _ => separated_subset(&far, p - 1, delta),
        };
        if let Some(mut set) = rest {
            set.push(q);
            return Some(set);
        }
    }
    None
}

/// Some pair at distance `>= delta`, searched among hull vertices (a farthest
/// pair always lies on the hull).
fn separated_pair(pts: &[Point], delta: f64) -> Option<Vec<Point>> {
    let hull = convex_hull(pts);
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            if a.dist(*b) >= delta {
                return Some(vec![*a, *b]);
            }
        }
    }
    None
}

fn separated_subset(pts: &[Point], size: usize, delta: f64) -> Option<Vec<Point>> {
    fn dfs(pts: &[Point], start: usize, size: usize, delta: f64, acc: &mut Vec<Point>) -> bool {
        if acc.len() == size {
            return true;
        }
        for i in start..pts.len() {
            if pts.len() - i < size - acc.len() {
                return false;
            }
            if acc.iter().all(|a| a.dist(pts[i]) >= delta) {
                acc.push(pts[i]);
                if dfs(pts, i + 1, size, delta, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::with_capacity(size);
    dfs(pts, 0, size, delta, &mut acc).then_some(acc)
}

fn greedy_packing(pts: &[Point], delta: f64, cap: usize) -> usize {
    let mut chosen: Vec<Point> = Vec::new();
    for &q in pts {
        if chosen.iter().all(|c| c.dist(q) >= delta) {
            chosen.push(q);
            if chosen.len() >= cap {
                break;
            }
        }
    }
    chosen.len()
}

/// Largest triangle whose three vertices each hear the whole rectangle within `threshold`.
pub fn solve_max_area(rect: &Rect, threshold: f64, grid: &GridSpec) -> Result<SensorSolution> {
    grid.validate()?;
    if !(threshold > 0.0) || !threshold.is_finite() {
        return param(format!("range threshold must be positive, got {threshold}"));
    }
    let center = rect.center();
    if !coverage_feasible(center, rect, threshold) {
        return Err(Error::EmptyCoverage {
            threshold,
            min_threshold: eccentricity(center, rect),
        });
    }
    let mut pts: Vec<Point> = lattice(0.0, rect.width(), 0.0, rect.height(), grid.resolution)
        .into_iter()
        .filter(|q| coverage_feasible(*q, rect, threshold))
        .collect();
    pts.push(center);

    // an optimal triangle over a point set has its vertices on the hull
    let hull = convex_hull(&pts);
    let mut best = match hull.len() {
        0 | 1 => (vec![center; 3], 0.0),
        2 => (vec![hull[0], hull[1], hull[1]], 0.0),
        _ => {
            let mut best = (
                vec![hull[0], hull[1], hull[2]],
                -tri_area(hull[0], hull[1], hull[2]),
            );
            for i in 0..hull.len() {
                for j in i + 1..hull.len() {
                    for k in j + 1..hull.len() {
                        let v = -tri_area(hull[i], hull[j], hull[k]);
                        if v < best.1 {
                            best = (vec![hull[i], hull[j], hull[k]], v);
                        }
                    }
                }
            }
            best
        }
    };

    let mut h = grid.resolution;
    for _ in 0..grid.refinement_levels {
        let half = h;
        h /= grid.zoom as f64;
        let windows: Vec<Vec<Point>> = best
            .0
            .iter()
            .map(|c| {
                window(rect, *c, half, h)
                    .into_iter()
                    .filter(|q| coverage_feasible(*q, rect, threshold))
                    .collect()
            })
            .collect();
        best = refine(&windows, best, |pick| {
            Some(-tri_area(pick[0], pick[1], pick[2]))
        });
    }

    let area = tri_area(best.0[0], best.0[1], best.0[2]);
    Ok(SensorSolution {
        sensors: SensorSet::new(rect, sorted(best.0))?,
        objective: area,
    })
}

/// Point at arc length `t` along the boundary, counter-clockwise from the origin.
fn boundary_point(rect: &Rect, t: f64) -> Point {
    let (a, b) = (rect.width(), rect.height());
    let per = 2.0 * (a + b);
    let t = t.rem_euclid(per);
    if t <= a {
        Point::new(t, 0.0)
    } else if t <= a + b {
        Point::new(a, t - a)
    } else if t <= 2.0 * a + b {
        Point::new(a - (t - a - b), b)
    } else {
        Point::new(0.0, b - (t - 2.0 * a - b))
    }
}

fn boundary_param(rect: &Rect, p: Point) -> f64 {
    let (a, b) = (rect.width(), rect.height());
    if p.y == 0.0 {
        p.x
    } else if p.x == a {
        a + p.y
    } else if p.y == b {
        a + b + (a - p.x)
    } else {
        2.0 * a + b + (b - p.y)
    }
}

fn corner_params(rect: &Rect) -> [f64; 4] {
    let (a, b) = (rect.width(), rect.height());
    [0.0, a, a + b, 2.0 * a + b]
}

/// Triangle maximising the zone-weighted covered area.
///
/// Enlarging a triangle never lowers the weighted area when all weights are
/// positive, and any vertex can be pushed outward to the boundary while the
/// triangle grows, so the search runs over boundary points only.
pub fn solve_weighted_area(
    rect: &Rect,
    zones: &ZonePartition,
    grid: &GridSpec,
) -> Result<SensorSolution> {
    grid.validate()?;
    let per = 2.0 * (rect.width() + rect.height());
    let h0 = grid.resolution.max(per / WEIGHTED_BOUNDARY_SAMPLES);

    let mut params: Vec<f64> = Vec::new();
    let (a, b) = (rect.width(), rect.height());
    let corners = corner_params(rect);
    for (start, len) in [
        (corners[0], a),
        (corners[1], b),
        (corners[2], a),
        (corners[3], b),
    ] {
        let n = (len / h0 - 1e-9).ceil().max(1.0) as usize;
        params.extend((0..n).map(|i| start + len * i as f64 / n as f64));
    }
    let samples: Vec<Point> = params.iter().map(|&t| boundary_point(rect, t)).collect();

    let score = |pick: &[Point]| -weighted_triangle(rect, zones, [pick[0], pick[1], pick[2]]);
    let mut best = (vec![samples[0]; 3], 0.0);
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            for k in j + 1..samples.len() {
                let tri = [samples[i], samples[j], samples[k]];
                let v = score(&tri);
                if v < best.1 {
                    best = (tri.to_vec(), v);
                }
            }
        }
    }

    let mut h = h0;
    for _ in 0..grid.refinement_levels {
        let half = h;
        h /= grid.zoom as f64;
        let z = grid.zoom as i64;
        let windows: Vec<Vec<Point>> = best
            .0
            .iter()
            .map(|c| {
                let t = boundary_param(rect, *c);
                let mut w: Vec<Point> = (-z..=z)
                    .map(|s| boundary_point(rect, t + s as f64 * h))
                    .collect();
                for &ct in &corners {
                    let gap = (ct - t).rem_euclid(per).min((t - ct).rem_euclid(per));
                    if gap <= half {
                        w.push(boundary_point(rect, ct));
                    }
                }
                w.sort_by(Point::lex_cmp);
                w.dedup();
                w
            })
            .collect();
        best = refine(&windows, best, |pick| Some(score(pick)));
    }

    let value = weighted_triangle(rect, zones, [best.0[0], best.0[1], best.0[2]]);
    Ok(SensorSolution {
        sensors: SensorSet::new(rect, sorted(best.0))?,
        objective: value,
    })
}

/// Eccentricity sampled on a lattice of the rectangle, for plotting.
pub fn eccentricity_field(rect: &Rect, resolution: f64) -> Result<Vec<FieldCell>> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return param(format!(
            "grid resolution must be positive, got {resolution}"
        ));
    }
    Ok(lattice(0.0, rect.width(), 0.0, rect.height(), resolution)
        .into_iter()
        .map(|q| FieldCell {
            x: q.x,
            y: q.y,
            eccentricity: eccentricity(q, rect),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::triangle_area;
    use super::*;

    fn grid(res: f64, levels: usize) -> GridSpec {
        GridSpec::new(res, levels).unwrap()
    }

    #[test]
    fn lattice_includes_corners() {
        let pts = lattice(0.0, 1.0, 0.0, 0.5, 0.3);
        assert!(pts.contains(&Point::new(0.0, 0.0)));
        assert!(pts.contains(&Point::new(1.0, 0.5)));
        assert_eq!(pts.len(), 5 * 3);
    }

    #[test]
    fn boundary_parametrisation_round_trips() {
        let r = Rect::new(3.0, 1.0).unwrap();
        for t in [0.0, 0.5, 3.0, 3.5, 4.0, 5.5, 7.0, 7.9] {
            let p = boundary_point(&r, t);
            assert!((boundary_param(&r, p) - t).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn minmaxmax_square_near_center() {
        let r = Rect::new(2.0, 2.0).unwrap();
        let sol = solve_minmaxmax(&r, 3, 0.01, &grid(0.02, 2)).unwrap();
        assert!((sol.objective - 2f64.sqrt()).abs() / 2f64.sqrt() < 0.01);
        assert!(sol.sensors.min_separation() >= 0.01);
        assert_eq!(sol.sensors.len(), 3);
    }

    #[test]
    fn minmaxmax_infeasible_separation() {
        let r = Rect::new(2.0, 2.0).unwrap();
        let err = solve_minmaxmax(&r, 3, 3.0, &grid(0.1, 0)).unwrap_err();
        assert!(matches!(err, Error::Separation { p: 3, .. }));
        // two opposite corners fit, three points never do
        let err = solve_minmaxmax(&r, 3, 2.5, &grid(0.1, 0)).unwrap_err();
        assert!(matches!(err, Error::Separation { packed, .. } if packed < 3));
        assert!(solve_minmaxmax(&r, 2, 2.5, &grid(0.1, 0)).is_ok());
        assert!(solve_minmaxmax(&r, 3, 0.0, &grid(0.1, 0)).is_err());
    }

    #[test]
    fn minmaxmax_general_p() {
        let r = Rect::new(2.0, 1.0).unwrap();
        let one = solve_minmaxmax(&r, 1, 0.5, &grid(0.05, 1)).unwrap();
        assert!((one.objective - eccentricity(r.center(), &r)).abs() < 1e-9);
        let four = solve_minmaxmax(&r, 4, 0.2, &grid(0.05, 1)).unwrap();
        assert!(four.sensors.min_separation() >= 0.2);
        assert!(four.objective >= one.objective);
    }

    #[test]
    fn max_area_degenerate_and_full() {
        let r = Rect::new(2.0, 2.0).unwrap();
        let half = r.diagonal() / 2.0;
        let sol = solve_max_area(&r, half, &grid(0.05, 1)).unwrap();
        assert_eq!(sol.objective, 0.0);
        let sol = solve_max_area(&r, r.diagonal(), &grid(0.05, 1)).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        let err = solve_max_area(&r, 1.0, &grid(0.05, 1)).unwrap_err();
        match err {
            Error::EmptyCoverage { min_threshold, .. } => {
                assert!((min_threshold - half).abs() < 1e-12)
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn weighted_equal_strips() {
        let r = Rect::new(3.0, 1.0).unwrap();
        let zones = ZonePartition::new(&r, &[1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        let sol = solve_weighted_area(&r, &zones, &grid(0.05, 1)).unwrap();
        assert!((sol.objective - 0.5).abs() < 1e-9);
        assert!((triangle_area(sol.sensors.points()).unwrap() - 1.5).abs() < 1e-9);
    }

    #[test]
    fn field_has_expected_shape() {
        let r = Rect::new(1.0, 1.0).unwrap();
        let f = eccentricity_field(&r, 0.5).unwrap();
        assert_eq!(f.len(), 9);
        assert!((f[4].eccentricity - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(eccentricity_field(&r, -1.0).is_err());
    }
}
