//! Discrete closed plane curves.
//!
//! A [`ClosedCurve`] is an ordered loop of samples; the last sample connects
//! back to the first. Orientation is carried by the sample order and is never
//! changed implicitly: counter-clockwise curves have positive signed area,
//! positive curvature and a left normal that points inward.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{orient, Vec2};

/// Minimum sample spacing, relative to the curve diameter.
const DEGENERATE_REL: f64 = 1e-12;

/// Below this many edges the simplicity test uses the all-pairs scan.
const BRUTE_FORCE_SIMPLE_BELOW: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedCurve {
    points: Vec<Vec2>,
}

/// Per-sample tangent, left normal and signed curvature.
///
/// `normal[i]` is `tangent[i]` rotated by +pi/2, which is the inward normal
/// of a counter-clockwise curve. `dual_length[i]` is half the sum of the two
/// edges meeting at sample `i`, so `sum(curvature[i] * dual_length[i])` is the
/// total turning of the tangent.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub tangent: Vec<Vec2>,
    pub normal: Vec<Vec2>,
    pub curvature: Vec<f64>,
    pub dual_length: Vec<f64>,
}

impl FrenetData {
    pub fn total_turning(&self) -> f64 {
        self.curvature
            .iter()
            .zip(&self.dual_length)
            .map(|(k, ds)| k * ds)
            .sum()
    }
}

impl ClosedCurve {
    /// Validates and wraps an ordered sample loop. The closing point must not
    /// be repeated.
    pub fn new(points: Vec<Vec2>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TooFewPoints {
                min: 3,
                got: points.len(),
            });
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {i}")));
        }
        let diam = bbox_diagonal(&points);
        let min_gap = DEGENERATE_REL * diam;
        let n = points.len();
        for i in 0..n {
            if points[i].distance(points[(i + 1) % n]) <= min_gap {
                return Err(Error::DegenerateSegment { index: i });
            }
        }
        Ok(Self { points })
    }

    pub fn from_xy<I>(xy: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::new(xy.into_iter().map(Vec2::from).collect())
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec2> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sample `i`, with cyclic indexing.
    #[inline]
    pub fn point(&self, i: usize) -> Vec2 {
        self.points[i % self.points.len()]
    }

    /// Edge vector from sample `i` to sample `i + 1`.
    #[inline]
    pub fn edge(&self, i: usize) -> Vec2 {
        let n = self.points.len();
        self.points[(i + 1) % n] - self.points[i % n]
    }

    /// Bounding-box diagonal; the reference scale for every relative tolerance.
    pub fn diameter(&self) -> f64 {
        bbox_diagonal(&self.points)
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.edge(i).norm()).collect()
    }

    /// Sum of chord lengths.
    pub fn length(&self) -> f64 {
        (0..self.len()).map(|i| self.edge(i).norm()).sum()
    }

    /// Shoelace area, positive for counter-clockwise order.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.points)
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Vec2 {
        let o = self.points[0];
        let n = self.len();
        let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = self.points[i] - o;
            let q = self.points[(i + 1) % n] - o;
            let c = p.cross(q);
            a2 += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        o + Vec2::new(cx, cy) / (3.0 * a2)
    }

    pub fn reversed(&self) -> Self {
        let mut pts = self.points.clone();
        pts.reverse();
        Self { points: pts }
    }

    pub fn translated(&self, v: Vec2) -> Self {
        self.map_points(|p| p + v)
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_points(|p| p * s)
    }

    /// Rotation about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        self.map_points(|p| Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y))
    }

    /// Translates the curve so its area centroid sits at the origin. Returns
    /// the translated curve and the old centroid.
    pub fn recentered(&self) -> (Self, Vec2) {
        let c = self.centroid();
        (self.translated(-c), c)
    }

    fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Self {
        Self {
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Largest over smallest edge length.
    pub fn spacing_ratio(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..self.len() {
            let l = self.edge(i).norm();
            lo = lo.min(l);
            hi = hi.max(l);
        }
        hi / lo
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.len())
            .map(|i| self.edge(i).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Resamples to `m` points on the polygon with all chords equal.
    ///
    /// Sample 0 is kept. Points are first placed at equal polygon arclength,
    /// then their polygon parameters are corrected until the chords agree to
    /// 1e-13 relative; on already-uniform input the first placement is exact.
    pub fn resample_arclength(&self, m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::TooFewPoints { min: 3, got: m });
        }
        let cum = self.cumulative_length();
        let total = cum[self.len()];
        let mut params: Vec<f64> = (0..m).map(|j| total * j as f64 / m as f64).collect();
        let mut pts: Vec<Vec2> = params.iter().map(|&s| self.at_arclength(&cum, s)).collect();

        let mut chords = vec![0.0; m];
        let mut cum_chord = vec![0.0; m + 1];
        for _ in 0..200 {
            for j in 0..m {
                chords[j] = pts[(j + 1) % m].distance(pts[j]);
            }
            for j in 0..m {
                cum_chord[j + 1] = cum_chord[j] + chords[j];
            }
            let target = cum_chord[m] / m as f64;
            let worst = chords
                .iter()
                .map(|c| (c - target).abs())
                .fold(0.0, f64::max);
            if worst <= 1e-13 * target {
                break;
            }
            // Invert the piecewise-linear map parameter -> cumulative chord.
            let mut knots = params.clone();
            knots.push(total);
            let mut seg = 0;
            for (j, param) in params.iter_mut().enumerate().skip(1) {
                let want = target * j as f64;
                while seg + 1 < m && cum_chord[seg + 1] < want {
                    seg += 1;
                }
                let span = cum_chord[seg + 1] - cum_chord[seg];
                let f = if span > 0.0 {
                    (want - cum_chord[seg]) / span
                } else {
                    0.0
                };
                *param = knots[seg] + f * (knots[seg + 1] - knots[seg]);
            }
            for (p, &s) in pts.iter_mut().zip(&params) {
                *p = self.at_arclength(&cum, s);
            }
        }
        Self::new(pts)
    }

    /// Resamples to `m` points on a periodic cubic spline through the samples,
    /// equally spaced in the spline's chord-length parameter.
    ///
    /// Used by the flow to remove tangential drift: unlike
    /// [`resample_arclength`](Self::resample_arclength) it does not cut
    /// corners, so the enclosed area of a smooth curve moves only at fourth
    /// order in the spacing.
    pub fn redistribute_smooth(&self, m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::TooFewPoints { min: 3, got: m });
        }
        let cum = self.cumulative_length();
        let total = cum[self.len()];
        let xs: Vec<f64> = self.points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.y).collect();
        let sx = PeriodicSpline::new(&cum, &xs);
        let sy = PeriodicSpline::new(&cum, &ys);
        let pts = (0..m)
            .map(|j| {
                let s = total * j as f64 / m as f64;
                Vec2::new(sx.eval(s), sy.eval(s))
            })
            .collect();
        Self::new(pts)
    }

    /// Cumulative chord length, `n + 1` entries ending with the total length.
    fn cumulative_length(&self) -> Vec<f64> {
        let n = self.len();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        for i in 0..n {
            let last = cum[i];
            cum.push(last + self.edge(i).norm());
        }
        cum
    }

    fn at_arclength(&self, cum: &[f64], s: f64) -> Vec2 {
        let n = self.len();
        let total = cum[n];
        let s = s.rem_euclid(total);
        let i = cum.partition_point(|&c| c <= s).saturating_sub(1).min(n - 1);
        let len = cum[i + 1] - cum[i];
        let f = if len > 0.0 { (s - cum[i]) / len } else { 0.0 };
        self.points[i] + self.edge(i) * f
    }

    /// Tangent, left normal and signed curvature at every sample.
    ///
    /// Curvature is the turning angle between the two incident edges divided
    /// by the dual edge length, i.e. a centered difference of the edge tangent
    /// angle. It is second-order accurate on near-uniform samples.
    pub fn frenet(&self) -> Result<FrenetData> {
        let n = self.len();
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        let mut dual_length = Vec::with_capacity(n);
        let tiny = DEGENERATE_REL * self.diameter();
        for i in 0..n {
            let e_prev = self.edge(i + n - 1);
            let e_next = self.edge(i);
            let (lp, ln) = (e_prev.norm(), e_next.norm());
            if lp <= tiny || ln <= tiny {
                return Err(Error::DegenerateSegment { index: i });
            }
            let turn = e_prev.cross(e_next).atan2(e_prev.dot(e_next));
            let ds = 0.5 * (lp + ln);
            let t = e_prev / lp + e_next / ln;
            let tn = t.norm();
            if tn < 1e-12 {
                // Hairpin: the two edges fold back on each other.
                return Err(Error::DegenerateSegment { index: i });
            }
            let t = t / tn;
            tangent.push(t);
            normal.push(t.perp());
            curvature.push(turn / ds);
            dual_length.push(ds);
        }
        Ok(FrenetData {
            tangent,
            normal,
            curvature,
            dual_length,
        })
    }

    /// Exterior angle at every sample, in `(-pi, pi]`.
    pub fn turning_angles(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let a = self.edge(i + n - 1);
                let b = self.edge(i);
                a.cross(b).atan2(a.dot(b))
            })
            .collect()
    }

    /// Total tangent turning divided by 2 pi, rounded.
    pub fn turning_number(&self) -> i64 {
        let total: f64 = self.turning_angles().iter().sum();
        (total / TAU).round() as i64
    }

    /// True when every pair of consecutive edges turns the same way and the
    /// tangent turns once.
    pub fn is_convex(&self) -> bool {
        let n = self.len();
        let (mut pos, mut neg) = (false, false);
        for i in 0..n {
            let (a, b) = (self.edge(i + n - 1), self.edge(i));
            let c = a.cross(b);
            // |sin(turn)| below 1e-10 counts as straight.
            let tol = 1e-10 * a.norm() * b.norm();
            if c > tol {
                pos = true;
            } else if c < -tol {
                neg = true;
            }
            if pos && neg {
                return false;
            }
        }
        (pos || neg) && self.turning_number().abs() == 1
    }

    /// True when no two non-adjacent edges meet and no two adjacent edges
    /// fold back onto each other.
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            let a = self.edge(i + n - 1);
            let b = self.edge(i);
            if a.cross(b) == 0.0 && a.dot(b) < 0.0 {
                return false;
            }
        }
        if n <= 3 {
            return true;
        }
        if n < BRUTE_FORCE_SIMPLE_BELOW {
            self.is_simple_brute_force()
        } else {
            self.is_simple_sweep()
        }
    }

    fn segment(&self, i: usize) -> (Vec2, Vec2) {
        (self.point(i), self.point(i + 1))
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.len();
        i == j || (i + 1) % n == j || (j + 1) % n == i
    }

    pub(crate) fn is_simple_brute_force(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacent(i, j) {
                    continue;
                }
                let (a, b) = self.segment(i);
                let (c, d) = self.segment(j);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Sweep over x: segments are visited by their left end and tested only
    /// against the active segments whose x-range still overlaps.
    fn is_simple_sweep(&self) -> bool {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        let xmin = |i: usize| {
            let (a, b) = self.segment(i);
            a.x.min(b.x)
        };
        order.sort_by(|&i, &j| xmin(i).total_cmp(&xmin(j)));
        let mut active: Vec<usize> = Vec::new();
        for &i in &order {
            let (a, b) = self.segment(i);
            let left = a.x.min(b.x);
            let (ylo, yhi) = (a.y.min(b.y), a.y.max(b.y));
            active.retain(|&j| {
                let (c, d) = self.segment(j);
                c.x.max(d.x) >= left
            });
            for &j in &active {
                if self.adjacent(i, j) {
                    continue;
                }
                let (c, d) = self.segment(j);
                if c.y.max(d.y) < ylo || c.y.min(d.y) > yhi {
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
            active.push(i);
        }
        true
    }

    /// Winding number of the curve around `p`.
    pub fn winding_number(&self, p: Vec2) -> i64 {
        let n = self.len();
        let mut w = 0i64;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            if a.y <= p.y {
                if b.y > p.y && orient(a, b, p) > 0.0 {
                    w += 1;
                }
            } else if b.y <= p.y && orient(a, b, p) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    /// Euclidean distance from `p` to the polygon boundary.
    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                point_segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn bbox_diagonal(points: &[Vec2]) -> f64 {
    let (mut lo, mut hi) = (
        Vec2::new(f64::INFINITY, f64::INFINITY),
        Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (hi - lo).norm()
}

/// Shoelace area of a closed polygon, computed relative to the first vertex.
pub(crate) fn shoelace(points: &[Vec2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut s = 0.0;
    for i in 1..n - 1 {
        s += (points[i] - o).cross(points[i + 1] - o);
    }
    0.5 * s
}

pub(crate) fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching endpoints included.
pub(crate) fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Interpolating periodic cubic spline on knots `t[0..n]` with period
/// `t[n] - t[0]`; `t` carries `n + 1` entries.
struct PeriodicSpline<'a> {
    knots: &'a [f64],
    values: Vec<f64>,
    second: Vec<f64>,
}

impl<'a> PeriodicSpline<'a> {
    fn new(knots: &'a [f64], values: &[f64]) -> Self {
        let n = values.len();
        let h: Vec<f64> = (0..n).map(|i| knots[i + 1] - knots[i]).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let hp = h[(i + n - 1) % n];
            let hn = h[i];
            let yp = values[(i + n - 1) % n];
            let yn = values[(i + 1) % n];
            sub[i] = hp;
            diag[i] = 2.0 * (hp + hn);
            sup[i] = hn;
            rhs[i] = 6.0 * ((yn - values[i]) / hn - (values[i] - yp) / hp);
        }
        let second = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs);
        Self {
            knots,
            values: values.to_vec(),
            second,
        }
    }

    fn eval(&self, s: f64) -> f64 {
        let n = self.values.len();
        let t0 = self.knots[0];
        let period = self.knots[n] - t0;
        let s = t0 + (s - t0).rem_euclid(period);
        let i = self
            .knots
            .partition_point(|&k| k <= s)
            .saturating_sub(1)
            .min(n - 1);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - s) / h;
        let b = 1.0 - a;
        let j = (i + 1) % n;
        a * self.values[i]
            + b * self.values[j]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[j]) * h * h / 6.0
    }
}

/// Solves the cyclic tridiagonal system
/// `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` (indices mod n)
/// by the Sherman-Morrison correction of a plain tridiagonal solve.
pub(crate) fn solve_cyclic_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &bb, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(sub, &bb, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    fn unit_square() -> ClosedCurve {
        ClosedCurve::from_xy([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn rejects_short_and_degenerate_input() {
        assert!(matches!(
            ClosedCurve::from_xy([(0.0, 0.0), (1.0, 0.0)]),
            Err(Error::TooFewPoints { got: 2, .. })
        ));
        assert!(matches!(
            ClosedCurve::from_xy([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 1.0)]),
            Err(Error::DegenerateSegment { index: 1 })
        ));
        // Closing point repeated.
        assert!(matches!(
            ClosedCurve::from_xy([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)]),
            Err(Error::DegenerateSegment { index: 3 })
        ));
    }

    #[test]
    fn square_measurements() {
        let sq = unit_square();
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.length(), 4.0);
        assert_eq!(sq.signed_area(), 1.0);
        assert_eq!(sq.reversed().signed_area(), -1.0);
        let c = sq.centroid();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!(sq.is_convex());
        assert!(sq.is_simple());
        assert_eq!(sq.turning_number(), 1);
    }

    #[test]
    fn square_resamples_to_half_unit_chords() {
        let r = unit_square().resample_arclength(8).unwrap();
        for l in r.edge_lengths() {
            assert!((l - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn resampling_equalizes_chords_across_corners() {
        for m in [5, 6, 7, 13, 50] {
            let r = unit_square().resample_arclength(m).unwrap();
            let ls = r.edge_lengths();
            let mean = ls.iter().sum::<f64>() / m as f64;
            for l in ls {
                assert!((l - mean).abs() <= 1e-9 * mean, "m={m}");
            }
        }
    }

    #[test]
    fn resampling_nonuniform_circle() {
        let c = shapes::circle_nonuniform(1024, 1.0, 0.4);
        assert!(c.spacing_ratio() > 2.0);
        let r = c.resample_arclength(256).unwrap();
        let target = 2.0 * (PI / 256.0).sin();
        for l in r.edge_lengths() {
            assert!((l - target).abs() < 1e-6, "{l} vs {target}");
        }
    }

    #[test]
    fn resampling_uniform_input_is_identity() {
        let c = shapes::ellipse(256, 2.0, 1.0).resample_arclength(256).unwrap();
        let again = c.resample_arclength(256).unwrap();
        for (a, b) in c.points().iter().zip(again.points()) {
            assert!(a.distance(*b) < 1e-9);
        }
    }

    #[test]
    fn smooth_redistribution_preserves_area() {
        let c = shapes::circle_nonuniform(256, 1.0, 0.3);
        let r = c.redistribute_smooth(256).unwrap();
        assert!(r.spacing_ratio() < 1.01);
        for p in r.points() {
            assert!((p.norm() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn circle_length_and_area() {
        let c = shapes::circle(4096, 1.0);
        assert!((c.length() - 2.0 * PI).abs() < 1e-5);
        assert!((c.signed_area() - PI).abs() < 1e-5);
        assert!((c.reversed().signed_area() + PI).abs() < 1e-5);
    }

    #[test]
    fn ellipse_length_and_area() {
        let e = shapes::ellipse(4096, 2.0, 1.0);
        // Adaptive Simpson of the ellipse perimeter integral (see tests/oracles.rs).
        assert!((e.length() - 9.688_448_220_547_675).abs() < 1e-4);
        assert!((e.signed_area() - 2.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn circle_curvature_and_frame() {
        let c = shapes::circle(1024, 2.0);
        let f = c.frenet().unwrap();
        for i in 0..c.len() {
            assert!((f.curvature[i] - 0.5).abs() < 1e-4);
            assert!(f.tangent[i].dot(f.normal[i]).abs() < 1e-10);
            // Inward for counter-clockwise order.
            assert!(f.normal[i].dot(c.point(i)) < 0.0);
        }
        let cw = shapes::circle(1024, 1.0).reversed().frenet().unwrap();
        assert!(cw.curvature.iter().all(|k| (k + 1.0).abs() < 1e-4));
    }

    #[test]
    fn ellipse_vertex_curvature() {
        let e = shapes::ellipse(4096, 2.0, 1.0);
        let f = e.frenet().unwrap();
        // Sample 0 is (2, 0), where ab / (b^2)^{3/2} = 2.
        assert!((f.curvature[0] - 2.0).abs() < 1e-3);
        // Osculating circle through the sample and its neighbours agrees.
        let (a, b, c) = (e.point(e.len() - 1), e.point(0), e.point(1));
        let r = circumradius3(a, b, c);
        assert!((1.0 / r - f.curvature[0]).abs() < 1e-3);
    }

    fn circumradius3(a: Vec2, b: Vec2, c: Vec2) -> f64 {
        let (ab, bc, ca) = (a.distance(b), b.distance(c), c.distance(a));
        ab * bc * ca / (2.0 * orient(a, b, c).abs())
    }

    #[test]
    fn turning_numbers() {
        assert_eq!(shapes::circle(256, 1.0).turning_number(), 1);
        assert_eq!(shapes::circle(256, 1.0).reversed().turning_number(), -1);
        assert_eq!(shapes::doubled_circle(256, 1.0).turning_number(), 2);
    }

    #[test]
    fn convexity() {
        assert!(shapes::ellipse(512, 2.0, 1.0).is_convex());
        assert!(!shapes::l_shape().is_convex());
        assert!(!shapes::dented_circle(256, 0.01).is_convex());
        assert!(!shapes::doubled_circle(128, 1.0).is_convex());
    }

    #[test]
    fn dent_makes_cross_product_change_sign() {
        let c = shapes::dented_circle(256, 0.01);
        let n = c.len();
        let signs: Vec<bool> = (0..n)
            .map(|i| c.edge(i + n - 1).cross(c.edge(i)) > 0.0)
            .collect();
        assert!(signs.iter().any(|&s| s) && signs.iter().any(|&s| !s));
    }

    #[test]
    fn simplicity() {
        assert!(shapes::circle(256, 1.0).is_simple());
        assert!(unit_square().is_simple());
        assert!(!shapes::limacon(256, 0.5, 1.0).is_simple());
        assert!(!shapes::limacon(40, 0.5, 1.0).is_simple());
        assert!(!shapes::doubled_circle(128, 1.0).is_simple());
        assert!(shapes::l_shape().is_simple());
    }

    #[test]
    fn sweep_agrees_with_brute_force() {
        for c in [
            shapes::limacon(300, 0.5, 1.0),
            shapes::limacon(300, 1.2, 1.0),
            shapes::ellipse(300, 3.0, 0.2),
            shapes::doubled_circle(150, 1.0),
        ] {
            assert_eq!(c.is_simple(), c.is_simple_brute_force());
        }
    }

    #[test]
    fn winding_and_distance() {
        let c = shapes::circle(512, 1.0);
        assert_eq!(c.winding_number(Vec2::ZERO), 1);
        assert_eq!(c.reversed().winding_number(Vec2::ZERO), -1);
        assert_eq!(c.winding_number(Vec2::new(2.0, 0.0)), 0);
        assert!((c.distance_to_boundary(Vec2::ZERO) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn cyclic_tridiagonal_matches_dense_solve() {
        let n = 6;
        let sub = [1.0, 0.5, 0.3, 0.2, 0.7, 0.4];
        let diag = [4.0, 3.5, 5.0, 4.2, 3.9, 4.4];
        let sup = [0.6, 0.2, 0.9, 0.1, 0.3, 0.8];
        let rhs = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
        let x = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs);
        for i in 0..n {
            let r = sub[i] * x[(i + n - 1) % n] + diag[i] * x[i] + sup[i] * x[(i + 1) % n];
            assert!((r - rhs[i]).abs() < 1e-12);
        }
    }
}
