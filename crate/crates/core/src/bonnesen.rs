//! Inradius, circumradius and Bonnesen's chain `t1 <= r <= R <= t2`, where
//! `t1 <= t2` are the roots of `pi t^2 - L t + A`.
//!
//! All quantities are those of the sample polygon, for which the chain holds
//! exactly. On a circle sampled at `n` points the polygon's isoperimetric
//! deficit separates the roots by about `2 pi / (sqrt(3) n)`.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Seed used by [`circumradius`].
pub const DEFAULT_SEED: u64 = 0x5eed;

fn ccw_convex(curve: &ClosedCurve) -> Result<ClosedCurve> {
    if !curve.is_convex() || !curve.is_simple() {
        return Err(Error::NotConvex);
    }
    Ok(if curve.signed_area() < 0.0 {
        curve.reversed()
    } else {
        curve.clone()
    })
}

/// Radius and center of the largest disk inside a convex curve of either
/// orientation.
///
/// Solves `max r` subject to `<a_i, c> + r <= b_i` for every edge with
/// outward unit normal `a_i`, by the simplex method on the dual, whose basis
/// is only three edges.
pub fn inradius(curve: &ClosedCurve) -> Result<(f64, Vec2)> {
    let curve = ccw_convex(curve)?;
    let n = curve.len();
    let mut normals = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n);
    for i in 0..n {
        let e = curve.edge(i);
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        let a = Vec2::new(e.y / len, -e.x / len);
        normals.push(a);
        offsets.push(a.dot(curve.point(i)));
    }
    Lp::new(&normals, &offsets, curve.diameter()).solve()
}

struct Lp<'a> {
    a: &'a [Vec2],
    b: &'a [f64],
    scale: f64,
}

/// Dual basis: three constraint indices, the inverse of the matrix with
/// columns `(a_x, a_y, 1)`, and the primal point `(c, r)` it determines.
struct Basis {
    idx: [usize; 3],
    inv: [[f64; 3]; 3],
    y: [f64; 3],
    center: Vec2,
    r: f64,
}

impl<'a> Lp<'a> {
    fn new(a: &'a [Vec2], b: &'a [f64], scale: f64) -> Self {
        Self { a, b, scale }
    }

    fn basis(&self, idx: [usize; 3]) -> Option<Basis> {
        let col = |i: usize| [self.a[i].x, self.a[i].y, 1.0];
        let m = [col(idx[0]), col(idx[1]), col(idx[2])];
        // m[k] is column k; build rows.
        let rows = [
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [1.0, 1.0, 1.0],
        ];
        let inv = invert3(&rows)?;
        let y = [inv[0][2], inv[1][2], inv[2][2]];
        // Primal solves rows^T (cx, cy, r) = b_B.
        let bb = [self.b[idx[0]], self.b[idx[1]], self.b[idx[2]]];
        let mut sol = [0.0; 3];
        for (j, s) in sol.iter_mut().enumerate() {
            *s = (0..3).map(|k| inv[k][j] * bb[k]).sum();
        }
        Some(Basis {
            idx,
            inv,
            y,
            center: Vec2::new(sol[0], sol[1]),
            r: sol[2],
        })
    }

    fn feasible(basis: &Basis) -> bool {
        basis.y.iter().all(|&v| v >= -1e-12)
    }

    fn initial(&self) -> Result<Basis> {
        let n = self.a.len();
        let nearest = |target: f64| {
            (0..n)
                .min_by(|&i, &j| {
                    let di = angle_gap(self.a[i].angle(), target);
                    let dj = angle_gap(self.a[j].angle(), target);
                    di.total_cmp(&dj)
                })
                .expect("polygon has edges")
        };
        let three = [nearest(0.0), nearest(TAU / 3.0), nearest(2.0 * TAU / 3.0)];
        if let Some(b) = self.basis(three).filter(Self::feasible) {
            return Ok(b);
        }
        let mut cand: Vec<usize> = (0..12).map(|k| nearest(TAU * k as f64 / 12.0)).collect();
        cand.sort_unstable();
        cand.dedup();
        for i in 0..cand.len() {
            for j in i + 1..cand.len() {
                for k in j + 1..cand.len() {
                    if let Some(b) = self.basis([cand[i], cand[j], cand[k]]).filter(Self::feasible) {
                        return Ok(b);
                    }
                }
            }
        }
        Err(Error::ToleranceNotMet("no feasible starting basis for the inradius".into()))
    }

    fn solve(&self) -> Result<(f64, Vec2)> {
        let n = self.a.len();
        let mut basis = self.initial()?;
        let eps = 1e-13 * self.scale.max(1e-300);
        for iter in 0..(20 * n + 100) {
            let slack = |j: usize| self.b[j] - self.a[j].dot(basis.center) - basis.r;
            // Dantzig's rule first, Bland's rule if it has not finished in
            // a reasonable number of pivots.
            let entering = if iter < 4 * n {
                (0..n)
                    .map(|j| (j, slack(j)))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .filter(|&(_, s)| s < -eps)
                    .map(|(j, _)| j)
            } else {
                (0..n).find(|&j| slack(j) < -eps)
            };
            let Some(q) = entering else {
                return Ok((basis.r, basis.center));
            };
            let col = [self.a[q].x, self.a[q].y, 1.0];
            let d: Vec<f64> = (0..3)
                .map(|k| (0..3).map(|j| basis.inv[k][j] * col[j]).sum())
                .collect();
            let leave = (0..3)
                .filter(|&k| d[k] > 1e-12)
                .min_by(|&k, &l| (basis.y[k] / d[k]).total_cmp(&(basis.y[l] / d[l])));
            let Some(k) = leave else {
                return Err(Error::ToleranceNotMet("inradius program is unbounded".into()));
            };
            let mut idx = basis.idx;
            idx[k] = q;
            basis = self
                .basis(idx)
                .ok_or_else(|| Error::ToleranceNotMet("singular inradius basis".into()))?;
        }
        Err(Error::ToleranceNotMet("inradius simplex did not terminate".into()))
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    Some([
        [
            c00 * inv_det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det,
        ],
        [
            c01 * inv_det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det,
        ],
        [
            c02 * inv_det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det,
        ],
    ])
}

/// Minimal enclosing circle of the samples, seeded with [`DEFAULT_SEED`].
pub fn circumradius(curve: &ClosedCurve) -> (f64, Vec2) {
    circumradius_seeded(curve, DEFAULT_SEED)
}

/// Welzl's randomized incremental minimal enclosing circle.
pub fn circumradius_seeded(curve: &ClosedCurve, seed: u64) -> (f64, Vec2) {
    let mut pts = curve.points().to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let slack = 1e-12 * curve.diameter();
    let inside = |c: &Disk, p: Vec2| c.center.distance(p) <= c.radius + slack;
    let mut c = Disk {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if inside(&c, pts[i]) {
            continue;
        }
        c = Disk {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if inside(&c, pts[j]) {
                continue;
            }
            c = Disk::two(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&c, pts[k]) {
                    c = Disk::three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    (c.radius, c.center)
}

struct Disk {
    center: Vec2,
    radius: f64,
}

impl Disk {
    fn two(a: Vec2, b: Vec2) -> Self {
        Self {
            center: (a + b) * 0.5,
            radius: 0.5 * a.distance(b),
        }
    }

    fn three(a: Vec2, b: Vec2, c: Vec2) -> Self {
        let (ab, ac) = (b - a, c - a);
        let d = 2.0 * ab.cross(ac);
        if d.abs() < 1e-300 {
            // Collinear: the widest pair spans the disk.
            return [Self::two(a, b), Self::two(a, c), Self::two(b, c)]
                .into_iter()
                .max_by(|x, y| x.radius.total_cmp(&y.radius))
                .expect("three candidates");
        }
        let (b2, c2) = (ab.norm_sq(), ac.norm_sq());
        let off = Vec2::new(ac.y * b2 - ab.y * c2, ab.x * c2 - ac.x * b2) / d;
        Self {
            center: a + off,
            radius: off.norm(),
        }
    }
}

/// Roots `t1 <= t2` of `pi t^2 - L t + A`.
pub fn bonnesen_roots(area: f64, length: f64) -> Result<(f64, f64)> {
    if !(area > 0.0) || !(length > 0.0) || !area.is_finite() || !length.is_finite() {
        return Err(Error::InvalidInput(format!(
            "area and length must be positive, got A = {area}, L = {length}"
        )));
    }
    let disc = length * length - 4.0 * PI * area;
    if disc < -1e-9 * length * length {
        return Err(Error::IsoperimetricViolation { deficit: disc });
    }
    if disc <= 0.0 {
        let t = length / TAU;
        return Ok((t, t));
    }
    let t2 = (length + disc.sqrt()) / TAU;
    Ok((area / (PI * t2), t2))
}

/// `A - L t + pi t^2`, the area of the inner parallel body at distance `t`.
pub fn inner_parallel_area(area: f64, length: f64, t: f64) -> f64 {
    area - length * t + PI * t * t
}

#[derive(Debug, Clone, Serialize)]
pub struct BonnesenReport {
    pub area: f64,
    pub length: f64,
    pub inradius: f64,
    pub circumradius: f64,
    pub t1: f64,
    pub t2: f64,
    pub chain_ok: bool,
    /// `max(r - t1, t2 - R)`; zero only for a circle.
    pub equality_gap: f64,
    #[serde(skip)]
    pub incenter: Vec2,
    #[serde(skip)]
    pub circumcenter: Vec2,
}

/// Chain check with tolerance `1e-6 * diameter`.
pub fn bonnesen_chain(curve: &ClosedCurve) -> Result<BonnesenReport> {
    bonnesen_chain_with_tol(curve, 1e-6 * curve.diameter())
}

pub fn bonnesen_chain_with_tol(curve: &ClosedCurve, tol: f64) -> Result<BonnesenReport> {
    let oriented = ccw_convex(curve)?;
    if curve.signed_area() < 0.0 {
        return Err(Error::InvalidInput(
            "curve must be counter-clockwise (positive signed area)".into(),
        ));
    }
    let area = oriented.signed_area();
    let length = oriented.length();
    let (r, incenter) = inradius(&oriented)?;
    let (big_r, circumcenter) = circumradius(&oriented);
    let (t1, t2) = bonnesen_roots(area, length)?;
    let mut chain_ok = t1 <= r + tol && r <= big_r + tol && big_r <= t2 + tol;
    if t1 < t2 {
        chain_ok &= inner_parallel_area(area, length, 0.5 * (t1 + t2)) < 0.0;
    }
    Ok(BonnesenReport {
        area,
        length,
        inradius: r,
        circumradius: big_r,
        t1,
        t2,
        chain_ok,
        equality_gap: (r - t1).max(t2 - big_r),
        incenter,
        circumcenter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn circle_radii() {
        let c = shapes::circle(1024, 1.0);
        let (r, center) = inradius(&c).unwrap();
        assert!((r - 1.0).abs() < 1e-4 && center.norm() < 1e-4);
        let (big_r, _) = circumradius(&c);
        assert!((big_r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ellipse_radii() {
        let c = shapes::ellipse(2048, 2.0, 1.0);
        let (r, _) = inradius(&c).unwrap();
        assert!((r - 1.0).abs() < 1e-3);
        let (big_r, _) = circumradius(&c);
        assert!((big_r - 2.0).abs() < 1e-6);
    }

    #[test]
    fn square_radii() {
        let sq = shapes::square(1.0);
        let (r, center) = inradius(&sq).unwrap();
        assert!((r - 0.5).abs() < 1e-12 && center.norm() < 1e-12);
        let (big_r, _) = circumradius(&sq);
        assert!((big_r - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn triangle_inradius() {
        // 3-4-5 right triangle has inradius 1.
        let t = ClosedCurve::from_xy([(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]).unwrap();
        let (r, c) = inradius(&t).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((c - Vec2::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn nonconvex_rejected() {
        assert!(matches!(inradius(&shapes::l_shape()), Err(Error::NotConvex)));
    }

    #[test]
    fn roots() {
        let (t1, t2) = bonnesen_roots(PI, TAU).unwrap();
        assert_eq!((t1, t2), (1.0, 1.0));
        let (t1, t2) = bonnesen_roots(TAU, 9.688_448_220_547_675).unwrap();
        assert!((t1 - 0.92742).abs() < 1e-5 && (t2 - 2.15650).abs() < 1e-5);
        assert!(matches!(
            bonnesen_roots(10.0, 1.0),
            Err(Error::IsoperimetricViolation { .. })
        ));
    }

    #[test]
    fn ellipse_chain() {
        let rep = bonnesen_chain(&shapes::ellipse(2048, 2.0, 1.0)).unwrap();
        assert!(rep.chain_ok);
        assert!(rep.t1 < rep.inradius && rep.circumradius < rep.t2);
    }

    #[test]
    fn orientation() {
        let c = shapes::ellipse(512, 2.0, 1.0);
        let (a, _) = inradius(&c).unwrap();
        let (b, _) = inradius(&c.reversed()).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(matches!(
            bonnesen_chain(&c.reversed()),
            Err(Error::InvalidInput(_))
        ));
    }
}
