//! Area-bisecting chords between opposite-normal points and the point
//! reflection that turns an oval into two centrally symmetric ovals.
//!
//! The oval is the polygon of support-function nodes. A chord at a node angle
//! joins two nodes; at an angle between nodes its endpoints are interpolated
//! boundary points inserted into the polygon, so `sigma` is continuous in
//! `theta`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bonnesen::bonnesen_chain_with_tol;
use crate::curve::{shoelace, ClosedCurve};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::support::SupportFunction;

#[derive(Debug, Clone, Serialize)]
pub struct ChordCut {
    pub theta: f64,
    /// Boundary points with outward normals at `theta` and `theta + pi`.
    pub endpoints: [Vec2; 2],
    pub midpoint: Vec2,
    /// Area cut off on the side of the arc `[theta, theta + pi]`.
    pub sigma: f64,
    /// Area on the other side.
    pub sigma_complement: f64,
    /// `sigma + sigma_complement`.
    pub area: f64,
}

/// The two boundary arcs of a cut, endpoints included.
struct Arcs {
    first: Vec<Vec2>,
    second: Vec<Vec2>,
}

fn check_grid(p: &SupportFunction) -> Result<()> {
    if p.len() % 2 != 0 {
        return Err(Error::InvalidGrid("chord cuts need an even grid".into()));
    }
    Ok(())
}

/// Splits the node polygon at `theta` and `theta + pi`.
fn arcs(p: &SupportFunction, theta: f64) -> (f64, Arcs) {
    let n = p.len();
    let half = n / 2;
    let h = p.step();
    let x = theta.rem_euclid(2.0 * PI) / h;
    let nearest = x.round();
    let (theta, a, b, lo) = if (x - nearest).abs() < 1e-9 {
        let k = nearest as usize % n;
        (p.theta(k), p.node_point(k), p.node_point(k + half), k)
    } else {
        let t = x * h;
        (t, p.point_at(t), p.point_at(t + PI), x.floor() as usize)
    };
    let snapped = (x - nearest).abs() < 1e-9;
    // Interior nodes strictly inside each open arc.
    let (r1, r2) = if snapped {
        ((lo + 1)..(lo + half), (lo + half + 1)..(lo + n))
    } else {
        ((lo + 1)..(lo + half + 1), (lo + half + 1)..(lo + n + 1))
    };
    let mut first = vec![a];
    first.extend(r1.map(|k| p.node_point(k)));
    first.push(b);
    let mut second = vec![b];
    second.extend(r2.map(|k| p.node_point(k)));
    second.push(a);
    (theta, Arcs { first, second })
}

/// The chord at `theta` and the areas on either side of it.
pub fn chord_cut(p: &SupportFunction, theta: f64) -> Result<ChordCut> {
    check_grid(p)?;
    if !theta.is_finite() {
        return Err(Error::InvalidInput(format!("chord angle must be finite, got {theta}")));
    }
    let (theta, arcs) = arcs(p, theta);
    let sigma = shoelace(&arcs.first);
    let sigma_complement = shoelace(&arcs.second);
    let a = arcs.first[0];
    let b = arcs.second[0];
    Ok(ChordCut {
        theta,
        endpoints: [a, b],
        midpoint: (a + b) * 0.5,
        sigma,
        sigma_complement,
        area: sigma + sigma_complement,
    })
}

/// `sigma - area / 2`, odd under `theta -> theta + pi`.
fn imbalance(cut: &ChordCut) -> f64 {
    0.5 * (cut.sigma - cut.sigma_complement)
}

/// Finds a chord with `|sigma - A/2| <= tol A` by locating a sign change of
/// the imbalance on the node grid over `[0, pi]` and bisecting inside it.
pub fn find_bisecting_chord(p: &SupportFunction, tol: f64) -> Result<ChordCut> {
    check_grid(p)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let half = p.len() / 2;
    let first = chord_cut(p, 0.0)?;
    let target = tol * first.area;
    if imbalance(&first).abs() <= target {
        return Ok(first);
    }
    // Orient so the imbalance starts negative; it ends positive at pi.
    let sign = -imbalance(&first).signum();
    let g = |cut: &ChordCut| sign * imbalance(cut);
    let mut prev = first;
    for k in 1..=half {
        let cut = chord_cut(p, p.theta(k))?;
        if g(&cut).abs() <= target {
            return Ok(cut);
        }
        if g(&cut) > 0.0 {
            let (mut lo, mut hi) = (prev.theta, p.theta(k));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let c = chord_cut(p, mid)?;
                let gm = g(&c);
                if gm.abs() <= target {
                    return Ok(c);
                }
                if gm < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            return Err(Error::ToleranceNotMet(format!(
                "bisection stalled near theta = {lo}; tolerance {tol:e} is below grid resolution"
            )));
        }
        prev = cut;
    }
    Err(Error::ToleranceNotMet("no sign change of the chord imbalance".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrizedPair {
    pub curve1: ClosedCurve,
    pub curve2: ClosedCurve,
    pub omega0: Vec2,
    /// Largest angle between a glued edge at a junction and the original
    /// boundary edge it replaces.
    pub junction_tangent_gap: f64,
    pub areas: [f64; 2],
    pub lengths: [f64; 2],
}

impl SymmetrizedPair {
    pub fn curves(&self) -> [&ClosedCurve; 2] {
        [&self.curve1, &self.curve2]
    }

    /// `max |gamma_j + gamma_{j + m/2} - 2 omega0|` over both curves.
    pub fn symmetry_defect(&self) -> f64 {
        self.curves()
            .iter()
            .map(|c| {
                let m = c.len();
                (0..m / 2)
                    .map(|j| (c.point(j) + c.point(j + m / 2) - self.omega0 * 2.0).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Support functions of both curves about `omega0` on an `n`-node grid.
    pub fn support_functions(&self, n: usize) -> Result<[SupportFunction; 2]> {
        let f = |c: &ClosedCurve| SupportFunction::from_curve(&c.translated(-self.omega0), n);
        Ok([f(&self.curve1)?, f(&self.curve2)?])
    }
}

fn glue(arc: &[Vec2], omega0: Vec2) -> Vec<Vec2> {
    let mut pts = arc.to_vec();
    let interior = &arc[1..arc.len() - 1];
    pts.extend(interior.iter().map(|&q| omega0 * 2.0 - q));
    pts
}

fn angle_between(u: Vec2, v: Vec2) -> f64 {
    u.cross(v).atan2(u.dot(v)).abs()
}

/// Reflects each arc of the cut through the chord midpoint.
pub fn symmetrize(p: &SupportFunction, cut: &ChordCut) -> Result<SymmetrizedPair> {
    check_grid(p)?;
    let (_, arcs) = arcs(p, cut.theta);
    let scale = p.to_curve()?.diameter();
    let a = arcs.first[0];
    let b = arcs.second[0];
    if (a - cut.endpoints[0]).norm() > 1e-9 * scale || (b - cut.endpoints[1]).norm() > 1e-9 * scale {
        return Err(Error::InvalidInput("chord cut does not belong to this support function".into()));
    }
    let omega0 = cut.midpoint;
    let mut curves = Vec::with_capacity(2);
    let mut gap: f64 = 0.0;
    for (which, (arc, other)) in [(&arcs.first, &arcs.second), (&arcs.second, &arcs.first)]
        .into_iter()
        .enumerate()
    {
        let curve = ClosedCurve::new(glue(arc, omega0))
            .map_err(|_| Error::NotConvexAfterGluing { which: which + 1 })?;
        if !curve.is_convex() {
            return Err(Error::NotConvexAfterGluing { which: which + 1 });
        }
        let (start, end) = (arc[0], arc[arc.len() - 1]);
        // Leaving `end`: the glued edge reflects the first arc edge; the
        // original boundary continues along `other`.
        let glued_out = (omega0 * 2.0 - arc[1]) - end;
        let orig_out = other[1] - end;
        // Entering `start`: reflection of the last arc edge versus the
        // original edge coming from `other`.
        let glued_in = start - (omega0 * 2.0 - arc[arc.len() - 2]);
        let orig_in = start - other[other.len() - 2];
        gap = gap
            .max(angle_between(glued_out, orig_out))
            .max(angle_between(glued_in, orig_in));
        curves.push(curve);
    }
    let curve2 = curves.pop().expect("two curves");
    let curve1 = curves.pop().expect("two curves");
    Ok(SymmetrizedPair {
        areas: [curve1.signed_area(), curve2.signed_area()],
        lengths: [curve1.length(), curve2.length()],
        curve1,
        curve2,
        omega0,
        junction_tangent_gap: gap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetricShrinkerReport {
    pub asymmetry: f64,
    /// `max |1/(p + p'') - p|` over the grid.
    pub max_residual: f64,
    pub min_p: f64,
    pub max_p: f64,
    pub inradius: f64,
    pub circumradius: f64,
    pub t1: f64,
    pub t2: f64,
    /// `r <= min p <= max p <= R` within tolerance.
    pub bounds_ok: bool,
    /// `p` constant within tolerance.
    pub is_circle: bool,
}

/// For a centrally symmetric support function satisfying `1/(p + p'') = p`,
/// checks `r <= p <= R` and whether `p` is constant.
pub fn symmetric_shrinker_check(p: &SupportFunction, tol: f64) -> Result<SymmetricShrinkerReport> {
    check_grid(p)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let asymmetry = p.asymmetry();
    if asymmetry > tol {
        return Err(Error::NotSymmetric { deviation: asymmetry });
    }
    let max_residual = p
        .values()
        .iter()
        .zip(p.radius_of_curvature())
        .map(|(&v, rho)| (1.0 / rho - v).abs())
        .fold(0.0, f64::max);
    if max_residual > tol {
        return Err(Error::NotAShrinker { residual: max_residual });
    }
    let curve = p.to_curve()?;
    let slack = tol * curve.diameter();
    let rep = bonnesen_chain_with_tol(&curve, slack)?;
    let min_p = p.values().iter().copied().fold(f64::INFINITY, f64::min);
    let max_p = p.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SymmetricShrinkerReport {
        asymmetry,
        max_residual,
        min_p,
        max_p,
        inradius: rep.inradius,
        circumradius: rep.circumradius,
        t1: rep.t1,
        t2: rep.t2,
        bounds_ok: rep.inradius <= min_p + slack && max_p <= rep.circumradius + slack,
        is_circle: max_p - min_p <= tol * max_p.max(1.0),
    })
}
