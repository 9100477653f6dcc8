//! Verification of the contracting self-similar relation `kappa + <gamma, n> = 0`
//! (`n` the inward unit normal) on sampled curves.

pub mod ode;

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};

pub use ode::{
    classify_closed_solutions, integrate_support_ode, shoot_period, ClassificationReport,
    OdeOptions, OdeTrajectory,
};

/// Pointwise residual of the shrinker relation.
#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub residual: Vec<f64>,
    pub max_abs: f64,
}

/// `kappa_i + <gamma_i, n_i>` at every sample of a simple counter-clockwise
/// curve.
pub fn fundamental_residual(curve: &ClosedCurve) -> Result<Residuals> {
    require_ccw(curve)?;
    let fr = curve.frenet()?;
    let residual: Vec<f64> = curve
        .points()
        .iter()
        .zip(fr.normal.iter().zip(&fr.curvature))
        .map(|(g, (n, k))| k + g.dot(*n))
        .collect();
    let max_abs = residual.iter().map(|r| r.abs()).fold(0.0, f64::max);
    Ok(Residuals { residual, max_abs })
}

fn require_ccw(curve: &ClosedCurve) -> Result<()> {
    if curve.signed_area() <= 0.0 {
        return Err(Error::InvalidInput(
            "curve must be counter-clockwise (positive signed area)".into(),
        ));
    }
    Ok(())
}

/// Estimate of `C` in `kappa = C exp(|gamma|^2 / 2)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Gauge {
    /// Geometric mean of `kappa exp(-|gamma|^2/2)`.
    pub constant: f64,
    /// `max |kappa exp(-|gamma|^2/2) / C - 1|`.
    pub max_rel_dev: f64,
}

pub fn gauge_constant(curve: &ClosedCurve) -> Result<Gauge> {
    require_ccw(curve)?;
    if !curve.is_convex() {
        return Err(Error::NotConvex);
    }
    let fr = curve.frenet()?;
    let logs: Vec<f64> = curve
        .points()
        .iter()
        .zip(&fr.curvature)
        .map(|(g, &k)| {
            if k > 0.0 {
                Ok(k.ln() - 0.5 * g.norm_sq())
            } else {
                Err(Error::NotConvex)
            }
        })
        .collect::<Result<_>>()?;
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let constant = mean.exp();
    let max_rel_dev = logs
        .iter()
        .map(|l| ((l - mean).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Gauge {
        constant,
        max_rel_dev,
    })
}

/// `max |kappa' - kappa <gamma, T>|` with `'` the arclength derivative, by
/// centered differences. Vanishes on curves where the gauge is constant.
pub fn curvature_gradient_residual(curve: &ClosedCurve) -> Result<f64> {
    let fr = curve.frenet()?;
    let n = curve.len();
    let pts = curve.points();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
        let ds = pts[prev].distance(pts[i]) + pts[i].distance(pts[next]);
        let dk = (fr.curvature[next] - fr.curvature[prev]) / ds;
        let rhs = fr.curvature[i] * pts[i].dot(fr.tangent[i]);
        worst = worst.max((dk - rhs).abs());
    }
    Ok(worst)
}

/// Shrinker diagnostics. `verdict` is true when the residual, the gauge
/// deviation, `|A - pi|` and `|L - 2 pi|` are all within tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct ShrinkerReport {
    pub max_residual: f64,
    pub gauge_constant: f64,
    pub gauge_max_rel_dev: f64,
    pub area: f64,
    pub length: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

/// Bound on `|A - pi|` implied by `max |kappa + <gamma, n>| <= tol` on a
/// curve of length `length`: the area is `-1/2 int <gamma, n> ds`.
pub fn area_bound_from_residual(tol: f64, length: f64) -> f64 {
    0.5 * length * tol
}

pub fn verify_shrinker(curve: &ClosedCurve, tol: f64) -> Result<ShrinkerReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let res = fundamental_residual(curve)?;
    let gauge = gauge_constant(curve)?;
    let area = curve.signed_area();
    let length = curve.length();
    let verdict = res.max_abs <= tol
        && gauge.max_rel_dev <= tol
        && (area - PI).abs() <= tol
        && (length - TAU).abs() <= tol;
    Ok(ShrinkerReport {
        max_residual: res.max_abs,
        gauge_constant: gauge.constant,
        gauge_max_rel_dev: gauge.max_rel_dev,
        area,
        length,
        tolerance: tol,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn unit_circle_is_a_shrinker() {
        let c = shapes::circle(1024, 1.0);
        let r = verify_shrinker(&c, 1e-4).unwrap();
        assert!(r.max_residual < 1e-4);
        assert!((r.gauge_constant - (-0.5f64).exp()).abs() < 1e-4);
        assert!((r.area - PI).abs() < 1e-4);
        assert!(r.verdict);
    }

    #[test]
    fn ellipse_is_not() {
        let c = shapes::ellipse(1024, 1.5, 1.0 / 1.5);
        let r = verify_shrinker(&c, 1e-4).unwrap();
        assert!(r.max_residual > 0.1);
        assert!(!r.verdict);
    }

    #[test]
    fn off_center_circle_is_not() {
        let c = shapes::circle_at(512, 1.0, crate::Vec2::new(0.5, 0.0));
        let r = fundamental_residual(&c).unwrap();
        assert!((r.max_abs - 0.5).abs() < 1e-3);
    }

    #[test]
    fn clockwise_rejected() {
        let c = shapes::circle(64, 1.0).reversed();
        assert!(matches!(fundamental_residual(&c), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn radius_scan_residual_and_area() {
        for r in [0.9, 0.99, 1.0, 1.01, 1.1] {
            let c = shapes::circle(2048, r);
            let res = fundamental_residual(&c).unwrap();
            assert!((res.max_abs - (1.0 / r - r).abs()).abs() < 1e-5);
            let bound = area_bound_from_residual(res.max_abs, c.length());
            assert!((c.signed_area() - PI).abs() <= bound + 1e-5);
        }
    }

    #[test]
    fn gauge_and_gradient_agree() {
        let circ = shapes::circle(1024, 1.0);
        assert!(gauge_constant(&circ).unwrap().max_rel_dev < 1e-6);
        assert!(curvature_gradient_residual(&circ).unwrap() < 1e-6);
        let ell = shapes::ellipse(1024, 1.3, 0.8);
        assert!(gauge_constant(&ell).unwrap().max_rel_dev > 1e-2);
        assert!(curvature_gradient_residual(&ell).unwrap() > 1e-2);
    }
}
