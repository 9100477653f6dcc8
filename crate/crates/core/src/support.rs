//! Polar tangential coordinates for ovals.
//!
//! An oval is described by its support function `p(theta)`, the signed
//! distance from the origin to the tangent line whose outward normal is
//! `(cos theta, sin theta)`. The boundary point with that normal is
//! `p u + p' u_perp`, the radius of curvature there is `p + p''`, and the
//! length is the integral of `p`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::shapes::TrigSupport;

pub const MIN_GRID: usize = 16;

/// How `p'` and `p''` are obtained from the grid samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeMode {
    /// Second-order centered differences on the periodic grid.
    #[default]
    Centered,
    /// Exact differentiation of the trigonometric interpolant.
    Spectral,
}

/// Samples of a support function on the uniform grid `theta_k = 2 pi k / N`.
///
/// Construction enforces an even grid of at least 16 nodes, `p > 0` (origin
/// strictly inside) and `p + p'' > 0` (strict convexity).
#[derive(Debug, Clone)]
pub struct SupportFunction {
    values: Vec<f64>,
    mode: DerivativeMode,
    dp: Vec<f64>,
    ddp: Vec<f64>,
    /// Scaled DFT coefficients, kept in spectral mode for interpolation.
    spectrum: Option<Arc<Vec<Complex64>>>,
}

/// `w(theta) = p(theta) + p(theta + pi)` on the half grid `[0, pi)`.
#[derive(Debug, Clone, Serialize)]
pub struct WidthFunction {
    pub values: Vec<f64>,
}

impl WidthFunction {
    pub fn theta(&self, k: usize) -> f64 {
        PI * k as f64 / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl SupportFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_mode(values, DerivativeMode::Centered)
    }

    pub fn with_mode(values: Vec<f64>, mode: DerivativeMode) -> Result<Self> {
        let n = values.len();
        if n < MIN_GRID || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and >= {MIN_GRID}, got {n}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite support value".into()));
        }
        if values.iter().any(|&v| v <= 0.0) {
            return Err(Error::OriginOutside);
        }
        let (dp, ddp, spectrum) = match mode {
            DerivativeMode::Centered => {
                let (dp, ddp) = centered_derivatives(&values);
                (dp, ddp, None)
            }
            DerivativeMode::Spectral => {
                let (dp, ddp, spec) = spectral_derivatives(&values);
                (dp, ddp, Some(Arc::new(spec)))
            }
        };
        for (k, (p, pp)) in values.iter().zip(&ddp).enumerate() {
            let rho = p + pp;
            if rho <= 0.0 {
                return Err(Error::NotAnOval { index: k, value: rho });
            }
        }
        Ok(Self {
            values,
            mode,
            dp,
            ddp,
            spectrum,
        })
    }

    /// Samples `f` on an `n`-node grid.
    pub fn from_fn(n: usize, mode: DerivativeMode, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|k| f(TAU * k as f64 / n as f64)).collect();
        Self::with_mode(values, mode)
    }

    pub fn from_trig(n: usize, mode: DerivativeMode, trig: &TrigSupport) -> Result<Self> {
        Self::from_fn(n, mode, |t| trig.p(t))
    }

    /// Support function of a convex curve: `p(theta) = max_i <x_i, u(theta)>`.
    ///
    /// The origin must lie strictly inside the curve; use
    /// [`ClosedCurve::recentered`] first when it does not.
    pub fn from_curve(curve: &ClosedCurve, n: usize) -> Result<Self> {
        if !curve.is_convex() {
            return Err(Error::NotConvex);
        }
        let inside = curve.winding_number(Vec2::ZERO) != 0
            && curve.distance_to_boundary(Vec2::ZERO) > 1e-12 * curve.diameter();
        if !inside {
            return Err(Error::OriginOutside);
        }
        if n < MIN_GRID || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and >= {MIN_GRID}, got {n}"
            )));
        }
        let values = (0..n)
            .map(|k| {
                let u = Vec2::from_angle(TAU * k as f64 / n as f64);
                curve
                    .points()
                    .iter()
                    .map(|p| p.dot(u))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Self::new(values)
    }

    /// Same samples, derivatives recomputed in `mode`.
    pub fn in_mode(&self, mode: DerivativeMode) -> Result<Self> {
        Self::with_mode(self.values.clone(), mode)
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid spacing `2 pi / N`.
    pub fn step(&self) -> f64 {
        TAU / self.len() as f64
    }

    pub fn theta(&self, k: usize) -> f64 {
        TAU * k as f64 / self.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> &[f64] {
        &self.dp
    }

    pub fn second_derivative(&self) -> &[f64] {
        &self.ddp
    }

    /// `p + p''` at every node.
    pub fn radius_of_curvature(&self) -> Vec<f64> {
        self.values.iter().zip(&self.ddp).map(|(p, q)| p + q).collect()
    }

    /// Value at node `k`, cyclic.
    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        self.values[k % self.len()]
    }

    /// Boundary point with outward normal angle `theta_k`.
    pub fn node_point(&self, k: usize) -> Vec2 {
        let k = k % self.len();
        let (s, c) = self.theta(k).sin_cos();
        let (p, dp) = (self.values[k], self.dp[k]);
        Vec2::new(p * c - dp * s, p * s + dp * c)
    }

    /// Interpolated `(p, p', p'')` at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> [f64; 3] {
        match &self.spectrum {
            Some(spec) => trig_eval(spec, theta),
            None => {
                let h = self.step();
                let x = theta.rem_euclid(TAU) / h;
                let k = (x.floor() as usize).min(self.len() - 1);
                let f = x - k as f64;
                let p = hermite(&self.values, &self.dp, k, f, h);
                let dp = hermite(&self.dp, &self.ddp, k, f, h);
                let ddp = catmull_rom(&self.ddp, k, f);
                [p, dp, ddp]
            }
        }
    }

    /// Boundary point with outward normal angle `theta`, using interpolated
    /// `p` and `p'`.
    pub fn point_at(&self, theta: f64) -> Vec2 {
        let [p, dp, _] = self.eval(theta);
        let (s, c) = theta.sin_cos();
        Vec2::new(p * c - dp * s, p * s + dp * c)
    }

    /// Reconstructs the oval: `x = p cos - p' sin`, `y = p sin + p' cos` at
    /// every node. The result is convex and counter-clockwise.
    pub fn to_curve(&self) -> Result<ClosedCurve> {
        ClosedCurve::new((0..self.len()).map(|k| self.node_point(k)).collect())
    }

    /// Length by Cauchy's formula, trapezoid rule over the grid.
    pub fn cauchy_length(&self) -> f64 {
        self.step() * self.values.iter().sum::<f64>()
    }

    /// Enclosed area `1/2 int p (p + p'') dtheta`.
    pub fn area(&self) -> f64 {
        0.5 * self.step()
            * self
                .values
                .iter()
                .zip(&self.ddp)
                .map(|(p, q)| p * (p + q))
                .sum::<f64>()
    }

    /// Curvature `1 / (p + p'')` of the oval at normal angle `theta`.
    pub fn curvature_at(&self, theta: f64) -> Result<f64> {
        let [p, _, ddp] = self.eval(theta);
        let rho = p + ddp;
        if rho <= 0.0 {
            let h = self.step();
            let k = ((theta.rem_euclid(TAU) / h).round() as usize) % self.len();
            return Err(Error::NotAnOval { index: k, value: rho });
        }
        Ok(1.0 / rho)
    }

    /// Width on the half grid, using the node exactly opposite.
    pub fn width(&self) -> WidthFunction {
        let half = self.len() / 2;
        WidthFunction {
            values: (0..half)
                .map(|k| self.values[k] + self.values[k + half])
                .collect(),
        }
    }

    /// `max_k |p(theta_k + pi) - p(theta_k)|`.
    pub fn asymmetry(&self) -> f64 {
        let half = self.len() / 2;
        (0..half)
            .map(|k| (self.values[k + half] - self.values[k]).abs())
            .fold(0.0, f64::max)
    }

    /// Support function of the same oval seen from `origin`:
    /// `p(theta) - <origin, u(theta)>`.
    pub fn shifted(&self, origin: Vec2) -> Result<Self> {
        let values = (0..self.len())
            .map(|k| self.values[k] - origin.dot(Vec2::from_angle(self.theta(k))))
            .collect();
        Self::with_mode(values, self.mode)
    }
}

fn centered_derivatives(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let h = TAU / n as f64;
    let mut dp = vec![0.0; n];
    let mut ddp = vec![0.0; n];
    for k in 0..n {
        let prev = values[(k + n - 1) % n];
        let next = values[(k + 1) % n];
        dp[k] = (next - prev) / (2.0 * h);
        ddp[k] = (next - 2.0 * values[k] + prev) / (h * h);
    }
    (dp, ddp)
}

/// Signed frequency of DFT bin `k`.
fn freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

fn spectral_derivatives(values: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<Complex64>) {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut spec: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut spec);
    let scale = 1.0 / n as f64;
    for c in spec.iter_mut() {
        *c *= scale;
    }
    let mut d1: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if 2 * k == n {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, freq(k, n))
            }
        })
        .collect();
    let mut d2: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let w = freq(k, n);
            c * (-w * w)
        })
        .collect();
    inv.process(&mut d1);
    inv.process(&mut d2);
    (
        d1.iter().map(|c| c.re).collect(),
        d2.iter().map(|c| c.re).collect(),
        spec,
    )
}

/// Evaluates the real trigonometric interpolant and its first two derivatives.
fn trig_eval(spec: &[Complex64], theta: f64) -> [f64; 3] {
    let n = spec.len();
    let half = n / 2;
    let mut out = [spec[0].re, 0.0, 0.0];
    for (k, c) in spec.iter().enumerate().take(half).skip(1) {
        let kf = k as f64;
        let (s, co) = (kf * theta).sin_cos();
        // 2 Re(c e^{ik theta}) and its derivatives.
        let re = c.re * co - c.im * s;
        let im = c.re * s + c.im * co;
        out[0] += 2.0 * re;
        out[1] += -2.0 * kf * im;
        out[2] += -2.0 * kf * kf * re;
    }
    let kf = half as f64;
    let (s, co) = (kf * theta).sin_cos();
    out[0] += spec[half].re * co;
    out[1] -= spec[half].re * kf * s;
    out[2] -= spec[half].re * kf * kf * co;
    out
}

/// Cubic Hermite interpolation on `[k, k+1]` with node slopes `slope`.
fn hermite(values: &[f64], slope: &[f64], k: usize, f: f64, h: f64) -> f64 {
    let n = values.len();
    let (y0, y1) = (values[k], values[(k + 1) % n]);
    let (m0, m1) = (slope[k] * h, slope[(k + 1) % n] * h);
    let f2 = f * f;
    let f3 = f2 * f;
    (2.0 * f3 - 3.0 * f2 + 1.0) * y0
        + (f3 - 2.0 * f2 + f) * m0
        + (-2.0 * f3 + 3.0 * f2) * y1
        + (f3 - f2) * m1
}

fn catmull_rom(values: &[f64], k: usize, f: f64) -> f64 {
    let n = values.len();
    let p0 = values[(k + n - 1) % n];
    let p1 = values[k];
    let p2 = values[(k + 1) % n];
    let p3 = values[(k + 2) % n];
    let f2 = f * f;
    let f3 = f2 * f;
    0.5 * (2.0 * p1
        + (p2 - p0) * f
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f2
        + (3.0 * p1 - p0 - 3.0 * p2 + p3) * f3)
}
