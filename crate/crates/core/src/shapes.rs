//! Sample curves and analytic support functions used by tests, the
//! acceptance suite and the CLI `generate` command.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::ClosedCurve;
use crate::geom::Vec2;

/// Counter-clockwise circle of radius `r` about the origin, sample 0 at `(r, 0)`.
pub fn circle(n: usize, r: f64) -> ClosedCurve {
    circle_at(n, r, Vec2::ZERO)
}

pub fn circle_at(n: usize, r: f64, center: Vec2) -> ClosedCurve {
    curve_from_fn(n, |t| center + Vec2::from_angle(t) * r)
}

/// Circle sampled at the non-uniform angles `t + warp * sin(t)`.
pub fn circle_nonuniform(n: usize, r: f64, warp: f64) -> ClosedCurve {
    curve_from_fn(n, |t| Vec2::from_angle(t + warp * t.sin()) * r)
}

/// Ellipse `(a cos u, b sin u)` sampled at uniform `u`, sample 0 at `(a, 0)`.
pub fn ellipse(n: usize, a: f64, b: f64) -> ClosedCurve {
    curve_from_fn(n, |u| Vec2::new(a * u.cos(), b * u.sin()))
}

/// Circle traversed twice: `2n` samples with turning number 2.
pub fn doubled_circle(n: usize, r: f64) -> ClosedCurve {
    let pts = (0..2 * n)
        .map(|i| Vec2::from_angle(TAU * i as f64 / n as f64) * r)
        .collect();
    ClosedCurve::new(pts).expect("doubled circle samples are distinct")
}

/// Circle with sample 0 pushed inward by `depth` (fraction of the radius).
pub fn dented_circle(n: usize, depth: f64) -> ClosedCurve {
    let mut pts: Vec<Vec2> = (0..n)
        .map(|i| Vec2::from_angle(TAU * i as f64 / n as f64))
        .collect();
    pts[0] = pts[0] * (1.0 - depth);
    ClosedCurve::new(pts).expect("dented circle samples are distinct")
}

/// Limacon `r = offset + amplitude cos t`; has an inner loop when
/// `amplitude > offset`.
pub fn limacon(n: usize, offset: f64, amplitude: f64) -> ClosedCurve {
    curve_from_fn(n, |t| Vec2::from_angle(t) * (offset + amplitude * t.cos()))
}

/// Axis-aligned square of the given side centered at the origin, four corners.
pub fn square(side: f64) -> ClosedCurve {
    let h = 0.5 * side;
    ClosedCurve::from_xy([(-h, -h), (h, -h), (h, h), (-h, h)]).expect("square corners")
}

/// L-shaped hexagon with one reflex vertex.
pub fn l_shape() -> ClosedCurve {
    ClosedCurve::from_xy([
        (0.0, 0.0),
        (2.0, 0.0),
        (2.0, 1.0),
        (1.0, 1.0),
        (1.0, 2.0),
        (0.0, 2.0),
    ])
    .expect("L-shape corners")
}

/// Square of the given side with corners rounded to `radius`, centered at
/// the origin and sampled uniformly in arclength.
pub fn rounded_square(n: usize, side: f64, radius: f64) -> ClosedCurve {
    assert!(radius > 0.0 && 2.0 * radius < side);
    let flat = side - 2.0 * radius;
    let arc = FRAC_PI_2 * radius;
    let per_side = flat + arc;
    let total = 4.0 * per_side;
    let h = 0.5 * side;
    let pts = (0..n)
        .map(|j| {
            let s = total * j as f64 / n as f64;
            let quarter = ((s / per_side) as usize).min(3);
            let local = s - quarter as f64 * per_side;
            // Local frame for the bottom side, rotated by quarter * pi/2.
            let p = if local < flat {
                Vec2::new(-0.5 * flat + local, -h)
            } else {
                let phi = -FRAC_PI_2 + (local - flat) / radius;
                Vec2::new(0.5 * flat, -0.5 * flat) + Vec2::from_angle(phi) * radius
            };
            let (s, c) = (quarter as f64 * FRAC_PI_2).sin_cos();
            Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)
        })
        .collect();
    ClosedCurve::new(pts).expect("rounded square samples are distinct")
}

fn curve_from_fn(n: usize, f: impl Fn(f64) -> Vec2) -> ClosedCurve {
    let pts = (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect();
    ClosedCurve::new(pts).expect("sampled curve is non-degenerate")
}

/// Support function given as a truncated Fourier series
/// `p(t) = c0 + sum_k (a_k cos kt + b_k sin kt)`, `k = 1..`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigSupport {
    pub c0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSupport {
    pub fn constant(r: f64) -> Self {
        Self {
            c0: r,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// `c0 + amp cos(k t)`.
    pub fn cosine(c0: f64, k: usize, amp: f64) -> Self {
        let mut cos = vec![0.0; k];
        cos[k - 1] = amp;
        Self {
            c0,
            cos,
            sin: Vec::new(),
        }
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.cos.len().max(self.sin.len());
        (0..n).map(move |i| {
            (
                (i + 1) as f64,
                self.cos.get(i).copied().unwrap_or(0.0),
                self.sin.get(i).copied().unwrap_or(0.0),
            )
        })
    }

    pub fn p(&self, t: f64) -> f64 {
        self.c0
            + self
                .terms()
                .map(|(k, a, b)| a * (k * t).cos() + b * (k * t).sin())
                .sum::<f64>()
    }

    pub fn dp(&self, t: f64) -> f64 {
        self.terms()
            .map(|(k, a, b)| k * (b * (k * t).cos() - a * (k * t).sin()))
            .sum()
    }

    pub fn ddp(&self, t: f64) -> f64 {
        -self
            .terms()
            .map(|(k, a, b)| k * k * (a * (k * t).cos() + b * (k * t).sin()))
            .sum::<f64>()
    }

    /// Boundary point with outward normal angle `t`.
    pub fn point(&self, t: f64) -> Vec2 {
        let (p, dp) = (self.p(t), self.dp(t));
        let (s, c) = t.sin_cos();
        Vec2::new(p * c - dp * s, p * s + dp * c)
    }

    /// Exact length `2 pi c0` (Cauchy's formula).
    pub fn length(&self) -> f64 {
        TAU * self.c0
    }

    /// Exact area `pi c0^2 + (pi/2) sum (1 - k^2)(a_k^2 + b_k^2)`.
    pub fn area(&self) -> f64 {
        PI * self.c0 * self.c0
            + 0.5 * PI * self.terms().map(|(k, a, b)| (1.0 - k * k) * (a * a + b * b)).sum::<f64>()
    }

    /// Lower bound on `p + p''` from the coefficients.
    pub fn min_radius_bound(&self) -> f64 {
        self.c0 - self.terms().map(|(k, a, b)| (k * k - 1.0) * (a.abs() + b.abs())).sum::<f64>()
    }

    /// Samples `n` boundary points at uniform normal angle.
    pub fn curve(&self, n: usize) -> ClosedCurve {
        curve_from_fn(n, |t| self.point(t))
    }

    /// True when the series has only even harmonics, i.e. `p(t + pi) = p(t)`.
    pub fn is_centrally_symmetric(&self) -> bool {
        self.terms()
            .all(|(k, a, b)| (k as usize) % 2 == 0 || (a == 0.0 && b == 0.0))
    }

    /// Random oval with harmonics `1..=max_harmonic`.
    ///
    /// The first harmonic is a translation of size at most `0.3`; the rest are
    /// scaled so that `p + p'' >= 0.2` and `p > 0.3`.
    pub fn random_oval<R: Rng + ?Sized>(rng: &mut R, max_harmonic: usize) -> Self {
        assert!(max_harmonic >= 2);
        let mut cos = vec![0.0f64; max_harmonic];
        let mut sin = vec![0.0f64; max_harmonic];
        cos[0] = rng.gen_range(-0.2..0.2);
        sin[0] = rng.gen_range(-0.2..0.2);
        let mut weight = 0.0;
        for k in 2..=max_harmonic {
            cos[k - 1] = rng.gen_range(-1.0..1.0);
            sin[k - 1] = rng.gen_range(-1.0..1.0);
            weight += ((k * k - 1) as f64) * (cos[k - 1].abs() + sin[k - 1].abs());
        }
        let budget = rng.gen_range(0.2..0.8);
        let scale = budget / weight;
        for k in 2..=max_harmonic {
            cos[k - 1] *= scale;
            sin[k - 1] *= scale;
        }
        Self { c0: 1.0, cos, sin }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rounded_square_is_uniform_and_convex() {
        let c = rounded_square(400, 2.0, 0.3);
        assert!(c.is_convex());
        assert!(c.spacing_ratio() < 1.01);
        let expected_len = 4.0 * 1.4 + TAU * 0.3;
        assert!((c.length() - expected_len).abs() < 1e-3);
    }

    #[test]
    fn trig_support_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = TrigSupport::random_oval(&mut rng, 5);
        let h = 1e-4;
        for t in [0.1, 1.3, 4.0] {
            let fd = (s.p(t + h) - s.p(t - h)) / (2.0 * h);
            assert!((fd - s.dp(t)).abs() < 1e-6);
            let fd2 = (s.dp(t + h) - s.dp(t - h)) / (2.0 * h);
            assert!((fd2 - s.ddp(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn random_ovals_are_ovals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = TrigSupport::random_oval(&mut rng, 5);
            assert!(s.min_radius_bound() >= 0.2 - 1e-12);
            let c = s.curve(256);
            assert!(c.is_convex() && c.is_simple());
            assert!((c.signed_area() - s.area()).abs() < 1e-3 * s.area());
        }
    }
}
