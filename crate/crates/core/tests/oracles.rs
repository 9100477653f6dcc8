//! Cross-checks against independent reference computations.

use std::f64::consts::{PI, SQRT_2, TAU};

use curveflow::bonnesen::{circumradius, inradius};
use curveflow::geom::Vec2;
use curveflow::shapes::{self, TrigSupport};
use curveflow::shrinker::ode::{shoot_period_with, OdeOptions};
use curveflow::shrinker::{classify_closed_solutions, fundamental_residual, gauge_constant, verify_shrinker};
use curveflow::support::{DerivativeMode, SupportFunction};
use curveflow::symmetrize::chord_cut;
use curveflow::ClosedCurve;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Quadrature helpers

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, eps, 50)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn composite_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let mid = a + (j as f64 + 0.5) * h;
            rule.iter().map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Period of `p'' = 1/p - p` through `(p0, 0)` by quadrature in `u = ln p`:
/// `T = 2 int e^u du / sqrt(2 (E - W(u)))`, `W(u) = e^{2u}/2 - u`, with the
/// substitution `u = c + d sin(phi)` that removes the endpoint singularities.
fn period_by_quadrature(p0: f64) -> f64 {
    let w = |u: f64| 0.5 * (2.0 * u).exp() - u;
    let e = w(p0.ln());
    // The other turning point, on the opposite side of u = 0.
    let (mut lo, mut hi) = if p0 > 1.0 { (-60.0, 0.0) } else { (0.0, 10.0) };
    let target = |u: f64| w(u) - e;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (target(mid) > 0.0) == (target(lo) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let other = 0.5 * (lo + hi);
    let (a, b) = if p0 > 1.0 { (other, p0.ln()) } else { (p0.ln(), other) };
    let (c, d) = (0.5 * (a + b), 0.5 * (b - a));
    // W(t) - W(u) for a turning point t, written as a sum of two
    // non-negative terms so that nothing cancels near either endpoint.
    let half_expm1_minus = |x: f64| {
        if x.abs() < 1e-3 {
            x * x * (1.0 + x * (2.0 / 3.0 + x / 3.0))
        } else {
            0.5 * (2.0 * x).exp_m1() - x
        }
    };
    let gap = |u: f64| {
        let t = if u > c { b } else { a };
        let delta = t - u;
        delta * (2.0 * u).exp_m1() + (2.0 * u).exp() * half_expm1_minus(delta)
    };
    let integrand = |phi: f64| {
        let u = c + d * phi.sin();
        let g = gap(u);
        if g <= 0.0 {
            return 0.0;
        }
        u.exp() * d * phi.cos() / (2.0 * g).sqrt()
    };
    2.0 * composite_gl(integrand, -PI / 2.0, PI / 2.0, 64)
}

/// Frozen values of an independent adaptive quadrature of the half period.
const FROZEN_PERIODS: [(f64, f64); 9] = [
    (1.001, 4.442_882_5),
    (1.01, 4.442_846_0),
    (1.1, 4.439_296_1),
    (1.2, 4.428_944_6),
    (1.5, 4.362_124_5),
    (2.0, 4.156_280_6),
    (3.0, 3.651_016_4),
    (5.0, 3.282_291_5),
    (10.0, 3.173_793_2),
];

// ---------------------------------------------------------------------------
// Geometry oracles

/// Largest inscribed disk by nested ternary search of the concave function
/// `c -> min_i dist(c, edge line i)`.
fn inradius_brute(c: &ClosedCurve) -> f64 {
    let n = c.len();
    let lines: Vec<(Vec2, f64)> = (0..n)
        .map(|i| {
            let e = c.edge(i).normalized();
            let a = Vec2::new(e.y, -e.x);
            (a, a.dot(c.point(i)))
        })
        .collect();
    let f = |x: f64, y: f64| {
        let q = Vec2::new(x, y);
        lines.iter().map(|(a, b)| b - a.dot(q)).fold(f64::INFINITY, f64::min)
    };
    let (mut x0, mut x1) = bounds(c, |p| p.x);
    let (y0, y1) = bounds(c, |p| p.y);
    let best_y = |x: f64| {
        let (mut lo, mut hi) = (y0, y1);
        for _ in 0..100 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if f(x, m1) < f(x, m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        f(x, 0.5 * (lo + hi))
    };
    for _ in 0..100 {
        let (m1, m2) = (x0 + (x1 - x0) / 3.0, x1 - (x1 - x0) / 3.0);
        if best_y(m1) < best_y(m2) {
            x0 = m1;
        } else {
            x1 = m2;
        }
    }
    best_y(0.5 * (x0 + x1))
}

fn bounds(c: &ClosedCurve, key: impl Fn(&Vec2) -> f64) -> (f64, f64) {
    c.points().iter().map(&key).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Smallest circle through two or three samples that contains all samples.
fn circumradius_brute(pts: &[Vec2]) -> f64 {
    let contains = |c: Vec2, r: f64| pts.iter().all(|p| p.distance(c) <= r * (1.0 + 1e-12) + 1e-12);
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = (pts[i] + pts[j]) * 0.5;
            let r = 0.5 * pts[i].distance(pts[j]);
            if r < best && contains(c, r) {
                best = r;
            }
            for k in j + 1..pts.len() {
                let (a, b, cc) = (pts[i], pts[j], pts[k]);
                let d = 2.0 * (a.x * (b.y - cc.y) + b.x * (cc.y - a.y) + cc.x * (a.y - b.y));
                if d.abs() < 1e-14 {
                    continue;
                }
                let ux = (a.norm_sq() * (b.y - cc.y) + b.norm_sq() * (cc.y - a.y) + cc.norm_sq() * (a.y - b.y)) / d;
                let uy = (a.norm_sq() * (cc.x - b.x) + b.norm_sq() * (a.x - cc.x) + cc.norm_sq() * (b.x - a.x)) / d;
                let center = Vec2::new(ux, uy);
                let r = center.distance(a);
                if r < best && contains(center, r) {
                    best = r;
                }
            }
        }
    }
    best
}

fn shoelace(pts: &[Vec2]) -> f64 {
    0.5 * (0..pts.len()).map(|i| pts[i].cross(pts[(i + 1) % pts.len()])).sum::<f64>()
}

// ---------------------------------------------------------------------------

#[test]
fn ellipse_perimeter_quadrature() {
    let exact = adaptive_simpson(|u| (4.0 * u.sin().powi(2) + u.cos().powi(2)).sqrt(), 0.0, TAU, 1e-13);
    assert!((exact - 9.688_448_220_547_675).abs() < 1e-10, "{exact}");
    let poly = shapes::ellipse(4096, 2.0, 1.0).length();
    assert!((poly - exact).abs() < 1e-4);
    let p = SupportFunction::from_fn(256, DerivativeMode::Centered, |t| {
        (4.0 * t.cos().powi(2) + t.sin().powi(2)).sqrt()
    })
    .unwrap();
    assert!((p.cauchy_length() - exact).abs() < 1e-6);
}

#[test]
fn ellipse_curvature_at_vertex() {
    let c = shapes::ellipse(4096, 2.0, 1.0).redistribute_smooth(4096).unwrap();
    assert_eq!(c.point(0), Vec2::new(2.0, 0.0));
    let k = c.frenet().unwrap().curvature[0];
    assert!((k - 2.0).abs() < 1e-3, "{k}");
}

#[test]
fn period_quadrature_matches_frozen_values() {
    for (p0, t) in FROZEN_PERIODS {
        let q = period_by_quadrature(p0);
        assert!((q - t).abs() < 2e-7, "p0 = {p0}: {q} vs {t}");
    }
}

#[test]
fn shooting_matches_quadrature() {
    let opts = OdeOptions {
        tol: 1e-12,
        p_floor: 0.0,
        ..OdeOptions::default()
    };
    for (p0, _) in FROZEN_PERIODS {
        let shot = shoot_period_with(p0, &opts).unwrap();
        let quad = period_by_quadrature(p0);
        assert!((shot - quad).abs() < 1e-7, "p0 = {p0}: {shot} vs {quad}");
    }
    // Amplitude below one lies on the same orbits.
    let shot = shoot_period_with(0.7, &opts).unwrap();
    assert!((shot - period_by_quadrature(0.7)).abs() < 1e-7);
}

#[test]
fn classification_examples() {
    let rep = classify_closed_solutions(&[1.1, 1.5, 2.0, 3.0], 1e-3).unwrap();
    for e in &rep.entries {
        let t = e.period.unwrap();
        // Periods fall in (pi, sqrt(2) pi), below the closing value 2 pi.
        assert!(t > PI && t < SQRT_2 * PI, "{t}");
        assert!((t - TAU).abs() > 1e-3);
    }
    assert!(rep.only_circle_closes_once);

    let rep = classify_closed_solutions(&[1.0 + 1e-6], 1e-3).unwrap();
    let t = rep.entries[0].period.unwrap();
    assert!((t - TAU / SQRT_2).abs() < 1e-6);
}

#[test]
fn shrinker_examples() {
    let r2 = shapes::circle(4096, 2.0);
    let res = fundamental_residual(&r2).unwrap();
    assert!(res.residual.iter().all(|r| (r + 1.5).abs() < 1e-4));
    let g = gauge_constant(&r2).unwrap();
    assert!((g.constant - 0.5 * (-2.0f64).exp()).abs() < 1e-6 && g.max_rel_dev < 1e-6);
    assert!(!verify_shrinker(&r2, 1e-3).unwrap().verdict);

    let shifted = shapes::circle_at(4096, 1.0, Vec2::new(1.0, 0.0));
    assert!(fundamental_residual(&shifted).unwrap().max_abs >= 0.9);

    let ell = shapes::ellipse(4096, 2.0, 1.0);
    let rep = verify_shrinker(&ell, 1e-3).unwrap();
    assert!(!rep.verdict && rep.max_residual > 0.5);
    assert!(gauge_constant(&ell).unwrap().max_rel_dev > 0.1);

    let unit = verify_shrinker(&shapes::circle(4096, 1.0), 1e-3).unwrap();
    assert!(unit.verdict);
    assert!((unit.gauge_constant - (-0.5f64).exp()).abs() < 1e-6);
}

#[test]
fn inradius_against_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let c = TrigSupport::random_oval(&mut rng, 4).curve(48);
        let (r, center) = inradius(&c).unwrap();
        let brute = inradius_brute(&c);
        assert!((r - brute).abs() < 1e-9, "{r} vs {brute}");
        assert!(c.winding_number(center) == 1);
    }
}

#[test]
fn circumradius_against_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let c = TrigSupport::random_oval(&mut rng, 4).curve(24);
        let (r, _) = circumradius(&c);
        let brute = circumradius_brute(c.points());
        assert!((r - brute).abs() < 1e-12, "{r} vs {brute}");
    }
    let e = shapes::ellipse(24, 2.0, 1.0);
    assert!((circumradius_brute(e.points()) - 2.0).abs() < 1e-12);
}

#[test]
fn chord_cut_against_shoelace() {
    let trig = TrigSupport {
        c0: 1.0,
        cos: vec![0.3, 0.05],
        sin: vec![0.0, 0.02],
    };
    let n = 128;
    let p = SupportFunction::from_trig(n, DerivativeMode::Spectral, &trig).unwrap();
    let pts: Vec<Vec2> = (0..n).map(|k| trig.point(TAU * k as f64 / n as f64)).collect();
    for k in [0, 5, 40, 63] {
        let arc: Vec<Vec2> = (k..=k + n / 2).map(|j| pts[j % n]).collect();
        let cut = chord_cut(&p, p.theta(k)).unwrap();
        assert!((cut.sigma - shoelace(&arc)).abs() < 1e-12);
        assert!((cut.area - shoelace(&pts)).abs() < 1e-12);
    }
}
