//! The support-function ODE of a contracting self-similar curve,
//! `p'' = 1/p - p`, and period measurement by shooting.
//!
//! The equation has the first integral `E = p'^2/2 + p^2/2 - ln p`. Large
//! amplitudes drive the minimum of `p` towards zero, where the solution in
//! `theta` turns in an interval far below double resolution. We therefore
//! integrate in the time `tau` with `dtheta = p dtau` and the unknowns
//! `u = ln p`, `q = p'`:
//!
//! ```text
//! du/dtau = q,   dq/dtau = 1 - exp(2u),   dtheta/dtau = exp(u)
//! ```
//!
//! which is smooth for every `p > 0` and Hamiltonian in `(u, q)` with the
//! same energy `q^2/2 + exp(2u)/2 - u`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

type State = [f64; 3];

/// Integration knobs. `tol` bounds the local error per step (mixed
/// absolute/relative); `p_floor` is the value of `p` below which the solution
/// is declared to have blown up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeOptions {
    pub tol: f64,
    pub p_floor: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            p_floor: 1e-8,
            max_steps: 2_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Accepted steps of a solution of `p'' = 1/p - p`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct OdeTrajectory {
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub energy: Vec<f64>,
}

impl OdeTrajectory {
    fn push(&mut self, y: &State) {
        let p = y[0].exp();
        self.theta.push(y[2]);
        self.p.push(p);
        self.dp.push(y[1]);
        self.energy.push(energy_log(y[0], y[1]));
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `max |E(theta) - E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

/// First integral `p'^2/2 + p^2/2 - ln p`.
pub fn energy(p: f64, dp: f64) -> f64 {
    0.5 * dp * dp + 0.5 * p * p - p.ln()
}

fn energy_log(u: f64, q: f64) -> f64 {
    0.5 * q * q + 0.5 * (2.0 * u).exp() - u
}

fn rhs(y: &State) -> State {
    let p = y[0].exp();
    [y[1], 1.0 - p * p, p]
}

// Dormand-Prince 5(4) tableau. The system is autonomous, so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step from `(y, f)`. Returns the fifth-order solution,
/// its derivative (FSAL) and the local error estimate vector.
fn dp5_step(y: &State, f: &State, h: f64) -> (State, State, State) {
    let mut k = [[0.0; 3]; 7];
    k[0] = *f;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..3 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = rhs(&ys);
    }
    // Row 6 of A holds the fifth-order weights, so stage 7 was evaluated at
    // the new solution.
    let mut y_new = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        for i in 0..3 {
            y_new[i] += h * A[6][j] * kj[i];
        }
    }
    let mut err = [0.0; 3];
    for (j, kj) in k.iter().enumerate() {
        for i in 0..3 {
            err[i] += h * E[j] * kj[i];
        }
    }
    (y_new, k[6], err)
}

/// An accepted step together with its cubic Hermite dense output.
#[derive(Debug, Clone, Copy)]
struct Step {
    y0: State,
    f0: State,
    y1: State,
    f1: State,
    h: f64,
}

impl Step {
    /// State at fraction `s` of the step.
    fn at(&self, s: f64) -> State {
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = h00 * self.y0[i]
                + h10 * self.h * self.f0[i]
                + h01 * self.y1[i]
                + h11 * self.h * self.f1[i];
        }
        out
    }

    /// Bisection on the dense output for the fraction where `g` changes sign.
    fn locate(&self, g: impl Fn(&State) -> f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let glo = g(&self.y0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let gm = g(&self.at(mid));
            if (gm > 0.0) == (glo > 0.0) && gm != 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Adaptive Dormand-Prince integrator with PI step control.
struct Integrator {
    y: State,
    f: State,
    h: f64,
    err_prev: f64,
    opts: OdeOptions,
    steps: usize,
}

impl Integrator {
    const SAFETY: f64 = 0.9;
    const BETA: f64 = 0.04;
    const ALPHA: f64 = 0.2 - 0.75 * Self::BETA;

    fn new(y: State, direction: f64, opts: OdeOptions) -> Self {
        let f = rhs(&y);
        // Conservative start; the controller grows it within a few steps.
        let scale = f.iter().map(|v| v.abs()).fold(1.0, f64::max);
        Self {
            y,
            f,
            h: direction * 1e-3 / scale,
            err_prev: 1e-4,
            opts,
            steps: 0,
        }
    }

    fn error_norm(&self, y_new: &State, err: &State) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            let sc = self.opts.tol * (1.0 + self.y[i].abs().max(y_new[i].abs()));
            acc += (err[i] / sc).powi(2);
        }
        (acc / 3.0).sqrt()
    }

    /// Takes one accepted step.
    fn advance(&mut self) -> Result<Step> {
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(Error::ToleranceNotMet(format!(
                    "step budget of {} exhausted",
                    self.opts.max_steps
                )));
            }
            if self.h.abs() < 1e-15 * (1.0 + self.y[2].abs()) {
                return Err(Error::ToleranceNotMet(format!(
                    "step size underflow at theta = {}",
                    self.y[2]
                )));
            }
            self.steps += 1;
            let (y_new, f_new, err) = dp5_step(&self.y, &self.f, self.h);
            let finite = y_new.iter().all(|v| v.is_finite());
            let en = if finite {
                self.error_norm(&y_new, &err)
            } else {
                f64::INFINITY
            };
            if en <= 1.0 {
                let en = en.max(1e-10);
                let factor = (Self::SAFETY * en.powf(-Self::ALPHA) * self.err_prev.powf(Self::BETA))
                    .clamp(0.2, 5.0);
                let step = Step {
                    y0: self.y,
                    f0: self.f,
                    y1: y_new,
                    f1: f_new,
                    h: self.h,
                };
                self.y = y_new;
                self.f = f_new;
                self.err_prev = en;
                self.h *= factor;
                let p = self.y[0].exp();
                if p < self.opts.p_floor {
                    return Err(Error::BlowUp {
                        theta: self.y[2],
                        p,
                    });
                }
                return Ok(step);
            }
            let shrink = if en.is_finite() {
                (Self::SAFETY * en.powf(-0.2)).max(0.2)
            } else {
                0.1
            };
            self.h *= shrink;
        }
    }

    /// Exact partial step from the start of `step` by `frac * step.h`.
    fn partial(step: &Step, frac: f64) -> State {
        dp5_step(&step.y0, &step.f0, frac * step.h).0
    }
}

fn check_initial(p0: f64, dp0: f64, opts: &OdeOptions) -> Result<()> {
    if !(p0 > 0.0) || !p0.is_finite() || !dp0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "initial data must be finite with p0 > 0, got p0 = {p0}, dp0 = {dp0}"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if p0 < opts.p_floor {
        return Err(Error::BlowUp { theta: 0.0, p: p0 });
    }
    Ok(())
}

/// Integrates `p'' = 1/p - p` from `(p0, dp0)` at `theta = 0` to
/// `theta = theta_span` (which may be negative).
pub fn integrate_support_ode(p0: f64, dp0: f64, theta_span: f64, tol: f64) -> Result<OdeTrajectory> {
    integrate_support_ode_with(p0, dp0, theta_span, &OdeOptions::with_tol(tol))
}

pub fn integrate_support_ode_with(
    p0: f64,
    dp0: f64,
    theta_span: f64,
    opts: &OdeOptions,
) -> Result<OdeTrajectory> {
    check_initial(p0, dp0, opts)?;
    let mut traj = OdeTrajectory::default();
    let y0 = [p0.ln(), dp0, 0.0];
    traj.push(&y0);
    if theta_span == 0.0 {
        return Ok(traj);
    }
    let dir = theta_span.signum();
    let mut integ = Integrator::new(y0, dir, *opts);
    loop {
        let step = integ.advance()?;
        if dir * (step.y1[2] - theta_span) >= 0.0 {
            let frac = step.locate(|y| y[2] - theta_span);
            let mut end = Integrator::partial(&step, frac);
            end[2] = theta_span;
            traj.push(&end);
            return Ok(traj);
        }
        traj.push(&step.y1);
    }
}

/// `theta`-distance between successive maxima of `p` on the solution through
/// `(p0, 0)`.
pub fn shoot_period(p0: f64, tol: f64) -> Result<f64> {
    shoot_period_with(p0, &OdeOptions::with_tol(tol))
}

pub fn shoot_period_with(p0: f64, opts: &OdeOptions) -> Result<f64> {
    check_initial(p0, 0.0, opts)?;
    if p0 == 1.0 {
        return Err(Error::InvalidInput(
            "p0 = 1 is the equilibrium (circle); it has no oscillation period".into(),
        ));
    }
    let mut integ = Integrator::new([p0.ln(), 0.0, 0.0], 1.0, *opts);
    let mut maxima = Vec::with_capacity(2);
    while maxima.len() < 2 {
        let step = integ.advance()?;
        // p' going from positive to non-positive marks a maximum of p.
        if step.y0[1] > 0.0 && step.y1[1] <= 0.0 {
            let frac = step.locate(|y| y[1]);
            maxima.push(Integrator::partial(&step, frac)[2]);
        }
    }
    Ok(maxima[1] - maxima[0])
}

/// `p/q` approximation of a period ratio `T / 2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RationalCandidate {
    /// Numerator: turns of the tangent before the curve closes.
    pub turning_number: u32,
    /// Denominator: oscillations of `p` (lobes) per closed curve.
    pub lobes: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodEntry {
    pub p0: f64,
    /// `None` for the constant solution `p0 = 1`.
    pub period: Option<f64>,
    pub ratio_to_2pi: Option<f64>,
    pub candidate: Option<RationalCandidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub tol: f64,
    pub entries: Vec<PeriodEntry>,
    /// Non-constant amplitudes whose period matched `2 pi` within `tol`.
    pub winding_one_closed: Vec<f64>,
    /// True when only the constant solution closes after one turn.
    pub only_circle_closes_once: bool,
}

/// Largest lobe count searched for rational period ratios.
pub const MAX_LOBES: u32 = 12;

/// Measures one amplitude. Used directly by parallel callers, which merge the
/// entries back in grid order with [`classification_from_entries`].
pub fn period_entry(p0: f64, opts: &OdeOptions, match_tol: f64) -> Result<PeriodEntry> {
    if p0 == 1.0 {
        return Ok(PeriodEntry {
            p0,
            period: None,
            ratio_to_2pi: None,
            candidate: None,
        });
    }
    let period = shoot_period_with(p0, opts)?;
    let ratio = period / TAU;
    Ok(PeriodEntry {
        p0,
        period: Some(period),
        ratio_to_2pi: Some(ratio),
        candidate: rational_candidate(ratio, match_tol),
    })
}

/// Smallest-denominator fraction `k/m`, `m >= 2`, within `tol` of `ratio`.
pub fn rational_candidate(ratio: f64, tol: f64) -> Option<RationalCandidate> {
    (2..=MAX_LOBES).find_map(|m| {
        (1..m).find_map(|k| {
            ((ratio - k as f64 / m as f64).abs() <= tol && gcd(k, m) == 1).then_some(
                RationalCandidate {
                    turning_number: k,
                    lobes: m,
                },
            )
        })
    })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn classification_from_entries(entries: Vec<PeriodEntry>, tol: f64) -> ClassificationReport {
    let winding_one_closed: Vec<f64> = entries
        .iter()
        .filter(|e| e.ratio_to_2pi.is_some_and(|r| (r - 1.0).abs() <= tol))
        .map(|e| e.p0)
        .collect();
    ClassificationReport {
        tol,
        only_circle_closes_once: winding_one_closed.is_empty(),
        winding_one_closed,
        entries,
    }
}

/// Shoots every amplitude on the grid and reports which periods could close
/// a curve. Evidence only: the statement is "no period equals 2 pi within
/// `tol` on this grid".
pub fn classify_closed_solutions(amplitudes: &[f64], tol: f64) -> Result<ClassificationReport> {
    let opts = OdeOptions::with_tol(1e-12);
    let entries = amplitudes
        .iter()
        .map(|&p0| {
            if !(p0 > 0.0) {
                return Err(Error::InvalidInput(format!("amplitude must be positive, got {p0}")));
            }
            period_entry(p0, &opts, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(classification_from_entries(entries, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn equilibrium_stays_put() {
        let t = integrate_support_ode(1.0, 0.0, TAU, 1e-10).unwrap();
        assert!(t.p.iter().all(|p| (p - 1.0).abs() < 1e-12));
        assert!(t.energy.iter().all(|e| (e - 0.5).abs() < 1e-12));
        assert!((t.theta.last().unwrap() - TAU).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_over_many_periods() {
        let t = integrate_support_ode(1.0, 0.0, 100.0 * TAU, 1e-10).unwrap();
        assert!(t.p.iter().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn oscillation_conserves_energy() {
        let t = integrate_support_ode(1.2, 0.0, 4.0 * PI, 1e-12).unwrap();
        let max = t.p.iter().copied().fold(0.0, f64::max);
        let min = t.p.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min < 1.0 && (max - 1.2).abs() < 1e-9);
        assert!(t.energy_drift() < 1e-9, "drift {}", t.energy_drift());
        assert!((t.energy[0] - energy(1.2, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn tiny_start_blows_up() {
        assert!(matches!(
            integrate_support_ode(1e-9, 0.0, TAU, 1e-10),
            Err(Error::BlowUp { .. })
        ));
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            integrate_support_ode(-1.0, 0.0, TAU, 1e-10),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            integrate_support_ode(1.0, 0.0, TAU, 0.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(shoot_period(1.0, 1e-10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn solution_is_even_in_theta() {
        let fwd = integrate_support_ode(1.7, 0.0, 2.3, 1e-12).unwrap();
        let bwd = integrate_support_ode(1.7, 0.0, -2.3, 1e-12).unwrap();
        assert!((fwd.p.last().unwrap() - bwd.p.last().unwrap()).abs() < 1e-9);
        assert!((fwd.dp.last().unwrap() + bwd.dp.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn small_amplitude_period_is_linearized() {
        let t = shoot_period(1.001, 1e-12).unwrap();
        assert!((t - PI * SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn rational_matching() {
        assert_eq!(
            rational_candidate(0.6667, 1e-3),
            Some(RationalCandidate {
                turning_number: 2,
                lobes: 3
            })
        );
        assert_eq!(rational_candidate(0.69, 1e-4), None);
    }

    #[test]
    fn empty_grid_gives_empty_report() {
        let r = classify_closed_solutions(&[], 1e-3).unwrap();
        assert!(r.entries.is_empty() && r.only_circle_closes_once);
    }

    #[test]
    fn constant_amplitude_is_the_circle() {
        let r = classify_closed_solutions(&[1.0, 1.3], 1e-3).unwrap();
        assert!(r.entries[0].period.is_none());
        assert!(r.entries[1].period.is_some());
        assert!(r.only_circle_closes_once);
    }

    // Reference periods from an independent quadrature of
    // T/2 = int dp / sqrt(2 (E - V(p))) between the turning points.
    const REFERENCE: [(f64, f64); 6] = [
        (1.01, 4.442_846_0),
        (1.2, 4.428_944_6),
        (1.5, 4.362_124_5),
        (2.0, 4.156_280_6),
        (3.0, 3.651_016_4),
        (5.0, 3.282_291_5),
    ];

    #[test]
    fn periods_match_reference() {
        for (p0, t) in REFERENCE {
            let got = shoot_period(p0, 1e-12).unwrap();
            assert!((got - t).abs() < 1e-6, "p0 = {p0}: {got} vs {t}");
            assert!(got > PI && got < PI * SQRT_2);
        }
    }

    #[test]
    fn large_amplitude_needs_floor_disabled() {
        assert!(matches!(shoot_period(10.0, 1e-12), Err(Error::BlowUp { .. })));
        let opts = OdeOptions {
            tol: 1e-12,
            p_floor: 0.0,
            ..OdeOptions::default()
        };
        let t = shoot_period_with(10.0, &opts).unwrap();
        assert!((t - 3.173_793_2).abs() < 1e-6, "{t}");
    }
}
