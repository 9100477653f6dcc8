//! Explicit time stepping of the curve shortening flow `gamma_t = kappa n`,
//! directly and renormalized to enclosed area `pi`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::curve::{ClosedCurve, FrenetData};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::shrinker::{verify_shrinker, ShrinkerReport};

/// Length, area and isoperimetric ratio `L^2 / (4 pi A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub length: f64,
    pub area: f64,
    pub ratio: f64,
}

impl Diagnostics {
    pub fn of(curve: &ClosedCurve) -> Self {
        let length = curve.length();
        let area = curve.signed_area();
        Self {
            length,
            area,
            ratio: length * length / (4.0 * PI * area),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowState {
    pub curve: ClosedCurve,
    pub time: f64,
    pub step_count: usize,
    pub diagnostics: Diagnostics,
}

impl FlowState {
    pub fn new(curve: ClosedCurve) -> Self {
        let diagnostics = Diagnostics::of(&curve);
        Self {
            curve,
            time: 0.0,
            step_count: 0,
            diagnostics,
        }
    }
}

/// Redistribute once the longest edge exceeds the shortest by this factor.
pub const REDISTRIBUTE_RATIO: f64 = 1.1;

/// Largest stable explicit step `0.4 h_min^2 / max(1, max |kappa|)`.
pub fn stability_bound(curve: &ClosedCurve, frenet: &FrenetData) -> f64 {
    let h = curve.min_spacing();
    0.4 * h * h / max_abs_curvature(frenet).max(1.0)
}

fn max_abs_curvature(frenet: &FrenetData) -> f64 {
    frenet.curvature.iter().map(|k| k.abs()).fold(0.0, f64::max)
}

/// Moves every sample by `kappa n dt`, then restores near-uniform spacing.
pub fn csf_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    let frenet = state.curve.frenet()?;
    step_with(state, &frenet, dt)
}

fn step_with(state: &FlowState, frenet: &FrenetData, dt: f64) -> Result<FlowState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    let bound = stability_bound(&state.curve, frenet);
    if dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let time = state.time + dt;
    let moved = advect(&state.curve, frenet, dt);
    let curve = rebuild(moved, time)?;
    let curve = if curve.spacing_ratio() > REDISTRIBUTE_RATIO {
        curve.redistribute_smooth(curve.len())?
    } else {
        curve
    };
    let diagnostics = Diagnostics::of(&curve);
    if !(diagnostics.area > 0.0) {
        return Err(Error::CurveCollapsed {
            time,
            area: diagnostics.area,
        });
    }
    Ok(FlowState {
        curve,
        time,
        step_count: state.step_count + 1,
        diagnostics,
    })
}

fn advect(curve: &ClosedCurve, frenet: &FrenetData, dt: f64) -> Vec<Vec2> {
    curve
        .points()
        .iter()
        .zip(frenet.normal.iter().zip(&frenet.curvature))
        .map(|(&p, (&n, &k))| p + n * (k * dt))
        .collect()
}

fn rebuild(points: Vec<Vec2>, time: f64) -> Result<ClosedCurve> {
    ClosedCurve::new(points).map_err(|e| match e {
        Error::DegenerateSegment { .. } | Error::InvalidInput(_) => {
            Error::CurveCollapsed { time, area: 0.0 }
        }
        other => other,
    })
}

/// Adaptive step rule `dt = safety h_mean^2 / max(1, max |kappa|)`, clamped to
/// `[dt_min, dt_max]` and to just below the stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DtPolicy {
    pub safety: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self {
            safety: 0.2,
            dt_min: 1e-14,
            dt_max: 1e-2,
        }
    }
}

impl DtPolicy {
    pub fn dt(&self, curve: &ClosedCurve, frenet: &FrenetData) -> f64 {
        let h = curve.length() / curve.len() as f64;
        let dt = (self.safety * h * h / max_abs_curvature(frenet).max(1.0))
            .clamp(self.dt_min, self.dt_max);
        dt.min(0.99 * stability_bound(curve, frenet))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopConditions {
    /// Stop once `A < area_floor * A_0`.
    pub area_floor: f64,
    pub t_max: f64,
    pub max_steps: usize,
    /// Reject non-simple input. Disable only for evidence runs outside the
    /// embedded regime.
    pub require_simple: bool,
    /// Keep a copy of the curve every this many steps (0 keeps none).
    pub snapshot_every: usize,
}

impl Default for StopConditions {
    fn default() -> Self {
        Self {
            area_floor: 1e-3,
            t_max: f64::INFINITY,
            max_steps: 10_000_000,
            require_simple: true,
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    AreaFloor,
    TimeLimit,
    StepBudget,
    Collapsed,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub lengths: Vec<f64>,
    pub areas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub final_state: FlowState,
    pub stop_reason: StopReason,
    #[serde(skip)]
    pub snapshots: Vec<(f64, ClosedCurve)>,
}

impl FlowTrajectory {
    fn record(&mut self, s: &FlowState) {
        self.times.push(s.time);
        self.lengths.push(s.diagnostics.length);
        self.areas.push(s.diagnostics.area);
        self.ratios.push(s.diagnostics.ratio);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time of the last recorded sample.
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has its initial sample")
    }
}

fn require_flowable(curve: &ClosedCurve, require_simple: bool) -> Result<()> {
    if curve.signed_area() <= 0.0 {
        return Err(Error::InvalidInput(
            "curve must be counter-clockwise (positive signed area)".into(),
        ));
    }
    if require_simple && !curve.is_simple() {
        return Err(Error::InvalidInput("curve is not simple".into()));
    }
    Ok(())
}

/// Flows until the area floor, the time limit or the step budget.
pub fn run_flow(curve: &ClosedCurve, policy: &DtPolicy, stop: &StopConditions) -> Result<FlowTrajectory> {
    require_flowable(curve, stop.require_simple)?;
    let mut state = FlowState::new(curve.clone());
    let floor = stop.area_floor * state.diagnostics.area;
    let mut traj = FlowTrajectory {
        times: Vec::new(),
        lengths: Vec::new(),
        areas: Vec::new(),
        ratios: Vec::new(),
        final_state: state.clone(),
        stop_reason: StopReason::StepBudget,
        snapshots: Vec::new(),
    };
    traj.record(&state);
    if stop.snapshot_every > 0 {
        traj.snapshots.push((0.0, state.curve.clone()));
    }
    let reason = loop {
        if state.diagnostics.area < floor {
            break StopReason::AreaFloor;
        }
        if state.time >= stop.t_max {
            break StopReason::TimeLimit;
        }
        if state.step_count >= stop.max_steps {
            break StopReason::StepBudget;
        }
        let frenet = match state.curve.frenet() {
            Ok(f) => f,
            Err(Error::DegenerateSegment { .. }) => break StopReason::Collapsed,
            Err(e) => return Err(e),
        };
        let mut dt = policy.dt(&state.curve, &frenet);
        if state.time + dt > stop.t_max {
            dt = stop.t_max - state.time;
        }
        state = match step_with(&state, &frenet, dt) {
            Ok(s) => s,
            Err(Error::CurveCollapsed { .. }) => break StopReason::Collapsed,
            Err(e) => return Err(e),
        };
        traj.record(&state);
        if stop.snapshot_every > 0 && state.step_count % stop.snapshot_every == 0 {
            traj.snapshots.push((state.time, state.curve.clone()));
        }
        log::trace!(
            "t = {:.6e}, L = {:.6e}, A = {:.6e}",
            state.time,
            state.diagnostics.length,
            state.diagnostics.area
        );
    };
    traj.stop_reason = reason;
    traj.final_state = state;
    Ok(traj)
}

/// Least-squares slope of `A(t)` over the recorded samples.
pub fn area_decay_check(traj: &FlowTrajectory) -> Result<f64> {
    const MIN: usize = 10;
    let n = traj.times.len();
    if n < MIN {
        return Err(Error::TooFewSamples { min: MIN, got: n });
    }
    let mt = traj.times.iter().sum::<f64>() / n as f64;
    let ma = traj.areas.iter().sum::<f64>() / n as f64;
    let (mut sta, mut stt) = (0.0, 0.0);
    for (t, a) in traj.times.iter().zip(&traj.areas) {
        sta += (t - mt) * (a - ma);
        stt += (t - mt) * (t - mt);
    }
    if stt == 0.0 {
        return Err(Error::TooFewSamples { min: MIN, got: 1 });
    }
    Ok(sta / stt)
}

/// The homothetic limit found by the renormalized flow. The physical curve at
/// physical time `t` is `lambda(t)` times the profile, up to translation.
#[derive(Debug, Clone, Serialize)]
pub struct SimilarityProfile {
    /// Scale factor at the last step.
    pub lambda: f64,
    pub reference_curve: ClosedCurve,
    /// `(physical time, lambda)` after every step.
    pub history: Vec<(f64, f64)>,
    /// Time elapsed in the renormalized flow.
    pub profile_time: f64,
    pub steps: usize,
    /// Max normal displacement per unit profile time at the last step.
    pub final_speed: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaleOptions {
    /// Stationarity threshold on the normal speed of the profile.
    pub tol: f64,
    /// Tolerance handed to the shrinker verification of the limit.
    pub verdict_tol: f64,
    pub max_steps: usize,
    pub policy: DtPolicy,
}

impl Default for RescaleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            verdict_tol: 1e-2,
            max_steps: 1_000_000,
            policy: DtPolicy::default(),
        }
    }
}

/// Centroid-recentered copy scaled to area `pi`, with the scale used.
fn normalize(curve: &ClosedCurve, time: f64) -> Result<(ClosedCurve, f64)> {
    let area = curve.signed_area();
    if !(area > 0.0) {
        return Err(Error::CurveCollapsed { time, area });
    }
    let s = (PI / area).sqrt();
    let c = curve.centroid();
    let pts = curve.points().iter().map(|&p| (p - c) * s).collect();
    Ok((rebuild(pts, time)?, s))
}

/// Flows with recentering and rescaling to area `pi` after every step until
/// the profile is stationary, then verifies the limit as a shrinker.
pub fn rescaled_flow(
    curve: &ClosedCurve,
    opts: &RescaleOptions,
) -> Result<(SimilarityProfile, ShrinkerReport)> {
    require_flowable(curve, true)?;
    if !curve.is_convex() {
        return Err(Error::NotConvex);
    }
    let start = if curve.spacing_ratio() > REDISTRIBUTE_RATIO {
        curve.redistribute_smooth(curve.len())?
    } else {
        curve.clone()
    };
    let (mut profile, s0) = normalize(&start, 0.0)?;
    let mut lambda = 1.0 / s0;
    let mut t_phys = 0.0;
    let mut t_prof = 0.0;
    let mut history = vec![(0.0, lambda)];
    let mut speed = f64::INFINITY;
    let mut converged = false;
    let mut steps = 0;
    while steps < opts.max_steps {
        let frenet = profile.frenet()?;
        let dt = opts.policy.dt(&profile, &frenet);
        let moved = rebuild(advect(&profile, &frenet, dt), t_phys)?;
        let (next, s) = normalize(&moved, t_phys)?;
        speed = next
            .points()
            .iter()
            .zip(profile.points())
            .zip(&frenet.normal)
            .map(|((a, b), n)| (*a - *b).dot(*n).abs())
            .fold(0.0, f64::max)
            / dt;
        t_phys += lambda * lambda * dt;
        t_prof += dt;
        lambda /= s;
        profile = next;
        if profile.spacing_ratio() > REDISTRIBUTE_RATIO {
            let (p, s2) = normalize(&profile.redistribute_smooth(profile.len())?, t_phys)?;
            profile = p;
            lambda /= s2;
        }
        steps += 1;
        history.push((t_phys, lambda));
        if speed < opts.tol {
            converged = true;
            break;
        }
    }
    log::debug!("rescaled flow: {steps} steps, speed {speed:.3e}, converged {converged}");
    let report = verify_shrinker(&profile, opts.verdict_tol)?;
    Ok((
        SimilarityProfile {
            lambda,
            reference_curve: profile,
            history,
            profile_time: t_prof,
            steps,
            final_speed: speed,
            converged,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn mean_radius(c: &ClosedCurve) -> f64 {
        c.points().iter().map(|p| p.norm()).sum::<f64>() / c.len() as f64
    }

    #[test]
    fn unit_circle_step() {
        let s = FlowState::new(shapes::circle(256, 1.0));
        let next = csf_step(&s, 1e-4).unwrap();
        assert!((mean_radius(&next.curve) - (1.0f64 - 2e-4).sqrt()).abs() < 1e-6);
        assert_eq!(next.step_count, 1);
        assert!((next.time - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn radius_two_step() {
        let s = FlowState::new(shapes::circle(256, 2.0));
        let next = csf_step(&s, 1e-4).unwrap();
        assert!((mean_radius(&next.curve) - (4.0f64 - 2e-4).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn bad_steps() {
        let s = FlowState::new(shapes::circle(256, 1.0));
        assert!(matches!(csf_step(&s, 0.0), Err(Error::InvalidInput(_))));
        assert!(matches!(csf_step(&s, 1.0), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn unit_circle_extinction() {
        let traj = run_flow(&shapes::circle(128, 1.0), &DtPolicy::default(), &StopConditions::default()).unwrap();
        assert_eq!(traj.stop_reason, StopReason::AreaFloor);
        assert!((traj.final_time() - 0.5).abs() < 2e-2);
        let slope = area_decay_check(&traj).unwrap();
        assert!((slope + 2.0 * PI).abs() < 0.01 * 2.0 * PI, "{slope}");
    }

    #[test]
    fn time_limit_and_budget() {
        let c = shapes::circle(64, 1.0);
        let stop = StopConditions {
            t_max: 0.1,
            ..StopConditions::default()
        };
        let traj = run_flow(&c, &DtPolicy::default(), &stop).unwrap();
        assert_eq!(traj.stop_reason, StopReason::TimeLimit);
        assert!((traj.final_time() - 0.1).abs() < 1e-12);
        let stop = StopConditions {
            max_steps: 5,
            ..StopConditions::default()
        };
        let traj = run_flow(&c, &DtPolicy::default(), &stop).unwrap();
        assert_eq!(traj.stop_reason, StopReason::StepBudget);
        assert_eq!(traj.len(), 6);
        assert!(matches!(area_decay_check(&traj), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        let cw = shapes::circle(64, 1.0).reversed();
        assert!(run_flow(&cw, &DtPolicy::default(), &StopConditions::default()).is_err());
        let lim = shapes::limacon(200, 0.5, 1.0);
        let lim = if lim.signed_area() < 0.0 { lim.reversed() } else { lim };
        assert!(run_flow(&lim, &DtPolicy::default(), &StopConditions::default()).is_err());
    }

    #[test]
    fn circle_is_stationary_when_rescaled() {
        let (prof, rep) = rescaled_flow(&shapes::circle(128, 1.0), &RescaleOptions::default()).unwrap();
        assert!(prof.converged);
        assert!(prof.steps <= 2);
        assert!(rep.verdict);
        assert!((prof.reference_curve.signed_area() - PI).abs() < 1e-12);
    }

    #[test]
    fn rescaled_flow_rejects_nonconvex() {
        assert!(matches!(
            rescaled_flow(&shapes::dented_circle(128, 0.3), &RescaleOptions::default()),
            Err(Error::NotConvex)
        ));
    }
}
