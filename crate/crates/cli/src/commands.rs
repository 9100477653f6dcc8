use std::f64::consts::TAU;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use curveflow::bonnesen::{bonnesen_chain, bonnesen_chain_with_tol, BonnesenReport};
use curveflow::flow::{area_decay_check, rescaled_flow, run_flow, DtPolicy, RescaleOptions, StopConditions, StopReason};
use curveflow::io::{self as cio, fmt_num};
use curveflow::shapes::TrigSupport;
use curveflow::shrinker::ode::{classification_from_entries, period_entry, OdeOptions};
use curveflow::shrinker::{verify_shrinker, ShrinkerReport};
use curveflow::symmetrize::{find_bisecting_chord, symmetrize};
use curveflow::{ClosedCurve, SupportFunction, Vec2};

use crate::config::{Format, RunConfig};
use crate::failure::{Failure, Verdict};

type Outcome = Result<Verdict, Failure>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a RunConfig,
    report: T,
}

fn to_json<T: Serialize>(cfg: &RunConfig, report: T) -> Result<Vec<u8>, Failure> {
    let mut buf = serde_json::to_vec_pretty(&Envelope { config: cfg, report })
        .map_err(|e| Failure::Input(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Output directory, created on first use.
fn out_dir(cfg: &RunConfig) -> Result<Option<PathBuf>, Failure> {
    match &cfg.output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn write_bytes(path: PathBuf, bytes: &[u8]) -> Result<(), Failure> {
    File::create(&path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn stdout(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn curve_csv(c: &ClosedCurve) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    cio::format_curve(&mut buf, c)?;
    Ok(buf)
}

fn svg(frame: &ClosedCurve, curves: &[&ClosedCurve]) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    cio::format_svg(&mut buf, frame, curves)?;
    Ok(buf)
}

fn unsupported(cfg: &RunConfig) -> Failure {
    Failure::Input(format!(
        "{} does not produce {:?} output",
        cfg.command, cfg.format
    ))
}

fn read_input(cfg: &RunConfig) -> Result<ClosedCurve, Failure> {
    let path = cfg.require_input()?;
    cio::read_curve(path).map_err(|e| match e {
        curveflow::Error::Io(io) => Failure::Input(format!("{}: {io}", path.display())),
        other => other.into(),
    })
}

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Input(e.to_string()))
}

/// Applies `--recenter` and returns the shift that was subtracted.
fn centered(cfg: &RunConfig, curve: ClosedCurve) -> (ClosedCurve, Vec2) {
    if cfg.recenter {
        curve.recentered()
    } else {
        (curve, Vec2::ZERO)
    }
}

fn support_of(curve: &ClosedCurve, grid: usize) -> Result<SupportFunction, Failure> {
    SupportFunction::from_curve(curve, grid).map_err(|e| match e {
        curveflow::Error::OriginOutside => Failure::Input(format!(
            "{e}; pass --recenter to use the centroid as origin"
        )),
        other => other.into(),
    })
}

// -- flow ----------------------------------------------------------------------

#[derive(Serialize)]
struct FlowSummary {
    stop_reason: StopReason,
    steps: usize,
    initial_area: f64,
    initial_length: f64,
    final_time: f64,
    final_area: f64,
    final_length: f64,
    final_ratio: f64,
    /// `final_time + final_area / 2 pi`.
    extinction_estimate: f64,
    /// `A0 / 2 pi`.
    extinction_law: f64,
    area_slope: Option<f64>,
}

pub fn flow(cfg: &RunConfig, rescale: bool, until_extinct: bool) -> Outcome {
    let curve = read_input(cfg)?;
    let policy = DtPolicy {
        safety: cfg.dt_safety,
        ..DtPolicy::default()
    };
    if rescale {
        return flow_rescaled(cfg, &curve, policy);
    }
    let snapshot_every = match (cfg.format, cfg.snapshot_every) {
        (Format::Svg, 0) => 500,
        (_, n) => n,
    };
    let stop = StopConditions {
        area_floor: cfg.area_floor,
        t_max: if until_extinct {
            f64::INFINITY
        } else {
            cfg.t_max.unwrap_or(f64::INFINITY)
        },
        snapshot_every,
        ..StopConditions::default()
    };
    let traj = run_flow(&curve, &policy, &stop)?;
    let fin = &traj.final_state;
    let summary = FlowSummary {
        stop_reason: traj.stop_reason,
        steps: fin.step_count,
        initial_area: traj.areas[0],
        initial_length: traj.lengths[0],
        final_time: fin.time,
        final_area: fin.diagnostics.area,
        final_length: fin.diagnostics.length,
        final_ratio: fin.diagnostics.ratio,
        extinction_estimate: fin.time + fin.diagnostics.area / TAU,
        extinction_law: traj.areas[0] / TAU,
        area_slope: area_decay_check(&traj).ok(),
    };
    log::info!(
        "flow stopped ({:?}) at t = {:.6} after {} steps",
        summary.stop_reason,
        summary.final_time,
        summary.steps
    );
    let series = || -> Result<Vec<u8>, Failure> {
        let mut buf = Vec::new();
        cio::format_flow_series(&mut buf, &traj, cfg.stride)?;
        Ok(buf)
    };
    let picture = || {
        let mut curves: Vec<&ClosedCurve> = traj.snapshots.iter().map(|(_, c)| c).collect();
        curves.push(&fin.curve);
        svg(&curve, &curves)
    };
    match (out_dir(cfg)?, cfg.format) {
        (Some(dir), Format::Json) => write_bytes(dir.join("flow.json"), &to_json(cfg, &summary)?)?,
        (Some(dir), format) => {
            write_bytes(dir.join("trajectory.csv"), &series()?)?;
            write_bytes(dir.join("final.csv"), &curve_csv(&fin.curve)?)?;
            write_bytes(dir.join("flow.json"), &to_json(cfg, &summary)?)?;
            if format == Format::Svg {
                write_bytes(dir.join("snapshots.svg"), &picture()?)?;
            }
        }
        (None, Format::Json) => stdout(&to_json(cfg, &summary)?)?,
        (None, Format::Csv) => stdout(&series()?)?,
        (None, Format::Svg) => stdout(&picture()?)?,
    }
    Ok(Verdict::Holds)
}

#[derive(Serialize)]
struct RescaleSummary {
    converged: bool,
    steps: usize,
    profile_time: f64,
    physical_time: f64,
    lambda: f64,
    final_speed: f64,
    shrinker: ShrinkerReport,
    equality_gap: Option<f64>,
}

fn flow_rescaled(cfg: &RunConfig, curve: &ClosedCurve, policy: DtPolicy) -> Outcome {
    let opts = RescaleOptions {
        verdict_tol: cfg.tol,
        policy,
        ..RescaleOptions::default()
    };
    let (prof, rep) = rescaled_flow(curve, &opts)?;
    let summary = RescaleSummary {
        converged: prof.converged,
        steps: prof.steps,
        profile_time: prof.profile_time,
        physical_time: prof.history.last().map_or(0.0, |h| h.0),
        lambda: prof.lambda,
        final_speed: prof.final_speed,
        equality_gap: bonnesen_chain(&prof.reference_curve).ok().map(|b| b.equality_gap),
        shrinker: rep,
    };
    let verdict = Verdict::from_bool(summary.converged && summary.shrinker.verdict);
    let profile = &prof.reference_curve;
    match (out_dir(cfg)?, cfg.format) {
        (Some(dir), Format::Json) => write_bytes(dir.join("flow.json"), &to_json(cfg, &summary)?)?,
        (Some(dir), format) => {
            write_bytes(dir.join("profile.csv"), &curve_csv(profile)?)?;
            write_bytes(dir.join("flow.json"), &to_json(cfg, &summary)?)?;
            if format == Format::Svg {
                write_bytes(dir.join("profile.svg"), &svg(profile, &[profile])?)?;
            }
        }
        (None, Format::Json) => stdout(&to_json(cfg, &summary)?)?,
        (None, Format::Csv) => stdout(&curve_csv(profile)?)?,
        (None, Format::Svg) => stdout(&svg(profile, &[profile])?)?,
    }
    Ok(verdict)
}

// -- shrink-verify -----------------------------------------------------------------

pub fn shrink_verify(cfg: &RunConfig) -> Outcome {
    if cfg.format != Format::Json {
        return Err(unsupported(cfg));
    }
    let curve = read_input(cfg)?;
    let rep = verify_shrinker(&curve, cfg.tol)?;
    let verdict = Verdict::from_bool(rep.verdict);
    let json = to_json(cfg, &rep)?;
    match out_dir(cfg)? {
        Some(dir) => write_bytes(dir.join("shrink_verify.json"), &json)?,
        None => stdout(&json)?,
    }
    Ok(verdict)
}

// -- ode-shoot -----------------------------------------------------------------------

pub fn ode_shoot(cfg: &RunConfig) -> Outcome {
    if cfg.format == Format::Svg {
        return Err(unsupported(cfg));
    }
    if let Some(bad) = cfg.amplitudes.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Failure::Input(format!("amplitude must be positive, got {bad}")));
    }
    let opts = OdeOptions::with_tol(1e-12);
    let entries = pool(cfg)?.install(|| {
        cfg.amplitudes
            .par_iter()
            .map(|&p0| period_entry(p0, &opts, cfg.tol))
            .collect::<curveflow::Result<Vec<_>>>()
    })?;
    let report = classification_from_entries(entries, cfg.tol);
    let periods: Vec<f64> = report.entries.iter().filter_map(|e| e.period).collect();
    let summary = if report.only_circle_closes_once {
        format!(
            "no period equals 2pi within {:e}: {} amplitudes, ratios in [{:.6}, {:.6}]",
            cfg.tol,
            report.entries.len(),
            periods.iter().copied().fold(f64::INFINITY, f64::min) / TAU,
            periods.iter().copied().fold(f64::NEG_INFINITY, f64::max) / TAU,
        )
    } else {
        format!(
            "period equals 2pi within {:e} at p0 = {:?}",
            cfg.tol, report.winding_one_closed
        )
    };
    let verdict = Verdict::from_bool(report.only_circle_closes_once);
    let csv = || -> Result<Vec<u8>, Failure> {
        let mut buf = Vec::new();
        cio::format_periods(&mut buf, &report.entries)?;
        Ok(buf)
    };
    match (out_dir(cfg)?, cfg.format) {
        (Some(dir), format) => {
            if format == Format::Csv {
                write_bytes(dir.join("periods.csv"), &csv()?)?;
            }
            write_bytes(dir.join("ode_shoot.json"), &to_json(cfg, &report)?)?;
        }
        (None, Format::Json) => stdout(&to_json(cfg, &report)?)?,
        (None, _) => stdout(&csv()?)?,
    }
    eprintln!("{summary}");
    Ok(verdict)
}

// -- bonnesen ----------------------------------------------------------------------

#[derive(Serialize)]
struct BatteryEntry {
    seed: u64,
    #[serde(flatten)]
    report: BonnesenReport,
}

#[derive(Serialize)]
struct Battery {
    harmonics: usize,
    all_chains_hold: bool,
    worst_equality_gap: f64,
    ovals: Vec<BatteryEntry>,
}

const BONNESEN_HEADER: &str = "seed,area,length,inradius,circumradius,t1,t2,equality_gap,chain_ok";

fn bonnesen_row(out: &mut Vec<u8>, seed: Option<u64>, r: &BonnesenReport) -> io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        seed.map(|s| s.to_string()).unwrap_or_default(),
        fmt_num(r.area),
        fmt_num(r.length),
        fmt_num(r.inradius),
        fmt_num(r.circumradius),
        fmt_num(r.t1),
        fmt_num(r.t2),
        fmt_num(r.equality_gap),
        r.chain_ok
    )
}

pub fn bonnesen(cfg: &RunConfig) -> Outcome {
    if cfg.format == Format::Svg {
        return Err(unsupported(cfg));
    }
    let mut csv = format!("{BONNESEN_HEADER}\n").into_bytes();
    let (json, verdict) = if cfg.input.is_some() {
        let curve = read_input(cfg)?;
        let rep = bonnesen_chain_with_tol(&curve, cfg.tol * curve.diameter())?;
        bonnesen_row(&mut csv, None, &rep)?;
        let ok = rep.chain_ok;
        (to_json(cfg, &rep)?, ok)
    } else {
        const HARMONICS: usize = 5;
        let ovals = pool(cfg)?.install(|| {
            (0..cfg.samples as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = cfg.seed.wrapping_add(i);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let curve = TrigSupport::random_oval(&mut rng, HARMONICS).curve(cfg.grid);
                    let report = bonnesen_chain_with_tol(&curve, cfg.tol * curve.diameter())?;
                    Ok(BatteryEntry { seed, report })
                })
                .collect::<curveflow::Result<Vec<_>>>()
        })?;
        for e in &ovals {
            bonnesen_row(&mut csv, Some(e.seed), &e.report)?;
        }
        let battery = Battery {
            harmonics: HARMONICS,
            all_chains_hold: ovals.iter().all(|e| e.report.chain_ok),
            worst_equality_gap: ovals
                .iter()
                .map(|e| e.report.equality_gap)
                .fold(0.0, f64::max),
            ovals,
        };
        let ok = battery.all_chains_hold;
        log::info!("{} ovals, chain holds on all: {ok}", battery.ovals.len());
        (to_json(cfg, &battery)?, ok)
    };
    match (out_dir(cfg)?, cfg.format) {
        (Some(dir), format) => {
            if format == Format::Csv {
                write_bytes(dir.join("bonnesen.csv"), &csv)?;
            }
            write_bytes(dir.join("bonnesen.json"), &json)?;
        }
        (None, Format::Json) => stdout(&json)?,
        (None, _) => stdout(&csv)?,
    }
    Ok(Verdict::from_bool(verdict))
}

// -- symmetrize ------------------------------------------------------------------------

#[derive(Serialize)]
struct SymmetrizeReport {
    origin_shift: Vec2,
    nodes: usize,
    theta0: f64,
    chord: [Vec2; 2],
    omega0: Vec2,
    sigma: f64,
    area: f64,
    /// `|sigma - A/2| / A`.
    bisection_error: f64,
    junction_tangent_gap: f64,
    symmetry_defect: f64,
    areas: [f64; 2],
    lengths: [f64; 2],
    convex: [bool; 2],
}

pub fn symmetrize_cmd(cfg: &RunConfig) -> Outcome {
    let (curve, shift) = centered(cfg, read_input(cfg)?);
    let p = support_of(&curve, cfg.grid)?;
    let cut = find_bisecting_chord(&p, cfg.tol)?;
    let pair = symmetrize(&p, &cut)?;
    let report = SymmetrizeReport {
        origin_shift: shift,
        nodes: p.len(),
        theta0: cut.theta,
        chord: cut.endpoints,
        omega0: cut.midpoint,
        sigma: cut.sigma,
        area: cut.area,
        bisection_error: (cut.sigma - 0.5 * cut.area).abs() / cut.area,
        junction_tangent_gap: pair.junction_tangent_gap,
        symmetry_defect: pair.symmetry_defect(),
        areas: pair.areas,
        lengths: pair.lengths,
        convex: [pair.curve1.is_convex(), pair.curve2.is_convex()],
    };
    let picture = || svg(&pair.curve1, &[&curve, &pair.curve1, &pair.curve2]);
    match (out_dir(cfg)?, cfg.format) {
        (Some(dir), format) => {
            if format != Format::Json {
                write_bytes(dir.join("symmetrized_1.csv"), &curve_csv(&pair.curve1)?)?;
                write_bytes(dir.join("symmetrized_2.csv"), &curve_csv(&pair.curve2)?)?;
            }
            if format == Format::Svg {
                write_bytes(dir.join("symmetrize.svg"), &picture()?)?;
            }
            write_bytes(dir.join("symmetrize.json"), &to_json(cfg, &report)?)?;
        }
        (None, Format::Svg) => stdout(&picture()?)?,
        // Two curves do not fit one stream; the sidecar stands in for them.
        (None, _) => stdout(&to_json(cfg, &report)?)?,
    }
    Ok(Verdict::Holds)
}

// -- support ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SupportReport {
    origin_shift: Vec2,
    nodes: usize,
    cauchy_length: f64,
    polygon_length: f64,
    reconstructed_length: f64,
    area: f64,
    width_min: f64,
    width_max: f64,
    asymmetry: f64,
    min_radius_of_curvature: f64,
}

pub fn support(cfg: &RunConfig) -> Outcome {
    let (curve, shift) = centered(cfg, read_input(cfg)?);
    let p = support_of(&curve, cfg.grid)?;
    let rebuilt = p.to_curve()?;
    let width = p.width();
    let report = SupportReport {
        origin_shift: shift,
        nodes: p.len(),
        cauchy_length: p.cauchy_length(),
        polygon_length: curve.length(),
        reconstructed_length: rebuilt.length(),
        area: p.area(),
        width_min: width.min(),
        width_max: width.max(),
        asymmetry: p.asymmetry(),
        min_radius_of_curvature: p
            .radius_of_curvature()
            .into_iter()
            .fold(f64::INFINITY, f64::min),
    };
    let csv = || -> Result<Vec<u8>, Failure> {
        let mut buf = Vec::new();
        cio::format_support(&mut buf, &p)?;
        Ok(buf)
    };
    let picture = || svg(&curve, &[&curve, &rebuilt]);
    match (out_dir(cfg)?, cfg.format) {
        (Some(dir), format) => {
            if format != Format::Json {
                write_bytes(dir.join("support.csv"), &csv()?)?;
            }
            if format == Format::Svg {
                write_bytes(dir.join("support.svg"), &picture()?)?;
            }
            write_bytes(dir.join("support.json"), &to_json(cfg, &report)?)?;
        }
        (None, Format::Csv) => stdout(&csv()?)?,
        (None, Format::Json) => stdout(&to_json(cfg, &report)?)?,
        (None, Format::Svg) => stdout(&picture()?)?,
    }
    Ok(Verdict::Holds)
}

// -- generate --------------------------------------------------------------------------

pub fn generate(cfg: &RunConfig, name: &str, curve: ClosedCurve) -> Outcome {
    let bytes = match cfg.format {
        Format::Csv => curve_csv(&curve)?,
        Format::Svg => svg(&curve, &[&curve])?,
        Format::Json => return Err(unsupported(cfg)),
    };
    match out_dir(cfg)? {
        Some(dir) => {
            let ext = if cfg.format == Format::Svg { "svg" } else { "csv" };
            write_bytes(dir.join(format!("{name}.{ext}")), &bytes)?;
        }
        None => stdout(&bytes)?,
    }
    Ok(Verdict::Holds)
}
