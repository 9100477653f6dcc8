//! `curveflow`: curve shortening flow, shrinker checks and convex-geometry
//! reports from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure, 3 verdict
//! false, 4 convexity precondition failed.

mod commands;
mod config;
mod failure;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curveflow::{shapes, ClosedCurve};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use config::{Defaults, Format, Knobs, RunConfig};
use failure::{Failure, Verdict};

#[derive(Parser)]
#[command(name = "curveflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    knobs: Knobs,
}

#[derive(Subcommand)]
enum Command {
    /// Run curve shortening flow on a counter-clockwise simple curve.
    Flow {
        /// Ignore any time limit and run to the area floor.
        #[arg(long)]
        until_extinct: bool,
        /// Renormalize to area pi after every step and verify the limit
        /// profile as a shrinker.
        #[arg(long)]
        rescale: bool,
    },
    /// Check `kappa + <gamma, n> = 0` and its consequences on a curve.
    ShrinkVerify,
    /// Shoot the shrinker support ODE and tabulate periods.
    OdeShoot,
    /// Bonnesen chain `t1 <= r <= R <= t2` for one curve, or for a battery of
    /// random ovals when no input is given.
    Bonnesen,
    /// Cut a convex curve by an area-bisecting chord and glue each half to
    /// its reflection.
    Symmetrize,
    /// Sample the support function of a convex curve.
    Support,
    /// Write a sample curve.
    Generate {
        #[command(subcommand)]
        shape: Shape,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum Shape {
    Circle {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    Ellipse {
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
    Square {
        #[arg(long, default_value_t = 2.0)]
        side: f64,
    },
    RoundedSquare {
        #[arg(long, default_value_t = 2.0)]
        side: f64,
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
    },
    LShape,
    Limacon {
        #[arg(long, default_value_t = 1.0)]
        offset: f64,
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
    },
    /// Circle pushed in on one side; not convex for large depths.
    Dented {
        #[arg(long, default_value_t = 0.3)]
        depth: f64,
    },
    /// Circle traversed twice (turning number 2).
    DoubledCircle {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Random oval from `--seed`.
    Oval {
        #[arg(long, default_value_t = 5)]
        harmonics: usize,
    },
}

impl Shape {
    fn name(self) -> &'static str {
        match self {
            Shape::Circle { .. } => "circle",
            Shape::Ellipse { .. } => "ellipse",
            Shape::Square { .. } => "square",
            Shape::RoundedSquare { .. } => "rounded_square",
            Shape::LShape => "l_shape",
            Shape::Limacon { .. } => "limacon",
            Shape::Dented { .. } => "dented",
            Shape::DoubledCircle { .. } => "doubled_circle",
            Shape::Oval { .. } => "oval",
        }
    }

    fn build(self, n: usize, seed: u64) -> Result<ClosedCurve, Failure> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Failure::Input(format!("--{name} must be positive, got {v}")))
            }
        };
        Ok(match self {
            Shape::Circle { radius } => shapes::circle(n, positive("radius", radius)?),
            Shape::Ellipse { a, b } => shapes::ellipse(n, positive("a", a)?, positive("b", b)?),
            Shape::Square { side } => shapes::square(positive("side", side)?).resample_arclength(n)?,
            Shape::RoundedSquare { side, radius } => {
                if !(positive("radius", radius)? * 2.0 < positive("side", side)?) {
                    return Err(Failure::Input("--radius must be below half the side".into()));
                }
                shapes::rounded_square(n, side, radius)
            }
            Shape::LShape => shapes::l_shape().resample_arclength(n)?,
            Shape::Limacon { offset, amplitude } => {
                if !(amplitude.abs() < positive("offset", offset)?) {
                    return Err(Failure::Input("--amplitude must be below --offset".into()));
                }
                shapes::limacon(n, offset, amplitude)
            }
            Shape::Dented { depth } => {
                if !(depth > 0.0 && depth < 1.0) {
                    return Err(Failure::Input(format!("--depth must lie in (0, 1), got {depth}")));
                }
                shapes::dented_circle(n, depth)
            }
            Shape::DoubledCircle { radius } => shapes::doubled_circle(n, positive("radius", radius)?),
            Shape::Oval { harmonics } => {
                if harmonics < 2 {
                    return Err(Failure::Input("--harmonics must be at least 2".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                shapes::TrigSupport::random_oval(&mut rng, harmonics).curve(n)
            }
        })
    }
}

fn defaults(command: &Command) -> (&'static str, Defaults) {
    let d = |grid, tol, format| Defaults { grid, tol, format };
    match command {
        Command::Flow { .. } => ("flow", d(256, 1e-2, Format::Csv)),
        Command::ShrinkVerify => ("shrink-verify", d(256, 1e-3, Format::Json)),
        Command::OdeShoot => ("ode-shoot", d(256, 1e-3, Format::Csv)),
        Command::Bonnesen => ("bonnesen", d(512, 1e-6, Format::Json)),
        Command::Symmetrize => ("symmetrize", d(256, 1e-6, Format::Csv)),
        Command::Support => ("support", d(256, 1e-6, Format::Csv)),
        Command::Generate { .. } => ("generate", d(256, 1e-6, Format::Csv)),
    }
}

fn run(cli: Cli) -> Result<Verdict, Failure> {
    let (name, defaults) = defaults(&cli.command);
    let cfg = RunConfig::resolve(name, cli.knobs, defaults)?;
    log::debug!("effective config: {cfg:?}");
    match cli.command {
        Command::Flow {
            until_extinct,
            rescale,
        } => commands::flow(&cfg, rescale, until_extinct),
        Command::ShrinkVerify => commands::shrink_verify(&cfg),
        Command::OdeShoot => commands::ode_shoot(&cfg),
        Command::Bonnesen => commands::bonnesen(&cfg),
        Command::Symmetrize => commands::symmetrize_cmd(&cfg),
        Command::Support => commands::support(&cfg),
        Command::Generate { shape } => {
            let curve = shape.build(cfg.grid, cfg.seed)?;
            commands::generate(&cfg, shape.name(), curve)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CURVEFLOW_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(v) => ExitCode::from(v.exit_code()),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
