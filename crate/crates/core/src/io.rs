//! CSV, JSON and SVG input/output.
//!
//! Curve files hold one `x,y` pair per line and support files one `theta,p`
//! pair per line, both without a header. Blank lines and lines starting with
//! `#` are ignored. Numbers are written with 17 significant digits.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::geom::Vec2;
use crate::shrinker::ode::{OdeTrajectory, PeriodEntry};
use crate::support::{DerivativeMode, SupportFunction};

/// Formats with full round-trip precision.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

fn parse_pairs<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for rec in reader(r).records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("{s:?}: {e}"),
            })
        };
        out.push((num(&rec[0])?, num(&rec[1])?));
    }
    Ok(out)
}

pub fn parse_curve<R: Read>(r: R) -> Result<ClosedCurve> {
    ClosedCurve::from_xy(parse_pairs(r)?)
}

pub fn read_curve(path: impl AsRef<Path>) -> Result<ClosedCurve> {
    parse_curve(File::open(path)?)
}

pub fn format_curve<W: Write>(w: W, curve: &ClosedCurve) -> Result<()> {
    let mut w = BufWriter::new(w);
    for p in curve.points() {
        writeln!(w, "{},{}", fmt_num(p.x), fmt_num(p.y))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(path: impl AsRef<Path>, curve: &ClosedCurve) -> Result<()> {
    format_curve(File::create(path)?, curve)
}

/// Reads `theta,p` rows; the angles must be the uniform grid `2 pi k / N`.
pub fn parse_support<R: Read>(r: R, mode: DerivativeMode) -> Result<SupportFunction> {
    let rows = parse_pairs(r)?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidGrid("empty support file".into()));
    }
    let h = TAU / n as f64;
    for (k, (theta, _)) in rows.iter().enumerate() {
        if (theta - k as f64 * h).abs() > 1e-9 {
            return Err(Error::InvalidGrid(format!(
                "row {}: theta = {theta} is not on the uniform grid of {n} nodes",
                k + 1
            )));
        }
    }
    SupportFunction::with_mode(rows.into_iter().map(|(_, p)| p).collect(), mode)
}

pub fn read_support(path: impl AsRef<Path>, mode: DerivativeMode) -> Result<SupportFunction> {
    parse_support(File::open(path)?, mode)
}

pub fn format_support<W: Write>(w: W, p: &SupportFunction) -> Result<()> {
    let mut w = BufWriter::new(w);
    for (k, v) in p.values().iter().enumerate() {
        writeln!(w, "{},{}", fmt_num(p.theta(k)), fmt_num(*v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_support(path: impl AsRef<Path>, p: &SupportFunction) -> Result<()> {
    format_support(File::create(path)?, p)
}

/// `theta,p,dp,energy` with a header row.
pub fn format_ode_trajectory<W: Write>(w: W, t: &OdeTrajectory) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "theta,p,dp,energy")?;
    for i in 0..t.len() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_num(t.theta[i]),
            fmt_num(t.p[i]),
            fmt_num(t.dp[i]),
            fmt_num(t.energy[i])
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `t,L,A,ratio` with a header row, every `stride`-th sample plus the last.
pub fn format_flow_series<W: Write>(w: W, t: &FlowTrajectory, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let mut w = BufWriter::new(w);
    writeln!(w, "t,L,A,ratio")?;
    let last = t.len() - 1;
    for i in (0..t.len()).filter(|&i| i % stride == 0 || i == last) {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_num(t.times[i]),
            fmt_num(t.lengths[i]),
            fmt_num(t.areas[i]),
            fmt_num(t.ratios[i])
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `p0,period,ratio_to_2pi` with a header row; the constant solution has
/// empty period fields.
pub fn format_periods<W: Write>(w: W, entries: &[PeriodEntry]) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "p0,period,ratio_to_2pi")?;
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    for e in entries {
        writeln!(w, "{},{},{}", fmt_num(e.p0), opt(e.period), opt(e.ratio_to_2pi))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// SVG with one closed path per curve. The unit viewBox is mapped onto the
/// bounding box of `frame` (typically the initial curve).
pub fn format_svg<W: Write>(w: W, frame: &ClosedCurve, curves: &[&ClosedCurve]) -> Result<()> {
    let (lo, hi) = bbox(frame);
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let map = |p: Vec2| Vec2::new((p.x - lo.x) / span, 1.0 - (p.y - lo.y) / span);
    let mut w = BufWriter::new(w);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.05 -0.05 1.1 1.1" width="600" height="600">"#
    )?;
    for c in curves {
        let mut d = String::new();
        for (i, p) in c.points().iter().enumerate() {
            let q = map(*p);
            d.push_str(if i == 0 { "M" } else { " L" });
            d.push_str(&format!("{:.6} {:.6}", q.x, q.y));
        }
        d.push_str(" Z");
        writeln!(
            w,
            r#"  <path d="{d}" fill="none" stroke="black" stroke-width="0.002"/>"#
        )?;
    }
    writeln!(w, "</svg>")?;
    w.flush()?;
    Ok(())
}

pub fn write_svg(path: impl AsRef<Path>, frame: &ClosedCurve, curves: &[&ClosedCurve]) -> Result<()> {
    format_svg(File::create(path)?, frame, curves)
}

fn bbox(c: &ClosedCurve) -> (Vec2, Vec2) {
    c.points().iter().fold(
        (
            Vec2::new(f64::INFINITY, f64::INFINITY),
            Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn curve_round_trip_is_exact() {
        let c = shapes::ellipse(37, 2.0, 1.0);
        let mut buf = Vec::new();
        format_curve(&mut buf, &c).unwrap();
        let back = parse_curve(buf.as_slice()).unwrap();
        assert_eq!(back.points(), c.points());
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let text = "# square\n0,0\n\n1, 0\n1,1\n0,1\n";
        let c = parse_curve(text.as_bytes()).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn bad_rows_report_the_line() {
        match parse_curve("0,0\n1,x\n0,1\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_curve("0,0\n1,0,2\n".as_bytes()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_curve("0,0\n1,0\n".as_bytes()),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn support_round_trip() {
        let p = SupportFunction::from_fn(32, DerivativeMode::Centered, |t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap();
        let mut buf = Vec::new();
        format_support(&mut buf, &p).unwrap();
        let back = parse_support(buf.as_slice(), DerivativeMode::Centered).unwrap();
        assert_eq!(back.values(), p.values());
    }

    #[test]
    fn support_grid_is_checked() {
        let text = "0,1\n0.5,1\n";
        assert!(matches!(
            parse_support(text.as_bytes(), DerivativeMode::Centered),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn svg_has_one_path_per_curve() {
        let c = shapes::circle(16, 1.0);
        let small = c.scaled(0.5);
        let mut buf = Vec::new();
        format_svg(&mut buf, &c, &[&c, &small]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.matches("<path").count(), 2);
    }
}
