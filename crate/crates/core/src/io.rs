//! Plain-text file formats.
//!
//! * Circle lists: one `x y r` per line.
//! * Pair files: `delta` and `t` header lines, then `W x y r` and `B x y r`
//!   lines for the two sides.
//! * Point lists: one `x y z` per line.
//! * Witness, report, scaling and maximal-function CSV tables.
//!
//! Blank lines and lines starting with `#` are ignored on input.

use std::io::{BufRead, Write};

use crate::error::{Result, TangenciaError};
use crate::experiments::{ScalingResult, Shape};
use crate::geometry::Circle;
use crate::lifting::Point3;
use crate::params::ParamSet;
use crate::tangency::{BipartitePair, IncidenceReport};

/// `x` with 12 significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

fn content_lines<R: BufRead>(input: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    input.lines().enumerate().map(|(i, l)| (i + 1, l))
}

fn parse_floats(line: usize, fields: &[&str], want: usize) -> Result<Vec<f64>> {
    if fields.len() != want {
        return Err(TangenciaError::Parse {
            line,
            msg: format!("expected {want} numbers, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>().map_err(|e| TangenciaError::Parse {
                line,
                msg: format!("{f:?}: {e}"),
            })
        })
        .collect()
}

fn circle_at(line: usize, v: &[f64]) -> Result<Circle> {
    Circle::new(v[0], v[1], v[2]).map_err(|e| TangenciaError::Parse { line, msg: e.to_string() })
}

pub fn read_circles<R: BufRead>(input: R) -> Result<Vec<Circle>> {
    let mut out = Vec::new();
    for (no, line) in content_lines(input) {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        out.push(circle_at(no, &parse_floats(no, &fields, 3)?)?);
    }
    Ok(out)
}

pub fn write_circles<W: Write>(mut out: W, circles: &[Circle]) -> Result<()> {
    for c in circles {
        writeln!(out, "{} {} {}", sig12(c.x()), sig12(c.y()), sig12(c.radius()))?;
    }
    Ok(())
}

/// Reads a pair file. Scales not given in the file come from `base`.
pub fn read_pair<R: BufRead>(input: R, base: &ParamSet) -> Result<BipartitePair> {
    let mut params = *base;
    let (mut white, mut black) = (Vec::new(), Vec::new());
    for (no, line) in content_lines(input) {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match fields[0] {
            "delta" => params.delta = parse_floats(no, &fields[1..], 1)?[0],
            "t" => params.t = parse_floats(no, &fields[1..], 1)?[0],
            "W" => white.push(circle_at(no, &parse_floats(no, &fields[1..], 3)?)?),
            "B" => black.push(circle_at(no, &parse_floats(no, &fields[1..], 3)?)?),
            other => {
                return Err(TangenciaError::Parse {
                    line: no,
                    msg: format!("unknown record {other:?}"),
                })
            }
        }
    }
    params.validate()?;
    Ok(BipartitePair::new(white, black, params))
}

pub fn write_pair<W: Write>(mut out: W, pair: &BipartitePair) -> Result<()> {
    writeln!(out, "# bipartite pair: {} white, {} black", pair.m(), pair.n())?;
    writeln!(out, "delta {}", sig12(pair.params.delta))?;
    writeln!(out, "t {}", sig12(pair.params.t))?;
    for (tag, side) in [("W", &pair.white), ("B", &pair.black)] {
        for c in side {
            writeln!(out, "{tag} {} {} {}", sig12(c.x()), sig12(c.y()), sig12(c.radius()))?;
        }
    }
    Ok(())
}

pub fn read_points<R: BufRead>(input: R) -> Result<Vec<Point3>> {
    let mut out = Vec::new();
    for (no, line) in content_lines(input) {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let v = parse_floats(no, &fields, 3)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(TangenciaError::Parse {
                line: no,
                msg: "non-finite coordinate".into(),
            });
        }
        out.push([v[0], v[1], v[2]]);
    }
    Ok(out)
}

pub fn write_points<W: Write>(mut out: W, pts: &[Point3]) -> Result<()> {
    for p in pts {
        writeln!(out, "{} {} {}", sig12(p[0]), sig12(p[1]), sig12(p[2]))?;
    }
    Ok(())
}

pub const WITNESS_HEADER: &str = "cx,cy,r,theta,delta,t,mu_count,nu_count";
pub const REPORT_HEADER: &str = "method,m,n,delta,t,rect_count,incidences,delta_evals,elapsed_ms";
pub const SCALING_HEADER: &str = "kind,m,n,delta,rect_count,incidences,delta_evals,trials,error";
pub const MAXIMAL_HEADER: &str = "shape,delta,p,grid_step,ratio";

pub fn write_witness_csv<W: Write>(mut out: W, report: &IncidenceReport) -> Result<()> {
    writeln!(out, "{WITNESS_HEADER}")?;
    for (r, &(mu, nu)) in report.witness.iter().zip(&report.witness_counts) {
        let b = r.base();
        writeln!(
            out,
            "{},{},{},{},{},{},{mu},{nu}",
            sig12(b.x()),
            sig12(b.y()),
            sig12(b.radius()),
            sig12(r.anchor()),
            sig12(r.delta()),
            sig12(r.t()),
        )?;
    }
    Ok(())
}

pub fn report_row(report: &IncidenceReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        report.method.as_str(),
        report.m,
        report.n,
        sig12(report.delta),
        sig12(report.t),
        report.rect_count,
        report.incidence_triples,
        report.delta_evals,
        sig12(report.elapsed.as_secs_f64() * 1e3),
    )
}

pub fn write_report_csv<W: Write>(mut out: W, reports: &[IncidenceReport]) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", report_row(r))?;
    }
    Ok(())
}

/// Rows in input order, then a `#` line with the fitted exponent and
/// residual (`none` when the fit is degenerate).
pub fn write_scaling_csv<W: Write>(mut out: W, res: &ScalingResult) -> Result<()> {
    writeln!(out, "{SCALING_HEADER}")?;
    for r in &res.rows {
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{err}",
            r.kind.as_str(),
            r.m,
            r.n,
            sig12(r.delta),
            sig12(r.rect_count),
            sig12(r.incidences),
            sig12(r.delta_evals),
            r.trials,
        )?;
    }
    let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), sig12);
    writeln!(out, "# fitted_exponent={} residual={}", show(res.fitted_exponent), show(res.residual))?;
    Ok(())
}

pub fn write_maximal_csv<W: Write>(mut out: W, shape: Shape, delta: f64, p: f64, grid_step: f64, ratio: f64) -> Result<()> {
    writeln!(out, "{MAXIMAL_HEADER}")?;
    writeln!(out, "{},{},{},{},{}", shape.as_str(), sig12(delta), sig12(p), sig12(grid_step), sig12(ratio))?;
    Ok(())
}
