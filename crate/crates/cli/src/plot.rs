use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use gpp_core::oracle::{enumerate_paths, DEFAULT_CAP};
use gpp_core::{GppInstance, Rational};
use num_traits::{ToPrimitive, Zero};

use crate::commands::{read_instance, read_table};
use crate::files::{format_rational, parse_rational, Invalid};
use crate::PlotArgs;

/// Sampled curves: one column per path (possibly none) plus the envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub xs: Vec<Rational>,
    pub labels: Vec<String>,
    /// `curves[j][i]` is curve `j` at `xs[i]`.
    pub curves: Vec<Vec<Rational>>,
    pub envelope: Vec<Rational>,
}

pub fn parse_range(s: &str) -> Result<(Rational, Rational)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Invalid::new("InvalidRange", format!("expected LO:HI, got {s:?}")))?;
    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
    if lo >= hi {
        return Err(Invalid::new("InvalidRange", format!("empty range {s:?}")).into());
    }
    Ok((lo, hi))
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: &Rational, hi: &Rational, n: usize) -> Result<Vec<Rational>> {
    if n < 2 {
        return Err(Invalid::new("InvalidSamples", "need at least 2 samples").into());
    }
    let step = (hi.clone() - lo.clone()) / Rational::from_integer((n as i64 - 1).into());
    Ok((0..n).map(|i| lo.clone() + step.clone() * Rational::from_integer((i as i64).into())).collect())
}

pub fn sample_instance(inst: &GppInstance, xs: &[Rational]) -> Result<Samples> {
    let l = inst.scalar_liquidation()?.clone();
    if l.is_zero() {
        return Err(gpp_core::Error::ZeroLiquidation.into());
    }
    let weights = inst.scalar_weights()?;
    let dag = inst.dag();
    let paths = enumerate_paths(dag, DEFAULT_CAP)?.paths;
    let curves: Vec<Vec<Rational>> = paths
        .iter()
        .map(|p| {
            xs.iter()
                .map(|x| p.edges().iter().fold(x.clone(), |v, &e| weights[e].eval(&v)))
                .collect()
        })
        .collect();
    let minimize = l < Rational::zero();
    let envelope = (0..xs.len())
        .map(|i| {
            let column = curves.iter().map(|c| &c[i]);
            let best = if minimize { column.min() } else { column.max() };
            best.expect("at least one path").clone()
        })
        .collect();
    let labels = paths
        .iter()
        .map(|p| {
            let ids: Vec<String> = p.edges().iter().map(|e| e.to_string()).collect();
            format!("path:{}", ids.join("-"))
        })
        .collect();
    Ok(Samples { xs: xs.to_vec(), labels, curves, envelope })
}

pub fn sample_table(table: &gpp_core::PgppTable, xs: &[Rational]) -> Samples {
    Samples {
        xs: xs.to_vec(),
        labels: Vec::new(),
        curves: Vec::new(),
        envelope: xs.iter().map(|x| table.query(x).cost).collect(),
    }
}

/// Header `x,<paths...>,envelope`, then one row per sample in exact form.
pub fn to_csv(s: &Samples) -> String {
    let mut out = String::from("x");
    for label in &s.labels {
        out.push(',');
        out.push_str(label);
    }
    out.push_str(",envelope\n");
    for (i, x) in s.xs.iter().enumerate() {
        out.push_str(&format_rational(x));
        for c in &s.curves {
            out.push(',');
            out.push_str(&format_rational(&c[i]));
        }
        out.push(',');
        out.push_str(&format_rational(&s.envelope[i]));
        out.push('\n');
    }
    out
}

/// Decimal rendering with at most `digits` significant digits.
pub fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let text = format!("{v:.decimals$}");
    let text = if text.contains('.') { text.trim_end_matches('0').trim_end_matches('.') } else { &text };
    if text == "-0" {
        "0".into()
    } else {
        text.to_string()
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#4e79a7", "#59a14f", "#9c755f", "#76b7b2", "#edc948", "#b07aa1"];

pub fn to_svg(s: &Samples) -> String {
    let f = |r: &Rational| r.to_f64().unwrap_or(0.0);
    let (x_lo, x_hi) = (f(&s.xs[0]), f(&s.xs[s.xs.len() - 1]));
    let values = s.curves.iter().flatten().chain(&s.envelope).map(f);
    let (mut y_lo, mut y_hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if y_hi - y_lo < 1e-12 {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let px = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    let polyline = |ys: &[Rational], style: &str| {
        let points: Vec<String> = s
            .xs
            .iter()
            .zip(ys)
            .map(|(x, y)| format!("{},{}", significant(px(f(x)), 12), significant(py(f(y)), 12)))
            .collect();
        format!("  <polyline fill=\"none\" {style} points=\"{}\"/>\n", points.join(" "))
    };

    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    if y_lo <= 0.0 && 0.0 <= y_hi {
        let y0 = significant(py(0.0), 12);
        let _ = writeln!(
            out,
            "  <line x1=\"{}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>",
            significant(MARGIN, 12),
            significant(WIDTH - MARGIN, 12)
        );
    }
    for (j, c) in s.curves.iter().enumerate() {
        let style = format!("stroke=\"{}\" stroke-width=\"1\"", PALETTE[j % PALETTE.len()]);
        out.push_str(&polyline(c, &style));
    }
    out.push_str(&polyline(&s.envelope, "stroke=\"#e15759\" stroke-width=\"3\""));
    out.push_str("</svg>\n");
    out
}

pub fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let (lo, hi) = parse_range(&args.x_range)?;
    let xs = grid(&lo, &hi, args.samples)?;
    let samples = match (&args.input, &args.table) {
        (Some(input), _) => sample_instance(&read_instance(input)?, &xs)?,
        (None, Some(table)) => sample_table(&read_table(table)?, &xs),
        (None, None) => return Err(Invalid::new("MissingInput", "plot needs --input or --table").into()),
    };
    let svg = args.output.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    let text = if svg { to_svg(&samples) } else { to_csv(&samples) };
    fs::write(&args.output, text).with_context(|| format!("writing {}", args.output.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(significant(123.456, 12), "123.456");
        assert_eq!(significant(-2.0, 12), "-2");
        assert_eq!(significant(0.0, 12), "0");
    }

    #[test]
    fn grid_is_inclusive() {
        let g = grid(&gpp_core::q(0), &gpp_core::q(1), 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[1], gpp_core::rational(1, 4));
        assert_eq!(g[4], gpp_core::q(1));
    }
}
