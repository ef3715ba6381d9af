use std::fs;
use std::io::Write;
use std::path::Path as FsPath;

use anyhow::{Context, Result};
use gpp_core::gadgets::{lowerbound_instance, product_partition_gadget, set_partition_gadget, LastEdge};
use gpp_core::model::Path;
use gpp_core::oracle::{best_path, DEFAULT_CAP};
use gpp_core::pgpp::build_table;
use gpp_core::solver::{solve_scalar_linear, solve_scalar_linear_budgeted};
use gpp_core::{GppInstance, Rational};
use serde::Serialize;
use serde_json::json;

use crate::files::{format_rational, parse_rational, parse_rational_list, Invalid, InstanceFile, TableFile};
use crate::{BenchCommand, Cli, Command, GadgetCommand, SolveArgs};

pub fn read_json<T: serde::de::DeserializeOwned>(path: &FsPath) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_instance(path: &FsPath) -> Result<GppInstance> {
    read_json::<InstanceFile>(path)?.to_instance()
}

pub fn read_table(path: &FsPath) -> Result<gpp_core::PgppTable> {
    read_json::<TableFile>(path)?.to_table()
}

/// `{"path": [...], "cost": "p/q"}`, printed by solve and query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct PathResult {
    pub path: Vec<usize>,
    pub cost: String,
}

fn result_json(path: &Path, cost: &Rational) -> PathResult {
    PathResult { path: path.edges().to_vec(), cost: format_rational(cost) }
}

/// Runs one command, writing its primary output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let value = solve(&args)?;
            writeln!(out, "{}", serde_json::to_string(&value)?)?;
        }
        Command::Preprocess { input, output } => {
            let inst = read_instance(&input)?;
            let table = build_table(&inst)?;
            write_json(&output, &TableFile::from_table(&table))?;
            writeln!(out, "{}", json!({ "entries": table.interval_count(), "paths": table.path_count() }))?;
        }
        Command::Query { table, x0 } => {
            let table = read_table(&table)?;
            let res = table.query(&parse_rational(&x0)?);
            writeln!(out, "{}", serde_json::to_string(&result_json(&res.path, &res.cost))?)?;
        }
        Command::Gadget(g) => gadget(g)?,
        Command::Plot(args) => crate::plot::cmd_plot(&args)?,
        Command::Bench(BenchCommand::Pieces { family, n_max, seed, output }) => {
            let csv = crate::bench::pieces_csv(family, n_max, seed)?;
            match output {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => out.write_all(csv.as_bytes())?,
            }
        }
    }
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<PathResult> {
    let inst = read_instance(&args.input)?;
    let x0: Vec<Rational> = match (&args.x0, inst.x0()) {
        (Some(s), _) => parse_rational_list(s)?,
        (None, Some(x)) => x.to_vec(),
        (None, None) => return Err(Invalid::new("MissingStartValue", "no --x0 and the instance has no x0").into()),
    };
    if x0.len() != inst.k() {
        return Err(gpp_core::Error::DimensionMismatch { what: "x0".into(), expected: inst.k(), found: x0.len() }.into());
    }
    if args.oracle {
        let (path, cost) = best_path(&inst, &x0, DEFAULT_CAP)?;
        return Ok(result_json(&path, &cost));
    }
    let sol = match (args.budget, &args.durations) {
        (Some(budget), Some(file)) => {
            let durations: Vec<usize> = read_json(file)?;
            solve_scalar_linear_budgeted(&inst, &x0[0], &durations, budget)?
        }
        _ => solve_scalar_linear(&inst, &x0[0])?,
    };
    Ok(result_json(&sol.path, &sol.cost))
}

fn gadget(cmd: GadgetCommand) -> Result<()> {
    let (inst, output) = match cmd {
        GadgetCommand::SetPartition { elements, delta, epsilon, square, output } => {
            let last = if square { LastEdge::Square } else { LastEdge::Abs };
            let g = set_partition_gadget(&elements, parse_rational(&epsilon)?, parse_rational(&delta)?, last)?;
            (g.instance, output)
        }
        GadgetCommand::ProductPartition { elements, output } => (product_partition_gadget(&elements)?, output),
        GadgetCommand::Lowerbound { n, output } => (lowerbound_instance(n)?, output),
    };
    write_json(&output, &InstanceFile::from_instance(&inst))
}
