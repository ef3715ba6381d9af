use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use gpp_core::gadgets::lowerbound_instance;
use gpp_core::oracle::{enumerate_paths, DEFAULT_CAP};
use gpp_core::pgpp::{build_table, piece_bound};
use gpp_core::random::{random_affine_instance, RandomDagParams};
use gpp_core::GppInstance;
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::files::Invalid;
use crate::Family;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub vertices: usize,
    pub paths: usize,
    /// Distinct optimal paths in the table.
    pub pieces: usize,
    /// Intervals of the lookup table.
    pub intervals: usize,
    pub wall_ms: f64,
}

fn measure(n: usize, inst: &GppInstance) -> Result<BenchRow> {
    let paths = enumerate_paths(inst.dag(), DEFAULT_CAP)?.paths.len();
    let start = Instant::now();
    let table = build_table(inst)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRow {
        n,
        vertices: inst.dag().vertex_count(),
        paths,
        pieces: table.path_count(),
        intervals: table.interval_count(),
        wall_ms,
    })
}

/// Rows for `n = 1..=n_max` (lower-bound family) or `n = 2..=n_max` vertices
/// (random family), checking the expected piece counts on the way.
pub fn pieces(family: Family, n_max: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    match family {
        Family::Lowerbound => {
            for n in 1..=n_max {
                let row = measure(n, &lowerbound_instance(n)?)?;
                if row.pieces != 1 << n {
                    return Err(Invalid::new("BenchCheckFailed", format!("n = {n}: {} pieces, expected {}", row.pieces, 1u64 << n)).into());
                }
                rows.push(row);
            }
        }
        Family::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for n in 2..=n_max {
                let params = RandomDagParams { min_vertices: n, max_vertices: n, max_edges: 3 * n, coeff: 9 };
                let row = measure(n, &random_affine_instance(&mut rng, &params))?;
                let bound = piece_bound(row.vertices);
                if row.intervals as f64 > bound || row.pieces > row.paths {
                    return Err(Invalid::new("BenchCheckFailed", format!("n = {n}: {} intervals, bound {bound}", row.intervals)).into());
                }
                worst = worst.max(row.intervals as f64 / bound);
                rows.push(row);
            }
            info!("largest intervals / bound ratio: {worst}");
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,vertices,paths,pieces,intervals,wall_ms\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{:.3}", r.n, r.vertices, r.paths, r.pieces, r.intervals, r.wall_ms);
    }
    out
}

pub fn pieces_csv(family: Family, n_max: usize, seed: u64) -> Result<String> {
    Ok(to_csv(&pieces(family, n_max, seed)?))
}
