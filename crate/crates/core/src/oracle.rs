//! Exhaustive ground truth. Nothing here prunes or reuses intermediate
//! results beyond plain prefix evaluation; every answer comes from looking at
//! every path.

use crate::error::{Error, Result};
use crate::model::{path_cost, Dag, GppInstance, Path, VertexId};
use crate::piecewise::{lower_envelope, upper_envelope, AnnotatedPl, Line, PlFunction};
use crate::scalar::Scalar;

/// Default bound on the number of enumerated paths.
pub const DEFAULT_CAP: usize = 1 << 16;

/// Every source-target path, in lexicographic edge-id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEnumeration {
    pub paths: Vec<Path>,
    pub cap: usize,
}

pub fn enumerate_paths(dag: &Dag, cap: usize) -> Result<PathEnumeration> {
    let alive = dag.reaches_target();
    let mut paths = Vec::new();
    let mut prefix = Vec::new();
    if alive[dag.source()] {
        dfs(dag, &alive, dag.source(), &mut prefix, &mut paths, cap)?;
    }
    Ok(PathEnumeration { paths, cap })
}

fn dfs(
    dag: &Dag,
    alive: &[bool],
    v: VertexId,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Path>,
    cap: usize,
) -> Result<()> {
    if v == dag.target() {
        if out.len() == cap {
            return Err(Error::TooManyPaths { cap });
        }
        out.push(Path::new(prefix.clone()));
        return Ok(());
    }
    for &e in dag.out_edges(v) {
        let w = dag.edge(e).to;
        if alive[w] {
            prefix.push(e);
            dfs(dag, alive, w, prefix, out, cap)?;
            prefix.pop();
        }
    }
    Ok(())
}

/// Exact maximizer of `path_cost` over all paths; the lexicographically
/// smallest path wins ties.
pub fn best_path<T: Scalar>(inst: &GppInstance<T>, x0: &[T], cap: usize) -> Result<(Path, T)> {
    let paths = enumerate_paths(inst.dag(), cap)?.paths;
    let mut best: Option<(Path, T)> = None;
    for p in paths {
        let c = path_cost(inst, &p, x0)?;
        if best.as_ref().map_or(true, |(_, b)| c > *b) {
            best = Some((p, c));
        }
    }
    best.ok_or(Error::UnreachableTarget { from: inst.dag().source(), target: inst.dag().target() })
}

/// Composed line of one path of an affine scalar instance.
pub fn path_line<T: Scalar>(inst: &GppInstance<T>, path: &Path) -> Result<Line<T>> {
    inst.dag().check_path(path)?;
    let lines = inst.affine_lines()?;
    Ok(path.edges().iter().fold(Line::identity(), |acc, &e| lines[e].after(&acc)))
}

/// One exact line per source-target path.
pub fn all_path_lines<T: Scalar>(inst: &GppInstance<T>, cap: usize) -> Result<Vec<(Line<T>, Path)>> {
    let lines = inst.affine_lines()?;
    let paths = enumerate_paths(inst.dag(), cap)?.paths;
    Ok(paths
        .into_iter()
        .map(|p| {
            let l = p.edges().iter().fold(Line::identity(), |acc, &e| lines[e].after(&acc));
            (l, p)
        })
        .collect())
}

/// Composed piecewise-linear cost function of one path.
pub fn path_function<T: Scalar>(inst: &GppInstance<T>, path: &Path) -> Result<PlFunction<T>> {
    inst.dag().check_path(path)?;
    let weights = inst.scalar_weights()?;
    path.edges().iter().try_fold(PlFunction::identity(), |acc, &e| {
        let w = weights[e].to_pl().ok_or(Error::NonPiecewiseWeight { edge: e })?;
        Ok(w.compose(&acc))
    })
}

/// The optimal-cost envelope with witnesses indexing into `paths`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleEnvelope<T> {
    pub envelope: AnnotatedPl<T, usize>,
    pub paths: Vec<Path>,
}

/// Lower envelope of all path costs when `L < 0`, upper when `L > 0`.
pub fn oracle_envelope<T: Scalar>(inst: &GppInstance<T>, cap: usize) -> Result<OracleEnvelope<T>> {
    let l = inst.scalar_liquidation()?.clone();
    if l.is_zero() {
        return Err(Error::ZeroLiquidation);
    }
    let minimize = l < T::zero();
    if inst.affine_lines().is_ok() {
        let (lines, paths): (Vec<_>, Vec<_>) = all_path_lines(inst, cap)?.into_iter().unzip();
        let envelope = if minimize { lower_envelope(&lines)? } else { upper_envelope(&lines)? };
        return Ok(OracleEnvelope { envelope, paths });
    }
    for (edge, w) in inst.scalar_weights()?.iter().enumerate() {
        if w.to_pl().is_none() {
            return Err(Error::NonPiecewiseWeight { edge });
        }
    }
    let paths = enumerate_paths(inst.dag(), cap)?.paths;
    let mut acc: Option<AnnotatedPl<T, usize>> = None;
    for (i, p) in paths.iter().enumerate() {
        let f = path_function(inst, p)?.annotate(i);
        acc = Some(match acc {
            None => f,
            Some(a) if minimize => a.min(&f),
            Some(a) => a.max(&f),
        });
    }
    let envelope = acc.ok_or(Error::UnreachableTarget { from: inst.dag().source(), target: inst.dag().target() })?;
    Ok(OracleEnvelope { envelope, paths })
}

/// Per vertex, the exact `(min, max)` composed value over all source paths
/// with at most `max_edges` edges; `None` if no such path exists.
pub fn extremes_within<T: Scalar>(inst: &GppInstance<T>, x0: &T, max_edges: usize) -> Result<Vec<Option<(T, T)>>> {
    let weights = inst.scalar_weights()?;
    let dag = inst.dag();
    let mut out: Vec<Option<(T, T)>> = vec![None; dag.vertex_count()];
    let mut stack = vec![(dag.source(), x0.clone(), 0usize)];
    while let Some((v, val, depth)) = stack.pop() {
        let slot = &mut out[v];
        *slot = Some(match slot.take() {
            None => (val.clone(), val.clone()),
            Some((lo, hi)) => {
                let lo = if val < lo { val.clone() } else { lo };
                let hi = if val > hi { val.clone() } else { hi };
                (lo, hi)
            }
        });
        if depth < max_edges {
            for &e in dag.out_edges(v) {
                stack.push((dag.edge(e).to, weights[e].eval(&val), depth + 1));
            }
        }
    }
    Ok(out)
}
