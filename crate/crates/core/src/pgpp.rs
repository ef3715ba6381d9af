//! Preprocessing for every start value at once: the optimal cost as a
//! function of `x0`, with a witness path per piece, flattened into a table
//! answered by binary search.
//!
//! Affine instances use a dynamic program in topological order. Composing an
//! affine map with a set of values attains its extremes at the set's
//! extremes, so each vertex only needs the lower and upper envelope of its
//! incoming path costs. Instances with piecewise weights have no such
//! structure; their envelope is folded over all paths.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{EdgeId, GppInstance, Path, VertexId};
use crate::piecewise::{AnnotatedPl, Line, PlFunction};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Lower,
    Upper,
}

/// Where a piece of a vertex envelope comes from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Source,
    Edge { edge: EdgeId, pred_piece: usize, side: Side },
}

/// Lower (concave) and upper (convex) envelope of all source-to-`vertex`
/// path costs.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopePair<T> {
    pub vertex: VertexId,
    pub lower: AnnotatedPl<T, Provenance>,
    pub upper: AnnotatedPl<T, Provenance>,
}

impl<T: Scalar> EnvelopePair<T> {
    pub fn side(&self, side: Side) -> &AnnotatedPl<T, Provenance> {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }
}

/// Per-vertex envelopes; vertices on no source-target path are pruned.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelopes<T> {
    source: VertexId,
    edge_from: Vec<VertexId>,
    pairs: Vec<Option<EnvelopePair<T>>>,
}

impl<T: Scalar> Envelopes<T> {
    pub fn get(&self, v: VertexId) -> Option<&EnvelopePair<T>> {
        self.pairs[v].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EnvelopePair<T>> {
        self.pairs.iter().flatten()
    }

    /// The source-to-`v` path realizing piece `piece` of the given envelope.
    pub fn witness_path(&self, mut v: VertexId, mut side: Side, mut piece: usize) -> Path {
        let mut edges = Vec::new();
        loop {
            let pair = self.pairs[v].as_ref().expect("witness chain stays on useful vertices");
            match &pair.side(side).witnesses()[piece] {
                Provenance::Source => break,
                Provenance::Edge { edge, pred_piece, side: s } => {
                    edges.push(*edge);
                    piece = *pred_piece;
                    side = *s;
                    v = self.edge_from[*edge];
                }
            }
        }
        debug_assert_eq!(v, self.source);
        edges.reverse();
        Path::new(edges)
    }
}

/// `line ∘ env`, every piece pointing back at the piece of `env` it came from.
fn push_through<T: Scalar>(
    env: &AnnotatedPl<T, Provenance>,
    line: &Line<T>,
    edge: EdgeId,
    side: Side,
) -> AnnotatedPl<T, Provenance> {
    if line.slope.is_zero() {
        return PlFunction::affine(line.clone()).annotate(Provenance::Edge { edge, pred_piece: 0, side });
    }
    AnnotatedPl::from_parts(
        env.breakpoints().to_vec(),
        env.lines().iter().map(|l| line.after(l)).collect(),
        (0..env.len()).map(|pred_piece| Provenance::Edge { edge, pred_piece, side }).collect(),
    )
}

/// Envelopes at every vertex of an affine scalar instance.
pub fn build_envelopes<T: Scalar>(inst: &GppInstance<T>) -> Result<Envelopes<T>> {
    let lines = inst.affine_lines()?;
    let dag = inst.dag();
    let useful = dag.useful_vertices();
    if !useful[dag.source()] {
        return Err(Error::UnreachableTarget { from: dag.source(), target: dag.target() });
    }
    let mut pairs: Vec<Option<EnvelopePair<T>>> = vec![None; dag.vertex_count()];
    for &v in dag.topological_order() {
        if !useful[v] {
            continue;
        }
        if v == dag.source() {
            let id = PlFunction::identity().annotate(Provenance::Source);
            pairs[v] = Some(EnvelopePair { vertex: v, lower: id.clone(), upper: id });
            continue;
        }
        let mut lower: Option<AnnotatedPl<T, Provenance>> = None;
        let mut upper: Option<AnnotatedPl<T, Provenance>> = None;
        for &e in dag.in_edges(v) {
            let u = dag.edge(e).from;
            let Some(pred) = pairs[u].as_ref() else { continue };
            let w = &lines[e];
            let (lo_src, hi_src) = if w.slope >= T::zero() {
                (Side::Lower, Side::Upper)
            } else {
                (Side::Upper, Side::Lower)
            };
            let lo = push_through(pred.side(lo_src), w, e, lo_src);
            let hi = push_through(pred.side(hi_src), w, e, hi_src);
            // earlier edges win ties
            lower = Some(match lower {
                None => lo,
                Some(acc) => acc.min(&lo),
            });
            upper = Some(match upper {
                None => hi,
                Some(acc) => acc.max(&hi),
            });
        }
        let (Some(lower), Some(upper)) = (lower, upper) else {
            unreachable!("useful vertex other than the source has a useful predecessor")
        };
        pairs[v] = Some(EnvelopePair {
            vertex: v,
            lower: lower.merge_equal_lines(),
            upper: upper.merge_equal_lines(),
        });
    }
    Ok(Envelopes { source: dag.source(), edge_from: dag.edges().iter().map(|e| e.from).collect(), pairs })
}

/// One interval `[lo, hi)` of the table; `None` bounds are infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry<T> {
    pub lo: Option<T>,
    pub hi: Option<T>,
    pub line: Line<T>,
    pub path: Path,
}

/// Start value to optimal path lookup table.
///
/// Entries partition the real line in increasing order. The cost reported by
/// [`PgppTable::query`] is the composed value before liquidation; the
/// objective is `L` times it, and `objective_sign` records whether that meant
/// minimizing (`-1`) or maximizing (`+1`) the value.
#[derive(Clone, Debug, PartialEq)]
pub struct PgppTable<T> {
    entries: Vec<TableEntry<T>>,
    objective_sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult<T> {
    pub path: Path,
    pub cost: T,
}

impl<T: Scalar> PgppTable<T> {
    /// Checks that the entries tile the line contiguously, that the cost is
    /// continuous across boundaries and that neighbours differ.
    pub fn from_entries(entries: Vec<TableEntry<T>>, objective_sign: i8) -> Result<Self> {
        if objective_sign != 1 && objective_sign != -1 {
            return Err(Error::InvalidTable(format!("objective sign {objective_sign} is not +1 or -1")));
        }
        let (Some(first), Some(last)) = (entries.first(), entries.last()) else {
            return Err(Error::InvalidTable("no entries".into()));
        };
        if first.lo.is_some() || last.hi.is_some() {
            return Err(Error::InvalidTable("entries do not reach both infinities".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if let (Some(lo), Some(hi)) = (&e.lo, &e.hi) {
                if lo >= hi {
                    return Err(Error::InvalidTable(format!("entry {i} is empty")));
                }
            }
            if e.path.is_empty() {
                return Err(Error::InvalidTable(format!("entry {i} has an empty path")));
            }
        }
        for (i, pair) in entries.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let Some(cut) = a.hi.as_ref().filter(|hi| Some(*hi) == b.lo.as_ref()) else {
                return Err(Error::InvalidTable(format!("gap or overlap after entry {i}")));
            };
            if a.line.eval(cut) != b.line.eval(cut) {
                return Err(Error::InvalidTable(format!("cost jumps at the end of entry {i}")));
            }
            if a.line == b.line && a.path == b.path {
                return Err(Error::InvalidTable(format!("entries {i} and {} are identical", i + 1)));
            }
        }
        Ok(PgppTable { entries, objective_sign })
    }

    fn from_envelope<W: Clone + PartialEq>(
        env: &AnnotatedPl<T, W>,
        objective_sign: i8,
        mut path_of: impl FnMut(usize, &W) -> Path,
    ) -> Self {
        let mut entries: Vec<TableEntry<T>> = Vec::with_capacity(env.len());
        for (i, (line, w)) in env.lines().iter().zip(env.witnesses()).enumerate() {
            let (lo, hi) = env.cell(i);
            let path = path_of(i, w);
            if let Some(prev) = entries.last_mut() {
                if prev.line == *line && prev.path == path {
                    prev.hi = hi.cloned();
                    continue;
                }
            }
            entries.push(TableEntry { lo: lo.cloned(), hi: hi.cloned(), line: line.clone(), path });
        }
        PgppTable { entries, objective_sign }
    }

    pub fn entries(&self) -> &[TableEntry<T>] {
        &self.entries
    }

    pub fn objective_sign(&self) -> i8 {
        self.objective_sign
    }

    /// Number of intervals in the lookup index.
    pub fn interval_count(&self) -> usize {
        self.entries.len()
    }

    /// Number of distinct optimal paths stored in the table.
    pub fn path_count(&self) -> usize {
        let mut paths: Vec<&Path> = self.entries.iter().map(|e| &e.path).collect();
        paths.sort();
        paths.dedup();
        paths.len()
    }

    /// Index of the entry whose interval contains `x0`.
    pub fn locate(&self, x0: &T) -> usize {
        self.entries.partition_point(|e| e.lo.as_ref().map_or(true, |lo| lo <= x0)) - 1
    }

    pub fn query(&self, x0: &T) -> QueryResult<T> {
        let e = &self.entries[self.locate(x0)];
        QueryResult { path: e.path.clone(), cost: e.line.eval(x0) }
    }
}

fn objective_sign<T: Scalar>(inst: &GppInstance<T>) -> Result<i8> {
    let l = inst.scalar_liquidation()?;
    if l.is_zero() {
        return Err(Error::ZeroLiquidation);
    }
    Ok(if *l < T::zero() { -1 } else { 1 })
}

/// Builds the lookup table for a scalar instance whose weights are affine or
/// piecewise affine.
pub fn build_table<T: Scalar>(inst: &GppInstance<T>) -> Result<PgppTable<T>> {
    let sign = objective_sign(inst)?;
    let weights = inst.scalar_weights()?;
    if let Some(edge) = weights.iter().position(|w| w.to_pl().is_none()) {
        return Err(Error::NonPiecewiseWeight { edge });
    }
    if inst.affine_lines().is_ok() {
        let envelopes = build_envelopes(inst)?;
        let side = if sign < 0 { Side::Lower } else { Side::Upper };
        let target = inst.dag().target();
        let env = envelopes.get(target).expect("target is useful").side(side);
        Ok(PgppTable::from_envelope(env, sign, |piece, _| envelopes.witness_path(target, side, piece)))
    } else {
        let suffixes = backward_envelope(inst, sign < 0)?;
        Ok(PgppTable::from_envelope(&suffixes.envelope, sign, |_, w| suffixes.path(*w)))
    }
}

/// Suffix paths shared as linked lists: node `i` is `edges[i]` followed by
/// the suffix `next[i]`.
#[derive(Clone, Debug, Default)]
struct SuffixArena {
    nodes: Vec<(EdgeId, Option<usize>)>,
    index: HashMap<(EdgeId, Option<usize>), usize>,
}

impl SuffixArena {
    /// Lexicographic comparison of two suffixes.
    fn less(&self, mut a: Option<usize>, mut b: Option<usize>) -> bool {
        loop {
            match (a, b) {
                (_, None) => return false,
                (None, Some(_)) => return true,
                (Some(i), Some(j)) => {
                    let ((ea, na), (eb, nb)) = (self.nodes[i], self.nodes[j]);
                    if ea != eb {
                        return ea < eb;
                    }
                    a = na;
                    b = nb;
                }
            }
        }
    }

    fn cons(&mut self, edge: EdgeId, next: Option<usize>) -> usize {
        let len = self.nodes.len();
        *self.index.entry((edge, next)).or_insert_with(|| {
            self.nodes.push((edge, next));
            len
        })
    }
}

/// Envelope over source-to-target paths, witnesses naming suffix nodes.
pub struct BackwardEnvelope<T> {
    pub envelope: AnnotatedPl<T, Option<usize>>,
    arena: SuffixArena,
}

impl<T> BackwardEnvelope<T> {
    pub fn path(&self, mut node: Option<usize>) -> Path {
        let mut edges = Vec::new();
        while let Some(i) = node {
            let (e, next) = self.arena.nodes[i];
            edges.push(e);
            node = next;
        }
        Path::new(edges)
    }
}

/// Optimal composed value as a function of the start value, computed from the
/// target backwards: the best continuation from `v` applied to `y` is the best
/// over out edges `e = (v, w)` of the best continuation from `w` applied to
/// `w_e(y)`. Out edges are folded in id order with earlier edges winning
/// ties, so each witness is the lexicographically smallest optimal path.
/// Works for arbitrary (non-monotone) piecewise weights.
pub fn backward_envelope<T: Scalar>(inst: &GppInstance<T>, minimize: bool) -> Result<BackwardEnvelope<T>> {
    let dag = inst.dag();
    let weights: Vec<PlFunction<T>> = inst
        .scalar_weights()?
        .iter()
        .enumerate()
        .map(|(edge, w)| w.to_pl().ok_or(Error::NonPiecewiseWeight { edge }))
        .collect::<Result<_>>()?;
    if !dag.target_reachable() {
        return Err(Error::UnreachableTarget { from: dag.source(), target: dag.target() });
    }
    let useful = dag.useful_vertices();
    let mut arena = SuffixArena::default();
    let mut best: Vec<Option<AnnotatedPl<T, Option<usize>>>> = vec![None; dag.vertex_count()];
    best[dag.target()] = Some(PlFunction::identity().annotate(None));
    for &v in dag.topological_order().iter().rev() {
        if v == dag.target() || !useful[v] {
            continue;
        }
        let mut acc: Option<AnnotatedPl<T, Option<usize>>> = None;
        for &e in dag.out_edges(v) {
            let Some(cont) = best[dag.edge(e).to].as_ref() else { continue };
            let cand = cont
                .compose_inner_by(&weights[e], |a, b| arena.less(*a, *b))
                .map_witnesses(|w| Some(arena.cons(e, *w)));
            acc = Some(match acc {
                None => cand,
                Some(a) if minimize => a.min(&cand),
                Some(a) => a.max(&cand),
            });
        }
        best[v] = acc;
    }
    let envelope = best[dag.source()].take().expect("source reaches target");
    Ok(BackwardEnvelope { envelope, arena })
}

/// `(8n)^(log2 n)`, the piece-count ceiling for an `n`-vertex affine instance.
pub fn piece_bound(vertex_count: usize) -> f64 {
    let n = vertex_count as f64;
    (8.0 * n).powf(n.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{path_cost, Dag, ScalarWeight};
    use crate::oracle::oracle_envelope;
    use crate::solver::solve_scalar_linear;
    use crate::{q, rational, GppInstance as Inst, Rational};

    fn aff(a: i64, b: i64) -> ScalarWeight {
        ScalarWeight::affine(q(a), q(b))
    }

    #[test]
    fn chain_has_one_line() {
        let dag = Dag::new(3, 0, 2, [(0, 1), (1, 2)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 1), aff(1, 1)], q(-1), None).unwrap();
        let env = build_envelopes(&inst).unwrap();
        let t = env.get(2).unwrap();
        assert_eq!(t.lower.lines(), &[Line::new(q(1), q(2))]);
        assert_eq!(t.upper.lines(), &[Line::new(q(1), q(2))]);
        let table = build_table(&inst).unwrap();
        assert_eq!(table.interval_count(), 1);
        assert_eq!(table.query(&q(5)), QueryResult { path: Path::new(vec![0, 1]), cost: q(7) });
    }

    #[test]
    fn parallel_sign_flip_gives_abs() {
        let dag = Dag::new(2, 0, 1, [(0, 1), (0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 0), aff(-1, 0)], q(-1), None).unwrap();
        let env = build_envelopes(&inst).unwrap();
        let t = env.get(1).unwrap();
        assert_eq!(t.upper.function(), PlFunction::abs_at(q(0)));
        assert_eq!(t.lower.function(), PlFunction::abs_at(q(0)).then_affine(&Line::new(q(-1), q(0))));
    }

    #[test]
    fn pruned_vertices_have_no_envelope() {
        // vertex 3 is a dead end
        let dag = Dag::new(4, 0, 2, [(0, 1), (1, 2), (0, 3)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 0), aff(2, 0), aff(1, 1)], q(1), None).unwrap();
        let env = build_envelopes(&inst).unwrap();
        assert!(env.get(3).is_none());
        assert_eq!(env.iter().count(), 3);
    }

    #[test]
    fn query_at_breakpoint_uses_right_entry() {
        let dag = Dag::new(2, 0, 1, [(0, 1), (0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 0), aff(-1, 2)], q(-1), None).unwrap();
        let table = build_table(&inst).unwrap();
        assert_eq!(table.interval_count(), 2);
        let r = table.query(&q(1));
        assert_eq!(r.path, Path::new(vec![1]));
        assert_eq!(r.cost, q(1));
        assert_eq!(table.query(&q(-1_000_000)).cost, q(-1_000_000));
    }

    #[test]
    fn zero_liquidation_and_quadratic_rejected() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let inst = Inst::scalar(dag.clone(), vec![aff(1, 0)], q(0), None).unwrap();
        assert!(matches!(build_table(&inst), Err(Error::ZeroLiquidation)));
        let quad = ScalarWeight::Quadratic { a: q(1), b: q(0), c: q(0) };
        let inst = Inst::scalar(dag, vec![quad], q(-1), None).unwrap();
        assert!(matches!(build_table(&inst), Err(Error::NonPiecewiseWeight { edge: 0 })));
    }

    #[test]
    fn from_entries_validation() {
        let e = |lo: Option<i64>, hi: Option<i64>, s: i64, c: i64, p: usize| TableEntry {
            lo: lo.map(q),
            hi: hi.map(q),
            line: Line::new(q(s), q(c)),
            path: Path::new(vec![p]),
        };
        assert!(PgppTable::from_entries(vec![e(None, Some(0), -1, 0, 0), e(Some(0), None, 1, 0, 1)], -1).is_ok());
        assert!(PgppTable::from_entries(vec![e(None, Some(0), -1, 0, 0), e(Some(1), None, 1, 0, 1)], -1).is_err());
        assert!(PgppTable::from_entries(vec![e(None, Some(0), -1, 1, 0), e(Some(0), None, 1, 0, 1)], -1).is_err());
        assert!(PgppTable::from_entries(vec![e(None, Some(0), 1, 0, 0), e(Some(0), None, 1, 0, 0)], 1).is_err());
        assert!(PgppTable::<Rational>::from_entries(vec![], 1).is_err());
        assert!(PgppTable::from_entries(vec![e(None, None, 1, 0, 0)], 0).is_err());
    }

    #[test]
    fn piecewise_fold_matches_sequential_oracle() {
        let dag = Dag::new(3, 0, 2, [(0, 1), (0, 1), (1, 2), (1, 2), (0, 2)]).unwrap();
        let w = vec![
            ScalarWeight::piecewise(PlFunction::abs_at(q(1))),
            aff(-2, 3),
            ScalarWeight::piecewise(PlFunction::abs_at(rational(1, 2))),
            aff(1, -1),
            ScalarWeight::piecewise(PlFunction::abs_at(q(-2)).then_affine(&Line::new(q(3), q(-4)))),
        ];
        for l in [-1, 1] {
            let inst = Inst::scalar(dag.clone(), w.clone(), q(l), None).unwrap();
            let table = build_table(&inst).unwrap();
            let oracle = oracle_envelope(&inst, 64).unwrap();
            assert_eq!(table.interval_count(), oracle.envelope.len());
            for (entry, (line, &wit)) in table.entries().iter().zip(oracle.envelope.lines().iter().zip(oracle.envelope.witnesses())) {
                assert_eq!(entry.line, *line);
                assert_eq!(entry.path, oracle.paths[wit]);
            }
        }
    }

    #[test]
    fn table_agrees_with_solver_on_small_instance() {
        let dag = Dag::new(4, 0, 3, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (0, 3)]).unwrap();
        let w = vec![aff(-2, 1), aff(3, 0), aff(1, -4), aff(-1, 2), aff(2, 2), aff(0, 5)];
        for l in [-1, 2] {
            let inst = Inst::scalar(dag.clone(), w.clone(), q(l), None).unwrap();
            let table = build_table(&inst).unwrap();
            for x in -12..=12 {
                let x = rational(x, 3);
                let r = table.query(&x);
                let s = solve_scalar_linear(&inst, &x).unwrap();
                assert_eq!(q(l) * r.cost.clone(), s.cost);
                assert_eq!(path_cost(&inst, &r.path, &[x]).unwrap(), s.cost);
            }
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(piece_bound(2), 16.0);
        assert!(piece_bound(11) > 1024.0);
    }

}
