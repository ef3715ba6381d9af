//! Bellman-Ford style solver for scalar instances with affine weights.
//!
//! Every vertex tracks both the largest and the smallest value reachable from
//! the source: an edge with a negative slope turns the smallest incoming value
//! into the largest outgoing one, so both extremes are needed to relax edges.

use log::warn;

use crate::error::{Error, Result};
use crate::model::{EdgeId, GppInstance, Path, VertexId};
use crate::piecewise::Line;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extreme {
    Max,
    Min,
}

/// Where an extreme value at a vertex came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pointer {
    pub edge: EdgeId,
    pub from: VertexId,
    /// Which extreme of `from` was pushed through the edge.
    pub from_extreme: Extreme,
    /// Round in which the pointer was set.
    pub round: usize,
}

/// Values and parent pointers after some number of relaxation rounds.
/// `None` values are the `-inf` / `+inf` sentinels.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxState<T> {
    pub r_max: Vec<Option<T>>,
    pub r_min: Vec<Option<T>>,
    pub p_max: Vec<Option<Pointer>>,
    pub p_min: Vec<Option<Pointer>>,
}

impl<T: Scalar> RelaxState<T> {
    fn initial(vertex_count: usize, source: VertexId, x0: &T) -> Self {
        let mut s = RelaxState {
            r_max: vec![None; vertex_count],
            r_min: vec![None; vertex_count],
            p_max: vec![None; vertex_count],
            p_min: vec![None; vertex_count],
        };
        s.r_max[source] = Some(x0.clone());
        s.r_min[source] = Some(x0.clone());
        s
    }

    pub fn value(&self, v: VertexId, which: Extreme) -> Option<&T> {
        match which {
            Extreme::Max => self.r_max[v].as_ref(),
            Extreme::Min => self.r_min[v].as_ref(),
        }
    }

    fn pointer(&self, v: VertexId, which: Extreme) -> Option<&Pointer> {
        match which {
            Extreme::Max => self.p_max[v].as_ref(),
            Extreme::Min => self.p_min[v].as_ref(),
        }
    }
}

/// Synchronous relaxation rounds: round `k` only reads values from round
/// `k - 1`, so after `k` rounds the extremes range exactly over paths with at
/// most `k` edges. Returns the states after rounds `0..=rounds`, stopping early
/// once a round changes nothing.
fn relax<T: Scalar>(
    vertex_count: usize,
    source: VertexId,
    edges: &[(VertexId, VertexId)],
    lines: &[Line<T>],
    x0: &T,
    rounds: usize,
) -> Vec<RelaxState<T>> {
    let mut states = vec![RelaxState::initial(vertex_count, source, x0)];
    for round in 1..=rounds {
        let prev = states.last().unwrap();
        let mut next = prev.clone();
        let mut changed = false;
        for (edge, (&(u, v), w)) in edges.iter().zip(lines).enumerate() {
            let (Some(hi), Some(lo)) = (&prev.r_max[u], &prev.r_min[u]) else {
                continue;
            };
            // a_e >= 0 keeps the order of values, a_e < 0 reverses it
            let (to_max, to_min) = if w.slope >= T::zero() {
                ((hi, Extreme::Max), (lo, Extreme::Min))
            } else {
                ((lo, Extreme::Min), (hi, Extreme::Max))
            };
            let cand = w.eval(to_max.0);
            if next.r_max[v].as_ref().map_or(true, |cur| *cur < cand) {
                next.r_max[v] = Some(cand);
                next.p_max[v] = Some(Pointer { edge, from: u, from_extreme: to_max.1, round });
                changed = true;
            }
            let cand = w.eval(to_min.0);
            if next.r_min[v].as_ref().map_or(true, |cur| *cur > cand) {
                next.r_min[v] = Some(cand);
                next.p_min[v] = Some(Pointer { edge, from: u, from_extreme: to_min.1, round });
                changed = true;
            }
        }
        if !changed {
            break;
        }
        states.push(next);
    }
    states
}

/// Walks parent pointers back from `(v, which)` in the final state.
fn backtrack<T: Scalar>(states: &[RelaxState<T>], source: VertexId, mut v: VertexId, mut which: Extreme) -> Vec<EdgeId> {
    let mut round = states.len() - 1;
    let mut edges = Vec::new();
    while v != source {
        let ptr = states[round].pointer(v, which).expect("finite value has a parent pointer");
        edges.push(ptr.edge);
        v = ptr.from;
        which = ptr.from_extreme;
        round = ptr.round - 1;
    }
    edges.reverse();
    edges
}

/// An optimal path with its objective `L * value` and its raw composed value.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    pub path: Path,
    pub cost: T,
    pub value: T,
}

fn scalar_affine<T: Scalar>(inst: &GppInstance<T>) -> Result<(Vec<Line<T>>, T)> {
    let l = inst.scalar_liquidation()?.clone();
    Ok((inst.affine_lines()?, l))
}

fn edge_list<T: Scalar>(inst: &GppInstance<T>) -> Vec<(VertexId, VertexId)> {
    inst.dag().edges().iter().map(|e| (e.from, e.to)).collect()
}

/// Which extreme maximizes `L * value`.
fn objective_extreme<T: Scalar>(l: &T) -> Extreme {
    if l.is_zero() {
        warn!("liquidation is zero: every path has cost 0, returning the max-value path");
    }
    if *l < T::zero() {
        Extreme::Min
    } else {
        Extreme::Max
    }
}

/// Relaxation states of the unbudgeted solver, rounds `0..=rounds`.
pub fn relax_trace<T: Scalar>(inst: &GppInstance<T>, x0: &T, rounds: usize) -> Result<Vec<RelaxState<T>>> {
    let (lines, _) = scalar_affine(inst)?;
    let dag = inst.dag();
    Ok(relax(dag.vertex_count(), dag.source(), &edge_list(inst), &lines, x0, rounds))
}

/// Optimal source-target path at start value `x0` for an affine scalar instance.
pub fn solve_scalar_linear<T: Scalar>(inst: &GppInstance<T>, x0: &T) -> Result<Solution<T>> {
    let (lines, l) = scalar_affine(inst)?;
    let dag = inst.dag();
    let rounds = dag.vertex_count() - 1;
    let states = relax(dag.vertex_count(), dag.source(), &edge_list(inst), &lines, x0, rounds);
    let which = objective_extreme(&l);
    let last = states.last().unwrap();
    let value = last
        .value(dag.target(), which)
        .cloned()
        .ok_or(Error::UnreachableTarget { from: dag.source(), target: dag.target() })?;
    let path = Path::new(backtrack(&states, dag.source(), dag.target(), which));
    Ok(Solution { path, cost: l * value.clone(), value })
}

/// Optimal path among those whose total duration is at most `budget`.
///
/// An edge of duration `t` is replaced by a chain of `t` edges carrying the
/// original weight followed by `t - 1` identities; relaxation then runs for
/// exactly `budget` rounds.
pub fn solve_scalar_linear_budgeted<T: Scalar>(
    inst: &GppInstance<T>,
    x0: &T,
    durations: &[usize],
    budget: usize,
) -> Result<Solution<T>> {
    let (lines, l) = scalar_affine(inst)?;
    let dag = inst.dag();
    if durations.len() != dag.edge_count() {
        return Err(Error::DimensionMismatch {
            what: "durations".into(),
            expected: dag.edge_count(),
            found: durations.len(),
        });
    }
    if let Some(edge) = durations.iter().position(|&d| d == 0) {
        return Err(Error::InvalidWeight { edge, reason: "duration must be a positive integer".into() });
    }

    let mut vertex_count = dag.vertex_count();
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut original = Vec::new();
    for (id, e) in dag.edges().iter().enumerate() {
        let mut from = e.from;
        for step in 0..durations[id] {
            let to = if step + 1 == durations[id] {
                e.to
            } else {
                vertex_count += 1;
                vertex_count - 1
            };
            edges.push((from, to));
            if step == 0 {
                weights.push(lines[id].clone());
                original.push(Some(id));
            } else {
                weights.push(Line::identity());
                original.push(None);
            }
            from = to;
        }
    }

    let states = relax(vertex_count, dag.source(), &edges, &weights, x0, budget);
    let which = objective_extreme(&l);
    let value = states
        .last()
        .unwrap()
        .value(dag.target(), which)
        .cloned()
        .ok_or(Error::NoFeasiblePath { budget })?;
    let path: Vec<EdgeId> = backtrack(&states, dag.source(), dag.target(), which)
        .into_iter()
        .filter_map(|e| original[e])
        .collect();
    Ok(Solution { path: Path::new(path), cost: l * value.clone(), value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{path_cost, Dag, ScalarWeight};
    use crate::oracle::{best_path, extremes_within};
    use crate::{q, GppInstance as Inst};

    fn aff(a: i64, b: i64) -> ScalarWeight {
        ScalarWeight::affine(q(a), q(b))
    }

    #[test]
    fn single_edge() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(2, 1)], q(-1), None).unwrap();
        let s = solve_scalar_linear(&inst, &q(3)).unwrap();
        assert_eq!(s.path, Path::new(vec![0]));
        assert_eq!(s.cost, q(-7));
    }

    #[test]
    fn two_layer_plus_minus_one() {
        let dag = Dag::new(3, 0, 2, [(0, 1), (0, 1), (1, 2), (1, 2)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 1), aff(1, -1), aff(1, 1), aff(1, -1)], q(1), None).unwrap();
        let s = solve_scalar_linear(&inst, &q(0)).unwrap();
        assert_eq!(s.cost, q(2));
        assert_eq!(s.path, Path::new(vec![0, 2]));
        assert_eq!(best_path(&inst, &[q(0)], 16).unwrap().1, q(2));
    }

    #[test]
    fn negative_slope_wins_at_negative_start() {
        let dag = Dag::new(2, 0, 1, [(0, 1), (0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(-1, 0), aff(1, 0)], q(1), None).unwrap();
        let s = solve_scalar_linear(&inst, &q(-5)).unwrap();
        assert_eq!(s.path, Path::new(vec![0]));
        assert_eq!(s.cost, q(5));
    }

    #[test]
    fn backtracking_follows_crossed_extremes() {
        // the max at t comes from the min at v1 through a negative slope
        let dag = Dag::new(3, 0, 2, [(0, 1), (0, 1), (1, 2)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 5), aff(1, -5), aff(-2, 0)], q(1), None).unwrap();
        let s = solve_scalar_linear(&inst, &q(0)).unwrap();
        assert_eq!(s.path, Path::new(vec![1, 2]));
        assert_eq!(s.cost, q(10));
        assert_eq!(path_cost(&inst, &s.path, &[q(0)]).unwrap(), s.cost);
    }

    #[test]
    fn rejects_non_affine() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let w = vec![ScalarWeight::piecewise(crate::PlFunction::abs_at(q(0)))];
        let inst = Inst::scalar(dag, w, q(1), None).unwrap();
        assert!(matches!(solve_scalar_linear(&inst, &q(0)), Err(Error::NonAffineWeight { edge: 0 })));
    }

    #[test]
    fn zero_liquidation_still_returns_a_path() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(3, 0)], q(0), None).unwrap();
        let s = solve_scalar_linear(&inst, &q(2)).unwrap();
        assert_eq!(s.cost, q(0));
        assert_eq!(s.value, q(6));
    }

    #[test]
    fn budget_too_small_then_exact() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(2, 1)], q(-1), None).unwrap();
        assert!(matches!(
            solve_scalar_linear_budgeted(&inst, &q(3), &[3], 2),
            Err(Error::NoFeasiblePath { budget: 2 })
        ));
        let s = solve_scalar_linear_budgeted(&inst, &q(3), &[3], 3).unwrap();
        assert_eq!(s, solve_scalar_linear(&inst, &q(3)).unwrap());
    }

    #[test]
    fn budget_excludes_the_long_cheap_path() {
        // 0 -> 1 -> 3 is cheap but takes 4; 0 -> 2 -> 3 costs more but takes 2
        let dag = Dag::new(4, 0, 3, [(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(1, 1), aff(1, 1), aff(1, 5), aff(1, 5)], q(-1), None).unwrap();
        let durations = [2, 2, 1, 1];
        let free = solve_scalar_linear(&inst, &q(0)).unwrap();
        assert_eq!(free.path, Path::new(vec![0, 1]));
        let tight = solve_scalar_linear_budgeted(&inst, &q(0), &durations, 2).unwrap();
        assert_eq!(tight.path, Path::new(vec![2, 3]));
        assert_eq!(tight.cost, q(-10));
        let loose = solve_scalar_linear_budgeted(&inst, &q(0), &durations, 4).unwrap();
        assert_eq!(loose.path, free.path);
    }

    #[test]
    fn budget_input_checks() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let inst = Inst::scalar(dag, vec![aff(2, 1)], q(-1), None).unwrap();
        assert!(matches!(solve_scalar_linear_budgeted(&inst, &q(0), &[], 2), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(solve_scalar_linear_budgeted(&inst, &q(0), &[0], 2), Err(Error::InvalidWeight { .. })));
    }

    #[test]
    fn rounds_match_edge_limited_oracle() {
        let dag = Dag::new(4, 0, 3, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)]).unwrap();
        let w = vec![aff(-2, 1), aff(3, -1), aff(-1, 2), aff(1, 4), aff(2, 0), aff(-1, -3)];
        let inst = Inst::scalar(dag, w, q(1), None).unwrap();
        let x0 = q(2);
        let trace = relax_trace(&inst, &x0, 3).unwrap();
        for (k, state) in trace.iter().enumerate() {
            let expect = extremes_within(&inst, &x0, k).unwrap();
            for v in 0..4 {
                let got = state.r_min[v].clone().zip(state.r_max[v].clone());
                assert_eq!(got, expect[v], "round {k} vertex {v}");
            }
        }
    }
}
