//! Instances of the generalized path problem: a DAG with one weight function
//! per edge, a liquidation vector `L` and an optional start value `x0`.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::piecewise::{Line, PlFunction};
use crate::scalar::Scalar;
use crate::Rational;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
}

/// A directed acyclic multigraph with distinguished source and target.
/// Edge ids are the positions in the edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    vertex_count: usize,
    source: VertexId,
    target: VertexId,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    topo: Vec<VertexId>,
}

impl Dag {
    pub fn new(
        vertex_count: usize,
        source: VertexId,
        target: VertexId,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidEndpoints("graph has no vertices".into()));
        }
        for (name, v) in [("source", source), ("target", target)] {
            if v >= vertex_count {
                return Err(Error::InvalidEndpoints(format!("{name} {v} outside 0..{vertex_count}")));
            }
        }
        if source == target {
            return Err(Error::InvalidEndpoints(format!("source and target are both {source}")));
        }
        let edges: Vec<Edge> = edges.into_iter().map(|(from, to)| Edge { from, to }).collect();
        let mut out_edges = vec![Vec::new(); vertex_count];
        let mut in_edges = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            for v in [e.from, e.to] {
                if v >= vertex_count {
                    return Err(Error::DanglingEdge { edge: id, vertex: v, vertex_count });
                }
            }
            out_edges[e.from].push(id);
            in_edges[e.to].push(id);
        }

        // Kahn's algorithm; leftovers sit on or behind a cycle
        let mut indegree: Vec<usize> = in_edges.iter().map(Vec::len).collect();
        let mut queue: VecDeque<VertexId> = (0..vertex_count).filter(|&v| indegree[v] == 0).collect();
        let mut topo = Vec::with_capacity(vertex_count);
        while let Some(v) = queue.pop_front() {
            topo.push(v);
            for &e in &out_edges[v] {
                let w = edges[e].to;
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if topo.len() < vertex_count {
            let vertex = find_cycle_vertex(&edges, &out_edges, &indegree);
            return Err(Error::CycleDetected { vertex });
        }
        Ok(Dag { vertex_count, source, target, edges, out_edges, in_edges, topo })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    /// Outgoing edge ids of `v`, ascending.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    /// Incoming edge ids of `v`, ascending.
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    pub fn reachable_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        seen[self.source] = true;
        for &v in &self.topo {
            if seen[v] {
                for &e in &self.out_edges[v] {
                    seen[self.edges[e].to] = true;
                }
            }
        }
        seen
    }

    pub fn reaches_target(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        seen[self.target] = true;
        for &v in self.topo.iter().rev() {
            if self.out_edges[v].iter().any(|&e| seen[self.edges[e].to]) {
                seen[v] = true;
            }
        }
        seen
    }

    /// Vertices lying on at least one source-target path.
    pub fn useful_vertices(&self) -> Vec<bool> {
        let fwd = self.reachable_from_source();
        let bwd = self.reaches_target();
        fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
    }

    pub fn target_reachable(&self) -> bool {
        self.reachable_from_source()[self.target]
    }

    pub fn check_path(&self, path: &Path) -> Result<()> {
        let ids = path.edges();
        let Some(&first) = ids.first() else {
            return Err(Error::InvalidPath("empty path".into()));
        };
        if let Some(&bad) = ids.iter().find(|&&e| e >= self.edges.len()) {
            return Err(Error::InvalidPath(format!("unknown edge {bad}")));
        }
        if self.edges[first].from != self.source {
            return Err(Error::InvalidPath(format!("edge {first} does not leave the source")));
        }
        for pair in ids.windows(2) {
            if self.edges[pair[0]].to != self.edges[pair[1]].from {
                return Err(Error::InvalidPath(format!("edges {} and {} do not chain", pair[0], pair[1])));
            }
        }
        let last = *ids.last().unwrap();
        if self.edges[last].to != self.target {
            return Err(Error::InvalidPath(format!("edge {last} does not enter the target")));
        }
        Ok(())
    }
}

fn find_cycle_vertex(edges: &[Edge], out_edges: &[Vec<EdgeId>], indegree: &[usize]) -> VertexId {
    // walk forward inside the leftover subgraph until a vertex repeats
    let n = indegree.len();
    let start = (0..n).find(|&v| indegree[v] > 0).expect("leftover vertex exists");
    let mut seen = vec![false; n];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        v = out_edges[v]
            .iter()
            .map(|&e| edges[e].to)
            .find(|&w| indegree[w] > 0)
            .unwrap_or(v);
    }
    v
}

/// A scalar edge weight `w_e : R -> R`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarWeight<T = Rational> {
    Affine(Line<T>),
    /// At least two pieces; one-piece functions are stored as `Affine`.
    PiecewiseAffine(PlFunction<T>),
    /// `a x^2 + b x + c` with `a != 0`. Point evaluation only.
    Quadratic { a: T, b: T, c: T },
}

impl<T: Scalar> ScalarWeight<T> {
    pub fn affine(slope: T, intercept: T) -> Self {
        ScalarWeight::Affine(Line::new(slope, intercept))
    }

    pub fn identity() -> Self {
        ScalarWeight::Affine(Line::identity())
    }

    /// Wraps a piecewise function, demoting it to `Affine` if it has one piece.
    pub fn piecewise(f: PlFunction<T>) -> Self {
        if f.piece_count() == 1 {
            ScalarWeight::Affine(f.pieces()[0].clone())
        } else {
            ScalarWeight::PiecewiseAffine(f)
        }
    }

    pub fn eval(&self, x: &T) -> T {
        match self {
            ScalarWeight::Affine(l) => l.eval(x),
            ScalarWeight::PiecewiseAffine(f) => f.eval(x),
            ScalarWeight::Quadratic { a, b, c } => {
                a.clone() * x.clone() * x.clone() + b.clone() * x.clone() + c.clone()
            }
        }
    }

    pub fn as_line(&self) -> Option<&Line<T>> {
        match self {
            ScalarWeight::Affine(l) => Some(l),
            _ => None,
        }
    }

    /// The weight as a piecewise-linear function, if it is one.
    pub fn to_pl(&self) -> Option<PlFunction<T>> {
        match self {
            ScalarWeight::Affine(l) => Some(PlFunction::affine(l.clone())),
            ScalarWeight::PiecewiseAffine(f) => Some(f.clone()),
            ScalarWeight::Quadratic { .. } => None,
        }
    }

    fn check(&self, edge: EdgeId) -> Result<()> {
        match self {
            ScalarWeight::PiecewiseAffine(f) if f.piece_count() < 2 => Err(Error::InvalidWeight {
                edge,
                reason: "piecewise weight with a single piece must be affine".into(),
            }),
            ScalarWeight::Quadratic { a, .. } if a.is_zero() => Err(Error::InvalidWeight {
                edge,
                reason: "quadratic weight with zero leading coefficient".into(),
            }),
            _ => Ok(()),
        }
    }
}

/// `x -> matrix * x + offset` on `R^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<T = Rational> {
    matrix: Vec<Vec<T>>,
    offset: Vec<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(matrix: Vec<Vec<T>>, offset: Vec<T>) -> Result<Self> {
        let k = offset.len();
        if matrix.len() != k {
            return Err(Error::DimensionMismatch { what: "matrix rows".into(), expected: k, found: matrix.len() });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { what: "matrix row".into(), expected: k, found: row.len() });
        }
        Ok(AffineMap { matrix, offset })
    }

    /// Linear map with the given diagonal.
    pub fn diagonal(entries: Vec<T>) -> Self {
        let k = entries.len();
        let matrix = entries
            .into_iter()
            .enumerate()
            .map(|(i, d)| (0..k).map(|j| if i == j { d.clone() } else { T::zero() }).collect())
            .collect();
        AffineMap { matrix, offset: vec![T::zero(); k] }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn offset(&self) -> &[T] {
        &self.offset
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| dot(row, x) + b.clone())
            .collect()
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weights<T = Rational> {
    Scalar(Vec<ScalarWeight<T>>),
    Vector(Vec<AffineMap<T>>),
}

impl<T> Weights<T> {
    pub fn len(&self) -> usize {
        match self {
            Weights::Scalar(w) => w.len(),
            Weights::Vector(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A validated GPP instance `(G, W, L, x0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GppInstance<T = Rational> {
    dag: Dag,
    weights: Weights<T>,
    liquidation: Vec<T>,
    x0: Option<Vec<T>>,
}

impl<T: Scalar> GppInstance<T> {
    pub fn new(dag: Dag, weights: Weights<T>, liquidation: Vec<T>, x0: Option<Vec<T>>) -> Result<Self> {
        let inst = GppInstance { dag, weights, liquidation, x0 };
        validate_instance(&inst)?;
        Ok(inst)
    }

    /// Scalar instance with `L = [liquidation]`.
    pub fn scalar(dag: Dag, weights: Vec<ScalarWeight<T>>, liquidation: T, x0: Option<T>) -> Result<Self> {
        Self::new(dag, Weights::Scalar(weights), vec![liquidation], x0.map(|x| vec![x]))
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn weights(&self) -> &Weights<T> {
        &self.weights
    }

    pub fn liquidation(&self) -> &[T] {
        &self.liquidation
    }

    pub fn x0(&self) -> Option<&[T]> {
        self.x0.as_deref()
    }

    pub fn k(&self) -> usize {
        self.liquidation.len()
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self.weights, Weights::Scalar(_))
    }

    pub fn with_x0(mut self, x0: Option<Vec<T>>) -> Result<Self> {
        self.x0 = x0;
        validate_instance(&self)?;
        Ok(self)
    }

    pub fn scalar_weights(&self) -> Result<&[ScalarWeight<T>]> {
        match &self.weights {
            Weights::Scalar(w) => Ok(w),
            Weights::Vector(_) => Err(Error::VectorInstance),
        }
    }

    /// The single liquidation coefficient of a scalar instance.
    pub fn scalar_liquidation(&self) -> Result<&T> {
        self.scalar_weights()?;
        Ok(&self.liquidation[0])
    }

    /// Every edge weight as a line, or the first edge that is not affine.
    pub fn affine_lines(&self) -> Result<Vec<Line<T>>> {
        self.scalar_weights()?
            .iter()
            .enumerate()
            .map(|(edge, w)| w.as_line().cloned().ok_or(Error::NonAffineWeight { edge }))
            .collect()
    }

    /// The composed value `w_{e_r}(..w_{e_1}(x0)..)` before liquidation.
    pub fn propagate(&self, path: &Path, x0: &[T]) -> Result<Vec<T>> {
        self.dag.check_path(path)?;
        if x0.len() != self.k() {
            return Err(Error::DimensionMismatch { what: "x0".into(), expected: self.k(), found: x0.len() });
        }
        Ok(match &self.weights {
            Weights::Scalar(w) => {
                vec![path.edges().iter().fold(x0[0].clone(), |x, &e| w[e].eval(&x))]
            }
            Weights::Vector(w) => path.edges().iter().fold(x0.to_vec(), |x, &e| w[e].apply(&x)),
        })
    }
}

/// Checks every structural invariant of an instance.
pub fn validate_instance<T: Scalar>(inst: &GppInstance<T>) -> Result<()> {
    let dag = &inst.dag;
    if inst.weights.len() != dag.edge_count() {
        return Err(Error::DimensionMismatch {
            what: "weights".into(),
            expected: dag.edge_count(),
            found: inst.weights.len(),
        });
    }
    let k = inst.liquidation.len();
    match &inst.weights {
        Weights::Scalar(ws) => {
            if k != 1 {
                return Err(Error::DimensionMismatch { what: "L".into(), expected: 1, found: k });
            }
            for (edge, w) in ws.iter().enumerate() {
                w.check(edge)?;
            }
        }
        Weights::Vector(maps) => {
            if k < 2 {
                return Err(Error::DimensionMismatch { what: "L (vector kind needs k >= 2)".into(), expected: 2, found: k });
            }
            for (edge, m) in maps.iter().enumerate() {
                if m.dim() != k {
                    return Err(Error::DimensionMismatch { what: format!("affine map of edge {edge}"), expected: k, found: m.dim() });
                }
            }
        }
    }
    if let Some(x0) = &inst.x0 {
        if x0.len() != k {
            return Err(Error::DimensionMismatch { what: "x0".into(), expected: k, found: x0.len() });
        }
    }
    if !dag.target_reachable() {
        return Err(Error::UnreachableTarget { from: dag.source(), target: dag.target() });
    }
    Ok(())
}

/// `L · w_{e_r}(..w_{e_1}(x0)..)`.
pub fn path_cost<T: Scalar>(inst: &GppInstance<T>, path: &Path, x0: &[T]) -> Result<T> {
    Ok(dot(inst.liquidation(), &inst.propagate(path, x0)?))
}

/// A source-target path as an edge id sequence. Orders lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<EdgeId>);

impl Path {
    pub fn new(edges: Vec<EdgeId>) -> Self {
        Path(edges)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_edges(self) -> Vec<EdgeId> {
        self.0
    }
}

impl From<Vec<EdgeId>> for Path {
    fn from(v: Vec<EdgeId>) -> Self {
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, rational};

    fn single_edge(a: i64, b: i64) -> GppInstance {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        GppInstance::scalar(dag, vec![ScalarWeight::affine(q(a), q(b))], q(-1), None).unwrap()
    }

    #[test]
    fn minimal_instance_is_valid() {
        let inst = single_edge(2, 1);
        assert!(validate_instance(&inst).is_ok());
        assert_eq!(path_cost(&inst, &Path::new(vec![0]), &[q(3)]).unwrap(), q(-7));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Dag::new(2, 0, 1, [(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::CycleDetected { .. }));
    }

    #[test]
    fn dangling_edge_and_endpoints() {
        assert!(matches!(
            Dag::new(2, 0, 1, [(0, 5)]),
            Err(Error::DanglingEdge { edge: 0, vertex: 5, .. })
        ));
        assert!(matches!(Dag::new(2, 1, 1, [(0, 1)]), Err(Error::InvalidEndpoints(_))));
    }

    #[test]
    fn vector_liquidation_dimension_mismatch() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let map = AffineMap::diagonal(vec![q(1), q(1)]);
        let err = GppInstance::new(dag, Weights::Vector(vec![map]), vec![q(1), q(1), q(1)], None).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn unreachable_target() {
        let dag = Dag::new(3, 0, 2, [(0, 1)]).unwrap();
        let err = GppInstance::scalar(dag, vec![ScalarWeight::identity()], q(1), None).unwrap_err();
        assert!(matches!(err, Error::UnreachableTarget { .. }));
    }

    #[test]
    fn weight_invariants() {
        let dag = Dag::new(2, 0, 1, [(0, 1)]).unwrap();
        let quad = ScalarWeight::Quadratic { a: q(0), b: q(1), c: q(0) };
        assert!(matches!(
            GppInstance::scalar(dag.clone(), vec![quad], q(1), None),
            Err(Error::InvalidWeight { edge: 0, .. })
        ));
        let one_piece = ScalarWeight::PiecewiseAffine(PlFunction::identity());
        assert!(GppInstance::scalar(dag.clone(), vec![one_piece], q(1), None).is_err());
        assert!(matches!(ScalarWeight::piecewise(PlFunction::<Rational>::identity()), ScalarWeight::Affine(_)));
        assert!(GppInstance::scalar(dag, vec![], q(1), None).is_err());
    }

    #[test]
    fn inverse_pair_cancels() {
        let dag = Dag::new(3, 0, 2, [(0, 1), (1, 2)]).unwrap();
        let w = vec![ScalarWeight::affine(q(1), q(1)), ScalarWeight::affine(q(1), q(-1))];
        let inst = GppInstance::scalar(dag, w, q(1), None).unwrap();
        assert_eq!(path_cost(&inst, &Path::new(vec![0, 1]), &[q(0)]).unwrap(), q(0));
    }

    #[test]
    fn invalid_paths() {
        let dag = Dag::new(3, 0, 2, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let inst = GppInstance::scalar(dag, vec![ScalarWeight::identity(); 3], q(1), None).unwrap();
        for bad in [vec![], vec![1], vec![0], vec![0, 2], vec![9]] {
            assert!(matches!(path_cost(&inst, &Path::new(bad), &[q(0)]), Err(Error::InvalidPath(_))));
        }
    }

    #[test]
    fn diagonal_chain_matches_hand_product() {
        // diag(6,1/6) diag(1/2,2) diag(1/3,3) diag(1,1): product diag(1,1)
        let dag = Dag::new(5, 0, 4, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let maps = [(6, 1, 1, 6), (1, 2, 2, 1), (1, 3, 3, 1), (1, 1, 1, 1)]
            .map(|(a, b, c, d)| AffineMap::diagonal(vec![rational(a, b), rational(c, d)]));
        let inst = GppInstance::new(dag, Weights::Vector(maps.to_vec()), vec![q(1), q(1)], None).unwrap();
        let cost = path_cost(&inst, &Path::new(vec![0, 1, 2, 3]), &[q(-1), q(-1)]).unwrap();
        assert_eq!(cost, q(-2));
    }

    #[test]
    fn affine_map_rejects_ragged_matrix() {
        assert!(AffineMap::new(vec![vec![q(1)], vec![q(0), q(1)]], vec![q(0), q(0)]).is_err());
        let m = AffineMap::new(vec![vec![q(1), q(2)], vec![q(3), q(4)]], vec![q(1), q(0)]).unwrap();
        assert_eq!(m.apply(&[q(1), q(1)]), vec![q(4), q(7)]);
    }
}
