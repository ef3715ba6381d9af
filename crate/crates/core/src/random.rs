//! Seedable random instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Dag, GppInstance, ScalarWeight};
use crate::{q, rational, Rational};

/// Shape of a random affine scalar instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomDagParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Slopes and intercepts are drawn from `-coeff..=coeff`.
    pub coeff: i64,
}

impl Default for RandomDagParams {
    fn default() -> Self {
        RandomDagParams { min_vertices: 2, max_vertices: 12, max_edges: 24, coeff: 9 }
    }
}

/// A DAG on vertices `0..n` (already in topological order) with source `0`,
/// target `n - 1`, a random source-target backbone plus random forward edges,
/// and integer affine weights. `L` is a nonzero integer in `-3..=3`.
pub fn random_affine_instance<R: Rng + ?Sized>(rng: &mut R, params: &RandomDagParams) -> GppInstance {
    let n = rng.gen_range(params.min_vertices.max(2)..=params.max_vertices.max(2));
    let mut backbone: Vec<usize> = (1..n - 1).filter(|_| rng.gen_bool(0.5)).collect();
    backbone.insert(0, 0);
    backbone.push(n - 1);
    let mut edges: Vec<(usize, usize)> = backbone.windows(2).map(|w| (w[0], w[1])).collect();
    let target_edges = rng.gen_range(edges.len()..=params.max_edges.max(edges.len()));
    while edges.len() < target_edges {
        let u = rng.gen_range(0..n - 1);
        let v = rng.gen_range(u + 1..n);
        edges.push((u, v));
    }
    edges.shuffle(rng);
    let c = params.coeff;
    let weights = edges
        .iter()
        .map(|_| ScalarWeight::affine(q(rng.gen_range(-c..=c)), q(rng.gen_range(-c..=c))))
        .collect();
    let mut l = 0;
    while l == 0 {
        l = rng.gen_range(-3..=3);
    }
    let dag = Dag::new(n, 0, n - 1, edges).expect("forward edges form a DAG");
    GppInstance::scalar(dag, weights, q(l), None).expect("backbone makes the target reachable")
}

/// A rational in `[lo, hi]` with denominator at most `max_den`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den.max(1));
    rational(rng.gen_range(lo * den..=hi * den), den)
}
