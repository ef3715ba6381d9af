//! Generators for the layered two-choice graph `G_n` and the instance
//! families built on it.
//!
//! `G_n` has vertices `v_0..v_n` and, for every layer `i`, two parallel edges
//! `v_i -> v_{i+1}`: edge `2i` carries the 0-label weight and edge `2i + 1` the
//! 1-label weight. A path is a bit string read from the source, and its cost
//! applies the first bit's weight innermost.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{AffineMap, Dag, GppInstance, Path, ScalarWeight, Weights};
use crate::piecewise::{Line, PlFunction};
use crate::{q, rational, Rational};

/// A path of `G_n` as a bit string, first bit = first layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SigmaString(Vec<u8>);

impl SigmaString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidPath("sigma string must have at least one bit".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidPath("sigma string bits must be 0 or 1".into()));
        }
        Ok(SigmaString(bits))
    }

    /// The `n`-bit string of `index`, most significant bit first.
    pub fn from_index(n: usize, index: usize) -> Self {
        SigmaString((0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect())
    }

    /// All `2^n` strings in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = SigmaString> {
        (0..1usize << n).map(move |i| SigmaString::from_index(n, i))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Edge ids of this path in `G_n`.
    pub fn path(&self) -> Path {
        Path::new(self.0.iter().enumerate().map(|(i, &b)| 2 * i + b as usize).collect())
    }

    /// Inverse of [`SigmaString::path`] on the first `n` layers.
    pub fn from_path(path: &Path) -> Result<Self> {
        let bits = path
            .edges()
            .iter()
            .enumerate()
            .map(|(i, &e)| match e.checked_sub(2 * i) {
                Some(b @ (0 | 1)) => Ok(b as u8),
                _ => Err(Error::InvalidPath(format!("edge {e} is not in layer {i}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        SigmaString::new(bits)
    }
}

impl fmt::Display for SigmaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `G_n`: `n + 1` vertices and `2n` edges, weights `f0` / `f1` per layer.
pub fn make_gn(n: usize, f0: ScalarWeight, f1: ScalarWeight) -> Result<(Dag, Vec<ScalarWeight>)> {
    if n == 0 {
        return Err(Error::InvalidEndpoints("G_n needs n >= 1".into()));
    }
    let edges = (0..n).flat_map(|i| [(i, i + 1), (i, i + 1)]);
    let dag = Dag::new(n + 1, 0, n, edges)?;
    let weights = (0..n).flat_map(|_| [f0.clone(), f1.clone()]).collect();
    Ok((dag, weights))
}

/// Weight of the final edge of the set-partition gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LastEdge {
    Abs,
    Square,
}

/// Set-partition instance together with its construction parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SetPartitionGadget {
    pub instance: GppInstance,
    /// `ceil(delta + 1)`, the factor every element was multiplied by.
    pub scale: BigInt,
    pub epsilon: Rational,
    pub delta: Rational,
}

impl SetPartitionGadget {
    /// Minimum composed value over all paths, i.e. the negated optimum.
    pub fn min_value(optimum: &Rational) -> Rational {
        -optimum.clone()
    }
}

/// Exact `ceil(x)`.
pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Reduction from set partition. Layer `i` adds or subtracts the scaled
/// element `ceil(delta + 1) * a_i`; a final edge takes `|x|` (or `x^2`).
/// `L = -1` and `x0 = 0`, so the optimum is `0` exactly when the elements
/// split into two sets of equal sum. `epsilon` is recorded but unused.
pub fn set_partition_gadget(
    elements: &[i64],
    epsilon: Rational,
    delta: Rational,
    last_edge: LastEdge,
) -> Result<SetPartitionGadget> {
    if elements.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(index) = elements.iter().position(|&a| a == 0) {
        return Err(Error::ZeroElement { index });
    }
    if delta.is_negative() || epsilon.is_negative() {
        return Err(Error::InvalidWeight { edge: 0, reason: "epsilon and delta must be nonnegative".into() });
    }
    let scale = ceil(&(delta.clone() + Rational::one()));
    let n = elements.len();
    let mut edges = Vec::with_capacity(2 * n + 1);
    let mut weights = Vec::with_capacity(2 * n + 1);
    for (i, &a) in elements.iter().enumerate() {
        let scaled = Rational::from_integer(scale.clone() * BigInt::from(a));
        edges.push((i, i + 1));
        weights.push(ScalarWeight::affine(q(1), scaled.clone()));
        edges.push((i, i + 1));
        weights.push(ScalarWeight::affine(q(1), -scaled));
    }
    edges.push((n, n + 1));
    weights.push(match last_edge {
        LastEdge::Abs => ScalarWeight::piecewise(PlFunction::abs_at(q(0))),
        LastEdge::Square => ScalarWeight::Quadratic { a: q(1), b: q(0), c: q(0) },
    });
    let dag = Dag::new(n + 2, 0, n + 1, edges)?;
    let instance = GppInstance::scalar(dag, weights, q(-1), Some(q(0)))?;
    Ok(SetPartitionGadget { instance, scale, epsilon, delta })
}

/// Reduction from product partition on `k = 2` vectors. Layer `i` carries
/// `diag(a_i, 1/a_i)` or `diag(1/a_i, a_i)`, `x0 = [-1, -1]` and `L = [1, 1]`,
/// so a path whose chosen ratio is `a` costs `-(a + 1/a)`: `-2` exactly when
/// the two products balance, strictly less otherwise.
pub fn product_partition_gadget(elements: &[i64]) -> Result<GppInstance> {
    if elements.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&value) = elements.iter().find(|&&a| a <= 0) {
        return Err(Error::NonPositiveElement { value });
    }
    let n = elements.len();
    let edges = (0..n).flat_map(|i| [(i, i + 1), (i, i + 1)]);
    let dag = Dag::new(n + 1, 0, n, edges)?;
    let maps = elements
        .iter()
        .flat_map(|&a| {
            let (a, inv) = (q(a), rational(1, a));
            [AffineMap::diagonal(vec![a.clone(), inv.clone()]), AffineMap::diagonal(vec![inv, a])]
        })
        .collect();
    GppInstance::new(dag, Weights::Vector(maps), vec![q(1), q(1)], Some(vec![q(-1), q(-1)]))
}

/// `f0(x) = |1 - 3x|`, bijective from `[0, 1/3]` onto `[0, 1]`.
pub fn lowerbound_f0() -> PlFunction {
    PlFunction::abs_at(rational(1, 3)).then_affine(&Line::new(q(3), q(0)))
}

/// `f1(x) = |2 - 3x|`, bijective from `[2/3, 1]` onto `[0, 1]`.
pub fn lowerbound_f1() -> PlFunction {
    PlFunction::abs_at(rational(2, 3)).then_affine(&Line::new(q(3), q(0)))
}

/// `G_n` with the two V-shaped weights, `L = -1` and no start value. Its
/// optimal-cost function needs all `2^n` paths.
pub fn lowerbound_instance(n: usize) -> Result<GppInstance> {
    let (dag, weights) = make_gn(
        n,
        ScalarWeight::piecewise(lowerbound_f0()),
        ScalarWeight::piecewise(lowerbound_f1()),
    )?;
    GppInstance::scalar(dag, weights, q(-1), None)
}

/// Cost function of the `G_n` path `sigma` under the lower-bound weights.
pub fn sigma_function(sigma: &SigmaString) -> PlFunction {
    let (f0, f1) = (lowerbound_f0(), lowerbound_f1());
    sigma
        .bits()
        .iter()
        .fold(PlFunction::identity(), |acc, &b| if b == 0 { f0.compose(&acc) } else { f1.compose(&acc) })
}

/// Evaluates the lower-bound path cost of `sigma` at one point.
pub fn sigma_eval(sigma: &SigmaString, x: &Rational) -> Rational {
    let (f0, f1) = (lowerbound_f0(), lowerbound_f1());
    sigma.bits().iter().fold(x.clone(), |v, &b| if b == 0 { f0.eval(&v) } else { f1.eval(&v) })
}

/// For every `sigma` of length `n`, the unique point in `(0, 1)` where the
/// path cost of `sigma` vanishes while every other path stays positive.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaCertificate {
    n: usize,
    /// Indexed by [`SigmaString::from_index`] order.
    values: Vec<Rational>,
}

impl AlphaCertificate {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, sigma: &SigmaString) -> &Rational {
        let index = sigma.bits().iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
        &self.values[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SigmaString, &Rational)> {
        self.values.iter().enumerate().map(|(i, v)| (SigmaString::from_index(self.n, i), v))
    }

    /// Checks the four certificate properties exactly; returns the first
    /// failure as a message.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let third = rational(1, 3);
        let two_thirds = rational(2, 3);
        for (sigma, a) in self.iter() {
            if !(a.is_positive() && *a < Rational::one()) {
                return Err(format!("alpha({sigma}) = {a} outside (0, 1)"));
            }
            let in_half = if sigma.bits()[0] == 0 {
                *a <= third
            } else {
                *a >= two_thirds
            };
            if !in_half {
                return Err(format!("alpha({sigma}) = {a} in the wrong third"));
            }
        }
        let mut sorted: Vec<&Rational> = self.values.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err("alpha is not injective".into());
        }
        let (f0, f1) = (lowerbound_f0(), lowerbound_f1());
        for (tau, a) in self.iter() {
            // walk the tree of bit prefixes so shared prefixes are evaluated once
            let mut stack = vec![(0usize, 0usize, a.clone())];
            while let Some((depth, index, v)) = stack.pop() {
                if depth == self.n {
                    let sigma = SigmaString::from_index(self.n, index);
                    let zero = v.is_zero();
                    if zero != (sigma == tau) {
                        return Err(format!("f_{sigma}(alpha({tau})) zero = {zero}"));
                    }
                    continue;
                }
                stack.push((depth + 1, index * 2 + 1, f1.eval(&v)));
                stack.push((depth + 1, index * 2, f0.eval(&v)));
            }
        }
        Ok(())
    }
}

/// Builds the certificate by inverting `f0` on `[0, 1/3]` (`x = (1 - y)/3`)
/// or `f1` on `[2/3, 1]` (`x = (2 + y)/3`), starting from the zeros `1/3`
/// and `2/3`.
pub fn alpha(n: usize) -> Result<AlphaCertificate> {
    if n == 0 {
        return Err(Error::InvalidPath("alpha needs n >= 1".into()));
    }
    let inverse = |bit: usize, y: &Rational| -> Rational {
        if bit == 0 {
            (Rational::one() - y) / q(3)
        } else {
            (q(2) + y) / q(3)
        }
    };
    let mut values = vec![Rational::zero()];
    for len in 1..=n {
        // prepend a leading bit to every string of length len - 1
        let mut next = Vec::with_capacity(values.len() * 2);
        for bit in 0..2 {
            next.extend(values.iter().map(|y| inverse(bit, y)));
        }
        values = next;
        debug_assert_eq!(values.len(), 1 << len);
    }
    Ok(AlphaCertificate { n, values })
}
