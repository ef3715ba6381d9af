//! Exact continuous piecewise-linear functions on the whole real line.
//!
//! A function with breakpoints `b_0 < .. < b_{m-1}` has `m + 1` affine pieces;
//! piece `i` covers `[b_{i-1}, b_i)` with the outer cells unbounded. Continuity
//! makes the half-open convention unobservable through [`PlFunction::eval`].
//!
//! [`AnnotatedPl`] attaches a witness to every piece. Its pieces are split
//! wherever the witness changes, even if the line does not, so the plain
//! function is recovered with [`AnnotatedPl::function`].

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

/// The affine map `x -> slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line<T = Rational> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> Line<T> {
    pub fn new(slope: T, intercept: T) -> Self {
        Line { slope, intercept }
    }

    pub fn identity() -> Self {
        Line::new(T::one(), T::zero())
    }

    pub fn constant(value: T) -> Self {
        Line::new(T::zero(), value)
    }

    pub fn eval(&self, x: &T) -> T {
        self.slope.clone() * x.clone() + self.intercept.clone()
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn after(&self, inner: &Line<T>) -> Line<T> {
        Line::new(
            self.slope.clone() * inner.slope.clone(),
            self.slope.clone() * inner.intercept.clone() + self.intercept.clone(),
        )
    }

    pub fn neg(&self) -> Line<T> {
        Line::new(-self.slope.clone(), -self.intercept.clone())
    }

    /// Abscissa where two non-parallel lines meet.
    pub fn crossing(&self, other: &Line<T>) -> Option<T> {
        if self.slope == other.slope {
            return None;
        }
        Some(
            (other.intercept.clone() - self.intercept.clone())
                / (self.slope.clone() - other.slope.clone()),
        )
    }
}

/// A continuous piecewise-linear function in canonical (maximally merged) form.
#[derive(Clone, Debug, PartialEq)]
pub struct PlFunction<T = Rational> {
    breakpoints: Vec<T>,
    pieces: Vec<Line<T>>,
}

/// A piecewise-linear function with one witness per piece.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedPl<T = Rational, W = usize> {
    breakpoints: Vec<T>,
    lines: Vec<Line<T>>,
    witnesses: Vec<W>,
}

/// A point strictly inside the cell `(lo, hi)`; `None` bounds are infinite.
pub(crate) fn interior_point<T: Scalar>(lo: Option<&T>, hi: Option<&T>) -> T {
    match (lo, hi) {
        (None, None) => T::zero(),
        (Some(a), None) => a.clone() + T::one(),
        (None, Some(b)) => b.clone() - T::one(),
        (Some(a), Some(b)) => T::midpoint(a, b),
    }
}

fn strictly_inside<T: Scalar>(x: &T, lo: Option<&T>, hi: Option<&T>) -> bool {
    lo.map_or(true, |l| x > l) && hi.map_or(true, |h| x < h)
}

/// Appends pieces left to right, merging a piece into its predecessor when both
/// line and witness agree.
struct Builder<T, W> {
    breakpoints: Vec<T>,
    lines: Vec<Line<T>>,
    witnesses: Vec<W>,
}

impl<T: Scalar, W: Clone + PartialEq> Builder<T, W> {
    fn new() -> Self {
        Builder { breakpoints: Vec::new(), lines: Vec::new(), witnesses: Vec::new() }
    }

    /// `start` is the left end of the new cell; ignored for the first piece.
    fn push(&mut self, start: Option<&T>, line: Line<T>, witness: W) {
        if let (Some(last), Some(last_w)) = (self.lines.last(), self.witnesses.last()) {
            if *last == line && *last_w == witness {
                return;
            }
            let start = start.expect("only the first cell is unbounded on the left");
            self.breakpoints.push(start.clone());
        }
        self.lines.push(line);
        self.witnesses.push(witness);
    }

    fn finish(self) -> AnnotatedPl<T, W> {
        debug_assert_eq!(self.lines.len(), self.breakpoints.len() + 1);
        AnnotatedPl { breakpoints: self.breakpoints, lines: self.lines, witnesses: self.witnesses }
    }
}

impl<T: Scalar> PlFunction<T> {
    /// Builds a function from raw parts, checking ordering and continuity and
    /// merging identical adjacent pieces.
    pub fn new(breakpoints: Vec<T>, pieces: Vec<Line<T>>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::ShapeViolation(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        for (i, pair) in breakpoints.windows(2).enumerate() {
            if pair[0] >= pair[1] {
                return Err(Error::ShapeViolation(format!(
                    "breakpoints not strictly increasing at index {}",
                    i + 1
                )));
            }
        }
        for (i, b) in breakpoints.iter().enumerate() {
            if pieces[i].eval(b) != pieces[i + 1].eval(b) {
                return Err(Error::ShapeViolation(format!("discontinuity at breakpoint {b:?}")));
            }
        }
        let mut builder = Builder::new();
        for (i, line) in pieces.into_iter().enumerate() {
            builder.push(if i == 0 { None } else { Some(&breakpoints[i - 1]) }, line, ());
        }
        Ok(builder.finish().function())
    }

    pub fn affine(line: Line<T>) -> Self {
        PlFunction { breakpoints: Vec::new(), pieces: vec![line] }
    }

    pub fn identity() -> Self {
        Self::affine(Line::identity())
    }

    /// `|x - center|`.
    pub fn abs_at(center: T) -> Self {
        PlFunction {
            pieces: vec![
                Line::new(-T::one(), center.clone()),
                Line::new(T::one(), -center.clone()),
            ],
            breakpoints: vec![center],
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Line<T>] {
        &self.pieces
    }

    /// Number of maximal affine pieces.
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Index of the piece whose half-open cell contains `x`.
    pub fn piece_index(&self, x: &T) -> usize {
        self.breakpoints.partition_point(|b| b <= x)
    }

    pub fn eval(&self, x: &T) -> T {
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Slopes strictly decreasing left to right.
    pub fn is_concave(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].slope > w[1].slope)
    }

    /// Slopes strictly increasing left to right.
    pub fn is_convex(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].slope < w[1].slope)
    }

    pub fn is_monotone(&self) -> bool {
        self.pieces.iter().all(|l| l.slope >= T::zero())
            || self.pieces.iter().all(|l| l.slope <= T::zero())
    }

    /// `outer ∘ self` for an affine `outer`.
    pub fn then_affine(&self, outer: &Line<T>) -> Self {
        if outer.slope.is_zero() {
            return Self::affine(outer.clone());
        }
        PlFunction {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|l| outer.after(l)).collect(),
        }
    }

    pub fn annotate<W: Clone>(&self, witness: W) -> AnnotatedPl<T, W> {
        AnnotatedPl {
            breakpoints: self.breakpoints.clone(),
            lines: self.pieces.clone(),
            witnesses: vec![witness; self.pieces.len()],
        }
    }

    pub fn pointwise_min(&self, other: &Self) -> Self {
        self.annotate(()).min(&other.annotate(())).function()
    }

    pub fn pointwise_max(&self, other: &Self) -> Self {
        self.annotate(()).max(&other.annotate(())).function()
    }

    /// `self ∘ inner`. `inner` need not be monotone.
    pub fn compose(&self, inner: &Self) -> Self {
        self.annotate(()).compose_inner(inner).function()
    }
}

impl<T: Scalar, W: Clone + PartialEq> AnnotatedPl<T, W> {
    /// Trusts the caller for ordering, continuity and lengths.
    pub(crate) fn from_parts(breakpoints: Vec<T>, lines: Vec<Line<T>>, witnesses: Vec<W>) -> Self {
        debug_assert_eq!(lines.len(), breakpoints.len() + 1);
        debug_assert_eq!(lines.len(), witnesses.len());
        AnnotatedPl { breakpoints, lines, witnesses }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn lines(&self) -> &[Line<T>] {
        &self.lines
    }

    pub fn witnesses(&self) -> &[W] {
        &self.witnesses
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Bounds of piece `i`; `None` is infinite.
    pub fn cell(&self, i: usize) -> (Option<&T>, Option<&T>) {
        let lo = if i == 0 { None } else { Some(&self.breakpoints[i - 1]) };
        (lo, self.breakpoints.get(i))
    }

    pub fn piece_index(&self, x: &T) -> usize {
        self.breakpoints.partition_point(|b| b <= x)
    }

    pub fn eval(&self, x: &T) -> T {
        self.lines[self.piece_index(x)].eval(x)
    }

    pub fn witness_at(&self, x: &T) -> &W {
        &self.witnesses[self.piece_index(x)]
    }

    /// The underlying function with witness boundaries removed.
    pub fn function(&self) -> PlFunction<T> {
        let mut builder: Builder<T, ()> = Builder::new();
        for (i, line) in self.lines.iter().enumerate() {
            builder.push(self.cell(i).0, line.clone(), ());
        }
        let merged = builder.finish();
        PlFunction { breakpoints: merged.breakpoints, pieces: merged.lines }
    }

    pub fn map_witnesses<V: Clone + PartialEq>(&self, mut f: impl FnMut(&W) -> V) -> AnnotatedPl<T, V> {
        let mut builder = Builder::new();
        for (i, (line, w)) in self.lines.iter().zip(&self.witnesses).enumerate() {
            builder.push(self.cell(i).0, line.clone(), f(w));
        }
        builder.finish()
    }

    /// Number of distinct witnesses over all pieces.
    pub fn distinct_witnesses(&self) -> usize
    where
        W: Ord,
    {
        let mut ws: Vec<&W> = self.witnesses.iter().collect();
        ws.sort();
        ws.dedup();
        ws.len()
    }

    /// Collapses adjacent pieces on the same line, keeping the smaller witness.
    /// Only sound when every witness's cost is one global line, as for affine
    /// path families.
    pub fn merge_equal_lines(&self) -> Self
    where
        W: Ord,
    {
        let mut out = AnnotatedPl { breakpoints: Vec::new(), lines: Vec::new(), witnesses: Vec::new() };
        for (i, (line, w)) in self.lines.iter().zip(&self.witnesses).enumerate() {
            if out.lines.last() == Some(line) {
                let last = out.witnesses.last_mut().unwrap();
                if w < last {
                    *last = w.clone();
                }
                continue;
            }
            if i > 0 {
                out.breakpoints.push(self.breakpoints[i - 1].clone());
            }
            out.lines.push(line.clone());
            out.witnesses.push(w.clone());
        }
        out
    }

    /// `self ∘ inner`; every output piece keeps the witness of the piece of
    /// `self` it was evaluated on. `inner` need not be monotone.
    pub fn compose_inner(&self, inner: &PlFunction<T>) -> Self {
        self.compose_inner_by(inner, |_, _| false)
    }

    /// [`compose_inner`](Self::compose_inner), except that a constant piece of
    /// `inner` sitting exactly on a breakpoint of `self` takes the left
    /// witness when `prefer_left(left, right)` holds. Both neighbours have the
    /// same value there, so only the witness changes.
    pub fn compose_inner_by(&self, inner: &PlFunction<T>, mut prefer_left: impl FnMut(&W, &W) -> bool) -> Self {
        let mut builder = Builder::new();
        for (i, g) in inner.pieces().iter().enumerate() {
            let lo = if i == 0 { None } else { Some(&inner.breakpoints()[i - 1]) };
            let hi = inner.breakpoints().get(i);
            if g.slope.is_zero() {
                let mut k = self.piece_index(&g.intercept);
                if k > 0 && self.breakpoints[k - 1] == g.intercept && prefer_left(&self.witnesses[k - 1], &self.witnesses[k]) {
                    k -= 1;
                }
                builder.push(lo, Line::constant(self.lines[k].eval(&g.intercept)), self.witnesses[k].clone());
                continue;
            }
            // breakpoints of `self` hit by g on this cell, as preimages
            let y_lo = lo.map(|x| g.eval(x));
            let y_hi = hi.map(|x| g.eval(x));
            let (img_lo, img_hi) = if g.slope > T::zero() { (y_lo, y_hi) } else { (y_hi, y_lo) };
            let first = img_lo.as_ref().map_or(0, |y| self.breakpoints.partition_point(|b| b <= y));
            let last = img_hi
                .as_ref()
                .map_or(self.breakpoints.len(), |y| self.breakpoints.partition_point(|b| b < y));
            let mut cuts: Vec<T> = self.breakpoints[first..last.max(first)]
                .iter()
                .map(|b| (b.clone() - g.intercept.clone()) / g.slope.clone())
                .filter(|x| strictly_inside(x, lo, hi))
                .collect();
            if g.slope < T::zero() {
                cuts.reverse();
            }
            let mut start = lo.cloned();
            for k in 0..=cuts.len() {
                let end = cuts.get(k).or(hi);
                let mid = interior_point(start.as_ref(), end);
                let j = self.piece_index(&g.eval(&mid));
                builder.push(start.as_ref(), self.lines[j].after(g), self.witnesses[j].clone());
                start = end.cloned();
            }
        }
        builder.finish()
    }

    /// Pointwise minimum; `self` wins where the two coincide.
    pub fn min(&self, other: &Self) -> Self {
        self.combine(other, Ordering::Less)
    }

    /// Pointwise maximum; `self` wins where the two coincide.
    pub fn max(&self, other: &Self) -> Self {
        self.combine(other, Ordering::Greater)
    }

    fn combine(&self, other: &Self, prefer: Ordering) -> Self {
        let mut cuts: Vec<&T> = self.breakpoints.iter().chain(&other.breakpoints).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("breakpoints are comparable"));
        cuts.dedup_by(|a, b| a == b);

        let mut builder = Builder::new();
        let mut start: Option<&T> = None;
        for k in 0..=cuts.len() {
            let end = cuts.get(k).copied();
            let probe = interior_point(start, end);
            let (i, j) = (self.piece_index(&probe), other.piece_index(&probe));
            let (a, wa) = (&self.lines[i], &self.witnesses[i]);
            let (b, wb) = (&other.lines[j], &other.witnesses[j]);
            if a == b {
                builder.push(start, a.clone(), wa.clone());
            } else {
                let split = a.crossing(b).filter(|x| strictly_inside(x, start, end));
                let ends: Vec<Option<&T>> = match &split {
                    Some(x) => vec![Some(x), end],
                    None => vec![end],
                };
                let mut sub_start = start.cloned();
                for sub_end in ends {
                    let p = interior_point(sub_start.as_ref(), sub_end);
                    let ord = a.eval(&p).partial_cmp(&b.eval(&p)).expect("comparable values");
                    if ord == prefer {
                        builder.push(sub_start.as_ref(), a.clone(), wa.clone());
                    } else {
                        builder.push(sub_start.as_ref(), b.clone(), wb.clone());
                    }
                    sub_start = sub_end.cloned();
                }
            }
            start = end;
        }
        builder.finish()
    }
}

/// Lower envelope of a nonempty line family. Each piece is witnessed by the
/// index of a line attaining the minimum there; among identical lines the
/// smallest index wins.
pub fn lower_envelope<T: Scalar>(lines: &[Line<T>]) -> Result<AnnotatedPl<T, usize>> {
    if lines.is_empty() {
        return Err(Error::ShapeViolation("envelope of an empty line family".into()));
    }
    let mut order: Vec<usize> = (0..lines.len()).collect();
    // slope descending: the steepest line is lowest towards -inf
    order.sort_by(|&i, &j| {
        let (a, b) = (&lines[i], &lines[j]);
        b.slope
            .partial_cmp(&a.slope)
            .unwrap()
            .then(a.intercept.partial_cmp(&b.intercept).unwrap())
            .then(i.cmp(&j))
    });
    order.dedup_by(|later, earlier| lines[*later].slope == lines[*earlier].slope);

    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for idx in order {
        while hull.len() >= 2 {
            let a = &lines[hull[hull.len() - 2]];
            let b = &lines[hull[hull.len() - 1]];
            let l = &lines[idx];
            if a.crossing(l).unwrap() <= a.crossing(b).unwrap() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(idx);
    }

    let breakpoints = hull.windows(2).map(|w| lines[w[0]].crossing(&lines[w[1]]).unwrap()).collect();
    Ok(AnnotatedPl {
        breakpoints,
        lines: hull.iter().map(|&i| lines[i].clone()).collect(),
        witnesses: hull,
    })
}

/// Upper envelope, the mirror image of [`lower_envelope`].
pub fn upper_envelope<T: Scalar>(lines: &[Line<T>]) -> Result<AnnotatedPl<T, usize>> {
    let negated: Vec<Line<T>> = lines.iter().map(Line::neg).collect();
    let low = lower_envelope(&negated)?;
    Ok(AnnotatedPl {
        breakpoints: low.breakpoints,
        lines: low.lines.iter().map(Line::neg).collect(),
        witnesses: low.witnesses,
    })
}

/// Envelopes of the composed family `{f ∘ g}` from the envelopes of `F` and
/// `G`. The minimum of a concave function over a set of reals is attained at
/// the set's extremes, so only `G↓` and `G↑` are ever needed as inner values.
pub fn compose_envelope_sets<T: Scalar>(
    f_down: &PlFunction<T>,
    f_up: &PlFunction<T>,
    g_down: &PlFunction<T>,
    g_up: &PlFunction<T>,
) -> Result<(PlFunction<T>, PlFunction<T>)> {
    for (name, f, concave) in
        [("F lower", f_down, true), ("F upper", f_up, false), ("G lower", g_down, true), ("G upper", g_up, false)]
    {
        let ok = if concave { f.is_concave() } else { f.is_convex() };
        if !ok {
            let shape = if concave { "concave" } else { "convex" };
            return Err(Error::ShapeViolation(format!("{name} envelope is not {shape}")));
        }
    }
    let h_down = f_down.compose(g_down).pointwise_min(&f_down.compose(g_up));
    let h_up = f_up.compose(g_down).pointwise_max(&f_up.compose(g_up));
    Ok((h_down, h_up))
}

/// Piece bound for `f ∘ g` with arbitrary `g`: the sum over maximal monotone
/// runs of `g` of `p(f) + p(run)`. Reduces to `p(f) + p(g)` for monotone `g`.
pub fn compose_piece_bound<T: Scalar>(f: &PlFunction<T>, g: &PlFunction<T>) -> usize {
    let mut runs: Vec<usize> = Vec::new();
    let mut dir = 0i8;
    for line in g.pieces() {
        let d = if line.slope > T::zero() {
            1
        } else if line.slope < T::zero() {
            -1
        } else {
            0
        };
        match runs.last_mut() {
            Some(len) if d == 0 || dir == 0 || d == dir => {
                *len += 1;
                if dir == 0 {
                    dir = d;
                }
            }
            _ => {
                runs.push(1);
                dir = d;
            }
        }
    }
    runs.iter().map(|r| f.piece_count() + r).sum()
}
