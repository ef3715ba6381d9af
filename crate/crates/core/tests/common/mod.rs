#![allow(dead_code)]

use gpp_core::piecewise::Line;
use gpp_core::{rational, PlFunction, Rational};
use proptest::prelude::*;
use rand::Rng;

/// Continuous PL function with the given cut points (sorted and deduplicated
/// here), piece slopes, and value at the leftmost cut.
pub fn pl_from(cuts: &[(i64, i64)], slopes: &[i64], start: i64) -> PlFunction {
    let mut bps: Vec<Rational> = cuts.iter().map(|&(n, d)| rational(n, d)).collect();
    bps.sort();
    bps.dedup();
    let mut slopes: Vec<Rational> = slopes.iter().take(bps.len() + 1).map(|&s| rational(s, 1)).collect();
    slopes.resize(bps.len() + 1, rational(1, 1));
    let anchor = bps.first().cloned().unwrap_or_else(|| rational(0, 1));
    let mut pieces = vec![Line::new(slopes[0].clone(), rational(start, 1) - slopes[0].clone() * anchor)];
    for (i, b) in bps.iter().enumerate() {
        let value = pieces[i].eval(b);
        let s = slopes[i + 1].clone();
        pieces.push(Line::new(s.clone(), value.clone() - s * b.clone()));
    }
    PlFunction::new(bps, pieces).expect("continuous by construction")
}

pub fn arb_pl() -> impl Strategy<Value = PlFunction> {
    (
        prop::collection::vec((-20i64..=20, 1i64..=4), 0..6),
        prop::collection::vec(-4i64..=4, 7),
        -10i64..=10,
    )
        .prop_map(|(cuts, slopes, start)| pl_from(&cuts, &slopes, start))
}

/// Concave: slopes strictly decreasing.
pub fn arb_concave() -> impl Strategy<Value = PlFunction> {
    (prop::collection::vec((-20i64..=20, 1i64..=4), 0..5), prop::collection::btree_set(-6i64..=6, 6), -10i64..=10)
        .prop_map(|(cuts, slopes, start)| {
            let mut s: Vec<i64> = slopes.into_iter().collect();
            s.reverse();
            pl_from(&cuts, &s, start)
        })
}

pub fn arb_convex() -> impl Strategy<Value = PlFunction> {
    (prop::collection::vec((-20i64..=20, 1i64..=4), 0..5), prop::collection::btree_set(-6i64..=6, 6), -10i64..=10)
        .prop_map(|(cuts, slopes, start)| {
            let s: Vec<i64> = slopes.into_iter().collect();
            pl_from(&cuts, &s, start)
        })
}

/// Monotone non-decreasing or non-increasing.
pub fn arb_monotone() -> impl Strategy<Value = PlFunction> {
    (prop::collection::vec((-20i64..=20, 1i64..=4), 0..5), prop::collection::vec(0i64..=4, 6), -10i64..=10, any::<bool>())
        .prop_map(|(cuts, slopes, start, up)| {
            let s: Vec<i64> = slopes.into_iter().map(|v| if up { v } else { -v }).collect();
            pl_from(&cuts, &s, start)
        })
}

pub fn arb_line() -> impl Strategy<Value = Line> {
    (-9i64..=9, -9i64..=9, 1i64..=3).prop_map(|(a, b, d)| Line::new(rational(a, d), rational(b, 1)))
}

/// At least `n` points: every breakpoint, midpoints between them, margins on
/// both sides, and a uniform grid over the covered span.
pub fn sample_points(bps: &[&Rational], n: usize) -> Vec<Rational> {
    let mut pts: Vec<Rational> = Vec::new();
    let (lo, hi) = match (bps.iter().min(), bps.iter().max()) {
        (Some(lo), Some(hi)) => ((*lo).clone() - rational(5, 1), (*hi).clone() + rational(5, 1)),
        _ => (rational(-10, 1), rational(10, 1)),
    };
    for b in bps {
        pts.push((*b).clone());
        pts.push((*b).clone() + rational(1, 97));
        pts.push((*b).clone() - rational(1, 97));
    }
    let steps = n as i64;
    for i in 0..=steps {
        pts.push(lo.clone() + (hi.clone() - lo.clone()) * rational(i, steps));
    }
    pts
}

pub fn rng_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    gpp_core::random::random_rational(rng, lo, hi, 6)
}
