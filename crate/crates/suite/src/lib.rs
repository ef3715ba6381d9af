//! The nine acceptance criteria. Each check runs to completion, counts its
//! violations and reports an [`Outcome`]; the `acceptance` test target prints
//! one line per criterion.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use gpp_cli::files::{parse_rational, InstanceFile};
use gpp_cli::plot::cmd_plot;
use gpp_cli::PlotArgs;
use gpp_core::gadgets::{alpha, lowerbound_instance, product_partition_gadget, set_partition_gadget, LastEdge};
use gpp_core::model::{Dag, Path, ScalarWeight};
use gpp_core::oracle::{best_path, enumerate_paths, oracle_envelope};
use gpp_core::pgpp::{build_table, piece_bound};
use gpp_core::piecewise::{compose_envelope_sets, lower_envelope, upper_envelope, Line};
use gpp_core::random::{random_affine_instance, random_rational, RandomDagParams};
use gpp_core::solver::{solve_scalar_linear, solve_scalar_linear_budgeted};
use gpp_core::{q, rational, GppInstance, PgppTable, PlFunction, Rational};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub criterion: u8,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

/// Collects violations; the first few are kept for the report.
#[derive(Default)]
struct Tally {
    checks: usize,
    violations: usize,
    examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < 3 {
                self.examples.push(what());
            }
        }
    }

    fn summary(&self) -> String {
        let mut s = format!("{} checks, {} violations", self.checks, self.violations);
        if !self.examples.is_empty() {
            s.push_str(&format!(" (e.g. {})", self.examples.join("; ")));
        }
        s
    }
}

fn finish(criterion: u8, start: Instant, budget: Option<u64>, tally: Tally, extra: &str) -> Outcome {
    let elapsed = start.elapsed();
    let budget = budget.map(Duration::from_secs);
    let in_time = budget.map_or(true, |b| elapsed <= b);
    let mut detail = tally.summary();
    if !extra.is_empty() {
        detail = format!("{extra}; {detail}");
    }
    if !in_time {
        detail.push_str("; over the time budget");
    }
    Outcome { criterion, passed: tally.violations == 0 && tally.checks > 0 && in_time, detail, elapsed, budget }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The instances of criterion 1: at most 12 vertices, 24 edges, coefficients
/// in [-9, 9], with a start value in [-10, 10].
fn criterion1_instances() -> Vec<(GppInstance, Rational)> {
    let mut r = rng(0xC1);
    (0..1000)
        .map(|_| {
            let inst = random_affine_instance(&mut r, &RandomDagParams::default());
            let x0 = random_rational(&mut r, -10, 10, 12);
            (inst, x0)
        })
        .collect()
}

/// The instances of criterion 2: at most 10 vertices and 1024 paths.
fn criterion2_instances() -> Vec<GppInstance> {
    let mut r = rng(0xC2);
    let params = RandomDagParams { max_vertices: 10, max_edges: 24, ..Default::default() };
    let mut out = Vec::with_capacity(300);
    while out.len() < 300 {
        let inst = random_affine_instance(&mut r, &params);
        if enumerate_paths(inst.dag(), 1 << 10).is_ok() {
            out.push(inst);
        }
    }
    out
}

fn lowerbound_tables() -> &'static Vec<PgppTable> {
    static TABLES: OnceLock<Vec<PgppTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        (1..=10)
            .map(|n| build_table(&lowerbound_instance(n).expect("n >= 1")).expect("piecewise table"))
            .collect()
    })
}

pub fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    for (i, (inst, x0)) in criterion1_instances().iter().enumerate() {
        let sol = solve_scalar_linear(inst, x0);
        let best = best_path(inst, std::slice::from_ref(x0), 1 << 16);
        match (sol, best) {
            (Ok(s), Ok((_, b))) => t.check(s.cost == b, || format!("instance {i}: solver {} oracle {b}", s.cost)),
            (s, b) => t.check(false, || format!("instance {i}: {s:?} / {b:?}")),
        }
    }
    finish(1, start, Some(30), t, "1000 instances")
}

pub fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(0xC2 + 1);
    for (i, inst) in criterion2_instances().iter().enumerate() {
        let (table, oracle) = match (build_table(inst), oracle_envelope(inst, 1 << 10)) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => {
                t.check(false, || format!("instance {i}: {:?} / {:?}", a.err(), b.err()));
                continue;
            }
        };
        let breakpoints: Vec<&Rational> = table.entries().iter().skip(1).filter_map(|e| e.lo.as_ref()).collect();
        let lines: Vec<&Line> = table.entries().iter().map(|e| &e.line).collect();
        let same = breakpoints == oracle.envelope.breakpoints().iter().collect::<Vec<_>>()
            && lines == oracle.envelope.lines().iter().collect::<Vec<_>>();
        t.check(same, || format!("instance {i}: table differs from the oracle envelope"));
        let l = inst.scalar_liquidation().expect("scalar").clone();
        for _ in 0..50 {
            let x = random_rational(&mut r, -10, 10, 12);
            let got = l.clone() * table.query(&x).cost;
            let want = solve_scalar_linear(inst, &x).map(|s| s.cost);
            t.check(want.as_ref() == Ok(&got), || format!("instance {i} at {x}: {got} vs {want:?}"));
        }
    }
    finish(2, start, Some(60), t, "300 instances x 50 queries")
}

pub fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let tables = lowerbound_tables();
    for n in 1..=10 {
        let table = &tables[n - 1];
        t.check(table.path_count() == 1 << n, || format!("n = {n}: {} entries", table.path_count()));
        let cert = alpha(n).expect("n >= 1");
        for (sigma, a) in cert.iter() {
            let res = table.query(a);
            t.check(res.path == sigma.path() && res.cost.is_zero(), || {
                format!("n = {n}, sigma = {sigma}: path {} cost {}", res.path, res.cost)
            });
        }
    }
    let counts: Vec<String> = tables.iter().map(|t| t.path_count().to_string()).collect();
    finish(3, start, Some(120), t, &format!("entries per n: {}", counts.join(",")))
}

pub fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut worst: f64 = 0.0;
    let mut check = |t: &mut Tally, what: &str, inst: &GppInstance, table: &PgppTable| {
        let n = inst.dag().vertex_count();
        let bound = piece_bound(n);
        let entries = table.interval_count();
        worst = worst.max(entries as f64 / bound);
        t.check(entries as f64 <= bound, || format!("{what}: {entries} entries > {bound}"));
    };
    for (i, (inst, _)) in criterion1_instances().iter().enumerate() {
        match build_table(inst) {
            Ok(table) => check(&mut t, &format!("criterion 1 instance {i}"), inst, &table),
            Err(e) => t.check(false, || format!("criterion 1 instance {i}: {e}")),
        }
    }
    for (i, inst) in criterion2_instances().iter().enumerate() {
        match build_table(inst) {
            Ok(table) => check(&mut t, &format!("criterion 2 instance {i}"), inst, &table),
            Err(e) => t.check(false, || format!("criterion 2 instance {i}: {e}")),
        }
    }
    for (n, table) in (1..=10).zip(lowerbound_tables()) {
        let inst = lowerbound_instance(n).expect("n >= 1");
        check(&mut t, &format!("lowerbound n = {n}"), &inst, table);
    }
    finish(4, start, None, t, &format!("largest entries/bound ratio {worst:.3e}"))
}

fn has_equal_sum_partition(a: &[i64]) -> bool {
    let total: i64 = a.iter().sum();
    (0u32..1 << a.len()).any(|mask| {
        let s: i64 = a.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v).sum();
        2 * s == total
    })
}

pub fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(0xC5);
    let deltas = [q(0), q(1), rational(7, 2)];
    let mut zeros = 0;
    for i in 0..200 {
        let len = r.gen_range(1..=14);
        let a: Vec<i64> = (0..len).map(|_| r.gen_range(1..=20) * if r.gen_bool(0.25) { -1 } else { 1 }).collect();
        let delta = deltas[i % 3].clone();
        let gadget = match set_partition_gadget(&a, q(0), delta.clone(), LastEdge::Abs) {
            Ok(g) => g,
            Err(e) => {
                t.check(false, || format!("{a:?}: {e}"));
                continue;
            }
        };
        let (_, optimum) = best_path(&gadget.instance, &[q(0)], 1 << 16).expect("within cap");
        let expected = has_equal_sum_partition(&a);
        zeros += usize::from(expected);
        t.check(optimum.is_zero() == expected, || format!("{a:?}: optimum {optimum}, partition {expected}"));
        if !optimum.is_zero() {
            let magnitude = -optimum.clone();
            t.check(magnitude > delta, || format!("{a:?}: |optimum| {magnitude} <= delta {delta}"));
        }
    }
    finish(5, start, Some(60), t, &format!("200 sets, {zeros} partitionable"))
}

pub fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(0xC6);
    let mut yes = 0;
    for _ in 0..200 {
        let len = r.gen_range(1..=12);
        let a: Vec<i64> = (0..len).map(|_| r.gen_range(1..=9)).collect();
        let inst = product_partition_gadget(&a).expect("positive elements");
        let (_, optimum) = best_path(&inst, &[q(-1), q(-1)], 1 << 16).expect("within cap");
        let total: i128 = a.iter().map(|&v| v as i128).product();
        let exists = (0u32..1 << len).any(|mask| {
            let p: i128 = a.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v as i128).product();
            p * p == total
        });
        yes += usize::from(exists);
        if exists {
            t.check(optimum == q(-2), || format!("{a:?}: optimum {optimum}, expected -2"));
        } else {
            t.check(optimum < q(-2), || format!("{a:?}: optimum {optimum}, expected < -2"));
        }
    }
    finish(6, start, Some(60), t, &format!("200 sets, {yes} with a product partition"))
}

/// Continuous PL function through `(x_i, y_i)` pairs, extended linearly with
/// the given outer slopes.
fn random_pl(r: &mut ChaCha8Rng, slopes: Vec<Rational>) -> PlFunction {
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    while cuts.len() + 1 < slopes.len() {
        cuts.insert(random_rational(r, -10, 10, 4));
    }
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let anchor = cuts.first().cloned().unwrap_or_else(|| q(0));
    let start = random_rational(r, -5, 5, 3);
    let mut pieces = vec![Line::new(slopes[0].clone(), start - slopes[0].clone() * anchor)];
    for (i, b) in cuts.iter().enumerate() {
        let v = pieces[i].eval(b);
        pieces.push(Line::new(slopes[i + 1].clone(), v - slopes[i + 1].clone() * b.clone()));
    }
    PlFunction::new(cuts, pieces).expect("continuous")
}

fn distinct_slopes(r: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    let mut s: BTreeSet<Rational> = BTreeSet::new();
    while s.len() < count {
        s.insert(random_rational(r, -6, 6, 3));
    }
    s.into_iter().collect()
}

fn random_concave(r: &mut ChaCha8Rng) -> PlFunction {
    let k = r.gen_range(1..=6);
    let mut s = distinct_slopes(r, k);
    s.reverse();
    random_pl(r, s)
}

fn random_monotone(r: &mut ChaCha8Rng) -> PlFunction {
    let k = r.gen_range(1..=6);
    let up = r.gen_bool(0.5);
    let s = (0..k)
        .map(|_| {
            let v = random_rational(r, 0, 5, 3);
            if up {
                v
            } else {
                -v
            }
        })
        .collect();
    random_pl(r, s)
}

fn random_any(r: &mut ChaCha8Rng) -> PlFunction {
    let k = r.gen_range(1..=6);
    let s = (0..k).map(|_| random_rational(r, -5, 5, 2)).collect();
    random_pl(r, s)
}

fn random_lines(r: &mut ChaCha8Rng) -> Vec<Line> {
    let k = r.gen_range(1..=5);
    (0..k).map(|_| Line::new(random_rational(r, -6, 6, 3), random_rational(r, -6, 6, 2))).collect()
}

/// Exact agreement of `h` with `reference` on a rational grid plus every
/// breakpoint of both.
fn agrees(h: &PlFunction, reference: impl Fn(&Rational) -> Rational, extra: &[&PlFunction]) -> bool {
    let mut pts: Vec<Rational> = (-24..=24).map(|i| rational(i, 2)).collect();
    for f in std::iter::once(h).chain(extra.iter().copied()) {
        for b in f.breakpoints() {
            pts.push(b.clone());
            pts.push(b.clone() + rational(1, 101));
        }
    }
    pts.iter().all(|x| h.eval(x) == reference(x))
}

pub fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(0xC7);
    for i in 0..10_000 {
        match i % 3 {
            0 => {
                let (f, g) = (random_concave(&mut r), random_concave(&mut r));
                let h = f.pointwise_min(&g);
                let ok = h.piece_count() <= f.piece_count() + g.piece_count()
                    && (h.is_concave() || h.piece_count() == 1)
                    && agrees(&h, |x| std::cmp::min(f.eval(x), g.eval(x)), &[&f, &g]);
                t.check(ok, || format!("min bound: p(h) = {}, p(f) + p(g) = {}", h.piece_count(), f.piece_count() + g.piece_count()));
            }
            1 => {
                let (f, g) = (random_any(&mut r), random_monotone(&mut r));
                let h = f.compose(&g);
                let ok = h.piece_count() <= f.piece_count() + g.piece_count() && agrees(&h, |x| f.eval(&g.eval(x)), &[&g]);
                t.check(ok, || format!("compose bound: p(h) = {}, p(f) + p(g) = {}", h.piece_count(), f.piece_count() + g.piece_count()));
            }
            _ => {
                let (fs, gs) = (random_lines(&mut r), random_lines(&mut r));
                let env = |lines: &[Line], lower: bool| {
                    if lower { lower_envelope(lines) } else { upper_envelope(lines) }.expect("nonempty").function()
                };
                let (fd, fu, gd, gu) = (env(&fs, true), env(&fs, false), env(&gs, true), env(&gs, false));
                let Ok((hd, hu)) = compose_envelope_sets(&fd, &fu, &gd, &gu) else {
                    t.check(false, || "compose_envelope_sets rejected envelopes".into());
                    continue;
                };
                let family: Vec<Line> = fs.iter().flat_map(|f| gs.iter().map(move |g| f.after(g))).collect();
                let g_pieces = 2 * gd.piece_count() + 2 * gu.piece_count();
                let ok = hd == env(&family, true)
                    && hu == env(&family, false)
                    && hd.piece_count() <= 4 * fd.piece_count() + g_pieces
                    && hu.piece_count() <= 4 * fu.piece_count() + g_pieces;
                t.check(ok, || format!("envelope composition mismatch for {} x {} lines", fs.len(), gs.len()));
            }
        }
    }
    finish(7, start, Some(60), t, "")
}

/// Diamond: a direct edge and a detour of `detour` unit edges; the detour is
/// strictly better for maximization, so it wins exactly when the budget
/// allows it.
fn diamond(detour: usize) -> GppInstance {
    let mut edges = vec![(0, detour)];
    let mut weights = vec![ScalarWeight::affine(q(1), q(1))];
    for i in 0..detour {
        edges.push((i, i + 1));
        weights.push(ScalarWeight::affine(q(1), q(5)));
    }
    let dag = Dag::new(detour + 1, 0, detour, edges).expect("acyclic");
    GppInstance::scalar(dag, weights, q(1), None).expect("valid")
}

pub fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(0xC8);
    for i in 0..200 {
        let inst = random_affine_instance(&mut r, &RandomDagParams::default());
        let x0 = random_rational(&mut r, -10, 10, 6);
        let units = vec![1; inst.dag().edge_count()];
        let budget = inst.dag().vertex_count() - 1;
        let full = solve_scalar_linear(&inst, &x0).map(|s| s.cost);
        let capped = solve_scalar_linear_budgeted(&inst, &x0, &units, budget).map(|s| s.cost);
        t.check(full.is_ok() && full == capped, || format!("instance {i}: {full:?} vs {capped:?}"));
    }
    for detour in 2..=5 {
        let inst = diamond(detour);
        let units = vec![1; inst.dag().edge_count()];
        let direct = Path::new(vec![0]);
        let long = Path::new((1..=detour).collect());
        for budget in 1..=detour + 1 {
            let sol = solve_scalar_linear_budgeted(&inst, &q(0), &units, budget);
            let want = if budget < detour { &direct } else { &long };
            t.check(sol.as_ref().is_ok_and(|s| &s.path == want), || {
                format!("diamond {detour}, budget {budget}: {:?}", sol.as_ref().map(|s| s.path.to_string()))
            });
        }
        // weighted durations: the detour costs 2 per edge
        let mut durations = vec![2; inst.dag().edge_count()];
        durations[0] = 1;
        let sol = solve_scalar_linear_budgeted(&inst, &q(0), &durations, 2 * detour - 1);
        t.check(sol.as_ref().is_ok_and(|s| s.path == direct), || format!("diamond {detour}: weighted durations"));
    }
    finish(8, start, None, t, "200 random instances + diamonds")
}

/// Zero set of the envelope column of a plot CSV, read from the exact columns.
pub fn csv_zero_set(csv: &str) -> Result<BTreeSet<Rational>, String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().ok_or("empty csv")?.split(',').collect();
    let env_col = header.iter().position(|h| *h == "envelope").ok_or("no envelope column")?;
    let mut zeros = BTreeSet::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let x = parse_rational(cells[0]).map_err(|e| e.to_string())?;
        let v = parse_rational(cells[env_col]).map_err(|e| e.to_string())?;
        if v.is_zero() {
            zeros.insert(x);
        }
    }
    Ok(zeros)
}

pub fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let dir = tempfile::tempdir().expect("temp dir");
    let mut sizes = Vec::new();
    for n in 1..=5u32 {
        let inst = lowerbound_instance(n as usize).expect("n >= 1");
        let input = dir.path().join(format!("lb{n}.json"));
        let text = serde_json::to_string_pretty(&InstanceFile::from_instance(&inst)).expect("serializable");
        std::fs::write(&input, text).expect("write instance");
        // a grid of step 1/(2 * 3^n) contains every alpha value
        let samples = 2 * 3usize.pow(n) + 1;
        let mut ok_files = true;
        for ext in ["csv", "svg"] {
            let args = PlotArgs {
                input: Some(input.clone()),
                table: None,
                output: dir.path().join(format!("lb{n}.{ext}")),
                x_range: "0:1".into(),
                samples,
            };
            ok_files &= cmd_plot(&args).is_ok();
        }
        t.check(ok_files, || format!("n = {n}: plot failed"));
        let csv = std::fs::read_to_string(dir.path().join(format!("lb{n}.csv"))).unwrap_or_default();
        let svg = std::fs::read_to_string(dir.path().join(format!("lb{n}.svg"))).unwrap_or_default();
        t.check(csv.lines().count() == samples + 1, || format!("n = {n}: wrong row count"));
        t.check(svg.matches("<polyline").count() == (1 << n) + 1, || format!("n = {n}: wrong curve count"));
        let zeros = csv_zero_set(&csv).unwrap_or_default();
        let alphas: BTreeSet<Rational> = alpha(n as usize).expect("n >= 1").iter().map(|(_, a)| a.clone()).collect();
        sizes.push(format!("n={n}: {} zeros / {} alphas", zeros.len(), alphas.len()));
        t.check(zeros == alphas, || {
            let extra: Vec<String> = zeros.difference(&alphas).take(4).map(|z| z.to_string()).collect();
            format!("n = {n}: zero set has {} points, {} alpha values, extra {}", zeros.len(), alphas.len(), extra.join(" "))
        });
    }
    finish(9, start, Some(10), t, &sizes.join(", "))
}

pub fn all() -> Vec<fn() -> Outcome> {
    vec![
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ]
}
