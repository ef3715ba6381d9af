mod common;

use gpp_core::model::{Dag, GppInstance, Path, ScalarWeight, Weights};
use gpp_core::oracle::{all_path_lines, best_path, enumerate_paths, extremes_within, DEFAULT_CAP};
use gpp_core::random::{random_affine_instance, random_rational, RandomDagParams};
use gpp_core::solver::{relax_trace, solve_scalar_linear, solve_scalar_linear_budgeted};
use gpp_core::{path_cost, q, rational, AffineMap, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rational_weight_instance(r: &mut ChaCha8Rng) -> GppInstance {
    let n = r.gen_range(2..7);
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let weights = edges
        .iter()
        .map(|_| ScalarWeight::affine(random_rational(r, -3, 3, 5), random_rational(r, -3, 3, 7)))
        .collect();
    GppInstance::scalar(Dag::new(n, 0, n - 1, edges).unwrap(), weights, random_rational(r, -2, 2, 3), None).unwrap()
}

#[test]
fn path_cost_equals_integer_recomputation() {
    let mut r = rng(11);
    for _ in 0..200 {
        let inst = rational_weight_instance(&mut r);
        let path = Path::new((0..inst.dag().edge_count()).collect());
        let x0 = random_rational(&mut r, -5, 5, 4);
        let lines = inst.affine_lines().unwrap();
        // common denominator D for everything; carry value * D^k as an integer
        let mut d = BigInt::one();
        for l in &lines {
            d = num_integer::lcm(d, l.slope.denom().clone());
            d = num_integer::lcm(d, l.intercept.denom().clone());
        }
        d = num_integer::lcm(d, x0.denom().clone());
        let l = inst.scalar_liquidation().unwrap().clone();
        d = num_integer::lcm(d, l.denom().clone());
        let int = |v: &Rational| (v.clone() * Rational::from_integer(d.clone())).to_integer();
        let mut num = int(&x0);
        let mut scale = d.clone();
        for line in &lines {
            num = int(&line.slope) * num + int(&line.intercept) * scale.clone();
            scale *= d.clone();
        }
        num *= int(&l);
        scale *= d.clone();
        let exact = path_cost(&inst, &path, &[x0]).unwrap();
        assert_eq!(exact, Rational::new(num, scale));
    }
}

#[test]
fn identity_path_costs_l_times_x0() {
    let dag = Dag::new(4, 0, 3, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let inst = GppInstance::scalar(dag, vec![ScalarWeight::identity(); 3], rational(-5, 2), None).unwrap();
    for x in [-3, 0, 7] {
        assert_eq!(path_cost(&inst, &Path::new(vec![0, 1, 2]), &[q(x)]).unwrap(), rational(-5, 2) * q(x));
    }
    let maps = vec![AffineMap::diagonal(vec![q(1), q(1)]); 2];
    let dag = Dag::new(3, 0, 2, [(0, 1), (1, 2)]).unwrap();
    let vector = GppInstance::new(dag, Weights::Vector(maps), vec![q(2), q(3)], None).unwrap();
    assert_eq!(path_cost(&vector, &Path::new(vec![0, 1]), &[q(1), q(-1)]).unwrap(), q(-1));
}

#[test]
fn affine_path_cost_is_affine_in_x0() {
    let mut r = rng(12);
    for _ in 0..200 {
        let inst = rational_weight_instance(&mut r);
        let path = Path::new((0..inst.dag().edge_count()).collect());
        let a = random_rational(&mut r, -5, 5, 3);
        let step = random_rational(&mut r, 1, 4, 3);
        let xs = [a.clone(), a.clone() + step.clone(), a + step * q(2)];
        let ys: Vec<Rational> = xs.iter().map(|x| path_cost(&inst, &path, &[x.clone()]).unwrap()).collect();
        assert_eq!(ys[1].clone() - ys[0].clone(), ys[2].clone() - ys[1].clone());
    }
}

#[test]
fn all_path_lines_match_path_cost() {
    let mut r = rng(13);
    for _ in 0..100 {
        let inst = random_affine_instance(&mut r, &RandomDagParams { max_vertices: 8, max_edges: 14, ..Default::default() });
        let l = inst.scalar_liquidation().unwrap().clone();
        for (line, path) in all_path_lines(&inst, DEFAULT_CAP).unwrap() {
            for x in [q(-2), rational(1, 3), q(5)] {
                assert_eq!(l.clone() * line.eval(&x), path_cost(&inst, &path, &[x]).unwrap());
            }
        }
    }
}

#[test]
fn solver_matches_oracle_on_random_instances() {
    let mut r = rng(14);
    for _ in 0..300 {
        let inst = random_affine_instance(&mut r, &RandomDagParams::default());
        let x0 = random_rational(&mut r, -10, 10, 5);
        let sol = solve_scalar_linear(&inst, &x0).unwrap();
        let (_, best) = best_path(&inst, &[x0.clone()], DEFAULT_CAP).unwrap();
        assert_eq!(sol.cost, best);
        assert_eq!(path_cost(&inst, &sol.path, &[x0]).unwrap(), sol.cost);
    }
}

#[test]
fn relaxation_is_monotone_and_round_exact() {
    let mut r = rng(15);
    for _ in 0..100 {
        let inst = random_affine_instance(&mut r, &RandomDagParams { max_vertices: 9, max_edges: 16, ..Default::default() });
        let x0 = random_rational(&mut r, -4, 4, 3);
        let n = inst.dag().vertex_count();
        let states = relax_trace(&inst, &x0, n - 1).unwrap();
        for k in 0..states.len() {
            let exact = extremes_within(&inst, &x0, k).unwrap();
            for v in 0..n {
                let got = states[k].r_min[v].clone().zip(states[k].r_max[v].clone());
                assert_eq!(got, exact[v], "round {k} vertex {v}");
                if k > 0 {
                    if let (Some(before), Some(after)) = (&states[k - 1].r_max[v], &states[k].r_max[v]) {
                        assert!(after >= before);
                    }
                    if let (Some(before), Some(after)) = (&states[k - 1].r_min[v], &states[k].r_min[v]) {
                        assert!(after <= before);
                    }
                }
            }
        }
    }
}

#[test]
fn budgeted_with_full_budget_matches_unbudgeted() {
    let mut r = rng(16);
    for _ in 0..100 {
        let inst = random_affine_instance(&mut r, &RandomDagParams::default());
        let x0 = random_rational(&mut r, -10, 10, 4);
        let units = vec![1; inst.dag().edge_count()];
        let t = inst.dag().vertex_count() - 1;
        let full = solve_scalar_linear(&inst, &x0).unwrap();
        let budgeted = solve_scalar_linear_budgeted(&inst, &x0, &units, t).unwrap();
        assert_eq!(full.cost, budgeted.cost);
    }
}

#[test]
fn budget_limits_total_duration() {
    let mut r = rng(17);
    for _ in 0..60 {
        let inst = random_affine_instance(&mut r, &RandomDagParams { max_vertices: 7, max_edges: 12, ..Default::default() });
        let durations: Vec<usize> = (0..inst.dag().edge_count()).map(|_| r.gen_range(1..4)).collect();
        let budget = r.gen_range(1..10);
        let x0 = random_rational(&mut r, -5, 5, 2);
        let l = inst.scalar_liquidation().unwrap().clone();
        let feasible: Vec<Path> = enumerate_paths(inst.dag(), DEFAULT_CAP)
            .unwrap()
            .paths
            .into_iter()
            .filter(|p| p.edges().iter().map(|&e| durations[e]).sum::<usize>() <= budget)
            .collect();
        let got = solve_scalar_linear_budgeted(&inst, &x0, &durations, budget);
        match feasible.iter().map(|p| path_cost(&inst, p, &[x0.clone()]).unwrap()).max() {
            None => assert!(got.is_err()),
            Some(best) => {
                let sol = got.unwrap();
                assert_eq!(sol.cost, best);
                let used: usize = sol.path.edges().iter().map(|&e| durations[e]).sum();
                assert!(used <= budget);
                assert_eq!(l * sol.value, sol.cost);
            }
        }
    }
}

#[test]
fn zero_liquidation_costs_nothing() {
    let dag = Dag::new(2, 0, 1, [(0, 1), (0, 1)]).unwrap();
    let inst = GppInstance::scalar(dag, vec![ScalarWeight::affine(q(2), q(1)), ScalarWeight::identity()], q(0), None).unwrap();
    let sol = solve_scalar_linear(&inst, &q(3)).unwrap();
    assert!(sol.cost.is_zero());
    assert_eq!(sol.value, q(7));
}
