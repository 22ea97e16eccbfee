use std::sync::OnceLock;

use hyperfill::filling::{build_filling, FillingGraph};
use hyperfill::generators::{generate_example, Example};
use hyperfill::nets::{build_nets, default_depth};
use hyperfill::solver::dirichlet::{assemble, et_form, DirichletProblem};
use hyperfill::solver::{minimize, PProblem, SolveOptions};
use hyperfill::space::FiniteSpace;
use hyperfill::traces::{trace_tx, BoundaryFunction, GraphFunction, ZFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Fixture {
    space: FiniteSpace,
    filling: FillingGraph,
    problem: DirichletProblem,
}

fn fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let space = generate_example(Example::CarpetMinusEdge, 2).unwrap().rescale().unwrap();
        let nets = build_nets(&space, 3.0, default_depth(&space, 3.0), 0).unwrap();
        let filling = build_filling(&space, &nets, 3.0).unwrap();
        let f = BoundaryFunction::constant(&space, 0.0);
        let g = ZFunction::constant(&space, 0.0);
        let problem = assemble(&filling, &space, 2.5, 0.75, &f, &g, None).unwrap();
        Fixture { space, filling, problem }
    })
}

fn random_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A path `0..n` with extra chords, pinned at both ends.
fn small_problem(n: usize, p: f64, seed: u64, ends: (f64, f64)) -> PProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    for _ in 0..n / 2 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    let conductances = edges.iter().map(|_| rng.gen_range(0.1..10.0)).collect();
    let mut pinned = vec![None; n];
    pinned[0] = Some(ends.0);
    pinned[n - 1] = Some(ends.1);
    let loads = (0..n).map(|i| if pinned[i].is_some() { 0.0 } else { rng.gen_range(-0.5..0.5) }).collect();
    PProblem { n, edges, conductances, p, pinned, loads, masses: None }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energy_change_is_a_difference(n in 3usize..12, p in 1.2f64..5.0, seed in any::<u64>(), scale in 1e-6f64..1.0) {
        let pr = small_problem(n, p, seed, (0.0, 1.0));
        let u = random_values(n, seed ^ 1);
        let v: Vec<f64> = u.iter().zip(random_values(n, seed ^ 2)).map(|(a, b)| a + scale * b).collect();
        let direct = pr.energy(&v) - pr.energy(&u);
        let change = pr.energy_change(&u, &v);
        prop_assert!((change - direct).abs() <= 1e-10 * (1.0 + pr.energy(&u).abs() + pr.energy(&v).abs()));
    }

    #[test]
    fn minimizer_respects_ordered_data(n in 3usize..10, p in 1.5f64..4.0, seed in any::<u64>(), lift in 0.0f64..1.0) {
        let lower = small_problem(n, p, seed, (0.0, 1.0));
        let upper = small_problem(n, p, seed, (lift, 1.0 + lift * 0.5));
        let opts = SolveOptions::default();
        let a = minimize(&lower, &vec![0.5; n], opts).unwrap();
        let b = minimize(&upper, &vec![0.5; n], opts).unwrap();
        prop_assert!(a.converged && b.converged);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!(x <= &(y + 1e-6), "{x} > {y}");
        }
    }

    #[test]
    fn minimizer_never_raises_the_energy(n in 3usize..10, p in 1.5f64..4.0, seed in any::<u64>()) {
        let pr = small_problem(n, p, seed, (-1.0, 2.0));
        let init = random_values(n, seed ^ 3);
        let m = minimize(&pr, &init, SolveOptions::default()).unwrap();
        let mut start = init.clone();
        start[0] = -1.0;
        start[n - 1] = 2.0;
        prop_assert!(m.energy <= pr.energy(&start) + 1e-12 * pr.energy(&start).abs());
    }

    #[test]
    fn et_form_is_linear_in_its_second_argument(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let fx = fixture();
        let n = fx.filling.vertex_count();
        let u = GraphFunction { values: random_values(n, seed) };
        let v = GraphFunction { values: random_values(n, seed ^ 5) };
        let w = GraphFunction { values: random_values(n, seed ^ 7) };
        let mix = GraphFunction { values: v.values.iter().zip(&w.values).map(|(x, y)| a * x + b * y).collect() };
        let lhs = et_form(&fx.problem, &u, &mix);
        let rhs = a * et_form(&fx.problem, &u, &v) + b * et_form(&fx.problem, &u, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs() + rhs.abs()));
    }

    #[test]
    fn et_form_is_homogeneous_and_matches_the_energy(seed in any::<u64>(), lambda in 0.05f64..20.0) {
        let fx = fixture();
        let p = fx.problem.p;
        let n = fx.filling.vertex_count();
        let u = GraphFunction { values: random_values(n, seed) };
        let v = GraphFunction { values: random_values(n, seed ^ 11) };
        let scaled = GraphFunction { values: u.values.iter().map(|x| -lambda * x).collect() };
        let expected = -lambda.powf(p - 1.0) * et_form(&fx.problem, &u, &v);
        let got = et_form(&fx.problem, &scaled, &v);
        prop_assert!((got - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
        let diag = et_form(&fx.problem, &u, &u);
        let energy = fx.problem.energy.edge_energy(&u.values);
        prop_assert!((diag - energy).abs() <= 1e-9 * (1.0 + energy));
    }

    #[test]
    fn ball_mass_grows_with_the_radius(center in 0usize..10_000, r in 0.0f64..1.2, dr in 0.0f64..0.5) {
        let space = &fixture().space;
        let c = center % space.len();
        let small = space.ball_mass(c, r);
        let large = space.ball_mass(c, r + dr);
        prop_assert!(small <= large + 1e-15);
        prop_assert!(space.boundary_ball_mass(c, r) <= space.boundary_ball_mass(c, r + dr) + 1e-15);
        prop_assert!((space.ball_mass(c, 2.0) - space.total_nu()).abs() <= 1e-12);
    }

    #[test]
    fn trace_of_a_constant_is_that_constant(c in -100.0f64..100.0) {
        let fx = fixture();
        let u = GraphFunction::constant(&fx.filling, c);
        let t = trace_tx(&u, &fx.filling, &fx.problem.uni, &fx.space).unwrap();
        for x in t.values {
            prop_assert!((x - c).abs() <= 1e-12 * (1.0 + c.abs()));
        }
    }
}
