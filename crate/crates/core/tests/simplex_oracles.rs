mod common;

use archetype::numkernel::Matrix;
use archetype::simplex::{
    ode_flow, ode_flow_euler, project_simplex, solve_cls, ClsProblem, PgdConfig, SimplexVector,
};
use common::{cls_by_enumeration, cls_by_grid, projection_by_enumeration, rk4_flow};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng, n: usize, q: usize) -> (Vec<Vec<f64>>, Vec<f64>, ClsProblem) {
    let cols: Vec<Vec<f64>> = (0..q).map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let p = ClsProblem::new(u.clone(), Matrix::from_columns(&cols).unwrap()).unwrap();
    (cols, u, p)
}

#[test]
fn projection_matches_support_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let q = rng.random_range(1..=8);
        let v: Vec<f64> = (0..q).map(|_| rng.random_range(-3.0..3.0)).collect();
        let got = project_simplex(&v).unwrap();
        let want = projection_by_enumeration(&v);
        for (g, w) in got.as_slice().iter().zip(&want) {
            assert!((g - w).abs() <= 1e-10, "{v:?}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn cls_matches_support_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = PgdConfig::default();
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let q = rng.random_range(1..=5);
        let (cols, u, p) = random_problem(&mut rng, n, q);
        let sol = solve_cls(&p, &SimplexVector::uniform(q), &cfg).unwrap();
        let want = cls_by_enumeration(&cols, &u);
        assert!(sol.objective - want <= 1e-6 * (1.0 + want), "{} vs {want}", sol.objective);
        assert!(want - sol.objective <= 1e-9 * (1.0 + want));
    }
}

#[test]
fn cls_matches_grid_search_small_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cfg = PgdConfig::default();
    for _ in 0..40 {
        let n = rng.random_range(1..=4);
        let q = rng.random_range(1..=3);
        let (cols, u, p) = random_problem(&mut rng, n, q);
        let sol = solve_cls(&p, &SimplexVector::uniform(q), &cfg).unwrap();
        let want = cls_by_grid(&cols, &u, 1e-3);
        assert!(sol.objective <= want + 1e-6, "{} vs {want}", sol.objective);
    }
}

#[test]
fn exact_flow_matches_rk4() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let q = rng.random_range(1..=5);
        let (cols, u, p) = random_problem(&mut rng, n, q);
        let w0: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = ode_flow(&p, &w0, 0.5).unwrap();
        let rk = rk4_flow(&cols, &u, &w0, 0.5, 1e-4);
        for (a, b) in exact.iter().zip(&rk) {
            assert!((a - b).abs() <= 1e-8, "{exact:?} vs {rk:?}");
        }
    }
}

#[test]
fn euler_close_to_exact_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let (_, _, p) = random_problem(&mut rng, 3, 3);
        let w0 = vec![1.0 / 3.0; 3];
        let lmax = archetype::numkernel::sym_eig(&p.design().gram()).unwrap().values[0];
        let step = (1e-3f64).min(1.0 / lmax);
        let e = ode_flow_euler(&p, &w0, 0.5, step).unwrap();
        let x = ode_flow(&p, &w0, 0.5).unwrap();
        for (a, b) in e.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-3);
        }
    }
}

fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..12)
}

proptest! {
    #[test]
    fn projection_is_idempotent(v in vec_strategy()) {
        let once = project_simplex(&v).unwrap();
        let twice = project_simplex(once.as_slice()).unwrap();
        prop_assert_eq!(once.as_slice(), twice.as_slice());
    }

    #[test]
    fn projection_is_permutation_equivariant(v in vec_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..v.len()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let pv: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
        let a = project_simplex(&v).unwrap();
        let b = project_simplex(&pv).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(b.as_slice()[j], a.as_slice()[i]);
        }
    }

    #[test]
    fn solver_never_worsens_start(seed in any::<u64>(), n in 1usize..5, q in 1usize..7, start in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, _, p) = random_problem(&mut rng, n, q);
        let w0 = SimplexVector::vertex(q, start % q);
        let sol = solve_cls(&p, &w0, &PgdConfig::default()).unwrap();
        prop_assert!(sol.objective <= p.objective(w0.as_slice()) + 1e-12);
        prop_assert!(archetype::simplex::violation(sol.weights.as_slice()) <= 1e-12);
    }

    #[test]
    fn flow_semigroup(seed in any::<u64>(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, _, p) = random_problem(&mut rng, 3, 4);
        let w0: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let direct = ode_flow(&p, &w0, s + t).unwrap();
        let composed = ode_flow(&p, &ode_flow(&p, &w0, s).unwrap(), t).unwrap();
        for (a, b) in direct.iter().zip(&composed) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
