//! Path tracking on systems with known product-structure roots.

use algest::homotopy::{solve_compiled, CompiledSystem, PathStatus, TrackerConfig};
use algest::polyalg::{Polynomial, Rat};
use proptest::prelude::*;

fn linear(v: usize, root: i64) -> Polynomial<Rat> {
    &Polynomial::var(v) - &Polynomial::constant(Rat::from_integer(root.into()) / Rat::from_integer(4.into()))
}

/// `(x − a)(x − b)` and `(y − c)(y − d) + k·(x − a)(x − b)`, with roots
/// given in quarters.
fn product_system(r: [i64; 4], k: i64) -> CompiledSystem {
    let f1 = &linear(0, r[0]) * &linear(0, r[1]);
    let f2 = &(&linear(1, r[2]) * &linear(1, r[3])) + &f1.scale(&Rat::from_integer(k.into()));
    CompiledSystem::new(&[f1.to_complex(), f2.to_complex()], &[0, 1]).unwrap()
}

fn distinct_pair() -> impl Strategy<Value = (i64, i64)> {
    (-12i64..=12, 1i64..=12).prop_map(|(a, gap)| (a, a + gap))
}

/// Every point of `a` has a partner in `b` within relative tolerance `tol`.
fn covers(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.iter().all(|p| b.iter().any(|q| p.iter().zip(q).all(|(x, y)| (x - y).abs() < tol * (1.0 + x.abs()))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn recovers_all_four_product_roots((a, b) in distinct_pair(), (c, d) in distinct_pair(), k in -3i64..=3, seed in any::<u64>()) {
        let f = product_system([a, b, c, d], k);
        let r = solve_compiled(&f, &TrackerConfig::default(), seed).unwrap();
        prop_assert_eq!(r.path_count, 4);
        prop_assert_eq!(r.count(PathStatus::Converged), 4);
        let mut expected = Vec::new();
        for x in [a, b] {
            for y in [c, d] {
                expected.push(vec![x as f64 / 4.0, y as f64 / 4.0]);
            }
        }
        prop_assert_eq!(r.real_solutions.len(), 4);
        prop_assert!(covers(&expected, &r.real_solutions, 1e-8), "{:?}", r.real_solutions);
        for o in &r.outcomes {
            prop_assert!(o.residual < 1e-8);
        }
    }

    #[test]
    fn fixed_seed_is_bit_reproducible((a, b) in distinct_pair(), (c, d) in distinct_pair(), seed in any::<u64>()) {
        let f = product_system([a, b, c, d], 1);
        let cfg = TrackerConfig::default();
        let r1 = solve_compiled(&f, &cfg, seed).unwrap();
        let r2 = solve_compiled(&f, &cfg, seed).unwrap();
        prop_assert_eq!(r1.outcomes.len(), r2.outcomes.len());
        for (p, q) in r1.outcomes.iter().zip(&r2.outcomes) {
            prop_assert_eq!(p.status, q.status);
            prop_assert_eq!(p.steps, q.steps);
            prop_assert_eq!(&p.endpoint, &q.endpoint);
        }
        prop_assert_eq!(r1.real_solutions, r2.real_solutions);
    }

    #[test]
    fn solution_set_does_not_depend_on_the_seed((a, b) in distinct_pair(), (c, d) in distinct_pair(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = product_system([a, b, c, d], -1);
        let cfg = TrackerConfig::default();
        let x = solve_compiled(&f, &cfg, s1).unwrap().real_solutions;
        let y = solve_compiled(&f, &cfg, s2).unwrap().real_solutions;
        prop_assert_eq!(x.len(), y.len());
        prop_assert!(covers(&x, &y, 1e-10) && covers(&y, &x, 1e-10));
    }
}
