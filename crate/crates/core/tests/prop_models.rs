//! Model invariants: frame orthogonality, Fisher positivity, implicit η
//! derivatives and sampler calibration.

use algest::models::{Model, ModelId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A model point with parameters `u` and coordinates `eta`.
fn point(m: &Model, raw: &[f64]) -> (Vec<f64>, Vec<f64>) {
    match m.id {
        ModelId::PeriodicGaussian => {
            let u = vec![raw[0] * 0.95];
            (m.eta_at(&u, None).unwrap(), u)
        }
        ModelId::ToyLinear => {
            let u: Vec<f64> = raw[..m.p].iter().map(|r| 4.0 * r - 2.0).collect();
            (m.eta_at(&u, None).unwrap(), u)
        }
        ModelId::LogMarginal => {
            // pick η2, η4, η5, η6 and solve the two constraints for η1, η3;
            // η4 ≠ η6 keeps the (η1, η3, η5) chart regular
            let (e2, e5) = (0.1 + 0.2 * raw[0], 0.1 + 0.2 * raw[1]);
            let (e4, e6) = (0.05 + 0.05 * raw[2], 0.15 + 0.1 * raw[2]);
            let sum = e4 + e5 + e6 - e2;
            let prod = e2 * e2 * e4 * e6 / (e5 * e5);
            let disc = (sum * sum - 4.0 * prod).max(0.0).sqrt();
            let eta = vec![(sum + disc) / 2.0, e2, (sum - disc) / 2.0, e4, e5, e6];
            let u = m.params_of_eta(&eta).unwrap();
            (m.eta_at(&u, Some(&eta)).unwrap(), u)
        }
    }
}

fn assignment(m: &Model, eta: &[f64], u: &[f64]) -> Vec<f64> {
    let mut a = vec![0.0; m.table.len()];
    for (i, &v) in m.eta.iter().enumerate() {
        a[v] = eta[i];
    }
    for (i, &v) in m.x.iter().enumerate() {
        a[v] = eta[i];
    }
    if m.is_explicit() {
        for (i, &v) in m.params.iter().enumerate() {
            a[v] = u[i];
        }
    }
    a
}

fn model() -> impl Strategy<Value = Model> {
    prop::sample::select(ModelId::ALL.to_vec()).prop_map(ModelId::build)
}

fn raw() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normals_are_fisher_orthogonal_to_the_tangent(m in model(), r in raw()) {
        let (eta, u) = point(&m, &r);
        let a = assignment(&m, &eta, &u);
        let g = m.fisher_theta_at(&eta, &u).unwrap();
        let ginv = g.clone().try_inverse().unwrap();
        let ev = |v: &Vec<_>| nalgebra::DVector::from_iterator(m.d, v.iter().map(|p: &algest::polyalg::Polynomial<_>| p.eval_f64(&a).unwrap()));
        for e in &m.frames.normals {
            let e = ev(e);
            for t in &m.frames.tangent {
                let t = ev(t);
                let scale = 1.0 + e.norm() * (&ginv * &t).norm();
                prop_assert!((e.dot(&(&ginv * &t))).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn fisher_matrix_is_positive_definite(m in model(), r in raw()) {
        let (eta, u) = point(&m, &r);
        let g = m.fisher_theta_at(&eta, &u).unwrap();
        prop_assert!((&g - g.transpose()).amax() < 1e-12);
        prop_assert!(g.cholesky().is_some());
    }

    #[test]
    fn implicit_jacobian_matches_finite_differences(r in raw()) {
        let m = ModelId::LogMarginal.build();
        let (eta, u) = point(&m, &r);
        prop_assert!(eta.iter().all(|&e| e > 0.0));
        prop_assert!(m.constraint_residual(&eta, &eta).unwrap() < 1e-12);
        let s = eta.clone();
        let (_, jac) = m.eta_jacobian(&u, Some(&s)).unwrap();
        let h = 1e-6;
        for a in 0..m.p {
            let (mut up, mut dn) = (u.clone(), u.clone());
            up[a] += h;
            dn[a] -= h;
            let (ep, en) = (m.eta_at(&up, Some(&s)).unwrap(), m.eta_at(&dn, Some(&s)).unwrap());
            for i in 0..m.d {
                let fd = (ep[i] - en[i]) / (2.0 * h);
                prop_assert!((fd - jac[a][i]).abs() < 1e-6 * (1.0 + fd.abs()), "d eta{}/d u{}: {} vs {}", i + 1, a + 1, fd, jac[a][i]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The sample mean over 10⁶ observations lies within 5σ of η, with σ
    /// taken from the Fisher matrix (the covariance of the statistic).
    #[test]
    fn sampler_is_calibrated(m in model(), r in raw(), seed in any::<u64>()) {
        let n = 1_000_000u64;
        let (eta, u) = point(&m, &r);
        let truth = if m.is_explicit() { m.truth(&u).unwrap() } else { m.truth(&eta).unwrap() };
        let g = m.fisher_theta_at(&eta, &u).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mean = m.sample_mean(&truth, n, &mut rng).unwrap();
        for i in 0..m.d {
            let sigma = (g[(i, i)] / n as f64).sqrt();
            prop_assert!((mean[i] - eta[i]).abs() < 5.0 * sigma, "coordinate {} off by {:.2} sigma", i, (mean[i] - eta[i]).abs() / sigma);
        }
    }
}
