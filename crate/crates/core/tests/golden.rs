//! Constructed systems against the published printed forms.

use algest::estimators::{
    build_mle_system, build_vector_version, certify_class, eliminate_v, proportionality_factor, reduce_system, Clazz,
    EstimatingSystem, PerturbationChoice,
};
use algest::groebner::GroebnerLimits;
use algest::models::reference::*;
use algest::models::{log_marginal, periodic_gaussian};
use algest::polyalg::{format_rat, parse_poly, rat, Block, Polynomial, Rat};

fn p(src: &str, m: &algest::models::Model) -> Polynomial<Rat> {
    parse_poly(src, &m.table).unwrap()
}

#[test]
fn periodic_gaussian_mle_quintic() {
    let m = periodic_gaussian();
    let sys = build_mle_system(&m).unwrap();
    assert_eq!(sys.equations.len(), 1);
    let lambda = proportionality_factor(&sys.equations[0], &p(PERIODIC_GAUSSIAN_MLE, &m)).expect("proportional");
    assert_eq!(lambda, rat(1, 1));
    assert_eq!(sys.total_degree_product, 5);
}

#[test]
fn periodic_gaussian_quintic_vanishes_at_truth() {
    let m = periodic_gaussian();
    let q = p(PERIODIC_GAUSSIAN_MLE, &m);
    let a = m.table.id("a").unwrap();
    let mut vals = vec![0.0; m.table.len()];
    vals[m.table.id("x1").unwrap()] = -2.0;
    assert_eq!(q.eval_f64(&vals).unwrap(), 0.0);
    let g = p(PERIODIC_GAUSSIAN_G, &m);
    assert_eq!(g.degree_in(&[a]), Some(13));
}

#[test]
fn periodic_gaussian_second_order_elimination() {
    let m = periodic_gaussian();
    let choice = PerturbationChoice::default_for(&m, Clazz::SecondOrder, None).unwrap();
    let vs = build_vector_version(&m, &choice, Clazz::SecondOrder).unwrap();
    let sys = eliminate_v(&vs, GroebnerLimits::default()).unwrap();
    assert_eq!(sys.equations.len(), 1);
    let c = Polynomial::var(m.c);
    let target = &p(PERIODIC_GAUSSIAN_G, &m) + &(&c * &p(PERIODIC_GAUSSIAN_H, &m));
    let lambda = proportionality_factor(&sys.equations[0], &target).expect("g + c·h up to a factor");
    println!("g + c*h factor: {}", format_rat(&lambda));
}

#[test]
fn periodic_gaussian_printed_tangent_is_not_tangent() {
    let m = periodic_gaussian();
    let printed: Vec<_> = PERIODIC_GAUSSIAN_E0_PRINTED.iter().map(|s| p(s, &m)).collect();
    let mut frames = m.frames.clone();
    frames.normals = vec![printed];
    frames.tangent = m.frames.normals.clone();
    assert!(frames.orthogonality_defects(&m.fisher.matrix).iter().any(|d| !d.is_zero()));
}

#[test]
fn frames_are_orthogonal() {
    for m in [periodic_gaussian(), log_marginal(), algest::models::toy_linear()] {
        for defect in m.frames.orthogonality_defects(&m.fisher.matrix) {
            assert!(defect.is_zero(), "{}", m.id);
        }
    }
}

#[test]
fn log_marginal_mle_system() {
    let m = log_marginal();
    let sys = build_mle_system(&m).unwrap();
    assert_eq!(sys.equations.len(), 6);
    assert_eq!(sys.degrees(), vec![5, 5, 5, 4, 1, 1]);
    assert_eq!(sys.total_degree_product, 500);
    for (eq, printed) in sys.equations.iter().zip(LOG_MARGINAL_MLE) {
        let lambda = proportionality_factor(eq, &p(printed, &m)).expect("proportional to printed MLE");
        assert!(lambda == rat(1, 1) || lambda == rat(-1, 1));
    }
}

#[test]
fn log_marginal_reduction() {
    let m = log_marginal();
    let mle = build_mle_system(&m).unwrap();
    let limits = GroebnerLimits::default();
    for (k, printed, bound, product) in
        [(3, LOG_MARGINAL_REDUCED_SECOND, 2, 32u128), (2, LOG_MARGINAL_REDUCED_FIRST, 1, 4)]
    {
        let red = reduce_system(&mle, k, limits).unwrap();
        assert!(red.max_eta_degree() <= bound);
        assert_eq!(red.total_degree_product, product, "k={k}");
        for (eq, pr) in red.equations.iter().zip(printed) {
            assert!(proportionality_factor(eq, &p(pr, &m)).is_some(), "k={k}");
        }
        let cert = certify_class(&red, &mle, k, limits).unwrap();
        assert!(cert.holds());
    }
}

#[test]
fn certificate_rejects_degree_two_perturbation() {
    let m = log_marginal();
    let mle = build_mle_system(&m).unwrap();
    let mut bad = mle.clone();
    bad.equations[0] = &bad.equations[0] + &p("(x1 - eta1)^2", &m);
    let cert = certify_class(&bad, &mle, 3, GroebnerLimits::default()).unwrap();
    assert!(!cert.holds());
    assert!(certify_class(&mle, &mle, 3, GroebnerLimits::default()).unwrap().holds());
    assert!(reduce_system(&reduce_system(&mle, 3, GroebnerLimits::default()).unwrap(), 3, GroebnerLimits::default()).is_err());
}

#[test]
fn systems_round_trip_through_text() {
    let m = log_marginal();
    let mle = build_mle_system(&m).unwrap();
    let back = EstimatingSystem::from_text(&mle.to_text()).unwrap();
    assert_eq!(back, mle);
    let pg = periodic_gaussian();
    let choice = PerturbationChoice::default_for(&pg, Clazz::SecondOrder, None).unwrap();
    let alg = eliminate_v(&build_vector_version(&pg, &choice, Clazz::SecondOrder).unwrap(), GroebnerLimits::default()).unwrap();
    assert_eq!(EstimatingSystem::from_text(&alg.to_text()).unwrap(), alg);
}

#[test]
fn mle_vanishes_at_truth() {
    let m = log_marginal();
    let star = algest::models::log_marginal_reference_point();
    let sys = build_mle_system(&m).unwrap();
    let bound = sys.with_data(&star).unwrap();
    let eta = m.table.block(Block::Eta);
    let vals: std::collections::BTreeMap<_, _> = eta.iter().copied().zip(star.iter().cloned()).collect();
    for eq in &bound.equations {
        assert!(eq.partial_eval(&vals).is_zero());
    }
}
