use algest_wasm::{bias_curves_json, homotopy_paths_json, pg_curves_json, DemoError};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn pg_curves_vanish_at_the_estimate() {
    // X̄ = η(1/2) exactly, so both systems recover a = 1/2
    let r = parse(pg_curves_json(&[-2.0, -2.0, -0.5], "1", 11).unwrap());
    assert_eq!(r["a"].as_array().unwrap().len(), 11);
    for c in r["curves"].as_array().unwrap() {
        assert_eq!(c["values"].as_array().unwrap().len(), 11);
        assert!((c["estimate"].as_f64().unwrap() - 0.5).abs() < 1e-10, "{}", c["name"]);
    }
}

#[test]
fn pg_curves_reject_bad_input() {
    assert!(matches!(pg_curves_json(&[1.0, 2.0], "1", 5), Err(DemoError::Length { expected: 3, got: 2 })));
    assert!(matches!(pg_curves_json(&[1.0, 2.0, 3.0], "1/", 5), Err(DemoError::Poly(_))));
}

#[test]
fn traces_run_from_t0_to_t1() {
    let r = parse(homotopy_paths_json("x^2 - 1", "y^2 - 4", 3).unwrap());
    let paths = r["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 4);
    for p in paths {
        assert_eq!(p["status"], "converged");
        let trace = p["trace"].as_array().unwrap();
        assert_eq!(trace[0][0].as_f64(), Some(0.0));
        assert_eq!(trace.last().unwrap()[0].as_f64(), Some(1.0));
        let end = trace.last().unwrap();
        assert!((end[1].as_f64().unwrap().abs() - 1.0).abs() < 1e-8);
        assert!((end[3].as_f64().unwrap().abs() - 2.0).abs() < 1e-8);
    }
    assert_eq!(r["real"].as_array().unwrap().len(), 4);
}

#[test]
fn oversized_systems_are_refused() {
    assert!(matches!(homotopy_paths_json("x^9 - 1", "y^9 - 1", 1), Err(DemoError::TooManyPaths(81))));
}

#[test]
fn bias_curves_agree_with_the_closed_form() {
    for model in ["periodic-gaussian", "toy-linear"] {
        let r = parse(bias_curves_json(model, 0.05, 0.9, 9).unwrap());
        let num = r["numeric"].as_array().unwrap();
        let closed = r["closed_form"].as_array().unwrap();
        for (a, b) in num.iter().zip(closed) {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{model}: {a} vs {b}");
        }
    }
    assert!(matches!(bias_curves_json("log-marginal", 0.1, 0.2, 3), Err(DemoError::Implicit(_))));
}
