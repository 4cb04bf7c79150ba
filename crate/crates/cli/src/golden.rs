//! Comparison of constructed systems with the published printed forms.

use algest::estimators::{proportionality_factor, Clazz, EstimatingSystem};
use algest::models::reference::*;
use algest::models::ModelId;
use algest::polyalg::{format_rat, parse_poly, Polynomial, Rat};

/// Printed forms aligned with the system's non-constraint equations.
pub fn printed_forms(sys: &EstimatingSystem) -> Option<Vec<Polynomial<Rat>>> {
    let t = &sys.table;
    let p = |s: &str| parse_poly(s, t).expect("reference parses");
    match (sys.model, sys.clazz) {
        (ModelId::PeriodicGaussian, Clazz::Mle) => Some(vec![p(PERIODIC_GAUSSIAN_MLE)]),
        (ModelId::PeriodicGaussian, Clazz::SecondOrder) => {
            let c = match &sys.c {
                Some(c) => Polynomial::constant(c.clone()),
                None => Polynomial::var(t.id("c")?),
            };
            Some(vec![&p(PERIODIC_GAUSSIAN_G) + &(&c * &p(PERIODIC_GAUSSIAN_H))])
        }
        (ModelId::LogMarginal, Clazz::Mle) => Some(LOG_MARGINAL_MLE.iter().map(|s| p(s)).collect()),
        (ModelId::LogMarginal, Clazz::ReducedSecondOrder) => Some(LOG_MARGINAL_REDUCED_SECOND.iter().map(|s| p(s)).collect()),
        (ModelId::LogMarginal, Clazz::ReducedFirstOrder) => Some(LOG_MARGINAL_REDUCED_FIRST.iter().map(|s| p(s)).collect()),
        _ => None,
    }
}

/// Per-equation factors λ with `constructed = λ·printed`.
pub fn factors(sys: &EstimatingSystem) -> Option<Vec<Option<Rat>>> {
    let printed = printed_forms(sys)?;
    Some(
        sys.estimating_indices()
            .iter()
            .zip(&printed)
            .map(|(&i, pr)| proportionality_factor(&sys.equations[i], pr))
            .collect(),
    )
}

/// Comment lines reporting the comparison.
pub fn report(sys: &EstimatingSystem) -> Vec<String> {
    let (Some(printed), Some(factors)) = (printed_forms(sys), factors(sys)) else {
        return vec!["# golden: no published form for this system".into()];
    };
    let mut out = Vec::new();
    for (k, (pr, f)) in printed.iter().zip(&factors).enumerate() {
        let f = f.as_ref().map(format_rat).unwrap_or_else(|| "none".into());
        out.push(format!("# golden eq{} factor={} printed: {}", k + 1, f, algest::polyalg::format_poly(pr, &sys.table)));
    }
    if sys.model == ModelId::LogMarginal {
        out.push(format!(
            "# golden note: printed sum constraints `{LOG_MARGINAL_SUM_MLE}` and `{LOG_MARGINAL_SUM_FIRST}`; here the constant is the data total x1+...+x6"
        ));
    }
    out
}
