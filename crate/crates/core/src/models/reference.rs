//! Reference forms of the built-in models' equations, in the exchange grammar.
//!
//! These are the published printed forms, used as golden vectors. Comparisons
//! are always up to a nonzero rational factor.

/// Periodic Gaussian MLE quintic in `a` and `x1..x3`.
pub const PERIODIC_GAUSSIAN_MLE: &str = "4*a^5 - 8*a^3 + 2*a^3*x3 - 3*x2*a^2 + 4*a + 4*a*x1 + 2*a*x3 - x2";

/// Periodic Gaussian `g(a)` of the second-order algebraic estimator `g + c·h`.
pub const PERIODIC_GAUSSIAN_G: &str =
    "8*(a-1)^2*(a+1)^2*(1+2*a^2)^2*(4*a^5 - 8*a^3 + 2*a^3*x3 - 3*x2*a^2 + 4*a + 4*a*x1 + 2*a*x3 - x2)";

/// Periodic Gaussian `h(a)` of the second-order algebraic estimator `g + c·h`.
pub const PERIODIC_GAUSSIAN_H: &str = "(2*a^4 + a^3*x2 - a^2*x3 + 2*a^2 + a*x2 - 2*x1 - x3 - 4)^3";

/// Periodic Gaussian tangent vector as printed.
pub const PERIODIC_GAUSSIAN_E0_PRINTED: [&str; 3] = ["0", "-1", "a"];

/// Periodic Gaussian bias closed form as printed, in `a`.
pub const PERIODIC_GAUSSIAN_BIAS_NUM: &str = "a*(a^8 - 4*a^6 + 6*a^4 - 4*a^2 + 1)";
pub const PERIODIC_GAUSSIAN_BIAS_DEN: &str = "(1 + 2*a^2)^2";

/// The sum constraint as printed in the MLE list (constant 1).
pub const LOG_MARGINAL_SUM_MLE: &str = "-eta1 - eta2 - eta3 - eta4 - eta5 - eta6 + 1";
/// The sum constraint as printed in the first-order list (constant 6).
pub const LOG_MARGINAL_SUM_FIRST: &str = "-eta1 - eta2 - eta3 - eta4 - eta5 - eta6 + 6";

/// Log-marginal MLE orthogonality equations.
pub const LOG_MARGINAL_MLE: [&str; 3] = [
    "x1*eta2^2*eta4^2*eta6-x1*eta2^2*eta4*eta6^2-x2*eta1*eta2*eta4^2*eta6+x2*eta1*eta2*eta4*eta6^2-2*x4*eta1*eta2*eta4*eta6^2-x4*eta1*eta3*eta5^2*eta6+2*x6*eta1*eta2*eta4^2*eta6+x6*eta1*eta3*eta4*eta5^2",
    "-x2*eta2*eta3*eta4^2*eta6+x2*eta2*eta3*eta4*eta6^2+x3*eta2^2*eta4^2*eta6-x3*eta2^2*eta4*eta6^2-x4*eta1*eta3*eta5^2*eta6-2*x4*eta2*eta3*eta4*eta6^2+x6*eta1*eta3*eta4*eta5^2+2*x6*eta2*eta3*eta4^2*eta6",
    "-2*x4*eta1*eta3*eta5^2*eta6-x4*eta2^2*eta4*eta5*eta6+x5*eta2^2*eta4^2*eta6-x5*eta2^2*eta4*eta6^2+2*x6*eta1*eta3*eta4*eta5^2+x6*eta2^2*eta4*eta5*eta6",
];

/// Log-marginal equations reduced modulo I₃ (η-degree ≤ 2).
pub const LOG_MARGINAL_REDUCED_SECOND: [&str; 3] = [
    "-3*x1*x2*x4^2*x6*eta2+6*x1*x2*x4^2*x6*eta6+x1*x2*x4^2*eta2*eta6-2*x1*x2*x4^2*eta6^2+3*x1*x2*x4*x6^2*eta2-6*x1*x2*x4*x6^2*eta4+2*x1*x2*x4*x6*eta2*eta4-2*x1*x2*x4*x6*eta2*eta6-x1*x2*x6^2*eta2*eta4+2*x1*x2*x6^2*eta4^2+3*x1*x3*x4*x5^2*eta6-2*x1*x3*x4*x5*eta5*eta6-3*x1*x3*x5^2*x6*eta4+2*x1*x3*x5*x6*eta4*eta5+x1*x4^2*x6*eta2^2-2*x1*x4^2*x6*eta2*eta6-x1*x4*x5^2*eta3*eta6-x1*x4*x6^2*eta2^2+2*x1*x4*x6^2*eta2*eta4+x1*x5^2*x6*eta3*eta4+3*x2^2*x4^2*x6*eta1-x2^2*x4^2*eta1*eta6-3*x2^2*x4*x6^2*eta1-2*x2^2*x4*x6*eta1*eta4+2*x2^2*x4*x6*eta1*eta6+x2^2*x6^2*eta1*eta4-x2*x4^2*x6*eta1*eta2-2*x2*x4^2*x6*eta1*eta6+x2*x4*x6^2*eta1*eta2+2*x2*x4*x6^2*eta1*eta4-x3*x4*x5^2*eta1*eta6+x3*x5^2*x6*eta1*eta4",
    "3*x1*x3*x4*x5^2*eta6-2*x1*x3*x4*x5*eta5*eta6-3*x1*x3*x5^2*x6*eta4+2*x1*x3*x5*x6*eta4*eta5-x1*x4*x5^2*eta3*eta6+x1*x5^2*x6*eta3*eta4+3*x2^2*x4^2*x6*eta3-x2^2*x4^2*eta3*eta6-3*x2^2*x4*x6^2*eta3-2*x2^2*x4*x6*eta3*eta4+2*x2^2*x4*x6*eta3*eta6+x2^2*x6^2*eta3*eta4-3*x2*x3*x4^2*x6*eta2+6*x2*x3*x4^2*x6*eta6+x2*x3*x4^2*eta2*eta6-2*x2*x3*x4^2*eta6^2+3*x2*x3*x4*x6^2*eta2-6*x2*x3*x4*x6^2*eta4+2*x2*x3*x4*x6*eta2*eta4-2*x2*x3*x4*x6*eta2*eta6-x2*x3*x6^2*eta2*eta4+2*x2*x3*x6^2*eta4^2-x2*x4^2*x6*eta2*eta3-2*x2*x4^2*x6*eta3*eta6+x2*x4*x6^2*eta2*eta3+2*x2*x4*x6^2*eta3*eta4+x3*x4^2*x6*eta2^2-2*x3*x4^2*x6*eta2*eta6-x3*x4*x5^2*eta1*eta6-x3*x4*x6^2*eta2^2+2*x3*x4*x6^2*eta2*eta4+x3*x5^2*x6*eta1*eta4",
    "6*x1*x3*x4*x5^2*eta6-4*x1*x3*x4*x5*eta5*eta6-6*x1*x3*x5^2*x6*eta4+4*x1*x3*x5*x6*eta4*eta5-2*x1*x4*x5^2*eta3*eta6+2*x1*x5^2*x6*eta3*eta4+3*x2^2*x4^2*x6*eta5-x2^2*x4^2*eta5*eta6-3*x2^2*x4*x5*x6*eta4+3*x2^2*x4*x5*x6*eta6+x2^2*x4*x5*eta4*eta6-x2^2*x4*x5*eta6^2-3*x2^2*x4*x6^2*eta5-x2^2*x4*x6*eta4*eta5+x2^2*x4*x6*eta5*eta6+x2^2*x5*x6*eta4^2-x2^2*x5*x6*eta4*eta6+x2^2*x6^2*eta4*eta5-2*x2*x4^2*x6*eta2*eta5+2*x2*x4*x5*x6*eta2*eta4-2*x2*x4*x5*x6*eta2*eta6+2*x2*x4*x6^2*eta2*eta5-2*x3*x4*x5^2*eta1*eta6+2*x3*x5^2*x6*eta1*eta4",
];

/// Log-marginal equations reduced modulo I₂ (η-degree ≤ 1).
pub const LOG_MARGINAL_REDUCED_FIRST: [&str; 3] = [
    "-x5^2*x4*eta6*x1*x3+x5^2*x6*eta4*x1*x3+2*x6^2*eta4*x1*x2*x4-2*x4^2*eta6*x1*x2*x6-x6^2*x1*x2*eta2*x4+x4^2*x1*x2*eta2*x6+x2^2*x6^2*eta1*x4-x4^2*x2^2*eta1*x6",
    "-x5^2*x4*eta6*x1*x3+x5^2*x6*eta4*x1*x3+2*x6^2*eta4*x2*x3*x4-2*x4^2*eta6*x2*x3*x6-x6^2*x2*x3*eta2*x4+x4^2*x2*x3*eta2*x6+x2^2*x6^2*eta3*x4-x4^2*x2^2*eta3*x6",
    "-2*x5^2*x4*eta6*x1*x3+2*x5^2*x6*eta4*x1*x3-x4*x6*x5*x2^2*eta6+x4*x5*x2^2*eta4*x6-x4^2*x2^2*eta5*x6+x4*x6^2*x2^2*eta5",
];
