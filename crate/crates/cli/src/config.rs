//! Defaults shared by all subcommands, loadable from a TOML file.

use serde::Deserialize;

use algest::groebner::GroebnerLimits;
use algest::homotopy::TrackerConfig;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub model: String,
    pub clazz: String,
    pub c: String,
    pub seed: u64,
    pub data: Vec<f64>,
    pub reps: usize,
    pub simulate: SimulateConfig,
    pub tracker: TrackerSection,
    pub limits: LimitsSection,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub truth: Vec<f64>,
    pub n_grid: Vec<u64>,
    pub trials: usize,
    pub estimators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerSection {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub divergence: f64,
    pub refine_tol: f64,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsSection {
    pub max_basis: usize,
    pub max_degree: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            model: "log-marginal".into(),
            clazz: "mle".into(),
            c: "1".into(),
            seed: 20_120_101,
            data: vec![1.0; 6],
            reps: 10,
            simulate: SimulateConfig::default(),
            tracker: TrackerSection::default(),
            limits: LimitsSection::default(),
        }
    }
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            truth: vec![1.0 / 6.0, 0.25, 1.0 / 12.0, 1.0 / 12.0, 0.25, 1.0 / 6.0],
            n_grid: vec![100, 1_000, 10_000],
            trials: 200,
            estimators: vec!["mle".into(), "reduced-first-order".into(), "reduced-second-order".into()],
        }
    }
}

impl Default for TrackerSection {
    fn default() -> Self {
        let t = TrackerConfig::default();
        TrackerSection {
            initial_step: t.initial_step,
            min_step: t.min_step,
            max_step: t.max_step,
            newton_tol: t.newton_tol,
            max_newton: t.max_newton,
            divergence: t.divergence,
            refine_tol: t.refine_tol,
            max_steps: t.max_steps,
        }
    }
}

impl Default for LimitsSection {
    fn default() -> Self {
        let l = GroebnerLimits::default();
        LimitsSection { max_basis: l.max_basis, max_degree: l.max_degree }
    }
}

impl TrackerSection {
    pub fn to_tracker(&self) -> TrackerConfig {
        TrackerConfig {
            initial_step: self.initial_step,
            min_step: self.min_step,
            max_step: self.max_step,
            newton_tol: self.newton_tol,
            max_newton: self.max_newton,
            divergence: self.divergence,
            refine_tol: self.refine_tol,
            max_steps: self.max_steps,
            ..TrackerConfig::default()
        }
    }
}

impl LimitsSection {
    pub fn to_limits(&self) -> GroebnerLimits {
        GroebnerLimits { max_basis: self.max_basis, max_degree: self.max_degree }
    }
}

impl Config {
    pub fn parse(src: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(src)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_matches_builtin_defaults() {
        let shipped = Config::parse(include_str!("../algest.toml")).unwrap();
        assert_eq!(shipped, Config::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("modle = \"x\"").is_err());
        assert!(Config::parse("[tracker]\nstep = 1").is_err());
    }
}
