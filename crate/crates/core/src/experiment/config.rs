//! JSON experiment configurations. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::bounds::Grid;
use crate::krylov::NoiseTarget;
use crate::propagate::EvolutionMethod;
use crate::{Error, Result};

/// A time step given as a number or as `"auto"` (`π / (Emax - E0)`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeStep {
    Auto(AutoKeyword),
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

impl Default for TimeStep {
    fn default() -> Self {
        TimeStep::Auto(AutoKeyword::Auto)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    BenchTfim(BenchTfim),
    Kqd(KqdSweep),
    Skqd(SkqdSweep),
    Siam(SiamSweep),
    VerifyBounds(VerifyBounds),
    SparsityE(SparsitySweep),
}

fn d_tfim() -> f64 {
    0.1
}
fn d_krylov() -> usize {
    15
}
fn d_shots() -> Vec<usize> {
    vec![10, 100, 1000]
}
fn d_seeds() -> usize {
    100
}
fn d_sigma() -> f64 {
    1.0 / 5000f64.sqrt()
}
fn d_targets() -> Vec<NoiseTarget> {
    vec![NoiseTarget::HAndS, NoiseTarget::HOnly]
}

/// Noisy KQD against SKQD on open Ising chains of several sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchTfim {
    pub n: Vec<usize>,
    #[serde(default = "d_tfim")]
    pub h1: f64,
    #[serde(default = "d_tfim")]
    pub h2: f64,
    #[serde(default = "d_krylov")]
    pub d: usize,
    #[serde(default)]
    pub dt: TimeStep,
    /// Shots per Krylov state for SKQD.
    #[serde(default = "d_shots")]
    pub shots: Vec<usize>,
    /// Number of seeds; seed `i` is `seed + i`.
    #[serde(default = "d_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
    /// Matrix-element noise of the KQD baseline.
    #[serde(default = "d_sigma")]
    pub sigma: f64,
    #[serde(default = "d_targets")]
    pub targets: Vec<NoiseTarget>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub evolution: Option<EvolutionMethod>,
}

/// KQD over Krylov dimensions and noise levels on one open Ising chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KqdSweep {
    pub n: usize,
    #[serde(default = "d_tfim")]
    pub h1: f64,
    #[serde(default = "d_tfim")]
    pub h2: f64,
    pub d: Vec<usize>,
    #[serde(default)]
    pub dt: TimeStep,
    /// Noise levels; 0 runs the noiseless estimate once.
    #[serde(default)]
    pub sigma: Vec<f64>,
    #[serde(default = "d_targets")]
    pub targets: Vec<NoiseTarget>,
    #[serde(default = "d_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub evolution: Option<EvolutionMethod>,
}

/// SKQD over sizes and shot counts on open Ising chains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkqdSweep {
    pub n: Vec<usize>,
    #[serde(default = "d_tfim")]
    pub h1: f64,
    #[serde(default = "d_tfim")]
    pub h2: f64,
    #[serde(default = "d_krylov")]
    pub d: usize,
    #[serde(default)]
    pub dt: TimeStep,
    #[serde(default = "d_shots")]
    pub shots: Vec<usize>,
    #[serde(default = "d_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
    /// Keep only the most sampled bitstrings.
    #[serde(default)]
    pub d_max: Option<usize>,
    #[serde(default)]
    pub evolution: Option<EvolutionMethod>,
}

fn d_bath() -> usize {
    7
}
fn d_us() -> Vec<f64> {
    vec![1.0, 3.0, 7.0, 10.0]
}
fn d_siam_d() -> usize {
    25
}
fn d_siam_dt() -> f64 {
    0.1
}
fn d_siam_shots() -> Vec<usize> {
    vec![1_000, 10_000, 100_000]
}
fn one() -> usize {
    1
}
fn d_uniform() -> Option<usize> {
    Some(1000)
}
fn d_hop() -> f64 {
    1.0
}
fn d_hyb() -> f64 {
    -1.0
}
fn yes() -> bool {
    true
}

/// Two-stage SKQD on the impurity model against sector diagonalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiamSweep {
    #[serde(default = "d_bath")]
    pub bath_sites: usize,
    #[serde(default = "d_us")]
    pub u: Vec<f64>,
    #[serde(default = "d_hop")]
    pub t: f64,
    #[serde(default = "d_hyb")]
    pub v: f64,
    /// Impurity level; `-U/2` when absent.
    #[serde(default)]
    pub eps_imp: Option<f64>,
    #[serde(default = "d_siam_d")]
    pub d: usize,
    #[serde(default = "d_siam_dt")]
    pub dt: f64,
    #[serde(default = "d_siam_shots")]
    pub shots: Vec<usize>,
    #[serde(default = "one")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub evolution: Option<EvolutionMethod>,
    /// Shots per Krylov state for the uniform-sampling comparison.
    #[serde(default = "d_uniform")]
    pub uniform_shots: Option<usize>,
    #[serde(default = "yes")]
    pub correlations: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBounds {
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub seed: u64,
}

fn d_ring() -> Vec<usize> {
    (8..=14).collect()
}
fn d_fields() -> Vec<f64> {
    vec![0.1, 0.3, 0.5]
}
fn d_max_qubits() -> usize {
    20
}

/// Hamming-weight tails of the ring Ising ground state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparsitySweep {
    #[serde(default = "d_ring")]
    pub n: Vec<usize>,
    #[serde(default = "d_fields")]
    pub h: Vec<f64>,
    #[serde(default = "d_max_qubits")]
    pub max_qubits: usize,
}

fn nonempty<T>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{what} must not be empty")));
    }
    Ok(())
}

fn positive(x: usize, what: &str) -> Result<()> {
    if x == 0 {
        return Err(Error::Config(format!("{what} must be positive")));
    }
    Ok(())
}

fn check_dt(dt: TimeStep) -> Result<()> {
    match dt {
        TimeStep::Fixed(x) if !(x > 0.0 && x.is_finite()) => {
            Err(Error::Config(format!("dt {x} must be positive")))
        }
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::BenchTfim(_) => "bench-tfim",
            ExperimentConfig::Kqd(_) => "kqd",
            ExperimentConfig::Skqd(_) => "skqd",
            ExperimentConfig::Siam(_) => "siam",
            ExperimentConfig::VerifyBounds(_) => "verify-bounds",
            ExperimentConfig::SparsityE(_) => "sparsity-e",
        }
    }

    /// Replace the base seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            ExperimentConfig::BenchTfim(c) => c.seed = seed,
            ExperimentConfig::Kqd(c) => c.seed = seed,
            ExperimentConfig::Skqd(c) => c.seed = seed,
            ExperimentConfig::Siam(c) => c.seed = seed,
            ExperimentConfig::VerifyBounds(c) => c.seed = seed,
            ExperimentConfig::SparsityE(_) => {}
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::BenchTfim(c) => {
                nonempty(&c.n, "n")?;
                nonempty(&c.shots, "shots")?;
                positive(c.d, "d")?;
                positive(c.seeds, "seeds")?;
                check_dt(c.dt)?;
                if c.n.iter().any(|&n| n < 2) || c.shots.contains(&0) {
                    return Err(Error::Config(
                        "n must be at least 2 and shots positive".into(),
                    ));
                }
                if !(c.sigma >= 0.0) {
                    return Err(Error::Config(format!("sigma {}", c.sigma)));
                }
            }
            ExperimentConfig::Kqd(c) => {
                nonempty(&c.d, "d")?;
                positive(c.seeds, "seeds")?;
                check_dt(c.dt)?;
                if c.d.contains(&0) || c.sigma.iter().any(|s| !(*s >= 0.0)) {
                    return Err(Error::Config(
                        "d must be positive and sigma nonnegative".into(),
                    ));
                }
            }
            ExperimentConfig::Skqd(c) => {
                nonempty(&c.n, "n")?;
                nonempty(&c.shots, "shots")?;
                positive(c.d, "d")?;
                positive(c.seeds, "seeds")?;
                check_dt(c.dt)?;
                if c.shots.contains(&0) || c.d_max == Some(0) {
                    return Err(Error::Config("shots and d_max must be positive".into()));
                }
            }
            ExperimentConfig::Siam(c) => {
                nonempty(&c.u, "u")?;
                nonempty(&c.shots, "shots")?;
                positive(c.d, "d")?;
                positive(c.seeds, "seeds")?;
                check_dt(TimeStep::Fixed(c.dt))?;
                if c.bath_sites % 2 == 0 {
                    return Err(Error::Config(format!(
                        "bath_sites {} must be odd for half filling",
                        c.bath_sites
                    )));
                }
                if c.shots.contains(&0) || c.uniform_shots == Some(0) {
                    return Err(Error::Config("shot counts must be positive".into()));
                }
            }
            ExperimentConfig::VerifyBounds(_) => {}
            ExperimentConfig::SparsityE(c) => {
                nonempty(&c.n, "n")?;
                nonempty(&c.h, "h")?;
                if c.h.iter().any(|h| !(*h > 0.0)) {
                    return Err(Error::Config("fields must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(r#"{"kind": "bench-tfim", "n": [6, 8]}"#).unwrap();
        let ExperimentConfig::BenchTfim(b) = c else {
            panic!()
        };
        assert_eq!(
            (b.d, b.seeds, b.shots.clone()),
            (15, 100, vec![10, 100, 1000])
        );
        assert_eq!(b.dt, TimeStep::Auto(AutoKeyword::Auto));
        let c = ExperimentConfig::from_json(
            r#"{"kind": "kqd", "n": 6, "d": [3], "dt": 0.4, "targets": ["h-only"]}"#,
        );
        let ExperimentConfig::Kqd(k) = c.unwrap() else {
            panic!()
        };
        assert_eq!(
            (k.dt, k.targets),
            (TimeStep::Fixed(0.4), vec![NoiseTarget::HOnly])
        );
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(
            ExperimentConfig::from_json(r#"{"kind": "bench-tfim", "n": [6], "shotz": [1]}"#)
                .is_err()
        );
        assert!(ExperimentConfig::from_json(r#"{"kind": "dmrg"}"#).is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"kind": "kqd", "n": 6, "d": [3], "dt": "later"}"#)
                .is_err()
        );
        assert!(ExperimentConfig::from_json(r#"{"kind": "siam", "bath_sites": 6}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind": "skqd", "n": [4], "shots": []}"#).is_err());
    }

    #[test]
    fn seed_override_and_round_trip() {
        let c = ExperimentConfig::from_json(r#"{"kind": "siam", "u": [2.0]}"#)
            .unwrap()
            .with_seed(9);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
        let ExperimentConfig::Siam(s) = back else {
            panic!()
        };
        assert_eq!(s.seed, 9);
    }
}
