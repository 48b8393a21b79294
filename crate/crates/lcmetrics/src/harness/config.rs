//! Experiment configuration: a JSON document describing the distribution
//! suite, the metrics and bounds to evaluate, numerical targets, and the
//! mandatory RNG seed.

use serde::{Deserialize, Deserializer, Serialize};

use crate::bounds::{BoundId, CheckOptions};
use crate::dist::LogConcaveDensity;
use crate::error::{Error, Result};

pub const METRIC_IDS: [&str; 8] = ["bl", "entropy", "kl", "kolmogorov", "tv", "w1", "w2", "w4"];

/// (p, q) pairs at which the Wasserstein comparisons are instantiated.
pub const PQ_PAIRS: [(f64, f64); 3] = [(1.0, 2.0), (1.0, 4.0), (2.0, 4.0)];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// RNG seed; mandatory so every run is reproducible.
    pub seed: u64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out_dir: Option<String>,
    pub suite: Vec<DistSpec>,
    #[serde(default)]
    pub pairs: PairMode,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    #[serde(default = "default_bounds")]
    pub bounds: Vec<String>,
}

fn default_mc_samples() -> usize {
    200_000
}
fn default_grid_size() -> usize {
    4096
}
fn default_tolerance() -> f64 {
    1e-7
}
fn default_metrics() -> Vec<String> {
    METRIC_IDS.iter().map(|s| s.to_string()).collect()
}
fn default_bounds() -> Vec<String> {
    [
        "classical-bl-tv",
        "classical-bl-w1",
        "wp-monotone",
        "pinsker",
        "tv-bl",
        "bhvv",
        "w1-bl",
        "wq-wp",
        "h-tv",
        "h-tv-bounded-Lf",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// How pairs are formed from the instantiated suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairMode {
    Named(String),
    Explicit(Vec<[usize; 2]>),
}

impl Default for PairMode {
    fn default() -> Self {
        PairMode::Named("vs-gaussian".into())
    }
}

/// A structured distribution record: family name, dimension, optional
/// family parameters, optional interpolation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub family: String,
    pub n: usize,
    /// Base family for `convolve`.
    #[serde(default)]
    pub base: Option<String>,
    /// Interpolation parameter(s); a scalar or a list.
    #[serde(default, deserialize_with = "scalar_or_list")]
    pub t: Option<Vec<f64>>,
    /// Optional 1-D family parameters (defaults are the isotropic ones).
    #[serde(default)]
    pub mean: Option<f64>,
    #[serde(default)]
    pub sd: Option<f64>,
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub scale: Option<f64>,
}

fn scalar_or_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum ScalarOrList {
        Scalar(f64),
        List(Vec<f64>),
    }
    Ok(match Option::<ScalarOrList>::deserialize(d)? {
        None => None,
        Some(ScalarOrList::Scalar(x)) => Some(vec![x]),
        Some(ScalarOrList::List(v)) => Some(v),
    })
}

impl DistSpec {
    fn base_density(family: &str, n: usize) -> Result<LogConcaveDensity> {
        match family {
            "gaussian" => LogConcaveDensity::standard_gaussian(n),
            "uniform" => LogConcaveDensity::isotropic_uniform(n),
            "laplace" => LogConcaveDensity::isotropic_laplace(n),
            other => Err(Error::InvalidConfig(format!(
                "unknown base family: {other} (expected gaussian, uniform, or laplace)"
            ))),
        }
    }

    /// Expand the spec into concrete distributions, one per interpolation
    /// value (a single entry for non-interpolated families).
    pub fn instantiate(&self) -> Result<Vec<(Option<f64>, LogConcaveDensity)>> {
        match self.family.as_str() {
            "convolve" => {
                let base_name = self.base.as_deref().ok_or_else(|| {
                    Error::InvalidConfig("convolve spec needs a `base` family".into())
                })?;
                let base = Self::base_density(base_name, self.n)?;
                let ts = self.t.clone().ok_or_else(|| {
                    Error::InvalidConfig("convolve spec needs interpolation value(s) `t`".into())
                })?;
                ts.into_iter()
                    .map(|t| Ok((Some(t), LogConcaveDensity::convolve_interpolate(&base, t)?)))
                    .collect()
            }
            "gaussian" if self.mean.is_some() || self.sd.is_some() => {
                if self.n != 1 {
                    return Err(Error::InvalidConfig(
                        "parameterized gaussian specs are 1-D".into(),
                    ));
                }
                let d =
                    LogConcaveDensity::gaussian_1d(self.mean.unwrap_or(0.0), self.sd.unwrap_or(1.0))?;
                Ok(vec![(None, d)])
            }
            "uniform" if self.center.is_some() || self.half_width.is_some() => {
                if self.n != 1 {
                    return Err(Error::InvalidConfig(
                        "parameterized uniform specs are 1-D".into(),
                    ));
                }
                let d = LogConcaveDensity::uniform_1d(
                    self.center.unwrap_or(0.0),
                    self.half_width.unwrap_or(3f64.sqrt()),
                )?;
                Ok(vec![(None, d)])
            }
            "laplace" if self.mean.is_some() || self.scale.is_some() => {
                if self.n != 1 {
                    return Err(Error::InvalidConfig(
                        "parameterized laplace specs are 1-D".into(),
                    ));
                }
                let d = LogConcaveDensity::laplace_1d(
                    self.mean.unwrap_or(0.0),
                    self.scale.unwrap_or(0.5f64.sqrt()),
                )?;
                Ok(vec![(None, d)])
            }
            fam => Ok(vec![(None, Self::base_density(fam, self.n)?)]),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.suite.is_empty() {
            return Err(Error::InvalidConfig("suite must not be empty".into()));
        }
        for m in &self.metrics {
            if !METRIC_IDS.contains(&m.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "unknown metric id: {m} (known: {})",
                    METRIC_IDS.join(", ")
                )));
            }
        }
        for b in &self.bounds {
            BoundId::parse(b)?;
        }
        if let PairMode::Named(name) = &self.pairs {
            if name != "vs-gaussian" && name != "all-pairs" {
                return Err(Error::InvalidConfig(format!(
                    "unknown pair mode: {name} (expected vs-gaussian or all-pairs)"
                )));
            }
        }
        if self.grid_size < 16 {
            return Err(Error::InvalidConfig("grid_size must be at least 16".into()));
        }
        if self.mc_samples < 100 {
            return Err(Error::InvalidConfig("mc_samples must be at least 100".into()));
        }
        Ok(())
    }

    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            grid_size: self.grid_size,
            mc_samples: self.mc_samples,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"seed": 1, "suite": [{"family": "gaussian", "n": 1}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.mc_samples, 200_000);
        assert_eq!(cfg.metrics.len(), 8);
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(ExperimentConfig::from_json(r#"{"suite": [{"family": "gaussian", "n": 1}]}"#)
            .is_err());
    }

    #[test]
    fn empty_suite_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"seed": 1, "suite": []}"#).is_err());
    }

    #[test]
    fn unknown_family_rejected_at_instantiation() {
        let spec: DistSpec =
            serde_json::from_str(r#"{"family": "cauchy", "n": 1}"#).unwrap();
        assert!(spec.instantiate().is_err());
    }

    #[test]
    fn unknown_metric_rejected() {
        let r = ExperimentConfig::from_json(
            r#"{"seed":1,"suite":[{"family":"gaussian","n":1}],"metrics":["hausdorff"]}"#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn convolve_expands_t_list() {
        let spec: DistSpec = serde_json::from_str(
            r#"{"family": "convolve", "base": "uniform", "n": 1, "t": [0.8, 0.4]}"#,
        )
        .unwrap();
        let instances = spec.instantiate().unwrap();
        assert_eq!(instances.len(), 2);
        assert_eq!(instances[0].0, Some(0.8));
    }

    #[test]
    fn scalar_t_accepted() {
        let spec: DistSpec = serde_json::from_str(
            r#"{"family": "convolve", "base": "laplace", "n": 2, "t": 0.5}"#,
        )
        .unwrap();
        assert_eq!(spec.instantiate().unwrap().len(), 1);
    }

    #[test]
    fn parameterized_gaussian() {
        let spec: DistSpec =
            serde_json::from_str(r#"{"family": "gaussian", "n": 1, "mean": 1.0}"#).unwrap();
        let inst = spec.instantiate().unwrap();
        assert!(!inst[0].1.is_isotropic());
    }
}
