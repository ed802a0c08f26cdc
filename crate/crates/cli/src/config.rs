//! Run configuration. Every subcommand is translated into a `RunConfig`,
//! which is embedded in the report and accepted back by `run --config`.

use std::path::PathBuf;

use infra1d::dlog::KFilter;
use infra1d::infra::BackendConfig;
use infra1d::qsampler::DEFAULT_CELL_CAP;
use infra1d::ScaledReal;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

fn default_cell_cap() -> u64 {
    DEFAULT_CELL_CAP as u64
}

fn default_delta() -> ScaledReal {
    ScaledReal::ratio(1, 1000)
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Cap on trials; pipelines otherwise derive one from their bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials_cap: Option<u64>,
    /// Cap on cells of any two-dimensional transform.
    #[serde(default = "default_cell_cap")]
    pub cell_cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Binary dump of one outcome distribution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    pub pipeline: Pipeline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Pipeline {
    Circumference {
        backend: BackendConfig,
        #[serde(default = "default_delta")]
        delta: ScaledReal,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<u64>,
        #[serde(default = "yes")]
        prefer_pow2: bool,
    },
    Dlog {
        backend: BackendConfig,
        target: String,
        #[serde(default = "default_delta")]
        delta: ScaledReal,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_hat: Option<ScaledReal>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_override: Option<u64>,
        #[serde(default)]
        k_filter: KFilter,
        /// Evaluate the success bound at this κ instead of maximizing.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
    Pell {
        #[serde(rename = "D")]
        d: u64,
        #[serde(default = "default_delta")]
        delta: ScaledReal,
    },
    Geomsum {
        trials: u64,
    },
    Coprime {
        trials: u64,
        n: u64,
    },
    Bounds {
        formula: Formula,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Formula {
    /// `q = None` evaluates the limit `q → ∞`.
    Psuccess {
        #[serde(rename = "S")]
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
    },
    Periodic {
        #[serde(rename = "N")]
        n: f64,
        #[serde(rename = "R")]
        r: f64,
        d_min: f64,
        q: f64,
    },
    Dlog {
        q: u64,
        #[serde(rename = "B")]
        b: u64,
        p_g: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
    DlogSimplified {
        p_g: f64,
    },
}

impl RunConfig {
    /// Accepts a bare configuration or a report embedding one.
    pub fn parse(json: &str) -> Result<Self, serde_json::Error> {
        let mut v: serde_json::Value = serde_json::from_str(json)?;
        if let Some(cfg) = v.get_mut("schema_version").is_some().then(|| v["config"].take()) {
            return serde_json::from_value(cfg);
        }
        serde_json::from_value(v)
    }
}
