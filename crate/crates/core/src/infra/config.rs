//! JSON and shorthand backend configuration.

use serde::{Deserialize, Serialize};

use super::cyclic::CyclicGroup;
use super::synthetic::{OracleInfra, SyntheticOptions};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::quad::QuadraticInfra;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BackendConfig {
    Synthetic {
        gaps: Vec<ScaledReal>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_bar: Option<u32>,
        /// Seed for perturbing the approximate deltas below `2^-m`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb: Option<u64>,
    },
    Cyclic {
        order: u64,
    },
    Quadratic {
        #[serde(rename = "D")]
        d: u64,
        /// Overrides the discriminant, e.g. 52 for `ℤ[√13]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        disc: Option<u64>,
    },
}

impl BackendConfig {
    /// Parses JSON, or a shorthand `cyclic:12`, `quadratic:13`,
    /// `synthetic:3/5,11/10,4/5`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()));
        }
        let (kind, arg) = s.split_once(':').ok_or_else(|| Error::Config(format!("unknown backend `{s}`")))?;
        let num = |a: &str| a.trim().parse::<u64>().map_err(|_| Error::Config(format!("bad number `{a}`")));
        match kind {
            "cyclic" => Ok(Self::Cyclic { order: num(arg)? }),
            "quadratic" => Ok(Self::Quadratic { d: num(arg)?, disc: None }),
            "synthetic" => Ok(Self::Synthetic {
                gaps: arg.split(',').map(ScaledReal::parse).collect::<Result<_>>()?,
                k_bar: None,
                perturb: None,
            }),
            _ => Err(Error::Config(format!("unknown backend kind `{kind}`"))),
        }
    }

    pub fn build(&self) -> Result<Backend> {
        Ok(match self {
            Self::Synthetic { gaps, k_bar, perturb } => Backend::Synthetic(OracleInfra::with_options(
                gaps,
                SyntheticOptions { k_bar: *k_bar, perturb: *perturb },
            )?),
            Self::Cyclic { order } => Backend::Cyclic(CyclicGroup::new(*order)?),
            Self::Quadratic { d, disc } => Backend::Quadratic(match disc {
                Some(disc) => QuadraticInfra::with_discriminant(*d, *disc)?,
                None => QuadraticInfra::new(*d)?,
            }),
        })
    }
}

/// A constructed backend of any kind.
#[derive(Debug)]
pub enum Backend {
    Synthetic(OracleInfra),
    Cyclic(CyclicGroup),
    Quadratic(QuadraticInfra),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_json_and_shorthand() {
        let a = BackendConfig::parse(r#"{"type":"synthetic","gaps":["3/5","11/10","4/5"]}"#).unwrap();
        let b = BackendConfig::parse("synthetic:3/5,11/10,4/5").unwrap();
        assert_eq!(a, b);
        assert_eq!(BackendConfig::parse(r#"{"type":"cyclic","order":12}"#).unwrap(), BackendConfig::Cyclic { order: 12 });
        assert_eq!(
            BackendConfig::parse(r#"{"type":"quadratic","D":13}"#).unwrap(),
            BackendConfig::Quadratic { d: 13, disc: None }
        );
        assert!(BackendConfig::parse(r#"{"type":"cyclic","order":12,"x":1}"#).is_err());
        assert!(BackendConfig::parse("torus:3").is_err());
    }

    #[test]
    fn builds_each_kind() {
        assert!(matches!(BackendConfig::parse("cyclic:12").unwrap().build().unwrap(), Backend::Cyclic(_)));
        assert!(matches!(BackendConfig::parse("quadratic:13").unwrap().build().unwrap(), Backend::Quadratic(_)));
        assert!(BackendConfig::parse("quadratic:9").unwrap().build().is_err());
    }
}
