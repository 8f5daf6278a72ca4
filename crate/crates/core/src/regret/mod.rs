//! Regret evaluation.
//!
//! For values `v` and a policy picking item `I`, the regret is
//! `max_i v_i - E[v_I]`. The binary case (item 2 pinned at 0 with no noise)
//! is handled in closed form for piecewise clamped-linear policies; n-item
//! offset policies are evaluated exactly by one-dimensional piecewise
//! polynomial integration, by enumeration for atoms-only noise, or by
//! Monte Carlo.

mod binary;
mod multi;
mod search;

pub use binary::{binary_regret, binary_worstcase, expected_pick, BinaryWorstCase};
pub use multi::{exact_regret_atoms, mc_regret, regret_exact, DEFAULT_OUTCOME_CAP};
pub use search::{
    offset_worstcase_atoms, reduction_check, worstcase_search_n, Evaluator, ReductionReport, SearchConfig, SearchResult,
};

use serde::{Deserialize, Serialize};

use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};

/// Noise distributions for `n` items and, optionally, their values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub noises: Vec<MixtureDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Instance {
    pub fn new(noises: Vec<MixtureDistribution>, values: Option<Vec<f64>>) -> Result<Self> {
        let inst = Instance { noises, values };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.noises.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if let Some(v) = &self.values {
            if v.len() != self.noises.len() {
                return Err(Error::LengthMismatch { expected: self.noises.len(), got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("values must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.noises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.noises.is_empty()
    }

    pub(crate) fn values_checked(&self) -> Result<&[f64]> {
        self.validate()?;
        self.values.as_deref().ok_or_else(|| Error::InvalidParameter("instance has no values".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub std_error: f64,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RegretEstimate {
    pub fn exact(value: f64) -> Self {
        RegretEstimate { value, kind: EstimateKind::Exact, std_error: 0.0, samples: 0, seed: None }
    }
}
