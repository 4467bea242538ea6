//! The on-disk rule format: one JSON object per line with a fixed field
//! order, integers only.

use anyhow::{bail, Context};
use ncca_core::localfn::{wolfram_code, LocalFunction};
use ncca_core::neighborhood::StateSet;
use serde::{Deserialize, Serialize};

/// Literal tag naming the direction order LUT indices are built over:
/// -v_d, ..., -v_1, the center, v_1, ..., v_d, first entry most
/// significant.
pub const ORDER_TAG: &str = "-vd..-v1,0,v1..vd";

/// One rule in a catalog file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub dim: usize,
    pub states: Vec<i64>,
    pub order: String,
    pub lut: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wolfram: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<i64>>,
}

impl RuleRecord {
    /// Annotates a bare local function: the code for one-dimensional
    /// binary rules, nothing else.
    pub fn from_local_function(f: &LocalFunction) -> RuleRecord {
        RuleRecord {
            dim: f.dimension(),
            states: f.states().values().to_vec(),
            order: ORDER_TAG.to_string(),
            lut: f.table().to_vec(),
            wolfram: wolfram_code(f).ok(),
            split: None,
            coeffs: None,
        }
    }

    pub fn to_local_function(&self) -> anyhow::Result<LocalFunction> {
        if self.order != ORDER_TAG {
            bail!(
                "unsupported slot order {:?}; this tool writes and reads {:?}",
                self.order,
                ORDER_TAG
            );
        }
        let states = StateSet::new(self.states.clone()).context("invalid state set")?;
        LocalFunction::from_table(self.dim, states, self.lut.clone())
            .context("invalid lookup table")
    }

    /// Parses a record from file contents: either a single JSON object or
    /// the first line of a JSON-lines catalog.
    pub fn parse(contents: &str) -> anyhow::Result<RuleRecord> {
        let line = contents
            .lines()
            .find(|l| !l.trim().is_empty())
            .context("empty rule file")?;
        serde_json::from_str(line).context("malformed rule record")
    }
}
