//! TOML scenario files.
//!
//! ```toml
//! max_generation = 3
//! pmf = ["1/2", "1/4", "1/8", "1/8"]
//! realized_w = 0            # optional
//!
//! [[lses]]
//! id = 1
//! v = "3"
//! c = "-1"
//!
//! [[true_types]]            # optional, same shape as lses
//! id = 1
//! v = "3"
//! c = "-1"
//!
//! [[declared_schedules]]    # optional payment table to audit
//! id = 1
//! t_day_ahead = "13/32"
//! t_realtime = ["1/2", "-1/2", "0", "0"]
//! ```
//!
//! Rationals are strings (`"p/q"`, `"p"`, or a finite decimal); bare TOML
//! integers are accepted too.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{Bid, GenerationPmf, Instance, LseId, PaymentCase, PaymentSchedule};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub max_generation: usize,
    pub pmf: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized_w: Option<usize>,
    #[serde(default)]
    pub lses: Vec<LseEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_types: Option<Vec<LseEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declared_schedules: Vec<DeclaredSchedule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LseEntry {
    pub id: u32,
    pub v: Rational,
    pub c: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredSchedule {
    pub id: u32,
    pub t_day_ahead: Rational,
    pub t_realtime: Vec<Rational>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{origin}:{line}:{column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: invalid `{key}`")]
    Invalid {
        origin: String,
        key: &'static str,
        source: Error,
    },
    #[error("cannot read {origin}")]
    Io {
        origin: String,
        source: std::io::Error,
    },
}

impl ScenarioError {
    /// The domain error behind a validation failure.
    pub fn domain_error(&self) -> Option<&Error> {
        match self {
            ScenarioError::Invalid { source, .. } => Some(source),
            _ => None,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |nl| before.len() - nl - 1)
        + 1;
    (line, column)
}

impl LseEntry {
    fn to_bid(&self) -> Bid {
        Bid::new(LseId(self.id), self.v.clone(), self.c.clone())
    }

    fn from_bid(bid: &Bid) -> Self {
        LseEntry {
            id: bid.id().0,
            v: bid.v_hat().clone(),
            c: bid.c_hat().clone(),
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            ScenarioError::Syntax {
                origin: origin.to_string(),
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self, ScenarioError> {
        let origin = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            origin: origin.clone(),
            source,
        })?;
        ScenarioFile::parse(&text, &origin)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn from_instance(inst: &Instance, realized_w: Option<usize>) -> Self {
        ScenarioFile {
            max_generation: inst.max_generation(),
            pmf: inst.pmf().probs().to_vec(),
            realized_w,
            lses: inst.bids().iter().map(LseEntry::from_bid).collect(),
            true_types: inst
                .true_types()
                .map(|types| types.iter().map(LseEntry::from_bid).collect()),
            declared_schedules: Vec::new(),
        }
    }

    /// Validates the document into an instance.
    pub fn to_instance(&self, origin: &str) -> Result<Instance, ScenarioError> {
        let invalid = |key, source| ScenarioError::Invalid {
            origin: origin.to_string(),
            key,
            source,
        };
        if self.pmf.len() != self.max_generation + 1 {
            return Err(invalid(
                "max_generation",
                Error::PmfLengthMismatch {
                    max_generation: self.max_generation,
                    len: self.pmf.len(),
                },
            ));
        }
        let pmf = GenerationPmf::new(self.pmf.clone()).map_err(|e| invalid("pmf", e))?;
        let bids = self.lses.iter().map(LseEntry::to_bid).collect();
        let types = self
            .true_types
            .as_ref()
            .map(|t| t.iter().map(LseEntry::to_bid).collect());
        let key = match Instance::new(pmf.clone(), bids, None) {
            Err(e) => return Err(invalid("lses", e)),
            Ok(_) => "true_types",
        };
        let inst = Instance::new(pmf, self.lses.iter().map(LseEntry::to_bid).collect(), types)
            .map_err(|e| invalid(key, e))?;
        if let Some(w) = self.realized_w {
            inst.pmf()
                .check_level(w)
                .map_err(|e| invalid("realized_w", e))?;
        }
        Ok(inst)
    }

    /// Declared payment tables, if the document carries any.
    pub fn declared(&self) -> Vec<PaymentSchedule> {
        self.declared_schedules
            .iter()
            .map(|d| PaymentSchedule {
                lse_id: LseId(d.id),
                t_day_ahead: d.t_day_ahead.clone(),
                t_realtime: d.t_realtime.clone(),
                case: PaymentCase::NotSelected,
            })
            .collect()
    }

    pub fn with_declared(mut self, schedules: &[PaymentSchedule]) -> Self {
        self.declared_schedules = schedules
            .iter()
            .map(|s| DeclaredSchedule {
                id: s.lse_id.0,
                t_day_ahead: s.t_day_ahead.clone(),
                t_realtime: s.t_realtime.clone(),
            })
            .collect();
        self
    }
}
