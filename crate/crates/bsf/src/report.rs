//! Machine-readable outcome of an exact verification: what was checked, at
//! which truncation order, and the first mismatch if there was one.

use serde::Serialize;

use crate::rational::{format_rat, Rat};
use crate::series::SeriesComparison;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Fail,
}

/// The first index at which two sides of an identity disagree, with both
/// values rendered exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: usize,
    pub lhs: String,
    pub rhs: String,
}

impl Mismatch {
    pub fn new(n: usize, lhs: &Rat, rhs: &Rat) -> Self {
        Mismatch {
            n,
            lhs: format_rat(lhs),
            rhs: format_rat(rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub statement: String,
    pub parameters: serde_json::Value,
    pub order: usize,
    pub status: Status,
    pub first_mismatch: Option<Mismatch>,
}

impl VerificationReport {
    pub fn exact(statement: &str, parameters: serde_json::Value, order: usize) -> Self {
        VerificationReport {
            statement: statement.to_string(),
            parameters,
            order,
            status: Status::Exact,
            first_mismatch: None,
        }
    }

    pub fn fail(
        statement: &str,
        parameters: serde_json::Value,
        order: usize,
        mismatch: Mismatch,
    ) -> Self {
        VerificationReport {
            statement: statement.to_string(),
            parameters,
            order,
            status: Status::Fail,
            first_mismatch: Some(mismatch),
        }
    }

    /// Builds a report from a series comparison, shifting the mismatch index
    /// by `index_offset` (a residual at series index j often witnesses the
    /// relation for coefficient j + 1).
    pub fn from_comparison(
        statement: &str,
        parameters: serde_json::Value,
        order: usize,
        cmp: &SeriesComparison,
        index_offset: usize,
    ) -> Self {
        match &cmp.first_mismatch {
            None => Self::exact(statement, parameters, order),
            Some((n, lhs, rhs)) => Self::fail(
                statement,
                parameters,
                order,
                Mismatch::new(n + index_offset, lhs, rhs),
            ),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }
}
