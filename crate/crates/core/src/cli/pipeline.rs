//! `zcl_{r+1}(A)` for `r = 1..=rmax`, fed into the rationality analysis.

use crate::galg::{power_dim, Algebra};
use crate::invariants::{cup_length, zcl_bounds, zcl_exact, ClResult, InvariantError, ZclResult};
use crate::series::{analyze_sequence, IntSequence, RationalityReport, SeriesError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("rmax must be at least 3, got {0}")]
    RmaxTooSmall(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone)]
pub struct SeriesOutcome {
    pub cl: ClResult,
    /// One entry per `r = 2..=rmax+1`.
    pub entries: Vec<ZclResult>,
    /// `t_r = zcl_{r+1}` from `r = 1`, present only if every entry is certified.
    pub sequence: Option<IntSequence>,
    pub report: Option<RationalityReport>,
}

impl SeriesOutcome {
    /// Every entry certified and a rational form detected.
    pub fn is_conclusive(&self) -> bool {
        self.report
            .as_ref()
            .is_some_and(|r| r.verdict == crate::series::Verdict::RationalFormDetected)
    }
}

/// Exact computation wherever `dim(A)^r` fits `ceiling`, bounds elsewhere.
pub fn series_pipeline(
    a: &Algebra,
    rmax: usize,
    ceiling: usize,
    min_run: usize,
) -> Result<SeriesOutcome, PipelineError> {
    if rmax < 3 {
        return Err(PipelineError::RmaxTooSmall(rmax));
    }
    let cl = cup_length(a);
    let mut entries = Vec::with_capacity(rmax);
    for r in 2..=rmax + 1 {
        let entry = if power_dim(a, r) <= ceiling as u128 {
            zcl_exact(a, r, ceiling)?
        } else {
            zcl_bounds(a, r, ceiling)?
        };
        entries.push(entry);
    }
    let values: Option<Vec<i64>> = entries.iter().map(|e| e.value.map(|v| v as i64)).collect();
    let sequence = values.map(|v| IntSequence::new(1, v));
    let report = match &sequence {
        Some(s) => Some(analyze_sequence(s, min_run)?),
        None => None,
    };
    Ok(SeriesOutcome {
        cl,
        entries,
        sequence,
        report,
    })
}
