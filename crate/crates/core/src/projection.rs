//! From per-party probabilities to a scalar left-right score.
//!
//! The probability-weighted sum of party vectors gives a resultant vector;
//! its angle against the vertical centrist axis — `atan2(x, y)`, left
//! negative — divided by 90° is the score. Probabilities are used as-is:
//! they are independent multilabel outputs and are deliberately not
//! renormalized.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::positioning::PartyVectorSet;
use crate::record::{ClassifiedRecord, Score};

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    /// The resultant vector is exactly zero: the record carries no party
    /// signal and must not masquerade as centrist.
    #[error("resultant vector is zero; the record has no party signal")]
    ZeroVector,
}

/// Probability-weighted sum of party vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultantVector {
    pub x: f64,
    pub y: f64,
}

/// `v_res = sum_i p_i * v_i`, componentwise. `party_probs` must be aligned
/// with the vector set's registry.
pub fn resultant(party_probs: &[f64], vectors: &PartyVectorSet) -> ResultantVector {
    debug_assert_eq!(party_probs.len(), vectors.vectors().len());
    let (mut x, mut y) = (0.0, 0.0);
    for (p, (vx, vy)) in party_probs.iter().zip(vectors.vectors()) {
        x += p * vx;
        y += p * vy;
    }
    ResultantVector { x, y }
}

/// Angle of the resultant against the centrist axis, normalized by 90°.
pub fn score_from_vector(v: ResultantVector) -> Result<Score, ProjectionError> {
    if v.x == 0.0 && v.y == 0.0 {
        return Err(ProjectionError::ZeroVector);
    }
    let angle_deg = v.x.atan2(v.y).to_degrees();
    Ok(Score::from_angle_deg(angle_deg))
}

/// Score one record, or `None` when its politicalness is below the
/// threshold. The threshold is inclusive: `politicalness >= tau` is scored.
pub fn score_record(
    record: &ClassifiedRecord,
    vectors: &PartyVectorSet,
    tau: f64,
) -> Result<Option<Score>, ProjectionError> {
    if record.politicalness < tau {
        return Ok(None);
    }
    score_from_vector(resultant(&record.party_probs, vectors)).map(Some)
}
