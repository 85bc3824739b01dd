//! Classified text records, outlet ground-truth ratings, and scores.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::party::{PartyId, PartyRegistry};

#[derive(Debug, Error, PartialEq)]
pub enum RecordError {
    #[error("record '{record_id}': field '{field}' = {value} is outside [0, 1]")]
    ProbabilityOutOfRange {
        record_id: String,
        field: String,
        value: f64,
    },
    #[error("record '{record_id}': party_probs is missing party '{party}'")]
    MissingParty { record_id: String, party: String },
    #[error("record '{record_id}': field '{field}' is malformed: {reason}")]
    MalformedField {
        record_id: String,
        field: String,
        reason: String,
    },
}

/// Record fields as parsed from an input line, before validation.
///
/// `party_probs` are independent multilabel outputs and are not expected to
/// sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub record_id: String,
    pub politicalness: f64,
    pub party_probs: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlet: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_party: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_count: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

/// A validated record: one text's politicalness, per-party probabilities
/// (aligned with the registry order) and optional evaluation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedRecord {
    registry: Arc<PartyRegistry>,
    pub record_id: String,
    pub politicalness: f64,
    pub party_probs: Vec<f64>,
    pub outlet: Option<String>,
    pub author_party: Option<PartyId>,
    pub word_count: Option<u64>,
    pub timestamp: Option<String>,
}

/// Validate raw fields against a registry. Never clamps: any probability
/// outside `[0, 1]` is an error naming the field and record.
pub fn validate_record(
    raw: RawRecord,
    registry: &Arc<PartyRegistry>,
) -> Result<ClassifiedRecord, RecordError> {
    let record_id = raw.record_id;
    if record_id.trim().is_empty() {
        return Err(RecordError::MalformedField {
            record_id,
            field: "record_id".into(),
            reason: "must be non-empty".into(),
        });
    }
    check_probability(&record_id, "politicalness", raw.politicalness)?;

    for name in raw.party_probs.keys() {
        if registry.id(name).is_none() {
            return Err(RecordError::MalformedField {
                record_id,
                field: "party_probs".into(),
                reason: format!("unknown party '{name}'"),
            });
        }
    }
    let mut party_probs = Vec::with_capacity(registry.len());
    for name in registry.names() {
        let p = *raw
            .party_probs
            .get(name)
            .ok_or_else(|| RecordError::MissingParty {
                record_id: record_id.clone(),
                party: name.to_string(),
            })?;
        check_probability(&record_id, &format!("party_probs.{name}"), p)?;
        party_probs.push(p);
    }

    let author_party = match raw.author_party.as_deref() {
        None => None,
        Some(name) => Some(registry.id(name).ok_or_else(|| RecordError::MalformedField {
            record_id: record_id.clone(),
            field: "author_party".into(),
            reason: format!("unknown party '{name}'"),
        })?),
    };

    let word_count = match raw.word_count {
        None => None,
        Some(n) if n >= 0 => Some(n as u64),
        Some(n) => {
            return Err(RecordError::MalformedField {
                record_id,
                field: "word_count".into(),
                reason: format!("must be non-negative, got {n}"),
            })
        }
    };

    if let Some(ts) = raw.timestamp.as_deref() {
        if chrono::DateTime::parse_from_rfc3339(ts).is_err() {
            return Err(RecordError::MalformedField {
                record_id,
                field: "timestamp".into(),
                reason: format!("'{ts}' is not an ISO-8601/RFC-3339 timestamp"),
            });
        }
    }

    Ok(ClassifiedRecord {
        registry: registry.clone(),
        record_id,
        politicalness: raw.politicalness,
        party_probs,
        outlet: raw.outlet,
        author_party,
        word_count,
        timestamp: raw.timestamp,
    })
}

fn check_probability(record_id: &str, field: &str, value: f64) -> Result<(), RecordError> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(RecordError::ProbabilityOutOfRange {
            record_id: record_id.to_string(),
            field: field.to_string(),
            value,
        });
    }
    Ok(())
}

impl ClassifiedRecord {
    pub fn registry(&self) -> &Arc<PartyRegistry> {
        &self.registry
    }

    /// Back to the serializable shape, party_probs in registry order.
    pub fn to_raw(&self) -> RawRecord {
        let party_probs = self
            .registry
            .names()
            .zip(self.party_probs.iter())
            .map(|(n, p)| (n.to_string(), *p))
            .collect();
        RawRecord {
            record_id: self.record_id.clone(),
            politicalness: self.politicalness,
            party_probs,
            outlet: self.outlet.clone(),
            author_party: self.author_party.map(|id| self.registry.name(id).to_string()),
            word_count: self.word_count.map(|n| n as i64),
            timestamp: self.timestamp.clone(),
        }
    }

    /// Highest-probability party; ties break to the lowest registry index.
    pub fn argmax_party(&self) -> PartyId {
        let mut best = 0;
        for (i, p) in self.party_probs.iter().enumerate() {
            if *p > self.party_probs[best] {
                best = i;
            }
        }
        PartyId(best)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RatingError {
    #[error("outlet '{outlet}': survey rating {value} is outside [1, 7]")]
    OutOfRange { outlet: String, value: f64 },
}

/// An outlet's ground-truth leaning: the raw 1-7 survey rating and its
/// mapping onto `[-1, 1]` via `(x - 4) / 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutletRating {
    pub outlet: String,
    pub survey_rating: f64,
    pub scaled_label: f64,
}

impl OutletRating {
    pub fn from_survey(outlet: impl Into<String>, survey_rating: f64) -> Result<Self, RatingError> {
        let outlet = outlet.into();
        if !(1.0..=7.0).contains(&survey_rating) || !survey_rating.is_finite() {
            return Err(RatingError::OutOfRange {
                outlet,
                value: survey_rating,
            });
        }
        Ok(Self {
            outlet,
            survey_rating,
            scaled_label: (survey_rating - 4.0) / 3.0,
        })
    }
}

/// A left-right score: the signed angle from the centrist axis in degrees,
/// and its normalization `angle_deg / 90` in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub angle_deg: f64,
}

impl Score {
    pub fn from_angle_deg(angle_deg: f64) -> Self {
        Self {
            value: angle_deg / 90.0,
            angle_deg,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::indexmap;

    fn raw(politicalness: f64) -> RawRecord {
        RawRecord {
            record_id: "r1".into(),
            politicalness,
            party_probs: indexmap! {
                "Linke".into() => 0.0307,
                "B90".into() => 0.2806,
                "SPD".into() => 0.2743,
                "FDP".into() => 0.4508,
                "CDU".into() => 0.0698,
                "AfD".into() => 0.0011,
            },
            outlet: Some("Bild".into()),
            author_party: None,
            word_count: Some(42),
            timestamp: None,
        }
    }

    #[test]
    fn accepts_worked_example_record() {
        let reg = PartyRegistry::german_default();
        let rec = validate_record(raw(0.99), &reg).unwrap();
        assert_eq!(rec.politicalness, 0.99);
        assert_eq!(rec.party_probs.len(), 6);
        assert_eq!(rec.party_probs[3], 0.4508);
        assert_eq!(rec.word_count, Some(42));
    }

    #[test]
    fn rejects_out_of_range_politicalness() {
        let reg = PartyRegistry::german_default();
        let err = validate_record(raw(1.2), &reg).unwrap_err();
        assert_eq!(
            err,
            RecordError::ProbabilityOutOfRange {
                record_id: "r1".into(),
                field: "politicalness".into(),
                value: 1.2,
            }
        );
    }

    #[test]
    fn rejects_missing_party() {
        let reg = PartyRegistry::german_default();
        let mut r = raw(0.9);
        r.party_probs.shift_remove("AfD");
        let err = validate_record(r, &reg).unwrap_err();
        assert_eq!(
            err,
            RecordError::MissingParty {
                record_id: "r1".into(),
                party: "AfD".into(),
            }
        );
    }

    #[test]
    fn rejects_negative_word_count_and_bad_timestamp() {
        let reg = PartyRegistry::german_default();
        let mut r = raw(0.9);
        r.word_count = Some(-3);
        assert!(matches!(
            validate_record(r, &reg).unwrap_err(),
            RecordError::MalformedField { ref field, .. } if field == "word_count"
        ));
        let mut r = raw(0.9);
        r.timestamp = Some("yesterday".into());
        assert!(matches!(
            validate_record(r, &reg).unwrap_err(),
            RecordError::MalformedField { ref field, .. } if field == "timestamp"
        ));
        let mut r = raw(0.9);
        r.timestamp = Some("2024-05-01T12:00:00+02:00".into());
        assert!(validate_record(r, &reg).is_ok());
    }

    #[test]
    fn raw_round_trip() {
        let reg = PartyRegistry::german_default();
        let original = raw(0.99);
        let rec = validate_record(original.clone(), &reg).unwrap();
        assert_eq!(rec.to_raw(), original);
        let json = serde_json::to_string(&rec.to_raw()).unwrap();
        let back: RawRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(validate_record(back, &reg).unwrap(), rec);
    }

    #[test]
    fn argmax_breaks_ties_to_lowest_index() {
        let reg = PartyRegistry::german_default();
        let mut r = raw(0.9);
        for v in r.party_probs.values_mut() {
            *v = 0.5;
        }
        let rec = validate_record(r, &reg).unwrap();
        assert_eq!(rec.argmax_party(), reg.id("Linke").unwrap());
    }

    #[test]
    fn rating_maps_survey_scale() {
        let r = OutletRating::from_survey("Bild", 5.2).unwrap();
        assert!((r.scaled_label - 0.4).abs() < 1e-12);
        assert_eq!(OutletRating::from_survey("X", 4.0).unwrap().scaled_label, 0.0);
        assert_eq!(OutletRating::from_survey("X", 1.0).unwrap().scaled_label, -1.0);
        assert_eq!(OutletRating::from_survey("X", 7.0).unwrap().scaled_label, 1.0);
        assert!(OutletRating::from_survey("X", 0.9).is_err());
        assert!(OutletRating::from_survey("X", 7.1).is_err());
    }

    #[test]
    fn score_normalizes_angle() {
        let s = Score::from_angle_deg(-29.851);
        assert!((s.value - s.angle_deg / 90.0).abs() < 1e-12);
    }
}
