//! Auto-labeling (statement, party, stance) rows from parliamentary
//! protocols.
//!
//! Stenographic minutes record, alongside each speech, who interrupted it
//! and how (applause, heckling, objections, laughter, questions). Mapping
//! interruption kinds to agreement or disagreement turns each interruption
//! into a labeled training row for the interrupting party; speeches nobody
//! reacted to yield nothing.
//!
//! # Protocol file format
//!
//! Line-oriented plain text:
//!
//! ```text
//! SPEECH <speech-id> | <speaker name> | <party or ->
//! Body text, any number of lines.
//! (APPLAUSE: SPD, B90)
//! More body text.
//! ```
//!
//! - A `SPEECH` header starts a new speech; the third field is the speaker's
//!   party or `-` when unknown.
//! - A line wrapped in parentheses containing `KIND: parties` is an
//!   interruption annotation. Known kinds are APPLAUSE, HECKLE, OBJECTION,
//!   LAUGHTER and QUESTION (case-insensitive); anything else is kept as-is
//!   under `Other`.
//! - Every other non-blank line is body text; a speech must have at least
//!   one body line.

use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::party::{PartyId, PartyRegistry};

#[derive(Debug, Error, PartialEq)]
pub enum AutolabelError {
    #[error("line {line}: {reason}")]
    MalformedProtocol { line: u64, reason: String },
    #[error("read error: {0}")]
    Read(String),
}

fn malformed(line: u64, reason: impl Into<String>) -> AutolabelError {
    AutolabelError::MalformedProtocol {
        line,
        reason: reason.into(),
    }
}

/// What kind of reaction interrupted a speech.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InterruptionKind {
    Applause,
    Heckle,
    Objection,
    Laughter,
    Question,
    Other(String),
}

impl InterruptionKind {
    fn from_keyword(keyword: &str) -> Self {
        match keyword.to_uppercase().as_str() {
            "APPLAUSE" => Self::Applause,
            "HECKLE" => Self::Heckle,
            "OBJECTION" => Self::Objection,
            "LAUGHTER" => Self::Laughter,
            "QUESTION" => Self::Question,
            _ => Self::Other(keyword.to_string()),
        }
    }
}

/// One annotated interruption: the kind, the reacting parties, and the
/// original annotation text.
#[derive(Debug, Clone, PartialEq)]
pub struct InterruptionEvent {
    pub kind: InterruptionKind,
    pub parties: Vec<PartyId>,
    pub raw: String,
}

/// One speech with its inline interruption annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeechRecord {
    pub speech_id: String,
    pub speaker: String,
    pub speaker_party: Option<PartyId>,
    pub text: String,
    pub interruptions: Vec<InterruptionEvent>,
}

/// Agreement polarity of a labeled row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelStance {
    Agree,
    Disagree,
}

/// One auto-labeled training row. A speech applauded by two parties yields
/// two rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledStatement {
    pub text: String,
    pub party: PartyId,
    pub stance: LabelStance,
}

/// Which interruption kinds produce labels, and whether reactions from the
/// speaker's own party are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRules {
    pub applause: Option<LabelStance>,
    pub heckle: Option<LabelStance>,
    pub objection: Option<LabelStance>,
    pub laughter: Option<LabelStance>,
    pub question: Option<LabelStance>,
    pub other: Option<LabelStance>,
    /// Skip events from the speaker's own party; self-applause says nothing
    /// about inter-party stance.
    pub exclude_self_party: bool,
}

impl Default for ExtractionRules {
    /// Applause agrees, heckling and objections disagree; laughter and
    /// questions are sentiment-ambiguous in parliamentary settings and are
    /// unmapped by default.
    fn default() -> Self {
        Self {
            applause: Some(LabelStance::Agree),
            heckle: Some(LabelStance::Disagree),
            objection: Some(LabelStance::Disagree),
            laughter: None,
            question: None,
            other: None,
            exclude_self_party: true,
        }
    }
}

impl ExtractionRules {
    fn stance_for(&self, kind: &InterruptionKind) -> Option<LabelStance> {
        match kind {
            InterruptionKind::Applause => self.applause,
            InterruptionKind::Heckle => self.heckle,
            InterruptionKind::Objection => self.objection,
            InterruptionKind::Laughter => self.laughter,
            InterruptionKind::Question => self.question,
            InterruptionKind::Other(_) => self.other,
        }
    }
}

/// Parse one protocol file. Body lines are joined with single spaces.
pub fn parse_protocol(
    input: impl BufRead,
    registry: &Arc<PartyRegistry>,
) -> Result<Vec<SpeechRecord>, AutolabelError> {
    struct Partial {
        speech_id: String,
        speaker: String,
        speaker_party: Option<PartyId>,
        body: Vec<String>,
        interruptions: Vec<InterruptionEvent>,
        header_line: u64,
    }

    let mut speeches = Vec::new();
    let mut current: Option<Partial> = None;

    let finish = |p: Partial| -> Result<SpeechRecord, AutolabelError> {
        if p.body.is_empty() {
            return Err(malformed(
                p.header_line,
                format!("speech '{}' has no body text", p.speech_id),
            ));
        }
        Ok(SpeechRecord {
            speech_id: p.speech_id,
            speaker: p.speaker,
            speaker_party: p.speaker_party,
            text: p.body.join(" "),
            interruptions: p.interruptions,
        })
    };

    let mut line_no = 0u64;
    for line in input.lines() {
        line_no += 1;
        let line = line.map_err(|e| AutolabelError::Read(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("SPEECH ") {
            if let Some(p) = current.take() {
                speeches.push(finish(p)?);
            }
            let fields: Vec<&str> = rest.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(malformed(
                    line_no,
                    format!(
                        "speech header needs 'SPEECH id | speaker | party', got {} field(s)",
                        fields.len()
                    ),
                ));
            }
            if fields[0].is_empty() {
                return Err(malformed(line_no, "speech id must be non-empty"));
            }
            let speaker_party = match fields[2] {
                "-" | "" => None,
                name => Some(registry.id(name).ok_or_else(|| {
                    malformed(line_no, format!("unknown speaker party '{name}'"))
                })?),
            };
            current = Some(Partial {
                speech_id: fields[0].to_string(),
                speaker: fields[1].to_string(),
                speaker_party,
                body: Vec::new(),
                interruptions: Vec::new(),
                header_line: line_no,
            });
            continue;
        }

        let Some(p) = current.as_mut() else {
            return Err(malformed(line_no, "content before the first SPEECH header"));
        };

        if trimmed.starts_with('(') && trimmed.ends_with(')') {
            let inner = &trimmed[1..trimmed.len() - 1];
            let Some((keyword, party_list)) = inner.split_once(':') else {
                return Err(malformed(
                    line_no,
                    "annotation needs the form '(KIND: Party, Party)'",
                ));
            };
            let mut parties = Vec::new();
            for name in party_list.split(',') {
                let name = name.trim();
                if name.is_empty() {
                    continue;
                }
                parties.push(registry.id(name).ok_or_else(|| {
                    malformed(line_no, format!("unknown party '{name}' in annotation"))
                })?);
            }
            if parties.is_empty() {
                return Err(malformed(line_no, "annotation lists no parties"));
            }
            p.interruptions.push(InterruptionEvent {
                kind: InterruptionKind::from_keyword(keyword.trim()),
                parties,
                raw: trimmed.to_string(),
            });
        } else {
            p.body.push(trimmed.to_string());
        }
    }

    if let Some(p) = current.take() {
        speeches.push(finish(p)?);
    }
    Ok(speeches)
}

/// Apply the rule table: each mapped event yields one row per interrupting
/// party (minus the speaker's own party when so configured). Speeches
/// without interruptions yield nothing. Deterministic and order-preserving.
pub fn extract_sentiments(
    records: &[SpeechRecord],
    rules: &ExtractionRules,
) -> Vec<LabeledStatement> {
    let mut rows = Vec::new();
    for speech in records {
        for event in &speech.interruptions {
            let Some(stance) = rules.stance_for(&event.kind) else {
                continue;
            };
            for &party in &event.parties {
                if rules.exclude_self_party && Some(party) == speech.speaker_party {
                    continue;
                }
                rows.push(LabeledStatement {
                    text: speech.text.clone(),
                    party,
                    stance,
                });
            }
        }
    }
    rows
}

/// Keep only agreement rows, order preserved.
pub fn filter_positive(rows: Vec<LabeledStatement>) -> Vec<LabeledStatement> {
    rows.into_iter()
        .filter(|r| r.stance == LabelStance::Agree)
        .collect()
}
