//! On-disk formats: stance CSV, ratings CSV, records/scored JSONL, vector
//! JSON, embeddings JSONL, labeled-statement CSV, and the rating-sources
//! table.
//!
//! All score-like floats are serialized with 6 decimal places; comparisons
//! belong in tests with tolerances, never string equality on floats.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use ideoscale_core::autolabel::{LabelStance, LabeledStatement};
use ideoscale_core::evaluation::ScoredRecord;
use ideoscale_core::party::{PartyId, PartyRegistry, Stance, StanceMatrix};
use ideoscale_core::positioning::{PartyVectorSet, Provenance};
use ideoscale_core::record::{validate_record, ClassifiedRecord, OutletRating, RawRecord, Score};

use crate::error::{with_path, CliError};

/// Round to 6 decimal places for report serialization.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

// ---------------------------------------------------------------------------
// stance matrix CSV: statement_id,party,stance[,election]
// ---------------------------------------------------------------------------

pub fn read_stance_csv(
    path: &Path,
    registry: &Arc<PartyRegistry>,
) -> Result<StanceMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Io(with_path(path, e)))?;
    let mut builder = StanceMatrix::builder(registry.clone());
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let row = row.map_err(|e| CliError::Validation(with_path(path, e)))?;
        if row.len() < 3 {
            return Err(CliError::validation(format!(
                "{}: row {line}: need statement_id,party,stance",
                path.display()
            )));
        }
        let statement_id = row.get(0).unwrap_or_default().trim();
        let party_name = row.get(1).unwrap_or_default().trim();
        let stance_code = row.get(2).unwrap_or_default();
        let election = row.get(3).map(str::trim).filter(|s| !s.is_empty());
        if statement_id.is_empty() {
            return Err(CliError::validation(format!(
                "{}: row {line}: empty statement_id",
                path.display()
            )));
        }
        let party = registry.id(party_name).ok_or_else(|| {
            CliError::validation(format!(
                "{}: row {line}: unknown party '{party_name}'",
                path.display()
            ))
        })?;
        let stance = Stance::from_code(stance_code).ok_or_else(|| {
            CliError::validation(format!(
                "{}: row {line}: invalid stance '{stance_code}' (expected 1, 0, -1 or blank)",
                path.display()
            ))
        })?;
        builder
            .set(statement_id, election, party, stance)
            .map_err(|e| CliError::validation(format!("{}: row {line}: {e}", path.display())))?;
    }
    builder
        .build()
        .map_err(|e| CliError::Validation(with_path(path, e)))
}

// ---------------------------------------------------------------------------
// ratings CSV: outlet,survey_rating
// ---------------------------------------------------------------------------

pub fn read_ratings_csv(path: &Path) -> Result<Vec<OutletRating>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Io(with_path(path, e)))?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| CliError::Validation(with_path(path, e)))?;
        let outlet = row.get(0).unwrap_or_default().trim();
        let rating: f64 = row
            .get(1)
            .unwrap_or_default()
            .trim()
            .parse()
            .map_err(|_| {
                CliError::validation(format!(
                    "{}: row {line}: survey_rating must be numeric",
                    path.display()
                ))
            })?;
        out.push(
            OutletRating::from_survey(outlet, rating)
                .map_err(|e| CliError::validation(format!("{}: row {line}: {e}", path.display())))?,
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// vector set JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct VectorsFile {
    provenance: Provenance,
    parties: IndexMap<String, VectorEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorEntry {
    theta_deg: f64,
    vx: f64,
    vy: f64,
}

/// The party order in the file defines the registry order.
pub fn read_vectors_json(path: &Path) -> Result<PartyVectorSet, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(with_path(path, e)))?;
    let parsed: VectorsFile = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Validation(with_path(path, e)))?;
    let registry = Arc::new(
        PartyRegistry::new(parsed.parties.keys().cloned())
            .map_err(|e| CliError::Validation(with_path(path, e)))?,
    );
    let angles = parsed.parties.values().map(|v| v.theta_deg).collect();
    let vectors = parsed.parties.values().map(|v| (v.vx, v.vy)).collect();
    PartyVectorSet::from_parts(registry, angles, vectors, parsed.provenance)
        .map_err(|e| CliError::Validation(with_path(path, e)))
}

pub fn write_vectors_json(path: &Path, set: &PartyVectorSet) -> Result<(), CliError> {
    let parties = set
        .registry()
        .ids()
        .map(|id| {
            let (vx, vy) = set.vector(id);
            (
                set.registry().name(id).to_string(),
                VectorEntry {
                    theta_deg: set.angle_deg(id),
                    vx,
                    vy,
                },
            )
        })
        .collect();
    let file = VectorsFile {
        provenance: set.provenance(),
        parties,
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json + "\n").map_err(|e| CliError::Io(with_path(path, e)))
}

// ---------------------------------------------------------------------------
// records JSONL and scored JSONL
// ---------------------------------------------------------------------------

/// One line of scorer output: the validated input record plus the scoring
/// result. `score`/`angle_deg` are present iff `filtered` is false.
#[derive(Debug, Serialize, Deserialize)]
pub struct ScoredLine {
    #[serde(flatten)]
    pub record: RawRecord,
    pub filtered: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_deg: Option<f64>,
}

impl ScoredLine {
    pub fn new(record: RawRecord, score: Option<Score>) -> Self {
        Self {
            record,
            filtered: score.is_none(),
            score: score.map(|s| round6(s.value)),
            angle_deg: score.map(|s| round6(s.angle_deg)),
        }
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(with_path(path, e)))?;
    BufReader::new(file)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Io(with_path(path, e)))
}

/// Strict reader: every non-blank line must be a valid record.
pub fn read_records_jsonl(
    path: &Path,
    registry: &Arc<PartyRegistry>,
) -> Result<Vec<ClassifiedRecord>, CliError> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), i + 1))
        })?;
        out.push(validate_record(raw, registry).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), i + 1))
        })?);
    }
    Ok(out)
}

/// Strict reader for scorer output.
pub fn read_scored_jsonl(
    path: &Path,
    registry: &Arc<PartyRegistry>,
) -> Result<Vec<ScoredRecord>, CliError> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ScoredLine = serde_json::from_str(line).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), i + 1))
        })?;
        let record = validate_record(parsed.record, registry).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), i + 1))
        })?;
        let score = match (parsed.filtered, parsed.score, parsed.angle_deg) {
            (true, _, _) => None,
            (false, Some(value), Some(angle_deg)) => Some(Score { value, angle_deg }),
            _ => {
                return Err(CliError::validation(format!(
                    "{}: line {}: unfiltered line lacks score/angle_deg",
                    path.display(),
                    i + 1
                )))
            }
        };
        out.push(ScoredRecord { record, score });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// embeddings JSONL: {"id": ..., "vector": [...]}
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct EmbeddingLine {
    pub id: String,
    pub vector: Vec<f64>,
}

pub fn read_embeddings_jsonl(path: &Path) -> Result<Vec<EmbeddingLine>, CliError> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: EmbeddingLine = serde_json::from_str(line).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), i + 1))
        })?;
        out.push(parsed);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// labeled statements CSV: text,party,stance
// ---------------------------------------------------------------------------

pub fn write_labeled_csv(
    path: &Path,
    rows: &[LabeledStatement],
    registry: &PartyRegistry,
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Io(with_path(path, e)))?;
    writer.write_record(["text", "party", "stance"])?;
    for row in rows {
        let stance = match row.stance {
            LabelStance::Agree => "agree",
            LabelStance::Disagree => "disagree",
        };
        writer.write_record([row.text.as_str(), registry.name(row.party), stance])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_labeled_csv(
    path: &Path,
    registry: &Arc<PartyRegistry>,
) -> Result<Vec<LabeledStatement>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Io(with_path(path, e)))?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| CliError::Validation(with_path(path, e)))?;
        let text = row.get(0).unwrap_or_default().to_string();
        let party_name = row.get(1).unwrap_or_default();
        let party: PartyId = registry.id(party_name).ok_or_else(|| {
            CliError::validation(format!(
                "{}: row {line}: unknown party '{party_name}'",
                path.display()
            ))
        })?;
        let stance = match row.get(2).unwrap_or_default() {
            "agree" => LabelStance::Agree,
            "disagree" => LabelStance::Disagree,
            other => {
                return Err(CliError::validation(format!(
                    "{}: row {line}: unknown stance '{other}'",
                    path.display()
                )))
            }
        };
        out.push(LabeledStatement {
            text,
            party,
            stance,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// rating-sources CSV (validity analysis):
// media,a_rating,b_x,b_y,c_label,c_rating,articles
// ---------------------------------------------------------------------------

/// One media outlet's ratings across the three ground-truth sources.
/// `articles` is the scraped article count; rows with one belong to the
/// evaluated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceRow {
    pub media: String,
    pub a_rating: Option<f64>,
    pub b_x: Option<f64>,
    pub b_y: Option<f64>,
    pub c_label: Option<String>,
    pub c_rating: Option<f64>,
    pub articles: Option<u64>,
}

impl SourceRow {
    pub fn in_sample(&self) -> bool {
        self.articles.is_some()
    }
}

pub fn read_sources_csv(path: &Path) -> Result<Vec<SourceRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Io(with_path(path, e)))?;
    let parse_f64 = |field: Option<&str>, line: usize, name: &str| -> Result<Option<f64>, CliError> {
        match field.map(str::trim).filter(|s| !s.is_empty()) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| {
                CliError::validation(format!(
                    "{}: row {line}: {name} must be numeric, got '{s}'",
                    path.display()
                ))
            }),
        }
    };
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| CliError::Validation(with_path(path, e)))?;
        let articles = match row.get(6).map(str::trim).filter(|s| !s.is_empty()) {
            None => None,
            Some(s) => Some(s.parse::<u64>().map_err(|_| {
                CliError::validation(format!(
                    "{}: row {line}: articles must be an integer, got '{s}'",
                    path.display()
                ))
            })?),
        };
        out.push(SourceRow {
            media: row.get(0).unwrap_or_default().trim().to_string(),
            a_rating: parse_f64(row.get(1), line, "a_rating")?,
            b_x: parse_f64(row.get(2), line, "b_x")?,
            b_y: parse_f64(row.get(3), line, "b_y")?,
            c_label: row
                .get(4)
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string),
            c_rating: parse_f64(row.get(5), line, "c_rating")?,
            articles,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// report helpers
// ---------------------------------------------------------------------------

/// Write pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut file = File::create(path).map_err(|e| CliError::Io(with_path(path, e)))?;
    let json = serde_json::to_string_pretty(value)?;
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
