//! Outlet-level and tweet-level evaluation of a scored corpus.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::record::{ClassifiedRecord, OutletRating, Score};
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("rating {0} is outside the survey scale [1, 7]")]
    OutOfRange(f64),
    #[error("no outlet estimates carry an error value")]
    NoEstimates,
    #[error("outlet '{0}' appears more than once in the ratings")]
    DuplicateOutlet(String),
    #[error("record '{0}' has no author_party")]
    MissingAuthorParty(String),
    #[error("record '{0}' has no word_count")]
    MissingWordCount(String),
    #[error("invalid bucket spec: {0}")]
    InvalidBuckets(String),
}

/// Map a 1-7 survey rating onto `[-1, 1]` via `(x - 4) / 3`.
pub fn map_rating_1_7(x: f64) -> Result<f64, EvalError> {
    if !(1.0..=7.0).contains(&x) || !x.is_finite() {
        return Err(EvalError::OutOfRange(x));
    }
    Ok((x - 4.0) / 3.0)
}

/// A record together with its score, if it was scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRecord {
    pub record: ClassifiedRecord,
    pub score: Option<Score>,
}

impl ScoredRecord {
    /// Passing the politicalness filter requires both the threshold and an
    /// actual score (a record scored under a lower threshold may carry none).
    fn passes(&self, tau: f64) -> Option<f64> {
        if self.record.politicalness >= tau {
            self.score.map(|s| s.value)
        } else {
            None
        }
    }
}

/// Aggregate of one rated outlet: total and passing record counts, the mean
/// score of passing records, and its absolute error against the rating.
/// Outlets with no passing records are reported with `n_political = 0` and
/// no values rather than dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutletEstimate {
    pub outlet: String,
    pub n_total: u64,
    pub n_political: u64,
    pub mean_score: Option<f64>,
    pub abs_error: Option<f64>,
}

/// One estimate per rated outlet, in rating order. Records whose outlet is
/// unrated (or absent) are ignored.
pub fn estimate_outlets(
    records: &[ScoredRecord],
    ratings: &[OutletRating],
    tau: f64,
) -> Result<Vec<OutletEstimate>, EvalError> {
    for (i, r) in ratings.iter().enumerate() {
        if ratings[..i].iter().any(|q| q.outlet == r.outlet) {
            return Err(EvalError::DuplicateOutlet(r.outlet.clone()));
        }
    }
    Ok(ratings
        .iter()
        .map(|rating| {
            let mut n_total = 0u64;
            let mut n_political = 0u64;
            let mut sum = 0.0;
            for sr in records {
                if sr.record.outlet.as_deref() != Some(rating.outlet.as_str()) {
                    continue;
                }
                n_total += 1;
                if let Some(value) = sr.passes(tau) {
                    n_political += 1;
                    sum += value;
                }
            }
            let mean_score = (n_political > 0).then(|| sum / n_political as f64);
            OutletEstimate {
                outlet: rating.outlet.clone(),
                n_total,
                n_political,
                abs_error: mean_score.map(|m| (m - rating.scaled_label).abs()),
                mean_score,
            }
        })
        .collect())
}

/// Corpus-level `(mae, mse, pct)` over the estimates that carry an error
/// value; `pct = 100 * mae / 2` expresses the MAE relative to the full
/// `[-1, 1]` scale.
pub fn corpus_mae_mse(estimates: &[OutletEstimate]) -> Result<(f64, f64, f64), EvalError> {
    let errors: Vec<f64> = estimates.iter().filter_map(|e| e.abs_error).collect();
    if errors.is_empty() {
        return Err(EvalError::NoEstimates);
    }
    let n = errors.len() as f64;
    let mae = errors.iter().sum::<f64>() / n;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    Ok((mae, mse, 100.0 * mae / 2.0))
}

/// Word-count buckets partitioning `[first edge, ..)`. Bounded buckets are
/// half-open `[lo, hi)`; an optional final open bucket covers `[last edge, ..)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    edges: Vec<u64>,
    open_end: bool,
}

impl Buckets {
    pub fn new(edges: Vec<u64>, open_end: bool) -> Result<Self, EvalError> {
        let min_edges = if open_end { 1 } else { 2 };
        if edges.len() < min_edges {
            return Err(EvalError::InvalidBuckets(format!(
                "need at least {min_edges} edges"
            )));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EvalError::InvalidBuckets(
                "edges must be strictly increasing".into(),
            ));
        }
        Ok(Self { edges, open_end })
    }

    /// The shipped default: [1,10), [10,20), ..., [90,100), [100, ..).
    pub fn default_tweet_buckets() -> Self {
        let edges = std::iter::once(1)
            .chain((1..=10).map(|i| i * 10))
            .collect();
        Self {
            edges,
            open_end: true,
        }
    }

    fn count(&self) -> usize {
        self.edges.len() - 1 + usize::from(self.open_end)
    }

    fn bounds(&self, i: usize) -> (u64, Option<u64>) {
        if i + 1 < self.edges.len() {
            (self.edges[i], Some(self.edges[i + 1]))
        } else {
            (self.edges[i], None)
        }
    }

    /// Midpoint used for the length/accuracy correlation. The open last
    /// bucket uses its lower edge plus half the preceding bucket's width.
    fn midpoint(&self, i: usize) -> f64 {
        match self.bounds(i) {
            (lo, Some(hi)) => (lo + hi) as f64 / 2.0,
            (lo, None) => {
                let prev_width = if self.edges.len() >= 2 {
                    self.edges[self.edges.len() - 1] - self.edges[self.edges.len() - 2]
                } else {
                    10
                };
                lo as f64 + prev_width as f64 / 2.0
            }
        }
    }

    fn bucket_of(&self, words: u64) -> Option<usize> {
        if words < self.edges[0] {
            return None;
        }
        for i in 0..self.count() {
            match self.bounds(i) {
                (lo, Some(hi)) if words >= lo && words < hi => return Some(i),
                (lo, None) if words >= lo => return Some(i),
                _ => {}
            }
        }
        None
    }
}

/// Accuracy of party attribution within one word-count bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBucketAccuracy {
    pub bucket_lo: u64,
    /// `None` for the open-ended last bucket.
    pub bucket_hi: Option<u64>,
    pub midpoint: f64,
    pub n: u64,
    pub accuracy: f64,
}

/// Bucketed accuracies plus the Pearson correlation of bucket midpoint vs
/// accuracy. `r` is NaN (with a warning) when it is undefined, e.g. all
/// buckets share the same accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct TweetLengthReport {
    pub buckets: Vec<LengthBucketAccuracy>,
    pub r: f64,
    pub warnings: Vec<String>,
}

/// Per-bucket attribution accuracy over records with a known author party.
///
/// A record is correct iff the argmax of its party probabilities equals the
/// author party (ties break to the lowest registry index). Records shorter
/// than the first edge are ignored.
pub fn tweet_accuracy_by_length(
    records: &[ClassifiedRecord],
    buckets: &Buckets,
) -> Result<TweetLengthReport, EvalError> {
    let mut totals = vec![0u64; buckets.count()];
    let mut correct = vec![0u64; buckets.count()];
    for record in records {
        let author = record
            .author_party
            .ok_or_else(|| EvalError::MissingAuthorParty(record.record_id.clone()))?;
        let words = record
            .word_count
            .ok_or_else(|| EvalError::MissingWordCount(record.record_id.clone()))?;
        let Some(i) = buckets.bucket_of(words) else {
            continue;
        };
        totals[i] += 1;
        if record.argmax_party() == author {
            correct[i] += 1;
        }
    }

    let mut out = Vec::with_capacity(buckets.count());
    let mut warnings = Vec::new();
    let mut points = Vec::new();
    for i in 0..buckets.count() {
        let (lo, hi) = buckets.bounds(i);
        let accuracy = if totals[i] > 0 {
            correct[i] as f64 / totals[i] as f64
        } else {
            f64::NAN
        };
        if totals[i] == 0 {
            warnings.push(format!(
                "bucket [{lo}, {}) is empty and excluded from the correlation",
                hi.map_or("..".into(), |h| h.to_string())
            ));
        } else {
            points.push((buckets.midpoint(i), accuracy));
        }
        out.push(LengthBucketAccuracy {
            bucket_lo: lo,
            bucket_hi: hi,
            midpoint: buckets.midpoint(i),
            n: totals[i],
            accuracy,
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let r = match stats::pearson(&xs, &ys) {
        Ok(r) => r,
        Err(e) => {
            warnings.push(format!("length/accuracy correlation undefined: {e}"));
            f64::NAN
        }
    };
    Ok(TweetLengthReport {
        buckets: out,
        r,
        warnings,
    })
}
