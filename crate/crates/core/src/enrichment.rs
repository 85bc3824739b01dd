//! Paraphrase-provider interface and the embedding-similarity gate for
//! enriched training data.
//!
//! Corpora are enriched by paraphrasing each statement in several voices.
//! To check that paraphrasing did not drift away from the originals, both
//! sides are embedded and the per-pair cosine similarities are summarized;
//! the gate passes when the 5th percentile stays above a threshold.
//! Generation and embedding models live behind external interfaces — this
//! module only defines the provider contract and the pure similarity math.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnrichmentError {
    #[error("vector {which} has zero norm")]
    ZeroNorm { which: &'static str },
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("similarity gate needs aligned lists: {0} originals vs {1} paraphrases")]
    LengthMismatch(usize, usize),
    #[error("similarity gate needs at least one pair")]
    Empty,
}

/// The five built-in paraphrasing voices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persona {
    Child,
    Teenager,
    Adult,
    Eloquent,
    Tweet,
}

impl Persona {
    pub const ALL: [Persona; 5] = [
        Persona::Child,
        Persona::Teenager,
        Persona::Adult,
        Persona::Eloquent,
        Persona::Tweet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Persona::Child => "child",
            Persona::Teenager => "teenager",
            Persona::Adult => "adult",
            Persona::Eloquent => "eloquent",
            Persona::Tweet => "tweet",
        }
    }
}

/// `u . v / (||u|| ||v||)`, in `[-1, 1]`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, EnrichmentError> {
    if u.len() != v.len() {
        return Err(EnrichmentError::DimensionMismatch(u.len(), v.len()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 {
        return Err(EnrichmentError::ZeroNorm { which: "left" });
    }
    if nv == 0.0 {
        return Err(EnrichmentError::ZeroNorm { which: "right" });
    }
    Ok(dot / (nu * nv))
}

/// Quantile by linear interpolation between closest ranks (the common
/// "type 7" definition): with sorted values `v[0..n]`, the q-quantile is
/// `v[floor(h)] + frac(h) * (v[floor(h)+1] - v[floor(h)])` for
/// `h = (n - 1) * q`.
fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

/// Summary of original/paraphrase cosine similarities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub n: usize,
    pub mean: f64,
    /// 5th percentile of the per-pair similarities (type-7 interpolation).
    pub p05: f64,
    /// Whether `p05 >= threshold`.
    pub pass: bool,
}

pub const DEFAULT_GATE_THRESHOLD: f64 = 0.5;

/// Compare aligned embedding lists pairwise and gate on the 5th percentile.
pub fn similarity_gate(
    originals: &[Vec<f64>],
    paraphrases: &[Vec<f64>],
    threshold: f64,
) -> Result<SimilarityReport, EnrichmentError> {
    if originals.len() != paraphrases.len() {
        return Err(EnrichmentError::LengthMismatch(
            originals.len(),
            paraphrases.len(),
        ));
    }
    if originals.is_empty() {
        return Err(EnrichmentError::Empty);
    }
    let mut sims = Vec::with_capacity(originals.len());
    for (u, v) in originals.iter().zip(paraphrases) {
        sims.push(cosine_similarity(u, v)?);
    }
    let mean = sims.iter().sum::<f64>() / sims.len() as f64;
    let mut sorted = sims;
    sorted.sort_by(f64::total_cmp);
    let p05 = quantile_type7(&sorted, 0.05);
    Ok(SimilarityReport {
        n: sorted.len(),
        mean,
        p05,
        pass: p05 >= threshold,
    })
}

#[derive(Debug, Error, PartialEq)]
pub enum ProviderError {
    #[error("paraphrase provider unavailable: {0}")]
    Unavailable(String),
    #[error("paraphrase provider rate-limited{}", retry_after_secs.map(|s| format!(" (retry after {s}s)")).unwrap_or_default())]
    RateLimited { retry_after_secs: Option<u64> },
    #[error("paraphrase provider returned an empty paraphrase")]
    EmptyResponse,
}

/// A text-generation backend that rewrites a statement in a given voice.
/// Implementations must never return silent empties; transport failures
/// surface as [`ProviderError`].
pub trait ParaphraseProvider {
    fn generate(&self, text: &str, persona: Persona) -> Result<String, ProviderError>;
}

/// Paraphrase one text, enforcing the non-empty contract on whatever the
/// provider returns.
pub fn paraphrase(
    provider: &dyn ParaphraseProvider,
    text: &str,
    persona: Persona,
) -> Result<String, ProviderError> {
    let out = provider.generate(text, persona)?;
    if out.trim().is_empty() {
        return Err(ProviderError::EmptyResponse);
    }
    Ok(out)
}

/// Deterministic offline provider: prefixes the text with the persona tag.
#[derive(Debug, Default, Clone, Copy)]
pub struct MockProvider;

impl ParaphraseProvider for MockProvider {
    fn generate(&self, text: &str, persona: Persona) -> Result<String, ProviderError> {
        Ok(format!("[{}] {text}", persona.as_str()))
    }
}

/// Paraphrase a labeled row's text; the party and stance carry over
/// verbatim, since a faithful rephrasing keeps the original's position.
pub fn enrich_statement(
    provider: &dyn ParaphraseProvider,
    row: &crate::autolabel::LabeledStatement,
    persona: Persona,
) -> Result<crate::autolabel::LabeledStatement, ProviderError> {
    Ok(crate::autolabel::LabeledStatement {
        text: paraphrase(provider, &row.text, persona)?,
        party: row.party,
        stance: row.stance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn cosine_basics() {
        let u = [1.0, 2.0, 3.0];
        close(cosine_similarity(&u, &u).unwrap(), 1.0, 1e-12);
        close(
            cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            0.0,
            1e-12,
        );
        // hand arithmetic: 32 / (sqrt(14) * sqrt(77))
        close(
            cosine_similarity(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(),
            0.9746318461970762,
            1e-12,
        );
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).unwrap_err(),
            EnrichmentError::ZeroNorm { which: "left" }
        );
        assert_eq!(
            cosine_similarity(&[1.0], &[1.0, 2.0]).unwrap_err(),
            EnrichmentError::DimensionMismatch(1, 2)
        );
    }

    #[test]
    fn cosine_scale_invariance_and_symmetry() {
        let u = [0.3, -0.2, 0.9];
        let v = [1.1, 0.4, -0.5];
        let base = cosine_similarity(&u, &v).unwrap();
        let ku: Vec<f64> = u.iter().map(|x| x * 7.5).collect();
        close(cosine_similarity(&ku, &v).unwrap(), base, 1e-12);
        close(cosine_similarity(&v, &u).unwrap(), base, 1e-12);
    }

    /// 20 evenly spaced similarities from 0.5 to 0.97: h = 19 * 0.05 = 0.95,
    /// so p05 = v[0] + 0.95 * (v[1] - v[0]) = 0.5235.
    #[test]
    #[allow(clippy::approx_constant)] // 0.5235 is the interpolated quantile, not pi/6
    fn gate_percentile_matches_interpolated_quantile() {
        let n = 20;
        let originals: Vec<Vec<f64>> = (0..n).map(|_| vec![1.0, 0.0]).collect();
        let paraphrases: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let sim = 0.5 + (0.97 - 0.5) * i as f64 / (n - 1) as f64;
                // vector at the angle that produces exactly this cosine
                let angle = sim.acos();
                vec![angle.cos(), angle.sin()]
            })
            .collect();
        let report = similarity_gate(&originals, &paraphrases, 0.5).unwrap();
        assert_eq!(report.n, 20);
        close(report.p05, 0.5235, 1e-9);
        close(report.mean, 0.735, 1e-9);
        assert!(report.pass);
        // permutation invariance
        let mut ro: Vec<Vec<f64>> = originals.clone();
        let mut rp: Vec<Vec<f64>> = paraphrases.clone();
        ro.reverse();
        rp.reverse();
        let reversed = similarity_gate(&ro, &rp, 0.5).unwrap();
        close(reversed.p05, report.p05, 1e-12);
        close(reversed.mean, report.mean, 1e-12);
    }

    /// A sample with the published summary statistics (mean 0.74, 5th
    /// percentile 0.54) passes the default 0.5 gate. 21 values: with
    /// h = 20 * 0.05 = 1, the percentile is exactly the second-smallest.
    #[test]
    fn gate_passes_published_summary_statistics() {
        let mut sims = vec![0.50, 0.54];
        sims.extend(std::iter::repeat_n((21.0 * 0.74 - 1.04) / 19.0, 19));
        let originals: Vec<Vec<f64>> = sims.iter().map(|_| vec![1.0, 0.0]).collect();
        let paraphrases: Vec<Vec<f64>> = sims
            .iter()
            .map(|s: &f64| {
                let angle = s.acos();
                vec![angle.cos(), angle.sin()]
            })
            .collect();
        let report = similarity_gate(&originals, &paraphrases, DEFAULT_GATE_THRESHOLD).unwrap();
        close(report.mean, 0.74, 1e-9);
        close(report.p05, 0.54, 1e-9);
        assert!(report.pass);
    }

    #[test]
    fn gate_identical_pairs_pass() {
        let vecs: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64 + 1.0, 2.0]).collect();
        let report = similarity_gate(&vecs, &vecs, 0.5).unwrap();
        close(report.mean, 1.0, 1e-12);
        close(report.p05, 1.0, 1e-12);
        assert!(report.pass);
    }

    #[test]
    fn gate_threshold_boundary() {
        // single pair at exactly the threshold passes (p05 >= threshold)
        let report = similarity_gate(&[vec![1.0, 0.0]], &[vec![0.5, 0.75f64.sqrt()]], 0.5).unwrap();
        close(report.p05, 0.5, 1e-12);
        assert!(report.pass);
        let report = similarity_gate(&[vec![1.0, 0.0]], &[vec![0.4, 0.84f64.sqrt()]], 0.5).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn gate_input_validation() {
        assert_eq!(
            similarity_gate(&[], &[], 0.5).unwrap_err(),
            EnrichmentError::Empty
        );
        assert_eq!(
            similarity_gate(&[vec![1.0]], &[], 0.5).unwrap_err(),
            EnrichmentError::LengthMismatch(1, 0)
        );
    }

    #[test]
    fn mock_provider_contract() {
        let p = MockProvider;
        assert_eq!(
            paraphrase(&p, "Tax wealth.", Persona::Child).unwrap(),
            "[child] Tax wealth."
        );
        // five distinct non-empty renderings
        let outs: std::collections::HashSet<String> = Persona::ALL
            .iter()
            .map(|&persona| paraphrase(&p, "Tax wealth.", persona).unwrap())
            .collect();
        assert_eq!(outs.len(), 5);
    }

    struct EmptyProvider;
    impl ParaphraseProvider for EmptyProvider {
        fn generate(&self, _: &str, _: Persona) -> Result<String, ProviderError> {
            Ok("   ".into())
        }
    }

    struct DownProvider;
    impl ParaphraseProvider for DownProvider {
        fn generate(&self, _: &str, _: Persona) -> Result<String, ProviderError> {
            Err(ProviderError::Unavailable("connection timed out".into()))
        }
    }

    #[test]
    fn provider_failures_surface() {
        assert_eq!(
            paraphrase(&EmptyProvider, "x", Persona::Adult).unwrap_err(),
            ProviderError::EmptyResponse
        );
        assert!(matches!(
            paraphrase(&DownProvider, "x", Persona::Adult).unwrap_err(),
            ProviderError::Unavailable(_)
        ));
    }

    #[test]
    fn enrichment_preserves_labels() {
        use crate::autolabel::{LabelStance, LabeledStatement};
        use crate::party::PartyRegistry;
        let registry = PartyRegistry::german_default();
        let row = LabeledStatement {
            text: "Eine Steuer soll eingefuehrt werden.".into(),
            party: registry.id("SPD").unwrap(),
            stance: LabelStance::Agree,
        };
        let enriched = enrich_statement(&MockProvider, &row, Persona::Tweet).unwrap();
        assert_eq!(enriched.party, row.party);
        assert_eq!(enriched.stance, row.stance);
        assert_eq!(enriched.text, "[tweet] Eine Steuer soll eingefuehrt werden.");
    }
}
