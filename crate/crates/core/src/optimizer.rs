//! Refining party vectors against outlet-level ground truth.
//!
//! Minimizes the outlet MAE over per-party vector displacements, subject to
//! a Euclidean-ball constraint per party: `||delta_p||_2 <= delta_p_max`.
//! Parties with a zero bound never move; in the default profile the two
//! extreme anchors are pinned so the reachable cone of probability-weighted
//! sums keeps covering the whole scale.
//!
//! The search is a deterministic compass (pattern) search over the free
//! coordinates: try +-step along each coordinate, project candidates back
//! onto their party's ball, take the best strict improvement, halve the step
//! when nothing improves. The objective is piecewise-smooth and
//! low-dimensional (8 free coordinates in the default profile), which this
//! handles robustly without gradients and with bitwise-reproducible results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::party::{PartyId, PartyRegistry};
use crate::positioning::PartyVectorSet;
use crate::projection::{self, ProjectionError};
use crate::record::{ClassifiedRecord, OutletRating};

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("outlet '{0}' has no records passing the politicalness threshold")]
    EmptyOutlet(String),
    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),
    #[error("record '{record_id}': {source}")]
    Score {
        record_id: String,
        source: ProjectionError,
    },
    #[error("baseline vector set covers {baseline} parties, registry has {registry}")]
    RegistryMismatch { baseline: usize, registry: usize },
}

/// Politicalness threshold, per-party displacement bounds, and search
/// controls. The seed is recorded for report reproducibility; the compass
/// search itself is deterministic and does not consume randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    pub tau: f64,
    /// Displacement bound per party, aligned with the registry.
    pub delta: Vec<f64>,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iterations: u64,
    pub seed: u64,
}

impl OptimizationConfig {
    pub const DEFAULT_TAU: f64 = 0.8;
    pub const DEFAULT_DELTA: f64 = 0.25;
    pub const DEFAULT_INITIAL_STEP: f64 = 0.1;
    pub const DEFAULT_MIN_STEP: f64 = 1e-4;
    pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000;

    /// Bound `delta_default` for every party except the pinned ones, which
    /// get zero.
    pub fn with_pinned(
        registry: &PartyRegistry,
        pinned: &[PartyId],
        delta_default: f64,
        seed: u64,
    ) -> Self {
        let delta = registry
            .ids()
            .map(|id| if pinned.contains(&id) { 0.0 } else { delta_default })
            .collect();
        Self {
            tau: Self::DEFAULT_TAU,
            delta,
            initial_step: Self::DEFAULT_INITIAL_STEP,
            min_step: Self::DEFAULT_MIN_STEP,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            seed,
        }
    }

    /// Default profile for the German registry: the extreme-left and
    /// extreme-right parties are pinned, everyone else may move by 0.25.
    pub fn german_default(registry: &PartyRegistry, seed: u64) -> Option<Self> {
        let pinned = [registry.id("Linke")?, registry.id("AfD")?];
        Some(Self::with_pinned(
            registry,
            &pinned,
            Self::DEFAULT_DELTA,
            seed,
        ))
    }

    fn validate(&self, registry_len: usize) -> Result<(), OptimizeError> {
        if self.delta.len() != registry_len {
            return Err(OptimizeError::InfeasibleConfig(format!(
                "{} delta bounds for {} parties",
                self.delta.len(),
                registry_len
            )));
        }
        if let Some(d) = self.delta.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(OptimizeError::InfeasibleConfig(format!(
                "negative displacement bound {d}"
            )));
        }
        if !(self.min_step > 0.0 && self.min_step < self.initial_step) {
            return Err(OptimizeError::InfeasibleConfig(format!(
                "min_step {} must be positive and below initial_step {}",
                self.min_step, self.initial_step
            )));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(OptimizeError::InfeasibleConfig(format!(
                "tau {} outside [0, 1]",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Before/after error of one rated outlet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutletErrorPair {
    pub outlet: String,
    pub n_political: u64,
    pub abs_error_before: f64,
    pub abs_error_after: f64,
}

/// Result of a vector optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Displaced vectors with `Optimized` provenance.
    pub vectors: PartyVectorSet,
    /// Per-party displacement, aligned with the registry.
    pub displacement: Vec<(f64, f64)>,
    pub mae_before: f64,
    pub mae_after: f64,
    /// `(iteration, mae)` at the start and after every accepted move;
    /// non-increasing by construction.
    pub trace: Vec<(u64, f64)>,
    pub per_outlet: Vec<OutletErrorPair>,
}

/// Probability rows of one outlet's passing records plus its target label.
struct OutletGroup {
    outlet: String,
    label: f64,
    /// (record_id, party_probs) of records above the threshold.
    rows: Vec<(String, Vec<f64>)>,
}

fn group_by_outlet(
    records: &[ClassifiedRecord],
    ratings: &[OutletRating],
    tau: f64,
) -> Result<Vec<OutletGroup>, OptimizeError> {
    let mut groups = Vec::with_capacity(ratings.len());
    for rating in ratings {
        let rows: Vec<(String, Vec<f64>)> = records
            .iter()
            .filter(|r| {
                r.outlet.as_deref() == Some(rating.outlet.as_str()) && r.politicalness >= tau
            })
            .map(|r| (r.record_id.clone(), r.party_probs.clone()))
            .collect();
        if rows.is_empty() {
            return Err(OptimizeError::EmptyOutlet(rating.outlet.clone()));
        }
        groups.push(OutletGroup {
            outlet: rating.outlet.clone(),
            label: rating.scaled_label,
            rows,
        });
    }
    Ok(groups)
}

/// Mean absolute outlet error under the given displaced vectors.
fn objective(
    groups: &[OutletGroup],
    baseline: &PartyVectorSet,
    displacement: &[(f64, f64)],
) -> Result<f64, OptimizeError> {
    let candidate = baseline.displaced(displacement);
    let mut total = 0.0;
    for group in groups {
        let mut sum = 0.0;
        for (record_id, probs) in &group.rows {
            let score = projection::score_from_vector(projection::resultant(probs, &candidate))
                .map_err(|source| OptimizeError::Score {
                    record_id: record_id.clone(),
                    source,
                })?;
            sum += score.value;
        }
        let mean = sum / group.rows.len() as f64;
        total += (mean - group.label).abs();
    }
    Ok(total / groups.len() as f64)
}

/// Project a party displacement onto its delta-ball.
fn project(delta: (f64, f64), bound: f64) -> (f64, f64) {
    let norm = (delta.0 * delta.0 + delta.1 * delta.1).sqrt();
    if norm <= bound || norm == 0.0 {
        delta
    } else {
        (delta.0 * bound / norm, delta.1 * bound / norm)
    }
}

/// Minimize the outlet MAE over per-party displacements.
///
/// Deterministic given identical inputs and config; every evaluated iterate
/// is feasible (candidates are projected onto each party's ball before
/// scoring).
pub fn optimize_vectors(
    baseline: &PartyVectorSet,
    records: &[ClassifiedRecord],
    ratings: &[OutletRating],
    config: &OptimizationConfig,
) -> Result<OptimizationResult, OptimizeError> {
    let registry = baseline.registry();
    config.validate(registry.len())?;
    let groups = group_by_outlet(records, ratings, config.tau)?;

    let n = registry.len();
    let mut displacement = vec![(0.0, 0.0); n];
    let mut best = objective(&groups, baseline, &displacement)?;
    let mae_before = best;
    let mut trace = vec![(0u64, best)];

    // free coordinates: (party, axis) for parties that may move
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| [(p, 0), (p, 1)])
        .filter(|&(p, _)| config.delta[p] > 0.0)
        .collect();

    if !free.is_empty() {
        let mut step = config.initial_step;
        let mut iteration = 0u64;
        while step >= config.min_step && iteration < config.max_iterations {
            iteration += 1;
            let mut best_move: Option<(f64, Vec<(f64, f64)>)> = None;
            for &(p, axis) in &free {
                for sign in [1.0, -1.0] {
                    let mut candidate = displacement.clone();
                    let d = &mut candidate[p];
                    if axis == 0 {
                        d.0 += sign * step;
                    } else {
                        d.1 += sign * step;
                    }
                    *d = project(*d, config.delta[p]);
                    let value = objective(&groups, baseline, &candidate)?;
                    let improves_current = value < best;
                    let improves_best = best_move.as_ref().is_none_or(|(v, _)| value < *v);
                    if improves_current && improves_best {
                        best_move = Some((value, candidate));
                    }
                }
            }
            match best_move {
                Some((value, candidate)) => {
                    best = value;
                    displacement = candidate;
                    trace.push((iteration, best));
                }
                None => step /= 2.0,
            }
        }
    }

    let vectors = baseline.displaced(&displacement);
    let per_outlet = per_outlet_errors(&groups, baseline, &vectors)?;

    Ok(OptimizationResult {
        vectors,
        displacement,
        mae_before,
        mae_after: best,
        trace,
        per_outlet,
    })
}

fn per_outlet_errors(
    groups: &[OutletGroup],
    baseline: &PartyVectorSet,
    optimized: &PartyVectorSet,
) -> Result<Vec<OutletErrorPair>, OptimizeError> {
    let mean_for = |set: &PartyVectorSet, group: &OutletGroup| -> Result<f64, OptimizeError> {
        let mut sum = 0.0;
        for (record_id, probs) in &group.rows {
            sum += projection::score_from_vector(projection::resultant(probs, set))
                .map_err(|source| OptimizeError::Score {
                    record_id: record_id.clone(),
                    source,
                })?
                .value;
        }
        Ok(sum / group.rows.len() as f64)
    };
    groups
        .iter()
        .map(|g| {
            Ok(OutletErrorPair {
                outlet: g.outlet.clone(),
                n_political: g.rows.len() as u64,
                abs_error_before: (mean_for(baseline, g)? - g.label).abs(),
                abs_error_after: (mean_for(optimized, g)? - g.label).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::party::PartyRegistry;
    use crate::positioning::Provenance;
    use crate::record::{validate_record, RawRecord};
    use std::sync::Arc;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn table_vectors() -> PartyVectorSet {
        PartyVectorSet::from_angles(
            PartyRegistry::german_default(),
            vec![-90.0, -65.2, -53.9, 0.0, 37.9, 90.0],
            Provenance::WahlomatDerived,
        )
        .unwrap()
    }

    fn record(
        reg: &Arc<PartyRegistry>,
        id: &str,
        outlet: &str,
        politicalness: f64,
        probs: [f64; 6],
    ) -> ClassifiedRecord {
        let raw = RawRecord {
            record_id: id.into(),
            politicalness,
            party_probs: reg
                .names()
                .zip(probs)
                .map(|(n, p)| (n.to_string(), p))
                .collect(),
            outlet: Some(outlet.into()),
            author_party: None,
            word_count: None,
            timestamp: None,
        };
        validate_record(raw, reg).unwrap()
    }

    /// One outlet rated 0.4 on the scale; its only passing record has all
    /// mass on the centrist party (baseline score 0).
    fn single_outlet_fixture() -> (PartyVectorSet, Vec<ClassifiedRecord>, Vec<OutletRating>) {
        let vectors = table_vectors();
        let reg = vectors.registry().clone();
        let records = vec![
            record(&reg, "r1", "alpha", 0.95, [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
            record(&reg, "r2", "alpha", 0.10, [0.9, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ];
        let ratings = vec![OutletRating::from_survey("alpha", 4.3).unwrap()];
        (vectors, records, ratings)
    }

    #[test]
    fn all_deltas_zero_returns_baseline_bitwise() {
        let (vectors, records, ratings) = single_outlet_fixture();
        let mut config = OptimizationConfig::german_default(vectors.registry(), 7).unwrap();
        config.delta = vec![0.0; 6];
        let result = optimize_vectors(&vectors, &records, &ratings, &config).unwrap();
        assert_eq!(result.vectors.vectors(), vectors.vectors());
        assert_eq!(result.mae_before, result.mae_after);
        assert_eq!(result.displacement, vec![(0.0, 0.0); 6]);
        assert_eq!(result.trace.len(), 1);
    }

    #[test]
    fn single_outlet_mae_drops_within_ball() {
        let (vectors, records, ratings) = single_outlet_fixture();
        let config = OptimizationConfig::german_default(vectors.registry(), 7).unwrap();
        let result = optimize_vectors(&vectors, &records, &ratings, &config).unwrap();
        close(result.mae_before, 0.1, 1e-12);
        assert!(
            result.mae_after < 1e-3,
            "expected near-zero error, got {}",
            result.mae_after
        );
        for (p, d) in result.displacement.iter().enumerate() {
            let norm = (d.0 * d.0 + d.1 * d.1).sqrt();
            assert!(norm <= config.delta[p] + 1e-9, "party {p} moved {norm}");
        }
        // pinned anchors never move
        let reg = vectors.registry();
        assert_eq!(result.displacement[reg.id("Linke").unwrap().index()], (0.0, 0.0));
        assert_eq!(result.displacement[reg.id("AfD").unwrap().index()], (0.0, 0.0));
        // trace is non-increasing
        for w in result.trace.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
        assert_eq!(result.per_outlet.len(), 1);
        close(result.per_outlet[0].abs_error_before, 0.1, 1e-12);
        close(result.per_outlet[0].abs_error_after, result.mae_after, 1e-12);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let (vectors, records, ratings) = single_outlet_fixture();
        let config = OptimizationConfig::german_default(vectors.registry(), 42).unwrap();
        let a = optimize_vectors(&vectors, &records, &ratings, &config).unwrap();
        let b = optimize_vectors(&vectors, &records, &ratings, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_outlet_is_an_error() {
        let (vectors, records, _) = single_outlet_fixture();
        let ratings = vec![OutletRating::from_survey("ghost", 4.0).unwrap()];
        let config = OptimizationConfig::german_default(vectors.registry(), 7).unwrap();
        assert_eq!(
            optimize_vectors(&vectors, &records, &ratings, &config).unwrap_err(),
            OptimizeError::EmptyOutlet("ghost".into())
        );
    }

    #[test]
    fn negative_delta_rejected() {
        let (vectors, records, ratings) = single_outlet_fixture();
        let mut config = OptimizationConfig::german_default(vectors.registry(), 7).unwrap();
        config.delta[2] = -0.1;
        assert!(matches!(
            optimize_vectors(&vectors, &records, &ratings, &config).unwrap_err(),
            OptimizeError::InfeasibleConfig(_)
        ));
        let mut config = OptimizationConfig::german_default(vectors.registry(), 7).unwrap();
        config.min_step = config.initial_step;
        assert!(matches!(
            optimize_vectors(&vectors, &records, &ratings, &config).unwrap_err(),
            OptimizeError::InfeasibleConfig(_)
        ));
    }

    #[test]
    fn projection_clips_to_ball() {
        assert_eq!(project((0.1, 0.0), 0.25), (0.1, 0.0));
        let (x, y) = project((0.3, 0.4), 0.25);
        close((x * x + y * y).sqrt(), 0.25, 1e-12);
        close(y / x, 0.4 / 0.3, 1e-12);
    }

    #[test]
    fn zero_signal_record_surfaces_as_score_error() {
        // exact axis vectors so that the two extremes cancel bitwise
        let reg = PartyRegistry::german_default();
        let vectors = PartyVectorSet::from_parts(
            reg.clone(),
            vec![-90.0, -65.2, -53.9, 0.0, 37.9, 90.0],
            vec![
                (-1.0, 0.0),
                crate::positioning::unit_vector(-65.2),
                crate::positioning::unit_vector(-53.9),
                (0.0, 1.0),
                crate::positioning::unit_vector(37.9),
                (1.0, 0.0),
            ],
            Provenance::WahlomatDerived,
        )
        .unwrap();
        // equal mass on the two opposed extremes cancels exactly
        let records = vec![record(&reg, "r1", "alpha", 0.95, [1.0, 0.0, 0.0, 0.0, 0.0, 1.0])];
        let ratings = vec![OutletRating::from_survey("alpha", 4.0).unwrap()];
        let config = OptimizationConfig::german_default(&reg, 7).unwrap();
        assert!(matches!(
            optimize_vectors(&vectors, &records, &ratings, &config).unwrap_err(),
            OptimizeError::Score { .. }
        ));
    }
}
