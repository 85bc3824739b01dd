//! Core library for projecting political texts onto a continuous left-right
//! spectrum in `[-1, 1]`.
//!
//! The pipeline, end to end:
//!
//! 1. [`positioning`] derives per-party unit vectors on a semicircle from a
//!    stance matrix (survey statements × party positions), using pairwise
//!    agreement distances and three fixed anchor parties.
//! 2. [`projection`] turns a text's per-party probabilities into a scalar
//!    score: probability-weighted vector sum, then `atan2` against the
//!    vertical centrist axis, normalized by 90°.
//! 3. [`optimizer`] refines the party vectors against outlet-level ground
//!    truth under per-party displacement bounds.
//! 4. [`evaluation`] aggregates scored corpora per outlet and reports
//!    MAE/MSE, plus length-bucketed accuracy for short texts.
//! 5. [`stats`] holds the association/validity statistics used to vet the
//!    ground-truth labels (Pearson, Spearman, z-scores, two-variable PCA,
//!    paired effect sizes).
//! 6. [`autolabel`] extracts labeled training rows from parliamentary
//!    protocols via interruption events (applause, heckling, ...).
//! 7. [`enrichment`] hosts the paraphrase-provider interface and the
//!    embedding-similarity gate that validates enriched data.
//!
//! File formats and command plumbing live in the companion CLI crate; this
//! crate is pure, deterministic, and free of I/O.

pub mod autolabel;
pub mod enrichment;
pub mod evaluation;
pub mod optimizer;
pub mod party;
pub mod positioning;
pub mod projection;
pub mod record;
pub mod stats;

pub use party::{PartyId, PartyRegistry, Stance, StanceMatrix};
pub use positioning::{PartyVectorSet, Provenance, Side};
pub use record::{ClassifiedRecord, OutletRating, Score};
