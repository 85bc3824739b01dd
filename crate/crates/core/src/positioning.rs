//! Placing parties on the left-right semicircle from pairwise agreement
//! distances.
//!
//! Three anchor parties are pinned: the extreme-left anchor at -90°, the
//! centrist anchor at 0°, and the extreme-right anchor at +90°. Every other
//! party is placed between its side's extreme anchor and the center anchor
//! according to its relative agreement distance to the two.
//!
//! Distance per statement pair: 0 for identical answers, 0.5 when exactly one
//! side is neutral, 1 for opposed answers. Statements where either party has
//! no recorded stance are excluded (pairwise-complete counting).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::party::{PartyId, PartyRegistry, Stance, StanceMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum PositioningError {
    #[error("parties '{a}' and '{b}' share no answered statements")]
    NoOverlap { a: String, b: String },
    #[error("degenerate distances (extreme {d_extreme}, center {d_center}): need non-negative values with a positive sum")]
    DegenerateDistances { d_extreme: f64, d_center: f64 },
    #[error("pairwise distance needs two distinct parties")]
    SameParty,
    #[error("agreement counts sum to zero")]
    EmptyCounts,
    #[error("angle {0} is outside [-90, 90] degrees")]
    AngleOutOfRange(f64),
    #[error("party '{0}' has neither an anchor role nor a placement entry")]
    MissingPlacement(String),
    #[error("vector set construction: {0}")]
    Inconsistent(String),
}

/// Tallies of shared statements between two parties, split by how the
/// answers relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementDistance {
    /// Statements answered identically.
    pub identical: u64,
    /// Statements where exactly one party was neutral.
    pub partial: u64,
    /// Statements answered with opposite stances.
    pub opposed: u64,
}

impl AgreementDistance {
    pub fn from_counts(identical: u64, partial: u64, opposed: u64) -> Result<Self, PositioningError> {
        if identical + partial + opposed == 0 {
            return Err(PositioningError::EmptyCounts);
        }
        Ok(Self {
            identical,
            partial,
            opposed,
        })
    }

    pub fn total(&self) -> u64 {
        self.identical + self.partial + self.opposed
    }

    /// `(0.5 * partial + opposed) / total`, in `[0, 1]`.
    pub fn distance(&self) -> f64 {
        (0.5 * self.partial as f64 + self.opposed as f64) / self.total() as f64
    }
}

/// Agreement distance between two parties over the statements both answered.
pub fn pairwise_distance(
    matrix: &StanceMatrix,
    a: PartyId,
    b: PartyId,
) -> Result<AgreementDistance, PositioningError> {
    if a == b {
        return Err(PositioningError::SameParty);
    }
    let (mut identical, mut partial, mut opposed) = (0u64, 0u64, 0u64);
    for s in 0..matrix.n_statements() {
        tally(matrix.stance(s, a), matrix.stance(s, b), &mut identical, &mut partial, &mut opposed);
    }
    AgreementDistance::from_counts(identical, partial, opposed).map_err(|_| {
        PositioningError::NoOverlap {
            a: matrix.registry().name(a).to_string(),
            b: matrix.registry().name(b).to_string(),
        }
    })
}

fn tally(sa: Stance, sb: Stance, identical: &mut u64, partial: &mut u64, opposed: &mut u64) {
    let (Some(va), Some(vb)) = (sa.numeric(), sb.numeric()) else {
        return;
    };
    if va == vb {
        *identical += 1;
    } else if va == 0.0 || vb == 0.0 {
        *partial += 1;
    } else {
        *opposed += 1;
    }
}

/// Which half of the semicircle a party is placed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// The side's full swing in degrees: -90 for left, +90 for right.
    pub fn phi_deg(self) -> f64 {
        match self {
            Side::Left => -90.0,
            Side::Right => 90.0,
        }
    }
}

/// Angle of a party relative to its side's extreme anchor and the center
/// anchor: `phi * d_center / (d_center + d_extreme)`.
///
/// The distance to the *center* anchor sits in the numerator: a party far
/// from the center and close to the extreme lands near the extreme. With
/// `d_center = 0` the party coincides with the center anchor (0°).
pub fn relative_angle(
    d_to_extreme: f64,
    d_to_center: f64,
    side: Side,
) -> Result<f64, PositioningError> {
    let sum = d_to_extreme + d_to_center;
    if d_to_extreme < 0.0 || d_to_center < 0.0 || sum <= 0.0 || !sum.is_finite() {
        return Err(PositioningError::DegenerateDistances {
            d_extreme: d_to_extreme,
            d_center: d_to_center,
        });
    }
    Ok(side.phi_deg() * d_to_center / sum)
}

/// Unit vector `(sin theta, cos theta)` for an angle in degrees.
///
/// The x component is the left-right axis (negative = left), the y component
/// the centrist axis.
pub fn unit_vector(theta_deg: f64) -> (f64, f64) {
    let rad = theta_deg.to_radians();
    (rad.sin(), rad.cos())
}

/// How a vector set was produced. Survey-derived sets carry exact unit
/// vectors; optimized sets may have displaced, non-unit endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    WahlomatDerived,
    Optimized,
    Manual,
}

/// Per-party angles and vectors; the calibration used by the projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyVectorSet {
    registry: Arc<PartyRegistry>,
    angles_deg: Vec<f64>,
    vectors: Vec<(f64, f64)>,
    provenance: Provenance,
}

impl PartyVectorSet {
    /// Build from angles alone; vectors are the exact unit vectors.
    pub fn from_angles(
        registry: Arc<PartyRegistry>,
        angles_deg: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self, PositioningError> {
        if angles_deg.len() != registry.len() {
            return Err(PositioningError::Inconsistent(format!(
                "{} angles for {} parties",
                angles_deg.len(),
                registry.len()
            )));
        }
        for &a in &angles_deg {
            if !(-90.0..=90.0).contains(&a) {
                return Err(PositioningError::AngleOutOfRange(a));
            }
        }
        let vectors = angles_deg.iter().map(|&a| unit_vector(a)).collect();
        Ok(Self {
            registry,
            angles_deg,
            vectors,
            provenance,
        })
    }

    /// Build from explicit vectors (e.g. loaded from a file or displaced by
    /// the optimizer). Angles must match `atan2(vx, vy)` within 1e-6 degrees;
    /// survey-derived sets must additionally be unit length within 1e-9.
    pub fn from_parts(
        registry: Arc<PartyRegistry>,
        angles_deg: Vec<f64>,
        vectors: Vec<(f64, f64)>,
        provenance: Provenance,
    ) -> Result<Self, PositioningError> {
        if angles_deg.len() != registry.len() || vectors.len() != registry.len() {
            return Err(PositioningError::Inconsistent(
                "angle/vector counts must match the registry".into(),
            ));
        }
        for (id, (&angle, &(vx, vy))) in angles_deg.iter().zip(&vectors).enumerate() {
            let name = registry.name(PartyId(id));
            if !(-90.0..=90.0).contains(&angle) {
                return Err(PositioningError::AngleOutOfRange(angle));
            }
            let derived = vx.atan2(vy).to_degrees();
            if (derived - angle).abs() > 1e-6 {
                return Err(PositioningError::Inconsistent(format!(
                    "party '{name}': theta_deg {angle} does not match atan2(vx, vy) = {derived:.8}"
                )));
            }
            if provenance == Provenance::WahlomatDerived {
                let norm = (vx * vx + vy * vy).sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(PositioningError::Inconsistent(format!(
                        "party '{name}': survey-derived vector must be unit length, got {norm}"
                    )));
                }
            }
        }
        Ok(Self {
            registry,
            angles_deg,
            vectors,
            provenance,
        })
    }

    pub fn registry(&self) -> &Arc<PartyRegistry> {
        &self.registry
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn angle_deg(&self, party: PartyId) -> f64 {
        self.angles_deg[party.index()]
    }

    pub fn vector(&self, party: PartyId) -> (f64, f64) {
        self.vectors[party.index()]
    }

    pub fn vectors(&self) -> &[(f64, f64)] {
        &self.vectors
    }

    /// Apply per-party displacements; the result carries `Optimized`
    /// provenance and angles recomputed from the displaced endpoints.
    pub fn displaced(&self, displacement: &[(f64, f64)]) -> PartyVectorSet {
        assert_eq!(displacement.len(), self.vectors.len());
        let vectors: Vec<(f64, f64)> = self
            .vectors
            .iter()
            .zip(displacement)
            .map(|(&(x, y), &(dx, dy))| (x + dx, y + dy))
            .collect();
        let angles_deg = vectors.iter().map(|&(x, y)| x.atan2(y).to_degrees()).collect();
        PartyVectorSet {
            registry: self.registry.clone(),
            angles_deg,
            vectors,
            provenance: Provenance::Optimized,
        }
    }
}

/// The three pinned reference parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchors {
    pub left: PartyId,
    pub center: PartyId,
    pub right: PartyId,
}

impl Anchors {
    pub fn contains(&self, party: PartyId) -> bool {
        party == self.left || party == self.center || party == self.right
    }
}

/// Placement instructions for one non-anchor party: which side it belongs to
/// and which two reference parties to measure against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub side: Side,
    pub extreme: PartyId,
    pub center: PartyId,
}

/// How statements from several elections are combined into distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// All statements pooled into one count (default).
    #[default]
    Pooled,
    /// Distances computed per election tag, then averaged with equal weight.
    /// Untagged statements form their own group; elections where a pair has
    /// no overlap are skipped for that pair.
    PerElection,
}

fn aggregated_distance(
    matrix: &StanceMatrix,
    a: PartyId,
    b: PartyId,
    aggregation: Aggregation,
) -> Result<f64, PositioningError> {
    match aggregation {
        Aggregation::Pooled => Ok(pairwise_distance(matrix, a, b)?.distance()),
        Aggregation::PerElection => {
            let mut groups: BTreeMap<Option<&str>, (u64, u64, u64)> = BTreeMap::new();
            for s in 0..matrix.n_statements() {
                let key = matrix.statements()[s].election.as_deref();
                let (i, p, o) = groups.entry(key).or_default();
                tally(matrix.stance(s, a), matrix.stance(s, b), i, p, o);
            }
            let distances: Vec<f64> = groups
                .values()
                .filter(|(i, p, o)| i + p + o > 0)
                .map(|&(i, p, o)| AgreementDistance {
                    identical: i,
                    partial: p,
                    opposed: o,
                }
                .distance())
                .collect();
            if distances.is_empty() {
                return Err(PositioningError::NoOverlap {
                    a: matrix.registry().name(a).to_string(),
                    b: matrix.registry().name(b).to_string(),
                });
            }
            Ok(distances.iter().sum::<f64>() / distances.len() as f64)
        }
    }
}

/// Pin the anchors at -90°/0°/+90° and place every other party via its
/// agreement distances to its side's extreme anchor and the center anchor.
pub fn build_vector_set(
    matrix: &StanceMatrix,
    anchors: &Anchors,
    placements: &BTreeMap<PartyId, Placement>,
    aggregation: Aggregation,
) -> Result<PartyVectorSet, PositioningError> {
    let registry = matrix.registry().clone();
    let mut angles = vec![0.0; registry.len()];
    angles[anchors.left.index()] = -90.0;
    angles[anchors.center.index()] = 0.0;
    angles[anchors.right.index()] = 90.0;

    for party in registry.ids() {
        if anchors.contains(party) {
            continue;
        }
        let placement = placements
            .get(&party)
            .ok_or_else(|| PositioningError::MissingPlacement(registry.name(party).to_string()))?;
        let d_extreme = aggregated_distance(matrix, party, placement.extreme, aggregation)?;
        let d_center = aggregated_distance(matrix, party, placement.center, aggregation)?;
        angles[party.index()] = relative_angle(d_extreme, d_center, placement.side)?;
    }

    PartyVectorSet::from_angles(registry, angles, Provenance::WahlomatDerived)
}

/// The shipped default: Linke/FDP/AfD anchors, B90 and SPD on the left,
/// CDU on the right. Available when the registry contains all six names.
pub fn german_default_layout(
    registry: &PartyRegistry,
) -> Option<(Anchors, BTreeMap<PartyId, Placement>)> {
    let linke = registry.id("Linke")?;
    let fdp = registry.id("FDP")?;
    let afd = registry.id("AfD")?;
    let anchors = Anchors {
        left: linke,
        center: fdp,
        right: afd,
    };
    let mut placements = BTreeMap::new();
    for name in ["B90", "SPD"] {
        placements.insert(
            registry.id(name)?,
            Placement {
                side: Side::Left,
                extreme: linke,
                center: fdp,
            },
        );
    }
    placements.insert(
        registry.id("CDU")?,
        Placement {
            side: Side::Right,
            extreme: afd,
            center: fdp,
        },
    );
    Some((anchors, placements))
}
