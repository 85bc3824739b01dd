//! Party identities, stances, and the statement × party stance matrix.
//!
//! The party set is a runtime registry (an ordered list of unique names)
//! rather than a hard-coded enum, so the toolkit can be configured for other
//! polities. The six German parties are the shipped default, in the
//! conventional left-to-right order.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a party within its [`PartyRegistry`].
///
/// Ids are only meaningful relative to the registry that issued them; all
/// aligned containers (probability vectors, vector sets, stance matrices)
/// index by this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartyId(pub(crate) usize);

impl PartyId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("party registry needs at least one party")]
    Empty,
    #[error("duplicate party name '{0}'")]
    DuplicateParty(String),
    #[error("blank party name at position {0}")]
    BlankName(usize),
}

/// Ordered list of configured parties.
///
/// The order is load-bearing: it defines probability-vector layout, argmax
/// tie-breaking (lowest index wins) and serialization order of per-party
/// maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyRegistry {
    names: Vec<String>,
}

impl PartyRegistry {
    pub fn new<I, S>(names: I) -> Result<Self, RegistryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(RegistryError::Empty);
        }
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(RegistryError::BlankName(i));
            }
            if names[..i].contains(name) {
                return Err(RegistryError::DuplicateParty(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// The six major German parties, left to right.
    pub fn german_default() -> Arc<Self> {
        Arc::new(
            Self::new(["Linke", "B90", "SPD", "FDP", "CDU", "AfD"])
                .expect("default registry is valid"),
        )
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<PartyId> {
        self.names.iter().position(|n| n == name).map(PartyId)
    }

    pub fn name(&self, id: PartyId) -> &str {
        &self.names[id.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = PartyId> + '_ {
        (0..self.names.len()).map(PartyId)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// A party's position on one statement: approval, neutral, rejection, or no
/// recorded answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    Approval,
    Neutral,
    Rejection,
    #[default]
    Absent,
}

impl Stance {
    /// Numeric coding used throughout: +1 approval, 0 neutral, -1 rejection.
    pub fn numeric(self) -> Option<f64> {
        match self {
            Stance::Approval => Some(1.0),
            Stance::Neutral => Some(0.0),
            Stance::Rejection => Some(-1.0),
            Stance::Absent => None,
        }
    }

    pub fn is_absent(self) -> bool {
        self == Stance::Absent
    }

    /// Parse the integer coding (+1/0/-1). Blank means absent.
    pub fn from_code(code: &str) -> Option<Stance> {
        match code.trim() {
            "" => Some(Stance::Absent),
            "1" | "+1" => Some(Stance::Approval),
            "0" => Some(Stance::Neutral),
            "-1" => Some(Stance::Rejection),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StanceMatrixError {
    #[error("stance matrix needs at least 2 parties, registry has {0}")]
    TooFewParties(usize),
    #[error("stance matrix needs at least 1 statement")]
    NoStatements,
    #[error("duplicate cell for statement '{statement}' and party '{party}'")]
    DuplicateCell { statement: String, party: String },
}

/// One surveyed statement; the election tag supports per-election distance
/// aggregation when statements from several elections are pooled in one
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub id: String,
    pub election: Option<String>,
}

/// Statements × parties table of ternary positions.
///
/// Cells default to [`Stance::Absent`]; pairwise computations only consider
/// statements both parties answered.
#[derive(Debug, Clone)]
pub struct StanceMatrix {
    registry: Arc<PartyRegistry>,
    statements: Vec<Statement>,
    cells: Vec<Stance>,
}

impl StanceMatrix {
    pub fn builder(registry: Arc<PartyRegistry>) -> StanceMatrixBuilder {
        StanceMatrixBuilder {
            registry,
            statements: Vec::new(),
            index: std::collections::HashMap::new(),
            cells: Vec::new(),
        }
    }

    pub fn registry(&self) -> &Arc<PartyRegistry> {
        &self.registry
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn n_statements(&self) -> usize {
        self.statements.len()
    }

    pub fn stance(&self, statement: usize, party: PartyId) -> Stance {
        self.cells[statement * self.registry.len() + party.0]
    }

    /// Stances of one party across all statements, in statement order.
    pub fn party_column(&self, party: PartyId) -> impl Iterator<Item = Stance> + '_ {
        (0..self.statements.len()).map(move |s| self.stance(s, party))
    }
}

pub struct StanceMatrixBuilder {
    registry: Arc<PartyRegistry>,
    statements: Vec<Statement>,
    index: std::collections::HashMap<String, usize>,
    cells: Vec<Stance>,
}

impl StanceMatrixBuilder {
    /// Record one (statement, party) cell. Statements are created on first
    /// mention, in input order. Setting the same cell twice is an error,
    /// even with an identical value.
    pub fn set(
        &mut self,
        statement_id: &str,
        election: Option<&str>,
        party: PartyId,
        stance: Stance,
    ) -> Result<(), StanceMatrixError> {
        let n = self.registry.len();
        let row = match self.index.get(statement_id) {
            Some(&row) => row,
            None => {
                let row = self.statements.len();
                self.index.insert(statement_id.to_string(), row);
                self.statements.push(Statement {
                    id: statement_id.to_string(),
                    election: election.map(str::to_string),
                });
                self.cells.extend(std::iter::repeat_n(Stance::Absent, n));
                row
            }
        };
        let cell = &mut self.cells[row * n + party.0];
        if !cell.is_absent() {
            return Err(StanceMatrixError::DuplicateCell {
                statement: statement_id.to_string(),
                party: self.registry.name(party).to_string(),
            });
        }
        *cell = stance;
        Ok(())
    }

    pub fn build(self) -> Result<StanceMatrix, StanceMatrixError> {
        if self.registry.len() < 2 {
            return Err(StanceMatrixError::TooFewParties(self.registry.len()));
        }
        if self.statements.is_empty() {
            return Err(StanceMatrixError::NoStatements);
        }
        Ok(StanceMatrix {
            registry: self.registry,
            statements: self.statements,
            cells: self.cells,
        })
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "party#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_rejects_duplicates() {
        let err = PartyRegistry::new(["A", "B", "A"]).unwrap_err();
        assert_eq!(err, RegistryError::DuplicateParty("A".into()));
    }

    #[test]
    fn registry_lookup_round_trips() {
        let reg = PartyRegistry::german_default();
        assert_eq!(reg.len(), 6);
        for name in ["Linke", "B90", "SPD", "FDP", "CDU", "AfD"] {
            let id = reg.id(name).unwrap();
            assert_eq!(reg.name(id), name);
        }
        assert_eq!(reg.id("CSU"), None);
    }

    #[test]
    fn stance_codes() {
        assert_eq!(Stance::from_code("1"), Some(Stance::Approval));
        assert_eq!(Stance::from_code("0"), Some(Stance::Neutral));
        assert_eq!(Stance::from_code("-1"), Some(Stance::Rejection));
        assert_eq!(Stance::from_code(""), Some(Stance::Absent));
        assert_eq!(Stance::from_code("2"), None);
        assert_eq!(Stance::Approval.numeric(), Some(1.0));
        assert_eq!(Stance::Absent.numeric(), None);
    }

    #[test]
    fn matrix_builder_fills_absent_and_rejects_duplicates() {
        let reg = PartyRegistry::german_default();
        let linke = reg.id("Linke").unwrap();
        let afd = reg.id("AfD").unwrap();
        let mut b = StanceMatrix::builder(reg.clone());
        b.set("s1", None, linke, Stance::Approval).unwrap();
        b.set("s1", None, afd, Stance::Rejection).unwrap();
        b.set("s2", Some("2021"), linke, Stance::Neutral).unwrap();
        let err = b.set("s1", None, linke, Stance::Approval).unwrap_err();
        assert!(matches!(err, StanceMatrixError::DuplicateCell { .. }));
        let m = b.build().unwrap();
        assert_eq!(m.n_statements(), 2);
        assert_eq!(m.stance(0, linke), Stance::Approval);
        assert_eq!(m.stance(1, afd), Stance::Absent);
        assert_eq!(m.statements()[1].election.as_deref(), Some("2021"));
    }

    #[test]
    fn matrix_requires_statements() {
        let reg = PartyRegistry::german_default();
        let b = StanceMatrix::builder(reg);
        assert_eq!(b.build().unwrap_err(), StanceMatrixError::NoStatements);
    }
}
