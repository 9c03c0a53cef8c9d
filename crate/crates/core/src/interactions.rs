//! Closed-form AND (Harsanyi dividend) and OR interactions, reconstruction,
//! and the subset-record JSON schema shared by every exported vector.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeVector, Subset};
use crate::table::{ValueTable, ORDERING};

/// Relative tolerance for identities that are exact in exact arithmetic.
pub const EXACT_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InteractionKind {
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionKind::And => "AND",
            InteractionKind::Or => "OR",
        })
    }
}

/// Interaction effects of one kind, indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionVector {
    pub kind: InteractionKind,
    pub effects: LatticeVector,
}

impl InteractionVector {
    pub fn new(kind: InteractionKind, effects: LatticeVector) -> Self {
        Self { kind, effects }
    }

    pub fn n(&self) -> usize {
        self.effects.n()
    }

    pub fn get(&self, s: Subset) -> f64 {
        self.effects.get(s)
    }

    fn expect_kind(&self, kind: InteractionKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind,
                actual: self.kind,
            });
        }
        Ok(())
    }
}

/// Harsanyi dividends `I(S) = Σ_{L⊆S} (-1)^{|S|-|L|} v(L)`.
pub fn and_interactions(vt: &ValueTable) -> Result<InteractionVector> {
    Ok(InteractionVector::new(
        InteractionKind::And,
        lattice::apply_t_and(vt.values())?,
    ))
}

/// `I(∅) = v(∅)`; for `S ≠ ∅`, `I(S) = -Σ_{L⊆S} (-1)^{|S|-|L|} v(N∖L)`.
pub fn or_interactions(vt: &ValueTable) -> Result<InteractionVector> {
    Ok(InteractionVector::new(
        InteractionKind::Or,
        lattice::apply_t_or(vt.values())?,
    ))
}

/// `Σ_{S⊆T} I(S)`.
pub fn and_reconstruct(i: &InteractionVector, t: Subset) -> Result<f64> {
    i.expect_kind(InteractionKind::And)?;
    Ok(t.subsets().map(|s| i.get(s)).sum())
}

/// `I(∅) + Σ_{S∩T≠∅} I(S)`, computed as the total minus the nonempty
/// subsets of `N∖T`.
pub fn or_reconstruct(i: &InteractionVector, t: Subset) -> Result<f64> {
    i.expect_kind(InteractionKind::Or)?;
    let total: f64 = i.effects.as_slice().iter().sum();
    let untouched: f64 = t
        .complement(i.n())
        .subsets()
        .filter(|s| !s.is_empty())
        .map(|s| i.get(s))
        .sum();
    Ok(total - untouched)
}

/// The game implied by `i` at every subset, via one zeta transform.
pub fn reconstruct_all(i: &InteractionVector) -> Result<LatticeVector> {
    match i.kind {
        InteractionKind::And => lattice::zeta_transform(&i.effects),
        InteractionKind::Or => {
            lattice::check_n(i.n())?;
            let mut data = i.effects.as_slice().to_vec();
            lattice::apply_t_or_inverse_in_place(&mut data);
            Ok(LatticeVector::from_parts(i.n(), data))
        }
    }
}

/// `max_T |v(T) - reconstruct(I, T)|`.
pub fn faithfulness_error(vt: &ValueTable, i: &InteractionVector) -> Result<f64> {
    if vt.n() != i.n() {
        return Err(Error::DimensionMismatch {
            expected: vt.n(),
            actual: i.n(),
        });
    }
    let rebuilt = reconstruct_all(i)?;
    Ok(max_abs_diff(vt.values().as_slice(), rebuilt.as_slice()))
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Label attached to an exported subset record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecordKind {
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
    #[serde(rename = "SHAPLEY")]
    Shapley,
    #[serde(rename = "SHAPLEY_INTERACTION")]
    ShapleyInteraction,
    #[serde(rename = "SHAPLEY_TAYLOR")]
    ShapleyTaylor,
}

impl From<InteractionKind> for RecordKind {
    fn from(k: InteractionKind) -> Self {
        match k {
            InteractionKind::And => RecordKind::And,
            InteractionKind::Or => RecordKind::Or,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRecord {
    pub mask: u32,
    pub members: Vec<String>,
    pub kind: RecordKind,
    pub effect: f64,
}

/// Descending `|effect|`, ties broken by ascending mask.
pub fn sort_records(records: &mut [SubsetRecord]) {
    records.sort_by(|a, b| {
        b.effect
            .abs()
            .partial_cmp(&a.effect.abs())
            .unwrap_or(Ordering::Equal)
            .then(a.mask.cmp(&b.mask))
    });
}

pub fn to_records(i: &InteractionVector, players: &[String]) -> Vec<SubsetRecord> {
    let mut records: Vec<_> = i
        .effects
        .iter()
        .map(|(s, effect)| SubsetRecord {
            mask: s.0,
            members: s.members().map(|p| players[p].clone()).collect(),
            kind: i.kind.into(),
            effect,
        })
        .collect();
    sort_records(&mut records);
    records
}

/// Rebuilds a full vector; masks missing from `records` are zero.
pub fn from_records(n: usize, kind: InteractionKind, records: &[SubsetRecord]) -> Result<InteractionVector> {
    let mut effects = LatticeVector::zeros(n)?.into_vec();
    for r in records {
        if r.kind != kind.into() {
            return Err(Error::InvalidArgument(format!(
                "record for mask {} has kind {:?}, expected {kind}",
                r.mask, r.kind
            )));
        }
        let s = Subset::checked(r.mask as u64, n)?;
        effects[s.mask()] = r.effect;
    }
    Ok(InteractionVector::new(kind, LatticeVector::new(n, effects)?))
}

/// On-disk interaction document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionDoc {
    pub format: String,
    pub version: u16,
    pub n: usize,
    pub ordering: String,
    pub source_digest: String,
    pub kind: InteractionKind,
    pub records: Vec<SubsetRecord>,
}

impl InteractionDoc {
    pub fn new(vt: &ValueTable, i: &InteractionVector) -> Self {
        Self {
            format: "interactions".into(),
            version: 1,
            n: vt.n(),
            ordering: ORDERING.into(),
            source_digest: vt.digest(),
            kind: i.kind,
            records: to_records(i, vt.players()),
        }
    }

    pub fn to_vector(&self) -> Result<InteractionVector> {
        from_records(self.n, self.kind, &self.records)
    }
}
