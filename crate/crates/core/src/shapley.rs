//! Shapley value, Shapley interaction index and Shapley-Taylor index as
//! weighted sums of Harsanyi dividends, with direct-definition oracles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::{and_interactions, RecordKind, SubsetRecord};
use crate::lattice::Subset;
use crate::table::ValueTable;

/// Per-player Shapley values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionVector {
    pub phi: Vec<f64>,
}

impl AttributionVector {
    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn total(&self) -> f64 {
        self.phi.iter().sum()
    }

    pub fn to_records(&self, players: &[String]) -> Vec<SubsetRecord> {
        self.phi
            .iter()
            .enumerate()
            .map(|(i, &effect)| SubsetRecord {
                mask: 1 << i,
                members: vec![players[i].clone()],
                kind: RecordKind::Shapley,
                effect,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    ShapleyInteraction,
    ShapleyTaylor,
}

/// Sparse table of index values keyed by subset.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTable {
    pub kind: IndexKind,
    /// Order `k`, Shapley-Taylor only.
    pub order: Option<usize>,
    pub entries: BTreeMap<Subset, f64>,
}

impl IndexTable {
    /// Missing subsets (`|T| > k` for Shapley-Taylor) read as zero.
    pub fn get(&self, t: Subset) -> f64 {
        self.entries.get(&t).copied().unwrap_or(0.0)
    }

    pub fn to_records(&self, players: &[String]) -> Vec<SubsetRecord> {
        let kind = match self.kind {
            IndexKind::ShapleyInteraction => RecordKind::ShapleyInteraction,
            IndexKind::ShapleyTaylor => RecordKind::ShapleyTaylor,
        };
        self.entries
            .iter()
            .map(|(s, &effect)| SubsetRecord {
                mask: s.0,
                members: s.members().map(|i| players[i].clone()).collect(),
                kind,
                effect,
            })
            .collect()
    }
}

/// `φ(i) = Σ_{S⊆N∖{i}} I(S ∪ {i}) / (|S| + 1)`: each dividend is split
/// evenly among its members.
pub fn shapley_values(vt: &ValueTable) -> Result<AttributionVector> {
    let h = and_interactions(vt)?.effects;
    let mut phi = vec![0.0; vt.n()];
    for (s, x) in h.iter().filter(|(s, _)| !s.is_empty()) {
        let share = x / s.len() as f64;
        for i in s.members() {
            phi[i] += share;
        }
    }
    Ok(AttributionVector { phi })
}

fn supersets(t: Subset, n: usize) -> impl Iterator<Item = Subset> {
    t.complement(n).subsets().map(move |s| Subset(s.0 | t.0))
}

/// `Σ_{S⊆N∖T} I(S ∪ T) / (|S| + 1)` for nonempty `T`.
pub fn shapley_interaction_index(vt: &ValueTable, t: Subset) -> Result<f64> {
    Subset::checked(t.0 as u64, vt.n())?;
    if t.is_empty() {
        return Err(Error::InvalidArgument("Shapley interaction index needs a nonempty subset".into()));
    }
    let h = and_interactions(vt)?.effects;
    Ok(supersets(t, vt.n())
        .map(|r| h.get(r) / (r.len() - t.len() + 1) as f64)
        .sum())
}

/// Shapley interaction index of every subset of the given size.
pub fn shapley_interaction_table(vt: &ValueTable, size: usize) -> Result<IndexTable> {
    let n = vt.n();
    if size == 0 || size > n {
        return Err(Error::InvalidArgument(format!("subset size {size} outside 1..={n}")));
    }
    let h = and_interactions(vt)?.effects;
    let entries = (0..1u32 << n)
        .map(Subset)
        .filter(|t| t.len() == size)
        .map(|t| {
            let x = supersets(t, n).map(|r| h.get(r) / (r.len() - size + 1) as f64).sum();
            (t, x)
        })
        .collect();
    Ok(IndexTable {
        kind: IndexKind::ShapleyInteraction,
        order: None,
        entries,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Order-`k` Shapley-Taylor index for every `|T| ≤ k`:
/// `I(T)` below order `k`, `Σ_{S⊆N∖T} I(S ∪ T) / C(|S|+k, k)` at order `k`.
/// `T = ∅` is included so the table sums to `v(N)`.
pub fn shapley_taylor(vt: &ValueTable, k: usize) -> Result<IndexTable> {
    let n = vt.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("order k = {k} outside 1..={n}")));
    }
    let h = and_interactions(vt)?.effects;
    let entries = (0..1u32 << n)
        .map(Subset)
        .filter(|t| t.len() <= k)
        .map(|t| {
            let x = if t.len() < k {
                h.get(t)
            } else {
                supersets(t, n).map(|r| h.get(r) / binomial(r.len(), k)).sum()
            };
            (t, x)
        })
        .collect();
    Ok(IndexTable {
        kind: IndexKind::ShapleyTaylor,
        order: Some(k),
        entries,
    })
}

/// Classical definitions evaluated straight from `v`, without dividends.
pub mod oracle {
    use itertools::Itertools;

    use super::binomial;
    use crate::error::{Error, Result};
    use crate::lattice::Subset;
    use crate::table::ValueTable;

    /// Permutation enumeration is `n!`; keep it at desk scale.
    pub const ORACLE_N_CAP: usize = 9;

    fn guard(n: usize) -> Result<()> {
        if n > ORACLE_N_CAP {
            return Err(Error::TooManyPlayers { n, cap: ORACLE_N_CAP });
        }
        Ok(())
    }

    /// Pairwise (cascade) summation.
    pub fn pairwise_sum(xs: &[f64]) -> f64 {
        match xs.len() {
            0 => 0.0,
            1..=8 => xs.iter().sum(),
            len => {
                let (a, b) = xs.split_at(len / 2);
                pairwise_sum(a) + pairwise_sum(b)
            }
        }
    }

    fn factorial(m: usize) -> f64 {
        (1..=m).fold(1.0, |acc, j| acc * j as f64)
    }

    fn sign(k: usize) -> f64 {
        if k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `Δv_T(S) = Σ_{L⊆T} (-1)^{|T|-|L|} v(S ∪ L)`.
    pub fn discrete_derivative(vt: &ValueTable, t: Subset, s: Subset) -> f64 {
        let terms: Vec<f64> = t
            .subsets()
            .map(|l| sign(t.len() - l.len()) * vt.value(Subset(s.0 | l.0)))
            .collect();
        pairwise_sum(&terms)
    }

    /// Average marginal contribution over all `n!` player orderings.
    pub fn permutation_shapley(vt: &ValueTable) -> Result<Vec<f64>> {
        let n = vt.n();
        guard(n)?;
        let mut contributions = vec![Vec::new(); n];
        for order in (0..n).permutations(n) {
            let mut coalition = Subset::EMPTY;
            for i in order {
                let next = coalition.with(i);
                contributions[i].push(vt.value(next) - vt.value(coalition));
                coalition = next;
            }
        }
        let count = factorial(n);
        Ok(contributions.iter().map(|c| pairwise_sum(c) / count).collect())
    }

    /// `Σ_{S⊆N∖T} |S|!(n-|S|-|T|)!/(n-|T|+1)! · Δv_T(S)`.
    pub fn direct_interaction_index(vt: &ValueTable, t: Subset) -> Result<f64> {
        let n = vt.n();
        guard(n)?;
        if t.is_empty() {
            return Err(Error::InvalidArgument("empty subset".into()));
        }
        let denom = factorial(n - t.len() + 1);
        let terms: Vec<f64> = t
            .complement(n)
            .subsets()
            .map(|s| {
                factorial(s.len()) * factorial(n - s.len() - t.len()) / denom * discrete_derivative(vt, t, s)
            })
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// Order-`k` Shapley-Taylor index from its defining formula:
    /// `Δv_T(∅)` for `|T| < k`, `(k/n) Σ_{S⊆N∖T} Δv_T(S) / C(n-1, |S|)` for `|T| = k`.
    pub fn direct_shapley_taylor(vt: &ValueTable, k: usize, t: Subset) -> Result<f64> {
        let n = vt.n();
        guard(n)?;
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("order k = {k} outside 1..={n}")));
        }
        Ok(match t.len() {
            len if len < k => discrete_derivative(vt, t, Subset::EMPTY),
            len if len == k => {
                let terms: Vec<f64> = t
                    .complement(n)
                    .subsets()
                    .map(|s| discrete_derivative(vt, t, s) / binomial(n - 1, s.len()))
                    .collect();
                k as f64 / n as f64 * pairwise_sum(&terms)
            }
            _ => 0.0,
        })
    }
}
