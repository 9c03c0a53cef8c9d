//! Salient/noisy split of decomposed interactions and report rendering.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::decompose::DecompositionResult;
use crate::error::{Error, Result};
use crate::interactions::{InteractionKind, InteractionVector};
use crate::lattice::Subset;

pub const DEFAULT_THETA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Keep `|I(S)| ≥ θ · max |I|`, ties included.
    Ratio(f64),
    /// Keep the `m` largest `|I(S)|`.
    TopK(usize),
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy::Ratio(DEFAULT_THETA)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub mask: u32,
    pub members: Vec<String>,
    pub kind: InteractionKind,
    pub effect: f64,
    /// `|effect|` over the total `|effect|` of both vectors.
    pub share: f64,
    /// The ∅ entry: a constant offset, not a collaboration between players.
    pub is_bias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptReport {
    pub concepts: Vec<Concept>,
    /// Largest `|effect|` among the discarded entries (0 if nothing was dropped).
    pub noise_floor: f64,
    pub threshold_policy: ThresholdPolicy,
    /// `Σ_salient |I| / Σ_all |I|`; 1 for an all-zero decomposition.
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Text,
    Json,
}

struct Entry {
    mask: u32,
    kind: InteractionKind,
    effect: f64,
}

// Descending |effect|, then mask, then AND before OR.
fn entry_order(a: &Entry, b: &Entry) -> Ordering {
    b.effect
        .abs()
        .partial_cmp(&a.effect.abs())
        .unwrap_or(Ordering::Equal)
        .then(a.mask.cmp(&b.mask))
        .then((a.kind == InteractionKind::Or).cmp(&(b.kind == InteractionKind::Or)))
}

fn sorted_entries(and: &InteractionVector, or: &InteractionVector) -> Vec<Entry> {
    let mut entries: Vec<Entry> = [and, or]
        .iter()
        .flat_map(|v| {
            v.effects.iter().map(move |(s, effect)| Entry {
                mask: s.0,
                kind: v.kind,
                effect,
            })
        })
        .collect();
    entries.sort_by(entry_order);
    entries
}

pub fn extract_salient(result: &DecompositionResult, players: &[String], policy: ThresholdPolicy) -> Result<ConceptReport> {
    extract_from_vectors(&result.and_hat, &result.or_hat, players, policy)
}

pub fn extract_from_vectors(
    and: &InteractionVector,
    or: &InteractionVector,
    players: &[String],
    policy: ThresholdPolicy,
) -> Result<ConceptReport> {
    if and.kind != InteractionKind::And {
        return Err(Error::KindMismatch {
            expected: InteractionKind::And,
            actual: and.kind,
        });
    }
    if or.kind != InteractionKind::Or {
        return Err(Error::KindMismatch {
            expected: InteractionKind::Or,
            actual: or.kind,
        });
    }
    let n = and.n();
    if or.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: or.n() });
    }
    if players.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: players.len(),
        });
    }
    let entries = sorted_entries(and, or);
    let keep = match policy {
        ThresholdPolicy::Ratio(theta) => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::InvalidArgument(format!("theta must lie in [0, 1], got {theta}")));
            }
            let max = entries.first().map_or(0.0, |e| e.effect.abs());
            let cut = theta * max;
            entries.iter().take_while(|e| e.effect.abs() >= cut).count()
        }
        ThresholdPolicy::TopK(m) => {
            if m > entries.len() {
                return Err(Error::InvalidArgument(format!(
                    "top_k = {m} exceeds the {} available entries",
                    entries.len()
                )));
            }
            m
        }
    };
    let total: f64 = entries.iter().map(|e| e.effect.abs()).sum();
    let kept: f64 = entries[..keep].iter().map(|e| e.effect.abs()).sum();
    let share = |x: f64| if total > 0.0 { x.abs() / total } else { 0.0 };
    let concepts = entries[..keep]
        .iter()
        .map(|e| Concept {
            mask: e.mask,
            members: Subset(e.mask).members().map(|p| players[p].clone()).collect(),
            kind: e.kind,
            effect: e.effect,
            share: share(e.effect),
            is_bias: e.mask == 0,
        })
        .collect();
    Ok(ConceptReport {
        concepts,
        noise_floor: entries.get(keep).map_or(0.0, |e| e.effect.abs()),
        threshold_policy: policy,
        coverage: if total > 0.0 { kept / total } else { 1.0 },
    })
}

impl ConceptReport {
    pub fn salient_keys(&self) -> Vec<(InteractionKind, u32)> {
        let mut keys: Vec<_> = self.concepts.iter().map(|c| (c.kind, c.mask)).collect();
        keys.sort_by_key(|&(k, m)| (m, k == InteractionKind::Or));
        keys
    }
}

fn policy_label(p: ThresholdPolicy) -> String {
    match p {
        ThresholdPolicy::Ratio(theta) => format!("ratio theta={theta}"),
        ThresholdPolicy::TopK(m) => format!("top_k m={m}"),
    }
}

pub fn render_report(report: &ConceptReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# policy: {}  coverage: {:.6}  noise_floor: {:.6e}",
                policy_label(report.threshold_policy),
                report.coverage,
                report.noise_floor
            );
            if report.concepts.is_empty() {
                s.push_str("no salient concepts\n");
            }
            for c in &report.concepts {
                let kind = if c.is_bias { format!("{}-bias", c.kind) } else { c.kind.to_string() };
                let _ = writeln!(s, "{kind} {{{}}} {:.6} {:.6}", c.members.join(","), c.effect, c.share);
            }
            s.into_bytes()
        }
    }
}

pub fn load_report(bytes: &[u8]) -> Result<ConceptReport> {
    Ok(serde_json::from_slice(bytes)?)
}

/// `rank,abs_effect` over every entry of both vectors, largest first.
pub fn plot_data_csv(and: &InteractionVector, or: &InteractionVector) -> String {
    let mut s = String::from("rank,abs_effect\n");
    for (rank, e) in sorted_entries(and, or).iter().enumerate() {
        let _ = writeln!(s, "{},{}", rank + 1, e.effect.abs());
    }
    s
}
