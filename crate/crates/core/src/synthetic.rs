//! Ground-truth games built from planted AND/OR terms, random games, and
//! the brute-force `O(4^n)` interaction oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::{InteractionKind, InteractionVector};
use crate::lattice::{check_n, full_mask, LatticeVector, Subset};
use crate::table::ValueTable;

/// Largest `n` the brute-force oracles accept.
pub const BRUTE_FORCE_N_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTerm {
    /// Player indices.
    pub subset: Vec<usize>,
    pub effect: f64,
}

impl PlantedTerm {
    pub fn new(subset: impl IntoIterator<Item = usize>, effect: f64) -> Self {
        Self {
            subset: subset.into_iter().collect(),
            effect,
        }
    }

    pub fn mask(&self) -> Subset {
        Subset::from_members(self.subset.iter().copied())
    }
}

/// `v(T) = bias + Σ_and c·1[S ⊆ T] + Σ_or c·1[S ∩ T ≠ ∅] + noise_amp·u(T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticGameSpec {
    pub n: usize,
    #[serde(default)]
    pub and_terms: Vec<PlantedTerm>,
    #[serde(default)]
    pub or_terms: Vec<PlantedTerm>,
    #[serde(default)]
    pub bias: f64,
    #[serde(default)]
    pub noise_amp: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticGameSpec {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            and_terms: Vec::new(),
            or_terms: Vec::new(),
            bias: 0.0,
            noise_amp: 0.0,
            seed: 0,
        }
    }

    pub fn and_term(mut self, subset: impl IntoIterator<Item = usize>, effect: f64) -> Self {
        self.and_terms.push(PlantedTerm::new(subset, effect));
        self
    }

    pub fn or_term(mut self, subset: impl IntoIterator<Item = usize>, effect: f64) -> Self {
        self.or_terms.push(PlantedTerm::new(subset, effect));
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        for term in self.and_terms.iter().chain(&self.or_terms) {
            if let Some(&i) = term.subset.iter().find(|&&i| i >= self.n) {
                return Err(Error::InvalidArgument(format!("player {i} out of range for n = {}", self.n)));
            }
            if !term.effect.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite effect {}", term.effect)));
            }
        }
        if self.or_terms.iter().any(|t| t.subset.is_empty()) {
            return Err(Error::InvalidArgument("OR terms need a nonempty subset; use bias for ∅".into()));
        }
        if !(self.bias.is_finite() && self.noise_amp.is_finite() && self.noise_amp >= 0.0) {
            return Err(Error::InvalidArgument("bias and noise_amp must be finite, noise_amp ≥ 0".into()));
        }
        Ok(())
    }

    /// `|bias| + Σ |effect|`, the L1 size of the planted explanation.
    pub fn planted_l1(&self) -> f64 {
        self.bias.abs()
            + self
                .and_terms
                .iter()
                .chain(&self.or_terms)
                .map(|t| t.effect.abs())
                .sum::<f64>()
    }
}

/// Noise-free interactions of a generated game. The bias sits in the AND
/// `∅` slot; the OR `∅` slot is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub and: InteractionVector,
    pub or: InteractionVector,
}

pub fn generate_game(spec: &SyntheticGameSpec) -> Result<(ValueTable, GroundTruth)> {
    spec.validate()?;
    let n = spec.n;
    let mut and = LatticeVector::zeros(n)?.into_vec();
    let mut or = and.clone();
    and[0] = spec.bias;
    for t in &spec.and_terms {
        and[t.mask().mask()] += t.effect;
    }
    for t in &spec.or_terms {
        or[t.mask().mask()] += t.effect;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = LatticeVector::from_fn(n, |t| {
        let and_part: f64 = spec.and_terms.iter().filter(|s| s.mask().is_subset_of(t)).map(|s| s.effect).sum();
        let or_part: f64 = spec.or_terms.iter().filter(|s| s.mask().intersects(t)).map(|s| s.effect).sum();
        let u: f64 = rng.gen_range(-1.0..=1.0);
        spec.bias + and_part + or_part + spec.noise_amp * u
    })?;
    let truth = GroundTruth {
        and: InteractionVector::new(InteractionKind::And, LatticeVector::new(n, and)?),
        or: InteractionVector::new(InteractionKind::Or, LatticeVector::new(n, or)?),
    };
    Ok((ValueTable::from_values(values).with_note("synthetic game"), truth))
}

/// `2^n` independent draws from `U[-amplitude, amplitude]`.
pub fn random_game(n: usize, amplitude: f64, seed: u64) -> Result<ValueTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = LatticeVector::from_fn(n, |_| amplitude * rng.gen_range(-1.0..=1.0))?;
    Ok(ValueTable::from_values(values))
}

/// A random sparse spec: `1..=max_terms` terms of kind AND or OR on distinct
/// subsets of size `1..=3`, magnitudes in `[1, 3]`, bias in `[-2, 2]`.
///
/// Specs whose planted effects nearly cancel (`|Σ effects| < 1`) are
/// redrawn, so `0.05·|v(N) - v(∅)|` stays above the noise level.
pub fn random_planted_spec(n: usize, max_terms: usize, noise_amp: f64, seed: u64) -> Result<SyntheticGameSpec> {
    check_n(n)?;
    if n == 0 || max_terms == 0 {
        return Err(Error::InvalidArgument("planted specs need n ≥ 1 and at least one term".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut spec = SyntheticGameSpec::new(n);
        spec.noise_amp = noise_amp;
        spec.seed = rng.gen();
        spec.bias = rng.gen_range(-2.0..=2.0);
        let terms = rng.gen_range(1..=max_terms);
        let mut used: Vec<(bool, Subset)> = Vec::new();
        while spec.and_terms.len() + spec.or_terms.len() < terms {
            let size = rng.gen_range(1..=n.min(3));
            let mut s = Subset::EMPTY;
            while s.len() < size {
                s = s.with(rng.gen_range(0..n));
            }
            let is_and = rng.gen_bool(0.5);
            if used.contains(&(is_and, s)) {
                continue;
            }
            used.push((is_and, s));
            let effect = rng.gen_range(1.0..=3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let term = PlantedTerm::new(s.members(), effect);
            if is_and {
                spec.and_terms.push(term);
            } else {
                spec.or_terms.push(term);
            }
        }
        let swing: f64 = spec.and_terms.iter().chain(&spec.or_terms).map(|t| t.effect).sum();
        if swing.abs() >= 1.0 {
            return Ok(spec);
        }
    }
}

fn oracle_guard(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_N_CAP {
        return Err(Error::TooManyPlayers {
            n,
            cap: BRUTE_FORCE_N_CAP,
        });
    }
    Ok(())
}

fn parity(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Harsanyi dividends by the double loop over `S` and `L ⊆ S`.
pub fn brute_force_and(vt: &ValueTable) -> Result<InteractionVector> {
    let n = vt.n();
    oracle_guard(n)?;
    let dim = 1u32 << n;
    let v = vt.values().as_slice();
    let effects = (0..dim)
        .map(|s| {
            (0..dim)
                .filter(|&l| l & !s == 0)
                .map(|l| parity((s ^ l).count_ones()) * v[l as usize])
                .sum()
        })
        .collect();
    Ok(InteractionVector::new(InteractionKind::And, LatticeVector::new(n, effects)?))
}

/// OR interactions by the double loop over `S` and `L ⊆ S`, reading `v(N∖L)`.
pub fn brute_force_or(vt: &ValueTable) -> Result<InteractionVector> {
    let n = vt.n();
    oracle_guard(n)?;
    let dim = 1u32 << n;
    let full = full_mask(n) as u32;
    let v = vt.values().as_slice();
    let effects = (0..dim)
        .map(|s| {
            if s == 0 {
                return v[0];
            }
            -(0..dim)
                .filter(|&l| l & !s == 0)
                .map(|l| parity((s ^ l).count_ones()) * v[(full & !l) as usize])
                .sum::<f64>()
        })
        .collect();
    Ok(InteractionVector::new(InteractionKind::Or, LatticeVector::new(n, effects)?))
}
