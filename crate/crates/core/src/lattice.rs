//! Subset indexing and matrix-free linear operators on the lattice of
//! subsets of `n` players.
//!
//! A subset `S` is stored as the bitmask `Σ_{i∈S} 2^i` (bit `i` set iff
//! player `i` is present). Every vector in this crate is indexed that way:
//! entry `0` is the empty set and entry `2^n - 1` is the full player set.
//!
//! The transforms below run in `O(n·2^n)` time by sweeping one bit at a time.
//! The `*_in_place` slice variants exist for hot loops; the
//! [`LatticeVector`] wrappers copy.

use std::fmt;
use std::ops::Index;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on `n` (a vector of `2^24` doubles is ~134 MB).
pub const DEFAULT_N_CAP: usize = 24;

/// Hard limit imposed by the 32-bit subset mask.
pub const MAX_PLAYERS: usize = 31;

static N_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_N_CAP);

/// Current lattice cap.
pub fn n_cap() -> usize {
    N_CAP.load(Ordering::Relaxed)
}

/// Overrides the lattice cap process-wide. Values above [`MAX_PLAYERS`] are clamped.
pub fn set_n_cap(cap: usize) {
    N_CAP.store(cap.min(MAX_PLAYERS), Ordering::Relaxed);
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    let cap = n_cap();
    if n > cap {
        return Err(Error::TooManyPlayers { n, cap });
    }
    Ok(())
}

/// A subset of players, encoded as an LSB-first bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// The full player set `N`.
    pub fn full(n: usize) -> Subset {
        Subset(full_mask(n) as u32)
    }

    /// Validates `mask < 2^n`.
    pub fn checked(mask: u64, n: usize) -> Result<Subset> {
        if n > MAX_PLAYERS || mask >= (1u64 << n) {
            return Err(Error::MaskOutOfRange { mask, n });
        }
        Ok(Subset(mask as u32))
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Subset {
        Subset(members.into_iter().fold(0u32, |m, i| m | (1 << i)))
    }

    #[inline]
    pub fn mask(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, player: usize) -> bool {
        self.0 >> player & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn with(self, player: usize) -> Subset {
        Subset(self.0 | (1 << player))
    }

    #[inline]
    pub fn without(self, player: usize) -> Subset {
        Subset(self.0 & !(1 << player))
    }

    /// `N \ S`.
    #[inline]
    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & full_mask(n) as u32)
    }

    /// Player indices in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, including `∅` and `self`, in descending mask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(Subset(cur))
        })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> usize {
    (1usize << n) - 1
}

/// `2^n` finite reals indexed by [`Subset`] mask.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector {
    n: usize,
    data: Vec<f64>,
}

impl LatticeVector {
    /// Validates length `2^n`, finiteness and the lattice cap.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        let expected = 1usize << n;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { n, data })
    }

    /// Infers `n` from the length, which must be a power of two.
    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if !data.len().is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: data.len().next_power_of_two(),
                actual: data.len(),
            });
        }
        let n = data.len().trailing_zeros() as usize;
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            data: vec![0.0; 1 << n],
        })
    }

    /// Builds `f(S)` for every subset.
    pub fn from_fn(n: usize, mut f: impl FnMut(Subset) -> f64) -> Result<Self> {
        check_n(n)?;
        let data = (0..1u32 << n).map(|m| f(Subset(m))).collect();
        Self::new(n, data)
    }

    // Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), 1 << n);
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, s: Subset) -> f64 {
        self.data[s.mask()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(|(m, &x)| (Subset(m as u32), x))
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn norm_l1(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn dot(&self, other: &LatticeVector) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    fn map_copy(&self, op: impl FnOnce(&mut [f64])) -> Result<LatticeVector> {
        check_n(self.n)?;
        let mut data = self.data.clone();
        op(&mut data);
        Ok(Self::from_parts(self.n, data))
    }
}

impl Index<Subset> for LatticeVector {
    type Output = f64;

    fn index(&self, s: Subset) -> &f64 {
        &self.data[s.mask()]
    }
}

impl Index<usize> for LatticeVector {
    type Output = f64;

    fn index(&self, mask: usize) -> &f64 {
        &self.data[mask]
    }
}

/// One sweep per bit: `lo` holds the half without the bit, `hi` the half with it.
#[inline]
fn butterfly(data: &mut [f64], mut step: impl FnMut(&mut f64, &mut f64)) {
    debug_assert!(data.len().is_power_of_two());
    let mut half = 1;
    while half < data.len() {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (l, h) in lo.iter_mut().zip(hi) {
                step(l, h);
            }
        }
        half <<= 1;
    }
}

/// `h(S) = Σ_{L⊆S} (-1)^{|S|-|L|} w(L)`.
pub fn mobius_in_place(data: &mut [f64]) {
    butterfly(data, |l, h| *h -= *l);
}

/// `w(T) = Σ_{S⊆T} h(S)`.
pub fn zeta_in_place(data: &mut [f64]) {
    butterfly(data, |l, h| *h += *l);
}

/// `g'(L) = Σ_{S⊇L} (-1)^{|S|-|L|} g(S)`, the adjoint of [`mobius_in_place`].
pub fn superset_mobius_in_place(data: &mut [f64]) {
    butterfly(data, |l, h| *l -= *h);
}

/// `g'(L) = Σ_{S⊇L} g(S)`, the adjoint of [`zeta_in_place`].
pub fn superset_zeta_in_place(data: &mut [f64]) {
    butterfly(data, |l, h| *l += *h);
}

/// `out[m] = w[(2^n - 1) XOR m]`, which for a full lattice is a reversal.
#[inline]
pub fn reflect_in_place(data: &mut [f64]) {
    data.reverse();
}

pub fn apply_t_and_in_place(data: &mut [f64]) {
    mobius_in_place(data);
}

/// OR interactions: `∅ ↦ w(∅)`, `S ≠ ∅ ↦ -Σ_{L⊆S} (-1)^{|S|-|L|} w(N∖L)`.
pub fn apply_t_or_in_place(data: &mut [f64]) {
    let empty = data[0];
    reflect_in_place(data);
    mobius_in_place(data);
    for x in data.iter_mut() {
        *x = -*x;
    }
    data[0] = empty;
}

pub fn apply_t_and_transpose_in_place(data: &mut [f64]) {
    superset_mobius_in_place(data);
}

pub fn apply_t_or_transpose_in_place(data: &mut [f64]) {
    let empty = data[0];
    data[0] = 0.0;
    for x in data.iter_mut() {
        *x = -*x;
    }
    superset_mobius_in_place(data);
    reflect_in_place(data);
    data[0] += empty;
}

/// Inverse of [`apply_t_or_in_place`]: `b ↦ b(∅) + Σ_{S∩T≠∅} b(S)` for every `T`.
pub fn apply_t_or_inverse_in_place(data: &mut [f64]) {
    let bias = data[0];
    data[0] = 0.0;
    let total: f64 = data.iter().sum();
    zeta_in_place(data);
    reflect_in_place(data);
    for x in data.iter_mut() {
        *x = bias + total - *x;
    }
}

/// Adjoint of [`apply_t_or_inverse_in_place`]: `y ↦ Σ_{T∩S≠∅} y(T)` for `S ≠ ∅`, `Σ_T y(T)` at `∅`.
pub fn apply_t_or_inverse_transpose_in_place(data: &mut [f64]) {
    let total: f64 = data.iter().sum();
    zeta_in_place(data);
    reflect_in_place(data);
    for x in data.iter_mut() {
        *x = total - *x;
    }
    data[0] = total;
}

pub fn mobius_transform(w: &LatticeVector) -> Result<LatticeVector> {
    w.map_copy(mobius_in_place)
}

pub fn zeta_transform(h: &LatticeVector) -> Result<LatticeVector> {
    h.map_copy(zeta_in_place)
}

pub fn reflect(w: &LatticeVector) -> LatticeVector {
    let mut data = w.data.clone();
    reflect_in_place(&mut data);
    LatticeVector::from_parts(w.n, data)
}

pub fn apply_t_and(w: &LatticeVector) -> Result<LatticeVector> {
    w.map_copy(apply_t_and_in_place)
}

pub fn apply_t_or(w: &LatticeVector) -> Result<LatticeVector> {
    w.map_copy(apply_t_or_in_place)
}

pub fn apply_t_and_transpose(g: &LatticeVector) -> Result<LatticeVector> {
    g.map_copy(apply_t_and_transpose_in_place)
}

pub fn apply_t_or_transpose(g: &LatticeVector) -> Result<LatticeVector> {
    g.map_copy(apply_t_or_transpose_in_place)
}

/// Dense `2^n × 2^n` operator matrices built entry by entry from the
/// defining alternating sums. Used for benchmarking and as test oracles;
/// capped at `n ≤ 12`.
pub mod dense {
    use super::{full_mask, Subset};
    use crate::error::{Error, Result};

    pub const DENSE_N_CAP: usize = 12;

    /// Row-major square matrix.
    #[derive(Debug, Clone, PartialEq)]
    pub struct DenseMatrix {
        pub dim: usize,
        pub entries: Vec<f64>,
    }

    impl DenseMatrix {
        pub fn get(&self, row: usize, col: usize) -> f64 {
            self.entries[row * self.dim + col]
        }

        pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
            assert_eq!(x.len(), self.dim);
            self.entries
                .chunks_exact(self.dim)
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        }

        pub fn transpose(&self) -> DenseMatrix {
            let d = self.dim;
            let mut entries = vec![0.0; d * d];
            for r in 0..d {
                for c in 0..d {
                    entries[c * d + r] = self.entries[r * d + c];
                }
            }
            DenseMatrix { dim: d, entries }
        }
    }

    fn guard(n: usize) -> Result<()> {
        if n > DENSE_N_CAP {
            return Err(Error::TooManyPlayers { n, cap: DENSE_N_CAP });
        }
        Ok(())
    }

    fn parity_sign(k: usize) -> f64 {
        if k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Row `S`, column `L`: `(-1)^{|S|-|L|}` if `L ⊆ S`, else 0.
    pub fn t_and(n: usize) -> Result<DenseMatrix> {
        guard(n)?;
        let dim = 1usize << n;
        let mut entries = vec![0.0; dim * dim];
        for s in 0..dim {
            for l in 0..dim {
                let (s_set, l_set) = (Subset(s as u32), Subset(l as u32));
                if l_set.is_subset_of(s_set) {
                    entries[s * dim + l] = parity_sign(s_set.len() - l_set.len());
                }
            }
        }
        Ok(DenseMatrix { dim, entries })
    }

    /// Row `∅` picks `w(∅)`; row `S ≠ ∅`, column `N∖L` carries `-(-1)^{|S|-|L|}` for `L ⊆ S`.
    pub fn t_or(n: usize) -> Result<DenseMatrix> {
        guard(n)?;
        let dim = 1usize << n;
        let full = full_mask(n);
        let mut entries = vec![0.0; dim * dim];
        entries[0] = 1.0;
        for s in 1..dim {
            for l in 0..dim {
                let (s_set, l_set) = (Subset(s as u32), Subset(l as u32));
                if l_set.is_subset_of(s_set) {
                    let col = full ^ l;
                    entries[s * dim + col] -= parity_sign(s_set.len() - l_set.len());
                }
            }
        }
        Ok(DenseMatrix { dim, entries })
    }
}
