use super::{ModeSet, MAX_MODES};
use crate::combinatorics::{binomial, next_same_popcount};
use crate::error::{invalid, Result};

/// The `C(l, n)` basis states of `n` fermions on `l` modes.
///
/// States are enumerated in colexicographic order, which for bitmasks of
/// fixed popcount coincides with increasing numeric value. The rank of
/// `S = (s_1 < .. < s_n)` is `Σ_i C(s_i - 1, i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    l: usize,
    n: usize,
    states: Vec<u32>,
}

impl FockBasis {
    pub fn new(l: usize, n: usize) -> Result<Self> {
        if l > MAX_MODES {
            return invalid(format!("l = {l} exceeds the supported maximum {MAX_MODES}"));
        }
        if n > l {
            return invalid(format!("particle number {n} exceeds mode count {l}"));
        }
        let dim = binomial(l, n) as usize;
        let mut states = Vec::with_capacity(dim);
        if n == 0 {
            states.push(0);
        } else {
            let mut s = (1u32 << n) - 1;
            loop {
                states.push(s);
                match next_same_popcount(s, l as u32) {
                    Some(next) => s = next,
                    None => break,
                }
            }
        }
        debug_assert_eq!(states.len(), dim);
        Ok(FockBasis { l, n, states })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn unrank(&self, index: usize) -> ModeSet {
        ModeSet::from_bits(self.states[index])
    }

    /// Dense index of `s`; `None` if `s` has the wrong size or uses modes above `l`.
    pub fn rank(&self, s: ModeSet) -> Option<usize> {
        if s.len() != self.n || !s.fits(self.l) {
            return None;
        }
        Some(rank_bits(s.bits()))
    }

    pub fn iter(&self) -> impl Iterator<Item = ModeSet> + '_ {
        self.states.iter().map(|&b| ModeSet::from_bits(b))
    }
}

/// Colex rank of a bitmask, independent of `l`.
#[inline]
pub(crate) fn rank_bits(bits: u32) -> usize {
    let mut rank = 0u64;
    let mut rest = bits;
    let mut i = 1;
    while rest != 0 {
        let pos = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        rank += binomial(pos, i);
        i += 1;
    }
    rank as usize
}
