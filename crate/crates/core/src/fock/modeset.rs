use std::fmt;

use crate::combinatorics::bit_positions;
use crate::error::{invalid, Result};

/// Largest supported mode count.
pub const MAX_MODES: usize = 30;

/// Subset of single-particle modes, stored as a bitmask. Mode `r` (1-based)
/// occupies bit `r - 1`. Iteration is always ascending, so a `ModeSet` doubles
/// as an ordered sequence without repeats.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ModeSet(u32);

impl ModeSet {
    pub const EMPTY: ModeSet = ModeSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        ModeSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Builds a set from 1-based mode labels. Labels may be given in any
    /// order but must not repeat.
    pub fn from_modes(modes: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &m in modes {
            if m == 0 || m > MAX_MODES {
                return invalid(format!("mode {m} outside 1..={MAX_MODES}"));
            }
            let b = 1u32 << (m - 1);
            if bits & b != 0 {
                return invalid(format!("mode {m} repeated"));
            }
            bits |= b;
        }
        Ok(ModeSet(bits))
    }

    /// Modes `lo..=hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1 && hi <= MAX_MODES);
        if hi < lo {
            return ModeSet::EMPTY;
        }
        let width = hi - lo + 1;
        let mask = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
        ModeSet(mask << (lo - 1))
    }

    /// The first `l` modes.
    pub fn full(l: usize) -> Self {
        Self::range(1, l)
    }

    pub fn single(mode: usize) -> Self {
        assert!((1..=MAX_MODES).contains(&mode));
        ModeSet(1 << (mode - 1))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, mode: usize) -> bool {
        mode >= 1 && mode <= MAX_MODES && self.0 & (1 << (mode - 1)) != 0
    }

    pub fn modes(self) -> impl Iterator<Item = usize> {
        bit_positions(self.0).map(|b| b as usize + 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.modes().collect()
    }

    pub fn min_mode(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max_mode(self) -> Option<usize> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros() as usize)
    }

    /// All set modes lie in `1..=l`.
    pub fn fits(self, l: usize) -> bool {
        self.max_mode().is_none_or(|m| m <= l)
    }

    pub fn union(self, other: ModeSet) -> ModeSet {
        ModeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ModeSet) -> ModeSet {
        ModeSet(self.0 & other.0)
    }

    pub fn difference(self, other: ModeSet) -> ModeSet {
        ModeSet(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: ModeSet) -> ModeSet {
        ModeSet(self.0 ^ other.0)
    }

    pub fn is_subset_of(self, other: ModeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: ModeSet) -> bool {
        self.0 & other.0 == 0
    }

    /// The complement within `1..=l`.
    pub fn complement(self, l: usize) -> ModeSet {
        ModeSet::full(l).difference(self)
    }

    /// Shifts every mode up by `offset`.
    pub fn shifted(self, offset: usize) -> ModeSet {
        ModeSet(self.0 << offset)
    }
}

impl fmt::Debug for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.modes().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}
