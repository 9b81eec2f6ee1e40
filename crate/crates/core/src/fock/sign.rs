use super::ModeSet;
use crate::error::{invalid, Result};

/// Sign of the permutation sorting `seq` ascending.
pub fn sign_sort(seq: &[usize]) -> Result<i32> {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            if seq[i] == seq[j] {
                return invalid(format!("repeated element {} in sequence", seq[i]));
            }
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// `σ(A, B)`: sign of the permutation sorting sorted `A` followed by sorted `B`.
pub fn sign_concat(a: ModeSet, b: ModeSet) -> Result<i32> {
    if !a.is_disjoint(b) {
        return invalid(format!("sets {a} and {b} overlap"));
    }
    Ok(sign_concat_unchecked(a, b))
}

/// `σ(A, B)` without the disjointness check.
#[inline]
pub fn sign_concat_unchecked(a: ModeSet, b: ModeSet) -> i32 {
    let a = a.bits();
    let mut rest = b.bits();
    let mut inversions = 0u32;
    while rest != 0 {
        let t = rest.trailing_zeros();
        rest &= rest - 1;
        // elements of A above this element of B
        let above = if t >= 31 { 0 } else { u32::MAX << (t + 1) };
        inversions += (a & above).count_ones();
    }
    1 - 2 * (inversions & 1) as i32
}

/// `σ(A_1, A_2, ..)` for pairwise disjoint sets.
pub fn sign_chain(parts: &[ModeSet]) -> Result<i32> {
    let mut sign = 1;
    let mut seen = ModeSet::EMPTY;
    for (j, &b) in parts.iter().enumerate() {
        if !seen.is_disjoint(b) {
            return invalid(format!("set {b} overlaps earlier sets"));
        }
        seen = seen.union(b);
        for &a in &parts[..j] {
            sign *= sign_concat_unchecked(a, b);
        }
    }
    Ok(sign)
}

#[inline]
fn above_count(state: u32, mode_bit: u32) -> u32 {
    let t = mode_bit.trailing_zeros();
    let above = if t >= 31 { 0 } else { u32::MAX << (t + 1) };
    (state & above).count_ones()
}

/// `ψ†_r` on a basis bitmask; `None` if occupied.
#[inline]
pub fn create(state: u32, mode: usize) -> Option<(u32, i32)> {
    let b = 1u32 << (mode - 1);
    if state & b != 0 {
        return None;
    }
    let sign = 1 - 2 * (above_count(state, b) & 1) as i32;
    Some((state | b, sign))
}

/// `ψ_r` on a basis bitmask; `None` if empty.
#[inline]
pub fn annihilate(state: u32, mode: usize) -> Option<(u32, i32)> {
    let b = 1u32 << (mode - 1);
    if state & b == 0 {
        return None;
    }
    let sign = 1 - 2 * (above_count(state, b) & 1) as i32;
    Some((state & !b, sign))
}
