//! Binomials and subset enumeration over bitmasks.

const TABLE_SIZE: usize = 64;

const fn build_binomials() -> [[u64; TABLE_SIZE]; TABLE_SIZE] {
    let mut t = [[0u64; TABLE_SIZE]; TABLE_SIZE];
    let mut n = 0;
    while n < TABLE_SIZE {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1].saturating_add(if k < n { t[n - 1][k] } else { 0 });
            k += 1;
        }
        n += 1;
    }
    t
}

static BINOMIALS: [[u64; TABLE_SIZE]; TABLE_SIZE] = build_binomials();

/// `C(n, k)`, zero when `k > n`. Saturates beyond `u64` (not reachable for `n < 64`
/// except near the centre of the last rows, which no caller uses).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    if n < TABLE_SIZE {
        BINOMIALS[n][k]
    } else {
        binomial_u128(n as u64, k as u64) as u64
    }
}

/// Exact `C(n, k)` in 128-bit arithmetic.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn factorial_u128(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Positions (0-based bit indices) of the set bits of `mask`, ascending.
pub fn bit_positions(mask: u32) -> impl Iterator<Item = u32> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let t = m.trailing_zeros();
            m &= m - 1;
            Some(t)
        }
    })
}

/// Next bitmask with the same popcount (Gosper's hack). Returns `None` on overflow
/// past `limit_bits` bits.
pub fn next_same_popcount(x: u32, limit_bits: u32) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let c = x & x.wrapping_neg();
    let r = x.checked_add(c)?;
    let next = (((r ^ x) >> 2) / c) | r;
    if limit_bits < 32 && next >> limit_bits != 0 {
        None
    } else {
        Some(next)
    }
}

/// All `k`-element submasks of `mask`, in increasing numeric order.
pub fn subsets_of_size(mask: u32, k: usize) -> SubsetsOfSize {
    let positions: Vec<u32> = bit_positions(mask).collect();
    let m = positions.len();
    let state = if k > m {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some((1u64 << k) - 1)
    };
    SubsetsOfSize { positions, state, k }
}

pub struct SubsetsOfSize {
    positions: Vec<u32>,
    state: Option<u64>,
    k: usize,
}

impl Iterator for SubsetsOfSize {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let idx = self.state?;
        let mut out = 0u32;
        let mut rest = idx;
        while rest != 0 {
            let t = rest.trailing_zeros();
            rest &= rest - 1;
            out |= 1 << self.positions[t as usize];
        }
        self.state = if self.k == 0 {
            None
        } else {
            let c = idx & idx.wrapping_neg();
            let r = idx + c;
            let next = (((r ^ idx) >> 2) / c) | r;
            if next >> self.positions.len() != 0 {
                None
            } else {
                Some(next)
            }
        };
        Some(out)
    }
}

/// All submasks of `mask` (including `0` and `mask`).
pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut cur = Some(mask);
    std::iter::from_fn(move || {
        let s = cur?;
        cur = if s == 0 { None } else { Some((s - 1) & mask) };
        Some(s)
    })
}
