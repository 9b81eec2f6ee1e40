use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::rank_bits;
use super::{sign_concat_unchecked, FockBasis, ModeSet, StateVector};
use crate::combinatorics::subsets_of_size;

/// Element of `H_{n-k} ⊗ H_{n+k}` stored as a dense `C(l,n-k) × C(l,n+k)` matrix.
///
/// Outside `0 ≤ k ≤ min(n, l-n)` the state is identically zero and the matrix
/// has no entries.
#[derive(Clone, Debug)]
pub struct TensorState {
    l: usize,
    n: usize,
    k: usize,
    left: Option<FockBasis>,
    right: Option<FockBasis>,
    amps: DMatrix<Complex64>,
}

impl TensorState {
    pub fn zeros(l: usize, n: usize, k: usize) -> Self {
        if k > n || n + k > l {
            return TensorState { l, n, k, left: None, right: None, amps: DMatrix::zeros(0, 0) };
        }
        let left = FockBasis::new(l, n - k).expect("valid left sector");
        let right = FockBasis::new(l, n + k).expect("valid right sector");
        let amps = DMatrix::zeros(left.dim(), right.dim());
        TensorState { l, n, k, left: Some(left), right: Some(right), amps }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn left_basis(&self) -> Option<&FockBasis> {
        self.left.as_ref()
    }

    pub fn right_basis(&self) -> Option<&FockBasis> {
        self.right.as_ref()
    }

    pub fn amps(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| *a == Complex64::new(0.0, 0.0))
    }
}

/// `Ω^k |v⟩⊗|v⟩ / k!` as `Σ_{|R|=k} Ψ_R|v⟩ ⊗ Ψ†_R|v⟩`.
///
/// Zero for `k > min(n, l-n)`.
pub fn omega_power_apply(v: &StateVector, k: usize) -> TensorState {
    let (l, n) = (v.l(), v.n());
    let mut out = TensorState::zeros(l, n, k);
    if out.left.is_none() {
        return out;
    }
    let support: Vec<(u32, Complex64)> = v
        .iter()
        .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
        .map(|(s, a)| (s.bits(), a))
        .collect();
    let full = ModeSet::full(l).bits();
    let mut lower: Vec<(usize, Complex64)> = Vec::new();
    let mut upper: Vec<(usize, Complex64)> = Vec::new();
    for r in subsets_of_size(full, k) {
        let rs = ModeSet::from_bits(r);
        lower.clear();
        upper.clear();
        for &(s, a) in &support {
            let ss = ModeSet::from_bits(s);
            if s & r == r {
                // Ψ_R|S⟩ = σ(S∖R, R)|S∖R⟩
                let rest = ModeSet::from_bits(s & !r);
                let sg = sign_concat_unchecked(rest, rs) as f64;
                lower.push((rank_bits(s & !r), a * sg));
            }
            if s & r == 0 {
                // Ψ†_R|S⟩ = σ(S, R)|S∪R⟩
                let sg = sign_concat_unchecked(ss, rs) as f64;
                upper.push((rank_bits(s | r), a * sg));
            }
        }
        for &(i, a) in &lower {
            for &(j, b) in &upper {
                out.amps[(i, j)] += a * b;
            }
        }
    }
    out
}
