//! Hubbard chain and complex SYK Hamiltonians in a fixed-`n` sector, with
//! dense exact diagonalization.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::subsets_of_size;
use crate::error::{invalid, Error, Result};
use crate::fock::{sign_concat_unchecked, FockBasis, ModeSet, StateVector};
use crate::rng;

/// Largest sector dimension handed to the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelInfo {
    Hubbard { sites: usize, t: f64, u: f64 },
    Syk { l: usize, seed: u64 },
    SykGeneric { l: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub basis: Arc<FockBasis>,
    pub matrix: DMatrix<Complex64>,
    pub info: ModelInfo,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral-norm upper bound `max_i Σ_j |H_ij|`.
    pub fn norm_bound(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `‖H v - E v‖`.
    pub fn residual(&self, energy: f64, v: &StateVector) -> f64 {
        let x = nalgebra::DVector::from_column_slice(v.amps());
        (&self.matrix * &x - x * Complex64::new(energy, 0.0)).norm()
    }
}

/// A normal-ordered term `c Ψ†_Q Ψ_P`.
struct Term {
    coeff: Complex64,
    q: ModeSet,
    p: ModeSet,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge { dim, cap: MAX_DENSE_DIM });
    }
    Ok(())
}

/// Dense matrix of `Σ terms` on the sector.
fn assemble(basis: &FockBasis, terms: &[Term]) -> DMatrix<Complex64> {
    let dim = basis.dim();
    let columns: Vec<Vec<(usize, Complex64)>> = basis
        .states()
        .par_iter()
        .map(|&s| {
            let s = ModeSet::from_bits(s);
            let mut col = Vec::new();
            for t in terms {
                if !t.p.is_subset_of(s) {
                    continue;
                }
                let rest = s.difference(t.p);
                if !t.q.is_disjoint(rest) {
                    continue;
                }
                let sign = sign_concat_unchecked(rest, t.p) * sign_concat_unchecked(rest, t.q);
                let row = basis.rank(rest.union(t.q)).expect("number conserving");
                col.push((row, t.coeff * sign as f64));
            }
            col
        })
        .collect();
    let mut m = DMatrix::zeros(dim, dim);
    for (j, col) in columns.into_iter().enumerate() {
        for (i, z) in col {
            m[(i, j)] += z;
        }
    }
    m
}

/// Spin-orbital index of site `x` (1-based) and spin (`false` = up).
pub fn hubbard_mode(x: usize, down: bool) -> usize {
    2 * x - if down { 0 } else { 1 }
}

/// Periodic Hubbard chain at half filling, `l = 2 L`, `n = L`.
///
/// The hopping sum runs literally over `x = 1..L` with `L+1 ≡ 1`, so for `L = 2`
/// both bonds between the two sites are present.
pub fn hubbard(sites: usize, t: f64, u: f64) -> Result<HamiltonianMatrix> {
    if sites < 2 {
        return invalid("Hubbard chain needs at least two sites");
    }
    let l = 2 * sites;
    let basis = Arc::new(FockBasis::new(l, sites)?);
    check_dim(basis.dim())?;
    let mut hop = Vec::new();
    for x in 1..=sites {
        let y = x % sites + 1;
        for down in [false, true] {
            hop.push(Term {
                coeff: Complex64::new(-t, 0.0),
                q: ModeSet::single(hubbard_mode(x, down)),
                p: ModeSet::single(hubbard_mode(y, down)),
            });
        }
    }
    let m = assemble(&basis, &hop);
    let mut matrix = &m + m.adjoint();
    for (i, &s) in basis.states().iter().enumerate() {
        let doubles = (1..=sites).filter(|&x| s & (0b11 << (2 * x - 2)) == 0b11 << (2 * x - 2)).count();
        matrix[(i, i)] += Complex64::new(u * doubles as f64, 0.0);
    }
    Ok(HamiltonianMatrix { basis, matrix, info: ModelInfo::Hubbard { sites, t, u } })
}

/// Number of spin-up (odd) modes occupied.
pub fn up_count(s: ModeSet) -> usize {
    (s.bits() & 0x5555_5555).count_ones() as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SykCoupling {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub t: Complex64,
}

/// Couplings `t_abcd`, `a > b > c > d`, with independent real and imaginary
/// parts of variance `1 / (2 (2l)³)`. Drawn in increasing order of the bitmask of
/// `{a, b, c, d}` from ChaCha8 seeded with `seed`.
pub fn syk_couplings(l: usize, seed: u64) -> Vec<SykCoupling> {
    let mut r = rng::seeded(seed);
    let var = 1.0 / (2.0 * l as f64).powi(3);
    let full = ModeSet::full(l).bits();
    subsets_of_size(full, 4)
        .map(|m| {
            let modes = ModeSet::from_bits(m).to_vec();
            let t = rng::complex_normal(&mut r, var);
            SykCoupling { a: modes[3], b: modes[2], c: modes[1], d: modes[0], t }
        })
        .collect()
}

/// `H = Σ_{a>b>c>d} (t_abcd ψ†_a ψ†_b ψ_c ψ_d + h.c.)` on `n` particles.
///
/// All four modes of a term are distinct, so particle-hole conjugation
/// followed by complex conjugation maps `H` to itself. At half filling a
/// nondegenerate ground state then has `ρ_1 = 1/2` and `ω_k = ω_{n-k}`.
pub fn syk_in_sector(l: usize, n: usize, seed: u64) -> Result<HamiltonianMatrix> {
    if l < 4 {
        return invalid("SYK needs at least four modes");
    }
    let basis = Arc::new(FockBasis::new(l, n)?);
    check_dim(basis.dim())?;
    // ψ†_a ψ†_b = Ψ†_{(b,a)} and ψ_c ψ_d = -Ψ_{(d,c)} for a > b, c > d
    let terms: Vec<Term> = syk_couplings(l, seed)
        .into_iter()
        .map(|c| Term {
            coeff: -c.t,
            q: ModeSet::single(c.a).union(ModeSet::single(c.b)),
            p: ModeSet::single(c.c).union(ModeSet::single(c.d)),
        })
        .collect();
    let m = assemble(&basis, &terms);
    let matrix = &m + m.adjoint();
    Ok(HamiltonianMatrix { basis, matrix, info: ModelInfo::Syk { l, seed } })
}

/// SYK at half filling `n = l / 2`.
pub fn syk(l: usize, seed: u64) -> Result<HamiltonianMatrix> {
    syk_in_sector(l, l / 2, seed)
}

/// Complex SYK with couplings on all pairs of pairs:
/// `H = Σ_{P,Q} J_{QP} Ψ†_Q Ψ_P` over 2-subsets, `J` Hermitian.
///
/// Off-diagonal `J` (for `P` before `Q` in colex order) are complex normal
/// with `⟨|J|²⟩ = (2l)^{-3}`; diagonal entries are real normal of the same
/// variance. Unlike [`syk_in_sector`], whose four modes are always distinct,
/// this form has quadratic pieces and no exact particle-hole symmetry.
pub fn syk_generic(l: usize, n: usize, seed: u64) -> Result<HamiltonianMatrix> {
    if l < 4 {
        return invalid("SYK needs at least four modes");
    }
    let basis = Arc::new(FockBasis::new(l, n)?);
    check_dim(basis.dim())?;
    let pairs: Vec<ModeSet> = subsets_of_size(ModeSet::full(l).bits(), 2).map(ModeSet::from_bits).collect();
    let var = 1.0 / (2.0 * l as f64).powi(3);
    let mut r = rng::seeded(seed);
    let mut terms = Vec::with_capacity(pairs.len() * pairs.len());
    for (i, &p) in pairs.iter().enumerate() {
        terms.push(Term { coeff: Complex64::new(var.sqrt() * rng::normal(&mut r), 0.0), q: p, p });
        for &q in &pairs[i + 1..] {
            let j = rng::complex_normal(&mut r, var);
            terms.push(Term { coeff: j, q, p });
            terms.push(Term { coeff: j.conj(), q: p, p: q });
        }
    }
    let matrix = assemble(&basis, &terms);
    Ok(HamiltonianMatrix { basis, matrix, info: ModelInfo::SykGeneric { l, seed } })
}

/// Fix the global phase: the largest-modulus amplitude (first on ties) is real positive.
fn canonical_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let ph = z.conj() / z.norm();
        v.iter_mut().for_each(|a| *a *= ph);
    }
}

fn diagonalize(m: DMatrix<Complex64>, count: usize) -> Vec<(f64, Vec<Complex64>)> {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order
        .into_iter()
        .take(count)
        .map(|i| {
            let mut col: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            canonical_phase(&mut col);
            (eig.eigenvalues[i], col)
        })
        .collect()
}

/// Lowest `count` eigenpairs, ascending. Degenerate levels come back as an
/// arbitrary orthonormal basis of the eigenspace.
pub fn eigenstates(h: &HamiltonianMatrix, count: usize) -> Result<Vec<(f64, StateVector)>> {
    if count > h.dim() {
        return invalid(format!("requested {count} eigenpairs of a {}-dimensional sector", h.dim()));
    }
    check_dim(h.dim())?;
    diagonalize(h.matrix.clone(), count)
        .into_iter()
        .map(|(e, col)| Ok((e, StateVector::new(h.basis.clone(), col)?.normalized()?)))
        .collect()
}

/// Lowest `count` eigenpairs within the block with `n_up` spin-up particles,
/// embedded back into the full sector.
pub fn eigenstates_sz(h: &HamiltonianMatrix, n_up: usize, count: usize) -> Result<Vec<(f64, StateVector)>> {
    let idx: Vec<usize> = h.basis.iter().enumerate().filter(|(_, s)| up_count(*s) == n_up).map(|(i, _)| i).collect();
    if count > idx.len() {
        return invalid(format!("requested {count} eigenpairs of a {}-dimensional block", idx.len()));
    }
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h.matrix[(idx[i], idx[j])]);
    diagonalize(block, count)
        .into_iter()
        .map(|(e, col)| {
            let mut full = vec![Complex64::new(0.0, 0.0); h.dim()];
            for (a, &i) in col.into_iter().zip(&idx) {
                full[i] = a;
            }
            Ok((e, StateVector::new(h.basis.clone(), full)?.normalized()?))
        })
        .collect()
}
