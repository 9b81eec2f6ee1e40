use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateVector;
use crate::error::{invalid, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

/// A two-mode unitary acting on modes `p < q` (1-based).
///
/// `g[a][b]` is the mode-space matrix restricted to rows/columns `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensRotation {
    pub p: usize,
    pub q: usize,
    pub g: [[Complex64; 2]; 2],
}

impl GivensRotation {
    pub fn adjoint(&self) -> Self {
        let g = self.g;
        GivensRotation {
            p: self.p,
            q: self.q,
            g: [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]],
        }
    }

    /// `M ← G M` on rows `p, q`.
    fn left_multiply(&self, m: &mut DMatrix<Complex64>) {
        let (i, j) = (self.p - 1, self.q - 1);
        for c in 0..m.ncols() {
            let a = m[(i, c)];
            let b = m[(j, c)];
            m[(i, c)] = self.g[0][0] * a + self.g[0][1] * b;
            m[(j, c)] = self.g[1][0] * a + self.g[1][1] * b;
        }
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(iθ)` for Hermitian `θ`.
pub fn mode_unitary(theta: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if !theta.is_square() {
        return invalid("generator must be square");
    }
    let dev = max_abs(&(theta - theta.adjoint()));
    if dev > HERMITIAN_TOL {
        return invalid(format!("generator is not Hermitian (max deviation {dev:e})"));
    }
    let herm = (theta + theta.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|lam| Complex64::new(0.0, lam).exp()));
    Ok(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}

/// Factor a unitary as `U = R_1 R_2 .. R_m · diag(phases)` with adjacent-mode
/// rotations `R_i`.
pub fn givens_decompose(u: &DMatrix<Complex64>) -> Result<(Vec<GivensRotation>, Vec<Complex64>)> {
    let l = u.nrows();
    if !u.is_square() {
        return invalid("mode unitary must be square");
    }
    let dev = max_abs(&(u.adjoint() * u - DMatrix::<Complex64>::identity(l, l)));
    if dev > UNITARY_TOL {
        return invalid(format!("matrix is not unitary (max deviation {dev:e})"));
    }
    let mut m = u.clone();
    let mut applied = Vec::new();
    for c in 0..l.saturating_sub(1) {
        for r in ((c + 1)..l).rev() {
            let a = m[(r - 1, c)];
            let b = m[(r, c)];
            if b.norm() == 0.0 {
                continue;
            }
            let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let g = GivensRotation {
                p: r,
                q: r + 1,
                g: [[a.conj() / rho, b.conj() / rho], [-b / rho, a / rho]],
            };
            g.left_multiply(&mut m);
            m[(r, c)] = Complex64::new(0.0, 0.0);
            applied.push(g);
        }
    }
    let phases = (0..l).map(|i| m[(i, i)] / m[(i, i)].norm()).collect();
    let factors = applied.iter().map(GivensRotation::adjoint).collect();
    Ok((factors, phases))
}

/// Many-body image of a two-mode rotation: `ψ†_a → Σ_b g_{ba} ψ†_b` on `{p, q}`.
fn apply_givens(v: &StateVector, rot: &GivensRotation) -> StateVector {
    let (bp, bq) = (1u32 << (rot.p - 1), 1u32 << (rot.q - 1));
    let between = (bq - 1) & !((bp << 1) - 1);
    let g = rot.g;
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let basis = v.basis();
    let mut out = v.zeros_like();
    let amps = v.amps();
    let dst = out.amps_mut();
    for (i, s) in basis.states().iter().copied().enumerate() {
        let a = amps[i];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        match (s & bp != 0, s & bq != 0) {
            (false, false) => dst[i] += a,
            (true, true) => dst[i] += det * a,
            (true, false) => {
                let sg = if (s & between).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                dst[i] += g[0][0] * a;
                let t = super::basis::rank_bits((s & !bp) | bq);
                dst[t] += g[1][0] * a * sg;
            }
            (false, true) => {
                let sg = if (s & between).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                dst[i] += g[1][1] * a;
                let t = super::basis::rank_bits((s & !bq) | bp);
                dst[t] += g[0][1] * a * sg;
            }
        }
    }
    out
}

/// Many-body image `Γ(U)` of a mode-space unitary, `Γ(U) ψ†_p Γ(U)† = Σ_q U_{qp} ψ†_q`.
pub fn apply_mode_unitary(v: &StateVector, u: &DMatrix<Complex64>) -> Result<StateVector> {
    if u.nrows() != v.l() {
        return invalid(format!("mode unitary is {}×{}, state has l = {}", u.nrows(), u.ncols(), v.l()));
    }
    let (rotations, phases) = givens_decompose(u)?;
    let mut out = v.clone();
    for (i, s) in v.basis().states().iter().enumerate() {
        let mut ph = Complex64::new(1.0, 0.0);
        for pos in crate::combinatorics::bit_positions(*s) {
            ph *= phases[pos as usize];
        }
        out.amps_mut()[i] *= ph;
    }
    for rot in rotations.iter().rev() {
        out = apply_givens(&out, rot);
    }
    Ok(out)
}

/// `exp(i Σ θ_{pq} ψ†_p ψ_q) |v⟩`.
pub fn single_particle_rotate(v: &StateVector, theta: &DMatrix<Complex64>) -> Result<StateVector> {
    if theta.nrows() != v.l() {
        return invalid(format!("generator is {}×{}, state has l = {}", theta.nrows(), theta.ncols(), v.l()));
    }
    let u = mode_unitary(theta)?;
    apply_mode_unitary(v, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockBasis, ModeSet};
    use crate::rng;

    fn det(m: &DMatrix<Complex64>) -> Complex64 {
        if m.nrows() == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            m.determinant()
        }
    }

    #[test]
    fn decomposition_reassembles() {
        let mut r = rng::seeded(7);
        let u = mode_unitary(&rng::random_hermitian(&mut r, 6, 1.0)).unwrap();
        let (rots, phases) = givens_decompose(&u).unwrap();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases));
        for rot in rots.iter().rev() {
            rot.left_multiply(&mut m);
        }
        assert!(max_abs(&(m - u)) < 1e-12);
    }

    #[test]
    fn amplitudes_are_minors() {
        let mut r = rng::seeded(11);
        let l = 6;
        let u = mode_unitary(&rng::random_hermitian(&mut r, l, 1.5)).unwrap();
        for n in 0..=l {
            let basis = FockBasis::new(l, n).unwrap();
            for p in basis.iter() {
                let v = StateVector::basis_state(l, &p.to_vec()).unwrap();
                let w = apply_mode_unitary(&v, &u).unwrap();
                for q in basis.iter() {
                    let rows: Vec<usize> = q.modes().map(|m| m - 1).collect();
                    let cols: Vec<usize> = p.modes().map(|m| m - 1).collect();
                    let sub = DMatrix::from_fn(n, n, |a, b| u[(rows[a], cols[b])]);
                    assert!((w.amplitude(q) - det(&sub)).norm() < 1e-12, "{p} -> {q}");
                }
            }
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let v = StateVector::superposition(5, &[(&[1, 3], Complex64::new(1.0, 0.5)), (&[2, 5], Complex64::new(-0.3, 0.0))])
            .unwrap();
        let w = single_particle_rotate(&v, &DMatrix::zeros(5, 5)).unwrap();
        assert!(w.max_abs_diff(&v).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let v = StateVector::basis_state(3, &[1]).unwrap();
        let mut theta = DMatrix::<Complex64>::zeros(3, 3);
        theta[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(single_particle_rotate(&v, &theta).is_err());
    }

    #[test]
    fn rotations_compose_along_a_ray() {
        let mut r = rng::seeded(3);
        let l = 7;
        let theta = rng::random_hermitian(&mut r, l, 1.0);
        let basis = std::sync::Arc::new(FockBasis::new(l, 3).unwrap());
        let v = StateVector::from_fn(basis, |_| rng::complex_normal(&mut r, 1.0)).normalized().unwrap();
        let t = Complex64::new(0.4, 0.0);
        let s = Complex64::new(-1.1, 0.0);
        let a = single_particle_rotate(&single_particle_rotate(&v, &(&theta * t)).unwrap(), &(&theta * s)).unwrap();
        let b = single_particle_rotate(&v, &(&theta * (t + s))).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let _ = ModeSet::EMPTY;
    }
}
