//! Reduced density matrices and twisted purities.
//!
//! RDM rows and columns are indexed by unordered `k`-subsets in basis rank
//! order, so `Tr ρ_k = C(n, k)` and `Tr ρ̃_k = C(l-n, k)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::combinatorics::{binomial, binomial_u128, submasks};
use crate::error::{invalid, Error, Result};
use crate::fock::{omega_power_apply, sign_concat_unchecked, FockBasis, ModeSet, StateVector};
use crate::pluecker;

pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RdmKind {
    Ordinary,
    Twisted,
}

/// `ρ_k^{Q,P} = ⟨v|Ψ†_P Ψ_Q|v⟩` or `ρ̃_k^{Q,P} = ⟨v|Ψ_Q Ψ†_P|v⟩`, row `Q`, column `P`.
#[derive(Clone, Debug)]
pub struct KRdm {
    pub k: usize,
    pub kind: RdmKind,
    pub l: usize,
    pub n: usize,
    pub matrix: DMatrix<Complex64>,
}

impl KRdm {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Basis of the `k`-subsets indexing rows and columns.
    pub fn index_basis(&self) -> FockBasis {
        FockBasis::new(self.l, self.k).expect("valid index basis")
    }

    pub fn entry(&self, q: ModeSet, p: ModeSet) -> Complex64 {
        let b = self.index_basis();
        match (b.rank(q), b.rank(p)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_order(v: &StateVector, k: usize) -> Result<()> {
    if k == 0 || k > v.n() {
        return invalid(format!("RDM order k = {k} outside 1..={}", v.n()));
    }
    Ok(())
}

/// Ordinary `k`-RDM, computed as `Wᵀ W̄` with `W[A][Q] = σ(A,Q) v(A∪Q)`.
pub fn rdm(v: &StateVector, k: usize) -> Result<KRdm> {
    check_order(v, k)?;
    let (l, n) = (v.l(), v.n());
    let rows = FockBasis::new(l, n - k)?;
    let cols = FockBasis::new(l, k)?;
    let mut w = DMatrix::<Complex64>::zeros(rows.dim(), cols.dim());
    for (ai, a) in rows.iter().enumerate() {
        for q in crate::combinatorics::subsets_of_size(a.complement(l).bits(), k) {
            let q = ModeSet::from_bits(q);
            let amp = v.amplitude(a.union(q));
            if amp != Complex64::new(0.0, 0.0) {
                let qi = cols.rank(q).expect("k-subset");
                w[(ai, qi)] = amp * sign_concat_unchecked(a, q) as f64;
            }
        }
    }
    let matrix = w.transpose() * w.map(|z| z.conj());
    Ok(KRdm { k, kind: RdmKind::Ordinary, l, n, matrix })
}

/// Twisted `k`-RDM from `U^H U` with `U[B][P] = σ(B∖P,P) v(B∖P)`.
pub fn twisted_rdm_direct(v: &StateVector, k: usize) -> Result<KRdm> {
    check_order(v, k)?;
    let (l, n) = (v.l(), v.n());
    let cols = FockBasis::new(l, k)?;
    if n + k > l {
        let d = cols.dim();
        return Ok(KRdm { k, kind: RdmKind::Twisted, l, n, matrix: DMatrix::zeros(d, d) });
    }
    let rows = FockBasis::new(l, n + k)?;
    let mut u = DMatrix::<Complex64>::zeros(rows.dim(), cols.dim());
    for (bi, b) in rows.iter().enumerate() {
        for p in crate::combinatorics::subsets_of_size(b.bits(), k) {
            let p = ModeSet::from_bits(p);
            let rest = b.difference(p);
            let amp = v.amplitude(rest);
            if amp != Complex64::new(0.0, 0.0) {
                let pi = cols.rank(p).expect("k-subset");
                u[(bi, pi)] = amp * sign_concat_unchecked(rest, p) as f64;
            }
        }
    }
    let matrix = u.adjoint() * u;
    Ok(KRdm { k, kind: RdmKind::Twisted, l, n, matrix })
}

/// `ρ̃_k` from `ρ_1..ρ_k` by normal ordering `Ψ_Q Ψ†_P`:
/// `ρ̃_k^{Q,P} = Σ_{C ⊂ P∩Q} (-1)^{k-|C|} σ(Q∖C,C) σ(P∖C,C) ρ_{k-|C|}^{Q∖C,P∖C}` with `ρ_0 = 1`.
pub fn twisted_rdm_from_rdms(rdms: &[KRdm]) -> Result<KRdm> {
    let Some(first) = rdms.first() else {
        return invalid("need at least ρ_1");
    };
    let (l, n, k) = (first.l, first.n, rdms.len());
    for (i, r) in rdms.iter().enumerate() {
        if r.l != l || r.n != n {
            return invalid(format!("RDM {} is for (l, n) = ({}, {}), expected ({l}, {n})", i + 1, r.l, r.n));
        }
        if r.k != i + 1 || r.kind != RdmKind::Ordinary {
            return invalid(format!("expected ordinary RDMs of orders 1..={k} in sequence"));
        }
    }
    let bases: Vec<FockBasis> = (0..=k).map(|j| FockBasis::new(l, j)).collect::<Result<_>>()?;
    let idx = &bases[k];
    let d = idx.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(d, d);
    for (qi, q) in idx.iter().enumerate() {
        for (pi, p) in idx.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in submasks(q.intersection(p).bits()).map(ModeSet::from_bits) {
                let j = k - c.len();
                let (qr, pr) = (q.difference(c), p.difference(c));
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 }
                    * (sign_concat_unchecked(qr, c) * sign_concat_unchecked(pr, c)) as f64;
                let term = if j == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    let b = &bases[j];
                    rdms[j - 1].matrix[(b.rank(qr).unwrap(), b.rank(pr).unwrap())]
                };
                acc += term * sign;
            }
            matrix[(qi, pi)] = acc;
        }
    }
    Ok(KRdm { k, kind: RdmKind::Twisted, l, n, matrix })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RdmTrace,
    ResidualSum,
    TensorApply,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::RdmTrace, Method::ResidualSum, Method::TensorApply];

    /// Default choice for order `k`.
    pub fn auto(k: usize) -> Method {
        if k <= 3 {
            Method::RdmTrace
        } else {
            Method::TensorApply
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::RdmTrace => "rdm-trace",
            Method::ResidualSum => "residual-sum",
            Method::TensorApply => "tensor-apply",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method '{s}'")))
    }
}

/// Largest order with possibly nonzero `ω_k`.
pub fn max_order(l: usize, n: usize) -> usize {
    n.min(l - n)
}

/// `ω_k = Tr[ρ_k ρ̃_k]` for a normalized state.
pub fn twisted_purity(v: &StateVector, k: usize, method: Method) -> Result<f64> {
    v.require_normalized(NORM_TOL)?;
    if k > max_order(v.l(), v.n()) {
        return Ok(0.0);
    }
    match method {
        Method::RdmTrace => {
            if k == 0 {
                return Ok(v.norm_sqr() * v.norm_sqr());
            }
            let rho = rdm(v, k)?;
            let twisted = twisted_rdm_direct(v, k)?;
            Ok(rho.matrix.component_mul(&twisted.matrix.transpose()).iter().sum::<Complex64>().re)
        }
        Method::ResidualSum => pluecker::residual_norm_sq(v, k),
        Method::TensorApply => Ok(omega_power_apply(v, k).norm_sqr()),
    }
}

/// `ω_0 .. ω_kmax` of one state.
#[derive(Clone, Debug, Serialize)]
pub struct PuritySpectrum {
    pub l: usize,
    pub n: usize,
    pub omegas: Vec<f64>,
    /// Method used for each order; empty for closed-form spectra.
    pub methods: Vec<Method>,
    /// `|ω_1(rdm-trace) - ω_1(tensor-apply)|` when computed.
    pub cross_check: Option<f64>,
}

impl PuritySpectrum {
    pub fn kmax(&self) -> usize {
        self.omegas.len().saturating_sub(1)
    }

    pub fn is_complete(&self) -> bool {
        self.kmax() >= max_order(self.l, self.n)
    }

    /// CSV with header `k,omega`, optionally preceded by a `# generated ...` line.
    pub fn write_csv(&self, mut out: impl Write, timestamp: Option<&str>) -> Result<()> {
        if let Some(ts) = timestamp {
            writeln!(out, "# generated {ts}")?;
        }
        writeln!(out, "k,omega")?;
        for (k, w) in self.omegas.iter().enumerate() {
            writeln!(out, "{k},{w:.16e}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, None).expect("write to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

/// Spectrum with the default method per order, plus an `ω_1` cross-check.
pub fn purity_spectrum(v: &StateVector, kmax: usize) -> Result<PuritySpectrum> {
    if kmax > v.n() {
        return invalid(format!("kmax = {kmax} exceeds n = {}", v.n()));
    }
    let methods: Vec<Method> = (0..=kmax).map(Method::auto).collect();
    let mut spec = purity_spectrum_with(v, kmax, &methods)?;
    if kmax >= 1 && max_order(v.l(), v.n()) >= 1 {
        let other = twisted_purity(v, 1, Method::TensorApply)?;
        spec.cross_check = Some((spec.omegas[1] - other).abs());
    }
    Ok(spec)
}

/// Spectrum with an explicit method per order (`methods.len() == kmax + 1`,
/// or a single method used throughout).
pub fn purity_spectrum_with(v: &StateVector, kmax: usize, methods: &[Method]) -> Result<PuritySpectrum> {
    v.require_normalized(NORM_TOL)?;
    if kmax > v.n() {
        return invalid(format!("kmax = {kmax} exceeds n = {}", v.n()));
    }
    let methods: Vec<Method> = match methods.len() {
        1 => vec![methods[0]; kmax + 1],
        m if m == kmax + 1 => methods.to_vec(),
        _ => return invalid("method list length must be 1 or kmax + 1"),
    };
    let omegas = methods
        .iter()
        .enumerate()
        .map(|(k, &m)| twisted_purity(v, k, m))
        .collect::<Result<Vec<f64>>>()?;
    Ok(PuritySpectrum { l: v.l(), n: v.n(), omegas, methods, cross_check: None })
}

/// `C(n,k) · C(l-n,k)`.
pub fn purity_upper_bound(l: usize, n: usize, k: usize) -> f64 {
    (binomial_u128(n as u64, k as u64) * binomial_u128((l - n) as u64, k as u64)) as f64
}

/// `Z(β) = Σ_k ω_k β^{2k}`.
pub fn generating_function(spec: &PuritySpectrum, beta: f64) -> f64 {
    let b2 = beta * beta;
    spec.omegas.iter().rev().fold(0.0, |acc, w| acc * b2 + w)
}

/// `Tr ρ_k` expected under the unordered-subset convention.
pub fn expected_trace(n: usize, k: usize) -> f64 {
    binomial(n, k) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use std::sync::Arc;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn bell() -> StateVector {
        let h = c(std::f64::consts::FRAC_1_SQRT_2);
        StateVector::superposition(4, &[(&[1, 2], h), (&[3, 4], h)]).unwrap()
    }

    fn random_state(l: usize, n: usize, seed: u64) -> StateVector {
        let mut r = rng::seeded(seed);
        let basis = Arc::new(FockBasis::new(l, n).unwrap());
        StateVector::from_fn(basis, |_| rng::complex_normal(&mut r, 1.0)).normalized().unwrap()
    }

    fn diag(m: &DMatrix<Complex64>) -> Vec<f64> {
        (0..m.nrows()).map(|i| m[(i, i)].re).collect()
    }

    #[test]
    fn rdm_examples() {
        let v = StateVector::basis_state(4, &[1, 2]).unwrap();
        let r = rdm(&v, 1).unwrap();
        assert_eq!(diag(&r.matrix), vec![1.0, 1.0, 0.0, 0.0]);
        let t = twisted_rdm_direct(&v, 1).unwrap();
        assert_eq!(diag(&t.matrix), vec![0.0, 0.0, 1.0, 1.0]);

        let r = rdm(&bell(), 1).unwrap();
        let d = DMatrix::from_diagonal_element(4, 4, c(0.5));
        assert!((r.matrix - d).norm() < 1e-15);

        assert!(rdm(&v, 0).is_err());
        assert!(rdm(&v, 3).is_err());
    }

    #[test]
    fn traces_and_positivity() {
        let v = random_state(7, 3, 5);
        for k in 1..=3 {
            let r = rdm(&v, k).unwrap();
            let t = twisted_rdm_direct(&v, k).unwrap();
            assert!((r.trace().re - binomial(3, k) as f64).abs() < 1e-12);
            assert!((t.trace().re - binomial(4, k) as f64).abs() < 1e-12);
            assert!(r.hermiticity_defect() < 1e-12);
            assert!(t.hermiticity_defect() < 1e-12);
            let ev = r.matrix.clone().symmetric_eigen().eigenvalues;
            assert!(ev.iter().all(|&e| e > -1e-10));
        }
        let full = rdm(&v, 3).unwrap();
        assert!((full.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn twisted_one_body_is_hole_matrix() {
        let v = random_state(6, 3, 9);
        let r = rdm(&v, 1).unwrap();
        let t = twisted_rdm_direct(&v, 1).unwrap();
        let id = DMatrix::<Complex64>::identity(6, 6);
        assert!((&t.matrix - (&id - &r.matrix)).iter().all(|z| z.norm() < 1e-12));
        let rec = twisted_rdm_from_rdms(&[r]).unwrap();
        assert!((rec.matrix - t.matrix).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn twisted_reconstruction_matches_direct() {
        for (l, n, seed) in [(6, 3, 1), (7, 3, 2), (8, 4, 3), (7, 4, 4)] {
            let v = random_state(l, n, seed);
            let rdms: Vec<KRdm> = (1..=n).map(|k| rdm(&v, k).unwrap()).collect();
            for k in 1..=n {
                let rec = twisted_rdm_from_rdms(&rdms[..k]).unwrap();
                let direct = twisted_rdm_direct(&v, k).unwrap();
                let err = (rec.matrix - direct.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(err < 1e-10, "(l, n, k) = ({l}, {n}, {k}): {err:e}");
            }
        }
    }

    #[test]
    fn product_state_twisted_pairs() {
        let v = StateVector::basis_state(5, &[1, 2, 3]).unwrap();
        let rdms: Vec<KRdm> = (1..=2).map(|k| rdm(&v, k).unwrap()).collect();
        let rec = twisted_rdm_from_rdms(&rdms).unwrap();
        // only the hole pair (4,5) is occupied in the twisted matrix
        let d = diag(&rec.matrix);
        let holes = ModeSet::from_modes(&[4, 5]).unwrap();
        let hi = FockBasis::new(5, 2).unwrap().rank(holes).unwrap();
        for (i, x) in d.iter().enumerate() {
            assert!((x - if i == hi { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_rejects_mixed_inputs() {
        let a = rdm(&random_state(6, 3, 1), 1).unwrap();
        let b = rdm(&random_state(6, 2, 1), 2).unwrap();
        assert!(twisted_rdm_from_rdms(&[a.clone(), b]).is_err());
        let t = twisted_rdm_direct(&random_state(6, 3, 1), 1).unwrap();
        assert!(twisted_rdm_from_rdms(&[t]).is_err());
        assert!(twisted_rdm_from_rdms(&[]).is_err());
    }

    #[test]
    fn purity_examples() {
        let s = StateVector::basis_state(6, &[1, 2, 3]).unwrap();
        let b = bell();
        for m in Method::ALL {
            assert!(twisted_purity(&s, 1, m).unwrap().abs() < 1e-12);
            assert!((twisted_purity(&b, 1, m).unwrap() - 1.0).abs() < 1e-12);
            assert!((twisted_purity(&b, 2, m).unwrap() - 1.0).abs() < 1e-12);
            assert!((twisted_purity(&b, 0, m).unwrap() - 1.0).abs() < 1e-12);
        }
        let mut u = b.clone();
        u.scale(c(1.1));
        assert!(matches!(twisted_purity(&u, 1, Method::RdmTrace), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn spectrum_and_csv() {
        let s = StateVector::basis_state(6, &[1, 2, 3]).unwrap();
        let spec = purity_spectrum(&s, 3).unwrap();
        assert_eq!(spec.omegas, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(spec.cross_check, Some(0.0));
        let csv = bell_spectrum().to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,omega");
        assert_eq!(lines.len(), 4);
        let (k, w) = lines[2].split_once(',').unwrap();
        assert_eq!(k, "1");
        assert!(w.contains('e') && w.split('e').next().unwrap().len() == 18);
        assert!((w.parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert!(purity_spectrum(&s, 4).is_err());
        let v = random_state(6, 2, 3);
        let spec = purity_spectrum(&v, 2).unwrap();
        assert_eq!(spec.omegas.len(), 3);
        let v = random_state(5, 4, 3);
        let spec = purity_spectrum(&v, 4).unwrap();
        assert_eq!(&spec.omegas[2..], &[0.0, 0.0, 0.0]);
    }

    fn bell_spectrum() -> PuritySpectrum {
        purity_spectrum(&bell(), 2).unwrap()
    }

    #[test]
    fn bounds_and_generating_function() {
        assert_eq!(purity_upper_bound(12, 6, 6), 1.0);
        assert_eq!(purity_upper_bound(4, 2, 1), 4.0);
        assert_eq!(purity_upper_bound(8, 4, 2), 36.0);
        let z = generating_function(&bell_spectrum(), 1.0);
        assert!((z - 3.0).abs() < 1e-12);
        let z = generating_function(&bell_spectrum(), 2.0);
        assert!((z - 21.0).abs() < 1e-12);
        let s = purity_spectrum(&StateVector::basis_state(6, &[1, 4]).unwrap(), 2).unwrap();
        assert_eq!(generating_function(&s, 0.7), 1.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("trace".parse::<Method>().is_err());
    }
}
