//! The polynomial ansatz `|v⟩ = v(G) · F(T_1, .., T_k) |G⟩` with
//! `T_j = Σ_{|P|=|Q|=j} θ_{P,Q} Ψ†_Q Ψ_P`, `P ⊂ G`, `Q ⊂ [l]∖G`.

mod generating;
mod quadrature;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use generating::{f_closed_complex, f_scalar, f_taylor, taylor_coefficient, DEFAULT_QUAD_TOL};
pub use quadrature::integrate;

use crate::combinatorics::binomial_u128;
use crate::error::{invalid, Error, Result};
use crate::fock::{sign_concat_unchecked, FockBasis, ModeSet, StateVector};
use crate::wick::{connected_amplitudes, excitations, nu_f64, ExcitationKey, PartitionVector};

pub const FIT_REFERENCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzParams {
    pub l: usize,
    pub n: usize,
    pub g: ModeSet,
    pub k: usize,
    pub v_g: Complex64,
    pub theta: BTreeMap<ExcitationKey, Complex64>,
}

impl AnsatzParams {
    /// All `θ = 0`.
    pub fn reference(l: usize, g: ModeSet, k: usize, v_g: Complex64) -> Result<Self> {
        let p = AnsatzParams { l, n: g.len(), g, k, v_g, theta: BTreeMap::new() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l > crate::fock::MAX_MODES || self.n > self.l || self.g.len() != self.n || !self.g.fits(self.l) {
            return invalid(format!("reference {} is not an n = {} subset of [{}]", self.g, self.n, self.l));
        }
        for key in self.theta.keys() {
            ExcitationKey::new(self.g, key.p, key.q)?;
            if key.order() == 0 || key.order() > self.k || !key.q.fits(self.l) {
                return invalid(format!("θ key ({}, {}) outside orders 1..={} or modes 1..={}", key.p, key.q, self.k, self.l));
            }
        }
        Ok(())
    }

    pub fn set(&mut self, p: ModeSet, q: ModeSet, value: Complex64) -> Result<()> {
        let key = ExcitationKey::new(self.g, p, q)?;
        if key.order() == 0 || key.order() > self.k || !q.fits(self.l) {
            return invalid(format!("θ key ({p}, {q}) not allowed at order k = {}", self.k));
        }
        self.theta.insert(key, value);
        Ok(())
    }

    pub fn get(&self, p: ModeSet, q: ModeSet) -> Complex64 {
        self.theta.get(&ExcitationKey { p, q }).copied().unwrap_or_default()
    }

    /// Largest `|θ - θ'|` over the union of keys.
    pub fn max_theta_diff(&self, other: &AnsatzParams) -> f64 {
        self.theta
            .keys()
            .chain(other.theta.keys())
            .map(|key| (self.get(key.p, key.q) - other.get(key.p, key.q)).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ParamsFile::from(self)).expect("params serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ParamsFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaJson {
    #[serde(rename = "P")]
    p: Vec<usize>,
    #[serde(rename = "Q")]
    q: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    l: usize,
    n: usize,
    #[serde(rename = "G")]
    g: Vec<usize>,
    k: usize,
    #[serde(rename = "vG")]
    v_g: ComplexJson,
    theta: Vec<ThetaJson>,
}

impl From<&AnsatzParams> for ParamsFile {
    fn from(p: &AnsatzParams) -> Self {
        ParamsFile {
            l: p.l,
            n: p.n,
            g: p.g.to_vec(),
            k: p.k,
            v_g: ComplexJson { re: p.v_g.re, im: p.v_g.im },
            theta: p
                .theta
                .iter()
                .map(|(key, z)| ThetaJson { p: key.p.to_vec(), q: key.q.to_vec(), re: z.re, im: z.im })
                .collect(),
        }
    }
}

impl TryFrom<ParamsFile> for AnsatzParams {
    type Error = Error;

    fn try_from(f: ParamsFile) -> Result<Self> {
        let g = ModeSet::from_modes(&f.g)?;
        if g.len() != f.n {
            return invalid(format!("G has {} modes, n = {}", g.len(), f.n));
        }
        let mut params = AnsatzParams::reference(f.l, g, f.k, Complex64::new(f.v_g.re, f.v_g.im))?;
        for t in f.theta {
            let (p, q) = (ModeSet::from_modes(&t.p)?, ModeSet::from_modes(&t.q)?);
            if params.theta.contains_key(&ExcitationKey { p, q }) {
                return invalid(format!("duplicate θ entry for P = {p}, Q = {q}"));
            }
            params.set(p, q, Complex64::new(t.re, t.im))?;
        }
        Ok(params)
    }
}

/// `Σ_{k'=1}^{k} C(n,k') C(l-n,k')`.
pub fn parameter_count(l: usize, n: usize, k: usize) -> u128 {
    (1..=k).map(|j| binomial_u128(n as u64, j as u64) * binomial_u128((l - n) as u64, j as u64)).sum()
}

/// `T_j |v⟩` for the order-`j` part of `θ`.
fn apply_t(params: &AnsatzParams, j: usize, v: &StateVector) -> StateVector {
    let mut out = v.zeros_like();
    let terms: Vec<(ModeSet, ModeSet, Complex64)> = params
        .theta
        .iter()
        .filter(|(key, z)| key.order() == j && **z != Complex64::new(0.0, 0.0))
        .map(|(key, z)| (key.p, key.q, *z))
        .collect();
    let basis = v.basis();
    for (s, a) in v.iter() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for &(p, q, th) in &terms {
            if !p.is_subset_of(s) {
                continue;
            }
            let rest = s.difference(p);
            if !q.is_disjoint(rest) {
                continue;
            }
            let sign = sign_concat_unchecked(rest, p) * sign_concat_unchecked(rest, q);
            let t = basis.rank(rest.union(q)).expect("same sector");
            out.amps_mut()[t] += th * a * sign as f64;
        }
    }
    out
}

/// `T_k^{m_k} .. T_1^{m_1} |v⟩`.
pub fn apply_monomial_t(params: &AnsatzParams, m: &PartitionVector, v: &StateVector) -> StateVector {
    let mut cur = v.clone();
    for (i, &mi) in m.entries().iter().enumerate() {
        for _ in 0..mi {
            cur = apply_t(params, i + 1, &cur);
        }
    }
    cur
}

/// Taylor form of the ansatz keeping terms with `k·m ≤ max_weight`.
pub fn build_state_truncated(params: &AnsatzParams, max_weight: u32) -> Result<StateVector> {
    params.validate()?;
    let basis = Arc::new(FockBasis::new(params.l, params.n)?);
    let mut reference = StateVector::from_fn(basis, |_| Complex64::new(0.0, 0.0));
    reference.set(params.g, Complex64::new(1.0, 0.0))?;
    let mut out = reference.zeros_like();
    for m in PartitionVector::all_up_to(params.k, max_weight) {
        let coeff = nu_f64(&m) / m.factorial_product() as f64;
        let term = apply_monomial_t(params, &m, &reference);
        out.add_scaled(Complex64::new(coeff, 0.0) * params.v_g, &term)?;
    }
    Ok(out)
}

/// `v(G) Σ_m ν(m)/Π m_i! · T^m |G⟩`; terms with `k·m > min(n, l-n)` vanish.
pub fn build_state(params: &AnsatzParams) -> Result<StateVector> {
    let cap = params.n.min(params.l - params.n) as u32;
    build_state_truncated(params, cap)
}

/// `θ_{P,Q} = v^{(c)}_{P,Q} σ(G∖P, P)` and `v(G)` read off the state.
pub fn fit(v: &StateVector, g: ModeSet, k: usize) -> Result<AnsatzParams> {
    if g.len() != v.n() || !g.fits(v.l()) {
        return invalid(format!("reference {g} is not an n = {} subset of [{}]", v.n(), v.l()));
    }
    let v_g = v.amplitude(g);
    if v_g.norm() <= FIT_REFERENCE_TOL {
        return Err(Error::ReferenceAmplitudeZero { magnitude: v_g.norm() });
    }
    let ca = connected_amplitudes(v, g, k)?;
    let mut params = AnsatzParams::reference(v.l(), g, k, v_g)?;
    for key in excitations(v.l(), g, 1..=k) {
        let c = ca.get(key.p, key.q)?;
        if c != Complex64::new(0.0, 0.0) {
            let sign = sign_concat_unchecked(g.difference(key.p), key.p) as f64;
            params.theta.insert(key, c * sign);
        }
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_mode_unitary, apply_monomial, mode_unitary};
    use crate::rng;

    fn ms(m: &[usize]) -> ModeSet {
        ModeSet::from_modes(m).unwrap()
    }

    fn random_params(l: usize, g: ModeSet, k: usize, scale: f64, seed: u64) -> AnsatzParams {
        let mut r = rng::seeded(seed);
        let mut p = AnsatzParams::reference(l, g, k, Complex64::new(0.8, 0.3)).unwrap();
        for key in excitations(l, g, 1..=k) {
            p.theta.insert(key, rng::complex_normal(&mut r, scale * scale));
        }
        p
    }

    #[test]
    fn counts() {
        assert_eq!(parameter_count(4, 2, 1), 4);
        assert_eq!(parameter_count(12, 6, 2), 261);
        assert_eq!(parameter_count(12, 6, 6), 923);
    }

    #[test]
    fn zero_theta_gives_reference() {
        let p = AnsatzParams::reference(6, ms(&[2, 3, 5]), 2, Complex64::new(0.0, 2.0)).unwrap();
        let v = build_state(&p).unwrap();
        assert_eq!(v.amplitude(ms(&[2, 3, 5])), Complex64::new(0.0, 2.0));
        assert_eq!(v.norm_sqr(), 4.0);
    }

    #[test]
    fn first_order_is_exponential() {
        let p = random_params(7, ms(&[1, 2, 3]), 1, 0.2, 4);
        let v = build_state(&p).unwrap();
        // exp(T_1)|G⟩ by explicit power series
        let mut g = StateVector::zeros(7, 3).unwrap();
        g.set(p.g, Complex64::new(1.0, 0.0)).unwrap();
        let mut term = g.clone();
        let mut sum = g.clone();
        for j in 1..=4 {
            term = apply_t(&p, 1, &term);
            term.scale(Complex64::new(1.0 / j as f64, 0.0));
            sum.add_scaled(Complex64::new(1.0, 0.0), &term).unwrap();
        }
        sum.scale(p.v_g);
        assert!(sum.max_abs_diff(&v).unwrap() < 1e-14);
    }

    #[test]
    fn single_double_excitation() {
        let g = ms(&[1, 2, 3, 4]);
        let mut p = AnsatzParams::reference(8, g, 2, Complex64::new(1.0, 0.0)).unwrap();
        let (pp, qq) = (ms(&[2, 4]), ms(&[6, 7]));
        p.set(pp, qq, Complex64::new(1.0, 0.0)).unwrap();
        let v = build_state(&p).unwrap();
        let target = g.difference(pp).union(qq);
        let sign = sign_concat_unchecked(g.difference(pp), pp) * sign_concat_unchecked(g.difference(pp), qq);
        assert_eq!(v.amplitude(g), Complex64::new(1.0, 0.0));
        assert_eq!(v.amplitude(target), Complex64::new(sign as f64, 0.0));
        assert_eq!(v.norm_sqr(), 2.0);
    }

    #[test]
    fn nilpotency_cuts_the_series() {
        let p = random_params(8, ms(&[1, 3, 4, 7]), 2, 0.5, 9);
        let exact = build_state(&p).unwrap();
        let longer = build_state_truncated(&p, 9).unwrap();
        assert!(exact.max_abs_diff(&longer).unwrap() == 0.0);
        let high = PartitionVector::new(&[1, 2]);
        let mut gs = StateVector::zeros(8, 4).unwrap();
        gs.set(p.g, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(apply_monomial_t(&p, &high, &gs).norm_sqr(), 0.0);
    }

    #[test]
    fn t_operators_commute() {
        let p = random_params(8, ms(&[1, 2, 5, 6]), 2, 0.7, 2);
        let mut r = rng::seeded(1);
        let basis = Arc::new(FockBasis::new(8, 4).unwrap());
        let v = StateVector::from_fn(basis, |_| rng::complex_normal(&mut r, 1.0));
        let a = apply_t(&p, 1, &apply_t(&p, 2, &v));
        let b = apply_t(&p, 2, &apply_t(&p, 1, &v));
        assert!(a.max_abs_diff(&b).unwrap() < 1e-13);
    }

    #[test]
    fn t_matches_monomial_action() {
        let p = random_params(6, ms(&[1, 2, 4]), 2, 1.0, 6);
        let mut g = StateVector::zeros(6, 3).unwrap();
        g.set(p.g, Complex64::new(1.0, 0.0)).unwrap();
        let mut expect = g.zeros_like();
        for (key, th) in p.theta.iter().filter(|(k, _)| k.order() == 2) {
            expect.add_scaled(*th, &apply_monomial(&g, key.q, key.p).unwrap()).unwrap();
        }
        assert!(apply_t(&p, 2, &g).max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn fit_inverts_build() {
        for (l, g, k, seed) in [(8, ms(&[1, 2, 3, 4]), 2, 1), (8, ms(&[2, 4, 5, 7]), 2, 2), (9, ms(&[1, 5, 6, 8]), 3, 3)] {
            let p = random_params(l, g, k, 0.4, seed);
            let v = build_state(&p).unwrap();
            let q = fit(&v, g, k).unwrap();
            assert!(p.max_theta_diff(&q) < 1e-9, "seed {seed}");
            assert!((p.v_g - q.v_g).norm() < 1e-14);
            // connected amplitudes above k vanish
            let ca = connected_amplitudes(&v, g, k + 1).unwrap();
            assert!(ca.max_abs_at_order(k + 1) < 1e-9);
        }
    }

    #[test]
    fn slater_round_trip() {
        let mut r = rng::seeded(12);
        let u = mode_unitary(&rng::random_hermitian(&mut r, 8, 0.6)).unwrap();
        let v = apply_mode_unitary(&StateVector::basis_state(8, &[1, 2, 3, 4]).unwrap(), &u).unwrap();
        let p = fit(&v, ms(&[1, 2, 3, 4]), 1).unwrap();
        let w = build_state(&p).unwrap();
        assert!(v.max_abs_diff(&w).unwrap() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let v = StateVector::basis_state(6, &[1, 2, 3]).unwrap();
        assert!(matches!(fit(&v, ms(&[1, 2, 4]), 1), Err(Error::ReferenceAmplitudeZero { .. })));
        assert!(fit(&v, ms(&[1, 2]), 1).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = random_params(6, ms(&[1, 2, 4]), 2, 1.0, 8);
        let q = AnsatzParams::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        let bad = [
            r#"{"l":4,"n":2,"G":[1,2],"k":1,"vG":{"re":1,"im":0},"theta":[{"P":[1],"Q":[2],"re":1,"im":0}]}"#,
            r#"{"l":4,"n":2,"G":[1,2],"k":1,"vG":{"re":1,"im":0},"theta":[{"P":[1,2],"Q":[3,4],"re":1,"im":0}]}"#,
            r#"{"l":4,"n":2,"G":[1,2,3],"k":1,"vG":{"re":1,"im":0},"theta":[]}"#,
            r#"{"l":4,"n":2,"G":[1,2],"k":1,"vG":{"re":1,"im":0},"theta":[{"P":[1],"Q":[3],"re":1,"im":0},{"P":[1],"Q":[3],"re":1,"im":0}]}"#,
        ];
        for text in bad {
            assert!(AnsatzParams::from_json(text).is_err(), "{text}");
        }
    }
}
