//! Connected amplitudes and the extended amplitude Wick rule.
//!
//! Excitations are taken relative to a reference set `G` (`|G| = n`): `P ⊂ G`
//! is removed, `Q ⊂ [l]∖G` is added. The signed excitation ratio is
//! `r(P,Q) = σ(G∖P, Q) · v(G∖P ∪ Q) / v(G)`, which reduces to the plain ratio
//! when `G = (1..n)` since then `Q > G`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::combinatorics::{binomial_u128, subsets_of_size};
use crate::error::{invalid, Error, Result};
use crate::fock::{sign_chain, sign_concat_unchecked, ModeSet, StateVector};

pub const REFERENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcitationKey {
    pub p: ModeSet,
    pub q: ModeSet,
}

impl ExcitationKey {
    pub fn new(g: ModeSet, p: ModeSet, q: ModeSet) -> Result<Self> {
        if p.len() != q.len() || !p.is_subset_of(g) || !q.is_disjoint(g) {
            return invalid(format!("({p}, {q}) is not an excitation of {g}"));
        }
        Ok(ExcitationKey { p, q })
    }

    pub fn order(&self) -> usize {
        self.p.len()
    }
}

/// All excitations of `g` inside `[l]` with order in `orders`.
pub fn excitations(l: usize, g: ModeSet, orders: std::ops::RangeInclusive<usize>) -> Vec<ExcitationKey> {
    let holes = g.complement(l);
    let mut out = Vec::new();
    for m in orders {
        for p in subsets_of_size(g.bits(), m) {
            for q in subsets_of_size(holes.bits(), m) {
                out.push(ExcitationKey { p: ModeSet::from_bits(p), q: ModeSet::from_bits(q) });
            }
        }
    }
    out
}

fn reference_amplitude(v: &StateVector, g: ModeSet, tol: f64) -> Result<Complex64> {
    if g.len() != v.n() || !g.fits(v.l()) {
        return invalid(format!("reference {g} is not an n = {} subset of [{}]", v.n(), v.l()));
    }
    let vg = v.amplitude(g);
    if vg.norm() <= tol {
        return Err(Error::ReferenceAmplitudeZero { magnitude: vg.norm() });
    }
    Ok(vg)
}

/// `r(P,Q) = σ(G∖P,Q) v(G∖P∪Q) / v(G)`.
pub fn excitation_ratio(v: &StateVector, g: ModeSet, p: ModeSet, q: ModeSet) -> Result<Complex64> {
    let vg = reference_amplitude(v, g, REFERENCE_TOL)?;
    ExcitationKey::new(g, p, q)?;
    Ok(ratio_unchecked(v, g, vg, p, q))
}

fn ratio_unchecked(v: &StateVector, g: ModeSet, vg: Complex64, p: ModeSet, q: ModeSet) -> Complex64 {
    let rest = g.difference(p);
    v.amplitude(rest.union(q)) * sign_concat_unchecked(rest, q) as f64 / vg
}

/// Excitation ratios up to a fixed order.
#[derive(Clone, Debug)]
pub struct ExcitationTable {
    pub g: ModeSet,
    pub order: usize,
    pub entries: HashMap<ExcitationKey, Complex64>,
}

impl ExcitationTable {
    /// Ratios `r(P,Q)` of `v` for `1 ≤ |P| ≤ order`.
    pub fn from_state(v: &StateVector, g: ModeSet, order: usize) -> Result<Self> {
        let vg = reference_amplitude(v, g, REFERENCE_TOL)?;
        let entries = excitations(v.l(), g, 1..=order)
            .into_iter()
            .map(|key| (key, ratio_unchecked(v, g, vg, key.p, key.q)))
            .collect();
        Ok(ExcitationTable { g, order, entries })
    }

    pub fn get(&self, p: ModeSet, q: ModeSet) -> Result<Complex64> {
        if p.is_empty() && q.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        self.entries
            .get(&ExcitationKey { p, q })
            .copied()
            .ok_or_else(|| Error::MissingAmplitude { p: p.to_string(), q: q.to_string() })
    }
}

/// `(-1)^{|P̄'|+1} (|P'|/|P|) σ(P̄',P') σ(Q',Q̄')` for one bipartition.
fn bipartition_weight(p1: ModeSet, p2: ModeSet, q1: ModeSet, q2: ModeSet, total: usize) -> f64 {
    let sign = if p2.len() % 2 == 0 { -1 } else { 1 } * sign_concat_unchecked(p2, p1) * sign_concat_unchecked(q1, q2);
    sign as f64 * p1.len() as f64 / total as f64
}

/// `Σ_{P' ⊊ P, Q' ⊊ Q} weight · f(P',Q') f(P̄',Q̄')` over nonempty proper blocks.
fn bipartition_sum(
    p: ModeSet,
    q: ModeSet,
    f: &mut impl FnMut(ModeSet, ModeSet) -> Result<Complex64>,
) -> Result<Complex64> {
    let m = p.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for size in 1..m {
        for p1 in subsets_of_size(p.bits(), size) {
            let p1 = ModeSet::from_bits(p1);
            let p2 = p.difference(p1);
            for q1 in subsets_of_size(q.bits(), size) {
                let q1 = ModeSet::from_bits(q1);
                let q2 = q.difference(q1);
                let w = bipartition_weight(p1, p2, q1, q2, m);
                let a = f(p1, q1)?;
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                acc += a * f(p2, q2)? * w;
            }
        }
    }
    Ok(acc)
}

/// Connected amplitudes `v^{(c)}_{P,Q}` for `1 ≤ |P| ≤ k`.
#[derive(Clone, Debug)]
pub struct ConnectedAmplitudes {
    pub g: ModeSet,
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub table: HashMap<ExcitationKey, Complex64>,
}

impl ConnectedAmplitudes {
    pub fn get(&self, p: ModeSet, q: ModeSet) -> Result<Complex64> {
        self.table
            .get(&ExcitationKey { p, q })
            .copied()
            .ok_or_else(|| Error::MissingAmplitude { p: p.to_string(), q: q.to_string() })
    }

    /// Largest `|v^{(c)}|` among entries of order exactly `m`.
    pub fn max_abs_at_order(&self, m: usize) -> f64 {
        self.table.iter().filter(|(key, _)| key.order() == m).map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

/// `v^{(c)}_{P,Q} = r(P,Q) - Σ_{P'⊊P, Q'⊊Q} weight · r(P',Q') r(P̄',Q̄')`.
pub fn connected_amplitudes(v: &StateVector, g: ModeSet, k: usize) -> Result<ConnectedAmplitudes> {
    let vg = reference_amplitude(v, g, REFERENCE_TOL)?;
    let mut table = HashMap::new();
    let mut ratio = |p: ModeSet, q: ModeSet| Ok(ratio_unchecked(v, g, vg, p, q));
    for key in excitations(v.l(), g, 1..=k) {
        let c = ratio(key.p, key.q)? - bipartition_sum(key.p, key.q, &mut ratio)?;
        table.insert(key, c);
    }
    Ok(ConnectedAmplitudes { g, k, l: v.l(), n: v.n(), table })
}

/// Predicted `r(P,Q)` for `|P| > low.order`, recursing through lower orders
/// and bottoming out on the supplied ratios.
pub fn wick_reconstruct_recursive(low: &ExcitationTable, p: ModeSet, q: ModeSet) -> Result<Complex64> {
    ExcitationKey::new(low.g, p, q)?;
    if p.len() <= low.order {
        return invalid(format!("|P| = {} is not above the table order {}", p.len(), low.order));
    }
    let mut memo = HashMap::new();
    recurse(low, p, q, &mut memo)
}

fn recurse(
    low: &ExcitationTable,
    p: ModeSet,
    q: ModeSet,
    memo: &mut HashMap<ExcitationKey, Complex64>,
) -> Result<Complex64> {
    if p.len() <= low.order {
        return low.get(p, q);
    }
    let key = ExcitationKey { p, q };
    if let Some(&x) = memo.get(&key) {
        return Ok(x);
    }
    let x = bipartition_sum(p, q, &mut |a, b| recurse(low, a, b, memo))?;
    memo.insert(key, x);
    Ok(x)
}

/// Block-size multiplicities `m = (m_1, .., m_k)`; trailing zeros are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionVector(Vec<u32>);

impl PartitionVector {
    pub fn new(m: &[u32]) -> Self {
        let mut v = m.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        PartitionVector(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|m| = Σ m_i`.
    pub fn count(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `k·m = Σ i m_i`.
    pub fn weight(&self) -> u32 {
        self.0.iter().enumerate().map(|(i, &m)| (i as u32 + 1) * m).sum()
    }

    /// `Π m_i!`.
    pub fn factorial_product(&self) -> u128 {
        self.0.iter().map(|&m| crate::combinatorics::factorial_u128(m as u64)).product()
    }

    /// All vectors with `k·m ≤ max_weight` and at most `k` components.
    pub fn all_up_to(k: usize, max_weight: u32) -> Vec<PartitionVector> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; k];
        fn go(i: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<PartitionVector>) {
            if i == cur.len() {
                out.push(PartitionVector::new(cur));
                return;
            }
            let size = i as u32 + 1;
            for m in 0..=budget / size {
                cur[i] = m;
                go(i + 1, budget - m * size, cur, out);
            }
            cur[i] = 0;
        }
        go(0, max_weight, &mut cur, &mut out);
        out
    }

    /// Vectors `m'` with `m'_i ≤ m_i` componentwise, excluding `m` itself.
    fn strictly_below(&self) -> Vec<PartitionVector> {
        let mut out = vec![Vec::new()];
        for &mi in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=mi).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(|v| PartitionVector::new(&v)).filter(|v| v != self).collect()
    }

    fn minus(&self, other: &PartitionVector) -> PartitionVector {
        let d: Vec<u32> = self.0.iter().enumerate().map(|(i, &a)| a - other.0.get(i).copied().unwrap_or(0)).collect();
        PartitionVector::new(&d)
    }
}

pub type Rational = Ratio<i128>;

fn nu_memo() -> &'static Mutex<HashMap<PartitionVector, Rational>> {
    static MEMO: OnceLock<Mutex<HashMap<PartitionVector, Rational>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `ν(m)` in exact rational arithmetic.
pub fn nu(m: &PartitionVector) -> Rational {
    if m.count() <= 1 {
        return Rational::from_integer(1);
    }
    if let Some(x) = nu_memo().lock().expect("memo lock").get(m) {
        return *x;
    }
    let total = m.weight() as i128;
    let mut acc = Rational::from_integer(0);
    for sub in m.strictly_below() {
        let w = sub.weight() as i128;
        if w == 0 {
            continue;
        }
        let rest = m.minus(&sub);
        let sign = if (rest.weight() + 1) % 2 == 0 { 1 } else { -1 };
        let mut binom: i128 = 1;
        for (i, &mi) in m.0.iter().enumerate() {
            binom *= binomial_u128(mi as u64, sub.0.get(i).copied().unwrap_or(0) as u64) as i128;
        }
        acc += Rational::new(sign * w * binom, total) * nu(&sub) * nu(&rest);
    }
    nu_memo().lock().expect("memo lock").insert(m.clone(), acc);
    acc
}

pub fn nu_f64(m: &PartitionVector) -> f64 {
    let r = nu(m);
    *r.numer() as f64 / *r.denom() as f64
}

/// One partition `R = {(P'_a, Q'_a)}` of `(P, Q)`, blocks ordered by their minimal `P` mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<(ModeSet, ModeSet)>,
}

impl Partition {
    pub fn m(&self, k: usize) -> PartitionVector {
        let mut m = vec![0u32; k.max(1)];
        for (p, _) in &self.blocks {
            m[p.len() - 1] += 1;
        }
        PartitionVector::new(&m)
    }

    /// `σ(R) = σ(P'_last, .., P'_1) σ(Q'_1, .., Q'_last)`.
    pub fn sign(&self) -> i32 {
        let ps: Vec<ModeSet> = self.blocks.iter().rev().map(|b| b.0).collect();
        let qs: Vec<ModeSet> = self.blocks.iter().map(|b| b.1).collect();
        sign_chain(&ps).expect("disjoint") * sign_chain(&qs).expect("disjoint")
    }
}

/// `Part_k(P, Q)`: partitions into blocks with `|P'_a| = |Q'_a| ≤ k`.
pub fn partitions(p: ModeSet, q: ModeSet, k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if p.len() != q.len() {
        return out;
    }
    let mut cur = Vec::new();
    fn go(p: ModeSet, q: ModeSet, k: usize, cur: &mut Vec<(ModeSet, ModeSet)>, out: &mut Vec<Partition>) {
        let Some(first) = p.min_mode() else {
            out.push(Partition { blocks: cur.clone() });
            return;
        };
        let head = ModeSet::single(first);
        let others = p.difference(head);
        for size in 1..=k.min(p.len()) {
            for extra in subsets_of_size(others.bits(), size - 1) {
                let pb = head.union(ModeSet::from_bits(extra));
                for qb in subsets_of_size(q.bits(), size) {
                    let qb = ModeSet::from_bits(qb);
                    cur.push((pb, qb));
                    go(p.difference(pb), q.difference(qb), k, cur, out);
                    cur.pop();
                }
            }
        }
    }
    go(p, q, k, &mut cur, &mut out);
    out
}

/// `Σ_{R ∈ Part_k(P,Q)} ν(m(R)) σ(R) Π v^{(c)}`.
pub fn cumulant_reconstruct(ca: &ConnectedAmplitudes, p: ModeSet, q: ModeSet) -> Result<Complex64> {
    ExcitationKey::new(ca.g, p, q)?;
    if !q.fits(ca.l) {
        return invalid(format!("{q} exceeds l = {}", ca.l));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for r in partitions(p, q, ca.k) {
        let mut prod = Complex64::new(1.0, 0.0);
        for &(pb, qb) in &r.blocks {
            prod *= ca.get(pb, qb)?;
            if prod == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        if prod != Complex64::new(0.0, 0.0) {
            acc += prod * nu_f64(&r.m(ca.k)) * r.sign() as f64;
        }
    }
    Ok(acc)
}
