use std::io::Write;

use rayon::prelude::*;

use twistlab::corrmeas::{self, max_order, purity_upper_bound, rdm, twisted_purity, Method};
use twistlab::{samples, Complex64, StateVector};

use crate::commands::check_sector;
use crate::exit::{Failure, INVARIANT};
use crate::output::{sci, sink, summary, Stamp};
use crate::{Suite, VerifyArgs};

struct Check {
    trial: usize,
    name: &'static str,
    k: usize,
    value: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.tol
    }
}

pub fn run(a: &VerifyArgs, stamp: &Stamp) -> Result<(), Failure> {
    check_sector(a.l, a.n)?;
    if a.n == 0 || a.n == a.l {
        return Err(Failure::parse("need 0 < n < l"));
    }
    match a.suite {
        Suite::Invariants => invariants(a, stamp),
        Suite::Oddeven => oddeven(a, stamp),
    }
}

fn trial_seed(a: &VerifyArgs, t: usize) -> u64 {
    a.seed.wrapping_mul(1_000_003).wrapping_add(t as u64)
}

fn invariant_checks(a: &VerifyArgs, t: usize) -> twistlab::Result<Vec<Check>> {
    let (l, n) = (a.l, a.n);
    let seed = trial_seed(a, t);
    let top = max_order(l, n);
    let v = samples::random_state(l, n, seed)?;
    let rotated = samples::randomly_rotated(&v, 1.0, seed ^ 0x5bd1_e995)?;
    let slater = samples::random_slater(l, n, seed)?;
    let mut out = Vec::new();
    let mut push = |name, k, value, tol| out.push(Check { trial: t, name, k, value, tol });

    let mut rdms = Vec::new();
    for k in 0..=top {
        let per_method: Vec<f64> = Method::ALL.iter().map(|&m| twisted_purity(&v, k, m)).collect::<twistlab::Result<_>>()?;
        let hi = per_method.iter().cloned().fold(f64::MIN, f64::max);
        let lo = per_method.iter().cloned().fold(f64::MAX, f64::min);
        let w = per_method[0];
        push("method_agreement", k, hi - lo, 1e-10 * w.abs().max(1.0));
        push("upper_bound", k, w - purity_upper_bound(l, n, k), 1e-9);
        push("nonnegative", k, -lo, 1e-12);
        let wr = twisted_purity(&rotated, k, Method::auto(k))?;
        push("rotation_invariance", k, (wr - w).abs(), 1e-9);
        let ws = twisted_purity(&slater, k, Method::auto(k))?;
        if k == 0 {
            push("omega0_is_one", k, (w - 1.0).abs(), 1e-12);
        } else {
            push("slater_nullity", k, ws, 1e-10);
            let r = rdm(&v, k)?;
            push("rdm_trace", k, (r.trace() - Complex64::new(corrmeas::expected_trace(n, k), 0.0)).norm(), 1e-10);
            push("rdm_hermitian", k, r.hermiticity_defect(), 1e-12);
            rdms.push(r);
            let direct = corrmeas::twisted_rdm_direct(&v, k)?;
            let rebuilt = corrmeas::twisted_rdm_from_rdms(&rdms)?;
            let dev = (&direct.matrix - &rebuilt.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
            push("twisted_rdm_reconstruction", k, dev, 1e-10);
        }
    }
    Ok(out)
}

fn invariants(a: &VerifyArgs, stamp: &Stamp) -> Result<(), Failure> {
    let checks: Vec<Check> = (0..a.trials)
        .into_par_iter()
        .map(|t| invariant_checks(a, t))
        .collect::<twistlab::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut out = sink(a.out.as_deref())?;
    stamp.write_header(&mut out)?;
    writeln!(out, "trial,check,k,value,tolerance,pass")?;
    for c in &checks {
        writeln!(out, "{},{},{},{},{},{}", c.trial, c.name, c.k, sci(c.value), sci(c.tol), c.passed())?;
    }
    out.flush()?;
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed()).collect();
    summary(format!(
        "verify invariants l={} n={} trials={} seed={}: {} checks, {} failed",
        a.l,
        a.n,
        a.trials,
        a.seed,
        checks.len(),
        failed.len()
    ));
    if let Some(c) = failed.first() {
        return Err(Failure::new(
            INVARIANT,
            format!("invariant '{}' broken at trial {} k={}: {:e} > {:e}", c.name, c.trial, c.k, c.value, c.tol),
        ));
    }
    Ok(())
}

const PERTURBATIONS: [f64; 3] = [0.0, 1e-3, 1e-2];

struct PairRow {
    trial: usize,
    class_k: usize,
    eps: f64,
    r: usize,
    odd: f64,
    even: f64,
    odd_small: bool,
    even_small: bool,
}

/// Pattern of `(ω_{2r-1}, ω_{2r})` for a `G_k` state plus an `ε` admixture of a random state.
fn oddeven_rows(a: &VerifyArgs, t: usize) -> twistlab::Result<Vec<PairRow>> {
    let (l, n) = (a.l, a.n);
    let top = max_order(l, n);
    let seed = trial_seed(a, t);
    let class_k = 2 + t % top.max(1);
    let eps = PERTURBATIONS[(t / top.max(1)) % PERTURBATIONS.len()];
    let mut v = samples::rotated_ci_state(l, n, class_k, 1.0, seed)?;
    if eps > 0.0 {
        let noise: StateVector = samples::random_state(l, n, seed ^ 0x2545_f491)?;
        v.add_scaled(Complex64::new(eps, 0.0), &noise)?;
        v = v.normalized()?;
    }
    let spec = corrmeas::purity_spectrum(&v, n)?;
    let w = |k: usize| spec.omegas.get(k).copied().unwrap_or(0.0);
    let small = |k: usize| w(k) <= 1e-9 + 10.0 * eps * eps * purity_upper_bound(l, n, k.min(top));
    Ok((1..=top.div_ceil(2))
        .map(|r| PairRow {
            trial: t,
            class_k,
            eps,
            r,
            odd: w(2 * r - 1),
            even: w(2 * r),
            odd_small: small(2 * r - 1),
            even_small: small(2 * r),
        })
        .collect())
}

fn oddeven(a: &VerifyArgs, stamp: &Stamp) -> Result<(), Failure> {
    let rows: Vec<PairRow> = (0..a.trials)
        .into_par_iter()
        .map(|t| oddeven_rows(a, t))
        .collect::<twistlab::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut out = sink(a.out.as_deref())?;
    stamp.write_header(&mut out)?;
    writeln!(out, "trial,class_k,eps,r,omega_odd,omega_even,odd_small,even_small")?;
    let mut counts = [0usize; 4];
    for row in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.trial,
            row.class_k,
            sci(row.eps),
            row.r,
            sci(row.odd),
            sci(row.even),
            row.odd_small,
            row.even_small
        )?;
        counts[(row.odd_small as usize) << 1 | row.even_small as usize] += 1;
    }
    out.flush()?;
    summary(format!(
        "verify oddeven l={} n={} trials={} seed={}: pairs both_small={} odd_only={} even_only={} neither={}",
        a.l, a.n, a.trials, a.seed, counts[3], counts[2], counts[1], counts[0]
    ));
    Ok(())
}
