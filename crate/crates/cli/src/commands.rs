use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use twistlab::analytic::{self, ratio_to_f64};
use twistlab::ansatz::{self, AnsatzParams};
use twistlab::combinatorics::binomial_u128;
use twistlab::corrmeas::{self, max_order, Method, PuritySpectrum, NORM_TOL};
use twistlab::fock::io::{load_state, save_state};
use twistlab::models::{self, HamiltonianMatrix};
use twistlab::{ModeSet, StateVector};

use crate::exit::Failure;
use crate::output::{sci, sink, summary, Stamp};
use crate::{BellArgs, BuildArgs, FitArgs, HaarArgs, HubbardArgs, PurityArgs, SykArgs, SykVariant};

/// Largest sector dimension the state-based commands accept.
pub const MAX_STATE_DIM: u128 = 200_000;

pub fn check_sector(l: usize, n: usize) -> Result<(), Failure> {
    if n > l {
        return Err(Failure::parse(format!("n = {n} exceeds l = {l}")));
    }
    let dim = binomial_u128(l as u64, n as u64);
    if dim > MAX_STATE_DIM {
        return Err(Failure::dimension(format!("sector dimension {dim} exceeds {MAX_STATE_DIM}")));
    }
    Ok(())
}

fn load_normalized(path: &Path) -> Result<StateVector, Failure> {
    let v = load_state(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    v.require_normalized(NORM_TOL)?;
    Ok(v)
}

fn format_omegas(omegas: &[f64]) -> String {
    let parts: Vec<String> = omegas.iter().map(|w| format!("{w:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn write_spectrum(spec: &PuritySpectrum, path: Option<&Path>, stamp: &Stamp) -> Result<(), Failure> {
    let mut out = sink(path)?;
    spec.write_csv(&mut out, stamp.get())?;
    out.flush()?;
    Ok(())
}

pub fn purity(a: &PurityArgs, stamp: &Stamp) -> Result<(), Failure> {
    let v = load_normalized(&a.state_file)?;
    let kmax = a.kmax.unwrap_or(v.n());
    if kmax > v.n() {
        return Err(Failure::parse(format!("--kmax {kmax} exceeds n = {}", v.n())));
    }
    match a.method.as_str() {
        "all" => {
            let spectra = Method::ALL
                .iter()
                .map(|&m| corrmeas::purity_spectrum_with(&v, kmax, &[m]))
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = sink(a.out.as_deref())?;
            stamp.write_header(&mut out)?;
            let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
            writeln!(out, "k,{}", names.join(","))?;
            let mut spread: f64 = 0.0;
            for k in 0..=kmax {
                let row: Vec<f64> = spectra.iter().map(|s| s.omegas[k]).collect();
                let hi = row.iter().cloned().fold(f64::MIN, f64::max);
                let lo = row.iter().cloned().fold(f64::MAX, f64::min);
                spread = spread.max((hi - lo) / hi.abs().max(1.0));
                let cells: Vec<String> = row.into_iter().map(sci).collect();
                writeln!(out, "{k},{}", cells.join(","))?;
            }
            out.flush()?;
            summary(format!(
                "purity l={} n={} kmax={kmax} methods=all omega={} max_relative_spread={spread:.3e}",
                v.l(),
                v.n(),
                format_omegas(&spectra[0].omegas)
            ));
        }
        name => {
            let spec = if name == "auto" {
                corrmeas::purity_spectrum(&v, kmax)?
            } else {
                let m = Method::from_str(name).map_err(|e| Failure::parse(e.to_string()))?;
                corrmeas::purity_spectrum_with(&v, kmax, &[m])?
            };
            write_spectrum(&spec, a.out.as_deref(), stamp)?;
            summary(format!("purity l={} n={} kmax={kmax} method={name} omega={}", v.l(), v.n(), format_omegas(&spec.omegas)));
        }
    }
    Ok(())
}

fn parse_state_index(s: &str) -> Result<usize, Failure> {
    if s == "ground" {
        return Ok(0);
    }
    s.parse().map_err(|_| Failure::parse(format!("--state must be 'ground' or an index, got '{s}'")))
}

fn emit_eigenstate(
    label: &str,
    energy: f64,
    v: &StateVector,
    out_spectrum: Option<&Path>,
    out_state: Option<&Path>,
    stamp: &Stamp,
) -> Result<(), Failure> {
    let spec = corrmeas::purity_spectrum(v, v.n())?;
    write_spectrum(&spec, out_spectrum, stamp)?;
    if let Some(p) = out_state {
        save_state(v, p)?;
    }
    summary(format!("{label} energy={energy:.12e} omega={}", format_omegas(&spec.omegas)));
    Ok(())
}

fn pick(h: &HamiltonianMatrix, index: usize, sz_up: Option<usize>) -> Result<(f64, StateVector), Failure> {
    let mut states = match sz_up {
        Some(up) => models::eigenstates_sz(h, up, index + 1)?,
        None => models::eigenstates(h, index + 1)?,
    };
    Ok(states.swap_remove(index))
}

pub fn hubbard(a: &HubbardArgs, stamp: &Stamp) -> Result<(), Failure> {
    if 2 * a.sites > 16 {
        return Err(Failure::dimension(format!("{} sites need {} modes; the cap is 16", a.sites, 2 * a.sites)));
    }
    let index = parse_state_index(&a.state)?;
    let sz_up = if a.sz_restrict {
        if a.sites % 2 != 0 {
            return Err(Failure::parse("--sz-restrict needs an even number of sites"));
        }
        Some(a.sites / 2)
    } else {
        None
    };
    let h = models::hubbard(a.sites, a.t, a.u)?;
    let (energy, v) = pick(&h, index, sz_up)?;
    let label = format!("hubbard sites={} t={} U={} state={index}", a.sites, a.t, a.u);
    emit_eigenstate(&label, energy, &v, a.out_spectrum.as_deref(), a.out_state.as_deref(), stamp)
}

pub fn syk(a: &SykArgs, stamp: &Stamp) -> Result<(), Failure> {
    check_sector(a.modes, a.modes / 2)?;
    let h = match a.variant {
        SykVariant::Literal => models::syk(a.modes, a.seed)?,
        SykVariant::Generic => models::syk_generic(a.modes, a.modes / 2, a.seed)?,
    };
    let (energy, v) = pick(&h, 0, None)?;
    let label = format!("syk modes={} seed={} variant={:?}", a.modes, a.seed, a.variant);
    emit_eigenstate(&label, energy, &v, a.out.as_deref(), a.out_state.as_deref(), stamp)
}

pub struct HaarStats {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Sample mean and standard error of `ω_0..ω_kmax` over `samples` seeded real-Haar states.
pub fn haar_statistics(l: usize, n: usize, kmax: usize, samples: usize, seed: u64) -> Result<HaarStats, Failure> {
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let v = analytic::haar_sample_stream(l, n, seed, i)?;
            (0..=kmax).map(|k| corrmeas::twisted_purity(&v, k, Method::auto(k))).collect::<twistlab::Result<Vec<f64>>>()
        })
        .collect::<twistlab::Result<Vec<Vec<f64>>>>()?;
    let m = samples as f64;
    let mut mean = vec![0.0; kmax + 1];
    let mut stderr = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        let mu = rows.iter().map(|r| r[k]).sum::<f64>() / m;
        let var = rows.iter().map(|r| (r[k] - mu).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        mean[k] = mu;
        stderr[k] = (var / m).sqrt();
    }
    Ok(HaarStats { mean, stderr })
}

pub fn haar(a: &HaarArgs, stamp: &Stamp) -> Result<(), Failure> {
    check_sector(a.l, a.n)?;
    if a.samples < 2 {
        return Err(Failure::parse("--samples must be at least 2"));
    }
    let top = max_order(a.l, a.n);
    let kmax = a.kmax.unwrap_or(top);
    if kmax > top {
        return Err(Failure::parse(format!("--kmax {kmax} exceeds min(n, l-n) = {top}")));
    }
    let stats = haar_statistics(a.l, a.n, kmax, a.samples, a.seed)?;
    let mut out = sink(a.out.as_deref())?;
    stamp.write_header(&mut out)?;
    writeln!(out, "k,mean,stderr,closed_form_printed,closed_form_corrected")?;
    let mut notes = Vec::new();
    for k in 0..=kmax {
        let printed = ratio_to_f64(analytic::haar_average_printed(a.l, a.n, k)?);
        let corrected = ratio_to_f64(analytic::haar_average_corrected(a.l, a.n, k)?);
        writeln!(out, "{k},{},{},{},{}", sci(stats.mean[k]), sci(stats.stderr[k]), sci(printed), sci(corrected))?;
        if k >= 1 {
            let se = stats.stderr[k].max(f64::MIN_POSITIVE);
            notes.push(format!(
                "k={k}: mean={:.6} se={:.2e} z_printed={:.2} z_corrected={:.2}",
                stats.mean[k],
                stats.stderr[k],
                (stats.mean[k] - printed) / se,
                (stats.mean[k] - corrected) / se
            ));
        }
    }
    out.flush()?;
    summary(format!("haar l={} n={} samples={} seed={}; {}", a.l, a.n, a.samples, a.seed, notes.join("; ")));
    Ok(())
}

pub fn bell(a: &BellArgs, stamp: &Stamp) -> Result<(), Failure> {
    if a.copies == 0 {
        return Err(Failure::parse("--copies must be positive"));
    }
    check_sector(4 * a.copies, 2 * a.copies)?;
    let v = analytic::bell_product(a.copies)?;
    let spec = corrmeas::purity_spectrum(&v, v.n())?;
    let expected = analytic::bell_coefficients(a.copies);
    let dev = spec.omegas.iter().zip(&expected).map(|(w, &e)| (w - e as f64).abs()).fold(0.0, f64::max);
    write_spectrum(&spec, a.out.as_deref(), stamp)?;
    summary(format!("bell copies={} omega={} max_deviation_from_binomial_coefficients={dev:.3e}", a.copies, format_omegas(&spec.omegas)));
    Ok(())
}

fn parse_modes(s: &str, l: usize, n: usize) -> Result<ModeSet, Failure> {
    let modes = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::parse(format!("--G expects comma-separated modes, got '{s}'")))?;
    let mut sorted = modes.clone();
    sorted.sort_unstable();
    let g = ModeSet::from_modes(&sorted).map_err(|e| Failure::parse(e.to_string()))?;
    if g.len() != n || !g.fits(l) {
        return Err(Failure::parse(format!("--G must list {n} distinct modes in 1..={l}")));
    }
    Ok(g)
}

pub fn fit(a: &FitArgs) -> Result<(), Failure> {
    let v = load_state(&a.state_file).map_err(|e| Failure::parse(format!("{}: {e}", a.state_file.display())))?;
    let g = match &a.g {
        Some(s) => parse_modes(s, v.l(), v.n())?,
        None => ModeSet::range(1, v.n()),
    };
    if a.k == 0 || a.k > v.n() + 1 {
        return Err(Failure::parse(format!("--k must lie in 1..={}", v.n() + 1)));
    }
    let params = ansatz::fit(&v, g, a.k)?;
    let rebuilt = ansatz::build_state(&params)?;
    let fidelity = rebuilt.fidelity(&v)?;
    match &a.out_params {
        Some(p) => params.save(p)?,
        None => println!("{}", params.to_json()),
    }
    summary(format!(
        "fit l={} n={} G={g} k={} parameters={} of {} fidelity={fidelity:.15}",
        v.l(),
        v.n(),
        a.k,
        params.theta.len(),
        ansatz::parameter_count(v.l(), v.n(), a.k)
    ));
    Ok(())
}

pub fn build(a: &BuildArgs) -> Result<(), Failure> {
    let params = AnsatzParams::load(&a.params_file).map_err(|e| Failure::parse(format!("{}: {e}", a.params_file.display())))?;
    let v = ansatz::build_state(&params)?;
    match &a.out_state {
        Some(p) => save_state(&v, p)?,
        None => println!("{}", twistlab::fock::io::state_to_json(&v)),
    }
    let mut line = format!("build l={} n={} G={} k={} norm={:.15}", params.l, params.n, params.g, params.k, v.norm());
    if let Some(path) = &a.compare {
        let target = load_state(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
        line.push_str(&format!(" fidelity={:.15}", v.fidelity(&target)?));
    }
    summary(line);
    Ok(())
}
