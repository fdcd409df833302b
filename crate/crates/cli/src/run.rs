//! Command execution: each command maps onto library operations and yields
//! a table plus sidecar details.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use zeta_dqpt::circuit_sim::{self, ResourceCount};
use zeta_dqpt::complexity_model;
use zeta_dqpt::dirichlet_engine::DirichletKernel;
use zeta_dqpt::observables::{
    accumulated_phase_with, hardy_z_eta_with, hardy_z_main_with, loschmidt_amplitude_with, NPolicy,
};
use zeta_dqpt::zero_finder::{
    compare_reference, default_step, locate_l_minima, parse_reference_zeros, refine_signal_zero, scan_signal,
    RefineMethod, ScanReport, ZetaSignal,
};

use crate::config::{sidecar_path, thread_count, Command, Method, NSetting, Observable, RunConfig};
use crate::error::CliError;
use crate::output::{num, write_csv, write_json, Table};

/// Table and metadata produced by one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub table: Option<Table>,
    pub details: Value,
}

/// Execute `config` on a dedicated pool and write the CSV and sidecar.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let threads = thread_count(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    let start = Instant::now();
    let outcome = pool.install(|| execute(config))?;
    let elapsed = start.elapsed().as_secs_f64();
    let sidecar = sidecar(config, &outcome, threads, elapsed);
    match &outcome.table {
        Some(table) => {
            write_csv(&config.output_path, table)?;
            write_json(&sidecar_path(&config.output_path), &sidecar)?;
        }
        None => write_json(&sidecar_path(&config.output_path), &sidecar)?,
    }
    Ok(outcome)
}

/// Run the command without touching the filesystem (besides reading a
/// reference table).
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::ScanL => scan_l(config),
        Command::ScanG => scan_g(config),
        Command::ScanZ => scan_z(config),
        Command::FindZeros => find_zeros(config),
        Command::ScanBeta => scan_beta(config),
        Command::FreeEnergy => free_energy(config),
        Command::VerifyPrep => verify_prep(config),
        Command::VerifyEvolve => verify_evolve(config),
        Command::Complexity => complexity(config),
    }
}

fn sidecar(config: &RunConfig, outcome: &Outcome, threads: usize, elapsed: f64) -> Value {
    let (columns, rows) = match &outcome.table {
        Some(t) => (json!(t.columns), json!(t.rows.len())),
        None => (Value::Null, Value::Null),
    };
    json!({
        "command": config.command.name(),
        "parameters": parameters(config),
        "columns": columns,
        "rows": rows,
        "versions": {
            "zeta-dqpt": zeta_dqpt::VERSION,
            "zeta-dqpt-cli": env!("CARGO_PKG_VERSION"),
        },
        "conventions": {
            "o_constants": circuit_sim::CONSTANT_CONVENTION,
            "region_constant": complexity_model::REGION_CONSTANT_NOTE,
            "truncation_rs": "N = floor(sqrt(t / (2 pi))), at least 1",
        },
        "threads": threads,
        "wall_time_seconds": elapsed,
        "details": outcome.details,
    })
}

fn parameters(c: &RunConfig) -> Value {
    json!({
        "beta": c.beta,
        "beta_min": c.beta_min,
        "beta_max": c.beta_max,
        "beta_step": c.beta_step,
        "t": c.t,
        "t_min": c.t_min,
        "t_max": c.t_max,
        "t_step": c.t_step,
        "n": c.n.map(|n| n.label()),
        "eps": c.eps,
        "xi": c.xi,
        "delta": c.delta,
        "tol": c.tol,
        "threshold": c.threshold,
        "observable": c.observable.name(),
        "method": match c.method { Method::Bisection => "bisection", Method::Secant => "secant" },
        "output": c.output_path.display().to_string(),
        "reference": c.reference_path.as_ref().map(|p| p.display().to_string()),
    })
}

fn policy(n: NSetting) -> NPolicy {
    match n {
        NSetting::Fixed(n) => NPolicy::Fixed(n),
        NSetting::Rs => NPolicy::RiemannSiegel,
    }
}

/// t_min, t_min + step, …, ending exactly at t_max.
fn t_grid(t_min: f64, t_max: f64, step: f64) -> Vec<f64> {
    let count = ((t_max - t_min) / step - 1e-9).ceil().max(1.0) as usize;
    let mut points: Vec<f64> = (0..count).map(|i| t_min + i as f64 * step).collect();
    points.push(t_max);
    points
}

/// min, min + step, …, max, rounded to 12 decimals so grid labels print cleanly.
fn beta_grid(c: &RunConfig) -> Vec<f64> {
    let count = ((c.beta_max - c.beta_min) / c.beta_step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((c.beta_min + i as f64 * c.beta_step) * 1e12).round() / 1e12)
        .collect()
}

fn resolve_n(n: NSetting, t: f64, op: &'static str) -> Result<usize, CliError> {
    match n {
        NSetting::Fixed(n) => Ok(n),
        NSetting::Rs => {
            if !(t > std::f64::consts::TAU) {
                return Err(zeta_dqpt::Error::domain(op, format!("rs truncation needs t > 2π, got {t}")).into());
            }
            Ok(policy(n).resolve(t))
        }
    }
}

/// Kernels for every distinct N used on the grid.
fn kernels(beta: f64, ns: &[usize], min_n: usize, op: &'static str) -> Result<BTreeMap<usize, DirichletKernel>, CliError> {
    let mut map = BTreeMap::new();
    for &n in ns {
        if n < min_n {
            return Err(zeta_dqpt::Error::domain(op, format!("N = {n} is below {min_n}")).into());
        }
        if let std::collections::btree_map::Entry::Vacant(e) = map.entry(n) {
            e.insert(DirichletKernel::new(beta, n)?);
        }
    }
    Ok(map)
}

/// Grid points, the truncation at each point, and one kernel per distinct N.
type ScanSetup = (Vec<f64>, Vec<usize>, BTreeMap<usize, DirichletKernel>);

fn scan_setup(c: &RunConfig, op: &'static str, min_n: usize) -> Result<ScanSetup, CliError> {
    let (t_min, t_max, step) = (c.t_min.unwrap(), c.t_max.unwrap(), c.t_step.unwrap());
    let n = c.n.expect("validated");
    let ts = t_grid(t_min, t_max, step);
    let ns = ts.iter().map(|&t| resolve_n(n, t, op)).collect::<Result<Vec<_>, _>>()?;
    let beta = if op == "scan-z" { 0.5 } else { c.beta };
    let ks = kernels(beta, &ns, min_n, op)?;
    Ok((ts, ns, ks))
}

fn scan_l(c: &RunConfig) -> Result<Outcome, CliError> {
    let (ts, ns, ks) = scan_setup(c, "scan-l", 2)?;
    let rows: Vec<Vec<String>> = ts
        .par_iter()
        .zip(ns.par_iter())
        .map(|(&t, n)| {
            let s = accumulated_phase_with(&ks[n], t);
            vec![num(t), num(c.beta), n.to_string(), num(s.value.re), num(s.value.im), num(s.aux["abs"]), num(s.aux["F1"])]
        })
        .collect();
    let mut table = Table::new(&["t", "beta", "N", "re", "im", "abs", "F1"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome { table: Some(table), details: json!({}) })
}

fn scan_g(c: &RunConfig) -> Result<Outcome, CliError> {
    let (ts, ns, ks) = scan_setup(c, "scan-g", 2)?;
    let rows: Vec<Vec<String>> = ts
        .par_iter()
        .zip(ns.par_iter())
        .map(|(&t, n)| {
            let s = loschmidt_amplitude_with(&ks[n], t);
            vec![num(t), n.to_string(), num(s.value.re), num(s.aux["F2"])]
        })
        .collect();
    let mut table = Table::new(&["t", "N", "value", "F2"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome { table: Some(table), details: json!({ "beta": c.beta }) })
}

fn scan_z(c: &RunConfig) -> Result<Outcome, CliError> {
    if c.observable == Observable::L {
        return Err(CliError::Usage("scan-z scans main or eta; use scan-l for L".to_string()));
    }
    if c.observable == Observable::Eta && c.n == Some(NSetting::Rs) {
        return Err(CliError::Usage("the eta signal needs a fixed --n".to_string()));
    }
    let (ts, ns, ks) = scan_setup(c, "scan-z", 1)?;
    let eta = c.observable == Observable::Eta;
    let rows: Vec<Vec<String>> = ts
        .par_iter()
        .zip(ns.par_iter())
        .map(|(&t, n)| {
            let v = if eta { hardy_z_eta_with(&ks[n], t) } else { hardy_z_main_with(&ks[n], t) };
            vec![num(t), n.to_string(), num(v)]
        })
        .collect();
    let mut table = Table::new(&["t", "N", "value"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        table: Some(table),
        details: json!({ "observable": c.observable.name() }),
    })
}

const ZERO_COLUMNS: [&str; 7] = ["index_in_window", "t_low", "t_high", "t_star", "residual", "N", "delta_t_if_reference"];

fn read_reference(c: &RunConfig) -> Result<Option<Vec<f64>>, CliError> {
    match &c.reference_path {
        None => Ok(None),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            Ok(Some(parse_reference_zeros(&text)?))
        }
    }
}

fn find_zeros(c: &RunConfig) -> Result<Outcome, CliError> {
    let (t_min, t_max) = (c.t_min.unwrap(), c.t_max.unwrap());
    let step = c.t_step.unwrap_or_else(|| default_step(t_min, t_max));
    let reference = read_reference(c)?;
    let mut table = Table::new(&ZERO_COLUMNS);
    if c.observable == Observable::L {
        let n = match c.n.unwrap_or(NSetting::Fixed(1 << 16)) {
            NSetting::Fixed(n) => n,
            NSetting::Rs => return Err(CliError::Usage("L minima need a fixed --n".to_string())),
        };
        let minima = locate_l_minima(c.beta, t_min, t_max, step, n, c.threshold)?;
        let report = ScanReport {
            t_min,
            t_max,
            zeros: minima
                .iter()
                .map(|&(t, v)| zeta_dqpt::zero_finder::ZeroRecord {
                    t_low: (t - step).max(t_min),
                    t_high: (t + step).min(t_max),
                    t_star: t,
                    residual: v,
                    n_used: n,
                })
                .collect(),
            n_boundary_events: 0,
        };
        fill_zero_rows(&mut table, &report, reference.as_deref())?;
        return Ok(Outcome {
            table: Some(table),
            details: json!({ "observable": "l", "beta": c.beta, "step": step, "count": report.zeros.len() }),
        });
    }
    let signal = match (c.observable, c.n.unwrap_or(NSetting::Rs)) {
        (Observable::Eta, NSetting::Fixed(n)) => ZetaSignal::Eta(n),
        (Observable::Eta, NSetting::Rs) => return Err(CliError::Usage("the eta signal needs a fixed --n".to_string())),
        (_, n) => ZetaSignal::MainSum(policy(n)),
    };
    let method = match c.method {
        Method::Bisection => RefineMethod::Bisection,
        Method::Secant => RefineMethod::SafeguardedSecant,
    };
    let mut report = scan_signal(t_min, t_max, step, signal)?;
    report.zeros = report
        .zeros
        .par_iter()
        .map(|z| refine_signal_zero(*z, c.tol, signal, method))
        .collect::<Result<Vec<_>, _>>()?;
    fill_zero_rows(&mut table, &report, reference.as_deref())?;
    Ok(Outcome {
        table: Some(table),
        details: json!({
            "observable": c.observable.name(),
            "step": step,
            "count": report.zeros.len(),
            "n_boundary_events": report.n_boundary_events,
        }),
    })
}

fn fill_zero_rows(table: &mut Table, report: &ScanReport, reference: Option<&[f64]>) -> Result<(), CliError> {
    let matches = match reference {
        Some(r) => Some(compare_reference(report, r)?),
        None => None,
    };
    for (i, z) in report.zeros.iter().enumerate() {
        let delta = matches.as_ref().map(|m| num(m[i].delta_t)).unwrap_or_default();
        table.push(vec![
            (i + 1).to_string(),
            num(z.t_low),
            num(z.t_high),
            num(z.t_star),
            num(z.residual),
            z.n_used.to_string(),
            delta,
        ]);
    }
    Ok(())
}

fn scan_beta(c: &RunConfig) -> Result<Outcome, CliError> {
    let t = c.t.unwrap();
    let n = resolve_n(c.n.unwrap(), t, "scan-beta")?;
    if n < 2 {
        return Err(zeta_dqpt::Error::domain("scan-beta", "F1 needs N >= 2").into());
    }
    let betas = beta_grid(c);
    let rows = betas
        .par_iter()
        .map(|&beta| -> Result<Vec<String>, CliError> {
            let kernel = DirichletKernel::new(beta, n)?;
            let s = accumulated_phase_with(&kernel, t);
            Ok(vec![num(t), num(beta), n.to_string(), num(s.value.re), num(s.value.im), num(s.aux["abs"]), num(s.aux["F1"])])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["t", "beta", "N", "re", "im", "abs", "F1"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome { table: Some(table), details: json!({}) })
}

fn free_energy(c: &RunConfig) -> Result<Outcome, CliError> {
    let t = c.t.unwrap();
    let n_max = resolve_n(c.n.unwrap(), t, "free-energy")?;
    if n_max < 2 {
        return Err(zeta_dqpt::Error::domain("free-energy", "F1 needs N >= 2").into());
    }
    let sizes: Vec<usize> = (1..usize::BITS).map(|d| 1usize << d).take_while(|&n| n <= n_max).collect();
    let betas = beta_grid(c);
    let jobs: Vec<(usize, f64)> = sizes.iter().flat_map(|&n| betas.iter().map(move |&b| (n, b))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, beta)| -> Result<Vec<String>, CliError> {
            let kernel = DirichletKernel::new(beta, n)?;
            let s = accumulated_phase_with(&kernel, t);
            Ok(vec![n.to_string(), num(beta), num(t), num(s.aux["abs"]), num(s.aux["F1"])])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["N", "beta", "t", "abs", "F1"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        table: Some(table),
        details: json!({ "sizes": sizes }),
    })
}

fn fixed_n(c: &RunConfig) -> u64 {
    match c.n {
        Some(NSetting::Fixed(n)) => n as u64,
        _ => unreachable!("validated as fixed"),
    }
}

fn resources_json(r: ResourceCount) -> Value {
    json!({ "gates": r.gates, "ancillas": r.ancillas })
}

fn verify_prep(c: &RunConfig) -> Result<Outcome, CliError> {
    let n = fixed_n(c);
    let p = circuit_sim::prepare_initial_state(n, c.beta, c.eps)?;
    let mut table = Table::new(&[
        "N", "beta", "eps", "n0", "n1", "k", "distance", "success_prob", "gates", "ancillas",
    ]);
    table.push(vec![
        n.to_string(),
        num(c.beta),
        num(c.eps),
        p.layout.n0.to_string(),
        p.layout.n1.to_string(),
        p.layout.k.to_string(),
        num(p.distance.value()),
        num(p.success_prob),
        p.resources.gates.to_string(),
        p.resources.ancillas.to_string(),
    ]);
    let stages: Vec<Value> = p
        .checks
        .iter()
        .map(|s| json!({ "stage": s.stage, "distance": s.distance, "budget": s.budget }))
        .collect();
    let ledger: Vec<Value> = p
        .ledger
        .stages
        .iter()
        .map(|(name, r)| json!({ "stage": name, "resources": resources_json(*r) }))
        .collect();
    Ok(Outcome {
        table: Some(table),
        details: json!({
            "head_only": p.layout.head_only,
            "stage_checks": stages,
            "resource_ledger": ledger,
            "success_prob_floor": 0.5 - c.eps / 3.0,
        }),
    })
}

fn verify_evolve(c: &RunConfig) -> Result<Outcome, CliError> {
    let n = fixed_n(c);
    let t = c.t.unwrap();
    let p = circuit_sim::prepare_initial_state(n, c.beta, c.eps)?;
    let e = circuit_sim::evolution_apply(&p.state, t, c.xi)?;
    let value = p.state.inner(&e.state);
    let kernel = DirichletKernel::new(c.beta, n as usize)?;
    let analytic = kernel.plain(t) / kernel.partition();
    let total = p.resources + e.resources;
    let mut table = Table::new(&[
        "N", "beta", "t", "eps", "xi", "re", "im", "analytic_re", "analytic_im", "abs_error",
        "max_phase_deviation", "phase_bound", "gates", "ancillas",
    ]);
    table.push(vec![
        n.to_string(),
        num(c.beta),
        num(t),
        num(c.eps),
        num(c.xi),
        num(value.re),
        num(value.im),
        num(analytic.re),
        num(analytic.im),
        num((value - analytic).norm()),
        num(e.max_deviation),
        num(e.bound),
        total.gates.to_string(),
        total.ancillas.to_string(),
    ]);
    Ok(Outcome {
        table: Some(table),
        details: json!({
            "prep_distance": p.distance.value(),
            "success_prob": p.success_prob,
            "prep_resources": resources_json(p.resources),
            "evolution_resources": resources_json(e.resources),
        }),
    })
}

fn complexity(c: &RunConfig) -> Result<Outcome, CliError> {
    let t = c.t.unwrap();
    let est = complexity_model::sample_bounds(c.beta, t, c.delta)?;
    let zeta_prime = complexity_model::zeta_prime_bound(c.beta, t)?;
    let region = if t > E.exp() {
        json!({
            "inside": complexity_model::zero_region_check(c.beta, t)?,
            "upper_edge": complexity_model::zero_region_edge(t),
            "note": complexity_model::REGION_CONSTANT_NOTE,
        })
    } else {
        Value::Null
    };
    Ok(Outcome {
        table: None,
        details: json!({
            "sample_complexity_1": est.sample_complexity_1,
            "sample_complexity_2": est.sample_complexity_2,
            "total_scaling": est.total_scaling,
            "overall": est.overall,
            "circuit_poly_inputs": est.circuit_poly_inputs,
            "zeta_prime_bound": zeta_prime,
            "chi_modulus_exponent": complexity_model::chi_modulus_exponent(c.beta),
            "zero_region": region,
            "convention": est.convention,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_end_on_bounds() {
        let g = t_grid(10.0, 11.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 11.0);
        assert_eq!(t_grid(0.0, 1.0, 0.25).len(), 5);
    }
}
