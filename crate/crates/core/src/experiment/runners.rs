//! One driver per experiment kind, each producing a result table.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::config::{
    BenchTfim, KqdSweep, SiamSweep, SkqdSweep, SparsitySweep, TimeStep, VerifyBounds,
};
use super::siam::{compare_with_uniform, SiamSetup};
use super::table::{Cell, Table};
use crate::bounds::{ising_sparsity, verify_all, Relation};
use crate::fermion::SiamParams;
use crate::hamiltonian::{spectrum_summary, SpectrumLimits, SpectrumSummary};
use crate::krylov::{
    assemble_toeplitz, default_threshold, inject_noise, solve_gevp, KrylovMatrices, NoiseTarget,
};
use crate::propagate::{choose_dt, krylov_states, EvolutionMethod, EvolutionPlan};
use crate::rng::mix_seed;
use crate::spin::{build_tfim_open, PauliSum};
use crate::sqd::{skqd_estimate, SkqdOptions};
use crate::{Basis, Result, StateVector};

/// Columns of every energy-estimate table.
pub const RESULT_HEADER: [&str; 12] = [
    "method",
    "size",
    "param",
    "d",
    "shots",
    "seed",
    "dim",
    "energy",
    "reference",
    "abs_error",
    "rel_error",
    "seconds",
];

/// One energy estimate. `size` is `n` for spin chains and `L` for the
/// impurity model; `param` is the noise level, field or interaction.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub size: usize,
    pub param: f64,
    pub d: usize,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    /// Subspace dimension (kept Krylov directions for KQD).
    pub dim: usize,
    pub energy: f64,
    pub reference: f64,
    pub seconds: f64,
}

impl ResultRow {
    pub fn abs_error(&self) -> f64 {
        (self.energy - self.reference).abs()
    }

    pub fn rel_error(&self) -> Option<f64> {
        (self.reference != 0.0).then(|| self.abs_error() / self.reference.abs())
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.method.as_str().into(),
            self.size.into(),
            self.param.into(),
            self.d.into(),
            self.shots.into(),
            self.seed.into(),
            self.dim.into(),
            self.energy.into(),
            self.reference.into(),
            self.abs_error().into(),
            self.rel_error().into(),
            self.seconds.into(),
        ]
    }
}

pub(crate) fn result_table(rows: &[ResultRow]) -> Table {
    let mut t = Table::new(&RESULT_HEADER);
    t.rows = rows.iter().map(ResultRow::cells).collect();
    t
}

/// Tables and metadata produced by one run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub table: Table,
    pub correlations: Option<Table>,
    /// Full verification report, when the kind produces one.
    pub report: Option<serde_json::Value>,
    /// Values computed during the run (time steps, spectra) for the manifest.
    pub derived: serde_json::Value,
    /// Failed inequality checks.
    pub violations: usize,
}

struct TfimCase {
    h: PauliSum,
    summary: SpectrumSummary,
    dt: f64,
    states: Vec<StateVector>,
    clean: KrylovMatrices,
}

fn tfim_case(
    n: usize,
    h1: f64,
    h2: f64,
    d: usize,
    dt: TimeStep,
    evolution: Option<EvolutionMethod>,
) -> Result<TfimCase> {
    let h = build_tfim_open(n, h1, h2)?;
    let summary = spectrum_summary(&h, &SpectrumLimits::default())?;
    let dt = match dt {
        TimeStep::Auto(_) => choose_dt(&summary)?,
        TimeStep::Fixed(x) => x,
    };
    let dim = 1usize << n;
    let plan = EvolutionPlan::new(
        dt,
        d,
        evolution.unwrap_or_else(|| EvolutionMethod::default_for(dim)),
    )?;
    let psi0 = StateVector::basis_state(Basis::spin(n), 0)?;
    let states = krylov_states(&h, &psi0, &plan)?;
    let clean = assemble_toeplitz(&h, &states)?;
    Ok(TfimCase {
        h,
        summary,
        dt,
        states,
        clean,
    })
}

fn case_json(n: usize, c: &TfimCase) -> serde_json::Value {
    json!({ "n": n, "dt": c.dt, "e0": c.summary.e0, "e1": c.summary.e1, "emax": c.summary.emax })
}

#[allow(clippy::too_many_arguments)]
fn kqd_row(
    case: &TfimCase,
    n: usize,
    d: usize,
    sigma: f64,
    target: Option<NoiseTarget>,
    seed: Option<u64>,
    threshold: Option<f64>,
) -> Result<ResultRow> {
    let t = Instant::now();
    let clean = case.clean.leading(d)?;
    let m = match (target, seed) {
        (Some(tg), Some(s)) if sigma > 0.0 => {
            inject_noise(&clean, sigma, mix_seed(s, n as u64), tg)?
        }
        _ => clean,
    };
    let sol = solve_gevp(
        &m,
        threshold.unwrap_or_else(|| default_threshold(m.noise_sigma)),
    )?;
    let method = match target {
        Some(tg) if sigma > 0.0 => format!("kqd-noisy-{}", tg.label()),
        _ => "kqd".to_string(),
    };
    Ok(ResultRow {
        method,
        size: n,
        param: sigma,
        d,
        shots: None,
        seed,
        dim: sol.kept_dim,
        energy: sol.energy,
        reference: case.summary.e0,
        seconds: t.elapsed().as_secs_f64(),
    })
}

fn skqd_rows(
    case: &TfimCase,
    n: usize,
    shots: &[usize],
    seeds: &[u64],
    d_max: Option<usize>,
) -> Result<Vec<ResultRow>> {
    let points: Vec<(usize, u64)> = shots
        .iter()
        .flat_map(|&m| seeds.iter().map(move |&s| (m, s)))
        .collect();
    points
        .par_iter()
        .map(|&(m, s)| {
            let t = Instant::now();
            let opts = SkqdOptions {
                d_max,
                postselect: None,
            };
            let (p, _) = skqd_estimate(
                &case.h,
                &case.states,
                m,
                mix_seed(s, 0x5000 + n as u64),
                &opts,
            )?;
            Ok(ResultRow {
                method: "skqd".into(),
                size: n,
                param: 0.0,
                d: case.states.len(),
                shots: Some(m),
                seed: Some(s),
                dim: p.dim(),
                energy: p.energy,
                reference: case.summary.e0,
                seconds: t.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

fn seed_list(seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| seed.wrapping_add(i)).collect()
}

pub fn bench_tfim(c: &BenchTfim) -> Result<RunOutput> {
    let seeds = seed_list(c.seed, c.seeds);
    let mut rows = Vec::new();
    let mut derived = Vec::new();
    for &n in &c.n {
        let case = tfim_case(n, c.h1, c.h2, c.d, c.dt, c.evolution)?;
        derived.push(case_json(n, &case));
        rows.push(kqd_row(&case, n, c.d, 0.0, None, None, c.threshold)?);
        if c.sigma > 0.0 {
            for &tg in &c.targets {
                let noisy: Vec<ResultRow> = seeds
                    .par_iter()
                    .map(|&s| kqd_row(&case, n, c.d, c.sigma, Some(tg), Some(s), c.threshold))
                    .collect::<Result<_>>()?;
                rows.extend(noisy);
            }
        }
        rows.extend(skqd_rows(&case, n, &c.shots, &seeds, None)?);
    }
    Ok(RunOutput {
        table: result_table(&rows),
        correlations: None,
        report: None,
        derived: json!({ "cases": derived }),
        violations: 0,
    })
}

pub fn kqd_sweep(c: &KqdSweep) -> Result<RunOutput> {
    let d_top = *c.d.iter().max().expect("validated");
    let case = tfim_case(c.n, c.h1, c.h2, d_top, c.dt, c.evolution)?;
    let seeds = seed_list(c.seed, c.seeds);
    let mut rows = Vec::new();
    for &d in &c.d {
        rows.push(kqd_row(&case, c.n, d, 0.0, None, None, c.threshold)?);
        for &sigma in c.sigma.iter().filter(|s| **s > 0.0) {
            for &tg in &c.targets {
                let noisy: Vec<ResultRow> = seeds
                    .par_iter()
                    .map(|&s| kqd_row(&case, c.n, d, sigma, Some(tg), Some(s), c.threshold))
                    .collect::<Result<_>>()?;
                rows.extend(noisy);
            }
        }
    }
    Ok(RunOutput {
        table: result_table(&rows),
        correlations: None,
        report: None,
        derived: json!({ "cases": [case_json(c.n, &case)] }),
        violations: 0,
    })
}

pub fn skqd_sweep(c: &SkqdSweep) -> Result<RunOutput> {
    let seeds = seed_list(c.seed, c.seeds);
    let mut rows = Vec::new();
    let mut derived = Vec::new();
    for &n in &c.n {
        let case = tfim_case(n, c.h1, c.h2, c.d, c.dt, c.evolution)?;
        derived.push(case_json(n, &case));
        rows.extend(skqd_rows(&case, n, &c.shots, &seeds, c.d_max)?);
    }
    Ok(RunOutput {
        table: result_table(&rows),
        correlations: None,
        report: None,
        derived: json!({ "cases": derived }),
        violations: 0,
    })
}

pub const CORRELATION_HEADER: [&str; 7] = [
    "u",
    "shots",
    "j",
    "spin",
    "density",
    "spin_reference",
    "density_reference",
];

pub fn siam_sweep(c: &SiamSweep) -> Result<RunOutput> {
    let seeds = seed_list(c.seed, c.seeds);
    let method = c.evolution.unwrap_or(EvolutionMethod::LanczosExpmv);
    let plan = EvolutionPlan::new(c.dt, c.d, method)?;
    let mut rows = Vec::new();
    let mut corr = Table::new(&CORRELATION_HEADER);
    let mut derived = Vec::new();
    for &u in &c.u {
        let params = SiamParams {
            bath_sites: c.bath_sites,
            u,
            t: c.t,
            v: c.v,
            eps_imp: c.eps_imp.unwrap_or(-u / 2.0),
        };
        let setup = SiamSetup::new(params)?;
        let reference = setup.reference()?;
        derived.push(json!({ "u": u, "sector_dim": setup.sector.dim(), "k_f": setup.k_f, "e0": reference.energy }));
        let row = |method: &str, shots: usize, seed: u64, dim: usize, energy: f64, t: Instant| {
            ResultRow {
                method: method.into(),
                size: c.bath_sites,
                param: u,
                d: c.d,
                shots: Some(shots),
                seed: Some(seed),
                dim,
                energy,
                reference: reference.energy,
                seconds: t.elapsed().as_secs_f64(),
            }
        };
        for &s in &seeds {
            for (i, &m) in c.shots.iter().enumerate() {
                let t = Instant::now();
                let (first, second) = setup.two_stage(&plan, m, mix_seed(s, u.to_bits()))?;
                rows.push(row(
                    "skqd-momentum",
                    m,
                    s,
                    first.problem.dim(),
                    first.problem.energy,
                    t,
                ));
                rows.push(row(
                    "skqd-natural",
                    m,
                    s,
                    second.problem.dim(),
                    second.problem.energy,
                    t,
                ));
                if c.correlations && s == seeds[0] {
                    for (a, b) in second
                        .correlations(&setup.sector)?
                        .iter()
                        .zip(&reference.correlations)
                    {
                        corr.push(vec![
                            u.into(),
                            m.into(),
                            a.site.into(),
                            a.spin.into(),
                            a.density.into(),
                            b.spin.into(),
                            b.density.into(),
                        ])?;
                    }
                }
                if i == 0 {
                    if let Some(mu) = c.uniform_shots {
                        let t = Instant::now();
                        let cmp = compare_with_uniform(
                            &setup,
                            &second,
                            &plan,
                            mu,
                            mix_seed(s, !u.to_bits()),
                        )?;
                        rows.push(row("skqd-matched", mu, s, cmp.dim, cmp.skqd_energy, t));
                        rows.push(row("uniform", mu, s, cmp.dim, cmp.uniform_energy, t));
                    }
                }
            }
        }
    }
    Ok(RunOutput {
        table: result_table(&rows),
        correlations: c.correlations.then_some(corr),
        report: None,
        derived: json!({ "models": derived, "evolution": method }),
        violations: 0,
    })
}

pub const VERIFY_HEADER: [&str; 6] = ["check", "relation", "measured", "bound", "pass", "inputs"];

pub fn verify_bounds(c: &VerifyBounds) -> Result<RunOutput> {
    let report = verify_all(c.grid, c.seed)?;
    let mut t = Table::new(&VERIFY_HEADER);
    for r in &report.records {
        let rel = match r.relation {
            Relation::AtMost => "at-most",
            Relation::AtLeast => "at-least",
        };
        t.push(vec![
            r.check.into(),
            rel.into(),
            r.measured.into(),
            r.bound.into(),
            r.pass.into(),
            r.inputs.to_string().into(),
        ])?;
    }
    let summary: Vec<_> = report
        .summary()
        .into_iter()
        .map(|(check, count, violations)| json!({ "check": check, "count": count, "violations": violations }))
        .collect();
    Ok(RunOutput {
        table: t,
        correlations: None,
        violations: report.violations,
        derived: json!({ "checks": report.checks, "violations": report.violations, "summary": summary }),
        report: Some(serde_json::to_value(&report)?),
    })
}

pub const SPARSITY_HEADER: [&str; 9] = [
    "n",
    "h",
    "k",
    "tail",
    "bound",
    "pass",
    "magnetization",
    "thermodynamic",
    "deviation",
];

pub fn sparsity_sweep(c: &SparsitySweep) -> Result<RunOutput> {
    let points: Vec<(usize, f64)> =
        c.n.iter()
            .flat_map(|&n| c.h.iter().map(move |&h| (n, h)))
            .collect();
    let results: Vec<_> = points
        .iter()
        .map(|&(n, h)| ising_sparsity(n, h, c.max_qubits))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&SPARSITY_HEADER);
    let mut violations = 0;
    for s in &results {
        let thermo = s.thermodynamic_magnetization();
        for k in 0..s.n.div_ceil(2) {
            let pass = s.tail(k) <= s.bound(k) + crate::bounds::SLACK;
            violations += usize::from(!pass);
            t.push(vec![
                s.n.into(),
                s.h.into(),
                k.into(),
                s.tail(k).into(),
                s.bound(k).into(),
                pass.into(),
                s.magnetization.into(),
                thermo.into(),
                thermo.map(|m| (s.magnetization - m).abs()).into(),
            ])?;
        }
    }
    Ok(RunOutput {
        table: t,
        correlations: None,
        report: None,
        derived: json!({}),
        violations,
    })
}
