//! Randomized sweeps checking each inequality of the SKQD argument against
//! exact linear algebra. Every check yields one [`CheckRecord`].

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    chebyshev_filter, coverage_probability, eps_tilde, failure_bound, filter_bound,
    filter_certificate, ising_sparsity, sparsity_shift, subspace_energy_bound,
};
use crate::linalg::{dot, eigh, norm, to_dense, HermitianEigen};
use crate::rng::{mix_seed, substream};
use crate::spin::build_tfim_open;
use crate::sqd::sparsity_profile;
use crate::{Basis, Error, Hamiltonian, Result, StateVector, C64};

/// Numerical slack on the inequality side of every check.
pub const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub inputs: serde_json::Value,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl CheckRecord {
    fn new(
        check: &'static str,
        inputs: serde_json::Value,
        measured: f64,
        bound: f64,
        relation: Relation,
    ) -> Self {
        let pass = measured.is_finite()
            && match relation {
                Relation::AtMost => measured <= bound + SLACK,
                Relation::AtLeast => measured >= bound - SLACK,
            };
        CheckRecord {
            check,
            inputs,
            measured,
            bound,
            relation,
            pass,
        }
    }
}

/// Sweep size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    #[default]
    Small,
    Full,
}

impl Grid {
    pub fn instances(self) -> usize {
        match self {
            Grid::Small => 100,
            Grid::Full => 1000,
        }
    }

    pub fn trials(self) -> usize {
        match self {
            Grid::Small => 10_000,
            Grid::Full => 100_000,
        }
    }

    fn ising_sizes(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Grid::Small => 8..=10,
            Grid::Full => 8..=14,
        }
    }
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Grid::Small),
            "full" => Ok(Grid::Full),
            _ => Err(Error::InvalidParameter(format!(
                "grid '{s}' (expected small or full)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub grid: Grid,
    pub seed: u64,
    pub checks: usize,
    pub violations: usize,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(grid: Grid, seed: u64, records: Vec<CheckRecord>) -> Self {
        let violations = records.iter().filter(|r| !r.pass).count();
        VerificationReport {
            grid,
            seed,
            checks: records.len(),
            violations,
            records,
        }
    }

    /// Records per check name, with their violation counts, in first-seen order.
    pub fn summary(&self) -> Vec<(&'static str, usize, usize)> {
        let mut out: Vec<(&'static str, usize, usize)> = Vec::new();
        for r in &self.records {
            match out.iter_mut().find(|e| e.0 == r.check) {
                Some(e) => {
                    e.1 += 1;
                    e.2 += usize::from(!r.pass);
                }
                None => out.push((r.check, 1, usize::from(!r.pass))),
            }
        }
        out
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|x| *x *= s);
    v
}

/// Unit vector orthogonal to the unit vector `u`.
fn random_orthogonal(rng: &mut ChaCha8Rng, u: &[C64]) -> Vec<C64> {
    let mut v = random_unit(rng, u.len());
    let c = dot(u, &v);
    v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|x| *x *= s);
    v
}

fn rotate_towards(phi: &[C64], chi: &[C64], theta: f64) -> Vec<C64> {
    phi.iter()
        .zip(chi)
        .map(|(a, b)| a * theta.cos() + b * theta.sin())
        .collect()
}

fn stream(seed: u64, tag: u64, i: usize) -> ChaCha8Rng {
    substream(mix_seed(seed, tag), i as u64)
}

/// States of energy error `ε` against the `2 - 2√(1 - ε/ΔE_1)` distance bound,
/// on random Hermitian matrices with the overlap phase fixed real.
pub fn verify_energy_closeness(instances: usize, seed: u64) -> Vec<CheckRecord> {
    (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, 0xb1, i);
            let dim = [4usize, 8, 16, 32][i % 4];
            let mut m = DMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng));
            m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
            let eig = eigh(&m);
            let gap = eig.values[1] - eig.values[0];
            let phi0 = eig.vector(0);
            // Half the instances leak only into the first excited state, where
            // the bound is tightest.
            let chi = if i % 2 == 0 {
                eig.vector(1)
            } else {
                random_orthogonal(&mut rng, &phi0)
            };
            let theta = rng.random::<f64>().powi(2) * PI / 2.0;
            let mut psi = rotate_towards(&phi0, &chi, theta);
            let phase = C64::from_polar(1.0, 2.0 * PI * rng.random::<f64>());
            psi.iter_mut().for_each(|x| *x *= phase);
            let hpsi = &m * nalgebra::DVector::from_column_slice(&psi);
            let eps = (dot(&psi, hpsi.as_slice()).re - eig.values[0]).max(0.0);
            let ov = dot(&psi, &phi0);
            let fix = if ov.norm() > 0.0 {
                ov / ov.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            let dist: f64 = psi
                .iter()
                .zip(&phi0)
                .map(|(a, b)| (a * fix - b).norm_sqr())
                .sum();
            let bound = eps_tilde(eps, gap).expect("nonnegative inputs");
            CheckRecord::new(
                "energy-closeness",
                json!({ "dim": dim, "eps": eps, "gap": gap, "saturated": bound.flagged }),
                dist,
                bound.value,
                Relation::AtMost,
            )
        })
        .collect()
}

fn peaked_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let decay = 0.05 + 2.0 * rng.random::<f64>();
    let mut v: Vec<C64> = (0..dim)
        .map(|_| {
            C64::from_polar(
                (-decay * rng.random::<f64>() * dim as f64 / 4.0).exp(),
                2.0 * PI * rng.random::<f64>(),
            )
        })
        .collect();
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|x| *x *= s);
    v
}

/// Sparsity of a perturbed state against the shifted sparsity of the original,
/// for every `L`, on six qubits. Two records per instance (α and β), each at
/// the `L` with the smallest margin.
pub fn verify_sparsity_shift(instances: usize, seed: u64) -> Vec<CheckRecord> {
    let n = 6;
    let dim = 1usize << n;
    (0..instances)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = stream(seed, 0xb2, i);
            let phi = peaked_state(&mut rng, dim);
            let chi = random_orthogonal(&mut rng, &phi);
            let theta = rng.random::<f64>().powi(3) * PI / 2.0;
            let psi = rotate_towards(&phi, &chi, theta);
            let dist: f64 = psi.iter().zip(&phi).map(|(a, b)| (a - b).norm_sqr()).sum();
            let profile =
                sparsity_profile(&StateVector::new(Basis::spin(n), phi).unwrap()).unwrap();
            let mut worst_alpha = (f64::INFINITY, 0.0, 0.0, 0);
            let mut worst_beta = (f64::INFINITY, 0.0, 0.0, 0);
            let mut acc = 0.0;
            let mut min_w = f64::INFINITY;
            for l in 1..=dim {
                let w = psi[profile.order[l - 1] as usize].norm_sqr();
                acc += w;
                min_w = min_w.min(w);
                let (a0, b0) = profile.at(l);
                let shifted = sparsity_shift(a0, b0, dist);
                if acc - shifted.alpha < worst_alpha.0 {
                    worst_alpha = (acc - shifted.alpha, acc, shifted.alpha, l);
                }
                if min_w - shifted.beta < worst_beta.0 {
                    worst_beta = (min_w - shifted.beta, min_w, shifted.beta, l);
                }
            }
            [
                CheckRecord::new(
                    "sparsity-shift-alpha",
                    json!({ "n": n, "eps_tilde": dist, "L": worst_alpha.3 }),
                    worst_alpha.1,
                    worst_alpha.2,
                    Relation::AtLeast,
                ),
                CheckRecord::new(
                    "sparsity-shift-beta",
                    json!({ "n": n, "eps_tilde": dist, "L": worst_beta.3 }),
                    worst_beta.1,
                    worst_beta.2,
                    Relation::AtLeast,
                ),
            ]
        })
        .collect()
}

/// `e^{-iHt}|v⟩` through a dense eigendecomposition.
fn evolve(eig: &HermitianEigen, v: &[C64], t: f64) -> Vec<C64> {
    let vv = nalgebra::DVector::from_column_slice(v);
    let mut c = eig.vectors.adjoint() * vv;
    c.iter_mut()
        .zip(&eig.values)
        .for_each(|(x, e)| *x *= C64::from_polar(1.0, -e * t));
    (&eig.vectors * c).iter().copied().collect()
}

/// Coverage of the ground state's heaviest bitstrings by actual Krylov states
/// on open Ising chains, certified through the filter state. Two records per
/// instance: the per-bitstring probability against `|γ0|² β / d²`, and the
/// certificate coefficients against `1/|γ0|`.
pub fn verify_coverage(instances: usize, seed: u64) -> Vec<CheckRecord> {
    (0..instances)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = stream(seed, 0xb3, i);
            let (eig, n, h1, h2) = loop {
                let n = rng.random_range(3..=6);
                let h1 = 0.05 + 0.95 * rng.random::<f64>();
                let h2 = 0.05 + 0.95 * rng.random::<f64>();
                let h = build_tfim_open(n, h1, h2).unwrap();
                let eig = eigh(&to_dense(&h));
                if eig.values[1] - eig.values[0] > 1e-6 {
                    break (eig, n, h1, h2);
                }
            };
            let dim = 1usize << n;
            let (e0, width, gap) = (eig.values[0], eig.values[dim - 1] - eig.values[0], eig.values[1] - eig.values[0]);
            let dt = PI / width;
            let a = PI * gap / width;
            let d = 2 * rng.random_range(0..=6usize) + 1;
            let mut psi0 = random_unit(&mut rng, dim);
            psi0.iter_mut().for_each(|x| *x *= 0.3);
            psi0[0] += C64::new(1.0, 0.0);
            let s = 1.0 / norm(&psi0);
            psi0.iter_mut().for_each(|x| *x *= s);
            let basis = Basis::spin(n);
            let states: Vec<StateVector> = (0..d)
                .map(|k| StateVector::new(basis.clone(), evolve(&eig, &psi0, k as f64 * dt)).unwrap())
                .collect();
            let phi0 = eig.vector(0);
            let overlap = dot(&phi0, &psi0).norm_sqr();
            let cert = filter_certificate(&states, e0, dt, a).unwrap();
            let profile = sparsity_profile(&StateVector::new(basis, phi0).unwrap()).unwrap();
            let target = 0.5 + 0.49 * rng.random::<f64>();
            let l = profile.smallest_l_reaching(target);
            let top = &profile.order[..l];
            let beta = top.iter().map(|&b| cert.state.amplitudes()[b as usize].norm_sqr()).fold(f64::INFINITY, f64::min);
            let p = coverage_probability(overlap, beta, d);
            let measured = top
                .iter()
                .map(|&b| states.iter().map(|s| s.amplitudes()[b as usize].norm_sqr()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            let max_coeff = cert.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let inputs = json!({ "n": n, "h1": h1, "h2": h2, "d": d, "L": l, "overlap": overlap, "beta": beta });
            [
                CheckRecord::new("coverage-probability", inputs.clone(), measured, p, Relation::AtLeast),
                CheckRecord::new("certificate-coefficients", inputs, max_coeff, 1.0 / overlap.sqrt(), Relation::AtMost),
            ]
        })
        .collect()
}

/// Fraction of `trials` in which at least one of `l` bitstrings is never
/// drawn, each living in its own state with probability exactly `p`, after
/// `m` shots per state.
pub fn failure_monte_carlo(l: usize, p: f64, m: usize, trials: usize, seed: u64) -> f64 {
    let failures: usize = (0..trials)
        .into_par_iter()
        .with_min_len(1024)
        .filter(|&t| {
            let mut rng = substream(seed, t as u64);
            (0..l).any(|_| (0..m).all(|_| rng.random::<f64>() >= p))
        })
        .count();
    failures as f64 / trials as f64
}

/// The Monte-Carlo failure grid against `min(1, L(1-p)^M)`.
pub fn verify_failure(trials: usize, seed: u64) -> Vec<CheckRecord> {
    let mut grid = Vec::new();
    for l in [2usize, 4, 8] {
        for (p, m) in [(0.05, 20usize), (0.05, 40), (0.1, 20), (0.2, 10)] {
            grid.push((l, p, m));
        }
    }
    grid.push((4, 0.1, 30));
    grid.into_iter()
        .enumerate()
        .map(|(i, (l, p, m))| {
            let freq = failure_monte_carlo(l, p, m, trials, mix_seed(seed, 0xb4 + i as u64));
            let b = failure_bound(l, p, m as u64);
            CheckRecord::new(
                "failure-probability",
                json!({ "L": l, "p": p, "M": m, "trials": trials, "loose": b.loose }),
                freq,
                b.tight,
                Relation::AtMost,
            )
        })
        .collect()
}

/// Energy of the ground state truncated to its `L` heaviest bitstrings against
/// `2√2 ‖H‖ (1 - √α_L)^{1/2}`, on open Ising chains of up to eight qubits.
pub fn verify_truncation_energy(instances: usize, seed: u64) -> Vec<CheckRecord> {
    const PER_HAMILTONIAN: usize = 10;
    let hamiltonians = instances.div_ceil(PER_HAMILTONIAN);
    (0..hamiltonians)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = stream(seed, 0xb5, i);
            let n = rng.random_range(2..=8);
            let h1 = 0.05 + 1.5 * rng.random::<f64>();
            let h2 = 0.05 + 0.95 * rng.random::<f64>();
            let h = build_tfim_open(n, h1, h2).unwrap();
            let eig = eigh(&to_dense(&h));
            let dim = 1usize << n;
            let e0 = eig.values[0];
            let h_norm = e0.abs().max(eig.values[dim - 1].abs());
            let ground = StateVector::new(Basis::spin(n), eig.vector(0)).unwrap();
            let profile = sparsity_profile(&ground).unwrap();
            let ls: Vec<usize> = (0..PER_HAMILTONIAN).map(|_| rng.random_range(1..=dim)).collect();
            ls.into_iter()
                .map(|l| {
                    let mut amps = vec![C64::new(0.0, 0.0); dim];
                    for &b in &profile.order[..l] {
                        amps[b as usize] = ground.amplitudes()[b as usize];
                    }
                    let mut t = ground.with_amplitudes(amps).unwrap();
                    t.normalize().unwrap();
                    let err = h.expectation(&t).unwrap() - e0;
                    let alpha = profile.at(l).0;
                    CheckRecord::new(
                        "truncation-energy",
                        json!({ "n": n, "h1": h1, "h2": h2, "L": l, "alpha": alpha, "h_norm": h_norm }),
                        err,
                        subspace_energy_bound(h_norm, alpha),
                        Relation::AtMost,
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .take(instances)
        .collect()
}

/// Normalization and the out-of-band bound of the filter polynomial for
/// `a ∈ {0.1, 0.5, 1}` and degrees `1..=max_degree`, one record per
/// `(a, degree)` holding the worst grid point over `points` angles in `[a, π]`.
pub fn verify_filter(max_degree: usize, points: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for a in [0.1, 0.5, 1.0] {
        for k in 1..=max_degree {
            let at_zero = chebyshev_filter(0.0, a, k).unwrap();
            out.push(CheckRecord::new(
                "filter-normalization",
                json!({ "a": a, "d_poly": k }),
                (at_zero - 1.0).abs(),
                0.0,
                Relation::AtMost,
            ));
            let worst = (0..points)
                .map(|j| {
                    let th = a + (PI - a) * j as f64 / (points - 1) as f64;
                    chebyshev_filter(th, a, k).unwrap().abs()
                })
                .fold(0.0, f64::max);
            out.push(CheckRecord::new(
                "filter-out-of-band",
                json!({ "a": a, "d_poly": k, "points": points }),
                worst,
                filter_bound(a, k),
                Relation::AtMost,
            ));
        }
    }
    out
}

/// The tail bound `S_n(k) ≤ min(n(1 - M_n)/(2k+2), 1)` for `h ∈ {0.1, 0.3, 0.5}`
/// and all `k < n/2`.
pub fn verify_ising(sizes: impl IntoIterator<Item = usize>) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in sizes {
        for h in [0.1, 0.3, 0.5] {
            let s = ising_sparsity(n, h, 20)?;
            for k in 0..n.div_ceil(2) {
                out.push(CheckRecord::new(
                    "ising-tail",
                    json!({ "n": n, "h": h, "k": k, "magnetization": s.magnetization }),
                    s.tail(k),
                    s.bound(k),
                    Relation::AtMost,
                ));
            }
        }
    }
    Ok(out)
}

/// Every sweep at the given grid size.
pub fn verify_all(grid: Grid, seed: u64) -> Result<VerificationReport> {
    let n = grid.instances();
    let mut records = verify_energy_closeness(n, seed);
    records.extend(verify_sparsity_shift(n, seed));
    records.extend(verify_coverage(n, seed));
    records.extend(verify_failure(grid.trials(), seed));
    records.extend(verify_truncation_energy(n, seed));
    records.extend(verify_filter(50, 1000));
    records.extend(verify_ising(grid.ising_sizes())?);
    Ok(VerificationReport::new(grid, seed, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_direction() {
        assert!(CheckRecord::new("x", json!({}), 1.0, 1.0, Relation::AtMost).pass);
        assert!(!CheckRecord::new("x", json!({}), 1.1, 1.0, Relation::AtMost).pass);
        assert!(CheckRecord::new("x", json!({}), 1.1, 1.0, Relation::AtLeast).pass);
        assert!(!CheckRecord::new("x", json!({}), f64::NAN, 1.0, Relation::AtLeast).pass);
    }

    #[test]
    fn small_sweeps_pass() {
        for r in verify_energy_closeness(40, 1)
            .into_iter()
            .chain(verify_sparsity_shift(20, 1))
            .chain(verify_coverage(20, 1))
            .chain(verify_truncation_energy(30, 1))
        {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn monte_carlo_tracks_exact_failure() {
        let (l, p, m) = (4usize, 0.1f64, 30usize);
        let exact = 1.0 - (1.0 - (1.0 - p).powi(m as i32)).powi(l as i32);
        let freq = failure_monte_carlo(l, p, m, 20_000, 3);
        assert!((freq - exact).abs() < 0.015, "{freq} vs {exact}");
        assert!(freq <= failure_bound(l, p, m as u64).tight);
    }

    #[test]
    fn grid_parses() {
        assert_eq!("full".parse::<Grid>().unwrap(), Grid::Full);
        assert!("huge".parse::<Grid>().is_err());
    }
}
