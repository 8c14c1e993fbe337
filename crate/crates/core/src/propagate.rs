//! Time evolution `e^{-ikHΔt}|ψ0⟩`, the SIAM reference states, and Born-rule
//! sampling.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::fermion::{momentum_mode, DeterminantSector, FermionHamiltonian, SectorHamiltonian};
use crate::hamiltonian::{Hamiltonian, SpectrumSummary};
use crate::linalg::{eigh, expm_multiply, to_dense, ExpmvOptions, LinearOperator};
use crate::rng::substream;
use crate::{Basis, Error, Result, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMethod {
    /// Dense eigendecomposition; each state is formed directly from `ψ0`.
    ExactEigen,
    /// Krylov propagation of one step at a time.
    LanczosExpmv,
    /// `e^{-iΔt H2/2} e^{-iΔt H1} e^{-iΔt H2/2}` per step.
    Trotter2,
}

impl EvolutionMethod {
    /// Dense eigendecomposition for small spaces, Krylov propagation otherwise.
    pub fn default_for(dim: usize) -> Self {
        if dim <= EXACT_EIGEN_DIM {
            EvolutionMethod::ExactEigen
        } else {
            EvolutionMethod::LanczosExpmv
        }
    }
}

/// Largest dimension evolved by dense eigendecomposition.
pub const EXACT_EIGEN_DIM: usize = 1 << 10;

#[derive(Clone, Debug)]
pub struct EvolutionPlan {
    pub dt: f64,
    /// Number of Krylov states `d`.
    pub steps: usize,
    pub method: EvolutionMethod,
    /// Allowed 2-norm error per step.
    pub tolerance: f64,
}

impl EvolutionPlan {
    pub fn new(dt: f64, steps: usize, method: EvolutionMethod) -> Result<Self> {
        let plan = EvolutionPlan {
            dt,
            steps,
            method,
            tolerance: 1e-10,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter(
                "need at least one Krylov state".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// `Δt = π / (Emax - E0)`.
pub fn choose_dt(summary: &SpectrumSummary) -> Result<f64> {
    let width = summary.width();
    if !(width > 0.0) {
        return Err(Error::DegenerateSpectrum(format!("spectral width {width}")));
    }
    Ok(std::f64::consts::PI / width)
}

fn check_start<H: Hamiltonian + ?Sized>(h: &H, psi0: &StateVector) -> Result<()> {
    if !h.basis().same_space(psi0.basis()) {
        return Err(Error::Shape {
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    psi0.check_normalized(1e-9)
}

/// The states `e^{-ikHΔt}|ψ0⟩` for `k = 0..d`. Trotter plans need the split
/// form, see [`trotter_states`].
pub fn krylov_states<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    plan: &EvolutionPlan,
) -> Result<Vec<StateVector>> {
    check_start(h, psi0)?;
    let mut out = Vec::with_capacity(plan.steps);
    out.push(psi0.clone());
    match plan.method {
        EvolutionMethod::ExactEigen => {
            let dim = h.dim();
            if dim > EXACT_EIGEN_DIM {
                return Err(Error::Capacity {
                    dim,
                    limit: EXACT_EIGEN_DIM,
                });
            }
            let eig = eigh(&to_dense(h));
            let c: Vec<C64> = (0..dim)
                .map(|j| crate::linalg::dot(&eig.vector(j), psi0.amplitudes()))
                .collect();
            for k in 1..plan.steps {
                let mut v = vec![C64::new(0.0, 0.0); dim];
                for (j, cj) in c.iter().enumerate() {
                    let coef = cj * C64::from_polar(1.0, -(k as f64) * plan.dt * eig.values[j]);
                    for (vi, qi) in v.iter_mut().zip(eig.vectors.column(j).iter()) {
                        *vi += qi * coef;
                    }
                }
                out.push(psi0.with_amplitudes(v)?);
            }
        }
        EvolutionMethod::LanczosExpmv => {
            let opts = ExpmvOptions {
                tol: plan.tolerance,
                ..Default::default()
            };
            for k in 1..plan.steps {
                let next = expm_multiply(h, out[k - 1].amplitudes(), plan.dt, &opts)?;
                out.push(psi0.with_amplitudes(next)?);
            }
        }
        EvolutionMethod::Trotter2 => {
            return Err(Error::InvalidParameter(
                "second-order Trotter evolution needs the split Hamiltonian".into(),
            ))
        }
    }
    Ok(out)
}

/// One second-order Trotter step `e^{-iΔt H2/2} e^{-iΔt H1} e^{-iΔt H2/2} v`.
pub fn trotter_step<A, B>(h1: &A, h2: &B, v: &[C64], dt: f64, tol: f64) -> Result<Vec<C64>>
where
    A: LinearOperator + ?Sized,
    B: LinearOperator + ?Sized,
{
    let opts = ExpmvOptions {
        tol: tol / 3.0,
        ..Default::default()
    };
    let a = expm_multiply(h2, v, dt / 2.0, &opts)?;
    let b = expm_multiply(h1, &a, dt, &opts)?;
    expm_multiply(h2, &b, dt / 2.0, &opts)
}

/// Krylov states from repeated Trotter steps of `H = H1 + H2`.
pub fn trotter_states<A, B>(
    h1: &A,
    h2: &B,
    psi0: &StateVector,
    plan: &EvolutionPlan,
) -> Result<Vec<StateVector>>
where
    A: Hamiltonian + ?Sized,
    B: Hamiltonian + ?Sized,
{
    check_start(h1, psi0)?;
    check_start(h2, psi0)?;
    let mut out = Vec::with_capacity(plan.steps);
    out.push(psi0.clone());
    for k in 1..plan.steps {
        let next = trotter_step(h1, h2, out[k - 1].amplitudes(), plan.dt, plan.tolerance)?;
        out.push(psi0.with_amplitudes(next)?);
    }
    Ok(out)
}

/// One-body (plus constant) and two-body parts of a fermionic Hamiltonian on
/// one sector, the splitting used by [`trotter_states`].
pub fn split_one_two_body(
    ham: &FermionHamiltonian,
    sector: &Arc<DeterminantSector>,
) -> Result<(SectorHamiltonian, SectorHamiltonian)> {
    Ok((
        SectorHamiltonian::new(ham.one_body_part(), sector.clone())?,
        SectorHamiltonian::new(ham.two_body_part(), sector.clone())?,
    ))
}

/// Per-spin superposition of a reference determinant and its single
/// excitations `holes[i] → particles[j]`, all with equal real amplitude; the
/// state is the product of the two identical spin factors.
pub fn siam_initial_state_with(
    sector: &Arc<DeterminantSector>,
    occupied: &[usize],
    holes: &[usize],
    particles: &[usize],
) -> Result<StateVector> {
    let n = sector.n_modes();
    if occupied.len() != sector.n_up() || occupied.len() != sector.n_down() {
        return Err(Error::InvalidSector(format!(
            "reference with {} electrons per spin does not fit sector ({}, {})",
            occupied.len(),
            sector.n_up(),
            sector.n_down()
        )));
    }
    let mut reference = 0u64;
    for &p in occupied {
        if p >= n {
            return Err(Error::InvalidSector(format!("mode {p} outside {n} modes")));
        }
        reference |= crate::fermion::mode_bit(n, p);
    }
    for &h in holes {
        if h >= n || reference & crate::fermion::mode_bit(n, h) == 0 {
            return Err(Error::InvalidSector(format!(
                "hole mode {h} is not occupied in the reference"
            )));
        }
    }
    for &p in particles {
        if p >= n || reference & crate::fermion::mode_bit(n, p) != 0 {
            return Err(Error::InvalidSector(format!(
                "particle mode {p} is not empty in the reference"
            )));
        }
    }
    let mut strings = vec![reference];
    for &h in holes {
        for &p in particles {
            strings.push(
                (reference & !crate::fermion::mode_bit(n, h)) | crate::fermion::mode_bit(n, p),
            );
        }
    }
    let amp = 1.0 / strings.len() as f64;
    let mut v = StateVector::zeros(Basis::Sector(sector.clone()));
    for &u in &strings {
        for &d in &strings {
            let idx = sector
                .index_of(sector.join(u, d))
                .expect("weights match the sector");
            v.amplitudes_mut()[idx] = C64::new(amp, 0.0);
        }
    }
    Ok(v)
}

/// The momentum-space reference used for the impurity model: bath momenta
/// `0..=k_f` filled per spin, and every excitation of the three highest
/// filled momenta into the four lowest empty modes (the impurity and
/// momenta `k_f+1..=k_f+3`). 13 determinants per spin, 169 in total.
pub fn siam_initial_state(sector: &Arc<DeterminantSector>, k_f: usize) -> Result<StateVector> {
    let n = sector.n_modes();
    if k_f < 2 || momentum_mode(k_f + 3) >= n {
        return Err(Error::InvalidSector(format!(
            "Fermi index {k_f} leaves too few modes in {n}"
        )));
    }
    let occupied: Vec<usize> = (0..=k_f).map(momentum_mode).collect();
    let holes = [
        momentum_mode(k_f),
        momentum_mode(k_f - 1),
        momentum_mode(k_f - 2),
    ];
    let particles = [
        0,
        momentum_mode(k_f + 1),
        momentum_mode(k_f + 2),
        momentum_mode(k_f + 3),
    ];
    siam_initial_state_with(sector, &occupied, &holes, &particles)
}

/// Cumulative probabilities of `v`, checked for unit norm.
pub fn born_cdf(v: &StateVector) -> Result<Vec<f64>> {
    v.check_normalized(1e-9)?;
    let mut acc = 0.0;
    Ok(v.amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect())
}

/// `m` sequential Born-rule draws as basis labels. A longer run with the
/// same generator state extends a shorter one.
pub fn born_draws<R: Rng>(v: &StateVector, cdf: &[f64], m: usize, rng: &mut R) -> Vec<u64> {
    let total = *cdf.last().unwrap_or(&0.0);
    (0..m)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            v.basis().bitstring(i)
        })
        .collect()
}

/// `m` Born-rule samples of `v` from the stream `(seed, stream)`, as counts
/// per basis label.
pub fn born_sample(
    v: &StateVector,
    m: usize,
    seed: u64,
    stream: u64,
) -> Result<BTreeMap<u64, u64>> {
    let cdf = born_cdf(v)?;
    let mut rng = substream(seed, stream);
    let mut counts = BTreeMap::new();
    for b in born_draws(v, &cdf, m, &mut rng) {
        *counts.entry(b).or_insert(0) += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{spectrum_summary, SpectrumLimits};
    use crate::linalg::{dot, norm};
    use crate::spin::build_tfim_open;

    fn diff(a: &StateVector, b: &StateVector) -> f64 {
        let d: Vec<C64> = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x - y)
            .collect();
        norm(&d)
    }

    #[test]
    fn dt_from_width() {
        let h = build_tfim_open(2, 0.0, 0.1).unwrap();
        let s = spectrum_summary(&h, &SpectrumLimits::default()).unwrap();
        assert!((choose_dt(&s).unwrap() - std::f64::consts::PI / 2.2).abs() < 1e-12);
        let mut flat = s.clone();
        flat.emax = flat.e0;
        assert!(matches!(
            choose_dt(&flat),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn eigenstate_only_picks_up_a_phase() {
        let h = build_tfim_open(4, 0.3, 0.2).unwrap();
        let s = spectrum_summary(&h, &SpectrumLimits::default()).unwrap();
        for method in [EvolutionMethod::ExactEigen, EvolutionMethod::LanczosExpmv] {
            let plan = EvolutionPlan::new(0.7, 4, method).unwrap();
            let states = krylov_states(&h, &s.ground, &plan).unwrap();
            assert_eq!(states[0].amplitudes(), s.ground.amplitudes());
            for (k, v) in states.iter().enumerate() {
                let ov = dot(s.ground.amplitudes(), v.amplitudes());
                let want = C64::from_polar(1.0, -(k as f64) * 0.7 * s.e0);
                assert!((ov - want).norm() < 1e-9, "{method:?} k={k}");
            }
        }
    }

    #[test]
    fn lanczos_matches_exact_eigen() {
        let h = build_tfim_open(6, 0.1, 0.1).unwrap();
        let psi0 = StateVector::basis_state(Basis::spin(6), 0).unwrap();
        let s = spectrum_summary(&h, &SpectrumLimits::default()).unwrap();
        let dt = choose_dt(&s).unwrap();
        let a = krylov_states(
            &h,
            &psi0,
            &EvolutionPlan::new(dt, 5, EvolutionMethod::ExactEigen).unwrap(),
        )
        .unwrap();
        let b = krylov_states(
            &h,
            &psi0,
            &EvolutionPlan::new(dt, 5, EvolutionMethod::LanczosExpmv).unwrap(),
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(diff(x, y) < 1e-8);
            assert!((y.norm() - 1.0).abs() < 1e-8);
        }
        let trotter = EvolutionPlan::new(dt, 5, EvolutionMethod::Trotter2).unwrap();
        assert!(krylov_states(&h, &psi0, &trotter).is_err());
    }

    #[test]
    fn initial_state_support() {
        let sector = Arc::new(DeterminantSector::half_filling(8).unwrap());
        let v = siam_initial_state(&sector, 3).unwrap();
        let support = v.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(support, 169);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        let n = 8;
        let reference: u64 = (0..=3)
            .map(|k| crate::fermion::mode_bit(n, momentum_mode(k)))
            .sum();
        let idx = sector.index_of(sector.join(reference, reference)).unwrap();
        assert!((v.amplitudes()[idx].norm_sqr() - 1.0 / 169.0).abs() < 1e-15);
        assert!(siam_initial_state(&sector, 4).is_err());
        let small = Arc::new(DeterminantSector::half_filling(6).unwrap());
        assert!(siam_initial_state(&small, 2).is_err());
    }

    #[test]
    fn point_mass_and_fair_coin() {
        let v = StateVector::basis_state(Basis::spin(2), 0b10).unwrap();
        let c = born_sample(&v, 50, 1, 0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[&0b10], 50);

        let s = 0.5f64.sqrt();
        let v = StateVector::new(Basis::spin(1), vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        let m = 100_000;
        let c = born_sample(&v, m, 9, 0).unwrap();
        let f = c[&0] as f64 / m as f64;
        assert!((f - 0.5).abs() < 5.0 * 0.5 / (m as f64).sqrt());
        assert_eq!(c, born_sample(&v, m, 9, 0).unwrap());

        let bad = StateVector::new(Basis::spin(1), vec![C64::new(1.0, 0.0); 2]).unwrap();
        assert!(born_sample(&bad, 1, 0, 0).is_err());
    }

    #[test]
    fn draws_nest_across_shot_counts() {
        let h = build_tfim_open(4, 0.5, 0.1).unwrap();
        let g = spectrum_summary(&h, &SpectrumLimits::default())
            .unwrap()
            .ground;
        let cdf = born_cdf(&g).unwrap();
        let short = born_draws(&g, &cdf, 10, &mut substream(4, 2));
        let long = born_draws(&g, &cdf, 100, &mut substream(4, 2));
        assert_eq!(&long[..10], &short[..]);
    }
}
