//! The impurity-model pipeline: momentum-basis SKQD, natural-orbital rotation
//! from its 1-RDM, SKQD again in the rotated orbitals, and an exact
//! sector-diagonalization reference.

use std::sync::Arc;

use crate::fermion::{
    build_siam_position, correlation_functions, one_rdm, to_k_adjacent_natural_orbitals,
    to_momentum_basis, BasisRotation, CorrelationPoint, DeterminantSector, FermionHamiltonian,
    SectorHamiltonian, SiamParams,
};
use crate::hamiltonian::{spectrum_summary, SpectrumLimits};
use crate::propagate::{
    krylov_states, siam_initial_state, split_one_two_body, trotter_states, EvolutionMethod,
    EvolutionPlan,
};
use crate::sqd::{
    collect_samples, postselect, subspace_basis, uniform_baseline, SampleSet, SectorRule,
    SkqdOptions, SubspaceProblem,
};
use crate::{Basis, Error, Result, StateVector};

/// Model, sector and momentum-basis data shared by every run at one `U`.
#[derive(Clone, Debug)]
pub struct SiamSetup {
    pub params: SiamParams,
    pub sector: Arc<DeterminantSector>,
    /// Highest filled bath momentum of the reference.
    pub k_f: usize,
    pub position: FermionHamiltonian,
    pub momentum: FermionHamiltonian,
    /// Position modes to momentum modes.
    pub to_momentum: BasisRotation,
}

impl SiamSetup {
    /// Half filling with `L + 1` modes (so `L` must be odd).
    pub fn new(params: SiamParams) -> Result<Self> {
        let position = build_siam_position(&params)?;
        let sector = Arc::new(DeterminantSector::half_filling(position.n_modes())?);
        let (momentum, to_momentum) = to_momentum_basis(&position)?;
        let k_f = sector
            .n_up()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidSector("no electrons".into()))?;
        Ok(SiamSetup {
            params,
            sector,
            k_f,
            position,
            momentum,
            to_momentum,
        })
    }

    pub fn sector_hamiltonian(&self, h: &FermionHamiltonian) -> Result<SectorHamiltonian> {
        SectorHamiltonian::new(h.clone(), self.sector.clone())
    }

    /// Exact ground state of the sector in position modes, with its
    /// correlation functions.
    pub fn reference(&self) -> Result<SiamReference> {
        let h = self.sector_hamiltonian(&self.position)?;
        let s = spectrum_summary(&h, &SpectrumLimits::default())?;
        let correlations =
            correlation_functions(&s.ground, &BasisRotation::identity(self.position.n_modes()))?;
        Ok(SiamReference {
            energy: s.e0,
            ground: s.ground,
            correlations,
        })
    }

    /// Krylov states of `h` (expressed in orbitals laid out like momentum
    /// modes) from the standard reference superposition.
    pub fn krylov_states(
        &self,
        h: &FermionHamiltonian,
        plan: &EvolutionPlan,
    ) -> Result<Vec<StateVector>> {
        let psi0 = siam_initial_state(&self.sector, self.k_f)?;
        match plan.method {
            EvolutionMethod::Trotter2 => {
                let (h1, h2) = split_one_two_body(h, &self.sector)?;
                trotter_states(&h1, &h2, &psi0, plan)
            }
            _ => krylov_states(&self.sector_hamiltonian(h)?, &psi0, plan),
        }
    }

    /// Sample the Krylov states of `h`, post-select to the sector and solve.
    pub fn stage(
        &self,
        h: &FermionHamiltonian,
        rotation: BasisRotation,
        plan: &EvolutionPlan,
        shots: usize,
        seed: u64,
    ) -> Result<SiamStage> {
        let states = self.krylov_states(h, plan)?;
        let samples = collect_samples(&states, shots, seed)?;
        let opts = SkqdOptions {
            d_max: None,
            postselect: Some(SectorRule::for_sector(&self.sector)),
        };
        let problem = SubspaceProblem::build(
            &self.sector_hamiltonian(h)?,
            subspace_basis(&samples, &opts),
        )?;
        Ok(SiamStage {
            hamiltonian: h.clone(),
            rotation,
            samples,
            problem,
        })
    }

    /// Momentum-basis SKQD, then SKQD in the k-adjacent natural orbitals of
    /// its ground state. Both stages use `shots` per Krylov state; the second
    /// stage samples from stream `seed + 1`.
    pub fn two_stage(
        &self,
        plan: &EvolutionPlan,
        shots: usize,
        seed: u64,
    ) -> Result<(SiamStage, SiamStage)> {
        let first = self.stage(&self.momentum, self.to_momentum.clone(), plan, shots, seed)?;
        let gamma = one_rdm(&first.ground_state(&self.sector)?)?;
        let (h_no, to_no) = to_k_adjacent_natural_orbitals(&self.momentum, &gamma, self.k_f)?;
        let rotation = self.to_momentum.then(&to_no);
        let second = self.stage(&h_no, rotation, plan, shots, seed.wrapping_add(1))?;
        Ok((first, second))
    }

    /// Uniform bitstrings over all `2·(L+1)` bits, post-selected to the sector.
    pub fn uniform_samples(&self, total: usize, seed: u64) -> Result<SampleSet> {
        let all = uniform_baseline(2 * self.sector.n_modes(), total, seed, None)?;
        Ok(postselect(&all, SectorRule::for_sector(&self.sector)).0)
    }
}

#[derive(Clone, Debug)]
pub struct SiamReference {
    pub energy: f64,
    pub ground: StateVector,
    pub correlations: Vec<CorrelationPoint>,
}

/// One sampled-subspace solve in a fixed orbital basis.
#[derive(Clone, Debug)]
pub struct SiamStage {
    pub hamiltonian: FermionHamiltonian,
    /// Position modes to this stage's orbitals.
    pub rotation: BasisRotation,
    pub samples: SampleSet,
    pub problem: SubspaceProblem,
}

impl SiamStage {
    pub fn ground_state(&self, sector: &Arc<DeterminantSector>) -> Result<StateVector> {
        self.problem.embed(&Basis::Sector(sector.clone()))
    }

    pub fn correlations(&self, sector: &Arc<DeterminantSector>) -> Result<Vec<CorrelationPoint>> {
        correlation_functions(&self.ground_state(sector)?, &self.rotation)
    }

    /// Re-solve on the `dim` most sampled bitstrings.
    pub fn truncated(
        &self,
        sector: &Arc<DeterminantSector>,
        dim: usize,
    ) -> Result<SubspaceProblem> {
        let h = SectorHamiltonian::new(self.hamiltonian.clone(), sector.clone())?;
        let opts = SkqdOptions {
            d_max: Some(dim),
            postselect: Some(SectorRule::for_sector(sector)),
        };
        SubspaceProblem::build(&h, subspace_basis(&self.samples, &opts))
    }
}

/// SKQD against uniform sampling at a common subspace dimension.
#[derive(Clone, Copy, Debug)]
pub struct UniformComparison {
    pub dim: usize,
    pub skqd_energy: f64,
    pub uniform_energy: f64,
}

/// Draw `shots` per Krylov state in `stage`'s orbitals and the same total
/// number of uniform bitstrings, truncate both to the smaller distinct count
/// (most sampled first) and solve each.
pub fn compare_with_uniform(
    setup: &SiamSetup,
    stage: &SiamStage,
    plan: &EvolutionPlan,
    shots: usize,
    seed: u64,
) -> Result<UniformComparison> {
    let states = setup.krylov_states(&stage.hamiltonian, plan)?;
    let rule = SectorRule::for_sector(&setup.sector);
    let sampled = postselect(&collect_samples(&states, shots, seed)?, rule).0;
    let uniform = setup.uniform_samples(shots * states.len(), seed)?;
    let dim = sampled.distinct().min(uniform.distinct());
    if dim == 0 {
        return Err(Error::InvalidBasis("no in-sector uniform samples".into()));
    }
    let h = setup.sector_hamiltonian(&stage.hamiltonian)?;
    let skqd = SubspaceProblem::build(&h, sampled.most_sampled(dim))?;
    let unif = SubspaceProblem::build(&h, uniform.most_sampled(dim))?;
    Ok(UniformComparison {
        dim,
        skqd_energy: skqd.energy,
        uniform_energy: unif.energy,
    })
}
