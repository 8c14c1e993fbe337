//! Projected Krylov matrices, matrix-element noise, and the regularized
//! generalized eigenproblem `H̃ v = E S̃ v` (the KQD estimate).

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};

use crate::hamiltonian::Hamiltonian;
use crate::linalg::{dot, eigh};
use crate::propagate::{krylov_states, EvolutionPlan};
use crate::rng::substream;
use crate::{Error, Result, StateVector, C64};

/// Which projected matrices receive Gaussian noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseTarget {
    HOnly,
    HAndS,
}

impl NoiseTarget {
    pub fn label(self) -> &'static str {
        match self {
            NoiseTarget::HOnly => "h-only",
            NoiseTarget::HAndS => "h-and-s",
        }
    }
}

#[derive(Clone, Debug)]
pub struct KrylovMatrices {
    pub h: DMatrix<C64>,
    pub s: DMatrix<C64>,
    /// Standard deviation of the injected noise, 0 when noiseless.
    pub noise_sigma: f64,
    pub noise_target: Option<NoiseTarget>,
    /// Built from the first row of a Toeplitz pair.
    pub toeplitz: bool,
}

impl KrylovMatrices {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Leading `d × d` block, the matrices of the first `d` Krylov states.
    pub fn leading(&self, d: usize) -> Result<KrylovMatrices> {
        if d == 0 || d > self.dim() {
            return Err(Error::InvalidParameter(format!(
                "leading block {d} of {}",
                self.dim()
            )));
        }
        Ok(KrylovMatrices {
            h: self.h.view((0, 0), (d, d)).into_owned(),
            s: self.s.view((0, 0), (d, d)).into_owned(),
            ..self.clone()
        })
    }

    /// Largest `|A_jk - conj(A_kj)|` over both matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let h = (&self.h - self.h.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let s = (&self.s - self.s.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        h.max(s)
    }

    /// Largest `|A_jk - A_{j+1,k+1}|` over both matrices.
    pub fn toeplitz_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in [&self.h, &self.s] {
            for j in 0..d.saturating_sub(1) {
                for k in 0..d - 1 {
                    worst = worst.max((m[(j, k)] - m[(j + 1, k + 1)]).norm());
                }
            }
        }
        worst
    }
}

fn check_states<H: Hamiltonian + ?Sized>(h: &H, states: &[StateVector]) -> Result<()> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("no Krylov states".into()));
    }
    let basis = h.basis();
    for s in states {
        if !basis.same_space(s.basis()) {
            return Err(Error::Shape {
                expected: basis.dim(),
                got: s.dim(),
            });
        }
    }
    Ok(())
}

/// `H̃_jk = ⟨ψ_j|H|ψ_k⟩`, `S̃_jk = ⟨ψ_j|ψ_k⟩` from all pairs.
pub fn assemble_pairwise<H: Hamiltonian + ?Sized>(
    h: &H,
    states: &[StateVector],
) -> Result<KrylovMatrices> {
    check_states(h, states)?;
    let d = states.len();
    let hv: Vec<Vec<C64>> = states.iter().map(|s| h.apply_vec(s.amplitudes())).collect();
    let mut hm = DMatrix::<C64>::zeros(d, d);
    let mut sm = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let hjk = dot(states[j].amplitudes(), &hv[k]);
            let sjk = dot(states[j].amplitudes(), states[k].amplitudes());
            hm[(j, k)] = hjk;
            sm[(j, k)] = sjk;
            hm[(k, j)] = hjk.conj();
            sm[(k, j)] = sjk.conj();
        }
        hm[(j, j)].im = 0.0;
        sm[(j, j)].im = 0.0;
    }
    Ok(KrylovMatrices {
        h: hm,
        s: sm,
        noise_sigma: 0.0,
        noise_target: None,
        toeplitz: false,
    })
}

/// Toeplitz assembly for states `ψ_k = U^k ψ0` with `U` commuting with `H`:
/// only `⟨ψ0|ψ_m⟩` and `⟨ψ0|H|ψ_m⟩` are computed, then mirrored.
pub fn assemble_toeplitz<H: Hamiltonian + ?Sized>(
    h: &H,
    states: &[StateVector],
) -> Result<KrylovMatrices> {
    check_states(h, states)?;
    let d = states.len();
    let h0 = h.apply_vec(states[0].amplitudes());
    let srow: Vec<C64> = states
        .iter()
        .map(|s| dot(states[0].amplitudes(), s.amplitudes()))
        .collect();
    let hrow: Vec<C64> = states.iter().map(|s| dot(&h0, s.amplitudes())).collect();
    let entry = |row: &[C64], j: usize, k: usize| {
        if k >= j {
            row[k - j]
        } else {
            row[j - k].conj()
        }
    };
    let mut hm = DMatrix::from_fn(d, d, |j, k| entry(&hrow, j, k));
    let mut sm = DMatrix::from_fn(d, d, |j, k| entry(&srow, j, k));
    for j in 0..d {
        hm[(j, j)].im = 0.0;
        sm[(j, j)].im = 0.0;
    }
    Ok(KrylovMatrices {
        h: hm,
        s: sm,
        noise_sigma: 0.0,
        noise_target: None,
        toeplitz: true,
    })
}

fn perturb(m: &mut DMatrix<C64>, normal: &Normal<f64>, rng: &mut impl rand::Rng) {
    let d = m.nrows();
    for j in 0..d {
        m[(j, j)] += C64::new(normal.sample(rng), 0.0);
        for k in j + 1..d {
            let z = C64::new(normal.sample(rng), normal.sample(rng));
            m[(j, k)] += z;
            m[(k, j)] = m[(j, k)].conj();
        }
    }
}

/// Add `N(0, σ)` to the real and imaginary parts of every upper-triangular
/// element (real part only on the diagonal) and mirror to keep the matrices
/// Hermitian. Deterministic in `seed`.
pub fn inject_noise(
    m: &KrylovMatrices,
    sigma: f64,
    seed: u64,
    target: NoiseTarget,
) -> Result<KrylovMatrices> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("noise sigma {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(m.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = substream(seed, 0x6e6f_6973);
    let mut out = m.clone();
    perturb(&mut out.h, &normal, &mut rng);
    if target == NoiseTarget::HAndS {
        perturb(&mut out.s, &normal, &mut rng);
    }
    out.noise_sigma = sigma;
    out.noise_target = Some(target);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GevpSolution {
    pub energy: f64,
    /// Coefficients of the Krylov states, `S̃`-normalized.
    pub coeffs: Vec<C64>,
    /// Overlap eigen-directions kept after thresholding.
    pub kept_dim: usize,
    pub threshold_used: f64,
}

/// `1e-12` noiseless, `max(1e-12, 5σ)` with noise of standard deviation `σ`.
pub fn default_threshold(sigma: f64) -> f64 {
    if sigma > 0.0 {
        (5.0 * sigma).max(1e-12)
    } else {
        1e-12
    }
}

/// Lowest generalized eigenpair by canonical orthogonalization: directions of
/// `S̃` with eigenvalue at or below `threshold` are discarded, the rest are
/// whitened, and the reduced ordinary eigenproblem is solved.
pub fn solve_gevp(m: &KrylovMatrices, threshold: f64) -> Result<GevpSolution> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold {threshold}")));
    }
    let d = m.dim();
    let se = eigh(&m.s);
    let kept: Vec<usize> = (0..d).filter(|&i| se.values[i] > threshold).collect();
    if kept.is_empty() {
        return Err(Error::EmptySubspace { threshold });
    }
    let x = DMatrix::from_fn(d, kept.len(), |r, c| {
        se.vectors[(r, kept[c])] / se.values[kept[c]].sqrt()
    });
    let reduced = x.adjoint() * &m.h * &x;
    let re = eigh(&reduced);
    let y = re.vectors.column(0).into_owned();
    let coeffs = (&x * y).iter().copied().collect();
    Ok(GevpSolution {
        energy: re.values[0],
        coeffs,
        kept_dim: kept.len(),
        threshold_used: threshold,
    })
}

/// Noise applied before the eigenproblem.
#[derive(Clone, Copy, Debug)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub seed: u64,
    pub target: NoiseTarget,
}

/// Evolve, assemble (Toeplitz), optionally perturb, and solve. The threshold
/// defaults to [`default_threshold`].
pub fn kqd_estimate<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    plan: &EvolutionPlan,
    noise: Option<NoiseConfig>,
    threshold: Option<f64>,
) -> Result<GevpSolution> {
    let states = krylov_states(h, psi0, plan)?;
    let clean = assemble_toeplitz(h, &states)?;
    let (m, sigma) = match noise {
        Some(n) => (inject_noise(&clean, n.sigma, n.seed, n.target)?, n.sigma),
        None => (clean, 0.0),
    };
    solve_gevp(&m, threshold.unwrap_or_else(|| default_threshold(sigma)))
}
