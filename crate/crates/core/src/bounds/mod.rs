//! Closed-form error bounds for KQD and SKQD, the filter polynomial behind
//! them, the Ising sparsity inequality, and randomized verifiers.

mod filter;
mod ising;
mod verify;

pub use filter::{
    chebyshev_filter, filter_bound, filter_certificate, filter_fourier, FilterCertificate,
};
pub use ising::{ising_sparsity, IsingSparsity};
pub use verify::{
    failure_monte_carlo, verify_all, verify_coverage, verify_energy_closeness, verify_failure,
    verify_filter, verify_ising, verify_sparsity_shift, verify_truncation_energy, CheckRecord,
    Grid, Relation, VerificationReport, SLACK,
};

use serde::Serialize;

use crate::{Error, Result, SpectrumSummary, StateVector};

/// Spectral data entering the KQD error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KqdBoundInputs {
    /// `ΔE_{N-1} = Emax - E0`.
    pub width: f64,
    /// `ΔE_1 = E1 - E0`.
    pub gap: f64,
    /// `|γ0|²`, the ground-state weight of the initial state.
    pub overlap: f64,
    pub d: usize,
}

impl KqdBoundInputs {
    pub fn new(width: f64, gap: f64, overlap: f64, d: usize) -> Result<Self> {
        if !(gap > 0.0) || !(width >= gap) || !width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need width >= gap > 0, got width {width}, gap {gap}"
            )));
        }
        if !(0.0..=1.0 + 1e-12).contains(&overlap) {
            return Err(Error::InvalidParameter(format!(
                "overlap {overlap} outside [0, 1]"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("Krylov dimension 0".into()));
        }
        Ok(KqdBoundInputs {
            width,
            gap,
            overlap: overlap.min(1.0),
            d,
        })
    }

    /// Inputs for `psi0` evolved under the Hamiltonian summarized by `s`.
    pub fn from_summary(s: &SpectrumSummary, psi0: &StateVector, d: usize) -> Result<Self> {
        let overlap = s.ground.inner(psi0)?.norm_sqr();
        Self::new(s.width(), s.gap(), overlap, d)
    }

    /// Dimension the bound is evaluated at: `d` if odd, else `d - 1`.
    pub fn odd_d(&self) -> usize {
        if self.d % 2 == 1 {
            self.d
        } else {
            self.d - 1
        }
    }
}

/// `8 ΔE_{N-1} (1-|γ0|²)/|γ0|² (1 + π ΔE_1/ΔE_{N-1})^{-(d-1)}`, with even `d`
/// evaluated at `d - 1`.
pub fn eps_kqd(inp: &KqdBoundInputs) -> Result<f64> {
    if inp.overlap <= 0.0 {
        return Err(Error::UndefinedBound(
            "initial state has no ground-state overlap".into(),
        ));
    }
    let d = inp.odd_d();
    if d == 0 {
        return Err(Error::UndefinedBound(
            "Krylov dimension 1 has no odd predecessor".into(),
        ));
    }
    let ratio = (1.0 - inp.overlap) / inp.overlap;
    let decay = (1.0 + std::f64::consts::PI * inp.gap / inp.width).powi(-((d - 1) as i32));
    Ok(8.0 * inp.width * ratio * decay)
}

/// Value with a flag marking that a formula left its domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flagged {
    pub value: f64,
    pub flagged: bool,
}

/// Squared distance bound `2 - 2√(1 - ε/ΔE_1)` for a state within `eps` of the
/// ground energy. Saturates at 2 (flagged) once `eps ≥ gap`.
pub fn eps_tilde(eps: f64, gap: f64) -> Result<Flagged> {
    if !(eps >= 0.0) || !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("eps {eps}, gap {gap}")));
    }
    if eps >= gap {
        return Ok(Flagged {
            value: 2.0,
            flagged: true,
        });
    }
    Ok(Flagged {
        value: 2.0 - 2.0 * (1.0 - eps / gap).sqrt(),
        flagged: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SparsityShift {
    pub alpha: f64,
    pub beta: f64,
    /// Set when either shifted value is negative (the guarantee is vacuous).
    pub negative: bool,
}

/// `(α - 2√ε̃, β - 2√ε̃)`: sparsity inherited by any state within squared
/// distance `eps_tilde` of a sparse one. Not clamped.
pub fn sparsity_shift(alpha0: f64, beta0: f64, eps_tilde: f64) -> SparsityShift {
    let s = 2.0 * eps_tilde.max(0.0).sqrt();
    let (alpha, beta) = (alpha0 - s, beta0 - s);
    SparsityShift {
        alpha,
        beta,
        negative: alpha < 0.0 || beta < 0.0,
    }
}

/// `|γ0|² β / d²`: every important bitstring has at least this weight in some
/// Krylov state.
pub fn coverage_probability(overlap: f64, beta: f64, d: usize) -> f64 {
    overlap * beta / (d * d) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FailureBound {
    /// `min(1, L (1-p)^M)`.
    pub tight: f64,
    /// `L e^{-Mp}`.
    pub loose: f64,
}

/// Union bound on missing at least one of `l` bitstrings, each seen with
/// probability at least `p` per shot, after `m` shots.
pub fn failure_bound(l: usize, p: f64, m: u64) -> FailureBound {
    let p = p.clamp(0.0, 1.0);
    let l = l as f64;
    let miss = if m == 0 {
        1.0
    } else {
        (1.0 - p).powf(m as f64)
    };
    FailureBound {
        tight: (l * miss).min(1.0),
        loose: l * (-(m as f64) * p).exp(),
    }
}

/// `2√2 ‖H‖ (1 - √α)^{1/2}`: energy error of the ground state truncated to
/// bitstrings carrying weight `alpha0`.
pub fn subspace_energy_bound(h_norm: f64, alpha0: f64) -> f64 {
    let a = alpha0.clamp(0.0, 1.0);
    2.0 * std::f64::consts::SQRT_2 * h_norm * (1.0 - a.sqrt()).max(0.0).sqrt()
}

/// Every intermediate of the SKQD guarantee for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GuaranteeReport {
    pub inputs: KqdBoundInputs,
    pub eps: f64,
    pub eps_tilde: f64,
    pub eps_tilde_saturated: bool,
    pub alpha_shift: f64,
    pub beta_shift: f64,
    /// Per-shot probability of each important bitstring in its best Krylov state.
    pub p: f64,
    /// Shots per Krylov state sufficient for success probability `1 - η`;
    /// infinite when vacuous.
    pub sample_bound: f64,
    pub energy_bound: f64,
    pub vacuous: bool,
}

/// Chain the KQD bound through state closeness, sparsity transfer, coverage and
/// the union bound. `h_norm` is `‖H‖`; `alpha0, beta0` describe the top `l`
/// bitstrings of the ground state; `eta` is the allowed failure probability.
pub fn guarantee_report(
    inputs: &KqdBoundInputs,
    h_norm: f64,
    alpha0: f64,
    beta0: f64,
    l: usize,
    eta: f64,
) -> Result<GuaranteeReport> {
    if l == 0 || !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("L = {l}, eta = {eta}")));
    }
    let eps = eps_kqd(inputs)?;
    let et = eps_tilde(eps, inputs.gap)?;
    let shift = sparsity_shift(alpha0, beta0, et.value);
    let vacuous = shift.beta <= 0.0;
    let d = inputs.d as f64;
    let p = coverage_probability(inputs.overlap, shift.beta.max(0.0), inputs.d).min(1.0);
    let sample_bound = if vacuous {
        f64::INFINITY
    } else {
        d * d * (l as f64 / eta).ln() / (inputs.overlap * shift.beta)
    };
    Ok(GuaranteeReport {
        inputs: *inputs,
        eps,
        eps_tilde: et.value,
        eps_tilde_saturated: et.flagged,
        alpha_shift: shift.alpha,
        beta_shift: shift.beta,
        p,
        sample_bound,
        energy_bound: subspace_energy_bound(h_norm, alpha0),
        vacuous,
    })
}
