//! The interface shared by spin and fermionic Hamiltonians, and exact
//! spectrum summaries built on it.

use crate::linalg::{eigh, lowest_eigenpair, to_dense, LanczosOptions, LinearOperator, Negated};
use crate::{Basis, Error, Result, StateVector, C64};

/// A Hermitian operator on a computational basis whose action on a single
/// basis state can be enumerated.
pub trait Hamiltonian: LinearOperator {
    fn basis(&self) -> Basis;

    /// Append `H|bits⟩` to `out` as `(bitstring, amplitude)` pairs. Repeated
    /// bitstrings may appear and must be summed by the caller.
    fn connections(&self, bits: u64, out: &mut Vec<(u64, C64)>) -> Result<()>;

    fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let basis = self.basis();
        if !basis.same_space(v.basis()) {
            return Err(Error::Shape {
                expected: basis.dim(),
                got: v.dim(),
            });
        }
        v.with_amplitudes(self.apply_vec(v.amplitudes()))
    }

    /// `⟨v|H|v⟩` for a normalized `v`.
    fn expectation(&self, v: &StateVector) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(v.inner(&hv)?.re)
    }
}

/// Size limits for exact spectra.
#[derive(Clone, Debug)]
pub struct SpectrumLimits {
    /// Largest dimension handled by a dense eigendecomposition.
    pub dense_dim: usize,
    /// Largest dimension handled by the iterative eigensolver.
    pub iterative_dim: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SpectrumLimits {
    fn default() -> Self {
        SpectrumLimits {
            dense_dim: 1 << 10,
            iterative_dim: 1 << 20,
            lanczos: LanczosOptions {
                tol: 1e-10,
                max_basis: 80,
                ..Default::default()
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumSummary {
    pub e0: f64,
    pub e1: f64,
    pub emax: f64,
    pub ground: StateVector,
    /// Every eigenvalue, ascending, when the dense path was taken.
    pub full: Option<Vec<f64>>,
}

impl SpectrumSummary {
    /// `E1 - E0`.
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    /// `Emax - E0`.
    pub fn width(&self) -> f64 {
        self.emax - self.e0
    }

    /// Spectral norm `max(|E0|, |Emax|)`.
    pub fn norm(&self) -> f64 {
        self.e0.abs().max(self.emax.abs())
    }
}

/// Ground energy, first excited level, top of the spectrum and a ground vector.
pub fn spectrum_summary<H: Hamiltonian + ?Sized>(
    h: &H,
    limits: &SpectrumLimits,
) -> Result<SpectrumSummary> {
    let basis = h.basis();
    let dim = basis.dim();
    if dim == 0 {
        return Err(Error::InvalidSize("empty basis".into()));
    }
    if dim <= limits.dense_dim {
        let eig = eigh(&to_dense(h));
        let mut ground = eig.vector(0);
        crate::linalg::fix_global_phase(&mut ground);
        let e1 = if dim > 1 {
            eig.values[1]
        } else {
            eig.values[0]
        };
        return Ok(SpectrumSummary {
            e0: eig.values[0],
            e1,
            emax: eig.values[dim - 1],
            ground: StateVector::new(basis, ground)?,
            full: Some(eig.values),
        });
    }
    if dim > limits.iterative_dim {
        return Err(Error::Capacity {
            dim,
            limit: limits.iterative_dim,
        });
    }
    let g = lowest_eigenpair(h, None, &[], &limits.lanczos)?;
    let e1 = lowest_eigenpair(h, None, std::slice::from_ref(&g.vector), &limits.lanczos)?.value;
    let top = lowest_eigenpair(&Negated(h), None, &[], &limits.lanczos)?;
    let mut ground = g.vector;
    crate::linalg::fix_global_phase(&mut ground);
    Ok(SpectrumSummary {
        e0: g.value,
        e1,
        emax: -top.value,
        ground: StateVector::new(basis, ground)?,
        full: None,
    })
}
