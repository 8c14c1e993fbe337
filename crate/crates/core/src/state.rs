//! State vectors over the full spin basis or a fixed-particle-number sector.
//!
//! Computational basis states are identified by a `u64` whose most significant
//! used bit is the leftmost character of the bitstring. For spins, character
//! `j` is qubit `j + 1`; for fermion sectors the string is the spin-up
//! occupations followed by the spin-down occupations, mode 0 first.

use std::sync::Arc;

use crate::fermion::DeterminantSector;
use crate::{Error, Result, C64};

/// Largest number of bits a basis label may carry.
pub const MAX_BITS: usize = 63;

/// Render `bits` as a fixed-width binary string, most significant bit first.
pub fn format_bits(bits: u64, n_bits: usize) -> String {
    (0..n_bits)
        .map(|i| {
            if (bits >> (n_bits - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parse a binary string into its value and width.
pub fn parse_bits(s: &str) -> Result<(u64, usize)> {
    if s.is_empty() || s.len() > MAX_BITS {
        return Err(Error::InvalidParameter(format!(
            "bitstring length {} out of range",
            s.len()
        )));
    }
    let mut v = 0u64;
    for c in s.chars() {
        v = (v << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unexpected character {other:?} in bitstring"
                    )))
                }
            };
    }
    Ok((v, s.len()))
}

/// The space a [`StateVector`] lives in.
#[derive(Clone, Debug)]
pub enum Basis {
    /// All `2^n` computational basis states of `n` qubits.
    Spin { n_qubits: usize },
    /// Determinants with fixed spin-up and spin-down electron counts.
    Sector(Arc<DeterminantSector>),
}

impl Basis {
    pub fn spin(n_qubits: usize) -> Self {
        Basis::Spin { n_qubits }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Spin { n_qubits } => 1usize << n_qubits,
            Basis::Sector(s) => s.dim(),
        }
    }

    /// Width of the bitstring labels.
    pub fn n_bits(&self) -> usize {
        match self {
            Basis::Spin { n_qubits } => *n_qubits,
            Basis::Sector(s) => 2 * s.n_modes(),
        }
    }

    /// Bitstring label of basis index `i`.
    pub fn bitstring(&self, i: usize) -> u64 {
        match self {
            Basis::Spin { .. } => i as u64,
            Basis::Sector(s) => s.bitstring(i),
        }
    }

    /// Basis index of a bitstring label, if it belongs to this basis.
    pub fn index_of(&self, bits: u64) -> Option<usize> {
        match self {
            Basis::Spin { n_qubits } => ((bits >> n_qubits) == 0).then_some(bits as usize),
            Basis::Sector(s) => s.index_of(bits),
        }
    }

    pub fn same_space(&self, other: &Basis) -> bool {
        match (self, other) {
            (Basis::Spin { n_qubits: a }, Basis::Spin { n_qubits: b }) => a == b,
            (Basis::Sector(a), Basis::Sector(b)) => Arc::ptr_eq(a, b) || a.same_sector(b),
            _ => false,
        }
    }
}

/// Complex amplitudes over a [`Basis`].
#[derive(Clone, Debug)]
pub struct StateVector {
    amps: Vec<C64>,
    basis: Basis,
}

impl StateVector {
    pub fn new(basis: Basis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::Shape {
                expected: basis.dim(),
                got: amps.len(),
            });
        }
        Ok(StateVector { amps, basis })
    }

    pub fn zeros(basis: Basis) -> Self {
        let amps = vec![C64::new(0.0, 0.0); basis.dim()];
        StateVector { amps, basis }
    }

    /// The basis state with the given bitstring label.
    pub fn basis_state(basis: Basis, bits: u64) -> Result<Self> {
        let idx = basis.index_of(bits).ok_or_else(|| {
            Error::InvalidBasis(format!("bitstring {bits:#b} is not in the basis"))
        })?;
        let mut s = StateVector::zeros(basis);
        s.amps[idx] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.amps)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Normalization { norm: n });
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// Error unless `| ‖v‖ - 1 | <= tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol || !n.is_finite() {
            return Err(Error::Normalization { norm: n });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_space(other)?;
        Ok(crate::linalg::dot(&self.amps, &other.amps))
    }

    pub fn check_same_space(&self, other: &StateVector) -> Result<()> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::Shape {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Squared magnitudes, in basis order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Copy with the same basis and new amplitudes.
    pub fn with_amplitudes(&self, amps: Vec<C64>) -> Result<Self> {
        StateVector::new(self.basis.clone(), amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_formatting_is_msb_first() {
        assert_eq!(format_bits(0b10, 2), "10");
        assert_eq!(format_bits(1, 4), "0001");
        assert_eq!(parse_bits("0110").unwrap(), (6, 4));
        assert!(parse_bits("01a").is_err());
        assert!(parse_bits("").is_err());
    }

    #[test]
    fn basis_state_and_inner_product() {
        let b = Basis::spin(2);
        let s = StateVector::basis_state(b.clone(), 0b10).unwrap();
        assert_eq!(s.amplitudes()[2], C64::new(1.0, 0.0));
        assert!((s.inner(&s).unwrap().re - 1.0).abs() < 1e-15);
        let other = StateVector::zeros(Basis::spin(3));
        assert!(s.inner(&other).is_err());
        assert!(StateVector::basis_state(b, 0b100).is_err());
    }

    #[test]
    fn normalization_check() {
        let s =
            StateVector::new(Basis::spin(1), vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            s.check_normalized(1e-9),
            Err(Error::Normalization { .. })
        ));
        let mut t = s.clone();
        t.normalize().unwrap();
        t.check_normalized(1e-12).unwrap();
    }
}
