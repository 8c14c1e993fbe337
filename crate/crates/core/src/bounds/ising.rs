//! Hamming-weight distribution of the periodic Ising ground state and the
//! magnetization bound on its tail weight.

use serde::Serialize;

use crate::linalg::{lowest_eigenpair, LanczosOptions, LinearOperator};
use crate::spin::{build_tfim_periodic, PauliSum};
use crate::{Error, Result, C64};

/// `P_s H P_s` with `P_s = (1 + s X^{⊗n}) / 2`, confining an iterative solver
/// to one global spin-flip sector. The other sector maps to 0, above the
/// (negative) ground energy.
struct FlipSector<'a> {
    h: &'a PauliSum,
    sign: f64,
    mask: usize,
}

impl FlipSector<'_> {
    fn project(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = 0.5 * (x[i] + self.sign * x[i ^ self.mask]);
        }
    }
}

impl LinearOperator for FlipSector<'_> {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let mut px = vec![C64::new(0.0, 0.0); x.len()];
        self.project(x, &mut px);
        let hpx = self.h.apply_vec(&px);
        self.project(&hpx, y);
    }
}

/// Sparsity data of the symmetry-broken ground state of
/// `-Σ Z_i Z_{i+1} - h Σ X_i` on a ring.
#[derive(Clone, Debug, Serialize)]
pub struct IsingSparsity {
    pub n: usize,
    pub h: f64,
    /// `P̄(w)`: total weight on bitstrings of Hamming weight `w`, `w = 0..=n`.
    pub weights: Vec<f64>,
    /// `M_n = Σ_w P̄(w) (1 - 2w/n)`.
    pub magnetization: f64,
    /// Ground energies of the even and odd flip sectors.
    pub sector_energies: (f64, f64),
}

impl IsingSparsity {
    /// `S_n(k) = 1 - Σ_{w≤k} P̄(w)`.
    pub fn tail(&self, k: usize) -> f64 {
        (1.0 - self.weights.iter().take(k + 1).sum::<f64>()).max(0.0)
    }

    /// `min(n (1 - M_n) / (2k + 2), 1)`.
    pub fn bound(&self, k: usize) -> f64 {
        (self.n as f64 * (1.0 - self.magnetization) / (2 * k + 2) as f64).min(1.0)
    }

    /// Infinite-chain magnetization `(1 - h²)^{1/8}` for `h ≤ 1`.
    pub fn thermodynamic_magnetization(&self) -> Option<f64> {
        (self.h <= 1.0).then(|| (1.0 - self.h * self.h).powf(0.125))
    }
}

/// The ring ground space is (nearly) doubly degenerate for `h < 1`. Each flip
/// sector's ground state is computed separately, phased so that `⟨0…0|φ⟩ > 0`,
/// and the two are combined as `(φ_even + φ_odd)/√2`, the state polarized
/// towards `|0…0⟩`.
pub fn ising_sparsity(n: usize, h: f64, max_qubits: usize) -> Result<IsingSparsity> {
    if n > max_qubits {
        return Err(Error::Capacity {
            dim: 1 << n.min(62),
            limit: 1 << max_qubits.min(62),
        });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "field h = {h} must be positive"
        )));
    }
    let ham = build_tfim_periodic(n, h)?;
    let dim = 1usize << n;
    let mask = dim - 1;
    let opts = LanczosOptions {
        tol: 1e-11,
        max_basis: 80,
        ..Default::default()
    };
    let mut sectors = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let op = FlipSector {
            h: &ham,
            sign,
            mask,
        };
        let mut start = vec![C64::new(0.0, 0.0); dim];
        start[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        start[mask] = C64::new(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let pair = lowest_eigenpair(&op, Some(&start), &[], &opts)?;
        let mut v = pair.vector;
        let phase = v[0];
        if phase.norm() < 1e-300 {
            return Err(Error::DegenerateSpectrum(
                "sector ground state has no weight on |0…0⟩".into(),
            ));
        }
        let rot = phase.conj() / phase.norm();
        v.iter_mut().for_each(|x| *x *= rot);
        sectors.push((pair.value, v));
    }
    let mut weights = vec![0.0; n + 1];
    for i in 0..dim {
        let amp = (sectors[0].1[i] + sectors[1].1[i]) * std::f64::consts::FRAC_1_SQRT_2;
        weights[i.count_ones() as usize] += amp.norm_sqr();
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let magnetization = weights
        .iter()
        .enumerate()
        .map(|(w, p)| p * (1.0 - 2.0 * w as f64 / n as f64))
        .sum();
    Ok(IsingSparsity {
        n,
        h,
        weights,
        magnetization,
        sector_energies: (sectors[0].0, sectors[1].0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{spectrum_summary, SpectrumLimits};

    #[test]
    fn polarized_limit() {
        let s = ising_sparsity(8, 1e-3, 20).unwrap();
        assert!((s.magnetization - 1.0).abs() < 1e-5);
        assert!(s.tail(0) < 1e-5);
    }

    #[test]
    fn sector_energies_match_full_spectrum() {
        let s = ising_sparsity(6, 0.4, 20).unwrap();
        let full = spectrum_summary(
            &build_tfim_periodic(6, 0.4).unwrap(),
            &SpectrumLimits::default(),
        )
        .unwrap();
        let lo = s.sector_energies.0.min(s.sector_energies.1);
        assert!((lo - full.e0).abs() < 1e-9);
        let hi = s.sector_energies.0.max(s.sector_energies.1);
        assert!((hi - full.e1).abs() < 1e-9);
    }

    #[test]
    fn inequality_and_normalization() {
        let s = ising_sparsity(8, 0.3, 20).unwrap();
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 0..4 {
            assert!(s.tail(k) <= s.bound(k) + 1e-12);
        }
        assert!(ising_sparsity(8, 0.0, 20).is_err());
        assert!(matches!(
            ising_sparsity(12, 0.3, 10),
            Err(Error::Capacity { .. })
        ));
    }
}
