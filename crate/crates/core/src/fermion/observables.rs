//! Reduced density matrices and impurity-bath correlation functions.
//!
//! Correlations are defined on position-basis modes (impurity = mode 0, bath
//! site `j` = mode `j + 1`). A state stored in rotated orbitals is paired
//! with the accumulated [`BasisRotation`] so the position-mode operators
//! `a_x = Σ_k Ξ_xk a_k` can be rotated instead of the state.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::model::BasisRotation;
use super::sector::{annihilate, create, DeterminantSector, Spin};
use crate::linalg::dot;
use crate::{Basis, Error, Result, StateVector, C64};

/// Spin-summed one-body reduced density matrix `Γ_pq = Σ_σ ⟨a†_{pσ} a_{qσ}⟩`.
#[derive(Clone, Debug)]
pub struct OneRdm {
    gamma: DMatrix<f64>,
}

impl OneRdm {
    pub fn from_matrix(gamma: DMatrix<f64>) -> Result<Self> {
        if gamma.nrows() != gamma.ncols() {
            return Err(Error::Shape {
                expected: gamma.nrows(),
                got: gamma.ncols(),
            });
        }
        if (&gamma - gamma.transpose()).amax() > 1e-10 {
            return Err(Error::InvalidParameter("1-RDM must be symmetric".into()));
        }
        Ok(OneRdm { gamma })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn trace(&self) -> f64 {
        self.gamma.trace()
    }

    /// Natural occupations, ascending.
    pub fn occupations(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .gamma
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// The same matrix in the orbitals of `rot`: `Ξᵀ Γ Ξ`.
    pub fn rotate(&self, rot: &BasisRotation) -> OneRdm {
        let g = rot.matrix().transpose() * &self.gamma * rot.matrix();
        OneRdm {
            gamma: (&g + g.transpose()) * 0.5,
        }
    }
}

fn sector_of(v: &StateVector) -> Result<&Arc<DeterminantSector>> {
    match v.basis() {
        Basis::Sector(s) => Ok(s),
        Basis::Spin { .. } => Err(Error::InvalidBasis(
            "expected a determinant-sector state".into(),
        )),
    }
}

/// Per-spin matrices `⟨a†_{pσ} a_{qσ}⟩` (real parts), `(up, down)`.
pub fn spin_resolved_rdm(v: &StateVector) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let sec = sector_of(v)?;
    v.check_normalized(1e-8)?;
    let n = sec.n_modes();
    let nd = sec.down_strings().len();
    let nu = sec.up_strings().len();
    let (tu, td) = sec.tables();
    let x = v.amplitudes();
    let mut up = DMatrix::<f64>::zeros(n, n);
    let mut down = DMatrix::<f64>::zeros(n, n);
    for iu in 0..nu {
        for e in tu.row(iu) {
            let t = e.target as usize;
            let mut acc = C64::new(0.0, 0.0);
            for id in 0..nd {
                acc += x[t * nd + id].conj() * x[iu * nd + id];
            }
            up[(e.p as usize, e.q as usize)] += e.sign * acc.re;
        }
    }
    for id in 0..nd {
        for e in td.row(id) {
            let t = e.target as usize;
            let mut acc = C64::new(0.0, 0.0);
            for iu in 0..nu {
                acc += x[iu * nd + t].conj() * x[iu * nd + id];
            }
            down[(e.p as usize, e.q as usize)] += e.sign * acc.re;
        }
    }
    let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
    Ok((sym(up), sym(down)))
}

pub fn one_rdm(v: &StateVector) -> Result<OneRdm> {
    let (up, down) = spin_resolved_rdm(v)?;
    OneRdm::from_matrix(up + down)
}

/// `Σ_pq c_pq a†_{pα} a_{qβ} v`, or `None` when the target sector is empty.
fn apply_transfer(
    v: &[C64],
    sec: &DeterminantSector,
    c: &DMatrix<f64>,
    alpha: Spin,
    beta: Spin,
) -> Option<(DeterminantSector, Vec<C64>)> {
    let n = sec.n_modes();
    let shift = |s: Spin| (if alpha == s { 1 } else { 0 }) - (if beta == s { 1 } else { 0 });
    let nu = sec.n_up() as i64 + shift(Spin::Up);
    let ndn = sec.n_down() as i64 + shift(Spin::Down);
    if nu < 0 || ndn < 0 || nu as usize > n || ndn as usize > n {
        return None;
    }
    let target = DeterminantSector::new(n, nu as usize, ndn as usize).ok()?;
    let mut out = vec![C64::new(0.0, 0.0); target.dim()];
    for (i, xi) in v.iter().enumerate() {
        if *xi == C64::new(0.0, 0.0) {
            continue;
        }
        for q in 0..n {
            let mut det = sec.determinant(i);
            let Some(s1) = annihilate(&mut det, n, q, beta) else {
                continue;
            };
            for p in 0..n {
                let cpq = c[(p, q)];
                if cpq == 0.0 {
                    continue;
                }
                let mut d2 = det;
                let Some(s2) = create(&mut d2, n, p, alpha) else {
                    continue;
                };
                let j = target
                    .index_of(target.join(d2.0, d2.1))
                    .expect("counts match target sector");
                out[j] += xi * (cpq * s1 * s2);
            }
        }
    }
    Some((target, out))
}

/// `E_{αβ}(x) v` for all four spin pairs, indexed `[α][β]` with up = 0.
fn transfers(
    v: &[C64],
    sec: &DeterminantSector,
    rot: &DMatrix<f64>,
    mode: usize,
) -> [[Option<Vec<C64>>; 2]; 2] {
    let n = sec.n_modes();
    let c = DMatrix::from_fn(n, n, |p, q| rot[(mode, p)] * rot[(mode, q)]);
    let f = |a: Spin, b: Spin| apply_transfer(v, sec, &c, a, b).map(|(_, w)| w);
    [
        [f(Spin::Up, Spin::Up), f(Spin::Up, Spin::Down)],
        [f(Spin::Down, Spin::Up), f(Spin::Down, Spin::Down)],
    ]
}

fn overlap(a: &Option<Vec<C64>>, b: &Option<Vec<C64>>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => dot(a, b).re,
        _ => 0.0,
    }
}

/// Staggered impurity-bath correlations at one bath site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationPoint {
    pub site: usize,
    /// `(-1)^j [⟨S_d·S_j⟩ - ⟨S_d⟩·⟨S_j⟩]`, with `S^μ = Σ a†_α σ^μ_αβ a_β`.
    pub spin: f64,
    /// `(-1)^j Σ_σ [⟨n_{dσ} n_{jσ}⟩ - ⟨n_{dσ}⟩⟨n_{jσ}⟩]`.
    pub density: f64,
}

/// Correlations for every bath site of a state whose orbitals are related to
/// position modes by `rotation`.
pub fn correlation_functions(
    v: &StateVector,
    rotation: &BasisRotation,
) -> Result<Vec<CorrelationPoint>> {
    let sec = sector_of(v)?;
    let n = sec.n_modes();
    (0..n.saturating_sub(1))
        .map(|j| correlation_at(v, sec, j, rotation))
        .collect()
}

fn correlation_at(
    v: &StateVector,
    sec: &DeterminantSector,
    j: usize,
    rotation: &BasisRotation,
) -> Result<CorrelationPoint> {
    let n = sec.n_modes();
    if j + 1 >= n {
        return Err(Error::Index(format!("bath site {j} outside 0..{}", n - 1)));
    }
    if rotation.n_modes() != n {
        return Err(Error::Shape {
            expected: n,
            got: rotation.n_modes(),
        });
    }
    v.check_normalized(1e-8)?;
    let x = v.amplitudes();
    let r = rotation.matrix();
    let ed = transfers(x, sec, r, 0);
    let ej = transfers(x, sec, r, j + 1);
    let occ =
        |e: &[[Option<Vec<C64>>; 2]; 2], s: usize| e[s][s].as_ref().map_or(0.0, |w| dot(x, w).re);
    let (nd_up, nd_dn) = (occ(&ed, 0), occ(&ed, 1));
    let (nj_up, nj_dn) = (occ(&ej, 0), occ(&ej, 1));

    let mut exchange = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            // ⟨E_ab(d) E_ba(j)⟩ = ⟨E_ba(d) v | E_ba(j) v⟩
            exchange += overlap(&ed[b][a], &ej[b][a]);
        }
    }
    let mut nn = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            nn += overlap(&ed[a][a], &ej[b][b]);
        }
    }
    let s_dot_s = 2.0 * exchange - nn;
    let sz = (nd_up - nd_dn) * (nj_up - nj_dn);
    let dens = overlap(&ed[0][0], &ej[0][0]) - nd_up * nj_up + overlap(&ed[1][1], &ej[1][1])
        - nd_dn * nj_dn;
    let stagger = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(CorrelationPoint {
        site: j,
        spin: stagger * (s_dot_s - sz),
        density: stagger * dens,
    })
}

pub fn staggered_spin_correlation(
    v: &StateVector,
    j: usize,
    rotation: &BasisRotation,
) -> Result<f64> {
    Ok(correlation_at(v, sector_of(v)?, j, rotation)?.spin)
}

pub fn staggered_density_correlation(
    v: &StateVector,
    j: usize,
    rotation: &BasisRotation,
) -> Result<f64> {
    Ok(correlation_at(v, sector_of(v)?, j, rotation)?.density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::model::{build_siam_position, to_momentum_basis, SiamParams};
    use crate::fermion::operator::SectorHamiltonian;
    use crate::hamiltonian::{spectrum_summary, SpectrumLimits};

    fn ground(l: usize, u: f64) -> (StateVector, StateVector, BasisRotation) {
        let h = build_siam_position(&SiamParams::symmetric(l, u)).unwrap();
        let (hm, rot) = to_momentum_basis(&h).unwrap();
        let sector = Arc::new(DeterminantSector::half_filling(l + 1).unwrap());
        let lim = SpectrumLimits::default();
        let gp = spectrum_summary(&SectorHamiltonian::new(h, sector.clone()).unwrap(), &lim)
            .unwrap()
            .ground;
        let gm = spectrum_summary(&SectorHamiltonian::new(hm, sector).unwrap(), &lim)
            .unwrap()
            .ground;
        (gp, gm, rot)
    }

    /// Direct position-basis expectation of `S_d·S_j` via ladder operators.
    fn spin_spin_oracle(v: &StateVector, j: usize) -> f64 {
        let Basis::Sector(sec) = v.basis() else {
            unreachable!()
        };
        let n = sec.n_modes();
        let x = v.amplitudes();
        let mode = j + 1;
        let mut total = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let (u, d) = sec.determinant(i);
            let bit = |m: u64, p: usize| ((m >> (n - 1 - p)) & 1) as f64;
            let szd = bit(u, 0) - bit(d, 0);
            let szj = bit(u, mode) - bit(d, mode);
            total += xi.norm_sqr() * szd * szj;
        }
        // 2 (S+_d S-_j + S-_d S+_j), S+ = a†↑ a↓
        for (i, xi) in x.iter().enumerate() {
            for (a, b) in [(Spin::Up, Spin::Down), (Spin::Down, Spin::Up)] {
                let mut det = sec.determinant(i);
                let Some(s1) = annihilate(&mut det, n, mode, a) else {
                    continue;
                };
                let Some(s2) = create(&mut det, n, mode, b) else {
                    continue;
                };
                let Some(s3) = annihilate(&mut det, n, 0, b) else {
                    continue;
                };
                let Some(s4) = create(&mut det, n, 0, a) else {
                    continue;
                };
                let k = sec.index_of(sec.join(det.0, det.1)).unwrap();
                total += 2.0 * (x[k].conj() * xi).re * s1 * s2 * s3 * s4;
            }
        }
        total
    }

    #[test]
    fn rdm_of_a_determinant_is_its_occupation() {
        let sec = Arc::new(DeterminantSector::new(3, 2, 1).unwrap());
        let bits = sec.join(0b110, 0b100);
        let v = StateVector::basis_state(Basis::Sector(sec), bits).unwrap();
        let g = one_rdm(&v).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 0.0]));
        assert!((g.matrix() - want).amax() < 1e-15);
        let rot = BasisRotation::identity(3);
        for p in correlation_functions(&v, &rot).unwrap() {
            assert!(p.density.abs() < 1e-15);
        }
    }

    #[test]
    fn empty_impurity_has_no_spin_correlation() {
        let sec = Arc::new(DeterminantSector::new(4, 2, 1).unwrap());
        let bits = sec.join(0b0110, 0b0001);
        let v = StateVector::basis_state(Basis::Sector(sec), bits).unwrap();
        for p in correlation_functions(&v, &BasisRotation::identity(4)).unwrap() {
            assert_eq!(p.spin, 0.0);
        }
        assert!(staggered_spin_correlation(&v, 3, &BasisRotation::identity(4)).is_err());
    }

    #[test]
    fn rdm_bounds_and_free_fermion_projector() {
        let l = 5;
        let h = build_siam_position(&SiamParams::symmetric(l, 0.0)).unwrap();
        let sector = Arc::new(DeterminantSector::half_filling(l + 1).unwrap());
        let g = spectrum_summary(
            &SectorHamiltonian::new(h.clone(), sector).unwrap(),
            &SpectrumLimits::default(),
        )
        .unwrap()
        .ground;
        let rdm = one_rdm(&g).unwrap();
        assert!((rdm.trace() - 6.0).abs() < 1e-9);
        let occ = rdm.occupations();
        assert!(occ.iter().all(|&o| o > -1e-9 && o < 2.0 + 1e-9));

        let eig = nalgebra::SymmetricEigen::new(h.h_one().clone());
        let mut order: Vec<usize> = (0..l + 1).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut proj = DMatrix::<f64>::zeros(l + 1, l + 1);
        for &k in &order[..3] {
            let c = eig.eigenvectors.column(k);
            proj += c * c.transpose() * 2.0;
        }
        assert!((rdm.matrix() - proj).amax() < 1e-8);
    }

    #[test]
    fn correlations_match_oracle_and_are_basis_independent() {
        let (gp, gm, rot) = ground(5, 4.0);
        let id = BasisRotation::identity(6);
        let pos = correlation_functions(&gp, &id).unwrap();
        let mom = correlation_functions(&gm, &rot).unwrap();
        for (a, b) in pos.iter().zip(&mom) {
            let stagger = if a.site % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a.spin - stagger * spin_spin_oracle(&gp, a.site)).abs() < 1e-9);
            assert!((a.spin - b.spin).abs() < 1e-8, "{a:?} {b:?}");
            assert!((a.density - b.density).abs() < 1e-8);
        }
        let rp = one_rdm(&gp).unwrap().rotate(&rot);
        let rm = one_rdm(&gm).unwrap();
        assert!((rp.matrix() - rm.matrix()).amax() < 1e-8);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let sec = Arc::new(DeterminantSector::new(2, 1, 1).unwrap());
        let v = StateVector::new(Basis::Sector(sec), vec![C64::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(one_rdm(&v), Err(Error::Normalization { .. })));
    }
}
