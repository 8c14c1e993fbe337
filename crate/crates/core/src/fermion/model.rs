//! Second-quantized Hamiltonians
//! `H = Σ h_pq a†_{pσ} a_{qσ} + ½ Σ h_pqrs a†_{pσ} a†_{qτ} a_{sτ} a_{rσ} + c`
//! and the single-impurity Anderson model in its three orbital bases.

use nalgebra::{DMatrix, SymmetricEigen};

use super::observables::OneRdm;
use crate::{Error, Result};

/// Two-body tensor `h_pqrs`.
#[derive(Clone, Debug)]
pub enum TwoBody {
    Zero,
    /// `h_pqrs = u · w_p w_q w_r w_s`.
    RankOne {
        u: f64,
        w: Vec<f64>,
    },
    /// Row-major `h[((p n + q) n + r) n + s]`.
    Dense(Vec<f64>),
}

/// Orthonormal single-particle change of basis. Column `k` holds new orbital
/// `k` expanded in the old modes: `c†_k = Σ_p xi_pk a†_p`.
#[derive(Clone, Debug)]
pub struct BasisRotation {
    xi: DMatrix<f64>,
}

impl BasisRotation {
    pub fn identity(n: usize) -> Self {
        BasisRotation {
            xi: DMatrix::identity(n, n),
        }
    }

    pub fn new(xi: DMatrix<f64>) -> Result<Self> {
        if xi.nrows() != xi.ncols() {
            return Err(Error::Shape {
                expected: xi.nrows(),
                got: xi.ncols(),
            });
        }
        let defect = (xi.transpose() * &xi - DMatrix::identity(xi.nrows(), xi.nrows())).amax();
        if defect > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "rotation is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(BasisRotation { xi })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.xi
    }

    pub fn n_modes(&self) -> usize {
        self.xi.nrows()
    }

    /// Rotation by `self` followed by `next` (expressed in `self`'s orbitals).
    pub fn then(&self, next: &BasisRotation) -> BasisRotation {
        BasisRotation {
            xi: &self.xi * &next.xi,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FermionHamiltonian {
    n_modes: usize,
    h_one: DMatrix<f64>,
    two: TwoBody,
    core_shift: f64,
}

impl FermionHamiltonian {
    pub fn new(h_one: DMatrix<f64>, two: TwoBody, core_shift: f64) -> Result<Self> {
        let n = h_one.nrows();
        if n == 0 || h_one.ncols() != n {
            return Err(Error::Shape {
                expected: n,
                got: h_one.ncols(),
            });
        }
        if n > super::sector::MAX_MODES {
            return Err(Error::InvalidSize(format!(
                "{n} modes (limit {})",
                super::sector::MAX_MODES
            )));
        }
        let asym = (&h_one - h_one.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "one-body matrix not symmetric ({asym:.3e})"
            )));
        }
        match &two {
            TwoBody::Zero => {}
            TwoBody::RankOne { w, .. } if w.len() != n => {
                return Err(Error::Shape {
                    expected: n,
                    got: w.len(),
                })
            }
            TwoBody::RankOne { .. } => {}
            TwoBody::Dense(t) => {
                if t.len() != n.pow(4) {
                    return Err(Error::Shape {
                        expected: n.pow(4),
                        got: t.len(),
                    });
                }
                let at = |p: usize, q: usize, r: usize, s: usize| t[((p * n + q) * n + r) * n + s];
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for s in 0..n {
                                let v = at(p, q, r, s);
                                if (v - at(r, s, p, q)).abs() > 1e-12
                                    || (v - at(q, p, s, r)).abs() > 1e-12
                                {
                                    return Err(Error::InvalidParameter(format!(
                                        "two-body tensor lacks pair symmetry at ({p},{q},{r},{s})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(FermionHamiltonian {
            n_modes: n,
            h_one,
            two,
            core_shift,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn h_one(&self) -> &DMatrix<f64> {
        &self.h_one
    }

    pub fn two_body(&self) -> &TwoBody {
        &self.two
    }

    pub fn core_shift(&self) -> f64 {
        self.core_shift
    }

    /// `h_pqrs`.
    pub fn h_two(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_modes;
        match &self.two {
            TwoBody::Zero => 0.0,
            TwoBody::RankOne { u, w } => u * w[p] * w[q] * w[r] * w[s],
            TwoBody::Dense(t) => t[((p * n + q) * n + r) * n + s],
        }
    }

    /// The same operator with the two-body tensor stored densely.
    pub fn with_dense_two_body(&self) -> Self {
        let n = self.n_modes;
        let mut t = vec![0.0; n.pow(4)];
        for (idx, v) in t.iter_mut().enumerate() {
            let (p, q, r, s) = (idx / n.pow(3), (idx / n.pow(2)) % n, (idx / n) % n, idx % n);
            *v = self.h_two(p, q, r, s);
        }
        FermionHamiltonian {
            two: TwoBody::Dense(t),
            ..self.clone()
        }
    }

    /// One-body part plus the constant shift.
    pub fn one_body_part(&self) -> Self {
        FermionHamiltonian {
            two: TwoBody::Zero,
            ..self.clone()
        }
    }

    /// Two-body part alone.
    pub fn two_body_part(&self) -> Self {
        FermionHamiltonian {
            h_one: DMatrix::zeros(self.n_modes, self.n_modes),
            core_shift: 0.0,
            ..self.clone()
        }
    }

    /// Express the operator in the orbitals of `rot`: `h → Ξᵀ h Ξ`, `w → Ξᵀ w`.
    pub fn rotate(&self, rot: &BasisRotation) -> Result<Self> {
        let n = self.n_modes;
        if rot.n_modes() != n {
            return Err(Error::Shape {
                expected: n,
                got: rot.n_modes(),
            });
        }
        let xi = rot.matrix();
        let mut h_one = xi.transpose() * &self.h_one * xi;
        h_one = (&h_one + h_one.transpose()) * 0.5;
        let two = match &self.two {
            TwoBody::Zero => TwoBody::Zero,
            TwoBody::RankOne { u, w } => {
                let w = xi.transpose() * nalgebra::DVector::from_column_slice(w);
                TwoBody::RankOne {
                    u: *u,
                    w: w.iter().copied().collect(),
                }
            }
            TwoBody::Dense(t) => TwoBody::Dense(rotate_dense(t, xi)),
        };
        Ok(FermionHamiltonian {
            n_modes: n,
            h_one,
            two,
            core_shift: self.core_shift,
        })
    }
}

/// Four successive single-index contractions with `xi`.
fn rotate_dense(t: &[f64], xi: &DMatrix<f64>) -> Vec<f64> {
    let n = xi.nrows();
    let mut cur = t.to_vec();
    // Each pass rotates the last index and cycles it to the front.
    for _ in 0..4 {
        let mut next = vec![0.0; cur.len()];
        for a in 0..n.pow(3) {
            for s in 0..n {
                let mut acc = 0.0;
                for d in 0..n {
                    acc += cur[a * n + d] * xi[(d, s)];
                }
                // (a0 a1 a2, s) -> (s, a0 a1 a2)
                next[s * n.pow(3) + a] = acc;
            }
        }
        cur = next;
    }
    cur
}

/// Parameters of the single-impurity Anderson model on an open bath chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SiamParams {
    /// Bath sites `L`; the model has `L + 1` modes.
    pub bath_sites: usize,
    pub u: f64,
    pub t: f64,
    pub v: f64,
    pub eps_imp: f64,
}

impl SiamParams {
    /// `t = 1`, `V = -1`, `ε = -U/2` (particle-hole symmetric impurity).
    pub fn symmetric(bath_sites: usize, u: f64) -> Self {
        SiamParams {
            bath_sites,
            u,
            t: 1.0,
            v: -1.0,
            eps_imp: -u / 2.0,
        }
    }
}

/// Impurity is mode 0 and bath site `j` is mode `j + 1`.
pub fn build_siam_position(p: &SiamParams) -> Result<FermionHamiltonian> {
    if p.bath_sites < 1 {
        return Err(Error::InvalidSize(
            "the bath needs at least one site".into(),
        ));
    }
    let n = p.bath_sites + 1;
    let mut h = DMatrix::<f64>::zeros(n, n);
    h[(0, 0)] = p.eps_imp;
    h[(0, 1)] = p.v;
    h[(1, 0)] = p.v;
    for j in 1..n - 1 {
        h[(j, j + 1)] = -p.t;
        h[(j + 1, j)] = -p.t;
    }
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    FermionHamiltonian::new(h, TwoBody::RankOne { u: p.u, w }, 0.0)
}

/// Eigenvectors of a real symmetric matrix with ascending eigenvalues.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vecs)
}

/// Diagonalize the bath block (modes `1..n`), leaving the impurity alone.
/// Momentum modes are ordered by ascending single-particle energy, each with
/// its first nonzero component positive.
pub fn to_momentum_basis(h: &FermionHamiltonian) -> Result<(FermionHamiltonian, BasisRotation)> {
    let n = h.n_modes();
    if n < 2 {
        return Err(Error::InvalidSize("no bath modes to rotate".into()));
    }
    let bath = h.h_one().view((1, 1), (n - 1, n - 1)).into_owned();
    let (_, mut xi) = sorted_eigen(bath);
    for mut col in xi.column_iter_mut() {
        if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
    let mut full = DMatrix::<f64>::identity(n, n);
    full.view_mut((1, 1), (n - 1, n - 1)).copy_from(&xi);
    let rot = BasisRotation::new(full)?;
    Ok((h.rotate(&rot)?, rot))
}

/// Mode index of bath momentum `k` in the momentum basis.
pub fn momentum_mode(k: usize) -> usize {
    k + 1
}

/// Block-diagonalize the 1-RDM into k-adjacent natural orbitals.
///
/// Block 1 mixes the impurity with momenta `k_f - 1`, `k_f`, `k_f + 1`; its
/// natural orbitals, by descending occupation, replace the modes of
/// `k_f - 1`, `k_f`, the impurity and `k_f + 1` in that order, so the
/// mode layout (filled below the Fermi level, empty above) is kept. The
/// remaining momenta below and above form blocks 2 and 3, each filled in
/// ascending mode order by descending occupation. Every column is
/// sign-fixed so its largest-magnitude entry is positive.
pub fn to_k_adjacent_natural_orbitals(
    h_mom: &FermionHamiltonian,
    gamma: &OneRdm,
    k_f: usize,
) -> Result<(FermionHamiltonian, BasisRotation)> {
    let n = h_mom.n_modes();
    let l = n - 1;
    if gamma.matrix().nrows() != n {
        return Err(Error::Shape {
            expected: n,
            got: gamma.matrix().nrows(),
        });
    }
    if k_f < 1 || k_f + 1 > l - 1 {
        return Err(Error::Index(format!(
            "Fermi index {k_f} needs neighbours inside 0..{l}"
        )));
    }
    let m = momentum_mode;
    let b1_modes = {
        let mut v = vec![0, m(k_f - 1), m(k_f), m(k_f + 1)];
        v.sort_unstable();
        v
    };
    let b1_slots = [m(k_f - 1), m(k_f), 0, m(k_f + 1)];
    let b2: Vec<usize> = (0..k_f - 1).map(m).collect();
    let b3: Vec<usize> = (k_f + 2..l).map(m).collect();

    let mut xi = DMatrix::<f64>::zeros(n, n);
    let mut place = |modes: &[usize], slots: &[usize]| {
        if modes.is_empty() {
            return;
        }
        let k = modes.len();
        let sub = DMatrix::from_fn(k, k, |a, b| gamma.matrix()[(modes[a], modes[b])]);
        let (_, vecs) = sorted_eigen(-sub);
        for (col, &slot) in slots.iter().enumerate() {
            let mut v: Vec<f64> = vecs.column(col).iter().copied().collect();
            let pivot = v.iter().copied().fold(0.0f64, |best, x| {
                if x.abs() > best.abs() + 1e-12 {
                    x
                } else {
                    best
                }
            });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            for (a, &mode) in modes.iter().enumerate() {
                xi[(mode, slot)] = v[a];
            }
        }
    };
    place(&b1_modes, &b1_slots);
    place(&b2, &b2);
    place(&b3, &b3);
    let rot = BasisRotation::new(xi)?;
    Ok((h_mom.rotate(&rot)?, rot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_siam() {
        let h = build_siam_position(&SiamParams {
            bath_sites: 1,
            u: 0.0,
            t: 1.0,
            v: -1.0,
            eps_imp: 0.0,
        })
        .unwrap();
        assert_eq!(
            h.h_one(),
            &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0])
        );
        let p = SiamParams::symmetric(7, 4.0);
        assert_eq!((p.t, p.v, p.eps_imp), (1.0, -1.0, -2.0));
        assert!(build_siam_position(&SiamParams::symmetric(0, 1.0)).is_err());
    }

    #[test]
    fn momentum_basis_two_sites() {
        let h = build_siam_position(&SiamParams::symmetric(2, 1.0)).unwrap();
        let (hm, rot) = to_momentum_basis(&h).unwrap();
        assert!((hm.h_one()[(1, 1)] + 1.0).abs() < 1e-12);
        assert!((hm.h_one()[(2, 2)] - 1.0).abs() < 1e-12);
        assert!(hm.h_one()[(1, 2)].abs() < 1e-12);
        let s = 0.5f64.sqrt();
        assert!(
            (rot.matrix()[(1, 1)] - s).abs() < 1e-12 && (rot.matrix()[(2, 1)] - s).abs() < 1e-12
        );
        assert!(
            (rot.matrix()[(1, 2)] - s).abs() < 1e-12 && (rot.matrix()[(2, 2)] + s).abs() < 1e-12
        );
        assert!((hm.h_one()[(0, 1)].abs() - s).abs() < 1e-12);
        assert!((hm.h_one()[(0, 2)].abs() - s).abs() < 1e-12);
        match hm.two_body() {
            TwoBody::RankOne { w, .. } => assert_eq!(w, &vec![1.0, 0.0, 0.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn momentum_energies_are_cosines() {
        let l = 7;
        let h = build_siam_position(&SiamParams::symmetric(l, 2.0)).unwrap();
        let (hm, rot) = to_momentum_basis(&h).unwrap();
        for k in 0..l {
            let want = -2.0 * ((k + 1) as f64 * std::f64::consts::PI / (l + 1) as f64).cos();
            assert!((hm.h_one()[(k + 1, k + 1)] - want).abs() < 1e-12);
            assert!((hm.h_one()[(0, k + 1)] - -rot.matrix()[(1, k + 1)]).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_rotation_matches_rank_one() {
        let h = build_siam_position(&SiamParams::symmetric(3, 3.0)).unwrap();
        let (hm, rot) = to_momentum_basis(&h).unwrap();
        let via_dense = h.with_dense_two_body().rotate(&rot).unwrap();
        for p in 0..4 {
            for q in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        assert!((via_dense.h_two(p, q, r, s) - hm.h_two(p, q, r, s)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn natural_orbitals_of_diagonal_rdm_are_a_permutation() {
        let h = build_siam_position(&SiamParams::symmetric(5, 2.0)).unwrap();
        let (hm, _) = to_momentum_basis(&h).unwrap();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 1.9, 1.8, 1.7, 0.3, 0.2,
        ]));
        let (hn, rot) =
            to_k_adjacent_natural_orbitals(&hm, &OneRdm::from_matrix(diag).unwrap(), 2).unwrap();
        for c in 0..6 {
            let nz: Vec<f64> = rot
                .matrix()
                .column(c)
                .iter()
                .copied()
                .filter(|x| x.abs() > 1e-12)
                .collect();
            assert_eq!(nz, vec![1.0]);
        }
        // block 1 = {imp, k1, k2, k3} occupations 1.0, 1.8, 1.7, 0.3
        assert_eq!(rot.matrix()[(momentum_mode(1), momentum_mode(1))], 1.0);
        assert_eq!(rot.matrix()[(momentum_mode(2), momentum_mode(2))], 1.0);
        assert_eq!(rot.matrix()[(0, 0)], 1.0);
        match hn.two_body() {
            TwoBody::RankOne { w, .. } => assert_eq!(w.iter().filter(|x| x.abs() > 0.0).count(), 1),
            other => panic!("{other:?}"),
        }
        assert!(to_k_adjacent_natural_orbitals(
            &hm,
            &OneRdm::from_matrix(DMatrix::identity(6, 6)).unwrap(),
            4
        )
        .is_err());
        assert!(to_k_adjacent_natural_orbitals(
            &hm,
            &OneRdm::from_matrix(DMatrix::identity(6, 6)).unwrap(),
            0
        )
        .is_err());
    }
}
