//! A [`FermionHamiltonian`] acting on one determinant sector.
//!
//! Amplitudes are viewed as a matrix `X[up, down]` (row-major). One-body
//! terms act on rows or columns through the per-spin excitation tables. The
//! rank-one interaction `½u Σ w_p w_q w_r w_s a†_{pσ} a†_{qτ} a_{sτ} a_{rσ}`
//! equals `½u [(O↑ + O↓)² - |w|² (O↑ + O↓)]` with `O_σ = Σ w_p w_q a†_{pσ} a_{qσ}`,
//! so it only needs the small per-spin matrices `O_σ`.

use std::sync::Arc;

use rayon::prelude::*;

use super::model::{FermionHamiltonian, TwoBody};
use super::sector::{annihilate, create, DeterminantSector, ExcitationTable, Spin};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::LinearOperator;
use crate::{Basis, Error, Result, C64};

/// Sparse real matrix on one spin species' strings, stored by rows.
#[derive(Debug)]
struct StringOperator {
    rows: Vec<Vec<(usize, f64)>>,
}

impl StringOperator {
    fn from_table(table: &ExcitationTable, n_strings: usize, w: &[f64]) -> Self {
        let rows = (0..n_strings)
            .map(|i| {
                let mut row: Vec<(usize, f64)> = Vec::new();
                for e in table.row(i) {
                    let c = w[e.p as usize] * w[e.q as usize] * e.sign;
                    if c == 0.0 {
                        continue;
                    }
                    match row.iter_mut().find(|(t, _)| *t == e.target as usize) {
                        Some(slot) => slot.1 += c,
                        None => row.push((e.target as usize, c)),
                    }
                }
                row
            })
            .collect();
        StringOperator { rows }
    }
}

pub struct SectorHamiltonian {
    ham: FermionHamiltonian,
    sector: Arc<DeterminantSector>,
    /// `(u, |w|², O↑, O↓)` when the interaction is rank-one.
    rank_one: Option<(f64, f64, StringOperator, StringOperator)>,
}

impl SectorHamiltonian {
    pub fn new(ham: FermionHamiltonian, sector: Arc<DeterminantSector>) -> Result<Self> {
        if ham.n_modes() != sector.n_modes() {
            return Err(Error::Shape {
                expected: sector.n_modes(),
                got: ham.n_modes(),
            });
        }
        let rank_one = match ham.two_body() {
            TwoBody::RankOne { u, w } => {
                let (tu, td) = sector.tables();
                let ou = StringOperator::from_table(tu, sector.up_strings().len(), w);
                let od = StringOperator::from_table(td, sector.down_strings().len(), w);
                Some((*u, w.iter().map(|x| x * x).sum(), ou, od))
            }
            _ => None,
        };
        Ok(SectorHamiltonian {
            ham,
            sector,
            rank_one,
        })
    }

    pub fn hamiltonian(&self) -> &FermionHamiltonian {
        &self.ham
    }

    pub fn sector(&self) -> &Arc<DeterminantSector> {
        &self.sector
    }

    fn one_body_row(&self, iu: usize, x: &[C64], y: &mut [C64]) {
        let nd = self.sector.down_strings().len();
        let h = self.ham.h_one();
        let (tu, td) = self.sector.tables();
        let core = self.ham.core_shift();
        let xrow = &x[iu * nd..(iu + 1) * nd];
        for (yi, xi) in y.iter_mut().zip(xrow) {
            *yi = xi * core;
        }
        for e in tu.row(iu) {
            let c = h[(e.p as usize, e.q as usize)] * e.sign;
            if c == 0.0 {
                continue;
            }
            let src = &x[e.target as usize * nd..(e.target as usize + 1) * nd];
            y.iter_mut().zip(src).for_each(|(yi, xi)| *yi += xi * c);
        }
        for (id, yi) in y.iter_mut().enumerate() {
            for e in td.row(id) {
                let c = h[(e.p as usize, e.q as usize)] * e.sign;
                if c != 0.0 {
                    *yi += xrow[e.target as usize] * c;
                }
            }
        }
    }

    /// `Y += c · O↑ X` (left multiplication by the up-string operator).
    fn left(op: &StringOperator, x: &[C64], nd: usize, c: f64, y: &mut [C64]) {
        y.par_chunks_mut(nd).enumerate().for_each(|(iu, yrow)| {
            for &(ju, o) in &op.rows[iu] {
                let src = &x[ju * nd..(ju + 1) * nd];
                yrow.iter_mut()
                    .zip(src)
                    .for_each(|(a, b)| *a += b * (o * c));
            }
        });
    }

    /// `Y += c · X O↓ᵀ`.
    fn right(op: &StringOperator, x: &[C64], nd: usize, c: f64, y: &mut [C64]) {
        y.par_chunks_mut(nd)
            .zip(x.par_chunks(nd))
            .for_each(|(yrow, xrow)| {
                for (id, yi) in yrow.iter_mut().enumerate() {
                    for &(jd, o) in &op.rows[id] {
                        *yi += xrow[jd] * (o * c);
                    }
                }
            });
    }

    fn apply_dense_two_body(&self, x: &[C64], y: &mut [C64]) {
        let n = self.ham.n_modes();
        for (i, xi) in x.iter().enumerate() {
            if *xi == C64::new(0.0, 0.0) {
                continue;
            }
            for sigma in Spin::BOTH {
                for tau in Spin::BOTH {
                    for r in 0..n {
                        for s in 0..n {
                            let mut det = self.sector.determinant(i);
                            let Some(s1) = annihilate(&mut det, n, r, sigma) else {
                                continue;
                            };
                            let Some(s2) = annihilate(&mut det, n, s, tau) else {
                                continue;
                            };
                            for q in 0..n {
                                for p in 0..n {
                                    let coeff = self.ham.h_two(p, q, r, s);
                                    if coeff == 0.0 {
                                        continue;
                                    }
                                    let mut d2 = det;
                                    let Some(s3) = create(&mut d2, n, q, tau) else {
                                        continue;
                                    };
                                    let Some(s4) = create(&mut d2, n, p, sigma) else {
                                        continue;
                                    };
                                    let j = self
                                        .sector
                                        .index_of(self.sector.join(d2.0, d2.1))
                                        .expect("number conserving");
                                    y[j] += xi * (0.5 * coeff * s1 * s2 * s3 * s4);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

impl LinearOperator for SectorHamiltonian {
    fn dim(&self) -> usize {
        self.sector.dim()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let nd = self.sector.down_strings().len();
        y.par_chunks_mut(nd)
            .enumerate()
            .for_each(|(iu, yrow)| self.one_body_row(iu, x, yrow));
        match (&self.rank_one, self.ham.two_body()) {
            (Some((u, w2, ou, od)), _) => {
                let dim = x.len();
                let mut a = vec![C64::new(0.0, 0.0); dim];
                let mut b = vec![C64::new(0.0, 0.0); dim];
                Self::left(ou, x, nd, 1.0, &mut a);
                Self::right(od, x, nd, 1.0, &mut b);
                let half = 0.5 * u;
                Self::left(ou, &a, nd, half, y);
                Self::right(od, &b, nd, half, y);
                Self::left(ou, &b, nd, 2.0 * half, y);
                y.par_iter_mut()
                    .zip(a.par_iter().zip(b.par_iter()))
                    .for_each(|(yi, (ai, bi))| *yi -= (ai + bi) * (half * w2));
            }
            (None, TwoBody::Dense(_)) => self.apply_dense_two_body(x, y),
            _ => {}
        }
    }
}

impl Hamiltonian for SectorHamiltonian {
    fn basis(&self) -> Basis {
        Basis::Sector(self.sector.clone())
    }

    fn connections(&self, bits: u64, out: &mut Vec<(u64, C64)>) -> Result<()> {
        let sec = &self.sector;
        let idx = sec.index_of(bits).ok_or_else(|| {
            Error::InvalidBasis(format!(
                "{} is outside the sector",
                crate::state::format_bits(bits, 2 * sec.n_modes())
            ))
        })?;
        let nd = sec.down_strings().len();
        let (iu, id) = (idx / nd, idx % nd);
        let (up, down) = (sec.up_strings(), sec.down_strings());
        let h = self.ham.h_one();
        let (tu, td) = sec.tables();
        let real = |x: f64| C64::new(x, 0.0);
        out.push((bits, real(self.ham.core_shift())));
        for e in tu.row(iu) {
            let c = h[(e.p as usize, e.q as usize)] * e.sign;
            if c != 0.0 {
                out.push((sec.join(up[e.target as usize], down[id]), real(c)));
            }
        }
        for e in td.row(id) {
            let c = h[(e.p as usize, e.q as usize)] * e.sign;
            if c != 0.0 {
                out.push((sec.join(up[iu], down[e.target as usize]), real(c)));
            }
        }
        match (&self.rank_one, self.ham.two_body()) {
            (Some((u, w2, ou, od)), _) => {
                let half = 0.5 * u;
                for &(ju, a) in &ou.rows[iu] {
                    out.push((sec.join(up[ju], down[id]), real(-half * w2 * a)));
                    for &(ku, b) in &ou.rows[ju] {
                        out.push((sec.join(up[ku], down[id]), real(half * a * b)));
                    }
                    for &(jd, b) in &od.rows[id] {
                        out.push((sec.join(up[ju], down[jd]), real(2.0 * half * a * b)));
                    }
                }
                for &(jd, a) in &od.rows[id] {
                    out.push((sec.join(up[iu], down[jd]), real(-half * w2 * a)));
                    for &(kd, b) in &od.rows[jd] {
                        out.push((sec.join(up[iu], down[kd]), real(half * a * b)));
                    }
                }
            }
            (None, TwoBody::Dense(_)) => {
                let mut x = vec![C64::new(0.0, 0.0); sec.dim()];
                x[idx] = real(1.0);
                let mut y = vec![C64::new(0.0, 0.0); sec.dim()];
                self.apply_dense_two_body(&x, &mut y);
                out.extend(
                    y.iter()
                        .enumerate()
                        .filter(|(_, v)| v.norm() != 0.0)
                        .map(|(j, v)| (sec.bitstring(j), *v)),
                );
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::model::{build_siam_position, to_momentum_basis, SiamParams};
    use crate::linalg::{dot, eigh, to_dense};
    use nalgebra::DMatrix;

    fn random_vec(dim: usize, seed: u64) -> Vec<C64> {
        use rand::Rng;
        let mut rng = crate::rng::substream(seed, 1);
        (0..dim)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn interaction_only_counts_double_occupancy() {
        let n = 3;
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        let ham =
            FermionHamiltonian::new(DMatrix::zeros(n, n), TwoBody::RankOne { u: 2.5, w }, 0.0)
                .unwrap();
        let sector = Arc::new(DeterminantSector::new(n, 1, 2).unwrap());
        let op = SectorHamiltonian::new(ham, sector.clone()).unwrap();
        let d = to_dense(&op);
        for i in 0..sector.dim() {
            let (u, dn) = sector.determinant(i);
            let double = (u & dn & 0b100) != 0;
            for j in 0..sector.dim() {
                let want = if i == j && double { 2.5 } else { 0.0 };
                assert!((d[(i, j)].re - want).abs() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn rank_one_matches_dense_tensor_after_rotation() {
        let h = build_siam_position(&SiamParams::symmetric(3, 3.0)).unwrap();
        let (hm, _) = to_momentum_basis(&h).unwrap();
        let sector = Arc::new(DeterminantSector::half_filling(4).unwrap());
        let fast = SectorHamiltonian::new(hm.clone(), sector.clone()).unwrap();
        let slow = SectorHamiltonian::new(hm.with_dense_two_body(), sector.clone()).unwrap();
        let a = to_dense(&fast);
        let b = to_dense(&slow);
        assert!((&a - &b).camax() < 1e-12);
        assert!((&a - a.adjoint()).camax() < 1e-12);

        let x = random_vec(sector.dim(), 3);
        let u = random_vec(sector.dim(), 4);
        let lhs = dot(&u, &fast.apply_vec(&x));
        let rhs = dot(&fast.apply_vec(&u), &x);
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn connections_reproduce_columns() {
        let h = build_siam_position(&SiamParams::symmetric(3, 2.0)).unwrap();
        let (hm, _) = to_momentum_basis(&h).unwrap();
        let sector = Arc::new(DeterminantSector::new(4, 2, 1).unwrap());
        for ham in [hm.clone(), hm.with_dense_two_body()] {
            let op = SectorHamiltonian::new(ham, sector.clone()).unwrap();
            let d = to_dense(&op);
            let mut out = Vec::new();
            for j in 0..sector.dim() {
                out.clear();
                op.connections(sector.bitstring(j), &mut out).unwrap();
                let mut col = vec![C64::new(0.0, 0.0); sector.dim()];
                for &(b, a) in &out {
                    col[sector.index_of(b).unwrap()] += a;
                }
                for i in 0..sector.dim() {
                    assert!((col[i] - d[(i, j)]).norm() < 1e-12);
                }
            }
            assert!(op.connections(0, &mut out).is_err());
        }
    }

    #[test]
    fn momentum_rotation_preserves_spectrum() {
        let h = build_siam_position(&SiamParams::symmetric(3, 2.0)).unwrap();
        let (hm, _) = to_momentum_basis(&h).unwrap();
        let sector = Arc::new(DeterminantSector::half_filling(4).unwrap());
        let e_pos = eigh(&to_dense(
            &SectorHamiltonian::new(h, sector.clone()).unwrap(),
        ))
        .values;
        let e_mom = eigh(&to_dense(&SectorHamiltonian::new(hm, sector).unwrap())).values;
        for (a, b) in e_pos.iter().zip(&e_mom) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
