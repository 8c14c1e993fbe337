//! Restarted Lanczos iteration for the lowest eigenpair of a Hermitian operator.
//!
//! The Krylov basis is fully reorthogonalized (twice, classical Gram-Schmidt),
//! so the Ritz values stay clean without selective-orthogonalization
//! bookkeeping. Optional locked vectors are projected out of every iterate,
//! which yields the lowest eigenpair of the operator compressed to their
//! orthogonal complement (used for the first excited level).

use nalgebra::DMatrix;

use super::{axpy, dot, norm, scale, seeded_unit_vector, LinearOperator};
use crate::{Error, Result, C64};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Residual target, relative to `max(1, |λ|)`.
    pub tol: f64,
    /// Krylov basis size before an explicit restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Seed of the pseudo-random start vector when none is supplied.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            max_basis: 120,
            max_restarts: 60,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
    /// `‖A v - λ v‖` of the returned pair.
    pub residual: f64,
    /// Total operator applications.
    pub iterations: usize,
}

fn project_out(locked: &[Vec<C64>], v: &mut [C64]) {
    for _ in 0..2 {
        for u in locked {
            let c = dot(u, v);
            axpy(-c, u, v);
        }
    }
}

fn lowest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (
        eig.eigenvalues[k],
        eig.eigenvectors.column(k).iter().copied().collect(),
    )
}

/// Lowest eigenpair of `op` restricted to the complement of `locked`
/// (which must be orthonormal).
pub fn lowest_eigenpair<A: LinearOperator + ?Sized>(
    op: &A,
    start: Option<&[C64]>,
    locked: &[Vec<C64>],
    opts: &LanczosOptions,
) -> Result<EigenPair> {
    let n = op.dim();
    let n_eff = n.saturating_sub(locked.len());
    if n_eff == 0 {
        return Err(Error::InvalidSize(
            "no directions left for the eigensolver".into(),
        ));
    }
    let mut x = match start {
        Some(s) if s.len() == n => s.to_vec(),
        Some(s) => {
            return Err(Error::Shape {
                expected: n,
                got: s.len(),
            })
        }
        None => seeded_unit_vector(n, opts.seed),
    };
    project_out(locked, &mut x);
    if norm(&x) < 1e-8 {
        x = seeded_unit_vector(n, opts.seed ^ 0xdead_beef);
        project_out(locked, &mut x);
    }
    let nx = norm(&x);
    scale(C64::new(1.0 / nx, 0.0), &mut x);

    let mut iterations = 0usize;
    let mut last_residual = f64::INFINITY;
    let mut w = vec![C64::new(0.0, 0.0); n];
    for _restart in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<C64>> = vec![x.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut ritz: (f64, Vec<f64>) = (0.0, vec![]);
        let limit = opts.max_basis.min(n_eff).max(1);
        for j in 0..limit {
            op.apply_into(&basis[j], &mut w);
            iterations += 1;
            project_out(locked, &mut w);
            let alpha = dot(&basis[j], &w).re;
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let beta = norm(&w);
            alphas.push(alpha);
            let scale_ref = alphas.iter().map(|a| a.abs()).fold(1.0, f64::max);
            let breakdown = beta <= 1e-13 * scale_ref;
            let last = j + 1 == limit;
            if breakdown || last || (j + 1) % 4 == 0 {
                ritz = lowest_ritz(&alphas, &betas);
                let estimate = beta * ritz.1[j].abs();
                if breakdown || last || estimate <= 0.1 * opts.tol * ritz.0.abs().max(1.0) {
                    break;
                }
            }
            betas.push(beta);
            let mut next = w.clone();
            scale(C64::new(1.0 / beta, 0.0), &mut next);
            basis.push(next);
        }
        let mut candidate = vec![C64::new(0.0, 0.0); n];
        for (v, &c) in basis.iter().zip(&ritz.1) {
            axpy(C64::new(c, 0.0), v, &mut candidate);
        }
        project_out(locked, &mut candidate);
        let nc = norm(&candidate);
        scale(C64::new(1.0 / nc, 0.0), &mut candidate);
        op.apply_into(&candidate, &mut w);
        iterations += 1;
        project_out(locked, &mut w);
        let value = dot(&candidate, &w).re;
        axpy(C64::new(-value, 0.0), &candidate, &mut w);
        let residual = norm(&w);
        last_residual = residual;
        x = candidate;
        if residual <= opts.tol * value.abs().max(1.0) {
            return Ok(EigenPair {
                value,
                vector: x,
                residual,
                iterations,
            });
        }
    }
    Err(Error::Convergence {
        iterations,
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, SparseMatrix};

    fn path_laplacian(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, C64::new(2.0 + 0.01 * i as f64, 0.0)));
            if i + 1 < n {
                t.push((i, i + 1, C64::new(-1.0, 0.0)));
                t.push((i + 1, i, C64::new(-1.0, 0.0)));
            }
        }
        SparseMatrix::from_triplets(n, t)
    }

    #[test]
    fn matches_dense_lowest_and_second() {
        let m = path_laplacian(300);
        let dense = eigh(&m.to_dense());
        let opts = LanczosOptions::default();
        let g = lowest_eigenpair(&m, None, &[], &opts).unwrap();
        assert!(
            (g.value - dense.values[0]).abs() < 1e-9,
            "{} vs {}",
            g.value,
            dense.values[0]
        );
        assert!(g.residual < 1e-8);
        let e1 = lowest_eigenpair(&m, None, std::slice::from_ref(&g.vector), &opts).unwrap();
        assert!((e1.value - dense.values[1]).abs() < 1e-9);
    }

    #[test]
    fn tiny_operator_terminates_on_breakdown() {
        let m = SparseMatrix::from_triplets(
            2,
            vec![(0, 0, C64::new(3.0, 0.0)), (1, 1, C64::new(-2.0, 0.0))],
        );
        let g = lowest_eigenpair(&m, None, &[], &LanczosOptions::default()).unwrap();
        assert!((g.value + 2.0).abs() < 1e-12);
        assert!((g.vector[1].norm() - 1.0).abs() < 1e-12);
    }
}
