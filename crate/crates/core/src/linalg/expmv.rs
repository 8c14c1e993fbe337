//! Krylov approximation of `exp(-i t A) v` for Hermitian `A`.
//!
//! A Lanczos basis of `v` is grown until the a-posteriori error estimate
//! `‖v‖ β_m |e_mᵀ exp(-i τ T_m) e_1|` drops below the tolerance share of the
//! current substep; if the basis cap is hit first, the substep is halved.

use nalgebra::DMatrix;

use super::{axpy, dot, norm, scale, LinearOperator};
use crate::{Error, Result, C64};

#[derive(Clone, Debug)]
pub struct ExpmvOptions {
    /// Absolute 2-norm error allowed over the whole interval `t`.
    pub tol: f64,
    pub max_basis: usize,
    pub max_substeps: usize,
}

impl Default for ExpmvOptions {
    fn default() -> Self {
        ExpmvOptions {
            tol: 1e-12,
            max_basis: 60,
            max_substeps: 1 << 16,
        }
    }
}

/// `exp(-i τ T) e_1` for the real symmetric tridiagonal `T`.
fn small_exp(alphas: &[f64], betas: &[f64], tau: f64) -> Vec<C64> {
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
    let q = &eig.eigenvectors;
    (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let phase = C64::from_polar(1.0, -tau * eig.eigenvalues[k]);
                    phase * q[(r, k)] * q[(0, k)]
                })
                .sum()
        })
        .collect()
}

/// `exp(-i t A) v`.
pub fn expm_multiply<A: LinearOperator + ?Sized>(
    op: &A,
    v: &[C64],
    t: f64,
    opts: &ExpmvOptions,
) -> Result<Vec<C64>> {
    let n = op.dim();
    if v.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: v.len(),
        });
    }
    let mut out = v.to_vec();
    if t == 0.0 {
        return Ok(out);
    }
    let mut remaining = t.abs();
    let sign = t.signum();
    let mut tau = remaining;
    let mut substeps = 0usize;
    let mut w = vec![C64::new(0.0, 0.0); n];
    while remaining > 0.0 {
        substeps += 1;
        if substeps > opts.max_substeps {
            return Err(Error::Convergence {
                iterations: substeps,
                residual: f64::NAN,
            });
        }
        let step = tau.min(remaining);
        let beta0 = norm(&out);
        if beta0 == 0.0 {
            return Ok(out);
        }
        // Below a few ulps of ‖v‖ the estimate is roundoff in the small exponential.
        let budget = (opts.tol * step / t.abs()).max(64.0 * f64::EPSILON * beta0);
        let mut q0 = out.clone();
        scale(C64::new(1.0 / beta0, 0.0), &mut q0);
        let mut basis = vec![q0];
        let mut alphas = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut accepted: Option<Vec<C64>> = None;
        for j in 0..opts.max_basis.min(n) {
            op.apply_into(&basis[j], &mut w);
            let alpha = dot(&basis[j], &w).re;
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    axpy(-c, b, &mut w);
                }
            }
            let beta = norm(&w);
            alphas.push(alpha);
            let coeffs = small_exp(&alphas, &betas, sign * step);
            let estimate = beta0 * beta * coeffs[j].norm();
            let exhausted =
                j + 1 == n || beta < 1e-14 * alphas.iter().map(|a| a.abs()).fold(1.0, f64::max);
            if estimate <= budget || exhausted {
                accepted = Some(coeffs);
                break;
            }
            betas.push(beta);
            let mut next = w.clone();
            scale(C64::new(1.0 / beta, 0.0), &mut next);
            basis.push(next);
        }
        match accepted {
            Some(coeffs) => {
                let mut next = vec![C64::new(0.0, 0.0); n];
                for (b, c) in basis.iter().zip(&coeffs) {
                    axpy(c * beta0, b, &mut next);
                }
                out = next;
                remaining -= step;
                if remaining < 1e-15 * t.abs() {
                    remaining = 0.0;
                }
            }
            None => tau = step / 2.0,
        }
    }
    Ok(out)
}
