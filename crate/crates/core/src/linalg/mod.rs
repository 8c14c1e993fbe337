//! Matrix-free operators and the eigen/propagation kernels built on them.

mod dense;
mod expmv;
mod lanczos;
mod sparse;

pub use dense::{eigh, to_dense, HermitianEigen};
pub use expmv::{expm_multiply, ExpmvOptions};
pub use lanczos::{lowest_eigenpair, EigenPair, LanczosOptions};
pub use sparse::SparseMatrix;

use rand::Rng;

use crate::C64;

/// A Hermitian linear map applied without materializing the matrix.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// Overwrite `y` with `A x`.
    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply_into(x, y)
    }
}

/// `-A`, used to reach the top of a spectrum with a lowest-eigenvalue solver.
pub struct Negated<'a, A: ?Sized>(pub &'a A);

impl<A: LinearOperator + ?Sized> LinearOperator for Negated<'_, A> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.0.apply_into(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

/// `⟨a|b⟩`, conjugating the left argument.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha x`.
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

pub fn scale(alpha: C64, x: &mut [C64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

/// Deterministic pseudo-random unit vector, used as a Lanczos start.
pub fn seeded_unit_vector(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = crate::rng::substream(seed, 0x51a7);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, 0.0))
        .collect();
    let n = norm(&v);
    scale(C64::new(1.0 / n, 0.0), &mut v);
    v
}

/// Rotate `v` by a global phase so its largest-magnitude entry is real positive.
pub fn fix_global_phase(v: &mut [C64]) {
    let Some((_, pivot)) =
        v.iter()
            .enumerate()
            .fold(None::<(f64, C64)>, |best, (_, &x)| match best {
                Some((m, _)) if m >= x.norm() - 1e-14 => best,
                _ => Some((x.norm(), x)),
            })
    else {
        return;
    };
    if pivot.norm() == 0.0 {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    scale(phase, v);
}
