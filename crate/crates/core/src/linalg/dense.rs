use nalgebra::DMatrix;

use super::LinearOperator;
use crate::C64;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i).iter().copied().collect()
    }
}

/// Materialize an operator column by column.
pub fn to_dense<A: LinearOperator + ?Sized>(op: &A) -> DMatrix<C64> {
    let n = op.dim();
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        op.apply_into(&e, &mut col);
        m.column_mut(j)
            .iter_mut()
            .zip(&col)
            .for_each(|(d, s)| *d = *s);
        e[j] = C64::new(0.0, 0.0);
    }
    m
}

/// Dense Hermitian eigensolver. Takes the real symmetric path when every
/// imaginary part vanishes, which is several times faster.
pub fn eigh(m: &DMatrix<C64>) -> HermitianEigen {
    let n = m.nrows();
    let is_real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors) = if is_real {
        let mut re = m.map(|z| z.re);
        re = (&re + re.transpose()) * 0.5;
        let eig = re.symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors,
        )
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }
    HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_and_handles_complex() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(1.0, 0.0),
            ],
        );
        let e = eigh(&m);
        assert!((e.values[0] - 0.0).abs() < 1e-12);
        assert!((e.values[1] - 2.0).abs() < 1e-12);
        let v = e.vector(1);
        let mv = &m * DMatrix::from_column_slice(2, 1, &v);
        assert!((mv[0] - v[0] * 2.0).norm() < 1e-12);

        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(-2.0, 0.0),
            C64::new(5.0, 0.0),
        ]));
        let e = eigh(&d);
        assert_eq!(e.values, vec![-2.0, 3.0, 5.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }
}
