use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigen-decomposition of a small real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`; first nonzero component positive.
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    pub fn min(&self) -> (f64, &[f64]) {
        (self.values[0], &self.vectors[0])
    }

    pub fn max(&self) -> (f64, &[f64]) {
        let last = self.values.len() - 1;
        (self.values[last], &self.vectors[last])
    }
}

/// Largest symmetric dimension accepted by [`sym_eig_small`].
pub const SYM_EIG_MAX_DIM: usize = 16;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
///
/// Asymmetry above `1e-10` (relative to the largest entry, floored at one)
/// is rejected.
pub fn sym_eig_small(s: &DMatrix<f64>) -> Result<SymEigen> {
    let d = s.nrows();
    if d != s.ncols() || d == 0 || d > SYM_EIG_MAX_DIM {
        return Err(Error::ShapeMismatch(format!(
            "sym_eig_small needs a square matrix of size 1..={SYM_EIG_MAX_DIM}, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sym_eig_small input"));
    }
    let scale = s.amax().max(1.0);
    let asymmetry = (s - s.transpose()).amax();
    if asymmetry > 1e-10 * scale {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(d);
    let mut vectors = Vec::with_capacity(d);
    for i in order {
        values.push(eig.eigenvalues[i]);
        let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        vectors.push(v);
    }
    Ok(SymEigen { values, vectors })
}

/// Symmetric matrix from a closure over the upper triangle.
pub fn symmetric_from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = f(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eig_small(&DMatrix::identity(4, 4)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = sym_eig_small(&d).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(e.vectors[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(e.vectors[2], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut m = DMatrix::identity(3, 3);
        m[(0, 2)] = 0.5;
        assert!(matches!(sym_eig_small(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=8 {
            let s = symmetric_from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
            let e = sym_eig_small(&s).unwrap();
            let mut rebuilt = DMatrix::zeros(d, d);
            for (lambda, v) in e.values.iter().zip(&e.vectors) {
                let v = nalgebra::DVector::from_column_slice(v);
                let residual = (&s * &v - &v * *lambda).amax();
                assert!(residual < 1e-10);
                rebuilt += &v * v.transpose() * *lambda;
            }
            assert!((rebuilt - &s).amax() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
