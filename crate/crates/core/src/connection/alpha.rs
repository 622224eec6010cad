use crate::algebra::{Field, Mat, Quat};
use crate::error::{Error, Result};
use crate::homogeneous::m_element;

/// An element `alpha` of `m`, the structure algebra `o(k)`, `u(1)` or `sp(1)`,
/// held as its `k x k` block; it sits in `g` as `diag(alpha, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaElement {
    block: Mat,
}

impl AlphaElement {
    /// Any anti-Hermitian `k x k` block.
    pub fn new(block: Mat) -> Result<Self> {
        if block.rows() != block.cols() {
            return Err(Error::ShapeMismatch(format!("alpha block {:?}", block.shape())));
        }
        let residual = block.anti_hermitian_residual();
        if residual > 1e-10 * block.norm().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be anti-Hermitian (residual {residual:e})"
            )));
        }
        Ok(AlphaElement { block })
    }

    /// The unit element whose adjoint action on `p` is the structure `J_q`
    /// (`k = 1`, `q` a unit imaginary scalar): `alpha = -q`, so that
    /// `[alpha, X~]` lifts `X q`.
    pub fn from_structure(field: Field, q: Quat) -> Result<Self> {
        if field == Field::Real {
            return Err(Error::UnsupportedField {
                op: "structure element",
                field,
            });
        }
        if !field.contains(q) || q.re().abs() > 1e-12 || (q.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "structure element needs a unit imaginary scalar of {field}, got {q}"
            )));
        }
        Ok(AlphaElement {
            block: Mat::column(field, &[-q]),
        })
    }

    /// `x y^T - y x^T` for real `x, y` (`y` is first made orthonormal to `x`).
    pub fn decomposable(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::ShapeMismatch(
                "decomposable alpha needs two vectors in R^k, k >= 2".into(),
            ));
        }
        let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nx == 0.0 {
            return Err(Error::ZeroVector);
        }
        let x: Vec<f64> = x.iter().map(|a| a / nx).collect();
        let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let y: Vec<f64> = y.iter().zip(&x).map(|(b, a)| b - dot * a).collect();
        let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        if ny <= 1e-12 {
            return Err(Error::ZeroVector);
        }
        let k = x.len();
        let block = Mat::from_fn(Field::Real, k, k, |i, j| Quat::real((x[i] * y[j] - y[i] * x[j]) / ny));
        Ok(AlphaElement { block })
    }

    /// The element representing the fiber pair `(w, v)`:
    /// `<beta w, v> = <beta, alpha>_0` for every `beta` in `m`, i.e.
    /// `alpha = 2 skew(v w*)`. Coordinates are `k x 1` against the point's
    /// Stiefel representative.
    pub fn from_fiber_pair(w: &Mat, v: &Mat) -> Result<Self> {
        if w.shape() != v.shape() || w.cols() != 1 {
            return Err(Error::ShapeMismatch("fiber coordinates must be k x 1 columns".into()));
        }
        let vw = v.try_mul(&w.adjoint())?;
        let block = &vw - &vw.adjoint();
        AlphaElement::new(block)
    }

    /// `e_i ^ e_j` basis of `o(k)` (orthonormal in `g0`).
    pub fn real_basis(k: usize) -> Vec<AlphaElement> {
        let mut out = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                let mut b = Mat::zeros(Field::Real, k, k);
                b[(i, j)] = Quat::ONE;
                b[(j, i)] = -Quat::ONE;
                out.push(AlphaElement { block: b });
            }
        }
        out
    }

    pub fn block(&self) -> &Mat {
        &self.block
    }

    pub fn k(&self) -> usize {
        self.block.rows()
    }

    /// `diag(alpha, 0)` in `N x N`.
    pub fn embedded(&self, n: usize) -> Mat {
        m_element(&self.block, n)
    }

    pub fn norm_g0(&self) -> f64 {
        self.block.norm_g0_sqr().sqrt()
    }

    pub fn scale(&self, s: f64) -> AlphaElement {
        AlphaElement {
            block: self.block.scale(s),
        }
    }

    /// Real combination `sum c_i alpha_i`.
    pub fn combination(coeffs: &[f64], elems: &[AlphaElement]) -> Result<AlphaElement> {
        let first = elems.first().ok_or(Error::ZeroVector)?;
        let mut block = Mat::zeros(first.block.field(), first.k(), first.k());
        for (c, e) in coeffs.iter().zip(elems) {
            block = block.try_add(&e.block.scale(*c))?;
        }
        Ok(AlphaElement { block })
    }

    /// Rank of a real block is two exactly when it is decomposable.
    pub fn is_decomposable(&self) -> bool {
        if self.block.field() != Field::Real {
            return self.k() == 1;
        }
        let k = self.k();
        let m = nalgebra::DMatrix::from_fn(k, k, |i, j| self.block[(i, j)].re());
        let sv = m.singular_values();
        let top = sv.max();
        top > 0.0 && sv.iter().filter(|s| **s > 1e-10 * top).count() == 2
    }
}
