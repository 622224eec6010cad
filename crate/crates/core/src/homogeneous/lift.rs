use std::sync::Arc;

use super::point::{GrassPoint, GrassTangent};
use crate::algebra::{column_dot, Field, Mat, TOL_ALG};
use crate::error::{Error, Result};

/// An element `g` of O(N), U(N) or Sp(N) whose first `k` columns are the
/// Stiefel representative of a point.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameLift {
    g: Mat,
    k: usize,
}

impl FrameLift {
    /// Deterministic completion: the representative's columns followed by
    /// standard basis vectors in index order, orthonormalized against what is
    /// already there. Candidates whose remainder is shorter than `0.5/sqrt(N)`
    /// are skipped; at least `N - k` always survive.
    pub fn standard(pt: &GrassPoint) -> FrameLift {
        let v = pt.stiefel();
        let (n, k) = v.shape();
        let field = pt.field();
        let threshold = 0.5 / (n as f64).sqrt();
        let mut cols: Vec<Mat> = (0..k).map(|j| v.col(j)).collect();
        for i in 0..n {
            if cols.len() == n {
                break;
            }
            let mut c = Mat::unit_column(field, n, i);
            for _pass in 0..2 {
                for q in &cols {
                    let coeff = column_dot(q, &c);
                    c = &c - &q.mul_right(coeff);
                }
            }
            let norm = c.norm();
            if norm > threshold {
                cols.push(c.scale(1.0 / norm));
            }
        }
        assert_eq!(cols.len(), n, "frame completion must always succeed");
        let refs: Vec<&Mat> = cols.iter().collect();
        FrameLift {
            g: Mat::hstack(&refs),
            k,
        }
    }

    /// `g diag(I_k, u)`: a different completion of the same representative.
    pub fn with_complement_rotation(&self, u: &Mat) -> Result<FrameLift> {
        let n = self.g.rows();
        if u.shape() != (n - self.k, n - self.k) {
            return Err(Error::ShapeMismatch(format!(
                "complement rotation must be {0}x{0}",
                n - self.k
            )));
        }
        let mut d = Mat::identity(self.field(), n);
        d.set_block(self.k, self.k, u);
        FrameLift::from_matrix(self.g.try_mul(&d)?, self.k)
    }

    pub fn from_matrix(g: Mat, k: usize) -> Result<FrameLift> {
        let n = g.rows();
        if g.cols() != n || k == 0 || k > n {
            return Err(Error::ShapeMismatch(format!("frame {:?} with k = {k}", g.shape())));
        }
        let residual = (&g.adjoint() * &g).max_abs_diff(&Mat::identity(g.field(), n));
        if residual > TOL_ALG {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(FrameLift { g, k })
    }

    pub fn matrix(&self) -> &Mat {
        &self.g
    }

    pub fn field(&self) -> Field {
        self.g.field()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ambient_dim(&self) -> usize {
        self.g.rows()
    }

    /// First `k` columns.
    pub fn stiefel(&self) -> Mat {
        self.g.columns(0, self.k)
    }

    /// Columns `k+1..N`.
    pub fn complement(&self) -> Mat {
        self.g.columns(self.k, self.g.cols())
    }

    pub fn unitarity_residual(&self) -> f64 {
        (&self.g.adjoint() * &self.g).max_abs_diff(&Mat::identity(self.field(), self.ambient_dim()))
    }

    pub fn spans(&self, pt: &GrassPoint) -> bool {
        pt.stiefel().shape() == (self.ambient_dim(), self.k) && self.stiefel().max_abs_diff(pt.stiefel()) <= 1e-12
    }

    /// Real orthonormal basis of `p` (all lifts with one unit entry of `B`).
    pub fn p_basis(self: &Arc<Self>) -> Vec<LieLift> {
        let n = self.ambient_dim();
        let k = self.k;
        let field = self.field();
        let mut out = Vec::with_capacity((n - k) * k * field.dim());
        for r in 0..n - k {
            for c in 0..k {
                for &u in field.real_basis() {
                    let mut b = Mat::zeros(field, n - k, k);
                    b[(r, c)] = u;
                    out.push(LieLift::from_block(self.clone(), b));
                }
            }
        }
        out
    }
}

/// The element `X~ = [[0, -B*], [B, 0]]` of `p` lifting a tangent vector
/// through a fixed frame.
#[derive(Clone, Debug)]
pub struct LieLift {
    frame: Arc<FrameLift>,
    b: Mat,
    x: Mat,
}

impl LieLift {
    pub fn from_block(frame: Arc<FrameLift>, b: Mat) -> LieLift {
        let x = p_element(&b, frame.k());
        LieLift { frame, b, x }
    }

    /// Lift of an arbitrary matrix's `p`-component (lower-left block).
    pub fn from_p_part(frame: Arc<FrameLift>, m: &Mat) -> LieLift {
        let n = frame.ambient_dim();
        let k = frame.k();
        let b = m.block(k, 0, n - k, k);
        LieLift::from_block(frame, b)
    }

    pub fn frame(&self) -> &Arc<FrameLift> {
        &self.frame
    }

    /// `(N-k) x k` block.
    pub fn block(&self) -> &Mat {
        &self.b
    }

    /// The full `N x N` anti-Hermitian matrix.
    pub fn matrix(&self) -> &Mat {
        &self.x
    }

    /// `|X~|_0^2 = Re trace(B* B)`
    pub fn norm_g0_sqr(&self) -> f64 {
        self.b.norm_sqr()
    }

    pub fn inner_g0(&self, other: &LieLift) -> f64 {
        self.b.re_inner(&other.b)
    }

    /// Horizontal Stiefel coordinates of the tangent vector this lifts.
    pub fn to_horizontal(&self) -> Mat {
        &self.frame.complement() * &self.b
    }

    pub fn to_tangent(&self, base: Arc<GrassPoint>) -> Result<GrassTangent> {
        if !self.frame.spans(&base) {
            return Err(Error::BaseMismatch);
        }
        GrassTangent::from_horizontal(base, self.to_horizontal())
    }

    pub fn check_same_frame(&self, other: &LieLift) -> Result<()> {
        if Arc::ptr_eq(&self.frame, &other.frame) || *self.frame == *other.frame {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }
}

/// `B = (columns k+1..N of g)* H`.
pub fn lie_lift(frame: &Arc<FrameLift>, t: &GrassTangent) -> Result<LieLift> {
    if !frame.spans(t.base()) {
        return Err(Error::BaseMismatch);
    }
    let b = &frame.complement().adjoint() * t.horizontal();
    Ok(LieLift::from_block(frame.clone(), b))
}

/// `[[0, -B*], [B, 0]]` for an `(N-k) x k` block.
pub fn p_element(b: &Mat, k: usize) -> Mat {
    let n = b.rows() + k;
    let mut x = Mat::zeros(b.field(), n, n);
    x.set_block(k, 0, b);
    x.set_block(0, k, &(-&b.adjoint()));
    x
}

/// `diag(a, 0)` for a `k x k` block `a`.
pub fn m_element(a: &Mat, n: usize) -> Mat {
    let mut x = Mat::zeros(a.field(), n, n);
    x.set_block(0, 0, a);
    x
}

/// Upper-left `k x k` block (the `m`-component of an element of `k = h + m`).
pub fn m_block(x: &Mat, k: usize) -> Mat {
    x.block(0, 0, k, k)
}

/// Off-diagonal part (the `p`-component).
pub fn p_part(x: &Mat, k: usize) -> Mat {
    let n = x.rows();
    let mut out = x.clone();
    out.set_block(0, 0, &Mat::zeros(x.field(), k, k));
    out.set_block(k, k, &Mat::zeros(x.field(), n - k, n - k));
    out
}

/// Largest entry of the off-diagonal blocks (zero for elements of `k`).
pub fn off_diagonal_size(x: &Mat, k: usize) -> f64 {
    let n = x.rows();
    x.block(k, 0, n - k, k).norm().max(x.block(0, k, k, n - k).norm())
}

/// Largest entry of the diagonal blocks (zero for elements of `p`).
pub fn diagonal_size(x: &Mat, k: usize) -> f64 {
    let n = x.rows();
    x.block(0, 0, k, k).norm().max(x.block(k, k, n - k, n - k).norm())
}
