use std::sync::Arc;

use crate::algebra::{Field, Mat, Quat, TOL_ALG};
use crate::error::{Error, Result};

/// A point of `G_k(K^N)`, held as a Stiefel representative `V` together with
/// its projector `P = V V*`.
///
/// `P` does not depend on the representative; `V` does, and tangent vectors
/// are expressed relative to it.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassPoint {
    v: Mat,
    p: Mat,
}

impl GrassPoint {
    /// Point spanned by the columns of `v`; `v` is orthonormalized when it is
    /// not already orthonormal.
    pub fn from_stiefel(v: Mat) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::NonFinite("Stiefel representative"));
        }
        let k = v.cols();
        if k == 0 || k > v.rows() {
            return Err(Error::ShapeMismatch(format!(
                "Stiefel representative must be N x k with 1 <= k <= N, got {:?}",
                v.shape()
            )));
        }
        let gram = &v.adjoint() * &v;
        let v = if gram.max_abs_diff(&Mat::identity(v.field(), k)) > TOL_ALG {
            v.orthonormalize()?
        } else {
            v
        };
        let p = &v * &v.adjoint();
        Ok(GrassPoint { v, p })
    }

    /// The span of the first `k` standard basis vectors.
    pub fn standard(field: Field, n: usize, k: usize) -> Self {
        let v = Mat::identity(field, n).columns(0, k);
        GrassPoint::from_stiefel(v).expect("standard basis is orthonormal")
    }

    pub fn field(&self) -> Field {
        self.v.field()
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.v.rows()
    }

    /// Subspace dimension `k`.
    pub fn k(&self) -> usize {
        self.v.cols()
    }

    pub fn stiefel(&self) -> &Mat {
        &self.v
    }

    pub fn projector(&self) -> &Mat {
        &self.p
    }

    /// Real dimension of the Grassmannian.
    pub fn manifold_dim(&self) -> usize {
        self.k() * (self.ambient_dim() - self.k()) * self.field().dim()
    }

    /// Same point, representative `V u` for a k x k unitary `u`.
    pub fn regauged(&self, u: &Mat) -> Result<Self> {
        let v = self.v.try_mul(u)?;
        let gram = &v.adjoint() * &v;
        if gram.max_abs_diff(&Mat::identity(self.field(), self.k())) > TOL_ALG {
            return Err(Error::InvalidParameter("gauge matrix is not unitary".into()));
        }
        let p = &v * &v.adjoint();
        Ok(GrassPoint { v, p })
    }

    /// `(I - P) X`
    pub fn horizontal_part(&self, x: &Mat) -> Mat {
        x - &(&self.p * x)
    }

    /// `P D (I - P) + (I - P) D P`: orthogonal projection of an ambient
    /// matrix onto the tangent space in the projector model.
    pub fn project_to_tangent(&self, d: &Mat) -> Mat {
        let pd = &self.p * d;
        let dp = d * &self.p;
        let pdp = &pd * &self.p;
        // P D (I-P) + (I-P) D P = PD + DP - 2 PDP
        &(&pd + &dp) - &pdp.scale(2.0)
    }

    /// Residuals of `P* = P` and `P^2 = P`.
    pub fn projector_residual(&self) -> f64 {
        let sq = &self.p * &self.p;
        self.p.hermitian_residual().max(sq.max_abs_diff(&self.p))
    }

    /// Whether two points have the same representative (not just the same span).
    pub fn same_representative(&self, other: &GrassPoint) -> bool {
        self.v.shape() == other.v.shape() && self.v.max_abs_diff(&other.v) <= 1e-12
    }

    /// Distance between projectors, `|P - Q|` in the projector-model norm.
    pub fn projector_distance(&self, other: &GrassPoint) -> f64 {
        (&self.p - &other.p).norm_g0_sqr().sqrt()
    }
}

/// A tangent vector of `G_k(K^N)` in horizontal Stiefel coordinates `H`
/// (`V* H = 0`). Its projector-model form is `H V* + V H*`.
#[derive(Clone, Debug)]
pub struct GrassTangent {
    base: Arc<GrassPoint>,
    h: Mat,
}

impl GrassTangent {
    /// Tangent with horizontal coordinates `h`; fails if `V* h` is not zero.
    pub fn from_horizontal(base: Arc<GrassPoint>, h: Mat) -> Result<Self> {
        if h.shape() != base.stiefel().shape() {
            return Err(Error::ShapeMismatch(format!(
                "horizontal coordinates {:?} for a point with representative {:?}",
                h.shape(),
                base.stiefel().shape()
            )));
        }
        let vh = &base.stiefel().adjoint() * &h;
        let residual = vh.norm();
        if residual > TOL_ALG * h.norm().max(1.0) {
            return Err(Error::NotInSpan { residual });
        }
        Ok(GrassTangent { base, h })
    }

    /// Tangent obtained by projecting an ambient `N x k` matrix horizontally.
    pub fn from_ambient_frame(base: Arc<GrassPoint>, x: &Mat) -> Self {
        let h = base.horizontal_part(x);
        GrassTangent { base, h }
    }

    /// Tangent from a projector-model matrix; the tangential part is kept.
    pub fn from_projector_form(base: Arc<GrassPoint>, d: &Mat) -> Self {
        // for D = H V* + V H*, (I - P) D V = H
        let dv = d * base.stiefel();
        let h = base.horizontal_part(&dv);
        GrassTangent { base, h }
    }

    pub fn zero(base: Arc<GrassPoint>) -> Self {
        let (n, k) = base.stiefel().shape();
        let h = Mat::zeros(base.field(), n, k);
        GrassTangent { base, h }
    }

    pub fn base(&self) -> &Arc<GrassPoint> {
        &self.base
    }

    pub fn horizontal(&self) -> &Mat {
        &self.h
    }

    /// `H V* + V H*`
    pub fn projector_form(&self) -> Mat {
        let v = self.base.stiefel();
        let a = &self.h * &v.adjoint();
        &a + &a.adjoint()
    }

    pub fn check_same_base(&self, other: &GrassTangent) -> Result<()> {
        if Arc::ptr_eq(&self.base, &other.base) || self.base.same_representative(&other.base) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    /// Real inner product `Re trace(H1* H2)` (the normal homogeneous metric).
    pub fn inner(&self, other: &GrassTangent) -> f64 {
        self.h.re_inner(&other.h)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.h.norm()
    }

    pub fn scale(&self, s: f64) -> GrassTangent {
        GrassTangent {
            base: self.base.clone(),
            h: self.h.scale(s),
        }
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &GrassTangent) -> GrassTangent {
        GrassTangent {
            base: self.base.clone(),
            h: &self.h + &other.h.scale(s),
        }
    }

    pub fn sub(&self, other: &GrassTangent) -> GrassTangent {
        self.add_scaled(-1.0, other)
    }

    /// `sum_i c_i t_i`; all tangents must share a base.
    pub fn combination(base: &Arc<GrassPoint>, coeffs: &[f64], ts: &[GrassTangent]) -> GrassTangent {
        debug_assert_eq!(coeffs.len(), ts.len());
        let mut acc = GrassTangent::zero(base.clone());
        for (c, t) in coeffs.iter().zip(ts) {
            if *c != 0.0 {
                acc = acc.add_scaled(*c, t);
            }
        }
        acc
    }

    /// Horizontal coordinates right-multiplied by `q`.
    pub fn mul_right(&self, q: Quat) -> GrassTangent {
        GrassTangent {
            base: self.base.clone(),
            h: self.h.mul_right(q),
        }
    }

    /// The same tangent vector expressed against the representative `V u`.
    pub fn regauged(&self, new_base: Arc<GrassPoint>, u: &Mat) -> GrassTangent {
        GrassTangent {
            base: new_base,
            h: &self.h * u,
        }
    }
}
