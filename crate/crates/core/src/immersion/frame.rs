use std::sync::Arc;

use nalgebra::DMatrix;

use super::chart::ImmersionChart;
use crate::algebra::{sym_eig_small, symmetric_from_fn, Mat};
use crate::error::{Error, Result};
use crate::homogeneous::{decompose, orthonormality_residual, GrassPoint, GrassTangent};
use crate::tolerances::Tolerances;

/// Orthonormal frame of `phi_*(T_p B)` in the pull-back metric.
#[derive(Clone, Debug)]
pub struct PointFrame {
    u: Vec<f64>,
    pt: Arc<GrassPoint>,
    coord: Vec<GrassTangent>,
    e: Vec<GrassTangent>,
    gram: DMatrix<f64>,
    to_frame: DMatrix<f64>,
    min_gram_eigenvalue: f64,
}

/// Differential, immersion check and Gram-Schmidt at `u`.
pub fn point_frame(chart: &ImmersionChart, u: &[f64], tol: &Tolerances) -> Result<PointFrame> {
    let coord = chart.differential(u, tol)?;
    PointFrame::from_differentials(u.to_vec(), coord, tol.immersion_eps)
}

impl PointFrame {
    /// Frame from coordinate differentials `phi_*(d/du_i)` sharing one base.
    pub fn from_differentials(u: Vec<f64>, coord: Vec<GrassTangent>, immersion_eps: f64) -> Result<Self> {
        let pt = coord
            .first()
            .ok_or_else(|| Error::InvalidParameter("zero-dimensional chart".into()))?
            .base()
            .clone();
        for c in &coord {
            c.check_same_base(&coord[0])?;
        }
        let n = coord.len();
        let gram = symmetric_from_fn(n, |i, j| coord[i].inner(&coord[j]));
        let min_gram_eigenvalue = sym_eig_small(&gram)?.values[0];
        if !(min_gram_eigenvalue > immersion_eps) {
            return Err(Error::NotAnImmersion {
                u,
                eigenvalue: min_gram_eigenvalue,
            });
        }
        // G = L L^T, E = d L^{-T}
        let chol = gram.clone().cholesky().ok_or(Error::NotAnImmersion {
            u: u.clone(),
            eigenvalue: min_gram_eigenvalue,
        })?;
        let l_inv = chol.l().try_inverse().ok_or(Error::NotAnImmersion {
            u: u.clone(),
            eigenvalue: min_gram_eigenvalue,
        })?;
        let to_frame = l_inv.transpose();
        let e: Vec<GrassTangent> = (0..n)
            .map(|a| GrassTangent::combination(&pt, to_frame.column(a).as_slice(), &coord))
            .collect();
        let residual = orthonormality_residual(&e);
        if residual > 1e-10 {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(PointFrame {
            u,
            pt,
            coord,
            e,
            gram,
            to_frame,
            min_gram_eigenvalue,
        })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn point(&self) -> &Arc<GrassPoint> {
        &self.pt
    }

    /// Dimension `n` of `B`.
    pub fn dim(&self) -> usize {
        self.e.len()
    }

    /// Orthonormal basis `E_a`.
    pub fn basis(&self) -> &[GrassTangent] {
        &self.e
    }

    pub fn coordinate_differentials(&self) -> &[GrassTangent] {
        &self.coord
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Upper triangular `C` with `E_a = sum_i C_ia phi_*(d/du_i)`.
    pub fn to_frame(&self) -> &DMatrix<f64> {
        &self.to_frame
    }

    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.min_gram_eigenvalue
    }

    pub fn orthonormality_residual(&self) -> f64 {
        orthonormality_residual(&self.e)
    }

    /// `sum_a x_a E_a`
    pub fn vector(&self, x: &[f64]) -> GrassTangent {
        GrassTangent::combination(&self.pt, x, &self.e)
    }

    /// Frame coordinates of the tangential part, and the normal part.
    pub fn split(&self, v: &GrassTangent) -> (Vec<f64>, GrassTangent) {
        decompose(&self.e, v)
    }

    pub fn normal_part(&self, v: &GrassTangent) -> GrassTangent {
        self.split(v).1
    }

    /// The same frame against the representative `V u` (`u` unitary).
    pub fn regauged(&self, u: &Mat) -> Result<PointFrame> {
        let pt = Arc::new(self.pt.regauged(u)?);
        let re = |ts: &[GrassTangent]| ts.iter().map(|t| t.regauged(pt.clone(), u)).collect::<Vec<_>>();
        Ok(PointFrame {
            u: self.u.clone(),
            coord: re(&self.coord),
            e: re(&self.e),
            pt,
            gram: self.gram.clone(),
            to_frame: self.to_frame.clone(),
            min_gram_eigenvalue: self.min_gram_eigenvalue,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, Quat};
    use crate::immersion::ChartMap;
    use std::collections::BTreeMap;

    /// `u -> span(1, u1, u2)` (real) or with a collapsed second direction.
    #[derive(Debug)]
    struct Affine {
        collapsed: bool,
    }

    impl ChartMap for Affine {
        fn field(&self) -> Field {
            Field::Real
        }
        fn ambient_dim(&self) -> usize {
            3
        }
        fn k(&self) -> usize {
            1
        }
        fn domain_dim(&self) -> usize {
            2
        }
        fn frame(&self, u: &[f64]) -> Mat {
            let y = if self.collapsed { 0.0 } else { u[1] };
            Mat::column(Field::Real, &[Quat::ONE, Quat::real(u[0]), Quat::real(y)])
        }
    }

    fn chart(collapsed: bool) -> ImmersionChart {
        ImmersionChart::new(
            "affine",
            BTreeMap::new(),
            vec![(-1.0, 1.0); 2],
            Arc::new(Affine { collapsed }),
        )
        .unwrap()
    }

    #[test]
    fn frame_is_orthonormal_and_triangular() {
        let f = point_frame(&chart(false), &[0.4, -0.3], &Tolerances::default()).unwrap();
        assert_eq!(f.dim(), 2);
        assert!(f.orthonormality_residual() < 1e-10);
        assert_eq!(f.to_frame()[(1, 0)], 0.0);
        let (coords, rest) = f.split(&f.coordinate_differentials()[1]);
        assert!(rest.norm() < 1e-12);
        assert!(coords.iter().all(|c| c.is_finite()));
    }

    #[test]
    fn collapsed_direction_is_not_an_immersion() {
        match point_frame(&chart(true), &[0.1, 0.2], &Tolerances::default()) {
            Err(Error::NotAnImmersion { u, eigenvalue }) => {
                assert_eq!(u, vec![0.1, 0.2]);
                assert!(eigenvalue.abs() < 1e-8);
            }
            other => panic!("expected NotAnImmersion, got {other:?}"),
        }
    }
}
