use nalgebra::DMatrix;

use super::chart::ImmersionChart;
use super::frame::{point_frame, PointFrame};
use crate::algebra::Mat;
use crate::error::Result;
use crate::homogeneous::GrassTangent;
use crate::tolerances::Tolerances;

/// Second fundamental form of `phi` at a point, against the frame `E`.
#[derive(Clone, Debug)]
pub struct SecondFF {
    frame: PointFrame,
    ii: Vec<GrassTangent>,
    symmetry_residual: f64,
    normality_residual: f64,
}

/// `II(d_i, d_j) = normal part of the tangential projection of d^2 P`,
/// re-expressed in the orthonormal frame.
///
/// In the projector model the Levi-Civita derivative of the Grassmannian is
/// the tangential projection of the flat derivative, and the tangential
/// Christoffel terms of `B` drop out under the normal projection.
pub fn second_fundamental_form(chart: &ImmersionChart, u: &[f64], tol: &Tolerances) -> Result<SecondFF> {
    let frame = point_frame(chart, u, tol)?;
    let hessian = chart.projector_hessian(u, tol)?;
    Ok(SecondFF::from_hessian(frame, &hessian))
}

impl SecondFF {
    /// From a frame and the ambient second derivatives of `P` at its point.
    pub fn from_hessian(frame: PointFrame, hessian: &[Vec<Mat>]) -> SecondFF {
        let n = frame.dim();
        let base = frame.point().clone();
        let coord: Vec<Vec<GrassTangent>> = hessian
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| frame.normal_part(&GrassTangent::from_projector_form(base.clone(), d)))
                    .collect()
            })
            .collect();
        let c = frame.to_frame();
        let mut raw = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = GrassTangent::zero(base.clone());
                for i in 0..n {
                    for j in 0..n {
                        let w = c[(i, a)] * c[(j, b)];
                        if w != 0.0 {
                            acc = acc.add_scaled(w, &coord[i][j]);
                        }
                    }
                }
                raw.push(acc);
            }
        }
        let mut symmetry_residual: f64 = 0.0;
        let mut ii = raw.clone();
        for a in 0..n {
            for b in (a + 1)..n {
                let (x, y) = (&raw[a * n + b], &raw[b * n + a]);
                symmetry_residual = symmetry_residual.max(x.sub(y).norm());
                let avg = x.add_scaled(1.0, y).scale(0.5);
                ii[a * n + b] = avg.clone();
                ii[b * n + a] = avg;
            }
        }
        let normality_residual = ii
            .iter()
            .map(|t| frame.split(t).0.iter().fold(0.0f64, |m, c| m.max(c.abs())))
            .fold(0.0, f64::max);
        SecondFF {
            frame,
            ii,
            symmetry_residual,
            normality_residual,
        }
    }

    pub fn frame(&self) -> &PointFrame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// `II(E_a, E_b)`
    pub fn get(&self, a: usize, b: usize) -> &GrassTangent {
        &self.ii[a * self.dim() + b]
    }

    /// `II(X, Y)` for frame coordinates `x`, `y`.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> GrassTangent {
        let n = self.dim();
        let mut acc = GrassTangent::zero(self.frame.point().clone());
        for a in 0..n {
            for b in 0..n {
                let w = x[a] * y[b];
                if w != 0.0 {
                    acc = acc.add_scaled(w, self.get(a, b));
                }
            }
        }
        acc
    }

    /// Matrix of `S_eta` in the frame: `<II(E_a, E_b), eta>`.
    pub fn shape_matrix(&self, eta: &GrassTangent) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| self.get(a, b).inner(eta))
    }

    /// Gram tensor `<II_ab, II_cd>` indexed `[(a n + b) * n^2 + c n + d]`.
    pub fn gram_tensor(&self) -> Vec<f64> {
        let m = self.ii.len();
        let mut out = vec![0.0; m * m];
        for p in 0..m {
            for q in p..m {
                let v = self.ii[p].inner(&self.ii[q]);
                out[p * m + q] = v;
                out[q * m + p] = v;
            }
        }
        out
    }

    /// Largest `|II_ab - II_ba|` before symmetrization.
    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    /// Largest tangential coordinate of any `II_ab`.
    pub fn normality_residual(&self) -> f64 {
        self.normality_residual
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.ii.iter().map(GrassTangent::norm).fold(0.0, f64::max)
    }

    /// The same tensor against the representative `V u`.
    pub fn regauged(&self, u: &Mat) -> Result<SecondFF> {
        let frame = self.frame.regauged(u)?;
        let ii = self.ii.iter().map(|t| t.regauged(frame.point().clone(), u)).collect();
        Ok(SecondFF {
            frame,
            ii,
            symmetry_residual: self.symmetry_residual,
            normality_residual: self.normality_residual,
        })
    }
}
