use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{Field, Mat};
use crate::error::{Error, Result};
use crate::homogeneous::{GrassPoint, GrassTangent};
use crate::tolerances::Tolerances;

/// The map behind a chart: `u` to a spanning frame of `phi(u)`.
///
/// Implementations must be pure. The frame need not be orthonormal; only its
/// column span matters.
pub trait ChartMap: Send + Sync + fmt::Debug {
    fn field(&self) -> Field;
    fn ambient_dim(&self) -> usize;
    fn k(&self) -> usize;
    fn domain_dim(&self) -> usize;

    /// `N x k` matrix whose columns span `phi(u)`.
    fn frame(&self, u: &[f64]) -> Mat;

    /// `dW/du_i` for the frame returned by [`ChartMap::frame`], if known in
    /// closed form.
    fn frame_derivative(&self, _u: &[f64]) -> Option<Vec<Mat>> {
        None
    }
}

/// A named chart `phi: box in R^n -> G_k(K^N)`.
#[derive(Clone)]
pub struct ImmersionChart {
    name: String,
    params: BTreeMap<String, f64>,
    domain: Vec<(f64, f64)>,
    map: Arc<dyn ChartMap>,
}

impl fmt::Debug for ImmersionChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImmersionChart")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ImmersionChart {
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        domain: Vec<(f64, f64)>,
        map: Arc<dyn ChartMap>,
    ) -> Result<Self> {
        if domain.len() != map.domain_dim() {
            return Err(Error::ShapeMismatch(format!(
                "domain box has {} sides for a {}-dimensional chart",
                domain.len(),
                map.domain_dim()
            )));
        }
        if let Some((lo, hi)) = domain
            .iter()
            .find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::InvalidParameter(format!("empty domain interval [{lo}, {hi}]")));
        }
        if map.k() == 0 || map.k() > map.ambient_dim() {
            return Err(Error::InvalidParameter(format!(
                "k = {} out of range for N = {}",
                map.k(),
                map.ambient_dim()
            )));
        }
        Ok(ImmersionChart {
            name: name.into(),
            params,
            domain,
            map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Same map on a smaller (or larger) box.
    pub fn with_domain(&self, domain: Vec<(f64, f64)>) -> Result<Self> {
        ImmersionChart::new(self.name.clone(), self.params.clone(), domain, self.map.clone())
    }

    pub fn domain_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn field(&self) -> Field {
        self.map.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.ambient_dim()
    }

    pub fn k(&self) -> usize {
        self.map.k()
    }

    pub fn map(&self) -> &Arc<dyn ChartMap> {
        &self.map
    }

    pub fn has_analytic_differential(&self) -> bool {
        let center: Vec<f64> = self.domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
        self.map.frame_derivative(&center).is_some()
    }

    /// Smallest distance from `u` to the boundary of the box.
    pub fn boundary_distance(&self, u: &[f64]) -> f64 {
        self.domain
            .iter()
            .zip(u)
            .map(|((lo, hi), x)| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Error unless `u` lies in the box at distance at least `margin` from its boundary.
    pub fn check_interior(&self, u: &[f64], margin: f64) -> Result<()> {
        if u.len() != self.domain_dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for a {}-dimensional chart",
                u.len(),
                self.domain_dim()
            )));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("chart coordinates"));
        }
        let d = self.boundary_distance(u);
        if d < margin {
            return Err(Error::BoundaryProximity {
                u: u.to_vec(),
                margin: d,
            });
        }
        Ok(())
    }

    fn raw_frame(&self, u: &[f64]) -> Result<Mat> {
        let w = self.map.frame(u);
        if w.shape() != (self.ambient_dim(), self.k()) || w.field() != self.field() {
            return Err(Error::ShapeMismatch(format!(
                "chart frame has shape {:?} over {}, expected ({}, {}) over {}",
                w.shape(),
                w.field(),
                self.ambient_dim(),
                self.k(),
                self.field()
            )));
        }
        if !w.is_finite() {
            return Err(Error::NonFinite("chart frame"));
        }
        Ok(w)
    }

    /// `phi(u)`.
    pub fn eval(&self, u: &[f64]) -> Result<GrassPoint> {
        GrassPoint::from_stiefel(self.raw_frame(u)?)
    }

    /// `P(u)`.
    pub fn projector(&self, u: &[f64]) -> Result<Mat> {
        Ok(self.eval(u)?.projector().clone())
    }

    /// `phi_*(d/du_i)`, analytic when the chart provides it and finite
    /// differences otherwise.
    pub fn differential(&self, u: &[f64], tol: &Tolerances) -> Result<Vec<GrassTangent>> {
        self.check_interior(u, 2.0 * tol.fd_step)?;
        let base = Arc::new(self.eval(u)?);
        match self.analytic_differential(&base, u)? {
            Some(d) => Ok(d),
            None => self.fd_differential_at(&base, u, tol.fd_step),
        }
    }

    /// Finite-difference differential at step `h` regardless of whether an
    /// analytic one exists.
    pub fn fd_differential(&self, u: &[f64], h: f64) -> Result<Vec<GrassTangent>> {
        self.check_interior(u, 2.0 * h)?;
        let base = Arc::new(self.eval(u)?);
        self.fd_differential_at(&base, u, h)
    }

    /// Analytic differential, or `None` when the chart has none.
    pub fn analytic_differential_at(&self, u: &[f64]) -> Result<Option<Vec<GrassTangent>>> {
        let base = Arc::new(self.eval(u)?);
        self.analytic_differential(&base, u)
    }

    /// `H_i = (I - P) dW_i R^{-1}` with `W = V R`.
    fn analytic_differential(&self, base: &Arc<GrassPoint>, u: &[f64]) -> Result<Option<Vec<GrassTangent>>> {
        let Some(dw) = self.map.frame_derivative(u) else {
            return Ok(None);
        };
        if dw.len() != self.domain_dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} frame derivatives for a {}-dimensional chart",
                dw.len(),
                self.domain_dim()
            )));
        }
        let w = self.raw_frame(u)?;
        let r_inv = (&base.stiefel().adjoint() * &w).inverse()?;
        let mut out = Vec::with_capacity(dw.len());
        for d in dw {
            if d.shape() != w.shape() || d.field() != w.field() {
                return Err(Error::ShapeMismatch("frame derivative shape".into()));
            }
            if !d.is_finite() {
                return Err(Error::NonFinite("frame derivative"));
            }
            out.push(GrassTangent::from_ambient_frame(base.clone(), &(&d * &r_inv)));
        }
        Ok(Some(out))
    }

    fn shifted(u: &[f64], i: usize, s: f64) -> Vec<f64> {
        let mut v = u.to_vec();
        v[i] += s;
        v
    }

    fn fd_differential_at(&self, base: &Arc<GrassPoint>, u: &[f64], h: f64) -> Result<Vec<GrassTangent>> {
        (0..self.domain_dim())
            .map(|i| {
                let central = |s: f64| -> Result<Mat> {
                    let plus = self.projector(&Self::shifted(u, i, s))?;
                    let minus = self.projector(&Self::shifted(u, i, -s))?;
                    Ok((&plus - &minus).scale(0.5 / s))
                };
                let d = richardson(&central(h)?, &central(2.0 * h)?);
                if !d.is_finite() {
                    return Err(Error::NonFinite("finite-difference differential"));
                }
                Ok(GrassTangent::from_projector_form(base.clone(), &d))
            })
            .collect()
    }

    /// Projector-model derivative `dP/du_i` at `u` (analytic path only).
    fn analytic_projector_derivatives(&self, u: &[f64]) -> Result<Option<Vec<Mat>>> {
        let base = Arc::new(self.eval(u)?);
        Ok(self
            .analytic_differential(&base, u)?
            .map(|ts| ts.iter().map(GrassTangent::projector_form).collect()))
    }

    /// Ambient second derivatives `d^2 P / du_i du_j`, as an `n x n` array.
    ///
    /// With an analytic differential the first derivative is differentiated
    /// once more by central differences at `fd_step` (the result is then
    /// symmetric only up to discretization error); otherwise second
    /// differences of `P` at `fd_step_second` are used. Both carry one
    /// Richardson level.
    pub fn projector_hessian(&self, u: &[f64], tol: &Tolerances) -> Result<Vec<Vec<Mat>>> {
        let n = self.domain_dim();
        if self.has_analytic_differential() {
            let h = tol.fd_step;
            self.check_interior(u, 2.0 * h)?;
            let mut out = vec![Vec::with_capacity(n); n];
            for (i, row) in out.iter_mut().enumerate() {
                let central = |s: f64| -> Result<Vec<Mat>> {
                    let plus = self
                        .analytic_projector_derivatives(&Self::shifted(u, i, s))?
                        .ok_or(Error::InvalidParameter("analytic differential disappeared".into()))?;
                    let minus = self
                        .analytic_projector_derivatives(&Self::shifted(u, i, -s))?
                        .ok_or(Error::InvalidParameter("analytic differential disappeared".into()))?;
                    Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m).scale(0.5 / s)).collect())
                };
                let (d1, d2) = (central(h)?, central(2.0 * h)?);
                for j in 0..n {
                    row.push(richardson(&d1[j], &d2[j]));
                }
            }
            check_finite(&out)?;
            return Ok(out);
        }
        let h = tol.fd_step_second;
        self.check_interior(u, 2.0 * h)?;
        let p0 = self.projector(u)?;
        let mut out = vec![vec![Mat::zeros(self.field(), 0, 0); n]; n];
        for i in 0..n {
            let diag = |s: f64| -> Result<Mat> {
                let plus = self.projector(&Self::shifted(u, i, s))?;
                let minus = self.projector(&Self::shifted(u, i, -s))?;
                Ok((&(&plus + &minus) - &p0.scale(2.0)).scale(1.0 / (s * s)))
            };
            out[i][i] = richardson(&diag(h)?, &diag(2.0 * h)?);
            for j in (i + 1)..n {
                let mixed = |s: f64| -> Result<Mat> {
                    let at = |a: f64, b: f64| self.projector(&Self::shifted(&Self::shifted(u, i, a), j, b));
                    let sum = &(&at(s, s)? - &at(s, -s)?) - &(&at(-s, s)? - &at(-s, -s)?);
                    Ok(sum.scale(0.25 / (s * s)))
                };
                let d = richardson(&mixed(h)?, &mixed(2.0 * h)?);
                out[i][j] = d.clone();
                out[j][i] = d;
            }
        }
        check_finite(&out)?;
        Ok(out)
    }
}

/// One Richardson level for a central difference: `(4 D(h) - D(2h)) / 3`.
/// One Richardson level for a second-order central difference.
pub(crate) fn richardson(d_h: &Mat, d_2h: &Mat) -> Mat {
    (&d_h.scale(4.0) - d_2h).scale(1.0 / 3.0)
}

fn check_finite(rows: &[Vec<Mat>]) -> Result<()> {
    if rows.iter().flatten().all(Mat::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite("finite-difference second derivative"))
    }
}
