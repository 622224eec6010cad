use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::random::{random_mat, random_unitary};
use crate::algebra::{Field, Mat};
use crate::error::{Error, Result};
use crate::homogeneous::{m_block, p_element};
use crate::immersion::{ChartMap, ImmersionChart};
use crate::tolerances::Tolerances;

use super::transport::holonomy;

/// Default loop side for the holonomy regression.
pub const LEMMA_EPS: f64 = 0.01;
/// RK4 steps per loop side.
pub const LEMMA_STEPS: usize = 8;
const LEMMA_SEED: u64 = 0x1e_77a0;

/// `u -> span of the first k columns of g exp(u_0 X~ + u_1 Y~)`.
#[derive(Clone, Debug)]
pub struct ExponentialChart {
    g: Mat,
    generators: Vec<Mat>,
    k: usize,
}

impl ExponentialChart {
    pub fn new(g: Mat, generators: Vec<Mat>, k: usize) -> Result<Self> {
        let n = g.rows();
        if generators.iter().any(|x| x.shape() != (n, n)) || k == 0 || k >= n {
            return Err(Error::ShapeMismatch("generators must be N x N with 0 < k < N".into()));
        }
        Ok(ExponentialChart { g, generators, k })
    }

    pub fn into_chart(self, radius: f64) -> Result<ImmersionChart> {
        let dim = self.generators.len();
        ImmersionChart::new(
            "exponential",
            BTreeMap::new(),
            vec![(-radius, radius); dim],
            Arc::new(self),
        )
    }
}

impl ChartMap for ExponentialChart {
    fn field(&self) -> Field {
        self.g.field()
    }

    fn ambient_dim(&self) -> usize {
        self.g.rows()
    }

    fn k(&self) -> usize {
        self.k
    }

    fn domain_dim(&self) -> usize {
        self.generators.len()
    }

    fn frame(&self, u: &[f64]) -> Mat {
        let n = self.g.rows();
        let mut x = Mat::zeros(self.g.field(), n, n);
        for (c, gen) in u.iter().zip(&self.generators) {
            x = &x + &gen.scale(*c);
        }
        (&self.g * &x.expm()).columns(0, self.k)
    }
}

/// One trial of the holonomy regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaTrial {
    /// `|[X~, Y~]^m|` (Frobenius).
    pub bracket_norm: f64,
    /// `|log(hol) / eps^2 - [X~, Y~]^m|`
    pub generator_deviation: f64,
    /// `|Omega_hol - 1/2 [X~, Y~]^m|` with `Omega_hol = log(hol) / (2 eps^2)`.
    pub omega_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaOmegaReport {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub trials: Vec<LemmaTrial>,
    /// Least-squares `c` in `log(hol) / eps^2 = c [X~, Y~]^m`.
    pub raw_fit: f64,
    /// Least-squares `c` in `Omega_hol = c [X~, Y~]^m`; the lemma predicts `1/2`.
    pub fitted_c: f64,
    pub max_deviation: f64,
}

/// Holonomy generator `log(hol) / eps^2` of the exponential chart through
/// `g` with unit generators `X~, Y~` (`p`-blocks `bx`, `by`), together with
/// `[X~, Y~]^m`.
pub fn holonomy_generator(g: &Mat, bx: &Mat, by: &Mat, eps: f64, steps: usize, tol: &Tolerances) -> Result<(Mat, Mat)> {
    let k = bx.cols();
    let (x, y) = (p_element(bx, k), p_element(by, k));
    let bracket = m_block(&Mat::commutator(&x, &y), k);
    let chart = ExponentialChart::new(g.clone(), vec![x, y], k)?.into_chart(1.0)?;
    let hol = holonomy(&chart, &[0.0, 0.0], 0, 1, eps, steps, tol)?;
    Ok((hol.log_near_identity()?.scale(1.0 / (eps * eps)), bracket))
}

fn unit_block(field: Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
    let b = random_mat(field, rows, cols, rng);
    let norm = b.norm();
    b.scale(1.0 / norm)
}

/// Fits the constant in `Omega = c [X~, Y~]^m` from holonomy around small
/// coordinate squares of `exp`-charts at `trials` random frames of
/// `G_k(K^N)`.
pub fn lemma_omega_check(
    field: Field,
    n: usize,
    k: usize,
    trials: usize,
    eps: f64,
    tol: &Tolerances,
) -> Result<LemmaOmegaReport> {
    if k == 0 || k >= n || trials == 0 {
        return Err(Error::InvalidParameter(format!(
            "lemma check needs 0 < k < N and trials > 0 (N = {n}, k = {k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LEMMA_SEED);
    let mut out = Vec::with_capacity(trials);
    let (mut num_raw, mut den) = (0.0, 0.0);
    for _ in 0..trials {
        let g = random_unitary(field, n, &mut rng);
        let bx = unit_block(field, n - k, k, &mut rng);
        let by = unit_block(field, n - k, k, &mut rng);
        let (gen, bracket) = holonomy_generator(&g, &bx, &by, eps, LEMMA_STEPS, tol)?;
        num_raw += gen.re_inner(&bracket);
        den += bracket.norm_sqr();
        out.push(LemmaTrial {
            bracket_norm: bracket.norm(),
            generator_deviation: (&gen - &bracket).norm(),
            omega_deviation: (&gen.scale(0.5) - &bracket.scale(0.5)).norm(),
        });
    }
    let raw_fit = if den > 0.0 { num_raw / den } else { f64::NAN };
    Ok(LemmaOmegaReport {
        field,
        n,
        k,
        eps,
        max_deviation: out.iter().map(|t| t.omega_deviation).fold(0.0, f64::max),
        trials: out,
        raw_fit,
        fitted_c: 0.5 * raw_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_generators_have_trivial_holonomy() {
        let g = Mat::identity(Field::Real, 4);
        let bx = Mat::unit(Field::Real, 2, 2, 0, 0);
        let by = Mat::unit(Field::Real, 2, 2, 1, 1);
        let (gen, bracket) = holonomy_generator(&g, &bx, &by, LEMMA_EPS, LEMMA_STEPS, &Tolerances::default()).unwrap();
        assert!(bracket.norm() < 1e-15);
        assert!(gen.norm() < 1e-8, "{}", gen.norm());
    }

    #[test]
    fn half_bracket_on_real_planes() {
        let r = lemma_omega_check(Field::Real, 4, 2, 3, LEMMA_EPS, &Tolerances::default()).unwrap();
        assert!((r.fitted_c - 0.5).abs() < 1e-3);
        assert!(r.max_deviation < 1e-4);
        assert!(lemma_omega_check(Field::Real, 4, 4, 3, LEMMA_EPS, &Tolerances::default()).is_err());
    }
}
