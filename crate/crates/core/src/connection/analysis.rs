use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::alpha::AlphaElement;
use super::formulas::{
    bracket_with_alpha, corollary_rhs, dr_component_lie, dr_component_structure, tangent_coordinates,
};
use crate::algebra::random::{random_unit_vector, random_unitary};
use crate::algebra::{sym_eig_small, Field};
use crate::error::Result;
use crate::homogeneous::{bracket_norm_sqr, lie_lift, structure_units, CurvatureNormalization, FrameLift, LieLift};
use crate::immersion::{
    second_fundamental_form, shape_norm, wirtinger_max, Biquadratic, Extremum, ImmersionChart, SecondFF,
};
use crate::tolerances::Tolerances;

const PAIR_SEED: u64 = 0x9a1_5eed;

/// How `g` in `h^{-1}(phi(p))` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameChoice {
    /// Deterministic completion of the Stiefel representative.
    #[default]
    Standard,
    /// The standard completion followed by a seeded unitary rotation of
    /// the complement columns.
    ComplementRotation { seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub tol: Tolerances,
    /// Rescale the metric so the ambient maximal sectional curvature is one.
    pub normalization: Option<CurvatureNormalization>,
    pub frame: FrameChoice,
    /// Replace the Stiefel representative `V` by `V u` for a seeded unitary `u`.
    pub gauge_seed: Option<u64>,
}

/// Which structure algebra `m` the bundle carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    /// `k = 1` over C: `m = u(1)`.
    Complex,
    /// `k = 1` over H: `m = sp(1)`.
    Quaternionic,
    /// `k >= 2` over R: `m = o(k)`, decomposable `alpha`.
    RealGrassmannian,
    /// `k = 1` over R: `m = o(1) = 0`; fatness is meaningless and every
    /// `m`-dependent quantity vanishes.
    Abelian,
    /// `k >= 2` over C or H: outside the scope of the criteria.
    Unsupported,
}

impl StructureKind {
    pub fn of(field: Field, k: usize) -> Self {
        match (field, k) {
            (Field::Complex, 1) => StructureKind::Complex,
            (Field::Quaternion, 1) => StructureKind::Quaternionic,
            (Field::Real, 1) => StructureKind::Abelian,
            (Field::Real, _) => StructureKind::RealGrassmannian,
            _ => StructureKind::Unsupported,
        }
    }
}

/// Everything needed at one point, lifted through one frame.
#[derive(Clone, Debug)]
pub struct PointContext {
    sff: SecondFF,
    lift: Arc<FrameLift>,
    basis: Vec<LieLift>,
    alphas: Vec<AlphaElement>,
    kind: StructureKind,
    scale: f64,
    /// `dr[((a n + b) n + c) d + j]`: the dr component on frame vectors
    /// `(E_a, E_b, E_c)` against the `j`-th structure element.
    dr: Vec<f64>,
}

fn frame_lift(sff: &SecondFF, choice: FrameChoice) -> Result<Arc<FrameLift>> {
    let pt = sff.frame().point();
    let standard = FrameLift::standard(pt);
    Ok(Arc::new(match choice {
        FrameChoice::Standard => standard,
        FrameChoice::ComplementRotation { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = pt.ambient_dim() - pt.k();
            standard.with_complement_rotation(&random_unitary(pt.field(), m, &mut rng))?
        }
    }))
}

impl PointContext {
    pub fn new(sff: SecondFF, options: &AnalysisOptions) -> Result<Self> {
        let sff = match options.gauge_seed {
            None => sff,
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let pt = sff.frame().point();
                sff.regauged(&random_unitary(pt.field(), pt.k(), &mut rng))?
            }
        };
        let lift = frame_lift(&sff, options.frame)?;
        let basis = sff
            .frame()
            .basis()
            .iter()
            .map(|e| lie_lift(&lift, e))
            .collect::<Result<Vec<_>>>()?;
        let pt = sff.frame().point();
        let kind = StructureKind::of(pt.field(), pt.k());
        let alphas = match kind {
            StructureKind::Complex | StructureKind::Quaternionic => structure_units(pt.field())?
                .iter()
                .map(|&q| AlphaElement::from_structure(pt.field(), q))
                .collect::<Result<Vec<_>>>()?,
            StructureKind::RealGrassmannian => AlphaElement::real_basis(pt.k()),
            StructureKind::Abelian | StructureKind::Unsupported => vec![],
        };
        let scale = options.normalization.map_or(1.0, |n| n.metric_scale());
        let mut ctx = PointContext {
            sff,
            lift,
            basis,
            alphas,
            kind,
            scale,
            dr: vec![],
        };
        ctx.dr = ctx.dr_tensor()?;
        Ok(ctx)
    }

    pub fn sff(&self) -> &SecondFF {
        &self.sff
    }

    pub fn frame_lift(&self) -> &Arc<FrameLift> {
        &self.lift
    }

    /// `E~_a`
    pub fn lifted_basis(&self) -> &[LieLift] {
        &self.basis
    }

    /// Unit structure elements: `alpha_j` with `ad alpha_j = J_{u_j}` for
    /// `k = 1`, the `e_i ^ e_j` basis of `o(k)` over R.
    pub fn alphas(&self) -> &[AlphaElement] {
        &self.alphas
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    /// The metric factor `lambda` (`1` without normalization).
    pub fn metric_scale(&self) -> f64 {
        self.scale
    }

    fn dim(&self) -> usize {
        self.sff.dim()
    }

    fn unit(n: usize, a: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[a] = 1.0;
        v
    }

    /// The dr component on frame coordinates against the `j`-th structure
    /// element: the shape-operator form for `k = 1`, twice the Lie form for
    /// real `k >= 2` (so both scale like `|proj_T J X|`).
    pub fn dr_component(&self, x: &[f64], y: &[f64], z: &[f64], j: usize) -> Result<f64> {
        match self.kind {
            StructureKind::Complex | StructureKind::Quaternionic => {
                let units = structure_units(self.sff.frame().point().field())?;
                dr_component_structure(&self.sff, x, y, z, units[j])
            }
            StructureKind::RealGrassmannian => {
                Ok(2.0 * dr_component_lie(&self.sff, &self.lift, x, y, z, &self.alphas[j])?)
            }
            _ => Ok(0.0),
        }
    }

    fn dr_tensor(&self) -> Result<Vec<f64>> {
        let (n, d) = (self.dim(), self.alphas.len());
        let mut out = vec![0.0; n * n * n * d];
        if d == 0 {
            return Ok(out);
        }
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue; // antisymmetric in (X, Y)
                }
                for c in 0..n {
                    for j in 0..d {
                        let v = self.dr_component(&Self::unit(n, a), &Self::unit(n, b), &Self::unit(n, c), j)?;
                        out[((a * n + b) * n + c) * d + j] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Vector `(dr(X, Y, Z, alpha_j))_j` from the precomputed tensor.
    pub fn dr_vector(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let (n, d) = (self.dim(), self.alphas.len());
        let mut v = vec![0.0; d];
        for a in 0..n {
            for b in 0..n {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let w = xy * z[c];
                    if w == 0.0 {
                        continue;
                    }
                    for (j, vj) in v.iter_mut().enumerate() {
                        *vj += w * self.dr[((a * n + b) * n + c) * d + j];
                    }
                }
            }
        }
        v
    }

    /// Frame vectors and their pairwise `(E_a +- E_b)/sqrt 2` combinations.
    pub fn probes(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            out.push(Self::unit(n, a));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for a in 0..n {
            for b in (a + 1)..n {
                for sign in [1.0, -1.0] {
                    let mut v = vec![0.0; n];
                    v[a] = s;
                    v[b] = sign * s;
                    out.push(v);
                }
            }
        }
        out
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Max over probe triples of the dr component, maximized exactly over
    /// unit structure elements (the component is linear in them).
    pub fn parallel_residual(&self) -> f64 {
        let probes = self.probes();
        let mut worst: f64 = 0.0;
        for x in &probes {
            for y in &probes {
                for z in &probes {
                    worst = worst.max(Self::norm(&self.dr_vector(x, y, z)));
                }
            }
        }
        worst
    }

    /// As [`PointContext::parallel_residual`] with `Z = X`.
    pub fn radial_residual(&self) -> f64 {
        let probes = self.probes();
        let mut worst: f64 = 0.0;
        for x in &probes {
            for y in &probes {
                worst = worst.max(Self::norm(&self.dr_vector(x, y, x)));
            }
        }
        worst
    }

    /// `T`-coordinates of `[E~_i, alpha_j]`, indexed `[j][i]`.
    fn bracket_coordinates(&self) -> Result<Vec<Vec<Vec<f64>>>> {
        self.alphas
            .iter()
            .map(|alpha| {
                self.basis
                    .iter()
                    .map(|e| Ok(tangent_coordinates(&bracket_with_alpha(e, alpha)?, &self.basis)))
                    .collect()
            })
            .collect()
    }

    /// `q(X, alpha) = |[X~, alpha]^T|_0^2 = (2 curvature_norm)^2`.
    fn fatness_form(&self) -> Result<Biquadratic> {
        let t = self.bracket_coordinates()?;
        let n = self.dim();
        Ok(Biquadratic::from_fn(n, self.alphas.len(), |j, i, l, ip| {
            t[j][i].iter().zip(&t[l][ip]).map(|(a, b)| a * b).sum()
        }))
    }

    /// `min 2 curvature_norm(X, alpha)` over unit `X` and unit `alpha`
    /// (decomposable over R). `None` for the abelian and unsupported cases.
    pub fn fatness(&self) -> Result<Option<Extremum>> {
        match self.kind {
            StructureKind::Complex | StructureKind::Quaternionic => {}
            StructureKind::RealGrassmannian if self.lift.k() <= 3 => {}
            StructureKind::RealGrassmannian => return self.fatness_sampled().map(Some),
            _ => return Ok(None),
        }
        let ext = self.fatness_form()?.minimize()?;
        let v = ext.value.max(0.0);
        Ok(Some(Extremum {
            value: v.sqrt(),
            grid_value: ext.grid_value.max(0.0).sqrt(),
            grid_gap: ext.grid_gap.sqrt(),
            ..ext
        }))
    }

    /// `k >= 4`: not every unit element of `o(k)` is decomposable; sample
    /// decomposable `x ^ y` and minimize exactly over `X` for each.
    fn fatness_sampled(&self) -> Result<Extremum> {
        let k = self.lift.k();
        let form = self.fatness_form()?;
        let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
        let mut best: Option<Extremum> = None;
        let mut candidates: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                candidates.push((Self::unit(k, i), Self::unit(k, j)));
            }
        }
        for _ in 0..256 {
            candidates.push((random_unit_vector(k, &mut rng), random_unit_vector(k, &mut rng)));
        }
        for (x, y) in candidates {
            let Ok(alpha) = AlphaElement::decomposable(&x, &y) else {
                continue;
            };
            // coefficients on the e_i ^ e_j basis
            let coeffs: Vec<f64> = self
                .alphas
                .iter()
                .map(|b| alpha.block().inner_g0(b.block()).unwrap_or(0.0))
                .collect();
            let eig = sym_eig_small(&form.x_form(&coeffs))?;
            let (v, xv) = eig.min();
            if best.as_ref().map_or(true, |b| v < b.value) {
                best = Some(Extremum {
                    value: v,
                    point: xv.to_vec(),
                    direction: coeffs,
                    grid_value: v,
                    grid_gap: f64::INFINITY,
                });
            }
        }
        let b = best.expect("k >= 4 has decomposable candidates");
        Ok(Extremum {
            value: b.value.max(0.0).sqrt(),
            grid_value: b.grid_value.max(0.0).sqrt(),
            ..b
        })
    }

    /// Sectional curvature of the pull-back metric by Gauss's equation, in
    /// `g0` units, for orthonormal frame coordinates `x, y`.
    pub fn base_curvature_g0(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let frame = self.sff.frame();
        let xl = lie_lift(&self.lift, &frame.vector(x))?;
        let yl = lie_lift(&self.lift, &frame.vector(y))?;
        let xx = self.sff.apply(x, x);
        let yy = self.sff.apply(y, y);
        let xy = self.sff.apply(x, y);
        Ok(bracket_norm_sqr(&xl, &yl) + xx.inner(&yy) - xy.norm_sqr())
    }

    /// `min` over unit structure elements of
    /// `k_B(X, Y) |proj_T J X|^2 - dr(X, Y, X, J)^2`, in the (possibly
    /// rescaled) metric. Exact in `J`: the smallest eigenvalue of
    /// `k_B C - s s^T`.
    pub fn inequality_margin(&self, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        if self.alphas.is_empty() {
            return Ok(None);
        }
        let kb = self.base_curvature_g0(x, y)?;
        let t = self.bracket_coordinates()?;
        let d = self.alphas.len();
        let n = self.dim();
        // T-coordinates of [X~, alpha_j]
        let tx: Vec<Vec<f64>> = (0..d)
            .map(|j| (0..n).map(|b| (0..n).map(|i| x[i] * t[j][i][b]).sum()).collect())
            .collect();
        let c = DMatrix::from_fn(d, d, |a, b| tx[a].iter().zip(&tx[b]).map(|(p, q)| p * q).sum::<f64>());
        let s = DVector::from_vec(self.dr_vector(x, y, x));
        let mut m = c * kb - &s * s.transpose();
        m = (&m + m.transpose()) * 0.5;
        if let StructureKind::RealGrassmannian = self.kind {
            if self.lift.k() > 3 {
                // restrict to the sampled decomposable directions
                let mut best = f64::INFINITY;
                for alpha in AlphaElement::real_basis(self.lift.k()) {
                    let coeffs: Vec<f64> = self
                        .alphas
                        .iter()
                        .map(|b| alpha.block().inner_g0(b.block()).unwrap_or(0.0))
                        .collect();
                    let v = DVector::from_vec(coeffs);
                    best = best.min((v.transpose() * &m * &v)[(0, 0)]);
                }
                return Ok(Some(best / self.scale));
            }
        }
        Ok(Some(sym_eig_small(&m)?.values[0] / self.scale))
    }

    /// Orthonormal pairs probed by the inequality: probe pairs made
    /// orthonormal, plus a fine angle sweep for `n = 2` or seeded random
    /// pairs otherwise.
    pub fn inequality_pairs(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut pairs = Vec::new();
        if n < 2 {
            return pairs;
        }
        let mut push = |x: &[f64], y: &[f64]| {
            let nx = Self::norm(x);
            let x: Vec<f64> = x.iter().map(|v| v / nx).collect();
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let y: Vec<f64> = y.iter().zip(&x).map(|(b, a)| b - dot * a).collect();
            let ny = Self::norm(&y);
            if ny > 1e-6 {
                pairs.push((x, y.iter().map(|v| v / ny).collect()));
            }
        };
        let probes = self.probes();
        for x in &probes {
            for y in &probes {
                push(x, y);
            }
        }
        if n == 2 {
            for j in 0..64 {
                let t = std::f64::consts::PI * j as f64 / 64.0;
                push(&[t.cos(), t.sin()], &[-t.sin(), t.cos()]);
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
            for _ in 0..64 {
                let x = random_unit_vector(n, &mut rng);
                let y = random_unit_vector(n, &mut rng);
                push(&x, &y);
            }
        }
        pairs
    }

    /// Smallest inequality margin over [`PointContext::inequality_pairs`].
    pub fn inequality_min_margin(&self) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        for (x, y) in self.inequality_pairs() {
            if let Some(m) = self.inequality_margin(&x, &y)? {
                best = Some(best.map_or(m, |b: f64| b.min(m)));
            }
        }
        Ok(best)
    }
}

/// `|S(p)|^2 < 1 / (16 tan^2 theta + 8)` in the normalized metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryBound {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl CorollaryBound {
    pub fn new(shape_norm_sqr: f64, theta: f64) -> Self {
        let rhs = corollary_rhs(theta);
        CorollaryBound {
            lhs: shape_norm_sqr,
            rhs,
            satisfied: shape_norm_sqr < rhs,
        }
    }
}

/// Per-point results. Quantities that do not apply to the chart's structure
/// are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAnalysis {
    pub u: Vec<f64>,
    pub structure: StructureKind,
    /// `lambda` in `g = lambda g0` (`1` without normalization).
    pub metric_scale: f64,
    pub min_gram_eigenvalue: f64,
    pub ii_symmetry_residual: f64,
    pub ii_normality_residual: f64,
    /// `|S(p)|` in the (possibly rescaled) metric.
    pub shape_norm: f64,
    pub shape_norm_gap: f64,
    pub theta: Option<f64>,
    pub theta_gap: Option<f64>,
    pub fatness_margin: Option<f64>,
    pub fatness_gap: Option<f64>,
    pub parallel_residual: Option<f64>,
    pub radial_residual: Option<f64>,
    /// Sectional curvature of `B` at the first two frame vectors (rescaled).
    pub base_curvature: Option<f64>,
    pub inequality_min_margin: Option<f64>,
    pub strict: Option<bool>,
    pub corollary: Option<CorollaryBound>,
}

/// Analyze the chart at `u`.
pub fn analyze_point(chart: &ImmersionChart, u: &[f64], options: &AnalysisOptions) -> Result<PointAnalysis> {
    chart.check_interior(u, options.tol.boundary_margin())?;
    let sff = second_fundamental_form(chart, u, &options.tol)?;
    let ctx = PointContext::new(sff, options)?;
    analyze_context(&ctx, options)
}

pub fn analyze_context(ctx: &PointContext, options: &AnalysisOptions) -> Result<PointAnalysis> {
    let sff = ctx.sff();
    let frame = sff.frame();
    let scale = ctx.metric_scale();
    let shape = shape_norm(sff)?;
    let has_structure = !ctx.alphas().is_empty();
    let wirtinger = match ctx.kind() {
        StructureKind::Complex | StructureKind::Quaternionic => Some(wirtinger_max(frame)?),
        _ => None,
    };
    let fatness = ctx.fatness()?;
    let n = frame.dim();
    let base_curvature = if n >= 2 {
        let (mut e1, mut e2) = (vec![0.0; n], vec![0.0; n]);
        e1[0] = 1.0;
        e2[1] = 1.0;
        Some(ctx.base_curvature_g0(&e1, &e2)? / scale)
    } else {
        None
    };
    let inequality = ctx.inequality_min_margin()?;
    let shape_sqr = shape.value * shape.value / scale;
    Ok(PointAnalysis {
        u: frame.u().to_vec(),
        structure: ctx.kind(),
        metric_scale: scale,
        min_gram_eigenvalue: frame.min_gram_eigenvalue(),
        ii_symmetry_residual: sff.symmetry_residual(),
        ii_normality_residual: sff.normality_residual(),
        shape_norm: shape.value / scale.sqrt(),
        shape_norm_gap: shape.grid_gap / scale.sqrt(),
        theta: wirtinger.as_ref().map(|w| w.theta),
        theta_gap: wirtinger.as_ref().map(|w| w.grid_gap),
        fatness_margin: fatness.as_ref().map(|f| f.value),
        fatness_gap: fatness.as_ref().map(|f| f.grid_gap),
        parallel_residual: has_structure.then(|| ctx.parallel_residual()),
        radial_residual: has_structure.then(|| ctx.radial_residual()),
        base_curvature,
        inequality_min_margin: inequality,
        strict: inequality.map(|m| m > options.tol.strict_eps),
        corollary: wirtinger.map(|w| CorollaryBound::new(shape_sqr, w.theta)),
    })
}

/// Aggregate over sampled points: worst case of every quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionVerdict {
    pub points: usize,
    pub structure: Option<StructureKind>,
    pub fatness_margin: Option<f64>,
    /// `fatness_margin > strict_eps` at every point.
    pub fat: Option<bool>,
    pub parallel_residual: Option<f64>,
    pub radial_residual: Option<f64>,
    pub inequality_min_margin: Option<f64>,
    pub strict: Option<bool>,
    pub max_theta: Option<f64>,
    pub corollary: Option<CorollaryBound>,
    /// Points where the corollary bound holds.
    pub corollary_satisfied_points: usize,
}

fn fold_opt(values: impl Iterator<Item = Option<f64>>, f: fn(f64, f64) -> f64) -> Option<f64> {
    values.flatten().reduce(f)
}

impl ConnectionVerdict {
    pub fn aggregate(points: &[PointAnalysis], tol: &Tolerances) -> Self {
        let fatness_margin = fold_opt(points.iter().map(|p| p.fatness_margin), f64::min);
        let inequality_min_margin = fold_opt(points.iter().map(|p| p.inequality_min_margin), f64::min);
        let corollary = points.iter().filter_map(|p| p.corollary).reduce(|a, b| CorollaryBound {
            lhs: a.lhs.max(b.lhs),
            rhs: a.rhs.min(b.rhs),
            satisfied: a.satisfied && b.satisfied,
        });
        ConnectionVerdict {
            points: points.len(),
            structure: points.first().map(|p| p.structure),
            fatness_margin,
            fat: fatness_margin.map(|m| m > tol.strict_eps),
            parallel_residual: fold_opt(points.iter().map(|p| p.parallel_residual), f64::max),
            radial_residual: fold_opt(points.iter().map(|p| p.radial_residual), f64::max),
            inequality_min_margin,
            strict: inequality_min_margin.map(|m| m > tol.strict_eps),
            max_theta: fold_opt(points.iter().map(|p| p.theta), f64::max),
            corollary,
            corollary_satisfied_points: points
                .iter()
                .filter(|p| p.corollary.is_some_and(|c| c.satisfied))
                .count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::homogeneous::curvature_normalization;

    fn normalized(chart: &ImmersionChart) -> AnalysisOptions {
        AnalysisOptions {
            normalization: Some(curvature_normalization(chart.field(), chart.ambient_dim(), chart.k()).unwrap()),
            ..Default::default()
        }
    }

    #[test]
    fn conic_in_the_plane() {
        let chart = catalog::veronese(2).unwrap();
        let a = analyze_point(&chart, &[0.3, -0.4], &normalized(&chart)).unwrap();
        assert_eq!(a.structure, StructureKind::Complex);
        assert!(a.theta.unwrap() < 1e-6);
        assert!((a.fatness_margin.unwrap() - 1.0).abs() < 1e-6);
        assert!((a.base_curvature.unwrap() - 0.5).abs() < 1e-8);
        assert!((a.inequality_min_margin.unwrap() - 0.5).abs() < 1e-8);
        assert!((a.shape_norm - 0.5).abs() < 1e-6);
        let c = a.corollary.unwrap();
        assert_eq!(c.rhs, 0.125);
        assert!(!c.satisfied);
    }

    #[test]
    fn choice_of_frame_and_gauge_is_invisible() {
        let chart = catalog::perturbed(&catalog::veronese(2).unwrap(), 0.05, 2).unwrap();
        let u = [0.2, 0.1];
        let base = analyze_point(&chart, &u, &normalized(&chart)).unwrap();
        let other = AnalysisOptions {
            frame: FrameChoice::ComplementRotation { seed: 9 },
            gauge_seed: Some(4),
            ..normalized(&chart)
        };
        let b = analyze_point(&chart, &u, &other).unwrap();
        let pairs = [
            (base.fatness_margin, b.fatness_margin),
            (base.parallel_residual, b.parallel_residual),
            (base.radial_residual, b.radial_residual),
            (base.inequality_min_margin, b.inequality_min_margin),
            (base.theta, b.theta),
            (Some(base.shape_norm), Some(b.shape_norm)),
        ];
        for (x, y) in pairs {
            assert!((x.unwrap() - y.unwrap()).abs() < 1e-8, "{x:?} {y:?}");
        }
    }

    #[test]
    fn real_lines_are_abelian() {
        let chart = catalog::linear_embedding(Field::Real, 3, 5).unwrap();
        let u: Vec<f64> = vec![0.1; chart.domain_dim()];
        let a = analyze_point(&chart, &u, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.structure, StructureKind::Abelian);
        assert!(a.fatness_margin.is_none() && a.parallel_residual.is_none() && a.inequality_min_margin.is_none());
    }

    #[test]
    fn dr_is_antisymmetric() {
        let charts = [
            catalog::perturbed(&catalog::veronese(2).unwrap(), 0.05, 1).unwrap(),
            catalog::perturbed(&catalog::grassmann_sub(2, 3, 4).unwrap(), 0.05, 1).unwrap(),
        ];
        for chart in charts {
            let sff = second_fundamental_form(&chart, &[0.1, -0.1], &Tolerances::default()).unwrap();
            let ctx = PointContext::new(sff, &AnalysisOptions::default()).unwrap();
            let (x, y, z) = ([0.6, 0.8], [1.0, 0.0], [0.0, 1.0]);
            for j in 0..ctx.alphas().len() {
                let a = ctx.dr_component(&x, &y, &z, j).unwrap();
                let b = ctx.dr_component(&y, &x, &z, j).unwrap();
                assert!((a + b).abs() < 1e-12);
            }
            assert!(ctx.radial_residual() <= ctx.parallel_residual() + 1e-12);
        }
    }

    #[test]
    fn verdict_takes_extremes() {
        let chart = catalog::perturbed(&catalog::veronese(2).unwrap(), 0.08, 3).unwrap();
        let opts = normalized(&chart);
        let points: Vec<PointAnalysis> = [[0.0, 0.0], [0.3, -0.2], [-0.4, 0.5]]
            .iter()
            .map(|u| analyze_point(&chart, u, &opts).unwrap())
            .collect();
        let v = ConnectionVerdict::aggregate(&points, &opts.tol);
        assert_eq!(v.points, 3);
        let fat = points
            .iter()
            .map(|p| p.fatness_margin.unwrap())
            .fold(f64::INFINITY, f64::min);
        let par = points.iter().map(|p| p.parallel_residual.unwrap()).fold(0.0, f64::max);
        assert_eq!(v.fatness_margin, Some(fat));
        assert_eq!(v.parallel_residual, Some(par));
        assert_eq!(v.strict, v.inequality_min_margin.map(|m| m > opts.tol.strict_eps));
    }
}
