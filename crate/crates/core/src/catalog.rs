//! Built-in charts with known geometry, registered by name.
//!
//! | name            | map                                                   |
//! |-----------------|-------------------------------------------------------|
//! | `linear`        | `KP^{m-1} -> G_1(K^N)` by zero padding                |
//! | `veronese`      | degree `d` Veronese curve `CP^1 -> CP^d`              |
//! | `totally-real`  | `RP^n -> CP^n`                                        |
//! | `clifford`      | flat torus `[e^{iu} : e^{iv} : 1]` in `CP^2`          |
//! | `hline`         | `HP^1 -> HP^{N-1}`                                    |
//! | `grassmann-sub` | `G_k(R^m) -> G_k(R^N)`                                |
//! | `perturbed`     | seeded smooth deformation of a base chart             |

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::random::random_anti_hermitian;
use crate::algebra::{Field, Mat, Quat};
use crate::error::{Error, Result};
use crate::homogeneous::{geodesic, GrassPoint, GrassTangent};
use crate::immersion::{point_frame, ChartMap, ImmersionChart};
use crate::tolerances::Tolerances;

/// Properties a catalog chart is known to have. `None` means no claim.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Expectations {
    pub totally_geodesic: Option<bool>,
    pub kahler: Option<bool>,
    pub quaternionic: Option<bool>,
    pub fat: Option<bool>,
    pub parallel: Option<bool>,
    /// Constant Wirtinger angle `theta(p)`.
    pub theta: Option<f64>,
    pub fatness_margin: Option<f64>,
    /// Constant sectional curvature of the pull-back of `g0` (2-dimensional charts).
    pub base_curvature_g0: Option<f64>,
}

/// A built chart together with what it is expected to satisfy.
#[derive(Clone, Debug)]
pub struct CatalogChart {
    pub chart: ImmersionChart,
    pub expected: Expectations,
}

/// A registered constructor.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameter names with defaults.
    pub params: &'static [(&'static str, f64)],
    /// Fields accepted via the field selector; the first is the default.
    pub fields: &'static [Field],
    build: fn(Field, &BTreeMap<String, f64>) -> Result<CatalogChart>,
}

impl CatalogEntry {
    /// Build with `params` layered over the defaults. Unknown parameter
    /// names and unsupported fields are errors.
    pub fn build(&self, field: Option<Field>, params: &BTreeMap<String, f64>) -> Result<CatalogChart> {
        let field = match field {
            None => self.fields[0],
            Some(f) if self.fields.contains(&f) => f,
            Some(f) => {
                return Err(Error::InvalidParameter(format!(
                    "chart `{}` does not support field {f}",
                    self.name
                )))
            }
        };
        let mut merged: BTreeMap<String, f64> = self.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in params {
            if !merged.contains_key(k) {
                return Err(Error::InvalidParameter(format!(
                    "unknown parameter `{k}` for chart `{}` (accepted: {})",
                    self.name,
                    self.params.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("parameter `{k}` is not finite")));
            }
            merged.insert(k.clone(), *v);
        }
        (self.build)(field, &merged)
    }
}

const FIELDS_ALL: &[Field] = &[Field::Complex, Field::Real, Field::Quaternion];
const FIELDS_C: &[Field] = &[Field::Complex];
const FIELDS_H: &[Field] = &[Field::Quaternion];
const FIELDS_R: &[Field] = &[Field::Real];

pub static REGISTRY: &[CatalogEntry] = &[
    CatalogEntry {
        name: "linear",
        summary: "KP^{m-1} -> G_1(K^N), zero padding (totally geodesic)",
        params: &[("m", 2.0), ("N", 3.0)],
        fields: FIELDS_ALL,
        build: build_linear,
    },
    CatalogEntry {
        name: "veronese",
        summary: "degree-d Veronese curve CP^1 -> CP^d (Kahler)",
        params: &[("d", 2.0)],
        fields: FIELDS_C,
        build: build_veronese,
    },
    CatalogEntry {
        name: "totally-real",
        summary: "RP^n -> CP^n (totally real)",
        params: &[("n", 2.0)],
        fields: FIELDS_C,
        build: build_totally_real,
    },
    CatalogEntry {
        name: "clifford",
        summary: "flat Lagrangian torus [e^{iu} : e^{iv} : 1] in CP^2",
        params: &[],
        fields: FIELDS_C,
        build: build_clifford,
    },
    CatalogEntry {
        name: "hline",
        summary: "HP^1 -> HP^{N-1} (quaternionic, totally geodesic)",
        params: &[("N", 3.0)],
        fields: FIELDS_H,
        build: build_hline,
    },
    CatalogEntry {
        name: "grassmann-sub",
        summary: "G_k(R^m) -> G_k(R^N) (totally geodesic)",
        params: &[("k", 2.0), ("m", 4.0), ("N", 5.0)],
        fields: FIELDS_R,
        build: build_grassmann_sub,
    },
    CatalogEntry {
        name: "perturbed",
        summary: "seeded deformation of veronese (C), hline (H) or grassmann-sub (R)",
        params: &[
            ("amplitude", 0.05),
            ("seed", 1.0),
            ("d", 2.0),
            ("N", 4.0),
            ("k", 2.0),
            ("m", 3.0),
        ],
        fields: &[Field::Complex, Field::Quaternion, Field::Real],
        build: build_perturbed,
    },
];

pub fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "unknown chart `{name}` (available: {})",
            REGISTRY.iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
        ))
    })
}

/// Look up `name` and build it.
pub fn build(name: &str, field: Option<Field>, params: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    lookup(name)?.build(field, params)
}

fn int_param(params: &BTreeMap<String, f64>, key: &str, min: usize) -> Result<usize> {
    let v = params[key];
    if v.fract() != 0.0 || v < min as f64 || v > 64.0 {
        return Err(Error::InvalidParameter(format!(
            "parameter `{key}` must be an integer in [{min}, 64], got {v}"
        )));
    }
    Ok(v as usize)
}

fn params_of(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Affine chart `(1, z_1, .., z_{m-1}, 0, .., 0)` with `z_j` in K.
#[derive(Debug)]
struct Linear {
    field: Field,
    m: usize,
    n: usize,
}

impl ChartMap for Linear {
    fn field(&self) -> Field {
        self.field
    }
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        1
    }
    fn domain_dim(&self) -> usize {
        (self.m - 1) * self.field.dim()
    }
    fn frame(&self, u: &[f64]) -> Mat {
        let d = self.field.dim();
        let basis = self.field.real_basis();
        Mat::from_fn(self.field, self.n, 1, |i, _| match i {
            0 => Quat::ONE,
            i if i < self.m => (0..d).fold(Quat::ZERO, |acc, c| acc + basis[c].scale(u[(i - 1) * d + c])),
            _ => Quat::ZERO,
        })
    }
    fn frame_derivative(&self, _u: &[f64]) -> Option<Vec<Mat>> {
        let d = self.field.dim();
        let basis = self.field.real_basis();
        Some(
            (0..self.domain_dim())
                .map(|idx| {
                    let mut w = Mat::zeros(self.field, self.n, 1);
                    w[(1 + idx / d, 0)] = basis[idx % d];
                    w
                })
                .collect(),
        )
    }
}

/// `KP^{m-1} -> G_1(K^N)`.
pub fn linear_embedding(field: Field, m: usize, n: usize) -> Result<ImmersionChart> {
    if m < 2 || m > n {
        return Err(Error::InvalidParameter(format!(
            "linear embedding needs 2 <= m <= N, got m = {m}, N = {n}"
        )));
    }
    let map = Linear { field, m, n };
    let dim = map.domain_dim();
    ImmersionChart::new(
        "linear",
        params_of(&[("m", m as f64), ("N", n as f64)]),
        vec![(-1.0, 1.0); dim],
        Arc::new(map),
    )
}

fn build_linear(field: Field, p: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    let m = int_param(p, "m", 2)?;
    let n = int_param(p, "N", 2)?;
    let chart = linear_embedding(field, m, n)?;
    let has_structure = field != Field::Real;
    let base_curvature_g0 = match (field, m) {
        (Field::Real, m) if m >= 3 => Some(1.0),
        (Field::Complex, 2) => Some(4.0),
        _ => None,
    };
    Ok(CatalogChart {
        chart,
        expected: Expectations {
            totally_geodesic: Some(true),
            kahler: (field == Field::Complex).then_some(true),
            quaternionic: (field == Field::Quaternion).then_some(true),
            fat: has_structure.then_some(true),
            parallel: has_structure.then_some(true),
            theta: has_structure.then_some(0.0),
            fatness_margin: has_structure.then_some(1.0),
            base_curvature_g0,
        },
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `z -> [sqrt(C(d, j)) z^j]_j`.
#[derive(Debug)]
struct Veronese {
    d: usize,
    coeff: Vec<f64>,
}

impl Veronese {
    fn new(d: usize) -> Self {
        Veronese {
            d,
            coeff: (0..=d).map(|j| binomial(d, j).sqrt()).collect(),
        }
    }

    fn power(z: Quat, j: usize) -> Quat {
        (0..j).fold(Quat::ONE, |acc, _| acc * z)
    }
}

impl ChartMap for Veronese {
    fn field(&self) -> Field {
        Field::Complex
    }
    fn ambient_dim(&self) -> usize {
        self.d + 1
    }
    fn k(&self) -> usize {
        1
    }
    fn domain_dim(&self) -> usize {
        2
    }
    fn frame(&self, u: &[f64]) -> Mat {
        let z = Quat::complex(u[0], u[1]);
        Mat::from_fn(Field::Complex, self.d + 1, 1, |j, _| {
            Veronese::power(z, j).scale(self.coeff[j])
        })
    }
    fn frame_derivative(&self, u: &[f64]) -> Option<Vec<Mat>> {
        let z = Quat::complex(u[0], u[1]);
        let dz = Mat::from_fn(Field::Complex, self.d + 1, 1, |j, _| {
            if j == 0 {
                Quat::ZERO
            } else {
                Veronese::power(z, j - 1).scale(self.coeff[j] * j as f64)
            }
        });
        // holomorphic: d/d(Re z) = f', d/d(Im z) = i f'
        let di = dz.mul_right(Quat::I);
        Some(vec![dz, di])
    }
}

/// Degree `d` Veronese curve in the affine chart `z = z_1 / z_0`.
pub fn veronese(d: usize) -> Result<ImmersionChart> {
    if d < 1 {
        return Err(Error::InvalidParameter("Veronese degree must be at least 1".into()));
    }
    ImmersionChart::new(
        "veronese",
        params_of(&[("d", d as f64)]),
        vec![(-1.0, 1.0); 2],
        Arc::new(Veronese::new(d)),
    )
}

fn build_veronese(_: Field, p: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    let d = int_param(p, "d", 1)?;
    Ok(CatalogChart {
        chart: veronese(d)?,
        expected: Expectations {
            totally_geodesic: Some(d == 1),
            kahler: Some(true),
            quaternionic: None,
            fat: Some(true),
            parallel: Some(true),
            theta: Some(0.0),
            fatness_margin: Some(1.0),
            base_curvature_g0: Some(4.0 / d as f64),
        },
    })
}

/// `(1, u_1, .., u_n)` with real entries, read in C^{n+1}.
#[derive(Debug)]
struct TotallyReal {
    n: usize,
}

impl ChartMap for TotallyReal {
    fn field(&self) -> Field {
        Field::Complex
    }
    fn ambient_dim(&self) -> usize {
        self.n + 1
    }
    fn k(&self) -> usize {
        1
    }
    fn domain_dim(&self) -> usize {
        self.n
    }
    fn frame(&self, u: &[f64]) -> Mat {
        Mat::from_fn(Field::Complex, self.n + 1, 1, |i, _| {
            if i == 0 {
                Quat::ONE
            } else {
                Quat::real(u[i - 1])
            }
        })
    }
    fn frame_derivative(&self, _u: &[f64]) -> Option<Vec<Mat>> {
        Some(
            (0..self.n)
                .map(|i| Mat::unit(Field::Complex, self.n + 1, 1, i + 1, 0))
                .collect(),
        )
    }
}

pub fn totally_real(n: usize) -> Result<ImmersionChart> {
    if n < 1 {
        return Err(Error::InvalidParameter("totally real chart needs n >= 1".into()));
    }
    ImmersionChart::new(
        "totally-real",
        params_of(&[("n", n as f64)]),
        vec![(-1.0, 1.0); n],
        Arc::new(TotallyReal { n }),
    )
}

fn build_totally_real(_: Field, p: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    let n = int_param(p, "n", 1)?;
    Ok(CatalogChart {
        chart: totally_real(n)?,
        expected: Expectations {
            totally_geodesic: Some(true),
            kahler: Some(false),
            quaternionic: None,
            fat: Some(false),
            parallel: Some(true),
            theta: Some(std::f64::consts::FRAC_PI_2),
            fatness_margin: Some(0.0),
            base_curvature_g0: (n == 2).then_some(1.0),
        },
    })
}

#[derive(Debug)]
struct Clifford;

impl ChartMap for Clifford {
    fn field(&self) -> Field {
        Field::Complex
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
        Mat::column(Field::Complex, &[Quat::cis(u[0]), Quat::cis(u[1]), Quat::ONE])
    }
    fn frame_derivative(&self, u: &[f64]) -> Option<Vec<Mat>> {
        Some(vec![
            Mat::column(Field::Complex, &[Quat::cis(u[0]) * Quat::I, Quat::ZERO, Quat::ZERO]),
            Mat::column(Field::Complex, &[Quat::ZERO, Quat::cis(u[1]) * Quat::I, Quat::ZERO]),
        ])
    }
}

pub fn clifford_torus() -> Result<ImmersionChart> {
    ImmersionChart::new("clifford", BTreeMap::new(), vec![(-3.0, 3.0); 2], Arc::new(Clifford))
}

fn build_clifford(_: Field, _: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    Ok(CatalogChart {
        chart: clifford_torus()?,
        expected: Expectations {
            totally_geodesic: Some(false),
            kahler: Some(false),
            quaternionic: None,
            fat: Some(false),
            parallel: None,
            theta: Some(std::f64::consts::FRAC_PI_2),
            fatness_margin: Some(0.0),
            base_curvature_g0: Some(0.0),
        },
    })
}

pub fn quaternionic_line(n: usize) -> Result<ImmersionChart> {
    if n < 2 {
        return Err(Error::InvalidParameter("quaternionic line needs N >= 2".into()));
    }
    let map = Linear {
        field: Field::Quaternion,
        m: 2,
        n,
    };
    ImmersionChart::new(
        "hline",
        params_of(&[("N", n as f64)]),
        vec![(-1.0, 1.0); 4],
        Arc::new(map),
    )
}

fn build_hline(_: Field, p: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    let n = int_param(p, "N", 2)?;
    Ok(CatalogChart {
        chart: quaternionic_line(n)?,
        expected: Expectations {
            totally_geodesic: Some(true),
            kahler: None,
            quaternionic: Some(true),
            fat: Some(true),
            parallel: Some(true),
            theta: Some(0.0),
            fatness_margin: Some(1.0),
            base_curvature_g0: None,
        },
    })
}

/// `W = [I_k; A; 0]` with `A` the `(m-k) x k` chart coordinates (row major).
#[derive(Debug)]
struct GrassmannSub {
    k: usize,
    m: usize,
    n: usize,
}

impl ChartMap for GrassmannSub {
    fn field(&self) -> Field {
        Field::Real
    }
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn domain_dim(&self) -> usize {
        self.k * (self.m - self.k)
    }
    fn frame(&self, u: &[f64]) -> Mat {
        let k = self.k;
        Mat::from_fn(Field::Real, self.n, k, |i, j| {
            if i < k {
                if i == j {
                    Quat::ONE
                } else {
                    Quat::ZERO
                }
            } else if i < self.m {
                Quat::real(u[(i - k) * k + j])
            } else {
                Quat::ZERO
            }
        })
    }
    fn frame_derivative(&self, _u: &[f64]) -> Option<Vec<Mat>> {
        let k = self.k;
        Some(
            (0..self.domain_dim())
                .map(|idx| Mat::unit(Field::Real, self.n, k, k + idx / k, idx % k))
                .collect(),
        )
    }
}

pub fn grassmann_sub(k: usize, m: usize, n: usize) -> Result<ImmersionChart> {
    if !(1 <= k && k < m && m <= n) {
        return Err(Error::InvalidParameter(format!(
            "sub-Grassmannian needs 1 <= k < m <= N, got k = {k}, m = {m}, N = {n}"
        )));
    }
    let map = GrassmannSub { k, m, n };
    let dim = map.domain_dim();
    ImmersionChart::new(
        "grassmann-sub",
        params_of(&[("k", k as f64), ("m", m as f64), ("N", n as f64)]),
        vec![(-1.0, 1.0); dim],
        Arc::new(map),
    )
}

fn build_grassmann_sub(_: Field, p: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    let chart = grassmann_sub(int_param(p, "k", 1)?, int_param(p, "m", 2)?, int_param(p, "N", 2)?)?;
    Ok(CatalogChart {
        chart,
        expected: Expectations {
            totally_geodesic: Some(true),
            parallel: Some(true),
            ..Expectations::default()
        },
    })
}

/// Fourier modes `cos(r t_i) A_ir + sin(r t_i) B_ir`, `r = 1, 2`, with `t_i`
/// the coordinate rescaled to one period over the box.
#[derive(Debug)]
pub struct Perturbation {
    base: Arc<dyn ChartMap>,
    domain: Vec<(f64, f64)>,
    amplitude: f64,
    modes: Vec<(usize, f64, Mat, Mat)>,
}

impl Perturbation {
    /// The seeded anti-Hermitian mode matrices `(coordinate, order, A, B)`.
    pub fn modes(&self) -> &[(usize, f64, Mat, Mat)] {
        &self.modes
    }

    fn generator(&self, u: &[f64]) -> Mat {
        let n = self.base.ambient_dim();
        let mut k = Mat::zeros(self.base.field(), n, n);
        for (i, r, a, b) in &self.modes {
            let (lo, hi) = self.domain[*i];
            let t = 2.0 * std::f64::consts::PI * (u[*i] - lo) / (hi - lo);
            k = &k + &(&a.scale((r * t).cos()) + &b.scale((r * t).sin()));
        }
        k
    }
}

impl ChartMap for Perturbation {
    fn field(&self) -> Field {
        self.base.field()
    }
    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }
    fn k(&self) -> usize {
        self.base.k()
    }
    fn domain_dim(&self) -> usize {
        self.base.domain_dim()
    }
    fn frame(&self, u: &[f64]) -> Mat {
        let w = self.base.frame(u);
        if self.amplitude == 0.0 {
            return w;
        }
        let displaced = GrassPoint::from_stiefel(w).and_then(|p| {
            let p = Arc::new(p);
            let k = self.generator(u);
            let t = GrassTangent::from_ambient_frame(p.clone(), &(&k * p.stiefel()));
            geodesic(&t, self.amplitude)
        });
        match displaced {
            Ok(q) => q.stiefel().clone(),
            Err(_) => Mat::from_fn(self.field(), self.ambient_dim(), self.k(), |_, _| Quat::real(f64::NAN)),
        }
    }
}

/// Deform `base` by a geodesic displacement along `(I - P) K(u) V`, where
/// `K(u)` is a seeded low-order Fourier series of anti-Hermitian matrices.
pub fn perturbed(base: &ImmersionChart, amplitude: f64, seed: u64) -> Result<ImmersionChart> {
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be >= 0, got {amplitude}"
        )));
    }
    if amplitude == 0.0 {
        return Ok(base.clone());
    }
    let field = base.field();
    let n = base.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    let count = (2 * base.domain_dim()) as f64;
    for i in 0..base.domain_dim() {
        for r in [1.0, 2.0] {
            let a = random_anti_hermitian(field, n, &mut rng).scale(1.0 / count);
            let b = random_anti_hermitian(field, n, &mut rng).scale(1.0 / count);
            modes.push((i, r, a, b));
        }
    }
    let map = Perturbation {
        base: base.map().clone(),
        domain: base.domain().to_vec(),
        amplitude,
        modes,
    };
    let mut params = base.params().clone();
    params.insert("amplitude".into(), amplitude);
    params.insert("seed".into(), seed as f64);
    let chart = ImmersionChart::new("perturbed", params, base.domain().to_vec(), Arc::new(map))?;
    // probe the centre and the inset corners of the box
    let tol = Tolerances::default();
    let probes: Vec<Vec<f64>> = std::iter::once(0.5)
        .chain([0.1, 0.9])
        .map(|s| chart.domain().iter().map(|(lo, hi)| lo + s * (hi - lo)).collect())
        .collect();
    for u in probes {
        if let Err(e) = point_frame(&chart, &u, &tol) {
            return Err(Error::InvalidParameter(format!(
                "perturbed chart fails at {u:?} ({e}); try a smaller amplitude"
            )));
        }
    }
    Ok(chart)
}

fn build_perturbed(field: Field, p: &BTreeMap<String, f64>) -> Result<CatalogChart> {
    let base = match field {
        Field::Complex => veronese(int_param(p, "d", 1)?)?,
        Field::Quaternion => quaternionic_line(int_param(p, "N", 2)?)?,
        Field::Real => grassmann_sub(int_param(p, "k", 1)?, int_param(p, "m", 2)?, int_param(p, "N", 2)?)?,
    };
    let seed = p["seed"];
    if seed.fract() != 0.0 || seed < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "seed must be a non-negative integer, got {seed}"
        )));
    }
    Ok(CatalogChart {
        chart: perturbed(&base, p["amplitude"], seed as u64)?,
        expected: Expectations::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds_with_defaults() {
        for e in REGISTRY {
            for &f in e.fields {
                let c = e.build(Some(f), &BTreeMap::new()).unwrap();
                let u: Vec<f64> = c.chart.domain().iter().map(|(lo, hi)| 0.37 * lo + 0.63 * hi).collect();
                point_frame(&c.chart, &u, &Tolerances::default()).unwrap();
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(lookup("nope").is_err());
        assert!(build("veronese", Some(Field::Real), &BTreeMap::new()).is_err());
        assert!(build("veronese", None, &params_of(&[("q", 1.0)])).is_err());
        assert!(build("veronese", None, &params_of(&[("d", 1.5)])).is_err());
        assert!(linear_embedding(Field::Complex, 4, 3).is_err());
        assert!(grassmann_sub(2, 2, 4).is_err());
    }

    #[test]
    fn veronese_target_dimension() {
        assert_eq!(veronese(2).unwrap().ambient_dim(), 3);
        assert_eq!(veronese(1).unwrap().ambient_dim(), 2);
    }

    #[test]
    fn perturbation_is_deterministic_and_trivial_at_zero() {
        let base = veronese(2).unwrap();
        let a = perturbed(&base, 0.05, 9).unwrap();
        let b = perturbed(&base, 0.05, 9).unwrap();
        let u = [0.2, -0.4];
        assert_eq!(a.map().frame(&u), b.map().frame(&u));
        let zero = perturbed(&base, 0.0, 9).unwrap();
        assert_eq!(zero.map().frame(&u), base.map().frame(&u));
        assert_ne!(a.projector(&u).unwrap(), base.projector(&u).unwrap());
    }
}
