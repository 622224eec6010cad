//! Extremization over unit spheres with a coarse-grid certificate.
//!
//! Every objective here is an even function `f` on the unit sphere with
//! `|f(v) - f(w)| <= 2 M |v - w|`, `M = max |f|`. A half-sphere grid with
//! chordal covering radius `c` then bounds the global maximum by
//! `grid_max / (1 - 2 c)` and the global minimum below by
//! `grid_min - 2 M c`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frame::PointFrame;
use super::sff::SecondFF;
use crate::algebra::random::random_unit_vector;
use crate::algebra::sym_eig_small;
use crate::error::Result;
use crate::homogeneous::{j_apply, structure_units};

const SEED: u64 = 0x0c0f_fee5;
const RANDOM_STARTS: usize = 8;
const MAX_SWEEPS: usize = 200;

/// Result of an extremization: the refined value, the best grid value and
/// the certified gap between the refined value and the true extremum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    /// Maximizer (or minimizer) on the sphere of the primary variable.
    pub point: Vec<f64>,
    /// Secondary variable (structure coefficients) where there is one.
    pub direction: Vec<f64>,
    pub grid_value: f64,
    /// The true extremum lies within `grid_gap` of `value`.
    pub grid_gap: f64,
}

/// Points of the half-sphere `S^{n-1} / +-1`, with their chordal covering radius.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub points: Vec<Vec<f64>>,
    pub chord: f64,
}

pub fn sphere_grid(n: usize) -> SphereGrid {
    match n {
        0 => SphereGrid {
            points: vec![],
            chord: 0.0,
        },
        1 => SphereGrid {
            points: vec![vec![1.0]],
            chord: 0.0,
        },
        2 => {
            let m = 128;
            let points = (0..m)
                .map(|j| {
                    let t = std::f64::consts::PI * j as f64 / m as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            let half_step = std::f64::consts::PI / (2 * m) as f64;
            SphereGrid {
                points,
                chord: 2.0 * (half_step / 2.0).sin(),
            }
        }
        _ => {
            // normalized integer points of the cube [-m, m]^n
            let m: i64 = match n {
                3 => 8,
                4 => 4,
                5 => 2,
                _ => 1,
            };
            let side = (2 * m + 1) as usize;
            let total = side.pow(n as u32);
            let mut points = Vec::new();
            for idx in 0..total {
                let mut rest = idx;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push((rest % side) as f64 - m as f64);
                    rest /= side;
                }
                let first = v.iter().find(|x| **x != 0.0);
                if first.map_or(true, |x| *x < 0.0) {
                    continue;
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                points.push(v.iter().map(|x| x / norm).collect());
            }
            let angle = ((n as f64).sqrt() / (2.0 * m as f64)).min(1.0).asin();
            SphereGrid {
                points,
                chord: 2.0 * (angle / 2.0).sin(),
            }
        }
    }
}

fn upper_from_grid(grid_max: f64, chord: f64) -> f64 {
    let shrink = 1.0 - 2.0 * chord;
    if shrink > 0.0 {
        grid_max / shrink
    } else {
        f64::INFINITY
    }
}

fn unit_starts(n: usize) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    for a in 0..n {
        let mut v = vec![0.0; n];
        v[a] = 1.0;
        starts.push(v);
        for b in (a + 1)..n {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[a] = std::f64::consts::FRAC_1_SQRT_2;
                v[b] = s * std::f64::consts::FRAC_1_SQRT_2;
                starts.push(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RANDOM_STARTS {
        starts.push(random_unit_vector(n, &mut rng));
    }
    starts
}

fn quad(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    (v.transpose() * m * &v)[(0, 0)]
}

/// `|S(p)| = max |II(X, Y)|` over unit `X, Y`.
///
/// For fixed unit normal `eta` the bilinear maximum is the spectral norm of
/// the symmetric `S_eta`, attained at `X = +-Y`; so `|S| = max_v |II(v, v)|`.
/// Alternating `eta <- II(v, v)`, `v <- top eigenvector of S_eta` increases
/// this monotonically.
pub fn shape_norm(sff: &SecondFF) -> Result<Extremum> {
    let n = sff.dim();
    let k = sff.gram_tensor();
    let m = n * n;
    // S_ab(v) = sum_cd K[ab, cd] v_c v_d, and |II(v, v)|^2 = v^T S(v) v
    let s_of = |v: &[f64]| -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |a, b| {
            let mut acc = 0.0;
            for c in 0..n {
                for d in 0..n {
                    acc += k[(a * n + b) * m + c * n + d] * v[c] * v[d];
                }
            }
            acc
        })
    };
    let f = |v: &[f64]| quad(&s_of(v), v).max(0.0).sqrt();

    let grid = sphere_grid(n);
    let (mut grid_max, mut grid_arg) = (0.0, vec![0.0; n]);
    for p in &grid.points {
        let val = f(p);
        if val > grid_max {
            grid_max = val;
            grid_arg = p.clone();
        }
    }
    let mut starts = unit_starts(n);
    starts.push(grid_arg.clone());
    let (mut best, mut best_v) = (grid_max, grid_arg);
    for start in starts {
        let mut v = start;
        let mut value = f(&v);
        for _ in 0..MAX_SWEEPS {
            if value == 0.0 {
                break;
            }
            let eig = sym_eig_small(&s_of(&v))?;
            let next = eig.max().1.to_vec();
            let next_value = f(&next);
            if next_value <= value * (1.0 + 1e-15) {
                if next_value > value {
                    value = next_value;
                    v = next;
                }
                break;
            }
            value = next_value;
            v = next;
        }
        if value > best {
            best = value;
            best_v = v;
        }
    }
    Ok(Extremum {
        value: best,
        point: best_v,
        direction: vec![],
        grid_value: grid_max,
        grid_gap: (upper_from_grid(grid_max, grid.chord) - best).max(0.0),
    })
}

/// `q(x, a) = sum_{ab} a_a a_b x^T M_ab x` on `S^{n-1} x S^{d-1}`.
#[derive(Clone, Debug)]
pub struct Biquadratic {
    n: usize,
    d: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl Biquadratic {
    /// From `entry(a, i, b, j)`, the coefficient of `a_a x_i a_b x_j`.
    pub fn from_fn(n: usize, d: usize, entry: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut blocks = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                blocks.push(DMatrix::from_fn(n, n, |i, j| entry(a, i, b, j)));
            }
        }
        Biquadratic { n, d, blocks }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.d)
    }

    /// Symmetric form in `x` for fixed `a`.
    pub fn x_form(&self, a: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for p in 0..self.d {
            for q in 0..self.d {
                m += &self.blocks[p * self.d + q] * (a[p] * a[q]);
            }
        }
        (&m + m.transpose()) * 0.5
    }

    /// Symmetric form in `a` for fixed `x`.
    pub fn a_form(&self, x: &[f64]) -> DMatrix<f64> {
        let m = DMatrix::from_fn(self.d, self.d, |p, q| quad(&self.blocks[p * self.d + q], x));
        (&m + m.transpose()) * 0.5
    }

    pub fn value(&self, x: &[f64], a: &[f64]) -> f64 {
        quad(&self.a_form(x), a)
    }

    fn best_a(&self, x: &[f64], maximize: bool) -> Result<(f64, Vec<f64>)> {
        let eig = sym_eig_small(&self.a_form(x))?;
        let (val, vec) = if maximize { eig.max() } else { eig.min() };
        Ok((val, vec.to_vec()))
    }

    fn alternate(&self, x0: Vec<f64>, maximize: bool) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let better = |new: f64, old: f64| {
            if maximize {
                new > old + 1e-15 * old.abs().max(1e-300)
            } else {
                new < old - 1e-15 * old.abs().max(1e-300)
            }
        };
        let mut x = x0;
        let (mut value, mut a) = self.best_a(&x, maximize)?;
        for _ in 0..MAX_SWEEPS {
            let eig = sym_eig_small(&self.x_form(&a))?;
            let (_, nx) = if maximize { eig.max() } else { eig.min() };
            let nx = nx.to_vec();
            let (nv, na) = self.best_a(&nx, maximize)?;
            if !better(nv, value) {
                break;
            }
            value = nv;
            x = nx;
            a = na;
        }
        Ok((value, x, a))
    }

    fn grid_scan(&self, maximize: bool) -> Result<(f64, Vec<f64>, f64)> {
        let grid = sphere_grid(self.n);
        let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut arg = vec![0.0; self.n];
        for p in &grid.points {
            let (v, _) = self.best_a(p, maximize)?;
            if (maximize && v > best) || (!maximize && v < best) {
                best = v;
                arg = p.clone();
            }
        }
        Ok((best, arg, grid.chord))
    }

    fn extremize(&self, maximize: bool) -> Result<Extremum> {
        if self.d == 1 {
            // exact: a single eigenproblem in x
            let eig = sym_eig_small(&self.x_form(&[1.0]))?;
            let (v, x) = if maximize { eig.max() } else { eig.min() };
            return Ok(Extremum {
                value: v,
                point: x.to_vec(),
                direction: vec![1.0],
                grid_value: v,
                grid_gap: 0.0,
            });
        }
        let (grid_value, grid_arg, chord) = self.grid_scan(maximize)?;
        let mut starts = unit_starts(self.n);
        starts.push(grid_arg);
        let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
        for s in starts {
            let cand = self.alternate(s, maximize)?;
            let take = match &best {
                None => true,
                Some((b, _, _)) => (maximize && cand.0 > *b) || (!maximize && cand.0 < *b),
            };
            if take {
                best = Some(cand);
            }
        }
        let (value, point, direction) = best.expect("at least one start");
        let grid_gap = if self.n == 1 {
            0.0
        } else if maximize {
            (upper_from_grid(grid_value, chord) - value).max(0.0)
        } else {
            let (gmax, _, _) = self.grid_scan(true)?;
            2.0 * upper_from_grid(gmax, chord) * chord + (grid_value - value).max(0.0)
        };
        Ok(Extremum {
            value,
            point,
            direction,
            grid_value,
            grid_gap,
        })
    }

    pub fn maximize(&self) -> Result<Extremum> {
        self.extremize(true)
    }

    pub fn minimize(&self) -> Result<Extremum> {
        self.extremize(false)
    }
}

/// Largest Wirtinger angle `theta(p)` of `phi_*(T_p B)`, with the maximizing
/// unit vector and structure coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirtingerMax {
    pub theta: f64,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    /// Certified gap on `sin^2 theta`.
    pub grid_gap: f64,
}

/// `theta(p)`: maximize `|perp(J_a X)|^2` over unit `X` in the frame span and
/// unit structure coefficients `a`; exact over C, alternating with a grid
/// certificate over H.
pub fn wirtinger_max(frame: &PointFrame) -> Result<WirtingerMax> {
    let units = structure_units(frame.point().field())?;
    let n = frame.dim();
    let d = units.len();
    let mut tangential = vec![vec![vec![0.0; n]; n]; d];
    let mut normal = Vec::with_capacity(d);
    for (a, &q) in units.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for (i, e) in frame.basis().iter().enumerate() {
            let (coeffs, rest) = frame.split(&j_apply(e, q)?);
            tangential[a][i] = coeffs;
            row.push(rest);
        }
        normal.push(row);
    }
    let perp = Biquadratic::from_fn(n, d, |a, i, b, j| normal[a][i].inner(&normal[b][j]));
    let tan = Biquadratic::from_fn(n, d, |a, i, b, j| {
        tangential[a][i].iter().zip(&tangential[b][j]).map(|(x, y)| x * y).sum()
    });
    let best = perp.maximize()?;
    let s = best.value.max(0.0);
    let c = tan.value(&best.point, &best.direction).max(0.0);
    Ok(WirtingerMax {
        theta: s.sqrt().atan2(c.sqrt()),
        point: best.point,
        direction: best.direction,
        grid_gap: best.grid_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_cover_the_half_sphere() {
        for n in 1..=4 {
            let g = sphere_grid(n);
            assert!(g
                .points
                .iter()
                .all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14));
            assert!(g.chord < 0.5, "n = {n}: {}", g.chord);
        }
    }

    #[test]
    fn biquadratic_rank_one_extremes() {
        // q(x, a) = (x . u)^2 (a . w)^2
        let u = [0.6, 0.8, 0.0];
        let w = [0.0, 1.0, 0.0];
        let q = Biquadratic::from_fn(3, 3, |a, i, b, j| w[a] * w[b] * u[i] * u[j]);
        let max = q.maximize().unwrap();
        assert!((max.value - 1.0).abs() < 1e-12);
        assert!(max.grid_value <= max.value + 1e-12);
        let min = q.minimize().unwrap();
        assert!(min.value.abs() < 1e-12);
    }
}
