use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::scalar::{Field, Quat};
use crate::error::{Error, Result};

/// Dense row-major matrix over R, C or H.
///
/// Entries are stored as [`Quat`] for every field; the field tag is what
/// arithmetic checks against. Binary operators panic on shape or field
/// mismatch (they are used on internally constructed values); the `try_*`
/// methods return errors instead.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Quat>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![Quat::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = Quat::ONE;
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Column vector from entries.
    pub fn column(field: Field, entries: &[Quat]) -> Self {
        Mat::from_fn(field, entries.len(), 1, |i, _| entries[i])
    }

    /// `e_i` as an `n x 1` column.
    pub fn unit_column(field: Field, n: usize, i: usize) -> Self {
        let mut m = Mat::zeros(field, n, 1);
        m[(i, 0)] = Quat::ONE;
        m
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(field: Field, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(field, rows, cols);
        m[(i, j)] = Quat::ONE;
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Quat] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field,
                found: other.field.to_string(),
            });
        }
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field,
                found: other.field.to_string(),
            });
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Mat::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == Quat::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    fn zip_map(&self, other: &Mat, f: impl Fn(Quat, Quat) -> Quat) -> Mat {
        Mat {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Quat) -> Quat) -> Mat {
        Mat {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        self.map(|a| a * s)
    }

    /// Every entry multiplied by `q` on the right (`M q`).
    pub fn mul_right(&self, q: Quat) -> Mat {
        self.map(|a| a * q)
    }

    /// Every entry multiplied by `q` on the left (`q M`).
    pub fn mul_left(&self, q: Quat) -> Mat {
        self.map(|a| q * a)
    }

    /// Re-tag the entries with a larger field (e.g. real data used over C).
    pub fn with_field(mut self, field: Field) -> Mat {
        assert!(
            self.data.iter().all(|&q| field.contains(q)),
            "entries do not fit in {field}"
        );
        self.field = field;
        self
    }

    /// `AB - BA`
    pub fn commutator(a: &Mat, b: &Mat) -> Mat {
        &(a * b) - &(b * a)
    }

    /// Real Frobenius pairing `Re trace(A* B)`.
    pub fn re_inner(&self, other: &Mat) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| a.dot(*b)).sum()
    }

    /// The bi-invariant metric `g0(A, B) = 1/2 Re trace(A B*)`.
    pub fn inner_g0(&self, other: &Mat) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(0.5 * self.re_inner(other))
    }

    /// `g0(A, A)`
    pub fn norm_g0_sqr(&self) -> f64 {
        0.5 * self.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Quat {
        (0..self.rows.min(self.cols)).fold(Quat::ZERO, |acc, i| acc + self[(i, i)])
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Mat::from_fn(self.field, rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn columns(&self, start: usize, end: usize) -> Mat {
        self.block(0, start, self.rows, end - start)
    }

    pub fn col(&self, j: usize) -> Mat {
        self.columns(j, j + 1)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn hstack(parts: &[&Mat]) -> Mat {
        let first = parts.first().expect("hstack of nothing");
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Mat::zeros(first.field, first.rows, cols);
        let mut c = 0;
        for p in parts {
            assert_eq!(p.rows, first.rows, "hstack row mismatch");
            out.set_block(0, c, p);
            c += p.cols;
        }
        out
    }

    /// Largest entrywise deviation from `A* = -A`.
    pub fn anti_hermitian_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] + self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn hermitian_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Gram-Schmidt over the field, coefficients applied on the right.
    ///
    /// Each column is orthogonalized twice against its predecessors. A column
    /// whose remaining norm falls below `1e-10` times its original norm is
    /// reported as degenerate.
    pub fn orthonormalize(&self) -> Result<Mat> {
        let mut q = self.clone();
        for j in 0..self.cols {
            let mut v = self.col(j);
            let original = v.norm();
            for _pass in 0..2 {
                for i in 0..j {
                    let qi = q.col(i);
                    let c = column_dot(&qi, &v);
                    for r in 0..self.rows {
                        v[(r, 0)] -= qi[(r, 0)] * c;
                    }
                }
            }
            let n = v.norm();
            if !(n > 1e-10 * original.max(f64::MIN_POSITIVE)) || !n.is_finite() {
                return Err(Error::Degenerate { column: j });
            }
            q.set_block(0, j, &v.scale(1.0 / n));
        }
        Ok(q)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting; row
    /// operations multiply on the left, which is valid over H.
    pub fn inverse(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("inverse of {:?}", self.shape())));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(self.field, n);
        let scale = self.norm().max(f64::MIN_POSITIVE);
        for c in 0..n {
            let pivot = (c..n)
                .max_by(|&x, &y| a[(x, c)].norm().total_cmp(&a[(y, c)].norm()))
                .expect("non-empty pivot range");
            if a[(pivot, c)].norm() <= 1e-14 * scale {
                return Err(Error::Degenerate { column: c });
            }
            if pivot != c {
                for j in 0..n {
                    a.data.swap(pivot * n + j, c * n + j);
                    inv.data.swap(pivot * n + j, c * n + j);
                }
            }
            let p_inv = a[(c, c)].inverse();
            for j in 0..n {
                a[(c, j)] = p_inv * a[(c, j)];
                inv[(c, j)] = p_inv * inv[(c, j)];
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f == Quat::ZERO {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(c, j)], inv[(c, j)]);
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> Mat {
        assert_eq!(self.rows, self.cols, "expm of a non-square matrix");
        let n = self.rows;
        let norm = self.norm();
        let squarings = if norm > 0.25 {
            (norm / 0.25).log2().ceil() as i32
        } else {
            0
        };
        let a = self.scale(0.5f64.powi(squarings));
        let mut result = Mat::identity(self.field, n);
        let mut term = Mat::identity(self.field, n);
        for m in 1..40 {
            term = (&term * &a).scale(1.0 / m as f64);
            result = &result + &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }

    /// Logarithm of a matrix close to the identity by the Mercator series.
    pub fn log_near_identity(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols, "log of a non-square matrix");
        let id = Mat::identity(self.field, self.rows);
        let x = self - &id;
        let distance = x.norm();
        if distance >= 0.5 {
            return Err(Error::LogOutOfRange { distance });
        }
        let mut result = Mat::zeros(self.field, self.rows, self.cols);
        let mut power = id;
        for m in 1..200 {
            power = &power * &x;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let term = power.scale(sign / m as f64);
            result = &result + &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        Ok(result)
    }
}

/// `a* b` for two column vectors (a single scalar).
pub fn column_dot(a: &Mat, b: &Mat) -> Quat {
    debug_assert_eq!(a.cols, 1);
    debug_assert_eq!(b.cols, 1);
    (0..a.rows).fold(Quat::ZERO, |acc, r| acc + a[(r, 0)].conj() * b[(r, 0)])
}

impl Index<(usize, usize)> for Mat {
    type Output = Quat;
    fn index(&self, (i, j): (usize, usize)) -> &Quat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&Mat> for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl Add<&Mat> for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.try_add(rhs).expect("matrix sum")
    }
}

impl Sub<&Mat> for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.try_sub(rhs).expect("matrix difference")
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|a| -a)
    }
}
