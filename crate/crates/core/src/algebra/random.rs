//! Seeded random generators for matrices over R, C and H.

use rand::Rng;

use super::mat::Mat;
use super::scalar::{Field, Quat};

/// Entries uniform in `[-1, 1]` on each real component the field allows.
pub fn random_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Quat {
    let mut c = [0.0; 4];
    for v in c.iter_mut().take(field.dim()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    Quat::new(c[0], c[1], c[2], c[3])
}

pub fn random_mat<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(field, rows, cols, |_, _| random_scalar(field, rng))
}

pub fn random_anti_hermitian<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Mat {
    let m = random_mat(field, n, n, rng);
    (&m - &m.adjoint()).scale(0.5)
}

/// A random element of O(n), U(n) or Sp(n) (orthonormalized random matrix).
pub fn random_unitary<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Mat {
    loop {
        if let Ok(q) = random_mat(field, n, n, rng).orthonormalize() {
            return q;
        }
    }
}

/// Unit imaginary scalar of the field (`i` or a point of the unit sphere in `Im H`).
pub fn random_unit_imaginary<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Quat {
    match field {
        Field::Real => panic!("R has no imaginary units"),
        Field::Complex => {
            if rng.gen_bool(0.5) {
                Quat::I
            } else {
                -Quat::I
            }
        }
        Field::Quaternion => loop {
            let q = Quat::imaginary(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = q.norm();
            if n > 0.1 && n <= 1.0 {
                return q.scale(1.0 / n);
            }
        },
    }
}

/// Random unit vector in `R^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
