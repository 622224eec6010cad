use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The scalar field a Grassmannian is built over.
///
/// All three fields share one storage type, [`Quat`]; a real scalar only uses
/// `w`, a complex one `w` and `x`. Column vectors are always scaled on the
/// right, which is what quaternionic linearity requires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

impl Field {
    /// Real dimension of the field.
    pub fn dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
        }
    }

    /// Real basis of the field, starting with 1.
    pub fn real_basis(self) -> &'static [Quat] {
        const BASIS: [Quat; 4] = [Quat::ONE, Quat::I, Quat::J, Quat::K];
        &BASIS[..self.dim()]
    }

    /// Orthonormal basis of the imaginary part (empty for `Real`).
    pub fn imaginary_units(self) -> &'static [Quat] {
        &self.real_basis()[1..]
    }

    /// Whether `q` has no components outside this field.
    pub fn contains(self, q: Quat) -> bool {
        match self {
            Field::Real => q.x == 0.0 && q.y == 0.0 && q.z == 0.0,
            Field::Complex => q.y == 0.0 && q.z == 0.0,
            Field::Quaternion => true,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Field::Real => "r",
            Field::Complex => "c",
            Field::Quaternion => "h",
        }
    }

    pub fn parse(s: &str) -> Result<Field> {
        match s.to_ascii_lowercase().as_str() {
            "r" | "real" => Ok(Field::Real),
            "c" | "complex" => Ok(Field::Complex),
            "h" | "q" | "quaternion" => Ok(Field::Quaternion),
            other => Err(Error::InvalidParameter(format!("unknown field `{other}`"))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Field::Real => "R",
            Field::Complex => "C",
            Field::Quaternion => "H",
        };
        f.write_str(name)
    }
}

/// A quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quat::new(w, 0.0, 0.0, 0.0)
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Quat::new(re, im, 0.0, 0.0)
    }

    /// `cos(t) + sin(t) i`
    pub fn cis(t: f64) -> Self {
        Quat::complex(t.cos(), t.sin())
    }

    pub fn conj(self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part as a quaternion with zero real part.
    pub fn im(self) -> Self {
        Quat::new(0.0, self.x, self.y, self.z)
    }

    pub fn scale(self, s: f64) -> Self {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    /// Real inner product of the underlying `R^4` vectors, `Re(conj(self) * other)`.
    pub fn dot(self, other: Quat) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit imaginary quaternion from imaginary coefficients on `(i, j, k)`.
    pub fn imaginary(a: f64, b: f64, c: f64) -> Self {
        Quat::new(0.0, a, b, c)
    }

    /// Logarithm of a unit quaternion; returns a pure imaginary quaternion.
    pub fn ln_unit(self) -> Self {
        let v = self.im();
        let s = v.norm();
        if s == 0.0 {
            return Quat::ZERO;
        }
        let angle = s.atan2(self.w);
        v.scale(angle / s)
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, o: Quat) {
        *self = *self + o;
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quat {
    fn sub_assign(&mut self, o: Quat) {
        *self = *self - o;
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        self.scale(s)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

/// A scalar tagged with its field; arithmetic refuses to mix fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalar {
    pub field: Field,
    pub value: Quat,
}

impl Scalar {
    pub fn new(field: Field, value: Quat) -> Result<Self> {
        if !field.contains(value) {
            return Err(Error::FieldMismatch {
                expected: field,
                found: "value with components outside the field".into(),
            });
        }
        Ok(Scalar { field, value })
    }

    /// Field multiplication, order preserved.
    pub fn mul(self, other: Scalar) -> Result<Scalar> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field,
                found: other.field.to_string(),
            });
        }
        Ok(Scalar {
            field: self.field,
            value: self.value * other.value,
        })
    }

    pub fn conj(self) -> Scalar {
        Scalar {
            field: self.field,
            value: self.value.conj(),
        }
    }

    pub fn abs(self) -> f64 {
        self.value.norm()
    }
}
