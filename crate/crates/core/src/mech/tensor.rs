//! Symmetric second-order tensors in plane strain with the out-of-plane
//! component carried explicitly.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Components (xx, yy, zz, xy). `xy` is the tensor component, not the
/// engineering shear strain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Sym(pub [f64; 4]);

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

impl Sym {
    pub const ZERO: Sym = Sym([0.0; 4]);

    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64) -> Self {
        Sym([xx, yy, zz, xy])
    }

    pub fn iso(v: f64) -> Self {
        Sym([v, v, v, 0.0])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn dev(&self) -> Self {
        let m = self.trace() / 3.0;
        Sym([self.0[0] - m, self.0[1] - m, self.0[2] - m, self.0[3]])
    }

    /// Double contraction a : b.
    pub fn ddot(&self, o: &Sym) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2] + 2.0 * self.0[3] * o.0[3]
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// von Mises equivalent sqrt(3/2 s:s).
    pub fn von_mises(&self) -> f64 {
        let s = self.dev();
        (1.5 * s.ddot(&s)).sqrt()
    }

    pub fn mandel(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], SQRT2 * self.0[3]]
    }

    pub fn from_mandel(v: [f64; 4]) -> Self {
        Sym([v[0], v[1], v[2], v[3] / SQRT2])
    }

    /// Components in a frame rotated by `angle` (first axis along
    /// (cos, sin)). Returns (11, 22, 33, 12).
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let [xx, yy, zz, xy] = self.0;
        Sym([
            c * c * xx + s * s * yy + 2.0 * s * c * xy,
            s * s * xx + c * c * yy - 2.0 * s * c * xy,
            zz,
            -s * c * xx + s * c * yy + (c * c - s * s) * xy,
        ])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for Sym {
    type Output = Sym;
    fn add(self, o: Sym) -> Sym {
        Sym([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for Sym {
    type Output = Sym;
    fn sub(self, o: Sym) -> Sym {
        Sym([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

impl Neg for Sym {
    type Output = Sym;
    fn neg(self) -> Sym {
        Sym(self.0.map(|v| -v))
    }
}

impl Mul<Sym> for f64 {
    type Output = Sym;
    fn mul(self, o: Sym) -> Sym {
        Sym(o.0.map(|v| self * v))
    }
}

impl AddAssign for Sym {
    fn add_assign(&mut self, o: Sym) {
        *self = *self + o;
    }
}

impl SubAssign for Sym {
    fn sub_assign(&mut self, o: Sym) {
        *self = *self - o;
    }
}
