use core::fmt;
use core::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

/// Cartesian vector in atomic units.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E_X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const E_Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const E_Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// The unit vector along axis `i` (0, 1 or 2).
    pub fn axis(i: usize) -> Self {
        match i {
            0 => Self::E_X,
            1 => Self::E_Y,
            2 => Self::E_Z,
            _ => panic!("axis index {i} out of range"),
        }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        libm::fabs(self.x).max(libm::fabs(self.y)).max(libm::fabs(self.z))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("component index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// 3x3 matrix stored as rows; used for the Jacobian `d A_i / d x_j` and for
/// Hessians of gauge generators.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat3 {
    pub rows: [Vec3; 3],
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3 {
        rows: [Vec3::ZERO, Vec3::ZERO, Vec3::ZERO],
    };

    pub const fn from_rows(rows: [Vec3; 3]) -> Self {
        Mat3 { rows }
    }

    /// Build from columns, i.e. from the three partial derivatives of a vector field.
    pub fn from_columns(c: [Vec3; 3]) -> Self {
        Mat3::from_rows([
            Vec3::new(c[0].x, c[1].x, c[2].x),
            Vec3::new(c[0].y, c[1].y, c[2].y),
            Vec3::new(c[0].z, c[1].z, c[2].z),
        ])
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    /// `M^T v`, i.e. `sum_i v_i * row_i`.
    pub fn transpose_mul(&self, v: Vec3) -> Vec3 {
        self.rows[0] * v.x + self.rows[1] * v.y + self.rows[2] * v.z
    }

    /// Curl of the vector field whose Jacobian this is.
    pub fn curl(&self) -> Vec3 {
        Vec3::new(
            self.entry(2, 1) - self.entry(1, 2),
            self.entry(0, 2) - self.entry(2, 0),
            self.entry(1, 0) - self.entry(0, 1),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().all(|r| r.is_finite())
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        Mat3::from_rows([
            self.rows[0] + o.rows[0],
            self.rows[1] + o.rows[1],
            self.rows[2] + o.rows[2],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_of_basis_vectors() {
        assert_eq!(Vec3::E_X.cross(Vec3::E_Y), Vec3::E_Z);
        assert_eq!(Vec3::E_Y.cross(Vec3::E_Z), Vec3::E_X);
    }

    #[test]
    fn curl_of_rotation_field() {
        // A = (-y, x, 0) has curl (0, 0, 2)
        let jac = Mat3::from_rows([Vec3::new(0.0, -1.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO]);
        assert_eq!(jac.curl(), Vec3::new(0.0, 0.0, 2.0));
    }

    #[test]
    fn columns_and_rows_agree() {
        let m = Mat3::from_columns([Vec3::new(1.0, 2.0, 3.0), Vec3::ZERO, Vec3::E_Z]);
        assert_eq!(m.entry(1, 0), 2.0);
        assert_eq!(m.entry(2, 2), 1.0);
        assert_eq!(m.transpose_mul(Vec3::E_Y), Vec3::new(2.0, 0.0, 0.0));
    }
}
