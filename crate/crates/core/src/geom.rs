//! Minimal 3D vector and triangle helpers.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point or vector in R³ (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = vec3(0.0, 0.0, 0.0);

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize zero vector");
        self * (1.0 / n)
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        vec3(self.x + o.x, self.y + o.y, self.z + o.z)
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
        vec3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        vec3(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        vec3(-self.x, -self.y, -self.z)
    }
}

/// Twice the signed area vector (cross product of two edges).
pub fn triangle_area_vector(v: [Vec3; 3]) -> Vec3 {
    (v[1] - v[0]).cross(v[2] - v[0])
}

pub fn triangle_area(v: [Vec3; 3]) -> f64 {
    0.5 * triangle_area_vector(v).norm()
}

/// Unit normal by the right-hand rule on the vertex ordering.
pub fn triangle_normal(v: [Vec3; 3]) -> Vec3 {
    triangle_area_vector(v).normalized()
}

pub fn triangle_centroid(v: [Vec3; 3]) -> Vec3 {
    (v[0] + v[1] + v[2]) * (1.0 / 3.0)
}

/// Circumradius, used for near-pair quadrature decisions.
pub fn triangle_circumradius(v: [Vec3; 3]) -> f64 {
    let a = (v[1] - v[2]).norm();
    let b = (v[0] - v[2]).norm();
    let c = (v[0] - v[1]).norm();
    let area = triangle_area(v);
    if area <= 0.0 {
        return f64::INFINITY;
    }
    a * b * c / (4.0 * area)
}

/// Map barycentric coordinates (weights of v1 and v2 relative to v0) to 3D.
pub fn triangle_point(v: [Vec3; 3], s: f64, t: f64) -> Vec3 {
    v[0] + (v[1] - v[0]) * s + (v[2] - v[0]) * t
}
