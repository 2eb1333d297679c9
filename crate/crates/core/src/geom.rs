//! Small 3D vector toolkit shared by every module.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{GordianError, Result};

/// A point (or free vector) in R^3, in units of the tube radius.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    #[inline]
    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unsigned angle between two nonzero vectors, robust near 0 and pi.
    pub fn angle_to(self, o: Point3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(self) -> Point3 {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Point3::new(1.0, 0.0, 0.0)
        } else if self.y.abs() <= self.z.abs() {
            Point3::new(0.0, 1.0, 0.0)
        } else {
            Point3::new(0.0, 0.0, 1.0)
        };
        self.cross(a).normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0))
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Point3 {
    #[inline]
    fn sub_assign(&mut self, o: Point3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Row-major 3x3 matrix, used for rotations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Rotation by `angle` radians about `axis` (Rodrigues).
    pub fn rotation(axis: Point3, angle: f64) -> Mat3 {
        let k = axis.normalized().unwrap_or(Point3::new(0.0, 0.0, 1.0));
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Mat3([
            [t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y],
            [t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x],
            [t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c],
        ])
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let m = &self.0;
        Point3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        )
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }
}

/// `x -> scale * R x + translation`, with `scale > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    rotation: Mat3,
    translation: Point3,
    scale: f64,
}

impl Similarity {
    pub fn new(rotation: Mat3, translation: Point3, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(GordianError::InvalidArgument(format!(
                "similarity scale must be positive, got {scale}"
            )));
        }
        Ok(Similarity {
            rotation,
            translation,
            scale,
        })
    }

    pub fn identity() -> Self {
        Similarity {
            rotation: Mat3::IDENTITY,
            translation: Point3::ORIGIN,
            scale: 1.0,
        }
    }

    pub fn scaling(scale: f64) -> Result<Self> {
        Similarity::new(Mat3::IDENTITY, Point3::ORIGIN, scale)
    }

    pub fn translation(t: Point3) -> Self {
        Similarity {
            rotation: Mat3::IDENTITY,
            translation: t,
            scale: 1.0,
        }
    }

    pub fn rotation(axis: Point3, angle: f64) -> Self {
        Similarity {
            rotation: Mat3::rotation(axis, angle),
            translation: Point3::ORIGIN,
            scale: 1.0,
        }
    }

    /// The dilation `v -> 2v / (2 - delta)` used when fattening a curve that
    /// nearly satisfies a distance-two condition. Requires `delta < 2`.
    pub fn dilation(delta: f64) -> Result<Self> {
        if delta.is_nan() || delta >= 2.0 {
            return Err(GordianError::InvalidArgument(format!(
                "dilation parameter must be < 2, got {delta}"
            )));
        }
        Similarity::scaling(2.0 / (2.0 - delta))
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.rotation.apply(p) * self.scale + self.translation
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Similarity) -> Similarity {
        Similarity {
            rotation: self.rotation.mul(&first.rotation),
            translation: self.apply(first.translation),
            scale: self.scale * first.scale,
        }
    }
}

/// Closest points between segments `[p0,p1]` and `[q0,q1]`.
/// Returns `(distance, s, t)` with the closest points at `p0 + s(p1-p0)` and `q0 + t(q1-q0)`.
pub fn segment_segment(p0: Point3, p1: Point3, q0: Point3, q1: Point3) -> (f64, f64, f64) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(r);
    const EPS: f64 = 1e-300;
    let (s, t);
    if a <= EPS && e <= EPS {
        return (r.norm(), 0.0, 0.0);
    }
    if a <= EPS {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= EPS {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-14 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let cp = p0 + d1 * s;
    let cq = q0 + d2 * t;
    (cp.dist(cq), s, t)
}

/// Distance from `p` to segment `[a,b]` and the clamped parameter of the foot point.
pub fn point_segment(p: Point3, a: Point3, b: Point3) -> (f64, f64) {
    let d = b - a;
    let l2 = d.norm_sq();
    let t = if l2 > 0.0 { ((p - a).dot(d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    ((a + d * t).dist(p), t)
}

/// Closest point to `p` on the triangle `abc`.
pub fn closest_point_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Neumaier-compensated running sum; deterministic for a fixed input order.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::default();
        for v in iter {
            k.add(v);
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_parallel_and_skew() {
        let (d, _, _) = segment_segment(
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 2.0, 0.0),
            Point3::new(1.0, 2.0, 0.0),
        );
        assert!((d - 2.0).abs() < 1e-15);
        let (d, s, t) = segment_segment(
            Point3::new(-1.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, -1.0, 3.0),
            Point3::new(0.0, 1.0, 3.0),
        );
        assert!((d - 3.0).abs() < 1e-15);
        assert!((s - 0.5).abs() < 1e-15 && (t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn segment_distance_endpoint_case() {
        let (d, s, t) = segment_segment(
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 1.0, 0.0),
            Point3::new(3.0, 5.0, 0.0),
        );
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!((s, t), (1.0, 0.0));
    }

    #[test]
    fn dilation_maps_unit_x_to_two() {
        let l = Similarity::dilation(1.0).unwrap();
        assert_eq!(l.apply(Point3::new(1.0, 0.0, 0.0)), Point3::new(2.0, 0.0, 0.0));
        let id = Similarity::dilation(0.0).unwrap();
        let v = Point3::new(0.3, -2.0, 7.5);
        assert_eq!(id.apply(v), v);
        assert!(Similarity::dilation(2.0).is_err());
    }

    #[test]
    fn rotation_preserves_norm() {
        let r = Mat3::rotation(Point3::new(1.0, 2.0, 3.0), 0.7);
        let v = Point3::new(-0.4, 1.1, 2.5);
        assert!((r.apply(v).norm() - v.norm()).abs() < 1e-14);
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        let k: KahanSum = vals.iter().copied().collect();
        assert_eq!(k.value(), 2.0);
    }

    #[test]
    fn triangle_closest_point_regions() {
        let (a, b, c) = (Point3::ORIGIN, Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0));
        assert_eq!(
            closest_point_triangle(Point3::new(0.5, 0.5, 3.0), a, b, c),
            Point3::new(0.5, 0.5, 0.0)
        );
        assert_eq!(closest_point_triangle(Point3::new(-1.0, -1.0, 0.0), a, b, c), a);
        assert_eq!(
            closest_point_triangle(Point3::new(1.0, -1.0, 1.0), a, b, c),
            Point3::new(1.0, 0.0, 0.0)
        );
        let q = closest_point_triangle(Point3::new(2.0, 2.0, 0.0), a, b, c);
        assert!(q.dist(Point3::new(1.0, 1.0, 0.0)) < 1e-12);
    }
}
