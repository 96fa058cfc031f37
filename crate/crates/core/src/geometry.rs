//! Small vector helpers shared by the mesh, shape and FEM code.

use nalgebra::{Matrix3, Point3, Vector3};

pub type Point = Point3<f64>;
pub type Vec3 = Vector3<f64>;

/// Signed volume of the tetrahedron `abcd` (positive for right-handed order).
pub fn signed_volume(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    (b - a).dot(&(c - a).cross(&(d - a))) / 6.0
}

pub fn volume(p: &[Point; 4]) -> f64 {
    signed_volume(&p[0], &p[1], &p[2], &p[3]).abs()
}

/// Affine combination `(1 - t) a + t b`.
pub fn lerp(a: &Point, b: &Point, t: f64) -> Point {
    Point::from(a.coords * (1.0 - t) + b.coords * t)
}

/// Angle at `apex` between the rays to `p` and `q`, accurate near 0 and pi.
pub fn angle(apex: &Point, p: &Point, q: &Point) -> f64 {
    let u = p - apex;
    let v = q - apex;
    u.cross(&v).norm().atan2(u.dot(&v))
}

pub fn point_to_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - lerp(a, b, t)).norm()
}

/// Distance from `p` to the infinite line through `a` and `b`.
pub fn point_to_line_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let dir = (b - a).normalize();
    let r = p - a;
    (r - dir * r.dot(&dir)).norm()
}

/// Barycentric coordinates of `p` with respect to the tetrahedron `v`.
pub fn barycentric(v: &[Point; 4], p: &Point) -> Option<[f64; 4]> {
    let m = Matrix3::from_columns(&[v[1] - v[0], v[2] - v[0], v[3] - v[0]]);
    let l = m.lu().solve(&(p - v[0]))?;
    Some([1.0 - l.x - l.y - l.z, l.x, l.y, l.z])
}

/// Longest edge of a tetrahedron.
pub fn diameter(p: &[Point; 4]) -> f64 {
    let mut h: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            h = h.max((p[i] - p[j]).norm());
        }
    }
    h
}

/// The six local edges of a tetrahedron in `x01, x02, x03, x12, x13, x23` order.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Local faces, each listed by the three vertices it keeps.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_tet_volume() {
        let p = [
            Point::origin(),
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
            Point::new(0.0, 0.0, 1.0),
        ];
        assert_relative_eq!(volume(&p), 1.0 / 6.0);
        assert!(signed_volume(&p[0], &p[1], &p[2], &p[3]) > 0.0);
    }

    #[test]
    fn near_straight_angle() {
        let a = Point::new(-1.0, 0.0, 0.0);
        let b = Point::new(1.0, 1e-9, 0.0);
        let ang = angle(&Point::origin(), &a, &b);
        assert!((std::f64::consts::PI - ang).abs() < 1e-8);
    }

    #[test]
    fn segment_distance_clamps() {
        let a = Point::origin();
        let b = Point::new(0.0, 0.0, 1.0);
        assert_relative_eq!(point_to_segment_distance(&Point::new(1.0, 0.0, 0.5), &a, &b), 1.0);
        assert_relative_eq!(point_to_segment_distance(&Point::new(0.0, 0.0, 3.0), &a, &b), 2.0);
        assert_relative_eq!(point_to_line_distance(&Point::new(0.0, 1.0, 3.0), &a, &b), 1.0);
    }

    #[test]
    fn barycentric_recovers_vertex() {
        let p = [
            Point::origin(),
            Point::new(2.0, 0.0, 0.0),
            Point::new(0.0, 2.0, 0.0),
            Point::new(0.0, 0.0, 2.0),
        ];
        let l = barycentric(&p, &Point::new(2.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(l[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(l[0] + l[2] + l[3], 0.0, epsilon = 1e-15);
    }
}
