//! Grading exponents, distances to the singular set, the neighbourhood
//! decomposition of the domain and anisotropic weighted seminorms.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{gradients, FEFunction};
use crate::geometry::{self, Point, Vec3};
use crate::mesh::Mesh;
use crate::quadrature::collapsed_rule;
use crate::shape::EdgeFrame;
use crate::singular::{SingularEntity, SingularSet};

/// `kappa = 2^(-m/a)` for `a` in `(0, m]`.
pub fn kappa_from_a(a: f64, m: u32) -> Result<f64> {
    if m == 0 || !(a > 0.0 && a <= m as f64) {
        return Err(Error::OutOfRange {
            what: "a",
            value: a,
            range: "(0, m]",
        });
    }
    Ok((-(m as f64) / a).exp2())
}

/// Inverse of [`kappa_from_a`]: `a = -m / log2(kappa)`.
pub fn a_from_kappa(kappa: f64, m: u32) -> Result<f64> {
    if m == 0 || !(kappa > 0.0 && kappa <= 0.5) {
        return Err(Error::OutOfRange {
            what: "kappa",
            value: kappa,
            range: "(0, 1/2]",
        });
    }
    Ok(-(m as f64) / kappa.log2())
}

/// `(a_ev, a_V)` for a vertex with exponent `a_v` and incident edge exponents `a_e`.
pub fn compute_a_v(a_v: f64, a_e: &[f64], m: u32) -> (f64, f64) {
    let a_ev = a_e.iter().copied().fold(a_v, f64::min);
    let big = (m as f64 + 1.0) * (1.0 - a_ev / a_v) + a_ev;
    (a_ev, big)
}

/// One exponent per singular entity plus the polynomial degree.
#[derive(Clone, Debug, PartialEq)]
pub struct GradingExponents {
    pub a: Vec<f64>,
    pub m: u32,
}

impl GradingExponents {
    pub fn new(a: Vec<f64>, m: u32) -> Result<Self> {
        for &x in &a {
            kappa_from_a(x, m)?;
        }
        Ok(GradingExponents { a, m })
    }

    pub fn from_kappas(kappa: &[f64], m: u32) -> Result<Self> {
        let a = kappa.iter().map(|&k| a_from_kappa(k, m)).collect::<Result<_>>()?;
        Ok(GradingExponents { a, m })
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.a.iter().map(|&a| kappa_from_a(a, self.m).expect("validated")).collect()
    }

    /// `(a_ev, a_V)` of singular vertex `v`.
    pub fn vertex(&self, s: &SingularSet, v: usize) -> (f64, f64) {
        let a_e: Vec<f64> = s.edges_of_vertex(v).iter().map(|&e| self.a[e]).collect();
        compute_a_v(self.a[v], &a_e, self.m)
    }
}

/// Distance to a vertex, or to the line carrying an edge.
pub fn distance_rho(p: &Point, entity: &SingularEntity) -> Result<f64> {
    let d = match entity {
        SingularEntity::Vertex(v) => (p - v).norm(),
        SingularEntity::Edge(a, b) => geometry::point_to_line_distance(p, a, b),
    };
    if d == 0.0 {
        return Err(Error::AtSingularity);
    }
    Ok(d)
}

/// `rho_e / rho_v`.
pub fn angular_distance(p: &Point, v: &Point, e: (&Point, &Point)) -> Result<f64> {
    let rv = (p - v).norm();
    if rv == 0.0 {
        return Err(Error::AtSingularity);
    }
    Ok(geometry::point_to_line_distance(p, e.0, e.1) / rv)
}

/// Region of the neighbourhood decomposition, with entity indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionTag {
    VertexCore { v: usize },
    EdgeNearVertex { v: usize, e: usize },
    EdgeCore { e: usize },
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radii {
    pub vertex: f64,
    pub edge: f64,
    /// Bound on `rho_{e,v}` inside the sector around an edge.
    pub aperture: f64,
}

fn segment_distance(p0: &Point, p1: &Point, q0: &Point, q1: &Point) -> f64 {
    let (d1, d2, r) = (p1 - p0, q1 - q0, p0 - q0);
    let (a, e, f) = (d1.norm_squared(), d2.norm_squared(), d2.dot(&r));
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-14 * a * e {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Splits the domain into vertex balls, edge sectors near vertices, edge
/// cylinders and the rest.
#[derive(Clone, Debug)]
pub struct Regions {
    singular: SingularSet,
    radii: Radii,
}

impl Regions {
    /// Vertex balls of a third of the closest vertex pair, edge cylinders of a
    /// third of the closest disjoint edge pair, aperture 1/2. Without such pairs
    /// a third of the shortest singular edge is used.
    pub fn new(s: &SingularSet) -> Result<Self> {
        let third_min = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min) / 3.0;
        let shortest_edge = third_min(&mut s.edge_indices().map(|e| {
            let (a, b) = s.edge_points(e);
            (b - a).norm()
        }));
        let mut vertex = third_min(&mut s.vertex_indices().flat_map(|v| {
            (v + 1..s.num_vertices()).map(move |w| (s.vertex_point(v) - s.vertex_point(w)).norm())
        }));
        if vertex.is_infinite() {
            vertex = shortest_edge;
        }
        let edges: Vec<usize> = s.edge_indices().collect();
        let mut edge = f64::INFINITY;
        for (i, &e) in edges.iter().enumerate() {
            for &f in &edges[i + 1..] {
                let (a, b) = s.edge_points(e);
                let (c, d) = s.edge_points(f);
                let shared = [a, b].iter().any(|p| [c, d].iter().any(|q| (*p - *q).norm() < 1e-12));
                if !shared {
                    edge = edge.min(segment_distance(a, b, c, d) / 3.0);
                }
            }
        }
        if edge.is_infinite() {
            edge = shortest_edge;
        }
        let fallback = |r: f64| if r.is_finite() { r } else { 1.0 };
        Regions::with_radii(
            s,
            Radii {
                vertex: fallback(vertex),
                edge: fallback(edge),
                aperture: 0.5,
            },
        )
    }

    pub fn with_radii(s: &SingularSet, radii: Radii) -> Result<Self> {
        if !(radii.vertex > 0.0 && radii.edge > 0.0 && radii.aperture > 0.0) {
            return Err(Error::ConfigError(format!("radii must be positive: {radii:?}")));
        }
        for v in s.vertex_indices() {
            for w in s.vertex_indices().filter(|&w| w != v) {
                if (s.vertex_point(v) - s.vertex_point(w)).norm() <= radii.vertex {
                    return Err(Error::ConfigError(format!(
                        "ball of radius {} around vertex {v} contains vertex {w}",
                        radii.vertex
                    )));
                }
            }
        }
        Ok(Regions {
            singular: s.clone(),
            radii,
        })
    }

    pub fn radii(&self) -> Radii {
        self.radii
    }

    pub fn singular(&self) -> &SingularSet {
        &self.singular
    }

    pub fn classify(&self, p: &Point) -> RegionTag {
        let s = &self.singular;
        for v in s.vertex_indices() {
            let x = s.vertex_point(v);
            let rv = (p - x).norm();
            if rv >= self.radii.vertex {
                continue;
            }
            let near = s
                .edges_of_vertex(v)
                .iter()
                .map(|&e| {
                    let (a, b) = s.edge_points(e);
                    (e, angular_distance(p, x, (a, b)).unwrap_or(0.0))
                })
                .min_by(|a, b| a.1.total_cmp(&b.1));
            return match near {
                Some((e, r)) if r < self.radii.aperture => RegionTag::EdgeNearVertex { v, e },
                _ => RegionTag::VertexCore { v },
            };
        }
        let near = s
            .edge_indices()
            .map(|e| {
                let (a, b) = s.edge_points(e);
                (e, geometry::point_to_segment_distance(p, a, b))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match near {
            Some((e, d)) if d < self.radii.edge => RegionTag::EdgeCore { e },
            _ => RegionTag::Interior,
        }
    }

    fn nearest_edge(&self, p: &Point) -> Option<usize> {
        let s = &self.singular;
        s.edge_indices().min_by(|&e, &f| {
            let d = |e| {
                let (a, b) = s.edge_points(e);
                geometry::point_to_segment_distance(p, a, b)
            };
            d(e).total_cmp(&d(f))
        })
    }

    fn frame(&self, e: usize) -> EdgeFrame {
        let (a, b) = self.singular.edge_points(e);
        let d = b - a;
        // Any direction off the edge fixes the transverse axes.
        let off = if d.x.abs() <= d.y.abs() && d.x.abs() <= d.z.abs() {
            Vec3::x()
        } else if d.y.abs() <= d.z.abs() {
            Vec3::y()
        } else {
            Vec3::z()
        };
        EdgeFrame::new(a, b, &(a + off)).expect("singular edges have positive length")
    }
}

/// One exponent `mu` per singular entity.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

/// Value, gradient and Hessian at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: Matrix3<f64>,
}

/// Something that can be differentiated at quadrature points.
pub trait Field: Sync {
    /// Highest derivative order available.
    fn max_order(&self) -> usize;

    /// Derivatives at `p`, which lies in tet `tet` with barycentric coordinates `lambda`.
    fn jet(&self, mesh: &Mesh, tet: usize, lambda: &[f64; 4], p: &Point) -> Jet;

    /// Mesh the field is tied to, if any.
    fn mesh(&self) -> Option<&Mesh> {
        None
    }
}

impl Field for FEFunction {
    fn max_order(&self) -> usize {
        1
    }

    fn jet(&self, mesh: &Mesh, tet: usize, lambda: &[f64; 4], _p: &Point) -> Jet {
        let t = &mesh.tets[tet];
        let (g, _) = gradients(&mesh.tet_points_of(t)).expect("non-degenerate tet");
        let c = t.verts.map(|v| self.coeffs[v as usize]);
        Jet {
            value: (0..4).map(|k| lambda[k] * c[k]).sum(),
            gradient: (0..4).map(|k| g[k] * c[k]).sum(),
            hessian: Matrix3::zeros(),
        }
    }

    fn mesh(&self) -> Option<&Mesh> {
        Some(&self.mesh)
    }
}

/// A closed-form function with exact derivatives up to second order.
pub struct Analytic<F>(pub F);

impl<F> Field for Analytic<F>
where
    F: Fn(&Point) -> Jet + Sync,
{
    fn max_order(&self) -> usize {
        2
    }

    fn jet(&self, _: &Mesh, _: usize, _: &[f64; 4], p: &Point) -> Jet {
        (self.0)(p)
    }
}

/// Weighted squares of all multi-index derivatives of order `0..=m`, with
/// the transverse count of each index taken in `frame` (`ez` along the edge).
fn weighted_squares(j: &Jet, m: usize, frame: Option<&EdgeFrame>, weight: impl Fn(usize, usize) -> f64, out: &mut [f64]) {
    out[0] += (weight(0, 0) * j.value).powi(2);
    let r = frame.map_or(Matrix3::identity(), |f| Matrix3::from_rows(&[f.ex.transpose(), f.ey.transpose(), f.ez.transpose()]));
    if m >= 1 {
        let g = r * j.gradient;
        for i in 0..3 {
            let perp = usize::from(i < 2);
            out[1] += (weight(1, perp) * g[i]).powi(2);
        }
    }
    if m >= 2 {
        let h = r * j.hessian * r.transpose();
        for i in 0..3 {
            for k in i..3 {
                let perp = usize::from(i < 2) + usize::from(k < 2);
                out[2] += (weight(2, perp) * h[(i, k)]).powi(2);
            }
        }
    }
}

/// Evaluates the anisotropic weighted norm on a mesh by quadrature.
#[derive(Clone, Debug)]
pub struct WeightedNorm<'a> {
    pub regions: &'a Regions,
    pub mu: &'a WeightVector,
    /// Polynomial exactness of the per-tet rule.
    pub quad_order: usize,
}

impl<'a> WeightedNorm<'a> {
    pub fn new(regions: &'a Regions, mu: &'a WeightVector) -> Self {
        WeightedNorm {
            regions,
            mu,
            quad_order: 4,
        }
    }

    pub fn with_order(self, quad_order: usize) -> Self {
        WeightedNorm { quad_order, ..self }
    }

    /// Squared contributions of the derivatives of each order `0..=m`.
    pub fn parts(&self, u: &dyn Field, mesh: &Mesh, m: usize) -> Result<Vec<f64>> {
        if m > u.max_order() || m > 2 {
            return Err(Error::UnsupportedOrder(m));
        }
        if u.mesh().is_some_and(|um| !std::ptr::eq(um, mesh)) {
            return Err(Error::MeshMismatch);
        }
        let s = self.regions.singular();
        if self.mu.0.len() != s.len() {
            return Err(Error::ConfigError(format!(
                "{} weights for {} singular entities",
                self.mu.0.len(),
                s.len()
            )));
        }
        let frames: Vec<Option<EdgeFrame>> = (0..s.len())
            .map(|e| (!s.is_vertex(e)).then(|| self.regions.frame(e)))
            .collect();
        let rule = collapsed_rule(self.quad_order);
        let per_tet: Vec<Vec<f64>> = (0..mesh.num_tets())
            .into_par_iter()
            .map(|t| {
                let p = mesh.tet_points(t);
                let vol6 = 6.0 * geometry::volume(&p);
                let mut acc = vec![0.0; m + 1];
                let mut sq = vec![0.0; m + 1];
                for (l, w) in &rule {
                    let x = Point::from(
                        p[0].coords * l[0] + p[1].coords * l[1] + p[2].coords * l[2] + p[3].coords * l[3],
                    );
                    let jet = u.jet(mesh, t, l, &x);
                    sq.iter_mut().for_each(|v| *v = 0.0);
                    let frame = self.regions.nearest_edge(&x).and_then(|e| frames[e].as_ref());
                    match self.regions.classify(&x) {
                        RegionTag::Interior => weighted_squares(&jet, m, frame, |_, _| 1.0, &mut sq),
                        RegionTag::VertexCore { v } => {
                            let rv = (x - s.vertex_point(v)).norm();
                            weighted_squares(&jet, m, frame, |k, _| rv.powf(k as f64 - self.mu.0[v]), &mut sq)
                        }
                        RegionTag::EdgeCore { e } => {
                            let (a, b) = s.edge_points(e);
                            let re = geometry::point_to_line_distance(&x, a, b);
                            weighted_squares(&jet, m, frames[e].as_ref(), |_, kp| re.powf(kp as f64 - self.mu.0[e]), &mut sq)
                        }
                        RegionTag::EdgeNearVertex { v, e } => {
                            let (a, b) = s.edge_points(e);
                            let rv = (x - s.vertex_point(v)).norm();
                            let rev = geometry::point_to_line_distance(&x, a, b) / rv;
                            let (mv, me) = (self.mu.0[v], self.mu.0[e]);
                            weighted_squares(
                                &jet,
                                m,
                                frames[e].as_ref(),
                                |k, kp| rv.powf(k as f64 - mv) * rev.powf(kp as f64 - me),
                                &mut sq,
                            )
                        }
                    }
                    for k in 0..=m {
                        acc[k] += w * vol6 * sq[k];
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![0.0; m + 1];
        for t in per_tet {
            for k in 0..=m {
                total[k] += t[k];
            }
        }
        Ok(total)
    }

    /// Weighted seminorm over derivatives of order exactly `m`.
    pub fn seminorm(&self, u: &dyn Field, mesh: &Mesh, m: usize) -> Result<f64> {
        Ok(self.parts(u, mesh, m)?[m].sqrt())
    }

    /// Full weighted norm over orders `0..=m`.
    pub fn norm(&self, u: &dyn Field, mesh: &Mesh, m: usize) -> Result<f64> {
        Ok(self.parts(u, mesh, m)?.iter().sum::<f64>().sqrt())
    }
}

/// Weighted seminorm of order `m` with the default order-4 quadrature.
pub fn weighted_seminorm(u: &dyn Field, mesh: &Mesh, regions: &Regions, mu: &WeightVector, m: usize) -> Result<f64> {
    WeightedNorm::new(regions, mu).seminorm(u, mesh, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_and_a() {
        assert_eq!(kappa_from_a(1.0, 1).unwrap(), 0.5);
        assert!((kappa_from_a(2.0 / 3.0, 1).unwrap() - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!((kappa_from_a(0.576, 1).unwrap() - 0.3).abs() < 1e-3);
        assert!(matches!(kappa_from_a(0.0, 1), Err(Error::OutOfRange { .. })));
        assert!(matches!(kappa_from_a(1.5, 1), Err(Error::OutOfRange { .. })));
        assert!(matches!(a_from_kappa(0.6, 1), Err(Error::OutOfRange { .. })));
        assert_eq!(a_from_kappa(0.5, 2).unwrap(), 2.0);
    }

    #[test]
    fn a_v_examples() {
        assert_eq!(compute_a_v(0.7, &[0.7, 0.7], 1), (0.7, 0.7));
        let (a_ev, big) = compute_a_v(1.0, &[0.6], 1);
        assert_eq!(a_ev, 0.6);
        assert_eq!(big, 2.0 - 0.6);
        assert_eq!(compute_a_v(0.576, &[0.576; 3], 1).1, 0.576);
    }

    #[test]
    fn distances() {
        let o = Point::origin();
        let p = Point::new(1.0, 0.0, 0.0);
        assert_eq!(distance_rho(&p, &SingularEntity::Vertex(o)).unwrap(), 1.0);
        let e = SingularEntity::Edge(o, Point::new(0.0, 0.0, 1.0));
        assert_eq!(distance_rho(&Point::new(1.0, 0.0, 0.5), &e).unwrap(), 1.0);
        assert!(matches!(distance_rho(&Point::new(0.0, 0.0, 0.3), &e), Err(Error::AtSingularity)));
        let q = Point::new(0.1, 0.0, 0.99f64.sqrt());
        let r = angular_distance(&q, &o, (&o, &Point::new(0.0, 0.0, 1.0))).unwrap();
        assert!((r - 0.1).abs() < 1e-15);
        assert!(matches!(angular_distance(&o, &o, (&o, &p)), Err(Error::AtSingularity)));
    }

    #[test]
    fn segment_distances() {
        let p = |x, y, z| Point::new(x, y, z);
        let d = segment_distance(&p(0., 0., 0.), &p(1., 0., 0.), &p(0., 1., 1.), &p(1., 1., 1.));
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let d = segment_distance(&p(0., 0., 0.), &p(1., 0., 0.), &p(2., 1., 0.), &p(2., 2., 0.));
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let d = segment_distance(&p(0., 0., -1.), &p(0., 0., 1.), &p(-1., 1., 0.), &p(1., 1., 0.));
        assert!((d - 1.0).abs() < 1e-15);
    }

    fn corner() -> SingularSet {
        let o = Point::origin();
        let z = Point::new(0.0, 0.0, 3.0);
        SingularSet::new(
            vec![SingularEntity::Vertex(o), SingularEntity::Vertex(z), SingularEntity::Edge(o, z)],
            vec![0.3, 0.3, 0.3],
        )
        .unwrap()
    }

    #[test]
    fn region_examples() {
        let r = Regions::new(&corner()).unwrap();
        assert_eq!(r.radii().vertex, 1.0);
        assert_eq!(r.radii().edge, 1.0);
        assert_eq!(r.classify(&Point::new(10.0, 10.0, 10.0)), RegionTag::Interior);
        assert_eq!(r.classify(&Point::new(0.2, 0.0, 1.5)), RegionTag::EdgeCore { e: 2 });
        assert_eq!(r.classify(&Point::new(0.05, 0.0, 0.3)), RegionTag::EdgeNearVertex { v: 0, e: 2 });
        assert_eq!(r.classify(&Point::new(0.3, 0.0, 0.1)), RegionTag::VertexCore { v: 0 });
        assert_eq!(r.classify(&Point::new(0.05, 0.0, 2.8)), RegionTag::EdgeNearVertex { v: 1, e: 2 });
    }

    #[test]
    fn oversized_ball_is_rejected() {
        let radii = Radii {
            vertex: 3.5,
            edge: 1.0,
            aperture: 0.5,
        };
        assert!(matches!(Regions::with_radii(&corner(), radii), Err(Error::ConfigError(_))));
    }

    #[test]
    fn weighted_l2_of_constant() {
        use crate::mesh::Tet;
        let pts = vec![
            Point::new(1.0, 0.0, 0.0),
            Point::new(2.0, 0.0, 0.0),
            Point::new(1.0, 1.0, 0.0),
            Point::new(1.0, 0.0, 1.0),
        ];
        let mesh = Mesh::initial(pts, vec![Tet::o([0, 1, 2, 3])], vec![0; 4]);
        let s = SingularSet::new(vec![SingularEntity::Vertex(Point::origin())], vec![0.5]).unwrap();
        let radii = Radii {
            vertex: 100.0,
            edge: 1.0,
            aperture: 0.5,
        };
        let regions = Regions::with_radii(&s, radii).unwrap();
        let mu = WeightVector(vec![-1.0]);
        let one = Analytic(|_: &Point| Jet {
            value: 1.0,
            gradient: Vec3::zeros(),
            hessian: Matrix3::zeros(),
        });
        let parts = WeightedNorm::new(&regions, &mu).parts(&one, &mesh, 1).unwrap();
        assert_eq!(parts[1], 0.0);
        // weight rho^(0+1), squared: int |x|^2 over the tet.
        let exact = {
            let v: f64 = 1.0 / 6.0;
            // int x^2 + y^2 + z^2 with x = 1 + X: affine image of the unit tet.
            v * (1.0 + 2.0 * 0.25 + 3.0 * 0.1)
        };
        assert!((parts[0] - exact).abs() < 1e-14, "{} vs {exact}", parts[0]);
        assert!(matches!(
            WeightedNorm::new(&regions, &mu).parts(&one, &mesh, 3),
            Err(Error::UnsupportedOrder(3))
        ));
    }
}
