//! Geometric classification of tetrahedra against the singular set.
//!
//! Only used on initial meshes and for debug cross-checks; refined children
//! get their types from the refinement rule table.

use super::{check_conformity, ConformityIssue, Mesh, TetType};
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::singular::SingularSet;

const BARY_EPS: f64 = 1e-9;

/// A classified tet: `order[i]` is the input vertex that must sit at position `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub ttype: TetType,
    pub order: [usize; 4],
    pub vertex_entity: Option<u32>,
    pub edge_entity: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    TooManySingularVertices { tet: usize },
    TooManySingularEdges { tet: usize },
    VertexNotOnEdge { tet: usize },
    Unclassifiable { tet: usize, reason: String },
    /// The stored type, entities or vertex order disagree with the geometry.
    TypeMismatch { tet: usize, stored: TetType, found: TetType },
    Conformity(ConformityIssue),
}

enum Fault {
    TwoVertices,
    TwoEdges,
    VertexOffEdge,
    Other(String),
}

enum EdgeContact {
    Point(usize),
    Segment(usize, usize),
}

fn find_vertex(p: &[Point; 4], q: &Point, tol: f64) -> Option<usize> {
    (0..4).find(|&i| (p[i] - q).norm() <= tol)
}

/// Intersection of the closed tet with the open segment `ab`.
fn edge_contact(p: &[Point; 4], a: &Point, b: &Point, tol: f64) -> Result<Option<EdgeContact>, String> {
    let la = geometry::barycentric(p, a).ok_or("degenerate tetrahedron")?;
    let lb = geometry::barycentric(p, b).ok_or("degenerate tetrahedron")?;
    let (mut s0, mut s1) = (0.0_f64, 1.0_f64);
    for i in 0..4 {
        // lambda_i(s) = la + s (lb - la) >= -eps
        let (c, d) = (la[i], lb[i] - la[i]);
        if d.abs() < 1e-300 {
            if c < -BARY_EPS {
                return Ok(None);
            }
        } else if d > 0.0 {
            s0 = s0.max((-BARY_EPS - c) / d);
        } else {
            s1 = s1.min((-BARY_EPS - c) / d);
        }
    }
    let len = (b - a).norm();
    let s_tol = tol / len;
    if s0 > s1 || s1 <= s_tol || s0 >= 1.0 - s_tol {
        return Ok(None);
    }
    let at = |s: f64| geometry::lerp(a, b, s.clamp(0.0, 1.0));
    let (q0, q1) = (at(s0), at(s1));
    // Barycentric slack smears a touching point into a tiny interval.
    let snap = 1e3 * tol;
    if (q1 - q0).norm() <= snap {
        let q = at(0.5 * (s0 + s1));
        return find_vertex(p, &q, snap)
            .map(|i| Some(EdgeContact::Point(i)))
            .ok_or_else(|| "singular edge crosses the tetrahedron away from its vertices".into());
    }
    match (find_vertex(p, &q0, snap), find_vertex(p, &q1, snap)) {
        (Some(i), Some(j)) if i != j => Ok(Some(EdgeContact::Segment(i, j))),
        _ => Err("singular edge passes through the tetrahedron but not along one of its edges".into()),
    }
}

fn classify_inner(p: &[Point; 4], s: &SingularSet) -> Result<Classification, Fault> {
    let tol = 1e-9 * geometry::diameter(p);
    if geometry::volume(p) <= 1e-14 * geometry::diameter(p).powi(3) {
        return Err(Fault::Other("degenerate tetrahedron".into()));
    }
    let mut verts = Vec::new();
    for v in s.vertex_indices() {
        let q = s.vertex_point(v);
        let l = geometry::barycentric(p, q).ok_or(Fault::Other("degenerate tetrahedron".into()))?;
        if l.iter().all(|&x| x >= -BARY_EPS) {
            let i = find_vertex(p, q, tol).ok_or_else(|| {
                Fault::Other(format!("singular vertex {v} lies inside the tetrahedron"))
            })?;
            verts.push((v, i));
        }
    }
    let mut contacts = Vec::new();
    for e in s.edge_indices() {
        let (a, b) = s.edge_points(e);
        if let Some(c) = edge_contact(p, a, b, tol).map_err(Fault::Other)? {
            contacts.push((e, c));
        }
    }
    if verts.len() > 1 {
        return Err(Fault::TwoVertices);
    }
    if contacts.len() > 1 {
        return Err(Fault::TwoEdges);
    }

    let order_with = |first: &[usize]| {
        let mut o = [0; 4];
        let mut k = 0;
        for &f in first {
            o[k] = f;
            k += 1;
        }
        for i in 0..4 {
            if !first.contains(&i) {
                o[k] = i;
                k += 1;
            }
        }
        o
    };
    let c = match (verts.first(), contacts.first()) {
        (None, None) => Classification {
            ttype: TetType::O,
            order: [0, 1, 2, 3],
            vertex_entity: None,
            edge_entity: None,
        },
        (Some(&(v, i)), None) => Classification {
            ttype: TetType::V,
            order: order_with(&[i]),
            vertex_entity: Some(v as u32),
            edge_entity: None,
        },
        (None, Some(&(e, EdgeContact::Point(i)))) => Classification {
            ttype: TetType::VE,
            order: order_with(&[i]),
            vertex_entity: None,
            edge_entity: Some(e as u32),
        },
        (None, Some(&(e, EdgeContact::Segment(i, j)))) => Classification {
            ttype: TetType::E,
            order: order_with(&[i.min(j), i.max(j)]),
            vertex_entity: None,
            edge_entity: Some(e as u32),
        },
        (Some(&(v, k)), Some(&(e, EdgeContact::Segment(i, j)))) => {
            if !s.is_endpoint(v, e) || (k != i && k != j) {
                return Err(Fault::VertexOffEdge);
            }
            let other = if k == i { j } else { i };
            Classification {
                ttype: TetType::EV,
                order: order_with(&[k, other]),
                vertex_entity: Some(v as u32),
                edge_entity: Some(e as u32),
            }
        }
        (Some(_), Some((_, EdgeContact::Point(_)))) => return Err(Fault::VertexOffEdge),
    };
    Ok(c)
}

/// Classifies a tetrahedron by how its closure meets the singular set.
///
/// The returned `order` puts the singular vertex first, and for e/ev-tets the
/// singular segment in positions 0-1; other vertices keep their relative order.
pub fn classify_tet(p: &[Point; 4], s: &SingularSet) -> Result<Classification> {
    classify_inner(p, s).map_err(|f| {
        let reason = match f {
            Fault::TwoVertices => "touches two singular vertices".into(),
            Fault::TwoEdges => "touches two singular edges".into(),
            Fault::VertexOffEdge => "singular vertex is not an endpoint of the touched edge".into(),
            Fault::Other(r) => r,
        };
        Error::AmbiguousClassification { tet: 0, reason }
    })
}

/// Checks a level-0 mesh against the initial-mesh conditions. Empty means valid.
pub fn validate_initial_mesh(mesh: &Mesh, s: &SingularSet) -> Vec<Violation> {
    let mut out = Vec::new();
    for (t, tet) in mesh.tets.iter().enumerate() {
        match classify_inner(&mesh.tet_points_of(tet), s) {
            Err(Fault::TwoVertices) => out.push(Violation::TooManySingularVertices { tet: t }),
            Err(Fault::TwoEdges) => out.push(Violation::TooManySingularEdges { tet: t }),
            Err(Fault::VertexOffEdge) => out.push(Violation::VertexNotOnEdge { tet: t }),
            Err(Fault::Other(reason)) => out.push(Violation::Unclassifiable { tet: t, reason }),
            Ok(c) => {
                let pinned = match c.ttype {
                    TetType::O => 0,
                    TetType::V | TetType::VE => 1,
                    TetType::E | TetType::EV => 2,
                };
                let order_ok = if c.ttype == TetType::E {
                    // Either end of an e-tet's segment may come first.
                    c.order[..2] == [0, 1] || c.order[..2] == [1, 0]
                } else {
                    (0..pinned).all(|i| c.order[i] == i)
                };
                if c.ttype != tet.ttype
                    || c.vertex_entity != tet.vertex_entity
                    || c.edge_entity != tet.edge_entity
                    || !order_ok
                {
                    out.push(Violation::TypeMismatch {
                        tet: t,
                        stored: tet.ttype,
                        found: c.ttype,
                    });
                }
            }
        }
    }
    out.extend(check_conformity(mesh).into_iter().map(Violation::Conformity));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular::SingularEntity;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    fn prism_edge() -> SingularSet {
        SingularSet::new(
            vec![
                SingularEntity::Vertex(p(0.5, 0.5, 0.0)),
                SingularEntity::Vertex(p(0.5, 0.5, 1.0)),
                SingularEntity::Edge(p(0.5, 0.5, 0.0), p(0.5, 0.5, 1.0)),
            ],
            vec![0.5, 0.5, 0.2],
        )
        .unwrap()
    }

    #[test]
    fn far_tet_is_o() {
        let t = [p(2.0, 2.0, 2.0), p(3.0, 2.0, 2.0), p(2.0, 3.0, 2.0), p(2.0, 2.0, 3.0)];
        assert_eq!(classify_tet(&t, &prism_edge()).unwrap().ttype, TetType::O);
    }

    #[test]
    fn point_on_edge_interior_is_ve() {
        let t = [p(1.0, 1.0, 0.5), p(0.5, 0.5, 0.5), p(1.0, 0.0, 0.3), p(1.0, 0.0, 0.8)];
        let c = classify_tet(&t, &prism_edge()).unwrap();
        assert_eq!(c.ttype, TetType::VE);
        assert_eq!(c.order, [1, 0, 2, 3]);
        assert_eq!(c.edge_entity, Some(2));
    }

    #[test]
    fn vertex_plus_edge_is_ev() {
        let t = [p(0.5, 0.5, 0.5), p(0.5, 0.5, 0.0), p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0)];
        let c = classify_tet(&t, &prism_edge()).unwrap();
        assert_eq!(c.ttype, TetType::EV);
        assert_eq!(c.order, [1, 0, 2, 3]);
        assert_eq!((c.vertex_entity, c.edge_entity), (Some(0), Some(2)));
    }

    #[test]
    fn full_edge_is_two_vertices() {
        let t = [p(0.5, 0.5, 0.0), p(0.5, 0.5, 1.0), p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0)];
        let m = Mesh::initial(t.to_vec(), vec![super::super::Tet::o([0, 1, 2, 3])], vec![0; 4]);
        let v = validate_initial_mesh(&m, &prism_edge());
        assert!(v.contains(&Violation::TooManySingularVertices { tet: 0 }));
    }

    #[test]
    fn edge_piercing_a_face_is_rejected() {
        let t = [p(0.0, 0.0, 0.4), p(1.0, 0.0, 0.4), p(0.0, 1.0, 0.4), p(0.3, 0.3, 0.9)];
        assert!(classify_tet(&t, &prism_edge()).is_err());
    }
}
