//! The singular set: domain vertices and open edges toward which the mesh is graded.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Endpoint-coincidence tolerance used when matching edges to vertices.
const COINCIDENT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum SingularEntity {
    Vertex(Point),
    /// Open segment between two distinct endpoints.
    Edge(Point, Point),
}

impl SingularEntity {
    pub fn is_vertex(&self) -> bool {
        matches!(self, SingularEntity::Vertex(_))
    }
}

/// Ordered singular entities (vertices first, then edges), each with its
/// grading parameter `kappa` in `(0, 1/2]`.
#[derive(Clone, Debug)]
pub struct SingularSet {
    entities: Vec<SingularEntity>,
    kappa: Vec<f64>,
    num_vertices: usize,
    /// For each singular vertex, the entity indices of the edges ending there.
    edges_of_vertex: Vec<Vec<usize>>,
    /// `min(kappa_v, kappa_l for l in I_v)`, one per vertex.
    kappa_ev: Vec<f64>,
}

impl SingularSet {
    pub fn new(entities: Vec<SingularEntity>, kappa: Vec<f64>) -> Result<Self> {
        if entities.len() != kappa.len() {
            return Err(Error::InvalidSingularSet(format!(
                "{} entities but {} grading parameters",
                entities.len(),
                kappa.len()
            )));
        }
        let num_vertices = entities.iter().take_while(|e| e.is_vertex()).count();
        if entities[num_vertices..].iter().any(SingularEntity::is_vertex) {
            return Err(Error::InvalidSingularSet(
                "vertices must be listed before edges".into(),
            ));
        }
        for (i, &k) in kappa.iter().enumerate() {
            if !(k > 0.0 && k <= 0.5) {
                return Err(Error::InvalidSingularSet(format!(
                    "kappa[{i}] = {k} outside (0, 1/2]"
                )));
            }
        }
        for (i, e) in entities.iter().enumerate() {
            match e {
                SingularEntity::Vertex(p) if !p.coords.iter().all(|c| c.is_finite()) => {
                    return Err(Error::InvalidSingularSet(format!("entity {i} is not finite")));
                }
                SingularEntity::Edge(a, b) if (a - b).norm() <= COINCIDENT => {
                    return Err(Error::InvalidSingularSet(format!(
                        "edge {i} has coincident endpoints"
                    )));
                }
                _ => {}
            }
        }

        let mut edges_of_vertex = vec![Vec::new(); num_vertices];
        for (v, incident) in edges_of_vertex.iter_mut().enumerate() {
            let SingularEntity::Vertex(p) = &entities[v] else {
                unreachable!()
            };
            for (l, e) in entities.iter().enumerate().skip(num_vertices) {
                if let SingularEntity::Edge(a, b) = e {
                    if (a - p).norm() <= COINCIDENT || (b - p).norm() <= COINCIDENT {
                        incident.push(l);
                    }
                }
            }
        }
        let kappa_ev = edges_of_vertex
            .iter()
            .enumerate()
            .map(|(v, inc)| inc.iter().fold(kappa[v], |m, &l| m.min(kappa[l])))
            .collect();

        Ok(SingularSet {
            entities,
            kappa,
            num_vertices,
            edges_of_vertex,
            kappa_ev,
        })
    }

    /// A set with no singular entities: every tetrahedron is an o-tetrahedron.
    pub fn empty() -> Self {
        SingularSet::new(Vec::new(), Vec::new()).expect("empty set is valid")
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.entities.len() - self.num_vertices
    }

    pub fn entities(&self) -> &[SingularEntity] {
        &self.entities
    }

    pub fn entity(&self, l: usize) -> &SingularEntity {
        &self.entities[l]
    }

    pub fn kappa(&self, l: usize) -> f64 {
        self.kappa[l]
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappa
    }

    pub fn is_vertex(&self, l: usize) -> bool {
        l < self.num_vertices
    }

    pub fn vertex_indices(&self) -> std::ops::Range<usize> {
        0..self.num_vertices
    }

    pub fn edge_indices(&self) -> std::ops::Range<usize> {
        self.num_vertices..self.entities.len()
    }

    pub fn vertex_point(&self, l: usize) -> &Point {
        match &self.entities[l] {
            SingularEntity::Vertex(p) => p,
            SingularEntity::Edge(..) => panic!("entity {l} is an edge"),
        }
    }

    pub fn edge_points(&self, l: usize) -> (&Point, &Point) {
        match &self.entities[l] {
            SingularEntity::Edge(a, b) => (a, b),
            SingularEntity::Vertex(_) => panic!("entity {l} is a vertex"),
        }
    }

    pub fn edges_of_vertex(&self, v: usize) -> &[usize] {
        &self.edges_of_vertex[v]
    }

    pub fn kappa_ev(&self, v: usize) -> f64 {
        self.kappa_ev[v]
    }

    /// True if vertex entity `v` is an endpoint of edge entity `e`.
    pub fn is_endpoint(&self, v: usize, e: usize) -> bool {
        self.is_vertex(v) && self.edges_of_vertex[v].contains(&e)
    }

    /// Same geometry with new grading parameters.
    pub fn with_kappa(&self, kappa: Vec<f64>) -> Result<Self> {
        SingularSet::new(self.entities.clone(), kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    fn corner() -> Vec<SingularEntity> {
        vec![
            SingularEntity::Vertex(p(0.0, 0.0, 0.0)),
            SingularEntity::Edge(p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0)),
            SingularEntity::Edge(p(0.0, 0.0, 0.0), p(0.0, 1.0, 0.0)),
        ]
    }

    #[test]
    fn kappa_ev_is_min_over_incident_edges() {
        let s = SingularSet::new(corner(), vec![0.4, 0.3, 0.2]).unwrap();
        assert_eq!(s.edges_of_vertex(0), &[1, 2]);
        assert_eq!(s.kappa_ev(0), 0.2);
        assert!(s.is_endpoint(0, 1));
    }

    #[test]
    fn rejects_kappa_out_of_range() {
        assert!(SingularSet::new(corner(), vec![0.6, 0.3, 0.2]).is_err());
        assert!(SingularSet::new(corner(), vec![0.0, 0.3, 0.2]).is_err());
    }

    #[test]
    fn rejects_vertices_after_edges() {
        let mut e = corner();
        e.swap(0, 1);
        assert!(SingularSet::new(e, vec![0.5; 3]).is_err());
    }

    #[test]
    fn rejects_degenerate_edge() {
        let e = vec![SingularEntity::Edge(p(1.0, 1.0, 1.0), p(1.0, 1.0, 1.0))];
        assert!(SingularSet::new(e, vec![0.5]).is_err());
    }
}
