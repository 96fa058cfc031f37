//! Embedded model domains with hand-built initial meshes.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::geometry::{Point, Vec3};
use crate::mesh::{classify_tet, validate_initial_mesh, Mesh, Tet};
use crate::singular::{SingularEntity, SingularSet};

const ON_FACET: f64 = 1e-12;

/// A planar convex boundary polygon.
#[derive(Clone, Debug)]
pub struct Facet {
    pub polygon: Vec<Point>,
    pub normal: Vec3,
}

impl Facet {
    pub fn new(polygon: Vec<Point>) -> Self {
        let normal = (polygon[1] - polygon[0])
            .cross(&(polygon[2] - polygon[0]))
            .normalize();
        Facet { polygon, normal }
    }

    pub fn contains(&self, p: &Point) -> bool {
        if (p - self.polygon[0]).dot(&self.normal).abs() > ON_FACET {
            return false;
        }
        let n = self.polygon.len();
        (0..n).all(|i| {
            let (a, b) = (self.polygon[i], self.polygon[(i + 1) % n]);
            (b - a).cross(&(p - a)).dot(&self.normal) >= -ON_FACET
        })
    }
}

#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub name: &'static str,
    pub singular: SingularSet,
    /// Level-0 mesh with boundary facet masks filled in.
    pub mesh: Mesh,
    pub facets: Vec<Facet>,
    /// Edge and vertex singular exponents of the Laplacian on this domain.
    pub eta_e: f64,
    pub eta_v: Option<f64>,
    pub volume: f64,
}

/// Builds a named domain: `prism`, `fichera` or `edge-box`.
pub fn build_domain(name: &str, kappa_e: f64, kappa_v: f64) -> Result<DomainSpec> {
    match name {
        "prism" => prism(kappa_e, kappa_v),
        "fichera" => fichera(kappa_e, kappa_v),
        "edge-box" => edge_box(kappa_e),
        _ => Err(Error::UnknownDomain(name.to_string())),
    }
}

/// Classifies and reorders raw tets, tags boundary vertices, and validates.
fn assemble(
    name: &'static str,
    points: Vec<Point>,
    raw: Vec<[u32; 4]>,
    singular: SingularSet,
    facets: Vec<Facet>,
) -> Result<(Mesh, SingularSet, Vec<Facet>)> {
    assert!(facets.len() <= 64, "facet masks are 64 bits wide");
    let mut tets = Vec::with_capacity(raw.len());
    for (i, verts) in raw.into_iter().enumerate() {
        let p = verts.map(|v| points[v as usize]);
        let c = classify_tet(&p, &singular).map_err(|e| match e {
            Error::AmbiguousClassification { reason, .. } => {
                Error::AmbiguousClassification { tet: i, reason }
            }
            e => e,
        })?;
        tets.push(Tet::new(
            c.order.map(|k| verts[k]),
            c.ttype,
            c.vertex_entity,
            c.edge_entity,
        ));
    }
    let masks = points
        .iter()
        .map(|p| {
            facets
                .iter()
                .enumerate()
                .filter(|(_, f)| f.contains(p))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let mesh = Mesh::initial(points, tets, masks);
    let report = validate_initial_mesh(&mesh, &singular);
    assert!(report.is_empty(), "{name} initial mesh is invalid: {report:?}");
    Ok((mesh, singular, facets))
}

fn p(x: f64, y: f64, z: f64) -> Point {
    Point::new(x, y, z)
}

/// `((0,1)^2 minus the triangle (0,0),(1/2,1/2),(1,0)) x (0,1)`: one reentrant
/// edge of opening angle 3 pi / 2 over `(1/2, 1/2)`, with its two end vertices.
pub fn prism(kappa_e: f64, kappa_v: f64) -> Result<DomainSpec> {
    let ring = [(0.5, 0.5), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)];
    let zs = [0.0, 0.5, 1.0];
    let mut points = Vec::new();
    for z in zs {
        for (x, y) in ring {
            points.push(p(x, y, z));
        }
    }
    let id = |level: u32, k: u32| level * 5 + k;
    let mut raw = Vec::new();
    for (a, b) in [(1, 2), (2, 3), (3, 4)] {
        let (c0, a0, b0) = (id(0, 0), id(0, a), id(0, b));
        let (c1, a1, b1) = (id(1, 0), id(1, a), id(1, b));
        let (c2, a2, b2) = (id(2, 0), id(2, a), id(2, b));
        raw.push([c0, c1, a1, b1]);
        raw.push([c0, a0, b0, b1]);
        raw.push([c0, a0, b1, a1]);
        raw.push([c2, c1, a1, b1]);
        raw.push([c2, a1, b1, b2]);
        raw.push([c2, a1, b2, a2]);
    }

    let (bot, top) = (p(0.5, 0.5, 0.0), p(0.5, 0.5, 1.0));
    let singular = SingularSet::new(
        vec![
            SingularEntity::Vertex(bot),
            SingularEntity::Vertex(top),
            SingularEntity::Edge(bot, top),
        ],
        vec![kappa_v, kappa_v, kappa_e],
    )?;

    let mut facets = Vec::new();
    for z in [0.0, 1.0] {
        for (a, b) in [(1, 2), (2, 3), (3, 4)] {
            let (c, pa, pb) = (ring[0], ring[a], ring[b]);
            facets.push(Facet::new(vec![
                p(c.0, c.1, z),
                p(pa.0, pa.1, z),
                p(pb.0, pb.1, z),
            ]));
        }
    }
    for i in 0..5 {
        let (a, b) = (ring[i], ring[(i + 1) % 5]);
        facets.push(Facet::new(vec![
            p(a.0, a.1, 0.0),
            p(b.0, b.1, 0.0),
            p(b.0, b.1, 1.0),
            p(a.0, a.1, 1.0),
        ]));
    }

    let (mesh, singular, facets) = assemble("prism", points, raw, singular, facets)?;
    Ok(DomainSpec {
        name: "prism",
        singular,
        mesh,
        facets,
        eta_e: 2.0 / 3.0,
        eta_v: Some(13.0 / 6.0),
        volume: 0.75,
    })
}

/// Kuhn split of the cube with lower corner `c` and side `h` into six tets along
/// its main diagonal.
fn kuhn_cube(c: [i32; 3]) -> [[[i32; 3]; 4]; 6] {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS.map(|perm| {
        let mut v = [c; 4];
        for k in 0..3 {
            v[k + 1] = v[k];
            v[k + 1][perm[k]] += 1;
        }
        v
    })
}

/// `(-1,1)^3` minus `[0,1)^3`: a reentrant corner at the origin with three
/// reentrant edges along the positive axes.
///
/// The far ends of the three edges are also domain vertices; they are listed as
/// singular vertices with `kappa = 1/2` so that the tets touching them grade
/// consistently with the edge.
pub fn fichera(kappa_e: f64, kappa_v: f64) -> Result<DomainSpec> {
    let mut ids: FxHashMap<[i32; 3], u32> = FxHashMap::default();
    let mut points = Vec::new();
    let mut raw = Vec::new();
    // Cube lower corners on a half-unit grid, index range -2..2 per axis.
    for i in -2..2 {
        for j in -2..2 {
            for k in -2..2 {
                if i >= 0 && j >= 0 && k >= 0 {
                    continue;
                }
                for tet in kuhn_cube([i, j, k]) {
                    raw.push(tet.map(|g| {
                        *ids.entry(g).or_insert_with(|| {
                            points.push(p(g[0] as f64 * 0.5, g[1] as f64 * 0.5, g[2] as f64 * 0.5));
                            points.len() as u32 - 1
                        })
                    }));
                }
            }
        }
    }

    let o = Point::origin();
    let ends = [p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0)];
    let mut entities = vec![SingularEntity::Vertex(o)];
    entities.extend(ends.iter().map(|&e| SingularEntity::Vertex(e)));
    entities.extend(ends.iter().map(|&e| SingularEntity::Edge(o, e)));
    let singular = SingularSet::new(
        entities,
        vec![kappa_v, 0.5, 0.5, 0.5, kappa_e, kappa_e, kappa_e],
    )?;

    // Unit octant cubes; every face without a neighbouring octant is a facet.
    let octants: Vec<[i32; 3]> = (0..8)
        .map(|b| [-(b & 1), -((b >> 1) & 1), -((b >> 2) & 1)])
        .filter(|c| *c != [0, 0, 0])
        .collect();
    let mut facets = Vec::new();
    for c in &octants {
        for axis in 0..3 {
            for side in [0, 1] {
                let mut n = *c;
                n[axis] += if side == 0 { -1 } else { 1 };
                if octants.contains(&n) {
                    continue;
                }
                let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
                let corner = |du: i32, dv: i32| {
                    let mut q = [c[0] as f64, c[1] as f64, c[2] as f64];
                    q[axis] += side as f64;
                    q[u] += du as f64;
                    q[v] += dv as f64;
                    p(q[0], q[1], q[2])
                };
                facets.push(Facet::new(vec![
                    corner(0, 0),
                    corner(1, 0),
                    corner(1, 1),
                    corner(0, 1),
                ]));
            }
        }
    }

    let (mesh, singular, facets) = assemble("fichera", points, raw, singular, facets)?;
    Ok(DomainSpec {
        name: "fichera",
        singular,
        mesh,
        facets,
        eta_e: 2.0 / 3.0,
        eta_v: Some(0.954),
        volume: 7.0,
    })
}

/// `(0,1)^3` with one singular edge along the z-axis and no singular vertices.
/// Every tet touches the edge, which makes it a clean test bed for edge grading.
pub fn edge_box(kappa_e: f64) -> Result<DomainSpec> {
    let ring = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut points = Vec::new();
    for z in [0.0, 0.5, 1.0] {
        for (x, y) in ring {
            points.push(p(x, y, z));
        }
    }
    let id = |level: u32, k: u32| level * 4 + k;
    let mut raw = Vec::new();
    for (a, b) in [(1, 2), (2, 3)] {
        let (c0, a0, b0) = (id(0, 0), id(0, a), id(0, b));
        let (c1, a1, b1) = (id(1, 0), id(1, a), id(1, b));
        let (c2, a2, b2) = (id(2, 0), id(2, a), id(2, b));
        raw.push([c0, c1, a0, b0]);
        raw.push([c1, a0, b0, b1]);
        raw.push([c1, a0, b1, a1]);
        raw.push([c2, c1, a2, b2]);
        raw.push([c1, a1, b1, b2]);
        raw.push([c1, a1, b2, a2]);
    }
    let singular = SingularSet::new(
        vec![SingularEntity::Edge(p(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0))],
        vec![kappa_e],
    )?;
    let mut facets = Vec::new();
    for axis in 0..3 {
        for side in [0.0, 1.0] {
            let corner = |du: f64, dv: f64| {
                let mut q = [0.0; 3];
                q[axis] = side;
                q[(axis + 1) % 3] = du;
                q[(axis + 2) % 3] = dv;
                p(q[0], q[1], q[2])
            };
            facets.push(Facet::new(vec![
                corner(0.0, 0.0),
                corner(1.0, 0.0),
                corner(1.0, 1.0),
                corner(0.0, 1.0),
            ]));
        }
    }
    let (mesh, singular, facets) = assemble("edge-box", points, raw, singular, facets)?;
    Ok(DomainSpec {
        name: "edge-box",
        singular,
        mesh,
        facets,
        eta_e: 2.0,
        eta_v: None,
        volume: 1.0,
    })
}
