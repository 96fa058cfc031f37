use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{Lineage, Mesh, NodeProvenance, Tet, TetType, NONE};
use crate::error::{Error, Result};
use crate::geometry::{self, Point, TET_EDGES};
use crate::singular::SingularSet;

/// Children in local numbering: 0..4 are the parent's vertices, 4..10 the new
/// nodes `x01, x02, x03, x12, x13, x23`.
pub const CHILDREN: [[usize; 4]; 8] = [
    [0, 4, 5, 6],
    [4, 1, 7, 8],
    [5, 7, 2, 9],
    [6, 8, 9, 3],
    [4, 5, 6, 8],
    [4, 5, 7, 8],
    [5, 6, 8, 9],
    [5, 7, 8, 9],
];

const DEGENERATE_RATIO: f64 = 1e-14;
const T_QUANTUM: f64 = 1e-12;

/// Split parameter `t` for edge `x_k x_l` so that `x_kl = (1 - t) x_k + t x_l`.
pub fn edge_ratio(
    ttype: TetType,
    k: usize,
    l: usize,
    kappa_v: Option<f64>,
    kappa_e: Option<f64>,
    kappa_ev: Option<f64>,
) -> Result<f64> {
    assert!(k < l && l <= 3, "edge ({k}, {l})");
    let need = |v: Option<f64>, name| v.ok_or(Error::MissingParameter { ttype, name });
    Ok(match ttype {
        TetType::O => 0.5,
        TetType::V if k == 0 => need(kappa_ev, "kappa_ev")?,
        TetType::VE if k == 0 => need(kappa_e, "kappa_e")?,
        TetType::V | TetType::VE => 0.5,
        TetType::E if l >= 2 && k <= 1 => need(kappa_e, "kappa_e")?,
        TetType::E => 0.5,
        TetType::EV => match (k, l) {
            (0, 1) => need(kappa_v, "kappa_v")?,
            (0, _) => need(kappa_ev, "kappa_ev")?,
            (1, _) => need(kappa_e, "kappa_e")?,
            _ => 0.5,
        },
    })
}

/// The six split parameters of a tet in [`TET_EDGES`] order.
fn split_ratios(tet: &Tet, s: &SingularSet) -> Result<[f64; 6]> {
    let kv = tet.vertex_entity.map(|v| s.kappa(v as usize));
    let kev = tet.vertex_entity.map(|v| s.kappa_ev(v as usize));
    let ke = tet.edge_entity.map(|e| s.kappa(e as usize));
    let mut t = [0.5; 6];
    for (i, &(k, l)) in TET_EDGES.iter().enumerate() {
        t[i] = edge_ratio(tet.ttype, k, l, kv, ke, kev)?;
    }
    Ok(t)
}

/// Type and singular entities of child `c`. Children of e- and ev-tets keep the
/// singular segment as `x0 x1`, with `x0` the end nearer the parent's `x0`.
fn child_type(parent: &Tet, c: usize) -> (TetType, Option<u32>, Option<u32>) {
    use TetType::*;
    let (v, e) = (parent.vertex_entity, parent.edge_entity);
    match (parent.ttype, c) {
        (V, 0) => (V, v, None),
        (VE, 0) => (VE, None, e),
        (E, 0 | 1) => (E, None, e),
        (EV, 0) => (EV, v, e),
        (EV, 1) => (E, None, e),
        (E | EV, 4 | 5) => (VE, None, e),
        _ => (O, None, None),
    }
}

#[derive(Clone, Debug)]
pub struct RefinedTet {
    /// New node positions `x01, x02, x03, x12, x13, x23`.
    pub nodes: [Point; 6],
    /// Split parameters, measured from the lower-numbered local vertex.
    pub ratios: [f64; 6],
    /// Children with vertices in local numbering (see [`CHILDREN`]).
    pub children: [Tet; 8],
}

/// One refinement step of a single tetrahedron.
pub fn refine_tet(tet: &Tet, points: &[Point; 4], s: &SingularSet) -> Result<RefinedTet> {
    let ratios = split_ratios(tet, s)?;
    let nodes = std::array::from_fn(|i| {
        let (k, l) = TET_EDGES[i];
        geometry::lerp(&points[k], &points[l], ratios[i])
    });
    let mut all = [Point::origin(); 10];
    all[..4].copy_from_slice(points);
    all[4..].copy_from_slice(&nodes);

    let parent_volume = geometry::volume(points);
    let mut children = [Tet::o([0; 4]); 8];
    for (c, local) in CHILDREN.iter().enumerate() {
        let child_volume = geometry::volume(&local.map(|i| all[i]));
        if child_volume < DEGENERATE_RATIO * parent_volume
            || parent_volume < DEGENERATE_RATIO * geometry::diameter(points).powi(3)
        {
            return Err(Error::DegenerateChild {
                tet: tet.lineage.root as usize,
                child: c,
                child_volume,
                parent_volume,
            });
        }
        let (ttype, v, e) = child_type(tet, c);
        children[c] = Tet {
            verts: local.map(|i| i as u32),
            ttype,
            vertex_entity: v,
            edge_entity: e,
            lineage: tet.lineage,
        };
    }
    Ok(RefinedTet {
        nodes,
        ratios,
        children,
    })
}

/// Refines every tetrahedron once, merging shared edge nodes.
pub fn refine_mesh(mesh: &Arc<Mesh>, s: &SingularSet) -> Result<Mesh> {
    let ratios: Vec<[f64; 6]> = mesh
        .tets
        .par_iter()
        .map(|t| split_ratios(t, s))
        .collect::<Result<_>>()?;

    // Serial merge so vertex ids do not depend on thread scheduling.
    let mut points = mesh.points.clone();
    let mut provenance = mesh.provenance.clone();
    let mut facets = mesh.facets.clone();
    let mut edge_nodes: FxHashMap<(u32, u32), (u32, f64)> = FxHashMap::default();
    edge_nodes.reserve(mesh.tets.len() * 2);
    let mut new_ids = vec![[0u32; 6]; mesh.tets.len()];
    for (ti, tet) in mesh.tets.iter().enumerate() {
        for (i, &(k, l)) in TET_EDGES.iter().enumerate() {
            let (vk, vl) = (tet.verts[k], tet.verts[l]);
            let (a, b, t) = if vk < vl {
                (vk, vl, ratios[ti][i])
            } else {
                (vl, vk, 1.0 - ratios[ti][i])
            };
            let id = match edge_nodes.get(&(a, b)) {
                Some(&(id, existing)) => {
                    if (existing - t).abs() > T_QUANTUM {
                        return Err(Error::ConformityBreak {
                            a,
                            b,
                            existing,
                            requested: t,
                        });
                    }
                    id
                }
                None => {
                    let id = points.len() as u32;
                    let (pa, pb) = (mesh.points[a as usize], mesh.points[b as usize]);
                    points.push(geometry::lerp(&pa, &pb, t));
                    provenance.push(NodeProvenance::Split { a, b, t });
                    facets.push(facets[a as usize] & facets[b as usize]);
                    edge_nodes.insert((a, b), (id, t));
                    id
                }
            };
            new_ids[ti][i] = id;
        }
    }

    let level = mesh.level + 1;
    // Detached meshes (e.g. read from disk) carry no root types; layers are not tracked.
    let root_mesh = mesh.ancestor(0);
    let tets: Vec<Tet> = mesh
        .tets
        .par_iter()
        .zip(new_ids.par_iter())
        .enumerate()
        .flat_map_iter(|(ti, (tet, ids))| {
            let mut global = [0u32; 10];
            global[..4].copy_from_slice(&tet.verts);
            global[4..].copy_from_slice(ids);
            let root_type = root_mesh.map_or(TetType::O, |m| m.tets[tet.lineage.root as usize].ttype);
            (0..8).map(move |c| {
                let (ttype, v, e) = child_type(tet, c);
                let mut exit = tet.lineage.exit_level;
                if exit == NONE {
                    let left = match root_type {
                        TetType::O => false,
                        TetType::EV => ttype != TetType::EV,
                        _ => ttype == TetType::O,
                    };
                    if left {
                        exit = level;
                    }
                }
                Tet {
                    verts: CHILDREN[c].map(|i| global[i]),
                    ttype,
                    vertex_entity: v,
                    edge_entity: e,
                    lineage: Lineage {
                        parent: ti as u32,
                        child: c as u8,
                        root: tet.lineage.root,
                        exit_level: exit,
                    },
                }
            })
        })
        .collect();

    let fine = Mesh {
        points,
        provenance,
        tets,
        facets,
        level,
        parent: Some(Arc::clone(mesh)),
    };
    let degenerate = fine.tets.par_iter().enumerate().find_first(|(ti, tet)| {
        fine.tet_volume(*ti) < DEGENERATE_RATIO * mesh.tet_volume(tet.lineage.parent as usize)
    });
    if let Some((ti, tet)) = degenerate {
        return Err(Error::DegenerateChild {
            tet: tet.lineage.parent as usize,
            child: tet.lineage.child as usize,
            child_volume: fine.tet_volume(ti),
            parent_volume: mesh.tet_volume(tet.lineage.parent as usize),
        });
    }
    if cfg!(debug_assertions) && level <= 3 && fine.tets.len() <= 200_000 {
        cross_check_types(&fine, s);
    }
    Ok(fine)
}

/// Debug check: the combinatorial child types agree with geometric classification.
fn cross_check_types(mesh: &Mesh, s: &SingularSet) {
    mesh.tets.par_iter().enumerate().for_each(|(i, tet)| {
        let c = super::classify_tet(&mesh.tet_points_of(tet), s)
            .unwrap_or_else(|e| panic!("child {i} at level {}: {e}", mesh.level));
        assert_eq!(c.ttype, tet.ttype, "child {i} at level {}", mesh.level);
        assert_eq!(c.order[0], 0, "child {i}: singular vertex not first");
        if tet.ttype.has_edge() {
            assert_eq!(c.order[1], 1, "child {i}: singular edge not x0x1");
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ref_e_tet() -> [Point; 4] {
        [
            Point::new(0.0, 0.0, 0.0),
            Point::new(0.0, 0.0, 1.0),
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
        ]
    }

    fn z_axis(kappa: f64) -> SingularSet {
        use crate::singular::SingularEntity;
        SingularSet::new(
            vec![SingularEntity::Edge(
                Point::new(0.0, 0.0, -1.0),
                Point::new(0.0, 0.0, 2.0),
            )],
            vec![kappa],
        )
        .unwrap()
    }

    #[test]
    fn ratios_per_rule() {
        assert_eq!(edge_ratio(TetType::O, 1, 3, None, None, None).unwrap(), 0.5);
        assert_eq!(edge_ratio(TetType::E, 0, 2, None, Some(0.2), None).unwrap(), 0.2);
        assert_eq!(edge_ratio(TetType::E, 2, 3, None, Some(0.2), None).unwrap(), 0.5);
        assert_eq!(
            edge_ratio(TetType::EV, 0, 1, Some(0.4), Some(0.3), Some(0.3)).unwrap(),
            0.4
        );
        assert_eq!(
            edge_ratio(TetType::EV, 0, 3, Some(0.4), Some(0.3), Some(0.25)).unwrap(),
            0.25
        );
        assert!(matches!(
            edge_ratio(TetType::V, 0, 1, None, None, None),
            Err(Error::MissingParameter { .. })
        ));
    }

    #[test]
    fn e_tet_new_nodes() {
        let s = z_axis(0.2);
        let tet = Tet::new([0, 1, 2, 3], TetType::E, None, Some(0));
        let r = refine_tet(&tet, &ref_e_tet(), &s).unwrap();
        let expect = [
            [0.0, 0.0, 0.5],
            [0.2, 0.0, 0.0],
            [0.0, 0.2, 0.0],
            [0.2, 0.0, 0.8],
            [0.0, 0.2, 0.8],
            [0.5, 0.5, 0.0],
        ];
        for (n, e) in r.nodes.iter().zip(expect) {
            assert_relative_eq!(*n, Point::new(e[0], e[1], e[2]), epsilon = 1e-15);
        }
        let mut census = [0; 5];
        for c in &r.children {
            census[c.ttype as usize] += 1;
        }
        assert_eq!(census, [4, 0, 2, 2, 0]);
    }

    #[test]
    fn degenerate_parent_is_rejected() {
        let s = SingularSet::empty();
        let mut p = ref_e_tet();
        p[3] = Point::new(0.5, 0.0, 0.5);
        let err = refine_tet(&Tet::o([0, 1, 2, 3]), &p, &s).unwrap_err();
        assert!(matches!(err, Error::DegenerateChild { .. }));
    }
}
