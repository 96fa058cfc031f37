//! Shape quantities of graded meshes: relative distances along singular
//! edges, reference maps, mesh layers, face angles and similarity classes.

use std::fmt::Write as _;

use nalgebra::Matrix3;
use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::geometry::{self, Point, Vec3, TET_EDGES, TET_FACES};
use crate::mesh::{edge_ratio, refine_tet, Mesh, Tet, TetType, CHILDREN};
use crate::singular::SingularSet;

/// Orthonormal frame with `ez` along a singular edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeFrame {
    pub origin: Point,
    pub ex: Vec3,
    pub ey: Vec3,
    pub ez: Vec3,
}

impl EdgeFrame {
    /// `ez` points from `x0` to `x1`; `x2` lies in the xz-plane at positive x.
    /// The origin is `x0`.
    pub fn new(x0: &Point, x1: &Point, x2: &Point) -> Result<Self> {
        let d = x1 - x0;
        let len = d.norm();
        if len < 1e-14 {
            return Err(Error::ZeroEdgeLength(len));
        }
        let ez = d / len;
        let r = x2 - x0;
        let perp = r - ez * r.dot(&ez);
        if perp.norm() <= 1e-12 * r.norm().max(len) {
            return Err(Error::FrameMismatch {
                tet: 0,
                reason: "x2 lies on the edge line".into(),
            });
        }
        let ex = perp.normalize();
        Ok(EdgeFrame {
            origin: *x0,
            ex,
            ey: ez.cross(&ex),
            ez,
        })
    }

    pub fn with_origin(&self, origin: Point) -> Self {
        EdgeFrame { origin, ..*self }
    }

    pub fn local(&self, p: &Point) -> Vec3 {
        let d = p - self.origin;
        Vec3::new(d.dot(&self.ex), d.dot(&self.ey), d.dot(&self.ez))
    }

    pub fn axis_distance(&self, p: &Point) -> f64 {
        let l = self.local(p);
        l.x.hypot(l.y)
    }
}

/// `[[c_{x2,1}, c_{x2,2}], [c_{x3,1}, c_{x3,2}]]` of a tet whose singular
/// segment is `p[0] p[1]`, with `p[0]` the first vertex.
pub fn relative_z_distances(p: &[Point; 4], frame: &EdgeFrame) -> Result<[[f64; 2]; 2]> {
    let d = p[1] - p[0];
    let len2 = d.norm_squared();
    if len2.sqrt() < 1e-14 {
        return Err(Error::ZeroEdgeLength(len2.sqrt()));
    }
    let tol = 1e-9 * geometry::diameter(p);
    if frame.axis_distance(&p[0]) > tol || frame.axis_distance(&p[1]) > tol {
        return Err(Error::FrameMismatch {
            tet: 0,
            reason: "singular segment is off the frame axis".into(),
        });
    }
    Ok([2, 3].map(|k| {
        let c1 = (p[k] - p[0]).dot(&d) / len2;
        [c1, 1.0 - c1]
    }))
}

/// The absolute relative distance `c_T`.
pub fn absolute_distance(p: &[Point; 4], frame: &EdgeFrame) -> Result<f64> {
    let c = relative_z_distances(p, frame)?;
    Ok(c.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// `c_T` of an e- or ev-tet measured along its own singular segment.
pub fn tet_absolute_distance(p: &[Point; 4]) -> Result<f64> {
    let frame = EdgeFrame::new(&p[0], &p[1], &p[2])?;
    absolute_distance(p, &frame)
}

/// `[[s, 0, 0], [0, s, 0], [b1 s, b2 s, w]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefMap {
    pub s: f64,
    pub w: f64,
    pub b1: f64,
    pub b2: f64,
}

impl RefMap {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.s,
            0.0,
            0.0,
            0.0,
            self.s,
            0.0,
            self.b1 * self.s,
            self.b2 * self.s,
            self.w,
        )
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.matrix() * v
    }
}

/// The isotropic dilation `kappa^-i I` of a v- or ve-tet layer.
pub fn dilation_v(i: u32, kappa: f64) -> RefMap {
    debug_assert!(kappa > 0.0 && kappa <= 0.5);
    let s = kappa.powi(-(i as i32));
    RefMap {
        s,
        w: s,
        b1: 0.0,
        b2: 0.0,
    }
}

/// Reference tet of an e- or ev-root: `x0, x1` on the z-axis symmetric about
/// the origin, `x2, x3` dropped to the plane `z = -l0/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceTet {
    /// Root frame with its origin at the root edge midpoint.
    pub frame: EdgeFrame,
    pub l0: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub xi3: f64,
}

impl ReferenceTet {
    pub fn new(root: &[Point; 4]) -> Result<Self> {
        let f = EdgeFrame::new(&root[0], &root[1], &root[2])?;
        let frame = f.with_origin(Point::from((root[0].coords + root[1].coords) * 0.5));
        let l2 = frame.local(&root[2]);
        let l3 = frame.local(&root[3]);
        if l3.y.abs() < 1e-12 * (root[1] - root[0]).norm() {
            return Err(Error::FrameMismatch {
                tet: 0,
                reason: "root tet is flat".into(),
            });
        }
        Ok(ReferenceTet {
            frame,
            l0: (root[1] - root[0]).norm(),
            lambda2: l2.x,
            lambda3: l3.x,
            xi3: l3.y,
        })
    }

    pub fn vertices(&self) -> [Vec3; 4] {
        let h = 0.5 * self.l0;
        [
            Vec3::new(0.0, 0.0, -h),
            Vec3::new(0.0, 0.0, h),
            Vec3::new(self.lambda2, 0.0, -h),
            Vec3::new(self.lambda3, self.xi3, -h),
        ]
    }

    /// Bound on `|b1|, |b2|` for descendants whose absolute distances stay below `c`.
    pub fn shear_bound(&self, c: f64) -> f64 {
        let c = c.max(1.0);
        let b1 = c * self.l0 / self.lambda2.abs();
        let b2 = c * self.l0 * (self.lambda2.abs() + self.lambda3.abs()) / (self.lambda2 * self.xi3).abs();
        b1.max(b2)
    }

    /// Shear coefficients making `[[s,0,0],[0,s,0],[b1 s,b2 s,w]]` send the
    /// off-edge vertices to the plane `z = -l0/2`.
    fn map_for(&self, local: &[Vec3; 4], s: f64, w: f64) -> RefMap {
        let (z2, z3) = (local[2].z, local[3].z);
        let h = 0.5 * self.l0;
        let (l2, l3, x3) = (self.lambda2, self.lambda3, self.xi3);
        RefMap {
            s,
            w,
            b1: -(w * z2 + h) / l2,
            b2: (w * (z2 * l3 - l2 * z3) + h * (l3 - l2)) / (l2 * x3),
        }
    }
}

/// A tet in reference-map coordinates together with the vertices it should land on.
#[derive(Clone, Copy, Debug)]
pub struct MappedTet {
    pub map: RefMap,
    /// Tet vertices in the root frame, origin at the map's centre. Chains
    /// born inside an ev-tet are first pulled back by that tet's map.
    pub local: [Vec3; 4],
    pub target: [Vec3; 4],
}

impl MappedTet {
    pub fn images(&self) -> [Vec3; 4] {
        self.local.map(|v| self.map.apply(&v))
    }

    /// Largest vertex mismatch relative to the target diameter.
    pub fn error(&self) -> f64 {
        let img = self.images();
        let diam = TET_EDGES
            .iter()
            .map(|&(a, b)| (self.target[a] - self.target[b]).norm())
            .fold(0.0, f64::max);
        (0..4).map(|k| (img[k] - self.target[k]).norm()).fold(0.0, f64::max) / diam
    }
}

fn edge_kappa(tet: &Tet, s: &SingularSet, t: usize) -> Result<f64> {
    tet.edge_entity.map(|e| s.kappa(e as usize)).ok_or(Error::FrameMismatch {
        tet: t,
        reason: "no singular edge".into(),
    })
}

fn local_about_edge(rt: &ReferenceTet, p: &[Point; 4], t: usize) -> Result<[Vec3; 4]> {
    let frame = rt.frame.with_origin(Point::from((p[0].coords + p[1].coords) * 0.5));
    let tol = 1e-9 * geometry::diameter(p);
    if frame.axis_distance(&p[0]) > tol || frame.axis_distance(&p[1]) > tol {
        return Err(Error::FrameMismatch {
            tet: t,
            reason: "singular segment is off the root axis".into(),
        });
    }
    Ok(p.map(|q| frame.local(&q)))
}

/// First tet of the unbroken e-chain containing tet `t`: `(level, index)`.
pub fn e_chain_root(mesh: &Mesh, t: usize) -> Result<(u32, usize)> {
    let mut m = mesh;
    let mut idx = t;
    while m.level > 0 {
        let parent = m.parent.as_deref().ok_or(Error::AncestryError(t))?;
        let pi = m.tets[idx].lineage.parent as usize;
        if parent.tets[pi].ttype != TetType::E {
            break;
        }
        m = parent;
        idx = pi;
    }
    Ok((m.level, idx))
}

/// Affine map applied to an e-chain before it is measured: the identity for
/// chains that start in the initial mesh, the parent's ev-map for chains that
/// start inside an ev-tet. Either way the chain root lands on a shape that
/// does not depend on the level it was born at.
#[derive(Clone, Copy, Debug)]
struct Pullback(Option<(EdgeFrame, RefMap)>);

impl Pullback {
    fn apply(&self, p: &Point) -> Point {
        match &self.0 {
            None => *p,
            Some((f, m)) => Point::from(m.apply(&f.local(p))),
        }
    }
}

fn ev_parts(mesh: &Mesh, t: usize, s: &SingularSet) -> Result<(ReferenceTet, EdgeFrame, [Vec3; 4], RefMap)> {
    let tet = &mesh.tets[t];
    if tet.ttype != TetType::EV {
        return Err(Error::FrameMismatch {
            tet: t,
            reason: format!("{} tet, expected EV", tet.ttype),
        });
    }
    let v = tet.vertex_entity.expect("ev-tet has a vertex") as usize;
    let root_mesh = mesh.ancestor(0).ok_or(Error::AncestryError(t))?;
    let rt = ReferenceTet::new(&root_mesh.tet_points(tet.lineage.root as usize))?;
    let i = mesh.level as i32;
    let p = mesh.tet_points(t);
    let local = local_about_edge(&rt, &p, t)?;
    let frame = rt.frame.with_origin(Point::from((p[0].coords + p[1].coords) * 0.5));
    let map = rt.map_for(&local, s.kappa_ev(v).powi(-i), s.kappa(v).powi(-i));
    Ok((rt, frame, local, map))
}

/// Level of the e-chain root through tet `t`, its reference tet, and the pull-back.
fn e_chain(mesh: &Mesh, t: usize, s: &SingularSet) -> Result<(u32, ReferenceTet, Pullback)> {
    let (level, root) = e_chain_root(mesh, t)?;
    let root_mesh = mesh.ancestor(level).ok_or(Error::AncestryError(t))?;
    let pull = if level == 0 {
        Pullback(None)
    } else {
        let pm = root_mesh.parent.as_deref().ok_or(Error::AncestryError(t))?;
        let pi = root_mesh.tets[root].lineage.parent as usize;
        if pm.tets[pi].ttype != TetType::EV {
            return Err(Error::AncestryError(t));
        }
        let (_, frame, _, map) = ev_parts(pm, pi, s)?;
        Pullback(Some((frame, map)))
    };
    let rt = ReferenceTet::new(&root_mesh.tet_points(root).map(|p| pull.apply(&p)))?;
    Ok((level, rt, pull))
}

/// `B_{e,i}` for an e-tet, `i` counted from the start of its e-chain.
pub fn reference_map_e(mesh: &Mesh, t: usize, s: &SingularSet) -> Result<MappedTet> {
    let tet = &mesh.tets[t];
    if tet.ttype != TetType::E {
        return Err(Error::FrameMismatch {
            tet: t,
            reason: format!("{} tet, expected E", tet.ttype),
        });
    }
    let kappa = edge_kappa(tet, s, t)?;
    let (root_level, rt, pull) = e_chain(mesh, t, s)?;
    let i = (mesh.level - root_level) as i32;
    let local = local_about_edge(&rt, &mesh.tet_points(t).map(|p| pull.apply(&p)), t)?;
    Ok(MappedTet {
        map: rt.map_for(&local, kappa.powi(-i), 2f64.powi(i)),
        local,
        target: rt.vertices(),
    })
}

/// `B_{ev,i}` for an ev-tet at level `i`.
pub fn reference_map_ev(mesh: &Mesh, t: usize, s: &SingularSet) -> Result<MappedTet> {
    let (rt, _, local, map) = ev_parts(mesh, t, s)?;
    Ok(MappedTet {
        map,
        local,
        target: rt.vertices(),
    })
}

/// `B_{i,k}` for a ve-tet whose ve-chain starts at a child of an e-tet.
/// Returns the map and `(i, k)` counted from the start of that e-chain.
pub fn reference_map_ve(mesh: &Mesh, t: usize, s: &SingularSet) -> Result<(MappedTet, u32, u32)> {
    let tet = &mesh.tets[t];
    if tet.ttype != TetType::VE {
        return Err(Error::FrameMismatch {
            tet: t,
            reason: format!("{} tet, expected VE", tet.ttype),
        });
    }
    let kappa = edge_kappa(tet, s, t)?;
    // Climb to the first ve-tet of the chain.
    let mut m = mesh;
    let mut idx = t;
    loop {
        let parent = m.parent.as_deref().ok_or(Error::AncestryError(t))?;
        let pi = m.tets[idx].lineage.parent as usize;
        match parent.tets[pi].ttype {
            TetType::VE => {
                m = parent;
                idx = pi;
            }
            TetType::E => break,
            _ => return Err(Error::AncestryError(t)),
        }
    }
    let child = m.tets[idx].lineage.child as usize;
    let parent = m.parent.as_deref().expect("checked above");
    let pi = m.tets[idx].lineage.parent as usize;
    let (root_level, rt, pull) = e_chain(parent, pi, s)?;

    let k = m.level - root_level;
    let i = mesh.level - root_level;
    let pp = parent.tet_points(pi).map(|p| pull.apply(&p));
    let pmap = rt.map_for(&local_about_edge(&rt, &pp, pi)?, kappa.powi(1 - k as i32), 2f64.powi(k as i32 - 1));
    let frame = rt.frame.with_origin(Point::from((pp[0].coords + pp[1].coords) * 0.5));
    let local = mesh.tet_points(t).map(|q| frame.local(&pull.apply(&q)));

    // The matching child of the once-refined reference tet.
    let rv = rt.vertices();
    let mut all = [Vec3::zeros(); 10];
    all[..4].copy_from_slice(&rv);
    for (n, &(a, b)) in TET_EDGES.iter().enumerate() {
        let r = edge_ratio(TetType::E, a, b, None, Some(kappa), None)?;
        all[4 + n] = rv[a] * (1.0 - r) + rv[b] * r;
    }
    let target = CHILDREN[child].map(|c| all[c]);

    let map = RefMap {
        s: kappa.powi(1 - i as i32),
        w: 2f64.powi(k as i32 - 1) * kappa.powi(k as i32 - i as i32),
        b1: pmap.b1,
        b2: pmap.b2,
    };
    Ok((MappedTet { map, local, target }, i, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerKind {
    Vertex,
    Edge,
    EdgeVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LayerIndex {
    pub root: u32,
    pub layer: u32,
    pub kind: LayerKind,
}

/// Layer of every tet descended from a singular initial tet; `None` under
/// o-roots and on meshes without ancestry.
pub fn mesh_layers(mesh: &Mesh) -> Vec<Option<LayerIndex>> {
    let Some(root_mesh) = mesh.ancestor(0) else {
        return vec![None; mesh.num_tets()];
    };
    mesh.tets
        .iter()
        .map(|t| {
            let kind = match root_mesh.tets[t.lineage.root as usize].ttype {
                TetType::O => return None,
                TetType::V | TetType::VE => LayerKind::Vertex,
                TetType::E => LayerKind::Edge,
                TetType::EV => LayerKind::EdgeVertex,
            };
            Some(LayerIndex {
                root: t.lineage.root,
                layer: t.lineage.exit_level().map_or(mesh.level, |l| l - 1),
                kind,
            })
        })
        .collect()
}

/// Largest interior angle over the four faces.
pub fn tet_max_face_angle(p: &[Point; 4]) -> f64 {
    let mut m = 0.0f64;
    for f in TET_FACES {
        for k in 0..3 {
            m = m.max(geometry::angle(&p[f[k]], &p[f[(k + 1) % 3]], &p[f[(k + 2) % 3]]));
        }
    }
    m
}

/// Largest face angle in the mesh, in radians.
pub fn max_face_angle(mesh: &Mesh) -> f64 {
    mesh.tets
        .par_iter()
        .map(|t| tet_max_face_angle(&mesh.tet_points_of(t)))
        .reduce(|| 0.0, f64::max)
}

const SIGNATURE_QUANTUM: f64 = 1e-9;

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

/// Shape signature invariant under similarity: the lexicographically smallest
/// scaled edge-length vector over all vertex orderings, quantized.
pub fn shape_signature(p: &[Point; 4]) -> [i64; 6] {
    let lens: Vec<Vec<f64>> = (0..4)
        .map(|a| (0..4).map(|b| (p[a] - p[b]).norm()).collect())
        .collect();
    let scale = lens.iter().flatten().fold(0.0f64, |m, &x| m.max(x));
    permutations()
        .iter()
        .map(|q| TET_EDGES.map(|(a, b)| (lens[q[a]][q[b]] / scale / SIGNATURE_QUANTUM).round() as i64))
        .min()
        .expect("24 permutations")
}

/// Number of distinct shapes among the selected tets.
pub fn similarity_classes_where<F>(mesh: &Mesh, select: F) -> usize
where
    F: Fn(&Tet) -> bool + Sync,
{
    let sigs: Vec<[i64; 6]> = mesh
        .tets
        .par_iter()
        .filter(|t| select(t))
        .map(|t| shape_signature(&mesh.tet_points_of(t)))
        .collect();
    sigs.into_iter().collect::<FxHashSet<_>>().len()
}

pub fn similarity_classes(mesh: &Mesh) -> usize {
    similarity_classes_where(mesh, |_| true)
}

/// Max face angle over the full `n`-fold refinement of a single tet, for
/// `n = 0..=levels`. Only singular descendants are refined; o-tets are
/// evaluated through their children, whose shapes repeat at every depth.
pub fn chain_max_face_angles(root: &Tet, p: &[Point; 4], s: &SingularSet, levels: u32) -> Result<Vec<f64>> {
    let children = |t: &Tet, q: &[Point; 4]| -> Result<Vec<(Tet, [Point; 4])>> {
        let r = refine_tet(t, q, s)?;
        let mut all = [Point::origin(); 10];
        all[..4].copy_from_slice(q);
        all[4..].copy_from_slice(&r.nodes);
        Ok(r.children.iter().map(|c| (*c, c.verts.map(|v| all[v as usize]))).collect())
    };
    let o_descendants_max = |q: &[Point; 4]| -> Result<f64> {
        let mut m = 0.0f64;
        for (c, cq) in children(&Tet::o([0, 1, 2, 3]), q)? {
            m = m.max(tet_max_face_angle(&cq));
            for (_, gq) in children(&c, &cq)? {
                m = m.max(tet_max_face_angle(&gq));
            }
        }
        Ok(m)
    };

    let mut singular = vec![(*root, *p)];
    // Max over o-tets born so far, split by whether they have been refined yet.
    let mut fresh: Vec<[Point; 4]> = Vec::new();
    let mut settled = 0.0f64;
    let mut seen = FxHashSet::default();
    let mut out = Vec::with_capacity(levels as usize + 1);
    for n in 0..=levels {
        let mut m = settled;
        for (_, q) in &singular {
            m = m.max(tet_max_face_angle(q));
        }
        for q in &fresh {
            m = m.max(tet_max_face_angle(q));
        }
        out.push(m);
        if n == levels {
            break;
        }
        for q in fresh.drain(..) {
            settled = settled.max(o_descendants_max(&q)?);
        }
        let mut next = Vec::new();
        for (t, q) in &singular {
            for (c, cq) in children(t, q)? {
                if c.ttype == TetType::O {
                    if seen.insert(shape_signature(&cq)) {
                        fresh.push(cq);
                    }
                } else {
                    next.push((c, cq));
                }
            }
        }
        singular = next;
    }
    Ok(out)
}

/// Per-level quality summary.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityRow {
    pub level: u32,
    pub max_angle_deg: f64,
    pub similarity_classes: usize,
    /// Over e- and ev-tets; absent when there are none.
    pub max_c_t: Option<f64>,
    pub max_b1: Option<f64>,
    pub max_b2: Option<f64>,
}

pub fn quality_row(mesh: &Mesh, s: &SingularSet) -> Result<QualityRow> {
    let edge_tets: Vec<usize> = (0..mesh.num_tets()).filter(|&t| mesh.tets[t].ttype.has_edge()).collect();
    let stats: Vec<(f64, f64, f64)> = edge_tets
        .par_iter()
        .map(|&t| {
            let c = tet_absolute_distance(&mesh.tet_points(t))?;
            let m = match mesh.tets[t].ttype {
                TetType::E => reference_map_e(mesh, t, s)?,
                _ => reference_map_ev(mesh, t, s)?,
            };
            Ok((c, m.map.b1.abs(), m.map.b2.abs()))
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&(f64, f64, f64)) -> f64| stats.iter().map(f).reduce(f64::max);
    Ok(QualityRow {
        level: mesh.level,
        max_angle_deg: max_face_angle(mesh).to_degrees(),
        similarity_classes: similarity_classes(mesh),
        max_c_t: max(|x| x.0),
        max_b1: max(|x| x.1),
        max_b2: max(|x| x.2),
    })
}

pub fn quality_csv(rows: &[QualityRow]) -> String {
    let mut s = String::from("level,max_angle_deg,similarity_classes,max_cT,max_|b1|,max_|b2|\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.4},{},{},{},{}",
            r.level,
            r.max_angle_deg,
            r.similarity_classes,
            opt(r.max_c_t),
            opt(r.max_b1),
            opt(r.max_b2)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular::SingularEntity;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    fn z_axis_frame() -> EdgeFrame {
        EdgeFrame::new(&p(0.0, 0.0, 0.0), &p(0.0, 0.0, 1.0), &p(1.0, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn relative_distances_basic() {
        let f = z_axis_frame();
        let t = [p(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.5)];
        let c = relative_z_distances(&t, &f).unwrap();
        assert_eq!(c[0], [0.0, 1.0]);
        assert_eq!(c[1], [0.5, 0.5]);
        let t = [p(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0), p(1.0, 0.0, -1.0), p(0.0, 1.0, 2.0)];
        let c = relative_z_distances(&t, &f).unwrap();
        assert_eq!(c[0], [-1.0, 2.0]);
        assert_eq!(c[1], [2.0, -1.0]);
        assert_eq!(absolute_distance(&t, &f).unwrap(), 2.0);
    }

    #[test]
    fn relative_distance_errors() {
        let f = z_axis_frame();
        let t = [p(0.0, 0.0, 0.0), p(0.0, 0.0, 1e-15), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        assert!(matches!(relative_z_distances(&t, &f), Err(Error::ZeroEdgeLength(_))));
        let t = [p(0.1, 0.0, 0.0), p(0.1, 0.0, 1.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        assert!(matches!(relative_z_distances(&t, &f), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn child_distance_scales_by_two_kappa() {
        // Parent c_{x2,1} = -1; the first e-child sees 2 kappa c.
        let kappa = 0.25;
        let s = SingularSet::new(vec![SingularEntity::Edge(p(0.0, 0.0, -5.0), p(0.0, 0.0, 5.0))], vec![kappa]).unwrap();
        let pts = [p(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0), p(1.0, 0.0, -1.0), p(0.3, 1.0, 0.5)];
        let tet = Tet::new([0, 1, 2, 3], TetType::E, None, Some(0));
        let r = refine_tet(&tet, &pts, &s).unwrap();
        let mut all = [Point::origin(); 10];
        all[..4].copy_from_slice(&pts);
        all[4..].copy_from_slice(&r.nodes);
        let a = r.children[0].verts.map(|v| all[v as usize]);
        let c = relative_z_distances(&a, &z_axis_frame()).unwrap();
        assert!((c[0][0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn reference_map_of_reference_tet_is_identity() {
        let rt = ReferenceTet::new(&[p(0.0, 0.0, 0.0), p(0.0, 0.0, 2.0), p(1.0, 0.0, 0.0), p(0.2, 0.7, 0.0)]).unwrap();
        let local = rt.vertices();
        let m = rt.map_for(&local, 1.0, 1.0);
        assert_eq!((m.s, m.w), (1.0, 1.0));
        assert!(m.b1.abs() < 1e-15 && m.b2.abs() < 1e-15);
        assert_eq!(m.matrix(), Matrix3::identity());
    }

    #[test]
    fn dilation() {
        assert_eq!(dilation_v(0, 0.3).matrix(), Matrix3::identity());
        assert_eq!(dilation_v(2, 0.5).matrix(), Matrix3::from_diagonal_element(4.0));
    }

    #[test]
    fn signature_ignores_order_and_scale() {
        let a = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0)];
        let b = [a[2], a[0], a[3], a[1]].map(|q| Point::from(q.coords * 3.0 + Vec3::new(1.0, 2.0, 3.0)));
        assert_eq!(shape_signature(&a), shape_signature(&b));
        let c = [a[0], a[1], a[2], p(0.0, 0.0, 2.0)];
        assert_ne!(shape_signature(&a), shape_signature(&c));
    }

    #[test]
    fn right_angles() {
        let a = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0)];
        assert!((tet_max_face_angle(&a) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
