use rustc_hash::FxHashMap;

use super::{Mesh, NodeProvenance};
use crate::geometry::{self, Point, TET_FACES};

const PROVENANCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ConformityIssue {
    RepeatedVertex { tet: usize },
    /// A face shared by more than two tetrahedra.
    FaceMultiplicity { face: [u32; 3], count: usize },
    /// A vertex lying inside an unmatched face: the neighbour across it is split differently.
    HangingNode { face: [u32; 3], vertex: u32 },
    /// Two nodes created on the same parent edge.
    InconsistentSplit { a: u32, b: u32, nodes: (u32, u32) },
    ProvenanceMismatch { vertex: u32, error: f64 },
}

fn sorted3(mut f: [u32; 3]) -> [u32; 3] {
    f.sort_unstable();
    f
}

/// Face-sharing, hanging-node and provenance checks. Empty means conforming.
pub fn check_conformity(mesh: &Mesh) -> Vec<ConformityIssue> {
    let mut out = Vec::new();
    let mut faces: FxHashMap<[u32; 3], usize> = FxHashMap::default();
    for (t, tet) in mesh.tets.iter().enumerate() {
        let v = tet.verts;
        if (0..4).any(|i| (i + 1..4).any(|j| v[i] == v[j])) {
            out.push(ConformityIssue::RepeatedVertex { tet: t });
            continue;
        }
        for f in TET_FACES {
            *faces.entry(sorted3(f.map(|i| v[i]))).or_default() += 1;
        }
    }
    let mut open: Vec<[u32; 3]> = Vec::new();
    for (&face, &count) in &faces {
        match count {
            1 => open.push(face),
            2 => {}
            _ => out.push(ConformityIssue::FaceMultiplicity { face, count }),
        }
    }
    open.sort_unstable();
    out.extend(hanging_nodes(mesh, &open));

    let mut splits: FxHashMap<(u32, u32), u32> = FxHashMap::default();
    for (i, prov) in mesh.provenance.iter().enumerate() {
        if let NodeProvenance::Split { a, b, t } = *prov {
            let (pa, pb) = (mesh.points[a as usize], mesh.points[b as usize]);
            let expect = geometry::lerp(&pa, &pb, t);
            let scale = pa.coords.norm().max(pb.coords.norm()).max(1.0);
            let error = (mesh.points[i] - expect).norm() / scale;
            if error > PROVENANCE_TOL {
                out.push(ConformityIssue::ProvenanceMismatch {
                    vertex: i as u32,
                    error,
                });
            }
            if let Some(&other) = splits.get(&(a, b)) {
                out.push(ConformityIssue::InconsistentSplit {
                    a,
                    b,
                    nodes: (other, i as u32),
                });
            } else {
                splits.insert((a, b), i as u32);
            }
        }
    }
    out
}

/// Vertices lying on unmatched faces without being one of their corners.
fn hanging_nodes(mesh: &Mesh, open: &[[u32; 3]]) -> Vec<ConformityIssue> {
    if open.is_empty() || mesh.points.is_empty() {
        return Vec::new();
    }
    let mut lo = mesh.points[0];
    let mut hi = mesh.points[0];
    for p in &mesh.points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let extent = (hi - lo).max().max(1e-300);
    let n = ((mesh.points.len() as f64).cbrt().ceil() as usize).clamp(1, 128);
    let cell = |p: &Point| -> [usize; 3] {
        std::array::from_fn(|k| (((p[k] - lo[k]) / extent * n as f64) as usize).min(n - 1))
    };
    let mut grid: FxHashMap<[usize; 3], Vec<u32>> = FxHashMap::default();
    for (i, p) in mesh.points.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i as u32);
    }

    let mut out = Vec::new();
    for &face in open {
        let [a, b, c] = face.map(|v| mesh.points[v as usize]);
        let normal = (b - a).cross(&(c - a));
        let area2 = normal.norm();
        let diam = (b - a).norm().max((c - a).norm()).max((c - b).norm());
        let tol = 1e-9 * diam;
        let (flo, fhi) = (a.inf(&b).inf(&c), a.sup(&b).sup(&c));
        let (clo, chi) = (cell(&flo), cell(&fhi));
        for i in clo[0]..=chi[0] {
            for j in clo[1]..=chi[1] {
                for k in clo[2]..=chi[2] {
                    let Some(bucket) = grid.get(&[i, j, k]) else {
                        continue;
                    };
                    for &v in bucket {
                        if face.contains(&v) {
                            continue;
                        }
                        let p = mesh.points[v as usize];
                        if (p - a).dot(&normal).abs() > tol * area2 {
                            continue;
                        }
                        // Barycentric coordinates inside the triangle.
                        let l0 = (b - p).cross(&(c - p)).dot(&normal) / (area2 * area2);
                        let l1 = (c - p).cross(&(a - p)).dot(&normal) / (area2 * area2);
                        let l2 = 1.0 - l0 - l1;
                        if l0 >= -1e-9 && l1 >= -1e-9 && l2 >= -1e-9 {
                            out.push(ConformityIssue::HangingNode { face, vertex: v });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{Mesh, Tet};
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn two_tets_sharing_a_face() {
        let pts = vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.), p(0., 0., -1.)];
        let m = Mesh::initial(
            pts,
            vec![Tet::o([0, 1, 2, 3]), Tet::o([0, 1, 2, 4])],
            vec![0; 5],
        );
        assert!(check_conformity(&m).is_empty());
    }

    #[test]
    fn half_face_neighbours_are_flagged() {
        // Tet A has face (0,1,2); tets B and C meet it through halves split at node 5.
        let pts = vec![
            p(0., 0., 0.),
            p(1., 0., 0.),
            p(0., 1., 0.),
            p(0., 0., 1.),
            p(0., 0., -1.),
            p(0.5, 0.5, 0.),
        ];
        let m = Mesh::initial(
            pts,
            vec![Tet::o([0, 1, 2, 3]), Tet::o([0, 1, 5, 4]), Tet::o([0, 5, 2, 4])],
            vec![0; 6],
        );
        let issues = check_conformity(&m);
        assert!(issues.contains(&ConformityIssue::HangingNode {
            face: [0, 1, 2],
            vertex: 5
        }));
    }
}
