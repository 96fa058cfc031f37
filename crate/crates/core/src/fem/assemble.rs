use rayon::prelude::*;

use super::sparse::Csr;
use crate::error::{Error, Result};
use crate::geometry::{self, Point, Vec3};
use crate::mesh::Mesh;

/// Stiffness matrix, load vector and boundary mask of the P1 Poisson problem.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub a: Csr,
    pub b: Vec<f64>,
    pub boundary: Vec<bool>,
}

/// Gradients of the four barycentric coordinates and the volume.
pub fn gradients(p: &[Point; 4]) -> Option<([Vec3; 4], f64)> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let e3 = p[3] - p[0];
    let det = e1.dot(&e2.cross(&e3));
    if det == 0.0 {
        return None;
    }
    let g1 = e2.cross(&e3) / det;
    let g2 = e3.cross(&e1) / det;
    let g3 = e1.cross(&e2) / det;
    Some(([-(g1 + g2 + g3), g1, g2, g3], det.abs() / 6.0))
}

/// Exact P1 element stiffness `vol * grad(phi_i) . grad(phi_j)`.
pub fn element_stiffness(p: &[Point; 4]) -> Option<[[f64; 4]; 4]> {
    let (g, vol) = gradients(p)?;
    let mut k = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            k[i][j] = vol * g[i].dot(&g[j]);
        }
    }
    Some(k)
}

/// Quadrature on the reference tet in barycentric coordinates, weights summing to 1.
pub fn tet_rule(degree: usize) -> Vec<([f64; 4], f64)> {
    match degree {
        0 | 1 => vec![([0.25; 4], 1.0)],
        2 => {
            let a = 0.585_410_196_624_968_5;
            let b = 0.138_196_601_125_010_5;
            (0..4)
                .map(|i| {
                    let mut l = [b; 4];
                    l[i] = a;
                    (l, 0.25)
                })
                .collect()
        }
        _ => crate::quadrature::collapsed_rule(degree)
            .into_iter()
            .map(|(l, w)| (l, w * 6.0))
            .collect(),
    }
}

/// Vertex-to-tet incidence in CSR form, tets in increasing order per vertex.
pub fn incidence(mesh: &Mesh) -> (Vec<usize>, Vec<u32>) {
    let n = mesh.num_vertices();
    let mut count = vec![0usize; n + 1];
    for t in &mesh.tets {
        for &v in &t.verts {
            count[v as usize + 1] += 1;
        }
    }
    for i in 0..n {
        count[i + 1] += count[i];
    }
    let mut fill = count.clone();
    let mut tets = vec![0u32; count[n]];
    for (ti, t) in mesh.tets.iter().enumerate() {
        for &v in &t.verts {
            tets[fill[v as usize]] = ti as u32;
            fill[v as usize] += 1;
        }
    }
    (count, tets)
}

fn element_data(mesh: &Mesh) -> Result<Vec<([Vec3; 4], f64)>> {
    mesh.tets
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let p = mesh.tet_points_of(t);
            let scale = geometry::diameter(&p).powi(3);
            match gradients(&p) {
                Some((g, vol)) if vol > 1e-20 * scale => Ok((g, vol)),
                _ => Err(Error::DegenerateTet {
                    tet: i,
                    volume: geometry::volume(&p),
                }),
            }
        })
        .collect()
}

/// Global stiffness. Each row sums its incident tets in tet order, which keeps the
/// result independent of the thread count.
pub fn assemble_stiffness(mesh: &Mesh) -> Result<Csr> {
    let elems = element_data(mesh)?;
    let (ptr, inc) = incidence(mesh);
    let rows: Vec<Vec<(u32, f64)>> = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<(u32, f64)> = Vec::with_capacity(24);
            for &ti in &inc[ptr[i]..ptr[i + 1]] {
                let t = &mesh.tets[ti as usize];
                let (g, vol) = &elems[ti as usize];
                let li = t.verts.iter().position(|&v| v as usize == i).unwrap();
                for lj in 0..4 {
                    let j = t.verts[lj];
                    let v = vol * g[li].dot(&g[lj]);
                    match row.iter_mut().find(|(c, _)| *c == j) {
                        Some(e) => e.1 += v,
                        None => row.push((j, v)),
                    }
                }
            }
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect();
    Ok(Csr::from_rows(rows))
}

/// Load vector `b_i = int f phi_i` with a quadrature rule exact to `degree`.
pub fn assemble_load<F>(mesh: &Mesh, f: &F, degree: usize) -> Vec<f64>
where
    F: Fn(&Point) -> f64 + Sync,
{
    let rule = tet_rule(degree.max(2));
    let local: Vec<[f64; 4]> = mesh
        .tets
        .par_iter()
        .map(|t| {
            let p = mesh.tet_points_of(t);
            let vol = geometry::volume(&p);
            let mut out = [0.0; 4];
            for (l, w) in &rule {
                let x = Point::from(
                    p[0].coords * l[0] + p[1].coords * l[1] + p[2].coords * l[2] + p[3].coords * l[3],
                );
                let fx = f(&x) * w * vol;
                for k in 0..4 {
                    out[k] += fx * l[k];
                }
            }
            out
        })
        .collect();
    let (ptr, inc) = incidence(mesh);
    (0..mesh.num_vertices())
        .into_par_iter()
        .map(|i| {
            inc[ptr[i]..ptr[i + 1]]
                .iter()
                .map(|&ti| {
                    let t = &mesh.tets[ti as usize];
                    let li = t.verts.iter().position(|&v| v as usize == i).unwrap();
                    local[ti as usize][li]
                })
                .sum()
        })
        .collect()
}

pub fn assemble<F>(mesh: &Mesh, f: &F) -> Result<LinearSystem>
where
    F: Fn(&Point) -> f64 + Sync,
{
    Ok(LinearSystem {
        a: assemble_stiffness(mesh)?,
        b: assemble_load(mesh, f, 2),
        boundary: mesh.facets.iter().map(|&m| m != 0).collect(),
    })
}

/// The interior block after eliminating Dirichlet rows and columns.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub a: Csr,
    pub b: Vec<f64>,
    /// Global vertex index of each reduced unknown.
    pub dofs: Vec<u32>,
    /// Boundary values used for lifting, one per global vertex.
    pub lift: Vec<f64>,
}

impl ReducedSystem {
    /// Scatters a reduced solution back to all vertices.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut u = self.lift.clone();
        for (k, &g) in self.dofs.iter().enumerate() {
            u[g as usize] = x[k];
        }
        u
    }
}

/// Symmetric elimination of boundary vertices. `g` gives boundary values
/// (zero if `None`), moved to the right-hand side.
pub fn apply_dirichlet(sys: &LinearSystem, g: Option<&[f64]>) -> Result<ReducedSystem> {
    let n = sys.a.n;
    let mut map = vec![u32::MAX; n];
    let mut dofs = Vec::new();
    for i in 0..n {
        if !sys.boundary[i] {
            map[i] = dofs.len() as u32;
            dofs.push(i as u32);
        }
    }
    if dofs.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let lift: Vec<f64> = (0..n)
        .map(|i| if sys.boundary[i] { g.map_or(0.0, |g| g[i]) } else { 0.0 })
        .collect();
    let (rows, b): (Vec<Vec<(u32, f64)>>, Vec<f64>) = dofs
        .par_iter()
        .map(|&gi| {
            let mut rhs = sys.b[gi as usize];
            let mut row = Vec::new();
            for (j, v) in sys.a.row(gi as usize) {
                if map[j] != u32::MAX {
                    row.push((map[j], v));
                } else {
                    rhs -= v * lift[j];
                }
            }
            (row, rhs)
        })
        .unzip();
    Ok(ReducedSystem {
        a: Csr::from_rows(rows),
        b,
        dofs,
        lift,
    })
}
