//! P1 finite elements for `-Δu = f`, `u = 0` on the boundary.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::mesh::{Mesh, NodeProvenance};

mod assemble;
mod cg;
mod sparse;

pub use assemble::{
    apply_dirichlet, assemble, assemble_load, assemble_stiffness, element_stiffness, gradients,
    incidence, tet_rule, LinearSystem, ReducedSystem,
};
pub use cg::{default_max_iter, solve_cg, CgResult};
pub use sparse::{dot, norm, Csr};

/// A continuous piecewise-linear function: one coefficient per mesh vertex.
#[derive(Clone, Debug)]
pub struct FEFunction {
    pub mesh: Arc<Mesh>,
    pub coeffs: Vec<f64>,
}

impl FEFunction {
    pub fn new(mesh: Arc<Mesh>, coeffs: Vec<f64>) -> Self {
        assert_eq!(mesh.num_vertices(), coeffs.len());
        FEFunction { mesh, coeffs }
    }

    pub fn zero(mesh: Arc<Mesh>) -> Self {
        let n = mesh.num_vertices();
        FEFunction::new(mesh, vec![0.0; n])
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn(&Point) -> f64) -> Self {
        let coeffs = mesh.points.iter().map(f).collect();
        FEFunction::new(mesh, coeffs)
    }

    /// Value on tet `t` at point `p`.
    pub fn eval_in(&self, t: usize, p: &Point) -> Option<f64> {
        let tet = &self.mesh.tets[t];
        let l = geometry::barycentric(&self.mesh.tet_points_of(tet), p)?;
        Some((0..4).map(|k| l[k] * self.coeffs[tet.verts[k] as usize]).sum())
    }

    /// Value at `p` by linear search for a containing tet.
    pub fn eval(&self, p: &Point) -> Option<f64> {
        let t = locate(&self.mesh, p)?;
        self.eval_in(t, p)
    }

    /// Constant gradient on tet `t`.
    pub fn gradient(&self, t: usize) -> nalgebra::Vector3<f64> {
        let tet = &self.mesh.tets[t];
        let (g, _) = gradients(&self.mesh.tet_points_of(tet)).expect("non-degenerate tet");
        (0..4).map(|k| g[k] * self.coeffs[tet.verts[k] as usize]).sum()
    }
}

/// First tet whose closure contains `p` (with a small tolerance).
pub fn locate(mesh: &Mesh, p: &Point) -> Option<usize> {
    (0..mesh.num_tets()).find(|&t| {
        geometry::barycentric(&mesh.tet_points(t), p).is_some_and(|l| l.iter().all(|&x| x >= -1e-12))
    })
}

/// Interpolates a coarse function onto a descendant mesh by walking the
/// split records level by level; the result is the same piecewise-linear function.
pub fn prolong(coarse: &FEFunction, fine: &Arc<Mesh>) -> Result<FEFunction> {
    let mut chain = Vec::new();
    let mut m = fine;
    while !Arc::ptr_eq(m, &coarse.mesh) {
        chain.push(Arc::clone(m));
        m = m.parent.as_ref().ok_or(Error::NotAncestor)?;
    }
    let mut u = coarse.coeffs.clone();
    for mesh in chain.iter().rev() {
        u.reserve(mesh.num_vertices() - u.len());
        for prov in &mesh.provenance[u.len()..] {
            match *prov {
                NodeProvenance::Split { a, b, t } => {
                    let v = (1.0 - t) * u[a as usize] + t * u[b as usize];
                    u.push(v);
                }
                NodeProvenance::Original => return Err(Error::NotAncestor),
            }
        }
    }
    Ok(FEFunction::new(Arc::clone(fine), u))
}

/// `|u - v|_{H^1}` from the assembled stiffness on their common mesh.
pub fn h1_diff(u: &FEFunction, v: &FEFunction, stiffness: &Csr) -> Result<f64> {
    if !Arc::ptr_eq(&u.mesh, &v.mesh) || stiffness.n != u.coeffs.len() {
        return Err(Error::MeshMismatch);
    }
    let w: Vec<f64> = u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a - b).collect();
    Ok(stiffness.energy(&w).max(0.0).sqrt())
}

/// `rate_j = log2(d_j / d_{j+1})` for consecutive differences.
pub fn convergence_rates(diffs: &[f64]) -> Result<Vec<f64>> {
    if let Some(index) = diffs.iter().position(|&d| !(d > f64::MIN_POSITIVE)) {
        return Err(Error::ZeroDiff { index });
    }
    Ok(diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// A solved Poisson problem on one mesh.
#[derive(Clone, Debug)]
pub struct Solution {
    pub u: FEFunction,
    /// Pre-boundary-condition stiffness.
    pub stiffness: Csr,
    pub load: Vec<f64>,
    pub dofs: usize,
    pub cg_iterations: usize,
    pub residual: f64,
}

impl Solution {
    /// `a(u, u)`.
    pub fn energy(&self) -> f64 {
        self.stiffness.energy(&self.u.coeffs)
    }

    /// `(f, u)`.
    pub fn load_action(&self) -> f64 {
        dot(&self.load, &self.u.coeffs)
    }
}

/// Assembles and solves with homogeneous Dirichlet data. A mesh without
/// interior vertices yields the zero function.
pub fn solve_poisson<F>(mesh: &Arc<Mesh>, f: &F, tol: f64) -> Result<Solution>
where
    F: Fn(&Point) -> f64 + Sync,
{
    let sys = assemble(mesh, f)?;
    let (coeffs, dofs, iters, res) = match apply_dirichlet(&sys, None) {
        Ok(red) => {
            let r = solve_cg(&red.a, &red.b, tol, default_max_iter(red.dofs.len()))?;
            (red.expand(&r.x), red.dofs.len(), r.iterations, r.residual)
        }
        Err(Error::EmptyInterior) => (vec![0.0; mesh.num_vertices()], 0, 0, 0.0),
        Err(e) => return Err(e),
    };
    Ok(Solution {
        u: FEFunction::new(Arc::clone(mesh), coeffs),
        stiffness: sys.a,
        load: sys.b,
        dofs,
        cg_iterations: iters,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Tet;

    fn ref_tet() -> Mesh {
        Mesh::initial(
            vec![
                Point::origin(),
                Point::new(1.0, 0.0, 0.0),
                Point::new(0.0, 1.0, 0.0),
                Point::new(0.0, 0.0, 1.0),
            ],
            vec![Tet::o([0, 1, 2, 3])],
            vec![1; 4],
        )
    }

    #[test]
    fn element_stiffness_rows_sum_to_zero() {
        let m = ref_tet();
        let k = element_stiffness(&m.tet_points(0)).unwrap();
        for row in k {
            assert!(row.iter().sum::<f64>().abs() < 1e-15);
        }
        assert!((k[0][0] - 0.5).abs() < 1e-15);
        assert!((k[1][1] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn load_sums_to_volume() {
        let m = ref_tet();
        let b = assemble_load(&m, &|_: &Point| 1.0, 2);
        assert!((b.iter().sum::<f64>() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rates_from_diffs() {
        let r = convergence_rates(&[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(r, vec![1.0, 1.0]);
        let r = convergence_rates(&[1.0, 2f64.powf(-0.86)]).unwrap();
        assert!((r[0] - 0.86).abs() < 1e-14);
        assert!(matches!(convergence_rates(&[1.0, 0.0]), Err(Error::ZeroDiff { index: 1 })));
    }

    #[test]
    fn h1_diff_kills_constants() {
        let m = Arc::new(ref_tet());
        let a = assemble_stiffness(&m).unwrap();
        let u = FEFunction::new(Arc::clone(&m), vec![3.0; 4]);
        let z = FEFunction::zero(Arc::clone(&m));
        assert!(h1_diff(&u, &z, &a).unwrap() < 1e-15);
        assert_eq!(h1_diff(&z, &z, &a).unwrap(), 0.0);
        let other = Arc::new(ref_tet());
        assert!(matches!(
            h1_diff(&u, &FEFunction::zero(other), &a),
            Err(Error::MeshMismatch)
        ));
    }
}
