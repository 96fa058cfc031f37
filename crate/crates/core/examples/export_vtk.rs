//! Writes the graded prism mesh and its Poisson solution for ParaView.
//! Cell data `tet_type` is 0..4 for O, V, VE, E, EV.
//!
//!     cargo run --release --example export_vtk -- prism_l3.vtk 3

use std::sync::Arc;

use anigrade::domains::prism;
use anigrade::fem::solve_poisson;
use anigrade::mesh::refine_mesh;
use anigrade::vtk::export_vtk;

fn main() -> anigrade::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "prism.vtk".into());
    let levels: u32 = args.next().map_or(2, |s| s.parse().expect("levels"));
    let d = prism(0.2, 0.5)?;
    let mut m = Arc::new(d.mesh.clone());
    for _ in 0..levels {
        m = Arc::new(refine_mesh(&m, &d.singular)?);
    }
    let sol = solve_poisson(&m, &|_: &anigrade::Point| 1.0, 1e-10)?;
    export_vtk(&m, Some(("u", &sol.u.coeffs)), &path)?;
    println!("{path}: {} points, {} tets", m.num_vertices(), m.num_tets());
    Ok(())
}
