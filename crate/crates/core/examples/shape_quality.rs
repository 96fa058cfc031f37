//! Per-level shape statistics of the graded prism mesh as CSV: the largest
//! face angle, the number of similarity classes, and the largest relative
//! distance and shear coefficient over e- and ev-tetrahedra.
//!
//!     cargo run --release --example shape_quality -- 0.2 4

use std::sync::Arc;

use anigrade::domains::prism;
use anigrade::mesh::refine_mesh;
use anigrade::shape::{quality_csv, quality_row};

fn main() -> anigrade::Result<()> {
    let mut args = std::env::args().skip(1);
    let kappa: f64 = args.next().map_or(0.2, |s| s.parse().expect("kappa"));
    let levels: u32 = args.next().map_or(4, |s| s.parse().expect("levels"));
    let d = prism(kappa, 0.5)?;
    let mut m = Arc::new(d.mesh.clone());
    let mut rows = vec![quality_row(&m, &d.singular)?];
    for _ in 0..levels {
        m = Arc::new(refine_mesh(&m, &d.singular)?);
        rows.push(quality_row(&m, &d.singular)?);
    }
    print!("{}", quality_csv(&rows));
    Ok(())
}
