//! Saves a refined mesh in the native text format, reads it back, and keeps
//! refining the loaded copy.

use std::sync::Arc;

use anigrade::domains::fichera;
use anigrade::mesh::{check_conformity, io, refine_mesh};

fn main() -> anigrade::Result<()> {
    let d = fichera(0.3, 0.3)?;
    let mut m = Arc::new(d.mesh.clone());
    for _ in 0..2 {
        m = Arc::new(refine_mesh(&m, &d.singular)?);
    }
    let path = std::env::temp_dir().join("fichera_l2.mesh");
    io::write(&m, &path)?;
    let loaded = Arc::new(io::read(&path)?);
    assert_eq!(loaded.points, m.points);
    assert_eq!(loaded.num_tets(), m.num_tets());
    println!("{}: {} vertices, {} tets", path.display(), loaded.num_vertices(), loaded.num_tets());

    let next = refine_mesh(&loaded, &d.singular)?;
    println!("refined copy: {} tets, {} conformity issues", next.num_tets(), check_conformity(&next).len());
    Ok(())
}
