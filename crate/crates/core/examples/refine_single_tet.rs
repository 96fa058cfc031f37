//! One refinement step of each tetrahedron type, showing where the new nodes
//! land and which types the eight children get.
//!
//!     cargo run --example refine_single_tet -- 0.2

use anigrade::mesh::{refine_tet, Tet};
use anigrade::{Point, SingularEntity, SingularSet, TetType};

fn main() -> anigrade::Result<()> {
    let kappa: f64 = std::env::args().nth(1).map_or(0.2, |s| s.parse().expect("kappa"));
    let p = [
        Point::new(0.0, 0.0, 0.0),
        Point::new(0.0, 0.0, 1.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
    ];
    // Vertex 0 is singular, and so is the edge x0 x1.
    let s = SingularSet::new(
        vec![SingularEntity::Vertex(p[0]), SingularEntity::Edge(p[0], Point::new(0.0, 0.0, 2.0))],
        vec![kappa, kappa],
    )?;
    let cases = [
        Tet::o([0, 1, 2, 3]),
        Tet::new([0, 1, 2, 3], TetType::V, Some(0), None),
        Tet::new([0, 1, 2, 3], TetType::VE, None, Some(1)),
        Tet::new([0, 1, 2, 3], TetType::E, None, Some(1)),
        Tet::new([0, 1, 2, 3], TetType::EV, Some(0), Some(1)),
    ];
    for t in cases {
        let r = refine_tet(&t, &p, &s)?;
        println!("{} tet, kappa = {kappa}", t.ttype);
        let names = ["x01", "x02", "x03", "x12", "x13", "x23"];
        for (name, (q, ratio)) in names.iter().zip(r.nodes.iter().zip(r.ratios)) {
            println!("  {name} at t = {ratio:.3}: ({:.3}, {:.3}, {:.3})", q.x, q.y, q.z);
        }
        let kinds: Vec<String> = r.children.iter().map(|c| c.ttype.to_string()).collect();
        println!("  children: {}", kinds.join(" "));
    }
    Ok(())
}
