//! Legacy ASCII VTK output for ParaView and friends.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TetType};

const VTK_TETRA: u8 = 10;

/// Unstructured grid with the tet type as cell data and optional point scalars.
pub fn to_vtk_string(mesh: &Mesh, scalars: Option<(&str, &[f64])>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "graded mesh level {}", mesh.level);
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.num_vertices());
    for p in &mesh.points {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    let n = mesh.num_tets();
    let _ = writeln!(s, "CELLS {n} {}", 5 * n);
    for t in &mesh.tets {
        let [a, b, c, d] = t.verts;
        let _ = writeln!(s, "4 {a} {b} {c} {d}");
    }
    let _ = writeln!(s, "CELL_TYPES {n}");
    for _ in 0..n {
        let _ = writeln!(s, "{VTK_TETRA}");
    }
    let _ = writeln!(s, "CELL_DATA {n}\nSCALARS tet_type int 1\nLOOKUP_TABLE default");
    for t in &mesh.tets {
        let code = TetType::ALL.iter().position(|&x| x == t.ttype).unwrap();
        let _ = writeln!(s, "{code}");
    }
    if let Some((name, values)) = scalars {
        assert_eq!(values.len(), mesh.num_vertices(), "one scalar per vertex");
        let _ = writeln!(s, "POINT_DATA {}\nSCALARS {name} double 1\nLOOKUP_TABLE default", values.len());
        for v in values {
            let _ = writeln!(s, "{v}");
        }
    }
    s
}

pub fn export_vtk(mesh: &Mesh, scalars: Option<(&str, &[f64])>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_vtk_string(mesh, scalars)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::mesh::Tet;

    #[test]
    fn single_tet() {
        let m = Mesh::initial(
            vec![
                Point::origin(),
                Point::new(1.0, 0.0, 0.0),
                Point::new(0.0, 1.0, 0.0),
                Point::new(0.0, 0.0, 1.0),
            ],
            vec![Tet::o([0, 1, 2, 3])],
            vec![1; 4],
        );
        let s = to_vtk_string(&m, Some(("u", &[0.0, 1.0, 2.0, 3.0])));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert!(lines.contains(&"POINTS 4 double"));
        assert!(lines.contains(&"CELLS 1 5"));
        assert!(lines.contains(&"4 0 1 2 3"));
        let ct = lines.iter().position(|l| *l == "CELL_TYPES 1").unwrap();
        assert_eq!(lines[ct + 1], "10");
        assert!(lines.contains(&"POINT_DATA 4"));
        assert_eq!(*lines.last().unwrap(), "3");
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let m = Mesh::initial(vec![], vec![], vec![]);
        let err = export_vtk(&m, None, "/nonexistent-dir/x.vtk").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.vtk"));
    }
}
