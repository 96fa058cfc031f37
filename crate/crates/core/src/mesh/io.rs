//! Line-oriented mesh text format.
//!
//! ```text
//! anigrade-mesh 1
//! level <n>
//! vertices <N>
//! <x> <y> <z>                 (N lines, 17 significant digits)
//! tets <M>
//! <v0> <v1> <v2> <v3> <type>  (M lines)
//! provenance <N>
//! original | <a> <b> <t>      (N lines)
//! boundary <N>
//! <facet mask>                (N lines)
//! ```
//!
//! `<type>` is `O`, `V:<v>`, `VE:<e>`, `E:<e>` or `EV:<v>:<e>` with singular-set
//! indices. Coordinates round-trip bit-exactly. Refinement lineage is not stored,
//! so a loaded mesh has no parent and starts fresh layer bookkeeping.

use std::fmt::Write as _;
use std::path::Path;

use super::{Mesh, NodeProvenance, Tet, TetType};
use crate::error::{Error, Result};
use crate::geometry::Point;

const HEADER: &str = "anigrade-mesh 1";

fn type_token(t: &Tet) -> String {
    let v = t.vertex_entity.unwrap_or(0);
    let e = t.edge_entity.unwrap_or(0);
    match t.ttype {
        TetType::O => "O".into(),
        TetType::V => format!("V:{v}"),
        TetType::VE => format!("VE:{e}"),
        TetType::E => format!("E:{e}"),
        TetType::EV => format!("EV:{v}:{e}"),
    }
}

pub fn to_string(mesh: &Mesh) -> String {
    let mut s = String::with_capacity(64 * mesh.points.len() + 48 * mesh.tets.len());
    let n = mesh.points.len();
    let _ = writeln!(s, "{HEADER}\nlevel {}\nvertices {n}", mesh.level);
    for p in &mesh.points {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    let _ = writeln!(s, "tets {}", mesh.tets.len());
    for t in &mesh.tets {
        let [a, b, c, d] = t.verts;
        let _ = writeln!(s, "{a} {b} {c} {d} {}", type_token(t));
    }
    let _ = writeln!(s, "provenance {n}");
    for p in &mesh.provenance {
        match p {
            NodeProvenance::Original => s.push_str("original\n"),
            NodeProvenance::Split { a, b, t } => {
                let _ = writeln!(s, "{a} {b} {t:.16e}");
            }
        }
    }
    let _ = writeln!(s, "boundary {n}");
    for f in &mesh.facets {
        let _ = writeln!(s, "{f}");
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() && !l.starts_with('#') {
                return Ok(l);
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<usize> {
        let l = self.next()?;
        let rest = l
            .strip_prefix(key)
            .ok_or_else(|| self.err(format!("expected '{key} <count>'")))?;
        rest.trim().parse().map_err(|_| self.err(format!("bad {key} count")))
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("cannot parse '{s}'")))
    }
}

fn parse_type(lines: &Lines, tok: &str) -> Result<(TetType, Option<u32>, Option<u32>)> {
    let mut it = tok.split(':');
    let kind = it.next().unwrap_or("");
    let ids: Vec<u32> = it.map(|s| lines.parse(s)).collect::<Result<_>>()?;
    Ok(match (kind, ids.as_slice()) {
        ("O", []) => (TetType::O, None, None),
        ("V", [v]) => (TetType::V, Some(*v), None),
        ("VE", [e]) => (TetType::VE, None, Some(*e)),
        ("E", [e]) => (TetType::E, None, Some(*e)),
        ("EV", [v, e]) => (TetType::EV, Some(*v), Some(*e)),
        _ => return Err(lines.err(format!("bad tetrahedron type '{tok}'"))),
    })
}

pub fn from_str(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != HEADER {
        return Err(lines.err(format!("expected header '{HEADER}'")));
    }
    let level = lines.keyed("level")? as u32;
    let n = lines.keyed("vertices")?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let l = lines.next()?;
        let c: Vec<f64> = l.split_whitespace().map(|s| lines.parse(s)).collect::<Result<_>>()?;
        if c.len() != 3 || !c.iter().all(|x| x.is_finite()) {
            return Err(lines.err("expected three finite coordinates"));
        }
        points.push(Point::new(c[0], c[1], c[2]));
    }
    let m = lines.keyed("tets")?;
    let mut tets = Vec::with_capacity(m);
    for _ in 0..m {
        let l = lines.next()?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 5 {
            return Err(lines.err("expected four vertex ids and a type"));
        }
        let mut verts = [0u32; 4];
        for i in 0..4 {
            verts[i] = lines.parse(f[i])?;
            if verts[i] as usize >= n {
                return Err(lines.err(format!("vertex id {} out of range", verts[i])));
            }
        }
        let (ttype, v, e) = parse_type(&lines, f[4])?;
        tets.push(Tet::new(verts, ttype, v, e));
    }
    if lines.keyed("provenance")? != n {
        return Err(lines.err("provenance count differs from vertex count"));
    }
    let mut provenance = Vec::with_capacity(n);
    for _ in 0..n {
        let l = lines.next()?;
        if l == "original" {
            provenance.push(NodeProvenance::Original);
            continue;
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(lines.err("expected 'original' or 'a b t'"));
        }
        let (a, b, t): (u32, u32, f64) = (lines.parse(f[0])?, lines.parse(f[1])?, lines.parse(f[2])?);
        if a >= b || b as usize >= n || !(t > 0.0 && t < 1.0) {
            return Err(lines.err("invalid split record"));
        }
        provenance.push(NodeProvenance::Split { a, b, t });
    }
    if lines.keyed("boundary")? != n {
        return Err(lines.err("boundary count differs from vertex count"));
    }
    let mut facets = Vec::with_capacity(n);
    for _ in 0..n {
        let l = lines.next()?;
        facets.push(lines.parse(l)?);
    }
    let mut mesh = Mesh::initial(points, tets, facets);
    mesh.provenance = provenance;
    mesh.level = level;
    Ok(mesh)
}

pub fn write(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_string(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let pts = vec![
            Point::new(0.1, 0.2, 0.30000000000000004),
            Point::new(1.0 / 3.0, 0.0, 0.0),
            Point::new(0.0, std::f64::consts::PI, 0.0),
            Point::new(0.0, 0.0, 1e-300),
        ];
        let mut m = Mesh::initial(
            pts,
            vec![Tet::new([0, 1, 2, 3], TetType::EV, Some(1), Some(4))],
            vec![0, 3, 5, 1 << 40],
        );
        m.provenance[3] = NodeProvenance::Split { a: 0, b: 2, t: 0.3 };
        let back = from_str(&to_string(&m)).unwrap();
        assert_eq!(back.points, m.points);
        assert_eq!(back.tets[0].verts, m.tets[0].verts);
        assert_eq!(back.tets[0].ttype, TetType::EV);
        assert_eq!(back.tets[0].vertex_entity, Some(1));
        assert_eq!(back.provenance, m.provenance);
        assert_eq!(back.facets, m.facets);
    }

    #[test]
    fn bad_header_reports_line() {
        let err = from_str("\nnot-a-mesh\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
