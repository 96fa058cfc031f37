//! Tetrahedral mesh storage and the graded refinement hierarchy.

use std::fmt;
use std::sync::Arc;

use crate::geometry::{self, Point};

mod classify;
mod conformity;
pub mod io;
mod refine;

pub use classify::{classify_tet, validate_initial_mesh, Classification, Violation};
pub use conformity::{check_conformity, ConformityIssue};
pub use refine::{edge_ratio, refine_mesh, refine_tet, RefinedTet, CHILDREN};

/// Sentinel for "no value" in the packed lineage fields.
pub const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TetType {
    O,
    V,
    VE,
    E,
    EV,
}

impl TetType {
    pub const ALL: [TetType; 5] = [TetType::O, TetType::V, TetType::VE, TetType::E, TetType::EV];

    pub fn name(self) -> &'static str {
        match self {
            TetType::O => "O",
            TetType::V => "V",
            TetType::VE => "VE",
            TetType::E => "E",
            TetType::EV => "EV",
        }
    }

    pub fn has_edge(self) -> bool {
        matches!(self, TetType::E | TetType::EV)
    }
}

impl fmt::Display for TetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a tetrahedron came from in the refinement hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lineage {
    /// Index in the parent mesh, or [`NONE`] at level 0.
    pub parent: u32,
    /// Position 0..8 among the parent's children.
    pub child: u8,
    /// Index of the level-0 ancestor.
    pub root: u32,
    /// Level at which this tet's ancestry first left its root's singular chain
    /// (became an o-tet for v/ve/e roots, stopped being an ev-tet for ev roots).
    pub exit_level: u32,
}

impl Lineage {
    pub fn initial(index: u32) -> Self {
        Lineage {
            parent: NONE,
            child: 0,
            root: index,
            exit_level: NONE,
        }
    }

    pub fn exit_level(&self) -> Option<u32> {
        (self.exit_level != NONE).then_some(self.exit_level)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tet {
    pub verts: [u32; 4],
    pub ttype: TetType,
    /// Singular vertex at `verts[0]` for v- and ev-tets.
    pub vertex_entity: Option<u32>,
    /// Singular edge touched by ve-, e- and ev-tets.
    pub edge_entity: Option<u32>,
    pub lineage: Lineage,
}

impl Tet {
    pub fn new(
        verts: [u32; 4],
        ttype: TetType,
        vertex_entity: Option<u32>,
        edge_entity: Option<u32>,
    ) -> Self {
        Tet {
            verts,
            ttype,
            vertex_entity,
            edge_entity,
            lineage: Lineage::initial(0),
        }
    }

    pub fn o(verts: [u32; 4]) -> Self {
        Tet::new(verts, TetType::O, None, None)
    }
}

/// How a mesh vertex was created.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeProvenance {
    Original,
    /// `(1 - t) * points[a] + t * points[b]` with `a < b`.
    Split { a: u32, b: u32, t: f64 },
}

/// An immutable tetrahedral mesh, optionally linked to the mesh it was refined from.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub points: Vec<Point>,
    pub provenance: Vec<NodeProvenance>,
    pub tets: Vec<Tet>,
    /// Per-vertex bitmask of the boundary facets the vertex lies on (0 = interior).
    pub facets: Vec<u64>,
    pub level: u32,
    pub parent: Option<Arc<Mesh>>,
}

impl Mesh {
    /// A level-0 mesh. Lineage roots are set to the tet indices.
    pub fn initial(points: Vec<Point>, mut tets: Vec<Tet>, facets: Vec<u64>) -> Self {
        assert_eq!(points.len(), facets.len(), "one facet mask per vertex");
        for (i, t) in tets.iter_mut().enumerate() {
            t.lineage = Lineage::initial(i as u32);
        }
        Mesh {
            provenance: vec![NodeProvenance::Original; points.len()],
            points,
            tets,
            facets,
            level: 0,
            parent: None,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_points(&self, t: usize) -> [Point; 4] {
        self.tet_points_of(&self.tets[t])
    }

    pub fn tet_points_of(&self, tet: &Tet) -> [Point; 4] {
        tet.verts.map(|v| self.points[v as usize])
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        geometry::volume(&self.tet_points(t))
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.tet_volume(t)).sum()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.facets[v] != 0
    }

    pub fn census(&self) -> [usize; 5] {
        let mut c = [0; 5];
        for t in &self.tets {
            c[t.ttype as usize] += 1;
        }
        c
    }

    /// The ancestor mesh at `level`, or `self` if `level == self.level`.
    pub fn ancestor(&self, level: u32) -> Option<&Mesh> {
        let mut m = self;
        while m.level > level {
            m = m.parent.as_deref()?;
        }
        (m.level == level).then_some(m)
    }

    /// Index of the level-`level` ancestor of tet `t`.
    pub fn ancestor_tet(&self, t: usize, level: u32) -> Option<usize> {
        let mut m = self;
        let mut idx = t;
        while m.level > level {
            idx = m.tets[idx].lineage.parent as usize;
            m = m.parent.as_deref()?;
        }
        (m.level == level).then_some(idx)
    }

    /// Drops the link to coarser meshes.
    pub fn detached(&self) -> Mesh {
        Mesh {
            parent: None,
            ..self.clone()
        }
    }
}
