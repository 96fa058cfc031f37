//! Convergence studies on the model domains.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::domains::{build_domain, DomainSpec};
use crate::error::{Error, Result};
use crate::fem::{h1_diff, prolong, solve_poisson, FEFunction};
use crate::mesh::{check_conformity, refine_mesh, Mesh};

/// Levels above this need `allow_large`.
pub const LEVEL_CAP: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidConfig(format!("unknown format '{s}' (text or csv)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub domain: String,
    pub kappa_edge: f64,
    /// Defaults to 1/2 on the prism and to `kappa_edge` on the Fichera corner.
    pub kappa_vertex: Option<f64>,
    pub levels: u32,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub allow_large: bool,
    /// Run the conformity checker on every level.
    pub verify: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: "prism".into(),
            kappa_edge: 0.2,
            kappa_vertex: None,
            levels: 4,
            tol: 1e-10,
            out: None,
            format: Format::Text,
            allow_large: false,
            verify: true,
        }
    }
}

impl ExperimentConfig {
    pub fn kappa_vertex(&self) -> f64 {
        self.kappa_vertex.unwrap_or(match self.domain.as_str() {
            "fichera" => self.kappa_edge,
            _ => 0.5,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_single()?;
        if self.levels < 2 {
            return Err(Error::InvalidConfig("levels must be at least 2".into()));
        }
        Ok(())
    }

    /// Everything [`validate`](Self::validate) checks except the minimum of
    /// three levels that a rate needs.
    pub fn validate_single(&self) -> Result<()> {
        for (name, k) in [("kappa_edge", self.kappa_edge), ("kappa_vertex", self.kappa_vertex())] {
            if !(k > 0.0 && k <= 0.5) {
                return Err(Error::InvalidConfig(format!("{name} = {k} outside (0, 1/2]")));
            }
        }
        if self.levels > LEVEL_CAP && !self.allow_large {
            return Err(Error::InvalidConfig(format!(
                "levels = {} above {LEVEL_CAP} needs allow_large",
                self.levels
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!("tol = {} outside (0, 1)", self.tol)));
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_file_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse '{v}'")))
        }
        match key.replace('-', "_").as_str() {
            "domain" => self.domain = value.to_string(),
            "kappa_edge" => self.kappa_edge = num(key, value)?,
            "kappa_vertex" => self.kappa_vertex = Some(num(key, value)?),
            "levels" => self.levels = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "allow_large" => self.allow_large = num(key, value)?,
            "verify" => self.verify = num(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn build_domain(&self) -> Result<DomainSpec> {
        build_domain(&self.domain, self.kappa_edge, self.kappa_vertex())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRow {
    pub level: u32,
    pub dofs: usize,
    pub tets: usize,
    pub vertices: usize,
    /// `|u_j - u_{j-1}|_{H^1}`, absent on level 0.
    pub h1_diff: Option<f64>,
    /// `log2(d_j / d_{j+1})` with `d_j = |u_j - u_{j-1}|`; absent on level 0 and the finest level.
    pub rate: Option<f64>,
    pub cg_iters: usize,
    pub residual: f64,
    /// `a(u_j, u_j)` and `(f, u_j)`.
    pub energy: f64,
    pub load_action: f64,
    /// `a(P u_{j-1}, P u_{j-1})` on the level-`j` mesh.
    pub prev_energy: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub domain: String,
    pub kappa_edge: f64,
    pub kappa_vertex: f64,
    pub tol: f64,
    pub rows: Vec<LevelRow>,
}

impl RateTable {
    pub fn rate(&self, level: u32) -> Option<f64> {
        self.rows.iter().find(|r| r.level == level)?.rate
    }
}

/// Refines, solves `-Δu = 1` on every level and records successive differences.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RateTable> {
    run_with_meshes(cfg, |_, _| {})
}

/// As [`run_experiment`], handing each solved level's mesh and solution to `visit`.
pub fn run_with_meshes(
    cfg: &ExperimentConfig,
    mut visit: impl FnMut(&Arc<Mesh>, &FEFunction),
) -> Result<RateTable> {
    cfg.validate()?;
    let domain = cfg.build_domain()?;
    let f = |_: &crate::Point| 1.0;
    let base = domain.mesh.tets.len();

    let mut mesh = Arc::new(domain.mesh.clone());
    let mut rows = Vec::new();
    let mut prev: Option<FEFunction> = None;
    for level in 0..=cfg.levels {
        let start = Instant::now();
        if level > 0 {
            mesh = Arc::new(refine_mesh(&mesh, &domain.singular)?);
        }
        if mesh.tets.len() != base * 8usize.pow(level) {
            return Err(Error::InvalidConfig(format!(
                "level {level}: {} tets, expected {}",
                mesh.tets.len(),
                base * 8usize.pow(level)
            )));
        }
        let sol = solve_poisson(&mesh, &f, cfg.tol)?;
        let (diff, prev_energy) = match &prev {
            Some(p) => {
                let pu = prolong(p, &mesh)?;
                let d = h1_diff(&sol.u, &pu, &sol.stiffness)?;
                (Some(d), sol.stiffness.energy(&pu.coeffs))
            }
            None => (None, 0.0),
        };
        let seconds = start.elapsed().as_secs_f64();
        if cfg.verify {
            let issues = check_conformity(&mesh);
            if !issues.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "level {level} is not conforming: {:?}",
                    &issues[..issues.len().min(3)]
                )));
            }
        }
        visit(&mesh, &sol.u);
        rows.push(LevelRow {
            level,
            dofs: sol.dofs,
            tets: mesh.tets.len(),
            vertices: mesh.num_vertices(),
            h1_diff: diff,
            rate: None,
            cg_iters: sol.cg_iterations,
            residual: sol.residual,
            energy: sol.energy(),
            load_action: sol.load_action(),
            prev_energy,
            seconds,
        });
        prev = Some(sol.u);
    }
    let diffs: Vec<f64> = rows.iter().filter_map(|r| r.h1_diff).collect();
    for (r, rate) in rows[1..].iter_mut().zip(crate::fem::convergence_rates(&diffs)?) {
        r.rate = Some(rate);
    }
    Ok(RateTable {
        domain: domain.name.to_string(),
        kappa_edge: cfg.kappa_edge,
        kappa_vertex: cfg.kappa_vertex(),
        tol: cfg.tol,
        rows,
    })
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map(f).unwrap_or_else(|| "-".into())
}

pub fn emit_table(t: &RateTable, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("level,dofs,tets,h1_diff,rate,cg_iters,seconds\n");
            for r in &t.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{:.3}",
                    r.level,
                    r.dofs,
                    r.tets,
                    r.h1_diff.map(|d| format!("{d:.6e}")).unwrap_or_default(),
                    r.rate.map(|x| format!("{x:.2}")).unwrap_or_default(),
                    r.cg_iters,
                    r.seconds
                );
            }
        }
        Format::Text => {
            let _ = writeln!(
                s,
                "# {}  kappa_e={}  kappa_v={}  cg_tol={:e}",
                t.domain, t.kappa_edge, t.kappa_vertex, t.tol
            );
            let _ = writeln!(
                s,
                "{:>5} {:>9} {:>9} {:>12} {:>6} {:>8} {:>9}",
                "level", "dofs", "tets", "h1_diff", "rate", "cg_iters", "seconds"
            );
            for r in &t.rows {
                let _ = writeln!(
                    s,
                    "{:>5} {:>9} {:>9} {:>12} {:>6} {:>8} {:>9.3}",
                    r.level,
                    r.dofs,
                    r.tets,
                    opt(r.h1_diff, |d| format!("{d:.4e}")),
                    opt(r.rate, |x| format!("{x:.2}")),
                    r.cg_iters,
                    r.seconds
                );
            }
        }
    }
    s
}

/// Rates of several runs side by side: one row per level, one column per run.
pub fn emit_rate_matrix(tables: &[RateTable]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:>3}", "j");
    for t in tables {
        let _ = write!(s, " {:>10}", format!("k={}", t.kappa_edge));
    }
    s.push('\n');
    let max_level = tables.iter().flat_map(|t| t.rows.iter().map(|r| r.level)).max().unwrap_or(0);
    for j in 1..max_level {
        let _ = write!(s, "{j:>3}");
        for t in tables {
            let _ = write!(s, " {:>10}", opt(t.rate(j), |x| format!("{x:.2}")));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_then_overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_file_text("# study\ndomain = fichera\nkappa_edge=0.3 # graded\nlevels = 3\nformat = csv\n")
            .unwrap();
        assert_eq!(c.domain, "fichera");
        assert_eq!(c.kappa_vertex(), 0.3);
        assert_eq!(c.format, Format::Csv);
        c.set("levels", "2").unwrap();
        assert_eq!(c.levels, 2);
        assert!(c.apply_file_text("bogus = 1").is_err());
        assert!(c.apply_file_text("levels").is_err());
    }

    #[test]
    fn level_cap() {
        let c = ExperimentConfig {
            levels: 6,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            levels: 6,
            allow_large: true,
            ..Default::default()
        };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn small_prism_run() {
        let cfg = ExperimentConfig {
            levels: 2,
            ..Default::default()
        };
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[0].dofs, 0);
        assert!(t.rate(1).is_some());
        assert!(t.rate(2).is_none());
        let csv = emit_table(&t, Format::Csv);
        assert!(csv.starts_with("level,dofs,tets,h1_diff,rate,cg_iters,seconds\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
