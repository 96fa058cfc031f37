use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anigrade::experiment::{emit_rate_matrix, emit_table, run_experiment, ExperimentConfig, Format};
use anigrade::fem::solve_poisson;
use anigrade::mesh::{self, refine_mesh};
use anigrade::shape::max_face_angle;
use anigrade::{vtk, Error, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(version, about = "Graded tetrahedral refinement toward edges and corners")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Refine the initial mesh and report per-level counts. `--out` saves the
    /// finest mesh (`.vtk` for VTK, anything else for the native format).
    Refine(Opts),
    /// Solve -Δu = 1 on the finest level. `--out` saves a VTK file with the solution.
    Solve(Opts),
    /// Solve on every level and report H1 differences and rates. A
    /// comma-separated `--kappa-edge` runs one study per value.
    Study(Opts),
}

#[derive(clap::Args)]
struct Opts {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// prism, fichera or edge-box.
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, value_delimiter = ',')]
    kappa_edge: Vec<f64>,
    #[arg(long)]
    kappa_vertex: Option<f64>,
    #[arg(long)]
    levels: Option<u32>,
    /// Relative CG residual.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// text or csv.
    #[arg(long)]
    format: Option<String>,
    /// Permit levels above 5.
    #[arg(long)]
    allow_large: bool,
}

impl Opts {
    /// One config per edge grading value.
    fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        let mut base = ExperimentConfig::default();
        if let Some(path) = &self.config {
            base.apply_file(path)?;
        }
        if let Some(d) = &self.domain {
            base.domain = d.clone();
        }
        if self.kappa_vertex.is_some() {
            base.kappa_vertex = self.kappa_vertex;
        }
        if let Some(l) = self.levels {
            base.levels = l;
        }
        if let Some(t) = self.tol {
            base.tol = t;
        }
        if self.out.is_some() {
            base.out = self.out.clone();
        }
        if let Some(f) = &self.format {
            base.format = f.parse()?;
        }
        base.allow_large |= self.allow_large;
        if self.kappa_edge.is_empty() {
            return Ok(vec![base]);
        }
        Ok(self
            .kappa_edge
            .iter()
            .map(|&k| ExperimentConfig {
                kappa_edge: k,
                ..base.clone()
            })
            .collect())
    }
}

fn single(opts: &Opts) -> Result<ExperimentConfig> {
    let mut cfgs = opts.configs()?;
    if cfgs.len() != 1 {
        return Err(Error::InvalidConfig("a list of edge gradings needs the study command".into()));
    }
    let cfg = cfgs.pop().unwrap();
    cfg.validate_single()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn refine(opts: &Opts) -> Result<()> {
    let cfg = single(opts)?;
    let domain = cfg.build_domain()?;
    let mut m = Arc::new(domain.mesh.clone());
    let mut s = String::new();
    let csv = cfg.format == Format::Csv;
    if csv {
        s.push_str("level,tets,vertices,O,V,VE,E,EV,max_angle_deg\n");
    } else {
        let _ = writeln!(
            s,
            "# {}  kappa_e={}  kappa_v={}\n{:>5} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7} {:>7} {:>9}",
            domain.name,
            cfg.kappa_edge,
            cfg.kappa_vertex(),
            "level",
            "tets",
            "vertices",
            "O",
            "V",
            "VE",
            "E",
            "EV",
            "max_angle"
        );
    }
    for level in 0..=cfg.levels {
        if level > 0 {
            m = Arc::new(refine_mesh(&m, &domain.singular)?);
        }
        let c = m.census();
        let angle = max_face_angle(&m).to_degrees();
        if csv {
            let _ = writeln!(
                s,
                "{level},{},{},{},{},{},{},{},{angle:.4}",
                m.num_tets(),
                m.num_vertices(),
                c[0],
                c[1],
                c[2],
                c[3],
                c[4]
            );
        } else {
            let _ = writeln!(
                s,
                "{level:>5} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7} {:>7} {angle:>9.3}",
                m.num_tets(),
                m.num_vertices(),
                c[0],
                c[1],
                c[2],
                c[3],
                c[4]
            );
        }
    }
    print!("{s}");
    if let Some(path) = &cfg.out {
        if path.extension().is_some_and(|e| e == "vtk") {
            vtk::export_vtk(&m, None, path)?;
        } else {
            mesh::io::write(&m, path)?;
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn solve(opts: &Opts) -> Result<()> {
    let cfg = single(opts)?;
    let domain = cfg.build_domain()?;
    let mut m = Arc::new(domain.mesh.clone());
    for _ in 0..cfg.levels {
        m = Arc::new(refine_mesh(&m, &domain.singular)?);
    }
    let sol = solve_poisson(&m, &|_: &anigrade::Point| 1.0, cfg.tol)?;
    let max_u = sol.u.coeffs.iter().copied().fold(0.0, f64::max);
    let text = match cfg.format {
        Format::Csv => format!(
            "level,dofs,tets,cg_iters,residual,energy,max_u\n{},{},{},{},{:e},{:.12e},{:.12e}\n",
            cfg.levels,
            sol.dofs,
            m.num_tets(),
            sol.cg_iterations,
            sol.residual,
            sol.energy(),
            max_u
        ),
        Format::Text => format!(
            "{} level {}: {} dofs, {} tets\ncg: {} iterations, relative residual {:e}\nenergy a(u,u) = {:.12e}, max u = {:.6e}\n",
            domain.name,
            cfg.levels,
            sol.dofs,
            m.num_tets(),
            sol.cg_iterations,
            sol.residual,
            sol.energy(),
            max_u
        ),
    };
    print!("{text}");
    if let Some(path) = &cfg.out {
        vtk::export_vtk(&m, Some(("u", &sol.u.coeffs)), path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn study(opts: &Opts) -> Result<()> {
    let cfgs = opts.configs()?;
    let mut tables = Vec::new();
    let mut text = String::new();
    for cfg in &cfgs {
        let t = run_experiment(cfg)?;
        text.push_str(&emit_table(&t, cfg.format));
        tables.push(t);
    }
    if tables.len() > 1 && cfgs[0].format == Format::Text {
        text.push_str("\n# rates by level (rows) and kappa_e (columns)\n");
        text.push_str(&emit_rate_matrix(&tables));
    }
    emit(cfgs[0].out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Refine(o) => refine(o),
        Cmd::Solve(o) => solve(o),
        Cmd::Study(o) => study(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
