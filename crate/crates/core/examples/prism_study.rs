//! Convergence rates on the prism with a reentrant edge, one column per
//! edge grading. Levels 4 run in seconds; level 6 takes minutes and ~1.5 GB.
//!
//!     cargo run --release --example prism_study -- 5 0.1,0.2,0.3,0.4,0.5

use anigrade::experiment::{emit_rate_matrix, run_experiment, ExperimentConfig};

fn main() -> anigrade::Result<()> {
    let mut args = std::env::args().skip(1);
    let levels: u32 = args.next().map_or(4, |s| s.parse().expect("levels"));
    let kappas: Vec<f64> = args
        .next()
        .unwrap_or_else(|| "0.1,0.2,0.3,0.4,0.5".into())
        .split(',')
        .map(|k| k.parse().expect("kappa"))
        .collect();
    let mut tables = Vec::new();
    for &k in &kappas {
        let cfg = ExperimentConfig {
            domain: "prism".into(),
            kappa_edge: k,
            kappa_vertex: Some(0.5),
            levels,
            allow_large: true,
            ..Default::default()
        };
        let t = run_experiment(&cfg)?;
        let last = t.rows.last().unwrap();
        eprintln!("kappa_e = {k}: {} dofs at level {levels}", last.dofs);
        tables.push(t);
    }
    print!("{}", emit_rate_matrix(&tables));
    Ok(())
}
