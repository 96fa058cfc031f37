//! Graded against quasi-uniform refinement at the Fichera corner, with the
//! same grading on the corner and on the three edges.
//!
//!     cargo run --release --example fichera_study -- 4

use anigrade::experiment::{emit_rate_matrix, emit_table, run_experiment, ExperimentConfig, Format};

fn main() -> anigrade::Result<()> {
    let levels: u32 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("levels"));
    let mut tables = Vec::new();
    for kappa in [0.3, 0.5] {
        let cfg = ExperimentConfig {
            domain: "fichera".into(),
            kappa_edge: kappa,
            levels,
            allow_large: true,
            ..Default::default()
        };
        let t = run_experiment(&cfg)?;
        print!("{}", emit_table(&t, Format::Text));
        tables.push(t);
    }
    println!();
    print!("{}", emit_rate_matrix(&tables));
    Ok(())
}
