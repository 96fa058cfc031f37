mod common;

use std::sync::Arc;

use anigrade::domains::{fichera, prism};
use anigrade::experiment::{run_experiment, run_with_meshes, ExperimentConfig};
use anigrade::fem::{apply_dirichlet, assemble, default_max_iter, prolong, solve_cg, solve_poisson, FEFunction};
use anigrade::Point;

use common::hierarchy;

#[test]
fn linear_patch_test_on_graded_meshes() {
    let g = |p: &Point| 1.0 + 2.0 * p.x - 0.5 * p.y + 0.25 * p.z;
    for d in [prism(0.1, 0.5).unwrap(), fichera(0.2, 0.2).unwrap()] {
        let m = hierarchy(&d, 2).pop().unwrap();
        let sys = assemble(&m, &|_: &Point| 0.0).unwrap();
        let exact: Vec<f64> = m.points.iter().map(g).collect();
        let red = apply_dirichlet(&sys, Some(&exact)).unwrap();
        let r = solve_cg(&red.a, &red.b, 1e-14, default_max_iter(red.dofs.len())).unwrap();
        let u = red.expand(&r.x);
        let err = u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{}: {err:e}", d.name);
    }
}

#[test]
fn galerkin_and_pythagoras_identities() {
    let cfg = ExperimentConfig {
        domain: "prism".into(),
        kappa_edge: 0.2,
        levels: 3,
        tol: 1e-12,
        ..Default::default()
    };
    let t = run_experiment(&cfg).unwrap();
    for r in &t.rows[1..] {
        assert!((r.energy - r.load_action).abs() <= 1e-8 * r.energy, "level {}", r.level);
        let d2 = r.h1_diff.unwrap().powi(2);
        let gap = r.energy - r.prev_energy;
        assert!((d2 - gap).abs() <= 1e-6 * d2, "level {}: {d2} vs {gap}", r.level);
    }
}

#[test]
fn prolongation_reproduces_the_coarse_function() {
    let d = prism(0.3, 0.5).unwrap();
    let ms = hierarchy(&d, 2);
    let u = FEFunction::interpolate(Arc::clone(&ms[0]), |p| p.x * p.x - p.y + 3.0 * p.z * p.x);
    let fine = prolong(&u, &ms[2]).unwrap();
    for (i, p) in ms[2].points.iter().enumerate().step_by(7) {
        let coarse = u.eval(p).unwrap();
        assert!((fine.coeffs[i] - coarse).abs() < 1e-12);
    }
}

#[test]
fn solution_is_positive_inside() {
    // f = 1 with zero boundary data.
    let d = prism(0.5, 0.5).unwrap();
    let m = hierarchy(&d, 3).pop().unwrap();
    let sol = solve_poisson(&m, &|_: &Point| 1.0, 1e-12).unwrap();
    let u = &sol.u;
    for (i, p) in m.points.iter().enumerate().step_by(11) {
        if m.is_boundary(i) {
            assert_eq!(u.coeffs[i], 0.0);
            continue;
        }
        assert!(u.coeffs[i] > 0.0, "{p:?}");
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let cfg = ExperimentConfig {
        domain: "fichera".into(),
        kappa_edge: 0.3,
        levels: 2,
        ..Default::default()
    };
    let mut first = Vec::new();
    let a = run_with_meshes(&cfg, |_, u| first.push(u.coeffs.clone())).unwrap();
    let mut second = Vec::new();
    let b = run_with_meshes(&cfg, |_, u| second.push(u.coeffs.clone())).unwrap();
    assert_eq!(first, second);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.h1_diff, y.h1_diff);
        assert_eq!(x.rate, y.rate);
    }
}
