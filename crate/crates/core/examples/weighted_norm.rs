//! Weighted first-order seminorm of `rho^gamma` near an edge, evaluated on
//! graded meshes of the unit cube and compared with the radial integral.
//!
//!     cargo run --release --example weighted_norm -- 0.6667 1.0

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use anigrade::domains::edge_box;
use anigrade::mesh::refine_mesh;
use anigrade::weighted::{Analytic, Jet, Regions, WeightVector, WeightedNorm};
use anigrade::Point;
use nalgebra::{Matrix3, Vector3};

fn main() -> anigrade::Result<()> {
    let mut args = std::env::args().skip(1);
    let gamma: f64 = args.next().map_or(2.0 / 3.0, |s| s.parse().expect("gamma"));
    let mu: f64 = args.next().map_or(1.0, |s| s.parse().expect("mu"));

    let u = Analytic(move |p: &Point| {
        let r = p.x.hypot(p.y);
        Jet {
            value: r.powf(gamma),
            gradient: Vector3::new(p.x, p.y, 0.0) * (gamma * r.powf(gamma - 2.0)),
            hessian: Matrix3::zeros(),
        }
    });
    let d = edge_box(0.2)?;
    let regions = Regions::new(&d.singular)?;
    let w = WeightVector(vec![mu]);
    let norm = WeightedNorm::new(&regions, &w);

    // Midpoint sum of the radial integral: the weight applies inside the
    // edge cylinder, plain H^1 outside; the arc length accounts for the cube.
    let re = regions.radii().edge;
    let n = 200_000;
    let exact: f64 = (0..n)
        .map(|k| {
            let r = 2f64.sqrt() * (k as f64 + 0.5) / n as f64;
            let arc = if r <= 1.0 { FRAC_PI_2 * r } else { r * (FRAC_PI_2 - 2.0 * (1.0 / r).acos()) };
            let g = gamma * r.powf(gamma - 1.0);
            let w = if r < re { r.powf(1.0 - mu) } else { 1.0 };
            (g * w).powi(2) * arc * 2f64.sqrt() / n as f64
        })
        .sum();

    println!("gamma = {gamma}, mu = {mu}, reference {exact:.6}");
    let mut m = Arc::new(d.mesh.clone());
    for level in 0..=4 {
        if level > 0 {
            m = Arc::new(refine_mesh(&m, &d.singular)?);
        }
        let q = norm.parts(&u, &m, 1)?[1];
        println!("level {level}: {q:.6}  relative error {:+.2e}", q / exact - 1.0);
    }
    Ok(())
}
