#![allow(dead_code)]

use std::sync::Arc;

use anigrade::domains::DomainSpec;
use anigrade::mesh::{refine_mesh, Mesh};
use anigrade::weighted::Jet;
use anigrade::Point;
use nalgebra::{Matrix3, Vector3};

pub fn hierarchy(d: &DomainSpec, levels: u32) -> Vec<Arc<Mesh>> {
    let mut out = vec![Arc::new(d.mesh.clone())];
    for _ in 0..levels {
        let next = refine_mesh(out.last().unwrap(), &d.singular).unwrap();
        out.push(Arc::new(next));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `rho^gamma` with `rho` the distance to the z-axis.
pub fn radial_power(gamma: f64) -> impl Fn(&Point) -> Jet + Sync {
    move |p: &Point| {
        let r2 = p.x * p.x + p.y * p.y;
        let r = r2.sqrt();
        let q = Vector3::new(p.x, p.y, 0.0) / r;
        let d1 = gamma * r.powf(gamma - 1.0);
        let d2 = gamma * (gamma - 1.0) * r.powf(gamma - 2.0);
        let tang = Matrix3::identity() - q * q.transpose() - Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0));
        Jet {
            value: r.powf(gamma),
            gradient: q * d1,
            hessian: q * q.transpose() * d2 + tang * (d1 / r),
        }
    }
}

/// `int_{(0,1)^3} g(rho) dx` for `rho` the distance to the edge `x = y = 0`,
/// reduced to the arc length of each circle inside the unit square.
pub fn unit_cube_radial_integral(g: &dyn Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let arc = |r: f64| {
        if r <= 1.0 {
            std::f64::consts::FRAC_PI_2 * r
        } else {
            r * (std::f64::consts::FRAC_PI_2 - 2.0 * (1.0 / r).acos())
        }
    };
    let mut pts = vec![0.0];
    pts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < 2f64.sqrt()));
    pts.push(1.0);
    pts.push(2f64.sqrt());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |r: f64| g(r) * arc(r);
    // r = t^6 flattens an integrable power singularity at the edge.
    let near = |t: f64| if t == 0.0 { 0.0 } else { f(t.powi(6)) * 6.0 * t.powi(5) };
    let head = simpson(&near, 0.0, pts[1].powf(1.0 / 6.0), 1e-13);
    head + pts[1..].windows(2).map(|w| simpson(&f, w[0], w[1], 1e-13)).sum::<f64>()
}
