//! Collapsed-coordinate Gauss rules on the reference tetrahedron.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_01(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("at least one node"));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

/// Product Gauss rule pushed through the Duffy map
/// `(u, v, w) -> (u, v (1 - u), w (1 - u)(1 - v))`, exact for polynomials of
/// total degree `degree`. Returns barycentric coordinates and weights summing
/// to the reference volume `1/6`. All points are strictly interior.
pub fn collapsed_rule(degree: usize) -> Vec<([f64; 4], f64)> {
    let n = (degree + 3).div_ceil(2);
    let g = gauss_01(n);
    let mut out = Vec::with_capacity(n * n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            for &(w, ww) in &g {
                let x = u;
                let y = v * (1.0 - u);
                let z = w * (1.0 - u) * (1.0 - v);
                let jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                out.push(([1.0 - x - y - z, x, y, z], wu * wv * ww * jac));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &[([f64; 4], f64)], f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        rule.iter().map(|(l, w)| w * f(l[1], l[2], l[3])).sum()
    }

    #[test]
    fn monomials_exact() {
        // int_T x^a y^b z^c = a! b! c! / (a + b + c + 3)!
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for degree in [2, 4, 6] {
            let rule = collapsed_rule(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let c = degree as u32 - a - b;
                    let exact = fact(a) * fact(b) * fact(c) / fact(a + b + c + 3);
                    let q = integrate(&rule, |x, y, z| x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32));
                    assert!((q - exact).abs() < 1e-15, "x^{a} y^{b} z^{c}");
                }
            }
        }
    }

    #[test]
    fn points_are_interior() {
        for (l, _) in collapsed_rule(4) {
            assert!(l.iter().all(|&x| x > 0.0));
        }
    }
}
