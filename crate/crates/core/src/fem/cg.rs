use rayon::prelude::*;

use super::sparse::{dot, norm, Csr};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `|b - A x| / |b|`.
    pub residual: f64,
}

pub fn default_max_iter(n: usize) -> usize {
    ((50.0 * (n as f64).sqrt()).ceil() as usize).max(100)
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
pub fn solve_cg(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<CgResult> {
    let n = a.n;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(CgResult {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 1..=max_iter {
        a.mul_into(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        x.par_iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut().zip(&q).for_each(|(r, q)| *r -= alpha * q);
        res = norm(&r) / bnorm;
        if res <= tol {
            // Confirm with the true residual to guard against drift.
            let ax = a.mul(&x);
            let true_res = norm(&b.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()) / bnorm;
            if true_res <= tol {
                return Ok(CgResult {
                    x,
                    iterations: it,
                    residual: true_res,
                });
            }
            r = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        }
        z.par_iter_mut()
            .zip(r.par_iter().zip(&inv_diag))
            .for_each(|(z, (r, d))| *z = r * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_identity_in_one_step() {
        let a = Csr::from_rows((0..5).map(|i| vec![(i as u32, 3.0)]).collect());
        let b = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let r = solve_cg(&a, &b, 1e-12, 10).unwrap();
        assert_eq!(r.iterations, 1);
        assert!((r.x[4] - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reports_no_convergence() {
        // 1D Laplacian needs more than two iterations.
        let n = 50;
        let rows = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                if i > 0 {
                    r.push((i as u32 - 1, -1.0));
                }
                r.push((i as u32, 2.0));
                if i + 1 < n {
                    r.push((i as u32 + 1, -1.0));
                }
                r
            })
            .collect();
        let a = Csr::from_rows(rows);
        let err = solve_cg(&a, &vec![1.0; n], 1e-10, 2).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }));
    }
}
