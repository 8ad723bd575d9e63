//! Cyclic Jacobi rotations for small symmetric matrices.

use ndarray::Array2;

use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// Diagonalizes `a` in place. Returns the (unsorted) eigenvalues and the
/// accumulated rotation matrix whose columns are the eigenvectors.
pub(crate) fn jacobi_eig(mut a: Array2<f64>) -> Result<(Vec<f64>, Array2<f64>), LinalgError> {
    let n = a.nrows();
    let mut v = Array2::<f64>::eye(n);
    let scale = a.iter().map(|x| x * x).sum::<f64>();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * scale {
            return Ok(((0..n).map(|i| a[[i, i]]).collect(), v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                a[[p, p]] = app - t * apq;
                a[[q, q]] = aqq + t * apq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[[r, p]];
                        let arq = a[[r, q]];
                        let np = c * arp - s * arq;
                        let nq = s * arp + c * arq;
                        a[[r, p]] = np;
                        a[[p, r]] = np;
                        a[[r, q]] = nq;
                        a[[q, r]] = nq;
                    }
                }
                for r in 0..n {
                    let vrp = v[[r, p]];
                    let vrq = v[[r, q]];
                    v[[r, p]] = c * vrp - s * vrq;
                    v[[r, q]] = s * vrp + c * vrq;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence("cyclic Jacobi"))
}
