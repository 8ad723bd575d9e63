//! Lanczos iteration with full reorthogonalization for the leading
//! eigenpairs of a dense symmetric matrix.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{tridiagonal, LinalgError};

const START_SEED: u64 = 0x5eed_1a9c_205e_ed00;
const CHECK_EVERY: usize = 8;
const RESIDUAL_TOL: f64 = 1e-13;

/// Leading `count` eigenpairs of the symmetric matrix `a`, eigenvalues in
/// descending order. Eigenvectors are returned as columns, without any sign
/// normalization.
pub(crate) fn leading_eigenpairs(
    a: ArrayView2<'_, f64>,
    count: usize,
) -> Result<(Vec<f64>, Array2<f64>), LinalgError> {
    let d = a.nrows();
    debug_assert!(count >= 1 && count <= d);
    let norm_bound = a.iter().map(|x| x.abs()).fold(0.0_f64, f64::max) * d as f64;
    if norm_bound == 0.0 {
        let mut vecs = Array2::zeros((d, count));
        for i in 0..count {
            vecs[[i, i]] = 1.0;
        }
        return Ok((vec![0.0; count], vecs));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(d.min(256));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut q = random_unit(&mut rng, d, &basis);
    loop {
        let mut w = a.dot(&q);
        let a_j = q.dot(&w);
        w.scaled_add(-a_j, &q);
        if let (Some(b), Some(prev)) = (beta.last(), basis.last()) {
            w.scaled_add(-*b, prev);
        }
        basis.push(q);
        alpha.push(a_j);
        // Two passes of classical Gram-Schmidt keep the basis orthogonal to
        // working precision.
        for _ in 0..2 {
            for v in &basis {
                let proj = v.dot(&w);
                w.scaled_add(-proj, v);
            }
        }
        let b_j = w.dot(&w).sqrt();
        let steps = basis.len();

        let exhausted = steps == d;
        let breakdown = b_j <= 1e-14 * norm_bound;
        if exhausted || (steps >= count && (steps.is_multiple_of(CHECK_EVERY) || breakdown)) {
            let (theta, s) = ritz(&alpha, &beta)?;
            let scale = theta
                .iter()
                .fold(0.0_f64, |m, t| m.max(t.abs()))
                .max(f64::MIN_POSITIVE);
            let converged = exhausted
                || (0..count).all(|i| (b_j * s[[steps - 1, i]]).abs() <= RESIDUAL_TOL * scale);
            if converged {
                let q_mat = stack_columns(&basis, d);
                let vecs = q_mat.dot(&s.slice(ndarray::s![.., 0..count]));
                return Ok((theta[..count].to_vec(), vecs));
            }
        }

        if breakdown {
            // Invariant subspace reached: continue from a fresh direction
            // orthogonal to everything seen so far.
            beta.push(0.0);
            q = random_unit(&mut rng, d, &basis);
        } else {
            beta.push(b_j);
            q = w / b_j;
        }
    }
}

/// Eigenpairs of the Lanczos tridiagonal matrix, descending.
fn ritz(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Array2<f64>), LinalgError> {
    let k = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; k];
    e[..k - 1].copy_from_slice(&beta[..k - 1]);
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    tridiagonal::tql2(k, &mut d, &mut e, Some(&mut v))?;
    let mut s = Array2::zeros((k, k));
    for (out, col) in (0..k).rev().enumerate() {
        for r in 0..k {
            s[[r, out]] = v[col * k + r];
        }
    }
    d.reverse();
    Ok((d, s))
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize, basis: &[Array1<f64>]) -> Array1<f64> {
    loop {
        let mut v: Array1<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            for b in basis {
                let proj = b.dot(&v);
                v.scaled_add(-proj, b);
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

fn stack_columns(cols: &[Array1<f64>], d: usize) -> Array2<f64> {
    let mut out = Array2::zeros((d, cols.len()));
    for (mut dst, src) in out.axis_iter_mut(Axis(1)).zip(cols) {
        dst.assign(src);
    }
    out
}
