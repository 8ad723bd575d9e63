//! Dense symmetric linear algebra for the small `mk x mk` matrices of the
//! theory side, plus the thin eigen-factorization used by PCA projectors.
//!
//! Small orders go through cyclic Jacobi; larger ones through Householder
//! tridiagonalization and implicit QL. Every eigenvector is normalized so
//! that its largest-magnitude entry is positive, which makes the outputs
//! reproducible bit for bit.

mod jacobi;
mod lanczos;
mod tridiagonal;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Orders up to this size are diagonalized by cyclic Jacobi.
pub const JACOBI_MAX_ORDER: usize = 32;

/// Relative gap below which two eigenvalues are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_REJECT_TOL: f64 = 1e-6;
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not square ({0} x {1})")]
    NotSquare(usize, usize),
    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is singular or nearly so (min eigenvalue {0:e})")]
    Singular(f64),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("requested {requested} components but at most {available} exist")]
    RankTooLarge { requested: usize, available: usize },
    #[error("{0} iteration did not converge")]
    NoConvergence(&'static str),
}

/// A real symmetric matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Array2<f64>", into = "Array2<f64>")]
pub struct SymMatrix(Array2<f64>);

impl TryFrom<Array2<f64>> for SymMatrix {
    type Error = LinalgError;

    fn try_from(a: Array2<f64>) -> Result<Self, Self::Error> {
        Self::new(a)
    }
}

impl From<SymMatrix> for Array2<f64> {
    fn from(a: SymMatrix) -> Self {
        a.0
    }
}

impl SymMatrix {
    /// Validates squareness, finiteness and symmetry (relative to the largest
    /// entry), then stores the exactly symmetrized matrix.
    pub fn new(a: Array2<f64>) -> Result<Self, LinalgError> {
        let (r, c) = a.dim();
        if r != c {
            return Err(LinalgError::NotSquare(r, c));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let scale = a.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0_f64;
        for i in 0..r {
            for j in (i + 1)..r {
                worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
            }
        }
        if worst > SYMMETRY_TOL * scale {
            return Err(LinalgError::NotSymmetric(worst / scale));
        }
        Ok(Self::symmetrize(a))
    }

    /// Replaces `a` by `(a + aᵀ)/2`. Use for composites whose asymmetry is
    /// pure round-off.
    pub fn symmetrize(a: Array2<f64>) -> Self {
        let sym = (&a + &a.t()) * 0.5;
        SymMatrix(sym)
    }

    pub fn identity(d: usize) -> Self {
        SymMatrix(Array2::eye(d))
    }

    pub fn zeros(d: usize) -> Self {
        SymMatrix(Array2::zeros((d, d)))
    }

    pub fn diag(values: &[f64]) -> Self {
        SymMatrix(Array2::from_diag(&Array1::from(values.to_vec())))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// `D A D` for the diagonal matrix `D = diag(d)`.
    pub fn congruence_diag(&self, d: &[f64]) -> SymMatrix {
        let n = self.order();
        let mut out = self.0.clone();
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] *= d[i] * d[j];
            }
        }
        SymMatrix(out)
    }

    /// `A + s I`.
    pub fn shifted(&self, s: f64) -> SymMatrix {
        let mut out = self.0.clone();
        for i in 0..self.order() {
            out[[i, i]] += s;
        }
        SymMatrix(out)
    }
}

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Array1<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: Array2<f64>,
    /// Set when two consecutive eigenvalues are closer than
    /// [`DEGENERACY_GAP`] times the spectral radius; individual vectors inside
    /// such a cluster are then arbitrary and only their span is meaningful.
    pub degenerate: bool,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `V f(Λ) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let mut scaled = self.vectors.clone();
        for (mut col, &l) in scaled.axis_iter_mut(Axis(1)).zip(self.values.iter()) {
            col *= f(l);
        }
        SymMatrix::symmetrize(scaled.dot(&self.vectors.t()))
    }

    /// Orthogonal projector onto the eigenspace of the cluster containing
    /// index `i` (eigenvalues within the degeneracy gap of each other).
    pub fn cluster_projector(&self, i: usize) -> Array2<f64> {
        let tol = DEGENERACY_GAP * spectral_radius(self.values.as_slice().unwrap_or(&[]));
        let d = self.order();
        let mut lo = i;
        while lo > 0 && (self.values[lo - 1] - self.values[lo]).abs() < tol {
            lo -= 1;
        }
        let mut hi = i;
        while hi + 1 < d && (self.values[hi] - self.values[hi + 1]).abs() < tol {
            hi += 1;
        }
        let v = self.vectors.slice(ndarray::s![.., lo..=hi]);
        v.dot(&v.t())
    }
}

fn spectral_radius(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn has_degenerate_gap(sorted_desc: &[f64]) -> bool {
    let tol = DEGENERACY_GAP * spectral_radius(sorted_desc);
    sorted_desc.windows(2).any(|w| (w[0] - w[1]).abs() < tol)
        || (tol == 0.0 && sorted_desc.len() > 1)
}

/// Flips `v` so its largest-magnitude entry is positive. Entries within a
/// relative 1e-12 of the maximum count as ties and the first one wins.
pub(crate) fn normalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = v
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn normalize_columns(vectors: &mut Array2<f64>) {
    for mut col in vectors.axis_iter_mut(Axis(1)) {
        let mut owned = col.to_vec();
        normalize_sign(&mut owned);
        col.assign(&Array1::from(owned));
    }
}

/// Full symmetric eigendecomposition, descending, deterministic signs.
pub fn sym_eig(a: &SymMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = a.order();
    if a.0.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
            degenerate: false,
        });
    }

    let (values, vectors) = if n <= JACOBI_MAX_ORDER {
        let (vals, vecs) = jacobi::jacobi_eig(a.0.clone())?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
        let values: Array1<f64> = order.iter().map(|&i| vals[i]).collect();
        let mut vectors = Array2::zeros((n, n));
        for (dst, &src) in order.iter().enumerate() {
            vectors.column_mut(dst).assign(&vecs.column(src));
        }
        (values, vectors)
    } else {
        householder_ql(a, true)?
    };

    let mut vectors = vectors;
    normalize_columns(&mut vectors);
    let degenerate = has_degenerate_gap(values.as_slice().expect("contiguous"));
    Ok(EigenDecomposition {
        values,
        vectors,
        degenerate,
    })
}

/// Eigenvalues only, descending. Cheaper than [`sym_eig`] for large orders.
pub fn sym_eigenvalues(a: &SymMatrix) -> Result<Array1<f64>, LinalgError> {
    let n = a.order();
    if a.0.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    if n <= JACOBI_MAX_ORDER {
        return Ok(sym_eig(a)?.values);
    }
    Ok(householder_ql(a, false)?.0)
}

fn householder_ql(a: &SymMatrix, vectors: bool) -> Result<(Array1<f64>, Array2<f64>), LinalgError> {
    let n = a.order();
    // Column-major copy; `a` is symmetric so the transpose is the same data.
    let mut v: Vec<f64> = a.0.t().iter().copied().collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonal::tred2(&mut v, n, &mut d, &mut e, vectors);
    tridiagonal::tql2(n, &mut d, &mut e, if vectors { Some(&mut v) } else { None })?;

    let values: Array1<f64> = d.iter().rev().copied().collect();
    if !vectors {
        return Ok((values, Array2::zeros((0, 0))));
    }
    let mut out = Array2::zeros((n, n));
    for (dst, src) in (0..n).rev().enumerate() {
        for r in 0..n {
            out[[r, dst]] = v[src * n + r];
        }
    }
    Ok((values, out))
}

/// Symmetric PSD square root. Slightly negative eigenvalues (down to `-1e-6`
/// scaled by `max(1, ‖A‖)`) are clipped to zero; anything more negative is
/// rejected.
pub fn psd_sqrt(a: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    let eig = sym_eig(a)?;
    let scale = spectral_radius(eig.values.as_slice().expect("contiguous")).max(1.0);
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_REJECT_TOL * scale {
        return Err(LinalgError::NotPsd(min));
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Clips negative eigenvalues of `a` to zero. Returns the clipped matrix and
/// the sum of the magnitudes that were removed.
pub fn psd_clip(a: &SymMatrix) -> Result<(SymMatrix, f64), LinalgError> {
    let values = sym_eigenvalues(a)?;
    let removed: f64 = values.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    if removed == 0.0 {
        return Ok((a.clone(), 0.0));
    }
    let eig = sym_eig(a)?;
    Ok((eig.reconstruct_with(|l| l.max(0.0)), removed))
}

/// Solves `A X = B` for symmetric positive definite `A`.
///
/// The smallest eigenvalue of `A` must be at least `1e-12`; the solve
/// itself goes through a Cholesky factorization.
pub fn spd_solve(a: &SymMatrix, b: &Array2<f64>) -> Result<Array2<f64>, LinalgError> {
    let n = a.order();
    if b.nrows() != n {
        return Err(LinalgError::Shape(format!(
            "right-hand side has {} rows, matrix has order {n}",
            b.nrows()
        )));
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let values = sym_eigenvalues(a)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if n > 0 && min < SINGULAR_TOL {
        return Err(LinalgError::Singular(min));
    }
    let l = cholesky(a).ok_or(LinalgError::Singular(min))?;

    let mut x = b.clone();
    for mut col in x.axis_iter_mut(Axis(1)) {
        // Forward substitution with L, then back substitution with Lᵀ.
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= l[[i, k]] * col[k];
            }
            col[i] = s / l[[i, i]];
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in (i + 1)..n {
                s -= l[[k, i]] * col[k];
            }
            col[i] = s / l[[i, i]];
        }
    }
    Ok(x)
}

/// Vector right-hand side convenience wrapper around [`spd_solve`].
pub fn spd_solve_vec(a: &SymMatrix, b: &Array1<f64>) -> Result<Array1<f64>, LinalgError> {
    let rhs = b.clone().insert_axis(Axis(1));
    Ok(spd_solve(a, &rhs)?.column(0).to_owned())
}

fn cholesky(a: &SymMatrix) -> Option<Array2<f64>> {
    let n = a.order();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut diag = a.0[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if diag <= 0.0 {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let mut s = a.0[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Some(l)
}

/// Leading eigenvectors of `XXᵀ/p` for a `p x n` data matrix.
#[derive(Debug, Clone)]
pub struct TopSubspace {
    /// `p x τ`, orthonormal columns, deterministic signs.
    pub basis: Array2<f64>,
    /// The matching eigenvalues of `XXᵀ/p`, descending.
    pub eigenvalues: Array1<f64>,
}

/// Dominant `τ`-dimensional eigenspace of `XXᵀ/p`.
///
/// The eigenproblem is solved on the smaller of `XXᵀ` and `XᵀX`; in the
/// latter case the vectors are mapped back through `X`. Directions of a
/// zero eigenvalue are completed to an orthonormal set.
pub fn top_subspace(x: ArrayView2<'_, f64>, tau: usize) -> Result<TopSubspace, LinalgError> {
    let (p, n) = x.dim();
    let available = p.min(n);
    if tau == 0 || tau > available {
        return Err(LinalgError::RankTooLarge {
            requested: tau,
            available,
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let pf = p as f64;
    let primal = p <= n;
    let gram = if primal {
        x.dot(&x.t()) / pf
    } else {
        x.t().dot(&x) / pf
    };
    let gram = SymMatrix::symmetrize(gram);

    let (values, vectors) = leading(&gram, tau)?;

    let mut basis = if primal {
        vectors
    } else {
        let mut mapped = x.dot(&vectors);
        let scale = values
            .first()
            .copied()
            .unwrap_or(0.0)
            .abs()
            .max(f64::MIN_POSITIVE);
        let mut keep = Vec::with_capacity(tau);
        for (i, mut col) in mapped.axis_iter_mut(Axis(1)).enumerate() {
            let norm = col.dot(&col).sqrt();
            if values[i] > 1e-12 * scale && norm > 0.0 {
                col /= norm;
                keep.push(true);
            } else {
                col.fill(0.0);
                keep.push(false);
            }
        }
        complete_orthonormal(&mut mapped, &keep);
        mapped
    };
    normalize_columns(&mut basis);
    Ok(TopSubspace {
        basis,
        eigenvalues: values,
    })
}

fn leading(a: &SymMatrix, tau: usize) -> Result<(Array1<f64>, Array2<f64>), LinalgError> {
    let d = a.order();
    if d <= 64 || 3 * tau > d {
        let eig = sym_eig(a)?;
        let vals = eig.values.slice(ndarray::s![0..tau]).to_owned();
        let vecs = eig.vectors.slice(ndarray::s![.., 0..tau]).to_owned();
        return Ok((vals, vecs));
    }
    let (vals, vecs) = lanczos::leading_eigenpairs(a.view(), tau)?;
    Ok((Array1::from(vals), vecs))
}

/// Fills the columns not flagged in `keep` with unit vectors orthogonal to
/// every other column, scanning the canonical basis in order.
fn complete_orthonormal(basis: &mut Array2<f64>, keep: &[bool]) {
    let p = basis.nrows();
    let mut canonical = 0;
    for j in 0..keep.len() {
        if keep[j] {
            continue;
        }
        while canonical < p {
            let mut cand = Array1::<f64>::zeros(p);
            cand[canonical] = 1.0;
            canonical += 1;
            for _ in 0..2 {
                for (k, col) in basis.axis_iter(Axis(1)).enumerate() {
                    if k == j || (!keep[k] && k > j) {
                        continue;
                    }
                    let proj = col.dot(&cand);
                    cand.scaled_add(-proj, &col);
                }
            }
            let norm = cand.dot(&cand).sqrt();
            if norm > 1e-6 {
                basis.column_mut(j).assign(&(cand / norm));
                break;
            }
        }
    }
}
