use ndarray::{Array1, Array2, Axis};

use super::spectral::is_visible;
use super::{check_inputs, ScoreLaw, TheoryError};
use crate::smalldense::{psd_sqrt, sym_eig, SymMatrix};

/// Eigenvalues below this fraction of the largest are treated as zero (the
/// matching directions carry no label information).
const RANK_TOL: f64 = 1e-10;

/// Score law of the projection onto the top `τ` eigenvectors of `XXᵀ`.
///
/// A visible spike `ℓ_i` contributes the mean component
/// `√((c0ℓ_i² − 1) / (ℓ_i²(ℓ_i + 1))) · ū_iᵀ 𝓜 D_c^{-1/2} e_a` to block `a`;
/// an invisible one (including a spike exactly at `1/√c0`) contributes zero.
pub fn pca_score_law(
    calm: &SymMatrix,
    c: &[f64],
    c0: f64,
    tau: usize,
) -> Result<ScoreLaw, TheoryError> {
    check_inputs(calm, c, c0)?;
    let d = c.len();
    if tau == 0 || tau > d {
        return Err(TheoryError::Invalid(format!(
            "τ = {tau} must lie in 1..={d}"
        )));
    }
    let eig = sym_eig(calm)?;
    let mut means = Array2::zeros((d, tau));
    for i in 0..tau {
        let ell = eig.values[i];
        if !is_visible(ell, c0) {
            continue;
        }
        let coef = ((c0 * ell * ell - 1.0) / (ell * ell * (ell + 1.0))).sqrt();
        for a in 0..d {
            means[[a, i]] = coef * ell * eig.vectors[[a, i]] / c[a].sqrt();
        }
    }
    let window: Vec<usize> = (0..(tau + 1).min(d)).collect();
    let degenerate = eig.degenerate
        && has_close_pair(
            eig.values.as_slice().unwrap_or(&[]),
            &window,
            eig.values[0].abs(),
        );
    Ok(ScoreLaw { means, degenerate })
}

/// Score law of supervised PCA with one-hot labels: one score coordinate per
/// informative eigenvector of `D_c + D_c^{1/2} 𝓜 D_c^{1/2}`.
pub fn spca_score_law(calm: &SymMatrix, c: &[f64], c0: f64) -> Result<ScoreLaw, TheoryError> {
    mtl_score_law(calm, c, c0, &Array2::eye(c.len()))
}

/// Score law of supervised PCA with block label matrix `ỹ` (`mk x q`).
///
/// With `S = (ỹỹᵀ)^{1/2}` and `(ℓ̃_i, v̄_i)` the nonzero eigenpairs of
/// `S (D_c + D_c^{1/2} 𝓜 D_c^{1/2}) S`, block `a` has mean component
/// `√(c0/ℓ̃_i) · v̄_iᵀ S D_c^{1/2} 𝓜 D_c^{-1/2} e_a`.
pub fn mtl_score_law(
    calm: &SymMatrix,
    c: &[f64],
    c0: f64,
    labels: &Array2<f64>,
) -> Result<ScoreLaw, TheoryError> {
    check_inputs(calm, c, c0)?;
    let d = c.len();
    if labels.nrows() != d {
        return Err(TheoryError::Invalid(format!(
            "label matrix has {} rows, expected {d}",
            labels.nrows()
        )));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(TheoryError::Invalid("labels must be finite".into()));
    }
    if labels.iter().all(|&v| v == 0.0) {
        return Err(TheoryError::ZeroLabels);
    }
    let s = psd_sqrt(&SymMatrix::symmetrize(labels.dot(&labels.t())))?;
    let k = kernel(calm, c);
    let sks = SymMatrix::symmetrize(s.as_array().dot(k.as_array()).dot(s.as_array()));
    let eig = sym_eig(&sks)?;

    // Row i of `signal` is v̄_iᵀ S D^{1/2} 𝓜 D^{-1/2}.
    let cross = cross_term(calm, c);
    let top = eig.values[0];
    let kept: Vec<usize> = (0..d).filter(|&i| eig.values[i] > RANK_TOL * top).collect();
    let mut means = Array2::zeros((d, kept.len()));
    let sv = s.as_array().dot(&eig.vectors);
    for (col, &i) in kept.iter().enumerate() {
        let row = sv.column(i).dot(&cross);
        let scale = (c0 / eig.values[i]).sqrt();
        means.column_mut(col).assign(&(row * scale));
    }
    let degenerate =
        eig.degenerate && has_close_pair(eig.values.as_slice().unwrap_or(&[]), &kept, top);
    Ok(ScoreLaw { means, degenerate })
}

/// Scalar score law of the matched filter with one label per block:
/// `𝔪_b = √c0 · ỹᵀ D_c^{1/2} 𝓜 D_c^{-1/2} e_b / √(ỹᵀ (D_c + D_c^{1/2} 𝓜 D_c^{1/2}) ỹ)`.
pub fn mtl_score_law_binary(
    calm: &SymMatrix,
    c: &[f64],
    c0: f64,
    labels: &Array1<f64>,
) -> Result<ScoreLaw, TheoryError> {
    check_inputs(calm, c, c0)?;
    let d = c.len();
    if labels.len() != d {
        return Err(TheoryError::Invalid(format!(
            "{} labels for {d} blocks",
            labels.len()
        )));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(TheoryError::Invalid("labels must be finite".into()));
    }
    if labels.iter().all(|&v| v == 0.0) {
        return Err(TheoryError::ZeroLabels);
    }
    let k = kernel(calm, c);
    let energy = labels.dot(&k.as_array().dot(labels));
    let row = labels.dot(&cross_term(calm, c)) * (c0 / energy).sqrt();
    Ok(ScoreLaw {
        means: row.insert_axis(Axis(1)),
        degenerate: false,
    })
}

/// `D_c + D_c^{1/2} 𝓜 D_c^{1/2}`.
fn kernel(calm: &SymMatrix, c: &[f64]) -> SymMatrix {
    let roots: Vec<f64> = c.iter().map(|v| v.sqrt()).collect();
    let mut k = calm.congruence_diag(&roots).into_inner();
    for (a, &ca) in c.iter().enumerate() {
        k[[a, a]] += ca;
    }
    SymMatrix::symmetrize(k)
}

/// `D_c^{1/2} 𝓜 D_c^{-1/2}`.
fn cross_term(calm: &SymMatrix, c: &[f64]) -> Array2<f64> {
    let mut out = calm.as_array().clone();
    for ((a, b), v) in out.indexed_iter_mut() {
        *v *= (c[a] / c[b]).sqrt();
    }
    out
}

fn has_close_pair(values: &[f64], kept: &[usize], top: f64) -> bool {
    kept.windows(2)
        .any(|w| (values[w[0]] - values[w[1]]).abs() <= 1e-8 * top)
}
