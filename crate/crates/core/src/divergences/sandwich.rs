//! Log-space spectrum of C = sigma^beta rho sigma^beta.
//!
//! Near alpha = 0 the exponent beta = (1 - alpha)/(2 alpha) is enormous and
//! the eigenvalues of C span thousands of orders of magnitude, far beyond
//! what f64 can represent, yet every one of them still contributes O(1) mass
//! to tr C^alpha. The computation therefore never forms C. In the eigenbasis
//! of sigma, C = E R E with E = diag(s_j^beta) and R the state written in
//! that basis; eigenvalue logs are extracted scale group by scale group:
//!
//! - indices are sorted by b_j = 2 beta ln s_j and split into groups wherever
//!   consecutive b's differ by more than `GROUP_GAP` (cross-group coupling
//!   then perturbs eigenvalue logs by at most ~e^{-GROUP_GAP}, negligible);
//! - within a group, the block scaled by exp((b_j + b_k)/2 - base) is
//!   diagonalized directly; the relative-threshold Jacobi keeps even strongly
//!   graded block eigenvalues relatively accurate;
//! - eliminated groups leave behind their Schur complement taken in the
//!   unscaled R coordinates, where the grading factors cancel exactly.
//!
//! Rank decisions: a block eigenvalue counts as an exact zero of C when it is
//! below `ZERO_REL` times the diagonal mass its eigenvector sits on. This
//! separates cancellation residue (relative size ~1e-16) from genuine small
//! eigenvalues, which the Jacobi step resolves relatively.

use ndarray::s;
use num_complex::Complex64;

use crate::error::Result;
use crate::hermitian::{adjoint, CMatrix, Spectrum};

/// New scale group when consecutive sorted b's differ by more than this.
const GROUP_GAP: f64 = 75.0;
/// Forced group split so scaled block entries stay representable.
const GROUP_WIDTH_MAX: f64 = 500.0;
/// Block eigenvalue counts as zero below this times its diagonal mass.
const ZERO_REL: f64 = 1e-13;
/// Pseudo-inverse cutoff (relative to the largest eigenvalue) in Schur steps.
const PINV_REL: f64 = 1e-13;

/// Natural-log eigenvalues of C = sigma^beta rho sigma^beta on supp(sigma).
///
/// Exact-zero modes of C are omitted; the returned logs may be fewer than
/// rank(sigma). An empty result means C = 0.
pub(crate) fn sandwich_log_eigs(
    rho: &CMatrix,
    sigma_spec: &Spectrum,
    beta: f64,
    rank_tol: f64,
) -> Result<Vec<f64>> {
    let n = sigma_spec.dim();
    let s_max = sigma_spec.max_eigenvalue().max(0.0);
    let cutoff = rank_tol * s_max;
    let support: Vec<usize> = (0..n)
        .filter(|&j| {
            let l = sigma_spec.eigenvalues()[j];
            l > cutoff && l > 0.0
        })
        .collect();
    let r = support.len();
    if r == 0 {
        return Ok(Vec::new());
    }

    // Scale exponents, sorted descending (beta < 0 reverses the s-order).
    let mut order: Vec<usize> = support.clone();
    let b_of = |j: usize| 2.0 * beta * sigma_spec.eigenvalues()[j].ln();
    order.sort_by(|&i, &j| b_of(j).partial_cmp(&b_of(i)).unwrap());
    let b: Vec<f64> = order.iter().map(|&j| b_of(j)).collect();

    // R = W† rho W with W the support eigenvectors in scale order.
    let v = sigma_spec.vectors();
    let mut w = CMatrix::zeros((n, r));
    for (col, &j) in order.iter().enumerate() {
        for row in 0..n {
            w[[row, col]] = v[[row, j]];
        }
    }
    let mut s_mat = adjoint(&w).dot(&rho.dot(&w));

    let mut logs = Vec::with_capacity(r);
    let mut lo = 0;
    while lo < r {
        let mut hi = lo + 1;
        while hi < r && b[hi - 1] - b[hi] <= GROUP_GAP && b[lo] - b[hi] <= GROUP_WIDTH_MAX {
            hi += 1;
        }
        let m = hi - lo;
        let base = b[lo];

        // Scaled group block T = E S_GG E, entries exp((b_j + b_k)/2 - base).
        let mut t = CMatrix::zeros((m, m));
        for j in 0..m {
            for k in 0..m {
                let scale = (0.5 * (b[lo + j] + b[lo + k]) - base).exp();
                t[[j, k]] = s_mat[[j, k]] * scale;
            }
        }
        let t_diag: Vec<f64> = (0..m).map(|j| t[[j, j]].re.max(0.0)).collect();
        let (h, u) = crate::hermitian::jacobi(t)?;
        for (i, &hi_val) in h.iter().enumerate() {
            let diag_mass: f64 = (0..m)
                .map(|j| u[[j, i]].norm_sqr() * t_diag[j])
                .sum();
            if hi_val > ZERO_REL * diag_mass && hi_val > 0.0 {
                logs.push(base + hi_val.ln());
            }
        }

        // s_mat re-indexes from the next group after each elimination, so the
        // block above always sits at local 0..m.
        if hi < r {
            s_mat = schur_complement(&s_mat, m)?;
            debug_assert_eq!(s_mat.nrows(), r - hi);
        }
        lo = hi;
    }
    Ok(logs)
}

/// ln tr C^alpha from the eigenvalue logs; None when C = 0.
pub(crate) fn log_trace_pow(logs: &[f64], alpha: f64) -> Option<f64> {
    log_sum_exp(logs.iter().map(|&l| alpha * l))
}

/// Stable ln(sum exp(x_i)), skipping -inf terms; None if all are -inf.
pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> Option<f64> {
    let xs: Vec<f64> = terms.filter(|x| *x > f64::NEG_INFINITY).collect();
    if xs.is_empty() {
        return None;
    }
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return Some(m);
    }
    Some(m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln())
}

/// Generalized Schur complement of the leading m x m block, with a
/// pseudo-inverse on that block's numerical support.
fn schur_complement(s_mat: &CMatrix, m: usize) -> Result<CMatrix> {
    let r = s_mat.nrows();
    let g = s_mat.slice(s![..m, ..m]).to_owned();
    let b_block = s_mat.slice(s![..m, m..]).to_owned();
    let c_block = s_mat.slice(s![m.., m..]).to_owned();

    let (h, u) = crate::hermitian::jacobi(g)?;
    let h_max = h.iter().fold(0.0_f64, |acc, &x| acc.max(x));
    let inv_diag: Vec<f64> = h
        .iter()
        .map(|&x| if x > PINV_REL * h_max { 1.0 / x } else { 0.0 })
        .collect();
    // G⁺ = U diag(inv) U†
    let mut g_pinv = CMatrix::zeros((m, m));
    for a in 0..m {
        for bb in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                acc += u[[a, k]] * inv_diag[k] * u[[bb, k]].conj();
            }
            g_pinv[[a, bb]] = acc;
        }
    }
    let correction = adjoint(&b_block).dot(&g_pinv.dot(&b_block));
    let mut out = c_block;
    out -= &correction;
    // Keep the working matrix exactly Hermitian.
    for i in 0..(r - m) {
        out[[i, i]] = Complex64::new(out[[i, i]].re, 0.0);
        for j in (i + 1)..(r - m) {
            let h = (out[[i, j]] + out[[j, i]].conj()) * 0.5;
            out[[i, j]] = h;
            out[[j, i]] = h.conj();
        }
    }
    Ok(out)
}
