//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
//!
//! Rotations sweep the strict upper triangle in row-major order, which makes
//! the decomposition deterministic for a fixed input. Pairs are rotated until
//! every off-diagonal entry is small relative to the geometric mean of its
//! diagonal neighbours; the relative criterion preserves the accuracy of
//! small eigenvalues of graded positive semi-definite matrices, which the
//! divergence computations rely on.

use num_complex::Complex64;

use super::{identity, max_abs_diff, CMatrix, HermitianOperator};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Pair (p, q) is converged when |a_pq| <= REL_OFF_TOL * sqrt(|a_pp a_qq|).
const REL_OFF_TOL: f64 = 1e-14;
/// Absolute floor so that denormal residue cannot stall convergence.
const ABS_OFF_FLOOR: f64 = 1e-300;

const ORTHONORMALITY_TOL: f64 = 1e-10;
const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Eigenvalues in non-increasing order with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix V; column j pairs with `eigenvalues()[j]`.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// V diag(f(lambda)) V†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            for i in 0..n {
                scaled[[i, j]] *= fl;
            }
        }
        let m = scaled.dot(&super::adjoint(&self.vectors));
        HermitianOperator::new(m).expect("reassembled matrix is square and finite")
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.apply(|l| l)
    }

    /// V† M V: the representation of M in this eigenbasis.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        super::adjoint(&self.vectors).dot(&m.dot(&self.vectors))
    }

    /// Sum of |v_j><v_j| over the selected columns, with the count.
    pub fn projector_for(&self, keep: impl Fn(usize, f64) -> bool) -> (CMatrix, usize) {
        let n = self.dim();
        let mut p = CMatrix::zeros((n, n));
        let mut rank = 0;
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            if keep(j, l) {
                rank += 1;
                for r in 0..n {
                    for c in 0..n {
                        p[[r, c]] += self.vectors[[r, j]] * self.vectors[[c, j]].conj();
                    }
                }
            }
        }
        (p, rank)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Deterministic for a fixed input; fails with `NumericalFailure` if the
/// sweep cap is exhausted (100 full sweeps).
pub fn eig_hermitian(m: &HermitianOperator) -> Result<Spectrum> {
    let (eigenvalues, vectors) = jacobi(m.matrix().clone())?;
    let spectrum = Spectrum {
        eigenvalues,
        vectors,
    };
    validate(m, &spectrum)?;
    Ok(spectrum)
}

pub(crate) fn jacobi(mut a: CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    let mut v = identity(n);
    if n > 1 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    if rotate_pair(&mut a, &mut v, p, q) {
                        rotated = true;
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericalFailure(
                "Jacobi eigensolver did not converge within 100 sweeps".into(),
            ));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[[row, src]];
        }
    }
    Ok((eigenvalues, vectors))
}

fn rotate_pair(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) -> bool {
    let apq = a[[p, q]];
    let r = apq.norm();
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    if r <= REL_OFF_TOL * (app.abs() * aqq.abs()).sqrt() + ABS_OFF_FLOOR {
        return false;
    }

    // Unitary plane rotation U with U[pp] = c, U[pq] = s e^{i phi},
    // U[qp] = -s e^{-i phi}, U[qq] = c, chosen to annihilate a_pq.
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let sp = phase * (t * c);

    let n = a.nrows();
    // A <- A U (columns p, q).
    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = akp * c - akq * sp.conj();
        a[[k, q]] = akp * sp + akq * c;
    }
    // A <- U† A (rows p, q).
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = apk * c - aqk * sp;
        a[[q, k]] = apk * sp.conj() + aqk * c;
    }
    // Re-impose the Hermitian structure the rotation targets.
    a[[p, q]] = Complex64::new(0.0, 0.0);
    a[[q, p]] = Complex64::new(0.0, 0.0);
    a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);
    // V <- V U.
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = vkp * c - vkq * sp.conj();
        v[[k, q]] = vkp * sp + vkq * c;
    }
    true
}

fn validate(input: &HermitianOperator, spectrum: &Spectrum) -> Result<()> {
    let v = &spectrum.vectors;
    let gram = super::adjoint(v).dot(v);
    if max_abs_diff(&gram, &identity(spectrum.dim())) > ORTHONORMALITY_TOL {
        return Err(Error::NumericalFailure(
            "eigenvector columns lost orthonormality".into(),
        ));
    }
    let rebuilt = spectrum.reconstruct();
    let scale = spectrum
        .eigenvalues
        .iter()
        .fold(1.0_f64, |acc, &l| acc.max(l.abs()));
    if max_abs_diff(rebuilt.matrix(), input.matrix()) > RECONSTRUCTION_TOL * scale {
        return Err(Error::NumericalFailure(
            "eigendecomposition does not reconstruct its input".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let m = HermitianOperator::from_diag(&[2.0, 1.0]);
        let s = eig_hermitian(&m).unwrap();
        assert_eq!(s.eigenvalues(), &[2.0, 1.0]);
        assert!(max_abs_diff(s.vectors(), &identity(2)) < 1e-15);
    }

    #[test]
    fn symmetric_two_by_two() {
        let m = HermitianOperator::new(array![
            [c(1.0, 0.0), c(0.5, 0.0)],
            [c(0.5, 0.0), c(1.0, 0.0)]
        ])
        .unwrap();
        let s = eig_hermitian(&m).unwrap();
        assert!((s.eigenvalues()[0] - 1.5).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn complex_off_diagonal() {
        let m = HermitianOperator::new(array![
            [c(0.0, 0.0), c(0.0, -1.0)],
            [c(0.0, 1.0), c(0.0, 0.0)]
        ])
        .unwrap();
        let s = eig_hermitian(&m).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        // Fixed pseudo-random Hermitian 5x5; the oracle is the
        // reconstruction identity itself.
        let n = 5;
        let mut raw = CMatrix::zeros((n, n));
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                raw[[i, j]] = c(next(), next());
            }
        }
        let m = HermitianOperator::new(raw).unwrap();
        let s = eig_hermitian(&m).unwrap();
        let scale = s.eigenvalues().iter().fold(1.0_f64, |a, &l| a.max(l.abs()));
        assert!(max_abs_diff(s.reconstruct().matrix(), m.matrix()) < 1e-9 * scale);
        for w in s.eigenvalues().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn graded_psd_keeps_relative_accuracy() {
        // D R D with D = diag(1, 1e-10), R = [[1, .5], [.5, 1]]: the small
        // eigenvalue is 0.75e-20 (up to O(1e-20) corrections) and must come
        // back with small relative error, not absolute-eps garbage.
        let m = HermitianOperator::new(array![
            [c(1.0, 0.0), c(0.5e-10, 0.0)],
            [c(0.5e-10, 0.0), c(1e-20, 0.0)]
        ])
        .unwrap();
        let spec = eig_hermitian(&m).unwrap();
        assert!((spec.eigenvalues()[0] - 1.0).abs() < 1e-14);
        let tiny = spec.eigenvalues()[1];
        assert!(
            (tiny - 0.75e-20).abs() < 1e-13 * 0.75e-20,
            "tiny eigenvalue lost relative accuracy: {tiny}"
        );
    }
}
