//! Dense complex Hermitian linear algebra: certified operator types,
//! eigendecomposition, matrix functions on supports, Loewner-order checks,
//! and trace norms.

mod eig;
mod power;

pub use eig::{eig_hermitian, Spectrum};
pub(crate) use eig::jacobi;
pub use power::{
    matrix_power_psd, support_contained, support_projector, support_relation, SupportRelation,
};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major semantics via `ndarray`.
pub type CMatrix = Array2<Complex64>;

/// Relative threshold below which an eigenvalue counts as zero (support decisions).
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Relative floor for negative eigenvalues tolerated by PSD certification.
pub const DEFAULT_EIGENFLOOR: f64 = 1e-12;
/// Absolute tolerance on |trace - 1| for density operators.
pub const DEFAULT_TRACE_TOL: f64 = 1e-9;
/// Relative tolerance for grouping degenerate eigenvalues in pinching maps.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
/// Tolerance on support-projector leakage used by containment checks.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-9;

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// Complex identity matrix.
pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diag().iter().map(|z| z.re).sum()
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entry magnitude of the difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Hermitian part (M + M†)/2 with exact conjugate pairing of the stored entries.
fn hermitian_part(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = Complex64::new(m[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let h = (m[[i, j]] + m[[j, i]].conj()) * 0.5;
            out[[i, j]] = h;
            out[[j, i]] = h.conj();
        }
    }
    out
}

/// Dense complex Hermitian matrix. Entries satisfy `m[i][j] == conj(m[j][i])`
/// exactly: symmetrization is applied once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: CMatrix,
}

impl HermitianOperator {
    /// Build from an arbitrary complex square matrix, symmetrizing via (M + M†)/2.
    pub fn new(raw: CMatrix) -> Result<Self> {
        let (rows, cols) = raw.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyDimension);
        }
        if !is_finite(&raw) {
            return Err(Error::NonFiniteEntries);
        }
        Ok(Self {
            dim: rows,
            entries: hermitian_part(&raw),
        })
    }

    /// How far a raw matrix is from Hermitian, as the largest entry magnitude
    /// of M - (M + M†)/2.
    pub fn symmetrization_defect(raw: &CMatrix) -> f64 {
        max_abs_diff(raw, &hermitian_part(raw))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = CMatrix::zeros((n, n));
        for (i, &d) in diag.iter().enumerate() {
            entries[[i, i]] = Complex64::new(d, 0.0);
        }
        Self { dim: n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dim: n,
            entries: identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            dim: n,
            entries: CMatrix::zeros((n, n)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.entries)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.mapv(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: &self.entries - &other.entries,
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Positive semi-definite operator, certified at construction: the minimum
/// eigenvalue must be at least -eigenfloor * (1 + max |eigenvalue|).
#[derive(Debug, Clone)]
pub struct PsdOperator {
    op: HermitianOperator,
    eigenfloor: f64,
}

impl PsdOperator {
    pub fn certify(op: HermitianOperator, eigenfloor: f64) -> Result<Self> {
        let spectrum = eig_hermitian(&op)?;
        let max_mag = spectrum
            .eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
        let floor = -eigenfloor * (1.0 + max_mag);
        let min = spectrum.min_eigenvalue();
        if min < floor {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                floor,
            });
        }
        Ok(Self { op, eigenfloor })
    }

    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::certify(op, DEFAULT_EIGENFLOOR)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn eigenfloor(&self) -> f64 {
        self.eigenfloor
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    /// Square root on the support, U diag(sqrt(lambda)) U†.
    pub fn sqrt(&self, rank_tol: f64) -> Result<PsdOperator> {
        matrix_power_psd(self, 0.5, rank_tol)
    }
}

/// Density operator: PSD with unit trace within `trace_tol`.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    psd: PsdOperator,
    trace_tol: f64,
}

impl DensityOperator {
    pub fn certify(psd: PsdOperator, trace_tol: f64) -> Result<Self> {
        let trace = psd.trace();
        if (trace - 1.0).abs() > trace_tol {
            return Err(Error::NotNormalized {
                trace,
                tol: trace_tol,
            });
        }
        Ok(Self { psd, trace_tol })
    }

    pub fn new(psd: PsdOperator) -> Result<Self> {
        Self::certify(psd, DEFAULT_TRACE_TOL)
    }

    /// Build straight from a Hermitian operator, certifying PSD and trace.
    pub fn from_op(op: HermitianOperator) -> Result<Self> {
        Self::new(PsdOperator::new(op)?)
    }

    pub fn psd(&self) -> &PsdOperator {
        &self.psd
    }

    pub fn op(&self) -> &HermitianOperator {
        self.psd.op()
    }

    pub fn dim(&self) -> usize {
        self.psd.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.psd.matrix()
    }

    pub fn trace_tol(&self) -> f64 {
        self.trace_tol
    }
}

/// Orthogonal projector with recorded rank. P^2 = P and tr P = rank are
/// checked at construction.
#[derive(Debug, Clone)]
pub struct Projector {
    op: HermitianOperator,
    rank: usize,
}

impl Projector {
    const IDEMPOTENCY_TOL: f64 = 1e-9;
    const TRACE_TOL: f64 = 1e-8;

    pub fn new(op: HermitianOperator, rank: usize) -> Result<Self> {
        let m = op.matrix();
        let sq = m.dot(m);
        if max_abs_diff(&sq, m) > Self::IDEMPOTENCY_TOL {
            return Err(Error::NumericalFailure(
                "projector is not idempotent".into(),
            ));
        }
        if (op.trace() - rank as f64).abs() > Self::TRACE_TOL {
            return Err(Error::NumericalFailure(
                "projector trace does not match rank".into(),
            ));
        }
        Ok(Self { op, rank })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Loewner-order check A <= B. Returns (holds, margin) where margin is the
/// minimum eigenvalue of B - A and holds means
/// margin >= -tol * (1 + spectral norm of B - A).
pub fn loewner_leq(
    a: &HermitianOperator,
    b: &HermitianOperator,
    tol: f64,
) -> Result<(bool, f64)> {
    let diff = b.sub(a)?;
    let spectrum = eig_hermitian(&diff)?;
    let margin = spectrum.min_eigenvalue();
    let spectral_norm = spectrum
        .eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    Ok((margin >= -tol * (1.0 + spectral_norm), margin))
}

/// Trace norm (sum of singular values) of an arbitrary complex square matrix,
/// computed from the eigenvalues of M†M. Hermiticity is not assumed.
///
/// Eigenvalues of M†M below 1e-13 of the largest are zero singular values up
/// to solver noise; without the cut, sqrt would inflate that noise to ~1e-8.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::EmptyDimension);
    }
    let gram = HermitianOperator::new(adjoint(m).dot(m))?;
    let spectrum = eig_hermitian(&gram)?;
    let cutoff = 1e-13 * spectrum.max_eigenvalue().max(0.0);
    Ok(spectrum
        .eigenvalues()
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l.sqrt())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_symmetrizes_once() {
        let raw = ndarray::array![[c(1.0, 0.5), c(2.0, 1.0)], [c(0.0, 0.0), c(3.0, -0.2)]];
        let h = HermitianOperator::new(raw).unwrap();
        let m = h.matrix();
        assert_eq!(m[[0, 0]], c(1.0, 0.0));
        assert_eq!(m[[1, 1]], c(3.0, 0.0));
        assert_eq!(m[[0, 1]], m[[1, 0]].conj());
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(HermitianOperator::new(CMatrix::zeros((0, 0))).is_err());
        assert!(HermitianOperator::new(CMatrix::zeros((2, 3))).is_err());
        let mut nan = CMatrix::zeros((2, 2));
        nan[[0, 0]] = c(f64::NAN, 0.0);
        assert!(HermitianOperator::new(nan).is_err());
    }

    #[test]
    fn psd_certification_rejects_negative() {
        let m = HermitianOperator::from_diag(&[1.0, -0.5]);
        assert!(PsdOperator::new(m).is_err());
        let ok = HermitianOperator::from_diag(&[1.0, 0.0]);
        assert!(PsdOperator::new(ok).is_ok());
    }

    #[test]
    fn density_requires_unit_trace() {
        let m = HermitianOperator::from_diag(&[0.5, 0.25]);
        assert!(DensityOperator::from_op(m).is_err());
        let ok = HermitianOperator::from_diag(&[0.5, 0.5]);
        assert!(DensityOperator::from_op(ok).is_ok());
    }

    #[test]
    fn loewner_simple_cases() {
        let a = HermitianOperator::from_diag(&[1.0, 0.0]);
        let b = HermitianOperator::from_diag(&[2.0, 1.0]);
        let (holds, margin) = loewner_leq(&a, &b, 1e-12).unwrap();
        assert!(holds);
        assert!((margin - 1.0).abs() < 1e-12);

        let (holds, margin) = loewner_leq(&a, &a, 1e-12).unwrap();
        assert!(holds);
        assert!(margin.abs() < 1e-12);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&identity(2)).unwrap() - 2.0).abs() < 1e-12);
        let m = HermitianOperator::from_diag(&[1.0, -3.0]);
        assert!((trace_norm(m.matrix()).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_rank_one_product() {
        // sqrt(rho) sqrt(sigma) for rho = |0><0|, sigma = |+><+| is
        // (1/sqrt2)|0><+|; a rank-one matrix k |u><v| with unit u, v has
        // trace norm |k|.
        let rho = HermitianOperator::from_diag(&[1.0, 0.0]);
        let half = c(0.5, 0.0);
        let plus = HermitianOperator::new(ndarray::array![[half, half], [half, half]]).unwrap();
        let product = rho.matrix().dot(plus.matrix());
        let got = trace_norm(&product).unwrap();
        assert!((got - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
    }
}
