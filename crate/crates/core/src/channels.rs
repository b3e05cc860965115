//! CPTP maps as Kraus collections, pinching maps from spectral
//! decompositions, and seeded generators for states, PSD operators,
//! unitaries, and channels.
//!
//! Every generator is a pure function of its `RandomSpec`: identical specs
//! reproduce identical operators bit for bit. Fuzz suites derive per-trial
//! generators from (base seed, trial index) so trials stay independent and
//! re-verifiable.

use ndarray::s;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hermitian::{
    adjoint, eig_hermitian, identity, max_abs_diff, trace_re, CMatrix, DensityOperator,
    HermitianOperator, Projector, PsdOperator, DEFAULT_DEGENERACY_TOL,
};

/// Completely positive trace-preserving map given by Kraus operators
/// satisfying sum K_i† K_i = I within `completeness_tol` per entry.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    completeness_tol: f64,
}

impl KrausChannel {
    pub const DEFAULT_COMPLETENESS_TOL: f64 = 1e-9;

    pub fn new(kraus: Vec<CMatrix>, completeness_tol: f64) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| {
            Error::InvalidParameter("a channel needs at least one Kraus operator".into())
        })?;
        let (dim_out, dim_in) = first.dim();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut completeness = CMatrix::zeros((dim_in, dim_in));
        for k in &kraus {
            if k.dim() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch {
                    expected: dim_in,
                    got: k.dim().1,
                });
            }
            completeness += &adjoint(k).dot(k);
        }
        if max_abs_diff(&completeness, &identity(dim_in)) > completeness_tol {
            return Err(Error::InvalidParameter(
                "Kraus operators do not satisfy the completeness relation".into(),
            ));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            completeness_tol,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn completeness_tol(&self) -> f64 {
        self.completeness_tol
    }

    /// The identity channel on dimension n.
    pub fn identity_channel(n: usize) -> Self {
        Self {
            dim_in: n,
            dim_out: n,
            kraus: vec![identity(n)],
            completeness_tol: Self::DEFAULT_COMPLETENESS_TOL,
        }
    }

    /// Dephasing in the given orthonormal basis (columns of `basis`):
    /// Kraus operators |b_i><b_i|.
    pub fn dephasing(basis: &CMatrix) -> Result<Self> {
        let (n, cols) = basis.dim();
        if n != cols {
            return Err(Error::NotSquare { rows: n, cols });
        }
        let kraus: Vec<CMatrix> = (0..n)
            .map(|i| {
                let mut k = CMatrix::zeros((n, n));
                for r in 0..n {
                    for c in 0..n {
                        k[[r, c]] = basis[[r, i]] * basis[[c, i]].conj();
                    }
                }
                k
            })
            .collect();
        Self::new(kraus, Self::DEFAULT_COMPLETENESS_TOL)
    }
}

/// Sum K_i X K_i†. Preserves trace and positivity.
pub fn apply_channel(channel: &KrausChannel, x: &HermitianOperator) -> Result<HermitianOperator> {
    if x.dim() != channel.dim_in {
        return Err(Error::DimensionMismatch {
            expected: channel.dim_in,
            got: x.dim(),
        });
    }
    let mut out = CMatrix::zeros((channel.dim_out, channel.dim_out));
    for k in &channel.kraus {
        out += &k.dot(&x.matrix().dot(&adjoint(k)));
    }
    HermitianOperator::new(out)
}

/// Pinching map from a PVM: omega -> sum P_i omega P_i.
#[derive(Debug, Clone)]
pub struct PinchingMap {
    projectors: Vec<Projector>,
}

impl PinchingMap {
    const COMPLETENESS_TOL: f64 = 1e-9;
    const ORTHOGONALITY_TOL: f64 = 1e-9;

    pub fn new(projectors: Vec<Projector>) -> Result<Self> {
        let first = projectors.first().ok_or_else(|| {
            Error::InvalidParameter("a pinching map needs at least one projector".into())
        })?;
        let n = first.dim();
        let mut sum = CMatrix::zeros((n, n));
        for p in &projectors {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.dim(),
                });
            }
            sum += p.matrix();
        }
        if max_abs_diff(&sum, &identity(n)) > Self::COMPLETENESS_TOL {
            return Err(Error::InvalidParameter(
                "projectors do not sum to the identity".into(),
            ));
        }
        for (i, p) in projectors.iter().enumerate() {
            for q in projectors.iter().skip(i + 1) {
                let prod = p.matrix().dot(q.matrix());
                if crate::hermitian::max_abs(&prod) > Self::ORTHOGONALITY_TOL {
                    return Err(Error::InvalidParameter(
                        "projectors are not mutually orthogonal".into(),
                    ));
                }
            }
        }
        Ok(Self { projectors })
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    /// Number of blocks n(B).
    pub fn count(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }
}

/// Pinching map of B: eigenvalues within `degeneracy_tol * (1 + |lambda|_max)`
/// of each other share a projector; `count()` is the number of groups.
pub fn pinching_from(b: &HermitianOperator, degeneracy_tol: f64) -> Result<PinchingMap> {
    let spec = eig_hermitian(b)?;
    let n = spec.dim();
    let scale = spec
        .eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    let band = degeneracy_tol * (1.0 + scale);
    let mut projectors = Vec::new();
    let mut lo = 0;
    while lo < n {
        let mut hi = lo + 1;
        while hi < n && spec.eigenvalues()[hi - 1] - spec.eigenvalues()[hi] <= band {
            hi += 1;
        }
        let (p, rank) = spec.projector_for(|j, _| j >= lo && j < hi);
        projectors.push(Projector::new(HermitianOperator::new(p)?, rank)?);
        lo = hi;
    }
    PinchingMap::new(projectors)
}

/// Default-tolerance pinching map.
pub fn pinching_of(b: &HermitianOperator) -> Result<PinchingMap> {
    pinching_from(b, DEFAULT_DEGENERACY_TOL)
}

/// sum P_i omega P_i.
pub fn apply_pinching(map: &PinchingMap, omega: &HermitianOperator) -> Result<HermitianOperator> {
    if omega.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            got: omega.dim(),
        });
    }
    let n = map.dim();
    let mut out = CMatrix::zeros((n, n));
    for p in map.projectors() {
        out += &p.matrix().dot(&omega.matrix().dot(p.matrix()));
    }
    HermitianOperator::new(out)
}

/// Rank-one PVM from the eigenvectors of sigma: exactly dim projectors
/// |psi_j><psi_j| with the eigenvalues s_j attached in decreasing order,
/// repeated according to multiplicity. Within degenerate eigenspaces the
/// eigensolver's (deterministic) orthonormal basis is used.
pub fn rank_one_pinching(sigma: &PsdOperator) -> Result<(PinchingMap, Vec<f64>)> {
    let spec = eig_hermitian(sigma.op())?;
    let n = spec.dim();
    let mut projectors = Vec::with_capacity(n);
    for j in 0..n {
        let (p, rank) = spec.projector_for(|k, _| k == j);
        debug_assert_eq!(rank, 1);
        projectors.push(Projector::new(HermitianOperator::new(p)?, 1)?);
    }
    Ok((PinchingMap::new(projectors)?, spec.eigenvalues().to_vec()))
}

/// Deterministic generator parameters. Identical specs reproduce identical
/// output bit patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub dim: usize,
    pub rank: usize,
    /// Number of Kraus operators; used by channel generation only.
    pub kraus_count: usize,
}

impl RandomSpec {
    pub fn new(seed: u64, dim: usize, rank: usize) -> Self {
        Self {
            seed,
            dim,
            rank,
            kraus_count: 1,
        }
    }

    pub fn with_kraus(mut self, kraus_count: usize) -> Self {
        self.kraus_count = kraus_count;
        self
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Mix a base seed with a trial index into an independent stream seed
/// (splitmix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros((rows, cols));
    for i in 0..rows {
        for j in 0..cols {
            m[[i, j]] = complex_gaussian(rng);
        }
    }
    m
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; columns must be
/// linearly independent.
fn orthonormalize_columns(m: &mut CMatrix) -> Result<()> {
    let (rows, cols) = m.dim();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    dot += m[[i, k]].conj() * m[[i, j]];
                }
                for i in 0..rows {
                    let mik = m[[i, k]];
                    m[[i, j]] -= dot * mik;
                }
            }
        }
        let norm: f64 = (0..rows).map(|i| m[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::NumericalFailure(
                "Gaussian matrix was numerically rank-deficient".into(),
            ));
        }
        for i in 0..rows {
            m[[i, j]] /= norm;
        }
    }
    Ok(())
}

/// Random density operator rho = X X† / tr(X X†) with X a dim x rank matrix
/// of independent standard complex Gaussians.
pub fn random_density(spec: &RandomSpec) -> Result<DensityOperator> {
    if spec.rank == 0 || spec.rank > spec.dim {
        return Err(Error::InvalidParameter(format!(
            "rank {} must lie in 1..={}",
            spec.rank, spec.dim
        )));
    }
    let mut rng = spec.rng();
    random_density_from(&mut rng, spec.dim, spec.rank)
}

pub(crate) fn random_density_from(
    rng: &mut ChaCha8Rng,
    dim: usize,
    rank: usize,
) -> Result<DensityOperator> {
    let x = gaussian_matrix(rng, dim, rank);
    let gram = x.dot(&adjoint(&x));
    let trace = trace_re(&gram);
    let rho = HermitianOperator::new(gram.mapv(|z| z / trace))?;
    DensityOperator::from_op(rho)
}

/// Random PSD operator with the given trace: a random density scaled.
pub fn random_psd(spec: &RandomSpec, trace: f64) -> Result<PsdOperator> {
    if trace <= 0.0 {
        return Err(Error::InvalidParameter("trace must be positive".into()));
    }
    let rho = random_density(spec)?;
    PsdOperator::new(rho.op().scale(trace))
}

/// Haar-like random unitary: Gram-Schmidt orthonormalization of a square
/// complex Gaussian matrix.
pub fn random_unitary(seed: u64, dim: usize) -> Result<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_from(&mut rng, dim)
}

pub(crate) fn random_unitary_from(rng: &mut ChaCha8Rng, dim: usize) -> Result<CMatrix> {
    let mut m = gaussian_matrix(rng, dim, dim);
    orthonormalize_columns(&mut m)?;
    Ok(m)
}

/// Random channel with `kraus_count` Kraus operators of shape dim x dim,
/// obtained as row blocks of an orthonormalized Gaussian
/// (dim * kraus_count) x dim isometry.
pub fn random_channel(spec: &RandomSpec) -> Result<KrausChannel> {
    if spec.kraus_count == 0 {
        return Err(Error::InvalidParameter(
            "kraus_count must be at least 1".into(),
        ));
    }
    let mut rng = spec.rng();
    random_channel_from(&mut rng, spec.dim, spec.dim, spec.kraus_count)
}

pub(crate) fn random_channel_from(
    rng: &mut ChaCha8Rng,
    dim_in: usize,
    dim_out: usize,
    kraus_count: usize,
) -> Result<KrausChannel> {
    let rows = dim_out * kraus_count;
    if rows < dim_in {
        return Err(Error::InvalidParameter(
            "dim_out * kraus_count must be at least dim_in for an isometry".into(),
        ));
    }
    let mut m = gaussian_matrix(rng, rows, dim_in);
    orthonormalize_columns(&mut m)?;
    let kraus: Vec<CMatrix> = (0..kraus_count)
        .map(|i| m.slice(s![i * dim_out..(i + 1) * dim_out, ..]).to_owned())
        .collect();
    KrausChannel::new(kraus, KrausChannel::DEFAULT_COMPLETENESS_TOL)
}
