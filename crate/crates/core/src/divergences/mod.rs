//! The divergence family: sandwiched Renyi divergence, standard
//! alpha-relative Renyi entropy, quantum relative entropy, min-/max-relative
//! entropies, zero-relative Renyi entropy, and the hypothesis-testing
//! relative entropy.
//!
//! All values are in bits (base-2 logarithms). Infinite divergences are
//! carried as `f64::INFINITY` and arise only where the definitions permit
//! them (support conditions, orthogonal supports).

mod hypothesis;
pub(crate) mod sandwich;

pub use hypothesis::{hypothesis_testing, hypothesis_testing_with_tol, HypothesisTest};

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::hermitian::{
    eig_hermitian, support_contained, support_projector, support_relation, trace_norm, trace_re,
    DensityOperator, Projector, PsdOperator, Spectrum, SupportRelation, DEFAULT_RANK_TOL,
    DEFAULT_SUPPORT_TOL,
};
use sandwich::{log_sum_exp, log_trace_pow, sandwich_log_eigs};

/// Overlap traces at or below this count as zero, mapping to an infinite
/// divergence; the same support decision rank_tol makes elsewhere.
const ZERO_OVERLAP_TOL: f64 = 1e-13;

/// Which member of the family a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaTag {
    Alpha(f64),
    ZeroLimit,
    OneLimit,
    InfinityLimit,
    Min,
    Max,
    Hypothesis,
}

/// A divergence value in bits, plus the parameter it was evaluated at and
/// the support relation of the pair it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceValue {
    /// Value in bits; `f64::INFINITY` where the definition yields it.
    pub value: f64,
    pub alpha: AlphaTag,
    /// Logarithm base; fixed to 2 throughout the crate.
    pub base: u32,
    pub support_relation: SupportRelation,
}

impl DivergenceValue {
    fn bits(value: f64, alpha: AlphaTag, support_relation: SupportRelation) -> Self {
        // Canonicalize -0.0 so exact zeros print and compare as 0.
        let value = if value == 0.0 { 0.0 } else { value };
        Self {
            value,
            alpha,
            base: 2,
            support_relation,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

fn supports(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    rank_tol: f64,
) -> Result<(SupportRelation, bool, Projector, Projector)> {
    let p_rho = support_projector(rho.psd(), rank_tol)?;
    let p_sigma = support_projector(sigma, rank_tol)?;
    let relation = support_relation(&p_rho, &p_sigma);
    let contained = support_contained(&p_rho, &p_sigma, DEFAULT_SUPPORT_TOL);
    Ok((relation, contained, p_rho, p_sigma))
}

/// Sandwiched Renyi divergence
/// D_alpha = (1/(alpha-1)) log2 tr (sigma^beta rho sigma^beta)^alpha with
/// beta = (1-alpha)/(2 alpha), for alpha in (0,1) or (1,inf).
///
/// For alpha > 1 the value is +inf unless supp(rho) is contained in
/// supp(sigma); there sigma^beta is the pseudo-power on the support. For
/// alpha in (0,1), orthogonal supports surface as a vanishing trace and the
/// value is +inf.
pub fn sandwiched_renyi(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    sandwiched_renyi_with_tol(rho, sigma, alpha, DEFAULT_RANK_TOL)
}

pub fn sandwiched_renyi_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha: f64,
    rank_tol: f64,
) -> Result<DivergenceValue> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    check_dims(rho, sigma)?;
    let (relation, contained, _, _) = supports(rho, sigma, rank_tol)?;
    let tag = AlphaTag::Alpha(alpha);
    if alpha > 1.0 && !contained {
        return Ok(DivergenceValue::bits(f64::INFINITY, tag, relation));
    }
    let sigma_spec = eig_hermitian(sigma.op())?;
    let beta = (1.0 - alpha) / (2.0 * alpha);
    let logs = sandwich_log_eigs(rho.matrix(), &sigma_spec, beta, rank_tol)?;
    match log_trace_pow(&logs, alpha) {
        Some(ln_tr) => Ok(DivergenceValue::bits(
            ln_tr / ((alpha - 1.0) * LN_2),
            tag,
            relation,
        )),
        None if alpha < 1.0 => Ok(DivergenceValue::bits(f64::INFINITY, tag, relation)),
        None => Err(Error::NumericalFailure(
            "trace of the sandwiched power vanished despite support containment".into(),
        )),
    }
}

/// Standard alpha-relative Renyi entropy
/// (1/(alpha-1)) log2 tr(rho^alpha sigma^{1-alpha}), for alpha in [0,1) or
/// (1,inf); alpha = 0 is the zero-relative Renyi entropy.
///
/// Evaluated as the exact double sum over both eigenbases,
/// sum_{ij} r_i^alpha s_j^{1-alpha} |<phi_i|psi_j>|^2, accumulated in
/// log space. Powers of singular operators act on supports only; for
/// alpha > 1 the value is +inf unless supp(rho) is contained in supp(sigma).
pub fn alpha_relative_renyi(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    alpha_relative_renyi_with_tol(rho, sigma, alpha, DEFAULT_RANK_TOL)
}

pub fn alpha_relative_renyi_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha: f64,
    rank_tol: f64,
) -> Result<DivergenceValue> {
    if !alpha.is_finite() || alpha < 0.0 || alpha == 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    check_dims(rho, sigma)?;
    if alpha == 0.0 {
        let d = d0_with_tol(rho, sigma, rank_tol)?;
        return Ok(DivergenceValue::bits(
            d.value,
            AlphaTag::Alpha(0.0),
            d.support_relation,
        ));
    }
    let (relation, contained, _, _) = supports(rho, sigma, rank_tol)?;
    let tag = AlphaTag::Alpha(alpha);
    if alpha > 1.0 && !contained {
        return Ok(DivergenceValue::bits(f64::INFINITY, tag, relation));
    }
    let rho_spec = eig_hermitian(rho.op())?;
    let sigma_spec = eig_hermitian(sigma.op())?;
    let overlaps = overlap_weights(&rho_spec, &sigma_spec);
    let r_cut = rank_tol * rho_spec.max_eigenvalue().max(0.0);
    let s_cut = rank_tol * sigma_spec.max_eigenvalue().max(0.0);
    let n = rho_spec.dim();
    let mut terms = Vec::with_capacity(n * n);
    for i in 0..n {
        let r_i = rho_spec.eigenvalues()[i];
        if r_i <= r_cut || r_i <= 0.0 {
            continue;
        }
        for j in 0..n {
            let s_j = sigma_spec.eigenvalues()[j];
            if s_j <= s_cut || s_j <= 0.0 {
                continue;
            }
            let w = overlaps[[i, j]];
            if w <= 0.0 {
                continue;
            }
            terms.push(alpha * r_i.ln() + (1.0 - alpha) * s_j.ln() + w.ln());
        }
    }
    match log_sum_exp(terms.into_iter()) {
        Some(ln_tr) => Ok(DivergenceValue::bits(
            ln_tr / ((alpha - 1.0) * LN_2),
            tag,
            relation,
        )),
        None if alpha < 1.0 => Ok(DivergenceValue::bits(f64::INFINITY, tag, relation)),
        None => Err(Error::NumericalFailure(
            "trace of rho^alpha sigma^(1-alpha) vanished despite support containment".into(),
        )),
    }
}

/// Quantum relative entropy D = tr(rho log rho) - tr(rho log sigma), in bits,
/// computed directly in the respective eigenbases with 0 log 0 = 0.
/// +inf when supp(rho) is not contained in supp(sigma).
pub fn relative_entropy(rho: &DensityOperator, sigma: &PsdOperator) -> Result<DivergenceValue> {
    relative_entropy_with_tol(rho, sigma, DEFAULT_RANK_TOL)
}

pub fn relative_entropy_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    rank_tol: f64,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let (relation, contained, _, _) = supports(rho, sigma, rank_tol)?;
    let tag = AlphaTag::OneLimit;
    if !contained {
        return Ok(DivergenceValue::bits(f64::INFINITY, tag, relation));
    }
    let rho_spec = eig_hermitian(rho.op())?;
    let sigma_spec = eig_hermitian(sigma.op())?;
    let r_cut = rank_tol * rho_spec.max_eigenvalue().max(0.0);
    let s_cut = rank_tol * sigma_spec.max_eigenvalue().max(0.0);
    let entropy_term: f64 = rho_spec
        .eigenvalues()
        .iter()
        .filter(|&&r| r > r_cut && r > 0.0)
        .map(|&r| r * r.log2())
        .sum();
    let mu = state_weights(rho, &sigma_spec);
    let cross_term: f64 = sigma_spec
        .eigenvalues()
        .iter()
        .zip(mu.iter())
        .filter(|(&s, _)| s > s_cut && s > 0.0)
        .map(|(&s, &m)| m * s.log2())
        .sum();
    Ok(DivergenceValue::bits(
        entropy_term - cross_term,
        tag,
        relation,
    ))
}

/// Min-relative entropy D_min = -2 log2 || sqrt(rho) sqrt(sigma) ||_1.
/// Coincides with the sandwiched divergence at alpha = 1/2.
pub fn d_min(rho: &DensityOperator, sigma: &PsdOperator) -> Result<DivergenceValue> {
    d_min_with_tol(rho, sigma, DEFAULT_RANK_TOL)
}

pub fn d_min_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    rank_tol: f64,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let (relation, _, _, _) = supports(rho, sigma, rank_tol)?;
    let sqrt_rho = rho.psd().sqrt(rank_tol)?;
    let sqrt_sigma = sigma.sqrt(rank_tol)?;
    let overlap = trace_norm(&sqrt_rho.matrix().dot(sqrt_sigma.matrix()))?;
    let scale = ZERO_OVERLAP_TOL * sigma.trace().abs().max(1.0);
    let value = if overlap <= scale {
        f64::INFINITY
    } else {
        -2.0 * overlap.log2()
    };
    Ok(DivergenceValue::bits(value, AlphaTag::Min, relation))
}

/// Max-relative entropy D_max = inf { gamma : rho <= 2^gamma sigma }, in
/// bits, computed as log2 of the largest eigenvalue of
/// sigma^{-1/2} rho sigma^{-1/2} with the pseudo-inverse square root on
/// supp(sigma); +inf when supp(rho) is not contained in supp(sigma).
pub fn d_max(rho: &DensityOperator, sigma: &PsdOperator) -> Result<DivergenceValue> {
    d_max_with_tol(rho, sigma, DEFAULT_RANK_TOL)
}

pub fn d_max_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    rank_tol: f64,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let (relation, contained, _, _) = supports(rho, sigma, rank_tol)?;
    let tag = AlphaTag::Max;
    if !contained {
        return Ok(DivergenceValue::bits(f64::INFINITY, tag, relation));
    }
    let sigma_spec = eig_hermitian(sigma.op())?;
    // -1/2 pseudo-power keeps the dynamic range within kappa(sigma) <= 1/rank_tol.
    let logs = sandwich_log_eigs(rho.matrix(), &sigma_spec, -0.5, rank_tol)?;
    let lambda_max = logs
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !lambda_max.is_finite() {
        return Err(Error::NumericalFailure(
            "sigma^{-1/2} rho sigma^{-1/2} has no positive eigenvalue".into(),
        ));
    }
    Ok(DivergenceValue::bits(lambda_max / LN_2, tag, relation))
}

/// Zero-relative Renyi entropy -log2 tr(Pi_rho sigma) with Pi_rho the
/// support projector of rho; +inf when the overlap trace vanishes.
pub fn d0(rho: &DensityOperator, sigma: &PsdOperator) -> Result<DivergenceValue> {
    d0_with_tol(rho, sigma, DEFAULT_RANK_TOL)
}

pub fn d0_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    rank_tol: f64,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let (relation, _, p_rho, _) = supports(rho, sigma, rank_tol)?;
    let overlap = trace_re(&p_rho.matrix().dot(sigma.matrix()));
    let scale = ZERO_OVERLAP_TOL * sigma.trace().abs().max(1.0);
    let value = if overlap <= scale {
        f64::INFINITY
    } else {
        -overlap.log2()
    };
    Ok(DivergenceValue::bits(value, AlphaTag::ZeroLimit, relation))
}

fn check_dims(rho: &DensityOperator, sigma: &PsdOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(())
}

/// |<phi_i|psi_j>|^2 for the two eigenbases: rows index `a`'s eigenvectors,
/// columns index `b`'s.
pub(crate) fn overlap_weights(a: &Spectrum, b: &Spectrum) -> ndarray::Array2<f64> {
    let cross = crate::hermitian::adjoint(a.vectors()).dot(b.vectors());
    cross.mapv(|z| z.norm_sqr())
}

/// mu_j = <psi_j| rho |psi_j> for the eigenbasis of `sigma_spec`.
pub(crate) fn state_weights(rho: &DensityOperator, sigma_spec: &Spectrum) -> Vec<f64> {
    let in_basis = sigma_spec.to_eigenbasis(rho.matrix());
    (0..sigma_spec.dim()).map(|j| in_basis[[j, j]].re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{CMatrix, HermitianOperator};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn density_diag(d: &[f64]) -> DensityOperator {
        DensityOperator::from_op(HermitianOperator::from_diag(d)).unwrap()
    }

    fn psd_diag(d: &[f64]) -> PsdOperator {
        PsdOperator::new(HermitianOperator::from_diag(d)).unwrap()
    }

    fn gap_pair(c_val: f64) -> (DensityOperator, PsdOperator) {
        let rho = density_diag(&[1.0, 0.0]);
        let sigma = PsdOperator::new(
            HermitianOperator::new(ndarray::array![
                [c(1.0, 0.0), c(c_val, 0.0)],
                [c(c_val, 0.0), c(1.0, 0.0)]
            ])
            .unwrap(),
        )
        .unwrap();
        (rho, sigma)
    }

    #[test]
    fn identical_states_have_zero_divergence() {
        let rho = density_diag(&[0.5, 0.5]);
        let sigma = psd_diag(&[0.5, 0.5]);
        for &alpha in &[0.1, 0.5, 0.9, 1.5, 2.0, 5.0] {
            let d = sandwiched_renyi(&rho, &sigma, alpha).unwrap();
            assert!(d.value.abs() < 1e-12, "alpha={alpha}: {}", d.value);
            assert_eq!(d.support_relation, SupportRelation::Equal);
        }
        assert!(relative_entropy(&rho, &sigma).unwrap().value.abs() < 1e-12);
        assert!(d_min(&rho, &sigma).unwrap().value.abs() < 1e-12);
        assert!(d_max(&rho, &sigma).unwrap().value.abs() < 1e-12);
        assert!(d0(&rho, &sigma).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let rho = density_diag(&[0.5, 0.5]);
        let sigma = psd_diag(&[0.5, 0.5]);
        for bad in [0.0, 1.0, -0.3] {
            assert!(matches!(
                sandwiched_renyi(&rho, &sigma, bad),
                Err(Error::InvalidAlpha(_))
            ));
        }
        assert!(matches!(
            alpha_relative_renyi(&rho, &sigma, 1.0),
            Err(Error::InvalidAlpha(_))
        ));
        assert!(matches!(
            alpha_relative_renyi(&rho, &sigma, -0.2),
            Err(Error::InvalidAlpha(_))
        ));
        // alpha = 0 is admissible for the standard entropy.
        assert!(alpha_relative_renyi(&rho, &sigma, 0.0).is_ok());
    }

    #[test]
    fn support_gap_pair_matches_closed_form() {
        // rho = diag(1,0) against [[1,c],[c,1]]: the sandwiched power has the
        // single eigenvalue ((1+c)^{2b} + (1-c)^{2b})/2.
        let c_val = 0.5;
        let (rho, sigma) = gap_pair(c_val);
        for &alpha in &[0.25_f64, 0.5, 0.75] {
            let beta = (1.0 - alpha) / (2.0 * alpha);
            let lambda1 = 0.5 * ((1.0 + c_val).powf(2.0 * beta) + (1.0 - c_val).powf(2.0 * beta));
            let expected = alpha * lambda1.log2() / (alpha - 1.0);
            let got = sandwiched_renyi(&rho, &sigma, alpha).unwrap();
            assert!(
                (got.value - expected).abs() < 1e-10,
                "alpha={alpha}: {} vs {expected}",
                got.value
            );
            assert_eq!(got.support_relation, SupportRelation::RhoInsideSigma);
        }
    }

    #[test]
    fn commuting_pair_reduces_to_standard_entropy() {
        let rho = density_diag(&[0.75, 0.25]);
        let sigma = psd_diag(&[0.5, 0.5]);
        let got = sandwiched_renyi(&rho, &sigma, 2.0).unwrap();
        let expected = (2.0 * (0.75_f64.powi(2) + 0.25_f64.powi(2))).log2();
        assert!((got.value - expected).abs() < 1e-12);
        assert!((got.value - 1.25_f64.log2()).abs() < 1e-12);
        let petz = alpha_relative_renyi(&rho, &sigma, 2.0).unwrap();
        assert!((petz.value - expected).abs() < 1e-12);
    }

    #[test]
    fn standard_entropy_scalar_oracle() {
        // Diagonal pair at alpha = 1/2: -2 log2( sum_i sqrt(r_i s_i) ).
        let rho = density_diag(&[0.75, 0.25]);
        let sigma = psd_diag(&[0.25, 0.75]);
        let got = alpha_relative_renyi(&rho, &sigma, 0.5).unwrap();
        let oracle = -2.0 * (2.0 * (0.75 * 0.25_f64).sqrt()).log2();
        assert!((got.value - oracle).abs() < 1e-12);
    }

    #[test]
    fn standard_entropy_at_zero_matches_projector_overlap() {
        let (rho, sigma) = gap_pair(0.5);
        let got = alpha_relative_renyi(&rho, &sigma, 0.0).unwrap();
        assert!(got.value.abs() < 1e-12);
        assert_eq!(got.alpha, AlphaTag::Alpha(0.0));
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = density_diag(&[1.0, 0.0]);
        let sigma = psd_diag(&[0.5, 0.5]);
        let got = relative_entropy(&rho, &sigma).unwrap();
        assert!((got.value - 1.0).abs() < 1e-12);

        let disjoint = psd_diag(&[0.0, 1.0]);
        let inf = relative_entropy(&rho, &disjoint).unwrap();
        assert!(inf.is_infinite());
        assert_eq!(inf.support_relation, SupportRelation::Incomparable);
    }

    #[test]
    fn min_entropy_matches_trace_norm_oracle() {
        let rho = density_diag(&[1.0, 0.0]);
        let half = c(0.5, 0.0);
        let plus = PsdOperator::new(
            HermitianOperator::new(ndarray::array![[half, half], [half, half]]).unwrap(),
        )
        .unwrap();
        let got = d_min(&rho, &plus).unwrap();
        assert!((got.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_entropy_subnormalized_example() {
        let rho = density_diag(&[0.5, 0.5]);
        let sigma = psd_diag(&[0.25, 0.25]);
        let got = d_max(&rho, &sigma).unwrap();
        assert!((got.value - 1.0).abs() < 1e-12);

        let partial = density_diag(&[1.0, 0.0]);
        let other = psd_diag(&[0.0, 1.0]);
        assert!(d_max(&partial, &other).unwrap().is_infinite());
    }

    #[test]
    fn zero_entropy_examples() {
        for c_val in [0.1, 0.5, 0.9] {
            let (rho, sigma) = gap_pair(c_val);
            let got = d0(&rho, &sigma).unwrap();
            assert!(got.value.abs() < 1e-12, "c={c_val}: {}", got.value);
        }
        let rho = density_diag(&[1.0, 0.0]);
        let sigma = psd_diag(&[0.25, 0.75]);
        assert!((d0(&rho, &sigma).unwrap().value - 2.0).abs() < 1e-12);
        let disjoint = psd_diag(&[0.0, 1.0]);
        assert!(d0(&rho, &disjoint).unwrap().is_infinite());
    }

    #[test]
    fn orthogonal_supports_give_infinity_below_one() {
        let rho = density_diag(&[1.0, 0.0]);
        let sigma = psd_diag(&[0.0, 1.0]);
        let got = sandwiched_renyi(&rho, &sigma, 0.5).unwrap();
        assert!(got.is_infinite());
        let above = sandwiched_renyi(&rho, &sigma, 2.0).unwrap();
        assert!(above.is_infinite());
        let petz = alpha_relative_renyi(&rho, &sigma, 0.5).unwrap();
        assert!(petz.is_infinite());
    }

    #[test]
    fn sandwiched_at_tiny_alpha_stays_finite_and_correct() {
        // Equal supports: D at alpha = 1e-5 approaches -log2 tr(sigma).
        let rho = density_diag(&[0.7, 0.3]);
        let sigma = psd_diag(&[0.45, 0.3]);
        let got = sandwiched_renyi(&rho, &sigma, 1e-5).unwrap();
        let expected = -(0.75_f64).log2();
        assert!(
            (got.value - expected).abs() < 1e-3,
            "{} vs {expected}",
            got.value
        );
    }

    #[test]
    fn noncommuting_pair_dense_cross_check() {
        // Moderate alpha on a full-rank pair: the graded path must agree with
        // forming the sandwiched product densely.
        let rho = DensityOperator::from_op(
            HermitianOperator::new(ndarray::array![
                [c(0.7, 0.0), c(0.2, 0.1)],
                [c(0.2, -0.1), c(0.3, 0.0)]
            ])
            .unwrap(),
        )
        .unwrap();
        let sigma = PsdOperator::new(
            HermitianOperator::new(ndarray::array![
                [c(0.9, 0.0), c(0.3, -0.2)],
                [c(0.3, 0.2), c(0.8, 0.0)]
            ])
            .unwrap(),
        )
        .unwrap();
        for &alpha in &[0.3_f64, 0.6, 2.0, 5.0] {
            let beta = (1.0 - alpha) / (2.0 * alpha);
            let sigma_spec = eig_hermitian(sigma.op()).unwrap();
            let sb = sigma_spec.apply(|l| if l > 0.0 { l.powf(beta) } else { 0.0 });
            let c_mat = sb.matrix().dot(&rho.matrix().dot(sb.matrix()));
            let dense = eig_hermitian(&HermitianOperator::new(c_mat).unwrap()).unwrap();
            let tr: f64 = dense
                .eigenvalues()
                .iter()
                .filter(|&&l| l > 0.0)
                .map(|&l| l.powf(alpha))
                .sum();
            let expected = tr.log2() / (alpha - 1.0);
            let got = sandwiched_renyi(&rho, &sigma, alpha).unwrap();
            assert!(
                (got.value - expected).abs() < 1e-10,
                "alpha={alpha}: {} vs {expected}",
                got.value
            );
        }
    }

    #[test]
    fn unitary_invariance_spot_check() {
        let rho = density_diag(&[0.6, 0.4]);
        let sigma = psd_diag(&[0.3, 0.55]);
        let theta = 0.77_f64;
        let u = ndarray::array![
            [c(theta.cos(), 0.0), c(-theta.sin(), 0.2).unscale((1.0_f64 + 0.04).sqrt())],
            [c(theta.sin(), 0.2).unscale((1.0_f64 + 0.04).sqrt()), c(theta.cos(), 0.0)]
        ];
        // Make u exactly unitary via Gram-Schmidt on columns.
        let u = orthonormalize(&u);
        let rotate = |m: &CMatrix| u.dot(&m.dot(&crate::hermitian::adjoint(&u)));
        let rho_u =
            DensityOperator::from_op(HermitianOperator::new(rotate(rho.matrix())).unwrap())
                .unwrap();
        let sigma_u =
            PsdOperator::new(HermitianOperator::new(rotate(sigma.matrix())).unwrap()).unwrap();
        for &alpha in &[0.3, 0.5, 2.0] {
            let a = sandwiched_renyi(&rho, &sigma, alpha).unwrap().value;
            let b = sandwiched_renyi(&rho_u, &sigma_u, alpha).unwrap().value;
            assert!((a - b).abs() < 1e-9, "alpha={alpha}: {a} vs {b}");
        }
        let a = relative_entropy(&rho, &sigma).unwrap().value;
        let b = relative_entropy(&rho_u, &sigma_u).unwrap().value;
        assert!((a - b).abs() < 1e-9);
    }

    fn orthonormalize(m: &CMatrix) -> CMatrix {
        let n = m.nrows();
        let mut q = m.clone();
        for j in 0..n {
            for k in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    dot += q[[i, k]].conj() * q[[i, j]];
                }
                for i in 0..n {
                    let qik = q[[i, k]];
                    q[[i, j]] -= dot * qik;
                }
            }
            let norm: f64 = (0..n).map(|i| q[[i, j]].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                q[[i, j]] /= norm;
            }
        }
        q
    }
}
