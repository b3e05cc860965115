//! Numerical verification of the divergence family's order relations,
//! limits, and the support-gap counterexample: the alpha -> 0 limit, the
//! sandwiched-vs-standard upper bound, the pinching lower-bound chain, the
//! Araki-Lieb-Thirring trace inequality, and fuzzed data-processing /
//! joint-convexity checks.

mod fuzz;

pub use fuzz::{
    dpi_instance, fuzz_alt, fuzz_dpi, fuzz_dpi_family, fuzz_joint_convexity, fuzz_positivity,
    fuzz_upper_bound, seeded_full_rank_pair, seeded_pair, ChannelFamily, FuzzProperty,
    FuzzReport, FuzzViolation, FUZZ_TOL,
};

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::divergences::sandwich::{log_sum_exp, log_trace_pow, sandwich_log_eigs};
use crate::divergences::{
    alpha_relative_renyi, d0, sandwiched_renyi, state_weights, DivergenceValue,
};
use crate::error::{Error, Result};
use crate::hermitian::{
    adjoint, eig_hermitian, loewner_leq, support_projector, CMatrix, DensityOperator,
    HermitianOperator, PsdOperator, SupportRelation, DEFAULT_RANK_TOL,
};

/// Default alpha ladder for limit estimation at zero.
pub const DEFAULT_ZERO_LADDER: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Serialize +/-inf as the string "inf"/"-inf" (JSON has no infinities).
fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// One evaluation of the sandwiched divergence along a ladder of alphas.
#[derive(Debug, Clone, Serialize)]
pub struct LimitSample {
    pub alpha: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
}

/// Result of estimating lim_{alpha -> 0} of the sandwiched divergence.
#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    /// The final (smallest-alpha) sample.
    #[serde(serialize_with = "serialize_extended")]
    pub estimate: f64,
    pub samples: Vec<LimitSample>,
    /// Which branch of the limit identity applies.
    pub support_relation: SupportRelation,
}

/// Evaluate the sandwiched divergence along a decreasing positive ladder of
/// alphas; the last sample is the point estimate of the alpha -> 0 limit.
pub fn limit_at_zero(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alphas: &[f64],
) -> Result<LimitEstimate> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("alpha ladder is empty".into()));
    }
    for w in alphas.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidParameter(
                "alpha ladder must be strictly decreasing".into(),
            ));
        }
    }
    if *alphas.last().unwrap() <= 0.0 || alphas[0] >= 1.0 {
        return Err(Error::InvalidParameter(
            "alpha ladder must lie in (0, 1)".into(),
        ));
    }
    let mut samples = Vec::with_capacity(alphas.len());
    let mut relation = SupportRelation::Incomparable;
    for &alpha in alphas {
        let d = sandwiched_renyi(rho, sigma, alpha)?;
        relation = d.support_relation;
        samples.push(LimitSample {
            alpha,
            value: d.value,
        });
    }
    Ok(LimitEstimate {
        estimate: samples.last().unwrap().value,
        samples,
        support_relation: relation,
    })
}

/// The explicit support-gap pair: rho = diag(1, 0), sigma = [[1, c], [c, 1]]
/// with 0 < c < 1. supp(rho) is strictly inside supp(sigma) and the pair
/// does not commute.
pub fn counterexample_pair(c: f64) -> Result<(DensityOperator, PsdOperator)> {
    if !(0.0 < c && c < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "c = {c} must lie strictly between 0 and 1"
        )));
    }
    let rho = DensityOperator::from_op(HermitianOperator::from_diag(&[1.0, 0.0]))?;
    let mut m = CMatrix::zeros((2, 2));
    m[[0, 0]] = Complex64::new(1.0, 0.0);
    m[[0, 1]] = Complex64::new(c, 0.0);
    m[[1, 0]] = Complex64::new(c, 0.0);
    m[[1, 1]] = Complex64::new(1.0, 0.0);
    let sigma = PsdOperator::new(HermitianOperator::new(m)?)?;
    Ok((rho, sigma))
}

/// Reproduction of the support-gap counterexample at one (c, alpha):
/// the sandwiched divergence evaluated numerically, its closed form through
/// the single nonzero eigenvalue lambda1, the closed-form alpha -> 0 limit
/// -log2(1 + c), and the zero-relative entropy (identically 0 here).
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub c: f64,
    pub alpha: f64,
    /// The nonzero eigenvalue of the sandwiched product; overflows to "inf"
    /// for tiny alpha (its logarithm is what the closed form uses).
    #[serde(serialize_with = "serialize_extended")]
    pub lambda1: f64,
    pub d_alpha_numeric: f64,
    pub d_alpha_closed: f64,
    pub limit_closed: f64,
    pub d0_value: f64,
    pub match_tol: f64,
}

impl CounterexampleReport {
    /// Whether the numeric path matches the closed form at `match_tol` and
    /// the zero-relative entropy vanished exactly.
    pub fn invariants_hold(&self) -> bool {
        (self.d_alpha_numeric - self.d_alpha_closed).abs() <= self.match_tol
            && self.d0_value == 0.0
    }
}

/// Evaluate the support-gap counterexample at (c, alpha), alpha in (0, 1).
pub fn counterexample_report(c: f64, alpha: f64) -> Result<CounterexampleReport> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let (rho, sigma) = counterexample_pair(c)?;
    let numeric = sandwiched_renyi(&rho, &sigma, alpha)?;
    let beta = (1.0 - alpha) / (2.0 * alpha);
    // ln lambda1 = 2 beta ln(1+c) + ln((1 + ((1-c)/(1+c))^{2 beta}) / 2),
    // stable for any beta; the ratio power underflows harmlessly.
    let ratio_pow = (2.0 * beta * ((1.0 - c) / (1.0 + c)).ln()).exp();
    let ln_lambda1 = 2.0 * beta * (1.0 + c).ln() + ((1.0 + ratio_pow) / 2.0).ln();
    let d_alpha_closed = alpha * ln_lambda1 / ((alpha - 1.0) * LN_2);
    let report = CounterexampleReport {
        c,
        alpha,
        lambda1: ln_lambda1.exp(),
        d_alpha_numeric: numeric.value,
        d_alpha_closed,
        limit_closed: -(1.0 + c).log2(),
        d0_value: d0(&rho, &sigma)?.value,
        match_tol: 1e-9,
    };
    Ok(report)
}

/// Diagnostics for the pinching lower-bound chain at small alpha, for a pair
/// with equal supports: the sandwiched product C, its rank-one-pinched
/// majorant Q, the overlap weights mu, the Loewner margin of n Q - C, and
/// the scalar bound chain connecting the divergence to the zero-relative
/// entropy.
#[derive(Debug, Clone)]
pub struct LowerBoundDiagnostics {
    pub alpha: f64,
    /// C = sigma^beta rho sigma^beta (entries below f64 range flush to 0).
    pub c_alpha: HermitianOperator,
    /// Q = sum_j s_j^{2 beta} mu_j |psi_j><psi_j| (same flushing).
    pub q_alpha: HermitianOperator,
    /// mu_j = <psi_j| rho |psi_j>; a probability vector.
    pub mu: Vec<f64>,
    /// Minimum eigenvalue of n Q - C; >= -1e-9 when the pinching bound holds.
    pub pinching_margin: f64,
    pub bound_chain: BoundChain,
}

/// The scalar chain: the divergence, its pinched lower bound
/// alpha/(alpha-1) log2 n + (1/(alpha-1)) log2 sum_j s_j^{1-alpha} mu_j^alpha,
/// and the zero-relative entropy it tends to.
#[derive(Debug, Clone, Serialize)]
pub struct BoundChain {
    pub d_alpha: f64,
    pub pinched_bound: f64,
    pub d_zero: f64,
}

const MU_SUM_TOL: f64 = 1e-10;
const PINCHING_MARGIN_TOL: f64 = 1e-9;
const CHAIN_TOL: f64 = 1e-9;
/// Exponents below this flush matrix entries to zero rather than underflow.
const FLUSH_EXPONENT: f64 = -700.0;

pub fn lower_bound_diagnostics(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha: f64,
) -> Result<LowerBoundDiagnostics> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let p_rho = support_projector(rho.psd(), DEFAULT_RANK_TOL)?;
    let p_sigma = support_projector(sigma, DEFAULT_RANK_TOL)?;
    if !supports_equal(&p_rho, &p_sigma) {
        return Err(Error::SupportMismatch);
    }

    let n = sigma.dim();
    let beta = (1.0 - alpha) / (2.0 * alpha);
    let sigma_spec = eig_hermitian(sigma.op())?;
    let s_cut = DEFAULT_RANK_TOL * sigma_spec.max_eigenvalue().max(0.0);

    let mu = state_weights(rho, &sigma_spec);
    let mu_sum: f64 = mu.iter().sum();
    if (mu_sum - 1.0).abs() > MU_SUM_TOL || mu.iter().any(|&m| m < -MU_SUM_TOL) {
        return Err(Error::NumericalFailure(format!(
            "overlap weights are not a probability vector (sum = {mu_sum})"
        )));
    }

    // C and Q assembled in sigma's eigenbasis, then rotated back.
    let v = sigma_spec.vectors();
    let r_basis = adjoint(v).dot(&rho.matrix().dot(v));
    let mut c_basis = CMatrix::zeros((n, n));
    let mut q_basis = CMatrix::zeros((n, n));
    for j in 0..n {
        let s_j = sigma_spec.eigenvalues()[j];
        if s_j <= s_cut || s_j <= 0.0 {
            continue;
        }
        let q_exp = 2.0 * beta * s_j.ln() + mu[j].max(0.0).ln();
        if q_exp > FLUSH_EXPONENT {
            q_basis[[j, j]] = Complex64::new(q_exp.exp(), 0.0);
        }
        for k in 0..n {
            let s_k = sigma_spec.eigenvalues()[k];
            if s_k <= s_cut || s_k <= 0.0 {
                continue;
            }
            let c_exp = beta * (s_j.ln() + s_k.ln());
            if c_exp > FLUSH_EXPONENT {
                c_basis[[j, k]] = r_basis[[j, k]] * c_exp.exp();
            }
        }
    }
    let c_alpha = HermitianOperator::new(v.dot(&c_basis.dot(&adjoint(v))))?;
    let q_alpha = HermitianOperator::new(v.dot(&q_basis.dot(&adjoint(v))))?;

    let (holds, pinching_margin) =
        loewner_leq(&c_alpha, &q_alpha.scale(n as f64), PINCHING_MARGIN_TOL)?;
    if !holds {
        return Err(Error::NumericalFailure(format!(
            "pinching majorant failed: margin {pinching_margin}"
        )));
    }

    // Scalar chain, all in log space.
    let d_alpha = sandwiched_renyi(rho, sigma, alpha)?.value;
    let pinched_sum = log_sum_exp(
        sigma_spec
            .eigenvalues()
            .iter()
            .zip(mu.iter())
            .filter(|(&s, &m)| s > s_cut && s > 0.0 && m > 0.0)
            .map(|(&s, &m)| (1.0 - alpha) * s.ln() + alpha * m.ln()),
    )
    .ok_or_else(|| Error::NumericalFailure("pinched trace vanished".into()))?;
    let pinched_bound =
        alpha * (n as f64).log2() / (alpha - 1.0) + pinched_sum / ((alpha - 1.0) * LN_2);
    let d_zero = d0(rho, sigma)?.value;
    if d_alpha < pinched_bound - CHAIN_TOL {
        return Err(Error::NumericalFailure(format!(
            "scalar bound chain failed: {d_alpha} < {pinched_bound}"
        )));
    }

    // Trace-power comparison: tr C^alpha <= n^alpha tr Q^alpha (relative).
    let logs = sandwich_log_eigs(rho.matrix(), &sigma_spec, beta, DEFAULT_RANK_TOL)?;
    let ln_tr_c = log_trace_pow(&logs, alpha)
        .ok_or_else(|| Error::NumericalFailure("sandwiched trace vanished".into()))?;
    let ln_tr_q = alpha * pinched_sum;
    if ln_tr_c > alpha * (n as f64).ln() + ln_tr_q + CHAIN_TOL {
        return Err(Error::NumericalFailure(
            "trace-power comparison tr C^a <= n^a tr Q^a failed".into(),
        ));
    }

    Ok(LowerBoundDiagnostics {
        alpha,
        c_alpha,
        q_alpha,
        mu,
        pinching_margin,
        bound_chain: BoundChain {
            d_alpha,
            pinched_bound,
            d_zero,
        },
    })
}

/// Equal supports: equal ranks and mutual projector containment
/// (|Pi_rho - Pi_sigma Pi_rho Pi_sigma| small); rank equality alone does not
/// imply equal supports.
pub(crate) fn supports_equal(
    p_rho: &crate::hermitian::Projector,
    p_sigma: &crate::hermitian::Projector,
) -> bool {
    if p_rho.rank() != p_sigma.rank() {
        return false;
    }
    let sandwiched = p_sigma
        .matrix()
        .dot(&p_rho.matrix().dot(p_sigma.matrix()));
    crate::hermitian::max_abs_diff(p_rho.matrix(), &sandwiched) <= 1e-8
}

/// One Araki-Lieb-Thirring check: compares tr(B^{1/2} A B^{1/2})^{rq}
/// against tr(B^{r/2} A^r B^{r/2})^q. The first is at most the second for
/// r >= 1 and at least the second for 0 <= r < 1; `margin` is positive when
/// the applicable branch is violated (relative, tolerance 1e-9).
pub fn check_alt(a: &PsdOperator, b: &PsdOperator, r: f64, q: f64) -> Result<FuzzReport> {
    check_alt_labeled(a, b, r, q, 0)
}

pub(crate) fn check_alt_labeled(
    a: &PsdOperator,
    b: &PsdOperator,
    r: f64,
    q: f64,
    seed: u64,
) -> Result<FuzzReport> {
    if r < 0.0 || q < 0.0 {
        return Err(Error::InvalidParameter(
            "exponents r and q must be non-negative".into(),
        ));
    }
    let b_half = crate::hermitian::matrix_power_psd(b, 0.5, DEFAULT_RANK_TOL)?;
    let lhs_core = sandwich_product(&b_half, a.op())?;
    let lhs = trace_power(&lhs_core, r * q)?;

    let b_r_half = crate::hermitian::matrix_power_psd(b, r / 2.0, DEFAULT_RANK_TOL)?;
    let a_r = crate::hermitian::matrix_power_psd(a, r, DEFAULT_RANK_TOL)?;
    let rhs_core = sandwich_product(&b_r_half, a_r.op())?;
    let rhs = trace_power(&rhs_core, q)?;

    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    let (property, margin) = if r >= 1.0 {
        (FuzzProperty::AltI, (lhs - rhs) / scale)
    } else {
        (FuzzProperty::AltII, (rhs - lhs) / scale)
    };
    let mut report = FuzzReport::new(property);
    report.observe(margin);
    if margin > 1e-9 {
        report.record(FuzzViolation {
            seed,
            alpha: r,
            lhs,
            rhs,
            margin,
        });
    }
    Ok(report)
}

fn sandwich_product(outer: &PsdOperator, inner: &HermitianOperator) -> Result<HermitianOperator> {
    HermitianOperator::new(outer.matrix().dot(&inner.matrix().dot(outer.matrix())))
}

/// tr M^p for PSD M with the support-power convention (eigenvalues at or
/// below rank_tol * lambda_max contribute 0, including for p = 0).
fn trace_power(m: &HermitianOperator, p: f64) -> Result<f64> {
    let spec = eig_hermitian(m)?;
    let cutoff = DEFAULT_RANK_TOL * spec.max_eigenvalue().max(0.0);
    Ok(spec
        .eigenvalues()
        .iter()
        .filter(|&&l| l > cutoff && l > 0.0)
        .map(|&l| l.powf(p))
        .sum())
}

/// Check the sandwiched <= standard upper bound across an alpha grid for one
/// pair. Alphas where supp(rho) is not contained in supp(sigma) are skipped
/// and counted in `skipped`.
pub fn check_upper_bound(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha_grid: &[f64],
) -> Result<FuzzReport> {
    check_upper_bound_labeled(rho, sigma, alpha_grid, 0)
}

pub(crate) fn check_upper_bound_labeled(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    alpha_grid: &[f64],
    seed: u64,
) -> Result<FuzzReport> {
    let mut report = FuzzReport::new(FuzzProperty::UpperBound);
    let p_rho = support_projector(rho.psd(), DEFAULT_RANK_TOL)?;
    let p_sigma = support_projector(sigma, DEFAULT_RANK_TOL)?;
    let contained = crate::hermitian::support_contained(&p_rho, &p_sigma, 1e-9);
    for &alpha in alpha_grid {
        if !contained {
            report.skip();
            continue;
        }
        let sandwiched = sandwiched_renyi(rho, sigma, alpha)?;
        let standard = alpha_relative_renyi(rho, sigma, alpha)?;
        let margin = margin_between(&sandwiched, &standard);
        report.observe(margin);
        if margin > 1e-9 {
            report.record(FuzzViolation {
                seed,
                alpha,
                lhs: sandwiched.value,
                rhs: standard.value,
                margin,
            });
        }
    }
    Ok(report)
}

/// lhs.value - rhs.value with infinities collapsing to "no violation" when
/// both sides agree.
fn margin_between(lhs: &DivergenceValue, rhs: &DivergenceValue) -> f64 {
    if lhs.is_infinite() && rhs.is_infinite() {
        0.0
    } else {
        lhs.value - rhs.value
    }
}
