//! Hypothesis-testing relative entropy: the optimal binary test of rho
//! against sigma under a type-I error budget.
//!
//! The optimum over 0 <= A <= I with tr(A rho) >= 1 - eps has the
//! Neyman-Pearson form A(t) = P_+ + x P_0, where P_+ projects onto the
//! strictly positive eigenspace of rho - t sigma, P_0 onto its zero
//! eigenspace, and the threshold t and the scalar weight x in [0, 1] are
//! chosen so the type-I constraint is met exactly (or as closely as the
//! spectrum permits from above). t is located by bisection.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::hermitian::{
    eig_hermitian, support_projector, trace_re, DensityOperator, HermitianOperator, PsdOperator,
    Spectrum, DEFAULT_RANK_TOL,
};

const MAX_BISECTION_ITERS: usize = 200;
/// Eigenvalues of rho - t sigma within this relative band count as the zero
/// eigenspace at the crossing.
const ZERO_BAND_REL: f64 = 1e-10;
/// Bisection interval width target, relative.
const BISECT_TOL: f64 = 1e-14;
/// Type-II overlaps at or below this count as zero (infinite value).
const ZERO_OVERLAP_TOL: f64 = 1e-13;

/// An optimal test operator with its achieved errors.
#[derive(Debug, Clone)]
pub struct HypothesisTest {
    /// Test operator A with 0 <= A <= I.
    pub test_operator: HermitianOperator,
    /// tr((I - A) rho).
    pub type1_error: f64,
    /// tr(A sigma).
    pub type2_error: f64,
    /// The type-I budget the test was built for.
    pub epsilon: f64,
    /// -log2 of the type-II error, in bits.
    pub value: f64,
}

/// Best type-II error exponent at type-I budget `epsilon` in [0, 1).
pub fn hypothesis_testing(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    epsilon: f64,
) -> Result<HypothesisTest> {
    hypothesis_testing_with_tol(rho, sigma, epsilon, DEFAULT_RANK_TOL)
}

pub fn hypothesis_testing_with_tol(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    epsilon: f64,
    rank_tol: f64,
) -> Result<HypothesisTest> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }

    if epsilon == 0.0 {
        // A = Pi_rho achieves zero type-I error exactly and is optimal: the
        // constraint pins A to the identity on supp(rho), and any extra
        // component off the support can only increase tr(A sigma).
        let p = support_projector(rho.psd(), rank_tol)?;
        let a = p.op().clone();
        return finish(rho, sigma, a, epsilon);
    }

    let target = 1.0 - epsilon;
    let feasible = |t: f64| -> Result<bool> {
        let parts = split_spectrum(rho, sigma, t)?;
        Ok(parts.positive_mass + parts.zero_mass >= target)
    };

    // Grow the infeasible end; if even enormous thresholds stay feasible the
    // budgeted mass fits outside supp(sigma) and the type-II error is zero.
    let mut hi = 1.0;
    let mut found_infeasible = false;
    for _ in 0..130 {
        if feasible(hi)? {
            hi *= 2.0;
        } else {
            found_infeasible = true;
            break;
        }
    }
    if !found_infeasible {
        let parts = split_spectrum(rho, sigma, hi)?;
        let a = parts.positive_projector;
        return finish(rho, sigma, a, epsilon);
    }

    let mut lo = 0.0_f64;
    let mut iters = 0;
    while hi - lo > BISECT_TOL * (1.0 + hi) {
        iters += 1;
        if iters > MAX_BISECTION_ITERS {
            return Err(Error::NumericalFailure(
                "threshold bisection did not converge".into(),
            ));
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let parts = split_spectrum(rho, sigma, lo)?;
    let deficit = target - parts.positive_mass;
    let weight = if parts.zero_mass > 1e-15 {
        (deficit / parts.zero_mass).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut a_mat = parts.positive_projector.matrix().clone();
    a_mat += &parts.zero_projector.matrix().mapv(|z| z * weight);
    let a = HermitianOperator::new(a_mat)?;
    finish(rho, sigma, a, epsilon)
}

struct SpectrumSplit {
    positive_projector: HermitianOperator,
    zero_projector: HermitianOperator,
    positive_mass: f64,
    zero_mass: f64,
}

fn split_spectrum(rho: &DensityOperator, sigma: &PsdOperator, t: f64) -> Result<SpectrumSplit> {
    let delta = rho.op().sub(&sigma.op().scale(t))?;
    let spec = eig_hermitian(&delta)?;
    let norm = spec
        .eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    let band = ZERO_BAND_REL * (1.0 + norm);
    let (p_pos, _) = spec.projector_for(|_, l| l > band);
    let (p_zero, _) = spec.projector_for(|_, l| l.abs() <= band);
    let positive_projector = HermitianOperator::new(p_pos)?;
    let zero_projector = HermitianOperator::new(p_zero)?;
    let positive_mass = trace_re(&positive_projector.matrix().dot(rho.matrix()));
    let zero_mass = trace_re(&zero_projector.matrix().dot(rho.matrix()));
    Ok(SpectrumSplit {
        positive_projector,
        zero_projector,
        positive_mass,
        zero_mass,
    })
}

fn finish(
    rho: &DensityOperator,
    sigma: &PsdOperator,
    a: HermitianOperator,
    epsilon: f64,
) -> Result<HypothesisTest> {
    let type1 = (1.0 - trace_re(&a.matrix().dot(rho.matrix()))).max(0.0);
    let type2 = trace_re(&a.matrix().dot(sigma.matrix())).max(0.0);
    validate_test(&a, type1, epsilon)?;
    let scale = ZERO_OVERLAP_TOL * sigma.trace().abs().max(1.0);
    let value = if type2 <= scale {
        f64::INFINITY
    } else {
        let v = -type2.ln() / LN_2;
        if v == 0.0 {
            0.0
        } else {
            v
        }
    };
    Ok(HypothesisTest {
        test_operator: a,
        type1_error: type1,
        type2_error: type2,
        epsilon,
        value,
    })
}

fn validate_test(a: &HermitianOperator, type1: f64, epsilon: f64) -> Result<()> {
    let spec = eig_hermitian(a)?;
    let lo = spec.min_eigenvalue();
    let hi = spec.max_eigenvalue();
    if lo < -1e-9 || hi > 1.0 + 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "test operator escaped [0, I]: eigenvalues in [{lo}, {hi}]"
        )));
    }
    if type1 > epsilon + 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "type-I error {type1} exceeds budget {epsilon}"
        )));
    }
    Ok(())
}

#[allow(dead_code)]
fn spectrum_norm(spec: &Spectrum) -> f64 {
    spec.eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()))
}
