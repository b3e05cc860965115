//! Seeded randomized checks: data-processing monotonicity, joint convexity,
//! the sandwiched-vs-standard upper bound, positivity, and the
//! Araki-Lieb-Thirring branches over random instances.
//!
//! Trials are independent: each derives its generator from
//! (base seed, trial index) via `derive_seed`, and every recorded violation
//! carries the derived seed so the instance can be regenerated exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{
    apply_channel, derive_seed, random_channel_from, random_density_from, random_unitary_from,
    KrausChannel,
};
use crate::divergences::sandwiched_renyi;
use crate::error::{Error, Result};
use crate::hermitian::{DensityOperator, HermitianOperator, PsdOperator};

/// Violation tolerance shared by all fuzzed inequalities.
pub const FUZZ_TOL: f64 = 1e-9;

/// Which property a fuzz report covers. The serialized names are the wire
/// contract used by reports and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FuzzProperty {
    #[serde(rename = "dpi")]
    Dpi,
    #[serde(rename = "joint_convexity")]
    JointConvexity,
    #[serde(rename = "lemma3")]
    UpperBound,
    #[serde(rename = "positivity")]
    Positivity,
    #[serde(rename = "alt_i")]
    AltI,
    #[serde(rename = "alt_ii")]
    AltII,
}

/// A single recorded violation; `seed` regenerates the instance.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzViolation {
    pub seed: u64,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive means the inequality under test was broken by this much.
    pub margin: f64,
}

/// Outcome of a randomized property check. `worst_margin` is the largest
/// (most violating) margin observed across all checks, whether or not it
/// crossed the violation tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub property: FuzzProperty,
    pub trials: u64,
    pub skipped: u64,
    pub violations: Vec<FuzzViolation>,
    #[serde(serialize_with = "super::serialize_extended")]
    pub worst_margin: f64,
}

impl FuzzReport {
    pub fn new(property: FuzzProperty) -> Self {
        Self {
            property,
            trials: 0,
            skipped: 0,
            violations: Vec::new(),
            worst_margin: f64::NEG_INFINITY,
        }
    }

    /// Count one checked instance with its margin.
    pub fn observe(&mut self, margin: f64) {
        self.trials += 1;
        if margin > self.worst_margin {
            self.worst_margin = margin;
        }
    }

    /// Count one instance whose precondition failed.
    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn record(&mut self, violation: FuzzViolation) {
        self.violations.push(violation);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Combine two reports of the same property; merging is associative.
    pub fn merge(mut self, other: FuzzReport) -> Result<FuzzReport> {
        if self.property != other.property {
            return Err(Error::InvalidParameter(
                "cannot merge reports of different properties".into(),
            ));
        }
        self.trials += other.trials;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
        if other.worst_margin > self.worst_margin {
            self.worst_margin = other.worst_margin;
        }
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Channel families the data-processing fuzzer can draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelFamily {
    /// Random isometry-block channels, basis dephasings, and computational
    /// dephasings, drawn per trial.
    Mixed,
    /// Random isometry-block channels with 2..=4 Kraus operators.
    RandomIsometry,
    /// Dephasing in a random orthonormal basis.
    Dephasing,
    /// A single random unitary Kraus operator.
    Unitary,
}

/// One reproducible data-processing instance: a state, a full-rank density
/// for sigma, and a channel from the family.
pub fn dpi_instance(
    trial_seed: u64,
    dims: &[usize],
    family: ChannelFamily,
) -> Result<(DensityOperator, PsdOperator, KrausChannel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let dim = dims[rng.gen_range(0..dims.len())];
    let rank = rng.gen_range(1..=dim);
    let rho = random_density_from(&mut rng, dim, rank)?;
    let sigma_state = random_density_from(&mut rng, dim, dim)?;
    let sigma = PsdOperator::new(sigma_state.op().clone())?;
    let channel = match family {
        ChannelFamily::Mixed => match rng.gen_range(0..3u8) {
            0 => {
                let kraus = rng.gen_range(2..=4usize);
                random_channel_from(&mut rng, dim, dim, kraus)?
            }
            1 => {
                let basis = random_unitary_from(&mut rng, dim)?;
                KrausChannel::dephasing(&basis)?
            }
            _ => KrausChannel::dephasing(&crate::hermitian::identity(dim))?,
        },
        ChannelFamily::RandomIsometry => {
            let kraus = rng.gen_range(2..=4usize);
            random_channel_from(&mut rng, dim, dim, kraus)?
        }
        ChannelFamily::Dephasing => {
            let basis = random_unitary_from(&mut rng, dim)?;
            KrausChannel::dephasing(&basis)?
        }
        ChannelFamily::Unitary => {
            let u = random_unitary_from(&mut rng, dim)?;
            KrausChannel::new(vec![u], KrausChannel::DEFAULT_COMPLETENESS_TOL)?
        }
    };
    Ok((rho, sigma, channel))
}

/// Fuzz the data-processing inequality D(L(rho)||L(sigma)) <= D(rho||sigma)
/// at one alpha over seeded (rho, sigma, channel) triples. For alpha >= 1/2
/// violations indicate a bug; for alpha < 1/2 the report is the output of a
/// counterexample search.
pub fn fuzz_dpi(alpha: f64, trials: u64, seed: u64, dims: &[usize]) -> Result<FuzzReport> {
    fuzz_dpi_family(ChannelFamily::Mixed, alpha, trials, seed, dims)
}

pub fn fuzz_dpi_family(
    family: ChannelFamily,
    alpha: f64,
    trials: u64,
    seed: u64,
    dims: &[usize],
) -> Result<FuzzReport> {
    validate_fuzz_params(trials, dims)?;
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    let mut report = FuzzReport::new(FuzzProperty::Dpi);
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial);
        let (rho, sigma, channel) = dpi_instance(trial_seed, dims, family)?;
        let before = sandwiched_renyi(&rho, &sigma, alpha)?;
        let rho_out = DensityOperator::from_op(apply_channel(&channel, rho.op())?)?;
        let sigma_out = PsdOperator::new(apply_channel(&channel, sigma.op())?)?;
        let after = sandwiched_renyi(&rho_out, &sigma_out, alpha)?;
        let margin = super::margin_between(&after, &before);
        report.observe(margin);
        if margin > FUZZ_TOL {
            report.record(FuzzViolation {
                seed: trial_seed,
                alpha,
                lhs: after.value,
                rhs: before.value,
                margin,
            });
        }
    }
    Ok(report)
}

/// Fuzz joint convexity at alpha in [1/2, 1):
/// D(sum p rho_i || sum p sigma_i) <= sum p_i D(rho_i || sigma_i).
pub fn fuzz_joint_convexity(
    alpha: f64,
    trials: u64,
    seed: u64,
    mixture_size: usize,
    dims: &[usize],
) -> Result<FuzzReport> {
    validate_fuzz_params(trials, dims)?;
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if mixture_size == 0 {
        return Err(Error::InvalidParameter(
            "mixture size must be at least 1".into(),
        ));
    }
    let mut report = FuzzReport::new(FuzzProperty::JointConvexity);
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let dim = dims[rng.gen_range(0..dims.len())];
        // Simplex weights from normalized exponentials.
        let raw: Vec<f64> = (0..mixture_size)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

        let mut rho_parts = Vec::with_capacity(mixture_size);
        let mut sigma_parts = Vec::with_capacity(mixture_size);
        for _ in 0..mixture_size {
            rho_parts.push(random_density_from(&mut rng, dim, dim)?);
            sigma_parts.push(random_density_from(&mut rng, dim, dim)?);
        }
        let mut rho_mix = HermitianOperator::zeros(dim);
        let mut sigma_mix = HermitianOperator::zeros(dim);
        let mut rhs = 0.0;
        for ((&w, rho_i), sigma_i) in weights.iter().zip(&rho_parts).zip(&sigma_parts) {
            rho_mix = rho_mix.add(&rho_i.op().scale(w))?;
            sigma_mix = sigma_mix.add(&sigma_i.op().scale(w))?;
            let sigma_psd = PsdOperator::new(sigma_i.op().clone())?;
            rhs += w * sandwiched_renyi(rho_i, &sigma_psd, alpha)?.value;
        }
        let rho_mix = DensityOperator::from_op(rho_mix)?;
        let sigma_mix = PsdOperator::new(sigma_mix)?;
        let lhs = sandwiched_renyi(&rho_mix, &sigma_mix, alpha)?.value;
        let margin = lhs - rhs;
        report.observe(margin);
        if margin > FUZZ_TOL {
            report.record(FuzzViolation {
                seed: trial_seed,
                alpha,
                lhs,
                rhs,
                margin,
            });
        }
    }
    Ok(report)
}

/// Fuzz the sandwiched <= standard upper bound over seeded pairs and an
/// alpha grid.
pub fn fuzz_upper_bound(
    trials: u64,
    seed: u64,
    dims: &[usize],
    alpha_grid: &[f64],
) -> Result<FuzzReport> {
    validate_fuzz_params(trials, dims)?;
    let mut report = FuzzReport::new(FuzzProperty::UpperBound);
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial);
        let (rho, sigma) = seeded_pair(trial_seed, dims)?;
        let pair_report =
            super::check_upper_bound_labeled(&rho, &sigma, alpha_grid, trial_seed)?;
        report = report.merge(pair_report)?;
    }
    Ok(report)
}

/// Fuzz positivity of the sandwiched divergence on density pairs: the value
/// must be >= 0 for every alpha in the grid.
pub fn fuzz_positivity(
    trials: u64,
    seed: u64,
    dims: &[usize],
    alpha_grid: &[f64],
) -> Result<FuzzReport> {
    validate_fuzz_params(trials, dims)?;
    let mut report = FuzzReport::new(FuzzProperty::Positivity);
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let dim = dims[rng.gen_range(0..dims.len())];
        let rho_rank = rng.gen_range(1..=dim);
        let rho = random_density_from(&mut rng, dim, rho_rank)?;
        let sigma_state = random_density_from(&mut rng, dim, dim)?;
        let sigma = PsdOperator::new(sigma_state.op().clone())?;
        for &alpha in alpha_grid {
            let value = sandwiched_renyi(&rho, &sigma, alpha)?.value;
            let margin = -value;
            report.observe(margin);
            if margin > FUZZ_TOL {
                report.record(FuzzViolation {
                    seed: trial_seed,
                    alpha,
                    lhs: value,
                    rhs: 0.0,
                    margin,
                });
            }
        }
    }
    Ok(report)
}

/// Fuzz both Araki-Lieb-Thirring branches over seeded PSD pairs and
/// exponent grids. Returns the branch-(i) (r >= 1) and branch-(ii) (r < 1)
/// reports separately.
pub fn fuzz_alt(
    trials: u64,
    seed: u64,
    dims: &[usize],
    r_grid: &[f64],
    q_grid: &[f64],
) -> Result<(FuzzReport, FuzzReport)> {
    validate_fuzz_params(trials, dims)?;
    let mut report_i = FuzzReport::new(FuzzProperty::AltI);
    let mut report_ii = FuzzReport::new(FuzzProperty::AltII);
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let dim = dims[rng.gen_range(0..dims.len())];
        let a_state = random_density_from(&mut rng, dim, dim)?;
        let b_state = random_density_from(&mut rng, dim, dim)?;
        let a_scale: f64 = 0.5 + 1.5 * rng.gen::<f64>();
        let b_scale: f64 = 0.5 + 1.5 * rng.gen::<f64>();
        let a = PsdOperator::new(a_state.op().scale(a_scale))?;
        let b = PsdOperator::new(b_state.op().scale(b_scale))?;
        for &r in r_grid {
            for &q in q_grid {
                let check = super::check_alt_labeled(&a, &b, r, q, trial_seed)?;
                if check.property == FuzzProperty::AltI {
                    report_i = report_i.merge(check)?;
                } else {
                    report_ii = report_ii.merge(check)?;
                }
            }
        }
    }
    Ok((report_i, report_ii))
}

/// A seeded (density, PSD) pair: rho of random rank, sigma full rank with a
/// trace drawn from [0.5, 1].
pub fn seeded_pair(trial_seed: u64, dims: &[usize]) -> Result<(DensityOperator, PsdOperator)> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let dim = dims[rng.gen_range(0..dims.len())];
    let rank = rng.gen_range(1..=dim);
    let rho = random_density_from(&mut rng, dim, rank)?;
    let sigma_state = random_density_from(&mut rng, dim, dim)?;
    let trace: f64 = 0.5 + 0.5 * rng.gen::<f64>();
    let sigma = PsdOperator::new(sigma_state.op().scale(trace))?;
    Ok((rho, sigma))
}

/// A seeded full-rank pair with equal supports; sigma alternates between
/// normalized and subnormalized traces.
pub fn seeded_full_rank_pair(
    trial_seed: u64,
    dims: &[usize],
    normalize_sigma: bool,
) -> Result<(DensityOperator, PsdOperator)> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let dim = dims[rng.gen_range(0..dims.len())];
    let rho = random_density_from(&mut rng, dim, dim)?;
    let sigma_state = random_density_from(&mut rng, dim, dim)?;
    let trace: f64 = if normalize_sigma {
        1.0
    } else {
        0.5 + 0.5 * rng.gen::<f64>()
    };
    let sigma = PsdOperator::new(sigma_state.op().scale(trace))?;
    Ok((rho, sigma))
}

fn validate_fuzz_params(trials: u64, dims: &[usize]) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidParameter(
            "dims must be a non-empty list of positive dimensions".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dpi_holds_at_half_on_small_dims() {
        let report = fuzz_dpi(0.5, 200, 11, &[2, 3]).unwrap();
        assert_eq!(report.trials, 200);
        assert!(
            report.is_clean(),
            "violations: {:?}",
            report.violations.first()
        );
    }

    #[test]
    fn dpi_above_one_holds() {
        let report = fuzz_dpi(2.0, 150, 13, &[2, 3]).unwrap();
        assert!(report.is_clean());
    }

    #[test]
    fn unitary_channels_preserve_divergence_exactly() {
        let report = fuzz_dpi_family(ChannelFamily::Unitary, 2.0, 100, 17, &[2, 3]).unwrap();
        assert!(report.is_clean());
        assert!(
            report.worst_margin.abs() <= 1e-9,
            "worst {}",
            report.worst_margin
        );
        // Margins are symmetric around zero for exact invariance.
        assert!(report.worst_margin > -1e-9);
    }

    #[test]
    fn dpi_search_finds_violations_below_half() {
        let report = fuzz_dpi(0.3, 2000, 7, &[2, 3]).unwrap();
        assert!(
            !report.is_clean(),
            "expected a violation within 2000 trials; worst margin {}",
            report.worst_margin
        );
        assert!(report.worst_margin > 1e-6);
    }

    #[test]
    fn dpi_violations_are_reverifiable() {
        let report = fuzz_dpi(0.3, 2000, 7, &[2, 3]).unwrap();
        let v = report
            .violations
            .first()
            .expect("search must find a violation");
        let (rho, sigma, channel) = dpi_instance(v.seed, &[2, 3], ChannelFamily::Mixed).unwrap();
        let before = sandwiched_renyi(&rho, &sigma, v.alpha).unwrap();
        let rho_out =
            DensityOperator::from_op(apply_channel(&channel, rho.op()).unwrap()).unwrap();
        let sigma_out =
            PsdOperator::new(apply_channel(&channel, sigma.op()).unwrap()).unwrap();
        let after = sandwiched_renyi(&rho_out, &sigma_out, v.alpha).unwrap();
        assert!((after.value - v.lhs).abs() < 1e-12);
        assert!((before.value - v.rhs).abs() < 1e-12);
        assert!(after.value - before.value > 1e-6);
    }

    #[test]
    fn joint_convexity_holds_on_qubit_mixtures() {
        let report = fuzz_joint_convexity(0.5, 200, 3, 2, &[2]).unwrap();
        assert!(report.is_clean(), "worst {}", report.worst_margin);
        let report = fuzz_joint_convexity(0.75, 100, 5, 3, &[2]).unwrap();
        assert!(report.is_clean());
    }

    #[test]
    fn joint_convexity_degenerate_mixtures_are_equalities() {
        // Mixture of size 1 is trivially an equality.
        let report = fuzz_joint_convexity(0.6, 50, 9, 1, &[2, 3]).unwrap();
        assert!(report.is_clean());
        assert!(report.worst_margin.abs() < 1e-9);
    }

    #[test]
    fn joint_convexity_rejects_bad_alpha() {
        assert!(fuzz_joint_convexity(0.3, 10, 1, 2, &[2]).is_err());
        assert!(fuzz_joint_convexity(1.0, 10, 1, 2, &[2]).is_err());
    }

    #[test]
    fn positivity_holds_on_density_pairs() {
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9, 1.5, 2.0, 5.0];
        let report = fuzz_positivity(100, 23, &[2, 3], &grid).unwrap();
        assert!(report.is_clean(), "worst {}", report.worst_margin);
    }

    #[test]
    fn upper_bound_fuzz_is_clean() {
        let grid = [0.1, 0.25, 0.5, 0.75, 0.9, 1.5, 2.0, 5.0];
        let report = fuzz_upper_bound(100, 31, &[2, 3], &grid).unwrap();
        assert!(report.is_clean(), "worst {}", report.worst_margin);
        assert_eq!(report.trials + report.skipped, 100 * 8);
    }

    #[test]
    fn alt_fuzz_is_clean_on_both_branches() {
        let (i, ii) = fuzz_alt(60, 37, &[2, 3], &[0.2, 0.5, 1.0, 1.5, 3.0], &[0.5, 1.0, 2.0])
            .unwrap();
        assert!(i.is_clean(), "branch i worst {}", i.worst_margin);
        assert!(ii.is_clean(), "branch ii worst {}", ii.worst_margin);
    }

    #[test]
    fn reports_merge_and_serialize() {
        let a = fuzz_dpi(0.75, 10, 1, &[2]).unwrap();
        let b = fuzz_dpi(0.75, 10, 2, &[2]).unwrap();
        let merged = a.merge(b).unwrap();
        assert_eq!(merged.trials, 20);
        let json = merged.to_json();
        assert!(json.contains("\"property\": \"dpi\""));

        let alt = FuzzReport::new(FuzzProperty::AltI);
        assert!(merged.merge(alt).is_err());
    }

    #[test]
    fn fuzz_reports_are_deterministic() {
        let a = fuzz_dpi(0.6, 50, 99, &[2, 3]).unwrap();
        let b = fuzz_dpi(0.6, 50, 99, &[2, 3]).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
