//! Matrix functions on supports: fractional (pseudo-)powers, support
//! projectors, and support-relation classification.

use super::{eig_hermitian, HermitianOperator, Projector, PsdOperator, DEFAULT_SUPPORT_TOL};
use crate::error::Result;

/// U diag(f(lambda)) U† with f(lambda) = lambda^p on the support and 0 off it.
///
/// Eigenvalues at or below `rank_tol * lambda_max` map to 0, so negative
/// powers act as pseudo-powers on the support and p = 0 yields the support
/// projector. Negative eigenvalues within the certification floor are
/// clipped to 0 before the power is taken.
pub fn matrix_power_psd(a: &PsdOperator, p: f64, rank_tol: f64) -> Result<PsdOperator> {
    let spectrum = eig_hermitian(a.op())?;
    let cutoff = rank_tol * spectrum.max_eigenvalue().max(0.0);
    let powered = spectrum.apply(|l| {
        if l > cutoff && l > 0.0 {
            l.powf(p)
        } else {
            0.0
        }
    });
    PsdOperator::certify(powered, a.eigenfloor())
}

/// Projector onto the span of eigenvectors with eigenvalue above
/// `rank_tol * lambda_max`. The zero operator maps to the rank-0 projector.
pub fn support_projector(a: &PsdOperator, rank_tol: f64) -> Result<Projector> {
    let spectrum = eig_hermitian(a.op())?;
    let cutoff = rank_tol * spectrum.max_eigenvalue().max(0.0);
    let (p, rank) = spectrum.projector_for(|_, l| l > cutoff && l > 0.0);
    Projector::new(HermitianOperator::new(p)?, rank)
}

/// tr(P (I - Q)): how much of P's range leaks outside Q's range.
/// Zero (up to roundoff) iff range(P) is contained in range(Q).
pub fn support_leakage(p: &Projector, q: &Projector) -> f64 {
    let pq = p.matrix().dot(q.matrix());
    (p.rank() as f64 - super::trace_re(&pq)).max(0.0)
}

/// Whether supp(rho) is contained in supp(sigma) within `tol` leakage.
pub fn support_contained(rho_support: &Projector, sigma_support: &Projector, tol: f64) -> bool {
    support_leakage(rho_support, sigma_support) <= tol
}

/// Relation between the supports of two operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportRelation {
    Equal,
    RhoInsideSigma,
    Incomparable,
}

/// Classify the relation between supp(rho) and supp(sigma).
pub fn support_relation(rho_support: &Projector, sigma_support: &Projector) -> SupportRelation {
    let tol = DEFAULT_SUPPORT_TOL;
    let forward = support_contained(rho_support, sigma_support, tol);
    let backward = support_contained(sigma_support, rho_support, tol);
    match (forward, backward) {
        (true, true) => SupportRelation::Equal,
        (true, false) => SupportRelation::RhoInsideSigma,
        _ => SupportRelation::Incomparable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{max_abs_diff, CMatrix, DEFAULT_RANK_TOL};
    use ndarray::array;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn psd_diag(d: &[f64]) -> PsdOperator {
        PsdOperator::new(HermitianOperator::from_diag(d)).unwrap()
    }

    #[test]
    fn square_root_of_diagonal() {
        let a = psd_diag(&[4.0, 1.0]);
        let half = matrix_power_psd(&a, 0.5, DEFAULT_RANK_TOL).unwrap();
        let expected = HermitianOperator::from_diag(&[2.0, 1.0]);
        assert!(max_abs_diff(half.matrix(), expected.matrix()) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_on_support() {
        let a = psd_diag(&[4.0, 0.0]);
        let inv = matrix_power_psd(&a, -1.0, DEFAULT_RANK_TOL).unwrap();
        let expected = HermitianOperator::from_diag(&[0.25, 0.0]);
        assert!(max_abs_diff(inv.matrix(), expected.matrix()) < 1e-12);
    }

    #[test]
    fn power_in_eigenbasis_matches_scalar_powers() {
        // alpha = 0.25 makes the exponent 2 beta = 3; the oracle is the
        // scalar cube of the eigenvalues from eig_hermitian.
        let m = HermitianOperator::new(array![
            [c(1.0, 0.0), c(0.5, 0.0)],
            [c(0.5, 0.0), c(1.0, 0.0)]
        ])
        .unwrap();
        let a = PsdOperator::new(m).unwrap();
        let cubed = matrix_power_psd(&a, 3.0, DEFAULT_RANK_TOL).unwrap();
        let spec = eig_hermitian(cubed.op()).unwrap();
        assert!((spec.eigenvalues()[0] - 1.5_f64.powi(3)).abs() < 1e-12);
        assert!((spec.eigenvalues()[1] - 0.5_f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn zeroth_power_is_support_projector() {
        let a = psd_diag(&[2.0, 0.0]);
        let p = matrix_power_psd(&a, 0.0, DEFAULT_RANK_TOL).unwrap();
        let expected = HermitianOperator::from_diag(&[1.0, 0.0]);
        assert!(max_abs_diff(p.matrix(), expected.matrix()) < 1e-12);
    }

    #[test]
    fn support_projector_examples() {
        let a = psd_diag(&[1.0, 0.0]);
        let p = support_projector(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(p.rank(), 1);
        assert!(max_abs_diff(p.matrix(), HermitianOperator::from_diag(&[1.0, 0.0]).matrix()) < 1e-12);

        let id = psd_diag(&[1.0, 1.0, 1.0]);
        let p = support_projector(&id, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(p.rank(), 3);

        let zero = psd_diag(&[0.0, 0.0]);
        let p = support_projector(&zero, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(p.rank(), 0);
    }

    #[test]
    fn rank_two_gram_matrix_has_rank_two_support() {
        // X X† with X of width 2 has rank 2 by construction.
        let mut x = CMatrix::zeros((4, 2));
        let vals = [
            (0.3, -0.1),
            (0.7, 0.2),
            (-0.4, 0.5),
            (0.1, 0.9),
            (0.6, -0.3),
            (-0.2, 0.4),
            (0.8, 0.1),
            (0.05, -0.6),
        ];
        for (k, &(re, im)) in vals.iter().enumerate() {
            x[[k / 2, k % 2]] = c(re, im);
        }
        let gram = x.dot(&super::super::adjoint(&x));
        let a = PsdOperator::new(HermitianOperator::new(gram).unwrap()).unwrap();
        let p = support_projector(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(p.rank(), 2);
    }

    #[test]
    fn support_relations() {
        let full = support_projector(&psd_diag(&[1.0, 1.0]), DEFAULT_RANK_TOL).unwrap();
        let partial = support_projector(&psd_diag(&[1.0, 0.0]), DEFAULT_RANK_TOL).unwrap();
        let other = support_projector(&psd_diag(&[0.0, 1.0]), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(support_relation(&full, &full), SupportRelation::Equal);
        assert_eq!(
            support_relation(&partial, &full),
            SupportRelation::RhoInsideSigma
        );
        assert_eq!(
            support_relation(&partial, &other),
            SupportRelation::Incomparable
        );
        assert_eq!(
            support_relation(&full, &partial),
            SupportRelation::Incomparable
        );
    }
}
