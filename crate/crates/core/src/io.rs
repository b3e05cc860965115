//! JSON wire formats for operators and channels.
//!
//! Operator: `{"dim": n, "re": [[...]], "im": [[...]]}`. Hermiticity is
//! enforced by symmetrization (M <- (M + M†)/2) on load; loads report the
//! size of the correction so callers can warn when it exceeds 1e-8.
//!
//! Channel: `{"dim_in": n, "dim_out": m, "kraus": [<operator JSON>, ...]}`,
//! where each Kraus entry reuses the operator layout with `dim` equal to its
//! row count (dim_out) and re/im of shape dim_out x dim_in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianOperator};

/// Symmetrization corrections above this merit a warning.
pub const SYMMETRIZATION_WARN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (rows, cols) = m.dim();
        let re = (0..rows)
            .map(|i| (0..cols).map(|j| m[[i, j]].re).collect())
            .collect();
        let im = (0..rows)
            .map(|i| (0..cols).map(|j| m[[i, j]].im).collect())
            .collect();
        Self { dim: rows, re, im }
    }

    /// Reassemble the raw complex matrix, validating the shape. `cols` is
    /// the expected column count (equal to `dim` for square operators).
    pub fn to_matrix_with_cols(&self, cols: usize) -> Result<CMatrix> {
        let rows = self.dim;
        let shape_err = || Error::InvalidParameter("re/im shape does not match dim".into());
        if self.re.len() != rows || self.im.len() != rows {
            return Err(shape_err());
        }
        let mut m = CMatrix::zeros((rows, cols));
        for i in 0..rows {
            if self.re[i].len() != cols || self.im[i].len() != cols {
                return Err(shape_err());
            }
            for j in 0..cols {
                m[[i, j]] = Complex64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(m)
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        self.to_matrix_with_cols(self.dim)
    }
}

/// Parse an operator from JSON text. Returns the symmetrized operator along
/// with the size of the Hermiticity correction that was applied.
pub fn operator_from_json(text: &str) -> Result<(HermitianOperator, f64)> {
    let parsed: OperatorJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("operator JSON: {e}")))?;
    let raw = parsed.to_matrix()?;
    let defect = HermitianOperator::symmetrization_defect(&raw);
    Ok((HermitianOperator::new(raw)?, defect))
}

pub fn operator_to_json(m: &HermitianOperator) -> String {
    serde_json::to_string(&OperatorJson::from_matrix(m.matrix()))
        .expect("operator serialization cannot fail")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<OperatorJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(OperatorJson::from_matrix).collect(),
        }
    }
}

pub fn channel_from_json(text: &str) -> Result<KrausChannel> {
    let parsed: ChannelJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("channel JSON: {e}")))?;
    let kraus: Result<Vec<CMatrix>> = parsed
        .kraus
        .iter()
        .map(|k| {
            if k.dim != parsed.dim_out {
                return Err(Error::DimensionMismatch {
                    expected: parsed.dim_out,
                    got: k.dim,
                });
            }
            k.to_matrix_with_cols(parsed.dim_in)
        })
        .collect();
    KrausChannel::new(kraus?, KrausChannel::DEFAULT_COMPLETENESS_TOL)
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string(&ChannelJson::from_channel(ch))
        .expect("channel serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_channel, RandomSpec};
    use crate::hermitian::max_abs_diff;

    #[test]
    fn operator_round_trip() {
        let m = HermitianOperator::from_diag(&[0.75, 0.25]);
        let text = operator_to_json(&m);
        let (back, defect) = operator_from_json(&text).unwrap();
        assert!(max_abs_diff(m.matrix(), back.matrix()) < 1e-15);
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn load_reports_symmetrization_defect() {
        let text = r#"{"dim": 2, "re": [[1.0, 0.5], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
        let (op, defect) = operator_from_json(text).unwrap();
        assert!(defect > SYMMETRIZATION_WARN_TOL);
        assert!((op.matrix()[[0, 1]].re - 0.25).abs() < 1e-15);
        assert!((op.matrix()[[1, 0]].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn malformed_operator_is_rejected() {
        assert!(operator_from_json("{").is_err());
        let bad_shape = r#"{"dim": 2, "re": [[1.0]], "im": [[0.0]]}"#;
        assert!(operator_from_json(bad_shape).is_err());
    }

    #[test]
    fn channel_round_trip() {
        let ch = random_channel(&RandomSpec::new(5, 2, 2).with_kraus(3)).unwrap();
        let text = channel_to_json(&ch);
        let back = channel_from_json(&text).unwrap();
        assert_eq!(back.dim_in(), 2);
        assert_eq!(back.dim_out(), 2);
        assert_eq!(back.kraus().len(), 3);
        for (a, b) in ch.kraus().iter().zip(back.kraus().iter()) {
            assert!(max_abs_diff(a, b) < 1e-15);
        }
    }
}
