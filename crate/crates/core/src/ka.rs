//! Karlin-Altschul scoring parameters and the Poisson parameter
//! `y = K N e^{-lambda x}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KAParams {
    /// Rate per score unit.
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// Product of the sequence lengths.
    #[serde(rename = "N")]
    pub n: f64,
    /// Normalized score threshold.
    pub x: f64,
}

impl KAParams {
    pub fn new(lambda: f64, k: f64, n: f64, x: f64) -> Result<Self> {
        let params = KAParams { lambda, k, n, x };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(invalid(format!("lambda must be finite and > 0, got {}", self.lambda)));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(invalid(format!("K must be finite and > 0, got {}", self.k)));
        }
        if !(self.n >= 1.0) || !self.n.is_finite() {
            return Err(invalid(format!("N must be finite and >= 1, got {}", self.n)));
        }
        if !self.x.is_finite() {
            return Err(invalid(format!("x must be finite, got {}", self.x)));
        }
        Ok(())
    }

    pub fn y(&self) -> Result<f64> {
        ka_y(self)
    }
}

/// `y = K N e^{-lambda x}`.
pub fn ka_y(params: &KAParams) -> Result<f64> {
    params.validate()?;
    let y = params.k * params.n * (-params.lambda * params.x).exp();
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("y = K N exp(-lambda x) is not a positive finite number: {y}")));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protein_scoring_example() {
        let y = |x| KAParams::new(0.314, 0.17, 34336.0, x).unwrap().y().unwrap();
        assert!((y(7.6) - 536.8).abs() < 0.1);
        assert!((y(6.7) - 712.1).abs() < 0.1);
        assert!((y(5.8) - 944.6).abs() < 0.1);
        assert_eq!(y(0.0), 0.17 * 34336.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KAParams::new(0.0, 0.17, 100.0, 1.0).is_err());
        assert!(KAParams::new(0.3, -1.0, 100.0, 1.0).is_err());
        assert!(KAParams::new(0.3, 0.17, 0.5, 1.0).is_err());
        assert!(KAParams::new(0.3, 0.17, 100.0, f64::NAN).is_err());
        // underflows to zero
        assert!(KAParams::new(1.0, 1.0, 1.0, 1e4).unwrap().y().is_err());
    }
}
