//! Mean and variance of `X_y`.
//!
//! * exact sum: `E X = sum_{r>=0} (1 - phi_r)`, `E X^2 = sum_{r>=0} (2r+1)(1 - phi_r)`
//!   over the determinant table;
//! * small `y`: the order-20 rational series, trusted for `y <= 7.8`;
//! * large `y`: `E X ~ 2 sqrt(y) + y^{1/6} E chi`, `Var X ~ y^{1/3} Var chi`,
//!   with the `F_2` moments taken from the Painleve solver.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact_series::{eval_series, moment_series, RationalSeries, DEFAULT_ORDER};
use crate::painleve2::f2_moments;
use crate::toeplitz_cdf::log_phi_sequence;

/// Beyond this `y` the small-`y` series is reported as untrusted.
pub const SMALL_Y_LIMIT: f64 = 7.8;

/// Largest `y` that [`moments_auto`] sends to the exact sum.
pub const EXACT_SUM_BUDGET: f64 = 2000.0;

/// Default and smallest accepted truncation threshold of the exact sum.
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    ExactSum,
    SmallY,
    LargeY,
}

impl std::fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MomentMethod::ExactSum => "exact-sum",
            MomentMethod::SmallY => "small-y",
            MomentMethod::LargeY => "large-y",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub y: f64,
    pub mean: f64,
    pub variance: f64,
    pub method: MomentMethod,
    /// Heuristic size of the error; `None` where no estimate exists (the
    /// `o(y^{1/6})` term of the large-`y` expansion is not known).
    pub error_hint: Option<f64>,
    /// False when the method is used outside the range it is meant for.
    pub trusted: bool,
    /// Last `r` included in the exact sum.
    pub truncation_r: Option<usize>,
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("y must be finite and > 0, got {y}")));
    }
    Ok(())
}

/// Largest `r` the exact sum may reach before giving up.
pub fn truncation_window(y: f64) -> usize {
    (2.0 * y.sqrt() + 20.0 * y.powf(1.0 / 6.0) + 50.0).ceil() as usize
}

/// Sums over the determinant table, stopping at the first `r > 2 sqrt(y)`
/// with `1 - phi_r < eps`.
pub fn moments_exact(y: f64, eps: f64) -> Result<MomentResult> {
    check_y(y)?;
    if !(eps >= DEFAULT_EPS) {
        return Err(invalid(format!("eps must be >= {DEFAULT_EPS:e}, got {eps}")));
    }
    let window = truncation_window(y);
    let table = log_phi_sequence(y, window)?;
    let centre = 2.0 * y.sqrt();
    let (mut mean, mut second) = (0.0, 0.0);
    for r in 0..=window {
        let tail = table.complement(r as i64).expect("r within table");
        mean += tail;
        second += (2 * r + 1) as f64 * tail;
        if r as f64 > centre && tail < eps {
            return Ok(MomentResult {
                y,
                mean,
                variance: (second - mean * mean).max(0.0),
                method: MomentMethod::ExactSum,
                // the tail decays faster than geometrically past the window centre
                error_hint: Some((2 * r + 3) as f64 * tail + 1e-15 * second),
                trusted: true,
                truncation_r: Some(r),
            });
        }
    }
    Err(Error::TruncationFailure { r_limit: window })
}

static DEFAULT_SERIES: OnceLock<Result<(RationalSeries, RationalSeries)>> = OnceLock::new();

fn series_of_order(order: usize) -> Result<(RationalSeries, RationalSeries)> {
    if order == DEFAULT_ORDER {
        return DEFAULT_SERIES.get_or_init(|| moment_series(DEFAULT_ORDER)).clone();
    }
    moment_series(order)
}

/// Horner evaluation of the order-`order` mean and variance series.
pub fn moments_small_y(y: f64, order: usize) -> Result<MomentResult> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(invalid(format!("y must be finite and >= 0, got {y}")));
    }
    let (mean_s, var_s) = series_of_order(order)?;
    let last = eval_series_term(&mean_s, order, y).abs().max(eval_series_term(&var_s, order, y).abs());
    let variance = eval_series(&var_s, y);
    Ok(MomentResult {
        y,
        mean: eval_series(&mean_s, y),
        variance: variance.max(0.0),
        method: MomentMethod::SmallY,
        error_hint: Some(last),
        trusted: y <= SMALL_Y_LIMIT && variance >= 0.0,
        truncation_r: None,
    })
}

fn eval_series_term(series: &RationalSeries, k: usize, y: f64) -> f64 {
    use num_traits::ToPrimitive;
    series.coeff(k).to_f64().unwrap_or(f64::NAN) * y.powi(k as i32)
}

/// `2 sqrt(y) + y^{1/6} E chi` and `y^{1/3} Var chi`.
pub fn moments_large_y(y: f64) -> Result<MomentResult> {
    check_y(y)?;
    let (mean_chi, var_chi) = f2_moments()?;
    let scale = y.powf(1.0 / 6.0);
    Ok(MomentResult {
        y,
        mean: 2.0 * y.sqrt() + scale * mean_chi,
        variance: scale * scale * var_chi,
        method: MomentMethod::LargeY,
        error_hint: None,
        trusted: y >= 100.0,
        truncation_r: None,
    })
}

/// Exact sum up to [`EXACT_SUM_BUDGET`], the large-`y` expansion beyond.
pub fn moments_auto(y: f64) -> Result<MomentResult> {
    check_y(y)?;
    if y <= EXACT_SUM_BUDGET {
        moments_exact(y, DEFAULT_EPS)
    } else {
        moments_large_y(y)
    }
}

/// Dispatch on an explicit method, `None` meaning [`moments_auto`].
pub fn moments_with(y: f64, method: Option<MomentMethod>) -> Result<MomentResult> {
    match method {
        None => moments_auto(y),
        Some(MomentMethod::ExactSum) => moments_exact(y, DEFAULT_EPS),
        Some(MomentMethod::SmallY) => moments_small_y(y, DEFAULT_ORDER),
        Some(MomentMethod::LargeY) => moments_large_y(y),
    }
}
