//! Exact rational power series in `y = t^2`: `D_r`, `phi_r`, and the small-`y`
//! expansions of the mean and variance of `X_y`.
//!
//! `I_j(2t) = t^j g_j(y)` with `g_j(y) = sum_m y^m / (m! (m+j)!)`. Scaling row
//! `i` by `t^i` and column `k` by `t^{-k}` leaves the determinant unchanged and
//! turns the Toeplitz matrix into
//!
//! ```text
//! M[i][k] = y^{i-k} g_{i-k}(y)   (i >= k),      M[i][k] = g_{k-i}(y)   (i < k),
//! ```
//!
//! so every entry is a series in `y` and odd powers of `t` never arise. At
//! `y = 0` the matrix is unit upper triangular, hence every leading minor is a
//! unit of `Q[[y]]` and elimination without pivoting never stalls. One
//! elimination yields all leading minors `D_1, D_2, ...` at once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::toeplitz_cdf::{PhiTable, Route, SATURATION};

/// Orders above this are refused as a capacity error.
pub const MAX_ORDER: usize = 48;

/// Default truncation order of the small-`y` series.
pub const DEFAULT_ORDER: usize = 20;

/// `coeffs[k]` is the exact coefficient of `y^k`, `k = 0..=order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSeries {
    pub order: usize,
    pub coeffs: Vec<BigRational>,
}

impl Serialize for RationalSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coefficient_strings())
    }
}

impl RationalSeries {
    pub fn zero(order: usize) -> Self {
        RationalSeries { order, coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, BigRational::one())
    }

    pub fn constant(order: usize, c: BigRational) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `e^{sign * y}` truncated at `y^order`.
    pub fn exp(order: usize, negative: bool) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = BigRational::one();
        for k in 0..=order {
            if k > 0 {
                c = c / BigRational::from_integer(BigInt::from(k));
                if negative {
                    c = -c;
                }
            }
            coeffs.push(c.clone());
        }
        RationalSeries { order, coeffs }
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    /// Reduced fractions rendered as `p/q`, or `p` for integers.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let coeffs = (0..=order).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect();
        RationalSeries { order, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let coeffs = (0..=order).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect();
        RationalSeries { order, coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalSeries { order: self.order, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        RationalSeries { order, coeffs }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return None;
        }
        let inv0 = c0.recip();
        let mut out = vec![BigRational::zero(); self.order + 1];
        out[0] = inv0.clone();
        for k in 1..=self.order {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &out[k - i];
                }
            }
            out[k] = -(acc * &inv0);
        }
        Some(RationalSeries { order: self.order, coeffs: out })
    }

    /// `y^shift * self`, truncated.
    fn shifted(&self, shift: usize) -> Self {
        let mut out = Self::zero(self.order);
        for k in shift..=self.order {
            out.coeffs[k] = self.coeffs[k - shift].clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// Horner evaluation in double precision of the exact coefficients.
pub fn eval_series(series: &RationalSeries, y: f64) -> f64 {
    series
        .coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * y + c.to_f64().unwrap_or(f64::NAN))
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Capacity(format!("series order {order} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `g_j(y) = sum_m y^m / (m! (m+j)!)`.
fn bessel_g(j: usize, order: usize) -> RationalSeries {
    let coeffs = (0..=order)
        .map(|m| BigRational::new(BigInt::one(), factorial(m) * factorial(m + j)))
        .collect();
    RationalSeries { order, coeffs }
}

/// `D_0, D_1, ..., D_{r_max}` as series in `y`, truncated at `y^order`.
pub fn d_series_all(r_max: usize, order: usize) -> Result<Vec<RationalSeries>> {
    check_order(order)?;
    let g: Vec<RationalSeries> = (0..r_max.max(1)).map(|j| bessel_g(j, order)).collect();
    let mut m: Vec<Vec<RationalSeries>> = (0..r_max)
        .map(|i| {
            (0..r_max)
                .map(|k| if i >= k { g[i - k].shifted(i - k) } else { g[k - i].clone() })
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(r_max + 1);
    out.push(RationalSeries::one(order));
    for c in 0..r_max {
        let pivot = m[c][c].clone();
        let next = out[c].mul(&pivot);
        out.push(next);
        if c + 1 == r_max {
            break;
        }
        let inv = pivot.inverse().expect("leading minors are units of Q[[y]]");
        for i in c + 1..r_max {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].mul(&inv);
            for k in c + 1..r_max {
                let update = factor.mul(&m[c][k]);
                m[i][k] = m[i][k].sub(&update);
            }
        }
    }
    Ok(out)
}

/// `D_r` truncated at `y^order`; `coeffs[k] = f_{k,r} / (k!)^2`.
pub fn d_series(r: usize, order: usize) -> Result<RationalSeries> {
    Ok(d_series_all(r, order)?.pop().expect("r + 1 entries"))
}

/// `phi_r = e^{-y} D_r` for `r = 0..=r_max`.
pub fn phi_series_all(r_max: usize, order: usize) -> Result<Vec<RationalSeries>> {
    let decay = RationalSeries::exp(order, true);
    Ok(d_series_all(r_max, order)?.iter().map(|d| decay.mul(d)).collect())
}

/// `log phi_r(y)` for `r = 0..=r_max` from the series through `y^order`.
/// `1 - phi_r` is summed from its own series, so it keeps relative accuracy
/// while `y` is small; the route is meant for `y` of order one.
pub fn log_phi_table(y: f64, r_max: usize, order: usize) -> Result<PhiTable> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("y must be finite and > 0, got {y}")));
    }
    if r_max < 1 {
        return Err(invalid("r_max must be >= 1"));
    }
    let one = RationalSeries::one(order);
    let phis = phi_series_all(r_max.min(order), order)?;
    let mut log_phi = Vec::with_capacity(r_max + 1);
    let mut saturated_from = None;
    for r in 0..=r_max {
        let complement = match phis.get(r) {
            Some(phi) => eval_series(&one.sub(phi), y).clamp(0.0, 1.0),
            None => 0.0,
        };
        let mut value = if r == 0 { -y } else { (-complement).ln_1p() };
        if r > 0 && complement < SATURATION {
            value = 0.0;
            saturated_from.get_or_insert(r);
        }
        let floor = log_phi.last().copied().unwrap_or(f64::NEG_INFINITY);
        log_phi.push(value.max(floor));
    }
    Ok(PhiTable { y, r_max, log_phi, route: Route::Series, sections: 0, saturated_from })
}

/// `f_{k,r}` = number of permutations of `k` with longest increasing
/// subsequence at most `r`, read off `D_r` for `k = 0..=order`.
pub fn f_counts(r: usize, order: usize) -> Result<Vec<BigInt>> {
    let d = d_series(r, order)?;
    Ok(d.coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let f = factorial(k);
            let scaled = c * BigRational::from_integer(&f * &f);
            assert!(scaled.is_integer() && !scaled.is_negative(), "f_{{{k},{r}}} is a count");
            scaled.to_integer()
        })
        .collect())
}

/// Exact series of `E(X_y)` and `E(X_y^2)` through `y^order`.
fn raw_moment_series(order: usize) -> Result<(RationalSeries, RationalSeries)> {
    check_order(order)?;
    // 1 - phi_r = O(y^{r+1}), so r < order suffices
    let phis = phi_series_all(order.saturating_sub(1), order)?;
    let one = RationalSeries::one(order);
    let mut mean = RationalSeries::zero(order);
    let mut second = RationalSeries::zero(order);
    for (r, phi) in phis.iter().enumerate().take(order) {
        let tail = one.sub(phi);
        mean = mean.add(&tail);
        second = second.add(&tail.scale(&BigRational::from_integer(BigInt::from(2 * r + 1))));
    }
    Ok((mean, second))
}

/// Small-`y` expansion of `E(X_y)`.
pub fn mean_series(order: usize) -> Result<RationalSeries> {
    Ok(raw_moment_series(order)?.0)
}

/// Small-`y` expansion of `Var(X_y)`.
pub fn var_series(order: usize) -> Result<RationalSeries> {
    let (mean, second) = raw_moment_series(order)?;
    Ok(second.sub(&mean.mul(&mean)))
}

/// Both expansions from one elimination.
pub fn moment_series(order: usize) -> Result<(RationalSeries, RationalSeries)> {
    let (mean, second) = raw_moment_series(order)?;
    let var = second.sub(&mean.mul(&mean));
    Ok((mean, var))
}
