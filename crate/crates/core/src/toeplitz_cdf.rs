//! `phi_r(y) = P(X_y <= r) = e^{-y} D_r(sqrt y)` through the Toeplitz
//! determinant `D_r(t) = det(I_{|i-j|}(2t))_{0 <= i,j < r}`.
//!
//! The scaled matrix with entries `e^{-2t} I_{|i-j|}(2t)` is factored once as
//! `L D L^T`, one leading section at a time. Its pivots give the consecutive
//! ratios
//!
//! ```text
//! phi_{j+1} / phi_j = e^{2t} d_j = 1 + eps_j,
//! ```
//!
//! and since `phi_r -> 1` the sequence is recovered from the tail,
//! `log phi_r = -sum_{j >= r} log(1 + eps_j)`. Every term is positive, so the
//! small quantities `1 - phi_r` keep their relative accuracy. The factorization
//! runs in fixed point with `128 + 8t` bits because the smallest eigenvalue of
//! the scaled sections approaches `e^{-4t}`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fixed::{self, ToeplitzLdl};

/// Environment variable capping the size of the factored Toeplitz section.
pub const MAX_RMAX_ENV: &str = "LISDIST_MAX_RMAX";
pub const DEFAULT_MAX_RMAX: usize = 4096;

/// `1 - phi_r` below this is reported as exactly zero.
pub const SATURATION: f64 = 1e-14;

// Factoring stops once the pivot ratio excess falls below this.
const EPS_NEGLIGIBLE: f64 = 1e-25;

/// Largest section the determinant route may factor, from [`MAX_RMAX_ENV`].
pub fn r_max_cap() -> usize {
    std::env::var(MAX_RMAX_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_RMAX)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Determinant,
    Recursion,
    Series,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Determinant => "determinant",
            Route::Recursion => "recursion",
            Route::Series => "series",
        })
    }
}

/// `log_phi[r] = log phi_r(y)` for `r = 0..=r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiTable {
    pub y: f64,
    pub r_max: usize,
    pub log_phi: Vec<f64>,
    pub route: Route,
    /// Size of the factored section (determinant route only).
    pub sections: usize,
    /// First `r` from which `phi_r` is reported as exactly 1.
    pub saturated_from: Option<usize>,
}

impl PhiTable {
    /// `phi_r`, with `phi_{-1} = 0` and `phi_r = 1` past a saturated table.
    pub fn cdf(&self, r: i64) -> Option<f64> {
        if r < 0 {
            return Some(0.0);
        }
        let r = r as usize;
        match self.log_phi.get(r) {
            Some(l) => Some(l.exp()),
            None => self.saturated_from.map(|_| 1.0),
        }
    }

    /// `P(X_y = r) = phi_r - phi_{r-1}`.
    pub fn pmf(&self, r: i64) -> Option<f64> {
        if r < 0 {
            return Some(0.0);
        }
        let upper = self.cdf(r)?;
        let lower = self.cdf(r - 1)?;
        if r == 0 {
            return Some(upper);
        }
        // phi_r - phi_{r-1} = phi_r (1 - e^{log phi_{r-1} - log phi_r})
        let (Some(&hi), Some(&lo)) = (self.log_phi.get(r as usize), self.log_phi.get(r as usize - 1)) else {
            return Some((upper - lower).max(0.0));
        };
        Some((upper * -(lo - hi).exp_m1()).max(0.0))
    }

    /// `1 - phi_r`, accurate in relative terms.
    pub fn complement(&self, r: i64) -> Option<f64> {
        if r < 0 {
            return Some(1.0);
        }
        match self.log_phi.get(r as usize) {
            Some(&l) => Some(if l == 0.0 { 0.0 } else { -l.exp_m1() }),
            None => self.saturated_from.map(|_| 0.0),
        }
    }

    /// Karlin-Altschul `F(r; y) = P(X_y >= r) = 1 - phi_{r-1}` for `r >= 1`.
    pub fn survival(&self, r: i64) -> Option<f64> {
        if r < 1 {
            return None;
        }
        self.complement(r - 1)
    }
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("y must be finite and > 0, got {y}")));
    }
    Ok(())
}

/// Pivot excesses `eps_j = e^{2t} d_j - 1`, factored until they become
/// negligible past the bulk `j > 2t`.
fn pivot_excesses(y: f64, min_len: usize) -> Result<Vec<f64>> {
    let cap = r_max_cap();
    let t = y.sqrt();
    let bits = fixed::precision_for(t);
    let fixed_t = fixed::sqrt_of_f64(y, bits);
    let e2t = fixed::exp_nonneg(&(&fixed_t << 1), bits);
    let one = BigInt::from(1) << bits as usize;

    let mut j_max = (2.0 * t + 20.0 * t.cbrt() + 30.0).ceil() as usize;
    j_max = j_max.max(min_len).min(cap);
    loop {
        let row = fixed::scaled_bessel_row(&fixed_t, t, j_max, bits)?;
        let mut ldl = ToeplitzLdl::new(row, bits);
        let mut excesses = Vec::with_capacity(j_max + 1);
        while ldl.len() <= j_max {
            let j = ldl.len();
            let pivot = ldl.next_pivot()?;
            let ratio = (pivot * &e2t) >> bits as usize;
            let eps = fixed::to_f64(&(ratio - &one), bits);
            if eps < 0.0 {
                // rounding below the fixed-point resolution
                if j as f64 > 2.0 * t {
                    excesses.push(0.0);
                    return Ok(excesses);
                }
                return Err(Error::Degenerate { r: j });
            }
            excesses.push(eps);
            if excesses.len() >= min_len && j as f64 > 2.0 * t && eps < EPS_NEGLIGIBLE {
                return Ok(excesses);
            }
        }
        if j_max >= cap {
            return Err(Error::Capacity(format!(
                "phi_r(y = {y}) not saturated within {cap} rows; raise {MAX_RMAX_ENV}"
            )));
        }
        j_max = (2 * j_max).min(cap);
    }
}

/// `log phi_r(y)` for `r = 0..=r_max` by the Toeplitz determinant route.
pub fn log_phi_sequence(y: f64, r_max: usize) -> Result<PhiTable> {
    check_y(y)?;
    if r_max < 1 {
        return Err(invalid("r_max must be >= 1"));
    }
    let cap = r_max_cap();
    if r_max > cap {
        return Err(Error::Capacity(format!("r_max = {r_max} exceeds {MAX_RMAX_ENV} = {cap}")));
    }
    let excesses = pivot_excesses(y, r_max + 1)?;
    let sections = excesses.len();

    // tail sums: log phi_r = -sum_{j >= r} ln(1 + eps_j)
    let mut tail = vec![0.0; sections + 1];
    for j in (0..sections).rev() {
        tail[j] = tail[j + 1] + excesses[j].ln_1p();
    }
    let mut log_phi = Vec::with_capacity(r_max + 1);
    log_phi.push(-y);
    let mut saturated_from = None;
    for r in 1..=r_max {
        let mut value = -tail[r.min(sections)];
        if -value < SATURATION {
            value = 0.0;
            saturated_from.get_or_insert(r);
        }
        let previous = log_phi[r - 1];
        log_phi.push(value.max(previous));
    }
    Ok(PhiTable { y, r_max, log_phi, route: Route::Determinant, sections, saturated_from })
}

/// `log phi_r(y)` for `r = 0..=r_max` by the chosen route. The recursion
/// route is limited to its trusted regime, the series route to small `y`.
pub fn phi_table(y: f64, r_max: usize, route: Route) -> Result<PhiTable> {
    match route {
        Route::Determinant => log_phi_sequence(y, r_max),
        Route::Recursion => crate::dpii::log_phi_sequence(y, r_max, crate::dpii::MIN_QUAD_NODES),
        Route::Series => crate::exact_series::log_phi_table(y, r_max, crate::exact_series::DEFAULT_ORDER),
    }
}

/// `phi_r(y)`; `r = -1` gives 0.
pub fn cdf(y: f64, r: i64) -> Result<f64> {
    check_y(y)?;
    if r < 0 {
        return Ok(0.0);
    }
    let table = log_phi_sequence(y, (r as usize).max(1))?;
    Ok(table.cdf(r).expect("r within table"))
}

/// `P(X_y = r)`.
pub fn pmf(y: f64, r: i64) -> Result<f64> {
    check_y(y)?;
    if r < 0 {
        return Ok(0.0);
    }
    let table = log_phi_sequence(y, (r as usize).max(1))?;
    Ok(table.pmf(r).expect("r within table"))
}

/// `F(r; y) = 1 - phi_{r-1}(y)`, `r >= 1`.
pub fn survival(y: f64, r: i64) -> Result<f64> {
    check_y(y)?;
    if r < 1 {
        return Err(invalid(format!("survival needs r >= 1, got {r}")));
    }
    let table = log_phi_sequence(y, (r as usize - 1).max(1))?;
    Ok(table.survival(r).expect("r within table"))
}

/// The explicit small-`r` formulas for `F(r; y)`, `r` in `1..=4`.
///
/// With `g_j(y) = sum_m y^m / (m! (m+j)!)`, so that `I_j(2t) = t^j g_j(t^2)`:
///
/// ```text
/// F(1;y) = 1 - e^{-y}
/// F(2;y) = 1 - e^{-y} g_0
/// F(3;y) = 1 - e^{-y} (g_0^2 - y g_1^2)
/// F(4;y) = 1 - e^{-y} (g_0^3 + 2 y^2 g_1^2 g_2 - 2 y g_1^2 g_0 - y^2 g_0 g_2^2)
/// ```
///
/// Evaluated from the ascending series in fixed point so the result keeps its
/// relative accuracy when `F` is tiny.
pub fn closed_form_survival(r: u32, y: f64) -> Result<f64> {
    check_y(y)?;
    if !(1..=4).contains(&r) {
        return Err(invalid(format!("closed forms exist for r in 1..=4, got {r}")));
    }
    let bits = 160 + (1.5 * y).ceil() as u32;
    let b = bits as usize;
    let mul = |a: &BigInt, c: &BigInt| (a * c) >> b;
    let yf = fixed::from_f64(y, bits);
    let one = BigInt::from(1) << b;
    let g = |j: u64| -> BigInt {
        // g_j = sum_m y^m / (m! (m+j)!)
        let mut term = one.clone();
        for i in 1..=j {
            term /= i;
        }
        let mut sum = term.clone();
        let mut m = 1u64;
        while term.bits() > 0 {
            term = mul(&term, &yf) / (m * (m + j));
            sum += &term;
            m += 1;
        }
        sum
    };
    let e_minus_y = fixed::recip(&fixed::exp_nonneg(&yf, bits), bits);
    let poly = match r {
        1 => one.clone(),
        2 => g(0),
        3 => {
            let (g0, g1) = (g(0), g(1));
            mul(&g0, &g0) - mul(&yf, &mul(&g1, &g1))
        }
        _ => {
            let (g0, g1, g2) = (g(0), g(1), g(2));
            let y2 = mul(&yf, &yf);
            let g1sq = mul(&g1, &g1);
            mul(&mul(&g0, &g0), &g0) + (mul(&y2, &mul(&g1sq, &g2)) << 1)
                - (mul(&yf, &mul(&g1sq, &g0)) << 1)
                - mul(&y2, &mul(&g0, &mul(&g2, &g2)))
        }
    };
    let survival = &one - mul(&e_minus_y, &poly);
    Ok(fixed::to_f64(&survival, bits))
}
