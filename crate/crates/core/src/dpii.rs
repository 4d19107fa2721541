//! The discrete Painleve II route to `phi_r`.
//!
//! With `Phi_r = 1 - U_r^2`,
//!
//! ```text
//! (r/t) U_r + (1 - U_r^2)(U_{r-1} + U_{r+1}) = 0,   U_0 = -1,  U_1 = I_1(2t)/I_0(2t),
//! phi_r(y) = exp(-4 int_0^t log(t/tau) tau U_r(tau)^2 dtau),   y = t^2,
//! ```
//!
//! and `Phi_r` solves a second order ODE in `t` that [`ode_residual`] checks.
//!
//! Forward iteration is unstable once `r` exceeds about `2t`: the wanted
//! solution decays like `t^r / r!` while rounding errors grow like `r!/t^r`;
//! near `|U_1| -> 1` every step also amplifies by about `8t`.
//! [`u_sequence`] therefore carries a first order bound on the accumulated
//! error. Where that bound is too large `U_r` is small, the recursion is
//! nearly linear, and its decaying solution is `(-1)^{r+1} J_r(2t)`;
//! [`phi_via_integral`] uses `J_r(2t)^2` there. It agrees with `U_r^2` to
//! about `1e-10` relative at the points where the recursion stops being
//! trusted, for `r <= 10`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special_fn::scaled_bessel_row;
use crate::toeplitz_cdf::{PhiTable, Route, SATURATION};

/// Relative error bound above which a recursion value is not used.
pub const TRUST_REL: f64 = 1e-6;

/// Smallest accepted node count for [`phi_via_integral`].
pub const MIN_QUAD_NODES: usize = 64;

/// Result of doubling the node count must agree to this, in `phi`.
pub const QUAD_TOL: f64 = 1e-8;

// |U_r| this close to 1 makes the next step divide by ~0
const BLOW_UP_GAP: f64 = 1e-12;

/// `u[r] = U_r(t)` for `r = 0..=r_max`, with absolute error bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct USequence {
    pub t: f64,
    pub u: Vec<f64>,
    /// First order estimate of `|computed u[r] - U_r(t)|`.
    pub error_bound: Vec<f64>,
}

impl USequence {
    pub fn r_max(&self) -> usize {
        self.u.len() - 1
    }

    /// `Phi_r = 1 - U_r^2`.
    pub fn big_phi(&self, r: usize) -> f64 {
        1.0 - self.u[r] * self.u[r]
    }

    /// Whether `u[r]` is known to relative accuracy [`TRUST_REL`].
    pub fn trusted(&self, r: usize) -> bool {
        self.error_bound[r] <= TRUST_REL * self.u[r].abs()
    }

    /// Largest `r` such that `u[0..=r]` are all trusted.
    pub fn last_trusted(&self) -> usize {
        last_trusted(&self.u, &self.error_bound)
    }
}

/// Forward recursion `u[r+1] = -u[r-1] - (r/t) u[r] / (1 - u[r]^2)`.
///
/// Fails with [`Error::LossOfPrecision`] when `|u[r]|` reaches 1 or a value
/// stops being finite.
pub fn u_sequence(t: f64, r_max: usize) -> Result<USequence> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t must be finite and > 0, got {t}")));
    }
    if r_max < 1 {
        return Err(invalid("r_max must be >= 1"));
    }
    let eps = f64::EPSILON;
    let u1 = scaled_bessel_row(t, 1)?.ratio_to_zeroth(1);
    let mut u = vec![-1.0, u1];
    // rounding committed when forming u[r], and the linearized step factor
    // d u[r+1] / d u[r] = -(r/t)(1 + u^2)/(1 - u^2)^2
    let mut rounding = vec![0.0, 4.0 * eps * u1];
    let mut slope = vec![0.0];
    for r in 1..r_max {
        let (prev, cur) = (u[r - 1], u[r]);
        let gap = 1.0 - cur * cur;
        if !(gap > BLOW_UP_GAP) || !cur.is_finite() {
            let bound = propagate(&slope, &rounding);
            let trusted = last_trusted(&u, &bound).min(r - 1);
            return Err(Error::LossOfPrecision { last_trusted: trusted });
        }
        let drift = (r as f64 / t) * cur / gap;
        let next = -prev - drift;
        if !next.is_finite() {
            let bound = propagate(&slope, &rounding);
            return Err(Error::LossOfPrecision { last_trusted: last_trusted(&u, &bound).min(r) });
        }
        slope.push((r as f64 / t) * (1.0 + cur * cur) / (gap * gap));
        rounding.push(4.0 * eps * (prev.abs() + drift.abs()));
        u.push(next);
    }
    let error_bound = propagate(&slope, &rounding);
    let seq = USequence { t, u, error_bound };
    Ok(seq)
}

// Each rounding error is carried to later indices by the linearized
// recursion e[m+1] = -e[m-1] - slope[m] e[m]; magnitudes add at the end.
fn propagate(slope: &[f64], rounding: &[f64]) -> Vec<f64> {
    let n = rounding.len();
    let mut bound = vec![0.0; n];
    for k in 1..n {
        let (mut before, mut at) = (0.0, rounding[k]);
        bound[k] += at.abs();
        for m in k..n - 1 {
            let next = -before - slope[m] * at;
            bound[m + 1] += next.abs();
            (before, at) = (at, next);
        }
    }
    bound
}

fn last_trusted(u: &[f64], bound: &[f64]) -> usize {
    (0..u.len().min(bound.len()))
        .take_while(|&r| bound[r] <= TRUST_REL * u[r].abs())
        .last()
        .unwrap_or(0)
}

// U_r(tau)^2, from the linearized recursion where the forward one cannot be
// trusted
fn u_squared(tau: f64, r: usize) -> Result<f64> {
    match u_sequence(tau, r) {
        Ok(seq) if seq.trusted(r) => Ok(seq.u[r] * seq.u[r]),
        // only the decaying regime is allowed to fall back
        Ok(_) | Err(Error::LossOfPrecision { .. }) if 2.0 * tau < r as f64 => {
            let j = bessel_j_series(r, 2.0 * tau);
            Ok(j * j)
        }
        Ok(seq) => Err(Error::LossOfPrecision { last_trusted: seq.last_trusted() }),
        Err(e) => Err(e),
    }
}

/// `J_n(x)` by its ascending series; meant for `x < n`, where terms shrink
/// from the first.
fn bessel_j_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (n as f64 * half.ln() - ln_factorial(n)).exp();
    let mut sum = term;
    let q = -half * half;
    for m in 1.. {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn ln_factorial(r: usize) -> f64 {
    (2..=r).map(|i| (i as f64).ln()).sum()
}

// -4 int_0^t log(t/tau) tau U_r^2 dtau with tau = t u^2:
// -16 t^2 int_0^1 (-u^3 ln u) U_r(t u^2)^2 du
fn log_phi_by_quadrature(t: f64, r: usize, rule: &GaussLegendre) -> Result<f64> {
    let mut failure = None;
    let integral = rule.integrate(0.0, 1.0, |u| {
        if u <= 0.0 || failure.is_some() {
            return 0.0;
        }
        match u_squared(t * u * u, r) {
            Ok(sq) => -u * u * u * u.ln() * sq,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(-16.0 * t * t * integral),
    }
}

/// `phi_r(y)` from the integral representation, Gauss-Legendre with `n_quad`
/// and `2 n_quad` nodes; the finer value is returned.
pub fn phi_via_integral(y: f64, r: usize, n_quad: usize) -> Result<f64> {
    Ok(log_phi_via_integral(y, r, n_quad)?.exp())
}

/// As [`phi_via_integral`], returning `log phi_r(y)`.
pub fn log_phi_via_integral(y: f64, r: usize, n_quad: usize) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("y must be finite and > 0, got {y}")));
    }
    if n_quad < MIN_QUAD_NODES {
        return Err(invalid(format!("n_quad must be >= {MIN_QUAD_NODES}, got {n_quad}")));
    }
    if r == 0 {
        return Ok(-y);
    }
    let t = y.sqrt();
    let coarse = log_phi_by_quadrature(t, r, &GaussLegendre::new(n_quad))?;
    let fine = log_phi_by_quadrature(t, r, &GaussLegendre::new(2 * n_quad))?;
    let delta = (fine.exp() - coarse.exp()).abs();
    if delta > QUAD_TOL {
        return Err(Error::QuadratureNonConvergence { delta });
    }
    Ok(fine)
}

/// `log phi_r(y)` for `r = 0..=r_max` through the integral representation.
pub fn log_phi_sequence(y: f64, r_max: usize, n_quad: usize) -> Result<PhiTable> {
    if r_max < 1 {
        return Err(invalid("r_max must be >= 1"));
    }
    let mut log_phi = Vec::with_capacity(r_max + 1);
    let mut saturated_from = None;
    for r in 0..=r_max {
        let mut value = log_phi_via_integral(y, r, n_quad)?.min(0.0);
        if r > 0 && -value < SATURATION {
            value = 0.0;
            saturated_from.get_or_insert(r);
        }
        log_phi.push(value);
    }
    Ok(PhiTable { y, r_max, log_phi, route: Route::Recursion, sections: 0, saturated_from })
}

/// Defect of
///
/// ```text
/// Phi'' = (1/2)(1/(Phi-1) + 1/Phi) Phi'^2 - Phi'/t - 8 Phi (Phi-1) + 2 (r^2/t^2) (Phi-1)/Phi
/// ```
///
/// for `Phi_r` from the recursion, with central differences of step `h`.
pub fn ode_residual(t: f64, r: usize, h: f64) -> Result<f64> {
    if r < 1 {
        return Err(invalid("the ODE is stated for r >= 1"));
    }
    if !(h > 0.0) || !(t - h > 0.0) || !t.is_finite() {
        return Err(invalid(format!("need 0 < h < t, got t = {t}, h = {h}")));
    }
    let mut values = [0.0; 3];
    for (slot, s) in values.iter_mut().zip([t - h, t, t + h]) {
        let seq = u_sequence(s, r)?;
        if !seq.trusted(r) {
            return Err(Error::LossOfPrecision { last_trusted: seq.last_trusted() });
        }
        *slot = seq.big_phi(r);
    }
    let [minus, phi, plus] = values;
    if values.iter().any(|&v| v <= 0.0 || v >= 1.0) {
        return Err(invalid(format!("Phi_{r} reaches 0 or 1 near t = {t}")));
    }
    let d1 = (plus - minus) / (2.0 * h);
    let d2 = (plus - 2.0 * phi + minus) / (h * h);
    let rf = r as f64;
    let rhs = 0.5 * (1.0 / (phi - 1.0) + 1.0 / phi) * d1 * d1 - d1 / t - 8.0 * phi * (phi - 1.0)
        + 2.0 * rf * rf / (t * t) * (phi - 1.0) / phi;
    Ok(d2 - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz_cdf;
    use approx::assert_relative_eq;

    #[test]
    fn initial_values() {
        let seq = u_sequence(0.1, 4).unwrap();
        assert_eq!(seq.u[0], -1.0);
        // 40-digit reference values
        assert_relative_eq!(seq.u[1], 0.0995033105739126, max_relative = 1e-14);
        assert_relative_eq!(seq.u[2], -0.004983354290720748, max_relative = 1e-12);
        assert!(seq.trusted(2));
    }

    #[test]
    fn recursion_residual_is_small() {
        for &t in &[0.5, 2.0, 5.0] {
            let seq = u_sequence(t, 10).unwrap();
            for r in 1..10 {
                if !seq.trusted(r + 1) {
                    continue;
                }
                let (a, b, c) = (seq.u[r - 1], seq.u[r], seq.u[r + 1]);
                let lhs = (r as f64 / t) * b;
                let residual = lhs + (1.0 - b * b) * (a + c);
                assert!(residual.abs() <= 1e-10 * lhs.abs().max(1e-300), "t={t} r={r}");
            }
        }
    }

    #[test]
    fn first_value_increases_in_t() {
        let mut last = 0.0;
        for i in 1..=50 {
            let u1 = u_sequence(0.1 * i as f64, 1).unwrap().u[1];
            assert!(u1 > last && u1 < 1.0);
            last = u1;
        }
    }

    #[test]
    fn boundary_behaviour() {
        let t: f64 = 1e-3;
        for r in 1..=2 {
            let seq = u_sequence(t, r).unwrap();
            let scaled = (1.0 - seq.big_phi(r)) * (ln_factorial(r) * 2.0).exp() / t.powi(2 * r as i32);
            assert!((scaled - 1.0).abs() < 1e-4, "r={r}");
        }
        // deeper indices are flagged rather than silently wrong
        assert!(!u_sequence(t, 5).unwrap().trusted(5));
    }

    #[test]
    fn bessel_j_values() {
        // mpmath besselj
        assert_relative_eq!(bessel_j_series(3, 0.6), 0.00439965670836219, max_relative = 1e-13);
        assert_relative_eq!(bessel_j_series(10, 3.4), 4.25932915134324e-5, max_relative = 1e-13);
        assert_relative_eq!(bessel_j_series(2, 1.0), 0.11490348493190048, max_relative = 1e-14);
    }

    #[test]
    fn zeroth_phi_is_poisson_atom() {
        for &y in &[0.3, 4.0, 20.0] {
            assert_eq!(phi_via_integral(y, 0, 64).unwrap(), (-y).exp());
        }
    }

    #[test]
    fn integral_matches_determinant() {
        for &y in &[1.0, 2.25, 9.0, 25.0] {
            let table = toeplitz_cdf::log_phi_sequence(y, 10).unwrap();
            for r in 1..=10 {
                let via = phi_via_integral(y, r, 64).unwrap();
                let det = table.cdf(r as i64).unwrap();
                assert!((via - det).abs() <= 1e-6, "y={y} r={r}: {via} vs {det}");
            }
        }
    }

    #[test]
    fn ode_is_satisfied() {
        for r in 1..=3 {
            for &t in &[0.5, 0.8, 1.5] {
                let res = ode_residual(t, r, 1e-3).unwrap();
                assert!(res.abs() <= 1e-4, "r={r} t={t} residual={res}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(u_sequence(0.0, 3).is_err());
        assert!(u_sequence(1.0, 0).is_err());
        assert!(phi_via_integral(1.0, 2, 16).is_err());
        assert!(ode_residual(0.5, 1, 0.6).is_err());
        assert!(ode_residual(0.5, 0, 1e-3).is_err());
    }

    #[test]
    fn sequence_table_is_monotone() {
        let table = log_phi_sequence(4.0, 10, 64).unwrap();
        assert_eq!(table.route, Route::Recursion);
        assert!(table.log_phi.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}
