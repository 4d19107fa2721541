//! Scaled modified Bessel functions `e^{-2t} I_j(2t)` and the Airy function.
//!
//! The Bessel row uses Miller's backward recurrence normalized through the
//! generating-function identity `I_0(z) + 2 sum_{k>=1} I_k(z) = e^z`, so the
//! scale factor `e^{-2t}` never has to be formed explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest row length accepted by [`scaled_bessel_row`].
pub const MAX_BESSEL_ORDER: usize = 1 << 26;

/// Supported interval of [`airy_ai_pair`].
pub const AIRY_RANGE: (f64, f64) = (-2.0, 14.0);

/// Below this point Ai is summed from its Maclaurin series, above it from the
/// asymptotic expansion.
pub const AIRY_SEAM: f64 = 6.0;

const AI0: DoubleDouble = DoubleDouble {
    hi: 0.355_028_053_887_817_2,
    lo: 2.052_336_324_362_12e-17,
};
// -Ai'(0)
const AIP0: DoubleDouble = DoubleDouble {
    hi: 0.258_819_403_792_806_8,
    lo: -2.522_243_111_610_832e-17,
};

/// `values[j] = e^{-2t} I_j(2t)` for `j = 0..=j_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledBesselRow {
    pub t: f64,
    pub values: Vec<f64>,
    /// First index whose value underflowed and was clamped to zero.
    pub underflow_from: Option<usize>,
}

impl ScaledBesselRow {
    pub fn j_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `values[0] + 2 * sum_{j>=1} values[j]`, which tends to 1 as `j_max` grows.
    pub fn normalization(&self) -> f64 {
        let tail: f64 = self.values.iter().skip(1).sum();
        self.values[0] + 2.0 * tail
    }

    /// `I_j(2t) / I_0(2t)`.
    pub fn ratio_to_zeroth(&self, j: usize) -> f64 {
        self.values[j] / self.values[0]
    }
}

/// First index of the Miller backward recurrence.
///
/// Starts at `j_max + ceil(2t) + 40` and moves up until the estimated relative
/// contamination at `j_max`, `((t^{s-j_max} j_max!) / s!)^2`, is below
/// `2^-bits`.
pub(crate) fn miller_start_index(t: f64, j_max: usize, bits: u32) -> Result<usize> {
    let base = (2.0 * t).ceil();
    if !base.is_finite() || base > MAX_BESSEL_ORDER as f64 {
        return Err(Error::Capacity(format!("Bessel argument 2t = {} too large", 2.0 * t)));
    }
    let mut start = j_max
        .checked_add(base as usize)
        .and_then(|s| s.checked_add(40))
        .ok_or_else(|| Error::Capacity("Miller start index overflows".into()))?;
    if t == 0.0 {
        return Ok(start);
    }
    let target = -(bits as f64 + 8.0) * std::f64::consts::LN_2 / 2.0;
    let ln_t = t.ln();
    let mut log_ratio: f64 = (j_max + 1..=start).map(|i| ln_t - (i as f64).ln()).sum();
    while log_ratio > target {
        start = start
            .checked_add(1)
            .ok_or_else(|| Error::Capacity("Miller start index overflows".into()))?;
        log_ratio += ln_t - (start as f64).ln();
    }
    Ok(start)
}

/// Scaled modified Bessel functions `e^{-2t} I_j(2t)`, `j = 0..=j_max`.
pub fn scaled_bessel_row(t: f64, j_max: usize) -> Result<ScaledBesselRow> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("Bessel argument t must be finite and >= 0, got {t}")));
    }
    if j_max > MAX_BESSEL_ORDER {
        return Err(Error::Capacity(format!("j_max = {j_max} exceeds {MAX_BESSEL_ORDER}")));
    }
    let mut values = vec![0.0; j_max + 1];
    if t == 0.0 {
        values[0] = 1.0;
        return Ok(ScaledBesselRow { t, values, underflow_from: if j_max > 0 { Some(1) } else { None } });
    }

    const BIG: f64 = 1e250;
    const RESCALE: f64 = 1e-250;

    let start = miller_start_index(t, j_max, 64)?;
    let mut above = 0.0_f64;
    let mut current = 1.0_f64;
    let mut tail_sum = 0.0_f64;
    let mut j = start;
    loop {
        if j <= j_max {
            values[j] = current;
        }
        if j == 0 {
            break;
        }
        tail_sum += current;
        // I_{j-1}(2t) = (j/t) I_j(2t) + I_{j+1}(2t)
        let below = (j as f64 / t) * current + above;
        above = current;
        current = below;
        j -= 1;
        if current > BIG {
            current *= RESCALE;
            above *= RESCALE;
            tail_sum *= RESCALE;
            for v in values.iter_mut().skip(j + 1) {
                *v *= RESCALE;
            }
        }
    }
    let norm = values[0] + 2.0 * tail_sum;
    let mut underflow_from = None;
    for (j, v) in values.iter_mut().enumerate() {
        *v /= norm;
        if *v < f64::MIN_POSITIVE {
            *v = 0.0;
            underflow_from.get_or_insert(j);
        }
    }
    Ok(ScaledBesselRow { t, values, underflow_from })
}

/// `(Ai(s), Ai'(s))` for `s` in [`AIRY_RANGE`].
pub fn airy_ai_pair(s: f64) -> Result<(f64, f64)> {
    if !(AIRY_RANGE.0..=AIRY_RANGE.1).contains(&s) {
        return Err(invalid(format!(
            "Airy argument {s} outside supported interval [{}, {}]",
            AIRY_RANGE.0, AIRY_RANGE.1
        )));
    }
    Ok(if s <= AIRY_SEAM { airy_maclaurin(s) } else { airy_asymptotic(s) })
}

// Ai = Ai(0) f(s) + Ai'(0) g(s) with the two Maclaurin solutions f, g. For
// s > 0 the two terms cancel, so everything runs in double-double.
fn airy_maclaurin(s: f64) -> (f64, f64) {
    let s3 = DoubleDouble::from(s).mul(DoubleDouble::from(s)).mul_f64(s);
    let mut f_term = DoubleDouble::from(1.0);
    let mut g_term = DoubleDouble::from(s);
    let mut fp_term = DoubleDouble::from(0.0);
    let mut gp_term = DoubleDouble::from(1.0);
    let (mut f, mut g, mut fp, mut gp) = (f_term, g_term, fp_term, gp_term);
    for k in 1..400 {
        let kf = k as f64;
        f_term = f_term.mul(s3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        g_term = g_term.mul(s3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        fp_term = if k == 1 {
            DoubleDouble::from(s).mul(DoubleDouble::from(s)).div_f64(2.0)
        } else {
            fp_term.mul(s3).div_f64((3.0 * kf - 3.0) * (3.0 * kf - 1.0))
        };
        gp_term = gp_term.mul(s3).div_f64((3.0 * kf) * (3.0 * kf - 2.0));
        f = f.add(f_term);
        g = g.add(g_term);
        fp = fp.add(fp_term);
        gp = gp.add(gp_term);
        let small = |term: DoubleDouble, sum: DoubleDouble| term.hi.abs() <= 1e-34 * sum.hi.abs().max(1.0);
        if k > 2 && small(f_term, f) && small(g_term, g) && small(fp_term, fp) && small(gp_term, gp) {
            break;
        }
    }
    let ai = AI0.mul(f).sub(AIP0.mul(g));
    let aip = AI0.mul(fp).sub(AIP0.mul(gp));
    (ai.to_f64(), aip.to_f64())
}

fn airy_asymptotic(s: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * s * s.sqrt();
    let mut u = 1.0_f64;
    let mut zeta_pow = 1.0_f64;
    let (mut sum_u, mut sum_v) = (1.0_f64, 1.0_f64);
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        zeta_pow *= zeta;
        let term = u / zeta_pow;
        // stop at the smallest term of the divergent series
        if term >= last || term < 1e-18 {
            break;
        }
        last = term;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum_u += sign * term;
        sum_v += sign * v / zeta_pow;
    }
    let prefactor = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let quarter = s.powf(0.25);
    (prefactor * sum_u / quarter, -prefactor * quarter * sum_v)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    fn sub(self, other: Self) -> Self {
        self.add(DoubleDouble { hi: -other.hi, lo: -other.lo })
    }

    fn mul(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self.sub(DoubleDouble::from(q1).mul_f64(b));
        let q2 = r.hi / b;
        let r = r.sub(DoubleDouble::from(q2).mul_f64(b));
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(DoubleDouble::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Ascending series sum_m t^{2m+j} / (m! (m+j)!) times e^{-2t}, summed in
    // log space. All terms are positive so there is no cancellation.
    fn series_scaled_bessel(t: f64, j: usize) -> f64 {
        let ln_t = t.ln();
        let ln_fact = |n: usize| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
        let logs: Vec<f64> = (0..(j + 200 + (8.0 * t) as usize))
            .map(|m| (2 * m + j) as f64 * ln_t - ln_fact(m) - ln_fact(m + j) - 2.0 * t)
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max.exp() * logs.iter().map(|l| (l - max).exp()).sum::<f64>()
    }

    #[test]
    fn zero_argument() {
        let row = scaled_bessel_row(0.0, 3).unwrap();
        assert_eq!(row.values, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn e_minus_two_i0_two() {
        // mpmath, 40 digits
        let row = scaled_bessel_row(1.0, 5).unwrap();
        assert_relative_eq!(row.values[0], 0.308_508_322_553_671_04, max_relative = 1e-14);
    }

    #[test]
    fn matches_ascending_series() {
        for &t in &[0.05, 0.5, 1.0, 3.7, 10.0, 22.0, 45.0] {
            let row = scaled_bessel_row(t, 60).unwrap();
            for j in 0..=60 {
                let reference = series_scaled_bessel(t, j);
                if reference > 1e-290 {
                    assert_relative_eq!(row.values[j], reference, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn normalization_identity() {
        for &t in &[0.5f64, 1.0, 5.0, 15.0, 30.0] {
            let j_max = (2.0 * t).ceil() as usize + 40;
            let row = scaled_bessel_row(t, j_max).unwrap();
            assert!((row.normalization() - 1.0).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn recurrence_residual_and_monotonicity() {
        for &t in &[0.3, 2.0, 12.0, 35.0] {
            let row = scaled_bessel_row(t, 120).unwrap();
            let v = &row.values;
            for j in 1..120 {
                if v[j] > 1e-200 {
                    let resid = v[j - 1] - v[j + 1] - (j as f64 / t) * v[j];
                    assert!(resid.abs() <= 1e-11 * v[j - 1], "t={t} j={j}");
                }
                if v[j] > 0.0 {
                    assert!(v[j] < v[j - 1]);
                }
            }
        }
    }

    #[test]
    fn underflow_is_flagged() {
        let row = scaled_bessel_row(0.01, 400).unwrap();
        let first = row.underflow_from.expect("deep orders underflow");
        assert!(row.values[first..].iter().all(|&v| v == 0.0));
        assert!(row.values[..first].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(scaled_bessel_row(-1.0, 3), Err(Error::InvalidInput(_))));
        assert!(matches!(scaled_bessel_row(f64::NAN, 3), Err(Error::InvalidInput(_))));
        assert!(matches!(scaled_bessel_row(1.0, usize::MAX), Err(Error::Capacity(_))));
        assert!(matches!(miller_start_index(1.0, usize::MAX - 10, 64), Err(Error::Capacity(_))));
    }

    #[test]
    fn airy_reference_values() {
        // mpmath, 40 digits
        let cases = [
            (-2.0, 0.227_407_428_201_685_58, 0.618_259_020_741_691_04),
            (0.0, 0.355_028_053_887_817_24, -0.258_819_403_792_806_8),
            (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_21),
            (3.0, 0.006_591_139_357_460_719_1, -0.011_912_976_705_951_318),
            (5.0, 0.000_108_344_428_136_074_42, -0.000_247_413_890_868_462_48),
            (6.0, 9.947_694_360_252_889_6e-6, -2.476_520_039_703_495_5e-5),
            (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
            (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10),
            (14.0, 9.920_205_491_192_377_3e-17, -3.729_310_110_017_900_7e-16),
        ];
        for (s, ai, aip) in cases {
            let (a, ap) = airy_ai_pair(s).unwrap();
            assert!((a - ai).abs() <= 1e-13, "Ai({s}) = {a}, want {ai}");
            assert!((ap - aip).abs() <= 1e-13, "Ai'({s}) = {ap}, want {aip}");
        }
    }

    #[test]
    fn airy_seam_is_continuous() {
        let (left, left_p) = airy_maclaurin(AIRY_SEAM);
        let (right, right_p) = airy_asymptotic(AIRY_SEAM);
        assert!((left - right).abs() < 1e-14);
        assert!((left_p - right_p).abs() < 1e-14);
    }

    #[test]
    fn airy_decays_and_solves_airy_equation() {
        assert!(airy_ai_pair(10.0).unwrap().0 < 1.2e-9);
        let mut previous = f64::INFINITY;
        for i in 0..=1400 {
            let s = i as f64 * 0.01;
            let a = airy_ai_pair(s).unwrap().0;
            assert!(a > 0.0 && a < previous);
            previous = a;
        }
        // Richardson-extrapolated second difference, O(h^4)
        let f = |x: f64| airy_ai_pair(x).unwrap().0;
        let second = |s: f64, h: f64| (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        let h = 0.01;
        for i in 2..=158 {
            let s = -2.0 + i as f64 * 0.1;
            let extrapolated = (4.0 * second(s, h / 2.0) - second(s, h)) / 3.0;
            assert!((extrapolated - s * f(s)).abs() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn airy_rejects_out_of_range() {
        assert!(airy_ai_pair(-2.5).is_err());
        assert!(airy_ai_pair(14.5).is_err());
        assert!(airy_ai_pair(f64::NAN).is_err());
    }
}
