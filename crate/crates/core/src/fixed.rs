//! Binary fixed-point arithmetic on `BigInt` for the Toeplitz determinant.
//!
//! A value `x` is stored as the integer `round_down(x * 2^bits)`. The scaled
//! Toeplitz sections have smallest eigenvalues near `e^{-4t}`, far below
//! double precision once `t` exceeds a few units, so their factorization
//! runs at a precision that grows linearly with `t`.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::special_fn::miller_start_index;

/// Working precision in bits for the Toeplitz factorization at argument `t`.
pub(crate) fn precision_for(t: f64) -> u32 {
    128 + (8.0 * t).ceil() as u32
}

/// `e^x` for `x >= 0` by its Taylor series; every term is positive.
pub(crate) fn exp_nonneg(x: &BigInt, bits: u32) -> BigInt {
    debug_assert!(!x.is_negative());
    let one = BigInt::from(1) << bits as usize;
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1u64;
    while !term.is_zero() {
        term = ((&term * x) >> bits as usize) / k;
        sum += &term;
        k += 1;
    }
    sum
}

/// `2^(2 bits) / v`, the fixed-point reciprocal.
pub(crate) fn recip(v: &BigInt, bits: u32) -> BigInt {
    (BigInt::from(1) << (2 * bits) as usize) / v
}

/// Exact conversion of a finite `f64`, truncated toward -inf at `bits`.
pub(crate) fn from_f64(x: f64, bits: u32) -> BigInt {
    assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::zero();
    }
    let raw = x.abs().to_bits();
    let exp = ((raw >> 52) & 0x7ff) as i64;
    let (mantissa, exp) = if exp == 0 {
        (raw & ((1u64 << 52) - 1), -1074)
    } else {
        ((raw & ((1u64 << 52) - 1)) | (1u64 << 52), exp - 1075)
    };
    let mut v = BigInt::from(mantissa);
    let shift = exp + bits as i64;
    if shift >= 0 {
        v <<= shift as usize;
    } else {
        v >>= (-shift) as usize;
    }
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Nearest-below `f64` of a fixed-point value.
pub(crate) fn to_f64(v: &BigInt, bits: u32) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let len = v.bits() as i64;
    let drop = (len - 64).max(0);
    let top = v.abs() >> drop as usize;
    let (_, digits) = top.to_u64_digits();
    let mantissa = digits.first().copied().unwrap_or(0) as f64;
    let magnitude = scale_pow2(mantissa, drop - bits as i64);
    if v.sign() == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}

fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `floor(sqrt(y)) ` at `bits` of precision.
pub(crate) fn sqrt_of_f64(y: f64, bits: u32) -> BigInt {
    let scaled = from_f64(y, 2 * bits);
    scaled.sqrt()
}

/// `e^{-2t} I_j(2t)` for `j = 0..=j_max` in fixed point, `t` given at `bits`.
pub(crate) fn scaled_bessel_row(t: &BigInt, t_approx: f64, j_max: usize, bits: u32) -> Result<Vec<BigInt>> {
    if t.is_zero() {
        let mut row = vec![BigInt::zero(); j_max + 1];
        row[0] = BigInt::from(1) << bits as usize;
        return Ok(row);
    }
    let start = miller_start_index(t_approx, j_max, bits)?;
    let mut row = vec![BigInt::zero(); j_max + 1];
    let mut above = BigInt::zero();
    let mut current = BigInt::from(1) << bits as usize;
    let mut tail = BigInt::zero();
    let mut j = start;
    loop {
        if j <= j_max {
            row[j] = current.clone();
        }
        if j == 0 {
            break;
        }
        tail += &current;
        let below = ((&current * j) << bits as usize) / t + &above;
        above = std::mem::replace(&mut current, below);
        j -= 1;
    }
    let norm = &row[0] + (tail << 1);
    for v in row.iter_mut() {
        *v = (&*v << bits as usize) / &norm;
    }
    Ok(row)
}

/// Up-looking `L D L^T` factorization of the symmetric Toeplitz matrix with
/// first row `row`, one leading section at a time.
pub(crate) struct ToeplitzLdl {
    row: Vec<BigInt>,
    bits: u32,
    // L[i][k] * D[k] for the rows factored so far; L itself is only needed
    // for the row being built
    weighted: Vec<Vec<BigInt>>,
    pivots: Vec<BigInt>,
}

impl ToeplitzLdl {
    pub(crate) fn new(row: Vec<BigInt>, bits: u32) -> Self {
        ToeplitzLdl { row, bits, weighted: Vec::new(), pivots: Vec::new() }
    }

    pub(crate) fn len(&self) -> usize {
        self.pivots.len()
    }

    /// Extends the factorization by one row and returns the new pivot
    /// `det(T_{j+1}) / det(T_j)` in fixed point.
    pub(crate) fn next_pivot(&mut self) -> Result<&BigInt> {
        let j = self.pivots.len();
        if j >= self.row.len() {
            return Err(Error::Capacity(format!("Toeplitz row holds only {} entries", self.row.len())));
        }
        let bits = self.bits as usize;
        let mut lower_row = Vec::with_capacity(j);
        let mut weighted_row = Vec::with_capacity(j);
        for k in 0..j {
            let mut acc = &self.row[j - k] << bits;
            for m in 0..k {
                acc -= &lower_row[m] * &self.weighted[k][m];
            }
            let w = acc >> bits;
            lower_row.push((&w << bits) / &self.pivots[k]);
            weighted_row.push(w);
        }
        let mut acc = &self.row[0] << bits;
        for k in 0..j {
            acc -= &lower_row[k] * &weighted_row[k];
        }
        let pivot = acc >> bits;
        if !pivot.is_positive() {
            return Err(Error::Degenerate { r: j });
        }
        self.weighted.push(weighted_row);
        self.pivots.push(pivot);
        Ok(&self.pivots[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip() {
        for &x in &[1.0, -3.25, 1e-30, 123456.789, 2f64.powi(-200)] {
            assert_eq!(to_f64(&from_f64(x, 300), 300), x);
        }
    }

    #[test]
    fn exp_matches_std() {
        let bits = 200;
        for &x in &[0.0, 0.5, 3.0, 90.0] {
            let e = to_f64(&exp_nonneg(&from_f64(x, bits), bits), bits);
            assert!((e / x.exp() - 1.0).abs() < 1e-15, "x={x}");
            let inv = to_f64(&recip(&exp_nonneg(&from_f64(x, bits), bits), bits), bits);
            assert!((inv / (-x).exp() - 1.0).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn sqrt_is_accurate() {
        let bits = 128;
        let t = sqrt_of_f64(2.0, bits);
        assert!((to_f64(&t, bits) - std::f64::consts::SQRT_2).abs() < 1e-16);
    }

    #[test]
    fn fixed_bessel_row_matches_f64_row() {
        for &t in &[0.3, 4.0, 31.0] {
            let bits = precision_for(t);
            let fixed_t = sqrt_of_f64(t * t, bits);
            let tf = to_f64(&fixed_t, bits);
            let row = scaled_bessel_row(&fixed_t, tf, 40, bits).unwrap();
            let reference = crate::special_fn::scaled_bessel_row(tf, 40).unwrap();
            for j in 0..=40 {
                let v = to_f64(&row[j], bits);
                // fixed point carries absolute, not relative, precision
                let tol = 1e-13 * reference.values[j] + 2f64.powi(4 - bits as i32);
                assert!((v - reference.values[j]).abs() < tol, "t={t} j={j}");
            }
        }
    }

    #[test]
    fn ldl_of_small_spd_matrix() {
        // Toeplitz [[4, 2, 1], [2, 4, 2], [1, 2, 4]]: leading minors 4, 12, 36
        let bits = 64;
        let row = [4.0, 2.0, 1.0].iter().map(|&v| from_f64(v, bits)).collect();
        let mut ldl = ToeplitzLdl::new(row, bits);
        let pivots: Vec<f64> = (0..3).map(|_| to_f64(ldl.next_pivot().unwrap(), bits)).collect();
        assert!((pivots[0] - 4.0).abs() < 1e-15);
        assert!((pivots[1] - 3.0).abs() < 1e-15);
        assert!((pivots[2] - 3.0).abs() < 1e-15);
        assert_eq!(ldl.len(), 3);
        assert!(matches!(ldl.next_pivot(), Err(Error::Capacity(_))));
    }

    #[test]
    fn ldl_reports_indefinite_section() {
        let bits = 64;
        let row = [1.0, 2.0].iter().map(|&v| from_f64(v, bits)).collect();
        let mut ldl = ToeplitzLdl::new(row, bits);
        ldl.next_pivot().unwrap();
        assert_eq!(ldl.next_pivot().unwrap_err(), Error::Degenerate { r: 1 });
    }
}
