mod common;

use lisdist_core::exact_series::moment_series;

#[test]
fn small_y_coefficients_match_reference_values() {
    let (mean, var) = moment_series(20).unwrap();
    let mut mismatches = Vec::new();
    for r in 1..=20 {
        let want_mean = common::rational(&common::MEAN_COEFFS[r - 1]);
        let want_var = common::rational(&common::VAR_COEFFS[r - 1]);
        if mean.coeffs[r] != want_mean {
            mismatches.push(format!("c1[{r}]: got {} want {want_mean}", mean.coeffs[r]));
        }
        if var.coeffs[r] != want_var {
            mismatches.push(format!("c2[{r}]: got {} want {want_var}", var.coeffs[r]));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}
