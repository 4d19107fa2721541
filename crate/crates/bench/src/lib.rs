//! Benchmark inputs shared by the criterion targets in `benches/`.

/// Values of `y` spanning the small-`y`, transition and large-`y` regimes.
pub const Y_VALUES: &[f64] = &[1.0, 100.0, 536.8, 944.6];
