//! Distribution of the length of the longest increasing subsequence of a
//! Poissonized random permutation.
//!
//! `phi_r(y) = P(X_y <= r)` is evaluated through several independent routes:
//! a Toeplitz determinant of Bessel functions ([`toeplitz_cdf`]), the discrete
//! Painleve II recursion ([`dpii`]) and exact rational power series
//! ([`exact_series`]). The large-`y` limit is the GUE edge law `F_2`
//! ([`painleve2`]). [`moments`] combines the routes, [`oracle`] provides
//! enumeration and Monte Carlo ground truth, and [`ka`] maps Karlin-Altschul
//! alignment parameters onto `y`.

pub mod dpii;
pub mod error;
pub mod exact_series;
mod fixed;
pub mod ka;
pub mod moments;
pub mod oracle;
pub mod painleve2;
pub mod quadrature;
pub mod special_fn;
pub mod toeplitz_cdf;

pub use error::{Error, Result};
pub use exact_series::RationalSeries;
pub use ka::KAParams;
pub use moments::{MomentMethod, MomentResult};
pub use painleve2::HMSolution;
pub use special_fn::ScaledBesselRow;
pub use toeplitz_cdf::{PhiTable, Route};
