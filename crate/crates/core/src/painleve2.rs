//! The Hastings-McLeod solution of Painleve II and the GUE edge law `F_2`.
//!
//! `q'' = s q + 2 q^3` with `q(s) ~ Ai(s)` as `s -> +inf`, and
//!
//! ```text
//! I(s) = int_s^inf q^2 dx,   J(s) = int_s^inf (x - s) q^2 dx,
//! F_2(s) = exp(-J(s)),       F_2'(s) = F_2(s) I(s).
//! ```
//!
//! `(q, q', I, J)` is integrated jointly from `s_max` down to `s_min` with
//! `J' = -I`, `I' = -q^2`. At `s_max` the nonlinear term is below `1e-27`,
//! so the state is seeded with the Airy values, using the closed forms
//! `I = Ai'^2 - s Ai^2` and `J = (2 s^2 Ai^2 - 2 s Ai'^2 - Ai Ai') / 3`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special_fn::airy_ai_pair;

pub const DEFAULT_S_MIN: f64 = -8.0;
pub const DEFAULT_S_MAX: f64 = 10.0;
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Largest spacing of the output grid.
pub const GRID_STEP: f64 = 0.01;

// |q| beyond this means the trajectory left the Hastings-McLeod branch
const BLOW_UP: f64 = 10.0;

/// Tabulated Hastings-McLeod solution on an increasing uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HMSolution {
    pub rel_tol: f64,
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub qp: Vec<f64>,
    /// `I(s) = int_s^inf q^2`.
    pub i_int: Vec<f64>,
    /// `J(s) = int_s^inf (x - s) q^2`.
    pub j_int: Vec<f64>,
    pub f2: Vec<f64>,
    pub density: Vec<f64>,
    /// Accepted integrator steps.
    pub steps: usize,
}

type State = [f64; 4];

fn rhs(s: f64, y: &State) -> State {
    let q = y[0];
    [y[1], s * q + 2.0 * q * q * q, -q * q, -y[2]]
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

// one Dormand-Prince 5(4) step: the fifth order value and the error estimate
fn dopri_step(s: f64, y: &State, h: f64) -> (State, State) {
    let k1 = rhs(s, y);
    let k2 = rhs(s + h / 5.0, &axpy(y, h, &[(1.0 / 5.0, &k1)]));
    let k3 = rhs(s + 3.0 * h / 10.0, &axpy(y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
    let k4 = rhs(
        s + 4.0 * h / 5.0,
        &axpy(y, h, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]),
    );
    let k5 = rhs(
        s + 8.0 * h / 9.0,
        &axpy(
            y,
            h,
            &[(19372.0 / 6561.0, &k1), (-25360.0 / 2187.0, &k2), (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4)],
        ),
    );
    let k6 = rhs(
        s + h,
        &axpy(
            y,
            h,
            &[
                (9017.0 / 3168.0, &k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
        ),
    );
    let next = axpy(
        y,
        h,
        &[
            (35.0 / 384.0, &k1),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
    );
    let k7 = rhs(s + h, &next);
    let err = axpy(
        &[0.0; 4],
        h,
        &[
            (71.0 / 57600.0, &k1),
            (-71.0 / 16695.0, &k3),
            (71.0 / 1920.0, &k4),
            (-17253.0 / 339200.0, &k5),
            (22.0 / 525.0, &k6),
            (-1.0 / 40.0, &k7),
        ],
    );
    (next, err)
}

/// Integrates the Hastings-McLeod solution from `s_max` down to `s_min`.
pub fn solve_hastings_mcleod(s_min: f64, s_max: f64, rel_tol: f64) -> Result<HMSolution> {
    if !(-8.0..=-6.0).contains(&s_min) {
        return Err(invalid(format!("s_min must lie in [-8, -6], got {s_min}")));
    }
    if !(8.0..=12.0).contains(&s_max) {
        return Err(invalid(format!("s_max must lie in [8, 12], got {s_max}")));
    }
    if !(rel_tol > 0.0 && rel_tol <= 1e-10) {
        return Err(invalid(format!("rel_tol must lie in (0, 1e-10], got {rel_tol}")));
    }
    let nodes = ((s_max - s_min) / GRID_STEP).ceil() as usize;
    let nodes = nodes + nodes % 2; // even, for Simpson's rule
    let spacing = (s_max - s_min) / nodes as f64;

    let (ai, aip) = airy_ai_pair(s_max)?;
    let mut state: State = [
        ai,
        aip,
        aip * aip - s_max * ai * ai,
        (2.0 * s_max * s_max * ai * ai - 2.0 * s_max * aip * aip - ai * aip) / 3.0,
    ];
    let mut trajectory = Vec::with_capacity(nodes + 1);
    trajectory.push(state);
    let mut h = -spacing;
    let mut steps = 0;
    for node in (0..nodes).rev() {
        let mut s = s_min + (node + 1) as f64 * spacing;
        let target = s_min + node as f64 * spacing;
        while s > target {
            let remaining = target - s;
            // avoid leaving a sliver before the node
            let last = h <= 0.99 * remaining;
            let step = if last { remaining } else { h };
            if step.abs() < 1e-14 * s.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { s });
            }
            let (next, err) = dopri_step(s, &state, step);
            let ratio = (0..4)
                .map(|i| err[i].abs() / (rel_tol * state[i].abs().max(next[i].abs()) + 1e-300))
                .fold(0.0, f64::max);
            if ratio <= 1.0 {
                state = next;
                s = if last { target } else { s + step };
                steps += 1;
                if !state[0].is_finite() || state[0].abs() > BLOW_UP {
                    return Err(Error::BlowUp { s });
                }
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h = (step * factor).max(-spacing);
        }
        trajectory.push(state);
    }
    trajectory.reverse();

    let grid: Vec<f64> = (0..=nodes).map(|i| s_min + i as f64 * spacing).collect();
    let column = |c: usize| trajectory.iter().map(|y| y[c]).collect::<Vec<_>>();
    let (q, qp, i_int, j_int) = (column(0), column(1), column(2), column(3));
    let f2: Vec<f64> = j_int.iter().map(|j| (-j).exp()).collect();
    let density = f2.iter().zip(&i_int).map(|(f, i)| f * i).collect();
    Ok(HMSolution { rel_tol, grid, q, qp, i_int, j_int, f2, density, steps })
}

static DEFAULT: OnceLock<Result<HMSolution>> = OnceLock::new();

/// The solution on `[-8, 10]` at relative tolerance `1e-12`, computed once.
pub fn default_solution() -> Result<&'static HMSolution> {
    DEFAULT
        .get_or_init(|| solve_hastings_mcleod(DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_REL_TOL))
        .as_ref()
        .map_err(Clone::clone)
}

/// `F_2(s)` from the default solution.
pub fn f2_cdf(s: f64) -> Result<f64> {
    Ok(default_solution()?.cdf(s))
}

/// `F_2'(s)` from the default solution.
pub fn f2_density(s: f64) -> Result<f64> {
    Ok(default_solution()?.density_at(s))
}

/// Mean and variance of `F_2` from the default solution.
pub fn f2_moments() -> Result<(f64, f64)> {
    Ok(default_solution()?.moments())
}

fn hermite(h: f64, x: f64, (f0, d0): (f64, f64), (f1, d1): (f64, f64)) -> f64 {
    let x2 = x * x;
    let x3 = x2 * x;
    (2.0 * x3 - 3.0 * x2 + 1.0) * f0
        + (x3 - 2.0 * x2 + x) * h * d0
        + (-2.0 * x3 + 3.0 * x2) * f1
        + (x3 - x2) * h * d1
}

impl HMSolution {
    pub fn s_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.grid.last().expect("grid is never empty")
    }

    fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Whether `s` is inside the tabulated range.
    pub fn contains(&self, s: f64) -> bool {
        s >= self.s_min() && s <= self.s_max()
    }

    // cell index and position inside the cell, for s within range
    fn locate(&self, s: f64) -> (usize, f64) {
        let h = self.spacing();
        let cell = (((s - self.s_min()) / h).floor() as usize).min(self.grid.len() - 2);
        (cell, (s - self.grid[cell]) / h)
    }

    /// `F_2(s)` by cubic Hermite interpolation with the density as slope.
    /// Outside the grid the end values are returned: at most `F_2(s_min)`
    /// below, `1` above.
    pub fn cdf(&self, s: f64) -> f64 {
        if s <= self.s_min() {
            return self.f2[0];
        }
        if s >= self.s_max() {
            return 1.0;
        }
        let (c, x) = self.locate(s);
        let value = hermite(
            self.spacing(),
            x,
            (self.f2[c], self.density[c]),
            (self.f2[c + 1], self.density[c + 1]),
        );
        value.clamp(self.f2[c], self.f2[c + 1])
    }

    // d/ds (F I) = F I^2 - F q^2
    fn density_slope(&self, k: usize) -> f64 {
        self.density[k] * self.i_int[k] - self.f2[k] * self.q[k] * self.q[k]
    }

    /// `F_2'(s)`, zero outside the grid.
    pub fn density_at(&self, s: f64) -> f64 {
        if !self.contains(s) {
            return 0.0;
        }
        let (c, x) = self.locate(s);
        hermite(
            self.spacing(),
            x,
            (self.density[c], self.density_slope(c)),
            (self.density[c + 1], self.density_slope(c + 1)),
        )
        .max(0.0)
    }

    /// `q(s)`, zero outside the grid.
    pub fn q_at(&self, s: f64) -> f64 {
        if !self.contains(s) {
            return 0.0;
        }
        let (c, x) = self.locate(s);
        hermite(self.spacing(), x, (self.q[c], self.qp[c]), (self.q[c + 1], self.qp[c + 1]))
    }

    fn simpson(&self, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.grid.len() - 1;
        let inner: f64 = (1..n).map(|k| if k % 2 == 1 { 4.0 } else { 2.0 } * f(k)).sum();
        (f(0) + f(n) + inner) * self.spacing() / 3.0
    }

    /// `int density ds` over the grid.
    pub fn total_mass(&self) -> f64 {
        self.simpson(|k| self.density[k])
    }

    /// Mean and variance of `F_2`. The mass outside the grid is below
    /// `F_2(s_min) + 1 - F_2(s_max)` and is left out.
    pub fn moments(&self) -> (f64, f64) {
        let mean = self.simpson(|k| self.grid[k] * self.density[k]);
        let second = self.simpson(|k| self.grid[k] * self.grid[k] * self.density[k]);
        (mean, second - mean * mean)
    }

    /// Largest `|q'' - s q - 2 q^3|` with `q''` from fourth order central
    /// differences of the tabulated `q`, skipping two nodes at each end.
    pub fn ode_residual_max(&self) -> f64 {
        let h = self.spacing();
        let q = &self.q;
        (2..q.len() - 2)
            .map(|k| {
                let d2 = (-q[k + 2] + 16.0 * q[k + 1] - 30.0 * q[k] + 16.0 * q[k - 1] - q[k - 2]) / (12.0 * h * h);
                (d2 - self.grid[k] * q[k] - 2.0 * q[k].powi(3)).abs()
            })
            .fold(0.0, f64::max)
    }
}
