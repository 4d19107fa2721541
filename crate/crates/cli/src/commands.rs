use lisdist_core::exact_series::{d_series, mean_series, phi_series_all, var_series};
use lisdist_core::moments::{
    moments_auto, moments_exact, moments_large_y, moments_small_y, truncation_window, DEFAULT_EPS, EXACT_SUM_BUDGET,
};
use lisdist_core::oracle::{exhaustive_f, mc_sample, MAX_EXHAUSTIVE_K};
use lisdist_core::painleve2::{default_solution, DEFAULT_S_MAX, DEFAULT_S_MIN};
use lisdist_core::toeplitz_cdf::{log_phi_sequence, phi_table, r_max_cap};
use lisdist_core::{KAParams, MomentResult, Route};
use serde_json::{json, Value};

use crate::args::{Command, DistArgs, F2TableArgs, KaArgs, MethodArg, MomentsArgs, OracleCommand, RouteArg, SeriesArgs, SeriesWhat};
use crate::report::{num, opt_num, Cell, Report};

const MAX_F2_ROWS: usize = 1_000_000;
const MAX_SAMPLES: u64 = 1_000_000_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<lisdist_core::Error> for CliError {
    fn from(e: lisdist_core::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(command: &Command) -> CliResult<Report> {
    match command {
        Command::Cdf(a) => distribution(Quantity::Cdf, a),
        Command::Pmf(a) => distribution(Quantity::Pmf, a),
        Command::Survival(a) => distribution(Quantity::Survival, a),
        Command::Moments(a) => moments(a),
        Command::Ka(a) => ka(a),
        Command::F2Table(a) => f2_table(a),
        Command::Series(a) => series(a),
        Command::Oracle(OracleCommand::Exhaustive { k_max }) => exhaustive(*k_max),
        Command::Oracle(OracleCommand::Mc { y, samples, seed }) => monte_carlo(*y, *samples, *seed),
    }
}

#[derive(Clone, Copy)]
enum Quantity {
    Cdf,
    Pmf,
    Survival,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Cdf => "cdf",
            Quantity::Pmf => "pmf",
            Quantity::Survival => "survival",
        }
    }
}

fn route_of(arg: RouteArg) -> Route {
    match arg {
        RouteArg::Determinant => Route::Determinant,
        RouteArg::Recursion => Route::Recursion,
        RouteArg::Series => Route::Series,
    }
}

fn distribution(q: Quantity, a: &DistArgs) -> CliResult<Report> {
    let route = route_of(a.route);
    let first = match q {
        Quantity::Survival => 1,
        _ => 0,
    };
    let rs: Vec<i64> = match (a.r, a.r_max) {
        (Some(r), _) => vec![r],
        (None, Some(r_max)) => (first..=r_max as i64).collect(),
        (None, None) => return Err(usage("one of --r or --r-max is required")),
    };
    if rs.is_empty() {
        return Err(usage(format!("--r-max must be >= {first}")));
    }
    if matches!(q, Quantity::Survival) && rs[0] < 1 {
        return Err(usage(format!("survival needs r >= 1, got {}", rs[0])));
    }
    let highest = *rs.iter().max().expect("non-empty");
    let needed = match q {
        Quantity::Survival => highest - 1,
        _ => highest,
    };
    let table = phi_table(a.y, needed.max(1) as usize, route)?;

    let input = json!({
        "command": q.name(),
        "y": num(a.y),
        "r": a.r,
        "r_max": a.r_max,
        "route": route.to_string(),
    });
    let mut report = Report::new(input, route.to_string(), vec!["r", q.name()]);
    for r in rs {
        let value = match q {
            Quantity::Cdf => table.cdf(r),
            Quantity::Pmf => table.pmf(r),
            Quantity::Survival => table.survival(r),
        }
        .ok_or_else(|| CliError::Numerical(format!("r = {r} lies beyond the computed table")))?;
        report.rows.push(vec![Cell::Int(r), Cell::Float(value)]);
    }
    report.diag("table_r_max", json!(table.r_max));
    report.diag("saturated_from", json!(table.saturated_from));
    if route == Route::Determinant {
        report.diag("sections", json!(table.sections));
        report.diag("r_max_cap", json!(r_max_cap()));
    }
    Ok(report)
}

fn moment_diagnostics(report: &mut Report, m: &MomentResult) {
    report.diag("error_hint", opt_num(m.error_hint));
    report.diag("trusted", json!(m.trusted));
    report.diag("truncation_r", json!(m.truncation_r));
}

fn moments(a: &MomentsArgs) -> CliResult<Report> {
    if a.order.is_some() && a.method != MethodArg::SmallY {
        return Err(usage("--order applies to --method small-y only"));
    }
    let order = a.order.unwrap_or(lisdist_core::exact_series::DEFAULT_ORDER);
    let m = match a.method {
        MethodArg::Exact => moments_exact(a.y, DEFAULT_EPS)?,
        MethodArg::SmallY => moments_small_y(a.y, order)?,
        MethodArg::LargeY => moments_large_y(a.y)?,
        MethodArg::Auto => moments_auto(a.y)?,
    };
    let input = json!({
        "command": "moments",
        "y": num(a.y),
        "method": format!("{:?}", a.method).to_lowercase(),
        "order": a.order,
    });
    let mut report = Report::new(input, m.method.to_string(), vec!["y", "mean", "variance"]);
    report.rows.push(vec![Cell::Float(m.y), Cell::Float(m.mean), Cell::Float(m.variance)]);
    moment_diagnostics(&mut report, &m);
    match m.method {
        lisdist_core::MomentMethod::ExactSum => {
            report.diag("eps", num(DEFAULT_EPS));
            report.diag("window", json!(truncation_window(a.y)));
        }
        lisdist_core::MomentMethod::SmallY => report.diag("order", json!(order)),
        lisdist_core::MomentMethod::LargeY => {}
    }
    Ok(report)
}

fn ka(a: &KaArgs) -> CliResult<Report> {
    let params = KAParams::new(a.lambda, a.k, a.n, a.x)?;
    let y = params.y()?;
    let input = json!({
        "command": "ka",
        "lambda": num(a.lambda),
        "K": num(a.k),
        "N": num(a.n),
        "x": num(a.x),
        "moments": a.moments,
    });
    if !a.moments {
        let mut report = Report::new(input, "ka-y", vec!["x", "y"]);
        report.rows.push(vec![Cell::Float(a.x), Cell::Float(y)]);
        return Ok(report);
    }

    let mut report = Report::new(input, "large-y,exact-sum", vec!["x", "y", "method", "mean", "variance"]);
    let large = moments_large_y(y)?;
    let mut results = vec![large];
    if y <= EXACT_SUM_BUDGET {
        results.push(moments_exact(y, DEFAULT_EPS)?);
    } else {
        report.diag("exact_sum_skipped", json!(format!("y above {EXACT_SUM_BUDGET}")));
    }
    for m in &results {
        report.rows.push(vec![
            Cell::Float(a.x),
            Cell::Float(y),
            Cell::Text(m.method.to_string()),
            Cell::Float(m.mean),
            Cell::Float(m.variance),
        ]);
        report.diag(
            &m.method.to_string(),
            json!({
                "error_hint": opt_num(m.error_hint),
                "trusted": m.trusted,
                "truncation_r": m.truncation_r,
            }),
        );
    }
    Ok(report)
}

fn f2_table(a: &F2TableArgs) -> CliResult<Report> {
    let finite = a.s_min.is_finite() && a.s_max.is_finite() && a.step.is_finite();
    if !finite || !(a.step > 0.0) || a.s_min > a.s_max {
        return Err(usage("need finite s-min <= s-max and step > 0"));
    }
    if a.s_min < DEFAULT_S_MIN || a.s_max > DEFAULT_S_MAX {
        return Err(usage(format!("table range must lie within [{DEFAULT_S_MIN}, {DEFAULT_S_MAX}]")));
    }
    let count = ((a.s_max - a.s_min) / a.step + 1e-9).floor() as usize + 1;
    if count > MAX_F2_ROWS {
        return Err(usage(format!("{count} rows requested, at most {MAX_F2_ROWS} allowed")));
    }
    let sol = default_solution()?;
    let input = json!({
        "command": "f2-table",
        "s_min": num(a.s_min),
        "s_max": num(a.s_max),
        "step": num(a.step),
    });
    let mut report = Report::new(input, "painleve-ii", vec!["s", "q", "F2", "density"]);
    for i in 0..count {
        let s = a.s_min + i as f64 * a.step;
        report.rows.push(vec![
            Cell::Float(s),
            Cell::Float(sol.q_at(s)),
            Cell::Float(sol.cdf(s)),
            Cell::Float(sol.density_at(s)),
        ]);
    }
    report.diag("grid_nodes", json!(sol.grid.len()));
    report.diag("ode_steps", json!(sol.steps));
    report.diag("rel_tol", num(sol.rel_tol));
    report.diag("total_mass", num(sol.total_mass()));
    Ok(report)
}

fn series(a: &SeriesArgs) -> CliResult<Report> {
    let needs_r = matches!(a.what, SeriesWhat::D | SeriesWhat::Phi);
    if needs_r != a.r.is_some() {
        return Err(usage("--r is required for --what d|phi and not accepted otherwise"));
    }
    let (what, series, first) = match a.what {
        SeriesWhat::Mean => ("mean", mean_series(a.order)?, 1),
        SeriesWhat::Var => ("var", var_series(a.order)?, 1),
        SeriesWhat::D => ("d", d_series(a.r.unwrap_or(0), a.order)?, 0),
        SeriesWhat::Phi => {
            let r = a.r.unwrap_or(0);
            let all = phi_series_all(r, a.order)?;
            ("phi", all.into_iter().nth(r).expect("r-th series present"), 0)
        }
    };
    let input = json!({
        "command": "series",
        "what": what,
        "order": a.order,
        "r": a.r,
    });
    let mut report = Report::new(input, "exact-rational", vec!["k", "coefficient"]);
    for (k, c) in series.coefficient_strings().into_iter().enumerate().skip(first) {
        report.rows.push(vec![Cell::Int(k as i64), Cell::Text(c)]);
    }
    report.diag("order", json!(a.order));
    Ok(report)
}

fn exhaustive(k_max: usize) -> CliResult<Report> {
    if k_max > MAX_EXHAUSTIVE_K {
        return Err(usage(format!("k-max must be <= {MAX_EXHAUSTIVE_K}")));
    }
    let table = exhaustive_f(k_max)?;
    let input = json!({ "command": "oracle exhaustive", "k_max": k_max });
    let mut report = Report::new(input, "exhaustive-enumeration", vec!["k", "r", "f"]);
    for k in 0..=k_max {
        for r in 0..=k_max {
            report.rows.push(vec![Cell::Int(k as i64), Cell::Int(r as i64), Cell::Int(table.get(k, r) as i64)]);
        }
    }
    let permutations: u64 = (0..=k_max as u64).map(|k| (1..=k).product::<u64>()).sum();
    report.diag("permutations", json!(permutations));
    Ok(report)
}

fn monte_carlo(y: f64, samples: u64, seed: u64) -> CliResult<Report> {
    if samples > MAX_SAMPLES {
        return Err(usage(format!("samples must be <= {MAX_SAMPLES}")));
    }
    let est = mc_sample(y, samples, seed)?;
    let r_top = est.counts.len().saturating_sub(1);
    let exact = log_phi_sequence(y, r_top.max(1))?;
    let input = json!({ "command": "oracle mc", "y": num(y), "samples": samples, "seed": seed });
    let mut report = Report::new(input, "monte-carlo", vec!["r", "count", "empirical_cdf", "exact_cdf"]);
    for (r, (&count, &emp)) in est.counts.iter().zip(&est.empirical_cdf).enumerate() {
        let exact_cdf = exact.cdf(r as i64).unwrap_or(1.0);
        report.rows.push(vec![Cell::Int(r as i64), Cell::Int(count as i64), Cell::Float(emp), Cell::Float(exact_cdf)]);
    }
    let critical = 1.63 / (samples as f64).sqrt();
    report.diag("ks_distance", num(est.ks_distance));
    report.diag("ks_critical_1pct", num(critical));
    report.diag("sample_mean", num(est.mean));
    report.diag("sample_variance", num(est.variance));
    Ok(report)
}

pub fn error_json(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}
