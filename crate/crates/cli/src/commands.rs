//! The non-acceptance subcommands. Each returns a report and, for sweeps,
//! a plot-ready table.

use levy_spde_core::chaos::{jn_bound, jn_estimate, series_certificate, CertificateStatus, MAX_MC_ORDER};
use levy_spde_core::linear::{exact_second_moment, minimal_box, p_moment_envelope, simulate_linear};
use levy_spde_core::operators::{jp_bound, jp_norm};
use levy_spde_core::rng::family_tag;
use levy_spde_core::stats::p_norm;
use levy_spde_core::{ColorationKernel, Error};

use crate::acceptance::{characteristic_function, dalang_grid, noise_isometry, rosenthal};
use crate::config::RunConfig;
use crate::report::{num, opt_num, Check, Report, Status, Table};

pub struct Outcome {
    pub report: Report,
    pub table: Option<Table>,
}

fn failed_setup(command: &str, config: &RunConfig, err: &Error, table: Table) -> Outcome {
    let check = Check::new(format!("{command}.setup")).from_error(err);
    Outcome { report: Report::new(command, config, vec![check]), table: Some(table) }
}

/// The Dalang verdict of the configured kernel, or of the whole sweep grid.
pub fn dalang(config: &RunConfig, sweep: bool) -> Outcome {
    let mut table = Table::new(&["family", "alpha", "dim", "dalang_check", "cutoff_converges", "cutoff_ratio", "c_mu"]);
    let cases =
        if sweep { dalang_grid() } else { vec![(config.kernel.family, config.kernel.alpha, config.kernel.dim)] };
    let mut checks = Vec::new();
    for (family, alpha, dim) in cases {
        let base = Check::new(format!("dalang.{}.d{dim}.alpha{alpha}", family.name()))
            .input("family", family.name())
            .input("alpha", alpha)
            .input("dim", dim);
        let kernel = match ColorationKernel::new(family, alpha, dim) {
            Ok(k) => k,
            // The sweep grid skips parameters outside a family's range.
            Err(_) if sweep => continue,
            Err(e) => {
                checks.push(base.from_error(&e));
                continue;
            }
        };
        let verdict = match kernel.cutoff_stability() {
            Ok(v) => v,
            Err(e) => {
                checks.push(base.from_error(&e));
                continue;
            }
        };
        let check = kernel.dalang_check();
        let c_mu = match kernel.dalang_integral() {
            Ok(v) => num(v),
            Err(Error::DivergentIntegral(_)) => "inf".into(),
            Err(e) => {
                checks.push(base.from_error(&e));
                continue;
            }
        };
        table.push(vec![
            family.name().into(),
            num(alpha),
            dim.to_string(),
            check.to_string(),
            verdict.converges.to_string(),
            num(verdict.ratio),
            c_mu,
        ]);
        checks.push(base.values(verdict.ratio, None, 0.0).status(Status::from_bool(verdict.converges == check)));
    }
    Outcome { report: Report::new("dalang", config, checks), table: Some(table) }
}

/// Criteria 1 to 3 on the configured jump measure at `trials` draws.
pub fn noise_check(config: &RunConfig) -> Outcome {
    let runner = config.runner();
    let tol = &config.tolerances;
    let trials = config.trials;
    let checks = match config.levy_measure() {
        Ok(nu) => vec![
            noise_isometry(&nu, trials, &runner, tol.se_multiplier, "noise.isometry".into()),
            characteristic_function(&nu, trials, &runner, tol.cf_multiplier, "noise.characteristic_function".into()),
            rosenthal(&nu, (trials / 4).max(100), &runner, tol, "noise.rosenthal".into()).0,
        ],
        Err(e) => vec![Check::new("noise.setup").from_error(&e)],
    };
    Outcome { report: Report::new("noise-check", config, checks), table: None }
}

/// Monte Carlo moments of the linear solution on the `(t, x, p)` grid.
pub fn simulate(config: &RunConfig) -> Outcome {
    let mut table = Table::new(&["t", "x", "p", "mc_moment", "se", "exact", "envelope", "pass"]);
    let setup = || -> levy_spde_core::Result<_> {
        let op = config.operator()?;
        let kernel = config.coloration()?;
        let nu = config.levy_measure()?;
        let (ts, xs) = (&config.grid.t, &config.grid.x);
        let radius = match config.grid.box_half_width {
            Some(r) => r,
            None => minimal_box(&op, &kernel, ts, xs)?,
        };
        let family = family_tag("simulate");
        let field = simulate_linear(&op, &kernel, &nu, ts, xs, radius, config.trials, &config.runner(), family)?;
        Ok((op, kernel, nu, radius, field))
    };
    let (op, kernel, nu, radius, field) = match setup() {
        Ok(v) => v,
        Err(e) => return failed_setup("simulate", config, &e, table),
    };
    let k = config.tolerances.se_multiplier;
    let m2 = nu.moment(2.0).unwrap_or(f64::NAN);
    let mut checks = Vec::new();
    for (ti, &t) in field.times.iter().enumerate() {
        for (xi, &x) in field.points.iter().enumerate() {
            for &p in &config.grid.p {
                let est = p_norm(field.samples(ti, xi), p);
                let mut notes = Vec::new();
                let exact = if p == 2.0 {
                    match exact_second_moment(&op, &kernel, m2, t) {
                        Ok(v) => Some(v),
                        Err(e) => {
                            notes.push(e.to_string());
                            None
                        }
                    }
                } else {
                    None
                };
                // The envelope bounds ‖v‖_p; the column holds its p-th power.
                let envelope = match config.bp(p) {
                    Some(bp) => match p_moment_envelope(&op, &kernel, &nu, t, p, bp) {
                        Ok(v) => Some(v.powf(p)),
                        Err(e) => {
                            notes.push(e.to_string());
                            None
                        }
                    },
                    None => None,
                };
                let matches = exact.map_or(true, |e| (est.moment - e).abs() <= k * est.moment_se);
                let below = envelope.map_or(true, |e| est.moment <= e + k * est.moment_se);
                let pass = matches && below && est.moment.is_finite();
                table.push(vec![
                    num(t),
                    num(x),
                    num(p),
                    num(est.moment),
                    num(est.moment_se),
                    opt_num(exact),
                    opt_num(envelope),
                    pass.to_string(),
                ]);
                let mut check = Check::new(format!("simulate.t{t}.x{x}.p{p}"))
                    .input("t", t)
                    .input("x", x)
                    .input("p", p)
                    .input("trials", config.trials)
                    .input("box", radius)
                    .values(est.moment, exact.or(envelope), k * est.moment_se)
                    .status(Status::from_bool(pass));
                if est.heavy_tail {
                    notes.push("heavy-tailed sample: the standard error is unreliable".into());
                }
                if !notes.is_empty() {
                    check = check.detail(notes.join("; "));
                }
                checks.push(check);
            }
        }
    }
    Outcome { report: Report::new("simulate", config, checks), table: Some(table) }
}

/// Parses `a:b:log` or `a:b:lin`, with an optional fourth field for the
/// number of points (default 20).
pub fn parse_t_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("t-grid `{spec}` is not of the form a:b:log|lin[:n]"));
    }
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    let (a, b) = (number(parts[0])?, number(parts[1])?);
    let n: usize = match parts.get(3) {
        Some(s) => s.trim().parse().map_err(|_| format!("`{s}` is not a point count"))?,
        None => 20,
    };
    if !(a > 0.0 && b >= a && n >= 1) || (n == 1 && b != a) {
        return Err(format!("t-grid `{spec}` needs 0 < a <= b and at least two points when a < b"));
    }
    let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    match parts[2].trim() {
        "log" => Ok((0..n).map(|i| a * (b / a).powf(frac(i))).collect()),
        "lin" => Ok((0..n).map(|i| a + (b - a) * frac(i)).collect()),
        other => Err(format!("unknown spacing `{other}`; use log or lin")),
    }
}

/// `J_p(t)` against its unit-constant bound on the `(t, p)` grid.
pub fn jp(config: &RunConfig) -> Outcome {
    let mut table = Table::new(&["t", "p", "jp_norm", "jp_bound", "ratio"]);
    let (op, kernel) = match config.operator().and_then(|op| Ok((op, config.coloration()?))) {
        Ok(v) => v,
        Err(e) => return failed_setup("jp", config, &e, table),
    };
    let mut checks = Vec::new();
    for &t in &config.grid.t {
        for &p in &config.grid.p {
            let base = Check::new(format!("jp.t{t}.p{p}")).input("t", t).input("p", p);
            let norm = jp_norm(&op, &kernel, t, p);
            let bound = jp_bound(&op, &kernel, t, p);
            let norm_v = norm.as_ref().ok().copied();
            let bound_v = bound.as_ref().ok().map(|b| b.value);
            let ratio = norm_v.zip(bound_v).map(|(n, b)| n / b);
            table.push(vec![num(t), num(p), opt_num(norm_v), opt_num(bound_v), opt_num(ratio)]);
            // The bound holds up to a constant, so a row passes when both
            // sides are finite and positive.
            let check = match (norm, bound) {
                (Ok(n), Ok(b)) => {
                    let ok = n.is_finite() && n > 0.0 && b.value.is_finite() && b.value > 0.0;
                    base.values(n, Some(b.value), 0.0).status(Status::from_bool(ok))
                }
                (Err(e), _) | (_, Err(e)) => base.from_error(&e),
            };
            checks.push(check);
        }
    }
    Outcome { report: Report::new("jp", config, checks), table: Some(table) }
}

/// Chaos terms `m₂ⁿ tⁿ J_n(t)` with Monte Carlo estimates, bounds and the
/// series certificate.
pub fn chaos(config: &RunConfig) -> Outcome {
    let mut table = Table::new(&["n", "jn_mc", "jn_se", "jn_bound", "term_bound", "cumulative", "certificate"]);
    let (op, kernel) = match config.operator().and_then(|op| Ok((op, config.coloration()?))) {
        Ok(v) => v,
        Err(e) => return failed_setup("chaos", config, &e, table),
    };
    let c = &config.chaos;
    let (t, m2) = (c.t, c.m2);
    let k = config.tolerances.se_multiplier;
    let runner = config.runner();
    let mut checks = Vec::new();
    let series = Check::new("chaos.series").input("t", t).input("m2", m2).input("tail_tol", c.tail_tol);
    let certificate = match series_certificate(&op, &kernel, t, m2, c.tail_tol) {
        Ok(cert) => {
            let label = match cert.status {
                CertificateStatus::Certified => format!("certified:N={}:tail={}", cert.order, num(cert.tail_bound)),
                CertificateStatus::Inconclusive => "inconclusive".to_string(),
            };
            let status = match cert.status {
                CertificateStatus::Certified => Status::Pass,
                CertificateStatus::Inconclusive => Status::Inconclusive,
            };
            checks.push(
                series
                    .input("order", cert.order)
                    .values(cert.tail_bound, Some(cert.partial_sum), c.tail_tol)
                    .status(status)
                    .detail(format!("method {:?}, rate {}", cert.method, num(cert.rate))),
            );
            label
        }
        Err(e) => {
            checks.push(series.from_error(&e));
            "error".to_string()
        }
    };
    let mut cumulative = 0.0;
    let mut orders = c.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    for n in orders {
        let base = Check::new(format!("chaos.jn.n{n}")).input("n", n).input("t", t).input("samples", c.samples);
        let bound = match jn_bound(&op, &kernel, t, n) {
            Ok(b) => b.value(),
            Err(e) => {
                checks.push(base.from_error(&e));
                continue;
            }
        };
        let term_bound = (m2 * t).powi(n as i32) * bound;
        cumulative += term_bound;
        let estimate = if n <= MAX_MC_ORDER {
            jn_estimate(&op, &kernel, t, n, m2, c.samples, &runner, family_tag("chaos") + n as u64)
        } else {
            Err(Error::Unsupported(format!("Monte Carlo is limited to orders up to {MAX_MC_ORDER}")))
        };
        let (mc, se) = match &estimate {
            Ok(e) => (Some(e.jn_value), Some(e.jn_se)),
            Err(_) => (None, None),
        };
        table.push(vec![
            n.to_string(),
            opt_num(mc),
            opt_num(se),
            num(bound),
            num(term_bound),
            num(cumulative),
            certificate.clone(),
        ]);
        checks.push(match estimate {
            Ok(e) => base
                .values(e.jn_value, Some(bound), k * e.jn_se)
                .status(Status::from_bool(e.jn_value <= bound + k * e.jn_se)),
            Err(err) => base.from_error(&err),
        });
    }
    Outcome { report: Report::new("chaos", config, checks), table: Some(table) }
}
