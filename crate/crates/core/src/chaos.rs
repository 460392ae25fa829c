//! Chaos-expansion quantities for the multiplicative equation `Lu = u Ẋ`:
//! `K(t)`, `A_T`, the simplex integrals `J_n(t)`, convergence certificates for
//! `Σ m₂ⁿ tⁿ J_n(t)`, and the comparison with Gaussian noise of equal
//! covariance.
//!
//! Throughout, `J_n(t) = ∫_{T_n(t)} ∫ Π_j |FG_{t_{j+1}−t_j}(ξ₁+…+ξ_j)|² μ(dξ₁)…μ(dξ_n) dt`
//! with `t_{n+1} = t`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::kernels::{sphere_mean, ColorationKernel, RADIAL_TOL};
use crate::measure::LevyMeasure;
use crate::operators::{GreenOperator, OperatorFamily};
use crate::quad::{integrate, integrate_left_singular, Tolerance};
use crate::rng::TrialRunner;
use crate::stats::{mean_se, MeanEstimate};

/// Largest order estimated by Monte Carlo.
pub const MAX_MC_ORDER: usize = 3;
/// Largest order of the simplex quadrature bound.
pub const MAX_SIMPLEX_ORDER: usize = 3;

fn require_dalang(op: &GreenOperator, kernel: &ColorationKernel) -> Result<()> {
    if op.dim() != kernel.dim() {
        return Err(Error::InvalidParameter(format!("operator has d = {} but kernel has d = {}", op.dim(), kernel.dim())));
    }
    if !kernel.dalang_check() {
        return Err(Error::DivergentIntegral(format!(
            "the {} kernel with alpha = {} fails the Dalang condition in d = {}",
            kernel.family().name(),
            kernel.alpha(),
            kernel.dim()
        )));
    }
    Ok(())
}

/// `D_t = 2(t² ∨ 1)`, so that `sin²(t|ξ|)/|ξ|² <= D_t/(1+|ξ|²)`.
pub fn wave_constant(t: f64) -> f64 {
    2.0 * (t * t).max(1.0)
}

/// `C_μ = ∫ (1+|ξ|²)^{-1} μ(dξ)`.
pub fn c_mu(kernel: &ColorationKernel) -> Result<f64> {
    kernel.dalang_integral()
}

/// `∫ |FG_t(ξ+η)|² μ(dξ)`.
pub fn shifted_symbol_integral(op: &GreenOperator, kernel: &ColorationKernel, t: f64, eta: &[f64]) -> Result<f64> {
    require_dalang(op, kernel)?;
    if eta.len() != op.dim() {
        return Err(Error::InvalidParameter("shift must have the dimension of the operator".into()));
    }
    let e = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mu = kernel.spectral_measure();
    let d = op.dim();
    let tol = Tolerance::new(1e-300, 1e-11);
    let value = if e == 0.0 {
        mu.integrate_radial(|r| op.fourier_g(t, r).powi(2), tol)?
    } else {
        mu.integrate_radial(
            |r| {
                sphere_mean(d, |c| {
                    let s = (r * r + e * e + 2.0 * r * e * c).max(0.0).sqrt();
                    op.fourier_g(t, s).powi(2)
                })
                .unwrap_or(f64::NAN)
            },
            tol,
        )?
    };
    Ok(value)
}

/// `K(t) = sup_η ∫|FG_t(ξ+η)|² μ(dξ)`.
///
/// Heat: the supremum sits at η = 0, so the value is `∫ e^{−t|ξ|²} μ(dξ)`.
/// Wave: the certified bound `D_t C_μ`.
pub fn k_sup(op: &GreenOperator, kernel: &ColorationKernel, t: f64) -> Result<f64> {
    require_dalang(op, kernel)?;
    match op.family() {
        OperatorFamily::Heat => {
            if t == 0.0 {
                return kernel.spectral_measure().total_mass().ok_or_else(|| {
                    Error::DivergentIntegral("K(0) is the total mass of an infinite spectral measure".into())
                });
            }
            shifted_symbol_integral(op, kernel, t, &vec![0.0; op.dim()])
        }
        OperatorFamily::Wave => Ok(wave_constant(t) * c_mu(kernel)?),
    }
}

/// `A_T` with a certified value and an exact lower reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeIntegral {
    /// Upper bound on `A_T` (equal to `A_T` for the heat operator).
    pub certified: f64,
    /// `∫₀ᵀ ∫ |FG_t(ξ)|² μ(dξ) dt`, the η = 0 value.
    pub reference: f64,
}

/// `A_T = ∫₀ᵀ K(t) dt`.
///
/// Heat: time quadrature of `K`, which may blow up like a power at 0.
/// Wave: `T·D_T·C_μ` as certificate; the reference integrates the exact
/// symbol energy.
pub fn a_integral(op: &GreenOperator, kernel: &ColorationKernel, horizon: f64) -> Result<TimeIntegral> {
    require_dalang(op, kernel)?;
    if horizon == 0.0 {
        return Ok(TimeIntegral { certified: 0.0, reference: 0.0 });
    }
    let mu = kernel.spectral_measure();
    let reference = mu.integrate_radial(|r| op.symbol_energy(horizon, r), RADIAL_TOL)?;
    match op.family() {
        OperatorFamily::Heat => {
            let mut failure = None;
            let est = integrate_left_singular(
                |t| match k_sup(op, kernel, t) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                0.0,
                horizon,
                Tolerance::new(1e-300, 1e-9),
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(TimeIntegral { certified: est.value, reference })
        }
        OperatorFamily::Wave => Ok(TimeIntegral { certified: horizon * wave_constant(horizon) * c_mu(kernel)?, reference }),
    }
}

/// The order-n chaos quantity with its Monte Carlo error and bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosTermEstimate {
    pub n: usize,
    pub t: f64,
    pub jn_value: f64,
    pub jn_se: f64,
    pub jn_bound: f64,
    /// `m₂ⁿ tⁿ J_n(t)` at the estimate.
    pub term: f64,
}

fn log_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Monte Carlo estimate of `J_n(t)` for finite μ.
///
/// Times are `n` sorted uniforms on `[0, t]` (each ordered tuple is a
/// uniform point of the simplex, of volume `tⁿ/n!`); frequencies are iid from
/// `μ/μ(ℝ^d)`. The estimator is `M^n tⁿ/n! · Π_j |FG_{t_{j+1}−t_j}(ξ₁+…+ξ_j)|²`.
#[allow(clippy::too_many_arguments)]
pub fn jn_estimate(
    op: &GreenOperator,
    kernel: &ColorationKernel,
    t: f64,
    n: usize,
    m2: f64,
    samples: usize,
    runner: &TrialRunner,
    family: u64,
) -> Result<ChaosTermEstimate> {
    require_dalang(op, kernel)?;
    if n == 0 || n > MAX_MC_ORDER {
        return Err(Error::Unsupported(format!("Monte Carlo is limited to orders 1..={MAX_MC_ORDER}, got {n}")));
    }
    let mu = kernel.spectral_measure();
    let mass = mu.total_mass().ok_or_else(|| {
        Error::Unsupported(format!(
            "the spectral measure of the {} kernel with alpha = {} has infinite mass",
            kernel.family().name(),
            kernel.alpha()
        ))
    })?;
    let d = op.dim();
    let scale = (n as f64 * (mass.ln() + t.ln()) - log_factorial(n)).exp();
    let draws: Vec<Result<f64>> = runner.run(family, samples, |rng, _| {
        let mut times: Vec<f64> = (0..n).map(|_| t * rng.uniform()).collect();
        times.sort_by(f64::total_cmp);
        times.push(t);
        let mut xi = vec![0.0; d];
        let mut partial = vec![0.0; d];
        let mut product = 1.0;
        for j in 0..n {
            mu.sample_normalized(rng, &mut xi)?;
            partial.iter_mut().zip(&xi).for_each(|(s, v)| *s += v);
            product *= op.fourier_g_at(times[j + 1] - times[j], &partial).powi(2);
        }
        Ok(scale * product)
    });
    let values: Vec<f64> = draws.into_iter().collect::<Result<_>>()?;
    let est = mean_se(&values);
    let bound = jn_bound(op, kernel, t, n)?.value();
    Ok(ChaosTermEstimate {
        n,
        t,
        jn_value: est.mean,
        jn_se: est.se,
        jn_bound: bound,
        term: (m2 * t).powi(n as i32) * est.mean,
    })
}

/// Bound on `J_n(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JnBound {
    pub n: usize,
    /// Heat: `A_tⁿ`. Wave: `(D_t C_μ)ⁿ tⁿ/n!`.
    pub certified: f64,
    /// Heat, `n <= 3`: `∫_{T_n(t)} K(t−t_n)…K(t₂−t₁) dt` by nested quadrature.
    pub simplex: Option<f64>,
}

impl JnBound {
    /// The sharpest bound available.
    pub fn value(&self) -> f64 {
        self.simplex.map_or(self.certified, |s| s.min(self.certified))
    }
}

/// Log-log cubic interpolant of a positive function on a geometric grid
/// spanning twelve decades below `top`.
struct LogTable {
    log_lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl LogTable {
    const POINTS: usize = 481;
    const DECADES: f64 = 12.0;

    fn nodes(top: f64) -> (f64, f64) {
        let log_hi = top.ln();
        let log_lo = log_hi - Self::DECADES * std::f64::consts::LN_10;
        (log_lo, (log_hi - log_lo) / (Self::POINTS - 1) as f64)
    }

    fn build<F: FnMut(f64) -> Result<f64>>(top: f64, mut f: F) -> Result<Self> {
        let (log_lo, step) = Self::nodes(top);
        let values = (0..Self::POINTS)
            .map(|i| f((log_lo + i as f64 * step).exp()).map(f64::ln))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { log_lo, step, values })
    }

    fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let u = (s.ln() - self.log_lo) / self.step;
        let last = self.values.len() - 1;
        if u <= 0.0 {
            // Power-law extrapolation with the first slope.
            let slope = (self.values[1] - self.values[0]) / self.step;
            return (self.values[0] + slope * u * self.step).exp();
        }
        let u = u.min(last as f64);
        let i = (u.floor() as usize).min(last - 1);
        let f = u - i as f64;
        let at = |k: isize| self.values[k.clamp(0, last as isize) as usize];
        let i = i as isize;
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let v = p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)));
        v.exp()
    }
}

/// `S_n(t)` where `S_k(τ) = ∫₀^τ K(g) S_{k−1}(τ−g) dg` and `S_0 = 1`.
///
/// Each inner `S_k` is tabulated on the grid before `S_{k+1}` is built from
/// it, so the quadratures are never nested.
fn simplex_product(op: &GreenOperator, kernel: &ColorationKernel, n: usize, t: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-300, 1e-10);
    let mut previous: Option<LogTable> = None;
    if n > 1 {
        let k_table = LogTable::build(t, |s| k_sup(op, kernel, s))?;
        for _ in 1..n {
            let convolve = |tau: f64| -> Result<f64> {
                let est = integrate_left_singular(
                    |g| k_table.eval(g) * previous.as_ref().map_or(1.0, |p| p.eval(tau - g)),
                    0.0,
                    tau,
                    tol,
                )?;
                Ok(est.value)
            };
            previous = Some(LogTable::build(t, convolve)?);
        }
    }
    // The outermost level uses K itself rather than its interpolant.
    let mut failure = None;
    let est = integrate_left_singular(
        |g| {
            let k = k_sup(op, kernel, g).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            });
            k * previous.as_ref().map_or(1.0, |p| p.eval(t - g))
        },
        0.0,
        t,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

pub fn jn_bound(op: &GreenOperator, kernel: &ColorationKernel, t: f64, n: usize) -> Result<JnBound> {
    require_dalang(op, kernel)?;
    if n == 0 {
        return Ok(JnBound { n, certified: 1.0, simplex: Some(1.0) });
    }
    if t == 0.0 {
        return Ok(JnBound { n, certified: 0.0, simplex: Some(0.0) });
    }
    match op.family() {
        OperatorFamily::Heat => {
            let a = a_integral(op, kernel, t)?.certified;
            let simplex = if n <= MAX_SIMPLEX_ORDER {
                Some(simplex_product(op, kernel, n, t)?)
            } else {
                None
            };
            Ok(JnBound { n, certified: a.powi(n as i32), simplex })
        }
        OperatorFamily::Wave => {
            let x = wave_constant(t) * c_mu(kernel)? * t;
            let value = (n as f64 * x.ln() - log_factorial(n)).exp();
            Ok(JnBound { n, certified: value, simplex: None })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateMethod {
    /// Terms `xⁿ/n!`.
    Factorial,
    /// Terms `ρⁿ` with `ρ < 1`.
    Geometric,
    None,
}

/// Certified truncation of `Σ_{n>=1} m₂ⁿ tⁿ J_n(t)` through term bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCertificate {
    pub status: CertificateStatus,
    pub method: CertificateMethod,
    /// Number of terms kept.
    pub order: usize,
    /// Term bounds `b_1, …, b_N`.
    pub term_bounds: Vec<f64>,
    pub partial_sum: f64,
    /// Bound on `Σ_{n>N} b_n`; infinite when inconclusive.
    pub tail_bound: f64,
    /// `x` for factorial terms, `ρ` for geometric ones.
    pub rate: f64,
}

const MAX_SERIES_ORDER: usize = 100_000;

fn factorial_series(x: f64, tail_tol: f64) -> (Vec<f64>, f64) {
    let mut terms = Vec::new();
    let mut term = 1.0;
    for n in 1..=MAX_SERIES_ORDER {
        term *= x / n as f64;
        terms.push(term);
        // Σ_{k>n} x^k/k! <= x^{n+1}/(n+1)! · 1/(1 − x/(n+2)) once n + 2 > x.
        let next = term * x / (n + 1) as f64;
        let ratio = x / (n + 2) as f64;
        if ratio < 1.0 {
            let tail = next / (1.0 - ratio);
            if tail < tail_tol {
                return (terms, tail);
            }
        }
    }
    (terms, f64::INFINITY)
}

fn geometric_series(rho: f64, tail_tol: f64) -> (Vec<f64>, f64) {
    let mut terms = Vec::new();
    let mut term = 1.0;
    for _ in 1..=MAX_SERIES_ORDER {
        term *= rho;
        terms.push(term);
        let tail = term * rho / (1.0 - rho);
        if tail < tail_tol {
            return (terms, tail);
        }
    }
    (terms, f64::INFINITY)
}

fn certificate(method: CertificateMethod, rate: f64, terms: Vec<f64>, tail: f64) -> SeriesCertificate {
    let partial_sum = crate::stats::kahan_sum(terms.iter().copied());
    SeriesCertificate {
        status: if tail.is_finite() { CertificateStatus::Certified } else { CertificateStatus::Inconclusive },
        method,
        order: terms.len(),
        term_bounds: terms,
        partial_sum,
        tail_bound: tail,
        rate,
    }
}

/// Smallest `N` whose certified tail beyond `N` is below `tail_tol`.
///
/// Wave: `m₂ⁿtⁿJ_n <= xⁿ/n!` with `x = m₂ D_t C_μ t²`. Heat: `m₂ⁿtⁿJ_n <= ρⁿ`
/// with `ρ = m₂ t A_t` when `ρ < 1`; otherwise, for finite μ,
/// `K <= μ(ℝ^d)` gives factorial terms with `x = m₂ μ(ℝ^d) t²`. Anything else
/// is reported as inconclusive with empty partial sums.
pub fn series_certificate(op: &GreenOperator, kernel: &ColorationKernel, t: f64, m2: f64, tail_tol: f64) -> Result<SeriesCertificate> {
    require_dalang(op, kernel)?;
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tail tolerance must be positive, got {tail_tol}")));
    }
    if !(m2 >= 0.0 && t >= 0.0) {
        return Err(Error::InvalidParameter("m₂ and t must be nonnegative".into()));
    }
    match op.family() {
        OperatorFamily::Wave => {
            let x = m2 * wave_constant(t) * c_mu(kernel)? * t * t;
            let (terms, tail) = factorial_series(x, tail_tol);
            Ok(certificate(CertificateMethod::Factorial, x, terms, tail))
        }
        OperatorFamily::Heat => {
            let rho = m2 * t * a_integral(op, kernel, t)?.certified;
            if rho < 1.0 {
                let (terms, tail) = geometric_series(rho, tail_tol);
                return Ok(certificate(CertificateMethod::Geometric, rho, terms, tail));
            }
            if let Some(mass) = kernel.spectral_measure().total_mass() {
                let x = m2 * mass * t * t;
                let (terms, tail) = factorial_series(x, tail_tol);
                return Ok(certificate(CertificateMethod::Factorial, x, terms, tail));
            }
            Ok(certificate(CertificateMethod::None, rho, Vec::new(), f64::INFINITY))
        }
    }
}

/// The first chaos term computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstChaos {
    /// `m₂ ∫ |H_t|² μ` with the closed-form `H_t`.
    pub lhs: f64,
    /// `m₂ ∫ |∫₀ᵗ FG_s ds|² μ` with the time integral done numerically.
    pub rhs: f64,
}

/// Time integral of the symbol by Gauss-Kronrod, independent of the closed
/// form in `h_transform`.
fn numeric_h(op: &GreenOperator, t: f64, r: f64) -> f64 {
    let cycles = match op.family() {
        OperatorFamily::Heat => 1.0,
        OperatorFamily::Wave => (t * r / std::f64::consts::PI).ceil().max(1.0),
    };
    let pieces = cycles.min(4096.0) as usize;
    let width = t / pieces as f64;
    let mut acc = crate::stats::KahanSum::default();
    for k in 0..pieces {
        let a = k as f64 * width;
        let b = if k + 1 == pieces { t } else { a + width };
        match integrate(|s| op.fourier_g(s, r), a, b, Tolerance::new(1e-300, 1e-13)) {
            Ok(e) => acc.add(e.value),
            Err(_) => return f64::NAN,
        }
    }
    acc.value()
}

pub fn first_chaos_identity(op: &GreenOperator, kernel: &ColorationKernel, m2: f64, t: f64) -> Result<FirstChaos> {
    require_dalang(op, kernel)?;
    if t == 0.0 {
        return Ok(FirstChaos { lhs: 0.0, rhs: 0.0 });
    }
    let mu = kernel.spectral_measure();
    let lhs = m2 * mu.integrate_radial(|r| op.h_transform(t, r).powi(2), RADIAL_TOL)?;
    let rhs = m2 * mu.integrate_radial(|r| numeric_h(op, t, r).powi(2), Tolerance::new(1e-300, 1e-10))?;
    Ok(FirstChaos { lhs, rhs })
}

/// Chaos-term norms for Lévy noise and for Gaussian noise with the same
/// spatial covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComparison {
    pub n: usize,
    /// `n! ‖f̃ₙ*‖²` for the Poisson chaos.
    pub poisson_term: f64,
    /// `m₂ⁿ n! ‖f̃ₙ‖²` for the Gaussian chaos.
    pub gaussian_term: f64,
    pub ratio: f64,
    /// Standard error of the ratio; zero when both sides are exact.
    pub ratio_se: f64,
    pub poisson_se: f64,
    pub gaussian_se: f64,
}

/// `∫₀ᵗ FG_{t−u}(|ξ₁+ξ₂|) · ½(H_u(ξ₁) + H_u(ξ₂)) du`, the time-integrated
/// second-order kernel symmetrized in its two arguments.
fn symmetric_second_kernel(op: &GreenOperator, t: f64, xi1: &[f64], xi2: &[f64]) -> f64 {
    let sum: Vec<f64> = xi1.iter().zip(xi2).map(|(a, b)| a + b).collect();
    let r1 = crate::kernels::norm(xi1);
    let r2 = crate::kernels::norm(xi2);
    let r12 = crate::kernels::norm(&sum);
    let f = |u: f64| op.fourier_g(t - u, r12) * 0.5 * (op.h_transform(u, r1) + op.h_transform(u, r2));
    let pieces = match op.family() {
        OperatorFamily::Heat => 1,
        OperatorFamily::Wave => ((t * r1.max(r2).max(r12) / std::f64::consts::PI).ceil() as usize).clamp(1, 4096),
    };
    let width = t / pieces as f64;
    let mut acc = crate::stats::KahanSum::default();
    for k in 0..pieces {
        let a = k as f64 * width;
        let b = if k + 1 == pieces { t } else { a + width };
        match integrate(f, a, b, Tolerance::new(1e-300, 1e-11)) {
            Ok(e) => acc.add(e.value),
            Err(_) => return f64::NAN,
        }
    }
    acc.value()
}

/// Compares `n! ‖f̃ₙ*‖²` with `m₂ⁿ n! ‖f̃ₙ‖²` for `n ∈ {1, 2}`.
///
/// For n = 1 both sides are the first chaos term. For n = 2 one Monte Carlo
/// run over `(ξ₁, ξ₂) ~ (μ/M)⊗²` feeds both sides: the Gaussian side uses
/// `m₂²` directly, the Poisson side draws jumps `z₁, z₂ ~ ν/ν(ℝ₀)` and
/// weights by `ν(ℝ₀)² z₁² z₂²`.
#[allow(clippy::too_many_arguments)]
pub fn gaussian_equivalence(
    op: &GreenOperator,
    kernel: &ColorationKernel,
    nu: &LevyMeasure,
    t: f64,
    n: usize,
    samples: usize,
    runner: &TrialRunner,
    family: u64,
) -> Result<GaussianComparison> {
    require_dalang(op, kernel)?;
    let m2 = nu.moment(2.0)?;
    match n {
        1 => {
            let mu = kernel.spectral_measure();
            let norm = mu.integrate_radial(|r| op.h_transform(t, r).powi(2), RADIAL_TOL)?;
            // ‖f₁*‖² = ∫z²ν(dz) · ‖w‖², the same number as the Gaussian side.
            let poisson = m2 * norm;
            let gaussian = m2 * norm;
            Ok(GaussianComparison {
                n,
                poisson_term: poisson,
                gaussian_term: gaussian,
                ratio: poisson / gaussian,
                ratio_se: 0.0,
                poisson_se: 0.0,
                gaussian_se: 0.0,
            })
        }
        2 => {
            let mu = kernel.spectral_measure();
            let mass = mu.total_mass().ok_or_else(|| {
                Error::Unsupported("second-order comparison needs a spectral measure of finite mass".into())
            })?;
            let d = op.dim();
            let lambda = nu.total_mass();
            let pairs: Vec<Result<(f64, f64)>> = runner.run(family, samples, |rng, _| {
                let mut xi1 = vec![0.0; d];
                let mut xi2 = vec![0.0; d];
                mu.sample_normalized(rng, &mut xi1)?;
                mu.sample_normalized(rng, &mut xi2)?;
                let z1 = nu.sample_jump(rng);
                let z2 = nu.sample_jump(rng);
                let q = symmetric_second_kernel(op, t, &xi1, &xi2);
                let base = 2.0 * mass * mass * q * q;
                Ok((lambda * lambda * z1 * z1 * z2 * z2 * base, m2 * m2 * base))
            });
            let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
            let (ps, gs): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            let p = mean_se(&ps);
            let g = mean_se(&gs);
            let ratio = p.mean / g.mean;
            let ratio_se = ratio_standard_error(&pairs, p, g);
            Ok(GaussianComparison {
                n,
                poisson_term: p.mean,
                gaussian_term: g.mean,
                ratio,
                ratio_se,
                poisson_se: p.se,
                gaussian_se: g.se,
            })
        }
        _ => Err(Error::Unsupported(format!("Gaussian comparison is implemented for n <= 2, got {n}"))),
    }
}

/// Delta-method standard error of `mean(a)/mean(b)` for paired samples.
fn ratio_standard_error(pairs: &[(f64, f64)], a: MeanEstimate, b: MeanEstimate) -> f64 {
    let n = pairs.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let r = a.mean / b.mean;
    let resid: Vec<f64> = pairs.iter().map(|(x, y)| x - r * y).collect();
    mean_se(&resid).se / b.mean.abs()
}
