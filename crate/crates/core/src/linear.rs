//! The linear equation `Lv = Ẋ` with zero initial data: sampling `v(t,x)`,
//! exact second moments and covariances, and p-th moment envelopes.
//!
//! The solution is the compensated Poisson integral of the weight
//! `w_{t,x}(y) = ∫₀ᵗ (G_{t−s}(x−·) * κ)(y) ds`, whose Fourier transform is
//! `e^{−iξx} Fκ(ξ) H_t(ξ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::inverse_even_transform;
use crate::kernels::{sphere_mean_cos, ColorationKernel, KernelFamily, RADIAL_TOL};
use crate::measure::LevyMeasure;
use crate::operators::{admissible_p_range, alt_admissible_p_range, jp_bound, jp_exponent, jp_norm, GreenOperator, OperatorFamily};
use crate::prm::{sample_prm, SpatialBox};
use crate::quad::{integrate, trapezoid, Tolerance};
use crate::rng::TrialRunner;
use crate::stats::{mean_se, p_norm, KahanSum, MeanEstimate, NormEstimate};

/// Pointwise accuracy target of weight evaluations.
const WEIGHT_TOL: f64 = 1e-9;
/// Truncation error estimate above which `weight_eval` gives up.
const WEIGHT_FAIL: f64 = 1e-7;
const MAX_CUTOFF: f64 = 1e7;
/// Admissible fraction of `‖w‖²` outside the simulation box.
pub const TAIL_MASS_LIMIT: f64 = 1e-4;
const MAX_TABLE_POINTS: usize = 1 << 23;
/// Relative L² error of a weight table from cutting its spectrum.
const TABLE_L2_TOL: f64 = 1e-7;

fn require_dalang(kernel: &ColorationKernel) -> Result<()> {
    if kernel.dalang_check() {
        Ok(())
    } else {
        Err(Error::DivergentIntegral(format!(
            "∫(1+|ξ|²)^{{-1}}μ(dξ) diverges for the {} kernel with alpha = {} in d = {}",
            kernel.family().name(),
            kernel.alpha(),
            kernel.dim()
        )))
    }
}

fn require_pair(op: &GreenOperator, kernel: &ColorationKernel) -> Result<()> {
    if op.dim() != kernel.dim() {
        return Err(Error::InvalidParameter(format!("operator has d = {} but kernel has d = {}", op.dim(), kernel.dim())));
    }
    Ok(())
}

fn require_line(op: &GreenOperator, kernel: &ColorationKernel, what: &str) -> Result<()> {
    require_pair(op, kernel)?;
    if op.dim() != 1 {
        return Err(Error::Unsupported(format!("{what} is implemented for d = 1")));
    }
    Ok(())
}

/// `f(ξ) = Fκ(ξ) H_t(ξ)`, nonnegative for both operators.
fn weight_spectrum(op: &GreenOperator, kernel: &ColorationKernel, t: f64, r: f64) -> f64 {
    if r == 0.0 && kernel.family() == KernelFamily::Riesz {
        return 0.0;
    }
    kernel.fourier_amplitude(r).unwrap_or(0.0) * op.h_transform(t, r)
}

/// Bound on `(1/π)∫_Ξ^∞ Fκ(ξ)H_t(ξ) dξ` from `H_t <= 2/ξ²` and `Fκ`
/// nonincreasing.
fn truncation_bound(kernel: &ColorationKernel, cutoff: f64) -> f64 {
    2.0 * kernel.fourier_amplitude(cutoff).unwrap_or(f64::INFINITY) / (PI * cutoff)
}

/// Smallest power-of-two cutoff with truncation bound below `target`,
/// capped at `MAX_CUTOFF`.
fn spectral_cutoff(kernel: &ColorationKernel, target: f64) -> f64 {
    let mut cutoff = 1.0;
    while cutoff < MAX_CUTOFF && truncation_bound(kernel, cutoff) > target {
        cutoff *= 2.0;
    }
    cutoff
}

/// `w_{t,x}(y) = (1/π)∫₀^∞ cos(ξ(y−x)) Fκ(ξ) H_t(ξ) dξ` in d = 1.
///
/// The half-line is cut where the tail bound `2Fκ(Ξ)/(πΞ)` drops below 1e-9
/// and the remainder is integrated in chunks of a few oscillation periods.
pub fn weight_eval(op: &GreenOperator, kernel: &ColorationKernel, t: f64, x: f64, y: f64) -> Result<f64> {
    require_line(op, kernel, "weight evaluation")?;
    require_dalang(kernel)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let cutoff = spectral_cutoff(kernel, WEIGHT_TOL);
    let tail = truncation_bound(kernel, cutoff);
    if tail > WEIGHT_FAIL {
        return Err(Error::QuadratureFail(format!(
            "weight spectrum truncated at {cutoff:e} leaves an error bound of {tail:e}"
        )));
    }
    let h = (y - x).abs();
    let chunk = if h > 0.0 { (16.0 * PI / h).min(1.0) } else { 1.0 };
    let f = |xi: f64| (xi * h).cos() * weight_spectrum(op, kernel, t, xi);
    let mut acc = KahanSum::default();
    let mut lo = 0.0;
    let chunks = (cutoff / chunk).ceil() as usize;
    let chunk_tol = Tolerance::new(0.1 * WEIGHT_TOL / chunks as f64, 1e-12);
    for k in 0..chunks {
        let hi = ((k + 1) as f64 * chunk).min(cutoff);
        let est = if k == 0 && kernel.family() == KernelFamily::Riesz {
            crate::quad::integrate_left_singular(f, lo, hi, chunk_tol)?
        } else {
            integrate(f, lo, hi, chunk_tol)?
        };
        acc.add(est.value);
        lo = hi;
    }
    Ok(acc.value() / PI)
}

/// Smallest power-of-two cutoff `Ξ` whose spectral tail carries at most a
/// `TABLE_L2_TOL` fraction of `‖w‖₂`: with `H_t <= 2/ξ²` and `Fκ`
/// nonincreasing, `(1/π)∫_Ξ^∞ Fκ²H_t² <= 4Fκ(Ξ)²/(3πΞ³)`.
fn l2_cutoff(op: &GreenOperator, kernel: &ColorationKernel, t: f64) -> Result<f64> {
    let norm_sq = kernel.spectral_measure().integrate_radial(|r| op.h_transform(t, r).powi(2), RADIAL_TOL)?;
    let target = TABLE_L2_TOL * TABLE_L2_TOL * norm_sq;
    let tail = |c: f64| 4.0 * kernel.fourier_amplitude(c).unwrap_or(f64::INFINITY).powi(2) / (3.0 * PI * c.powi(3));
    let mut cutoff = 1.0;
    while cutoff < MAX_CUTOFF && tail(cutoff) > target {
        cutoff *= 2.0;
    }
    Ok(cutoff)
}

/// Grid samples of `w_{t,0}` from one inverse FFT of `Fκ·H_t`, with cubic
/// interpolation in between. Zero outside the grid.
///
/// The grid resolves the spectrum up to a cutoff chosen for L² accuracy,
/// which is what the moments of `v` depend on; `truncation` reports the
/// cruder pointwise bound at the Nyquist frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    t: f64,
    start: f64,
    step: f64,
    values: Vec<f64>,
    /// Pointwise error bound from truncating the spectrum at Nyquist.
    pub truncation: f64,
}

impl WeightTable {
    /// Table covering at least `[−half_width, half_width]` plus the decay
    /// length of the weight on either side.
    pub fn build(op: &GreenOperator, kernel: &ColorationKernel, t: f64, half_width: f64) -> Result<Self> {
        require_line(op, kernel, "weight tables")?;
        require_dalang(kernel)?;
        let a = kernel.alpha();
        let (reach_k, scale_k) = match kernel.family() {
            KernelFamily::Heat => (12.0 * (0.5 * a).sqrt(), (0.5 * a).sqrt()),
            KernelFamily::Bessel => (45.0, 0.5),
            KernelFamily::Riesz => {
                return Err(Error::Unsupported("Riesz weights decay too slowly for a truncated simulation box".into()))
            }
        };
        let (reach_g, scale_g) = match op.family() {
            OperatorFamily::Heat => (12.0 * t.sqrt(), t.sqrt()),
            OperatorFamily::Wave => (t, t),
        };
        if t == 0.0 {
            return Ok(Self { t, start: -half_width, step: half_width.max(1.0), values: vec![0.0; 3], truncation: 0.0 });
        }
        let reach = reach_g + reach_k;
        let half = half_width.max(reach) + reach;
        let cutoff = l2_cutoff(op, kernel, t)?;
        let step = (PI / cutoff).min(scale_g.min(scale_k) / 32.0);
        let n = ((2.0 * half / step).ceil() as usize).next_power_of_two();
        if n > MAX_TABLE_POINTS {
            return Err(Error::Unsupported(format!("weight table would need {n} points")));
        }
        let step = 2.0 * half / n as f64;
        let values = inverse_even_transform(|r| weight_spectrum(op, kernel, t, r), n, step);
        Ok(Self {
            t,
            start: -half,
            step,
            values,
            truncation: truncation_bound(kernel, PI / step),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `|y|` on the grid.
    pub fn reach(&self) -> f64 {
        -self.start
    }

    fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    fn value(&self, j: isize) -> f64 {
        if j < 0 {
            0.0
        } else {
            self.values.get(j as usize).copied().unwrap_or(0.0)
        }
    }

    /// `w_{t,0}(y)` by Catmull-Rom interpolation.
    pub fn eval(&self, y: f64) -> f64 {
        let u = (y - self.start) / self.step;
        if !(u >= 0.0 && u <= (self.values.len() - 1) as f64) {
            return 0.0;
        }
        let i = u.floor() as isize;
        let s = u - i as f64;
        let (p0, p1, p2, p3) = (self.value(i - 1), self.value(i), self.value(i + 1), self.value(i + 2));
        p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)))
    }

    /// `‖w‖²_{L²}` by the trapezoid rule on the grid.
    pub fn l2_norm_sq(&self) -> f64 {
        crate::stats::kahan_sum(self.values.iter().map(|v| v * v)) * self.step
    }

    /// `∫_{|y|>R} w_{t,x}(y)² dy / ‖w‖²`.
    pub fn tail_fraction(&self, radius: f64, x: f64) -> f64 {
        let total = self.l2_norm_sq();
        if total == 0.0 {
            return 0.0;
        }
        let outside = crate::stats::kahan_sum(
            self.values
                .iter()
                .enumerate()
                .filter(|(j, _)| (self.node(*j) + x).abs() > radius)
                .map(|(_, v)| v * v),
        ) * self.step;
        outside / total
    }

    /// Smallest radius (in steps of the grid spacing) with tail fraction
    /// below `limit` for every centre in `xs`.
    pub fn minimal_radius(&self, xs: &[f64], limit: f64) -> f64 {
        let total = self.l2_norm_sq();
        if total == 0.0 {
            return 0.0;
        }
        let mut radius = 0.0f64;
        for &x in xs {
            // Accumulate w² from the outside in until the limit is reached.
            let mut order: Vec<(f64, f64)> =
                self.values.iter().enumerate().map(|(j, v)| ((self.node(j) + x).abs(), v * v)).collect();
            order.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut acc = 0.0;
            let mut r = 0.0;
            for (dist, w2) in order {
                acc += w2 * self.step;
                if acc >= limit * total {
                    r = dist;
                    break;
                }
            }
            radius = radius.max(r);
        }
        radius
    }

    /// `∫_a^b w_{t,x}(y) dy`.
    pub fn integral(&self, x: f64, a: f64, b: f64) -> f64 {
        let points = (((b - a) / self.step).ceil() as usize).max(2) + 1;
        trapezoid(|y| self.eval(y - x), a, b, points)
    }
}

/// Moments of `v(t, x)` at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub t: f64,
    pub x: f64,
    pub mean: MeanEstimate,
    pub second: MeanEstimate,
    pub fourth: MeanEstimate,
    pub norm4: NormEstimate,
}

impl PointSummary {
    fn from_samples(t: f64, x: f64, samples: &[f64]) -> Self {
        let squares: Vec<f64> = samples.iter().map(|v| v * v).collect();
        let fourth: Vec<f64> = squares.iter().map(|v| v * v).collect();
        Self {
            t,
            x,
            mean: mean_se(samples),
            second: mean_se(&squares),
            fourth: mean_se(&fourth),
            norm4: p_norm(samples, 4.0),
        }
    }

    /// Estimate of `E|v|^p` for `p ∈ {1, 2, 4}`; `p = 1` is the signed mean.
    pub fn moment(&self, p: u32) -> Option<MeanEstimate> {
        match p {
            1 => Some(self.mean),
            2 => Some(self.second),
            4 => Some(self.fourth),
            _ => None,
        }
    }
}

/// Monte Carlo samples of `v(t, x)` on a grid of `(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEstimate {
    pub times: Vec<f64>,
    pub points: Vec<f64>,
    pub radius: f64,
    pub trials: usize,
    pub seed: u64,
    /// `samples[i * points.len() + j]` holds the draws at `(times[i], points[j])`.
    samples: Vec<Vec<f64>>,
    summaries: Vec<PointSummary>,
}

impl FieldEstimate {
    pub fn samples(&self, ti: usize, xi: usize) -> &[f64] {
        &self.samples[ti * self.points.len() + xi]
    }

    pub fn summary(&self, ti: usize, xi: usize) -> &PointSummary {
        &self.summaries[ti * self.points.len() + xi]
    }

    pub fn summaries(&self) -> &[PointSummary] {
        &self.summaries
    }
}

/// Smallest box half-width meeting the tail-mass limit at every `(t, x)`.
pub fn minimal_box(op: &GreenOperator, kernel: &ColorationKernel, times: &[f64], xs: &[f64]) -> Result<f64> {
    let mut radius = 0.0f64;
    for &t in times {
        let table = WeightTable::build(op, kernel, t, 0.0)?;
        radius = radius.max(table.minimal_radius(xs, 0.5 * TAIL_MASS_LIMIT));
    }
    // Round up to a grid-independent value so that the box is reproducible.
    Ok((radius * 4.0).ceil() / 4.0)
}

/// Samples `v(t, x) = Σ z_i w_{t,x}(y_i) − (∫z ν(dz)) ∫_{−R}^{R} w_{t,x}` from
/// one Poisson random measure on `[−R, R]` per trial, shared across the grid.
///
/// Fails with `Truncation` before any sampling when some weight has more
/// than 1e-4 of its squared mass outside the box.
#[allow(clippy::too_many_arguments)]
pub fn simulate_linear(
    op: &GreenOperator,
    kernel: &ColorationKernel,
    nu: &LevyMeasure,
    times: &[f64],
    xs: &[f64],
    radius: f64,
    trials: usize,
    runner: &TrialRunner,
    family: u64,
) -> Result<FieldEstimate> {
    require_line(op, kernel, "simulation of the linear solution")?;
    require_dalang(kernel)?;
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Domain("times must be nonnegative".into()));
    }
    let bounds = SpatialBox::interval(-radius, radius)?;
    let mut tables = Vec::with_capacity(times.len());
    for &t in times {
        let table = WeightTable::build(op, kernel, t, radius)?;
        for &x in xs {
            let tail = table.tail_fraction(radius, x);
            if tail >= TAIL_MASS_LIMIT {
                return Err(Error::Truncation(format!(
                    "box [-{radius}, {radius}] leaves {tail:e} of the squared weight at t = {t}, x = {x} outside"
                )));
            }
        }
        tables.push(table);
    }
    let nu_mean = nu.mean();
    let compensators: Vec<f64> = tables
        .iter()
        .flat_map(|table| {
            xs.iter().map(move |&x| if nu_mean == 0.0 { 0.0 } else { nu_mean * table.integral(x, -radius, radius) })
        })
        .collect();
    let cells = times.len() * xs.len();
    let per_trial: Vec<Result<Vec<f64>>> = runner.run(family, trials, |rng, _| {
        let sample = sample_prm(&bounds, nu, rng)?;
        let mut out = vec![0.0; cells];
        for (ti, table) in tables.iter().enumerate() {
            for (xi, &x) in xs.iter().enumerate() {
                let mut acc = KahanSum::default();
                for (pos, z) in sample.points() {
                    acc.add(z * table.eval(pos[0] - x));
                }
                let k = ti * xs.len() + xi;
                out[k] = acc.value() - compensators[k];
            }
        }
        Ok(out)
    });
    let mut samples = vec![Vec::with_capacity(trials); cells];
    for row in per_trial {
        for (k, v) in row?.into_iter().enumerate() {
            samples[k].push(v);
        }
    }
    let summaries = samples
        .iter()
        .enumerate()
        .map(|(k, s)| PointSummary::from_samples(times[k / xs.len()], xs[k % xs.len()], s))
        .collect();
    Ok(FieldEstimate {
        times: times.to_vec(),
        points: xs.to_vec(),
        radius,
        trials,
        seed: runner.seed(),
        samples,
        summaries,
    })
}

/// `E v(t,x)² = m₂ ∫ |H_t(ξ)|² μ(dξ)`, any d.
pub fn exact_second_moment(op: &GreenOperator, kernel: &ColorationKernel, m2: f64, t: f64) -> Result<f64> {
    require_pair(op, kernel)?;
    require_dalang(kernel)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let mu = kernel.spectral_measure();
    Ok(m2 * mu.integrate_radial(|r| op.h_transform(t, r).powi(2), RADIAL_TOL)?)
}

/// `E v(t,x)v(t,x′) = m₂ ∫ cos(ξ·(x−x′)) |H_t(ξ)|² μ(dξ)`, any d.
pub fn covariance_linear(op: &GreenOperator, kernel: &ColorationKernel, m2: f64, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    require_pair(op, kernel)?;
    require_dalang(kernel)?;
    if x.len() != op.dim() || y.len() != op.dim() {
        return Err(Error::InvalidParameter("points must have the dimension of the operator".into()));
    }
    let h = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if h == 0.0 {
        return exact_second_moment(op, kernel, m2, t);
    }
    let mu = kernel.spectral_measure();
    let d = op.dim();
    let tol = Tolerance::new(1e-13, 1e-9);
    let value = mu.integrate_radial(
        |r| {
            let angular = sphere_mean_cos(d, r * h).unwrap_or(f64::NAN);
            angular * op.h_transform(t, r).powi(2)
        },
        tol,
    )?;
    Ok(m2 * value)
}

/// `m₂ ∫ min(t²/2, 2/|ξ|²)² μ(dξ)`, an upper bound for the wave second
/// moment from `|H_t(ξ)| <= min(t²/2, 2/|ξ|²)`.
pub fn wave_split_bound(kernel: &ColorationKernel, m2: f64, t: f64) -> Result<f64> {
    require_dalang(kernel)?;
    let mu = kernel.spectral_measure();
    Ok(m2 * mu.integrate_radial(|r| (0.5 * t * t).min(2.0 / (r * r)).powi(2), RADIAL_TOL)?)
}

/// `∫ |H_t(ξ) − H_s(ξ)|² μ(dξ)`, the mean-square increment in time up to m₂.
pub fn h_increment_norm(op: &GreenOperator, kernel: &ColorationKernel, t: f64, s: f64) -> Result<f64> {
    require_pair(op, kernel)?;
    require_dalang(kernel)?;
    let mu = kernel.spectral_measure();
    Ok(mu.integrate_radial(|r| (op.h_transform(t, r) - op.h_transform(s, r)).powi(2), Tolerance::new(1e-300, 1e-10))?)
}

/// Power-law majorant `J_p(s) <= K s^e` on `(0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JpMajorant {
    pub p: f64,
    pub exponent: f64,
    pub constant: f64,
    /// Whether the constant came from exact `J_p` values or from the bound.
    pub exact: bool,
}

const MAJORANT_POINTS: usize = 17;

fn jp_value(op: &GreenOperator, kernel: &ColorationKernel, s: f64, p: f64) -> Result<(f64, bool)> {
    match jp_norm(op, kernel, s, p) {
        Ok(v) => Ok((v, true)),
        Err(Error::Unsupported(_)) | Err(Error::GridTooCoarse { .. }) => Ok((jp_bound(op, kernel, s, p)?.value, false)),
        Err(e) => Err(e),
    }
}

impl JpMajorant {
    /// `K = sup J_p(s)/s^e` over a geometric grid on `[10⁻³·horizon, horizon]`,
    /// with `J_p` exact where available and the unit-constant bound
    /// otherwise. For the heat operator with heat kernel the supremum is the
    /// `s → 0` limit, which is added to the grid.
    pub fn fit(op: &GreenOperator, kernel: &ColorationKernel, p: f64, horizon: f64) -> Result<Self> {
        let exponent = jp_exponent(op, kernel, p)?;
        let mut constant = 0.0f64;
        let mut exact = true;
        for k in 0..MAJORANT_POINTS {
            let s = horizon * 10f64.powf(-3.0 * k as f64 / (MAJORANT_POINTS - 1) as f64);
            let (value, is_exact) = jp_value(op, kernel, s, p)?;
            exact &= is_exact;
            constant = constant.max(value / s.powf(exponent));
        }
        if op.family() == OperatorFamily::Heat && kernel.family() == KernelFamily::Heat {
            let limit = GreenOperator::heat(op.dim()).green_lq_norm(0.5 * kernel.alpha(), p)?;
            constant = constant.max(limit.finite().unwrap_or(f64::INFINITY).powi(2));
        }
        Ok(Self { p, exponent, constant, exact })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.constant * s.powf(self.exponent)
    }

    /// `∫₀ᵗ (K s^e)^{q/2} ds`, finite iff `1 + qe/2 > 0`.
    pub fn time_integral(&self, t: f64, q: f64) -> Result<f64> {
        let k = 1.0 + 0.5 * q * self.exponent;
        if !(k > 0.0) {
            return Err(Error::DivergentIntegral(format!(
                "∫ s^{} ds diverges at 0 for J_{} with exponent {}",
                0.5 * q * self.exponent,
                self.p,
                self.exponent
            )));
        }
        Ok(self.constant.powf(0.5 * q) * t.powf(k) / k)
    }
}

/// A fitted moment envelope, valid for `t <= horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEnvelope {
    pub p: f64,
    pub horizon: f64,
    /// `C_p = B_p (m₂^{1/2} ∨ m_p^{1/p})`.
    pub cp: f64,
    pub j2: JpMajorant,
    pub jp: JpMajorant,
}

impl MomentEnvelope {
    pub fn fit(
        op: &GreenOperator,
        kernel: &ColorationKernel,
        nu: &LevyMeasure,
        p: f64,
        bp: f64,
        horizon: f64,
        range: crate::operators::PRange,
    ) -> Result<Self> {
        require_pair(op, kernel)?;
        if !range.contains(p) {
            return Err(Error::Unsupported(format!(
                "p = {p} is outside the admissible range {} for the {} operator with the {} kernel",
                range.describe(),
                op.family().name(),
                kernel.family().name()
            )));
        }
        if !(horizon > 0.0) {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        let mp = nu.moment(p)?;
        if !mp.is_finite() {
            return Err(Error::Unsupported(format!("m_{p} of the jump measure is infinite")));
        }
        let cp = bp * nu.moment(2.0)?.sqrt().max(mp.powf(1.0 / p));
        Ok(Self {
            p,
            horizon,
            cp,
            j2: JpMajorant::fit(op, kernel, 2.0, horizon)?,
            jp: JpMajorant::fit(op, kernel, p, horizon)?,
        })
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.horizon * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("t = {t} is outside (0, {}]", self.horizon)));
        }
        Ok(())
    }

    /// `C_p ∫₀ᵗ (J₂^{1/2} + J_p^{1/2}) ds` with the majorants in place of J.
    pub fn at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.cp * (self.j2.time_integral(t, 1.0)? + self.jp.time_integral(t, 1.0)?))
    }

    /// `(t^{p−1} C_p^p ∫₀ᵗ (J₂^{p/2} + J_p^{p/2}) ds)^{1/p}`.
    pub fn alt_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let p = self.p;
        let inner = self.j2.time_integral(t, p)? + self.jp.time_integral(t, p)?;
        Ok(self.cp * (t.powf(p - 1.0) * inner).powf(1.0 / p))
    }
}

/// Upper bound on `‖v(t,x)‖_p` from the Rosenthal constant `B_p`.
pub fn p_moment_envelope(
    op: &GreenOperator,
    kernel: &ColorationKernel,
    nu: &LevyMeasure,
    t: f64,
    p: f64,
    bp: f64,
) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    MomentEnvelope::fit(op, kernel, nu, p, bp, t, admissible_p_range(op, kernel))?.at(t)
}

/// The Hölder-in-time alternative to [`p_moment_envelope`], as a p-norm.
pub fn alt_p_moment_envelope(
    op: &GreenOperator,
    kernel: &ColorationKernel,
    nu: &LevyMeasure,
    t: f64,
    p: f64,
    bp: f64,
) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    MomentEnvelope::fit(op, kernel, nu, p, bp, t, alt_admissible_p_range(op, kernel))?.alt_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_is_even_and_decays() {
        let op = GreenOperator::heat(1);
        let k = ColorationKernel::heat(1.0, 1).unwrap();
        let a = weight_eval(&op, &k, 1.0, 0.3, 1.1).unwrap();
        let b = weight_eval(&op, &k, 1.0, 0.3, -0.5).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!(weight_eval(&op, &k, 1.0, 0.0, 30.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn table_matches_pointwise_weight() {
        let op = GreenOperator::wave(1);
        let k = ColorationKernel::bessel(2.0, 1).unwrap();
        let table = WeightTable::build(&op, &k, 1.0, 10.0).unwrap();
        for y in [0.0, 0.37, 1.0, 2.5, 7.0] {
            let direct = weight_eval(&op, &k, 1.0, 0.0, y).unwrap();
            assert!((table.eval(y) - direct).abs() < 1e-6, "y = {y}: {} vs {direct}", table.eval(y));
        }
    }

    #[test]
    fn zero_time_gives_zero_moment() {
        let k = ColorationKernel::heat(1.0, 2).unwrap();
        assert_eq!(exact_second_moment(&GreenOperator::heat(2), &k, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn failing_dalang_is_divergent() {
        let k = ColorationKernel::riesz(0.5, 3).unwrap();
        assert!(matches!(exact_second_moment(&GreenOperator::heat(3), &k, 1.0, 1.0), Err(Error::DivergentIntegral(_))));
    }

    #[test]
    fn majorant_integral() {
        let m = JpMajorant { p: 2.0, exponent: 2.0, constant: 4.0, exact: true };
        // ∫₀² (4 s²)^{1/2} ds = 4
        assert!((m.time_integral(2.0, 1.0).unwrap() - 4.0).abs() < 1e-14);
    }
}
