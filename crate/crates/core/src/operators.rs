//! Fundamental solutions of the heat operator ∂_t − ½Δ and the wave operator
//! ∂²_t − Δ: Fourier symbols, time integrals, spatial norms, and J_p(t).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::inverse_even_transform;
use crate::kernels::{norm, ColorationKernel, KernelFamily, RADIAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorFamily {
    Heat,
    Wave,
}

impl OperatorFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "heat" => Ok(Self::Heat),
            "wave" => Ok(Self::Wave),
            other => Err(Error::InvalidParameter(format!("unknown operator `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Heat => "heat",
            Self::Wave => "wave",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOperator {
    family: OperatorFamily,
    dim: usize,
}

/// An L^q norm that may legitimately be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormValue {
    Finite(f64),
    Infinite,
}

impl NormValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

impl GreenOperator {
    pub fn new(family: OperatorFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { family, dim })
    }

    pub fn heat(dim: usize) -> Self {
        Self { family: OperatorFamily::Heat, dim: dim.max(1) }
    }

    pub fn wave(dim: usize) -> Self {
        Self { family: OperatorFamily::Wave, dim: dim.max(1) }
    }

    pub fn family(&self) -> OperatorFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `FG_t(ξ)` as a function of `r = |ξ|`.
    pub fn fourier_g(&self, t: f64, r: f64) -> f64 {
        match self.family {
            OperatorFamily::Heat => (-0.5 * t * r * r).exp(),
            OperatorFamily::Wave => {
                let x = t * r;
                if x.abs() < 1e-4 {
                    t * (1.0 - x * x / 6.0)
                } else {
                    x.sin() / r
                }
            }
        }
    }

    pub fn fourier_g_at(&self, t: f64, xi: &[f64]) -> f64 {
        self.fourier_g(t, norm(xi))
    }

    /// `H_t(ξ) = ∫₀ᵗ FG_{t−s}(ξ) ds` as a function of `r = |ξ|`.
    pub fn h_transform(&self, t: f64, r: f64) -> f64 {
        if r == 0.0 {
            return match self.family {
                OperatorFamily::Heat => t,
                OperatorFamily::Wave => 0.5 * t * t,
            };
        }
        let r2 = r * r;
        match self.family {
            OperatorFamily::Heat => -2.0 * (-0.5 * t * r2).exp_m1() / r2,
            OperatorFamily::Wave => {
                let s = (0.5 * t * r).sin();
                2.0 * s * s / r2
            }
        }
    }

    /// `∫₀ᵀ |FG_t(ξ)|² dt` as a function of `r = |ξ|`.
    pub fn symbol_energy(&self, horizon: f64, r: f64) -> f64 {
        let r2 = r * r;
        match self.family {
            OperatorFamily::Heat if r == 0.0 => horizon,
            OperatorFamily::Heat => -(-horizon * r2).exp_m1() / r2,
            OperatorFamily::Wave => {
                let x = 2.0 * horizon * r;
                if x.abs() < 1e-3 {
                    // T³/3 − T⁵r²/15 + ...
                    horizon.powi(3) / 3.0 * (1.0 - x * x / 20.0)
                } else {
                    (0.5 * horizon - x.sin() / (4.0 * r)) / r2
                }
            }
        }
    }

    /// `G_t(x)` where it is a function.
    pub fn green_eval(&self, t: f64, x: &[f64]) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("G_t needs t > 0, got {t}")));
        }
        if x.len() != self.dim {
            return Err(Error::InvalidParameter("point dimension mismatch".into()));
        }
        let r = norm(x);
        let d = self.dim as f64;
        match (self.family, self.dim) {
            (OperatorFamily::Heat, _) => Ok((2.0 * PI * t).powf(-0.5 * d) * (-r * r / (2.0 * t)).exp()),
            (OperatorFamily::Wave, 1) => Ok(if r < t { 0.5 } else { 0.0 }),
            (OperatorFamily::Wave, 2) => Ok(if r < t {
                1.0 / (2.0 * PI * ((t - r) * (t + r)).sqrt())
            } else if r == t {
                f64::INFINITY
            } else {
                0.0
            }),
            (OperatorFamily::Wave, _) => Err(Error::Unsupported("the wave fundamental solution is not a function for d >= 3".into())),
        }
    }

    /// `‖G_t‖_{L^q(ℝ^d)}`.
    pub fn green_lq_norm(&self, t: f64, q: f64) -> Result<NormValue> {
        if !(t > 0.0 && q > 0.0) {
            return Err(Error::Domain(format!("norm needs t > 0 and q > 0, got t = {t}, q = {q}")));
        }
        let d = self.dim as f64;
        match (self.family, self.dim) {
            (OperatorFamily::Heat, _) => {
                // ∫ G_t^q = (2πt)^{d(1−q)/2} q^{−d/2}
                let integral = (2.0 * PI * t).powf(0.5 * d * (1.0 - q)) * q.powf(-0.5 * d);
                Ok(NormValue::Finite(integral.powf(1.0 / q)))
            }
            (OperatorFamily::Wave, 1) => Ok(NormValue::Finite((2f64.powf(1.0 - q) * t).powf(1.0 / q))),
            (OperatorFamily::Wave, 2) if q < 2.0 => {
                let integral = (2.0 * PI).powf(1.0 - q) * t.powf(2.0 - q) / (2.0 - q);
                Ok(NormValue::Finite(integral.powf(1.0 / q)))
            }
            (OperatorFamily::Wave, 2) => Ok(NormValue::Infinite),
            (OperatorFamily::Wave, _) => Err(Error::Unsupported("L^q norms of the wave fundamental solution for d >= 3".into())),
        }
    }
}

fn check_pair(op: &GreenOperator, kernel: &ColorationKernel) -> Result<()> {
    if op.dim != kernel.dim() {
        return Err(Error::InvalidParameter(format!(
            "operator dimension {} differs from kernel dimension {}",
            op.dim,
            kernel.dim()
        )));
    }
    Ok(())
}

/// `J_p(t) = ‖G_t * κ‖²_{L^p}`.
///
/// Heat operator with heat kernel: `G_t * κ = H_{d, t+α/2}` in closed form,
/// any d. Otherwise d = 1 only, by FFT of `FG_t · Fκ` on a grid refined until
/// successive halvings of the step agree.
pub fn jp_norm(op: &GreenOperator, kernel: &ColorationKernel, t: f64, p: f64) -> Result<f64> {
    check_pair(op, kernel)?;
    if !(t > 0.0 && p >= 1.0) {
        return Err(Error::Domain(format!("J_p(t) needs t > 0 and p >= 1, got t = {t}, p = {p}")));
    }
    if op.family == OperatorFamily::Heat && kernel.family() == KernelFamily::Heat {
        let sigma = t + 0.5 * kernel.alpha();
        let n = GreenOperator::heat(op.dim).green_lq_norm(sigma, p)?;
        return Ok(n.finite().expect("heat norms are finite").powi(2));
    }
    if op.dim != 1 {
        return Err(Error::Unsupported("grid route for J_p is implemented for d = 1".into()));
    }
    if kernel.family() == KernelFamily::Riesz {
        return Err(Error::Unsupported("J_p on a grid for the Riesz kernel (heavy spatial tails)".into()));
    }
    jp_norm_grid(op, kernel, t, p)
}

const JP_MAX_POINTS: usize = 1 << 22;

fn jp_norm_grid(op: &GreenOperator, kernel: &ColorationKernel, t: f64, p: f64) -> Result<f64> {
    let a = kernel.alpha();
    let (reach_g, scale_g) = match op.family {
        OperatorFamily::Heat => (12.0 * t.sqrt(), t.sqrt()),
        OperatorFamily::Wave => (t, 0.0),
    };
    let (reach_k, scale_k) = match kernel.family() {
        KernelFamily::Heat => (12.0 * (0.5 * a).sqrt(), (0.5 * a).sqrt()),
        _ => (45.0, 0.05),
    };
    let period = 2.5 * (reach_g + reach_k);
    // G_t * κ is as smooth as the smoother factor for the heat operator and
    // a window average of κ for the wave operator; halving below verifies.
    let scale = match op.family {
        OperatorFamily::Heat => scale_g.max(scale_k),
        OperatorFamily::Wave => scale_k,
    };
    let step0 = scale / 16.0;
    let mut n = ((period / step0).ceil() as usize).next_power_of_two().max(1024);

    let spectrum = |r: f64| op.fourier_g(t, r) * kernel.fourier_amplitude(r).unwrap_or(0.0);
    let mut previous: Option<f64> = None;
    let mut change = f64::INFINITY;
    loop {
        let step = period / n as f64;
        let u = inverse_even_transform(spectrum, n, step);
        let integral: f64 = crate::stats::kahan_sum(u.iter().map(|v| v.abs().powf(p))) * step;
        let value = integral.powf(2.0 / p);
        if let Some(prev) = previous {
            change = (value - prev).abs() / value.abs().max(f64::MIN_POSITIVE);
            if change <= 1e-8 {
                return Ok(value);
            }
        }
        previous = Some(value);
        if n >= JP_MAX_POINTS {
            break;
        }
        n *= 2;
    }
    if change > 1e-3 {
        return Err(Error::GridTooCoarse { relative_change: change });
    }
    Ok(previous.expect("at least one grid evaluated"))
}

/// Which bound on J_p applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JpBoundCase {
    /// Heat kernel: `∫ |FG_t(ξ)|² e^{−α|ξ|²/2} dξ`.
    Spectral,
    /// Riesz kernel: `‖G_t‖²_q`, `1/q = 1/p + α/2d`.
    Riesz,
    /// Integrable kernel: `‖G_t‖²_p`.
    Integrable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JpBound {
    pub case: JpBoundCase,
    /// Bound with unit constant.
    pub value: f64,
    /// Lebesgue exponent of the Green-function norm, when one is used.
    pub q: Option<f64>,
}

/// Upper bound for J_p(t) up to a constant, by kernel family.
pub fn jp_bound(op: &GreenOperator, kernel: &ColorationKernel, t: f64, p: f64) -> Result<JpBound> {
    check_pair(op, kernel)?;
    if !(t > 0.0 && p > 0.0) {
        return Err(Error::Domain(format!("bound needs t > 0 and p > 0, got t = {t}, p = {p}")));
    }
    let d = op.dim as f64;
    match kernel.family() {
        KernelFamily::Heat => {
            let mu = kernel.spectral_measure();
            let value = mu.integrate_radial(|r| op.fourier_g(t, r).powi(2), RADIAL_TOL)? * (2.0 * PI).powf(d);
            Ok(JpBound { case: JpBoundCase::Spectral, value, q: None })
        }
        KernelFamily::Riesz => {
            let a = kernel.alpha();
            if !(p > 2.0 * d / (2.0 * d - a)) {
                return Err(Error::Unsupported(format!("Riesz bound needs p > 2d/(2d − α) = {}", 2.0 * d / (2.0 * d - a))));
            }
            let q = 1.0 / (1.0 / p + a / (2.0 * d));
            match op.green_lq_norm(t, q)? {
                NormValue::Finite(v) => Ok(JpBound { case: JpBoundCase::Riesz, value: v * v, q: Some(q) }),
                NormValue::Infinite => Err(Error::Unsupported(format!("‖G_t‖_q is infinite at q = {q}"))),
            }
        }
        KernelFamily::Bessel => match op.green_lq_norm(t, p)? {
            NormValue::Finite(v) => Ok(JpBound { case: JpBoundCase::Integrable, value: v * v, q: Some(p) }),
            NormValue::Infinite => Err(Error::Unsupported(format!("‖G_t‖_p is infinite at p = {p}"))),
        },
    }
}

/// A set of moment orders `p >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PRange {
    /// Every `p >= 2` with `m_p < ∞`.
    AllFromTwo,
    /// `2 <= p < upper`.
    Below(f64),
    Empty,
    /// The moment analysis does not cover this operator and kernel.
    NotCovered,
}

impl PRange {
    pub fn contains(&self, p: f64) -> bool {
        match *self {
            Self::AllFromTwo => p >= 2.0,
            Self::Below(upper) => p >= 2.0 && p < upper,
            Self::Empty | Self::NotCovered => false,
        }
    }

    fn below(upper: f64) -> Self {
        if upper > 2.0 {
            Self::Below(upper)
        } else {
            Self::Empty
        }
    }

    /// Set inclusion; `NotCovered` only contains itself.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Self::NotCovered, o) => o == Self::NotCovered,
            (_, Self::NotCovered) => false,
            (Self::Empty, _) => true,
            (_, Self::AllFromTwo) => true,
            (Self::AllFromTwo, _) => false,
            (Self::Below(a), Self::Below(b)) => a <= b,
            (Self::Below(_), Self::Empty) => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::AllFromTwo => "[2, inf)".into(),
            Self::Below(u) => format!("[2, {u})"),
            Self::Empty => "empty".into(),
            Self::NotCovered => "not covered".into(),
        }
    }
}

/// Orders `p` for which the time integral of `J₂^{1/2} + J_p^{1/2}` is
/// finite, so that the moment envelope of the linear solution applies.
pub fn admissible_p_range(op: &GreenOperator, kernel: &ColorationKernel) -> PRange {
    if !kernel.dalang_check() {
        return PRange::Empty;
    }
    let d = op.dim as f64;
    let a = kernel.alpha();
    match (op.family, kernel.family()) {
        (_, KernelFamily::Heat) => PRange::AllFromTwo,
        (OperatorFamily::Heat, KernelFamily::Riesz) => {
            if a >= 2.0 * d - 4.0 {
                PRange::AllFromTwo
            } else {
                PRange::below(2.0 * d / (2.0 * d - a - 4.0))
            }
        }
        (OperatorFamily::Heat, KernelFamily::Bessel) => match op.dim {
            1 | 2 => PRange::AllFromTwo,
            _ => PRange::below(d / (d - 2.0)),
        },
        (OperatorFamily::Wave, KernelFamily::Riesz) => match op.dim {
            1 => PRange::AllFromTwo,
            2 => PRange::below(4.0 / (2.0 - a)),
            _ => PRange::NotCovered,
        },
        (OperatorFamily::Wave, KernelFamily::Bessel) => match op.dim {
            1 => PRange::AllFromTwo,
            _ => PRange::NotCovered,
        },
    }
}

/// Orders `p` for which the Hölder-in-time bound
/// `t^{p−1} C_p^p ∫₀ᵗ (J₂^{p/2} + J_p^{p/2}) ds` is finite.
pub fn alt_admissible_p_range(op: &GreenOperator, kernel: &ColorationKernel) -> PRange {
    if !kernel.dalang_check() {
        return PRange::Empty;
    }
    let d = op.dim as f64;
    let a = kernel.alpha();
    match (op.family, kernel.family()) {
        (_, KernelFamily::Heat) => PRange::AllFromTwo,
        // (dp/2)(1/p + α/2d − 1) + 1 > 0; the J₂ term needs p < 4/(d − α),
        // which is implied when α > d − 2.
        (OperatorFamily::Heat, KernelFamily::Riesz) => PRange::below((2.0 * d + 4.0) / (2.0 * d - a)),
        (OperatorFamily::Heat, KernelFamily::Bessel) => PRange::below(1.0 + 2.0 / d),
        (OperatorFamily::Wave, _) => admissible_p_range(op, kernel),
    }
}

/// Exponent `e` of the small-time power law `J_p(t) <= C t^e` behind the
/// moment envelope.
pub fn jp_exponent(op: &GreenOperator, kernel: &ColorationKernel, p: f64) -> Result<f64> {
    let d = op.dim as f64;
    let a = kernel.alpha();
    match (op.family, kernel.family(), op.dim) {
        (OperatorFamily::Heat, KernelFamily::Heat, _) => Ok(0.0),
        (OperatorFamily::Heat, KernelFamily::Riesz, _) => Ok(d * (1.0 / p + a / (2.0 * d) - 1.0)),
        (OperatorFamily::Heat, KernelFamily::Bessel, _) => Ok(d * (1.0 / p - 1.0)),
        (OperatorFamily::Wave, KernelFamily::Heat, _) => Ok(2.0),
        (OperatorFamily::Wave, KernelFamily::Riesz, 1) => Ok(2.0 / p + a),
        (OperatorFamily::Wave, KernelFamily::Riesz, 2) => Ok(4.0 / p + a - 2.0),
        (OperatorFamily::Wave, KernelFamily::Bessel, 1) => Ok(2.0 / p),
        _ => Err(Error::Unsupported(format!(
            "no J_p power law for the {} operator with the {} kernel in d = {}",
            op.family.name(),
            kernel.family().name(),
            op.dim
        ))),
    }
}
