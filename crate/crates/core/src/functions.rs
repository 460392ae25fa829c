//! Compactly supported test functions on the real line.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// A real function on ℝ vanishing outside `support()`.
pub trait SpatialFunction: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    /// Closed interval outside which the function is zero.
    fn support(&self) -> (f64, f64);

    /// Interior points where the function is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn describe(&self) -> String;
}

/// `∫ h(φ(x)) dx` over `[lo, hi] ∩ support`, split at breakpoints.
pub fn integrate_over<F: SpatialFunction + ?Sized, H: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    h: H,
    tol: Tolerance,
) -> Result<f64> {
    let (a, b) = f.support();
    let (a, b) = (a.max(lo), b.min(hi));
    if a >= b {
        return Ok(0.0);
    }
    let mut cuts = vec![a];
    cuts.extend(f.breakpoints().into_iter().filter(|&c| c > a && c < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(|x| h(f.eval(x)), w[0], w[1], tol)?.value;
    }
    Ok(total)
}

const NORM_TOL: Tolerance = Tolerance::new(1e-14, 1e-12);

pub fn integral<F: SpatialFunction + ?Sized>(f: &F) -> Result<f64> {
    integrate_over(f, f64::NEG_INFINITY, f64::INFINITY, |v| v, NORM_TOL)
}

/// `‖f‖_{L^p}`.
pub fn lp_norm<F: SpatialFunction + ?Sized>(f: &F, p: f64) -> Result<f64> {
    let s = integrate_over(f, f64::NEG_INFINITY, f64::INFINITY, |v| v.abs().powf(p), NORM_TOL)?;
    Ok(s.powf(1.0 / p))
}

/// `∫ f g dx`.
pub fn l2_inner<F: SpatialFunction + ?Sized, G: SpatialFunction + ?Sized>(f: &F, g: &G) -> Result<f64> {
    let (a1, b1) = f.support();
    let (a2, b2) = g.support();
    let (a, b) = (a1.max(a2), b1.min(b2));
    if a >= b {
        return Ok(0.0);
    }
    let mut cuts = vec![a, b];
    cuts.extend(f.breakpoints().into_iter().chain(g.breakpoints()).filter(|&c| c > a && c < b));
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(|x| f.eval(x) * g.eval(x), w[0], w[1], NORM_TOL)?.value;
    }
    Ok(total)
}

/// `height · 1_{[a, b]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indicator {
    pub a: f64,
    pub b: f64,
    pub height: f64,
}

impl Indicator {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b, height: 1.0 }
    }
}

impl SpatialFunction for Indicator {
    fn eval(&self, x: f64) -> f64 {
        if x >= self.a && x <= self.b {
            self.height
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn describe(&self) -> String {
        format!("{}*1[{},{}]", self.height, self.a, self.b)
    }
}

/// Gaussian bump cut off at six standard deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub centre: f64,
    pub width: f64,
    pub height: f64,
}

impl SpatialFunction for GaussianBump {
    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.centre) / self.width;
        if u.abs() > 6.0 {
            0.0
        } else {
            self.height * (-0.5 * u * u).exp()
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.centre - 6.0 * self.width, self.centre + 6.0 * self.width)
    }

    fn describe(&self) -> String {
        format!("gauss(c={},w={},h={})", self.centre, self.width, self.height)
    }
}

/// The C^∞ bump `height · exp(1 − 1/(1 − u²))`, `u = (x − centre)/radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothBump {
    pub centre: f64,
    pub radius: f64,
    pub height: f64,
}

impl SpatialFunction for SmoothBump {
    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.centre) / self.radius;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.height * (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.centre - self.radius, self.centre + self.radius)
    }

    fn describe(&self) -> String {
        format!("bump(c={},r={},h={})", self.centre, self.radius, self.height)
    }
}

/// A smooth bump modulated by `cos(2π · cycles · u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatingBump {
    pub envelope: SmoothBump,
    pub cycles: f64,
}

impl SpatialFunction for OscillatingBump {
    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.envelope.centre) / self.envelope.radius;
        self.envelope.eval(x) * (2.0 * PI * self.cycles * u).cos()
    }

    fn support(&self) -> (f64, f64) {
        self.envelope.support()
    }

    fn describe(&self) -> String {
        format!("osc({},cycles={})", self.envelope.describe(), self.cycles)
    }
}

/// Samples on a uniform grid, linearly interpolated, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(step > 0.0) {
            return Err(Error::InvalidParameter("grid function needs two samples and a positive step".into()));
        }
        Ok(Self { start, step, values })
    }

    /// Samples `f` at `points` nodes spanning `[a, b]`.
    pub fn sample<F: SpatialFunction + ?Sized>(f: &F, a: f64, b: f64, points: usize) -> Result<Self> {
        let n = points.max(2);
        let step = (b - a) / (n - 1) as f64;
        Self::new(a, step, (0..n).map(|j| f.eval(a + j as f64 * step)).collect())
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.start + self.step * j as f64
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && (self.start - other.start).abs() <= 1e-12 * self.step
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }

    /// Every other sample, starting with the first.
    pub fn coarsened(&self) -> Self {
        Self {
            start: self.start,
            step: 2.0 * self.step,
            values: self.values.iter().step_by(2).copied().collect(),
        }
    }
}

impl SpatialFunction for GridFunction {
    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.step;
        if !(u >= 0.0) || u > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let j = (u.floor() as usize).min(self.values.len() - 2);
        let frac = u - j as f64;
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }

    fn support(&self) -> (f64, f64) {
        (self.start, self.end())
    }

    fn breakpoints(&self) -> Vec<f64> {
        (1..self.values.len() - 1).map(|j| self.node(j)).collect()
    }

    fn describe(&self) -> String {
        format!("grid({} samples on [{}, {}])", self.values.len(), self.start, self.end())
    }
}

/// `c · f`.
pub struct Scaled<F> {
    pub inner: F,
    pub factor: f64,
}

impl<F: SpatialFunction> SpatialFunction for Scaled<F> {
    fn eval(&self, x: f64) -> f64 {
        self.factor * self.inner.eval(x)
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }

    fn describe(&self) -> String {
        format!("{}*{}", self.factor, self.inner.describe())
    }
}
