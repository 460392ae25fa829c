//! Coloration kernels κ, the spectral measure μ(dξ) = (2π)^{-d}|Fκ(ξ)|²dξ,
//! the Dalang condition, and the base inner product ⟨·,·⟩₀.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::functions::GridFunction;
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::rng::RandomStream;

/// Default accuracy of radial spectral integrals.
pub const RADIAL_TOL: Tolerance = Tolerance::new(0.0, 1e-11);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Heat,
    Riesz,
    Bessel,
}

impl KernelFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "heat" => Ok(Self::Heat),
            "riesz" => Ok(Self::Riesz),
            "bessel" => Ok(Self::Bessel),
            other => Err(Error::InvalidParameter(format!("unknown kernel family `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Heat => "heat",
            Self::Riesz => "riesz",
            Self::Bessel => "bessel",
        }
    }
}

/// κ = H_{d,α/2}, R_{d,α/2} or B_{d,α/2}, so that |Fκ|² has exponent α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorationKernel {
    family: KernelFamily,
    alpha: f64,
    dim: usize,
}

/// Result of the cutoff-stability test for ∫(1+|ξ|²)^{-1}μ(dξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffVerdict {
    pub converges: bool,
    /// Ratio of the integral over [2R, 4R] to that over [R, 2R] at the
    /// largest cutoff examined.
    pub ratio: f64,
}

impl ColorationKernel {
    pub fn new(family: KernelFamily, alpha: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        if family == KernelFamily::Riesz && alpha >= dim as f64 {
            return Err(Error::InvalidParameter(format!("Riesz kernel needs alpha < d, got alpha = {alpha}, d = {dim}")));
        }
        Ok(Self { family, alpha, dim })
    }

    pub fn heat(alpha: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Heat, alpha, dim)
    }

    pub fn riesz(alpha: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Riesz, alpha, dim)
    }

    pub fn bessel(alpha: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Bessel, alpha, dim)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// κ ∈ L¹(ℝ^d). True for the heat and Bessel families.
    pub fn is_integrable(&self) -> bool {
        self.family != KernelFamily::Riesz
    }

    /// Radial profile g̃ with g(ξ) = g̃(|ξ|).
    pub fn spectral_profile(&self, r: f64) -> Result<f64> {
        match self.family {
            KernelFamily::Heat => Ok((-0.5 * self.alpha * r * r).exp()),
            KernelFamily::Riesz if r == 0.0 => Err(Error::Domain("Riesz spectral density at the origin".into())),
            KernelFamily::Riesz => Ok(r.powf(-self.alpha)),
            KernelFamily::Bessel => Ok((1.0 + r * r).powf(-0.5 * self.alpha)),
        }
    }

    /// `g(ξ) = |Fκ(ξ)|²`.
    pub fn spectral_density(&self, xi: &[f64]) -> Result<f64> {
        self.check_point(xi)?;
        self.spectral_profile(norm(xi))
    }

    /// `Fκ = g^{1/2}`, real and nonnegative for all three families.
    pub fn fourier_amplitude(&self, r: f64) -> Result<f64> {
        match self.family {
            KernelFamily::Heat => Ok((-0.25 * self.alpha * r * r).exp()),
            KernelFamily::Riesz if r == 0.0 => Err(Error::Domain("Riesz amplitude at the origin".into())),
            KernelFamily::Riesz => Ok(r.powf(-0.5 * self.alpha)),
            KernelFamily::Bessel => Ok((1.0 + r * r).powf(-0.25 * self.alpha)),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidParameter(format!("point has dimension {} but kernel has d = {}", x.len(), self.dim)));
        }
        Ok(())
    }

    /// κ(x).
    pub fn kappa_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let d = self.dim as f64;
        let a = 0.5 * self.alpha;
        let r = norm(x);
        match self.family {
            KernelFamily::Heat => Ok((2.0 * PI * a).powf(-0.5 * d) * (-r * r / (2.0 * a)).exp()),
            KernelFamily::Riesz => {
                if r == 0.0 {
                    return Err(Error::Domain("Riesz kernel is singular at the origin".into()));
                }
                Ok(riesz_constant(self.dim, a) * r.powf(-(d - a)))
            }
            KernelFamily::Bessel => bessel_kernel(self.dim, a, r),
        }
    }

    /// `∫(1+|ξ|²)^{-1}μ(dξ) < ∞`, decided symbolically.
    pub fn dalang_check(&self) -> bool {
        let d = self.dim as f64;
        match self.family {
            KernelFamily::Heat => true,
            KernelFamily::Riesz => self.alpha > d - 2.0 && self.alpha < d,
            KernelFamily::Bessel => self.alpha > d - 2.0,
        }
    }

    /// Operational divergence test on dyadic shells beyond |ξ| = 10³.
    ///
    /// Radial shells of a power-law integrand r^γ have contributions in
    /// ratio 2^{γ+1}; the integral converges exactly when that ratio is
    /// below one.
    pub fn cutoff_stability(&self) -> Result<CutoffVerdict> {
        let d = self.dim as f64;
        let f = |r: f64| -> f64 { r.powf(d - 1.0) * self.spectral_profile(r).unwrap_or(0.0) / (1.0 + r * r) };
        let mut shells = Vec::new();
        let mut lo: f64 = 1e3;
        for _ in 0..6 {
            shells.push(integrate(f, lo, 2.0 * lo, Tolerance::rel(1e-10))?.value);
            lo *= 2.0;
        }
        let last = shells[shells.len() - 1];
        let prev = shells[shells.len() - 2];
        if prev <= f64::MIN_POSITIVE {
            return Ok(CutoffVerdict { converges: true, ratio: 0.0 });
        }
        let ratio = last / prev;
        Ok(CutoffVerdict { converges: ratio < 1.0, ratio })
    }

    /// `C_μ = ∫(1+|ξ|²)^{-1}μ(dξ)`.
    pub fn dalang_integral(&self) -> Result<f64> {
        let verdict = self.cutoff_stability()?;
        if !verdict.converges {
            return Err(Error::DivergentIntegral(format!(
                "shell ratio {:.6} >= 1 for {:?} kernel, alpha = {}, d = {}",
                verdict.ratio, self.family, self.alpha, self.dim
            )));
        }
        self.spectral_measure().integrate_radial(|r| 1.0 / (1.0 + r * r), Tolerance::rel(1e-10))
    }

    pub fn spectral_measure(&self) -> SpectralMeasure {
        SpectralMeasure { kernel: *self }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `C_{d,a} = π^{-d/2} 2^{-a} Γ((d−a)/2) / Γ(a/2)`.
pub fn riesz_constant(dim: usize, a: f64) -> f64 {
    let d = dim as f64;
    PI.powf(-0.5 * d) * 2f64.powf(-a) * gamma(0.5 * (d - a)) / gamma(0.5 * a)
}

/// `B_{d,a}(x) = Γ(a/2)^{-1} ∫₀^∞ w^{a/2−1} e^{−w} (4πw)^{−d/2} e^{−|x|²/4w} dw`,
/// integrated in `s = ln w` where the log-integrand is strictly concave.
fn bessel_kernel(dim: usize, a: f64, r: f64) -> Result<f64> {
    let d = dim as f64;
    let c = 0.5 * a - 0.5 * d;
    let q = 0.25 * r * r;
    if q == 0.0 && c <= 0.0 {
        return Err(Error::Domain("Bessel kernel is singular at the origin".into()));
    }
    let log_norm = -0.5 * d * (4.0 * PI).ln() - ln_gamma(0.5 * a);
    let ell = |s: f64| c * s - s.exp() - q * (-s).exp();
    // Peak: e^s solves y² − c y − q = 0.
    let peak = (0.5 * (c + (c * c + 4.0 * q).sqrt())).ln();
    let top = ell(peak);
    let reach = |dir: f64| {
        let mut step = 1.0;
        while ell(peak + dir * step) > top - 60.0 {
            step *= 1.5;
        }
        peak + dir * step
    };
    let (lo, hi) = (reach(-1.0), reach(1.0));
    let est = integrate(|s| (ell(s) - top).exp(), lo, hi, Tolerance::rel(1e-12))?;
    Ok(est.value * (top + log_norm).exp())
}

/// Surface area ω_d = 2π^{d/2}/Γ(d/2) of the unit sphere in ℝ^d.
pub fn sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * PI.powf(0.5 * d) / gamma(0.5 * d)
}

/// Average of `f(⟨u, e⟩)` over unit vectors `u` in ℝ^d.
pub fn sphere_mean<F: FnMut(f64) -> f64>(dim: usize, mut f: F) -> Result<f64> {
    match dim {
        0 => Err(Error::InvalidParameter("dimension must be positive".into())),
        1 => Ok(0.5 * (f(1.0) + f(-1.0))),
        _ => {
            let k = (dim - 2) as i32;
            let weight = PI.sqrt() * gamma(0.5 * (dim as f64 - 1.0)) / gamma(0.5 * dim as f64);
            let est = integrate(|th: f64| f(th.cos()) * th.sin().powi(k), 0.0, PI, Tolerance::new(1e-300, 1e-12))?;
            Ok(est.value / weight)
        }
    }
}

/// Mean of `cos(u ω·e)` over the unit sphere, `Γ(d/2)(2/u)^ν J_ν(u)` with
/// `ν = d/2 − 1`.
///
/// Closed forms in d = 1 and d = 3; otherwise angular quadrature for
/// `u <= 50` and the Hankel expansion of `J_ν` beyond, where its smallest
/// term is far below round-off.
pub fn sphere_mean_cos(dim: usize, u: f64) -> Result<f64> {
    let u = u.abs();
    match dim {
        0 => Err(Error::InvalidParameter("dimension must be positive".into())),
        1 => Ok(u.cos()),
        3 if u < 1e-4 => Ok(1.0 - u * u / 6.0),
        3 => Ok(u.sin() / u),
        _ if u <= 20.0 => sphere_mean(dim, |c| (u * c).cos()),
        _ => {
            let nu = 0.5 * dim as f64 - 1.0;
            Ok(gamma(0.5 * dim as f64) * (2.0 / u).powf(nu) * bessel_j_large(nu, u))
        }
    }
}

/// `J_ν(u)` for large `u` by the Hankel asymptotic expansion, summed until
/// the terms stop decreasing.
fn bessel_j_large(nu: f64, u: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * u);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = u - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * u)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The spectral measure of a coloration kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMeasure {
    kernel: ColorationKernel,
}

impl SpectralMeasure {
    pub fn kernel(&self) -> &ColorationKernel {
        &self.kernel
    }

    /// Density of μ with respect to Lebesgue measure.
    pub fn density(&self, xi: &[f64]) -> Result<f64> {
        Ok(self.kernel.spectral_density(xi)? * (2.0 * PI).powi(-(self.kernel.dim as i32)))
    }

    fn radial_constant(&self) -> f64 {
        (2.0 * PI).powi(-(self.kernel.dim as i32)) * sphere_area(self.kernel.dim)
    }

    /// `∫₀^{upper} r^{d−1} g̃(r) h(r) dr` on `[0, min(1, upper)]`, with the
    /// Riesz singularity removed by `r = u^{1/(d−α)}`.
    fn head<H: FnMut(f64) -> f64>(&self, h: &mut H, upper: f64, tol: Tolerance) -> Result<f64> {
        let d = self.kernel.dim as f64;
        let top = upper.min(1.0);
        let est = match self.kernel.family {
            KernelFamily::Riesz => {
                let e = d - self.kernel.alpha;
                let est = integrate(|u| h(u.powf(1.0 / e)), 0.0, top.powf(e), tol)?;
                crate::quad::Estimate { value: est.value / e, error: est.error / e }
            }
            _ => {
                let k = &self.kernel;
                integrate(|r| r.powf(d - 1.0) * k.spectral_profile(r).unwrap_or(0.0) * h(r), 0.0, top, tol)?
            }
        };
        Ok(est.value)
    }

    fn body(&self, r: f64) -> f64 {
        r.powf(self.kernel.dim as f64 - 1.0) * self.kernel.spectral_profile(r).unwrap_or(0.0)
    }

    /// `∫ h(|ξ|) μ(dξ)`.
    pub fn integrate_radial<H: FnMut(f64) -> f64>(&self, mut h: H, tol: Tolerance) -> Result<f64> {
        let head = self.head(&mut h, 1.0, tol)?;
        let tail_tol = Tolerance::new(tol.abs.max(0.1 * tol.rel * head.abs()), tol.rel);
        let tail = integrate_to_infinity(|r| self.body(r) * h(r), 1.0, 1.0, tail_tol)?;
        Ok(self.radial_constant() * (head + tail.value))
    }

    /// `∫_{|ξ| ≤ upper} h(|ξ|) μ(dξ)`.
    pub fn integrate_radial_upto<H: FnMut(f64) -> f64>(&self, mut h: H, upper: f64, tol: Tolerance) -> Result<f64> {
        let head = self.head(&mut h, upper, tol)?;
        let mut tail = 0.0;
        if upper > 1.0 {
            let tail_tol = Tolerance::new(tol.abs.max(0.1 * tol.rel * head.abs()), tol.rel);
            tail = integrate(|r| self.body(r) * h(r), 1.0, upper, tail_tol)?.value;
        }
        Ok(self.radial_constant() * (head + tail))
    }

    /// μ(ℝ^d) when finite.
    pub fn total_mass(&self) -> Option<f64> {
        let k = &self.kernel;
        let d = k.dim as f64;
        let scale = (2.0 * PI).powf(-d);
        match k.family {
            KernelFamily::Heat => Some(scale * (2.0 * PI / k.alpha).powf(0.5 * d)),
            KernelFamily::Bessel if k.alpha > d => {
                Some(scale * PI.powf(0.5 * d) * gamma(0.5 * (k.alpha - d)) / gamma(0.5 * k.alpha))
            }
            _ => None,
        }
    }

    /// Draws ξ from μ/μ(ℝ^d) into `out`.
    ///
    /// Heat: ξ ~ N(0, I/α). Bessel with α > d: the density ∝ (1+|ξ|²)^{-α/2}
    /// is a multivariate t law with ν = α − d degrees of freedom, so ξ = Z/√W
    /// with W ~ χ²_ν.
    pub fn sample_normalized(&self, rng: &mut RandomStream, out: &mut [f64]) -> Result<()> {
        let k = &self.kernel;
        if out.len() != k.dim {
            return Err(Error::InvalidParameter("output buffer dimension mismatch".into()));
        }
        match k.family {
            KernelFamily::Heat => {
                let s = k.alpha.sqrt().recip();
                for v in out.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *v = s * z;
                }
                Ok(())
            }
            KernelFamily::Bessel if k.alpha > k.dim as f64 => {
                let chi = ChiSquared::new(k.alpha - k.dim as f64)
                    .map_err(|e| Error::InvalidParameter(format!("chi-squared law: {e}")))?;
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
                let w: f64 = chi.sample(rng);
                let s = w.sqrt().recip();
                out.iter_mut().for_each(|v| *v *= s);
                Ok(())
            }
            _ => Err(Error::Unsupported(format!(
                "spectral measure of the {:?} kernel with alpha = {} has infinite mass",
                k.family, k.alpha
            ))),
        }
    }
}

/// Discrete Fourier transform `Δx Σ_j c_j f_j e^{-iξx_j}` of grid samples,
/// with trapezoid end weights `c_0 = c_{n−1} = ½`.
fn grid_transform(f: &GridFunction, xi: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, -xi * f.step);
    let mut phase = Complex64::from_polar(1.0, -xi * f.start);
    let mut acc = Complex64::new(0.0, 0.0);
    let last = f.values.len() - 1;
    for (j, &v) in f.values.iter().enumerate() {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        acc += phase * (w * v);
        phase *= step;
    }
    acc * f.step
}

fn inner0_at_resolution(phi: &GridFunction, psi: &GridFunction, kernel: &ColorationKernel) -> Result<f64> {
    let nyquist = PI / phi.step;
    let mu = kernel.spectral_measure();
    let tol = Tolerance::new(1e-300, 1e-9);
    // In d = 1 the radial form covers ξ and −ξ; Re(Fφ conj Fψ) is even.
    mu.integrate_radial_upto(
        |r| {
            let a = grid_transform(phi, r);
            let b = grid_transform(psi, r);
            (a * b.conj()).re
        },
        nyquist,
        tol,
    )
}

/// `⟨φ, ψ⟩₀ = (2π)^{-1}∫ Fφ(ξ) conj(Fψ(ξ)) g(ξ) dξ` for grid samples on the
/// real line, integrated up to the grid Nyquist frequency.
///
/// Fails with `GridTooCoarse` when the value on every other sample differs
/// by more than 1e-4 relative to `√(⟨φ,φ⟩₀⟨ψ,ψ⟩₀)`.
pub fn inner0(phi: &GridFunction, psi: &GridFunction, kernel: &ColorationKernel) -> Result<f64> {
    if kernel.dim != 1 {
        return Err(Error::Unsupported("inner0 is implemented for d = 1".into()));
    }
    if !phi.same_grid(psi) {
        return Err(Error::InvalidParameter("inner0 needs both functions on one grid".into()));
    }
    if phi.values.iter().all(|&v| v == 0.0) || psi.values.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let fine = inner0_at_resolution(phi, psi, kernel)?;
    let (pc, qc) = (phi.coarsened(), psi.coarsened());
    let coarse = inner0_at_resolution(&pc, &qc, kernel)?;
    let scale = if phi == psi {
        fine.abs()
    } else {
        let a = inner0_at_resolution(phi, phi, kernel)?;
        let b = inner0_at_resolution(psi, psi, kernel)?;
        (a * b).sqrt().max(fine.abs())
    };
    let change = (fine - coarse).abs() / scale.max(f64::MIN_POSITIVE);
    if change > 1e-4 {
        return Err(Error::GridTooCoarse { relative_change: change });
    }
    Ok(fine)
}
