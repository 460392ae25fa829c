//! Compound-Poisson sampling of the Poisson random measure N on a box and the
//! compensated integrals `L(φ) = Σ φ(x_i) z_i − (∫z ν(dz)) ∫φ`.

use num_complex::Complex64;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::functions::{integrate_over, lp_norm, GaussianBump, Indicator, OscillatingBump, SmoothBump, SpatialFunction};
use crate::measure::LevyMeasure;
use crate::quad::Tolerance;
use crate::rng::{RandomStream, TrialRunner};
use crate::stats::{p_norm, NormEstimate};

/// Axis-aligned box `∏ [lo_k, hi_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SpatialBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
            return Err(Error::InvalidParameter("box needs matching corners with lo < hi".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    /// `[−half, half]^d`.
    pub fn cube(half: f64, dim: usize) -> Result<Self> {
        Self::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }
}

/// One realization of N restricted to `B × ℝ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrmSample {
    bounds: SpatialBox,
    /// Row-major `count × d` coordinates.
    positions: Vec<f64>,
    jumps: Vec<f64>,
    pub intensity_mass: f64,
    pub nu_mean: f64,
}

impl PrmSample {
    pub fn bounds(&self) -> &SpatialBox {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn position(&self, i: usize) -> &[f64] {
        let d = self.bounds.dim();
        &self.positions[i * d..(i + 1) * d]
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn points(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        let d = self.bounds.dim();
        self.positions.chunks_exact(d).zip(self.jumps.iter().copied())
    }
}

/// Λ ~ Poisson(|B|ν(ℝ₀)) atoms with iid uniform positions on B and iid
/// jumps from ν/ν(ℝ₀).
pub fn sample_prm(bounds: &SpatialBox, nu: &LevyMeasure, rng: &mut RandomStream) -> Result<PrmSample> {
    let intensity_mass = bounds.volume() * nu.total_mass();
    let count = if intensity_mass > 0.0 {
        let law = Poisson::new(intensity_mass)
            .map_err(|e| Error::InvalidParameter(format!("Poisson intensity {intensity_mass}: {e}")))?;
        law.sample(rng) as usize
    } else {
        0
    };
    let d = bounds.dim();
    let mut positions = Vec::with_capacity(count * d);
    let mut jumps = Vec::with_capacity(count);
    for _ in 0..count {
        for k in 0..d {
            positions.push(bounds.lo[k] + (bounds.hi[k] - bounds.lo[k]) * rng.uniform());
        }
        jumps.push(nu.sample_jump(rng));
    }
    Ok(PrmSample { bounds: bounds.clone(), positions, jumps, intensity_mass, nu_mean: nu.mean() })
}

const SUPPORT_TOL: f64 = 1e-9;
const FUNCTIONAL_TOL: Tolerance = Tolerance::new(1e-14, 1e-12);

/// Evaluates `L(φ)` on many samples with the compensator computed once.
pub struct LIntegral<'a> {
    phi: &'a dyn SpatialFunction,
    compensator: f64,
}

impl<'a> LIntegral<'a> {
    /// Fails with `Support` when `∫_{ℝ∖B}|φ| > 1e-9`.
    pub fn new(phi: &'a dyn SpatialFunction, bounds: &SpatialBox, nu_mean: f64) -> Result<Self> {
        if bounds.dim() != 1 {
            return Err(Error::Unsupported("test functions are defined on the real line".into()));
        }
        let (a, b) = (bounds.lo[0], bounds.hi[0]);
        let left = integrate_over(phi, f64::NEG_INFINITY, a, f64::abs, FUNCTIONAL_TOL)?;
        let right = integrate_over(phi, b, f64::INFINITY, f64::abs, FUNCTIONAL_TOL)?;
        if left + right > SUPPORT_TOL {
            return Err(Error::Support(format!(
                "{} has mass {:e} outside [{a}, {b}]",
                phi.describe(),
                left + right
            )));
        }
        let compensator = if nu_mean == 0.0 {
            0.0
        } else {
            nu_mean * integrate_over(phi, a, b, |v| v, FUNCTIONAL_TOL)?
        };
        Ok(Self { phi, compensator })
    }

    pub fn compensator(&self) -> f64 {
        self.compensator
    }

    pub fn eval(&self, sample: &PrmSample) -> f64 {
        let mut acc = crate::stats::KahanSum::default();
        for (x, z) in sample.points() {
            acc.add(self.phi.eval(x[0]) * z);
        }
        acc.value() - self.compensator
    }
}

/// `L(φ)` for one sample.
pub fn l_integral(phi: &dyn SpatialFunction, sample: &PrmSample) -> Result<f64> {
    Ok(LIntegral::new(phi, &sample.bounds, sample.nu_mean)?.eval(sample))
}

/// Smallest interval containing the support of `φ`.
pub fn support_box(phi: &dyn SpatialFunction) -> Result<SpatialBox> {
    let (a, b) = phi.support();
    SpatialBox::interval(a, b)
}

/// `trials` independent draws of `L(φ)` on the support box of `φ`.
pub fn sample_l_integrals(
    phi: &dyn SpatialFunction,
    nu: &LevyMeasure,
    trials: usize,
    runner: &TrialRunner,
    family: u64,
) -> Result<Vec<f64>> {
    let bounds = support_box(phi)?;
    let integral = LIntegral::new(phi, &bounds, nu.mean())?;
    runner
        .run(family, trials, |rng, _| sample_prm(&bounds, nu, rng).map(|s| integral.eval(&s)))
        .into_iter()
        .collect()
}

/// `E e^{iθL(φ)} = exp ∫ Ψ(θφ(x)) dx` with `Ψ` the Lévy exponent of ν.
pub fn char_function(phi: &dyn SpatialFunction, nu: &LevyMeasure, theta: f64) -> Result<Complex64> {
    if theta == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let all = (f64::NEG_INFINITY, f64::INFINITY);
    let tol = Tolerance::new(1e-13, 1e-12);
    let psi = |v: f64| nu.levy_exponent(theta * v).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let re = integrate_over(phi, all.0, all.1, |v| if v == 0.0 { 0.0 } else { psi(v).re }, tol)?;
    let im = integrate_over(phi, all.0, all.1, |v| if v == 0.0 { 0.0 } else { psi(v).im }, tol)?;
    Ok(Complex64::new(re, im).exp())
}

/// Monte Carlo Rosenthal ratio `‖L(φ)‖_p / (m₂^{1/2}‖φ‖₂ + m_p^{1/p}‖φ‖_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RosenthalRatio {
    pub function: String,
    pub p: f64,
    pub norm: NormEstimate,
    pub denominator: f64,
    pub ratio: f64,
    pub ratio_se: f64,
}

pub fn rosenthal_ratio(
    phi: &dyn SpatialFunction,
    nu: &LevyMeasure,
    p: f64,
    trials: usize,
    runner: &TrialRunner,
    family: u64,
) -> Result<RosenthalRatio> {
    if !(p >= 2.0) {
        return Err(Error::InvalidParameter(format!("Rosenthal ratio needs p >= 2, got {p}")));
    }
    let samples = sample_l_integrals(phi, nu, trials, runner, family)?;
    let norm = p_norm(&samples, p);
    let denominator = nu.moment(2.0)?.sqrt() * lp_norm(phi, 2.0)? + nu.moment(p)?.powf(1.0 / p) * lp_norm(phi, p)?;
    Ok(RosenthalRatio {
        function: phi.describe(),
        p,
        norm,
        denominator,
        ratio: norm.norm / denominator,
        ratio_se: norm.norm_se / denominator,
    })
}

/// The test family over which the empirical Rosenthal constant is taken:
/// indicators of lengths 1/4 to 64, and Gaussian, smooth, and oscillating
/// bumps at widths 1/4, 1 and 4.
pub fn rosenthal_family() -> Vec<Box<dyn SpatialFunction>> {
    let mut family: Vec<Box<dyn SpatialFunction>> = Vec::new();
    for len in [0.25, 1.0, 4.0, 16.0, 64.0] {
        family.push(Box::new(Indicator::new(0.0, len)));
    }
    for scale in [0.25, 1.0, 4.0] {
        family.push(Box::new(GaussianBump { centre: 0.0, width: scale, height: 1.0 }));
        let bump = SmoothBump { centre: 0.0, radius: 2.0 * scale, height: 1.0 };
        family.push(Box::new(bump));
        family.push(Box::new(OscillatingBump { envelope: bump, cycles: 2.0 }));
    }
    family
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_geometry() {
        let b = SpatialBox::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.volume(), 4.0);
        assert!(b.contains(&[1.0, 0.0]));
        assert!(!b.contains(&[3.0, 0.0]));
        assert!(SpatialBox::interval(1.0, 1.0).is_err());
    }

    #[test]
    fn samples_lie_in_box_with_nonzero_jumps() {
        let b = SpatialBox::cube(2.0, 2).unwrap();
        let nu = LevyMeasure::atoms(&[(-0.5, 1.0), (2.0, 3.0)]).unwrap();
        let mut rng = RandomStream::new(1, 0, 0);
        for _ in 0..100 {
            let s = sample_prm(&b, &nu, &mut rng).unwrap();
            for (x, z) in s.points() {
                assert!(b.contains(x));
                assert!(z != 0.0);
            }
        }
    }

    #[test]
    fn support_violation_is_reported() {
        let phi = Indicator::new(0.0, 2.0);
        let sample = sample_prm(&SpatialBox::interval(0.0, 1.0).unwrap(), &LevyMeasure::symmetric_unit(), &mut RandomStream::new(0, 0, 0)).unwrap();
        assert!(matches!(l_integral(&phi, &sample), Err(Error::Support(_))));
    }

    #[test]
    fn centered_measure_has_zero_compensator() {
        let phi = Indicator::new(0.0, 1.0);
        let b = SpatialBox::interval(0.0, 1.0).unwrap();
        assert_eq!(LIntegral::new(&phi, &b, 0.0).unwrap().compensator(), 0.0);
    }

    #[test]
    fn char_function_of_indicator() {
        let nu = LevyMeasure::atoms(&[(-1.0, 0.3), (2.0, 0.7)]).unwrap();
        let phi = Indicator::new(0.0, 2.5);
        for theta in [0.0, 0.5, 1.0, 2.0] {
            let got = char_function(&phi, &nu, theta).unwrap();
            let want = (nu.levy_exponent(theta).unwrap() * 2.5).exp();
            assert!((got - want).norm() < 1e-12, "theta = {theta}");
        }
    }
}
