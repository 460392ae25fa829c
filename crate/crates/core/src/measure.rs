//! The Lévy jump measure ν: moments, sampling, and the Lévy exponent.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::rng::RandomStream;

const DENSITY_TOL: Tolerance = Tolerance::new(1e-12, 1e-12);

/// Jump densities supported by the truncated variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JumpDensity {
    /// Symmetric `|z|^{-1-beta}`, on `eps <= |z| <= max`.
    Power { beta: f64 },
    /// One-sided `e^{-rate z} / z`, on `eps <= z <= max`.
    Gamma { rate: f64 },
}

impl JumpDensity {
    /// Parses `power:<beta>` or `gamma:<rate>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("density `{spec}` is not of the form name:value")))?;
        let value: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("density parameter `{arg}` is not a number")))?;
        match name.trim() {
            "power" if value.is_finite() => Ok(Self::Power { beta: value }),
            "gamma" if value.is_finite() && value >= 0.0 => Ok(Self::Gamma { rate: value }),
            _ => Err(Error::InvalidParameter(format!("unknown or invalid density `{spec}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Power { beta } => format!("power:{beta}"),
            Self::Gamma { rate } => format!("gamma:{rate}"),
        }
    }

    /// Density at `z > 0`; both signs share it for the symmetric family.
    fn radial(&self, z: f64) -> f64 {
        match *self {
            Self::Power { beta } => z.powf(-1.0 - beta),
            Self::Gamma { rate } => (-rate * z).exp() / z,
        }
    }

    fn symmetric(&self) -> bool {
        matches!(self, Self::Power { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Atoms { z: Vec<f64>, w: Vec<f64>, cumulative: Vec<f64> },
    Density { density: JumpDensity, eps: f64, max: f64 },
}

/// A jump measure with finite total mass and finite second moment.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasure {
    repr: Repr,
    total_mass: f64,
    mean: f64,
}

impl LevyMeasure {
    /// Discrete measure `Σ w_k δ_{z_k}`.
    pub fn atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("jump measure needs at least one atom".into()));
        }
        for &(z, w) in atoms {
            if z == 0.0 || !z.is_finite() {
                return Err(Error::InvalidParameter(format!("atom location {z} must be finite and non-zero")));
            }
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("atom weight {w} must be finite and positive")));
            }
        }
        let z: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        let w: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        let mut cumulative = Vec::with_capacity(w.len());
        let mut acc = 0.0;
        for &wk in &w {
            acc += wk;
            cumulative.push(acc);
        }
        let total_mass = crate::stats::kahan_sum(w.iter().copied());
        let mean = crate::stats::kahan_sum(z.iter().zip(&w).map(|(z, w)| z * w));
        Ok(Self { repr: Repr::Atoms { z, w, cumulative }, total_mass, mean })
    }

    /// `½δ_{-1} + ½δ_{1}`: centered, every moment equal to one.
    pub fn symmetric_unit() -> Self {
        Self::atoms(&[(-1.0, 0.5), (1.0, 0.5)]).expect("valid atoms")
    }

    /// Truncated density on `eps <= |z| <= max`. Only an approximation of
    /// an infinite-activity measure; the small jumps below `eps` are dropped.
    pub fn truncated(density: JumpDensity, eps: f64, max: f64) -> Result<Self> {
        if !(eps > 0.0 && max > eps && max.is_finite()) {
            return Err(Error::InvalidParameter(format!("support [{eps}, {max}] needs 0 < eps < max < inf")));
        }
        let mut me = Self { repr: Repr::Density { density, eps, max }, total_mass: 0.0, mean: 0.0 };
        me.total_mass = me.density_integral(|_| 1.0)?;
        me.mean = if density.symmetric() { 0.0 } else { me.density_integral(|z| z)? };
        Ok(me)
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.repr, Repr::Atoms { .. })
    }

    /// `∫ h(z) ν(dz)` over the positive half of the density support, doubled
    /// by reflection for symmetric families when `h` is even.
    fn density_integral<H: Fn(f64) -> f64>(&self, h: H) -> Result<f64> {
        let Repr::Density { density, eps, max } = self.repr else {
            unreachable!("density_integral on atoms")
        };
        // z = e^s turns power laws into exponentials.
        let est = integrate(
            |s| {
                let z = s.exp();
                density.radial(z) * z * h(z)
            },
            eps.ln(),
            max.ln(),
            DENSITY_TOL,
        )?;
        let factor = if density.symmetric() { 2.0 } else { 1.0 };
        Ok(factor * est.value)
    }

    /// `m_p = ∫ |z|^p ν(dz)`.
    pub fn moment(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("moment order {p} must be positive")));
        }
        let m = match &self.repr {
            Repr::Atoms { z, w, .. } => crate::stats::kahan_sum(z.iter().zip(w).map(|(z, w)| w * z.abs().powf(p))),
            Repr::Density { .. } => self.density_integral(|z| z.powf(p))?,
        };
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::Overflow(format!("moment of order {p} is not finite")))
        }
    }

    /// Draw from `ν / ν(ℝ₀)`.
    pub fn sample_jump(&self, rng: &mut RandomStream) -> f64 {
        match &self.repr {
            Repr::Atoms { z, cumulative, .. } => {
                let u = rng.uniform() * self.total_mass;
                let k = cumulative.partition_point(|&c| c <= u).min(z.len() - 1);
                z[k]
            }
            Repr::Density { density, eps, max } => match *density {
                JumpDensity::Power { beta } => {
                    let u = rng.uniform();
                    let r = if beta.abs() < 1e-12 {
                        eps * (max / eps).powf(u)
                    } else {
                        let (a, b) = (eps.powf(-beta), max.powf(-beta));
                        (a - u * (a - b)).powf(-1.0 / beta)
                    };
                    if rng.uniform() < 0.5 {
                        -r
                    } else {
                        r
                    }
                }
                JumpDensity::Gamma { rate } => loop {
                    // Log-uniform proposal; the acceptance ratio is e^{-rate (z - eps)}.
                    let z = eps * (max / eps).powf(rng.uniform());
                    if rng.uniform() < (-rate * (z - eps)).exp() {
                        break z;
                    }
                },
            },
        }
    }

    /// `Ψ(u) = ∫ (e^{iuz} − 1 − iuz) ν(dz)`.
    pub fn levy_exponent(&self, u: f64) -> Result<Complex64> {
        match &self.repr {
            Repr::Atoms { z, w, .. } => {
                let mut re = crate::stats::KahanSum::default();
                let mut im = crate::stats::KahanSum::default();
                for (z, w) in z.iter().zip(w) {
                    re.add(w * cos_minus_one(u * z));
                    im.add(w * sin_minus_id(u * z));
                }
                Ok(Complex64::new(re.value(), im.value()))
            }
            Repr::Density { density, .. } => {
                let re = self.density_integral(|z| cos_minus_one(u * z))?;
                let im = if density.symmetric() { 0.0 } else { self.density_integral(|z| sin_minus_id(u * z))? };
                Ok(Complex64::new(re, im))
            }
        }
    }

    /// `ν` with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {c} must be positive")));
        }
        match &self.repr {
            Repr::Atoms { z, w, .. } => {
                let atoms: Vec<(f64, f64)> = z.iter().zip(w).map(|(&z, &w)| (z, c * w)).collect();
                Self::atoms(&atoms)
            }
            Repr::Density { .. } => Err(Error::Unsupported("scaling of density-variant jump measures".into())),
        }
    }

    /// Atoms `(z, w)` of the discrete variant.
    pub fn atom_list(&self) -> Option<Vec<(f64, f64)>> {
        match &self.repr {
            Repr::Atoms { z, w, .. } => Some(z.iter().copied().zip(w.iter().copied()).collect()),
            Repr::Density { .. } => None,
        }
    }
}

/// `cos x − 1` without cancellation.
pub fn cos_minus_one(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    -2.0 * s * s
}

/// `sin x − x` without cancellation.
pub fn sin_minus_id(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() - x
    }
}
