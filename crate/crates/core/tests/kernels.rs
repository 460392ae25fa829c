use std::f64::consts::PI;

use levy_spde_core::functions::{GridFunction, SmoothBump};
use levy_spde_core::kernels::{inner0, riesz_constant};
use levy_spde_core::quad::{integrate, integrate_to_infinity, trapezoid, Tolerance};
use levy_spde_core::{ColorationKernel, Error, KernelFamily};
use statrs::function::gamma::gamma;

#[test]
fn spectral_density_examples() {
    assert_eq!(ColorationKernel::heat(0.7, 2).unwrap().spectral_density(&[0.0, 0.0]).unwrap(), 1.0);
    assert!((ColorationKernel::bessel(2.0, 1).unwrap().spectral_density(&[1.0]).unwrap() - 0.5).abs() < 1e-15);
    assert!((ColorationKernel::riesz(1.0, 2).unwrap().spectral_density(&[4.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
    assert!(matches!(ColorationKernel::riesz(1.0, 2).unwrap().spectral_density(&[0.0, 0.0]), Err(Error::Domain(_))));
}

#[test]
fn spectral_profiles_are_nonincreasing() {
    let kernels = [
        ColorationKernel::heat(0.5, 1).unwrap(),
        ColorationKernel::riesz(1.5, 2).unwrap(),
        ColorationKernel::bessel(0.3, 3).unwrap(),
    ];
    for k in kernels {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let r = 10f64.powf(-4.0 + 8.0 * i as f64 / 199.0);
            let g = k.spectral_profile(r).unwrap();
            assert!(g >= 0.0 && g <= last, "{:?} at r = {r}", k.family());
            last = g;
        }
    }
}

#[test]
fn heat_kernel_at_origin() {
    let k = ColorationKernel::heat(2.0, 1).unwrap();
    assert!((k.kappa_eval(&[0.0]).unwrap() - (2.0 * PI).sqrt().recip()).abs() < 1e-15);
}

#[test]
fn riesz_constant_from_gaussian_pairing() {
    // Parseval with e^{−|x|²/2}: ∫κ(x)e^{−|x|²/2}dx = (2π)^{-3/2}∫Fκ(ξ)e^{−|ξ|²/2}dξ
    // with Fκ = |ξ|^{-1} for κ = R_{3,1}.
    let k = ColorationKernel::riesz(2.0, 3).unwrap();
    let tol = Tolerance::rel(1e-12);
    let space = integrate_to_infinity(|r| 4.0 * PI * r * r * k.kappa_eval(&[r, 0.0, 0.0]).unwrap() * (-0.5 * r * r).exp(), 0.0, 1.0, tol)
        .unwrap()
        .value;
    let freq = (2.0 * PI).powf(-1.5) * integrate_to_infinity(|r| 4.0 * PI * r * (-0.5 * r * r).exp(), 0.0, 1.0, tol).unwrap().value;
    assert!((space - freq).abs() < 1e-10 * freq);
    let c = k.kappa_eval(&[1.0, 0.0, 0.0]).unwrap();
    assert!((c - 1.0 / (2.0 * PI * PI)).abs() < 1e-14);
    assert!((riesz_constant(3, 1.0) - c).abs() < 1e-16);
}

/// κ = B_{d,a} by the trapezoid rule in s = ln w on [−60, 60] with 10⁴ points.
fn bessel_oracle(d: usize, alpha: f64, r: f64) -> f64 {
    let a = 0.5 * alpha;
    let dd = d as f64;
    let f = |s: f64| {
        let w = s.exp();
        let log = 0.5 * a * s - w - 0.5 * dd * (4.0 * PI * w).ln() - r * r / (4.0 * w);
        log.exp()
    };
    trapezoid(f, -60.0, 60.0, 10_000) / gamma(0.5 * a)
}

#[test]
fn bessel_kernel_matches_trapezoid_oracle() {
    for (d, alpha) in [(1, 0.5), (1, 2.0), (2, 1.0), (2, 3.0), (3, 2.5), (3, 6.0)] {
        let k = ColorationKernel::bessel(alpha, d).unwrap();
        for r in [0.05, 0.3, 1.0, 2.5, 6.0] {
            let mut x = vec![0.0; d];
            x[0] = r;
            let got = k.kappa_eval(&x).unwrap();
            let want = bessel_oracle(d, alpha, r);
            assert!((got - want).abs() <= 1e-8 * want, "d = {d}, alpha = {alpha}, r = {r}: {got} vs {want}");
        }
    }
}

#[test]
fn bessel_four_in_one_dimension_is_laplace() {
    // Fκ = (1+ξ²)^{-1} at α = 4, so κ(x) = e^{−|x|}/2.
    let k = ColorationKernel::bessel(4.0, 1).unwrap();
    for x in [0.1, 1.0, 4.0] {
        assert!((k.kappa_eval(&[x]).unwrap() - 0.5 * (-x as f64).exp()).abs() < 1e-12);
    }
}

#[test]
fn heat_kernel_self_convolution() {
    // κ = H_{1,α/2} so κ * κ = H_{1,α}.
    let alpha = 0.8;
    let k = ColorationKernel::heat(alpha, 1).unwrap();
    for x in [0.0, 0.4, 1.3, 3.0] {
        let conv = integrate(|y| k.kappa_eval(&[y]).unwrap() * k.kappa_eval(&[x - y]).unwrap(), -20.0, 20.0, Tolerance::rel(1e-12))
            .unwrap()
            .value;
        let closed = (2.0 * PI * alpha).powf(-0.5) * (-x * x / (2.0 * alpha)).exp();
        assert!((conv - closed).abs() < 1e-6 * closed);
    }
}

#[test]
fn dalang_examples() {
    assert!(ColorationKernel::riesz(2.5, 3).unwrap().dalang_check());
    assert!(!ColorationKernel::riesz(0.5, 3).unwrap().dalang_check());
    assert!(ColorationKernel::bessel(0.5, 1).unwrap().dalang_check());
    let c = ColorationKernel::riesz(2.5, 3).unwrap().dalang_integral().unwrap();
    assert!(c.is_finite() && c > 0.0);
    assert!(matches!(ColorationKernel::riesz(1.0, 3).unwrap().dalang_integral(), Err(Error::DivergentIntegral(_))));
}

#[test]
fn dalang_integral_heat_trapezoid_oracle() {
    for alpha in [0.5, 1.0, 3.0] {
        let k = ColorationKernel::heat(alpha, 1).unwrap();
        let oracle = trapezoid(|r| (-0.5 * alpha * r * r).exp() / (1.0 + r * r), -50.0, 50.0, 1_000_000) / (2.0 * PI);
        let c = k.dalang_integral().unwrap();
        assert!((c - oracle).abs() < 1e-6 * oracle, "alpha = {alpha}");
    }
}

#[test]
fn cutoff_verdict_agrees_with_dalang_check() {
    let mut cases = 0;
    for d in 1..=3usize {
        let dd = d as f64;
        for family in [KernelFamily::Riesz, KernelFamily::Bessel, KernelFamily::Heat] {
            for i in 1..=16 {
                let alpha = 0.25 * i as f64 * dd.max(1.5) / 2.0 + if family == KernelFamily::Riesz { 0.0 } else { 0.05 };
                let Ok(k) = ColorationKernel::new(family, alpha, d) else { continue };
                let verdict = k.cutoff_stability().unwrap();
                assert_eq!(verdict.converges, k.dalang_check(), "{family:?}, d = {d}, alpha = {alpha}, ratio = {}", verdict.ratio);
                cases += 1;
            }
        }
    }
    assert!(cases > 80);
}

fn bump_grid(centre: f64, radius: f64) -> GridFunction {
    GridFunction::sample(&SmoothBump { centre, radius, height: 1.0 }, -4.0, 4.0, 801).unwrap()
}

#[test]
fn inner0_matches_spatial_double_integral() {
    let alpha = 0.6;
    let k = ColorationKernel::heat(alpha, 1).unwrap();
    let phi = bump_grid(0.2, 1.5);
    let f = |x: f64| (2.0 * PI * alpha).powf(-0.5) * (-x * x / (2.0 * alpha)).exp();
    let n = phi.values.len();
    let h = phi.step;
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut oracle = 0.0;
    for i in 0..n {
        for j in 0..n {
            oracle += weight(i) * weight(j) * phi.values[i] * phi.values[j] * f(phi.node(i) - phi.node(j));
        }
    }
    oracle *= h * h;
    let got = inner0(&phi, &phi, &k).unwrap();
    assert!((got - oracle).abs() < 1e-4 * oracle, "{got} vs {oracle}");
}

#[test]
fn inner0_is_symmetric_and_vanishes_on_zero() {
    let k = ColorationKernel::bessel(1.5, 1).unwrap();
    let a = bump_grid(-0.5, 1.0);
    let b = bump_grid(0.7, 2.0);
    let ab = inner0(&a, &b, &k).unwrap();
    let ba = inner0(&b, &a, &k).unwrap();
    assert!((ab - ba).abs() < 1e-12 * ab.abs());
    let zero = GridFunction::new(a.start, a.step, vec![0.0; a.values.len()]).unwrap();
    assert_eq!(inner0(&zero, &a, &k).unwrap(), 0.0);
}
