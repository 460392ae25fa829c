use levy_spde_core::functions::{l2_inner, lp_norm, Scaled};
use levy_spde_core::prm::{char_function, l_integral, rosenthal_family, rosenthal_ratio, sample_l_integrals, sample_prm, LIntegral};
use levy_spde_core::rng::family_tag;
use levy_spde_core::stats::mean_se;
use levy_spde_core::{Error, GaussianBump, Indicator, LevyMeasure, RandomStream, SmoothBump, SpatialBox, TrialRunner};
use num_complex::Complex64;
use statrs::function::erf::erf;

fn skewed() -> LevyMeasure {
    LevyMeasure::atoms(&[(2.0, 0.5), (-0.5, 1.0)]).unwrap()
}

#[test]
fn counts_are_poisson() {
    let bounds = SpatialBox::interval(-1.0, 1.0).unwrap();
    let nu = LevyMeasure::atoms(&[(1.0, 1.0)]).unwrap();
    let n = 100_000;
    let counts: Vec<f64> = TrialRunner::new(8, 4)
        .run(0, n, |rng, _| sample_prm(&bounds, &nu, rng).unwrap().len() as f64);
    let m = mean_se(&counts);
    assert!((m.mean - 2.0).abs() <= 3.0 * m.se);
    let dev: Vec<f64> = counts.iter().map(|c| (c - 2.0).powi(2)).collect();
    let v = mean_se(&dev);
    assert!((v.mean - 2.0).abs() <= 3.0 * v.se, "variance {} ± {}", v.mean, v.se);
}

#[test]
fn samples_stay_in_the_box_and_jumps_are_nonzero() {
    let bounds = SpatialBox::new(vec![-1.0, 0.5], vec![2.0, 0.75]).unwrap();
    let mut rng = RandomStream::new(1, 2, 3);
    for _ in 0..200 {
        let s = sample_prm(&bounds, &skewed(), &mut rng).unwrap();
        assert!(s.points().all(|(x, z)| bounds.contains(x) && z != 0.0));
        assert!((s.intensity_mass - 0.75 * 1.5).abs() < 1e-15);
    }
}

#[test]
fn symmetric_jump_sum_is_centered() {
    let bounds = SpatialBox::interval(0.0, 3.0).unwrap();
    let nu = LevyMeasure::symmetric_unit();
    let sums: Vec<f64> = TrialRunner::new(4, 2).run(1, 100_000, |rng, _| sample_prm(&bounds, &nu, rng).unwrap().jumps().iter().sum());
    let m = mean_se(&sums);
    assert!(m.mean.abs() <= 3.0 * m.se);
}

#[test]
fn fixed_seed_is_reproducible() {
    let bounds = SpatialBox::interval(0.0, 10.0).unwrap();
    let a = sample_prm(&bounds, &skewed(), &mut RandomStream::new(77, 0, 5)).unwrap();
    let b = sample_prm(&bounds, &skewed(), &mut RandomStream::new(77, 0, 5)).unwrap();
    assert_eq!(a, b);
    let phi = SmoothBump { centre: 0.0, radius: 1.0, height: 1.0 };
    let one = sample_l_integrals(&phi, &skewed(), 2000, &TrialRunner::new(3, 1), 9).unwrap();
    let eight = sample_l_integrals(&phi, &skewed(), 2000, &TrialRunner::new(3, 8), 9).unwrap();
    assert_eq!(one, eight);
}

#[test]
fn indicator_integral_is_centered_with_isometric_variance() {
    let nu = skewed();
    let m2 = nu.moment(2.0).unwrap();
    let a = Indicator::new(0.5, 3.0);
    let xs = sample_l_integrals(&a, &nu, 100_000, &TrialRunner::new(12, 4), family_tag("indicator")).unwrap();
    let m = mean_se(&xs);
    assert!(m.mean.abs() <= 3.0 * m.se, "mean {} ± {}", m.mean, m.se);
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let s = mean_se(&sq);
    assert!((s.mean - m2 * 2.5).abs() <= 3.0 * s.se, "second {} ± {} vs {}", s.mean, s.se, m2 * 2.5);
}

#[test]
fn compensator_vanishes_for_centered_jumps() {
    let bounds = SpatialBox::interval(-2.0, 2.0).unwrap();
    let phi = GaussianBump { centre: 0.0, width: 0.3, height: 1.0 };
    assert_eq!(LIntegral::new(&phi, &bounds, 0.0).unwrap().compensator(), 0.0);
    let c = LIntegral::new(&phi, &bounds, 0.5).unwrap().compensator();
    // The bump is cut off at six widths.
    let mass = 0.3 * (2.0 * std::f64::consts::PI).sqrt() * erf(6.0 / 2f64.sqrt());
    assert!((c - 0.5 * mass).abs() < 1e-12);
}

#[test]
fn support_outside_box_is_rejected() {
    let bounds = SpatialBox::interval(0.0, 1.0).unwrap();
    let phi = Indicator::new(0.5, 1.5);
    let s = sample_prm(&bounds, &skewed(), &mut RandomStream::new(0, 0, 0)).unwrap();
    assert!(matches!(l_integral(&phi, &s), Err(Error::Support(_))));
}

#[test]
fn characteristic_function_of_an_indicator() {
    let nu = skewed();
    let a = Indicator::new(-1.0, 0.5);
    assert_eq!(char_function(&a, &nu, 0.0).unwrap(), Complex64::new(1.0, 0.0));
    for theta in [0.3, 1.0, 2.7] {
        let atoms = nu.atom_list().unwrap();
        let exponent: Complex64 = atoms
            .iter()
            .map(|&(z, w)| w * (Complex64::new(0.0, theta * z).exp() - 1.0 - Complex64::new(0.0, theta * z)))
            .sum();
        let want = (1.5 * exponent).exp();
        assert!((char_function(&a, &nu, theta).unwrap() - want).norm() < 1e-12);
    }
}

#[test]
fn empirical_characteristic_function() {
    let nu = skewed();
    let phi = SmoothBump { centre: 0.0, radius: 1.0, height: 1.5 };
    let n = 1_000_000;
    let xs = sample_l_integrals(&phi, &nu, n, &TrialRunner::new(21, 8), family_tag("ecf")).unwrap();
    for theta in [0.5, 1.0, 2.0] {
        let emp: Complex64 = xs.iter().map(|&x| Complex64::new(0.0, theta * x).exp()).sum::<Complex64>() / n as f64;
        let want = char_function(&phi, &nu, theta).unwrap();
        assert!((emp - want).norm() <= 4.0 / (n as f64).sqrt(), "theta = {theta}: {emp} vs {want}");
    }
}

#[test]
fn isometry_and_covariance_on_random_bumps() {
    let nu = skewed();
    let m2 = nu.moment(2.0).unwrap();
    let mut rng = RandomStream::new(99, 0, 0);
    let runner = TrialRunner::new(5, 8);
    for j in 0..20 {
        let phi = SmoothBump { centre: 4.0 * rng.uniform() - 2.0, radius: 0.2 + 2.0 * rng.uniform(), height: 0.5 + rng.uniform() };
        let xs = sample_l_integrals(&phi, &nu, 100_000, &runner, 100 + j).unwrap();
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let s = mean_se(&sq);
        let want = m2 * lp_norm(&phi, 2.0).unwrap().powi(2);
        assert!((s.mean - want).abs() <= 3.0 * s.se, "bump {j}: {} ± {} vs {want}", s.mean, s.se);
    }
    // Both integrals from one PRM on a common box.
    let phi = SmoothBump { centre: -0.5, radius: 1.5, height: 1.0 };
    let psi = GaussianBump { centre: 0.7, width: 0.5, height: 2.0 };
    let bounds = SpatialBox::interval(-6.0, 6.0).unwrap();
    let lp = LIntegral::new(&phi, &bounds, nu.mean()).unwrap();
    let lq = LIntegral::new(&psi, &bounds, nu.mean()).unwrap();
    let products: Vec<f64> = runner.run(7, 200_000, |rng, _| {
        let s = sample_prm(&bounds, &nu, rng).unwrap();
        lp.eval(&s) * lq.eval(&s)
    });
    let c = mean_se(&products);
    let want = m2 * l2_inner(&phi, &psi).unwrap();
    assert!((c.mean - want).abs() <= 3.0 * c.se, "{} ± {} vs {want}", c.mean, c.se);
}

#[test]
fn rosenthal_ratio_is_scale_invariant() {
    let nu = skewed();
    let runner = TrialRunner::new(31, 4);
    let phi = SmoothBump { centre: 0.0, radius: 2.0, height: 1.0 };
    let base = rosenthal_ratio(&phi, &nu, 4.0, 20_000, &runner, 4).unwrap();
    for c in [0.01, 3.0, 250.0] {
        let scaled = Scaled { inner: phi, factor: c };
        let r = rosenthal_ratio(&scaled, &nu, 4.0, 20_000, &runner, 4).unwrap();
        assert!((r.ratio - base.ratio).abs() < 1e-9 * base.ratio, "c = {c}");
    }
}

#[test]
fn second_order_ratio_is_at_most_one() {
    let nu = skewed();
    let runner = TrialRunner::new(6, 8);
    for (i, phi) in rosenthal_family().iter().enumerate() {
        let r = rosenthal_ratio(phi.as_ref(), &nu, 2.0, 20_000, &runner, i as u64).unwrap();
        assert!(r.ratio <= 1.0 + 3.0 * r.ratio_se, "{}: {} ± {}", r.function, r.ratio, r.ratio_se);
        // ‖L(φ)‖₂ = m₂^{1/2}‖φ‖₂ makes the ratio about 1/2 for every φ.
        assert!((r.ratio - 0.5).abs() <= 3.0 * r.ratio_se + 1e-12, "{}: {}", r.function, r.ratio);
    }
}

#[test]
fn classical_process_fourth_moment() {
    // Y(t) = L(1_[0,t]) has E Y⁴ = 3(m₂t)² + m₄t, so the ratio against
    // (m₂t)^{1/2} + (m₄t)^{1/4} is at most 3^{1/4}.
    let nu = skewed();
    let (m2, m4) = (nu.moment(2.0).unwrap(), nu.moment(4.0).unwrap());
    let runner = TrialRunner::new(13, 8);
    for (i, t) in [0.5, 1.0, 2.0, 4.0].into_iter().enumerate() {
        let phi = Indicator::new(0.0, t);
        let xs = sample_l_integrals(&phi, &nu, 200_000, &runner, i as u64).unwrap();
        let fourth: Vec<f64> = xs.iter().map(|x| x.powi(4)).collect();
        let f = mean_se(&fourth);
        let exact = 3.0 * (m2 * t).powi(2) + m4 * t;
        assert!((f.mean - exact).abs() <= 3.0 * f.se, "t = {t}: {} ± {} vs {exact}", f.mean, f.se);
        let r = rosenthal_ratio(&phi, &nu, 4.0, 200_000, &runner, i as u64).unwrap();
        assert!(r.ratio <= 3f64.powf(0.25) + 3.0 * r.ratio_se);
        assert!(r.ratio >= 0.5);
    }
}

#[test]
fn rosenthal_supremum_is_stable() {
    let nu = skewed();
    let runner = TrialRunner::new(2, 8);
    let sup = |trials: usize| {
        rosenthal_family()
            .iter()
            .enumerate()
            .map(|(i, phi)| rosenthal_ratio(phi.as_ref(), &nu, 4.0, trials, &runner, i as u64).unwrap().ratio)
            .fold(0.0, f64::max)
    };
    let (a, b) = (sup(10_000), sup(40_000));
    assert!(a.is_finite() && b.is_finite());
    assert!(a.max(b) / a.min(b) < 2.0, "{a} vs {b}");
}

