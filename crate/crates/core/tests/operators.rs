use std::f64::consts::PI;

use levy_spde_core::operators::{admissible_p_range, alt_admissible_p_range, jp_bound, jp_exponent, jp_norm, JpBoundCase};
use levy_spde_core::quad::{integrate, integrate_left_singular, simpson, trapezoid, Tolerance};
use levy_spde_core::rng::RandomStream;
use levy_spde_core::{ColorationKernel, Error, GreenOperator, NormValue, PRange};

#[test]
fn h_transform_matches_time_quadrature() {
    let mut rng = RandomStream::new(17, 3, 0);
    for op in [GreenOperator::heat(1), GreenOperator::wave(1)] {
        for _ in 0..200 {
            let t = 0.01 + 4.99 * rng.uniform();
            let r = 10f64.powf(-3.0 + 4.0 * rng.uniform());
            let oracle = simpson(|s| op.fourier_g(t - s, r), 0.0, t, 10_000);
            let got = op.h_transform(t, r);
            assert!((got - oracle).abs() <= 1e-10 * oracle.abs().max(t), "{:?} t = {t}, r = {r}: {got} vs {oracle}", op.family());
        }
    }
}

#[test]
fn heat_lq_norms_match_trapezoid() {
    for (t, q) in [(1.0f64, 2.0f64), (0.3, 1.5), (2.0, 4.0), (0.7, 0.5)] {
        let h1 = GreenOperator::heat(1);
        let half = 40.0 * t.sqrt();
        let oracle = trapezoid(|x| h1.green_eval(t, &[x]).unwrap().powf(q), -half, half, 200_001).powf(1.0 / q);
        let got = h1.green_lq_norm(t, q).unwrap().finite().unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle, "d = 1, t = {t}, q = {q}");

        let h2 = GreenOperator::heat(2);
        let oracle = trapezoid(|r| 2.0 * PI * r * h2.green_eval(t, &[r, 0.0]).unwrap().powf(q), 0.0, half, 200_001).powf(1.0 / q);
        let got = h2.green_lq_norm(t, q).unwrap().finite().unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle, "d = 2, t = {t}, q = {q}");
    }
    let want = (4.0 * PI).powf(-0.25);
    assert!((GreenOperator::heat(1).green_lq_norm(1.0, 2.0).unwrap().finite().unwrap() - want).abs() < 1e-14);
}

#[test]
fn wave_lq_norms() {
    assert_eq!(GreenOperator::wave(1).green_lq_norm(2.0, 1.0).unwrap(), NormValue::Finite(2.0));
    assert_eq!(GreenOperator::wave(2).green_lq_norm(1.0, 2.0).unwrap(), NormValue::Infinite);
    assert_eq!(GreenOperator::wave(2).green_lq_norm(1.0, 3.0).unwrap(), NormValue::Infinite);
    for t in [0.5, 1.0, 3.0] {
        let l1 = GreenOperator::wave(2).green_lq_norm(t, 1.0).unwrap().finite().unwrap();
        assert!((l1 - t).abs() < 1e-14 * t);
    }
    // Radial quadrature of the d = 2 profile with r = t cos φ, which leaves
    // an integrable φ^{1−q} singularity at φ = 0.
    let (t, q) = (1.5, 1.4);
    let w2 = GreenOperator::wave(2);
    let oracle = integrate_left_singular(
        |phi: f64| {
            // G_t(r) = 1/(2π√(t² − r²)) = 1/(2π t sin φ).
            let r = t * phi.cos();
            2.0 * PI * r * (2.0 * PI * t * phi.sin()).powf(-q) * t * phi.sin()
        },
        0.0,
        0.5 * PI,
        Tolerance::rel(1e-12),
    )
    .unwrap()
    .value;
    for phi in [0.1, 0.7, 1.3] {
        let r = t * f64::cos(phi);
        let g = w2.green_eval(t, &[r, 0.0]).unwrap();
        assert!((g * 2.0 * PI * t * f64::sin(phi) - 1.0).abs() < 1e-12);
    }
    let got = w2.green_lq_norm(t, q).unwrap().finite().unwrap().powf(q);
    assert!((got - oracle).abs() < 1e-6 * got, "{got} vs {oracle}");
    assert!(matches!(GreenOperator::wave(3).green_lq_norm(1.0, 1.0), Err(Error::Unsupported(_))));
}

#[test]
fn heat_heat_jp_matches_convolution_quadrature() {
    let alpha = 0.8;
    let op = GreenOperator::heat(1);
    let k = ColorationKernel::heat(alpha, 1).unwrap();
    for (t, p) in [(0.5, 2.0), (1.0, 3.0), (2.0, 5.5)] {
        let conv = |x: f64| {
            integrate(|y| op.green_eval(t, &[x - y]).unwrap() * k.kappa_eval(&[y]).unwrap(), x - 30.0, x + 30.0, Tolerance::rel(1e-12))
                .unwrap()
                .value
        };
        let oracle = integrate(|x| conv(x).powf(p), -25.0, 25.0, Tolerance::rel(1e-10)).unwrap().value.powf(2.0 / p);
        let got = jp_norm(&op, &k, t, p).unwrap();
        assert!((got - oracle).abs() < 1e-6 * oracle, "t = {t}, p = {p}: {got} vs {oracle}");
    }
}

#[test]
fn plancherel_agrees_with_grid_route() {
    let cases = [
        (GreenOperator::heat(1), ColorationKernel::bessel(2.0, 1).unwrap(), 0.7),
        (GreenOperator::wave(1), ColorationKernel::bessel(3.0, 1).unwrap(), 1.3),
        (GreenOperator::wave(1), ColorationKernel::heat(0.5, 1).unwrap(), 2.0),
        (GreenOperator::heat(1), ColorationKernel::heat(1.5, 1).unwrap(), 0.4),
    ];
    for (op, k, t) in cases {
        let spectral = k.spectral_measure().integrate_radial(|r| op.fourier_g(t, r).powi(2), Tolerance::rel(1e-12)).unwrap();
        let grid = jp_norm(&op, &k, t, 2.0).unwrap();
        assert!((grid - spectral).abs() < 1e-6 * spectral, "{:?}/{:?}: {grid} vs {spectral}", op.family(), k.family());
    }
}

#[test]
fn heat_bessel_large_time_scaling_settles() {
    let op = GreenOperator::heat(1);
    let k = ColorationKernel::bessel(2.0, 1).unwrap();
    let p = 3.0;
    let scaled: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&t: &f64| jp_norm(&op, &k, t, p).unwrap() * t.powf(1.0 - 1.0 / p)).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 1.1, "{scaled:?}");
}

#[test]
fn jp_rejects_unsupported_routes() {
    let riesz = ColorationKernel::riesz(0.5, 1).unwrap();
    assert!(matches!(jp_norm(&GreenOperator::heat(1), &riesz, 1.0, 2.0), Err(Error::Unsupported(_))));
    let b2 = ColorationKernel::bessel(1.0, 2).unwrap();
    assert!(matches!(jp_norm(&GreenOperator::heat(2), &b2, 1.0, 2.0), Err(Error::Unsupported(_))));
    // The closed form covers every dimension.
    assert!(jp_norm(&GreenOperator::heat(3), &ColorationKernel::heat(1.0, 3).unwrap(), 1.0, 4.0).is_ok());
}

#[test]
fn bound_shapes_follow_power_laws() {
    // Heat kernel, wave operator: ∝ t² as t → 0.
    let wave1 = GreenOperator::wave(1);
    let hk = ColorationKernel::heat(1.0, 1).unwrap();
    let ratios: Vec<f64> = [1e-3, 1e-2, 0.1, 1.0].iter().map(|&t| jp_bound(&wave1, &hk, t, 4.0).unwrap().value / (t * t)).collect();
    assert!(ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    assert!(ratios[3] > 0.5 * ratios[0]);
    assert_eq!(jp_bound(&wave1, &hk, 1.0, 4.0).unwrap().case, JpBoundCase::Spectral);

    // Riesz kernel, heat operator: exact power t^{d(1/p + α/2d − 1)}.
    let heat3 = GreenOperator::heat(3);
    let rk = ColorationKernel::riesz(1.5, 3).unwrap();
    let p = 4.0;
    let e = jp_exponent(&heat3, &rk, p).unwrap();
    assert!((e - 3.0 * (0.25 + 0.25 - 1.0)).abs() < 1e-15);
    let base = jp_bound(&heat3, &rk, 1.0, p).unwrap();
    assert_eq!(base.case, JpBoundCase::Riesz);
    for t in [0.01, 0.3, 7.0] {
        let b = jp_bound(&heat3, &rk, t, p).unwrap().value;
        assert!((b / t.powf(e) - base.value).abs() < 1e-10 * base.value);
    }
    // 2d/(2d − α) = 6/4.5.
    assert!(matches!(jp_bound(&heat3, &rk, 1.0, 1.3), Err(Error::Unsupported(_))));

    // Integrable kernel, wave d = 1: ∝ t^{2/p}.
    let bk = ColorationKernel::bessel(2.0, 1).unwrap();
    let base = jp_bound(&wave1, &bk, 1.0, p).unwrap();
    assert_eq!(base.case, JpBoundCase::Integrable);
    for t in [0.05, 2.0, 9.0] {
        let b = jp_bound(&wave1, &bk, t, p).unwrap().value;
        assert!((b / t.powf(2.0 / p) - base.value).abs() < 1e-12 * base.value);
    }
    // Wave d = 2 with q >= 2 has no finite bound.
    let wave2 = GreenOperator::wave(2);
    assert!(matches!(jp_bound(&wave2, &ColorationKernel::bessel(1.0, 2).unwrap(), 1.0, 2.0), Err(Error::Unsupported(_))));
}

#[test]
fn young_inequality_bounds_grid_norms() {
    // ‖κ‖₁ = Fκ(0) = 1, so J_p(t) <= ‖G_t‖²_p with constant one.
    let k = ColorationKernel::bessel(2.0, 1).unwrap();
    for op in [GreenOperator::heat(1), GreenOperator::wave(1)] {
        for t in [0.05, 0.5, 2.0, 8.0] {
            for p in [1.0, 2.0, 3.0, 6.0] {
                let j = jp_norm(&op, &k, t, p).unwrap();
                let b = jp_bound(&op, &k, t, p).unwrap().value;
                assert!(j <= b * (1.0 + 1e-6), "{:?} t = {t}, p = {p}: {j} > {b}", op.family());
            }
        }
    }
}

#[test]
fn heat_heat_ratio_to_bound_is_bounded_by_its_small_time_value() {
    for d in 1..=3 {
        let op = GreenOperator::heat(d);
        let k = ColorationKernel::heat(0.6, d).unwrap();
        for p in [2.0, 3.0, 8.0] {
            let ratio = |t: f64| jp_norm(&op, &k, t, p).unwrap() / jp_bound(&op, &k, t, p).unwrap().value;
            let c = ratio(1e-6);
            for t in [0.01, 0.1, 1.0, 10.0, 100.0] {
                assert!(ratio(t) <= c * (1.0 + 1e-8), "d = {d}, p = {p}, t = {t}");
            }
        }
    }
}

#[test]
fn energy_sandwich() {
    for op in [GreenOperator::heat(1), GreenOperator::wave(1)] {
        for horizon in [0.5, 1.0, 2.0] {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..=2000 {
                let r = 100.0 * i as f64 / 2000.0;
                let v = (1.0 + r * r) * op.symbol_energy(horizon, r);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            assert!(lo > 0.01 && hi < 20.0, "{:?} T = {horizon}: [{lo}, {hi}]", op.family());
        }
    }
}

#[test]
fn symbol_energy_matches_time_quadrature() {
    for op in [GreenOperator::heat(1), GreenOperator::wave(1)] {
        for (horizon, r) in [(1.0, 0.0), (0.7, 0.3), (2.0, 5.0), (3.0, 40.0)] {
            let oracle = integrate(|t| op.fourier_g(t, r).powi(2), 0.0, horizon, Tolerance::rel(1e-13)).unwrap().value;
            assert!((op.symbol_energy(horizon, r) - oracle).abs() < 1e-9 * oracle);
        }
    }
}

#[test]
fn wave_symbol_bound() {
    let w = GreenOperator::wave(2);
    for i in 0..=400 {
        let t = 0.01 * 1.02f64.powi(i);
        for j in 0..=300 {
            let r = 1e-3 * 1.05f64.powi(j);
            let lhs = w.fourier_g(t, r).powi(2);
            let rhs = 2.0 * (t * t).max(1.0) / (1.0 + r * r);
            assert!(lhs <= rhs, "t = {t}, r = {r}");
        }
    }
}

fn increment_energy(op: &GreenOperator, k: &ColorationKernel, h: f64) -> f64 {
    let mu = k.spectral_measure();
    (0..=20)
        .map(|i| {
            let t = 0.1 + 0.1 * i as f64;
            mu.integrate_radial(|r| (op.fourier_g(t + h, r) - op.fourier_g(t, r)).powi(2), Tolerance::rel(1e-8)).unwrap()
        })
        .fold(0.0, f64::max)
}

#[test]
fn time_increments_vanish() {
    let cases = [
        (GreenOperator::heat(1), ColorationKernel::bessel(0.5, 1).unwrap(), 1.0),
        (GreenOperator::heat(2), ColorationKernel::heat(1.0, 2).unwrap(), 1.0),
        (GreenOperator::wave(1), ColorationKernel::bessel(3.0, 1).unwrap(), 1.0),
        (GreenOperator::wave(2), ColorationKernel::heat(0.5, 2).unwrap(), 1.0),
    ];
    for (op, k, order) in cases {
        let sups: Vec<f64> = (0..6).map(|j| increment_energy(&op, &k, 0.1 * 0.5f64.powi(j))).collect();
        assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
        // Halving h shrinks the sup by at least 2^{order} up to 10%.
        let rate = (sups[4] / sups[5]).log2();
        assert!(rate >= 0.9 * order, "{:?}/{:?}: rate {rate}", op.family(), k.family());
    }
}

#[test]
fn admissibility_matches_case_list() {
    let heat = GreenOperator::heat;
    let riesz = |a: f64, d| ColorationKernel::riesz(a, d).unwrap();
    let bessel = |a: f64, d| ColorationKernel::bessel(a, d).unwrap();
    // Riesz kernel, heat operator.
    assert_eq!(admissible_p_range(&heat(1), &riesz(0.5, 1)), PRange::AllFromTwo);
    assert_eq!(admissible_p_range(&heat(2), &riesz(0.3, 2)), PRange::AllFromTwo);
    assert_eq!(admissible_p_range(&heat(3), &riesz(2.0, 3)), PRange::AllFromTwo);
    assert_eq!(admissible_p_range(&heat(3), &riesz(2.7, 3)), PRange::AllFromTwo);
    for a in [1.1, 1.5, 1.9] {
        match admissible_p_range(&heat(3), &riesz(a, 3)) {
            PRange::Below(u) => assert!((u - 6.0 / (2.0 - a)).abs() < 1e-12),
            other => panic!("alpha = {a}: {other:?}"),
        }
    }
    for (d, a) in [(4usize, 2.5), (4, 3.5), (5, 3.2), (6, 4.5)] {
        let dd = d as f64;
        match admissible_p_range(&heat(d), &riesz(a, d)) {
            PRange::Below(u) => assert!((u - 2.0 * dd / (2.0 * dd - a - 4.0)).abs() < 1e-12),
            PRange::AllFromTwo => assert!(a >= 2.0 * dd - 4.0),
            other => panic!("d = {d}, alpha = {a}: {other:?}"),
        }
    }
    assert_eq!(admissible_p_range(&heat(3), &riesz(1.5, 3)), PRange::Below(12.0));
    // Outside the Dalang range nothing is admissible.
    assert_eq!(admissible_p_range(&heat(3), &riesz(0.5, 3)), PRange::Empty);
    // Integrable kernel, heat operator.
    assert_eq!(admissible_p_range(&heat(1), &bessel(0.5, 1)), PRange::AllFromTwo);
    assert_eq!(admissible_p_range(&heat(2), &bessel(0.5, 2)), PRange::AllFromTwo);
    assert_eq!(admissible_p_range(&heat(3), &bessel(2.0, 3)), PRange::Below(3.0));
    // Heat kernel, any operator.
    for d in 1..=3 {
        assert_eq!(admissible_p_range(&heat(d), &ColorationKernel::heat(1.0, d).unwrap()), PRange::AllFromTwo);
        assert_eq!(admissible_p_range(&GreenOperator::wave(d), &ColorationKernel::heat(1.0, d).unwrap()), PRange::AllFromTwo);
    }
    // Wave operator in d = 2 with a Riesz kernel.
    assert_eq!(admissible_p_range(&GreenOperator::wave(2), &riesz(1.0, 2)), PRange::Below(4.0));
}

#[test]
fn alternative_range_is_no_larger() {
    for d in 1..=3usize {
        for a in [0.3, 0.9, 1.4, 2.2, 2.8] {
            for op in [GreenOperator::heat(d), GreenOperator::wave(d)] {
                for k in [ColorationKernel::riesz(a, d), ColorationKernel::bessel(a, d), ColorationKernel::heat(a, d)].into_iter().flatten() {
                    let main = admissible_p_range(&op, &k);
                    let alt = alt_admissible_p_range(&op, &k);
                    assert!(alt.is_subset_of(&main), "{:?} {:?} d = {d}, a = {a}: {alt:?} vs {main:?}", op.family(), k.family());
                }
            }
        }
    }
    // Integrable kernel, heat operator: p < 1 + 2/d.
    assert_eq!(alt_admissible_p_range(&GreenOperator::heat(1), &ColorationKernel::bessel(1.0, 1).unwrap()), PRange::Below(3.0));
    assert_eq!(alt_admissible_p_range(&GreenOperator::heat(2), &ColorationKernel::bessel(1.0, 2).unwrap()), PRange::Empty);
}
