use levy_spde_core::kernels::sphere_mean_cos;
use levy_spde_core::prm::sample_prm;
use levy_spde_core::stats::kahan_sum;
use levy_spde_core::{ColorationKernel, GreenOperator, KernelFamily, LevyMeasure, PRange, RandomStream, SpatialBox};
use proptest::prelude::*;

fn atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(((-5.0f64..5.0).prop_filter("nonzero", |z| z.abs() > 1e-3), 0.01f64..3.0), 1..6)
}

fn prange() -> impl Strategy<Value = PRange> {
    prop_oneof![
        Just(PRange::AllFromTwo),
        Just(PRange::Empty),
        Just(PRange::NotCovered),
        (2.01f64..50.0).prop_map(PRange::Below),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn heat_h_transform_is_monotone_and_below_t(t in 1e-4f64..20.0, dt in 0.0f64..5.0, r in 0.0f64..1e3) {
        let op = GreenOperator::heat(1);
        let a = op.h_transform(t, r);
        let b = op.h_transform(t + dt, r);
        prop_assert!(a >= 0.0 && a <= t * (1.0 + 1e-15));
        prop_assert!(b >= a);
    }

    #[test]
    fn wave_h_transform_split_bound(t in 1e-3f64..30.0, r in 1e-6f64..1e3) {
        let h = GreenOperator::wave(2).h_transform(t, r);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (0.5 * t * t).min(2.0 / (r * r)) * (1.0 + 1e-12));
    }

    #[test]
    fn wave_symbol_is_dominated(t in 0.0f64..50.0, r in 0.0f64..1e4) {
        let g = GreenOperator::wave(1).fourier_g(t, r);
        prop_assert!(g * g <= 2.0 * (t * t).max(1.0) / (1.0 + r * r));
    }

    #[test]
    fn adding_atoms_raises_moments(base in atoms(), extra in atoms(), p in 0.5f64..8.0) {
        let nu = LevyMeasure::atoms(&base).unwrap();
        let mut all = base.clone();
        all.extend(extra);
        let more = LevyMeasure::atoms(&all).unwrap();
        prop_assert!(more.moment(p).unwrap() > nu.moment(p).unwrap());
    }

    #[test]
    fn scaling_weights_scales_moments(base in atoms(), c in 0.1f64..10.0, p in 1.0f64..6.0) {
        let nu = LevyMeasure::atoms(&base).unwrap();
        let scaled = nu.scaled(c).unwrap();
        let want = c * nu.moment(p).unwrap();
        prop_assert!((scaled.moment(p).unwrap() - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn spectral_density_is_radial(alpha in 0.1f64..1.9, a in -20.0f64..20.0, b in -20.0f64..20.0) {
        prop_assume!(a * a + b * b > 1e-12);
        for family in [KernelFamily::Heat, KernelFamily::Riesz, KernelFamily::Bessel] {
            let k = ColorationKernel::new(family, alpha, 2).unwrap();
            let g = k.spectral_density(&[a, b]).unwrap();
            let rotated = k.spectral_density(&[(a * a + b * b).sqrt(), 0.0]).unwrap();
            prop_assert!(g >= 0.0 && g.is_finite());
            prop_assert!((g - rotated).abs() <= 1e-14 * g.max(1e-300));
        }
    }

    #[test]
    fn sphere_cosine_mean_is_a_contraction(d in 1usize..6, u in 0.0f64..500.0) {
        let m = sphere_mean_cos(d, u).unwrap();
        prop_assert!(m.abs() <= 1.0 + 1e-12);
        prop_assert!((sphere_mean_cos(d, -u).unwrap() - m).abs() < 1e-15);
    }

    #[test]
    fn prange_inclusion_is_a_preorder(a in prange(), b in prange(), c in prange(), p in 2.0f64..60.0) {
        prop_assert!(a.is_subset_of(&a));
        if a.is_subset_of(&b) && b.is_subset_of(&c) {
            prop_assert!(a.is_subset_of(&c));
        }
        if a.is_subset_of(&b) && a.contains(p) {
            prop_assert!(b.contains(p));
        }
    }

    #[test]
    fn prm_points_lie_in_their_box(lo in -10.0f64..10.0, w in 0.01f64..5.0, h in 0.01f64..5.0, seed in any::<u64>()) {
        let bounds = SpatialBox::new(vec![lo, -h], vec![lo + w, h]).unwrap();
        let nu = LevyMeasure::atoms(&[(1.0, 2.0), (-3.0, 0.5)]).unwrap();
        let s = sample_prm(&bounds, &nu, &mut RandomStream::new(seed, 0, 0)).unwrap();
        prop_assert!(s.points().all(|(x, z)| bounds.contains(x) && (z == 1.0 || z == -3.0)));
    }

    #[test]
    fn random_streams_are_reproducible(seed in any::<u64>(), family in any::<u64>(), index in any::<u64>()) {
        let mut a = RandomStream::new(seed, family, index);
        let mut b = RandomStream::new(seed, family, index);
        for _ in 0..8 {
            let u = a.uniform();
            prop_assert!((0.0..1.0).contains(&u));
            prop_assert_eq!(u, b.uniform());
        }
    }

    #[test]
    fn compensated_sum_is_order_independent(xs in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let forward = kahan_sum(xs.iter().copied());
        let backward = kahan_sum(xs.iter().rev().copied());
        let scale: f64 = xs.iter().map(|x| x.abs()).sum();
        prop_assert!((forward - backward).abs() <= 1e-15 * scale.max(1.0));
    }
}
