use levy::cli::{fmt_f64, parse_grid};
use levy::densities::{eval_closed, kernel_kappa, ln_closed, ClosedForm, DensityHandle, StableIndex};
use levy::laplace::laplace_density;
use levy::subord::kernel_n;
use proptest::prelude::*;

fn closed() -> impl Strategy<Value = ClosedForm> {
    (0usize..5).prop_map(|i| ClosedForm::ALL[i])
}

fn index() -> impl Strategy<Value = StableIndex> {
    (2i64..40).prop_flat_map(|k| (1..k).prop_map(move |l| (l, k))).prop_filter_map("coprime", |(l, k)| {
        StableIndex::new(l, k).ok()
    })
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #[test]
    fn index_product_is_exact_and_reduced(a in index(), b in index()) {
        let ab = a.times(b).unwrap();
        prop_assert_eq!(ab, b.times(a).unwrap());
        prop_assert_eq!(ab.l() * a.k() * b.k(), ab.k() * a.l() * b.l());
        prop_assert!(0 < ab.l() && ab.l() < ab.k());
        prop_assert!((ab.value() - a.value() * b.value()).abs() < 1e-15);
        prop_assert_eq!(StableIndex::product(&[a, b]).unwrap(), ab);
    }

    #[test]
    fn index_display_round_trips(a in index()) {
        prop_assert_eq!(a.to_string().parse::<StableIndex>().unwrap(), a);
    }

    #[test]
    fn rejected_indices(l in -5i64..60, k in -5i64..60) {
        let ok = l > 0 && l < k && (1..=l).filter(|d| l % d == 0 && k % d == 0).count() == 1;
        prop_assert_eq!(StableIndex::new(l, k).is_ok(), ok);
    }

    #[test]
    fn densities_are_nonnegative_and_finite(which in closed(), x in log_uniform(1e-4, 1e8)) {
        let v = eval_closed(which, x).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0, "{:?} {} {}", which, x, v);
    }

    #[test]
    fn log_density_agrees(which in closed(), x in log_uniform(0.05, 1e6)) {
        let v = eval_closed(which, x).unwrap();
        let l = ln_closed(which, x).unwrap();
        prop_assert!((l.exp() / v - 1.0).abs() < 1e-11, "{:?} {}", which, x);
    }

    #[test]
    fn kappa_is_self_similar(which in closed(), t in log_uniform(0.1, 10.0), x in log_uniform(0.05, 50.0), lam in log_uniform(0.2, 5.0)) {
        // kappa(lam^alpha t, lam x) = kappa(t, x) / lam
        let d = DensityHandle::closed(which);
        let a = which.alpha();
        let one = kernel_kappa(&d, t, x).unwrap();
        let two = kernel_kappa(&d, lam.powf(a) * t, lam * x).unwrap() * lam;
        prop_assert!((one - two).abs() <= 1e-11 * one.abs().max(1e-300), "{} {}", one, two);
    }

    #[test]
    fn n_is_self_similar(which in prop::sample::select(vec![ClosedForm::Half, ClosedForm::Third, ClosedForm::TwoThirds]),
                         s in log_uniform(0.01, 10.0), tau in log_uniform(0.1, 10.0), lam in log_uniform(0.2, 5.0)) {
        let a = which.alpha();
        let one = kernel_n(which.index(), s, tau).unwrap();
        let two = kernel_n(which.index(), lam.powf(a) * s, lam * tau).unwrap() * lam.powf(a);
        prop_assert!((one - two).abs() <= 1e-11 * one.abs().max(1e-300));
    }

    #[test]
    fn grids_have_the_requested_points(lo in 0.01f64..5.0, span in 0.1f64..100.0, n in 1usize..200, log in any::<bool>()) {
        let hi = lo + span;
        let g = parse_grid(&format!("{lo}:{hi}:{n}{}", if log { "log" } else { "" })).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g[0], lo);
        if n > 1 {
            prop_assert_eq!(g[n - 1], hi);
        }
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn number_format_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplace_is_decreasing(which in closed(), p in log_uniform(0.05, 20.0), r in 1.05f64..3.0) {
        let d = DensityHandle::closed(which);
        let lo = laplace_density(&d, p).unwrap();
        let hi = laplace_density(&d, p * r).unwrap();
        prop_assert!(hi < lo && lo <= 1.0 && hi > 0.0);
    }

    #[test]
    fn laplace_near_zero(which in closed(), p in log_uniform(1e-6, 1e-2)) {
        // 1 - L(p) ~ p^alpha as p -> 0
        let d = DensityHandle::closed(which);
        let got = 1.0 - laplace_density(&d, p).unwrap();
        let want = -(-p.powf(which.alpha())).exp_m1();
        prop_assert!((got - want).abs() < 1e-8, "{:?} {} {} {}", which, p, got, want);
    }
}
