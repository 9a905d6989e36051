//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Exits non-zero when the set of failing criteria differs from
//! `KNOWN_FAILURES` in either direction. Criterion 7 cannot be met by the exact
//! densities (see the README); it still runs and prints FAIL.

#![allow(clippy::type_complexity)]

use std::time::Instant;

use levy::densities::{
    eval_closed, g_third_airy, g_third_bessel, g_two_thirds_kummer, ln_closed, ln_two_thirds_kummer_mp,
    tail_exponent, ClosedForm, DensityHandle, StableIndex,
};
use levy::laplace::{verify_char, verify_char_as, verify_commute, verify_efros, verify_efros_against, verify_scaling_k0};
use levy::quad::{integrate, plan_for_density};
use levy::specfun::{bessel_k, gamma0_incomplete_scaled};
use levy::subord::{msd_exponent, n_mass, propagator_mass};
use levy::transform::{compose, compose_oriented, levy2_apply, power_chain, synthesize, TransformRequest};
use levy::Result;

const KNOWN_FAILURES: [usize; 1] = [7];

fn idx(l: i64, k: i64) -> StableIndex {
    StableIndex::new(l, k).unwrap()
}

fn closed(which: ClosedForm) -> DensityHandle {
    DensityHandle::closed(which)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn max_rel(pairs: impl IntoIterator<Item = Result<(f64, f64)>>) -> f64 {
    pairs
        .into_iter()
        .map(|p| match p {
            Ok((got, want)) => {
                let r = (got / want - 1.0).abs();
                if r.is_nan() { f64::INFINITY } else { r }
            }
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn mass(d: &DensityHandle) -> Result<f64> {
    let plan = plan_for_density(d.alpha().value(), None).with_tols(1e-300, 1e-12);
    integrate(|x| d.pdf_or_nan(x), &plan)?.certified()
}

fn c1_characteristic() -> Outcome {
    let grid = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
    let reports: Vec<_> = ClosedForm::ALL.iter().map(|&w| verify_char(&closed(w), &grid, 1e-8)).collect();
    let worst = reports.iter().map(|r| r.max_abs_err).fold(0.0, f64::max);
    outcome(reports.iter().all(|r| r.passed), format!("max |L[g](p) - exp(-p^a)| = {worst:.2e} (tol 1e-8)"))
}

fn c2_normalization() -> Outcome {
    let mut ok = true;
    let mut worst_closed = 0.0f64;
    for w in ClosedForm::ALL {
        let e = mass(&closed(w)).map(|m| (m - 1.0).abs()).unwrap_or(f64::INFINITY);
        worst_closed = worst_closed.max(e);
        ok &= e <= 1e-9;
    }
    let synthesized: Vec<(&str, Result<DensityHandle>)> = vec![
        ("1/6", compose(idx(1, 2), &closed(ClosedForm::Third)).and_then(|d| synthesize(&d))),
        ("1/4", compose(idx(1, 2), &closed(ClosedForm::Half)).and_then(|d| synthesize(&d))),
        ("1/8", power_chain(idx(1, 2), 3, false)),
        ("1/9", compose(idx(1, 3), &closed(ClosedForm::Third)).and_then(|d| synthesize(&d))),
    ];
    let mut parts = Vec::new();
    for (name, d) in synthesized {
        let e = d.and_then(|d| mass(&d)).map(|m| (m - 1.0).abs()).unwrap_or(f64::INFINITY);
        ok &= e <= 1e-6;
        parts.push(format!("{name}: {e:.1e}"));
    }
    outcome(ok, format!("closed max |mass-1| = {worst_closed:.1e} (tol 1e-9); synthesized {} (tol 1e-6)", parts.join(", ")))
}

/// (label, kernel, operand, reference, grid)
fn composition_cases() -> Vec<(&'static str, ClosedForm, ClosedForm, ClosedForm, Vec<f64>, f64)> {
    use ClosedForm::*;
    vec![
        ("L_1/2[g_1/2] vs g_1/4", Half, Half, Quarter, log_grid(0.05, 20.0, 40), 1e-7),
        ("L_1/2[g_1/3] vs g_1/6", Half, Third, Sixth, log_grid(0.1, 20.0, 40), 1e-6),
        ("L_1/3[g_1/2] vs g_1/6", Third, Half, Sixth, log_grid(0.1, 20.0, 40), 1e-6),
        ("L_1/2[g_2/3] vs g_1/3", Half, TwoThirds, Third, log_grid(0.05, 20.0, 40), 1e-7),
    ]
}

fn c3_composition() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, kernel, operand, reference, grid, tol) in composition_cases() {
        let composed = compose_oriented(&closed(kernel), &closed(operand)).unwrap();
        let err = max_rel(grid.iter().map(|&x| Ok((composed.pdf(x)?, eval_closed(reference, x)?))));
        ok &= err <= tol;
        parts.push(format!("{label} {err:.1e} (tol {tol:.0e})"));
    }
    outcome(ok, parts.join("; "))
}

fn c4_commutativity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b, grid) in [
        (idx(1, 2), idx(1, 2), log_grid(0.05, 20.0, 40)),
        (idx(1, 2), idx(1, 3), log_grid(0.1, 20.0, 40)),
        (idx(1, 2), idx(2, 3), log_grid(0.05, 20.0, 40)),
    ] {
        let r = verify_commute(a, b, &grid, 1e-6);
        ok &= r.passed;
        parts.push(format!("{a}|{b} {:.1e}", r.max_rel_err));
    }
    outcome(ok, format!("max rel between orders: {} (tol 1e-6)", parts.join(", ")))
}

fn c5_k0() -> Outcome {
    let req = TransformRequest::for_index(idx(1, 2)).unwrap();
    let image = max_rel(log_grid(0.1, 10.0, 25).into_iter().map(|x| {
        let got = levy2_apply(&req, |t| bessel_k(0.0, t).unwrap_or(f64::NAN), x)?.certified()?;
        let want = gamma0_incomplete_scaled(x)? / (2.0 * (std::f64::consts::PI * x).sqrt());
        Ok((got, want))
    }));
    let half = verify_scaling_k0(idx(1, 2), &[0.25, 0.5, 2.0, 4.0], 1e-5);
    let third = verify_scaling_k0(idx(1, 3), &[0.2, 0.5, 0.8], 1e-5);
    outcome(
        image <= 1e-8 && half.passed && third.passed,
        format!(
            "image rel {image:.1e} (tol 1e-8); Laplace a=1/2 {:.1e}, a=1/3 {:.1e} (tol 1e-5)",
            half.max_abs_err, third.max_abs_err
        ),
    )
}

fn c6_efros() -> Outcome {
    let reports: Vec<_> = [(idx(1, 2), idx(1, 2)), (idx(1, 2), idx(1, 3)), (idx(1, 3), idx(2, 3))]
        .iter()
        .map(|&(a, b)| verify_efros(a, b, &[0.5, 1.0, 2.0], 1e-6))
        .collect();
    let worst = reports.iter().map(|r| r.max_abs_err).fold(0.0, f64::max);
    outcome(reports.iter().all(|r| r.passed), format!("max |L - exp(-p^(ab))| = {worst:.1e} (tol 1e-6)"))
}

fn c7_tail() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for w in ClosedForm::ALL {
        let slope = tail_exponent(&closed(w), (1e3, 1e4)).unwrap_or(f64::NAN);
        let miss = (slope - 1.0 - w.alpha()).abs();
        let good = miss <= 0.01;
        ok &= good;
        parts.push(format!("{}: {slope:.4} ({})", w.index(), if good { "ok" } else { "off" }));
    }
    outcome(ok, format!("fitted exponent on [1e3, 1e4] vs 1+a within 0.01: {}", parts.join(", ")))
}

fn c8_subordination() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [idx(1, 2), idx(1, 3)] {
        let n_err = [0.5, 1.0, 2.0]
            .iter()
            .map(|&tau| n_mass(a, tau).map(|m| (m - 1.0).abs()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        // fine plain trapezoid, and a coarser one with the origin kink term removed
        let raw = propagator_mass(a, 1.0, 0.0025).map(|(m, _)| (m - 1.0).abs()).unwrap_or(f64::INFINITY);
        let corrected = propagator_mass(a, 1.0, 0.02).map(|(_, m)| (m - 1.0).abs()).unwrap_or(f64::INFINITY);
        let slope = msd_exponent(a, &[0.1, 0.3, 1.0, 3.0, 10.0]).unwrap_or(f64::NAN);
        ok &= n_err <= 1e-8 && raw <= 1e-6 && corrected <= 1e-6 && (slope - a.value()).abs() <= 0.02;
        parts.push(format!(
            "a={a}: n mass {n_err:.1e}, P mass {raw:.1e} (h=0.0025) / {corrected:.1e} (h=0.02, kink term), msd slope {slope:.6}"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c9_cross_form() -> Outcome {
    let grid = log_grid(1e-2, 1e2, 41);
    let third = max_rel(grid.iter().map(|&x| Ok((g_third_bessel(x)?, g_third_airy(x)?))));
    // relative error of g from the difference of logs
    let two_thirds_mp = grid
        .iter()
        .map(|&x| match (ln_closed(ClosedForm::TwoThirds, x), ln_two_thirds_kummer_mp(x)) {
            (Ok(b), Ok(k)) => (b - k).exp_m1().abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let mut certified = 0;
    let two_thirds_f64 = max_rel(grid.iter().filter_map(|&x| match g_two_thirds_kummer(x) {
        Ok(Some(k)) => {
            certified += 1;
            Some(levy::densities::g_two_thirds_bessel(x).map(|b| (b, k)))
        }
        Ok(None) => None,
        Err(e) => Some(Err(e)),
    }));
    outcome(
        third <= 1e-10 && two_thirds_mp <= 1e-10 && two_thirds_f64 <= 1e-10,
        format!(
            "Bessel vs Airy {third:.1e}; Bessel vs Kummer {two_thirds_mp:.1e} (multiprecision, all 41 points), \
             {two_thirds_f64:.1e} (binary64, {certified} certified points) (tol 1e-10)"
        ),
    )
}

fn c10_negative_controls() -> Outcome {
    let wrong_alpha = verify_char_as(&closed(ClosedForm::Half), 1.0 / 3.0, 1.0, &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0], 1e-8);
    let falsified = verify_efros_against(idx(1, 2), idx(1, 3), &[0.5, 1.0, 2.0], 1e-6, &|p: f64| (-p.sqrt()).exp(), "falsified");
    outcome(
        !wrong_alpha.passed && wrong_alpha.max_rel_err > 1e-2 && !falsified.passed && falsified.max_rel_err > 1e-2,
        format!(
            "mismatched alpha fails with max rel {:.2e}; falsified Efros fails with max rel {:.2e} (need > 1e-2)",
            wrong_alpha.max_rel_err, falsified.max_rel_err
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("characteristic identity", c1_characteristic),
        ("normalization", c2_normalization),
        ("composition reproduces closed forms", c3_composition),
        ("commutativity", c4_commutativity),
        ("K0 example", c5_k0),
        ("Efros instance", c6_efros),
        ("tail law", c7_tail),
        ("subordination", c8_subordination),
        ("cross-form consistency", c9_cross_form),
        ("negative controls", c10_negative_controls),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let known = KNOWN_FAILURES.contains(&(i + 1));
        println!(
            "criterion {:>2} {}{}: {} [{:.1}s] {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            if known && !o.passed { " (known)" } else { "" },
            name,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.passed {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} of 10 criteria pass; failing: {failed:?}; known failures: {KNOWN_FAILURES:?}", 10 - failed.len());
    if failed != KNOWN_FAILURES {
        println!("acceptance: failing set differs from the known failures");
        std::process::exit(1);
    }
}
