//! Property tests over random ontologies, hazard tables and timelines.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tproj_core::hazard::{event_time_pmf, hazard_at, survival, survival_cutoff, Baseline, Covariate, CovariateTrajectory, FluentPattern};
use tproj_core::kb::{LinkKind, OntologyLink};
use tproj_core::learner::{fit, gradient, log_likelihood, FitConfig, PersonPeriodRecord};
use tproj_core::{Fluent, HazardSpec, Kb, Mode, Projector, TimeInterval, TimePoint, Verdict};

fn day(offset: i64) -> TimePoint {
    TimePoint::from_ymd(2000, 1, 1).unwrap().plus_days(offset)
}

/// Parent lists for a random DAG: node i may only point at lower indices.
fn dag() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1usize..=1000).prop_flat_map(|n| {
        (0..n)
            .map(|i| {
                if i == 0 {
                    Just(vec![]).boxed()
                } else {
                    prop::collection::vec(0..i, 0..=3).boxed()
                }
            })
            .collect::<Vec<_>>()
    })
}

fn spec_with(table: Vec<f64>, betas: &[f64]) -> HazardSpec {
    HazardSpec::new(
        FluentPattern::Collection("F".into()),
        365,
        Baseline::Table(table),
        betas
            .iter()
            .enumerate()
            .map(|(i, &b)| Covariate {
                pattern: FluentPattern::Collection(format!("C{i}")),
                beta: b,
            })
            .collect(),
    )
    .unwrap()
}

fn records() -> impl Strategy<Value = Vec<PersonPeriodRecord>> {
    prop::collection::vec((1u32..=6, any::<bool>(), any::<bool>()), 1..300).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (period, x, event))| PersonPeriodRecord {
                individual: format!("I{i}"),
                period,
                x: vec![x],
                event,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn genls_closure_matches_fixed_point(parents in dag(), probe in any::<prop::sample::Index>()) {
        let mut kb = Kb::new();
        for i in 0..parents.len() {
            kb.declare_collection(&format!("C{i}"));
        }
        for (i, ps) in parents.iter().enumerate() {
            for p in ps {
                kb.add_link(OntologyLink::new(LinkKind::Genls, format!("C{i}"), format!("C{p}"))).unwrap();
            }
        }
        let start = probe.index(parents.len());
        let mut want: BTreeSet<usize> = [start].into();
        loop {
            let next: BTreeSet<usize> = want.iter().flat_map(|&i| parents[i].iter().copied()).chain(want.iter().copied()).collect();
            if next == want {
                break;
            }
            want = next;
        }
        let want: BTreeSet<String> = want.into_iter().map(|i| format!("C{i}")).collect();
        prop_assert_eq!(kb.genls_closure(&format!("C{start}")).unwrap(), want);
    }
}

proptest! {
    #[test]
    fn holds_known_is_monotone(
        spans in prop::collection::vec((0i64..3000, 0i64..400, any::<bool>()), 1..6),
        qs in 0i64..3400,
        ql in 0i64..200,
        shrink in (0i64..100, 0i64..100),
    ) {
        let mut kb = Kb::new();
        kb.add_link(OntologyLink::new(LinkKind::Genls, "Spec", "Gen")).unwrap();
        for &(s, l, specific) in &spans {
            let col = if specific { "Spec" } else { "Gen" };
            kb.add_assertion(Fluent::isa("A", col), "BaseKB", TimeInterval::new(day(s), day(s + l)).unwrap()).unwrap();
        }
        let q = TimeInterval::new(day(qs), day(qs + ql)).unwrap();
        let inner_start = (qs + shrink.0).min(qs + ql);
        let inner = TimeInterval::new(day(inner_start), day((qs + ql - shrink.1).max(inner_start))).unwrap();
        for col in ["Spec", "Gen"] {
            let f = Fluent::isa("A", col);
            if kb.holds_known(&f, &q) {
                prop_assert!(kb.holds_known(&f, &inner));
            }
        }
        // What holds of the specialization holds of the generalization.
        if kb.holds_known(&Fluent::isa("A", "Spec"), &q) {
            prop_assert!(kb.holds_known(&Fluent::isa("A", "Gen"), &q));
        }
    }

    #[test]
    fn survival_identities_with_covariates(
        table in prop::collection::vec(0.0f64..1.0, 1..40),
        betas in prop::collection::vec(-3.0f64..3.0, 0..3),
        rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 0..60),
        k_max in 1u32..60,
    ) {
        let spec = spec_with(table, &betas);
        let rows: Vec<Vec<bool>> = rows.into_iter().map(|r| r[..betas.len()].to_vec()).collect();
        let traj = CovariateTrajectory::from_rows(rows);
        let mut s = 1.0;
        let mut total = 0.0;
        for k in 1..=k_max {
            let h = hazard_at(&spec, k, &traj.at(k, betas.len())).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
            let pmf = event_time_pmf(&spec, k, &traj).unwrap();
            prop_assert!((pmf - h * s).abs() <= 1e-15);
            total += pmf;
            s *= 1.0 - h;
            let got = survival(&spec, k, &traj).unwrap();
            prop_assert!((got - s).abs() <= 1e-12);
        }
        prop_assert!((total + s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cutoff_is_the_last_period_above_alpha(
        table in prop::collection::vec(0.0f64..0.5, 1..10),
        alpha in 0.05f64..0.95,
    ) {
        let spec = spec_with(table, &[]);
        let none = CovariateTrajectory::none();
        let s = |k: u32| if k == 0 { 1.0 } else { survival(&spec, k, &none).unwrap() };
        match survival_cutoff(&spec, &none, alpha, 200) {
            Ok(k) => {
                prop_assert!(s(k) > alpha);
                prop_assert!(s(k + 1) <= alpha);
            }
            Err(_) => prop_assert!(s(200) > alpha),
        }
    }

    #[test]
    fn gradient_matches_central_differences(
        recs in records(),
        alpha in prop::collection::vec(-3.0f64..1.0, 6),
        beta in -1.5f64..1.5,
    ) {
        let (ga, gb) = gradient(&alpha, &[beta], &recs).unwrap();
        let h = 1e-5;
        for i in 0..7 {
            let ll = |delta: f64| {
                let mut a = alpha.clone();
                let mut b = vec![beta];
                if i < 6 { a[i] += delta } else { b[0] += delta }
                log_likelihood(&a, &b, &recs).unwrap()
            };
            let fd = (ll(h) - ll(-h)) / (2.0 * h);
            let g = if i < 6 { ga[i] } else { gb[0] };
            prop_assert!((g - fd).abs() / g.abs().max(fd.abs()).max(1.0) < 1e-4, "param {} analytic {} fd {}", i, g, fd);
        }
    }

    #[test]
    fn saturated_fit_reproduces_empirical_hazard(
        counts in prop::collection::vec((5u64..60, 0.05f64..0.95), 1..6),
    ) {
        let mut recs = Vec::new();
        for (j, &(n, frac)) in counts.iter().enumerate() {
            let events = ((n as f64 * frac).round() as u64).clamp(1, n - 1);
            for i in 0..n {
                recs.push(PersonPeriodRecord {
                    individual: format!("P{j}-{i}"),
                    period: j as u32 + 1,
                    x: vec![],
                    event: i < events,
                });
            }
        }
        let cfg = FitConfig { pool_sparse: false, ..FitConfig::default() };
        let f = fit(&recs, &cfg).unwrap();
        prop_assert!(f.converged);
        for j in 1..=f.n_periods() {
            let empirical = f.events[j as usize - 1] as f64 / f.at_risk[j as usize - 1] as f64;
            prop_assert!((f.period_hazard(j) - empirical).abs() < 1e-6, "period {}: {} vs {}", j, f.period_hazard(j), empirical);
        }
    }
}

#[test]
fn projected_intervals_satisfy_pointwise_survival() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..4000 {
        let sc = common::random_scenario(&mut rng);
        let Some(table) = sc.table.clone() else { continue };
        // Without risk events the interval starts at its own origin.
        if sc.events.iter().any(|e| e.kind == common::Kind::Risk) {
            continue;
        }
        let corpus = sc.corpus();
        let f = Fluent::isa("A", "Active");
        let r = Projector::new(&corpus).temporally_project(&f, &sc.query, sc.alpha).unwrap();
        let Some(iv) = r.interval else { continue };
        let origin = match r.source.map(|s| s.to_string()).as_deref() {
            Some("hazard-subsumed") | Some("forward-from-event") => iv.start(),
            _ => continue,
        };
        let k = (iv.end().days_since(origin)) / sc.period_days;
        let spec = spec_with(table, &[]);
        let none = CovariateTrajectory::none();
        let s = |k: i64| if k == 0 { 1.0 } else { survival(&spec, k as u32, &none).unwrap() };
        assert!(s(k) > sc.alpha, "survival at the right end must exceed alpha: {}", sc.text());
        if k < common::HORIZON as i64 {
            assert!(s(k + 1) <= sc.alpha, "one more period must fall to alpha or below");
        }
        checked += 1;
    }
    assert!(checked > 30, "only {checked} hazard-derived intervals");
}

#[test]
fn m1_true_implies_m2_true() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let sc = common::random_scenario(&mut rng);
        let corpus = sc.corpus();
        let p = Projector::new(&corpus);
        let f = Fluent::isa("A", "Active");
        if p.answer(&f, &sc.query, Mode::M1, sc.alpha).verdict == Verdict::True {
            assert_eq!(p.answer(&f, &sc.query, Mode::M2, sc.alpha).verdict, Verdict::True);
        }
    }
}
