use std::f64::consts::{E, LN_2};

use bimean::expr::FunctionSpec;
use bimean::inequalities::*;
use bimean::means::PositivePair;
use bimean::report::{to_json, write_csv};
use bimean::sampling::IntervalSpec;

fn f(text: &str) -> FunctionSpec {
    FunctionSpec::parse(text).unwrap()
}

fn pair(x: f64, y: f64) -> PositivePair {
    PositivePair::new(x, y).unwrap()
}

fn cfg() -> AuditConfig {
    AuditConfig::new(0)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn ebanks_fixtures() {
    let r = ebanks_check(&f("x^2"), &[pair(1.0, 4.0)], &cfg()).unwrap();
    let e = r.ebanks.as_ref().unwrap();
    assert!(close(e.inner_mean, 5f64.sqrt(), 1e-15));
    assert!(close(e.p, 5.0, 1e-12), "{}", e.p);
    assert!(close(e.r, 7.0, 1e-12), "{}", e.r);
    assert_eq!(r.failures(), 0);
    assert!(r.flagged_preconditions().next().is_none());

    let r = ebanks_check(&f("exp(x)"), &[pair(1.0, 2.0)], &cfg()).unwrap();
    let e = r.ebanks.unwrap();
    assert!(close(e.p, 4.290809093848916, 1e-12), "{}", e.p);
    assert!(close(e.r, E * E - E, 1e-12), "{}", e.r);

    let r = ebanks_check(&f("x"), &[pair(2.0, 2.0), pair(1.0, 3.0)], &cfg()).unwrap();
    assert_eq!(r.failures(), 0);
}

#[test]
fn identric_fixtures() {
    let lower = identric_sandwich(&f("exp(x)"), &[pair(1.0, 2.0)], IdentricProfile::Lower, &cfg()).unwrap();
    let w = lower.inequalities[0].worst_witness.clone().unwrap();
    assert!(close(w.lhs, 4.864562127047055, 1e-12), "{}", w.lhs);
    assert!(close(w.rhs, 4.355841268575315, 1e-12), "{}", w.rhs);
    assert_eq!(lower.failures(), 0);

    let upper = identric_sandwich(&f("sqrt(x)"), &[pair(1.0, 4.0)], IdentricProfile::Upper, &cfg()).unwrap();
    let w = upper.inequalities[0].worst_witness.clone().unwrap();
    assert!(close(w.lhs, 1.4715177646857693, 1e-12));
    assert!(close(w.rhs, 2.5f64.sqrt(), 1e-15));
    assert_eq!(upper.failures(), 0);

    let bad = identric_sandwich(&f("exp(x)"), &[pair(1.0, 2.0)], IdentricProfile::Upper, &cfg()).unwrap();
    let q = &bad.inequalities[0];
    assert_eq!(q.failures, 1);
    let w = &q.failure_witnesses[0];
    assert!((w.lhs - w.rhs - 0.38287305670899).abs() < 1e-12);
    assert!((w.lhs - w.rhs - 0.3834).abs() < 1e-3);
    assert!(!q.from_proof);
    assert_eq!(
        bad.precondition("concave").unwrap().status,
        PreconditionStatus::Unmet
    );
}

#[test]
fn alzer_fixtures() {
    let square = alzer_sandwich(&f("x^2"), 1.0, &[pair(1.0, 3.0)], AlzerPart::One, &cfg()).unwrap();
    let lower = square.inequality(ALZER_LOWER).unwrap();
    let w = lower.worst_witness.as_ref().unwrap();
    assert_eq!((w.lhs, w.rhs), (5.0, 4.0));
    assert_eq!(lower.failures, 0);
    let upper = square.inequality(ALZER_UPPER).unwrap();
    assert_eq!(upper.failures, 1);
    let w = &upper.failure_witnesses[0];
    assert_eq!((w.lhs, w.rhs), (5.0, 4.0));

    let exp = alzer_sandwich(&f("exp(x)"), 0.0, &[pair(1.0, 2.0)], AlzerPart::One, &cfg()).unwrap();
    let side = |d: &str| exp.inequality(d).unwrap().worst_witness.clone().unwrap();
    let (s1, s2, s3) = (side(ALZER_STEP_1), side(ALZER_STEP_2), side(ALZER_STEP_3));
    assert!(close(s1.lhs, E * E - E, 1e-12));
    assert!(close(s1.rhs, E * E - E, 1e-10));
    assert!(close(s2.rhs, 1.5f64.exp(), 1e-15));
    assert!(close(s3.rhs, (1.0 / LN_2).exp(), 1e-12));
    for d in [ALZER_LOWER, ALZER_STEP_1, ALZER_STEP_2, ALZER_STEP_3] {
        assert_eq!(exp.inequality(d).unwrap().failures, 0, "{d}");
    }
    assert_eq!(exp.precondition("aux_proof_increasing").unwrap().status, PreconditionStatus::Met);
}

#[test]
fn alzer_auxiliary_readings_are_both_reported() {
    let pairs = IntervalSpec::new(0.5, 3.0, 50, 1).unwrap().pairs();
    let r = alzer_sandwich(&f("x^2"), -0.5, &pairs, AlzerPart::One, &cfg()).unwrap();
    // f^p = x^-1 falls, and f^(p-1) f' = 2 x^-2 falls as well.
    assert_eq!(r.precondition("aux_literal_increasing").unwrap().status, PreconditionStatus::Unmet);
    assert_eq!(r.precondition("aux_proof_increasing").unwrap().status, PreconditionStatus::Unmet);
    let r = alzer_sandwich(&f("x^2"), 0.5, &pairs, AlzerPart::One, &cfg()).unwrap();
    assert_eq!(r.precondition("aux_literal_increasing").unwrap().status, PreconditionStatus::Met);
    assert_eq!(r.precondition("aux_proof_increasing").unwrap().status, PreconditionStatus::Met);
    let two = alzer_sandwich(&f("1/x"), 2.0, &pairs, AlzerPart::Two, &cfg()).unwrap();
    assert_eq!(two.precondition("p_above_1").unwrap().status, PreconditionStatus::Met);
    assert_eq!(two.precondition("strictly_decreasing").unwrap().status, PreconditionStatus::Met);
    assert_eq!(two.inequalities.len(), 2);
}

#[test]
fn chebyshev_fixtures() {
    let id = |t: f64| t;
    let one = |_: f64| 1.0;
    let r = chebyshev_check(&id, &id, &one, 0.0, 1.0, &cfg()).unwrap();
    let w = r.inequalities[0].worst_witness.clone().unwrap();
    assert!(close(w.lhs, 0.25, 1e-10) && close(w.rhs, 1.0 / 3.0, 1e-10));
    assert_eq!(r.failures(), 0);

    let neg = |t: f64| -t;
    let r = chebyshev_check(&id, &neg, &one, 0.0, 1.0, &cfg()).unwrap();
    let q = &r.inequalities[0];
    assert!(q.description.contains(">="));
    let w = q.worst_witness.clone().unwrap();
    assert!(close(w.lhs, -0.25, 1e-10) && close(w.rhs, -1.0 / 3.0, 1e-10));
    assert_eq!(r.failures(), 0);

    let c = |_: f64| 2.0;
    let r = chebyshev_check(&c, &c, &one, 0.0, 1.0, &cfg()).unwrap();
    assert!(r.inequalities[0].min_margin.abs() < 1e-12);

    assert!(matches!(
        chebyshev_check(&f64::sin, &id, &one, 0.0, 10.0, &cfg()),
        Err(AuditError::PreconditionUnmet { .. })
    ));
}

#[test]
fn jensen_fixtures() {
    let id = |t: f64| t;
    let r = jensen_check(&f("x^2"), &id, 0.0, 1.0, &cfg()).unwrap();
    let w = r.inequalities[0].worst_witness.clone().unwrap();
    assert!(close(w.lhs, 0.25, 1e-10) && close(w.rhs, 1.0 / 3.0, 1e-10));
    assert_eq!(r.failures(), 0);

    let r = jensen_check(&f("sqrt(x)"), &id, 0.0, 1.0, &cfg()).unwrap();
    let q = &r.inequalities[0];
    assert!(q.description.contains(">="));
    let w = q.worst_witness.clone().unwrap();
    assert!(close(w.lhs, 0.5f64.sqrt(), 1e-10) && close(w.rhs, 2.0 / 3.0, 1e-10));

    let r = jensen_check(&f("3*x + 1"), &|t: f64| t * t, 0.5, 2.0, &cfg()).unwrap();
    assert!(r.inequalities[0].min_margin.abs() < 1e-12);
}

#[test]
fn mean_chain_fixtures() {
    let cfg = AuditConfig {
        tolerances: Tolerances::default().with_equality(MEAN_CHAIN_TOL),
        seed: 0,
    };
    let r = mean_chain(&[pair(1.0, E)], &cfg).unwrap();
    let li = r.inequalities[0].worst_witness.clone().unwrap();
    let ia = r.inequalities[1].worst_witness.clone().unwrap();
    assert!(close(li.lhs, E - 1.0, 1e-15));
    assert!(close(li.rhs, 1.7895723968418335, 1e-14));
    assert!(close(ia.rhs, (1.0 + E) / 2.0, 1e-15));
    let r = mean_chain(&[pair(3.0, 3.0), pair(1.0, 1e6)], &cfg).unwrap();
    assert_eq!(r.failures(), 0);
    assert!(r.inequalities[1].worst_witness.as_ref().unwrap().margin == 0.0);
}

#[test]
fn alzer_monotone_fixtures() {
    let r = alzer_monotone(&[pair(1.0, 2.0)], &[-2.0, -1.0, 0.0, 1.0, 2.0], &cfg()).unwrap();
    assert_eq!(r.failures(), 0);
    assert_eq!(r.inequalities[0].pairs_tested, 4);
    assert!(r.inequalities[0].min_margin > 0.0);
    let dense = alzer_monotone(&[pair(1.0, 2.0)], &default_p_grid(), &cfg()).unwrap();
    assert_eq!(dense.failures(), 0);
    let diag = alzer_monotone(&[pair(5.0, 5.0)], &default_p_grid(), &cfg()).unwrap();
    assert_eq!(diag.inequalities[0].min_margin, 0.0);
}

#[test]
fn ll_al_fixtures() {
    let r = ll_al_check(&f("exp(x)"), &[pair(1.0, 2.0)], &cfg()).unwrap();
    let ll = r.inequalities[0].worst_witness.clone().unwrap();
    let al = r.inequalities[1].worst_witness.clone().unwrap();
    assert!(close(ll.rhs, E * E - E, 1e-12));
    assert!(close(ll.lhs, 4.232086106557082, 1e-12));
    assert!(close(al.lhs, 1.5f64.exp(), 1e-15));
    assert_eq!(r.failures(), 0);

    let pairs = IntervalSpec::new(0.5, 3.0, 1000, 3).unwrap().pairs();
    let r = ll_al_check(&f("exp(x^2)"), &pairs, &cfg()).unwrap();
    assert_eq!(r.failures(), 0);
    assert_eq!(r.precondition("log_convex").unwrap().status, PreconditionStatus::Met);
}

#[test]
fn audit_all_collects_reports() {
    let plan = IntervalSpec::new(0.5, 4.0, 200, 42).unwrap();
    let tol = Tolerances::default();
    let empty = audit_all(&[], &plan, &tol);
    assert!(empty.reports.is_empty() && empty.errors.is_empty());

    let one = [CatalogEntry::new("ebanks", AuditKind::Ebanks, f("x^2"))];
    assert_eq!(audit_all(&one, &plan, &tol).reports.len(), 1);

    let broken = [
        CatalogEntry::new("ebanks", AuditKind::Ebanks, f("ln(x - 1)")),
        CatalogEntry::new("chain", AuditKind::MeanChain, f("x")),
    ];
    let run = audit_all(&broken, &plan, &tol);
    assert_eq!(run.reports.len(), 1);
    assert_eq!(run.errors.len(), 1);
    assert_eq!(run.errors[0].0, "ebanks");
}

#[test]
fn builtin_catalog_has_no_failures_where_preconditions_hold() {
    let plan = IntervalSpec::new(1e-2, 1e2, 300, 42).unwrap();
    let run = audit_all(&builtin_catalog(), &plan, &Tolerances::default());
    assert!(run.errors.is_empty(), "{:?}", run.errors);
    for r in &run.reports {
        for q in &r.inequalities {
            if q.from_proof && r.requirements_met(q) {
                assert_eq!(q.failures, 0, "{} {}: {}", r.name, r.subject, q.description);
            }
        }
    }
}

#[test]
fn reports_round_trip_and_reproduce() {
    let pairs = IntervalSpec::new(0.1, 5.0, 100, 9).unwrap().pairs();
    let a = alzer_sandwich(&f("exp(x)"), 0.5, &pairs, AlzerPart::One, &cfg()).unwrap();
    let b = alzer_sandwich(&f("exp(x)"), 0.5, &pairs, AlzerPart::One, &cfg()).unwrap();
    assert_eq!(a, b);
    for (x, y) in a.inequalities.iter().zip(&b.inequalities) {
        assert_eq!(x.min_margin.to_bits(), y.min_margin.to_bits());
    }
    let json = to_json(&a).unwrap();
    let back: CheckReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a);

    let e = ebanks_check(&f("x^2"), &[pair(1.0, 4.0)], &cfg()).unwrap();
    let json = to_json(&e).unwrap();
    assert!(json.contains("\"P\":5"), "{json}");
    assert_eq!(serde_json::from_str::<CheckReport>(&json).unwrap(), e);

    let mut csv = Vec::new();
    write_csv(&[a, e], &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 5 + 1);
    assert!(text.starts_with("report,subject,inequality"));
}

#[test]
fn failure_count_matches_min_margin() {
    let pairs = IntervalSpec::new(0.5, 3.0, 300, 5).unwrap().pairs();
    for p in [-2.0, 0.0, 1.0] {
        let r = alzer_sandwich(&f("x^2"), p, &pairs, AlzerPart::One, &cfg()).unwrap();
        for q in &r.inequalities {
            let tol = r.tolerances.equality;
            assert_eq!(q.failures == 0, q.min_margin >= -tol, "{}", q.description);
            for w in &q.failure_witnesses {
                assert!(w.margin < -tol);
            }
        }
    }
}
