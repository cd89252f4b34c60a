use bimean::convexity::{
    criterion_check, criterion_quantity, definitional_check, nine_case_check, Outcome, PQPair,
    Probe, Verdict, EQUALITY_TOL,
};
use bimean::expr::{Builtin, FunctionSpec};
use bimean::means::{mean, MeanKind};
use bimean::sampling::IntervalSpec;

const LETTERS: [MeanKind; 3] = [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic];

fn catalog() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::builtin(Builtin::Power(2.0)),
        FunctionSpec::builtin(Builtin::Power(0.5)),
        FunctionSpec::builtin(Builtin::Power(-1.0)),
        FunctionSpec::builtin(Builtin::Exp),
        FunctionSpec::builtin(Builtin::Log1p),
        FunctionSpec::builtin(Builtin::XExp),
        FunctionSpec::parse("x^3 + x").unwrap(),
        FunctionSpec::parse("exp(x^2)").unwrap(),
        FunctionSpec::parse("cosh(x)").unwrap(),
    ]
}

fn plan(lo: f64, hi: f64, samples: usize) -> IntervalSpec {
    IntervalSpec::new(lo, hi, samples, 42).unwrap()
}

/// Re-evaluates a witness from scratch and returns its normalized margin.
fn recheck(f: &FunctionSpec, pq: Option<PQPair>, m: MeanKind, n: MeanKind, w: &bimean::convexity::Witness) -> f64 {
    let (lhs, rhs) = match w.probe {
        Probe::Pair => {
            let (x, y) = (w.points[0], w.points[1]);
            let lhs = f.eval(mean(m, x, y).unwrap()).unwrap();
            let rhs = mean(n, f.eval(x).unwrap(), f.eval(y).unwrap()).unwrap();
            (lhs, rhs)
        }
        Probe::Grid => {
            let pq = pq.unwrap();
            let g = |x: f64| criterion_quantity(pq, x, f.eval(x).unwrap(), f.derivative(x).unwrap());
            (g(w.points[0]), g(w.points[1]))
        }
    };
    (rhs - lhs) / (1.0 + lhs.abs() + rhs.abs())
}

fn assert_witnesses_valid(
    v: &Verdict,
    f: &FunctionSpec,
    pq: Option<PQPair>,
    m: MeanKind,
    n: MeanKind,
) {
    for w in &v.witnesses {
        let margin = recheck(f, pq, m, n, w);
        let claimed_convex = matches!(w.violates, bimean::convexity::Direction::Convex);
        if claimed_convex {
            assert!(margin < -EQUALITY_TOL / 2.0, "{f} {m}{n}: {w:?} rechecked {margin}");
        } else {
            assert!(margin > EQUALITY_TOL / 2.0, "{f} {m}{n}: {w:?} rechecked {margin}");
        }
    }
}

#[test]
fn definition_and_criterion_agree_on_the_catalog() {
    let iv = plan(0.5, 4.0, 2000);
    let mut disagreements = Vec::new();
    let mut compared = 0;
    for f in catalog() {
        for m in LETTERS {
            for n in LETTERS {
                let d = definitional_check(&f, m, n, &iv, EQUALITY_TOL).unwrap();
                let c = nine_case_check(&f, m, n, &iv).unwrap();
                if d.outcome == Outcome::Inconclusive || c.outcome == Outcome::Inconclusive {
                    continue;
                }
                compared += 1;
                if d.outcome != c.outcome {
                    disagreements.push(format!("{f} {m}{n}: definition {:?}, criterion {:?}", d.outcome, c.outcome));
                }
                let pq = PQPair::from_letters(m, n).unwrap();
                assert_witnesses_valid(&d, &f, None, m, n);
                assert_witnesses_valid(&c, &f, Some(pq), m, n);
            }
        }
    }
    assert!(compared >= 8 * 9);
    assert!(disagreements.is_empty(), "{}", disagreements.join("\n"));
}

#[test]
fn letter_map_is_the_criterion() {
    let iv = plan(0.2, 5.0, 300);
    for f in catalog() {
        for m in LETTERS {
            for n in LETTERS {
                let pq = PQPair::from_letters(m, n).unwrap();
                assert_eq!(
                    nine_case_check(&f, m, n, &iv).unwrap(),
                    criterion_check(&f, pq, &iv, EQUALITY_TOL).unwrap()
                );
            }
        }
    }
}

#[test]
fn exact_equality_families_are_both_hold() {
    let iv = plan(0.1, 5.0, 1000);
    let exp = FunctionSpec::builtin(Builtin::Exp);
    for v in [
        definitional_check(&exp, MeanKind::Arithmetic, MeanKind::Geometric, &iv, EQUALITY_TOL).unwrap(),
        nine_case_check(&exp, MeanKind::Arithmetic, MeanKind::Geometric, &iv).unwrap(),
    ] {
        assert_eq!(v.outcome, Outcome::BothHold);
        assert!(v.witnesses.is_empty());
    }
    for a in [-3.0, -1.0, -0.5, 0.5, 2.0, 7.0] {
        let f = FunctionSpec::builtin(Builtin::Power(a));
        let d = definitional_check(&f, MeanKind::Geometric, MeanKind::Geometric, &iv, EQUALITY_TOL).unwrap();
        let c = nine_case_check(&f, MeanKind::Geometric, MeanKind::Geometric, &iv).unwrap();
        assert_eq!(d.outcome, Outcome::BothHold, "x^{a}");
        assert_eq!(c.outcome, Outcome::BothHold, "x^{a}");
    }
}

#[test]
fn documented_examples() {
    let square = FunctionSpec::builtin(Builtin::Power(2.0));
    let wide = plan(0.1, 10.0, 2000);
    let aa = definitional_check(&square, MeanKind::Arithmetic, MeanKind::Arithmetic, &wide, EQUALITY_TOL).unwrap();
    assert_eq!(aa.outcome, Outcome::ConvexHolds);
    assert!(aa.min_margin >= -EQUALITY_TOL);

    let ha = nine_case_check(&square, MeanKind::Harmonic, MeanKind::Arithmetic, &wide).unwrap();
    assert_eq!(ha.outcome, Outcome::ConvexHolds);
    let ha_def = definitional_check(&square, MeanKind::Harmonic, MeanKind::Arithmetic, &wide, EQUALITY_TOL).unwrap();
    assert_eq!(ha_def.outcome, Outcome::ConvexHolds);

    let recip = FunctionSpec::builtin(Builtin::Power(-1.0));
    let many = plan(0.1, 10.0, 10_000);
    let hh = nine_case_check(&recip, MeanKind::Harmonic, MeanKind::Harmonic, &many).unwrap();
    let hh_def = definitional_check(&recip, MeanKind::Harmonic, MeanKind::Harmonic, &many, EQUALITY_TOL).unwrap();
    assert_eq!(hh.outcome, Outcome::ConcaveHolds);
    assert_eq!(hh_def.outcome, Outcome::ConcaveHolds);

    let log1p = FunctionSpec::builtin(Builtin::Log1p);
    let gg = nine_case_check(&log1p, MeanKind::Geometric, MeanKind::Geometric, &plan(0.5, 50.0, 1000)).unwrap();
    assert_eq!(gg.outcome, Outcome::ConcaveHolds);
}

#[test]
fn aa_criterion_matches_definition_on_a_thousand_pairs() {
    let iv = plan(0.3, 6.0, 1000);
    for f in catalog() {
        let d = definitional_check(&f, MeanKind::Arithmetic, MeanKind::Arithmetic, &iv, EQUALITY_TOL).unwrap();
        let c = criterion_check(&f, PQPair::new(1.0, 1.0), &iv, EQUALITY_TOL).unwrap();
        assert_eq!(d.outcome, c.outcome, "{f}");
    }
}

#[test]
fn neither_carries_a_witness_per_direction() {
    // f' = 3x^2 - 12x falls until x = 2 and rises after.
    let f = FunctionSpec::parse("x^3 - 6*x^2").unwrap();
    let iv = plan(1.0, 20.0, 2000);
    let v = criterion_check(&f, PQPair::new(1.0, 1.0), &iv, EQUALITY_TOL).unwrap();
    assert_witnesses_valid(&v, &f, Some(PQPair::new(1.0, 1.0)), MeanKind::Arithmetic, MeanKind::Arithmetic);
    assert_eq!(v.outcome, Outcome::NeitherHolds);
    assert_eq!(v.witnesses.len(), 2);
    assert_ne!(v.witnesses[0].violates, v.witnesses[1].violates);
}

#[test]
fn verdicts_survive_rescaling_for_powers() {
    for a in [-2.0, -0.5, 0.5, 1.5, 3.0] {
        let f = FunctionSpec::builtin(Builtin::Power(a));
        for m in LETTERS {
            for n in LETTERS {
                let base = plan(0.1, 10.0, 500);
                let crit = nine_case_check(&f, m, n, &base).unwrap().outcome;
                let def = definitional_check(&f, m, n, &base, EQUALITY_TOL).unwrap().outcome;
                for k in [-3, -1, 1, 3] {
                    let s = 10f64.powi(k);
                    let scaled = plan(0.1 * s, 10.0 * s, 500);
                    assert_eq!(nine_case_check(&f, m, n, &scaled).unwrap().outcome, crit, "x^{a} {m}{n} 1e{k}");
                    assert_eq!(
                        definitional_check(&f, m, n, &scaled, EQUALITY_TOL).unwrap().outcome,
                        def,
                        "x^{a} {m}{n} 1e{k}"
                    );
                }
            }
        }
    }
}

#[test]
fn checks_are_reproducible() {
    let f = FunctionSpec::parse("x^3 + x").unwrap();
    let iv = plan(0.5, 4.0, 500);
    let a = definitional_check(&f, MeanKind::Geometric, MeanKind::Harmonic, &iv, EQUALITY_TOL).unwrap();
    let b = definitional_check(&f, MeanKind::Geometric, MeanKind::Harmonic, &iv, EQUALITY_TOL).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.min_margin.to_bits(), b.min_margin.to_bits());
}
