use bimean::inequalities::{ebanks_check, AuditConfig, CheckReport};
use bimean::expr::FunctionSpec;
use bimean::sampling::IntervalSpec;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = bimean_cli::run(std::iter::once("bimean").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn json_report_matches_library_and_round_trips() {
    let (code, out, err) = run(&["verify", "--suite", "ebanks", "--f", "exp(x)", "--trials", "200", "--seed", "11"]);
    assert_eq!(code, 0, "{err}");
    let parsed: CheckReport = serde_json::from_str(out.trim()).unwrap();
    let pairs = IntervalSpec::new(1e-2, 1e2, 200, 11).unwrap().pairs();
    let direct = ebanks_check(&FunctionSpec::parse("exp(x)").unwrap(), &pairs, &AuditConfig::new(11)).unwrap();
    assert_eq!(parsed, direct);
    assert_eq!(bimean::report::to_json(&parsed).unwrap(), out.trim());
}

#[test]
fn seed_defaults_to_zero() {
    let implicit = run(&["verify", "--suite", "chain", "--trials", "300"]);
    let explicit = run(&["verify", "--suite", "chain", "--trials", "300", "--seed", "0"]);
    let other = run(&["verify", "--suite", "chain", "--trials", "300", "--seed", "1"]);
    assert_eq!(implicit, explicit);
    assert_ne!(implicit.1, other.1);
}

#[test]
fn results_and_diagnostics_use_separate_streams() {
    let (code, out, err) = run(&["mean", "eval", "--kind", "G", "--x", "0", "--y", "1"]);
    assert_eq!(code, 65);
    assert!(out.is_empty());
    assert!(err.contains("positive"));

    let (code, out, err) = run(&["convexity", "--f", "x^2", "--m", "A", "--n", "A", "--extra"]);
    assert_eq!(code, 64);
    assert!(out.is_empty() && !err.is_empty());

    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn pairs_file_is_read() {
    let path = std::env::temp_dir().join(format!("bimean-pairs-{}.txt", std::process::id()));
    std::fs::write(&path, "# header\n1 2\n\n  4 4  # diagonal\n").unwrap();
    let (code, out, err) = run(&["mean", "table", "--kinds", "A,H", "--pairs", path.to_str().unwrap(), "--format", "json"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0, "{err}");
    let rows: Vec<serde_json::Value> = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["H"].as_f64(), Some(4.0 / 3.0));
    assert_eq!(rows[1]["A"].as_f64(), Some(4.0));
}

#[test]
fn convexity_exit_codes() {
    let (code, out, _) = run(&["convexity", "--f", "x^2", "--m", "A", "--n", "A", "--samples", "200"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"outcome\":\"ConvexHolds\""));
    let (code, _, _) = run(&["convexity", "--f", "x^2", "--m", "L", "--n", "A", "--method", "criterion"]);
    assert_eq!(code, 65);
    let (code, out, _) = run(&["convexity", "--f", "x^2", "--pq", "2,1", "--samples", "200"]);
    assert_eq!(code, 0, "{out}");
}
