use std::path::PathBuf;
use std::process::{Command, Output};
use tailclass_cli::*;
use tailclass_core::{ClassId, FamilySpec, IndexFlag, Verdict};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report_of(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a JSON report")
}

#[test]
fn parses_a_single_model_classify() {
    let c = parse_config(["classify", "--model", "pareto:a=2"]).unwrap();
    assert_eq!(c.command, tailclass_cli::Command::Classify);
    assert_eq!(c.models, vec![FamilySpec::Pareto { a: 2.0 }]);
    assert_eq!(c.grid, GridOverrides::default());
    assert_eq!(c.classifier, tailclass_core::ClassifierConfig::default());
    assert_eq!(c.output, OutputFormat::Json);
    assert_eq!(c.output_path, None);
}

#[test]
fn parses_a_two_model_convolve() {
    let c = parse_config(["convolve", "--model", "pareto:a=2", "--model", "pareto:a=3", "--out", "csv"]).unwrap();
    assert_eq!(c.command, tailclass_cli::Command::Convolve);
    assert_eq!(c.models, vec![FamilySpec::Pareto { a: 2.0 }, FamilySpec::Pareto { a: 3.0 }]);
    assert_eq!(c.output, OutputFormat::Csv);
}

#[test]
fn parses_overrides() {
    let c = parse_config([
        "pitman",
        "--model",
        "weibull:shape=0.5",
        "--x-start",
        "2",
        "--grid-ratio",
        "1.5",
        "--grid-count",
        "40",
        "--window",
        "10",
        "--u-grid",
        "2,4,8,16",
        "--kappa",
        "0.25,1",
        "--tol",
        "0.05",
        "--rel-tol",
        "1e-8",
    ])
    .unwrap();
    assert_eq!(
        c.grid,
        GridOverrides {
            x_start: Some(2.0),
            ratio: Some(1.5),
            count: Some(40),
            window: Some(10)
        }
    );
    assert_eq!(c.classifier.u_grid, vec![2.0, 4.0, 8.0, 16.0]);
    assert_eq!(c.classifier.kappas, vec![0.25, 1.0]);
    assert_eq!(c.classifier.tol, 0.05);
    assert_eq!(c.classifier.quad.rel_tol, 1e-8);
}

#[test]
fn rejects_bad_command_lines() {
    let cases: &[(&[&str], Option<&str>)] = &[
        (&["classify"], None),
        (&["convolve", "--model", "pareto:a=2"], None),
        (&["classify", "--model", "pareto:a=2", "--model", "exp"], None),
        (&["classify", "--model", "pareto:a=-1"], Some("pareto:a=-1")),
        (&["classify", "--model", "cauchy"], Some("cauchy")),
        (&["classify", "--model", "pareto:a=2", "--out", "csv"], Some("csv")),
        (&["classify", "--model", "pareto:a=2", "--grid-count", "many"], Some("many")),
        (&["classify", "--model", "pareto:a=2", "--x-start", "0.5"], None),
        (&["classify", "--model", "pareto:a=2", "--window", "4"], None),
        (&["frobnicate", "--model", "pareto:a=2"], Some("frobnicate")),
    ];
    for (argv, token) in cases {
        let e = parse_config(argv.iter().copied()).expect_err(&format!("{argv:?} should be rejected"));
        assert_eq!(e.exit_code(), EXIT_USAGE, "{argv:?}");
        if let Some(t) = token {
            assert_eq!(e.token(), Some(*t), "{argv:?}: {e}");
        }
    }
    let out = bin(&["classify"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn help_is_not_an_error() {
    let out = bin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("classify"));
}

#[test]
fn classify_pareto_is_a_member_of_every_class() {
    let out = bin(&["classify", "--model", "pareto:a=2"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = report_of(&out);
    let classes: Vec<ClassId> = r.verdicts.iter().map(|v| v.class).collect();
    assert_eq!(
        classes,
        [ClassId::D, ClassId::E, ClassId::L, ClassId::S, ClassId::A, ClassId::DcapA]
    );
    assert!(r.verdicts.iter().all(|v| v.verdict == Verdict::Member), "{:#?}", r.verdicts);
    let h = r.hazard_limits.unwrap();
    assert!((h.xh.lower - 2.0).abs() < 1e-9 && (h.xh.upper - 2.0).abs() < 1e-9);
}

#[test]
fn indices_of_the_exponential_are_flagged() {
    let out = bin(&["indices", "--model", "exp:rate=1"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = report_of(&out);
    let ix = r.indices.unwrap();
    assert!(ix.tail.flags.contains(&IndexFlag::DeltaPosInfinite), "{:?}", ix.tail);
    assert_eq!(ix.tail.delta, f64::INFINITY);
    let h = r.hazard_limits.unwrap();
    assert_eq!(h.m2_finite, Verdict::NonMember);
    assert!(h.flags.iter().any(|f| f == "M2 unbounded"), "{:?}", h.flags);
}

#[test]
fn verify_pareto_pair_reports_closure() {
    let out = bin(&["verify", "--model", "pareto:a=2", "--model", "pareto:a=3"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = report_of(&out);
    let c = r.closure.unwrap();
    assert!(c.preconditions.satisfied, "{}", c.preconditions.reason);
    assert_eq!(c.convolution_e.verdict, Verdict::Member);
    assert_eq!(c.e_claim_holds, Some(true));
}

#[test]
fn verify_single_model_runs_the_bound_suite() {
    let out = bin(&["verify", "--model", "burr:c=2,k=1"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = report_of(&out);
    assert!(!r.bounds.is_empty());
    assert!(r.bounds.iter().all(|b| b.holds && !b.hypothesis_violated), "{:#?}", r.bounds);
}

#[test]
fn inconclusive_verdicts_exit_with_three() {
    let out = bin(&["pitman", "--model", "exp:rate=1", "--grid-count", "30"]);
    assert_eq!(out.status.code(), Some(EXIT_INCONCLUSIVE));
    let r = report_of(&out);
    assert_eq!(r.verdicts.len(), 1);
    assert_eq!(r.verdicts[0].verdict, Verdict::Inconclusive);
    assert!(r.verdicts[0].reason.contains("positive decrease not established"));
}

#[test]
fn convolve_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = bin(&[
        "convolve",
        "--model",
        "exp:rate=1",
        "--model",
        "exp:rate=1",
        "--out",
        "csv",
        "--x-start",
        "0.5",
        "--grid-count",
        "24",
        "--output-path",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CONVOLVE_CSV_HEADER));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 24);
    for r in rows {
        let x = r[0];
        assert!((r[1] / (x * (-x).exp()) - 1.0).abs() < 1e-8, "density at {x}");
        assert!((r[2] / ((1.0 + x) * (-x).exp()) - 1.0).abs() < 1e-8, "tail at {x}");
        assert!((r[3] / (x / (1.0 + x)) - 1.0).abs() < 1e-8, "hazard at {x}");
        assert!((r[4] / ((1.0 + x) / 2.0) - 1.0).abs() < 1e-8, "max-sum ratio at {x}");
    }
}

#[test]
fn pitman_writes_csv() {
    let out = bin(&["pitman", "--model", "pareto:a=2", "--out", "csv", "--grid-count", "60", "--kappa", "1,2"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(PITMAN_CSV_HEADER));
    assert_eq!(lines.count(), 120);
}

#[test]
fn text_output_names_every_verdict() {
    let out = bin(&["classify", "--model", "lpp:a=2,p=0.3", "--out", "text"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    for class in ["D ", "E ", "L ", "S ", "A ", "DcapA"] {
        assert!(text.lines().any(|l| l.trim_start().starts_with(class)), "missing {class}:\n{text}");
    }
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let config = parse_config(["classify", "--model", "weibull:shape=0.5,scale=1"]).unwrap();
    let a = run(&config).unwrap();
    let b = run(&config).unwrap();
    assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());

    let json = a.to_json().unwrap();
    let back = Report::from_json(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);
    assert_eq!(back.timings, a.timings);
}

/// Canonical JSON of `indices --model pareto:a=2` is pinned in
/// `tests/golden`. Set `UPDATE_GOLDEN=1` to rewrite it after an intended change.
#[test]
fn indices_report_matches_golden() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/indices_pareto2.json");
    let config = parse_config(["indices", "--model", "pareto:a=2"]).unwrap();
    let got = run(&config).unwrap().canonical_json().unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file exists; run with UPDATE_GOLDEN=1 to create it");
    let (got_v, want_v): (serde_json::Value, serde_json::Value) =
        (serde_json::from_str(&got).unwrap(), serde_json::from_str(&want).unwrap());
    assert_eq!(got_v, want_v, "report differs from {}", path.display());
}
