use std::path::PathBuf;
use std::process::{Command, Output};

use satmatch::market::{Market, MarketFile};
use satmatch::report::Report;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

fn satmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satmatch")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn structured(args: &[&str]) -> (Report, i32) {
    let mut all = vec!["--format", "structured"];
    all.extend_from_slice(args);
    let o = satmatch(&all);
    (Report::from_json(&stdout(&o)).expect("valid JSON report"), o.status.code().unwrap())
}

#[test]
fn analyze_exit_codes_follow_the_verdict() {
    let f1a = fixture("fig1a");
    let o = satmatch(&["analyze", f1a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILS"));

    let f1c = fixture("fig1c");
    let o = satmatch(&["analyze", f1c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn structured_analysis_carries_the_text_numbers() {
    let path = fixture("fig1a");
    let text = stdout(&satmatch(&["analyze", path.to_str().unwrap()]));
    let (report, code) = structured(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let Report::Analyze(r) = report else { panic!("wrong report kind") };
    let x2 = r.vertices.iter().find(|v| v.name == "x2").unwrap();
    assert_eq!((x2.n_size, x2.nn_size, x2.satisfied), (1, 2, false));
    let line = text.lines().find(|l| l.trim_start().starts_with("x2")).unwrap();
    let cols: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(&cols[..3], ["x2", "1", "2"]);
    assert_eq!(r.counterexample.unwrap().vertex, "x2");
}

#[test]
fn malformed_markets_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = \"1\"\nx = [\"a\"]\ny = [\"b\"]\nedges = [[\"a\", \"c\"]]\n")
        .unwrap();
    let o = satmatch(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('c'));

    let missing = dir.path().join("missing.toml");
    assert_eq!(satmatch(&["analyze", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(satmatch(&["analyze"]).status.code(), Some(2));
    assert_eq!(satmatch(&["--help"]).status.code(), Some(0));
}

#[test]
fn match_single_edge() {
    let (report, code) = structured(&["match", fixture("k11").to_str().unwrap()]);
    assert_eq!(code, 0);
    let Report::Match(r) = report else { panic!("wrong report kind") };
    assert_eq!(r.pairs, vec![("x1".to_string(), "y1".to_string())]);
    assert!(r.stable);
}

#[test]
fn match_proposing_side_picks_the_optimal_end() {
    let path = fixture("k22_cycle");
    let pairs = |side: &str| {
        let (report, _) = structured(&["match", path.to_str().unwrap(), "--propose", side]);
        let Report::Match(r) = report else { panic!("wrong report kind") };
        assert!(r.stable);
        r.pairs
    };
    let p = |a: &str, b: &str| (a.to_string(), b.to_string());
    assert_eq!(pairs("x"), vec![p("x1", "y1"), p("x2", "y2")]);
    assert_eq!(pairs("y"), vec![p("x1", "y2"), p("x2", "y1")]);
}

#[test]
fn match_without_preferences_is_a_usage_error() {
    assert_eq!(satmatch(&["match", fixture("fig1a").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn enumerate_lists_both_cycle_matchings_and_respects_the_cap() {
    let path = fixture("k22_cycle");
    let (report, code) = structured(&["enumerate", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let Report::Enumerate(r) = report else { panic!("wrong report kind") };
    assert_eq!(r.matchings.len(), 2);
    assert_eq!(r.matched_x, ["x1", "x2"]);

    let o = satmatch(&["enumerate", path.to_str().unwrap(), "--cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn adversary_emits_the_stranding_market() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("adv.toml");
    let o = satmatch(&[
        "adversary",
        fixture("fig1a").to_str().unwrap(),
        "--target",
        "x2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("unmatched in all: yes"));
    let written = Market::load(&out).unwrap();
    let expected = Market::load(&fixture("fig1a_adversarial")).unwrap();
    assert_eq!(written.graph, expected.graph);
    assert_eq!(written.preferences, expected.preferences);

    let (report, _) = structured(&["enumerate", out.to_str().unwrap()]);
    let Report::Enumerate(r) = report else { panic!("wrong report kind") };
    assert_eq!(r.matchings, vec![vec![("x1".to_string(), "y2".to_string())]]);
}

#[test]
fn adversary_refuses_a_satisfied_vertex() {
    let o = satmatch(&["adversary", fixture("fig1c").to_str().unwrap(), "--target", "x3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("condition (2) witness y3"));

    let o = satmatch(&["adversary", fixture("fig1c").to_str().unwrap(), "--target", "nobody"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn class_market_reports_the_deficient_class() {
    let path = fixture("bilingual");
    let (report, code) = structured(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let Report::Analyze(r) = report else { panic!("wrong report kind") };
    let classes = r.classes.unwrap();
    assert!(!classes.holds);
    assert!(classes.consistent);
    let fr = classes.classes.iter().find(|c| c.name == "fr").unwrap();
    assert_eq!((fr.a_size, fr.b_size), (2, 1));

    let o = satmatch(&["adversary", path.to_str().unwrap(), "--target", "cal"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn fixtures_round_trip_through_the_writer() {
    for entry in std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let file = MarketFile::read(&path).unwrap();
        let again = MarketFile::parse(&file.to_toml()).unwrap();
        assert_eq!(file, again, "{}", path.display());
    }
}

#[test]
fn verify_smallest_run_exits_cleanly() {
    let o = satmatch(&["verify", "--max-side", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 8);
}
