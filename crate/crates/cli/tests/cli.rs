use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use imt_core::document::Document;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/public-accounting")
}

fn quarter_file(quarter: &str, name: &str) -> String {
    fixture().join("quarters").join(quarter).join(name).to_string_lossy().into_owned()
}

fn imt(project: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imt"))
        .arg("--project")
        .arg(project)
        .args(args)
        .output()
        .expect("run imt")
}

fn ok(project: &Path, args: &[&str]) -> String {
    let out = imt(project, args);
    assert!(
        out.status.success(),
        "imt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn load(project: &Path, quarter: &str) {
    ok(project, &["import", &quarter_file(quarter, "network.json"), "--overwrite"]);
    ok(
        project,
        &[
            "import",
            "--period",
            quarter,
            "--probes",
            &quarter_file(quarter, "probes.csv"),
            "--survey",
            &quarter_file(quarter, "survey.csv"),
        ],
    );
}

fn catalog() -> String {
    fixture().join("catalog.json").to_string_lossy().into_owned()
}

#[test]
fn missing_survey_names_the_indicator() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["import", &quarter_file("2010-Q1", "network.json")]);
    let out = imt(dir.path(), &["assess", "--period", "2010-Q1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ds/qos"), "{}", stderr(&out));

    let period_dir = dir.path().join("indicators/public-accounting/2010-Q1");
    std::fs::create_dir_all(&period_dir).unwrap();
    std::fs::copy(quarter_file("2010-Q1", "probes.csv"), period_dir.join(imt::service::PROBES_FILE)).unwrap();
    let out = imt(dir.path(), &["assess", "--period", "2010-Q1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains(": ts: no survey.csv"), "{err}");
    assert!(err.contains("step 4"), "{err}");
}

#[test]
fn import_requires_both_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = imt(
        dir.path(),
        &["import", "--period", "2010-Q1", "--probes", &quarter_file("2010-Q1", "probes.csv")],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--survey"));
}

#[test]
fn equal_weights_match_the_default() {
    let dir = tempfile::tempdir().unwrap();
    load(dir.path(), "2010-Q2");
    let plain = ok(dir.path(), &["assess", "--period", "2010-Q2", "--format", "doc"]);
    let explicit = ok(
        dir.path(),
        &["assess", "--period", "2010-Q2", "--weights", "1,1,1", "--overwrite", "--format", "doc"],
    );
    let a = Document::parse(&plain).unwrap().into_assessment().unwrap();
    let b = Document::parse(&explicit).unwrap().into_assessment().unwrap();
    assert_eq!(a.version, 1);
    assert_eq!(b.version, 2);
    assert_eq!(a.scores, b.scores);
}

#[test]
fn conflicting_assessment_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    load(dir.path(), "2010-Q1");
    let table = ok(dir.path(), &["assess", "--period", "2010-Q1"]);
    assert!(table.starts_with("public-accounting 2010-Q1 (version 1)\n"), "{table}");
    assert!(table.contains("Ratlop  0.65"), "{table}");
    let out = imt(dir.path(), &["assess", "--period", "2010-Q1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("already exists"));
}

#[test]
fn wrong_granularity_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    load(dir.path(), "2010-Q1");
    let out = imt(
        dir.path(),
        &[
            "import",
            "--period",
            "2010-03",
            "--probes",
            &quarter_file("2010-Q1", "probes.csv"),
            "--survey",
            &quarter_file("2010-Q1", "survey.csv"),
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn report_lists_every_quarter() {
    let dir = tempfile::tempdir().unwrap();
    for q in ["2010-Q1", "2010-Q2", "2010-Q3", "2010-Q4"] {
        load(dir.path(), q);
        ok(dir.path(), &["assess", "--period", q]);
    }
    let table = ok(dir.path(), &["report"]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 6, "{table}");
    assert!(lines[0].starts_with("period"));
    assert!(lines[2].starts_with("2010-Q2") && lines[2].ends_with("+0.09"), "{table}");
    assert_eq!(lines[5], "0 regressions");

    let part = ok(dir.path(), &["report", "--from", "2010-Q2", "--to", "2010-Q3", "--format", "doc"]);
    let report = Document::parse(&part).unwrap().into_series().unwrap();
    assert_eq!(report.series.entries.len(), 2);
    assert_eq!(report.deltas.len(), 1);
}

#[test]
fn report_without_assessments_fails() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["import", &quarter_file("2010-Q1", "network.json")]);
    let out = imt(dir.path(), &["report"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_summaries() {
    let dir = tempfile::tempdir().unwrap();
    load(dir.path(), "2010-Q4");
    ok(dir.path(), &["assess", "--period", "2010-Q4"]);

    let met = ok(dir.path(), &["plan", "--target", "0.8", "--catalog", &catalog()]);
    assert!(met.starts_with("no action required\n"), "{met}");

    let plan = ok(dir.path(), &["plan", "--target", "0.85", "--catalog", &catalog()]);
    assert!(plan.starts_with("resolve 2 incompatibilities, cost 4\n"), "{plan}");

    let doc = ok(dir.path(), &["plan", "--target", "0.9", "--catalog", &catalog(), "--format", "doc"]);
    let plan = Document::parse(&doc).unwrap().into_plan().unwrap();
    assert!(plan.projected.ratlop >= 0.9);
    assert!(!plan.actions.is_empty());

    let out = imt(dir.path(), &["plan", "--target", "0.99", "--catalog", &catalog()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("out of reach; best achievable ratlop"), "{}", stderr(&out));
}

#[test]
fn plan_without_assessment_fails() {
    let dir = tempfile::tempdir().unwrap();
    load(dir.path(), "2010-Q1");
    let out = imt(dir.path(), &["plan", "--target", "0.9", "--catalog", &catalog()]);
    assert_eq!(out.status.code(), Some(2));
}

/// One organization at level 3 and one link with the six business cells
/// open, with all three rates at 0.8.
fn worked_example(project: &Path) {
    use imt_core::model::*;
    let node = |id: &str| ProcessNode {
        id: id.into(),
        name: id.into(),
        organization: "o".into(),
        kind: ProcessKind::Elementary,
        children: vec![],
        exposed_services: vec![],
    };
    let net = CollaborationNetwork {
        id: "n".into(),
        name: "worked example".into(),
        granularity: Granularity::Quarterly,
        approach: None,
        organizations: vec![Organization {
            id: "o".into(),
            name: "o".into(),
            external: false,
            maturity: Some(MaturityRating::new("LISI", MaturityLevel::new(3).unwrap())),
        }],
        processes: vec![node("a"), node("b")],
        links: vec![InteropLink {
            id: "l".into(),
            from_node: "a".into(),
            to_node: "b".into(),
            mechanism: "ETL".into(),
            compatibility: CompatibilityMatrix::with_open((0..6).filter_map(Cell::from_index)),
        }],
    };
    let mut probes = String::from("timestamp,component,kind,status\n");
    for day in 1..=10 {
        let status = if day <= 8 { "UP" } else { "DOWN" };
        for (component, kind) in [("app", "app_server"), ("wan", "network")] {
            probes.push_str(&format!("2010-01-{day:02}T08:00:00Z,{component},{kind},{status}\n"));
        }
    }
    let survey = "respondent,score\nr1,4\nr2,4\nr3,4\nr4,4\nr5,5\n";
    let dir = project.join("inputs");
    std::fs::create_dir_all(&dir).unwrap();
    let doc = Document::Network(net).to_canonical().unwrap();
    std::fs::write(dir.join("network.json"), doc).unwrap();
    std::fs::write(dir.join("probes.csv"), probes).unwrap();
    std::fs::write(dir.join("survey.csv"), survey).unwrap();
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    ok(project, &["import", &path("network.json")]);
    ok(
        project,
        &["import", "--period", "2010-Q1", "--probes", &path("probes.csv"), "--survey", &path("survey.csv")],
    );
    ok(project, &["assess", "--period", "2010-Q1"]);

    let catalog = r#"{"kind":"catalog","schema":1,"body":{
        "maturity_actions":[{"organization":"o","from_level":3,"cost":10}],
        "cell_actions":[CELLS]}}"#;
    let cells: Vec<String> = (0..6)
        .map(|i| {
            let cell = serde_json::to_string(&Cell::from_index(i).unwrap()).unwrap();
            format!(r#"{{"link":"l","cell":{cell},"cost":2}}"#)
        })
        .collect();
    std::fs::write(dir.join("catalog.json"), catalog.replace("CELLS", &cells.join(","))).unwrap();
    std::fs::write(dir.join("empty.json"), r#"{"kind":"catalog","schema":1,"body":{}}"#).unwrap();
}

#[test]
fn worked_example_plan() {
    let dir = tempfile::tempdir().unwrap();
    worked_example(dir.path());
    let catalog = dir.path().join("inputs/catalog.json").to_string_lossy().into_owned();
    let out = ok(dir.path(), &["plan", "--target", "0.75", "--catalog", &catalog]);
    assert!(out.starts_with("resolve 3 incompatibilities, cost 6\n"), "{out}");
    assert!(out.contains("ratlop 0.72 -> 0.76 (target 0.75)"), "{out}");

    let empty = dir.path().join("inputs/empty.json").to_string_lossy().into_owned();
    let out = imt(dir.path(), &["plan", "--target", "0.9", "--catalog", &empty]);
    assert_eq!(out.status.code(), Some(4));
    let err = stderr(&out);
    assert!(err.contains("target 0.90 is out of reach; best achievable ratlop 0.72"), "{err}");
}

#[test]
fn single_quarter_and_regression_rows() {
    let dir = tempfile::tempdir().unwrap();
    let import = |quarter: &str, as_period: &str| {
        ok(dir.path(), &["import", &quarter_file(quarter, "network.json"), "--overwrite"]);
        ok(
            dir.path(),
            &[
                "import",
                "--period",
                as_period,
                "--probes",
                &quarter_file(quarter, "probes.csv"),
                "--survey",
                &quarter_file(quarter, "survey.csv"),
            ],
        );
        ok(dir.path(), &["assess", "--period", as_period]);
    };
    import("2010-Q3", "2010-Q1");
    let one = ok(dir.path(), &["report"]);
    assert_eq!(one.lines().count(), 3, "{one}");
    assert!(!one.contains('+') && !one.contains("REGRESSION"), "{one}");

    import("2010-Q1", "2010-Q2");
    let two = ok(dir.path(), &["report", "--epsilon", "0.01"]);
    let lines: Vec<&str> = two.lines().collect();
    assert!(lines[2].starts_with("2010-Q2") && lines[2].ends_with("REGRESSION"), "{two}");
    assert_eq!(lines[3], "1 regression");
}
