use mtlspca_harness::report::{read_rows, write_rows};
use mtlspca_harness::{
    load_report, save_report, ExperimentReport, HarnessError, ReportMeta, ReportRow,
};

fn row(value: f64, method: &str, empirical: Option<f64>) -> ReportRow {
    ReportRow {
        sweep_value: value,
        method: method.to_string(),
        theory_error: Some(1.0 / 3.0),
        empirical_error: empirical,
        stderr: empirical.map(|e| e / 7.0),
        seconds: 1e-7,
    }
}

fn sample() -> ExperimentReport {
    ExperimentReport {
        meta: ReportMeta {
            experiment: "fig2".into(),
            sweep: "beta".into(),
            seed: Some(u64::MAX),
            seeds: 10,
            layout: "2 tasks, 2 classes".into(),
            config_hash: "0123456789abcdef".into(),
        },
        rows: vec![
            row(0.0, "st-spca", Some(0.2299)),
            row(1.0 / 9.0, "st-spca", Some(std::f64::consts::PI / 10.0)),
            row(0.0, "n-spca", None),
            row(1.0 / 9.0, "n-spca", Some(5e-324)),
        ],
    }
}

#[test]
fn report_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let report = sample();
    save_report(&report, &path).unwrap();
    assert_eq!(load_report(&path).unwrap(), report);

    let mut unseeded = sample();
    unseeded.meta.seed = None;
    save_report(&unseeded, &path).unwrap();
    assert_eq!(load_report(&path).unwrap(), unseeded);
}

#[test]
fn csv_header_follows_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_rows(&sample().rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "sweep_value,method,theory_error,empirical_error,stderr,seconds"
    );
    assert!(text
        .lines()
        .nth(3)
        .unwrap()
        .starts_with("0.0,n-spca,0.3333333333333333,,,"));
    assert_eq!(read_rows(&path).unwrap(), sample().rows);
}

#[test]
fn validation_rejects_broken_reports() {
    assert!(sample().validate().is_ok());

    let mut unsorted = sample();
    unsorted.rows.swap(0, 1);
    assert!(matches!(unsorted.validate(), Err(HarnessError::Invalid(_))));

    let mut repeated = sample();
    repeated.rows[1].sweep_value = 0.0;
    assert!(repeated.validate().is_err());

    let mut bad_error = sample();
    bad_error.rows[0].empirical_error = Some(1.5);
    assert!(bad_error.validate().is_err());
}

#[test]
fn curves_and_points() {
    let report = sample();
    assert_eq!(report.methods(), vec!["st-spca", "n-spca"]);
    assert_eq!(report.curve("n-spca").len(), 2);
    assert_eq!(
        report.point("n-spca", 1.0 / 9.0).unwrap().empirical_error,
        Some(5e-324)
    );
    assert!(report.point("mtl-spca", 0.0).is_none());
    assert!(report.summary().contains("st-spca"));
}

#[test]
fn missing_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_report(&dir.path().join("absent.csv")).unwrap_err();
    assert_eq!(err.exit_code(), 1);

    let path = dir.path().join("r.csv");
    write_rows(&sample().rows, &path).unwrap();
    assert!(load_report(&path).is_err(), "metadata sidecar is required");
}
