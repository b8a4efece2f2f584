use std::fs;
use std::path::{Path, PathBuf};

use dirtymodel::digits::{
    build_multitask, digits_cv_grid, load_mfeat, run_digits, scale_features, VIEWS,
};
use dirtymodel::solver::{SolverConfig, SolverMode};
use dirtymodel::Error;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mfeat")
}

#[test]
fn loads_the_six_views() {
    let ds = load_mfeat(&data_dir()).unwrap();
    assert_eq!(ds.features.dim(), (2000, 649));
    assert_eq!(ds.view("pixel").unwrap(), 0..240);
    let names: Vec<&str> = ds.view_offsets.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, VIEWS.map(|(n, _)| n));
    assert_eq!(ds.view_offsets.last().unwrap().1.end, 649);
    assert_eq!(ds.labels[0], 0);
    assert_eq!(ds.labels[199], 0);
    assert_eq!(ds.labels[200], 1);
    assert_eq!(ds.labels[1999], 9);
    assert!(!ds.is_scaled());
}

#[test]
fn scaled_features_fit_the_unit_box() {
    let ds = scale_features(&load_mfeat(&data_dir()).unwrap()).unwrap();
    let worst = ds.features.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    // The declared ranges are approximate; a little spill over 1 is expected.
    assert!(worst < 1.5, "max |x| = {worst}");
    let pixel = ds.view("pixel").unwrap();
    let pmax = ds.features.slice(ndarray::s![.., pixel]).iter().fold(0.0_f64, |m, v| m.max(*v));
    assert_eq!(pmax, 1.0);
}

fn copy_views(dst: &Path) {
    for (_, file) in VIEWS {
        fs::copy(data_dir().join(file), dst.join(file)).unwrap();
    }
}

#[test]
fn missing_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    copy_views(dir.path());
    fs::remove_file(dir.path().join("mfeat-zer")).unwrap();
    match load_mfeat(dir.path()) {
        Err(Error::MissingFile(p)) => assert!(p.ends_with("mfeat-zer")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn short_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    copy_views(dir.path());
    let path = dir.path().join("mfeat-mor");
    let text = fs::read_to_string(&path).unwrap();
    let truncated: Vec<&str> = text.lines().take(1999).collect();
    fs::write(&path, truncated.join("\n")).unwrap();
    match load_mfeat(dir.path()) {
        Err(Error::RowCount { expected, found, .. }) => assert_eq!((expected, found), (2000, 1999)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bad_token_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    copy_views(dir.path());
    let path = dir.path().join("mfeat-kar");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[4] = lines[4].replacen(' ', " x7 ", 1);
    lines[4] = lines[4].split_whitespace().take(64).collect::<Vec<_>>().join(" ");
    fs::write(&path, lines.join("\n")).unwrap();
    match load_mfeat(dir.path()) {
        Err(Error::Parse { line, token, .. }) => assert_eq!((line, token.as_str()), (5, "x7")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn split_shapes_on_real_data() {
    let ds = scale_features(&load_mfeat(&data_dir()).unwrap()).unwrap();
    let split = build_multitask(&ds, 20, 3).unwrap();
    assert_eq!(split.problem.design(0).dim(), (200, 649));
    assert_eq!(split.problem.r(), 10);
    assert_eq!(split.heldout.features.nrows(), 1800);
}

#[test]
fn lasso_pipeline_is_reasonable_and_seeded() {
    let ds = scale_features(&load_mfeat(&data_dir()).unwrap()).unwrap();
    let config = SolverConfig::with_mode(SolverMode::LassoOnly);
    let a = run_digits(&ds, 20, 11, &digits_cv_grid(), &config).unwrap();
    let b = run_digits(&ds, 20, 11, &digits_cv_grid(), &config).unwrap();
    assert_eq!(a.metrics, b.metrics);
    assert!(a.metrics.misclassification < 0.2, "{:?}", a.metrics);
    assert!(a.metrics.per_task_error.iter().all(|e| (0.0..=1.0).contains(e)));
    assert_eq!(a.metrics.b_row_support, 0);
}
