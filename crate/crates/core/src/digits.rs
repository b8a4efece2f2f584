//! Handwritten-digit study on the six-view UCI "multiple features" data:
//! loading, fixed-divisor scaling, one-vs-rest multi-task construction,
//! cross-validated fitting and classification metrics.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use ndarray::{s, Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::experiments::{cv_select, log_spaced, CvGrid};
use crate::solver::{solve, SolverConfig, SolverMode};
use crate::sparsity::sparsity_stats;
use crate::types::{CoefMatrix, DirtyPair, MultiTaskProblem, RegPair};

pub const DIGITS: usize = 10;
pub const PER_DIGIT: usize = 200;
pub const TOTAL_FEATURES: usize = 649;

/// Views in concatenation order: (name, file name).
pub const VIEWS: [(&str, &str); 6] = [
    ("pixel", "mfeat-pix"),
    ("fourier", "mfeat-fou"),
    ("karhunen-loeve", "mfeat-kar"),
    ("profile-correlation", "mfeat-fac"),
    ("zernike", "mfeat-zer"),
    ("morphological", "mfeat-mor"),
];

/// Declared maxima used as divisors. The three integer morphological
/// features range over 0..6, the remaining three have their own ranges.
const VIEW_DIVISOR: [(&str, f64); 5] = [
    ("pixel", 6.0),
    ("fourier", 1.0),
    ("karhunen-loeve", 17.0),
    ("profile-correlation", 1400.0),
    ("zernike", 800.0),
];
const MORPH_DIVISOR: [f64; 6] = [6.0, 6.0, 6.0, 200.0, 3.0, 18000.0];

#[derive(Debug, Clone)]
pub struct MfeatDataset {
    pub features: Array2<f64>,
    pub labels: Vec<u8>,
    pub view_offsets: Vec<(String, Range<usize>)>,
    scaled: bool,
}

impl MfeatDataset {
    /// Builds a dataset from raw parts; labels must be 0..=9.
    pub fn new(features: Array2<f64>, labels: Vec<u8>, view_offsets: Vec<(String, Range<usize>)>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if labels.iter().any(|l| *l as usize >= DIGITS) {
            return Err(Error::InvalidArgument("labels must be digits 0..9".into()));
        }
        Ok(Self {
            features,
            labels,
            view_offsets,
            scaled: false,
        })
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn view(&self, name: &str) -> Option<Range<usize>> {
        self.view_offsets
            .iter()
            .find(|(v, _)| v == name)
            .map(|(_, r)| r.clone())
    }

    /// Row indices of each digit, in dataset order.
    fn rows_by_digit(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); DIGITS];
        for (i, l) in self.labels.iter().enumerate() {
            rows[*l as usize].push(i);
        }
        rows
    }
}

fn read_view(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(DIGITS * PER_DIGIT);
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(Error::ColumnCount {
                    path: path.to_path_buf(),
                    line: i + 1,
                    expected: first.len(),
                    found: values.len(),
                });
            }
        }
        rows.push(values);
    }
    if rows.len() != DIGITS * PER_DIGIT {
        return Err(Error::RowCount {
            path: path.to_path_buf(),
            expected: DIGITS * PER_DIGIT,
            found: rows.len(),
        });
    }
    Ok(rows)
}

/// Reads the six view files from `dir` and concatenates them column-wise.
/// Rows come in blocks of 200 per digit, digits 0 through 9.
pub fn load_mfeat(dir: &Path) -> Result<MfeatDataset> {
    let views = VIEWS
        .iter()
        .map(|(_, file)| read_view(&dir.join(file)))
        .collect::<Result<Vec<_>>>()?;
    let mut offsets = Vec::with_capacity(VIEWS.len());
    let mut start = 0;
    for ((name, _), rows) in VIEWS.iter().zip(&views) {
        let width = rows[0].len();
        offsets.push((name.to_string(), start..start + width));
        start += width;
    }
    if start != TOTAL_FEATURES {
        return Err(Error::Shape(format!(
            "views have {start} columns in total, expected {TOTAL_FEATURES}"
        )));
    }
    let mut features = Array2::zeros((DIGITS * PER_DIGIT, TOTAL_FEATURES));
    for (rows, (_, range)) in views.iter().zip(&offsets) {
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                features[(i, range.start + j)] = *v;
            }
        }
    }
    let labels = (0..DIGITS * PER_DIGIT).map(|i| (i / PER_DIGIT) as u8).collect();
    MfeatDataset::new(features, labels, offsets)
}

/// The directory named by `MFEAT_DIR`, if set.
pub fn mfeat_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("MFEAT_DIR").map(PathBuf::from)
}

/// Divides every view by its fixed declared maximum. No centering.
pub fn scale_features(ds: &MfeatDataset) -> Result<MfeatDataset> {
    if ds.scaled {
        return Err(Error::AlreadyScaled);
    }
    let mut out = ds.clone();
    for (name, range) in &ds.view_offsets {
        let mut block = out.features.slice_mut(s![.., range.clone()]);
        if name == "morphological" {
            if range.len() != MORPH_DIVISOR.len() {
                return Err(Error::Shape(format!(
                    "morphological view has {} columns, expected {}",
                    range.len(),
                    MORPH_DIVISOR.len()
                )));
            }
            for (mut col, d) in block.axis_iter_mut(Axis(1)).zip(MORPH_DIVISOR) {
                col /= d;
            }
        } else {
            let (_, d) = VIEW_DIVISOR
                .iter()
                .find(|(v, _)| v == name)
                .ok_or_else(|| Error::Shape(format!("unknown view {name}")))?;
            block /= *d;
        }
    }
    out.scaled = true;
    Ok(out)
}

/// Rows not used for training.
#[derive(Debug, Clone)]
pub struct Heldout {
    pub features: Array2<f64>,
    pub labels: Vec<u8>,
}

impl Heldout {
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// One-vs-rest regression problem plus the bookkeeping of a training split.
#[derive(Debug, Clone)]
pub struct DigitsSplit {
    /// Ten tasks sharing one design whose rows come in digit blocks of `n`.
    pub problem: MultiTaskProblem,
    pub heldout: Heldout,
    /// Training rows per digit.
    pub n: usize,
}

fn one_vs_rest(features: Array2<f64>, labels: &[u8]) -> Result<MultiTaskProblem> {
    let responses = (0..DIGITS)
        .map(|k| labels.iter().map(|l| f64::from(*l as usize == k)).collect::<Array1<f64>>())
        .collect();
    MultiTaskProblem::new(vec![features; DIGITS], responses)
}

/// Samples `n` training rows per digit without replacement and builds the
/// shared-design problem with indicator responses. Everything else is held out.
pub fn build_multitask(ds: &MfeatDataset, n: usize, seed: u64) -> Result<DigitsSplit> {
    if n == 0 || n > PER_DIGIT {
        return Err(Error::InvalidArgument(format!(
            "training rows per digit must be in 1..={PER_DIGIT}, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(DIGITS * n);
    let mut rest = Vec::new();
    for mut rows in ds.rows_by_digit() {
        if rows.len() < n {
            return Err(Error::InvalidArgument(format!(
                "a digit has only {} rows, {n} requested",
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        train.extend_from_slice(&rows[..n]);
        let mut tail = rows[n..].to_vec();
        tail.sort_unstable();
        rest.extend(tail);
    }
    let labels: Vec<u8> = train.iter().map(|&i| ds.labels[i]).collect();
    let problem = one_vs_rest(ds.features.select(Axis(0), &train), &labels)?;
    let heldout = Heldout {
        features: ds.features.select(Axis(0), &rest),
        labels: rest.iter().map(|&i| ds.labels[i]).collect(),
    };
    Ok(DigitsSplit { problem, heldout, n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitsMetrics {
    pub per_task_error: [f64; DIGITS],
    pub mean_error: f64,
    /// Population variance over the ten per-task errors.
    pub error_variance: f64,
    /// Fraction of held-out rows whose arg-max digit is wrong.
    pub misclassification: f64,
    pub b_row_support: usize,
    pub combined_row_support: usize,
    pub s_support: usize,
    pub combined_support: usize,
}

/// Arg-max class of each row of `x · theta`; ties go to the smallest digit.
pub fn predict(theta: &CoefMatrix, features: &Array2<f64>) -> Vec<u8> {
    let scores = features.dot(theta.as_array());
    scores
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for k in 1..row.len() {
                if row[k] > row[best] {
                    best = k;
                }
            }
            best as u8
        })
        .collect()
}

/// One-vs-rest error per digit of the filtered `B + S`, with support sizes of
/// the filtered blocks.
pub fn evaluate_digits(pair: &DirtyPair, heldout: &Heldout, filter_threshold: f64) -> Result<DigitsMetrics> {
    let (p, r) = pair.dim();
    if r != DIGITS || p != heldout.features.ncols() {
        return Err(Error::Shape(format!(
            "coefficients are {p}x{r}, expected {}x{DIGITS}",
            heldout.features.ncols()
        )));
    }
    if heldout.is_empty() {
        return Err(Error::InvalidArgument("held-out set is empty".into()));
    }
    let theta = pair.theta().filtered(filter_threshold);
    let predicted = predict(&theta, &heldout.features);
    let total = heldout.labels.len() as f64;
    let mut per_task_error = [0.0; DIGITS];
    for (k, err) in per_task_error.iter_mut().enumerate() {
        let wrong = predicted
            .iter()
            .zip(&heldout.labels)
            .filter(|(pr, tr)| (**pr as usize == k) != (**tr as usize == k))
            .count();
        *err = wrong as f64 / total;
    }
    let mean_error = per_task_error.iter().sum::<f64>() / DIGITS as f64;
    let error_variance =
        per_task_error.iter().map(|e| (e - mean_error).powi(2)).sum::<f64>() / DIGITS as f64;
    let misclassification =
        predicted.iter().zip(&heldout.labels).filter(|(p, t)| p != t).count() as f64 / total;
    let b = sparsity_stats(&pair.b, filter_threshold);
    let s = sparsity_stats(&pair.s, filter_threshold);
    let combined = sparsity_stats(&theta, 0.0);
    Ok(DigitsMetrics {
        per_task_error,
        mean_error,
        error_variance,
        misclassification,
        b_row_support: b.row_support.len(),
        combined_row_support: combined.row_support.len(),
        s_support: s.support.len(),
        combined_support: combined.support.len(),
    })
}

/// 15 log-spaced `c` in `[0.01, 10]`; ratios `0.15, 0.26, 0.35, …, 0.95`.
///
/// 0.25 would make `λb/λs = 4`, an integer, so it is nudged to 0.26.
pub fn digits_cv_grid() -> CvGrid {
    let ratios = (0..9)
        .map(|i| if i == 1 { 0.26 } else { 0.15 + 0.1 * i as f64 })
        .collect();
    CvGrid::new(log_spaced(0.01, 10.0, 15), ratios).expect("static grid is valid")
}

/// `√(2 · ln 649 / n)` with `n` the training rows per digit.
pub fn digits_lambda_unit(n: usize) -> f64 {
    (2.0 * (TOTAL_FEATURES as f64).ln() / n as f64).sqrt()
}

/// Fraction of each digit's training rows used for fitting during selection.
pub const FIT_FRACTION: f64 = 0.8;

/// Splits each digit block of `split.problem` into fitting and scoring rows.
fn selection_split(split: &DigitsSplit) -> Result<(MultiTaskProblem, MultiTaskProblem, usize)> {
    let n = split.n;
    let n_fit = ((n as f64 * FIT_FRACTION).round() as usize).min(n - 1);
    if n_fit == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 training rows per digit for selection, got {n}"
        )));
    }
    let x = split.problem.design(0);
    let labels: Vec<u8> = (0..DIGITS * n).map(|i| (i / n) as u8).collect();
    let (mut fit, mut score) = (Vec::new(), Vec::new());
    for i in 0..DIGITS * n {
        if i % n < n_fit {
            fit.push(i)
        } else {
            score.push(i)
        }
    }
    let pick = |rows: &[usize]| -> Result<MultiTaskProblem> {
        let l: Vec<u8> = rows.iter().map(|&i| labels[i]).collect();
        one_vs_rest(x.select(Axis(0), rows), &l)
    };
    Ok((pick(&fit)?, pick(&score)?, n_fit))
}

#[derive(Debug, Clone)]
pub struct DigitsRun {
    pub method: SolverMode,
    pub seed: u64,
    /// Selected `(c, ratio)`; the ratio is meaningless for the baselines.
    pub c: f64,
    pub ratio: f64,
    pub reg: RegPair,
    pub pair: DirtyPair,
    pub metrics: DigitsMetrics,
}

/// Draws a split, selects `(c, ratio)` on an 80/20 division of the training
/// rows, refits on all of them and scores the held-out rows.
pub fn run_digits(
    ds: &MfeatDataset,
    n: usize,
    seed: u64,
    grid: &CvGrid,
    config: &SolverConfig,
) -> Result<DigitsRun> {
    let split = build_multitask(ds, n, seed)?;
    let (fit, score, n_fit) = selection_split(&split)?;
    let chosen = cv_select(&fit, &score, grid, digits_lambda_unit(n_fit), config)?;
    let (c, ratio) = (grid.c_values[chosen.cell.0], grid.ratio_values[chosen.cell.1]);
    let lambda = c * digits_lambda_unit(n);
    let reg = match config.mode {
        SolverMode::Dirty => RegPair::new(ratio * lambda, lambda, DIGITS)?,
        SolverMode::LassoOnly => RegPair::unconstrained(lambda, 0.0)?,
        SolverMode::LinfOnly => RegPair::unconstrained(0.0, lambda)?,
    };
    let refit = solve(&split.problem, &reg, config, Some(&chosen.pair))?;
    let metrics = evaluate_digits(&refit.pair, &split.heldout, config.filter_threshold)?;
    Ok(DigitsRun {
        method: config.mode,
        seed,
        c,
        ratio,
        reg,
        pair: refit.pair,
        metrics,
    })
}

/// Writes `split_fraction,method,mean_error,error_variance,…` rows.
pub fn write_digits_csv<W: Write>(rows: &[(f64, &DigitsRun)], mut out: W) -> Result<()> {
    writeln!(
        out,
        "split_fraction,method,mean_error,error_variance,b_row_support,combined_row_support,s_support,combined_support"
    )?;
    for (fraction, run) in rows {
        let m = &run.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fraction,
            run.method.name(),
            m.mean_error,
            m.error_variance,
            m.b_row_support,
            m.combined_row_support,
            m.s_support,
            m.combined_support
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// 2000 rows over three views of widths 2, 1, 6 (the last is morphological).
    fn toy_dataset() -> MfeatDataset {
        let features = Array2::from_shape_fn((DIGITS * PER_DIGIT, 9), |(i, j)| ((i * 7 + j) % 13) as f64);
        let labels = (0..DIGITS * PER_DIGIT).map(|i| (i / PER_DIGIT) as u8).collect();
        let offsets = vec![
            ("pixel".to_string(), 0..2),
            ("fourier".to_string(), 2..3),
            ("morphological".to_string(), 3..9),
        ];
        MfeatDataset::new(features, labels, offsets).unwrap()
    }

    #[test]
    fn grid_has_no_integer_ratio() {
        let grid = digits_cv_grid();
        assert_eq!(grid.cells(), 15 * 9);
        assert_abs_diff_eq!(grid.c_values[0], 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(grid.c_values[14], 10.0, epsilon = 1e-12);
        for &ratio in &grid.ratio_values {
            for &c in &grid.c_values {
                assert!(RegPair::new(ratio * c, c, DIGITS).is_ok(), "ratio {ratio}");
            }
        }
    }

    #[test]
    fn lambda_unit_example() {
        assert_abs_diff_eq!(digits_lambda_unit(100), 0.3599, epsilon = 5e-5);
    }

    #[test]
    fn scaling_divides_and_refuses_twice() {
        let ds = toy_dataset();
        let scaled = scale_features(&ds).unwrap();
        assert!(scaled.is_scaled());
        for i in [0, 17, 1999] {
            assert_abs_diff_eq!(scaled.features[(i, 0)], ds.features[(i, 0)] / 6.0);
            assert_abs_diff_eq!(scaled.features[(i, 2)], ds.features[(i, 2)]);
            assert_abs_diff_eq!(scaled.features[(i, 8)], ds.features[(i, 8)] / 18000.0);
            assert_abs_diff_eq!(scaled.features[(i, 6)], ds.features[(i, 6)] / 200.0);
        }
        assert!(matches!(scale_features(&scaled), Err(Error::AlreadyScaled)));
    }

    #[test]
    fn split_conserves_rows() {
        let ds = toy_dataset();
        for n in [1, 20, 199, 200] {
            let split = build_multitask(&ds, n, 5).unwrap();
            assert_eq!(split.problem.n(), DIGITS * n);
            assert_eq!(split.problem.n() + split.heldout.labels.len(), 2000);
            for k in 0..DIGITS {
                let y = split.problem.response(k);
                assert_eq!(y.iter().filter(|v| **v == 1.0).count(), n);
                assert!(y.slice(s![k * n..(k + 1) * n]).iter().all(|v| *v == 1.0));
            }
        }
        assert!(build_multitask(&ds, 200, 5).unwrap().heldout.is_empty());
        assert!(build_multitask(&ds, 0, 5).is_err());
        assert!(build_multitask(&ds, 201, 5).is_err());
    }

    #[test]
    fn split_is_seeded() {
        let ds = toy_dataset();
        let a = build_multitask(&ds, 20, 9).unwrap();
        let b = build_multitask(&ds, 20, 9).unwrap();
        let c = build_multitask(&ds, 20, 10).unwrap();
        assert_eq!(a.problem.design(0), b.problem.design(0));
        assert_eq!(a.heldout.labels, b.heldout.labels);
        assert_ne!(a.problem.design(0), c.problem.design(0));
    }

    #[test]
    fn zero_model_errors_equal_priors() {
        let ds = toy_dataset();
        let split = build_multitask(&ds, 30, 1).unwrap();
        let m = evaluate_digits(&DirtyPair::zeros(9, DIGITS), &split.heldout, 1e-3).unwrap();
        // Every row is predicted 0: digit 0 errs on the other nine classes,
        // every other digit errs exactly on its own rows.
        assert_abs_diff_eq!(m.per_task_error[0], 0.9, epsilon = 1e-15);
        for k in 1..DIGITS {
            assert_abs_diff_eq!(m.per_task_error[k], 0.1, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(m.mean_error, 0.18, epsilon = 1e-15);
        assert_abs_diff_eq!(m.error_variance, 0.0576, epsilon = 1e-15);
        assert_abs_diff_eq!(m.misclassification, 0.9, epsilon = 1e-15);
        assert_eq!(m.combined_support, 0);
    }

    #[test]
    fn separating_model_is_perfect() {
        // Two digits, one indicator feature each.
        let features = ndarray::array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let heldout = Heldout {
            features,
            labels: vec![0, 0, 1],
        };
        let mut b = Array2::zeros((2, DIGITS));
        b[(0, 0)] = 1.0;
        b[(1, 1)] = 1.0;
        let pair = DirtyPair::new(CoefMatrix::zeros(2, DIGITS), CoefMatrix::new(b).unwrap()).unwrap();
        let m = evaluate_digits(&pair, &heldout, 1e-3).unwrap();
        assert_eq!(m.mean_error, 0.0);
        assert_eq!(m.s_support, 2);
        assert_eq!(m.b_row_support, 0);
        assert_eq!(m.combined_row_support, 2);
    }

    #[test]
    fn evaluate_rejects_bad_shapes() {
        let heldout = Heldout {
            features: Array2::zeros((3, 4)),
            labels: vec![0, 1, 2],
        };
        assert!(evaluate_digits(&DirtyPair::zeros(5, DIGITS), &heldout, 0.0).is_err());
        assert!(evaluate_digits(&DirtyPair::zeros(4, 3), &heldout, 0.0).is_err());
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_digits_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "split_fraction,method,mean_error,error_variance,b_row_support,combined_row_support,s_support,combined_support\n"
        );
    }
}
