//! Synthetic multi-task instances with a controlled share of common features,
//! the rescaled sample size `θ`, and a plain-text matrix format.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::sparsity::signed_support;
use crate::types::{CoefMatrix, MultiTaskProblem, SignSupport};

const STREAM_SUPPORT: u64 = 0;
const STREAM_SIGN: u64 = 1;
const STREAM_MAGNITUDE: u64 = 2;
const STREAM_TRAIN_DESIGN: u64 = 3;
const STREAM_TRAIN_NOISE: u64 = 4;
const STREAM_TEST_DESIGN: u64 = 5;
const STREAM_TEST_NOISE: u64 = 6;

/// Lower and upper end of the per-row magnitude draw.
pub const ROW_MAGNITUDE: (f64, f64) = (0.5, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub p: usize,
    /// Nonzeros per task.
    pub s: usize,
    /// Fraction of each task's support shared by all tasks.
    pub alpha: f64,
    pub n: usize,
    pub sigma: f64,
    pub r: usize,
    pub seed: u64,
}

impl InstanceSpec {
    /// Two tasks, `s = ⌊p/10⌋`, `σ = 0.1`.
    pub fn new(p: usize, alpha: f64, n: usize, seed: u64) -> Self {
        Self {
            p,
            s: p / 10,
            alpha,
            n,
            sigma: 0.1,
            r: 2,
            seed,
        }
    }

    /// `round(α·s)`.
    pub fn shared(&self) -> usize {
        (self.alpha * self.s as f64).round() as usize
    }

    /// `shared / s`, the overlap actually realized after rounding.
    pub fn effective_alpha(&self) -> f64 {
        self.shared() as f64 / self.s as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} must lie in [0, 1]",
                self.alpha
            )));
        }
        if self.n == 0 || self.r == 0 || self.s == 0 {
            return Err(Error::InvalidArgument("n, r and s must be positive".into()));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma = {}", self.sigma)));
        }
        let shared = self.shared();
        let rows = shared + self.r * (self.s - shared);
        if rows > self.p {
            return Err(Error::InvalidArgument(format!(
                "supports need {rows} rows but p = {}",
                self.p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub theta_bar: CoefMatrix,
    pub sign_support: SignSupport,
    pub shared_rows: BTreeSet<usize>,
    /// One set per task.
    pub exclusive_rows: Vec<BTreeSet<usize>>,
    pub effective_alpha: f64,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub train: MultiTaskProblem,
    pub test: MultiTaskProblem,
    pub truth: GroundTruth,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn generate_instance(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let InstanceSpec { p, s, n, r, sigma, seed, .. } = *spec;
    let shared = spec.shared();
    let exclusive = s - shared;

    let mut rng = stream(seed, STREAM_SUPPORT);
    let picked = sample(&mut rng, p, shared + r * exclusive).into_vec();
    let shared_rows: BTreeSet<usize> = picked[..shared].iter().copied().collect();
    let exclusive_rows: Vec<BTreeSet<usize>> = (0..r)
        .map(|k| {
            let start = shared + k * exclusive;
            picked[start..start + exclusive].iter().copied().collect()
        })
        .collect();

    let mut signs = stream(seed, STREAM_SIGN);
    let mut magnitudes = stream(seed, STREAM_MAGNITUDE);
    let mut theta = Array2::zeros((p, r));
    for j in 0..p {
        let tasks: Vec<usize> = if shared_rows.contains(&j) {
            (0..r).collect()
        } else {
            (0..r).filter(|&k| exclusive_rows[k].contains(&j)).collect()
        };
        if tasks.is_empty() {
            continue;
        }
        let m = magnitudes.random_range(ROW_MAGNITUDE.0..=ROW_MAGNITUDE.1);
        for k in tasks {
            theta[(j, k)] = if signs.random_bool(0.5) { m } else { -m };
        }
    }
    let theta_bar = CoefMatrix::new(theta)?;

    let train = draw_problem(&theta_bar, n, sigma, seed, STREAM_TRAIN_DESIGN, STREAM_TRAIN_NOISE)?;
    let test = draw_problem(&theta_bar, n, sigma, seed, STREAM_TEST_DESIGN, STREAM_TEST_NOISE)?;
    Ok(Instance {
        train,
        test,
        truth: GroundTruth {
            sign_support: signed_support(&theta_bar, 0.0),
            theta_bar,
            shared_rows,
            exclusive_rows,
            effective_alpha: spec.effective_alpha(),
        },
    })
}

fn draw_problem(
    theta: &CoefMatrix,
    n: usize,
    sigma: f64,
    seed: u64,
    design_stream: u64,
    noise_stream: u64,
) -> Result<MultiTaskProblem> {
    let (p, r) = theta.dim();
    let mut design_rng = stream(seed, design_stream);
    let mut noise_rng = stream(seed, noise_stream);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut designs = Vec::with_capacity(r);
    let mut responses = Vec::with_capacity(r);
    for k in 0..r {
        let x: Array2<f64> =
            Array2::from_shape_simple_fn((n, p), || StandardNormal.sample(&mut design_rng));
        let w = Array1::from_shape_simple_fn(n, || noise.sample(&mut noise_rng));
        responses.push(x.dot(&theta.as_array().column(k)) + w);
        designs.push(x);
    }
    MultiTaskProblem::new(designs, responses)
}

fn log_term(p: usize, rows: f64) -> Result<f64> {
    let arg = p as f64 - rows;
    if !(arg > 1.0) {
        return Err(Error::LogArgument(arg));
    }
    Ok(arg.ln())
}

/// `θ = n / ((2−α)·s·ln(p − (2−α)·s))`.
pub fn theta_rescale(n: usize, p: usize, s: usize, alpha: f64) -> Result<f64> {
    let rows = (2.0 - alpha) * s as f64;
    Ok(n as f64 / (rows * log_term(p, rows)?))
}

/// Inverse of [`theta_rescale`], rounded to the nearest sample count (at least 1).
pub fn n_for_theta(theta: f64, p: usize, s: usize, alpha: f64) -> Result<usize> {
    let rows = (2.0 - alpha) * s as f64;
    let n = theta * rows * log_term(p, rows)?;
    Ok((n.round() as usize).max(1))
}

/// Writes a problem as a header `p r n` followed by `r·n` rows, each a design
/// row with the response appended. Tasks follow each other.
pub fn write_problem(problem: &MultiTaskProblem, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{} {} {}", problem.p(), problem.r(), problem.n())?;
    for k in 0..problem.r() {
        let x = problem.design(k);
        let y = problem.response(k);
        for i in 0..problem.n() {
            let mut line: Vec<String> = x.row(i).iter().map(|v| format!("{v:e}")).collect();
            line.push(format!("{:e}", y[i]));
            writeln!(out, "{}", line.join(" "))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_problem(path: &Path) -> Result<MultiTaskProblem> {
    let (header, rows) = read_table(path)?;
    let [p, r, n] = header;
    let expected = r * n;
    if rows.len() != expected {
        return Err(Error::RowCount {
            path: path.to_path_buf(),
            expected,
            found: rows.len(),
        });
    }
    check_columns(path, &rows, p + 1)?;
    let mut designs = Vec::with_capacity(r);
    let mut responses = Vec::with_capacity(r);
    for k in 0..r {
        let block = &rows[k * n..(k + 1) * n];
        designs.push(Array2::from_shape_fn((n, p), |(i, j)| block[i].1[j]));
        responses.push(Array1::from_iter(block.iter().map(|row| row.1[p])));
    }
    MultiTaskProblem::new(designs, responses)
}

/// Writes a coefficient matrix as a header `p r n` followed by `p` rows of `r`
/// values. `n` records the sample size the matrix belongs to (0 when unknown).
pub fn write_coefficients(m: &CoefMatrix, n: usize, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{} {} {}", m.p(), m.r(), n)?;
    for row in m.as_array().rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_coefficients(path: &Path) -> Result<CoefMatrix> {
    let (header, rows) = read_table(path)?;
    let [p, r, _] = header;
    if rows.len() != p {
        return Err(Error::RowCount {
            path: path.to_path_buf(),
            expected: p,
            found: rows.len(),
        });
    }
    check_columns(path, &rows, r)?;
    CoefMatrix::new(Array2::from_shape_fn((p, r), |(j, k)| rows[j].1[k]))
}

type Rows = Vec<(usize, Vec<f64>)>;

/// Parses the header and the numeric rows, keeping 1-based line numbers.
fn read_table(path: &Path) -> Result<([usize; 3], Rows)> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let parse_err = |line: usize, token: &str| Error::Parse {
        path: PathBuf::from(path),
        line,
        token: token.to_string(),
    };
    let (header, header_line) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (line, i + 1);
                }
            }
            None => {
                return Err(Error::RowCount {
                    path: path.to_path_buf(),
                    expected: 1,
                    found: 0,
                })
            }
        }
    };
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(header_line, t)))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::ColumnCount {
            path: path.to_path_buf(),
            line: header_line,
            expected: 3,
            found: dims.len(),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(i + 1, t)))
            .collect::<Result<Vec<_>>>()?;
        rows.push((i + 1, values));
    }
    Ok(([dims[0], dims[1], dims[2]], rows))
}

fn check_columns(path: &Path, rows: &Rows, expected: usize) -> Result<()> {
    if let Some((line, values)) = rows.iter().find(|(_, v)| v.len() != expected) {
        return Err(Error::ColumnCount {
            path: path.to_path_buf(),
            line: *line,
            expected,
            found: values.len(),
        });
    }
    Ok(())
}
