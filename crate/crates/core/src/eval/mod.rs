//! Normalized eye-center errors, accuracy curves, dataset ingestion and
//! k-fold tuning of the binarization threshold.

mod dataset;
mod tune;

pub use dataset::{parse_eye_file, format_eye_file, DatasetIndex, RegionSpec, Sample};
pub use tune::{
    build_error_matrix, cross_validate, cross_validate_matrix, default_grid, parse_grid, results_csv, tune_threshold, CrossValidation,
    ErrorMatrix, Outcome, Tuned, RESULTS_HEADER,
};

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Accuracy thresholds reported by default.
pub const THRESHOLDS: [f64; 5] = [0.05, 0.10, 0.15, 0.20, 0.25];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(&self, o: &Point2) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

impl From<crate::Point> for Point2 {
    fn from(p: crate::Point) -> Self {
        Point2::new(p.x as f64, p.y as f64)
    }
}

/// True eye centers, ordered so that `left.x < right.x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    left: Point2,
    right: Point2,
}

impl GroundTruth {
    /// Orders the two points by x. Identical points, or points sharing an
    /// x-coordinate, are rejected since left and right cannot be told apart.
    pub fn new(a: Point2, b: Point2) -> Result<Self> {
        if a == b {
            return Err(Error::param("ground truth", "the two eye centers coincide"));
        }
        if a.x == b.x {
            return Err(Error::param("ground truth", "the two eye centers share an x-coordinate"));
        }
        let (left, right) = if a.x < b.x { (a, b) } else { (b, a) };
        Ok(GroundTruth { left, right })
    }

    pub fn left(&self) -> Point2 {
        self.left
    }

    pub fn right(&self) -> Point2 {
        self.right
    }

    pub fn interocular(&self) -> f64 {
        self.left.dist(&self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    pub d_l: f64,
    pub d_r: f64,
    pub e_worst: f64,
    pub e_best: f64,
    pub e_average: f64,
}

/// Per-eye distances normalized by the inter-ocular distance. `pred_l` is
/// compared with the ground-truth left eye and `pred_r` with the right one,
/// exactly as given.
pub fn normalized_errors(pred_l: Point2, pred_r: Point2, gt: &GroundTruth) -> ErrorTriple {
    let d_l = pred_l.dist(&gt.left);
    let d_r = pred_r.dist(&gt.right);
    let d = gt.interocular();
    ErrorTriple {
        d_l,
        d_r,
        e_worst: d_l.max(d_r) / d,
        e_best: d_l.min(d_r) / d,
        e_average: (d_l + d_r) / (2.0 * d),
    }
}

/// Fraction of images whose worst-eye error is within each threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub thresholds: Vec<f64>,
    pub fractions: Vec<f64>,
    pub n_images: usize,
    /// Free-form configuration echo, one `key = value` per line.
    pub config: String,
}

impl AccuracyReport {
    pub fn fraction_at(&self, threshold: f64) -> Option<f64> {
        self.thresholds
            .iter()
            .position(|&t| t == threshold)
            .map(|i| self.fractions[i])
    }

    fn header(&self) -> String {
        let mut s = String::new();
        for line in self.config.lines() {
            let _ = writeln!(s, "# {line}");
        }
        s
    }

    /// Aligned text table.
    pub fn to_table(&self) -> String {
        let mut s = self.header();
        let _ = writeln!(s, "# images = {}", self.n_images);
        let _ = writeln!(s, "{:>9}  {:>8}", "threshold", "accuracy");
        for (t, f) in self.thresholds.iter().zip(&self.fractions) {
            let _ = writeln!(s, "{t:>9.2}  {:>7.2}%", f * 100.0);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header();
        s.push_str("threshold,fraction\n");
        for (t, f) in self.thresholds.iter().zip(&self.fractions) {
            let _ = writeln!(s, "{t:.2},{f:.6}");
        }
        s
    }
}

/// Inclusive accuracy, `e_worst <= t`, at each threshold.
pub fn accuracy_at(errors: &[ErrorTriple], thresholds: &[f64]) -> Result<AccuracyReport> {
    if errors.is_empty() {
        return Err(Error::param("errors", "cannot report accuracy on an empty list"));
    }
    let n = errors.len();
    let fractions = thresholds
        .iter()
        .map(|&t| errors.iter().filter(|e| e.e_worst <= t).count() as f64 / n as f64)
        .collect();
    Ok(AccuracyReport {
        thresholds: thresholds.to_vec(),
        fractions,
        n_images: n,
        config: String::new(),
    })
}

/// Assignment of `n` indices to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub k: usize,
    pub seed: u64,
    /// Fold id of each index.
    pub assignment: Vec<usize>,
}

impl FoldSplit {
    /// Indices of fold `f`, ascending.
    pub fn fold(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == f).collect()
    }

    /// Indices outside fold `f`, ascending.
    pub fn complement(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != f).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.assignment {
            s[f] += 1;
        }
        s
    }
}

/// Seeded shuffle of `0..n` dealt round-robin into `k` folds.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldSplit> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if n < k {
        return Err(Error::param("n", format!("{n} items cannot fill {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignment[i] = pos % k;
    }
    Ok(FoldSplit { k, seed, assignment })
}
