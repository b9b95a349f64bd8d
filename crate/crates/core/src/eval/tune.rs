use std::fmt::Write as _;

use super::{accuracy_at, kfold_split, normalized_errors, AccuracyReport, DatasetIndex, ErrorTriple, FoldSplit, Point2, RegionSpec, THRESHOLDS};
use crate::pipeline::{acquire, localize, Method, PipelineConfig};
use crate::{Error, Exec, Point, Result};

pub const RESULTS_HEADER: &str = "filename,lx,ly,rx,ry,d_l,d_r,e_worst,e_best,e_avg,method_l,method_r";

/// Thresholds at multiples of 0.05 × 255: 13, 26, 38, ..., 242.
pub fn default_grid() -> Vec<u8> {
    (1..=19).map(|k| (12.75 * k as f64).round() as u8).collect()
}

/// Parses `start:step:end` (inclusive), a comma-separated list, or a
/// single value.
pub fn parse_grid(spec: &str) -> Result<Vec<u8>> {
    let value = |s: &str| {
        s.trim()
            .parse::<u8>()
            .map_err(|_| Error::param("grid", format!("`{}` is not an intensity in 0..=255", s.trim())))
    };
    let grid: Vec<u8> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::param("grid", "a range needs the form start:step:end"));
        }
        let (start, step, end) = (value(parts[0])?, value(parts[1])?, value(parts[2])?);
        if step == 0 {
            return Err(Error::param("grid", "step must be positive"));
        }
        if start > end {
            return Err(Error::param("grid", "start exceeds end"));
        }
        (start as u32..=end as u32).step_by(step as usize).map(|v| v as u8).collect()
    } else {
        spec.split(',').map(value).collect::<Result<_>>()?
    };
    if grid.is_empty() {
        return Err(Error::param("grid", "empty"));
    }
    Ok(grid)
}

/// Result of running the pipeline on one frame at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    /// Prediction paired with the ground-truth left eye (smaller x).
    pub pred_l: Point,
    pub pred_r: Point,
    pub method_l: Method,
    pub method_r: Method,
    pub errors: ErrorTriple,
}

/// Pipeline outcomes for every frame at every grid threshold. Region
/// acquisition and smoothing do not depend on the threshold, so they run
/// once per frame.
#[derive(Debug, Clone)]
pub struct ErrorMatrix {
    /// Ascending, without duplicates.
    pub grid: Vec<u8>,
    /// `cells[frame][grid index]`.
    pub cells: Vec<Vec<Outcome>>,
}

/// A threshold chosen on a training subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuned {
    pub t_b: u8,
    pub n: usize,
    /// Frames within 0.05 and within 0.10.
    pub hits_05: usize,
    pub hits_10: usize,
}

impl Tuned {
    pub fn accuracy_05(&self) -> f64 {
        self.hits_05 as f64 / self.n as f64
    }

    pub fn accuracy_10(&self) -> f64 {
        self.hits_10 as f64 / self.n as f64
    }
}

pub fn build_error_matrix(
    dataset: &DatasetIndex,
    regions: &RegionSpec,
    cfg: &PipelineConfig,
    grid: &[u8],
    exec: Exec,
) -> Result<ErrorMatrix> {
    if dataset.is_empty() {
        return Err(Error::param("dataset", "no frames"));
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::param("grid", "empty"));
    }
    cfg.validate()?;
    let rows = exec.map(&dataset.samples, |sample| -> Result<Vec<Outcome>> {
        let frame = sample.load_image()?;
        let acquired = acquire(&frame, regions.input_for(&sample.name)?, cfg)?;
        Ok(grid
            .iter()
            .map(|&t_b| {
                let res = localize(&acquired, &PipelineConfig { t_b, ..cfg.clone() });
                let (mut a, mut b) = ((res.left.center, res.left.method), (res.right.center, res.right.method));
                if b.0.x < a.0.x {
                    std::mem::swap(&mut a, &mut b);
                }
                Outcome {
                    name: sample.name.clone(),
                    pred_l: a.0,
                    pred_r: b.0,
                    method_l: a.1,
                    method_r: b.1,
                    errors: normalized_errors(Point2::from(a.0), Point2::from(b.0), &sample.truth),
                }
            })
            .collect())
    });
    Ok(ErrorMatrix {
        grid,
        cells: rows.into_iter().collect::<Result<_>>()?,
    })
}

impl ErrorMatrix {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn grid_index(&self, t_b: u8) -> Option<usize> {
        self.grid.binary_search(&t_b).ok()
    }

    /// Best threshold on the frames in `subset`: most frames within 0.05,
    /// then most within 0.10, then the smaller threshold.
    pub fn tune(&self, subset: &[usize]) -> Tuned {
        let mut best: Option<Tuned> = None;
        for (g, &t_b) in self.grid.iter().enumerate() {
            let hits = |t: f64| subset.iter().filter(|&&i| self.cells[i][g].errors.e_worst <= t).count();
            let cand = Tuned {
                t_b,
                n: subset.len(),
                hits_05: hits(0.05),
                hits_10: hits(0.10),
            };
            if best.is_none_or(|b| (cand.hits_05, cand.hits_10) > (b.hits_05, b.hits_10)) {
                best = Some(cand);
            }
        }
        best.expect("grid is non-empty")
    }
}

/// Picks `t_b` from `grid` on the whole of `dataset`.
pub fn tune_threshold(
    dataset: &DatasetIndex,
    regions: &RegionSpec,
    cfg: &PipelineConfig,
    grid: &[u8],
    exec: Exec,
) -> Result<Tuned> {
    let m = build_error_matrix(dataset, regions, cfg, grid, exec)?;
    Ok(m.tune(&(0..m.len()).collect::<Vec<_>>()))
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    /// Accuracy over the pooled held-out frames.
    pub report: AccuracyReport,
    /// Threshold tuned on the training part of each fold.
    pub fold_t_b: Vec<u8>,
    pub split: FoldSplit,
    /// Held-out outcome of every frame, in dataset order.
    pub outcomes: Vec<Outcome>,
}

/// k-fold evaluation: each fold is scored with the threshold tuned on the
/// remaining folds, and the held-out errors of all folds are pooled.
pub fn cross_validate(
    dataset: &DatasetIndex,
    regions: &RegionSpec,
    cfg: &PipelineConfig,
    grid: &[u8],
    k: usize,
    seed: u64,
    exec: Exec,
) -> Result<CrossValidation> {
    let split = kfold_split(dataset.len(), k, seed)?;
    let m = build_error_matrix(dataset, regions, cfg, grid, exec)?;
    Ok(cross_validate_matrix(&m, split))
}

/// Cross-validation on a precomputed matrix. With `k == 1` the single fold
/// is tuned and scored on the same frames.
pub fn cross_validate_matrix(m: &ErrorMatrix, split: FoldSplit) -> CrossValidation {
    let mut outcomes: Vec<Option<Outcome>> = vec![None; m.len()];
    let mut fold_t_b = Vec::with_capacity(split.k);
    for f in 0..split.k {
        let train = if split.k == 1 { split.fold(f) } else { split.complement(f) };
        let tuned = m.tune(&train);
        let g = m.grid_index(tuned.t_b).expect("tuned value is on the grid");
        for i in split.fold(f) {
            outcomes[i] = Some(m.cells[i][g].clone());
        }
        fold_t_b.push(tuned.t_b);
    }
    let outcomes: Vec<Outcome> = outcomes.into_iter().map(|o| o.expect("folds cover every frame")).collect();
    let errors: Vec<ErrorTriple> = outcomes.iter().map(|o| o.errors).collect();
    let report = accuracy_at(&errors, &THRESHOLDS).expect("dataset is non-empty");
    CrossValidation {
        report,
        fold_t_b,
        split,
        outcomes,
    }
}

/// Per-frame CSV, one row per outcome.
pub fn results_csv(outcomes: &[Outcome]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for o in outcomes {
        let e = &o.errors;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            o.name, o.pred_l.x, o.pred_l.y, o.pred_r.x, o.pred_r.y, e.d_l, e.d_r, e.e_worst, e.e_best, e.e_average, o.method_l, o.method_r
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_values() {
        assert_eq!(
            default_grid(),
            vec![13, 26, 38, 51, 64, 77, 89, 102, 115, 128, 140, 153, 166, 179, 191, 204, 217, 230, 242]
        );
    }

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("60:10:100").unwrap(), vec![60, 70, 80, 90, 100]);
        assert_eq!(parse_grid("60:15:100").unwrap(), vec![60, 75, 90]);
        assert_eq!(parse_grid("77").unwrap(), vec![77]);
        assert_eq!(parse_grid("10, 20,30").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_grid("250:10:255").unwrap(), vec![250]);
        for bad in ["", "1:0:5", "9:1:3", "1:2", "300", "a"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    fn outcome(e: f64) -> Outcome {
        Outcome {
            name: String::new(),
            pred_l: Point::new(0, 0),
            pred_r: Point::new(0, 0),
            method_l: Method::HoughMinIntensity,
            method_r: Method::HoughMinIntensity,
            errors: ErrorTriple { d_l: e, d_r: e, e_worst: e, e_best: e, e_average: e },
        }
    }

    fn matrix(grid: Vec<u8>, errs: &[&[f64]]) -> ErrorMatrix {
        ErrorMatrix {
            grid,
            cells: errs.iter().map(|row| row.iter().map(|&e| outcome(e)).collect()).collect(),
        }
    }

    #[test]
    fn tune_objective_and_ties() {
        // 40 wins outright; on frame 1 alone 30 beats 20 at 0.10
        let m = matrix(vec![20, 30, 40], &[&[0.01, 0.01, 0.01], &[0.2, 0.08, 0.01], &[0.2, 0.2, 0.2]]);
        let all = [0, 1, 2];
        assert_eq!(m.tune(&all).t_b, 40);
        assert_eq!(m.tune(&[0, 1]).t_b, 40);
        assert_eq!(m.tune(&[0, 2]).t_b, 20);
        let t = m.tune(&[1]);
        assert_eq!((t.t_b, t.hits_05, t.hits_10), (40, 1, 1));
        let single = matrix(vec![99], &[&[0.5]]);
        assert_eq!(single.tune(&[0]).t_b, 99);
    }

    #[test]
    fn identical_frames_agree_across_folds() {
        let rows: Vec<&[f64]> = vec![&[0.3, 0.01]; 10];
        let m = matrix(vec![10, 20], &rows);
        let cv = cross_validate_matrix(&m, kfold_split(10, 5, 7).unwrap());
        assert_eq!(cv.fold_t_b, vec![20; 5]);
        assert!(cv.report.fractions.iter().all(|&f| f == 0.0 || f == 1.0));
    }

    #[test]
    fn csv_rows() {
        let mut o = outcome(0.05);
        o.name = "a.pgm".into();
        o.pred_l = Point::new(1, 2);
        o.pred_r = Point::new(3, 4);
        o.method_r = Method::RegionCenterFallback;
        assert_eq!(
            results_csv(&[o]),
            format!("{RESULTS_HEADER}\na.pgm,1,2,3,4,0.050000,0.050000,0.050000,0.050000,0.050000,hough_min_intensity,region_center_fallback\n")
        );
    }
}
