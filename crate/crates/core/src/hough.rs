//! Circular Hough transform over binary masks.
//!
//! Boundary pixels of the dark set vote for every circle that passes
//! through them: each point adds one vote to every accumulator cell on the
//! ring of radius `r` around it. A circle's score is its vote count divided
//! by the number of pixels on its ring, so a complete outline scores 1.0
//! regardless of radius.
//!
//! A ring of radius `r` is the set of integer offsets whose Euclidean
//! length rounds to `r`, i.e. `(2r − 1)² ≤ 4(dx² + dy²) < (2r + 1)²`.

use crate::image::{BinaryImage, Point};
use crate::{Error, Exec, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: i32,
    pub cy: i32,
    pub r: u32,
    /// Fraction of the ring covered by votes, in `[0, 1]`.
    pub score: f64,
}

impl Circle {
    /// Strictly inside: `dx² + dy² < r²`.
    pub fn contains(&self, x: i32, y: i32) -> bool {
        let (dx, dy) = ((x - self.cx) as i64, (y - self.cy) as i64);
        dx * dx + dy * dy < self.r as i64 * self.r as i64
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughParams {
    pub r_min_frac: f64,
    pub r_max_frac: f64,
    pub min_completeness: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            r_min_frac: 0.10,
            r_max_frac: 0.45,
            min_completeness: 0.35,
        }
    }
}

/// Smallest radius ever searched.
pub const MIN_RADIUS: u32 = 2;

impl HoughParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min_frac > 0.0 && self.r_min_frac < self.r_max_frac && self.r_max_frac <= 0.5) {
            return Err(Error::param(
                "r_min_frac/r_max_frac",
                format!(
                    "need 0 < r_min_frac < r_max_frac <= 0.5, got {} and {}",
                    self.r_min_frac, self.r_max_frac
                ),
            ));
        }
        if !(self.min_completeness > 0.0 && self.min_completeness <= 1.0) {
            return Err(Error::param(
                "min_completeness",
                format!("{} is outside (0, 1]", self.min_completeness),
            ));
        }
        Ok(())
    }

    /// Inclusive pixel radius bounds for a region of the given width:
    /// `r_min = max(2, round(r_min_frac · w))`, `r_max = floor(r_max_frac · w)`.
    pub fn radius_range(&self, region_width: u32) -> Result<(u32, u32)> {
        self.validate()?;
        let w = region_width as f64;
        let r_min = ((self.r_min_frac * w).round() as u32).max(MIN_RADIUS);
        let r_max = (self.r_max_frac * w).floor() as u32;
        if r_min > r_max {
            return Err(Error::param(
                "radius range",
                format!("empty for region width {region_width} (r_min {r_min} > r_max {r_max})"),
            ));
        }
        Ok((r_min, r_max))
    }
}

/// Offsets on the radius-`r` ring, sorted row-major.
pub fn ring_offsets(r: u32) -> Vec<Point> {
    let r = r as i64;
    let lo = (2 * r - 1) * (2 * r - 1);
    let hi = (2 * r + 1) * (2 * r + 1);
    let mut pts = Vec::new();
    for dy in -r - 1..=r + 1 {
        for dx in -r - 1..=r + 1 {
            let d = 4 * (dx * dx + dy * dy);
            if d >= lo && d < hi {
                pts.push(Point::new(dx as i32, dy as i32));
            }
        }
    }
    pts
}

/// Number of pixels on the radius-`r` ring.
pub fn perimeter_count(r: u32) -> usize {
    ring_offsets(r).len()
}

/// Dark pixels with at least one bright 4-neighbor (off-image counts as
/// bright), in row-major order.
pub fn boundary_pixels(binary: &BinaryImage) -> Vec<Point> {
    let (w, h) = binary.dimensions();
    let bright = |x: i64, y: i64| {
        x < 0 || y < 0 || x >= w as i64 || y >= h as i64 || !binary.is_dark(x as u32, y as u32)
    };
    let mut out = Vec::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if binary.is_dark(x as u32, y as u32)
                && (bright(x - 1, y) || bright(x + 1, y) || bright(x, y - 1) || bright(x, y + 1))
            {
                out.push(Point::new(x as i32, y as i32));
            }
        }
    }
    out
}

/// `(cx, cy, r)` vote volume at 1-pixel resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct HoughAccumulator {
    width: u32,
    height: u32,
    r_min: u32,
    r_max: u32,
    min_completeness: f64,
    counts: Vec<u32>,
}

impl HoughAccumulator {
    fn zeros(width: u32, height: u32, r_min: u32, r_max: u32, min_completeness: f64) -> Self {
        let n = width as usize * height as usize * (r_max - r_min + 1) as usize;
        HoughAccumulator {
            width,
            height,
            r_min,
            r_max,
            min_completeness,
            counts: vec![0; n],
        }
    }

    pub fn dims(&self) -> (u32, u32, u32) {
        (self.width, self.height, self.r_max - self.r_min + 1)
    }

    pub fn radius_bounds(&self) -> (u32, u32) {
        (self.r_min, self.r_max)
    }

    #[inline]
    fn index(&self, cx: u32, cy: u32, r: u32) -> usize {
        (((r - self.r_min) * self.height + cy) * self.width + cx) as usize
    }

    /// Votes at `(cx, cy, r)`; zero for radii outside the searched range.
    pub fn count(&self, cx: u32, cy: u32, r: u32) -> u32 {
        if r < self.r_min || r > self.r_max || cx >= self.width || cy >= self.height {
            0
        } else {
            self.counts[self.index(cx, cy, r)]
        }
    }

    pub fn total_votes(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Radius-normalized score of a cell.
    pub fn score(&self, cx: u32, cy: u32, r: u32) -> f64 {
        self.count(cx, cy, r) as f64 / perimeter_count(r) as f64
    }

    fn merge(mut self, other: HoughAccumulator) -> HoughAccumulator {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }
}

/// Scatters votes from `points` into a `width × height` center grid for
/// every radius in `params.radius_range(width)`.
pub fn accumulate(points: &[Point], width: u32, height: u32, params: &HoughParams) -> Result<HoughAccumulator> {
    accumulate_with(points, width, height, params, Exec::default())
}

pub fn accumulate_with(
    points: &[Point],
    width: u32,
    height: u32,
    params: &HoughParams,
    exec: Exec,
) -> Result<HoughAccumulator> {
    let (r_min, r_max) = params.radius_range(width)?;
    let rings: Vec<Vec<Point>> = (r_min..=r_max).map(ring_offsets).collect();
    let empty = || HoughAccumulator::zeros(width, height, r_min, r_max, params.min_completeness);
    let plane = width as usize * height as usize;

    let acc = exec.fold_chunks(
        points,
        256,
        empty,
        |acc, chunk| {
            for p in chunk {
                for (ri, ring) in rings.iter().enumerate() {
                    let base = ri * plane;
                    for o in ring {
                        let (x, y) = (p.x + o.x, p.y + o.y);
                        if x >= 0 && y >= 0 && (x as u32) < width && (y as u32) < height {
                            acc.counts[base + y as usize * width as usize + x as usize] += 1;
                        }
                    }
                }
            }
        },
        HoughAccumulator::merge,
    );
    Ok(acc)
}

/// Highest-scoring cell, if its score reaches the completeness threshold.
///
/// Ties on score go to the higher raw count, then the smaller radius, then
/// the row-major first center.
pub fn best_circle(acc: &HoughAccumulator) -> Option<Circle> {
    // (count, perimeter, r, cx, cy)
    let mut best: Option<(u64, u64, u32, u32, u32)> = None;
    for r in acc.r_min..=acc.r_max {
        let per = perimeter_count(r) as u64;
        for cy in 0..acc.height {
            for cx in 0..acc.width {
                let c = acc.counts[acc.index(cx, cy, r)] as u64;
                if c == 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bc, bp, ..)) => {
                        let (lhs, rhs) = (c * bp, bc * per);
                        lhs > rhs || (lhs == rhs && c > bc)
                    }
                };
                if better {
                    best = Some((c, per, r, cx, cy));
                }
            }
        }
    }
    let (c, per, r, cx, cy) = best?;
    let score = c as f64 / per as f64;
    (score >= acc.min_completeness).then_some(Circle {
        cx: cx as i32,
        cy: cy as i32,
        r,
        score,
    })
}

/// Exhaustive reference for [`best_circle`] ∘ [`accumulate`]: scores every
/// `(cx, cy, r)` directly by counting the points whose rounded distance to
/// the center equals `r`. Quadratic in the image area; meant for instances
/// of at most 64×64 pixels and 40 radii.
pub fn oracle_best_circle(points: &[Point], width: u32, height: u32, params: &HoughParams) -> Option<Circle> {
    let (r_min, r_max) = params.radius_range(width).ok()?;
    let rounded = |dx: i64, dy: i64| (((dx * dx + dy * dy) as f64).sqrt()).round() as u32;
    let perimeter: Vec<f64> = (r_min..=r_max)
        .map(|r| {
            let span = r as i64 + 1;
            let mut n = 0usize;
            for dy in -span..=span {
                for dx in -span..=span {
                    if rounded(dx, dy) == r {
                        n += 1;
                    }
                }
            }
            n as f64
        })
        .collect();

    let mut best: Option<(f64, u32, u32, i32, i32)> = None;
    let nr = (r_max - r_min + 1) as usize;
    for cy in 0..height as i32 {
        for cx in 0..width as i32 {
            let mut counts = vec![0u32; nr];
            for p in points {
                let r = rounded((p.x - cx) as i64, (p.y - cy) as i64);
                if (r_min..=r_max).contains(&r) {
                    counts[(r - r_min) as usize] += 1;
                }
            }
            for (i, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let r = r_min + i as u32;
                let s = c as f64 / perimeter[i];
                let take = match best {
                    None => true,
                    Some((bs, bc, br, bx, by)) => {
                        s > bs
                            || (s == bs && c > bc)
                            || (s == bs && c == bc && (r, cy, cx) < (br, by, bx))
                    }
                };
                if take {
                    best = Some((s, c, r, cx, cy));
                }
            }
        }
    }
    let (score, _, r, cx, cy) = best?;
    (score >= params.min_completeness).then_some(Circle { cx, cy, r, score })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_for(r_min: f64, r_max: f64, min_c: f64) -> HoughParams {
        HoughParams {
            r_min_frac: r_min,
            r_max_frac: r_max,
            min_completeness: min_c,
        }
    }

    fn circle_points(cx: i32, cy: i32, r: u32) -> Vec<Point> {
        ring_offsets(r)
            .into_iter()
            .map(|o| Point::new(cx + o.x, cy + o.y))
            .collect()
    }

    #[test]
    fn ring_matches_rounded_distance() {
        for r in 1..30u32 {
            let ring = ring_offsets(r);
            let span = r as i32 + 2;
            let mut n = 0;
            for dy in -span..=span {
                for dx in -span..=span {
                    let d = ((dx * dx + dy * dy) as f64).sqrt().round() as u32;
                    if d == r {
                        n += 1;
                        assert!(ring.contains(&Point::new(dx, dy)));
                    }
                }
            }
            assert_eq!(ring.len(), n);
        }
        assert_eq!(perimeter_count(1), 8);
    }

    #[test]
    fn radius_range_rules() {
        let p = HoughParams::default();
        assert_eq!(p.radius_range(60).unwrap(), (6, 27));
        assert_eq!(p.radius_range(10).unwrap(), (2, 4));
        assert!(p.radius_range(4).is_err());
        assert!(params_for(0.3, 0.2, 0.5).validate().is_err());
        assert!(params_for(0.1, 0.6, 0.5).validate().is_err());
        assert!(params_for(0.1, 0.4, 0.0).validate().is_err());
    }

    #[test]
    fn boundary_cases() {
        assert!(boundary_pixels(&BinaryImage::filled(5, 5, true)).is_empty());
        let single = BinaryImage::from_fn(5, 5, |x, y| !(x == 2 && y == 3));
        assert_eq!(boundary_pixels(&single), vec![Point::new(2, 3)]);
        // off-image neighbors are bright
        let dark = BinaryImage::filled(3, 3, false);
        assert_eq!(boundary_pixels(&dark).len(), 8);
    }

    #[test]
    fn disk_boundary_matches_reference() {
        let r2 = 25;
        let disk = BinaryImage::from_fn(21, 21, |x, y| {
            let (dx, dy) = (x as i32 - 10, y as i32 - 10);
            dx * dx + dy * dy > r2
        });
        // reference: disk pixels not fully surrounded (4-connectivity) by disk pixels
        let inside = |x: i32, y: i32| (x - 10) * (x - 10) + (y - 10) * (y - 10) <= r2;
        let mut expected = Vec::new();
        for y in 0..21 {
            for x in 0..21 {
                if inside(x, y)
                    && !(inside(x - 1, y) && inside(x + 1, y) && inside(x, y - 1) && inside(x, y + 1))
                {
                    expected.push(Point::new(x, y));
                }
            }
        }
        assert_eq!(boundary_pixels(&disk), expected);
        assert_eq!(expected.len(), 28);
    }

    #[test]
    fn empty_points_give_empty_accumulator() {
        let acc = accumulate(&[], 20, 20, &HoughParams::default()).unwrap();
        assert_eq!(acc.total_votes(), 0);
        assert_eq!(best_circle(&acc), None);
        assert_eq!(oracle_best_circle(&[], 20, 20, &HoughParams::default()), None);
    }

    #[test]
    fn single_point_votes_form_a_ring() {
        // width 40 with fracs 0.25..0.26 pins r to 10
        let p = params_for(0.25, 0.26, 0.1);
        assert_eq!(p.radius_range(40).unwrap(), (10, 10));
        let acc = accumulate(&[Point::new(20, 20)], 40, 40, &p).unwrap();
        assert_eq!(acc.total_votes(), perimeter_count(10) as u64);
        for o in ring_offsets(10) {
            assert_eq!(acc.count((20 + o.x) as u32, (20 + o.y) as u32, 10), 1);
        }
    }

    #[test]
    fn perfect_circle_scores_one() {
        let p = params_for(0.1, 0.45, 0.35);
        let pts = circle_points(16, 15, 9);
        let acc = accumulate(&pts, 32, 32, &p).unwrap();
        assert_eq!(acc.count(16, 15, 9) as usize, perimeter_count(9));
        let best = best_circle(&acc).unwrap();
        assert_eq!((best.cx, best.cy, best.r, best.score), (16, 15, 9, 1.0));
        let oracle = oracle_best_circle(&pts, 32, 32, &p).unwrap();
        assert_eq!((oracle.cx, oracle.cy, oracle.r), (16, 15, 9));
    }

    #[test]
    fn half_arc_scores_about_half() {
        let pts: Vec<Point> = circle_points(20, 20, 10).into_iter().filter(|p| p.y < 20).collect();
        let per = perimeter_count(10);
        let expected = pts.len() as f64 / per as f64;
        assert!((expected - 0.5).abs() < 0.05, "{expected}");
        let acc = accumulate(&pts, 40, 40, &params_for(0.25, 0.26, 0.1)).unwrap();
        assert_eq!(acc.score(20, 20, 10), expected);

        let accept = accumulate(&pts, 40, 40, &params_for(0.25, 0.26, 0.45)).unwrap();
        assert!(best_circle(&accept).is_some());
        let reject = accumulate(&pts, 40, 40, &params_for(0.25, 0.26, 0.55)).unwrap();
        assert_eq!(best_circle(&reject), None);
    }

    #[test]
    fn sequential_and_parallel_volumes_agree() {
        let pts: Vec<Point> = (0..900).map(|i| Point::new(i % 37, (i * 7) % 29)).collect();
        let p = HoughParams::default();
        let a = accumulate_with(&pts, 40, 30, &p, Exec::Sequential).unwrap();
        let b = accumulate_with(&pts, 40, 30, &p, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
