use cecl::hough::{accumulate, accumulate_with, best_circle, boundary_pixels, oracle_best_circle, ring_offsets, HoughParams};
use cecl::{BinaryImage, Exec, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Boundary pixels of a random mask: a few dark disks and bars plus
/// scattered dark pixels.
fn random_points(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Vec<Point> {
    let shapes: Vec<(i32, i32, i32)> = (0..rng.gen_range(0..=3))
        .map(|_| (rng.gen_range(0..w as i32), rng.gen_range(0..h as i32), rng.gen_range(2..=w as i32 / 2)))
        .collect();
    let speckle = rng.gen_range(0.0..0.08);
    let bar = rng.gen_bool(0.3).then(|| (rng.gen_range(0..h), rng.gen_range(1..4u32)));
    let mask = BinaryImage::from_fn(w, h, |x, y| {
        let dark_shape = shapes.iter().any(|&(cx, cy, r)| {
            let (dx, dy) = (x as i32 - cx, y as i32 - cy);
            dx * dx + dy * dy <= r * r
        });
        let dark_bar = bar.is_some_and(|(y0, t)| y >= y0 && y < y0 + t);
        !(dark_shape || dark_bar || rng.gen_bool(speckle))
    });
    boundary_pixels(&mask)
}

#[test]
fn accumulator_peak_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut found = 0;
    for case in 0..200 {
        let w = rng.gen_range(8..=64);
        let h = rng.gen_range(8..=64);
        let params = HoughParams {
            min_completeness: rng.gen_range(0.05..0.6),
            ..HoughParams::default()
        };
        let pts = random_points(&mut rng, w, h);
        let fast = best_circle(&accumulate(&pts, w, h, &params).unwrap());
        let slow = oracle_best_circle(&pts, w, h, &params);
        assert_eq!(fast, slow, "case {case}: {w}x{h}, {} points", pts.len());
        found += fast.is_some() as u32;
    }
    // the suite exercises both outcomes
    assert!(found > 20 && found < 200, "{found}");
}

#[test]
fn sequential_and_parallel_accumulators_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let pts = random_points(&mut rng, 64, 48);
        let p = HoughParams::default();
        assert_eq!(
            accumulate_with(&pts, 64, 48, &p, Exec::Sequential).unwrap(),
            accumulate_with(&pts, 64, 48, &p, Exec::Parallel).unwrap()
        );
    }
}

fn points_strategy() -> impl Strategy<Value = (u32, u32, Vec<(i32, i32)>)> {
    (16u32..48, 16u32..48).prop_flat_map(|(w, h)| {
        (
            Just(w),
            Just(h),
            prop::collection::vec((0..w as i32, 0..h as i32), 0..60),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn every_in_bounds_vote_is_counted((w, h, raw) in points_strategy()) {
        let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let p = HoughParams::default();
        let acc = accumulate(&pts, w, h, &p).unwrap();
        let (r_min, r_max) = acc.radius_bounds();
        let mut expected = 0u64;
        for q in &pts {
            for r in r_min..=r_max {
                expected += ring_offsets(r)
                    .iter()
                    .filter(|o| {
                        let (x, y) = (q.x + o.x, q.y + o.y);
                        x >= 0 && y >= 0 && x < w as i32 && y < h as i32
                    })
                    .count() as u64;
            }
        }
        prop_assert_eq!(acc.total_votes(), expected);
    }

    #[test]
    fn translation_shifts_the_accumulator(
        (w, h, raw) in points_strategy(),
        tx in -6i32..=6,
        ty in -6i32..=6,
    ) {
        let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let moved: Vec<Point> = pts.iter().map(|p| Point::new(p.x + tx, p.y + ty)).collect();
        let p = HoughParams::default();
        let a = accumulate(&pts, w, h, &p).unwrap();
        let b = accumulate(&moved, w, h, &p).unwrap();
        let (r_min, r_max) = a.radius_bounds();
        for r in r_min..=r_max {
            for cy in 0..h as i32 {
                for cx in 0..w as i32 {
                    let (mx, my) = (cx + tx, cy + ty);
                    if mx >= 0 && my >= 0 && mx < w as i32 && my < h as i32 {
                        prop_assert_eq!(a.count(cx as u32, cy as u32, r), b.count(mx as u32, my as u32, r));
                    }
                }
            }
        }
    }

    #[test]
    fn single_point_votes_its_ring_once(x in 20i32..28, y in 20i32..28) {
        let p = HoughParams::default();
        let acc = accumulate(&[Point::new(x, y)], 48, 48, &p).unwrap();
        let (r_min, _) = acc.radius_bounds();
        for o in ring_offsets(r_min) {
            prop_assert_eq!(acc.count((x + o.x) as u32, (y + o.y) as u32, r_min), 1);
        }
        prop_assert_eq!(acc.count(x as u32, y as u32, r_min), 0);
    }
}
