use super::{Method, PipelineConfig};
use crate::hough::{accumulate, best_circle, boundary_pixels, Circle};
use crate::image::{binarize, close_dark, equalize_histogram, BinaryImage, GrayImage, Point, Rect, StructuringElement};

/// Smallest region height kept after the eyebrow crop.
pub const MIN_CROPPED_HEIGHT: u32 = 4;

#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub binary: BinaryImage,
    pub equalized: GrayImage,
    /// Rows removed from the top of the region.
    pub crop_rows: u32,
    /// Set when the crop would have left fewer than
    /// [`MIN_CROPPED_HEIGHT`] rows and the whole region was used.
    pub uncropped: bool,
}

/// Eyebrow crop, histogram equalization, binarization at `t_b` and closing
/// of the dark set.
pub fn preprocess(region: &GrayImage, cfg: &PipelineConfig) -> Preprocessed {
    let (w, h) = region.dimensions();
    let rows = (cfg.t_e * h as f64).floor() as u32;
    let (crop_rows, uncropped) = if h.saturating_sub(rows) >= MIN_CROPPED_HEIGHT {
        (rows, false)
    } else {
        (0, rows > 0)
    };
    let cropped = region
        .crop(&Rect::new(0, crop_rows, w, h - crop_rows))
        .expect("crop stays inside the region");
    let equalized = equalize_histogram(&cropped);
    let se = StructuringElement::for_region_width(w, cfg.se_frac);
    let binary = close_dark(&binarize(&equalized, cfg.t_b), &se);
    Preprocessed {
        binary,
        equalized,
        crop_rows,
        uncropped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localized {
    /// Coordinates within the pre-processed region.
    pub point: Point,
    pub method: Method,
    pub circle: Option<Circle>,
}

/// Darkest-pixel center inside `circle`: the rounded centroid of all pixels
/// at the minimum value, snapped to the nearest such pixel when the
/// centroid leaves the circle.
fn min_intensity_center(gray: &GrayImage, circle: &Circle) -> Point {
    let (w, h) = (gray.width() as i32, gray.height() as i32);
    let r = circle.r as i32;
    let mut min = u8::MAX;
    let mut members: Vec<Point> = Vec::new();
    for y in (circle.cy - r).max(0)..=(circle.cy + r).min(h - 1) {
        for x in (circle.cx - r).max(0)..=(circle.cx + r).min(w - 1) {
            if !circle.contains(x, y) {
                continue;
            }
            let v = gray.get(x as u32, y as u32);
            if v < min {
                min = v;
                members.clear();
            }
            if v == min {
                members.push(Point::new(x, y));
            }
        }
    }
    if members.is_empty() {
        return circle.center();
    }
    let n = members.len() as f64;
    let mx = members.iter().map(|p| p.x as f64).sum::<f64>() / n;
    let my = members.iter().map(|p| p.y as f64).sum::<f64>() / n;
    let centroid = Point::new(mx.round() as i32, my.round() as i32);
    if circle.contains(centroid.x, centroid.y) {
        return centroid;
    }
    let dist2 = |p: &Point| {
        let (dx, dy) = ((p.x - circle.cx) as i64, (p.y - circle.cy) as i64);
        dx * dx + dy * dy
    };
    // members are in row-major order and min_by_key keeps the first minimum
    *members.iter().min_by_key(|p| dist2(p)).expect("non-empty")
}

/// Hough circle search on `binary`, then the min-intensity center on
/// `equalized`; the region center `(⌊w/2⌋, ⌊h/2⌋)` when no circle qualifies.
pub fn localize_center(binary: &BinaryImage, equalized: &GrayImage, cfg: &PipelineConfig) -> Localized {
    debug_assert_eq!(binary.dimensions(), equalized.dimensions());
    let (w, h) = binary.dimensions();
    let points = boundary_pixels(binary);
    let circle = if points.is_empty() {
        None
    } else {
        accumulate(&points, w, h, &cfg.hough)
            .ok()
            .and_then(|acc| best_circle(&acc))
    };
    match circle {
        Some(c) => Localized {
            point: min_intensity_center(equalized, &c),
            method: Method::HoughMinIntensity,
            circle: Some(c),
        },
        None => Localized {
            point: Point::new((w / 2) as i32, (h / 2) as i32),
            method: Method::RegionCenterFallback,
            circle: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn zero_t_e_keeps_every_row() {
        let region = GrayImage::from_fn(20, 16, |x, y| (x * 10 + y) as u8);
        let c = PipelineConfig { t_e: 0.0, ..cfg() };
        let pre = preprocess(&region, &c);
        assert_eq!(pre.crop_rows, 0);
        assert!(!pre.uncropped);
        assert_eq!(pre.binary.dimensions(), (20, 16));
    }

    #[test]
    fn tiny_region_is_left_uncropped() {
        let region = GrayImage::filled(6, 4, 100);
        let pre = preprocess(&region, &cfg());
        assert!(pre.uncropped);
        assert_eq!(pre.crop_rows, 0);
        assert_eq!(pre.equalized.dimensions(), (6, 4));
    }

    #[test]
    fn uniform_bright_region_has_no_dark_object() {
        let region = GrayImage::filled(40, 30, 255);
        for t_b in [0u8, 77, 200, 254] {
            let pre = preprocess(&region, &PipelineConfig { t_b, ..cfg() });
            assert_eq!(pre.binary.count_bright(), 40 * 21);
        }
    }

    #[test]
    fn speck_inside_disk_is_closed() {
        // 60x60 patch, t_e removes the top 18 rows; disk center ends at (30, 22)
        let region = GrayImage::from_fn(60, 60, |x, y| {
            let (dx, dy) = (x as i32 - 30, y as i32 - 40);
            if dx == 1 && dy == 0 {
                240
            } else if dx * dx + dy * dy <= 100 {
                40
            } else {
                200
            }
        });
        let pre = preprocess(&region, &cfg());
        assert_eq!(pre.crop_rows, 18);
        assert_eq!(pre.binary.get(31, 22), 0, "speck must be closed");
        assert_eq!(pre.binary.get(30, 22), 0);
        assert_eq!(pre.binary.get(2, 2), 1);
    }

    #[test]
    fn empty_binary_falls_back_to_region_center() {
        let bin = BinaryImage::filled(31, 20, true);
        let gray = GrayImage::filled(31, 20, 128);
        let loc = localize_center(&bin, &gray, &cfg());
        assert_eq!(loc.method, Method::RegionCenterFallback);
        assert_eq!(loc.point, Point::new(15, 10));
        assert_eq!(loc.circle, None);
    }

    fn disk_pair(w: u32, h: u32, cx: i32, cy: i32, r: i32) -> (BinaryImage, impl Fn(i32, i32) -> bool) {
        let inside = move |x: i32, y: i32| (x - cx).pow(2) + (y - cy).pow(2) <= r * r;
        (BinaryImage::from_fn(w, h, |x, y| !inside(x as i32, y as i32)), inside)
    }

    #[test]
    fn unique_darkest_pixel_is_the_center() {
        let (bin, inside) = disk_pair(50, 40, 24, 19, 9);
        let gray = GrayImage::from_fn(50, 40, |x, y| {
            let (x, y) = (x as i32, y as i32);
            if (x, y) == (25, 20) {
                3
            } else if inside(x, y) {
                50
            } else {
                220
            }
        });
        let loc = localize_center(&bin, &gray, &cfg());
        assert_eq!(loc.method, Method::HoughMinIntensity);
        assert_eq!(loc.point, Point::new(25, 20));
    }

    #[test]
    fn darkest_block_uses_rounded_centroid() {
        let (bin, inside) = disk_pair(50, 40, 24, 19, 9);
        // 2x2 block at x ∈ {27, 28}, y ∈ {16, 17}: centroid (27.5, 16.5) → (28, 17)
        let gray = GrayImage::from_fn(50, 40, |x, y| {
            let (x, y) = (x as i32, y as i32);
            if (27..=28).contains(&x) && (16..=17).contains(&y) {
                5
            } else if inside(x, y) {
                50
            } else {
                220
            }
        });
        let loc = localize_center(&bin, &gray, &cfg());
        assert_eq!(loc.point, Point::new(28, 17));
        assert!(loc.circle.unwrap().contains(28, 17));
    }

    #[test]
    fn rounded_centroid_outside_circle_snaps_to_nearest_member() {
        let circle = Circle { cx: 10, cy: 10, r: 6, score: 1.0 };
        // members (13, 15) and (14, 14) are inside (d² = 34, 32); their
        // centroid (13.5, 14.5) rounds to (14, 15) with d² = 41 ≥ 36
        let gray = GrayImage::from_fn(21, 21, |x, y| match (x, y) {
            (13, 15) | (14, 14) => 0,
            _ => 100,
        });
        assert_eq!(min_intensity_center(&gray, &circle), Point::new(14, 14));
    }
}
