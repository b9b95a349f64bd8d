use super::{GrayImage, Point, Rect};
use crate::hough::Circle;

/// Pixels of a radius-`r` circle outline around the origin from the
/// midpoint (Bresenham) algorithm, deduplicated and sorted row-major.
pub fn midpoint_circle(r: u32) -> Vec<Point> {
    let r = r as i32;
    let mut pts = Vec::new();
    if r == 0 {
        return vec![Point::new(0, 0)];
    }
    let (mut x, mut y) = (r, 0);
    let mut d = 1 - r;
    while y <= x {
        for (px, py) in [
            (x, y),
            (y, x),
            (-y, x),
            (-x, y),
            (-x, -y),
            (-y, -x),
            (y, -x),
            (x, -y),
        ] {
            pts.push(Point::new(px, py));
        }
        y += 1;
        if d < 0 {
            d += 2 * y + 1;
        } else {
            x -= 1;
            d += 2 * (y - x) + 1;
        }
    }
    pts.sort_by_key(|p| (p.y, p.x));
    pts.dedup();
    pts
}

fn plot(img: &mut GrayImage, x: i32, y: i32) {
    if x >= 0 && y >= 0 && x < img.width() as i32 && y < img.height() as i32 {
        img.set(x as u32, y as u32, 255);
    }
}

/// Burns circle outlines and 5-pixel crosshairs into a copy of `image` at
/// intensity 255, clipping anything that falls off the raster.
pub fn annotate(image: &GrayImage, circles: &[Circle], points: &[Point]) -> GrayImage {
    let mut out = image.clone();
    for c in circles {
        for p in midpoint_circle(c.r) {
            plot(&mut out, c.cx + p.x, c.cy + p.y);
        }
    }
    for p in points {
        for d in -2..=2 {
            plot(&mut out, p.x + d, p.y);
            plot(&mut out, p.x, p.y + d);
        }
    }
    out
}

/// Burns the one-pixel outline of `rect` into `image` at intensity 255.
pub fn outline_rect(image: &mut GrayImage, rect: &Rect) {
    if rect.w == 0 || rect.h == 0 {
        return;
    }
    let (x0, y0) = (rect.x as i32, rect.y as i32);
    let (x1, y1) = (x0 + rect.w as i32 - 1, y0 + rect.h as i32 - 1);
    for x in x0..=x1 {
        plot(image, x, y0);
        plot(image, x, y1);
    }
    for y in y0..=y1 {
        plot(image, x0, y);
        plot(image, x1, y);
    }
}
