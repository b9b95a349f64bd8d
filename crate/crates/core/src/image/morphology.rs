use super::BinaryImage;
use crate::{Error, Result};

/// Square structuring element with an odd side of at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    side: u32,
}

impl StructuringElement {
    pub fn square(side: u32) -> Result<Self> {
        if side < 3 || side.is_multiple_of(2) {
            return Err(Error::param("side", format!("{side} must be odd and at least 3")));
        }
        Ok(StructuringElement { side })
    }

    /// `max(3, nearest odd integer to frac × region_width)`, ties rounding up.
    pub fn for_region_width(region_width: u32, frac: f64) -> Self {
        let target = frac * region_width as f64;
        let odd = 2.0 * ((target - 1.0) / 2.0).round() + 1.0;
        let side = if odd.is_finite() && odd > 3.0 { odd as u32 } else { 3 };
        StructuringElement { side }
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn half(&self) -> u32 {
        self.side / 2
    }
}

/// Morphological closing of the dark (0) set: dilate the dark pixels, then
/// erode them. Everything outside the raster is bright.
///
/// The computation runs on a canvas padded by half the element so dark
/// pixels touching the border are not eroded by the surrounding bright
/// plane; the result is extensive and idempotent on the dark set.
pub fn close_dark(image: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = image.dimensions();
    let half = se.half() as usize;
    let (cw, ch) = (w as usize + 2 * half, h as usize + 2 * half);

    let mut dark = vec![false; cw * ch];
    for y in 0..h as usize {
        for x in 0..w as usize {
            dark[(y + half) * cw + x + half] = image.is_dark(x as u32, y as u32);
        }
    }

    // dilation: separable max over the square, off-canvas reads as bright
    let mut horiz = vec![false; cw * ch];
    for y in 0..ch {
        let row = &dark[y * cw..(y + 1) * cw];
        for x in 0..cw {
            let lo = x.saturating_sub(half);
            let hi = (x + half).min(cw - 1);
            horiz[y * cw + x] = row[lo..=hi].iter().any(|&d| d);
        }
    }
    let mut dilated = vec![false; cw * ch];
    for y in 0..ch {
        let lo = y.saturating_sub(half);
        let hi = (y + half).min(ch - 1);
        for x in 0..cw {
            dilated[y * cw + x] = (lo..=hi).any(|yy| horiz[yy * cw + x]);
        }
    }

    // erosion, evaluated only where the full window lies on the canvas
    let mut out = BinaryImage::filled(w, h, true);
    for y in 0..h as usize {
        for x in 0..w as usize {
            let (cx, cy) = (x + half, y + half);
            let all_dark = (cy - half..=cy + half)
                .all(|yy| dilated[yy * cw + cx - half..=yy * cw + cx + half].iter().all(|&d| d));
            out.set(x as u32, y as u32, !all_dark);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Closing of the dark set as a subset of the infinite plane, restricted
    /// to the raster, by direct enumeration.
    fn brute_force_close(img: &BinaryImage, side: u32) -> BinaryImage {
        let (w, h) = (img.width() as i32, img.height() as i32);
        let r = (side / 2) as i32;
        let dilated = |qx: i32, qy: i32| {
            (qy - r..=qy + r).any(|py| {
                (qx - r..=qx + r).any(|px| {
                    px >= 0 && py >= 0 && px < w && py < h && img.is_dark(px as u32, py as u32)
                })
            })
        };
        BinaryImage::from_fn(img.width(), img.height(), |x, y| {
            let (x, y) = (x as i32, y as i32);
            let closed = (y - r..=y + r).all(|qy| (x - r..=x + r).all(|qx| dilated(qx, qy)));
            !closed
        })
    }

    fn random_mask(rng: &mut ChaCha8Rng, w: u32, h: u32, p_dark: f64) -> BinaryImage {
        BinaryImage::from_fn(w, h, |_, _| !rng.gen_bool(p_dark))
    }

    #[test]
    fn se_validation_and_rule() {
        assert!(StructuringElement::square(2).is_err());
        assert!(StructuringElement::square(1).is_err());
        assert!(StructuringElement::square(4).is_err());
        assert_eq!(StructuringElement::square(5).unwrap().side(), 5);
        assert_eq!(StructuringElement::for_region_width(20, 0.05).side(), 3);
        assert_eq!(StructuringElement::for_region_width(80, 0.05).side(), 5);
        assert_eq!(StructuringElement::for_region_width(100, 0.05).side(), 5);
        assert_eq!(StructuringElement::for_region_width(140, 0.05).side(), 7);
        assert_eq!(StructuringElement::for_region_width(1, 0.05).side(), 3);
    }

    #[test]
    fn all_dark_is_fixed_point() {
        let img = BinaryImage::filled(7, 5, false);
        let se = StructuringElement::square(3).unwrap();
        assert_eq!(close_dark(&img, &se), img);
    }

    #[test]
    fn fills_bright_speck_in_dark_disk() {
        let img = BinaryImage::from_fn(15, 15, |x, y| {
            let (dx, dy) = (x as i32 - 7, y as i32 - 7);
            let inside = dx * dx + dy * dy <= 16;
            !(inside && !(dx == 0 && dy == 0))
        });
        assert_eq!(img.get(7, 7), 1);
        let out = close_dark(&img, &StructuringElement::square(3).unwrap());
        assert_eq!(out.get(7, 7), 0);
    }

    #[test]
    fn matches_plane_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for i in 0..120 {
            let side = [3, 5, 7][i % 3];
            let img = random_mask(&mut rng, 16, 16, 0.3 + 0.4 * (i as f64 / 120.0));
            let se = StructuringElement::square(side).unwrap();
            assert_eq!(close_dark(&img, &se), brute_force_close(&img, side));
        }
    }

    #[test]
    fn idempotent_and_extensive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..150 {
            let side = [3, 5][i % 2];
            let img = random_mask(&mut rng, 16, 16, 0.5);
            let se = StructuringElement::square(side).unwrap();
            let once = close_dark(&img, &se);
            assert_eq!(close_dark(&once, &se), once);
            for y in 0..16 {
                for x in 0..16 {
                    if img.is_dark(x, y) {
                        assert!(once.is_dark(x, y));
                    }
                }
            }
        }
    }
}
