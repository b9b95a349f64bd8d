use super::{GrayImage, Rect};

/// Summed-area tables of the intensities and of their squares, each of size
/// `(width + 1) × (height + 1)` with a zero first row and column.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: u32,
    height: u32,
    sum: Vec<u64>,
    sq: Vec<u64>,
}

impl IntegralImage {
    pub fn new(image: &GrayImage) -> Self {
        let (w, h) = image.dimensions();
        let stride = w as usize + 1;
        let mut sum = vec![0u64; stride * (h as usize + 1)];
        let mut sq = vec![0u64; stride * (h as usize + 1)];
        for y in 0..h as usize {
            let mut row_sum = 0u64;
            let mut row_sq = 0u64;
            for (x, &v) in image.row(y as u32).iter().enumerate() {
                row_sum += v as u64;
                row_sq += v as u64 * v as u64;
                let i = (y + 1) * stride + x + 1;
                sum[i] = sum[i - stride] + row_sum;
                sq[i] = sq[i - stride] + row_sq;
            }
        }
        IntegralImage {
            width: w,
            height: h,
            sum,
            sq,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Cumulative sum of the pixels strictly above and left of `(x, y)`.
    pub fn at(&self, x: u32, y: u32) -> u64 {
        self.sum[y as usize * (self.width as usize + 1) + x as usize]
    }

    pub fn sq_at(&self, x: u32, y: u32) -> u64 {
        self.sq[y as usize * (self.width as usize + 1) + x as usize]
    }

    #[inline]
    fn four_corner(table: &[u64], stride: usize, x: u32, y: u32, w: u32, h: u32) -> u64 {
        let (x0, y0) = (x as usize, y as usize);
        let (x1, y1) = (x0 + w as usize, y0 + h as usize);
        table[y1 * stride + x1] + table[y0 * stride + x0] - table[y0 * stride + x1] - table[y1 * stride + x0]
    }

    /// Sum of intensities over `w × h` pixels at `(x, y)`. The rect must lie
    /// inside the image.
    #[inline]
    pub fn rect_sum(&self, x: u32, y: u32, w: u32, h: u32) -> u64 {
        Self::four_corner(&self.sum, self.width as usize + 1, x, y, w, h)
    }

    #[inline]
    pub fn rect_sq_sum(&self, x: u32, y: u32, w: u32, h: u32) -> u64 {
        Self::four_corner(&self.sq, self.width as usize + 1, x, y, w, h)
    }

    pub fn sum_of(&self, r: &Rect) -> u64 {
        self.rect_sum(r.x, r.y, r.w, r.h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_ones() {
        let ii = IntegralImage::new(&GrayImage::filled(3, 3, 1));
        assert_eq!(ii.rect_sum(0, 0, 3, 3), 9);
        assert_eq!(ii.rect_sq_sum(0, 0, 3, 3), 9);
    }

    #[test]
    fn single_pixel() {
        let ii = IntegralImage::new(&GrayImage::filled(1, 1, 5));
        assert_eq!(ii.rect_sum(0, 0, 1, 1), 5);
        assert_eq!(ii.rect_sq_sum(0, 0, 1, 1), 25);
    }

    #[test]
    fn zero_border_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = GrayImage::from_fn(13, 9, |_, _| rng.gen());
        let ii = IntegralImage::new(&img);
        for x in 0..=13 {
            assert_eq!(ii.at(x, 0), 0);
        }
        for y in 0..=9 {
            assert_eq!(ii.at(0, y), 0);
        }
        for y in 1..=9 {
            for x in 1..=13 {
                assert!(ii.at(x, y) >= ii.at(x - 1, y));
                assert!(ii.at(x, y) >= ii.at(x, y - 1));
            }
        }
    }

    #[test]
    fn rect_sums_match_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let img = GrayImage::from_fn(32, 32, |_, _| rng.gen());
            let ii = IntegralImage::new(&img);
            for _ in 0..100 {
                let x = rng.gen_range(0..32);
                let y = rng.gen_range(0..32);
                let w = rng.gen_range(1..=32 - x);
                let h = rng.gen_range(1..=32 - y);
                let (mut s, mut q) = (0u64, 0u64);
                for yy in y..y + h {
                    for xx in x..x + w {
                        let v = img.get(xx, yy) as u64;
                        s += v;
                        q += v * v;
                    }
                }
                assert_eq!(ii.rect_sum(x, y, w, h), s);
                assert_eq!(ii.rect_sq_sum(x, y, w, h), q);
            }
        }
    }
}
