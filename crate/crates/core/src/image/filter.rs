use super::GrayImage;
use crate::{Error, Exec, Result};

/// Square convolution kernel, row-major weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::param("size", format!("kernel size {size} must be odd")));
        }
        if weights.len() != size * size {
            return Err(Error::param("weights", "expected size × size weights"));
        }
        Ok(Kernel { size, weights })
    }

    pub fn identity() -> Self {
        Kernel {
            size: 1,
            weights: vec![1.0],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at offset `(dx, dy)` from the center.
    pub fn at(&self, dx: i32, dy: i32) -> f64 {
        let half = (self.size / 2) as i32;
        self.weights[((dy + half) as usize) * self.size + (dx + half) as usize]
    }
}

/// Sampled, normalized Gaussian: weights ∝ exp(−(dx²+dy²)/(2σ²)) at integer
/// offsets from the center.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Kernel> {
    if size.is_multiple_of(2) {
        return Err(Error::param("size", format!("kernel size {size} must be odd")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("{sigma} must be positive and finite")));
    }
    let half = (size / 2) as i64;
    let two_var = 2.0 * sigma * sigma;
    let mut weights = Vec::with_capacity(size * size);
    for dy in -half..=half {
        for dx in -half..=half {
            weights.push((-((dx * dx + dy * dy) as f64) / two_var).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Kernel::new(size, weights)
}

/// Convolution with replicated borders; results are rounded half away from
/// zero and clamped to `0..=255`.
pub fn convolve(image: &GrayImage, kernel: &Kernel) -> GrayImage {
    convolve_with(image, kernel, Exec::default())
}

pub fn convolve_with(image: &GrayImage, kernel: &Kernel, exec: Exec) -> GrayImage {
    let (w, h) = image.dimensions();
    let half = (kernel.size() / 2) as i64;
    let clamp_x = |x: i64| x.clamp(0, w as i64 - 1) as u32;
    let clamp_y = |y: i64| y.clamp(0, h as i64 - 1) as u32;

    let rows = exec.map_range(h as usize, |y| {
        let y = y as i64;
        let mut row = Vec::with_capacity(w as usize);
        for x in 0..w as i64 {
            let mut acc = 0.0;
            let mut k = 0;
            for dy in -half..=half {
                let src = image.row(clamp_y(y + dy));
                for dx in -half..=half {
                    acc += kernel.weights[k] * src[clamp_x(x + dx) as usize] as f64;
                    k += 1;
                }
            }
            row.push(acc.round().clamp(0.0, 255.0) as u8);
        }
        row
    });
    GrayImage::new(w, h, rows.concat()).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn size_one_is_identity() {
        for sigma in [0.1, 1.0, 100.0] {
            assert_eq!(gaussian_kernel(1, sigma).unwrap().weights(), &[1.0]);
        }
    }

    #[test]
    fn wide_sigma_approaches_box() {
        let k = gaussian_kernel(3, 1000.0).unwrap();
        for w in k.weights() {
            assert!((w - 1.0 / 9.0).abs() < 1e-6);
        }
    }

    #[test]
    fn bioid_width_rule_center_weight() {
        // sigma = 0.05 * 384; values from a 30-digit evaluation of the
        // normalized sampled Gaussian
        let k = gaussian_kernel(5, 0.05 * 384.0).unwrap();
        assert!((k.at(0, 0) - 0.040_217_396_521_994_995).abs() < 1e-15);
        assert!((k.at(2, 2) - 0.039_783_368_850_245_647).abs() < 1e-15);
    }

    #[test]
    fn parameter_errors() {
        assert!(gaussian_kernel(4, 1.0).is_err());
        assert!(gaussian_kernel(3, 0.0).is_err());
        assert!(gaussian_kernel(3, -1.0).is_err());
        assert!(gaussian_kernel(3, f64::NAN).is_err());
    }

    #[test]
    fn kernel_symmetry_and_normalization() {
        for &(size, sigma) in &[(3, 0.7), (5, 19.2), (7, 1.3), (9, 2.0)] {
            let k = gaussian_kernel(size, sigma).unwrap();
            let sum: f64 = k.weights().iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            let half = (size / 2) as i32;
            for dy in -half..=half {
                for dx in -half..=half {
                    let w = k.at(dx, dy);
                    assert_eq!(w, k.at(-dx, dy));
                    assert_eq!(w, k.at(dx, -dy));
                    assert_eq!(w, k.at(dy, dx));
                }
            }
        }
    }

    #[test]
    fn constant_image_is_preserved() {
        let k = gaussian_kernel(5, 2.0).unwrap();
        for c in [0u8, 1, 77, 254, 255] {
            let img = GrayImage::filled(9, 6, c);
            assert_eq!(convolve(&img, &k), img);
        }
    }

    #[test]
    fn identity_kernel_is_noop() {
        let img = GrayImage::from_fn(11, 7, |x, y| (x * 23 + y * 5) as u8);
        assert_eq!(convolve(&img, &Kernel::identity()), img);
    }

    fn reference_convolution(img: &GrayImage, k: &Kernel) -> Vec<u8> {
        let (w, h) = (img.width() as i32, img.height() as i32);
        let half = (k.size() / 2) as i32;
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                for dy in -half..=half {
                    for dx in -half..=half {
                        let sx = (x + dx).max(0).min(w - 1);
                        let sy = (y + dy).max(0).min(h - 1);
                        s += k.at(dx, dy) * img.get(sx as u32, sy as u32) as f64;
                    }
                }
                let r = if s >= 0.0 { (s + 0.5).floor() } else { (s - 0.5).ceil() };
                out.push(r.max(0.0).min(255.0) as u8);
            }
        }
        out
    }

    #[test]
    fn matches_direct_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = gaussian_kernel(5, 1.1).unwrap();
        for _ in 0..20 {
            let img = GrayImage::from_fn(5, 5, |_, _| rng.gen());
            assert_eq!(convolve(&img, &k).data(), &reference_convolution(&img, &k)[..]);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = GrayImage::from_fn(40, 31, |_, _| rng.gen());
        let k = gaussian_kernel(5, 19.2).unwrap();
        assert_eq!(
            convolve_with(&img, &k, Exec::Sequential),
            convolve_with(&img, &k, Exec::Parallel)
        );
    }
}
