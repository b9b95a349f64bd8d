use super::{BinaryImage, GrayImage};

/// Histogram equalization anchored at the lowest occupied level:
/// `out(v) = round(255 · (cdf(v) − cdf_min) / (N − cdf_min))`.
///
/// An image with a single occupied level is returned unchanged.
pub fn equalize_histogram(image: &GrayImage) -> GrayImage {
    let mut hist = [0u64; 256];
    for &v in image.data() {
        hist[v as usize] += 1;
    }
    let n = image.len() as u64;
    let cdf_min = hist.iter().copied().find(|&c| c > 0).unwrap_or(0);
    if cdf_min == n {
        return image.clone();
    }
    let denom = (n - cdf_min) as f64;
    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for (v, &count) in hist.iter().enumerate() {
        cdf += count;
        let scaled = 255.0 * cdf.saturating_sub(cdf_min) as f64 / denom;
        lut[v] = scaled.round().min(255.0) as u8;
    }
    let data = image.data().iter().map(|&v| lut[v as usize]).collect();
    GrayImage::new(image.width(), image.height(), data).expect("same dimensions")
}

/// `1` where the sample is strictly greater than `threshold`, else `0`.
pub fn binarize(image: &GrayImage, threshold: u8) -> BinaryImage {
    let data = image.data().iter().map(|&v| (v > threshold) as u8).collect();
    BinaryImage::new(image.width(), image.height(), data).expect("same dimensions")
}
