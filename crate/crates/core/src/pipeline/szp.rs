use crate::image::{GrayImage, Rect};

/// First stage of the projection-histogram baseline: a square ROI of side
/// 0.4 × region width centered on the darkest column and the darkest row of
/// the intensity projections (ties go to the smaller index), clamped to
/// the region.
pub fn szp_roi(region: &GrayImage) -> Rect {
    let (w, h) = region.dimensions();
    let mut cols = vec![0u64; w as usize];
    let mut rows = vec![0u64; h as usize];
    for y in 0..h {
        for (x, &v) in region.row(y).iter().enumerate() {
            cols[x] += v as u64;
            rows[y as usize] += v as u64;
        }
    }
    let argmin = |v: &[u64]| {
        v.iter()
            .enumerate()
            .min_by_key(|&(i, &s)| (s, i))
            .map(|(i, _)| i as u32)
            .unwrap_or(0)
    };
    let (cx, cy) = (argmin(&cols), argmin(&rows));
    let side = ((0.4 * w as f64).round() as u32).clamp(1, w.min(h));
    let x = cx.saturating_sub(side / 2).min(w - side);
    let y = cy.saturating_sub(side / 2).min(h - side);
    Rect::new(x, y, side, side)
}
