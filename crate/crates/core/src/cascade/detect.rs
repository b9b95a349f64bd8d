use super::group::group_rects;
use super::model::{CascadeModel, HaarFeature};
use super::DEFAULT_GROUP_EPS;
use crate::image::{GrayImage, IntegralImage, Rect};
use crate::{Error, Exec, Result};

/// Scan parameters for [`detect_multiscale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectParams {
    /// Ratio between consecutive window sizes, > 1.
    pub scale_factor: f64,
    /// Stride in pixels at the base scale; scaled with the window, minimum 1.
    pub step: f64,
    /// A grouped detection must gather more than this many raw hits.
    pub min_neighbors: usize,
    /// Window width bounds in pixels.
    pub min_size: Option<u32>,
    pub max_size: Option<u32>,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            scale_factor: 1.1,
            step: 2.0,
            min_neighbors: 3,
            min_size: None,
            max_size: None,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale_factor > 1.0 && self.scale_factor.is_finite()) {
            return Err(Error::param("scale_factor", format!("{} must be > 1", self.scale_factor)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param("step", format!("{} must be positive", self.step)));
        }
        Ok(())
    }
}

#[inline]
fn round_scaled(v: u32, scale: f64) -> u32 {
    (v as f64 * scale).round() as u32
}

/// A feature rect in window-relative pixels at one scale.
#[derive(Debug, Clone, Copy)]
struct ScaledRect {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    weight: f64,
}

#[derive(Debug, Clone)]
struct ScaledStump {
    rects: [ScaledRect; 3],
    n: usize,
    threshold: f64,
    left: f64,
    right: f64,
}

/// A cascade with every rect resolved to one window size.
#[derive(Debug, Clone)]
struct ScaledCascade {
    scale: f64,
    win_w: u32,
    win_h: u32,
    stages: Vec<(Vec<ScaledStump>, f64)>,
}

fn scale_feature(feature: &HaarFeature, scale: f64, win_w: u32, win_h: u32) -> ([ScaledRect; 3], usize) {
    let mut rects = [ScaledRect { x: 0, y: 0, w: 0, h: 0, weight: 0.0 }; 3];
    for (slot, r) in rects.iter_mut().zip(feature.rects()) {
        let x = round_scaled(r.x, scale).min(win_w);
        let y = round_scaled(r.y, scale).min(win_h);
        *slot = ScaledRect {
            x,
            y,
            w: round_scaled(r.w, scale).min(win_w - x),
            h: round_scaled(r.h, scale).min(win_h - y),
            weight: r.weight,
        };
    }
    let n = feature.rects().len();
    // Zero-sum features (all the published ones) stay zero-sum after
    // rounding: the first weight absorbs the area error, so flat patches
    // keep evaluating to zero at every scale.
    let base: f64 = feature.rects().iter().map(|r| r.weight * (r.w * r.h) as f64).sum();
    let area0 = (rects[0].w * rects[0].h) as f64;
    if base == 0.0 && area0 > 0.0 {
        let rest: f64 = rects[1..n].iter().map(|r| r.weight * (r.w * r.h) as f64).sum();
        rects[0].weight = -rest / area0;
    }
    (rects, n)
}

impl ScaledCascade {
    fn new(model: &CascadeModel, scale: f64) -> Self {
        let win_w = round_scaled(model.window_w(), scale).max(1);
        let win_h = round_scaled(model.window_h(), scale).max(1);
        let stages = model
            .stages()
            .iter()
            .map(|stage| {
                let stumps = stage
                    .stumps()
                    .iter()
                    .map(|s| {
                        let (rects, n) = scale_feature(&s.feature, scale, win_w, win_h);
                        ScaledStump {
                            rects,
                            n,
                            threshold: s.threshold,
                            left: s.left_value,
                            right: s.right_value,
                        }
                    })
                    .collect();
                (stumps, stage.threshold())
            })
            .collect();
        ScaledCascade { scale, win_w, win_h, stages }
    }

    fn passes(&self, ii: &IntegralImage, x: u32, y: u32) -> bool {
        let inner = norm_rect(&Rect::new(x, y, self.win_w, self.win_h), self.scale);
        let norm = window_norm(ii, &inner) * inner.area() as f64;
        for (stumps, stage_threshold) in &self.stages {
            let mut sum = 0.0;
            for s in stumps {
                let mut value = 0.0;
                for r in &s.rects[..s.n] {
                    value += r.weight * ii.rect_sum(x + r.x, y + r.y, r.w, r.h) as f64;
                }
                sum += if value < s.threshold * norm { s.left } else { s.right };
            }
            if sum < *stage_threshold {
                return false;
            }
        }
        true
    }
}

/// The part of a window used for variance normalization: the window
/// shrunk by one base-window pixel on every side, as the published
/// cascades were trained with.
pub fn norm_rect(window: &Rect, scale: f64) -> Rect {
    let inset = (scale.round() as u32).min(window.w / 2).min(window.h / 2);
    let w = (window.w - 2 * inset).max(1);
    let h = (window.h - 2 * inset).max(1);
    Rect::new(window.x + inset, window.y + inset, w, h)
}

/// Standard deviation of the intensities under `window`, or 1 when the
/// window is constant.
pub fn window_norm(ii: &IntegralImage, window: &Rect) -> f64 {
    let area = window.area() as f64;
    let mean = ii.sum_of(window) as f64 / area;
    let var = ii.rect_sq_sum(window.x, window.y, window.w, window.h) as f64 / area - mean * mean;
    if var > 0.0 {
        var.sqrt()
    } else {
        1.0
    }
}

fn check_window(ii: &IntegralImage, window: &Rect) -> Result<()> {
    if window.fits(ii.width(), ii.height()) {
        Ok(())
    } else {
        Err(Error::Bounds {
            rect: *window,
            width: ii.width(),
            height: ii.height(),
        })
    }
}

/// Raw weighted rect-sum `Σ weight · sum(rect)` of a feature placed in
/// `window` at `scale`, before variance normalization.
pub fn feature_value(feature: &HaarFeature, ii: &IntegralImage, window: &Rect, scale: f64) -> Result<f64> {
    check_window(ii, window)?;
    let (rects, n) = scale_feature(feature, scale, window.w, window.h);
    Ok(rects[..n]
        .iter()
        .map(|r| r.weight * ii.rect_sum(window.x + r.x, window.y + r.y, r.w, r.h) as f64)
        .sum())
}

/// Runs every stage on one window; `scale` maps base-window coordinates
/// onto the window (normally `window.w / model.window_w()`).
pub fn evaluate_window(model: &CascadeModel, ii: &IntegralImage, window: &Rect, scale: f64) -> Result<bool> {
    check_window(ii, window)?;
    let mut scaled = ScaledCascade::new(model, scale);
    scaled.win_w = window.w;
    scaled.win_h = window.h;
    Ok(scaled.passes(ii, window.x, window.y))
}

fn scales(image: &GrayImage, model: &CascadeModel, params: &DetectParams) -> Vec<f64> {
    let (iw, ih) = image.dimensions();
    let mut out = Vec::new();
    let mut scale = 1.0f64;
    loop {
        let ww = round_scaled(model.window_w(), scale);
        let wh = round_scaled(model.window_h(), scale);
        if ww > iw || wh > ih || params.max_size.is_some_and(|m| ww > m) {
            break;
        }
        if params.min_size.is_none_or(|m| ww >= m) {
            out.push(scale);
        }
        scale *= params.scale_factor;
    }
    out
}

/// Every window position that passes the cascade, before grouping, sorted
/// by `(y, x, w, h)`.
pub fn raw_detections(image: &GrayImage, model: &CascadeModel, params: &DetectParams, exec: Exec) -> Vec<Rect> {
    if params.validate().is_err() {
        return Vec::new();
    }
    let ii = IntegralImage::new(image);
    let (iw, ih) = image.dimensions();
    let cascades: Vec<ScaledCascade> = scales(image, model, params)
        .into_iter()
        .map(|s| ScaledCascade::new(model, s))
        .collect();
    let strides: Vec<u32> = scales(image, model, params)
        .into_iter()
        .map(|s| ((params.step * s).round() as u32).max(1))
        .collect();

    // one task per (scale, row) keeps the work balanced across threads
    let mut rows = Vec::new();
    for (ci, c) in cascades.iter().enumerate() {
        let mut y = 0;
        while y + c.win_h <= ih {
            rows.push((ci, y));
            y += strides[ci];
        }
    }
    let hits = exec.map(&rows, |&(ci, y)| {
        let c = &cascades[ci];
        let mut found = Vec::new();
        let mut x = 0;
        while x + c.win_w <= iw {
            if c.passes(&ii, x, y) {
                found.push(Rect::new(x, y, c.win_w, c.win_h));
            }
            x += strides[ci];
        }
        found
    });
    let mut hits: Vec<Rect> = hits.into_iter().flatten().collect();
    hits.sort_by_key(|r| (r.y, r.x, r.w, r.h));
    hits
}

/// Multi-scale sliding-window detection followed by [`group_rects`].
/// Output is sorted by area (largest first), then `(y, x)`.
pub fn detect_multiscale(image: &GrayImage, model: &CascadeModel, params: &DetectParams) -> Vec<Rect> {
    detect_multiscale_with(image, model, params, Exec::default())
}

pub fn detect_multiscale_with(image: &GrayImage, model: &CascadeModel, params: &DetectParams, exec: Exec) -> Vec<Rect> {
    let hits = raw_detections(image, model, params, exec);
    group_rects(&hits, params.min_neighbors, DEFAULT_GROUP_EPS)
}
