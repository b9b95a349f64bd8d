use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{EyeRegion, EyeSide, PipelineConfig, RegionSource};
use crate::cascade::{detect_multiscale, group_rects, raw_detections, CascadeModel, DetectParams};
use crate::image::{GrayImage, Rect};
use crate::{Error, Exec, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceDetection {
    pub rect: Rect,
    /// No face was found and `rect` is the whole frame.
    pub fallback: bool,
}

/// Largest grouped face detection, or the whole frame flagged as a fallback.
pub fn detect_face(frame: &GrayImage, model: &CascadeModel, params: &DetectParams) -> FaceDetection {
    match detect_multiscale(frame, model, params).first() {
        Some(&rect) => FaceDetection { rect, fallback: false },
        None => FaceDetection {
            rect: frame.bounds(),
            fallback: true,
        },
    }
}

fn round_u32(v: f64) -> u32 {
    v.round().max(0.0) as u32
}

/// Default eye box inside a search half: 0.9 × half width by 0.5 × half
/// height, centered horizontally, vertically centered at 45% of the kept
/// face height.
fn anthropometric_box(half: &Rect, kept: &Rect) -> Rect {
    let w = round_u32(0.9 * half.w as f64).clamp(1, half.w);
    let h = round_u32(0.5 * half.h as f64).clamp(1, half.h);
    let x = half.x + (half.w - w) / 2;
    let center_y = kept.y as f64 + 0.45 * kept.h as f64;
    let y = round_u32(center_y - h as f64 / 2.0).clamp(kept.y, kept.bottom() - h);
    Rect::new(x, y, w, h)
}

fn search_half(frame: &GrayImage, half: &Rect, kept: &Rect, model: &CascadeModel, params: &DetectParams) -> (Rect, RegionSource) {
    let patch = frame.crop(half).expect("half lies inside the frame");
    if let Some(hit) = detect_multiscale(&patch, model, params).first() {
        return (half.compose(hit), RegionSource::Cascade);
    }
    let relaxed = DetectParams {
        min_neighbors: 0,
        scale_factor: 1.05,
        ..*params
    };
    let hits = group_rects(&raw_detections(&patch, model, &relaxed, Exec::default()), 0, 0.0);
    let (hx, hy) = (half.w as f64 / 2.0, half.h as f64 / 2.0);
    let nearest = hits.iter().min_by(|a, b| {
        let da = (a.center().0 - hx).powi(2) + (a.center().1 - hy).powi(2);
        let db = (b.center().0 - hx).powi(2) + (b.center().1 - hy).powi(2);
        da.total_cmp(&db)
    });
    match nearest {
        Some(hit) => (half.compose(hit), RegionSource::FallbackRescan),
        None => (anthropometric_box(half, kept), RegionSource::AnthropometricDefault),
    }
}

/// Splits the top `face_keep_frac` of the face into left and right halves
/// and finds one eye box in each. A half where the cascade finds nothing is
/// rescanned with grouping disabled and a finer scale step (taking the hit
/// nearest the half's center); if that also fails a fixed anthropometric
/// box is used.
pub fn eye_regions(frame: &GrayImage, face: &Rect, model: &CascadeModel, cfg: &PipelineConfig) -> (EyeRegion, EyeRegion) {
    let keep_h = round_u32(face.h as f64 * cfg.face_keep_frac).clamp(1, face.h);
    let kept = Rect::new(face.x, face.y, face.w, keep_h);
    let left_w = (face.w / 2).max(1).min(face.w);
    let left = Rect::new(face.x, face.y, left_w, keep_h);
    let right = if face.w > left_w {
        Rect::new(face.x + left_w, face.y, face.w - left_w, keep_h)
    } else {
        left
    };
    let region = |half: &Rect, side| {
        let (rect, source) = search_half(frame, half, &kept, model, &cfg.eye_detect);
        EyeRegion { rect, side, source }
    };
    let mut l = region(&left, EyeSide::Left);
    let mut r = region(&right, EyeSide::Right);
    if r.rect.center().0 < l.rect.center().0 {
        std::mem::swap(&mut l.rect, &mut r.rect);
        std::mem::swap(&mut l.source, &mut r.source);
    }
    (l, r)
}

/// Eye rectangles per frame file name.
pub type RegionsManifest = BTreeMap<String, (Rect, Rect)>;

/// Reads lines of `filename x_l y_l w_l h_l x_r y_r w_r h_r`; blank lines
/// and `#` comments are skipped.
pub fn parse_regions_manifest(text: &str) -> Result<RegionsManifest> {
    let mut out = RegionsManifest::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Parse {
            what: "regions manifest",
            line: i + 1,
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(err(format!("expected 9 fields, found {}", fields.len())));
        }
        let nums: Vec<u32> = fields[1..]
            .iter()
            .map(|f| f.parse::<u32>().map_err(|_| err(format!("`{f}` is not a non-negative integer"))))
            .collect::<Result<_>>()?;
        let l = Rect::new(nums[0], nums[1], nums[2], nums[3]);
        let r = Rect::new(nums[4], nums[5], nums[6], nums[7]);
        if l.w == 0 || l.h == 0 || r.w == 0 || r.h == 0 {
            return Err(err("region sizes must be at least 1".into()));
        }
        if out.insert(fields[0].to_string(), (l, r)).is_some() {
            return Err(err(format!("duplicate entry for `{}`", fields[0])));
        }
    }
    Ok(out)
}

pub fn format_regions_manifest(manifest: &RegionsManifest) -> String {
    let mut s = String::from("# filename x_l y_l w_l h_l x_r y_r w_r h_r\n");
    for (name, (l, r)) in manifest {
        let _ = writeln!(s, "{name} {} {} {} {} {} {} {} {}", l.x, l.y, l.w, l.h, r.x, r.y, r.w, r.h);
    }
    s
}
