//! Per-frame eye center localization.
//!
//! A frame is smoothed once, eye regions are acquired (from Haar cascades or
//! from caller-provided rectangles), and each region is cropped below the
//! eyebrow, equalized, binarized and closed before a circular Hough search.
//! The darkest pixels inside the winning circle give the eye center; when no
//! circle is found the region center is used instead.

mod localize;
mod regions;
mod szp;

pub use localize::{localize_center, preprocess, Localized, Preprocessed};
pub use regions::{
    detect_face, eye_regions, format_regions_manifest, parse_regions_manifest, FaceDetection,
    RegionsManifest,
};
pub use szp::szp_roi;

use std::fmt;

use crate::cascade::{CascadeModel, DetectParams};
use crate::hough::{Circle, HoughParams};
use crate::image::{convolve, gaussian_kernel, GrayImage, Point, Rect};
use crate::{Error, Result};

/// Every tunable of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub smooth_kernel_size: usize,
    /// Gaussian σ as a fraction of the frame width.
    pub smooth_sigma_frac: f64,
    /// Top fraction of the face height searched for eyes.
    pub face_keep_frac: f64,
    /// Fraction of the eye-region height removed from the top (eyebrow crop).
    pub t_e: f64,
    /// Binarization threshold on the equalized region.
    pub t_b: u8,
    /// Structuring-element side as a fraction of the eye-region width.
    pub se_frac: f64,
    pub hough: HoughParams,
    pub face_detect: DetectParams,
    pub eye_detect: DetectParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            smooth_kernel_size: 5,
            smooth_sigma_frac: 0.05,
            face_keep_frac: 0.60,
            t_e: 0.30,
            t_b: 77,
            se_frac: 0.05,
            hough: HoughParams::default(),
            face_detect: DetectParams::default(),
            eye_detect: DetectParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let frac = |name: &'static str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} is outside (0, 1)")))
            }
        };
        if self.smooth_kernel_size.is_multiple_of(2) {
            return Err(Error::param("smooth_kernel_size", "must be odd"));
        }
        frac("smooth_sigma_frac", self.smooth_sigma_frac)?;
        frac("face_keep_frac", self.face_keep_frac)?;
        frac("se_frac", self.se_frac)?;
        if !(0.0..1.0).contains(&self.t_e) {
            return Err(Error::param("t_e", format!("{} is outside [0, 1)", self.t_e)));
        }
        self.hough.validate()?;
        self.face_detect.validate()?;
        self.eye_detect.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EyeSide {
    Left,
    Right,
}

/// How an eye region was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionSource {
    Cascade,
    FallbackRescan,
    AnthropometricDefault,
    Provided,
}

impl fmt::Display for RegionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionSource::Cascade => "cascade",
            RegionSource::FallbackRescan => "fallback_rescan",
            RegionSource::AnthropometricDefault => "anthropometric_default",
            RegionSource::Provided => "provided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EyeRegion {
    /// Full-frame coordinates.
    pub rect: Rect,
    pub side: EyeSide,
    pub source: RegionSource,
}

/// How an eye center was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    HoughMinIntensity,
    RegionCenterFallback,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::HoughMinIntensity => "hough_min_intensity",
            Method::RegionCenterFallback => "region_center_fallback",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EyeResult {
    /// Full-frame pixel coordinates.
    pub center: Point,
    pub method: Method,
    /// Winning circle in the coordinates of the eyebrow-cropped region.
    pub circle: Option<Circle>,
    pub region: EyeRegion,
    /// Rows removed from the top of the region before the circle search.
    pub crop_rows: u32,
}

impl EyeResult {
    /// The circle translated to full-frame coordinates.
    pub fn frame_circle(&self) -> Option<Circle> {
        self.circle.map(|c| Circle {
            cx: c.cx + self.region.rect.x as i32,
            cy: c.cy + (self.region.rect.y + self.crop_rows) as i32,
            ..c
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationResult {
    pub left: EyeResult,
    pub right: EyeResult,
    /// Present when regions came from the cascades.
    pub face: Option<FaceDetection>,
}

/// Where eye regions come from.
#[derive(Debug, Clone, Copy)]
pub enum RegionInput<'a> {
    Cascades {
        face: &'a CascadeModel,
        eye: &'a CascadeModel,
    },
    /// Two rectangles in frame coordinates, in any order.
    Provided(Rect, Rect),
}

/// Output of the region-acquisition stage, independent of `t_b`.
#[derive(Debug, Clone)]
pub struct Acquired {
    pub smoothed: GrayImage,
    pub face: Option<FaceDetection>,
    pub left: EyeRegion,
    pub right: EyeRegion,
}

/// Gaussian smoothing with σ = `smooth_sigma_frac` × frame width.
pub fn smooth(frame: &GrayImage, cfg: &PipelineConfig) -> Result<GrayImage> {
    let sigma = cfg.smooth_sigma_frac * frame.width() as f64;
    let kernel = gaussian_kernel(cfg.smooth_kernel_size, sigma)?;
    Ok(convolve(frame, &kernel))
}

/// Smooths the frame and finds both eye regions.
pub fn acquire(frame: &GrayImage, input: RegionInput, cfg: &PipelineConfig) -> Result<Acquired> {
    cfg.validate()?;
    if let RegionInput::Provided(a, b) = input {
        for r in [a, b] {
            if !r.fits(frame.width(), frame.height()) {
                return Err(Error::Config(format!(
                    "provided region {r:?} lies outside the {}x{} frame",
                    frame.width(),
                    frame.height()
                )));
            }
        }
    }
    let smoothed = smooth(frame, cfg)?;
    let (face, left, right) = match input {
        RegionInput::Provided(a, b) => {
            let (l, r) = if b.center().0 < a.center().0 { (b, a) } else { (a, b) };
            let region = |rect, side| EyeRegion {
                rect,
                side,
                source: RegionSource::Provided,
            };
            (None, region(l, EyeSide::Left), region(r, EyeSide::Right))
        }
        RegionInput::Cascades { face, eye } => {
            let fd = detect_face(&smoothed, face, &cfg.face_detect);
            let (l, r) = eye_regions(&smoothed, &fd.rect, eye, cfg);
            (Some(fd), l, r)
        }
    };
    Ok(Acquired {
        smoothed,
        face,
        left,
        right,
    })
}

fn localize_region(smoothed: &GrayImage, region: EyeRegion, cfg: &PipelineConfig) -> EyeResult {
    let patch = smoothed.crop(&region.rect).expect("regions lie inside the frame");
    let pre = preprocess(&patch, cfg);
    let loc = localize_center(&pre.binary, &pre.equalized, cfg);
    EyeResult {
        center: Point::new(
            region.rect.x as i32 + loc.point.x,
            (region.rect.y + pre.crop_rows) as i32 + loc.point.y,
        ),
        method: loc.method,
        circle: loc.circle,
        region,
        crop_rows: pre.crop_rows,
    }
}

/// Pre-processing and center search for both acquired regions.
pub fn localize(acquired: &Acquired, cfg: &PipelineConfig) -> LocalizationResult {
    LocalizationResult {
        left: localize_region(&acquired.smoothed, acquired.left, cfg),
        right: localize_region(&acquired.smoothed, acquired.right, cfg),
        face: acquired.face,
    }
}

/// The whole pipeline on one frame.
pub fn run(frame: &GrayImage, input: RegionInput, cfg: &PipelineConfig) -> Result<LocalizationResult> {
    let acquired = acquire(frame, input, cfg)?;
    Ok(localize(&acquired, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_disk_frame(l: (i32, i32), r: (i32, i32)) -> GrayImage {
        GrayImage::from_fn(200, 120, |x, y| {
            let (x, y) = (x as i32, y as i32);
            let mut v = 210u8;
            for &(cx, cy) in &[l, r] {
                let d2 = (x - cx).pow(2) + (y - cy).pow(2);
                if d2 <= 100 {
                    v = 60;
                }
                if d2 <= 4 {
                    v = 10;
                }
            }
            v
        })
    }

    #[test]
    fn provided_regions_find_both_disks() {
        let frame = two_disk_frame((53, 62), (148, 58));
        let cfg = PipelineConfig::default();
        // regions given right-first; output is ordered by x
        let input = RegionInput::Provided(Rect::new(120, 30, 56, 48), Rect::new(22, 35, 56, 48));
        let res = run(&frame, input, &cfg).unwrap();
        assert_eq!(res.left.method, Method::HoughMinIntensity);
        assert_eq!(res.right.method, Method::HoughMinIntensity);
        for (got, want) in [(res.left.center, (53, 62)), (res.right.center, (148, 58))] {
            assert!((got.x - want.0).abs() <= 2 && (got.y - want.1).abs() <= 2, "{got:?} vs {want:?}");
        }
        assert!(res.left.region.rect.contains(res.left.center));
        assert!(res.right.region.rect.contains(res.right.center));
        assert_eq!(res.left.region.source, RegionSource::Provided);
    }

    #[test]
    fn all_bright_regions_fall_back_to_centers() {
        let frame = GrayImage::filled(100, 60, 255);
        let input = RegionInput::Provided(Rect::new(10, 10, 30, 30), Rect::new(60, 10, 30, 30));
        let res = run(&frame, input, &PipelineConfig::default()).unwrap();
        for eye in [&res.left, &res.right] {
            assert_eq!(eye.method, Method::RegionCenterFallback);
            assert_eq!(eye.crop_rows, 9);
            let r = eye.region.rect;
            // center of the 30x21 area left after the eyebrow crop
            assert_eq!(eye.center, Point::new((r.x + 15) as i32, (r.y + 9 + 10) as i32));
        }
    }

    #[test]
    fn coordinate_mapping_adds_region_and_crop_offsets() {
        // a region at (100, 50) whose eyebrow crop removes 10 rows maps a
        // local center (20, 15) to (120, 75)
        let eye = EyeResult {
            center: Point::new(100 + 20, 50 + 10 + 15),
            method: Method::HoughMinIntensity,
            circle: Some(Circle { cx: 20, cy: 15, r: 5, score: 1.0 }),
            region: EyeRegion {
                rect: Rect::new(100, 50, 40, 34),
                side: EyeSide::Left,
                source: RegionSource::Provided,
            },
            crop_rows: 10,
        };
        let c = eye.frame_circle().unwrap();
        assert_eq!((c.cx, c.cy), (120, 75));
        assert_eq!(eye.center, Point::new(120, 75));
    }

    #[test]
    fn bad_provided_region_is_a_config_error() {
        let frame = GrayImage::filled(50, 50, 100);
        let input = RegionInput::Provided(Rect::new(40, 40, 20, 20), Rect::new(0, 0, 10, 10));
        assert!(matches!(run(&frame, input, &PipelineConfig::default()), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic() {
        let frame = two_disk_frame((50, 60), (150, 60));
        let input = RegionInput::Provided(Rect::new(22, 35, 56, 48), Rect::new(120, 30, 56, 48));
        let cfg = PipelineConfig::default();
        assert_eq!(run(&frame, input, &cfg).unwrap(), run(&frame, input, &cfg).unwrap());
    }
}
