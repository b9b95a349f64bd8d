//! Seeded synthetic face frames with known eye centers, and noisy disk
//! masks for exercising the circle search.
//!
//! A frame is a mid-gray ground with a bright face ellipse. Each eye is a
//! bright sclera ellipse holding a dark iris disk with a darker pupil disk at
//! its center, under a dark eyebrow bar. The generator also emits the eye
//! rectangles it used, so a corpus can be evaluated without the cascades.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::format_eye_file;
use crate::image::{save_pgm, BinaryImage, GrayImage, PgmFormat, Point, Rect};
use crate::pipeline::{format_regions_manifest, RegionsManifest};
use crate::{Error, Result};

pub const FRAME_WIDTH: u32 = 384;
pub const FRAME_HEIGHT: u32 = 286;
/// Size of the emitted eye rectangles.
pub const REGION_WIDTH: u32 = 56;
pub const REGION_HEIGHT: u32 = 48;
/// Eye position inside an unjittered rectangle.
const EYE_IN_REGION: (i32, i32) = (28, 31);

const BACKGROUND: u8 = 110;
const SKIN: u8 = 175;
const SCLERA: u8 = 225;
const IRIS: u8 = 75;
const PUPIL: u8 = 25;
const BROW: u8 = 60;
const HAIR: u8 = 15;
const LASH: u8 = 35;
const DECOY: u8 = 115;

/// Layout of the eye regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Sclera, iris and pupil near the rectangle center.
    Standard,
    /// Occluded iris off to one side of the rectangle, a fainter and larger
    /// disk on the other side and a dark lash strip along the bottom. Only
    /// thresholds between the iris and decoy levels (after equalization)
    /// isolate the iris.
    Decoy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    /// Fraction of pixels replaced by salt-and-pepper noise.
    pub noise: f64,
    /// Largest fraction of the iris outline hidden by the upper eyelid;
    /// each eye is occluded with probability one half.
    pub occlusion: f64,
    pub eyebrow: bool,
    /// Dark hair band across the forehead, over the eyebrows.
    pub hair: bool,
    pub layout: Layout,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            noise: 0.01,
            occlusion: 0.0,
            eyebrow: true,
            hair: false,
            layout: Layout::Standard,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.noise) {
            return Err(Error::param("noise", format!("{} is outside [0, 0.5]", self.noise)));
        }
        if !(0.0..=0.5).contains(&self.occlusion) {
            return Err(Error::param("occlusion", format!("{} is outside [0, 0.5]", self.occlusion)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthEye {
    pub center: Point,
    pub iris_radius: u32,
    pub region: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthFrame {
    pub image: GrayImage,
    /// Eye with the smaller x.
    pub left: SynthEye,
    pub right: SynthEye,
}

fn in_ellipse(x: i32, y: i32, cx: i32, cy: i32, a: f64, b: f64) -> bool {
    let (dx, dy) = ((x - cx) as f64 / a, (y - cy) as f64 / b);
    dx * dx + dy * dy <= 1.0
}

fn in_disk(x: i32, y: i32, cx: i32, cy: i32, r: u32) -> bool {
    let (dx, dy) = ((x - cx) as i64, (y - cy) as i64);
    dx * dx + dy * dy <= (r * r) as i64
}

/// Everything needed to paint one eye.
#[derive(Debug, Clone, Copy)]
struct EyePlan {
    eye: SynthEye,
    /// Rows above this are covered by the eyelid (inside the eye opening).
    lid_line: Option<i32>,
    decoy: Option<(i32, i32, u32)>,
}

fn plan_eye(rng: &mut ChaCha8Rng, cx: i32, cy: i32, params: &SynthParams, left: bool) -> EyePlan {
    let occlude = |r: u32, f: f64| cy - (r as f64 * (std::f64::consts::PI * f).cos()).round() as i32;
    match params.layout {
        Layout::Standard => {
            let r = rng.gen_range(8..=10);
            let (jx, jy) = (rng.gen_range(-6..=6), rng.gen_range(-3..=3));
            let region = Rect::new(
                (cx - EYE_IN_REGION.0 - jx) as u32,
                (cy - EYE_IN_REGION.1 - jy) as u32,
                REGION_WIDTH,
                REGION_HEIGHT,
            );
            let lid_line = if params.occlusion > 0.0 && rng.gen_bool(0.5) {
                let f = rng.gen_range(0.0..=params.occlusion);
                Some(occlude(r, f))
            } else {
                None
            };
            EyePlan {
                eye: SynthEye { center: Point::new(cx, cy), iris_radius: r, region },
                lid_line,
                decoy: None,
            }
        }
        Layout::Decoy => {
            let r = rng.gen_range(9..=10);
            // iris toward the outer corner, decoy toward the nose
            let side = if left { 1 } else { -1 };
            let ex = 14 + rng.gen_range(-2..=2);
            let local_x = if left { ex } else { REGION_WIDTH as i32 - 1 - ex };
            let jy = rng.gen_range(-1..=0);
            let region = Rect::new(
                (cx - local_x) as u32,
                (cy - 26 - jy) as u32,
                REGION_WIDTH,
                REGION_HEIGHT,
            );
            let f = rng.gen_range(0.15..=0.25);
            let dr = r;
            let dx = cx + side * 27;
            EyePlan {
                eye: SynthEye { center: Point::new(cx, cy), iris_radius: r, region },
                lid_line: Some(occlude(r, f)),
                decoy: Some((dx, cy, dr)),
            }
        }
    }
}

/// Frame `index` of the corpus with the given seed. Every frame draws from
/// its own random stream, so frames do not depend on each other.
pub fn generate(params: &SynthParams, seed: u64, index: u64) -> SynthFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);

    let (w, h) = (FRAME_WIDTH as i32, FRAME_HEIGHT as i32);
    let mid_x = w / 2 + rng.gen_range(-8..=8);
    let eye_y = 118 + rng.gen_range(-4..=4);
    let half_iod = rng.gen_range(45..=52);
    let (lx, ly) = (mid_x - half_iod, eye_y + rng.gen_range(-2..=2));
    let (rx, ry) = (mid_x + half_iod, eye_y + rng.gen_range(-2..=2));
    let eyes = [plan_eye(&mut rng, lx, ly, params, true), plan_eye(&mut rng, rx, ry, params, false)];
    let (face_a, face_b) = (rng.gen_range(100.0..115.0), rng.gen_range(125.0..140.0));
    let face_cy = eye_y + 30;

    let mut image = GrayImage::from_fn(FRAME_WIDTH, FRAME_HEIGHT, |x, y| {
        let (x, y) = (x as i32, y as i32);
        if !in_ellipse(x, y, mid_x, face_cy, face_a, face_b) {
            return BACKGROUND;
        }
        let mut v = SKIN;
        if params.hair && (eye_y - 30..=eye_y - 20).contains(&y) {
            v = HAIR;
        }
        for plan in &eyes {
            let SynthEye { center: c, iris_radius: r, region } = plan.eye;
            if params.eyebrow && (c.y - 27..=c.y - 23).contains(&y) && (c.x - 22..=c.x + 22).contains(&x) {
                v = BROW;
            }
            match params.layout {
                Layout::Standard => {
                    if in_ellipse(x, y, c.x, c.y, 21.0, 11.0) && plan.lid_line.is_none_or(|l| y >= l) {
                        v = SCLERA;
                        if in_disk(x, y, c.x, c.y, r) {
                            v = IRIS;
                        }
                        if in_disk(x, y, c.x, c.y, 2) {
                            v = PUPIL;
                        }
                    }
                }
                Layout::Decoy => {
                    if let Some((dx, dy, dr)) = plan.decoy {
                        if in_disk(x, y, dx, dy, dr) {
                            v = DECOY;
                        }
                    }
                    let lid = plan.lid_line.unwrap_or(c.y - r as i32);
                    if in_disk(x, y, c.x, c.y, r) && y >= lid {
                        v = if in_disk(x, y, c.x, c.y, 2) { PUPIL } else { IRIS };
                    }
                    if (lid - 4..lid).contains(&y) && (x - c.x).abs() <= r as i32 + 3 {
                        v = LASH;
                    }
                    let bottom = (region.bottom() - 1) as i32;
                    if (bottom - 7..=bottom).contains(&y) && (region.x as i32..region.right() as i32).contains(&x) {
                        v = LASH;
                    }
                }
            }
        }
        v
    });
    if params.noise > 0.0 {
        for y in 0..FRAME_HEIGHT {
            for x in 0..FRAME_WIDTH {
                if rng.gen_bool(params.noise) {
                    image.set(x, y, if rng.gen_bool(0.5) { 0 } else { 255 });
                }
            }
        }
    }
    debug_assert!(eyes.iter().all(|p| p.eye.region.fits(w as u32, h as u32)));
    SynthFrame {
        image,
        left: eyes[0].eye,
        right: eyes[1].eye,
    }
}

pub fn frame_name(index: u64) -> String {
    format!("synth_{index:04}.pgm")
}

/// Writes `count` frames as `synth_XXXX.pgm` with BioID-style `.eye` files
/// and a `regions.txt` manifest.
pub fn write_corpus(dir: &Path, count: u64, seed: u64, params: &SynthParams) -> Result<RegionsManifest> {
    params.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = RegionsManifest::new();
    for i in 0..count {
        let f = generate(params, seed, i);
        let name = frame_name(i);
        let path = dir.join(&name);
        std::fs::write(&path, save_pgm(&f.image, PgmFormat::P5)).map_err(|e| Error::io(&path, e))?;
        // the first pair in a BioID file is the eye on the image's right
        let eye = path.with_extension("eye");
        let text = format_eye_file(
            f.right.center.x as i64,
            f.right.center.y as i64,
            f.left.center.x as i64,
            f.left.center.y as i64,
        );
        std::fs::write(&eye, text).map_err(|e| Error::io(&eye, e))?;
        manifest.insert(name, (f.left.region, f.right.region));
    }
    let path = dir.join("regions.txt");
    std::fs::write(&path, format_regions_manifest(&manifest)).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// A dark disk on a bright `size`×`size` mask with part of its outline
/// hidden and a fraction of all pixels flipped.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyDisk {
    pub mask: BinaryImage,
    pub center: Point,
    pub radius: u32,
}

/// Hides `occlusion` of the outline by brightening a wedge of the disk,
/// then flips `flips` of all pixels.
pub fn noisy_disk(rng: &mut impl Rng, size: u32, radius: u32, occlusion: f64, flips: f64) -> NoisyDisk {
    let r = radius as i32;
    let margin = r + 2;
    let cx = rng.gen_range(margin..=size as i32 - 1 - margin);
    let cy = rng.gen_range(margin..=size as i32 - 1 - margin);
    let start = rng.gen_range(0.0..std::f64::consts::TAU);
    let span = occlusion * std::f64::consts::TAU;
    let mut mask = BinaryImage::from_fn(size, size, |x, y| {
        let (dx, dy) = (x as i32 - cx, y as i32 - cy);
        if !in_disk(x as i32, y as i32, cx, cy, radius) {
            return true;
        }
        let angle = (dy as f64).atan2(dx as f64).rem_euclid(std::f64::consts::TAU);
        let into = (angle - start).rem_euclid(std::f64::consts::TAU);
        // the wedge only removes the rim, the disk interior stays dark
        into < span && dx * dx + dy * dy > (r - 2).max(0).pow(2)
    });
    for y in 0..size {
        for x in 0..size {
            if rng.gen_bool(flips) {
                let dark = mask.is_dark(x, y);
                mask.set(x, y, dark);
            }
        }
    }
    NoisyDisk {
        mask,
        center: Point::new(cx, cy),
        radius,
    }
}
