//! Grayscale rasters and the pixel operators the pipeline is built from.

mod contrast;
mod draw;
mod filter;
mod integral;
mod morphology;
mod pgm;

pub use contrast::{binarize, equalize_histogram};
pub use draw::{annotate, midpoint_circle, outline_rect};
pub use filter::{convolve, convolve_with, gaussian_kernel, Kernel};
pub use integral::IntegralImage;
pub use morphology::{close_dark, StructuringElement};
pub use pgm::{load_pgm, save_pgm, PgmFormat};

use crate::{Error, Result};

/// Integer pixel coordinate. Signed so that overlays and offsets may fall
/// outside the raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned pixel rectangle, top-left anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Center as real coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x as i32
            && p.y >= self.y as i32
            && (p.x as i64) < self.right() as i64
            && (p.y as i64) < self.bottom() as i64
    }

    /// True when the rect is non-empty and lies inside a `width × height` raster.
    pub fn fits(&self, width: u32, height: u32) -> bool {
        self.w >= 1
            && self.h >= 1
            && self.right() as u64 <= width as u64
            && self.bottom() as u64 <= height as u64
    }

    /// Interprets `inner` as relative to `self` and returns it in the
    /// coordinates `self` is expressed in.
    pub fn compose(&self, inner: &Rect) -> Rect {
        Rect::new(self.x + inner.x, self.y + inner.y, inner.w, inner.h)
    }

    pub fn intersection_area(&self, other: &Rect) -> u64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        if x1 <= x0 || y1 <= y0 {
            0
        } else {
            (x1 - x0) as u64 * (y1 - y0) as u64
        }
    }

    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("dimensions", "width and height must be at least 1"));
        }
        if data.len() != width as usize * height as usize {
            return Err(Error::param(
                "data",
                format!("expected {} samples, got {}", width as usize * height as usize, data.len()),
            ));
        }
        Ok(GrayImage { width, height, data })
    }

    /// # Panics
    /// Panics on a zero dimension.
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        GrayImage {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut img = GrayImage::filled(width, height, 0);
        for y in 0..height {
            for x in 0..width {
                img.data[(y * width + x) as usize] = f(x, y);
            }
        }
        img
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.data[(y * self.width + x) as usize] = v;
    }

    /// Value at a signed coordinate, `None` off-image.
    pub fn get_checked(&self, x: i32, y: i32) -> Option<u8> {
        if x < 0 || y < 0 || x >= self.width as i32 || y >= self.height as i32 {
            None
        } else {
            Some(self.get(x as u32, y as u32))
        }
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        &self.data[y as usize * w..(y as usize + 1) * w]
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    /// Copies the sub-raster under `rect`.
    pub fn crop(&self, rect: &Rect) -> Result<GrayImage> {
        if !rect.fits(self.width, self.height) {
            return Err(Error::Bounds {
                rect: *rect,
                width: self.width,
                height: self.height,
            });
        }
        let mut data = Vec::with_capacity(rect.area() as usize);
        for y in rect.y..rect.bottom() {
            data.extend_from_slice(&self.row(y)[rect.x as usize..rect.right() as usize]);
        }
        Ok(GrayImage {
            width: rect.w,
            height: rect.h,
            data,
        })
    }
}

/// Two-level raster: 1 = bright (above threshold), 0 = dark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("dimensions", "width and height must be at least 1"));
        }
        if data.len() != width as usize * height as usize {
            return Err(Error::param("data", "length does not match dimensions"));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::param("data", "binary samples must be 0 or 1"));
        }
        Ok(BinaryImage { width, height, data })
    }

    pub fn filled(width: u32, height: u32, value: bool) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        BinaryImage {
            width,
            height,
            data: vec![value as u8; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut bright: impl FnMut(u32, u32) -> bool) -> Self {
        let mut img = BinaryImage::filled(width, height, false);
        for y in 0..height {
            for x in 0..width {
                img.data[(y * width + x) as usize] = bright(x, y) as u8;
            }
        }
        img
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn is_dark(&self, x: u32, y: u32) -> bool {
        self.get(x, y) == 0
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, bright: bool) {
        self.data[(y * self.width + x) as usize] = bright as u8;
    }

    pub fn count_bright(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Renders 1 as 255 and 0 as 0.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v * 255).collect(),
        }
    }
}
