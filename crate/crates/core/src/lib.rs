//! Circle-based eye center localization.
//!
//! The crate is organised bottom-up:
//!
//! * [`image`] – grayscale rasters, PGM I/O and the pixel operators
//!   (smoothing, equalization, binarization, morphology, integral images).
//! * [`cascade`] – inference for legacy stump-based Haar cascades.
//! * [`hough`] – circular Hough transform over binary masks, plus an
//!   exhaustive oracle used by the test-suite.
//! * [`pipeline`] – region acquisition, pre-processing and center
//!   localization for a single frame, and the projection-histogram baseline.
//! * [`eval`] – normalized eye-center errors, accuracy curves and k-fold
//!   threshold tuning.
//! * [`synth`] – a seeded generator of synthetic eye frames with ground truth.
//!
//! Data-parallel inner loops run on rayon when the `parallel` feature is
//! enabled (the default); every such loop also has a sequential path
//! selectable through [`Exec`].

pub mod cascade;
pub mod config;
mod error;
pub mod eval;
mod exec;
pub mod hough;
pub mod image;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Exec;
pub use image::{BinaryImage, GrayImage, Point, Rect};
