//! Inference for legacy stump-based Haar cascades: model parsing,
//! variance-normalized window evaluation, multi-scale scanning and
//! grouping of overlapping hits.

mod detect;
mod group;
mod model;

pub use detect::{
    detect_multiscale, detect_multiscale_with, evaluate_window, feature_value, raw_detections,
    window_norm, DetectParams,
};
pub use group::{group_rects, sort_by_area, DEFAULT_GROUP_EPS};
pub use model::{parse_cascade, CascadeModel, HaarFeature, Stage, Stump, WeightedRect};
