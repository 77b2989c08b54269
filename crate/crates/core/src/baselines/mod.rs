//! Baseline vectorizations: persistence images, persistence landscapes and
//! the sliced Wasserstein distance and kernel.

pub mod image;
pub mod landscape;
pub mod sliced;

use thiserror::Error;

pub use image::{persistence_image, pixel_size_for, pixel_size_heuristic, ImageBounds, ImageParams};
pub use landscape::{landscape_features, persistence_landscape, LandscapeParams};
pub use sliced::{sliced_wasserstein_distance, sw_distance_matrix, sw_gram_matrix, sw_kernel, SwParams, DEFAULT_DIRECTIONS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degenerate bounding rectangle")]
    DegenerateBounds,
}
