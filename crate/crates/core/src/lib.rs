//! Texture randomization toolkit for domain-generalized segmentation
//! experiments.
//!
//! The crate is organized around a small imaging core (rasters, convolution,
//! statistics, seeded RNG, file I/O) and four subsystems built on it:
//!
//! - [`tcps`]: texture-complexity scoring and painting pool selection
//! - [`gtr`]: global texture randomization via AdaIN feature statistics
//! - [`ltr`]: local texture randomization with smoothed-noise masks
//! - [`trainer`]: a toy segmentation network with manual backprop, the
//!   three-stream consistency loss, SGD with a poly schedule, mIoU, and a
//!   procedural texture-shift benchmark

pub mod error;
pub mod image;
pub mod io;
pub mod kernel;
pub mod rng;
pub mod tensorfile;

pub mod gtr;
pub mod ltr;
pub mod tcps;
pub mod trainer;

pub use error::{Error, Result};
pub use image::{Image, Range};
pub use kernel::{convolve, gaussian_blur, gaussian_kernel, Kernel2D};
pub use rng::RngStream;
