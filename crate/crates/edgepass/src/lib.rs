//! Branch-free multi-pass edge detection, structured the way a mobile
//! GPU would run it: a chain of per-pixel render passes over 2D
//! textures, with shader-style precision emulation on every texture
//! write and per-pass accounting of texel reads and wall time.
//!
//! The crate has four layers:
//!
//! - [`texture`]: precision-quantizing 2D textures ([`Texture2D`],
//!   [`Precision`]) and 8-bit host images ([`ImageBuffer`]).
//! - [`pass`]: the render-pass engine. A [`PassKernel`] is a pure
//!   per-pixel function; [`run_pipeline`] chains kernels, counts texel
//!   reads, and times each pass under a chosen [`TimingMode`].
//! - [`canny`]: the detector itself, five branch-free passes (plus a
//!   grey conversion for RGB input): Gaussian X, Gaussian Y, gradient
//!   with direction classification, non-maximum suppression with a
//!   double threshold, and weak-pixel resolution.
//! - [`oracle`]: conditional reference implementations for testing, a
//!   textbook detector with full hysteresis ([`classic_canny`]), and
//!   scoring ([`compare_edge_maps`], [`compare_with_classic`]).
//!
//! [`offload`] models shipping frames to a remote detector over
//! constrained links, and [`pnm`] reads and writes the portable
//! grey/pixmap formats used for input and output. [`synth`] generates
//! deterministic test imagery.
//!
//! ```
//! use edgepass::{detect_edges, synth, CannyParams};
//!
//! let image = synth::vertical_step(64, 64, 20, 230).unwrap();
//! let detection = detect_edges(&image, &CannyParams::default()).unwrap();
//! assert!(detection.edges.bytes().iter().any(|&b| b > 0));
//! ```

pub mod canny;
pub mod error;
pub mod offload;
pub mod oracle;
pub mod pass;
pub mod pnm;
pub mod synth;
pub mod texture;

pub use canny::{
    build_pipeline, classify_direction, detect_edges, detect_edges_with, CannyParams, Detection,
    Direction, KernelSize, MagnitudeMode,
};
pub use error::{Error, PnmError, Result};
pub use offload::{
    builtin_profile, builtin_profiles, estimate_frame_latency, LinkProfile, OffloadEstimate,
};
pub use oracle::{
    classic_canny, compare_edge_maps, compare_with_classic, direction_oracle, BinaryEdgeMap,
    PipelineComparison, SimilarityReport,
};
pub use pass::{
    run_pipeline, PassKernel, PassReport, PipelineReport, RunOptions, Stat, TimingMode,
};
pub use texture::{upload, ImageBuffer, PixelLayout, Precision, Texture2D};
