//! Pixel-wise graph attention on dense feature maps.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: the rank-4 [`FeatureMap`] carrier plus unfold (im2col), pixel
//!   shuffle, 1×1 linear transforms, softmax and a portable seeded RNG.
//! - [`attention`]: the sliding-window pixel attention kernel (PAM) with its
//!   analytic backward pass, the dense adjacency-matrix reference it replaces,
//!   blocked (halo) and global attention baselines and MAC estimators.
//! - [`msrb`]: forward pass of the axial-MLP sequential residual block.
//! - [`contour`]: HOG descriptors and the contour / pixel reconstruction losses.
//! - [`bench`]: verification suites, live-set memory accounting, timing,
//!   CSV/SVG output and the PGM demo used by the `pixgraph` binary.

pub mod attention;
pub mod bench;
pub mod contour;
mod error;
pub mod msrb;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{Element, FeatureMap, LinearWeights, SeededRng, UnfoldedMap, WindowConfig};
