//! Cross-layer provenance auditing for images.
//!
//! An image can carry two independent origin signals: a signed provenance
//! manifest in the file container and an invisible watermark in its pixels.
//! Each verifies on its own, so a manifest that validly claims a human edit
//! can sit on pixels watermarked as AI output. This crate builds such
//! "authenticated fakes" and detects them by auditing both layers together.
//!
//! - [`corpus`]: seeded procedural test images
//! - [`watermark`]: 256-bit spread-spectrum embed and detect
//! - [`manifest`]: claims, P-256 certificate chain, sign and verify
//! - [`container`]: envelope framing in PNG and JPEG files
//! - [`perturb`]: JPEG, crop-and-resize and screenshot degradations
//! - [`audit`]: joint classification into the conflict matrix
//! - [`harness`]: the full pipeline matrix and its report tables

pub mod audit;
pub mod container;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod manifest;
pub mod perturb;
pub mod raster;
pub mod watermark;

pub use audit::{classify, AuditReport, Auditor, Quadrant};
pub use container::AssetFile;
pub use error::{Error, Result};
pub use manifest::{CertChain, ManifestStatus, Template, TrustStore};
pub use perturb::Perturbation;
pub use raster::Image;
pub use watermark::{EmbedConfig, Payload, WatermarkCodec, WatermarkKey};
