//! The three fixed degradations applied to watermarked pixels before signing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Image;

pub const JPEG_QUALITY: u8 = 80;
/// Fraction of each axis kept by the center crop.
pub const CROP_RETAIN: f64 = 0.9;
pub const SCREENSHOT_SCALE: f64 = 0.75;
pub const SCREENSHOT_QUALITY: u8 = 70;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    None,
    JpegQ80,
    Crop10Resize,
    ScreenshotSim,
}

impl Perturbation {
    pub const ALL: [Perturbation; 4] = [
        Perturbation::None,
        Perturbation::JpegQ80,
        Perturbation::Crop10Resize,
        Perturbation::ScreenshotSim,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Perturbation::None => "none",
            Perturbation::JpegQ80 => "jpeg_q80",
            Perturbation::Crop10Resize => "crop10_resize",
            Perturbation::ScreenshotSim => "screenshot_sim",
        }
    }
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Perturbation {
    type Err = Error;

    /// Accepts the canonical names plus the short CLI aliases.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Perturbation::None),
            "jpeg_q80" | "jpeg" => Ok(Perturbation::JpegQ80),
            "crop10_resize" | "crop10" | "crop" => Ok(Perturbation::Crop10Resize),
            "screenshot_sim" | "screenshot" => Ok(Perturbation::ScreenshotSim),
            other => Err(Error::invalid(format!("unknown perturbation '{other}'"))),
        }
    }
}

/// Encodes at `quality` and decodes again.
pub fn jpeg_round_trip(image: &Image, quality: u8) -> Result<Image> {
    image.require_min(8)?;
    Image::decode(&image.encode_jpeg(quality)?)
}

/// Central window kept by the crop perturbation: `(x0, y0, w, h)`.
pub fn crop_window(width: u32, height: u32) -> (u32, u32, u32, u32) {
    let cw = (width as f64 * CROP_RETAIN).floor() as u32;
    let ch = (height as f64 * CROP_RETAIN).floor() as u32;
    ((width - cw) / 2, (height - ch) / 2, cw, ch)
}

pub fn apply(image: &Image, p: Perturbation) -> Result<Image> {
    let (w, h) = (image.width(), image.height());
    match p {
        Perturbation::None => Ok(image.clone()),
        Perturbation::JpegQ80 => jpeg_round_trip(image, JPEG_QUALITY),
        Perturbation::Crop10Resize => {
            let (x0, y0, cw, ch) = crop_window(w, h);
            image.crop(x0, y0, cw, ch)?.resize(w, h)
        }
        Perturbation::ScreenshotSim => {
            image.require_min(8)?;
            let sw = (w as f64 * SCREENSHOT_SCALE).floor() as u32;
            let sh = (h as f64 * SCREENSHOT_SCALE).floor() as u32;
            let small = jpeg_round_trip(&image.resize(sw, sh)?, SCREENSHOT_QUALITY)?;
            small.resize(w, h)
        }
    }
}
