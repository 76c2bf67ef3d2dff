//! Decoded rasters and the handful of pixel operations every layer shares.
//!
//! All resampling in the crate goes through [`sample_window`], a plain
//! bilinear sampler with pixel-center alignment and edge clamping. Keeping a
//! single sampler means the embedder, the perturbations and the detector's
//! synchronization search agree on geometry to the sub-pixel.

use std::io::Cursor;

use image::codecs::jpeg::JpegEncoder;
use image::{ImageEncoder, RgbImage};

use crate::error::{Error, Result};

/// Row-major 8-bit RGB raster.
#[derive(Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be non-zero"));
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        let pixels = rgb
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * 3)
            .collect();
        Image::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Rejects rasters smaller than `min` on either axis.
    pub fn require_min(&self, min: u32) -> Result<()> {
        if self.width < min || self.height < min {
            return Err(Error::ImageTooSmall {
                width: self.width,
                height: self.height,
                min,
            });
        }
        Ok(())
    }

    /// Population standard deviation over all samples.
    pub fn sample_std(&self) -> f64 {
        let n = self.pixels.len() as f64;
        let mean = self.pixels.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = self
            .pixels
            .iter()
            .map(|&v| (v as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        var.sqrt()
    }

    pub fn luminance(&self) -> Plane {
        let data = self
            .pixels
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]))
            .collect();
        Plane {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Bilinear resize of all three channels, rounding to nearest.
    pub fn resize(&self, width: u32, height: u32) -> Result<Image> {
        self.resample_window(
            0.0,
            0.0,
            self.width as f32,
            self.height as f32,
            width,
            height,
        )
    }

    /// Copies the `width`×`height` window with top-left corner `(x0, y0)`.
    pub fn crop(&self, x0: u32, y0: u32, width: u32, height: u32) -> Result<Image> {
        if x0 + width > self.width || y0 + height > self.height || width == 0 || height == 0 {
            return Err(Error::invalid("crop window outside image"));
        }
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 3);
        for y in y0..y0 + height {
            let start = (y as usize * self.width as usize + x0 as usize) * 3;
            pixels.extend_from_slice(&self.pixels[start..start + width as usize * 3]);
        }
        Image::new(width, height, pixels)
    }

    fn resample_window(
        &self,
        x0: f32,
        y0: f32,
        win_w: f32,
        win_h: f32,
        out_w: u32,
        out_h: u32,
    ) -> Result<Image> {
        if out_w == 0 || out_h == 0 {
            return Err(Error::invalid("resize target must be non-zero"));
        }
        let mut out = Vec::with_capacity(out_w as usize * out_h as usize * 3);
        let xs = axis_taps(x0, win_w, out_w, self.width);
        let ys = axis_taps(y0, win_h, out_h, self.height);
        let stride = self.width as usize * 3;
        for &(ya, yb, ty) in &ys {
            for &(xa, xb, tx) in &xs {
                for c in 0..3 {
                    let p = |x: usize, y: usize| self.pixels[y * stride + x * 3 + c] as f32;
                    let top = p(xa, ya) + (p(xb, ya) - p(xa, ya)) * tx;
                    let bot = p(xa, yb) + (p(xb, yb) - p(xa, yb)) * tx;
                    let v = top + (bot - top) * ty;
                    out.push(v.round().clamp(0.0, 255.0) as u8);
                }
            }
        }
        Image::new(out_w, out_h, out)
    }

    pub fn to_rgb_image(&self) -> RgbImage {
        RgbImage::from_raw(self.width, self.height, self.pixels.clone())
            .expect("buffer length checked at construction")
    }

    pub fn from_rgb_image(img: RgbImage) -> Result<Image> {
        let (w, h) = img.dimensions();
        Image::new(w, h, img.into_raw())
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        image::codecs::png::PngEncoder::new(&mut out).write_image(
            &self.pixels,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
        )?;
        Ok(out)
    }

    /// Baseline JPEG with the Annex K tables scaled by the libjpeg quality rule.
    pub fn encode_jpeg(&self, quality: u8) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        JpegEncoder::new_with_quality(Cursor::new(&mut out), quality).write_image(
            &self.pixels,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
        )?;
        Ok(out)
    }

    /// Decodes PNG or JPEG bytes to RGB.
    pub fn decode(bytes: &[u8]) -> Result<Image> {
        let img = image::load_from_memory(bytes)?;
        Image::from_rgb_image(img.to_rgb8())
    }
}

/// ITU-R BT.601 luma from 8-bit RGB, unrounded.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> f32 {
    (299 * r as u32 + 587 * g as u32 + 114 * b as u32) as f32 / 1000.0
}

/// Single-channel float plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl Plane {
    pub fn zeros(width: u32, height: u32) -> Self {
        Plane {
            width,
            height,
            data: vec![0.0; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width as usize + x]
    }

    /// 3×3 box mean with edge replication.
    pub fn box_blur3(&self) -> Plane {
        let w = self.width as usize;
        let h = self.height as usize;
        // separable: horizontal then vertical
        let mut tmp = vec![0.0f32; w * h];
        for y in 0..h {
            let row = &self.data[y * w..(y + 1) * w];
            for x in 0..w {
                let l = row[x.saturating_sub(1)];
                let r = row[(x + 1).min(w - 1)];
                tmp[y * w + x] = l + row[x] + r;
            }
        }
        let mut out = vec![0.0f32; w * h];
        for y in 0..h {
            let up = y.saturating_sub(1);
            let dn = (y + 1).min(h - 1);
            for x in 0..w {
                out[y * w + x] = (tmp[up * w + x] + tmp[y * w + x] + tmp[dn * w + x]) / 9.0;
            }
        }
        Plane {
            width: self.width,
            height: self.height,
            data: out,
        }
    }

    /// Plane minus its 3×3 box mean.
    pub fn high_pass(&self) -> Plane {
        let blur = self.box_blur3();
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&blur.data)
                .map(|(v, b)| v - b)
                .collect(),
        }
    }

    pub fn resize(&self, width: u32, height: u32) -> Plane {
        if width == self.width && height == self.height {
            return self.clone();
        }
        sample_window(
            self,
            0.0,
            0.0,
            self.width as f32,
            self.height as f32,
            width,
            height,
        )
    }

    /// Resamples the centered window covering `fraction` of each axis back
    /// to the plane's own size.
    pub fn center_zoom(&self, fraction: f32) -> Plane {
        let win_w = self.width as f32 * fraction;
        let win_h = self.height as f32 * fraction;
        sample_window(
            self,
            (self.width as f32 - win_w) / 2.0,
            (self.height as f32 - win_h) / 2.0,
            win_w,
            win_h,
            self.width,
            self.height,
        )
    }
}

/// Per-output-index source taps `(lo, hi, weight_of_hi)` along one axis.
pub(crate) fn axis_taps(
    origin: f32,
    window: f32,
    out_len: u32,
    src_len: u32,
) -> Vec<(usize, usize, f32)> {
    let scale = window / out_len as f32;
    let max = (src_len - 1) as f32;
    (0..out_len)
        .map(|i| {
            let s = (origin + (i as f32 + 0.5) * scale - 0.5).clamp(0.0, max);
            let lo = s.floor();
            let hi = (lo + 1.0).min(max);
            (lo as usize, hi as usize, s - lo)
        })
        .collect()
}

/// Bilinear resample of the continuous window `[x0, x0+win_w) × [y0, y0+win_h)`
/// (in source pixel-edge coordinates) onto an `out_w`×`out_h` grid.
pub fn sample_window(
    src: &Plane,
    x0: f32,
    y0: f32,
    win_w: f32,
    win_h: f32,
    out_w: u32,
    out_h: u32,
) -> Plane {
    let xs = axis_taps(x0, win_w, out_w, src.width);
    let ys = axis_taps(y0, win_h, out_h, src.height);
    let mut data = Vec::with_capacity(out_w as usize * out_h as usize);
    for &(ya, yb, ty) in &ys {
        for &(xa, xb, tx) in &xs {
            let top = src.at(xa, ya) + (src.at(xb, ya) - src.at(xa, ya)) * tx;
            let bot = src.at(xa, yb) + (src.at(xb, yb) - src.at(xa, yb)) * tx;
            data.push(top + (bot - top) * ty);
        }
    }
    Plane {
        width: out_w,
        height: out_h,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_buffer_length() {
        assert!(matches!(
            Image::new(2, 2, vec![0; 11]),
            Err(Error::LengthMismatch { expected: 12, .. })
        ));
    }

    #[test]
    fn luma_of_white_is_255() {
        assert_eq!(luma(255, 255, 255), 255.0);
        assert_eq!(luma(0, 0, 0), 0.0);
    }

    #[test]
    fn identity_resize_is_exact() {
        let img = Image::new(3, 2, (0..18).map(|v| v * 10).collect()).unwrap();
        assert_eq!(img.resize(3, 2).unwrap(), img);
    }

    #[test]
    fn halving_averages_pairs() {
        let p = Plane {
            width: 4,
            height: 1,
            data: vec![0.0, 2.0, 4.0, 6.0],
        };
        let half = p.resize(2, 1);
        assert_eq!(half.data, vec![1.0, 5.0]);
    }

    #[test]
    fn high_pass_of_constant_is_zero() {
        let p = Plane {
            width: 5,
            height: 4,
            data: vec![7.5; 20],
        };
        assert!(p.high_pass().data.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn full_center_zoom_is_identity() {
        let p = Plane {
            width: 4,
            height: 4,
            data: (0..16).map(|v| v as f32).collect(),
        };
        let z = p.center_zoom(1.0);
        for (a, b) in z.data.iter().zip(&p.data) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn png_round_trip_is_lossless() {
        let img = Image::new(8, 8, (0..192).map(|v| (v * 7 % 256) as u8).collect()).unwrap();
        let back = Image::decode(&img.encode_png().unwrap()).unwrap();
        assert_eq!(back, img);
    }
}
