//! Spread-spectrum pixel watermark carrying a fixed 256-bit payload.
//!
//! The key expands into a pattern field on a 512×512 canonical plane: the
//! plane is cut into 4×4-pixel cells, the cells are shuffled and dealt
//! round-robin to the 256 payload bits, and every cell gets a ±1 chip. Bit
//! `i` is embedded by adding `±alpha · chip` (sign from the bit value) on its
//! cells, scaled by a local-activity mask, to the luminance of every pixel.
//!
//! Detection correlates the high-pass luminance residual against each bit's
//! chips. A centered-zoom search over `sync_scales` undoes a center crop that
//! was resized back to the original size.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::MIN_SIZE;
use crate::error::{Error, Result};
use crate::raster::{axis_taps, Image, Plane};

pub const PAYLOAD_BITS: usize = 256;
pub const PAYLOAD_BYTES: usize = PAYLOAD_BITS / 8;
pub const CANONICAL_SIZE: u32 = 512;
/// Edge length of one chip cell on the canonical plane.
pub const CELL_SIZE: u32 = 4;

// Activity mask: gain = clamp(MASK_BASE + activity / MASK_SCALE, MASK_MIN, MASK_MAX),
// where activity is the 5×5 mean absolute high-pass residual of the host.
const MASK_BASE: f32 = 0.8;
const MASK_SCALE: f32 = 12.0;
const MASK_MIN: f32 = 0.8;
const MASK_MAX: f32 = 1.6;

/// 256 payload bits. Bit `i` lives in byte `i / 8` at position `7 - i % 8`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Payload([u8; PAYLOAD_BYTES]);

impl std::fmt::Debug for Payload {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Payload({})", self.to_hex())
    }
}

impl Payload {
    pub fn from_bytes(bytes: [u8; PAYLOAD_BYTES]) -> Self {
        Payload(bytes)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != PAYLOAD_BITS {
            return Err(Error::LengthMismatch {
                expected: PAYLOAD_BITS,
                actual: bits.len(),
            });
        }
        let mut bytes = [0u8; PAYLOAD_BYTES];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                bytes[i / 8] |= 0x80 >> (i % 8);
            }
        }
        Ok(Payload(bytes))
    }

    /// Uniformly random payload from a seed.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Payload(rng.gen())
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..PAYLOAD_BITS).map(|i| self.bit(i)).collect()
    }

    pub fn bytes(&self) -> &[u8; PAYLOAD_BYTES] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() != PAYLOAD_BYTES * 2 {
            return Err(Error::invalid(format!(
                "payload hex must be {} characters, got {}",
                PAYLOAD_BYTES * 2,
                s.len()
            )));
        }
        let mut bytes = [0u8; PAYLOAD_BYTES];
        hex::decode_to_slice(s, &mut bytes)
            .map_err(|e| Error::invalid(format!("payload hex: {e}")))?;
        Ok(Payload(bytes))
    }

    pub fn complement(&self) -> Self {
        Payload(self.0.map(|b| !b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WatermarkKey {
    pub seed: u64,
}

impl WatermarkKey {
    pub fn new(seed: u64) -> Self {
        WatermarkKey { seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    /// Peak luminance offset in gray levels before masking.
    pub strength_alpha: f32,
    pub canonical_size: u32,
    /// Detection requires bit accuracy strictly above this value.
    pub detection_threshold: f64,
    pub sync_scales: Vec<f32>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            strength_alpha: 3.0,
            canonical_size: CANONICAL_SIZE,
            detection_threshold: 0.75,
            sync_scales: default_sync_scales(),
        }
    }
}

/// 1.00, 0.98, ..., 0.84.
pub fn default_sync_scales() -> Vec<f32> {
    (0..9).map(|k| (100 - 2 * k) as f32 / 100.0).collect()
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.detection_threshold > 0.0 && self.detection_threshold < 1.0) {
            return Err(Error::invalid("detection threshold must lie in (0, 1)"));
        }
        if self.canonical_size != CANONICAL_SIZE {
            return Err(Error::invalid(format!(
                "canonical size is fixed at {CANONICAL_SIZE}"
            )));
        }
        if !(self.strength_alpha >= 0.0 && self.strength_alpha.is_finite()) {
            return Err(Error::invalid("strength must be finite and non-negative"));
        }
        if self.sync_scales.is_empty() || self.sync_scales.iter().any(|&z| !(z > 0.0 && z <= 1.0)) {
            return Err(Error::invalid(
                "sync scales must be non-empty and in (0, 1]",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub recovered_bits: Payload,
    pub bit_accuracy: f64,
    pub detected: bool,
    pub best_sync_scale: f32,
}

/// Wire shape printed by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub bit_accuracy: f64,
    pub detected: bool,
    pub best_sync_scale: f32,
}

impl From<&DetectionResult> for DetectionSummary {
    fn from(r: &DetectionResult) -> Self {
        DetectionSummary {
            bit_accuracy: r.bit_accuracy,
            detected: r.detected,
            best_sync_scale: r.best_sync_scale,
        }
    }
}

/// Key-derived chip and ownership maps over the canonical plane.
#[derive(Clone, Debug)]
pub struct PatternField {
    size: u32,
    /// Payload bit index owning each canonical pixel.
    owner: Vec<u16>,
    /// ±1 chip per canonical pixel.
    chip: Vec<i8>,
}

impl PatternField {
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn owner(&self, x: usize, y: usize) -> usize {
        self.owner[y * self.size as usize + x] as usize
    }

    pub fn chip(&self, x: usize, y: usize) -> i8 {
        self.chip[y * self.size as usize + x]
    }

    /// Number of canonical pixels owned by each bit.
    pub fn support_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; PAYLOAD_BITS];
        for &o in &self.owner {
            sizes[o as usize] += 1;
        }
        sizes
    }

    /// Canonical-plane signal `chip · (±1 per bit)`.
    fn signed_plane(&self, payload: &Payload) -> Plane {
        let signs: Vec<f32> = (0..PAYLOAD_BITS)
            .map(|i| if payload.bit(i) { 1.0 } else { -1.0 })
            .collect();
        Plane {
            width: self.size,
            height: self.size,
            data: self
                .owner
                .iter()
                .zip(&self.chip)
                .map(|(&o, &c)| signs[o as usize] * c as f32)
                .collect(),
        }
    }
}

/// Expands a key into its pattern field. Cells are dealt to bits after a
/// key-seeded shuffle, so every bit owns exactly
/// `(512 / 4)² / 256 = 64` cells, i.e. 1024 canonical pixels.
pub fn derive_patterns(key: WatermarkKey) -> PatternField {
    let size = CANONICAL_SIZE;
    let cells_per_axis = (size / CELL_SIZE) as usize;
    let n_cells = cells_per_axis * cells_per_axis;
    let mut rng = ChaCha8Rng::seed_from_u64(key.seed);
    let mut order: Vec<u32> = (0..n_cells as u32).collect();
    order.shuffle(&mut rng);
    let mut cell_owner = vec![0u16; n_cells];
    for (rank, &cell) in order.iter().enumerate() {
        cell_owner[cell as usize] = (rank % PAYLOAD_BITS) as u16;
    }
    let cell_chip: Vec<i8> = (0..n_cells)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();

    let n = size as usize;
    let mut owner = vec![0u16; n * n];
    let mut chip = vec![0i8; n * n];
    for y in 0..n {
        for x in 0..n {
            let cell = (y / CELL_SIZE as usize) * cells_per_axis + x / CELL_SIZE as usize;
            owner[y * n + x] = cell_owner[cell];
            chip[y * n + x] = cell_chip[cell];
        }
    }
    PatternField { size, owner, chip }
}

/// Per-pixel embedding gain from local texture.
fn activity_mask(lum: &Plane) -> Plane {
    let w = lum.width as usize;
    let h = lum.height as usize;
    let abs_res: Vec<f32> = lum.high_pass().data.iter().map(|v| v.abs()).collect();
    // 5×5 mean via two separable passes with edge replication
    let mut tmp = vec![0.0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            for d in -2i64..=2 {
                let xx = (x as i64 + d).clamp(0, w as i64 - 1) as usize;
                s += abs_res[y * w + xx];
            }
            tmp[y * w + x] = s;
        }
    }
    let mut data = vec![0.0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            for d in -2i64..=2 {
                let yy = (y as i64 + d).clamp(0, h as i64 - 1) as usize;
                s += tmp[yy * w + x];
            }
            let activity = s / 25.0;
            data[y * w + x] = (MASK_BASE + activity / MASK_SCALE).clamp(MASK_MIN, MASK_MAX);
        }
    }
    Plane {
        width: lum.width,
        height: lum.height,
        data,
    }
}

/// Embedder/detector bound to one key and configuration. The derived field
/// is immutable, so one codec can serve many threads.
#[derive(Clone, Debug)]
pub struct WatermarkCodec {
    key: WatermarkKey,
    cfg: EmbedConfig,
    field: PatternField,
}

impl WatermarkCodec {
    pub fn new(key: WatermarkKey, cfg: EmbedConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(WatermarkCodec {
            key,
            cfg,
            field: derive_patterns(key),
        })
    }

    pub fn key(&self) -> WatermarkKey {
        self.key
    }

    pub fn config(&self) -> &EmbedConfig {
        &self.cfg
    }

    pub fn field(&self) -> &PatternField {
        &self.field
    }

    pub fn embed(&self, image: &Image, payload: &Payload) -> Result<Image> {
        image.require_min(MIN_SIZE)?;
        let alpha = self.cfg.strength_alpha;
        if alpha == 0.0 {
            return Ok(image.clone());
        }
        let signal = self
            .field
            .signed_plane(payload)
            .resize(image.width(), image.height());
        let mask = activity_mask(&image.luminance());
        // equal offsets on R, G and B move luma only; Cb and Cr weights sum to zero
        let pixels = image
            .pixels()
            .chunks_exact(3)
            .zip(signal.data.iter().zip(&mask.data))
            .flat_map(|(px, (&s, &m))| {
                let delta = alpha * m * s;
                px.iter()
                    .map(move |&c| (c as f32 + delta).round().clamp(0.0, 255.0) as u8)
                    .collect::<Vec<_>>()
            })
            .collect();
        Image::new(image.width(), image.height(), pixels)
    }

    pub fn detect(&self, image: &Image, target: &Payload) -> DetectionResult {
        let size = self.field.size;
        let residual = image.luminance().high_pass().resize(size, size);

        let mut best: Option<(f64, f32, Vec<f64>)> = None;
        for &z in &self.cfg.sync_scales {
            let corr = self.correlate(&residual, z);
            let score = corr.iter().map(|c| c.abs()).sum::<f64>() / PAYLOAD_BITS as f64;
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                best = Some((score, z, corr));
            }
        }
        let (_, best_scale, corr) = best.expect("sync scales validated non-empty");
        let bits: Vec<bool> = corr.iter().map(|&c| c > 0.0).collect();
        let recovered = Payload::from_bits(&bits).expect("256 correlations");
        let accuracy = payload_accuracy(&recovered, target);
        DetectionResult {
            recovered_bits: recovered,
            bit_accuracy: accuracy,
            detected: accuracy > self.cfg.detection_threshold,
            best_sync_scale: best_scale,
        }
    }

    /// Normalized per-bit correlation of `residual` against the reference
    /// chips zoomed to the centered window of fraction `z`.
    fn correlate(&self, residual: &Plane, z: f32) -> Vec<f64> {
        let size = self.field.size;
        let win = size as f32 * z;
        let origin = (size as f32 - win) / 2.0;
        let xs = axis_taps(origin, win, size, size);
        let ys = axis_taps(origin, win, size, size);
        let mut corr = vec![0.0f64; PAYLOAD_BITS];
        let mut energy = vec![0.0f64; PAYLOAD_BITS];
        let mut owners = [0usize; 4];
        let mut values = [0.0f32; 4];
        for (oy, &(ya, yb, ty)) in ys.iter().enumerate() {
            for (ox, &(xa, xb, tx)) in xs.iter().enumerate() {
                let r = residual.data[oy * size as usize + ox] as f64;
                let taps = [
                    (xa, ya, (1.0 - tx) * (1.0 - ty)),
                    (xb, ya, tx * (1.0 - ty)),
                    (xa, yb, (1.0 - tx) * ty),
                    (xb, yb, tx * ty),
                ];
                // merge taps that land on the same bit
                let mut used = 0;
                for (sx, sy, wt) in taps {
                    if wt == 0.0 {
                        continue;
                    }
                    let o = self.field.owner(sx, sy);
                    let v = wt * self.field.chip(sx, sy) as f32;
                    match owners[..used].iter().position(|&b| b == o) {
                        Some(k) => values[k] += v,
                        None => {
                            owners[used] = o;
                            values[used] = v;
                            used += 1;
                        }
                    }
                }
                for k in 0..used {
                    let v = values[k] as f64;
                    corr[owners[k]] += r * v;
                    energy[owners[k]] += v * v;
                }
            }
        }
        corr.iter()
            .zip(&energy)
            .map(|(c, e)| if *e > 0.0 { c / e.sqrt() } else { 0.0 })
            .collect()
    }
}

pub fn embed(
    image: &Image,
    payload: &Payload,
    key: WatermarkKey,
    cfg: &EmbedConfig,
) -> Result<Image> {
    WatermarkCodec::new(key, cfg.clone())?.embed(image, payload)
}

pub fn detect(
    image: &Image,
    target: &Payload,
    key: WatermarkKey,
    cfg: &EmbedConfig,
) -> Result<DetectionResult> {
    Ok(WatermarkCodec::new(key, cfg.clone())?.detect(image, target))
}

/// Fraction of equal positions between two 256-bit sequences.
pub fn bit_accuracy(recovered: &[bool], target: &[bool]) -> Result<f64> {
    for len in [recovered.len(), target.len()] {
        if len != PAYLOAD_BITS {
            return Err(Error::LengthMismatch {
                expected: PAYLOAD_BITS,
                actual: len,
            });
        }
    }
    let matches = recovered.iter().zip(target).filter(|(a, b)| a == b).count();
    Ok(matches as f64 / PAYLOAD_BITS as f64)
}

pub fn payload_accuracy(recovered: &Payload, target: &Payload) -> f64 {
    let wrong: u32 = recovered
        .0
        .iter()
        .zip(&target.0)
        .map(|(a, b)| (a ^ b).count_ones())
        .sum();
    (PAYLOAD_BITS as u32 - wrong) as f64 / PAYLOAD_BITS as f64
}

/// Peak signal-to-noise ratio over all RGB samples, in dB.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let sse: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum();
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse / a.pixels().len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_image, GeneratorKind};

    #[test]
    fn payload_hex_bit_order() {
        let mut bits = vec![false; PAYLOAD_BITS];
        bits[0] = true; // MSB of byte 0
        bits[15] = true; // LSB of byte 1
        let p = Payload::from_bits(&bits).unwrap();
        assert!(p.to_hex().starts_with("8001"));
        assert_eq!(Payload::from_hex(&p.to_hex()).unwrap(), p);
        assert!(Payload::from_hex("abc").is_err());
        assert!(Payload::from_hex(&"zz".repeat(32)).is_err());
    }

    #[test]
    fn bit_accuracy_arithmetic() {
        let t = Payload::random(5).bits();
        assert_eq!(bit_accuracy(&t, &t).unwrap(), 1.0);
        let c: Vec<bool> = t.iter().map(|b| !b).collect();
        assert_eq!(bit_accuracy(&c, &t).unwrap(), 0.0);
        let mut m = t.clone();
        for b in m.iter_mut().take(64) {
            *b = !*b;
        }
        assert_eq!(bit_accuracy(&m, &t).unwrap(), 0.75);
        assert!(matches!(
            bit_accuracy(&t[..255], &t),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn supports_partition_the_plane() {
        let f = derive_patterns(WatermarkKey::new(1));
        let sizes = f.support_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 512 * 512);
        assert!(sizes.iter().all(|&s| (1000..=1048).contains(&s)));
    }

    #[test]
    fn keys_give_different_partitions() {
        let a = derive_patterns(WatermarkKey::new(1));
        let b = derive_patterns(WatermarkKey::new(2));
        assert_ne!(a.owner, b.owner);
    }

    #[test]
    fn psnr_closed_forms() {
        let a = Image::filled(64, 64, [0, 0, 0]).unwrap();
        let b = Image::filled(64, 64, [255, 255, 255]).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!(psnr(&a, &b).unwrap().abs() < 1e-12);
        let c = Image::filled(64, 64, [1, 1, 1]).unwrap();
        let expected = 20.0 * 255.0f64.log10();
        assert!((psnr(&a, &c).unwrap() - expected).abs() < 1e-9);
        assert!((expected - 48.13).abs() < 0.01);
        let small = Image::filled(32, 64, [0, 0, 0]).unwrap();
        assert!(psnr(&a, &small).is_err());
    }

    #[test]
    fn zero_strength_is_identity() {
        let img = generate_image(GeneratorKind::Mixed, 4, 128).unwrap();
        let cfg = EmbedConfig {
            strength_alpha: 0.0,
            ..EmbedConfig::default()
        };
        let out = embed(&img, &Payload::random(1), WatermarkKey::new(3), &cfg).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn embedding_preserves_chroma_away_from_clipping() {
        let img = Image::filled(64, 64, [120, 100, 80]).unwrap();
        let out = embed(
            &img,
            &Payload::random(1),
            WatermarkKey::new(3),
            &EmbedConfig::default(),
        )
        .unwrap();
        for px in out.pixels().chunks_exact(3) {
            assert_eq!(px[0] as i32 - px[1] as i32, 20);
            assert_eq!(px[1] as i32 - px[2] as i32, 20);
        }
    }

    #[test]
    fn too_small_is_rejected() {
        let img = Image::filled(63, 80, [1, 2, 3]).unwrap();
        assert!(matches!(
            embed(
                &img,
                &Payload::random(1),
                WatermarkKey::new(1),
                &EmbedConfig::default()
            ),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let cfg = EmbedConfig {
            detection_threshold: 1.0,
            ..EmbedConfig::default()
        };
        assert!(cfg.validate().is_err());
        let mut cfg = EmbedConfig::default();
        cfg.sync_scales.clear();
        assert!(cfg.validate().is_err());
        assert_eq!(EmbedConfig::default().sync_scales.len(), 9);
    }

    #[test]
    fn small_round_trip() {
        let img = generate_image(GeneratorKind::ValueNoise, 11, 256).unwrap();
        let payload = Payload::random(9);
        let codec = WatermarkCodec::new(WatermarkKey::new(4), EmbedConfig::default()).unwrap();
        let marked = codec.embed(&img, &payload).unwrap();
        let res = codec.detect(&marked, &payload);
        assert_eq!(res.bit_accuracy, 1.0);
        assert!(res.detected);
        assert_eq!(res.best_sync_scale, 1.0);
    }
}
