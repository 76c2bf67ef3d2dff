//! Seeded procedural image corpus.
//!
//! Five generator kinds are assigned round-robin by index. Each image's seed
//! is derived from the corpus master seed with [`image_seed`], so any single
//! image can be regenerated from its [`CorpusRecord`] and the image size.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Image;

/// Smallest edge length the corpus and the watermark layer accept.
pub const MIN_SIZE: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Gradient,
    ValueNoise,
    Geometric,
    Fractal,
    Mixed,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Gradient,
        GeneratorKind::ValueNoise,
        GeneratorKind::Geometric,
        GeneratorKind::Fractal,
        GeneratorKind::Mixed,
    ];

    pub fn for_index(index: usize) -> GeneratorKind {
        Self::ALL[index % Self::ALL.len()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub index: usize,
    pub generator_kind: GeneratorKind,
    pub seed: u64,
}

impl CorpusRecord {
    pub fn regenerate(&self, size: u32) -> Result<Image> {
        generate_image(self.generator_kind, self.seed, size)
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-image seed: `splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)`,
/// i.e. the `index`-th output of a SplitMix64 stream started at `master`.
pub fn image_seed(master_seed: u64, index: usize) -> u64 {
    splitmix64(master_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

pub fn corpus_records(master_seed: u64, count: usize) -> Vec<CorpusRecord> {
    (0..count)
        .map(|index| CorpusRecord {
            index,
            generator_kind: GeneratorKind::for_index(index),
            seed: image_seed(master_seed, index),
        })
        .collect()
}

pub fn generate_corpus(
    master_seed: u64,
    count: usize,
    size: u32,
) -> Result<Vec<(Image, CorpusRecord)>> {
    if count == 0 {
        return Err(Error::invalid("corpus count must be at least 1"));
    }
    check_size(size)?;
    corpus_records(master_seed, count)
        .into_iter()
        .map(|rec| Ok((rec.regenerate(size)?, rec)))
        .collect()
}

fn check_size(size: u32) -> Result<()> {
    if size < MIN_SIZE {
        return Err(Error::invalid(format!(
            "image size {size} below minimum {MIN_SIZE}"
        )));
    }
    Ok(())
}

pub fn generate_image(kind: GeneratorKind, seed: u64, size: u32) -> Result<Image> {
    check_size(size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = size as usize;
    let pixels = match kind {
        GeneratorKind::Gradient => gradient(&mut rng, n),
        GeneratorKind::ValueNoise => {
            let field = value_noise(&mut rng, n, 5);
            colorize(&mut rng, &field)
        }
        GeneratorKind::Geometric => geometric(&mut rng, n),
        GeneratorKind::Fractal => {
            let field = plasma(&mut rng, n);
            colorize(&mut rng, &field)
        }
        GeneratorKind::Mixed => mixed(&mut rng, n),
    };
    Image::new(size, size, pixels)
}

/// Diagonal interpolation between two contrasting corner colors.
fn gradient(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let a: [f32; 3] = std::array::from_fn(|_| rng.gen_range(0..256) as f32);
    let b: [f32; 3] =
        std::array::from_fn(|c| ((a[c] as u32 + rng.gen_range(96..160)) % 256) as f32);
    let denom = (2 * (n - 1)) as f32;
    let mut out = Vec::with_capacity(n * n * 3);
    for y in 0..n {
        for x in 0..n {
            let t = (x + y) as f32 / denom;
            for c in 0..3 {
                out.push((a[c] + (b[c] - a[c]) * t).round() as u8);
            }
        }
    }
    out
}

fn smoothstep(t: f32) -> f32 {
    t * t * (3.0 - 2.0 * t)
}

/// Multi-octave lattice noise, normalized to [0, 1].
fn value_noise(rng: &mut ChaCha8Rng, n: usize, octaves: u32) -> Vec<f32> {
    let mut field = vec![0.0f32; n * n];
    let mut cell = (n / 4).max(8) as f32;
    let mut amp = 1.0f32;
    for _ in 0..octaves {
        let cells = (n as f32 / cell).ceil() as usize + 2;
        let lattice: Vec<f32> = (0..cells * cells).map(|_| rng.gen::<f32>()).collect();
        for y in 0..n {
            let fy = y as f32 / cell;
            let (iy, ty) = (fy.floor() as usize, smoothstep(fy.fract()));
            for x in 0..n {
                let fx = x as f32 / cell;
                let (ix, tx) = (fx.floor() as usize, smoothstep(fx.fract()));
                let l = |i: usize, j: usize| lattice[j * cells + i];
                let top = l(ix, iy) + (l(ix + 1, iy) - l(ix, iy)) * tx;
                let bot = l(ix, iy + 1) + (l(ix + 1, iy + 1) - l(ix, iy + 1)) * tx;
                field[y * n + x] += amp * (top + (bot - top) * ty);
            }
        }
        cell = (cell / 2.0).max(2.0);
        amp *= 0.6;
    }
    normalize(&mut field);
    field
}

/// Diamond-square midpoint displacement on the next `2^k + 1` grid, cropped.
fn plasma(rng: &mut ChaCha8Rng, n: usize) -> Vec<f32> {
    let side = (n - 1).next_power_of_two() + 1;
    let mut g = vec![0.0f32; side * side];
    for &(x, y) in &[(0, 0), (side - 1, 0), (0, side - 1), (side - 1, side - 1)] {
        g[y * side + x] = rng.gen::<f32>();
    }
    let mut step = side - 1;
    let mut rough = 1.0f32;
    while step > 1 {
        let half = step / 2;
        for y in (half..side).step_by(step) {
            for x in (half..side).step_by(step) {
                let avg = (g[(y - half) * side + x - half]
                    + g[(y - half) * side + x + half]
                    + g[(y + half) * side + x - half]
                    + g[(y + half) * side + x + half])
                    / 4.0;
                g[y * side + x] = avg + rng.gen_range(-rough..rough);
            }
        }
        for y in (0..side).step_by(half) {
            let start = if (y / half).is_multiple_of(2) {
                half
            } else {
                0
            };
            for x in (start..side).step_by(step) {
                let mut sum = 0.0;
                let mut k = 0.0;
                if y >= half {
                    sum += g[(y - half) * side + x];
                    k += 1.0;
                }
                if y + half < side {
                    sum += g[(y + half) * side + x];
                    k += 1.0;
                }
                if x >= half {
                    sum += g[y * side + x - half];
                    k += 1.0;
                }
                if x + half < side {
                    sum += g[y * side + x + half];
                    k += 1.0;
                }
                g[y * side + x] = sum / k + rng.gen_range(-rough..rough);
            }
        }
        step = half;
        rough *= 0.58;
    }
    let mut field: Vec<f32> = (0..n)
        .flat_map(|y| g[y * side..y * side + n].to_vec())
        .collect();
    normalize(&mut field);
    field
}

fn normalize(field: &mut [f32]) {
    let (lo, hi) = field
        .iter()
        .fold((f32::MAX, f32::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = (hi - lo).max(f32::EPSILON);
    for v in field.iter_mut() {
        *v = (*v - lo) / span;
    }
}

/// Dark, random mid-tone, light.
fn palette(rng: &mut ChaCha8Rng) -> [[f32; 3]; 3] {
    [
        std::array::from_fn(|_| rng.gen_range(0..24) as f32),
        std::array::from_fn(|_| rng.gen_range(40..216) as f32),
        std::array::from_fn(|_| rng.gen_range(232..256) as f32),
    ]
}

/// Maps a [0, 1] field through a three-stop palette. The field extremes land
/// on the dark and light stops, so the full dynamic range is always used.
fn colorize(rng: &mut ChaCha8Rng, field: &[f32]) -> Vec<u8> {
    let pal = palette(rng);
    let mut out = Vec::with_capacity(field.len() * 3);
    for &f in field {
        let (lo, hi, t) = if f < 0.5 {
            (pal[0], pal[1], f * 2.0)
        } else {
            (pal[1], pal[2], f * 2.0 - 1.0)
        };
        for c in 0..3 {
            out.push((lo[c] + (hi[c] - lo[c]) * t).round() as u8);
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Shape {
    Disc { cx: f32, cy: f32, r: f32 },
    Rect { x0: f32, y0: f32, x1: f32, y1: f32 },
    Ring { cx: f32, cy: f32, r: f32, w: f32 },
}

impl Shape {
    fn random(rng: &mut ChaCha8Rng, n: f32) -> Shape {
        match rng.gen_range(0..3) {
            0 => Shape::Disc {
                cx: rng.gen_range(0.0..n),
                cy: rng.gen_range(0.0..n),
                r: rng.gen_range(n * 0.03..n * 0.25),
            },
            1 => {
                let (x0, y0) = (rng.gen_range(0.0..n), rng.gen_range(0.0..n));
                Shape::Rect {
                    x0,
                    y0,
                    x1: x0 + rng.gen_range(n * 0.05..n * 0.4),
                    y1: y0 + rng.gen_range(n * 0.05..n * 0.4),
                }
            }
            _ => Shape::Ring {
                cx: rng.gen_range(0.0..n),
                cy: rng.gen_range(0.0..n),
                r: rng.gen_range(n * 0.05..n * 0.3),
                w: rng.gen_range(n * 0.01..n * 0.05),
            },
        }
    }

    fn contains(&self, x: f32, y: f32) -> bool {
        match *self {
            Shape::Disc { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r * r,
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x < x1 && y >= y0 && y < y1,
            Shape::Ring { cx, cy, r, w } => {
                let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                (d - r).abs() <= w
            }
        }
    }
}

fn draw_shapes(rng: &mut ChaCha8Rng, n: usize, buf: &mut [f32], count: usize, opacity: f32) {
    let nf = n as f32;
    for k in 0..count {
        let shape = Shape::random(rng, nf);
        // the first two shapes pin the dark and light ends of the range
        let color: [f32; 3] = match k {
            0 => std::array::from_fn(|_| rng.gen_range(0..20) as f32),
            1 => std::array::from_fn(|_| rng.gen_range(236..256) as f32),
            _ => std::array::from_fn(|_| rng.gen_range(0..256) as f32),
        };
        let alpha = if k < 2 { 1.0 } else { opacity };
        for y in 0..n {
            for x in 0..n {
                if shape.contains(x as f32 + 0.5, y as f32 + 0.5) {
                    let i = (y * n + x) * 3;
                    for c in 0..3 {
                        buf[i + c] += (color[c] - buf[i + c]) * alpha;
                    }
                }
            }
        }
    }
}

fn geometric(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let bg: [f32; 3] = std::array::from_fn(|_| rng.gen_range(40..216) as f32);
    let mut buf: Vec<f32> = bg.iter().copied().cycle().take(n * n * 3).collect();
    let count = rng.gen_range(30..60);
    draw_shapes(rng, n, &mut buf, count, 0.85);
    // the pinned shapes may be painted over; restore one pixel of each end
    buf[..3].iter_mut().for_each(|v| *v = v.min(16.0));
    let last = buf.len() - 3;
    buf[last..].iter_mut().for_each(|v| *v = v.max(240.0));
    to_u8(&buf)
}

fn mixed(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let noise = value_noise(rng, n, 4);
    let mut buf: Vec<f32> = colorize(rng, &noise).iter().map(|&v| v as f32).collect();
    let tint = gradient(rng, n);
    for (v, t) in buf.iter_mut().zip(&tint) {
        *v = *v * 0.7 + *t as f32 * 0.3;
    }
    let count = rng.gen_range(8..20);
    draw_shapes(rng, n, &mut buf, count, 0.6);
    buf[..3].iter_mut().for_each(|v| *v = v.min(16.0));
    let last = buf.len() - 3;
    buf[last..].iter_mut().for_each(|v| *v = v.max(240.0));
    to_u8(&buf)
}

fn to_u8(buf: &[f32]) -> Vec<u8> {
    buf.iter()
        .map(|v| v.round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Writes `img_{index:04}.png` files and `corpus.json` (the record list).
pub fn write_corpus(dir: &Path, corpus: &[(Image, CorpusRecord)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (img, rec) in corpus {
        fs::write(dir.join(image_file_name(rec.index)), img.encode_png()?)?;
    }
    let records: Vec<&CorpusRecord> = corpus.iter().map(|(_, r)| r).collect();
    fs::write(
        dir.join("corpus.json"),
        serde_json::to_vec_pretty(&records)?,
    )?;
    Ok(())
}

pub fn image_file_name(index: usize) -> String {
    format!("img_{index:04}.png")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_robin_kinds() {
        let corpus = generate_corpus(7, 5, 128).unwrap();
        let kinds: Vec<_> = corpus.iter().map(|(_, r)| r.generator_kind).collect();
        assert_eq!(kinds, GeneratorKind::ALL.to_vec());
    }

    #[test]
    fn size_below_minimum_is_rejected() {
        assert!(matches!(
            generate_corpus(7, 5, 63),
            Err(Error::InvalidArgument(_))
        ));
        assert!(generate_image(GeneratorKind::Gradient, 1, 32).is_err());
        assert!(generate_corpus(7, 0, 128).is_err());
    }

    #[test]
    fn seeds_are_unique() {
        let recs = corpus_records(0, 1000);
        let mut seeds: Vec<u64> = recs.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs of SplitMix64 seeded with 0
        assert_eq!(image_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(image_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn value_noise_is_seed_sensitive() {
        let a = generate_image(GeneratorKind::ValueNoise, 1, 128).unwrap();
        let b = generate_image(GeneratorKind::ValueNoise, 2, 128).unwrap();
        assert_ne!(a.pixels(), b.pixels());
    }

    #[test]
    fn fractal_regenerates_from_record() {
        let rec = CorpusRecord {
            index: 3,
            generator_kind: GeneratorKind::Fractal,
            seed: 3,
        };
        let a = rec.regenerate(256).unwrap();
        let b = generate_image(GeneratorKind::Fractal, 3, 256).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_gradient_kinds_span_full_range() {
        for kind in GeneratorKind::ALL {
            if kind == GeneratorKind::Gradient {
                continue;
            }
            for seed in 0..4 {
                let img = generate_image(kind, seed, 96).unwrap();
                let min = *img.pixels().iter().min().unwrap();
                let max = *img.pixels().iter().max().unwrap();
                assert!(min < 32 && max > 223, "{kind:?} seed {seed}: {min}..{max}");
            }
        }
    }

    #[test]
    fn gradient_is_smooth_diagonal() {
        let img = generate_image(GeneratorKind::Gradient, 9, 64).unwrap();
        // constant along anti-diagonals
        assert_eq!(img.rgb(10, 20), img.rgb(20, 10));
        assert_eq!(img.rgb(0, 63), img.rgb(63, 0));
    }

    #[test]
    fn record_json_uses_kebab_kinds() {
        let rec = &corpus_records(1, 2)[1];
        let json = serde_json::to_string(rec).unwrap();
        assert!(json.contains("\"value-noise\""), "{json}");
    }
}
