//! Manifest envelope framing inside PNG and JPEG files.
//!
//! PNG: a single `cpMf` chunk placed immediately before `IEND`.
//!
//! JPEG: one or more APP11 segments inserted after the run of APP0/APP1
//! segments that follows SOI. Each segment payload is
//!
//! ```text
//! "XLAM" | seq: u8 | total: u8 | up to 65,000 envelope bytes
//! ```
//!
//! Every other byte of the file is left untouched, so pixel data never
//! changes and [`exclusion_hash`] is stable under attach and strip.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::manifest::{self, CertChain, Template};

pub const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
/// Ancillary, private, reserved-bit clear, safe-to-copy.
pub const PNG_CHUNK_TYPE: [u8; 4] = *b"cpMf";
pub const JPEG_APP11: u8 = 0xEB;
pub const JPEG_MAGIC: [u8; 4] = *b"XLAM";
pub const JPEG_SEGMENT_DATA_MAX: usize = 65_000;
pub const JPEG_SEGMENT_MAX_COUNT: usize = 255;
pub const ENVELOPE_MAX: usize = JPEG_SEGMENT_DATA_MAX * JPEG_SEGMENT_MAX_COUNT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetFormat {
    Png,
    Jpeg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssetFile {
    format: AssetFormat,
    bytes: Vec<u8>,
}

impl AssetFile {
    /// Sniffs the format from the leading signature.
    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        let format = if bytes.starts_with(&PNG_SIGNATURE) {
            AssetFormat::Png
        } else if bytes.starts_with(&[0xFF, 0xD8]) {
            AssetFormat::Jpeg
        } else {
            return Err(Error::UnknownFormat);
        };
        Ok(AssetFile { format, bytes })
    }

    pub fn format(&self) -> AssetFormat {
        self.format
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

// ---------------------------------------------------------------- PNG

struct PngChunk {
    start: usize,
    end: usize,
    kind: [u8; 4],
}

impl PngChunk {
    fn data<'a>(&self, bytes: &'a [u8]) -> &'a [u8] {
        &bytes[self.start + 8..self.end - 4]
    }
}

fn png_chunks(bytes: &[u8]) -> Result<Vec<PngChunk>> {
    let mut pos = PNG_SIGNATURE.len();
    let mut chunks = Vec::new();
    while pos < bytes.len() {
        if pos + 12 > bytes.len() {
            return Err(Error::Structural("truncated PNG chunk header".into()));
        }
        let len = u32::from_be_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        let end = pos
            .checked_add(12 + len)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| Error::Structural("PNG chunk overruns file".into()))?;
        let kind: [u8; 4] = bytes[pos + 4..pos + 8].try_into().unwrap();
        chunks.push(PngChunk {
            start: pos,
            end,
            kind,
        });
        pos = end;
        if &kind == b"IEND" {
            break;
        }
    }
    if chunks.last().map(|c| &c.kind) != Some(b"IEND") {
        return Err(Error::Structural("PNG has no IEND chunk".into()));
    }
    Ok(chunks)
}

fn png_chunk(kind: [u8; 4], data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + 12);
    out.extend_from_slice(&(data.len() as u32).to_be_bytes());
    out.extend_from_slice(&kind);
    out.extend_from_slice(data);
    let mut crc = crc32fast::Hasher::new();
    crc.update(&kind);
    crc.update(data);
    out.extend_from_slice(&crc.finalize().to_be_bytes());
    out
}

fn png_attach(bytes: &[u8], envelope: &[u8]) -> Result<Vec<u8>> {
    let chunks = png_chunks(bytes)?;
    if chunks.iter().any(|c| c.kind == PNG_CHUNK_TYPE) {
        return Err(Error::EnvelopeExists);
    }
    let iend = chunks.last().expect("IEND checked").start;
    let mut out = Vec::with_capacity(bytes.len() + envelope.len() + 12);
    out.extend_from_slice(&bytes[..iend]);
    out.extend_from_slice(&png_chunk(PNG_CHUNK_TYPE, envelope));
    out.extend_from_slice(&bytes[iend..]);
    Ok(out)
}

fn png_extract(bytes: &[u8]) -> Result<Option<Vec<u8>>> {
    let chunks = png_chunks(bytes)?;
    let mut found = chunks.iter().filter(|c| c.kind == PNG_CHUNK_TYPE);
    let Some(chunk) = found.next() else {
        return Ok(None);
    };
    if found.next().is_some() {
        return Err(Error::Structural("more than one cpMf chunk".into()));
    }
    let data = chunk.data(bytes);
    let stored = u32::from_be_bytes(bytes[chunk.end - 4..chunk.end].try_into().unwrap());
    let mut crc = crc32fast::Hasher::new();
    crc.update(&chunk.kind);
    crc.update(data);
    if crc.finalize() != stored {
        return Err(Error::Structural("cpMf chunk CRC mismatch".into()));
    }
    Ok(Some(data.to_vec()))
}

fn png_strip(bytes: &[u8]) -> Result<Vec<u8>> {
    let chunks = png_chunks(bytes)?;
    let mut out = Vec::with_capacity(bytes.len());
    out.extend_from_slice(&bytes[..PNG_SIGNATURE.len()]);
    for c in chunks.iter().filter(|c| c.kind != PNG_CHUNK_TYPE) {
        out.extend_from_slice(&bytes[c.start..c.end]);
    }
    // trailing bytes after IEND are kept verbatim
    out.extend_from_slice(&bytes[chunks.last().unwrap().end..]);
    Ok(out)
}

// ---------------------------------------------------------------- JPEG

struct JpegSegment {
    /// Offset of the 0xFF that starts the marker.
    start: usize,
    end: usize,
    marker: u8,
}

impl JpegSegment {
    fn payload<'a>(&self, bytes: &'a [u8]) -> &'a [u8] {
        &bytes[self.start + 4..self.end]
    }

    fn is_envelope(&self, bytes: &[u8]) -> bool {
        self.marker == JPEG_APP11 && self.payload(bytes).starts_with(&JPEG_MAGIC)
    }
}

/// Header segments from SOI up to (not including) SOS/EOI.
fn jpeg_header_segments(bytes: &[u8]) -> Result<Vec<JpegSegment>> {
    if !bytes.starts_with(&[0xFF, 0xD8]) {
        return Err(Error::Structural("missing SOI".into()));
    }
    let mut pos = 2;
    let mut segments = Vec::new();
    loop {
        if pos + 2 > bytes.len() {
            return Err(Error::Structural("JPEG ends before SOS".into()));
        }
        if bytes[pos] != 0xFF {
            return Err(Error::Structural(format!(
                "expected marker at offset {pos}"
            )));
        }
        let marker = bytes[pos + 1];
        match marker {
            0xFF => {
                // fill byte
                pos += 1;
                continue;
            }
            0xDA | 0xD9 => break,
            0x01 | 0xD0..=0xD7 => {
                pos += 2;
                continue;
            }
            _ => {}
        }
        if pos + 4 > bytes.len() {
            return Err(Error::Structural("truncated JPEG segment length".into()));
        }
        let len = u16::from_be_bytes([bytes[pos + 2], bytes[pos + 3]]) as usize;
        if len < 2 || pos + 2 + len > bytes.len() {
            return Err(Error::Structural("JPEG segment overruns file".into()));
        }
        segments.push(JpegSegment {
            start: pos,
            end: pos + 2 + len,
            marker,
        });
        pos += 2 + len;
    }
    Ok(segments)
}

fn jpeg_attach(bytes: &[u8], envelope: &[u8]) -> Result<Vec<u8>> {
    let segments = jpeg_header_segments(bytes)?;
    if segments.iter().any(|s| s.is_envelope(bytes)) {
        return Err(Error::EnvelopeExists);
    }
    // contiguous APP0/APP1 run directly after SOI
    let mut insert_at = 2;
    for s in &segments {
        if s.start != insert_at || !matches!(s.marker, 0xE0 | 0xE1) {
            break;
        }
        insert_at = s.end;
    }
    let parts: Vec<&[u8]> = envelope.chunks(JPEG_SEGMENT_DATA_MAX).collect();
    let total = parts.len() as u8;
    let mut out = Vec::with_capacity(bytes.len() + envelope.len() + parts.len() * 10);
    out.extend_from_slice(&bytes[..insert_at]);
    for (seq, part) in parts.iter().enumerate() {
        let len = (2 + JPEG_MAGIC.len() + 2 + part.len()) as u16;
        out.extend_from_slice(&[0xFF, JPEG_APP11]);
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&JPEG_MAGIC);
        out.push(seq as u8);
        out.push(total);
        out.extend_from_slice(part);
    }
    out.extend_from_slice(&bytes[insert_at..]);
    Ok(out)
}

fn jpeg_extract(bytes: &[u8]) -> Result<Option<Vec<u8>>> {
    let segments = jpeg_header_segments(bytes)?;
    let mut parts: Vec<(u8, u8, &[u8])> = Vec::new();
    for s in segments.iter().filter(|s| s.is_envelope(bytes)) {
        let p = s.payload(bytes);
        if p.len() < 6 {
            return Err(Error::Structural(
                "XLAM segment without sequence header".into(),
            ));
        }
        parts.push((p[4], p[5], &p[6..]));
    }
    if parts.is_empty() {
        return Ok(None);
    }
    let total = parts[0].1;
    if parts.iter().any(|&(_, t, _)| t != total) {
        return Err(Error::Structural("XLAM segments disagree on count".into()));
    }
    if parts.len() != total as usize {
        return Err(Error::Structural(format!(
            "found {} of {} XLAM segments",
            parts.len(),
            total
        )));
    }
    parts.sort_by_key(|&(seq, _, _)| seq);
    if parts
        .iter()
        .enumerate()
        .any(|(i, &(seq, _, _))| seq as usize != i)
    {
        return Err(Error::Structural(
            "XLAM sequence has gaps or duplicates".into(),
        ));
    }
    Ok(Some(
        parts
            .iter()
            .flat_map(|&(_, _, d)| d.iter().copied())
            .collect(),
    ))
}

fn jpeg_strip(bytes: &[u8]) -> Result<Vec<u8>> {
    let segments = jpeg_header_segments(bytes)?;
    let mut out = Vec::with_capacity(bytes.len());
    let mut pos = 0;
    for s in segments.iter().filter(|s| s.is_envelope(bytes)) {
        out.extend_from_slice(&bytes[pos..s.start]);
        pos = s.end;
    }
    out.extend_from_slice(&bytes[pos..]);
    Ok(out)
}

// ---------------------------------------------------------------- API

pub fn attach_manifest(file: &AssetFile, envelope: &[u8]) -> Result<AssetFile> {
    if envelope.is_empty() {
        return Err(Error::invalid("envelope is empty"));
    }
    if envelope.len() > ENVELOPE_MAX {
        return Err(Error::EnvelopeTooLarge(envelope.len()));
    }
    let bytes = match file.format {
        AssetFormat::Png => png_attach(&file.bytes, envelope)?,
        AssetFormat::Jpeg => jpeg_attach(&file.bytes, envelope)?,
    };
    Ok(AssetFile {
        format: file.format,
        bytes,
    })
}

/// `Ok(None)` when no envelope is present; malformed framing is an error.
pub fn extract_manifest(file: &AssetFile) -> Result<Option<Vec<u8>>> {
    match file.format {
        AssetFormat::Png => png_extract(&file.bytes),
        AssetFormat::Jpeg => jpeg_extract(&file.bytes),
    }
}

/// Removes every envelope chunk or segment. Fails only when the container
/// itself cannot be walked.
pub fn strip_manifest(file: &AssetFile) -> Result<AssetFile> {
    let bytes = match file.format {
        AssetFormat::Png => png_strip(&file.bytes)?,
        AssetFormat::Jpeg => jpeg_strip(&file.bytes)?,
    };
    Ok(AssetFile {
        format: file.format,
        bytes,
    })
}

/// Lowercase hex SHA-256 over the manifest-stripped file bytes.
pub fn exclusion_hash(file: &AssetFile) -> Result<String> {
    let stripped = strip_manifest(file)?;
    Ok(hex::encode(Sha256::digest(stripped.bytes())))
}

/// Hash, build the chosen claim, sign it and attach the envelope.
pub fn sign_and_attach(
    file: &AssetFile,
    template: Template,
    chain: &CertChain,
    signed_at: &str,
) -> Result<AssetFile> {
    if extract_manifest(file)?.is_some() {
        return Err(Error::EnvelopeExists);
    }
    let hash = exclusion_hash(file)?;
    let claim = template.claim(&hash, signed_at)?;
    let signed = manifest::sign(&claim, chain)?;
    attach_manifest(file, &signed.to_envelope()?)
}
