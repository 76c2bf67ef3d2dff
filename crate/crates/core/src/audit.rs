//! Cross-layer audit: verify the manifest, detect the watermark, and place
//! the asset in the conflict matrix.
//!
//! | manifest valid | AI disclosed | watermark | quadrant |
//! |----------------|--------------|-----------|----------|
//! | no             | -            | no        | Q1       |
//! | no             | -            | yes       | Q2       |
//! | yes            | any          | no        | Q3       |
//! | yes            | yes          | yes       | Q4a      |
//! | yes            | no           | yes       | Q4b      |
//!
//! Q4b, a valid manifest that omits AI disclosure on pixels that carry the
//! AI watermark, is the single positive class.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::container::{self, AssetFile};
use crate::error::{Error, Result};
use crate::manifest::{self, ManifestStatus, TrustStore};
use crate::raster::Image;
use crate::watermark::{EmbedConfig, Payload, WatermarkCodec, WatermarkKey};

pub const UNTRUSTED_ISSUER_NOTE: &str = "certificate issuer is not in the trust store";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4a,
    Q4b,
}

impl Quadrant {
    pub const ALL: [Quadrant; 5] = [
        Quadrant::Q1,
        Quadrant::Q2,
        Quadrant::Q3,
        Quadrant::Q4a,
        Quadrant::Q4b,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Quadrant::Q1 => "Silent Zone",
            Quadrant::Q2 => "Fragile Provenance",
            Quadrant::Q3 => "Authenticated Content",
            Quadrant::Q4a => "Verified Synthetic",
            Quadrant::Q4b => "Authenticated Fake",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSignals {
    pub manifest_valid: bool,
    pub ai_disclosed: bool,
    pub trust: ManifestStatus,
    pub watermark_detected: bool,
    pub bit_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub asset_id: String,
    pub signals: LayerSignals,
    pub quadrant: Quadrant,
    pub clash: bool,
    pub notes: Vec<String>,
}

pub fn classify(
    manifest_valid: bool,
    ai_disclosed: bool,
    watermark_detected: bool,
) -> Result<Quadrant> {
    if ai_disclosed && !manifest_valid {
        return Err(Error::invalid("AI disclosure requires a valid manifest"));
    }
    Ok(match (manifest_valid, ai_disclosed, watermark_detected) {
        (false, _, false) => Quadrant::Q1,
        (false, _, true) => Quadrant::Q2,
        (true, _, false) => Quadrant::Q3,
        (true, true, true) => Quadrant::Q4a,
        (true, false, true) => Quadrant::Q4b,
    })
}

/// Shared state for auditing many files: one codec, target and trust store.
#[derive(Clone, Debug)]
pub struct Auditor {
    codec: WatermarkCodec,
    target: Payload,
    trust: TrustStore,
}

impl Auditor {
    pub fn new(codec: WatermarkCodec, target: Payload, trust: TrustStore) -> Self {
        Auditor {
            codec,
            target,
            trust,
        }
    }

    pub fn audit(&self, asset_id: &str, file: &AssetFile) -> Result<AuditReport> {
        let pixels = Image::decode(file.bytes())?;
        let mut notes = Vec::new();

        let (trust, claim) = match container::extract_manifest(file) {
            Ok(None) => (ManifestStatus::Absent, None),
            Ok(Some(envelope)) => {
                let hash = container::exclusion_hash(file)?;
                let v = manifest::verify_envelope(&envelope, &hash, &self.trust);
                if let Some(reason) = v.reason {
                    notes.push(format!("manifest invalid: {reason}"));
                }
                (v.status, v.claim)
            }
            Err(Error::Structural(msg)) => {
                notes.push(format!("manifest framing unreadable: {msg}"));
                (ManifestStatus::Invalid, None)
            }
            Err(e) => return Err(e),
        };
        if trust == ManifestStatus::ValidUntrusted {
            notes.push(UNTRUSTED_ISSUER_NOTE.to_string());
        }
        let manifest_valid = trust.is_valid();
        let ai_disclosed = manifest_valid && claim.as_ref().is_some_and(|c| c.discloses_ai());

        let detection = self.codec.detect(&pixels, &self.target);
        let quadrant = classify(manifest_valid, ai_disclosed, detection.detected)?;
        Ok(AuditReport {
            asset_id: asset_id.to_string(),
            signals: LayerSignals {
                manifest_valid,
                ai_disclosed,
                trust,
                watermark_detected: detection.detected,
                bit_accuracy: detection.bit_accuracy,
            },
            quadrant,
            clash: quadrant == Quadrant::Q4b,
            notes,
        })
    }

    pub fn audit_bytes(&self, asset_id: &str, bytes: Vec<u8>) -> Result<AuditReport> {
        self.audit(asset_id, &AssetFile::from_bytes(bytes)?)
    }
}

pub fn audit_file(
    file: &AssetFile,
    target_payload: &Payload,
    key: WatermarkKey,
    trust_store: &TrustStore,
    cfg: &EmbedConfig,
) -> Result<AuditReport> {
    let codec = WatermarkCodec::new(key, cfg.clone())?;
    Auditor::new(codec, *target_payload, trust_store.clone()).audit("asset", file)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `None` when there are no Q4b ground-truth assets.
    pub tpr: Option<f64>,
    /// `None` when every ground-truth asset is Q4b.
    pub fpr: Option<f64>,
    pub accuracy: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
    /// `confusion[truth][predicted]`.
    pub confusion: BTreeMap<Quadrant, BTreeMap<Quadrant, usize>>,
}

pub fn compute_metrics(reports: &[AuditReport], ground_truth: &[Quadrant]) -> Result<Metrics> {
    let predicted: Vec<Quadrant> = reports.iter().map(|r| r.quadrant).collect();
    metrics_from_quadrants(&predicted, ground_truth)
}

pub fn metrics_from_quadrants(predicted: &[Quadrant], truth: &[Quadrant]) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("no assets to score"));
    }
    let mut confusion: BTreeMap<Quadrant, BTreeMap<Quadrant, usize>> = BTreeMap::new();
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    let mut correct = 0;
    for (&p, &t) in predicted.iter().zip(truth) {
        *confusion.entry(t).or_default().entry(p).or_default() += 1;
        if p == t {
            correct += 1;
        }
        match (t == Quadrant::Q4b, p == Quadrant::Q4b) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(Metrics {
        tpr: ratio(tp, tp + fn_),
        fpr: ratio(fp, fp + tn),
        accuracy: correct as f64 / truth.len() as f64,
        true_positives: tp,
        false_positives: fp,
        true_negatives: tn,
        false_negatives: fn_,
        confusion,
    })
}
