//! Provenance claims, the self-signed P-256 certificate chain, and manifest
//! signing and verification.
//!
//! A claim is signed as canonical JSON: keys sorted, no insignificant
//! whitespace, absent optional fields omitted. The envelope stored in the
//! container is
//!
//! ```text
//! {"certs":[<b64 leaf DER>,<b64 root DER>],"claim":{...},"signature":<b64 DER ECDSA>}
//! ```
//!
//! Verification looks only at envelope bytes, the expected asset hash and the
//! trust store. Certificate validity windows are checked against the claim's
//! `signed_at`, never the wall clock.

use std::collections::BTreeSet;
use std::str::FromStr;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use p256::ecdsa::signature::{Signer, Verifier};
use p256::ecdsa::{DerSignature, SigningKey, VerifyingKey};
use p256::pkcs8::{DecodePrivateKey, EncodePrivateKey};
use rand::rngs::OsRng;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;
use x509_cert::builder::{Builder, CertificateBuilder, Profile};
use x509_cert::der::{Decode, Encode};
use x509_cert::name::Name;
use x509_cert::serial_number::SerialNumber;
use x509_cert::spki::{ObjectIdentifier, SubjectPublicKeyInfoOwned};
use x509_cert::time::Validity;
use x509_cert::Certificate;

use crate::error::{Error, Result};

pub const TRAINED_ALGORITHMIC_MEDIA: &str =
    "http://cv.iptc.org/newscodes/digitalsourcetype/trainedAlgorithmicMedia";
pub const AI_SOURCE_TERMINAL: &str = "trainedAlgorithmicMedia";
pub const HONEST_AGENT: &str = "StableDiffusionXL/1.0";
pub const MISLEADING_AGENT: &str = "PhotoEditor/2.0";

const ECDSA_WITH_SHA256: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.10045.4.3.2");
const EC_PUBLIC_KEY: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.10045.2.1");
const PRIME256V1: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.10045.3.1.7");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "c2pa.created")]
    Created,
    #[serde(rename = "c2pa.edited")]
    Edited,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digital_source_type: Option<String>,
    pub software_agent: String,
    pub signed_at: String,
    pub asset_hash: String,
}

impl Claim {
    /// True when the source type's last path segment is exactly
    /// `trainedAlgorithmicMedia`.
    pub fn discloses_ai(&self) -> bool {
        self.digital_source_type
            .as_deref()
            .and_then(|uri| uri.rsplit('/').next())
            .is_some_and(|seg| seg == AI_SOURCE_TERMINAL)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Honest,
    Misleading,
}

impl Template {
    pub fn claim(&self, asset_hash: &str, signed_at: &str) -> Result<Claim> {
        match self {
            Template::Honest => make_honest_claim(asset_hash, signed_at),
            Template::Misleading => make_misleading_claim(asset_hash, signed_at),
        }
    }
}

impl FromStr for Template {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honest" => Ok(Template::Honest),
            "misleading" => Ok(Template::Misleading),
            other => Err(Error::invalid(format!("unknown template '{other}'"))),
        }
    }
}

fn check_hash(asset_hash: &str) -> Result<()> {
    let ok = asset_hash.len() == 64
        && asset_hash
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
    if !ok {
        return Err(Error::invalid(format!(
            "asset hash must be 64 lowercase hex characters: '{asset_hash}'"
        )));
    }
    Ok(())
}

fn parse_rfc3339(s: &str) -> Result<OffsetDateTime> {
    OffsetDateTime::parse(s, &Rfc3339).map_err(|e| Error::invalid(format!("signed_at '{s}': {e}")))
}

/// Current UTC time, whole seconds, RFC 3339.
pub fn now_rfc3339() -> String {
    OffsetDateTime::now_utc()
        .replace_nanosecond(0)
        .expect("zero is a valid nanosecond")
        .format(&Rfc3339)
        .expect("UTC timestamps always format")
}

pub fn make_honest_claim(asset_hash: &str, signed_at: &str) -> Result<Claim> {
    check_hash(asset_hash)?;
    parse_rfc3339(signed_at)?;
    Ok(Claim {
        action: Action::Created,
        digital_source_type: Some(TRAINED_ALGORITHMIC_MEDIA.to_string()),
        software_agent: HONEST_AGENT.to_string(),
        signed_at: signed_at.to_string(),
        asset_hash: asset_hash.to_string(),
    })
}

pub fn make_misleading_claim(asset_hash: &str, signed_at: &str) -> Result<Claim> {
    check_hash(asset_hash)?;
    parse_rfc3339(signed_at)?;
    Ok(Claim {
        action: Action::Edited,
        digital_source_type: None,
        software_agent: MISLEADING_AGENT.to_string(),
        signed_at: signed_at.to_string(),
        asset_hash: asset_hash.to_string(),
    })
}

/// Sorted-key, whitespace-free JSON for an arbitrary JSON document.
pub fn canonicalize_json(json: &[u8]) -> Result<Vec<u8>> {
    // serde_json::Value keeps object keys in a BTreeMap, so serializing it
    // back out sorts them
    let v: serde_json::Value = serde_json::from_slice(json)?;
    Ok(serde_json::to_vec(&v)?)
}

pub fn canonicalize(claim: &Claim) -> Vec<u8> {
    let v = serde_json::to_value(claim).expect("claim is plain data");
    serde_json::to_vec(&v).expect("values always serialize")
}

/// Names of top-level claim fields whose values differ, including fields
/// present on only one side.
pub fn claim_diff(a: &Claim, b: &Claim) -> BTreeSet<String> {
    let to_map = |c: &Claim| match serde_json::to_value(c).expect("plain data") {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("claims serialize as objects"),
    };
    let (ma, mb) = (to_map(a), to_map(b));
    ma.keys()
        .chain(mb.keys())
        .filter(|k| ma.get(*k) != mb.get(*k))
        .cloned()
        .collect()
}

// ---------------------------------------------------------------- certificates

#[derive(Clone)]
pub struct CertChain {
    pub leaf: Vec<u8>,
    pub root: Vec<u8>,
    leaf_key: Option<SigningKey>,
}

impl std::fmt::Debug for CertChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CertChain")
            .field("leaf_len", &self.leaf.len())
            .field("root_len", &self.root.len())
            .field("has_private_key", &self.leaf_key.is_some())
            .finish()
    }
}

fn random_serial() -> Result<SerialNumber> {
    let mut bytes = [0u8; 16];
    OsRng.fill_bytes(&mut bytes);
    bytes[0] &= 0x7F;
    bytes[0] |= 0x01;
    SerialNumber::new(&bytes).map_err(crypto)
}

fn crypto(e: impl std::fmt::Display) -> Error {
    Error::Crypto(e.to_string())
}

/// Escapes RDN special characters so arbitrary subjects parse as one CN.
fn common_name(subject: &str) -> Result<Name> {
    let mut escaped = String::with_capacity(subject.len());
    for ch in subject.chars() {
        if matches!(ch, ',' | '+' | '"' | '\\' | '<' | '>' | ';' | '=') {
            escaped.push('\\');
        }
        escaped.push(ch);
    }
    Name::from_str(&format!("CN={escaped}")).map_err(crypto)
}

pub fn generate_cert_chain(subject: &str) -> Result<CertChain> {
    if subject.trim().is_empty() {
        return Err(Error::invalid("certificate subject must be non-empty"));
    }
    let validity = Validity::from_now(Duration::from_secs(365 * 24 * 3600)).map_err(crypto)?;

    let root_key = SigningKey::random(&mut OsRng);
    let root_name = common_name(&format!("{subject} Root CA"))?;
    let root_spki =
        SubjectPublicKeyInfoOwned::from_key(*root_key.verifying_key()).map_err(crypto)?;
    let root = CertificateBuilder::new(
        Profile::Root,
        random_serial()?,
        validity,
        root_name.clone(),
        root_spki,
        &root_key,
    )
    .map_err(crypto)?
    .build::<DerSignature>()
    .map_err(crypto)?;

    let leaf_key = SigningKey::random(&mut OsRng);
    let leaf_spki =
        SubjectPublicKeyInfoOwned::from_key(*leaf_key.verifying_key()).map_err(crypto)?;
    let leaf = CertificateBuilder::new(
        Profile::Leaf {
            issuer: root_name,
            enable_key_agreement: false,
            enable_key_encipherment: false,
        },
        random_serial()?,
        validity,
        common_name(subject)?,
        leaf_spki,
        &root_key,
    )
    .map_err(crypto)?
    .build::<DerSignature>()
    .map_err(crypto)?;

    Ok(CertChain {
        leaf: leaf.to_der().map_err(crypto)?,
        root: root.to_der().map_err(crypto)?,
        leaf_key: Some(leaf_key),
    })
}

impl CertChain {
    pub fn has_private_key(&self) -> bool {
        self.leaf_key.is_some()
    }

    /// The same certificates without the signing key.
    pub fn public_only(&self) -> CertChain {
        CertChain {
            leaf: self.leaf.clone(),
            root: self.root.clone(),
            leaf_key: None,
        }
    }

    /// Leaf certificate, root certificate, then the PKCS#8 leaf key if held.
    pub fn to_pem(&self) -> Result<String> {
        let mut blocks = vec![
            pem::Pem::new("CERTIFICATE", self.leaf.clone()),
            pem::Pem::new("CERTIFICATE", self.root.clone()),
        ];
        if let Some(key) = &self.leaf_key {
            let der = key.to_pkcs8_der().map_err(crypto)?;
            blocks.push(pem::Pem::new("PRIVATE KEY", der.as_bytes().to_vec()));
        }
        Ok(pem::encode_many(&blocks))
    }

    pub fn from_pem(text: &str) -> Result<CertChain> {
        let blocks = pem::parse_many(text).map_err(crypto)?;
        let certs: Vec<&pem::Pem> = blocks.iter().filter(|b| b.tag() == "CERTIFICATE").collect();
        if certs.len() != 2 {
            return Err(Error::invalid(format!(
                "chain PEM must hold exactly 2 certificates (leaf, root), found {}",
                certs.len()
            )));
        }
        let leaf_key = blocks
            .iter()
            .find(|b| b.tag() == "PRIVATE KEY")
            .map(|b| SigningKey::from_pkcs8_der(b.contents()).map_err(crypto))
            .transpose()?;
        Ok(CertChain {
            leaf: certs[0].contents().to_vec(),
            root: certs[1].contents().to_vec(),
            leaf_key,
        })
    }

    pub fn root_pem(&self) -> String {
        pem::encode(&pem::Pem::new("CERTIFICATE", self.root.clone()))
    }
}

fn p256_key(
    spki: &x509_cert::spki::SubjectPublicKeyInfoOwned,
) -> std::result::Result<VerifyingKey, String> {
    if spki.algorithm.oid != EC_PUBLIC_KEY {
        return Err("public key is not an EC key".into());
    }
    let curve = spki
        .algorithm
        .parameters
        .as_ref()
        .and_then(|p| p.decode_as::<ObjectIdentifier>().ok());
    if curve != Some(PRIME256V1) {
        return Err("public key is not on P-256".into());
    }
    VerifyingKey::from_sec1_bytes(spki.subject_public_key.raw_bytes()).map_err(|e| e.to_string())
}

/// Checks `cert` was signed with ECDSA-SHA256 by `issuer_key`.
fn check_cert_signature(
    cert: &Certificate,
    issuer_key: &VerifyingKey,
) -> std::result::Result<(), String> {
    if cert.signature_algorithm.oid != ECDSA_WITH_SHA256
        || cert.tbs_certificate.signature.oid != ECDSA_WITH_SHA256
    {
        return Err("certificate not signed with ecdsa-with-SHA256".into());
    }
    let tbs = cert.tbs_certificate.to_der().map_err(|e| e.to_string())?;
    let sig = DerSignature::try_from(cert.signature.raw_bytes()).map_err(|e| e.to_string())?;
    issuer_key
        .verify(&tbs, &sig)
        .map_err(|_| "certificate signature does not verify".to_string())
}

fn within_validity(cert: &Certificate, at: OffsetDateTime) -> bool {
    let v = &cert.tbs_certificate.validity;
    let t = at.unix_timestamp();
    let nb = v.not_before.to_unix_duration().as_secs() as i64;
    let na = v.not_after.to_unix_duration().as_secs() as i64;
    (nb..=na).contains(&t)
}

/// Validates root self-signature and leaf-by-root signature; returns the
/// leaf public key.
fn check_chain(
    leaf_der: &[u8],
    root_der: &[u8],
    at: OffsetDateTime,
) -> std::result::Result<VerifyingKey, String> {
    let root = Certificate::from_der(root_der).map_err(|e| format!("root: {e}"))?;
    let leaf = Certificate::from_der(leaf_der).map_err(|e| format!("leaf: {e}"))?;
    let root_key = p256_key(&root.tbs_certificate.subject_public_key_info)?;
    if root.tbs_certificate.issuer != root.tbs_certificate.subject {
        return Err("root is not self-issued".into());
    }
    check_cert_signature(&root, &root_key)?;
    if leaf.tbs_certificate.issuer != root.tbs_certificate.subject {
        return Err("leaf issuer does not match root subject".into());
    }
    check_cert_signature(&leaf, &root_key)?;
    if !within_validity(&root, at) || !within_validity(&leaf, at) {
        return Err("signing time outside certificate validity".into());
    }
    p256_key(&leaf.tbs_certificate.subject_public_key_info)
}

// ---------------------------------------------------------------- manifests

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedManifest {
    pub claim: Claim,
    /// DER-encoded ECDSA signature over `canonicalize(claim)`.
    pub signature: Vec<u8>,
    /// `[leaf, root]`, DER.
    pub certs: Vec<Vec<u8>>,
}

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    certs: Vec<String>,
    claim: &'a Claim,
    signature: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeIn<'a> {
    certs: Vec<String>,
    #[serde(borrow)]
    claim: &'a RawValue,
    signature: String,
}

impl SignedManifest {
    pub fn to_envelope(&self) -> Result<Vec<u8>> {
        let out = EnvelopeOut {
            certs: self.certs.iter().map(|c| B64.encode(c)).collect(),
            claim: &self.claim,
            signature: B64.encode(&self.signature),
        };
        // round-trip through Value for sorted keys at every level
        canonicalize_json(&serde_json::to_vec(&out)?)
    }

    /// Parses an envelope. The embedded claim must already be in canonical
    /// form; any other spelling is rejected.
    pub fn from_envelope(bytes: &[u8]) -> Result<SignedManifest> {
        let env: EnvelopeIn = serde_json::from_slice(bytes)?;
        let raw = env.claim.get().as_bytes();
        let claim: Claim = serde_json::from_slice(raw)?;
        if canonicalize(&claim) != raw {
            return Err(Error::Structural("claim is not in canonical form".into()));
        }
        let decode = |s: &str| {
            B64.decode(s)
                .map_err(|e| Error::Structural(format!("base64: {e}")))
        };
        Ok(SignedManifest {
            claim,
            signature: decode(&env.signature)?,
            certs: env.certs.iter().map(|c| decode(c)).collect::<Result<_>>()?,
        })
    }
}

pub fn sign(claim: &Claim, chain: &CertChain) -> Result<SignedManifest> {
    let key = chain.leaf_key.as_ref().ok_or(Error::MissingPrivateKey)?;
    let sig: DerSignature = key.sign(&canonicalize(claim));
    Ok(SignedManifest {
        claim: claim.clone(),
        signature: sig.as_bytes().to_vec(),
        certs: vec![chain.leaf.clone(), chain.root.clone()],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifestStatus {
    Absent,
    Invalid,
    ValidUntrusted,
    ValidTrusted,
}

impl ManifestStatus {
    pub fn is_valid(&self) -> bool {
        matches!(
            self,
            ManifestStatus::ValidUntrusted | ManifestStatus::ValidTrusted
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct TrustStore {
    roots: BTreeSet<Vec<u8>>,
}

impl TrustStore {
    pub fn new<I: IntoIterator<Item = Vec<u8>>>(roots: I) -> Self {
        TrustStore {
            roots: roots.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        TrustStore::default()
    }

    /// Every CERTIFICATE block in the text becomes a root.
    pub fn from_pem(text: &str) -> Result<Self> {
        let blocks = pem::parse_many(text).map_err(crypto)?;
        Ok(TrustStore::new(
            blocks
                .into_iter()
                .filter(|b| b.tag() == "CERTIFICATE")
                .map(|b| b.into_contents()),
        ))
    }

    pub fn contains(&self, der: &[u8]) -> bool {
        self.roots.contains(der)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// A new store with one more root.
    pub fn with_root(&self, der: Vec<u8>) -> TrustStore {
        let mut roots = self.roots.clone();
        roots.insert(der);
        TrustStore { roots }
    }
}

/// Outcome of checking a manifest, with the reason for an `Invalid` status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub status: ManifestStatus,
    pub claim: Option<Claim>,
    pub reason: Option<String>,
}

fn invalid(reason: impl Into<String>, claim: Option<Claim>) -> Verification {
    Verification {
        status: ManifestStatus::Invalid,
        claim,
        reason: Some(reason.into()),
    }
}

pub fn verify_manifest(
    manifest: &SignedManifest,
    expected_asset_hash: &str,
    trust_store: &TrustStore,
) -> Verification {
    let claim = Some(manifest.claim.clone());
    let [leaf, root] = manifest.certs.as_slice() else {
        return invalid("manifest must carry exactly [leaf, root]", claim);
    };
    let Ok(at) = parse_rfc3339(&manifest.claim.signed_at) else {
        return invalid("signed_at is not RFC 3339", claim);
    };
    let leaf_key = match check_chain(leaf, root, at) {
        Ok(k) => k,
        Err(e) => return invalid(format!("certificate chain: {e}"), claim),
    };
    let Ok(sig) = DerSignature::try_from(manifest.signature.as_slice()) else {
        return invalid("malformed signature encoding", claim);
    };
    if leaf_key
        .verify(&canonicalize(&manifest.claim), &sig)
        .is_err()
    {
        return invalid("claim signature does not verify", claim);
    }
    if manifest.claim.asset_hash != expected_asset_hash {
        return invalid("asset hash mismatch", claim);
    }
    let status = if trust_store.contains(root) {
        ManifestStatus::ValidTrusted
    } else {
        ManifestStatus::ValidUntrusted
    };
    Verification {
        status,
        claim,
        reason: None,
    }
}

pub fn verify(
    manifest: &SignedManifest,
    expected_asset_hash: &str,
    trust_store: &TrustStore,
) -> (ManifestStatus, Claim) {
    let v = verify_manifest(manifest, expected_asset_hash, trust_store);
    (v.status, manifest.claim.clone())
}

/// Parses and verifies raw envelope bytes; unparseable envelopes are `Invalid`.
pub fn verify_envelope(
    envelope: &[u8],
    expected_asset_hash: &str,
    trust_store: &TrustStore,
) -> Verification {
    match SignedManifest::from_envelope(envelope) {
        Ok(m) => verify_manifest(&m, expected_asset_hash, trust_store),
        Err(e) => invalid(format!("envelope: {e}"), None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HASH: &str = "0123456789abcdef0123456789abcdef0123456789abcdef0123456789abcdef";
    const AT: &str = "2026-03-01T12:00:00Z";

    fn at_now() -> String {
        now_rfc3339()
    }

    #[test]
    fn honest_template_fields() {
        let c = make_honest_claim(HASH, AT).unwrap();
        assert_eq!(c.action, Action::Created);
        assert_eq!(
            c.digital_source_type.as_deref(),
            Some(TRAINED_ALGORITHMIC_MEDIA)
        );
        assert_eq!(c.software_agent, "StableDiffusionXL/1.0");
        assert!(c.discloses_ai());
        assert_eq!(c, make_honest_claim(HASH, AT).unwrap());
    }

    #[test]
    fn misleading_template_omits_source_type_key() {
        let c = make_misleading_claim(HASH, AT).unwrap();
        assert_eq!(c.action, Action::Edited);
        assert_eq!(c.software_agent, "PhotoEditor/2.0");
        assert!(!c.discloses_ai());
        let text = String::from_utf8(canonicalize(&c)).unwrap();
        assert!(!text.contains("digital_source_type"), "{text}");
        assert!(!text.contains("null"));
    }

    #[test]
    fn diff_is_exactly_three_fields() {
        let h = make_honest_claim(HASH, AT).unwrap();
        let m = make_misleading_claim(HASH, AT).unwrap();
        let d: Vec<String> = claim_diff(&h, &m).into_iter().collect();
        assert_eq!(d, ["action", "digital_source_type", "software_agent"]);
        assert_ne!(canonicalize(&h), canonicalize(&m));
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(make_honest_claim("abc", AT).is_err());
        assert!(make_honest_claim(&HASH.to_uppercase(), AT).is_err());
        assert!(make_misleading_claim(HASH, "yesterday").is_err());
    }

    #[test]
    fn canonical_form_sorts_keys() {
        let c = make_honest_claim(HASH, AT).unwrap();
        let bytes = canonicalize(&c);
        let text = std::str::from_utf8(&bytes).unwrap();
        assert!(text.starts_with("{\"action\":\"c2pa.created\",\"asset_hash\":"));
        assert!(text.contains("trainedAlgorithmicMedia"));
        assert!(!text.contains(' ') || text.matches(' ').count() == 0);
        let shuffled = format!(
            "{{\"software_agent\":\"{HONEST_AGENT}\",\"signed_at\":\"{AT}\",\"asset_hash\":\"{HASH}\",\
             \"digital_source_type\":\"{TRAINED_ALGORITHMIC_MEDIA}\",\"action\":\"c2pa.created\"}}"
        );
        let parsed: Claim = serde_json::from_str(&shuffled).unwrap();
        assert_eq!(canonicalize(&parsed), bytes);
        assert_eq!(canonicalize_json(shuffled.as_bytes()).unwrap(), bytes);
    }

    #[test]
    fn terminal_segment_match_is_exact() {
        let mut c = make_honest_claim(HASH, AT).unwrap();
        c.digital_source_type = Some("urn:x/TrainedAlgorithmicMedia".into());
        assert!(!c.discloses_ai());
        c.digital_source_type = Some("trainedAlgorithmicMedia".into());
        assert!(c.discloses_ai());
    }

    #[test]
    fn sign_verify_round_trip() {
        let chain = generate_cert_chain("Test Signer").unwrap();
        let store = TrustStore::new([chain.root.clone()]);
        let claim = make_misleading_claim(HASH, &at_now()).unwrap();
        let m = sign(&claim, &chain).unwrap();
        let (status, back) = verify(&m, HASH, &store);
        assert_eq!(status, ManifestStatus::ValidTrusted);
        assert_eq!(back, claim);
        assert_eq!(
            verify(&m, HASH, &TrustStore::empty()).0,
            ManifestStatus::ValidUntrusted
        );
    }

    #[test]
    fn tampering_invalidates() {
        let chain = generate_cert_chain("Test Signer").unwrap();
        let store = TrustStore::new([chain.root.clone()]);
        let m = sign(&make_misleading_claim(HASH, &at_now()).unwrap(), &chain).unwrap();

        let mut sig_flip = m.clone();
        let last = sig_flip.signature.len() - 1;
        sig_flip.signature[last] ^= 0x01;
        assert_eq!(verify(&sig_flip, HASH, &store).0, ManifestStatus::Invalid);

        let mut swapped = m.clone();
        swapped.claim.action = Action::Created;
        assert_eq!(verify(&swapped, HASH, &store).0, ManifestStatus::Invalid);

        let other = "f".repeat(64);
        let v = verify_manifest(&m, &other, &store);
        assert_eq!(v.status, ManifestStatus::Invalid);
        assert_eq!(v.reason.as_deref(), Some("asset hash mismatch"));
    }

    #[test]
    fn foreign_root_breaks_chain() {
        let a = generate_cert_chain("A").unwrap();
        let b = generate_cert_chain("B").unwrap();
        assert_ne!(a.root, b.root);
        let mut m = sign(&make_honest_claim(HASH, &at_now()).unwrap(), &a).unwrap();
        m.certs[1] = b.root.clone();
        assert_eq!(
            verify(&m, HASH, &TrustStore::new([b.root.clone()])).0,
            ManifestStatus::Invalid
        );
    }

    #[test]
    fn signing_time_outside_validity_is_invalid() {
        let chain = generate_cert_chain("Old").unwrap();
        let m = sign(
            &make_honest_claim(HASH, "1999-01-01T00:00:00Z").unwrap(),
            &chain,
        )
        .unwrap();
        assert_eq!(
            verify(&m, HASH, &TrustStore::empty()).0,
            ManifestStatus::Invalid
        );
    }

    #[test]
    fn missing_key_cannot_sign() {
        let chain = generate_cert_chain("Signer").unwrap().public_only();
        let claim = make_honest_claim(HASH, AT).unwrap();
        assert!(matches!(
            sign(&claim, &chain),
            Err(Error::MissingPrivateKey)
        ));
    }

    #[test]
    fn pem_round_trip_keeps_signing_ability() {
        let chain = generate_cert_chain("Signer, Inc.").unwrap();
        let back = CertChain::from_pem(&chain.to_pem().unwrap()).unwrap();
        assert!(back.has_private_key());
        assert_eq!(back.leaf, chain.leaf);
        let m = sign(&make_honest_claim(HASH, &at_now()).unwrap(), &back).unwrap();
        let store = TrustStore::from_pem(&chain.root_pem()).unwrap();
        assert_eq!(verify(&m, HASH, &store).0, ManifestStatus::ValidTrusted);
    }

    #[test]
    fn envelope_round_trip_and_shape() {
        let chain = generate_cert_chain("Signer").unwrap();
        let m = sign(&make_honest_claim(HASH, &at_now()).unwrap(), &chain).unwrap();
        let env = m.to_envelope().unwrap();
        let text = std::str::from_utf8(&env).unwrap();
        assert!(text.starts_with("{\"certs\":[\""));
        assert_eq!(SignedManifest::from_envelope(&env).unwrap(), m);
        let v = verify_envelope(b"not json", HASH, &TrustStore::empty());
        assert_eq!(v.status, ManifestStatus::Invalid);
        assert!(v.claim.is_none());
    }

    #[test]
    fn non_canonical_claim_rejected() {
        let chain = generate_cert_chain("Signer").unwrap();
        let m = sign(&make_honest_claim(HASH, &at_now()).unwrap(), &chain).unwrap();
        let env = String::from_utf8(m.to_envelope().unwrap()).unwrap();
        let spaced = env.replacen("\"claim\":{\"action\":", "\"claim\":{ \"action\":", 1);
        assert!(matches!(
            SignedManifest::from_envelope(spaced.as_bytes()),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn distinct_chains_have_distinct_keys() {
        let a = generate_cert_chain("S").unwrap();
        let b = generate_cert_chain("S").unwrap();
        assert_ne!(a.leaf, b.leaf);
        assert_ne!(a.root, b.root);
    }
}
