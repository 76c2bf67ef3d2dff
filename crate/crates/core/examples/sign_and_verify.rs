// Creates a signing chain, signs both claim templates over the same PNG and
// verifies them against trusted and empty trust stores.

use clash_core::container::{exclusion_hash, extract_manifest, sign_and_attach};
use clash_core::corpus::{generate_image, GeneratorKind};
use clash_core::manifest::{claim_diff, generate_cert_chain, now_rfc3339, verify_envelope};
use clash_core::{AssetFile, Template, TrustStore};

pub fn run_example() -> clash_core::Result<()> {
    let chain = generate_cert_chain("Example Signer")?;
    let trusted = TrustStore::new([chain.root.clone()]);
    let img = generate_image(GeneratorKind::Geometric, 3, 128)?;
    let file = AssetFile::from_bytes(img.encode_png()?)?;
    let at = &now_rfc3339();

    let mut claims = Vec::new();
    for template in [Template::Honest, Template::Misleading] {
        let signed = sign_and_attach(&file, template, &chain, at)?;
        let envelope = extract_manifest(&signed)?.expect("envelope attached");
        let hash = exclusion_hash(&signed)?;
        let v = verify_envelope(&envelope, &hash, &trusted);
        let claim = v.claim.expect("parsed claim");
        println!(
            "{template:?}: {:?}, agent {}, discloses AI: {}",
            v.status,
            claim.software_agent,
            claim.discloses_ai()
        );
        let untrusted = verify_envelope(&envelope, &hash, &TrustStore::empty());
        println!("  with an empty trust store: {:?}", untrusted.status);
        assert!(v.status.is_valid());
        claims.push(claim);
    }
    println!(
        "fields that differ: {:?}",
        claim_diff(&claims[0], &claims[1])
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    run_example()
}
