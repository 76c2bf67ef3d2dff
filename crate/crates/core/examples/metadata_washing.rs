// The authenticated-fake scenario: AI-watermarked pixels under a validly
// signed manifest that claims a photo edit. The audit flags the clash;
// stripping the manifest downgrades it to a watermark-only finding.

use clash_core::audit::Auditor;
use clash_core::container::{sign_and_attach, strip_manifest};
use clash_core::corpus::{generate_image, GeneratorKind};
use clash_core::manifest::{generate_cert_chain, now_rfc3339};
use clash_core::{AssetFile, EmbedConfig, Payload, Quadrant, Template, TrustStore};
use clash_core::{WatermarkCodec, WatermarkKey};

pub fn run_example() -> clash_core::Result<()> {
    let codec = WatermarkCodec::new(WatermarkKey::new(2024), EmbedConfig::default())?;
    let payload = Payload::random(5);
    let chain = generate_cert_chain("Washing Example")?;
    let auditor = Auditor::new(
        codec.clone(),
        payload,
        TrustStore::new([chain.root.clone()]),
    );

    let img = codec.embed(&generate_image(GeneratorKind::Gradient, 8, 256)?, &payload)?;
    let png = AssetFile::from_bytes(img.encode_png()?)?;
    let at = &now_rfc3339();

    let honest = sign_and_attach(&png, Template::Honest, &chain, at)?;
    let washed = sign_and_attach(&png, Template::Misleading, &chain, at)?;
    let stripped = strip_manifest(&washed)?;

    let mut quadrants = Vec::new();
    for (name, file) in [
        ("honest", &honest),
        ("misleading", &washed),
        ("stripped", &stripped),
    ] {
        let r = auditor.audit(name, file)?;
        println!(
            "{name:<11} {} ({}) clash={} accuracy={:.3} notes={:?}",
            r.quadrant,
            r.quadrant.label(),
            r.clash,
            r.signals.bit_accuracy,
            r.notes
        );
        quadrants.push(r.quadrant);
    }
    assert_eq!(quadrants, [Quadrant::Q4a, Quadrant::Q4b, Quadrant::Q2]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    run_example()
}
