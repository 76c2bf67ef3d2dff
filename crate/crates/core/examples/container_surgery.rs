// Attaches, extracts and strips an envelope in PNG and JPEG containers and
// shows that stripping restores the original bytes.

use clash_core::container::{attach_manifest, exclusion_hash, extract_manifest, strip_manifest};
use clash_core::corpus::{generate_image, GeneratorKind};
use clash_core::AssetFile;

pub fn run_example() -> clash_core::Result<()> {
    let img = generate_image(GeneratorKind::Fractal, 5, 96)?;
    // large enough to need three APP11 segments in JPEG
    let envelope: Vec<u8> = (0..150_000u32).map(|i| b'a' + (i % 26) as u8).collect();

    for bytes in [img.encode_png()?, img.encode_jpeg(90)?] {
        let file = AssetFile::from_bytes(bytes)?;
        let with = attach_manifest(&file, &envelope)?;
        let back = extract_manifest(&with)?.expect("present");
        let stripped = strip_manifest(&with)?;
        println!(
            "{:?}: {} -> {} bytes, envelope intact: {}, strip restores original: {}",
            file.format(),
            file.bytes().len(),
            with.bytes().len(),
            back == envelope,
            stripped.bytes() == file.bytes()
        );
        println!(
            "  exclusion hash unchanged by attach: {}",
            exclusion_hash(&with)? == exclusion_hash(&file)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clash_core::Result<()> {
    run_example()
}
