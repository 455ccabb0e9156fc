//! Regenerates the bundled fixture images under `crates/core/fixtures/`.

use std::path::Path;

use sipkit::codec::{write_image, DecodedImage, Format};
use sipkit::fixtures::{glyph_a, one_cell, two_cells};
use sipkit::point::real_to_gray16;

fn main() -> sipkit::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    for (name, img) in [
        ("glyph_a.png", glyph_a(1)),
        ("two_cells.png", two_cells(1)),
        ("one_cell.png", one_cell(1)),
    ] {
        write_image(&DecodedImage::Gray(real_to_gray16(&img)), dir.join(name), Format::Png)?;
        println!("wrote {}", dir.join(name).display());
    }
    Ok(())
}
