//! Materializes every intermediate texture of a detection run as PGM
//! files you can open in any viewer. Multi-channel stages stack their
//! channel planes vertically; the gradient's direction channels are
//! remapped from [-1, 1] to [0, 1] so they stay visible.
//!
//!     cargo run --example dump_stages

use edgepass::pass::run_pipeline_collect;
use edgepass::{build_pipeline, pnm, synth, upload, CannyParams, Precision};

fn main() -> edgepass::Result<()> {
    let image = synth::disk(196, 196, 98.0, 98.0, 60.0, 30, 220)?;
    let precision = Precision::Mediump;
    let texture = upload(&image, precision)?;
    let passes = build_pipeline(image.layout(), &CannyParams::default(), precision)?;
    let stages = run_pipeline_collect(&passes, &texture)?;

    let dir = std::env::temp_dir().join("edgepass_stages");
    std::fs::create_dir_all(&dir)?;
    for (index, (texture, report)) in stages.iter().enumerate() {
        let (w, h, ch) = (texture.width(), texture.height(), texture.channels());
        let mut bytes = Vec::with_capacity(w * h * ch);
        for c in 0..ch {
            for y in 0..h {
                for x in 0..w {
                    let v = texture.value(x, y, c);
                    // Direction channels are signed; bias them into view.
                    let v = if c > 0 { (v + 1.0) / 2.0 } else { v };
                    bytes.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
                }
            }
        }
        let plane = edgepass::ImageBuffer::new(w, h * ch, edgepass::PixelLayout::Grey8, bytes)?;
        let name = report.name.to_lowercase().replace([' ', '-'], "_");
        let path = dir.join(format!("{index:02}_{name}.pgm"));
        pnm::write_image(&path, &plane)?;
        println!(
            "{:<24} {} channel(s), {} reads/pixel",
            path.file_name().unwrap().to_string_lossy(),
            ch,
            report.reads_per_pixel()
        );
    }
    println!("\nfiles in {}", dir.display());
    Ok(())
}
