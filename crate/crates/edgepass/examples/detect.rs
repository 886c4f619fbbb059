//! End-to-end detection: load a PNM image (or synthesize one), run the
//! pass chain, and write the edge map next to your temp dir.
//!
//!     cargo run --example detect [input.pnm]

use edgepass::{detect_edges, pnm, synth, CannyParams};

fn main() -> edgepass::Result<()> {
    let image = match std::env::args().nth(1) {
        Some(path) => pnm::read_image(std::path::Path::new(&path))?,
        None => synth::rgb_test_card(320, 240)?,
    };
    println!(
        "input: {}x{}, {:?}",
        image.width(),
        image.height(),
        image.layout()
    );

    let detection = detect_edges(&image, &CannyParams::default())?;
    let edge_count = detection.edges.bytes().iter().filter(|&&b| b > 0).count();
    println!(
        "{} passes, {:.2} ms, {} edge pixels ({:.1}% of frame)",
        detection.report.passes.len(),
        detection.report.end_to_end_ms.mean,
        edge_count,
        100.0 * edge_count as f64 / (image.width() * image.height()) as f64
    );
    for pass in &detection.report.passes {
        println!("  {:14} {} reads/pixel", pass.name, pass.reads_per_pixel());
    }

    let out = std::env::temp_dir().join("edgepass_detect.pgm");
    pnm::write_image(&out, &detection.edges)?;
    println!("edge map written to {}", out.display());
    Ok(())
}
