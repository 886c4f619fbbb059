//! When is it worth sending frames to a remote detector? Estimates
//! round-trip latency for a grey VGA frame over each built-in link and
//! sets it against the local frame time measured on this machine.
//!
//!     cargo run --release --example offload_tradeoff

use edgepass::{builtin_profiles, detect_edges, estimate_frame_latency, synth, CannyParams};

fn main() -> edgepass::Result<()> {
    let image = synth::noise(640, 480, 9)?;
    let frame_bytes = (image.width() * image.height()) as u64; // one byte per pixel
    let result_bytes = frame_bytes; // the edge map coming back is the same size

    let detection = detect_edges(&image, &CannyParams::default())?;
    let local_ms = detection.report.end_to_end_ms.mean;
    println!("local detection: {local_ms:.1} ms per 640x480 frame\n");

    println!(
        "{:<10} {:>12} {:>12} {:>10} {:>12} {:>9}",
        "link", "upload ms", "download ms", "rtt ms", "total ms", "max fps"
    );
    for link in builtin_profiles() {
        let est = estimate_frame_latency(frame_bytes, result_bytes, &link);
        println!(
            "{:<10} {:>12.1} {:>12.1} {:>10.1} {:>12.1} {:>9.2}",
            link.name, est.upload_ms, est.result_download_ms, est.rtt_ms, est.total_ms, est.max_fps
        );
    }

    println!("\ntransfer alone dwarfs local compute on every narrow link;");
    println!("only a link whose round trip beats {local_ms:.1} ms could break even,");
    println!("and that still ignores the remote detector's own compute time.");
    Ok(())
}
