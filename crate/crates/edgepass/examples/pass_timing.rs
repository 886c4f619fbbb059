//! Per-pass cost accounting on a VGA frame: serialized timing (a barrier
//! after every pass) against pipelined timing (whole frames only), plus
//! the read-per-pixel column that explains why the gradient and weak
//! pixel passes dominate.
//!
//!     cargo run --release --example pass_timing

use edgepass::{detect_edges_with, synth, CannyParams, Precision, RunOptions, TimingMode};

fn main() -> edgepass::Result<()> {
    let image = synth::noise(640, 480, 5)?;
    let params = CannyParams::default();

    let serialized = detect_edges_with(
        &image,
        &params,
        Precision::Mediump,
        &RunOptions {
            repetitions: 20,
            mode: TimingMode::Serialized,
        },
    )?;
    println!("serialized (barrier per pass), 20 frames of 640x480:");
    print!("{}", serialized.report.to_csv());
    let pass_sum: f64 = serialized
        .report
        .passes
        .iter()
        .map(|p| p.time_ms.mean)
        .sum();
    println!(
        "pass sum {:.2} ms >= frame {:.2} ms (the sum pays one barrier per pass)",
        pass_sum, serialized.report.end_to_end_ms.mean
    );

    let pipelined = detect_edges_with(
        &image,
        &params,
        Precision::Mediump,
        &RunOptions {
            repetitions: 20,
            mode: TimingMode::Pipelined,
        },
    )?;
    println!(
        "\npipelined: frame {:.2} +/- {:.2} ms, {:.1} +/- {:.1} fps (per-pass rows untimed)",
        pipelined.report.end_to_end_ms.mean,
        pipelined.report.end_to_end_ms.std,
        pipelined.report.fps.mean,
        pipelined.report.fps.std
    );
    Ok(())
}
