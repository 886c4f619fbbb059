//! Thin command surface over the library. All detection, timing, and
//! comparison logic lives in `edgepass`; this file parses flags, moves
//! bytes, and formats output. Exit codes: 0 success, 1 internal error,
//! 2 input error.

use clap::{Args, Parser, Subcommand};
use edgepass::canny::PASS_GRADIENT;
use edgepass::pass::run_pipeline_collect;
use edgepass::{
    build_pipeline, builtin_profile, builtin_profiles, compare_with_classic, detect_edges_with,
    estimate_frame_latency, pnm, upload, CannyParams, Error, KernelSize, LinkProfile,
    MagnitudeMode, OffloadEstimate, PixelLayout, Precision, Result, RunOptions, TimingMode,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "edgepass",
    version,
    about = "Branch-free multi-pass edge detection with render-pass cost accounting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CannyArgs {
    /// Smoothing kernel size (3 or 5)
    #[arg(long, default_value_t = 3)]
    kernel: u32,
    /// Lower hysteresis threshold, normalized
    #[arg(long, default_value_t = 0.1)]
    low: f32,
    /// Upper hysteresis threshold, normalized
    #[arg(long, default_value_t = 0.25)]
    high: f32,
    /// Gradient magnitude formula: exact or manhattan
    #[arg(long, default_value = "exact")]
    magnitude: MagnitudeMode,
    /// Storage precision for pass outputs: lowp, mediump, or highp
    #[arg(long, default_value = "mediump")]
    precision: Precision,
}

impl CannyArgs {
    fn params(&self) -> Result<CannyParams> {
        CannyParams::new(
            KernelSize::from_u32(self.kernel)?,
            self.low,
            self.high,
            self.magnitude,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Detect edges in a PNM image and write the edge map as P5
    Detect {
        /// Input image (P5 greyscale or P6 RGB)
        input: PathBuf,
        /// Output edge map path
        output: PathBuf,
        #[command(flatten)]
        canny: CannyArgs,
    },
    /// Time every pass over repeated frames and emit a cost report
    Bench {
        /// Input image (P5 greyscale or P6 RGB)
        input: PathBuf,
        /// Number of frames to run
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        frames: u64,
        /// Timing mode: serialized (barrier per pass) or pipelined
        #[arg(long, default_value = "serialized")]
        mode: TimingMode,
        /// Report format: csv or json
        #[arg(long, default_value = "csv")]
        report: ReportFormat,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        canny: CannyArgs,
    },
    /// Score pipeline edges against a textbook detector on the same image
    Compare {
        /// Input image (P5 greyscale or P6 RGB)
        input: PathBuf,
        #[command(flatten)]
        canny: CannyArgs,
    },
    /// Estimate per-frame latency of sending frames to a remote detector
    Offload {
        /// Frame payload in bytes
        frame_bytes: u64,
        /// Result payload returned per frame, in bytes
        #[arg(long, default_value_t = 0)]
        result_bytes: u64,
        /// Built-in link: bluetooth, 3g, or lte
        #[arg(long)]
        link: Option<String>,
        /// Override uplink rate, bits per second
        #[arg(long)]
        uplink: Option<f64>,
        /// Override downlink rate, bits per second
        #[arg(long)]
        downlink: Option<f64>,
        /// Override round-trip time, milliseconds
        #[arg(long)]
        rtt: Option<f64>,
    },
    /// Write every pass's output texture as a P5 file for inspection
    Dump {
        /// Input image (P5 greyscale or P6 RGB)
        input: PathBuf,
        /// Directory for the per-pass files (created if missing)
        outdir: PathBuf,
        #[command(flatten)]
        canny: CannyArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidInput(format!(
                "unknown report format '{other}' (expected csv or json)"
            ))),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::Pnm(_) => ExitCode::from(2),
                Error::InvalidValue(_) | Error::Io(_) => ExitCode::from(1),
            }
        }
    }
}

/// Reading the input is an input error even when the filesystem, not the
/// parser, rejects it.
fn read_input(path: &Path) -> Result<edgepass::ImageBuffer> {
    pnm::read_image(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidInput(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Detect {
            input,
            output,
            canny,
        } => cmd_detect(&input, &output, &canny),
        Command::Bench {
            input,
            frames,
            mode,
            report,
            out,
            canny,
        } => cmd_bench(
            &input,
            frames as usize,
            mode,
            report,
            out.as_deref(),
            &canny,
        ),
        Command::Compare { input, canny } => cmd_compare(&input, &canny),
        Command::Offload {
            frame_bytes,
            result_bytes,
            link,
            uplink,
            downlink,
            rtt,
        } => cmd_offload(
            frame_bytes,
            result_bytes,
            link.as_deref(),
            uplink,
            downlink,
            rtt,
        ),
        Command::Dump {
            input,
            outdir,
            canny,
        } => cmd_dump(&input, &outdir, &canny),
    }
}

fn cmd_detect(input: &Path, output: &Path, canny: &CannyArgs) -> Result<()> {
    let image = read_input(input)?;
    let detection = detect_edges_with(
        &image,
        &canny.params()?,
        canny.precision,
        &RunOptions {
            repetitions: 1,
            mode: TimingMode::Serialized,
        },
    )?;
    pnm::write_image(output, &detection.edges)?;
    println!(
        "{}x{}, {} passes, {:.3} ms",
        image.width(),
        image.height(),
        detection.report.passes.len(),
        detection.report.end_to_end_ms.mean
            + detection
                .report
                .upload
                .as_ref()
                .map_or(0.0, |u| u.time_ms.mean)
    );
    Ok(())
}

fn cmd_bench(
    input: &Path,
    frames: usize,
    mode: TimingMode,
    format: ReportFormat,
    out: Option<&Path>,
    canny: &CannyArgs,
) -> Result<()> {
    let image = read_input(input)?;
    let detection = detect_edges_with(
        &image,
        &canny.params()?,
        canny.precision,
        &RunOptions {
            repetitions: frames,
            mode,
        },
    )?;
    let report = &detection.report;
    let body = match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json(),
    };
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    eprintln!(
        "end-to-end: {:.3} +/- {:.3} ms over {frames} frame(s), {:.2} +/- {:.2} fps",
        report.end_to_end_ms.mean, report.end_to_end_ms.std, report.fps.mean, report.fps.std
    );
    if mode == TimingMode::Serialized {
        eprintln!(
            "note: serialized pass times each include a barrier; their sum is an upper bound on the frame time"
        );
    }
    Ok(())
}

fn cmd_compare(input: &Path, canny: &CannyArgs) -> Result<()> {
    let image = read_input(input)?;
    let cmp = compare_with_classic(&image, &canny.params()?, canny.precision)?;
    println!(
        "strong: {}  weak: {}  suppressed: {}",
        cmp.strong, cmp.weak, cmp.suppressed
    );
    println!("precision: {:.4}", cmp.similarity.precision);
    println!("recall:    {:.4}", cmp.similarity.recall);
    println!("f1:        {:.4}", cmp.similarity.f1);
    if cmp.similarity.both_empty() {
        println!("note: neither result found edges; scores are 1.0 by convention");
    }
    Ok(())
}

fn print_estimate(link: &LinkProfile, est: &OffloadEstimate) {
    println!(
        "link: {} (uplink {} b/s, downlink {} b/s, rtt {} ms)",
        link.name, link.uplink_bps, link.downlink_bps, link.rtt_ms
    );
    println!("  upload:   {:.3} ms", est.upload_ms);
    println!("  download: {:.3} ms", est.result_download_ms);
    println!("  rtt:      {:.3} ms", est.rtt_ms);
    println!("  total:    {:.3} ms", est.total_ms);
    if est.max_fps.is_finite() {
        println!("  max rate: {:.3} fps", est.max_fps);
    } else {
        println!("  max rate: unbounded");
    }
}

fn cmd_offload(
    frame_bytes: u64,
    result_bytes: u64,
    link: Option<&str>,
    uplink: Option<f64>,
    downlink: Option<f64>,
    rtt: Option<f64>,
) -> Result<()> {
    let overridden = uplink.is_some() || downlink.is_some() || rtt.is_some();
    let profile = match (link, overridden) {
        (Some(name), _) => {
            let base = builtin_profile(name)?;
            Some(LinkProfile::new(
                base.name,
                uplink.unwrap_or(base.uplink_bps),
                downlink.unwrap_or(base.downlink_bps),
                rtt.unwrap_or(base.rtt_ms),
            )?)
        }
        (None, true) => {
            let (Some(up), Some(down)) = (uplink, downlink) else {
                return Err(Error::InvalidInput(
                    "a custom link needs both --uplink and --downlink (or name a built-in with --link)"
                        .into(),
                ));
            };
            Some(LinkProfile::new("custom", up, down, rtt.unwrap_or(0.0))?)
        }
        (None, false) => None,
    };
    match profile {
        Some(link) => {
            let est = estimate_frame_latency(frame_bytes, result_bytes, &link);
            print_estimate(&link, &est);
        }
        None => {
            for link in builtin_profiles() {
                let est = estimate_frame_latency(frame_bytes, result_bytes, &link);
                print_estimate(&link, &est);
            }
        }
    }
    Ok(())
}

/// File-safe lowercase name: "Non-max Sup" -> "non_max_sup".
fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

/// Texture to viewable bytes, one vertically stacked plane per channel.
/// Direction channels hold values in [-1, 1]; `biased` remaps those planes
/// through (v + 1) / 2 so they survive the byte conversion.
fn texture_to_planes(tex: &edgepass::Texture2D, biased: &[usize]) -> edgepass::ImageBuffer {
    let (w, h, ch) = (tex.width(), tex.height(), tex.channels());
    let mut bytes = Vec::with_capacity(w * h * ch);
    for c in 0..ch {
        for y in 0..h {
            for x in 0..w {
                let v = tex.value(x, y, c);
                let v = if biased.contains(&c) {
                    (v + 1.0) / 2.0
                } else {
                    v
                };
                bytes.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
    }
    edgepass::ImageBuffer::new(w, h * ch, PixelLayout::Grey8, bytes)
        .expect("plane dimensions are valid by construction")
}

fn cmd_dump(input: &Path, outdir: &Path, canny: &CannyArgs) -> Result<()> {
    let image = read_input(input)?;
    let params = canny.params()?;
    std::fs::create_dir_all(outdir)?;

    let texture = upload(&image, canny.precision)?;
    let passes = build_pipeline(image.layout(), &params, canny.precision)?;
    let stages = run_pipeline_collect(&passes, &texture)?;

    let mut written = 0usize;
    let mut write_stage = |index: usize, name: &str, img: &edgepass::ImageBuffer| -> Result<()> {
        let path = outdir.join(format!("{index:02}_{}.pgm", slug(name)));
        pnm::write_image(&path, img)?;
        written += 1;
        Ok(())
    };
    write_stage(0, "source", &texture_to_planes(&texture, &[]))?;
    for (i, (tex, report)) in stages.iter().enumerate() {
        let biased: &[usize] = if report.name == PASS_GRADIENT {
            &[1, 2]
        } else {
            &[]
        };
        write_stage(i + 1, &report.name, &texture_to_planes(tex, biased))?;
    }
    println!("wrote {written} files to {}", outdir.display());
    Ok(())
}
