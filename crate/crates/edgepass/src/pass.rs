use crate::error::{Error, Result};
use crate::texture::{Precision, Texture2D};
use rayon::prelude::*;
use serde::Serialize;
use std::cell::Cell;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

/// Per-pixel output of a kernel, up to four channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Texel {
    values: [f32; 4],
    len: usize,
}

impl Texel {
    pub fn one(a: f32) -> Self {
        Texel {
            values: [a, 0.0, 0.0, 0.0],
            len: 1,
        }
    }

    pub fn three(a: f32, b: f32, c: f32) -> Self {
        Texel {
            values: [a, b, c, 0.0],
            len: 3,
        }
    }

    pub fn get(&self, channel: usize) -> f32 {
        assert!(channel < self.len);
        self.values[channel]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Read access a kernel gets to its input textures. Every call counts as
/// one texel read no matter how many channels the caller consumes.
pub struct Sampler<'a> {
    inputs: &'a [&'a Texture2D],
    reads: Cell<u64>,
}

impl<'a> Sampler<'a> {
    fn new(inputs: &'a [&'a Texture2D]) -> Self {
        Sampler {
            inputs,
            reads: Cell::new(0),
        }
    }

    /// Dimensions of an input texture. Metadata, not a read.
    pub fn size(&self, input: usize) -> (usize, usize) {
        (self.inputs[input].width(), self.inputs[input].height())
    }

    /// One channel of one texel, clamp-to-edge addressing.
    pub fn sample(&self, input: usize, x: i64, y: i64, channel: usize) -> f32 {
        self.reads.set(self.reads.get() + 1);
        self.inputs[input].sample_clamped(x, y, channel)
    }

    /// Every channel of one texel, clamp-to-edge addressing. Still one read.
    pub fn fetch(&self, input: usize, x: i64, y: i64) -> Texel {
        self.reads.set(self.reads.get() + 1);
        let tex = self.inputs[input];
        let mut values = [0.0f32; 4];
        for (c, v) in values.iter_mut().enumerate().take(tex.channels()) {
            *v = tex.sample_clamped(x, y, c);
        }
        Texel {
            values,
            len: tex.channels(),
        }
    }

    fn take_reads(&self) -> u64 {
        self.reads.replace(0)
    }
}

type KernelBody = dyn Fn(usize, usize, &Sampler) -> Texel + Send + Sync;

/// One render pass: a pure per-pixel function from declared inputs to an
/// output texture stored at a fixed precision.
pub struct PassKernel {
    name: String,
    input_channels: Vec<usize>,
    output_channels: usize,
    output_precision: Precision,
    body: Box<KernelBody>,
}

impl PassKernel {
    pub fn new(
        name: impl Into<String>,
        input_channels: Vec<usize>,
        output_channels: usize,
        output_precision: Precision,
        body: impl Fn(usize, usize, &Sampler) -> Texel + Send + Sync + 'static,
    ) -> Self {
        PassKernel {
            name: name.into(),
            input_channels,
            output_channels,
            output_precision,
            body: Box::new(body),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn output_channels(&self) -> usize {
        self.output_channels
    }

    pub fn output_precision(&self) -> Precision {
        self.output_precision
    }
}

/// Mean and sample standard deviation over repetitions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn zero() -> Stat {
        Stat {
            mean: 0.0,
            std: 0.0,
        }
    }

    pub fn from_samples(samples: &[f64]) -> Stat {
        if samples.is_empty() {
            return Stat::zero();
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return Stat { mean, std: 0.0 };
        }
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stat {
            mean,
            std: var.sqrt(),
        }
    }
}

/// Cost and timing of one pass (or of the host-to-texture upload).
#[derive(Debug, Clone, Serialize)]
pub struct PassReport {
    pub name: String,
    pub time_ms: Stat,
    pub texel_reads: u64,
    pub texel_writes: u64,
}

impl PassReport {
    /// Texel reads per output pixel. Exact for every kernel here: each
    /// pixel performs the same number of fetches.
    pub fn reads_per_pixel(&self) -> u64 {
        debug_assert!(
            self.texel_writes == 0 || self.texel_reads.is_multiple_of(self.texel_writes)
        );
        self.texel_reads.checked_div(self.texel_writes).unwrap_or(0)
    }
}

/// When pass boundaries are timed: `Serialized` measures every pass with a
/// barrier after it, `Pipelined` only measures whole frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimingMode {
    Serialized,
    Pipelined,
}

impl FromStr for TimingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "serialized" => Ok(TimingMode::Serialized),
            "pipelined" => Ok(TimingMode::Pipelined),
            other => Err(Error::InvalidInput(format!(
                "unknown timing mode '{other}' (expected serialized or pipelined)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub repetitions: usize,
    pub mode: TimingMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            repetitions: 10,
            mode: TimingMode::Serialized,
        }
    }
}

/// Full pipeline cost report. `fps` is derived from un-serialized frame
/// times (plus upload when one was measured), never from the per-pass sum:
/// that sum includes a barrier per pass and only bounds the frame time
/// from above.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub mode: TimingMode,
    pub passes: Vec<PassReport>,
    pub upload: Option<PassReport>,
    pub end_to_end_ms: Stat,
    pub fps: Stat,
    #[serde(skip)]
    pub end_to_end_samples_ms: Vec<f64>,
}

impl PipelineReport {
    /// Report rows in presentation order: passes first, transfer last.
    pub fn rows(&self) -> Vec<&PassReport> {
        self.passes.iter().chain(self.upload.iter()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pass,mean_ms,std_ms,reads_per_pixel\n");
        for row in self.rows() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                row.name,
                row.time_ms.mean,
                row.time_ms.std,
                row.reads_per_pixel()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            pass: &'a str,
            mean_ms: f64,
            std_ms: f64,
            reads_per_pixel: u64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            mode: TimingMode,
            rows: Vec<Row<'a>>,
            end_to_end_ms: Stat,
            fps: Stat,
        }
        let doc = Doc {
            mode: self.mode,
            rows: self
                .rows()
                .iter()
                .map(|r| Row {
                    pass: &r.name,
                    mean_ms: r.time_ms.mean,
                    std_ms: r.time_ms.std,
                    reads_per_pixel: r.reads_per_pixel(),
                })
                .collect(),
            end_to_end_ms: self.end_to_end_ms,
            fps: self.fps,
        };
        serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
    }
}

fn elapsed_ms(t0: Instant) -> f64 {
    t0.elapsed().as_secs_f64() * 1000.0
}

pub(crate) fn fps_from_frame_times(frame_ms: &[f64]) -> Stat {
    let samples: Vec<f64> = frame_ms.iter().map(|ms| 1000.0 / ms.max(1e-6)).collect();
    Stat::from_samples(&samples)
}

/// Executes one pass over every output pixel. Rows run in parallel; results
/// are deterministic because kernels are pure and each pixel's store rounds
/// independently. On error the failure from the smallest (y, x) wins.
pub fn run_pass(
    kernel: &PassKernel,
    inputs: &[&Texture2D],
    width: usize,
    height: usize,
) -> Result<(Texture2D, PassReport)> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!(
            "pass '{}' render target is {width}x{height}; both dimensions must be nonzero",
            kernel.name
        )));
    }
    if inputs.len() != kernel.input_channels.len() {
        return Err(Error::InvalidInput(format!(
            "pass '{}' declares {} inputs, got {}",
            kernel.name,
            kernel.input_channels.len(),
            inputs.len()
        )));
    }
    for (i, (tex, &want)) in inputs.iter().zip(&kernel.input_channels).enumerate() {
        if tex.channels() != want {
            return Err(Error::InvalidInput(format!(
                "pass '{}' input {i} has {} channels, expected {want}",
                kernel.name,
                tex.channels()
            )));
        }
    }

    let oc = kernel.output_channels;
    let row_len = width * oc;
    let t0 = Instant::now();
    let mut values = vec![0.0f32; row_len * height];
    let row_reads: Vec<Result<u64>> = values
        .par_chunks_mut(row_len)
        .enumerate()
        .map(|(y, row)| {
            let sampler = Sampler::new(inputs);
            for x in 0..width {
                let texel = (kernel.body)(x, y, &sampler);
                if texel.len() != oc {
                    return Err(Error::InvalidValue(format!(
                        "pass '{}' produced {} channels at ({x}, {y}), declared {oc}",
                        kernel.name,
                        texel.len()
                    )));
                }
                for c in 0..oc {
                    row[x * oc + c] =
                        kernel
                            .output_precision
                            .quantize(texel.get(c))
                            .map_err(|e| {
                                let detail = match e {
                                    Error::InvalidValue(m) => m,
                                    other => other.to_string(),
                                };
                                Error::InvalidValue(format!(
                                    "pass '{}' at ({x}, {y}): {detail}",
                                    kernel.name
                                ))
                            })?;
                }
            }
            Ok(sampler.take_reads())
        })
        .collect();

    let mut reads = 0u64;
    for row in row_reads {
        reads += row?;
    }
    let elapsed = elapsed_ms(t0);
    let texture = Texture2D::from_texels(width, height, oc, kernel.output_precision, values)?;
    let report = PassReport {
        name: kernel.name.clone(),
        time_ms: Stat {
            mean: elapsed,
            std: 0.0,
        },
        texel_reads: reads,
        texel_writes: (width * height) as u64,
    };
    Ok((texture, report))
}

/// Runs the chain once, feeding each pass the previous output. Returns the
/// final texture, single-run reports, and the un-serialized total time.
fn run_chain(
    passes: &[PassKernel],
    source: &Texture2D,
) -> Result<(Texture2D, Vec<PassReport>, f64)> {
    let t0 = Instant::now();
    let mut reports = Vec::with_capacity(passes.len());
    let mut current: Option<Texture2D> = None;
    for pass in passes {
        let input = current.as_ref().unwrap_or(source);
        let (out, report) = run_pass(pass, &[input], input.width(), input.height())?;
        reports.push(report);
        current = Some(out);
    }
    match current {
        Some(tex) => Ok((tex, reports, elapsed_ms(t0))),
        None => Err(Error::InvalidInput("pipeline has no passes".into())),
    }
}

/// Runs the chain `options.repetitions` times and aggregates timing.
///
/// Serialized mode reports per-pass statistics from barrier-timed runs and
/// then measures the same number of un-serialized runs for the end-to-end
/// figure. Pipelined mode never times individual passes (their stats are
/// zero); only whole frames are measured.
pub fn run_pipeline(
    passes: &[PassKernel],
    source: &Texture2D,
    options: &RunOptions,
) -> Result<(Texture2D, PipelineReport)> {
    if passes.is_empty() {
        return Err(Error::InvalidInput("pipeline has no passes".into()));
    }
    if options.repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be at least 1".into()));
    }
    let reps = options.repetitions;
    let mut per_pass_samples = vec![Vec::with_capacity(reps); passes.len()];
    let mut end_to_end = Vec::with_capacity(reps);
    let mut pass_reports: Vec<PassReport> = Vec::new();
    let mut final_tex: Option<Texture2D> = None;

    match options.mode {
        TimingMode::Serialized => {
            for _ in 0..reps {
                let (tex, reports, _) = run_chain(passes, source)?;
                for (samples, report) in per_pass_samples.iter_mut().zip(&reports) {
                    samples.push(report.time_ms.mean);
                }
                if pass_reports.is_empty() {
                    pass_reports = reports;
                }
                final_tex = Some(tex);
            }
            for _ in 0..reps {
                let (_, _, total) = run_chain(passes, source)?;
                end_to_end.push(total);
            }
            for (report, samples) in pass_reports.iter_mut().zip(&per_pass_samples) {
                report.time_ms = Stat::from_samples(samples);
            }
        }
        TimingMode::Pipelined => {
            for _ in 0..reps {
                let (tex, reports, total) = run_chain(passes, source)?;
                end_to_end.push(total);
                if pass_reports.is_empty() {
                    pass_reports = reports;
                }
                final_tex = Some(tex);
            }
            for report in &mut pass_reports {
                report.time_ms = Stat::zero();
            }
        }
    }

    let end_to_end_stat = Stat::from_samples(&end_to_end);
    let fps = fps_from_frame_times(&end_to_end);
    Ok((
        final_tex.expect("repetitions >= 1"),
        PipelineReport {
            mode: options.mode,
            passes: pass_reports,
            upload: None,
            end_to_end_ms: end_to_end_stat,
            fps,
            end_to_end_samples_ms: end_to_end,
        },
    ))
}

/// Runs the chain once, keeping every intermediate texture.
pub fn run_pipeline_collect(
    passes: &[PassKernel],
    source: &Texture2D,
) -> Result<Vec<(Texture2D, PassReport)>> {
    if passes.is_empty() {
        return Err(Error::InvalidInput("pipeline has no passes".into()));
    }
    let mut stages: Vec<(Texture2D, PassReport)> = Vec::with_capacity(passes.len());
    for pass in passes {
        let input = stages.last().map(|(t, _)| t).unwrap_or(source);
        let (out, report) = run_pass(pass, &[input], input.width(), input.height())?;
        stages.push((out, report));
    }
    Ok(stages)
}
