use crate::error::{Error, Result};
use crate::pass::{
    run_pipeline, PassKernel, PassReport, PipelineReport, RunOptions, Sampler, Stat, Texel,
};
use crate::texture::{upload, ImageBuffer, PixelLayout, Precision, Texture2D};
use std::str::FromStr;
use std::time::Instant;

pub const PASS_GREYSCALE: &str = "Greyscale";
pub const PASS_GAUSSIAN_X: &str = "Gaussian X";
pub const PASS_GAUSSIAN_Y: &str = "Gaussian Y";
pub const PASS_GRADIENT: &str = "Gradient";
pub const PASS_NMS: &str = "Non-max Sup";
pub const PASS_WEAK: &str = "Weak Pixels";
/// Report label for the host-to-texture transfer of a new frame.
pub const UPLOAD_LABEL: &str = "Reload texture";

pub const LUMA_R: f32 = 0.299;
pub const LUMA_G: f32 = 0.587;
pub const LUMA_B: f32 = 0.114;

/// BT.601 luma. Fixed evaluation order; the weights sum to exactly 1.0f32
/// in this order, so white maps to 1.0 and constant images stay constant.
#[inline]
pub fn rgb_to_grey(r: f32, g: f32, b: f32) -> f32 {
    (LUMA_R * r + LUMA_G * g) + LUMA_B * b
}

/// Smoothing kernel width. The taps are normalized binomial coefficients,
/// exact in both fixed point and binary16.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSize {
    Three,
    Five,
}

impl KernelSize {
    pub fn from_u32(n: u32) -> Result<Self> {
        match n {
            3 => Ok(KernelSize::Three),
            5 => Ok(KernelSize::Five),
            other => Err(Error::InvalidInput(format!(
                "kernel size must be 3 or 5, got {other}"
            ))),
        }
    }

    pub fn taps(self) -> &'static [f32] {
        match self {
            KernelSize::Three => &[0.25, 0.5, 0.25],
            KernelSize::Five => &[0.0625, 0.25, 0.375, 0.25, 0.0625],
        }
    }

    pub fn len(self) -> usize {
        self.taps().len()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    fn radius(self) -> i64 {
        (self.len() / 2) as i64
    }
}

/// How gradient magnitude is computed from (gx, gy).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnitudeMode {
    /// sqrt(gx^2 + gy^2)
    Exact,
    /// |gx| + |gy|
    Manhattan,
}

impl FromStr for MagnitudeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MagnitudeMode::Exact),
            "manhattan" => Ok(MagnitudeMode::Manhattan),
            other => Err(Error::InvalidInput(format!(
                "unknown magnitude mode '{other}' (expected exact or manhattan)"
            ))),
        }
    }
}

#[inline]
pub(crate) fn magnitude_of(mode: MagnitudeMode, gx: f32, gy: f32) -> f32 {
    match mode {
        MagnitudeMode::Exact => (gx * gx + gy * gy).sqrt(),
        MagnitudeMode::Manhattan => gx.abs() + gy.abs(),
    }
}

/// Detection parameters. Construction enforces 0 < low < high < 1.
#[derive(Debug, Clone, Copy)]
pub struct CannyParams {
    kernel: KernelSize,
    low: f32,
    high: f32,
    magnitude: MagnitudeMode,
}

impl CannyParams {
    pub fn new(kernel: KernelSize, low: f32, high: f32, magnitude: MagnitudeMode) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && 0.0 < low && low < high && high < 1.0) {
            return Err(Error::InvalidInput(format!(
                "thresholds must satisfy 0 < low < high < 1, got low={low}, high={high}"
            )));
        }
        Ok(CannyParams {
            kernel,
            low,
            high,
            magnitude,
        })
    }

    pub fn kernel(&self) -> KernelSize {
        self.kernel
    }

    pub fn low(&self) -> f32 {
        self.low
    }

    pub fn high(&self) -> f32 {
        self.high
    }

    pub fn magnitude(&self) -> MagnitudeMode {
        self.magnitude
    }
}

impl Default for CannyParams {
    /// Kernel 3, low 0.1, high 0.25 (ratio 2.5:1), exact magnitude.
    fn default() -> Self {
        CannyParams {
            kernel: KernelSize::Three,
            low: 0.1,
            high: 0.25,
            magnitude: MagnitudeMode::Exact,
        }
    }
}

/// One of the eight primary directions; never (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub dx: i32,
    pub dy: i32,
}

impl std::ops::Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction {
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

// cos(pi/8), sin(pi/8)
const ROT_COS: f32 = 0.923_879_5;
const ROT_SIN: f32 = 0.382_683_43;

#[inline]
fn ge0(x: f32) -> f32 {
    (x >= 0.0) as i32 as f32
}

#[inline]
fn gt0(x: f32) -> f32 {
    (x > 0.0) as i32 as f32
}

#[inline]
fn le0(x: f32) -> f32 {
    (x <= 0.0) as i32 as f32
}

#[inline]
fn lt0(x: f32) -> f32 {
    (x < 0.0) as i32 as f32
}

/// step(edge, x): 0.0 below `edge`, 1.0 at or above it.
#[inline]
pub(crate) fn step(edge: f32, x: f32) -> f32 {
    (x >= edge) as i32 as f32
}

/// Cubic ramp t^2(3-2t) with t = clamp((x-a)/(b-a), 0, 1).
#[inline]
pub(crate) fn smoothstep(a: f32, b: f32, x: f32) -> f32 {
    let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Rotate-and-square the gradient, then pick the sector pair from the
/// quadrant of the doubled angle. Shared by the shader-style classifier
/// and its conditional twin so both see identical (zx, zy, sign) inputs.
#[inline]
pub(crate) fn doubled_angle_vector(gx: f32, gy: f32) -> (f32, f32) {
    // Rotating by +22.5 deg moves every sector boundary onto an axis of
    // the doubled angle, turning "nearest of eight" into sign tests.
    let a = ROT_COS * gx - ROT_SIN * gy;
    let b = ROT_SIN * gx + ROT_COS * gy;
    (a * a - b * b, 2.0 * a * b)
}

/// Branch-free form of `classify_direction`, returning the direction as
/// floats in {-1.0, 0.0, 1.0}. Decisions are made with step/sign
/// arithmetic only; there is no data-dependent control flow.
#[inline]
pub(crate) fn classify_direction_f(gx: f32, gy: f32) -> (f32, f32) {
    let (zx, zy) = doubled_angle_vector(gx, gy);
    // Quadrant indicators for the doubled angle, half-open so that every
    // sector boundary resolves counterclockwise. Exactly one is 1 unless
    // z is the zero vector.
    let q0 = gt0(zx) * ge0(zy); // doubled angle in [0, 90)   -> axis pair (+-1, 0)
    let q1 = le0(zx) * gt0(zy); // [90, 180)  -> diagonal pair (+-1, +-1)
    let q2 = lt0(zx) * le0(zy); // [180, 270) -> axis pair (0, +-1)
    let q3 = ge0(zx) * lt0(zy); // [270, 360) -> diagonal pair (-+1, +-1)
    let sx = 2.0 * ge0(gx) - 1.0;
    let sy = 2.0 * ge0(gy) - 1.0;
    // Zero gradient: all quadrant terms vanish and the residual picks (1, 0).
    let zero = 1.0 - q0 - q1 - q2 - q3;
    let dx = q0 * sx + q1 * sx - q3 * sy + zero;
    // The trailing + 0.0 flushes a negative zero from all-suppressed terms.
    let dy = q1 * sx + q2 * sy + q3 * sy + 0.0;
    (dx, dy)
}

/// Classifies a gradient vector to the nearest of the eight primary
/// directions. Sector boundaries (22.5 deg + k*45 deg) belong to the
/// counterclockwise sector; (0, 0) maps to (1, 0) by convention (its zero
/// magnitude never survives suppression). Intended for gradients from the
/// normalized Sobel operator (components in [-1, 1]); magnitudes beyond
/// about 1e18 overflow the angle-doubling step.
pub fn classify_direction(gx: f32, gy: f32) -> Direction {
    let (dx, dy) = classify_direction_f(gx, gy);
    Direction {
        dx: dx as i32,
        dy: dy as i32,
    }
}

pub fn greyscale_kernel(precision: Precision) -> PassKernel {
    PassKernel::new(PASS_GREYSCALE, vec![3], 1, precision, |x, y, s| {
        let t = s.fetch(0, x as i64, y as i64);
        Texel::one(rgb_to_grey(t.get(0), t.get(1), t.get(2)))
    })
}

fn gaussian_kernel(
    name: &'static str,
    size: KernelSize,
    axis_x: bool,
    precision: Precision,
) -> PassKernel {
    let taps = size.taps();
    let radius = size.radius();
    PassKernel::new(name, vec![1], 1, precision, move |x, y, s| {
        let (xi, yi) = (x as i64, y as i64);
        let mut acc = 0.0f32;
        for (i, &w) in taps.iter().enumerate() {
            let o = i as i64 - radius;
            let v = if axis_x {
                s.sample(0, xi + o, yi, 0)
            } else {
                s.sample(0, xi, yi + o, 0)
            };
            acc += w * v;
        }
        Texel::one(acc)
    })
}

pub fn gaussian_x_kernel(size: KernelSize, precision: Precision) -> PassKernel {
    gaussian_kernel(PASS_GAUSSIAN_X, size, true, precision)
}

pub fn gaussian_y_kernel(size: KernelSize, precision: Precision) -> PassKernel {
    gaussian_kernel(PASS_GAUSSIAN_Y, size, false, precision)
}

/// Fetches the full 3x3 window around (x, y), row-major, top-left first.
/// Nine reads even where a weight is zero: the shader fetches the whole
/// window, and the read counts must reflect that.
#[inline]
pub(crate) fn sample_window3(s: &Sampler<'_>, x: usize, y: usize) -> [f32; 9] {
    let (xi, yi) = (x as i64, y as i64);
    let mut w = [0.0f32; 9];
    let mut k = 0;
    for j in -1..=1 {
        for i in -1..=1 {
            w[k] = s.sample(0, xi + i, yi + j, 0);
            k += 1;
        }
    }
    w
}

/// Normalized Sobel on a row-major 3x3 window; +y points down the raster.
/// The 1/4 scale keeps gx, gy in [-1, 1] for inputs in [0, 1].
#[inline]
pub(crate) fn sobel_gradients(w: &[f32; 9]) -> (f32, f32) {
    let gx = ((w[2] - w[0]) + 2.0 * (w[5] - w[3]) + (w[8] - w[6])) * 0.25;
    let gy = ((w[6] - w[0]) + 2.0 * (w[7] - w[1]) + (w[8] - w[2])) * 0.25;
    (gx, gy)
}

/// Output channels: [magnitude, dx, dy] with dx, dy in {-1, 0, 1}.
pub fn gradient_kernel(mode: MagnitudeMode, precision: Precision) -> PassKernel {
    PassKernel::new(PASS_GRADIENT, vec![1], 3, precision, move |x, y, s| {
        let w = sample_window3(s, x, y);
        let (gx, gy) = sobel_gradients(&w);
        let m = magnitude_of(mode, gx, gy);
        let (dx, dy) = classify_direction_f(gx, gy);
        Texel::three(m, dx, dy)
    })
}

/// Suppression and double threshold in one pass: keep the magnitude only
/// if neither neighbor along the classified direction beats it (ties
/// keep), then map the survivor through smoothstep(low, high, s). Three
/// reads: the center texel and the two dependent neighbor fetches.
pub fn nms_threshold_kernel(low: f32, high: f32, precision: Precision) -> Result<PassKernel> {
    if !(low.is_finite() && high.is_finite() && low < high) {
        return Err(Error::InvalidInput(format!(
            "thresholds must satisfy low < high, got low={low}, high={high}"
        )));
    }
    Ok(PassKernel::new(
        PASS_NMS,
        vec![3],
        1,
        precision,
        move |x, y, s| {
            let (xi, yi) = (x as i64, y as i64);
            let center = s.fetch(0, xi, yi);
            let m = center.get(0);
            let dx = center.get(1).round() as i64;
            let dy = center.get(2).round() as i64;
            let n1 = s.sample(0, xi + dx, yi + dy, 0);
            let n2 = s.sample(0, xi - dx, yi - dy, 0);
            let survivor = m * step(n1.max(n2), m);
            Texel::one(smoothstep(low, high, survivor))
        },
    ))
}

/// Keeps a strength only when the 3x3 neighborhood sum reaches 2.0
/// (inclusive), implementing single-step hysteresis: a weak pixel needs
/// enough combined evidence around it, and an isolated strong pixel
/// (sum < 2.0) is dropped as speckle. Nine reads.
pub fn weak_pixel_kernel(precision: Precision) -> PassKernel {
    PassKernel::new(PASS_WEAK, vec![1], 1, precision, |x, y, s| {
        let w = sample_window3(s, x, y);
        let sum: f32 = w.iter().sum();
        Texel::one(w[4] * step(2.0, sum))
    })
}

/// The pass chain for one frame: an RGB source prepends a greyscale
/// conversion to the five detection passes.
pub fn build_pipeline(
    layout: PixelLayout,
    params: &CannyParams,
    precision: Precision,
) -> Result<Vec<PassKernel>> {
    let mut passes = Vec::with_capacity(6);
    if layout == PixelLayout::Rgb888 {
        passes.push(greyscale_kernel(precision));
    }
    passes.push(gaussian_x_kernel(params.kernel(), precision));
    passes.push(gaussian_y_kernel(params.kernel(), precision));
    passes.push(gradient_kernel(params.magnitude(), precision));
    passes.push(nms_threshold_kernel(
        params.low(),
        params.high(),
        precision,
    )?);
    passes.push(weak_pixel_kernel(precision));
    Ok(passes)
}

/// Result of an end-to-end detection run.
#[derive(Debug)]
pub struct Detection {
    /// Final strengths mapped to bytes via round(255 * s); nonzero = edge.
    pub edges: ImageBuffer,
    /// The last pass's output texture (strengths in [0, 1]).
    pub strengths: Texture2D,
    pub report: PipelineReport,
}

/// Runs the full detector at mediump storage, single repetition.
pub fn detect_edges(image: &ImageBuffer, params: &CannyParams) -> Result<Detection> {
    detect_edges_with(
        image,
        params,
        Precision::Mediump,
        &RunOptions {
            repetitions: 1,
            mode: crate::pass::TimingMode::Serialized,
        },
    )
}

/// Runs the full detector: timed upload, then the pass chain under
/// `options`. The report carries the upload as its transfer row, and fps
/// counts upload plus un-serialized pipeline time per frame.
pub fn detect_edges_with(
    image: &ImageBuffer,
    params: &CannyParams,
    precision: Precision,
    options: &RunOptions,
) -> Result<Detection> {
    if options.repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be at least 1".into()));
    }
    let mut upload_ms = Vec::with_capacity(options.repetitions);
    let mut texture = None;
    for _ in 0..options.repetitions {
        let t0 = Instant::now();
        texture = Some(upload(image, precision)?);
        upload_ms.push(t0.elapsed().as_secs_f64() * 1000.0);
    }
    let texture = texture.expect("repetitions >= 1");

    let passes = build_pipeline(image.layout(), params, precision)?;
    let (strengths, mut report) = run_pipeline(&passes, &texture, options)?;

    report.upload = Some(PassReport {
        name: UPLOAD_LABEL.to_string(),
        time_ms: Stat::from_samples(&upload_ms),
        texel_reads: 0,
        texel_writes: (image.width() * image.height()) as u64,
    });
    let frame_ms: Vec<f64> = report
        .end_to_end_samples_ms
        .iter()
        .zip(&upload_ms)
        .map(|(pipeline, up)| pipeline + up)
        .collect();
    report.fps = crate::pass::fps_from_frame_times(&frame_ms);

    let bytes: Vec<u8> = strengths
        .texels()
        .iter()
        .map(|&s| (s * 255.0).round() as u8)
        .collect();
    let edges = ImageBuffer::new(
        strengths.width(),
        strengths.height(),
        PixelLayout::Grey8,
        bytes,
    )?;
    Ok(Detection {
        edges,
        strengths,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pass::run_pass;
    use proptest::prelude::*;

    #[test]
    fn luma_weights_sum_to_one_exactly() {
        assert_eq!(rgb_to_grey(1.0, 1.0, 1.0), 1.0);
        assert_eq!(rgb_to_grey(0.0, 0.0, 0.0), 0.0);
        assert_eq!(rgb_to_grey(1.0, 0.0, 0.0), LUMA_R);
    }

    #[test]
    fn gaussian_taps_are_normalized_binomials() {
        assert_eq!(KernelSize::Three.taps().iter().sum::<f32>(), 1.0);
        assert_eq!(KernelSize::Five.taps().iter().sum::<f32>(), 1.0);
        assert_eq!(KernelSize::from_u32(3).unwrap(), KernelSize::Three);
        assert!(KernelSize::from_u32(4).is_err());
        assert!(KernelSize::from_u32(7).is_err());
    }

    #[test]
    fn classifies_sector_centers() {
        let cases = [
            ((1.0, 0.0), (1, 0)),
            ((1.0, 1.0), (1, 1)),
            ((0.0, 1.0), (0, 1)),
            ((-1.0, 1.0), (-1, 1)),
            ((-1.0, 0.0), (-1, 0)),
            ((-1.0, -1.0), (-1, -1)),
            ((0.0, -1.0), (0, -1)),
            ((1.0, -1.0), (1, -1)),
        ];
        for ((gx, gy), (dx, dy)) in cases {
            let d = classify_direction(gx, gy);
            assert_eq!((d.dx, d.dy), (dx, dy), "({gx}, {gy})");
        }
    }

    #[test]
    fn classifies_off_center_vectors() {
        // ~110 degrees is nearest the 90-degree direction.
        let d = classify_direction(-0.342, 0.940);
        assert_eq!((d.dx, d.dy), (0, 1));
        // ~42 degrees is nearest 45.
        let d = classify_direction(1.0, 0.9);
        assert_eq!((d.dx, d.dy), (1, 1));
        // ~174 degrees is nearest 180.
        let d = classify_direction(-1.0, 0.1);
        assert_eq!((d.dx, d.dy), (-1, 0));
    }

    #[test]
    fn zero_gradient_maps_to_plus_x() {
        let d = classify_direction(0.0, 0.0);
        assert_eq!((d.dx, d.dy), (1, 0));
        let d = classify_direction(-0.0, 0.0);
        assert_eq!((d.dx, d.dy), (1, 0));
    }

    #[test]
    fn direction_floats_are_clean_signed_units() {
        // No negative zero may leak into the stored direction channels.
        for (gx, gy) in [
            (0.7, 0.1),
            (-0.7, 0.1),
            (0.1, -0.9),
            (0.0, 0.0),
            (-0.5, -0.5),
        ] {
            let (dx, dy) = classify_direction_f(gx, gy);
            assert!([-1.0, 0.0, 1.0].contains(&dx));
            assert!([-1.0, 0.0, 1.0].contains(&dy));
            assert_ne!(dx.to_bits(), (-0.0f32).to_bits());
            assert_ne!(dy.to_bits(), (-0.0f32).to_bits());
        }
    }

    #[test]
    fn smoothstep_matches_hand_values() {
        // Dyadic interval: the midpoint result is exact.
        assert_eq!(smoothstep(0.25, 0.75, 0.5), 0.5);
        assert!((smoothstep(0.2, 0.4, 0.3) - 0.5).abs() < 1e-6);
        assert_eq!(smoothstep(0.2, 0.4, 0.1), 0.0);
        assert_eq!(smoothstep(0.2, 0.4, 0.2), 0.0);
        assert_eq!(smoothstep(0.2, 0.4, 0.4), 1.0);
        assert_eq!(smoothstep(0.2, 0.4, 0.9), 1.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CannyParams::new(KernelSize::Three, 0.3, 0.2, MagnitudeMode::Exact).is_err());
        assert!(CannyParams::new(KernelSize::Three, 0.2, 0.2, MagnitudeMode::Exact).is_err());
        assert!(CannyParams::new(KernelSize::Three, 0.0, 0.2, MagnitudeMode::Exact).is_err());
        assert!(CannyParams::new(KernelSize::Three, 0.1, 1.0, MagnitudeMode::Exact).is_err());
        assert!(CannyParams::new(KernelSize::Three, f32::NAN, 0.5, MagnitudeMode::Exact).is_err());
        assert!(nms_threshold_kernel(0.4, 0.2, Precision::Highp).is_err());
    }

    fn impulse_texture(w: usize, h: usize, x: usize, y: usize) -> Texture2D {
        let mut v = vec![0.0f32; w * h];
        v[y * w + x] = 1.0;
        Texture2D::from_texels(w, h, 1, Precision::Highp, v).unwrap()
    }

    #[test]
    fn gaussian_impulse_response_is_the_kernel() {
        let src = impulse_texture(7, 1, 3, 0);
        let k = gaussian_x_kernel(KernelSize::Three, Precision::Highp);
        let (out, report) = run_pass(&k, &[&src], 7, 1).unwrap();
        let row: Vec<f32> = (0..7).map(|x| out.value(x, 0, 0)).collect();
        assert_eq!(row, vec![0.0, 0.0, 0.25, 0.5, 0.25, 0.0, 0.0]);
        assert_eq!(report.reads_per_pixel(), 3);
    }

    #[test]
    fn gaussian_clamp_duplicates_the_border_texel() {
        // Impulse at x=0: the clamped left tap re-reads x=0.
        let src = impulse_texture(5, 1, 0, 0);
        let k = gaussian_x_kernel(KernelSize::Three, Precision::Highp);
        let (out, _) = run_pass(&k, &[&src], 5, 1).unwrap();
        assert_eq!(out.value(0, 0, 0), 0.75);
        assert_eq!(out.value(1, 0, 0), 0.25);
        assert_eq!(out.value(2, 0, 0), 0.0);
    }

    #[test]
    fn five_tap_kernel_reads_five_texels() {
        let src = impulse_texture(9, 1, 4, 0);
        let k = gaussian_x_kernel(KernelSize::Five, Precision::Highp);
        let (out, report) = run_pass(&k, &[&src], 9, 1).unwrap();
        assert_eq!(report.reads_per_pixel(), 5);
        assert_eq!(out.value(4, 0, 0), 0.375);
        assert_eq!(out.value(2, 0, 0), 0.0625);
    }

    fn step_texture(w: usize, h: usize, edge_x: usize) -> Texture2D {
        let v: Vec<f32> = (0..w * h)
            .map(|i| if i % w >= edge_x { 1.0 } else { 0.0 })
            .collect();
        Texture2D::from_texels(w, h, 1, Precision::Highp, v).unwrap()
    }

    #[test]
    fn gradient_on_ideal_step_is_unit_magnitude_plus_x() {
        let src = step_texture(8, 8, 4);
        let k = gradient_kernel(MagnitudeMode::Exact, Precision::Highp);
        let (out, report) = run_pass(&k, &[&src], 8, 8).unwrap();
        assert_eq!(report.reads_per_pixel(), 9);
        // Pixels adjacent to the step see the full (1+2+1)/4 = 1 response.
        for y in 0..8 {
            assert_eq!(out.value(3, y, 0), 1.0, "magnitude at (3, {y})");
            assert_eq!(out.value(4, y, 0), 1.0);
            assert_eq!(out.value(3, y, 1), 1.0, "dx at (3, {y})");
            assert_eq!(out.value(3, y, 2), 0.0, "dy at (3, {y})");
            assert_eq!(out.value(0, y, 0), 0.0);
            assert_eq!(out.value(7, y, 0), 0.0);
        }
    }

    #[test]
    fn gradient_of_constant_image_is_zero() {
        let src = Texture2D::filled(6, 6, 1, Precision::Highp, 0.7).unwrap();
        let k = gradient_kernel(MagnitudeMode::Exact, Precision::Highp);
        let (out, _) = run_pass(&k, &[&src], 6, 6).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                assert_eq!(out.value(x, y, 0), 0.0);
                // Zero gradient classifies as (1, 0).
                assert_eq!(out.value(x, y, 1), 1.0);
                assert_eq!(out.value(x, y, 2), 0.0);
            }
        }
    }

    /// Builds a 3-channel gradient texture from (magnitude, dx, dy) rows.
    fn gradient_texture(
        w: usize,
        h: usize,
        f: impl Fn(usize, usize) -> (f32, f32, f32),
    ) -> Texture2D {
        let mut v = Vec::with_capacity(w * h * 3);
        for y in 0..h {
            for x in 0..w {
                let (m, dx, dy) = f(x, y);
                v.extend_from_slice(&[m, dx, dy]);
            }
        }
        Texture2D::from_texels(w, h, 3, Precision::Highp, v).unwrap()
    }

    #[test]
    fn nms_hand_examples() {
        // Center magnitude 0.5 with neighbors 0.3 / 0.2 along +-x.
        let grad = gradient_texture(3, 1, |x, _| match x {
            0 => (0.3, 1.0, 0.0),
            1 => (0.5, 1.0, 0.0),
            _ => (0.2, 1.0, 0.0),
        });
        let k = nms_threshold_kernel(0.2, 0.4, Precision::Highp).unwrap();
        let (out, report) = run_pass(&k, &[&grad], 3, 1).unwrap();
        assert_eq!(out.value(1, 0, 0), 1.0);
        assert_eq!(report.reads_per_pixel(), 3);

        // Survivor 0.3 sits halfway between the thresholds. The f32 ramp
        // lands within an ulp of 0.5 and the mediump store settles on it.
        let grad = gradient_texture(3, 1, |x, _| match x {
            1 => (0.3, 1.0, 0.0),
            _ => (0.1, 1.0, 0.0),
        });
        let k = nms_threshold_kernel(0.2, 0.4, Precision::Mediump).unwrap();
        let (out, _) = run_pass(&k, &[&grad], 3, 1).unwrap();
        assert_eq!(out.value(1, 0, 0), 0.5);

        // A larger neighbor suppresses the center.
        let grad = gradient_texture(3, 1, |x, _| match x {
            0 => (0.6, 1.0, 0.0),
            1 => (0.5, 1.0, 0.0),
            _ => (0.2, 1.0, 0.0),
        });
        let k = nms_threshold_kernel(0.2, 0.4, Precision::Highp).unwrap();
        let (out, _) = run_pass(&k, &[&grad], 3, 1).unwrap();
        assert_eq!(out.value(1, 0, 0), 0.0);
    }

    #[test]
    fn nms_keeps_ties() {
        let grad = gradient_texture(3, 1, |_, _| (0.5, 1.0, 0.0));
        let k = nms_threshold_kernel(0.1, 0.25, Precision::Highp).unwrap();
        let (out, _) = run_pass(&k, &[&grad], 3, 1).unwrap();
        for x in 0..3 {
            assert_eq!(out.value(x, 0, 0), 1.0, "tie must keep at x={x}");
        }
    }

    fn strength_texture(w: usize, h: usize, values: &[f32]) -> Texture2D {
        Texture2D::from_texels(w, h, 1, Precision::Highp, values.to_vec()).unwrap()
    }

    #[test]
    fn weak_pass_hand_examples() {
        // Center 1.0 in a dense neighborhood survives.
        let s = strength_texture(3, 3, &[0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
        let k = weak_pixel_kernel(Precision::Highp);
        let (out, report) = run_pass(&k, &[&s], 3, 3).unwrap();
        assert_eq!(out.value(1, 1, 0), 1.0);
        assert_eq!(report.reads_per_pixel(), 9);

        // Sum 1.9 rejects a 0.5 center.
        let s = strength_texture(3, 3, &[0.2, 0.3, 0.2, 0.2, 0.5, 0.2, 0.1, 0.2, 0.0]);
        let sum: f32 = s.texels().iter().sum();
        assert!((sum - 1.9).abs() < 1e-6);
        let (out, _) = run_pass(&k, &[&s], 3, 3).unwrap();
        assert_eq!(out.value(1, 1, 0), 0.0);

        // Sum exactly 2.0 is inclusive.
        let s = strength_texture(3, 3, &[0.25, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.0, 0.0]);
        let sum: f32 = s.texels().iter().sum();
        assert_eq!(sum, 2.0);
        let (out, _) = run_pass(&k, &[&s], 3, 3).unwrap();
        assert_eq!(out.value(1, 1, 0), 0.5);
    }

    #[test]
    fn isolated_strong_pixel_is_dropped_as_speckle() {
        let mut v = vec![0.0f32; 25];
        v[12] = 1.0;
        let s = strength_texture(5, 5, &v);
        let k = weak_pixel_kernel(Precision::Highp);
        let (out, _) = run_pass(&k, &[&s], 5, 5).unwrap();
        assert!(out.texels().iter().all(|&x| x == 0.0));
    }

    fn grey_image(w: usize, h: usize, mut f: impl FnMut(usize, usize) -> u8) -> ImageBuffer {
        let mut b = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                b.push(f(x, y));
            }
        }
        ImageBuffer::new(w, h, PixelLayout::Grey8, b).unwrap()
    }

    #[test]
    fn constant_images_detect_no_edges_at_any_precision() {
        for precision in [Precision::Lowp, Precision::Mediump, Precision::Highp] {
            for value in [0u8, 77, 255] {
                let img = grey_image(16, 16, |_, _| value);
                let opts = RunOptions {
                    repetitions: 1,
                    mode: crate::pass::TimingMode::Serialized,
                };
                let det =
                    detect_edges_with(&img, &CannyParams::default(), precision, &opts).unwrap();
                assert!(
                    det.edges.bytes().iter().all(|&b| b == 0),
                    "precision {precision}, value {value}"
                );
            }
        }
    }

    #[test]
    fn vertical_step_yields_a_two_pixel_band_at_every_precision() {
        let img = grey_image(64, 16, |x, _| if x >= 32 { 255 } else { 0 });
        for precision in [Precision::Lowp, Precision::Mediump, Precision::Highp] {
            let det = detect_edges_with(
                &img,
                &CannyParams::default(),
                precision,
                &RunOptions {
                    repetitions: 1,
                    mode: crate::pass::TimingMode::Serialized,
                },
            )
            .unwrap();
            for y in 0..16 {
                for x in 0..64 {
                    let expected = if x == 31 || x == 32 { 255 } else { 0 };
                    assert_eq!(
                        det.edges.byte(x, y, 0),
                        expected,
                        "({x}, {y}) at {precision}"
                    );
                }
            }
        }
    }

    #[test]
    fn five_tap_step_band_is_also_two_pixels() {
        let img = grey_image(64, 16, |x, _| if x >= 32 { 255 } else { 0 });
        let params = CannyParams::new(KernelSize::Five, 0.1, 0.25, MagnitudeMode::Exact).unwrap();
        let det = detect_edges(&img, &params).unwrap();
        for y in 0..16 {
            for x in 0..64 {
                let expected = if x == 31 || x == 32 { 255 } else { 0 };
                assert_eq!(det.edges.byte(x, y, 0), expected, "({x}, {y})");
            }
        }
    }

    #[test]
    fn rgb_input_prepends_greyscale_pass() {
        let rgb = ImageBuffer::new(8, 8, PixelLayout::Rgb888, vec![128; 8 * 8 * 3]).unwrap();
        let det = detect_edges(&rgb, &CannyParams::default()).unwrap();
        assert_eq!(det.report.passes.len(), 6);
        assert_eq!(det.report.passes[0].name, PASS_GREYSCALE);

        let grey = grey_image(8, 8, |_, _| 128);
        let det = detect_edges(&grey, &CannyParams::default()).unwrap();
        assert_eq!(det.report.passes.len(), 5);
        assert_eq!(det.report.passes[0].name, PASS_GAUSSIAN_X);
    }

    #[test]
    fn report_read_counts_match_kernel_footprints() {
        let rgb = ImageBuffer::new(12, 10, PixelLayout::Rgb888, vec![90; 12 * 10 * 3]).unwrap();
        let det = detect_edges(&rgb, &CannyParams::default()).unwrap();
        let counts: Vec<u64> = det
            .report
            .passes
            .iter()
            .map(|p| p.reads_per_pixel())
            .collect();
        assert_eq!(counts, vec![1, 3, 3, 9, 3, 9]);
        let upload = det.report.upload.as_ref().unwrap();
        assert_eq!(upload.name, UPLOAD_LABEL);
        assert_eq!(upload.texel_reads, 0);
        assert_eq!(upload.texel_writes, 120);
    }

    #[test]
    fn rotation_maps_horizontal_directions_to_vertical() {
        // Axis-aligned step rotated 90 degrees flips the direction class.
        let horizontal = step_texture(16, 16, 8);
        let mut rotated = Vec::with_capacity(16 * 16);
        for y in 0..16 {
            for x in 0..16 {
                rotated.push(horizontal.value(y, x, 0));
            }
        }
        let vertical = Texture2D::from_texels(16, 16, 1, Precision::Highp, rotated).unwrap();
        let k = gradient_kernel(MagnitudeMode::Exact, Precision::Highp);
        let (h_out, _) = run_pass(&k, &[&horizontal], 16, 16).unwrap();
        let (v_out, _) = run_pass(&k, &[&vertical], 16, 16).unwrap();
        for i in 0..16 {
            assert_eq!((h_out.value(7, i, 1), h_out.value(7, i, 2)), (1.0, 0.0));
            assert_eq!((v_out.value(i, 7, 1), v_out.value(i, 7, 2)), (0.0, 1.0));
        }
    }

    proptest! {
        #[test]
        fn classify_is_antisymmetric_off_zero(
            angle in 0.0f64..std::f64::consts::TAU,
            mag in 1e-3f64..1e3,
        ) {
            let gx = (mag * angle.cos()) as f32;
            let gy = (mag * angle.sin()) as f32;
            prop_assume!(gx != 0.0 || gy != 0.0);
            let d = classify_direction(gx, gy);
            let n = classify_direction(-gx, -gy);
            prop_assert_eq!(n, -d);
        }

        #[test]
        fn strengths_and_magnitudes_stay_in_range(seed in proptest::num::u64::ANY) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let img = grey_image(12, 12, |_, _| rng.random());
            let det = detect_edges(&img, &CannyParams::default()).unwrap();
            // Final strengths live in [0, 1]; magnitude bound sqrt(2) is
            // checked on the gradient stage.
            prop_assert!(det.strengths.texels().iter().all(|&s| (0.0..=1.0).contains(&s)));
            let tex = upload(&img, Precision::Highp).unwrap();
            let k = gradient_kernel(MagnitudeMode::Exact, Precision::Highp);
            let (g, _) = run_pass(&k, &[&tex], 12, 12).unwrap();
            for y in 0..12 {
                for x in 0..12 {
                    let m = g.value(x, y, 0);
                    prop_assert!((0.0..=std::f32::consts::SQRT_2).contains(&m));
                }
            }
        }
    }
}
