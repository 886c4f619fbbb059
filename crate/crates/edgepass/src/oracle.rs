//! Straightforward reference implementations used as ground truth:
//! a conditional atan2 direction classifier, direct 2D convolution, a
//! textbook detector with full transitive hysteresis, and conditional
//! twins of every render kernel for equivalence testing. Everything here
//! favors clarity over speed and runs at plain binary32.

use crate::canny::{
    build_pipeline, doubled_angle_vector, magnitude_of, rgb_to_grey, sample_window3,
    sobel_gradients, CannyParams, Direction, KernelSize, MagnitudeMode, PASS_GAUSSIAN_X,
    PASS_GAUSSIAN_Y, PASS_GRADIENT, PASS_GREYSCALE, PASS_NMS, PASS_WEAK,
};
use crate::error::{Error, Result};
use crate::pass::{run_pipeline_collect, PassKernel, Texel};
use crate::texture::{upload, ImageBuffer, PixelLayout, Precision};
use serde::Serialize;
use std::collections::VecDeque;

/// Nearest of the eight primary directions via atan2, written with plain
/// conditionals. Sector boundaries (22.5 deg + k*45 deg) resolve
/// counterclockwise, the same half-open rule as the shader classifier.
pub fn direction_oracle(gx: f32, gy: f32) -> Result<Direction> {
    if gx == 0.0 && gy == 0.0 {
        return Err(Error::InvalidInput(
            "direction of the zero vector is undefined".into(),
        ));
    }
    let deg = f64::from(gy).atan2(f64::from(gx)).to_degrees();
    let (dx, dy) = if (-22.5..22.5).contains(&deg) {
        (1, 0)
    } else if (22.5..67.5).contains(&deg) {
        (1, 1)
    } else if (67.5..112.5).contains(&deg) {
        (0, 1)
    } else if (112.5..157.5).contains(&deg) {
        (-1, 1)
    } else if !(-157.5..157.5).contains(&deg) {
        (-1, 0)
    } else if (-157.5..-112.5).contains(&deg) {
        (-1, -1)
    } else if (-112.5..-67.5).contains(&deg) {
        (0, -1)
    } else {
        (1, -1)
    };
    Ok(Direction { dx, dy })
}

/// Direct 2D convolution with clamp-to-edge sampling, binary32 arithmetic.
/// Kernel is row-major with odd dimensions.
pub fn convolve2d_reference(
    src: &[f32],
    width: usize,
    height: usize,
    kernel: &[f32],
    kernel_width: usize,
    kernel_height: usize,
) -> Result<Vec<f32>> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(
            "source dimensions must be nonzero".into(),
        ));
    }
    if src.len() != width * height {
        return Err(Error::InvalidInput(format!(
            "source holds {} values, expected {}",
            src.len(),
            width * height
        )));
    }
    if kernel_width.is_multiple_of(2) || kernel_height.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "kernel dimensions must be odd, got {kernel_width}x{kernel_height}"
        )));
    }
    if kernel.len() != kernel_width * kernel_height {
        return Err(Error::InvalidInput(format!(
            "kernel holds {} weights, expected {}",
            kernel.len(),
            kernel_width * kernel_height
        )));
    }
    let (rx, ry) = (kernel_width as i64 / 2, kernel_height as i64 / 2);
    let at = |x: i64, y: i64| {
        let xc = x.clamp(0, width as i64 - 1) as usize;
        let yc = y.clamp(0, height as i64 - 1) as usize;
        src[yc * width + xc]
    };
    let mut out = Vec::with_capacity(src.len());
    for y in 0..height as i64 {
        for x in 0..width as i64 {
            let mut acc = 0.0f32;
            for ky in 0..kernel_height as i64 {
                for kx in 0..kernel_width as i64 {
                    let w = kernel[(ky * kernel_width as i64 + kx) as usize];
                    acc += w * at(x + kx - rx, y + ky - ry);
                }
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// Per-pixel edge / non-edge bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryEdgeMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryEdgeMap {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(
                "edge map dimensions must be nonzero".into(),
            ));
        }
        Ok(BinaryEdgeMap {
            width,
            height,
            bits: vec![false; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut map = BinaryEdgeMap::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                map.bits[y * width + x] = f(x, y);
            }
        }
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, edge: bool) {
        self.bits[y * self.width + x] = edge;
    }

    pub fn count_edges(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Separable smoothing with the same tap order and clamped addressing the
/// render passes use, so highp comparisons see identical values.
fn separable_smooth(src: &[f32], width: usize, height: usize, size: KernelSize) -> Vec<f32> {
    let taps = size.taps();
    let radius = (taps.len() / 2) as i64;
    let mut tmp = vec![0.0f32; src.len()];
    for y in 0..height {
        for x in 0..width as i64 {
            let mut acc = 0.0f32;
            for (i, &w) in taps.iter().enumerate() {
                let sx = (x + i as i64 - radius).clamp(0, width as i64 - 1) as usize;
                acc += w * src[y * width + sx];
            }
            tmp[y * width + x as usize] = acc;
        }
    }
    let mut out = vec![0.0f32; src.len()];
    for y in 0..height as i64 {
        for x in 0..width {
            let mut acc = 0.0f32;
            for (i, &w) in taps.iter().enumerate() {
                let sy = (y + i as i64 - radius).clamp(0, height as i64 - 1) as usize;
                acc += w * tmp[sy * width + x];
            }
            out[y as usize * width + x] = acc;
        }
    }
    out
}

/// Textbook detector: smooth, Sobel, conditional NMS with the same
/// tie-keep rule, double threshold, then full transitive hysteresis
/// (breadth-first from strong pixels through weak ones, 8-connected).
/// This is a comparison baseline, not an equivalence oracle: the render
/// pipeline propagates weak evidence a single step only.
pub fn classic_canny(
    grey: &[f32],
    width: usize,
    height: usize,
    params: &CannyParams,
) -> Result<BinaryEdgeMap> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(
            "image dimensions must be nonzero".into(),
        ));
    }
    if grey.len() != width * height {
        return Err(Error::InvalidInput(format!(
            "image holds {} values, expected {}",
            grey.len(),
            width * height
        )));
    }
    let smoothed = separable_smooth(grey, width, height, params.kernel());
    let at = |x: i64, y: i64| {
        let xc = x.clamp(0, width as i64 - 1) as usize;
        let yc = y.clamp(0, height as i64 - 1) as usize;
        smoothed[yc * width + xc]
    };

    let mut magnitude = vec![0.0f32; width * height];
    let mut direction = vec![Direction { dx: 1, dy: 0 }; width * height];
    for y in 0..height {
        for x in 0..width {
            let (xi, yi) = (x as i64, y as i64);
            let mut w = [0.0f32; 9];
            let mut k = 0;
            for j in -1..=1 {
                for i in -1..=1 {
                    w[k] = at(xi + i, yi + j);
                    k += 1;
                }
            }
            let (gx, gy) = sobel_gradients(&w);
            magnitude[y * width + x] = magnitude_of(params.magnitude(), gx, gy);
            if gx != 0.0 || gy != 0.0 {
                direction[y * width + x] = direction_oracle(gx, gy)?;
            }
        }
    }

    let mag_at = |x: i64, y: i64| {
        let xc = x.clamp(0, width as i64 - 1) as usize;
        let yc = y.clamp(0, height as i64 - 1) as usize;
        magnitude[yc * width + xc]
    };
    let mut strong = BinaryEdgeMap::new(width, height)?;
    let mut weak = BinaryEdgeMap::new(width, height)?;
    for y in 0..height {
        for x in 0..width {
            let m = magnitude[y * width + x];
            let d = direction[y * width + x];
            let (xi, yi) = (x as i64, y as i64);
            let n1 = mag_at(xi + i64::from(d.dx), yi + i64::from(d.dy));
            let n2 = mag_at(xi - i64::from(d.dx), yi - i64::from(d.dy));
            let survivor = if m >= n1.max(n2) { m } else { 0.0 };
            if survivor >= params.high() {
                strong.set(x, y, true);
            } else if survivor > params.low() {
                weak.set(x, y, true);
            }
        }
    }

    let mut edges = strong.clone();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for y in 0..height {
        for x in 0..width {
            if strong.get(x, y) {
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if weak.get(nx, ny) && !edges.get(nx, ny) {
                    edges.set(nx, ny, true);
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    Ok(edges)
}

/// Precision/recall/F1 of a candidate edge map against a reference.
/// Two empty maps score 1.0 across the board by convention.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimilarityReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SimilarityReport {
    /// True when both compared maps had no edges at all.
    pub fn both_empty(&self) -> bool {
        self.true_positives == 0 && self.false_positives == 0 && self.false_negatives == 0
    }
}

pub fn compare_edge_maps(
    candidate: &BinaryEdgeMap,
    reference: &BinaryEdgeMap,
) -> Result<SimilarityReport> {
    if candidate.width() != reference.width() || candidate.height() != reference.height() {
        return Err(Error::InvalidInput(format!(
            "edge map dimensions differ: {}x{} vs {}x{}",
            candidate.width(),
            candidate.height(),
            reference.width(),
            reference.height()
        )));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for y in 0..candidate.height() {
        for x in 0..candidate.width() {
            match (candidate.get(x, y), reference.get(x, y)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => {}
            }
        }
    }
    if tp == 0 && fp == 0 && fneg == 0 {
        return Ok(SimilarityReport {
            true_positives: 0,
            false_positives: 0,
            false_negatives: 0,
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        });
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(SimilarityReport {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fneg,
        precision,
        recall,
        f1,
    })
}

// --- Conditional twins of the render kernels -------------------------------
//
// Same mathematical contract, same sampling footprint and arithmetic,
// but every data-dependent decision is written with if/else instead of
// step/sign arithmetic. Outputs must be bit-identical at highp.

fn classify_direction_branchy(gx: f32, gy: f32) -> (f32, f32) {
    let (zx, zy) = doubled_angle_vector(gx, gy);
    if zx > 0.0 && zy >= 0.0 {
        if gx >= 0.0 {
            (1.0, 0.0)
        } else {
            (-1.0, 0.0)
        }
    } else if zx <= 0.0 && zy > 0.0 {
        if gx >= 0.0 {
            (1.0, 1.0)
        } else {
            (-1.0, -1.0)
        }
    } else if zx < 0.0 && zy <= 0.0 {
        if gy >= 0.0 {
            (0.0, 1.0)
        } else {
            (0.0, -1.0)
        }
    } else if zx >= 0.0 && zy < 0.0 {
        if gy >= 0.0 {
            (-1.0, 1.0)
        } else {
            (1.0, -1.0)
        }
    } else {
        // z collapsed to the origin: zero (or vanishing) gradient.
        (1.0, 0.0)
    }
}

pub fn branchy_greyscale_kernel(precision: Precision) -> PassKernel {
    // The contract has no data-dependent decisions; the twin differs only
    // in name.
    PassKernel::new(PASS_GREYSCALE, vec![3], 1, precision, |x, y, s| {
        let t = s.fetch(0, x as i64, y as i64);
        Texel::one(rgb_to_grey(t.get(0), t.get(1), t.get(2)))
    })
}

fn branchy_gaussian_kernel(
    name: &'static str,
    size: KernelSize,
    axis_x: bool,
    precision: Precision,
) -> PassKernel {
    let taps = size.taps();
    let radius = (taps.len() / 2) as i64;
    PassKernel::new(name, vec![1], 1, precision, move |x, y, s| {
        let (w, h) = s.size(0);
        let (xi, yi) = (x as i64, y as i64);
        let mut acc = 0.0f32;
        for (i, &t) in taps.iter().enumerate() {
            let o = i as i64 - radius;
            // Explicit conditional clamp instead of clamp-to-edge sampling.
            let v = if axis_x {
                let px = xi + o;
                let px = if px < 0 {
                    0
                } else if px >= w as i64 {
                    w as i64 - 1
                } else {
                    px
                };
                s.sample(0, px, yi, 0)
            } else {
                let py = yi + o;
                let py = if py < 0 {
                    0
                } else if py >= h as i64 {
                    h as i64 - 1
                } else {
                    py
                };
                s.sample(0, xi, py, 0)
            };
            acc += t * v;
        }
        Texel::one(acc)
    })
}

pub fn branchy_gaussian_x_kernel(size: KernelSize, precision: Precision) -> PassKernel {
    branchy_gaussian_kernel(PASS_GAUSSIAN_X, size, true, precision)
}

pub fn branchy_gaussian_y_kernel(size: KernelSize, precision: Precision) -> PassKernel {
    branchy_gaussian_kernel(PASS_GAUSSIAN_Y, size, false, precision)
}

pub fn branchy_gradient_kernel(mode: MagnitudeMode, precision: Precision) -> PassKernel {
    PassKernel::new(PASS_GRADIENT, vec![1], 3, precision, move |x, y, s| {
        let w = sample_window3(s, x, y);
        let (gx, gy) = sobel_gradients(&w);
        let m = magnitude_of(mode, gx, gy);
        let (dx, dy) = classify_direction_branchy(gx, gy);
        Texel::three(m, dx, dy)
    })
}

// The conditional clamp is this twin's reason to exist.
#[allow(clippy::manual_clamp)]
pub fn branchy_nms_kernel(low: f32, high: f32, precision: Precision) -> Result<PassKernel> {
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
            let nmax = if n1 > n2 { n1 } else { n2 };
            let survivor = if m >= nmax { m } else { 0.0 };
            let raw = (survivor - low) / (high - low);
            let t = if raw < 0.0 {
                0.0
            } else if raw > 1.0 {
                1.0
            } else {
                raw
            };
            Texel::one(t * t * (3.0 - 2.0 * t))
        },
    ))
}

pub fn branchy_weak_pixel_kernel(precision: Precision) -> PassKernel {
    PassKernel::new(PASS_WEAK, vec![1], 1, precision, |x, y, s| {
        let w = sample_window3(s, x, y);
        let sum: f32 = w.iter().sum();
        Texel::one(if sum >= 2.0 { w[4] } else { 0.0 })
    })
}

/// Conditional variant of the full pass chain.
pub fn branchy_pipeline(
    layout: PixelLayout,
    params: &CannyParams,
    precision: Precision,
) -> Result<Vec<PassKernel>> {
    let mut passes = Vec::with_capacity(6);
    if layout == PixelLayout::Rgb888 {
        passes.push(branchy_greyscale_kernel(precision));
    }
    passes.push(branchy_gaussian_x_kernel(params.kernel(), precision));
    passes.push(branchy_gaussian_y_kernel(params.kernel(), precision));
    passes.push(branchy_gradient_kernel(params.magnitude(), precision));
    passes.push(branchy_nms_kernel(params.low(), params.high(), precision)?);
    passes.push(branchy_weak_pixel_kernel(precision));
    Ok(passes)
}

/// Outcome of running the render pipeline and the textbook baseline on
/// the same image. Strong/weak/suppressed counts come from the
/// suppression stage: strength 1.0, in (0, 1), and 0.0 respectively.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PipelineComparison {
    pub similarity: SimilarityReport,
    pub strong: usize,
    pub weak: usize,
    pub suppressed: usize,
}

/// Runs the render pipeline at `precision`, the textbook baseline at
/// plain binary32, and scores the pipeline's nonzero-strength pixels
/// against the baseline's edge set.
pub fn compare_with_classic(
    image: &ImageBuffer,
    params: &CannyParams,
    precision: Precision,
) -> Result<PipelineComparison> {
    let texture = upload(image, precision)?;
    let passes = build_pipeline(image.layout(), params, precision)?;
    let stages = run_pipeline_collect(&passes, &texture)?;
    let (final_tex, _) = stages.last().expect("pipeline is nonempty");
    let pipeline_map = BinaryEdgeMap::from_fn(final_tex.width(), final_tex.height(), |x, y| {
        final_tex.value(x, y, 0) > 0.0
    })?;

    let nms = stages
        .iter()
        .find(|(_, r)| r.name == PASS_NMS)
        .map(|(t, _)| t)
        .expect("pipeline contains the suppression pass");
    let (mut strong, mut weak, mut suppressed) = (0usize, 0usize, 0usize);
    for &s in nms.texels() {
        if s == 1.0 {
            strong += 1;
        } else if s == 0.0 {
            suppressed += 1;
        } else {
            weak += 1;
        }
    }

    let gold = upload(image, Precision::Highp)?;
    let grey: Vec<f32> = match image.layout() {
        PixelLayout::Grey8 => gold.texels().to_vec(),
        PixelLayout::Rgb888 => gold
            .texels()
            .chunks(3)
            .map(|c| rgb_to_grey(c[0], c[1], c[2]))
            .collect(),
    };
    let reference = classic_canny(&grey, image.width(), image.height(), params)?;
    let similarity = compare_edge_maps(&pipeline_map, &reference)?;
    Ok(PipelineComparison {
        similarity,
        strong,
        weak,
        suppressed,
    })
}
