//! Deterministic test images. The noise generator hashes coordinates and
//! a seed instead of pulling in an RNG, so outputs are stable across
//! platforms and versions.

use crate::error::Result;
use crate::texture::{ImageBuffer, PixelLayout};

/// Dark-to-bright vertical step: left half `low`, right half `high`.
pub fn vertical_step(width: usize, height: usize, low: u8, high: u8) -> Result<ImageBuffer> {
    let bytes = (0..width * height)
        .map(|i| if i % width < width / 2 { low } else { high })
        .collect();
    ImageBuffer::new(width, height, PixelLayout::Grey8, bytes)
}

/// Filled axis-aligned rectangle of `fg` on a `bg` field.
#[allow(clippy::too_many_arguments)]
pub fn rectangle(
    width: usize,
    height: usize,
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    bg: u8,
    fg: u8,
) -> Result<ImageBuffer> {
    let mut bytes = vec![bg; width * height];
    for y in y0..y1.min(height) {
        for x in x0..x1.min(width) {
            bytes[y * width + x] = fg;
        }
    }
    ImageBuffer::new(width, height, PixelLayout::Grey8, bytes)
}

/// Filled disk of `fg` on a `bg` field.
pub fn disk(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    radius: f64,
    bg: u8,
    fg: u8,
) -> Result<ImageBuffer> {
    let mut bytes = vec![bg; width * height];
    for y in 0..height {
        for x in 0..width {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if dx * dx + dy * dy <= radius * radius {
                bytes[y * width + x] = fg;
            }
        }
    }
    ImageBuffer::new(width, height, PixelLayout::Grey8, bytes)
}

/// Diagonal split: pixels below the main diagonal (shifted by `offset`)
/// take `fg`. Produces a 45 degree bar edge.
pub fn diagonal_split(
    width: usize,
    height: usize,
    offset: i64,
    bg: u8,
    fg: u8,
) -> Result<ImageBuffer> {
    let mut bytes = vec![bg; width * height];
    for y in 0..height {
        for x in 0..width {
            if y as i64 >= x as i64 + offset {
                bytes[y * width + x] = fg;
            }
        }
    }
    ImageBuffer::new(width, height, PixelLayout::Grey8, bytes)
}

/// Alternating tiles of `a` and `b`, `tile` pixels on a side.
pub fn checkerboard(width: usize, height: usize, tile: usize, a: u8, b: u8) -> Result<ImageBuffer> {
    let tile = tile.max(1);
    let bytes = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            if (x / tile + y / tile).is_multiple_of(2) {
                a
            } else {
                b
            }
        })
        .collect();
    ImageBuffer::new(width, height, PixelLayout::Grey8, bytes)
}

/// splitmix64 finalizer: full-period integer mix, stable everywhere.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-pixel hash noise. Same (seed, size) always yields the same bytes.
pub fn noise(width: usize, height: usize, seed: u64) -> Result<ImageBuffer> {
    let bytes = (0..width * height)
        .map(|i| (mix64(seed ^ (i as u64).wrapping_mul(0x2545_f491_4f6c_dd1d)) >> 56) as u8)
        .collect();
    ImageBuffer::new(width, height, PixelLayout::Grey8, bytes)
}

/// RGB card with distinct channel ramps and a bright center block, for
/// exercising the grey conversion pass: red ramps left-right, green
/// top-bottom, and the block lifts all three channels enough to leave a
/// hard luma edge.
pub fn rgb_test_card(width: usize, height: usize) -> Result<ImageBuffer> {
    let mut bytes = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let r = (x * 255 / width.max(1)) as u8;
            let g = (y * 255 / height.max(1)) as u8;
            let center = x > width / 4 && x < 3 * width / 4 && y > height / 4 && y < 3 * height / 4;
            if center {
                bytes.extend_from_slice(&[r.saturating_add(120), g.saturating_add(120), 200]);
            } else {
                bytes.extend_from_slice(&[r, g, 30]);
            }
        }
    }
    ImageBuffer::new(width, height, PixelLayout::Rgb888, bytes)
}

/// The fixed shape corpus used for end-to-end scoring: a filled
/// rectangle, a disk, and a diagonal bar, all 128x128 with strong
/// contrast.
pub fn shape_corpus() -> Vec<(&'static str, ImageBuffer)> {
    let rect = rectangle(128, 128, 32, 40, 96, 88, 25, 230).expect("static corpus image");
    let blob = disk(128, 128, 64.0, 64.0, 36.0, 25, 230).expect("static corpus image");
    let bar = {
        let mut bytes = vec![25u8; 128 * 128];
        // A 12px-wide band along the main diagonal.
        for y in 0..128i64 {
            for x in 0..128i64 {
                if (y - x).abs() <= 6 {
                    bytes[(y * 128 + x) as usize] = 230;
                }
            }
        }
        ImageBuffer::new(128, 128, PixelLayout::Grey8, bytes).expect("static corpus image")
    };
    vec![("rectangle", rect), ("disk", blob), ("diagonal bar", bar)]
}
