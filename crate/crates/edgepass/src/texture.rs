use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Smallest representable step at `Lowp`.
pub const LOWP_STEP: f32 = 1.0 / 256.0;
/// Lower bound of the `Lowp` range.
pub const LOWP_MIN: f32 = -2.0;
/// Upper bound of the `Lowp` range (511/256).
pub const LOWP_MAX: f32 = 511.0 / 256.0;
/// Largest finite magnitude at `Mediump`.
pub const MEDIUMP_MAX: f32 = 65504.0;

/// Storage precision applied when a value is written to a texture.
///
/// Arithmetic inside a pass always runs at f32; precision constrains what
/// survives the store. `Lowp` is signed 10-bit fixed point (step 1/256,
/// range [-2, 511/256], ties round away from zero, out-of-range clamps,
/// NaN is an error). `Mediump` is binary16 with round-to-nearest-even and
/// saturation at ±65504. `Highp` stores f32 unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Lowp,
    Mediump,
    Highp,
}

impl Precision {
    /// Rounds `value` to what a texture store at this precision retains.
    pub fn quantize(self, value: f32) -> Result<f32> {
        match self {
            Precision::Highp => Ok(value),
            Precision::Mediump => Ok(to_binary16_saturating(value)),
            Precision::Lowp => {
                if value.is_nan() {
                    return Err(Error::InvalidValue(
                        "NaN cannot be stored at lowp (no fixed-point encoding)".into(),
                    ));
                }
                // Scale in f64 so the tie rule is exactly f64::round's
                // half-away-from-zero, then clamp to the 10-bit signed range.
                let units = (f64::from(value) * 256.0).round().clamp(-512.0, 511.0);
                Ok((units / 256.0) as f32)
            }
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Precision::Lowp => "lowp",
            Precision::Mediump => "mediump",
            Precision::Highp => "highp",
        };
        f.write_str(s)
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowp" => Ok(Precision::Lowp),
            "mediump" => Ok(Precision::Mediump),
            "highp" => Ok(Precision::Highp),
            other => Err(Error::InvalidInput(format!(
                "unknown precision '{other}' (expected lowp, mediump or highp)"
            ))),
        }
    }
}

/// f32 -> binary16 bits, round-to-nearest-even.
fn f32_to_binary16_bits(value: f32) -> u16 {
    let bits = value.to_bits();
    let sign = ((bits >> 16) & 0x8000) as u16;
    let abs = bits & 0x7fff_ffff;
    if abs >= 0x7f80_0000 {
        // Infinity keeps its class; every NaN becomes a quiet NaN.
        return if abs > 0x7f80_0000 {
            sign | 0x7e00
        } else {
            sign | 0x7c00
        };
    }
    let exp = (abs >> 23) as i32 - 127 + 15;
    let man = abs & 0x007f_ffff;
    if exp >= 31 {
        return sign | 0x7c00;
    }
    if exp <= 0 {
        if exp < -10 {
            // Below half the smallest subnormal; rounds to zero.
            return sign;
        }
        // Subnormal result: shift the 24-bit significand into place.
        let full = man | 0x0080_0000;
        let shift = (14 - exp) as u32;
        let kept = full >> shift;
        let rem = full & ((1u32 << shift) - 1);
        let half = 1u32 << (shift - 1);
        let round_up = rem > half || (rem == half && kept & 1 == 1);
        return sign | (kept + round_up as u32) as u16;
    }
    let base = ((exp as u32) << 10) | (man >> 13);
    let rem = man & 0x1fff;
    let round_up = rem > 0x1000 || (rem == 0x1000 && base & 1 == 1);
    // A carry here rolls into the exponent, which is the correct rounding
    // (values at or above 65520 become infinity before saturation).
    sign | (base + round_up as u32) as u16
}

/// binary16 bits -> f32, exact.
fn binary16_bits_to_f32(bits: u16) -> f32 {
    const SUBNORMAL_UNIT: f32 = 1.0 / 16_777_216.0; // 2^-24
    let negative = bits & 0x8000 != 0;
    let exp = (bits >> 10) & 0x1f;
    let man = (bits & 0x3ff) as u32;
    let sign_bits = (negative as u32) << 31;
    match (exp, man) {
        (0, 0) => f32::from_bits(sign_bits),
        (0, m) => {
            let mag = m as f32 * SUBNORMAL_UNIT;
            if negative {
                -mag
            } else {
                mag
            }
        }
        (31, 0) => f32::from_bits(sign_bits | 0x7f80_0000),
        (31, m) => f32::from_bits(sign_bits | 0x7fc0_0000 | (m << 13)),
        (e, m) => f32::from_bits(sign_bits | ((e as u32 + 112) << 23) | (m << 13)),
    }
}

fn to_binary16_saturating(value: f32) -> f32 {
    if value.is_nan() {
        return value;
    }
    let bits = f32_to_binary16_bits(value);
    if bits & 0x7fff == 0x7c00 {
        // Overflow saturates at the largest finite value instead of infinity.
        return if bits & 0x8000 != 0 {
            -MEDIUMP_MAX
        } else {
            MEDIUMP_MAX
        };
    }
    binary16_bits_to_f32(bits)
}

/// Channel layout of an 8-bit source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelLayout {
    Grey8,
    Rgb888,
}

impl PixelLayout {
    pub fn channels(self) -> usize {
        match self {
            PixelLayout::Grey8 => 1,
            PixelLayout::Rgb888 => 3,
        }
    }
}

/// 8-bit host-side image, row-major, interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    layout: PixelLayout,
    bytes: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, layout: PixelLayout, bytes: Vec<u8>) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidInput("image width is 0".into()));
        }
        if height == 0 {
            return Err(Error::InvalidInput("image height is 0".into()));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(layout.channels()))
            .ok_or_else(|| Error::InvalidInput("image dimensions overflow".into()))?;
        if bytes.len() != expected {
            return Err(Error::InvalidInput(format!(
                "pixel payload is {} bytes, expected {expected} for {width}x{height}",
                bytes.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            layout,
            bytes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn layout(&self) -> PixelLayout {
        self.layout
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn byte(&self, x: usize, y: usize, channel: usize) -> u8 {
        assert!(x < self.width && y < self.height && channel < self.layout.channels());
        self.bytes[(y * self.width + x) * self.layout.channels() + channel]
    }
}

/// Float texture, row-major, interleaved channels, every stored value
/// already rounded to `precision`.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture2D {
    width: usize,
    height: usize,
    channels: usize,
    precision: Precision,
    texels: Vec<f32>,
}

impl Texture2D {
    /// Builds a texture from raw values, rounding each one as a store at
    /// `precision` would. Dimensions must be nonzero and `values` must hold
    /// exactly `width * height * channels` entries.
    pub fn from_texels(
        width: usize,
        height: usize,
        channels: usize,
        precision: Precision,
        mut values: Vec<f32>,
    ) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidInput("texture width is 0".into()));
        }
        if height == 0 {
            return Err(Error::InvalidInput("texture height is 0".into()));
        }
        if !(1..=4).contains(&channels) {
            return Err(Error::InvalidInput(format!(
                "texture has {channels} channels, expected 1 to 4"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::InvalidInput("texture dimensions overflow".into()))?;
        if values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "texture payload is {} values, expected {expected} for {width}x{height}x{channels}",
                values.len()
            )));
        }
        for v in &mut values {
            *v = precision.quantize(*v)?;
        }
        Ok(Texture2D {
            width,
            height,
            channels,
            precision,
            texels: values,
        })
    }

    pub fn filled(
        width: usize,
        height: usize,
        channels: usize,
        precision: Precision,
        value: f32,
    ) -> Result<Self> {
        let n = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::InvalidInput("texture dimensions overflow".into()))?;
        Texture2D::from_texels(width, height, channels, precision, vec![value; n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn texels(&self) -> &[f32] {
        &self.texels
    }

    /// In-bounds read. Panics if the coordinate or channel is out of range.
    pub fn value(&self, x: usize, y: usize, channel: usize) -> f32 {
        assert!(x < self.width && y < self.height && channel < self.channels);
        self.texels[(y * self.width + x) * self.channels + channel]
    }

    /// Read with clamp-to-edge addressing; any i64 coordinate is valid.
    pub fn sample_clamped(&self, x: i64, y: i64, channel: usize) -> f32 {
        let xi = x.clamp(0, self.width as i64 - 1) as usize;
        let yi = y.clamp(0, self.height as i64 - 1) as usize;
        self.value(xi, yi, channel)
    }
}

/// Converts an 8-bit image to a float texture: each byte maps to b/255,
/// then rounds to `precision` as part of the store.
pub fn upload(image: &ImageBuffer, precision: Precision) -> Result<Texture2D> {
    let values = image
        .bytes()
        .iter()
        .map(|&b| f32::from(b) / 255.0)
        .collect();
    Texture2D::from_texels(
        image.width(),
        image.height(),
        image.layout().channels(),
        precision,
        values,
    )
}
