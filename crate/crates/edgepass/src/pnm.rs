use crate::error::{Error, PnmError, Result};
use crate::texture::{ImageBuffer, PixelLayout};
use std::fs;
use std::path::Path;

// Binary netpbm only: P5 (greyscale) and P6 (RGB), maxval 255. Parse errors
// carry the byte offset of the first offending byte.

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn err<T>(
        &self,
        offset: usize,
        message: impl Into<String>,
    ) -> std::result::Result<T, PnmError> {
        Err(PnmError {
            path: self.path.to_path_buf(),
            offset,
            message: message.into(),
        })
    }

    /// Skips whitespace and `#` comments (comments run to end of line).
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn token(&mut self, what: &str) -> std::result::Result<(usize, &'a [u8]), PnmError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(start, format!("unexpected end of header, expected {what}"));
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    fn number(&mut self, what: &str) -> std::result::Result<(usize, usize), PnmError> {
        let (start, tok) = self.token(what)?;
        let text = std::str::from_utf8(tok).unwrap_or("");
        match text.parse::<usize>() {
            Ok(n) => Ok((start, n)),
            Err(_) => self.err(
                start,
                format!("bad {what} '{}'", String::from_utf8_lossy(tok)),
            ),
        }
    }
}

/// Parses P5/P6 bytes into an image. `path` only labels errors.
pub fn parse(bytes: &[u8], path: &Path) -> std::result::Result<ImageBuffer, PnmError> {
    let mut c = Cursor {
        bytes,
        pos: 0,
        path,
    };
    let layout = match bytes {
        [b'P', b'5', rest @ ..]
            if rest
                .first()
                .is_none_or(|b| b.is_ascii_whitespace() || *b == b'#') =>
        {
            PixelLayout::Grey8
        }
        [b'P', b'6', rest @ ..]
            if rest
                .first()
                .is_none_or(|b| b.is_ascii_whitespace() || *b == b'#') =>
        {
            PixelLayout::Rgb888
        }
        _ => return c.err(0, "not a PNM file"),
    };
    c.pos = 2;
    let (woff, width) = c.number("image width")?;
    if width == 0 {
        return c.err(woff, "image width is 0");
    }
    let (hoff, height) = c.number("image height")?;
    if height == 0 {
        return c.err(hoff, "image height is 0");
    }
    let (moff, maxval) = c.number("maxval")?;
    if maxval != 255 {
        return c.err(moff, format!("maxval is {maxval}, only 255 is supported"));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match c.bytes.get(c.pos) {
        Some(b) if b.is_ascii_whitespace() => c.pos += 1,
        Some(_) => {
            return c.err(
                c.pos,
                "expected a single whitespace byte before the payload",
            )
        }
        None => return c.err(c.pos, "truncated payload: missing pixel data"),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(layout.channels()))
        .ok_or(())
        .or_else(|()| c.err(woff, "image dimensions overflow"))?;
    let available = bytes.len() - c.pos;
    if available < expected {
        return c.err(
            bytes.len(),
            format!("truncated payload: expected {expected} bytes, found {available}"),
        );
    }
    if available > expected {
        return c.err(c.pos + expected, "unexpected trailing data after payload");
    }
    let payload = bytes[c.pos..].to_vec();
    ImageBuffer::new(width, height, layout, payload).map_err(|e| PnmError {
        path: path.to_path_buf(),
        offset: c.pos,
        message: e.to_string(),
    })
}

/// Serializes an image as P5 (grey) or P6 (RGB) with maxval 255.
pub fn encode(image: &ImageBuffer) -> Vec<u8> {
    let magic = match image.layout() {
        PixelLayout::Grey8 => "P5",
        PixelLayout::Rgb888 => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.bytes());
    out
}

pub fn read_image(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path)?;
    parse(&bytes, path).map_err(Error::from)
}

pub fn write_image(path: &Path, image: &ImageBuffer) -> Result<()> {
    fs::write(path, encode(image))?;
    Ok(())
}
