//! PGM (P2/P5) map loader. A pixel below 128 is an obstacle.

use std::fmt;

use swarmgrid_core::{GridMap, MapError};

/// Pixel values strictly below this are obstacles.
pub const OBSTACLE_THRESHOLD: u8 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PgmErrorKind {
    UnsupportedMagic,
    BadHeader(&'static str),
    MaxvalZero,
    MaxvalTooLarge(u32),
    PixelAboveMaxval(u32),
    Truncated,
    Map(MapError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmError {
    pub offset: usize,
    pub kind: PgmErrorKind,
}

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pgm error at byte {}: ", self.offset)?;
        match &self.kind {
            PgmErrorKind::UnsupportedMagic => write!(f, "unsupported magic"),
            PgmErrorKind::BadHeader(what) => write!(f, "malformed header ({what})"),
            PgmErrorKind::MaxvalZero => write!(f, "maxval is 0"),
            PgmErrorKind::MaxvalTooLarge(m) => write!(f, "maxval {m} exceeds 255"),
            PgmErrorKind::PixelAboveMaxval(v) => write!(f, "pixel value {v} exceeds maxval"),
            PgmErrorKind::Truncated => write!(f, "truncated payload"),
            PgmErrorKind::Map(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PgmError {}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, kind: PgmErrorKind) -> PgmError {
        PgmError {
            offset: self.pos,
            kind,
        }
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u32))
                .ok_or_else(|| self.err(PgmErrorKind::BadHeader(what)))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(if self.pos >= self.bytes.len() {
                self.err(PgmErrorKind::Truncated)
            } else {
                self.err(PgmErrorKind::BadHeader(what))
            });
        }
        if let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_whitespace() && b != b'#' {
                return Err(self.err(PgmErrorKind::BadHeader(what)));
            }
        }
        Ok(value)
    }
}

/// Parses a P2 or P5 image into an occupancy grid.
pub fn load_map(bytes: &[u8]) -> Result<GridMap, PgmError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(cur.err(PgmErrorKind::UnsupportedMagic)),
    };
    cur.pos = 2;
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        None => return Err(cur.err(PgmErrorKind::Truncated)),
        Some(_) => return Err(cur.err(PgmErrorKind::UnsupportedMagic)),
    }
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    cur.skip_separators();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 {
        return Err(PgmError {
            offset: maxval_at,
            kind: PgmErrorKind::MaxvalZero,
        });
    }
    if maxval > 255 {
        return Err(PgmError {
            offset: maxval_at,
            kind: PgmErrorKind::MaxvalTooLarge(maxval),
        });
    }
    if width == 0 || height == 0 {
        return Err(cur.err(PgmErrorKind::Map(MapError::EmptyDimensions {
            width,
            height,
        })));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| cur.err(PgmErrorKind::BadHeader("dimensions")))?;

    let mut obstacles = Vec::with_capacity(n.min(bytes.len()));
    if binary {
        // Exactly one whitespace byte separates the header from raster data.
        if cur.pos >= bytes.len() {
            return Err(cur.err(PgmErrorKind::Truncated));
        }
        cur.pos += 1;
        let raster = &bytes[cur.pos..];
        if raster.len() < n {
            return Err(PgmError {
                offset: bytes.len(),
                kind: PgmErrorKind::Truncated,
            });
        }
        for (i, &v) in raster[..n].iter().enumerate() {
            if v as u32 > maxval {
                return Err(PgmError {
                    offset: cur.pos + i,
                    kind: PgmErrorKind::PixelAboveMaxval(v as u32),
                });
            }
            obstacles.push(v < OBSTACLE_THRESHOLD);
        }
    } else {
        for _ in 0..n {
            let at = {
                cur.skip_separators();
                cur.pos
            };
            let v = cur.number("pixel")?;
            if v > maxval {
                return Err(PgmError {
                    offset: at,
                    kind: PgmErrorKind::PixelAboveMaxval(v),
                });
            }
            obstacles.push(v < OBSTACLE_THRESHOLD as u32);
        }
    }
    GridMap::new(width, height, obstacles).map_err(|e| cur.err(PgmErrorKind::Map(e)))
}
