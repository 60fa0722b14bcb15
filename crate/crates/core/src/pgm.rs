//! Binary PGM (P5) reading and writing, the image format of the CLI.

use crate::grid::Grid;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PgmError {
    #[error("not a binary PGM (P5) file")]
    Magic,
    #[error("malformed PGM header: {0}")]
    Header(String),
    #[error("maxval {0} unsupported, must be in 1..=255")]
    MaxVal(u64),
    #[error("pixel payload truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("trailing bytes after pixel payload")]
    Trailing,
}

struct HeaderScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderScanner<'a> {
    fn skip_separators(&mut self) -> Result<(), PgmError> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn integer(&mut self) -> Result<u64, PgmError> {
        self.skip_separators()?;
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PgmError::Header("expected an integer".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PgmError::Header("integer out of range".into()))
    }
}

/// Parses a P5 image with maxval up to 255. Header comments are accepted;
/// exactly one whitespace byte separates the maxval from the pixel data.
pub fn read_pgm(bytes: &[u8]) -> Result<Grid<u8>, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::Magic);
    }
    let mut scanner = HeaderScanner { bytes, pos: 2 };
    let width = scanner.integer()? as usize;
    let height = scanner.integer()? as usize;
    let maxval = scanner.integer()?;
    if width == 0 || height == 0 {
        return Err(PgmError::Header("zero dimension".into()));
    }
    if !(1..=255).contains(&maxval) {
        return Err(PgmError::MaxVal(maxval));
    }
    match bytes.get(scanner.pos) {
        Some(b) if b.is_ascii_whitespace() => scanner.pos += 1,
        _ => return Err(PgmError::Header("missing separator before pixels".into())),
    }
    let expected = width * height;
    let pixels = &bytes[scanner.pos..];
    if pixels.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            got: pixels.len(),
        });
    }
    if pixels.len() > expected {
        return Err(PgmError::Trailing);
    }
    Ok(Grid::from_vec(width, height, pixels.to_vec()))
}

/// Serializes as P5 with maxval 255.
pub fn write_pgm(img: &Grid<u8>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}
