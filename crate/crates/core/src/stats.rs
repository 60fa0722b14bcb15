//! Ciphertext statistics: Shannon entropy, adjacent-pixel correlations,
//! NPCR/UACI, MSE/PSNR, and the one-pixel differential probe.

use crate::cipher::{encrypt_image, CipherError};
use crate::grid::Grid;
use crate::key::CipherParams;
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatError {
    #[error("empty input")]
    Empty,
    #[error("undefined correlation: zero variance in the {0} marginal")]
    UndefinedCorrelation(&'static str),
    #[error("image {width}x{height} too small for {direction} pairs")]
    TooSmall {
        width: usize,
        height: usize,
        direction: Direction,
    },
    #[error("sample count must be at least 2, got {0}")]
    SampleCount(usize),
    #[error("dimension mismatch: {w1}x{h1} vs {w2}x{h2}")]
    DimensionMismatch {
        w1: usize,
        h1: usize,
        w2: usize,
        h2: usize,
    },
    #[error("pixel position ({x}, {y}) out of range for {width}x{height}")]
    OutOfRange {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Horizontal => write!(f, "horizontal"),
            Direction::Vertical => write!(f, "vertical"),
            Direction::Diagonal => write!(f, "diagonal"),
        }
    }
}

impl Direction {
    fn offset(&self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (1, 0),
            Direction::Vertical => (0, 1),
            Direction::Diagonal => (1, 1),
        }
    }
}

pub fn byte_histogram(data: &[u8]) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    counts
}

/// Entropy in bits from a symbol histogram: H = -sum p_i log2 p_i, bounded
/// by log2(alphabet).
pub fn entropy_from_counts(counts: &[u64]) -> Result<f64, StatError> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(StatError::Empty);
    }
    let total = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Shannon entropy of a byte sequence over the 256-symbol alphabet.
pub fn shannon_entropy(data: &[u8]) -> Result<f64, StatError> {
    if data.is_empty() {
        return Err(StatError::Empty);
    }
    entropy_from_counts(&byte_histogram(data))
}

/// Buckets 64-bit words into 256 equal-width bins (the high byte) so word
/// blocks can be measured on the same alphabet as images.
pub fn bucket_words(words: &[u64]) -> Vec<u8> {
    words.iter().map(|&w| (w >> 56) as u8).collect()
}

/// One histogram count per line, in symbol order.
pub fn histogram_lines(data: &[u8]) -> String {
    byte_histogram(data)
        .iter()
        .map(|c| format!("{c}\n"))
        .collect()
}

fn pair_domain(img: &Grid<u8>, direction: Direction) -> Result<(usize, usize), StatError> {
    let (dx, dy) = direction.offset();
    let nx = img.width().saturating_sub(dx);
    let ny = img.height().saturating_sub(dy);
    if nx == 0 || ny == 0 {
        return Err(StatError::TooSmall {
            width: img.width(),
            height: img.height(),
            direction,
        });
    }
    Ok((nx, ny))
}

fn pearson(pairs: impl Iterator<Item = (f64, f64)>) -> Result<f64, StatError> {
    let (mut n, mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, b) in pairs {
        n += 1.0;
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
    }
    let var_a = saa - sa * sa / n;
    let var_b = sbb - sb * sb / n;
    if var_a <= 0.0 {
        return Err(StatError::UndefinedCorrelation("first"));
    }
    if var_b <= 0.0 {
        return Err(StatError::UndefinedCorrelation("second"));
    }
    Ok((sab - sa * sb / n) / (var_a * var_b).sqrt())
}

/// Pearson correlation over `sample_count` uniformly sampled adjacent pixel
/// pairs in the given direction.
pub fn adjacent_correlation<R: Rng>(
    img: &Grid<u8>,
    direction: Direction,
    sample_count: usize,
    rng: &mut R,
) -> Result<f64, StatError> {
    if sample_count < 2 {
        return Err(StatError::SampleCount(sample_count));
    }
    let (nx, ny) = pair_domain(img, direction)?;
    let (dx, dy) = direction.offset();
    pearson((0..sample_count).map(|_| {
        let x = rng.gen_range(0..nx);
        let y = rng.gen_range(0..ny);
        (*img.get(x, y) as f64, *img.get(x + dx, y + dy) as f64)
    }))
}

/// Pearson correlation over every adjacent pair in the given direction;
/// deterministic counterpart of [`adjacent_correlation`].
pub fn adjacent_correlation_full(img: &Grid<u8>, direction: Direction) -> Result<f64, StatError> {
    let (nx, ny) = pair_domain(img, direction)?;
    let (dx, dy) = direction.offset();
    pearson(
        (0..ny)
            .flat_map(|y| (0..nx).map(move |x| (x, y)))
            .map(|(x, y)| (*img.get(x, y) as f64, *img.get(x + dx, y + dy) as f64)),
    )
}

fn check_dims(a: &Grid<u8>, b: &Grid<u8>) -> Result<(), StatError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(StatError::DimensionMismatch {
            w1: a.width(),
            h1: a.height(),
            w2: b.width(),
            h2: b.height(),
        });
    }
    if a.data().is_empty() {
        return Err(StatError::Empty);
    }
    Ok(())
}

/// Percentage of positions where the two images differ.
pub fn npcr(a: &Grid<u8>, b: &Grid<u8>) -> Result<f64, StatError> {
    check_dims(a, b)?;
    let differing = a
        .data()
        .iter()
        .zip(b.data())
        .filter(|(x, y)| x != y)
        .count();
    Ok(100.0 * differing as f64 / a.data().len() as f64)
}

/// Mean absolute pixel difference normalized by 255, as a percentage.
pub fn uaci(a: &Grid<u8>, b: &Grid<u8>) -> Result<f64, StatError> {
    check_dims(a, b)?;
    let sum: u64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x as i32 - y as i32).unsigned_abs() as u64)
        .sum();
    Ok(100.0 * sum as f64 / (255.0 * a.data().len() as f64))
}

/// Mean squared error and peak signal-to-noise ratio in dB; the PSNR is
/// infinite exactly when the images are identical.
pub fn mse_psnr(a: &Grid<u8>, b: &Grid<u8>) -> Result<(f64, f64), StatError> {
    check_dims(a, b)?;
    let sum: u64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    let mse = sum as f64 / a.data().len() as f64;
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    };
    Ok((mse, psnr))
}

/// Encrypts the image and a copy with one pixel incremented mod 256 under
/// identical parameters and returns (NPCR, UACI) of the two ciphertexts.
///
/// The pipeline is a position permutation plus a fixed XOR stream, so a
/// one-pixel change moves to exactly one ciphertext cell: NPCR comes out at
/// 100/side^2 percent, quantifying the missing plaintext diffusion.
pub fn differential_pair(
    img: &Grid<u8>,
    params: &CipherParams,
    flip: (usize, usize),
) -> Result<(f64, f64), StatError> {
    let (x, y) = flip;
    if x >= img.width() || y >= img.height() {
        return Err(StatError::OutOfRange {
            x,
            y,
            width: img.width(),
            height: img.height(),
        });
    }
    let c1 = encrypt_image(img, params)?;
    let mut flipped = img.clone();
    flipped.set(x, y, img.get(x, y).wrapping_add(1));
    let c2 = encrypt_image(&flipped, params)?;
    Ok((npcr(&c1, &c2)?, uaci(&c1, &c2)?))
}

/// Flat metric bundle for one image or an image pair. Correlation fields
/// are `None` when undefined (zero variance); pair fields are `None` in
/// single-image mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub alphabet: usize,
    pub entropy_bits: f64,
    pub corr_h: Option<f64>,
    pub corr_v: Option<f64>,
    pub corr_d: Option<f64>,
    pub npcr_pct: Option<f64>,
    pub uaci_pct: Option<f64>,
    pub mse: Option<f64>,
    pub psnr_db: Option<f64>,
}

impl AnalysisReport {
    /// Entropy plus sampled correlations of a single image.
    pub fn single<R: Rng>(
        img: &Grid<u8>,
        sample_count: usize,
        rng: &mut R,
    ) -> Result<Self, StatError> {
        let entropy_bits = shannon_entropy(img.data())?;
        let mut corr = |d| adjacent_correlation(img, d, sample_count, &mut *rng).ok();
        Ok(Self {
            alphabet: 256,
            entropy_bits,
            corr_h: corr(Direction::Horizontal),
            corr_v: corr(Direction::Vertical),
            corr_d: corr(Direction::Diagonal),
            npcr_pct: None,
            uaci_pct: None,
            mse: None,
            psnr_db: None,
        })
    }

    /// Single-image metrics of the first image plus pairwise metrics.
    pub fn pair<R: Rng>(
        img1: &Grid<u8>,
        img2: &Grid<u8>,
        sample_count: usize,
        rng: &mut R,
    ) -> Result<Self, StatError> {
        check_dims(img1, img2)?;
        let mut report = Self::single(img1, sample_count, rng)?;
        report.npcr_pct = Some(npcr(img1, img2)?);
        report.uaci_pct = Some(uaci(img1, img2)?);
        let (mse, psnr) = mse_psnr(img1, img2)?;
        report.mse = Some(mse);
        report.psnr_db = Some(psnr);
        Ok(report)
    }
}

fn kv(f: &mut fmt::Formatter<'_>, key: &str, value: Option<f64>) -> fmt::Result {
    match value {
        Some(v) if v.is_infinite() => writeln!(f, "{key}=inf"),
        Some(v) => writeln!(f, "{key}={v:.6}"),
        None => writeln!(f, "{key}=undefined"),
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet={}", self.alphabet)?;
        writeln!(f, "entropy_bits={:.6}", self.entropy_bits)?;
        kv(f, "corr_horizontal", self.corr_h)?;
        kv(f, "corr_vertical", self.corr_v)?;
        kv(f, "corr_diagonal", self.corr_d)?;
        if self.npcr_pct.is_some() {
            kv(f, "npcr_pct", self.npcr_pct)?;
            kv(f, "uaci_pct", self.uaci_pct)?;
            kv(f, "mse", self.mse)?;
            kv(f, "psnr_db", self.psnr_db)?;
        }
        Ok(())
    }
}
