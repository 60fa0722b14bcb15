//! Secret-key generation and the deterministic extraction of the four
//! cipher parameters from the 40-hex-character key.
//!
//! Layout of the key: four 10-character chunks. Chunk 1 drives the logistic
//! control parameter r, chunk 2 the initial state x0, chunk 3 the logarithm
//! base, and the middle character of chunk 4 (index 35) the scramble
//! iteration count. Characters map to decimal digits as hexvalue mod 10,
//! which makes {0,A}, {1,B}, ..., {5,F} collision classes; positions 30-34
//! and 36-39 are unused. Both facts are surfaced by [`avalanche_check`]
//! rather than hidden.

use rand::{CryptoRng, RngCore};
use thiserror::Error;

pub const KEY_LEN: usize = 40;
const HEX: &[u8; 16] = b"0123456789ABCDEF";

#[derive(Debug, Error, PartialEq)]
pub enum KeyError {
    #[error("secret key must be exactly {KEY_LEN} characters, got {0}")]
    Length(usize),
    #[error("secret key contains non-hexadecimal character {0:?}")]
    Alphabet(char),
    #[error("entropy source failure: {0}")]
    Entropy(String),
    #[error("parameter {name} out of range: {value}")]
    ParameterRange { name: &'static str, value: f64 },
}

/// The cryptosystem's sole secret: 40 uppercase hex characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    chars: String,
}

impl SecretKey {
    /// Accepts upper- or lowercase hex and stores the canonical uppercase
    /// form; anything else is rejected.
    pub fn parse(s: &str) -> Result<Self, KeyError> {
        if s.chars().count() != KEY_LEN {
            return Err(KeyError::Length(s.chars().count()));
        }
        let mut chars = String::with_capacity(KEY_LEN);
        for c in s.chars() {
            let up = c.to_ascii_uppercase();
            if !up.is_ascii_hexdigit() {
                return Err(KeyError::Alphabet(c));
            }
            chars.push(up);
        }
        Ok(Self { chars })
    }

    /// 40 uniform independent hex characters from a cryptographically
    /// strong source. Entropy failures propagate instead of panicking.
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Result<Self, KeyError> {
        let mut bytes = [0u8; KEY_LEN / 2];
        rng.try_fill_bytes(&mut bytes)
            .map_err(|e| KeyError::Entropy(e.to_string()))?;
        let mut chars = String::with_capacity(KEY_LEN);
        for b in bytes {
            chars.push(HEX[(b >> 4) as usize] as char);
            chars.push(HEX[(b & 0x0F) as usize] as char);
        }
        Ok(Self { chars })
    }

    /// Regenerates until the extracted (r, x0) passes the Lyapunov screen;
    /// returns the key and the number of attempts it took.
    pub fn generate_screened<R: RngCore + CryptoRng>(rng: &mut R) -> Result<(Self, u32), KeyError> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            let key = Self::generate(rng)?;
            let params = key.extract();
            if crate::lyapunov::screen_parameter(params.r(), params.x0())
                .expect("extracted parameters are in domain")
            {
                return Ok((key, attempts));
            }
        }
    }

    pub fn as_str(&self) -> &str {
        &self.chars
    }

    fn digits(&self, range: std::ops::Range<usize>) -> Vec<u8> {
        self.chars.as_bytes()[range]
            .iter()
            .map(|&c| hexval(c) % 10)
            .collect()
    }

    /// Deterministic parameter extraction; total on every valid key.
    pub fn extract(&self) -> CipherParams {
        // r = 3.d1..d10 with the first digit promoted to 6 when below 6,
        // pinning r into [3.6, 4).
        let mut d = self.digits(0..10);
        if d[0] < 6 {
            d[0] = 6;
        }
        let r: f64 = format!("3.{}", digit_string(&d)).parse().unwrap();

        // x0 = 0.d1..d10; an all-zero chunk falls back to 1e-10 because
        // x0 = 0 is a fixed point of the keystream map.
        let mut d = self.digits(10..20);
        if d.iter().all(|&v| v == 0) {
            d[9] = 1;
        }
        let x0: f64 = format!("0.{}", digit_string(&d)).parse().unwrap();

        // base = 1.d2..d10 (integer part pinned to 1); an all-zero fraction
        // falls back to 1.5 so the base stays strictly above 1.
        let mut d = self.digits(20..30);
        d[0] = 1;
        if d[1..].iter().all(|&v| v == 0) {
            d[1] = 5;
        }
        let base: f64 = format!("1.{}", digit_string(&d[1..])).parse().unwrap();

        // Iterations: hex value of the middle character of chunk 4, with
        // zero mapped to one so the confusion layer is never skipped.
        let mut iterations = hexval(self.chars.as_bytes()[35]) as u32;
        if iterations == 0 {
            iterations = 1;
        }

        CipherParams::new(r, x0, base, iterations)
            .expect("extraction keeps every parameter inside its domain")
    }
}

impl std::fmt::Display for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.chars)
    }
}

impl std::str::FromStr for SecretKey {
    type Err = KeyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn hexval(c: u8) -> u8 {
    match c {
        b'0'..=b'9' => c - b'0',
        b'A'..=b'F' => c - b'A' + 10,
        _ => unreachable!("key is validated hex"),
    }
}

fn digit_string(digits: &[u8]) -> String {
    digits.iter().map(|d| (b'0' + d) as char).collect()
}

/// The four extracted parameters driving both cipher layers.
///
/// r lies in [3.6, 4) (3.6 exactly only for the pathological all-low first
/// chunk), x0 in (0, 1), base in (1, 2), iterations in [1, 16].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CipherParams {
    r: f64,
    x0: f64,
    base: f64,
    iterations: u32,
}

impl CipherParams {
    pub fn new(r: f64, x0: f64, base: f64, iterations: u32) -> Result<Self, KeyError> {
        if !(3.6..4.0).contains(&r) {
            return Err(KeyError::ParameterRange {
                name: "r",
                value: r,
            });
        }
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(KeyError::ParameterRange {
                name: "x0",
                value: x0,
            });
        }
        if !(base > 1.0 && base < 2.0) {
            return Err(KeyError::ParameterRange {
                name: "base",
                value: base,
            });
        }
        if !(1..=16).contains(&iterations) {
            return Err(KeyError::ParameterRange {
                name: "iterations",
                value: iterations as f64,
            });
        }
        Ok(Self {
            r,
            x0,
            base,
            iterations,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }
}

/// A single substitution in the first 30 positions that left every
/// extracted parameter unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AvalancheViolation {
    pub position: usize,
    pub original: char,
    pub alternative: char,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvalancheReport {
    pub violations: Vec<AvalancheViolation>,
}

impl AvalancheReport {
    pub fn violating_positions(&self) -> std::collections::BTreeSet<usize> {
        self.violations.iter().map(|v| v.position).collect()
    }
}

/// Exhaustively substitutes each of the 15 alternative hex characters at
/// each of the first 30 positions and records the substitutions that change
/// no parameter. For a position p and characters c, c' the substitution is
/// invisible exactly when the position's digit transformation collides:
/// hexvalue mod 10 at most positions, additionally the promote-to-6 rule at
/// position 0, and unconditionally at position 20 where the digit is forced
/// to 1.
pub fn avalanche_check(key: &SecretKey) -> AvalancheReport {
    let original = key.extract();
    let mut violations = Vec::new();
    let bytes = key.as_str().as_bytes().to_vec();
    for position in 0..30 {
        for &alt in HEX.iter() {
            if alt == bytes[position] {
                continue;
            }
            let mut mutated = bytes.clone();
            mutated[position] = alt;
            let mutated_key = SecretKey {
                chars: String::from_utf8(mutated).unwrap(),
            };
            if mutated_key.extract() == original {
                violations.push(AvalancheViolation {
                    position,
                    original: bytes[position] as char,
                    alternative: alt as char,
                });
            }
        }
    }
    AvalancheReport { violations }
}
