//! Chaotic-map cryptography laboratory.
//!
//! A two-layer cipher pairing Arnold-style cat-map position scrambling
//! (confusion) with a logistic-map keystream (diffusion), keyed by a
//! 40-hex-character secret, next to the analysis tooling that judges such
//! designs: minimal-period computation for lattice automorphisms, Lyapunov
//! screening of logistic control parameters, ciphertext statistics
//! (entropy, correlations, NPCR/UACI/MSE/PSNR), and a brute-force period
//! attack that recovers scrambled images within the proven 3N bound.

pub mod attack;
pub mod cipher;
pub mod fixtures;
pub mod grid;
pub mod key;
pub mod lyapunov;
pub mod maps;
pub mod period;
pub mod pgm;
pub mod stats;

pub use attack::{brute_force_unscramble, default_budget, score_naturalness, AttackResult};
pub use cipher::{
    decrypt, decrypt_image, encrypt, encrypt_image, keystream, keystream_bytes, CipherBlock,
    CipherError, KeystreamBlock, PlainText,
};
pub use grid::Grid;
pub use key::{avalanche_check, CipherParams, KeyError, SecretKey};
pub use lyapunov::{
    lyapunov_logistic, lyapunov_sweep, screen_parameter, LyapunovEstimate, SweepReport,
};
pub use maps::{GlmParams, LatticePoint, LogisticState, MapError, TorusMap};
pub use period::{
    check_period_bounds, closed_form_periods, period_fibonacci, period_matrix_power,
    BoundLadderReport, FibSequenceMod, PeriodMethod, PeriodResult,
};
pub use stats::AnalysisReport;
