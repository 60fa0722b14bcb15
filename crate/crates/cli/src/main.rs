//! `chaoslab` — command-line front end for the chaotic-map cryptography
//! laboratory: key generation, text/PGM encryption, ciphertext statistics,
//! period tables, Lyapunov sweeps, and the brute-force period attack.
//!
//! Exit codes are a stable scripting contract: 0 success, 2 entropy-source
//! failure, 3 decryption integrity failure, 4 format or domain error,
//! 5 iteration budget exceeded, 6 attack miss.

use chaoslab::attack;
use chaoslab::cipher::{self, CipherBlock, CipherError, PlainText};
use chaoslab::key::{KeyError, SecretKey};
use chaoslab::lyapunov::{self, LyapunovError};
use chaoslab::maps::TorusMap;
use chaoslab::period::{self, PeriodError};
use chaoslab::pgm::{self, PgmError};
use chaoslab::stats::{AnalysisReport, StatError};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::rngs::{OsRng, StdRng};
use rand::SeedableRng;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_ENTROPY: u8 = 2;
const EXIT_INTEGRITY: u8 = 3;
const EXIT_FORMAT: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_ATTACK_MISS: u8 = 6;

#[derive(Parser)]
#[command(
    name = "chaoslab",
    version,
    about = "Chaotic-map cryptography laboratory",
    after_help = "The secret key is taken from --key or the CHAOSLAB_KEY \
                  environment variable (flag wins)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KeyArg {
    /// 40-character hex secret key (overrides CHAOSLAB_KEY)
    #[arg(long, env = "CHAOSLAB_KEY", hide_env_values = true)]
    key: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a fresh 40-hex-character secret key
    Keygen {
        /// Also print the extracted cipher parameters
        #[arg(long)]
        show_params: bool,
        /// Regenerate until the parameters pass the Lyapunov screen
        #[arg(long)]
        screened: bool,
    },
    /// Encrypt a printable-ASCII text file (or a PGM with --image)
    Encrypt {
        infile: PathBuf,
        outfile: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        /// Treat the input as a square binary PGM image
        #[arg(long)]
        image: bool,
        /// Seed the decoy-cell sampler for reproducible ciphertexts
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a ciphertext container or an encrypted PGM (auto-detected)
    Decrypt {
        infile: PathBuf,
        outfile: PathBuf,
        #[command(flatten)]
        key: KeyArg,
    },
    /// Entropy/correlation report for one PGM, plus NPCR/UACI/MSE/PSNR for a pair
    Analyze {
        file1: PathBuf,
        file2: Option<PathBuf>,
        /// Seed for correlation-pair sampling
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        /// Number of sampled adjacent pairs per direction
        #[arg(long, default_value_t = 4096)]
        sample_pairs: usize,
        /// Write the 256-line histogram of file1 to this path
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Minimal periods of lattice maps and the period-bound table
    Period {
        /// Classical map: minimal period mod N
        #[arg(long, value_name = "N", conflicts_with_all = ["general", "table"])]
        classical: Option<u64>,
        /// Generalized map: minimal period of (a, b) mod N
        #[arg(long, num_args = 3, value_names = ["A", "B", "N"], conflicts_with = "table")]
        general: Option<Vec<u64>>,
        /// Bound table for every N in [2, N_MAX]
        #[arg(long, value_name = "N_MAX")]
        table: Option<u64>,
    },
    /// Lyapunov exponent of the logistic map: single point or sweep
    Lyapunov {
        /// Single estimate at (r, x0)
        #[arg(long, num_args = 2, value_names = ["R", "X0"], conflicts_with = "sweep")]
        point: Option<Vec<f64>>,
        /// Sweep [R_MIN, R_MAX] at STEP
        #[arg(long, num_args = 3, value_names = ["R_MIN", "R_MAX", "STEP"])]
        sweep: Option<Vec<f64>>,
        /// Initial state for sweeps
        #[arg(long, default_value_t = 0.2)]
        x0: f64,
        /// Write sweep CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force unscramble of a cat-map-scrambled PGM
    Attack {
        scrambled: PathBuf,
        /// Ground-truth original; exit 6 if the best candidate differs
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Iteration budget (default 3N)
        #[arg(long)]
        budget: Option<u64>,
        /// Write the best candidate image here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the iteration/score trace CSV here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<CipherError> for CliError {
    fn from(e: CipherError) -> Self {
        let code = match &e {
            CipherError::Integrity { .. } => EXIT_INTEGRITY,
            _ => EXIT_FORMAT,
        };
        Self::new(code, e.to_string())
    }
}

impl From<KeyError> for CliError {
    fn from(e: KeyError) -> Self {
        let code = match &e {
            KeyError::Entropy(_) => EXIT_ENTROPY,
            _ => EXIT_FORMAT,
        };
        Self::new(code, e.to_string())
    }
}

impl From<PgmError> for CliError {
    fn from(e: PgmError) -> Self {
        Self::new(EXIT_FORMAT, e.to_string())
    }
}

impl From<StatError> for CliError {
    fn from(e: StatError) -> Self {
        Self::new(EXIT_FORMAT, e.to_string())
    }
}

impl From<LyapunovError> for CliError {
    fn from(e: LyapunovError) -> Self {
        Self::new(EXIT_FORMAT, e.to_string())
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        Self::new(EXIT_BUDGET, e.to_string())
    }
}

impl From<attack::AttackError> for CliError {
    fn from(e: attack::AttackError) -> Self {
        Self::new(EXIT_FORMAT, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FORMAT)
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Keygen {
            show_params,
            screened,
        } => cmd_keygen(show_params, screened),
        Command::Encrypt {
            infile,
            outfile,
            key,
            image,
            seed,
        } => cmd_encrypt(&infile, &outfile, key, image, seed),
        Command::Decrypt {
            infile,
            outfile,
            key,
        } => cmd_decrypt(&infile, &outfile, key),
        Command::Analyze {
            file1,
            file2,
            seed,
            sample_pairs,
            histogram,
        } => cmd_analyze(
            &file1,
            file2.as_deref(),
            seed,
            sample_pairs,
            histogram.as_deref(),
        ),
        Command::Period {
            classical,
            general,
            table,
        } => cmd_period(classical, general, table),
        Command::Lyapunov {
            point,
            sweep,
            x0,
            out,
        } => cmd_lyapunov(point, sweep, x0, out.as_deref()),
        Command::Attack {
            scrambled,
            truth,
            budget,
            out,
            trace,
        } => cmd_attack(
            &scrambled,
            truth.as_deref(),
            budget,
            out.as_deref(),
            trace.as_deref(),
        ),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path)
        .map_err(|e| CliError::new(EXIT_FORMAT, format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temp file in the destination directory plus an atomic
/// rename, so interrupted runs never leave partial artifacts.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| {
        CliError::new(EXIT_FORMAT, format!("cannot write {}: {e}", path.display()))
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path)
        .map_err(|e| CliError::new(EXIT_FORMAT, format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn resolve_key(key: KeyArg) -> Result<SecretKey, CliError> {
    let raw = key
        .key
        .ok_or_else(|| CliError::new(EXIT_FORMAT, "no key: pass --key or set CHAOSLAB_KEY"))?;
    Ok(SecretKey::parse(&raw)?)
}

fn cmd_keygen(show_params: bool, screened: bool) -> Result<(), CliError> {
    let (key, attempts) = if screened {
        SecretKey::generate_screened(&mut OsRng)?
    } else {
        (SecretKey::generate(&mut OsRng)?, 1)
    };
    println!("{key}");
    if screened {
        println!("attempts={attempts}");
    }
    if show_params {
        let p = key.extract();
        println!("r={}", p.r());
        println!("x0={}", p.x0());
        println!("base={}", p.base());
        println!("iterations={}", p.iterations());
    }
    Ok(())
}

fn cmd_encrypt(
    infile: &Path,
    outfile: &Path,
    key: KeyArg,
    image: bool,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let params = resolve_key(key)?.extract();
    let bytes = read_input(infile)?;
    if image {
        let img = pgm::read_pgm(&bytes)?;
        let ct = cipher::encrypt_image(&img, &params)?;
        write_atomic(outfile, &pgm::write_pgm(&ct))
    } else {
        let pt = PlainText::from_bytes(bytes)?;
        let block = match seed {
            Some(s) => cipher::encrypt(&pt, &params, &mut StdRng::seed_from_u64(s))?,
            None => cipher::encrypt(&pt, &params, &mut OsRng)?,
        };
        write_atomic(outfile, &block.to_bytes())
    }
}

fn cmd_decrypt(infile: &Path, outfile: &Path, key: KeyArg) -> Result<(), CliError> {
    let params = resolve_key(key)?.extract();
    let bytes = read_input(infile)?;
    if bytes.starts_with(&cipher::CONTAINER_MAGIC) {
        let block = CipherBlock::from_bytes(&bytes)?;
        let pt = cipher::decrypt(&block, &params)?;
        write_atomic(outfile, pt.as_bytes())
    } else if bytes.starts_with(b"P5") {
        let img = pgm::read_pgm(&bytes)?;
        let recovered = cipher::decrypt_image(&img, &params)?;
        write_atomic(outfile, &pgm::write_pgm(&recovered))
    } else {
        Err(CliError::new(
            EXIT_FORMAT,
            "input is neither a ciphertext container nor a PGM image",
        ))
    }
}

fn cmd_analyze(
    file1: &Path,
    file2: Option<&Path>,
    seed: u64,
    sample_pairs: usize,
    histogram: Option<&Path>,
) -> Result<(), CliError> {
    let img1 = pgm::read_pgm(&read_input(file1)?)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let report = match file2 {
        Some(path) => {
            let img2 = pgm::read_pgm(&read_input(path)?)?;
            AnalysisReport::pair(&img1, &img2, sample_pairs, &mut rng)?
        }
        None => AnalysisReport::single(&img1, sample_pairs, &mut rng)?,
    };
    print!("{report}");
    if let Some(path) = histogram {
        write_atomic(
            path,
            chaoslab::stats::histogram_lines(img1.data()).as_bytes(),
        )?;
    }
    Ok(())
}

fn cmd_period(
    classical: Option<u64>,
    general: Option<Vec<u64>>,
    table: Option<u64>,
) -> Result<(), CliError> {
    if let Some(n) = classical {
        let map = TorusMap::classical(n).map_err(|e| CliError::new(EXIT_FORMAT, e.to_string()))?;
        println!("{}", period::period_matrix_power(&map)?.period);
        return Ok(());
    }
    if let Some(args) = general {
        let (a, b, n) = (args[0], args[1], args[2]);
        let map = TorusMap::new(a, b, n).map_err(|e| CliError::new(EXIT_FORMAT, e.to_string()))?;
        println!("{}", period::period_matrix_power(&map)?.period);
        return Ok(());
    }
    if let Some(n_max) = table {
        if n_max < 2 {
            return Err(CliError::new(EXIT_FORMAT, "N_MAX must be at least 2"));
        }
        print!("{}", period::check_period_bounds(n_max).to_lines());
        return Ok(());
    }
    Err(CliError::new(
        EXIT_FORMAT,
        "pass one of --classical, --general, or --table",
    ))
}

fn cmd_lyapunov(
    point: Option<Vec<f64>>,
    sweep: Option<Vec<f64>>,
    x0: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(args) = point {
        let est = lyapunov::lyapunov_logistic(
            args[0],
            args[1],
            lyapunov::DEFAULT_BURN_IN,
            lyapunov::POINT_SAMPLES,
        )?;
        println!("lambda={:.6}", est.lambda);
        if est.singular {
            println!("singular=true");
        }
        return Ok(());
    }
    if let Some(args) = sweep {
        let report = lyapunov::lyapunov_sweep(args[0], args[1], args[2], x0)?;
        let csv = report.to_csv();
        match out {
            Some(path) => write_atomic(path, csv.as_bytes())?,
            None => print!("{csv}"),
        }
        return Ok(());
    }
    Err(CliError::new(EXIT_FORMAT, "pass one of --point or --sweep"))
}

fn cmd_attack(
    scrambled: &Path,
    truth: Option<&Path>,
    budget: Option<u64>,
    out: Option<&Path>,
    trace: Option<&Path>,
) -> Result<(), CliError> {
    let img = pgm::read_pgm(&read_input(scrambled)?)?;
    if !img.is_square() {
        return Err(CliError::new(
            EXIT_FORMAT,
            format!("image must be square, got {}x{}", img.width(), img.height()),
        ));
    }
    let truth_img = match truth {
        Some(path) => Some(pgm::read_pgm(&read_input(path)?)?),
        None => None,
    };
    let budget = budget.unwrap_or_else(|| attack::default_budget(img.width()));
    let started = std::time::Instant::now();
    let result = attack::brute_force_unscramble(&img, budget, truth_img.as_ref())?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    println!("recovered_iteration={}", result.recovered_iteration);
    println!("score={:.6}", result.best_score());
    println!("elapsed_ms={elapsed_ms:.1}");
    if let Some(path) = out {
        write_atomic(path, &pgm::write_pgm(&result.best_candidate))?;
    }
    if let Some(path) = trace {
        write_atomic(path, result.trace_csv().as_bytes())?;
    }
    match result.succeeded {
        Some(true) => {
            println!("match=true");
            Ok(())
        }
        Some(false) => Err(CliError::new(
            EXIT_ATTACK_MISS,
            format!(
                "best candidate (iteration {}) does not match the original",
                result.recovered_iteration
            ),
        )),
        None => Ok(()),
    }
}
