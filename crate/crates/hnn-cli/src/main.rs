//! `hnn` command-line tool: inpainting, denoising, phase-transition sweeps,
//! noise simulation, masks, quality metrics, and Haar transforms over `.hnt1`
//! tensor files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver ran out of
//! iterations (results are still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use hnn_core::error::Error;
use hnn_core::experiments::{
    apply_noise, phase_map, random_mask, NoiseCase, PhaseGrid, Problem,
};
use hnn_core::haar::{fhwt2, ifhwt2, WaveletBlocks};
use hnn_core::metrics::metrics_report;
use hnn_core::solver::{hnn_mc, hnn_rpca, Lambda, Mask, RestorationResult, SolverConfig};
use hnn_core::tensor::Tensor3;
use hnn_core::{io, Result};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hnn",
    about = "Tensor image restoration with a Haar-domain nuclear norm",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Solver flags shared by `inpaint` and `denoise`; unset flags keep the
/// library defaults.
#[derive(Args, Debug, Clone)]
struct SolverFlags {
    #[arg(long = "mu-a")]
    mu_a: Option<f64>,
    #[arg(long = "mu-b")]
    mu_b: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

impl SolverFlags {
    fn apply(&self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(v) = self.mu_a {
            cfg.mu_a0 = v;
        }
        if let Some(v) = self.mu_b {
            cfg.mu_b0 = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Recover missing entries of a tensor given an observation mask.
    ///
    /// Odd spatial dimensions are reflect-padded to the next even size and
    /// cropped after reconstruction.
    Inpaint {
        #[arg(long)]
        input: PathBuf,
        /// Mask tensor file: entries above 0.5 are observed.
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Split a noisy tensor into a clean low-rank part plus sparse noise and
    /// write the clean part.
    Denoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sparsity weight: a positive number, or `auto` for
        /// 4/sqrt(max(M*N, S)).
        #[arg(long, default_value = "auto")]
        lambda: String,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Sweep success rates over Tucker rank and sampling rate (mc) or
    /// corruption fraction (rpca), writing the map as CSV.
    PhaseMap {
        /// `mc` or `rpca`.
        #[arg(long)]
        problem: String,
        /// Tensor dimensions, e.g. `30,30,30`.
        #[arg(long)]
        dims: String,
        /// Comma-separated Tucker ranks, e.g. `1,3,5,10,20`.
        #[arg(long)]
        ranks: String,
        /// Comma-separated second-axis values.
        #[arg(long)]
        axis2: String,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Corrupt a tensor with one of the six synthetic noise cases.
    Simulate {
        /// Noise case id in 1..=6.
        #[arg(long)]
        case: u8,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a uniform random observation mask.
    Mask {
        /// Sampling rate in (0, 1].
        #[arg(long)]
        rate: f64,
        /// Mask dimensions, e.g. `100,100,10`.
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print PSNR, SSIM, ERGAS, and SAM of a test tensor against a reference
    /// as one CSV row.
    Metrics {
        #[arg(long)]
        test: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// PSNR peak value.
        #[arg(long, default_value_t = 1.0)]
        peak: f64,
    },
    /// Haar transform: write the four coefficient tensors of the input to
    /// `<prefix>b1.hnt1` .. `<prefix>b4.hnt1`. With `--inverse`, read those
    /// four files instead and write the reconstruction to `--input`.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "out-prefix")]
        out_prefix: String,
        #[arg(long)]
        inverse: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Parameter problems are usage errors; anything arising from file contents
/// is a data error.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidSamplingRate(_)
        | Error::InvalidNoiseCase(_)
        | Error::InvalidNoiseParams(_)
        | Error::InvalidTuckerRank { .. }
        | Error::InvalidHaarOrder(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Inpaint {
            input,
            mask,
            out,
            solver,
        } => {
            let observed = io::load(input)?;
            let mask = io::load_mask(mask)?;
            if mask.dims() != observed.dims() {
                return Err(Error::DimMismatch {
                    context: format!(
                        "mask dims {:?} vs input dims {:?}",
                        mask.dims(),
                        observed.dims()
                    ),
                });
            }
            let cfg = solver.apply(SolverConfig::default());
            let dims = observed.dims();
            let (padded, was_padded) = pad_even(&observed);
            let result = if was_padded {
                eprintln!(
                    "note: reflect-padding {}x{} to {}x{} for the transform; output is cropped back",
                    dims.0,
                    dims.1,
                    padded.dims().0,
                    padded.dims().1
                );
                let padded_mask = pad_mask_even(&mask);
                hnn_mc(&padded, &padded_mask, &cfg)?
            } else {
                hnn_mc(&padded, &mask, &cfg)?
            };
            let x = crop(&result.x, dims);
            io::save(&x, out)?;
            Ok(report_convergence(&result))
        }
        Command::Denoise {
            input,
            out,
            lambda,
            solver,
        } => {
            let observed = io::load(input)?;
            let mut cfg = solver.apply(SolverConfig::default());
            cfg.lambda = parse_lambda(&lambda)?;
            let dims = observed.dims();
            let (padded, was_padded) = pad_even(&observed);
            if was_padded {
                eprintln!(
                    "note: reflect-padding {}x{} to {}x{} for the transform; output is cropped back",
                    dims.0,
                    dims.1,
                    padded.dims().0,
                    padded.dims().1
                );
            }
            let result = hnn_rpca(&padded, &cfg)?;
            let x = crop(&result.x, dims);
            io::save(&x, out)?;
            Ok(report_convergence(&result))
        }
        Command::PhaseMap {
            problem,
            dims,
            ranks,
            axis2,
            repeats,
            seed,
            out,
        } => {
            let problem = Problem::from_str(&problem)?;
            let dims = parse_dims(&dims)?;
            let ranks = parse_list::<usize>(&ranks, "ranks")?;
            let axis2 = parse_list::<f64>(&axis2, "axis2")?;
            let mut grid = PhaseGrid::new(ranks, axis2, seed);
            grid.dims = dims;
            grid.repeats = repeats;
            let map = phase_map(&grid, problem, &SolverConfig::synthetic_defaults())?;
            std::fs::write(out, map.to_csv())?;
            Ok(0)
        }
        Command::Simulate {
            case,
            input,
            seed,
            out,
        } => {
            let x = io::load(input)?;
            let case = NoiseCase::new(case, seed)?;
            let (noisy, _support) = apply_noise(&x, &case)?;
            io::save(&noisy, out)?;
            Ok(0)
        }
        Command::Mask {
            rate,
            dims,
            seed,
            out,
        } => {
            let dims = parse_dims(&dims)?;
            let mask = random_mask(dims, rate, seed)?;
            io::save_mask(&mask, out)?;
            Ok(0)
        }
        Command::Metrics {
            test,
            reference,
            peak,
        } => {
            if !(peak > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "peak must be positive, got {peak}"
                )));
            }
            let x = io::load(test)?;
            let r = io::load(reference)?;
            let report = metrics_report(&x, &r, peak)?;
            println!(
                "{},{},{},{}",
                report.psnr, report.ssim, report.ergas, report.sam
            );
            Ok(0)
        }
        Command::Transform {
            input,
            out_prefix,
            inverse,
        } => {
            if inverse {
                let blocks = [
                    io::load(block_path(&out_prefix, 1))?,
                    io::load(block_path(&out_prefix, 2))?,
                    io::load(block_path(&out_prefix, 3))?,
                    io::load(block_path(&out_prefix, 4))?,
                ];
                let blocks = WaveletBlocks::from_blocks(blocks)?;
                io::save(&ifhwt2(&blocks), input)?;
            } else {
                let t = io::load(input)?;
                let blocks = fhwt2(&t)?;
                for i in 0..4 {
                    io::save(blocks.block(i), block_path(&out_prefix, i + 1))?;
                }
            }
            Ok(0)
        }
    }
}

fn block_path(prefix: &str, index: usize) -> PathBuf {
    Path::new(&format!("{prefix}b{index}.hnt1")).to_path_buf()
}

fn report_convergence(result: &RestorationResult) -> u8 {
    if result.converged {
        0
    } else {
        eprintln!(
            "warning: no convergence within {} iterations (result written anyway)",
            result.iterations
        );
        EXIT_NO_CONVERGENCE
    }
}

fn parse_lambda(s: &str) -> Result<Lambda> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Lambda::Auto);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("lambda must be `auto` or a number, got '{s}'")))?;
    Ok(Lambda::Fixed(v))
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts = parse_list::<usize>(s, "dims")?;
    if parts.len() != 3 || parts.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "dims must be three positive integers M,N,S, got '{s}'"
        )));
    }
    Ok((parts[0], parts[1], parts[2]))
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse {what} entry '{part}'")))
        })
        .collect()
}

/// Reflect-pad odd spatial dimensions by duplicating the last row/column.
fn pad_even(t: &Tensor3) -> (Tensor3, bool) {
    let (m, n, s) = t.dims();
    let (pm, pn) = (m + m % 2, n + n % 2);
    if (pm, pn) == (m, n) {
        return (t.clone(), false);
    }
    let padded = Tensor3::from_fn(pm, pn, s, |i, j, k| {
        t.get(i.min(m - 1), j.min(n - 1), k)
    });
    (padded, true)
}

fn pad_mask_even(mask: &Mask) -> Mask {
    let (m, n, s) = mask.dims();
    let (pm, pn) = (m + m % 2, n + n % 2);
    Mask::from_fn((pm, pn, s), |i, j, k| {
        mask.is_observed(i.min(m - 1), j.min(n - 1), k)
    })
}

fn crop(t: &Tensor3, dims: (usize, usize, usize)) -> Tensor3 {
    if t.dims() == dims {
        return t.clone();
    }
    Tensor3::from_fn(dims.0, dims.1, dims.2, |i, j, k| t.get(i, j, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_parsing() {
        assert_eq!(parse_lambda("auto").unwrap(), Lambda::Auto);
        assert_eq!(parse_lambda("0.25").unwrap(), Lambda::Fixed(0.25));
        assert!(parse_lambda("wat").is_err());
    }

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("30,30,30").unwrap(), (30, 30, 30));
        assert_eq!(parse_dims(" 4, 6 ,2").unwrap(), (4, 6, 2));
        assert!(parse_dims("4,6").is_err());
        assert!(parse_dims("4,0,2").is_err());
        assert!(parse_dims("a,b,c").is_err());
    }

    #[test]
    fn padding_duplicates_edges_and_crops_back() {
        let t = Tensor3::from_fn(3, 5, 2, |i, j, k| (i + 10 * j + 100 * k) as f64);
        let (padded, was_padded) = pad_even(&t);
        assert!(was_padded);
        assert_eq!(padded.dims(), (4, 6, 2));
        assert_eq!(padded.get(3, 0, 1), t.get(2, 0, 1));
        assert_eq!(padded.get(0, 5, 0), t.get(0, 4, 0));
        assert_eq!(padded.get(3, 5, 1), t.get(2, 4, 1));
        assert_eq!(crop(&padded, (3, 5, 2)), t);
        let (same, was_padded) = pad_even(&crop(&padded, (4, 6, 2)));
        assert!(!was_padded);
        assert_eq!(same.dims(), (4, 6, 2));
    }
}
