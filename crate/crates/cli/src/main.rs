use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pseudocone::bounds::{self, BoundOptions, BoundReport};
use pseudocone::codes::{self, CodeSpec, ParityCheckMatrix};
use pseudocone::decoder::{self, LlrVector, MlDecoder};
use pseudocone::generators::{self, DEFAULT_MAX_LENGTH, DEFAULT_RESOLUTION};
use pseudocone::polytope::{self, DEFAULT_MAX_CONSTRAINTS};
use pseudocone::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 3;
const EXIT_GUARD: u8 = 4;

/// Pseudo-codeword analysis of binary linear codes under LP decoding.
#[derive(Parser, Debug)]
#[command(name = "pseudocone", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PSEUDOCONE_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    csv: bool,

    /// Run past the size guards of brute-force steps.
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size, degree profile and (for small codes) weight distribution.
    Info {
        /// Built-in name or alist file.
        code: String,
    },
    /// Enumerate all cone generators and histogram their pseudo-weights.
    Spectrum {
        /// Built-in name or alist file.
        code: String,
        /// Histogram bin width.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Also write the generators (one exact ray per line) to this file.
        #[arg(long, value_name = "PATH")]
        generators: Option<PathBuf>,
    },
    /// Lower and upper bounds on the minimum pseudo-weight.
    Bounds {
        /// Built-in name or alist file.
        code: String,
        /// 1 for the box bound only, 2 to add the pairwise bound.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: u8,
        /// Search for a feasible point (upper bound).
        #[arg(long)]
        upper: bool,
        /// Restarts of the upper-bound search.
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        /// Seed of the upper-bound search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include wall-clock stage timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// LP-decode one received word.
    Decode {
        /// Built-in name or alist file.
        code: String,
        /// Noise standard deviation.
        #[arg(long)]
        sigma: f64,
        /// Received channel values; if omitted the all-zeros word is sent
        /// through a simulated channel.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        received: Option<Vec<f64>>,
        /// Channel noise seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo frame error rates of LP (and ML) decoding.
    Simulate {
        /// Built-in name or alist file.
        code: String,
        /// Noise standard deviations.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma: Vec<f64>,
        /// Frames per noise level.
        #[arg(long, default_value_t = 1000)]
        frames: u64,
        /// Channel noise seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Guard { .. } => EXIT_GUARD,
            Error::Parse { .. }
            | Error::InvalidMatrix(_)
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::Empty(_) => EXIT_INPUT,
            Error::Infeasible(_) | Error::Numerical(_) | Error::Overflow(_) => EXIT_FAILURE,
        };
        let message = match &e {
            Error::Guard { .. } => format!("{e} (rerun with --force to override)"),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{what}: {e}"),
    }
}

fn load(code: &str) -> Result<(CodeSpec, ParityCheckMatrix), Failure> {
    let spec = CodeSpec::parse(code);
    let h = spec.build().map_err(|e| io_failure(code, e))??;
    Ok((spec, h))
}

fn warn_forced(what: &str) {
    eprintln!("warning: --force: running {what} past its size guard");
}

/// Report body and whether it is CSV text or a JSON document.
enum Output {
    Json(Value),
    Text(String),
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Info { code } => info(cli, code),
        Command::Spectrum {
            code,
            resolution,
            generators,
        } => spectrum(cli, code, *resolution, generators.as_ref()),
        Command::Bounds {
            code,
            order,
            upper,
            restarts,
            seed,
            timings,
        } => {
            let (spec, h) = load(code)?;
            let opts = BoundOptions {
                second_order: *order == 2,
                upper_restarts: upper.then_some(*restarts),
                seed: *seed,
            };
            let report = bounds::bound_report(&spec.name(), &h, &spec.automorphisms()?, &opts)?;
            Ok(if cli.csv {
                Output::Text(format!("{}\n{}\n", BoundReport::CSV_HEADER, report.to_csv_row()))
            } else {
                Output::Json(report.to_json(*timings))
            })
        }
        Command::Decode {
            code,
            sigma,
            received,
            seed,
        } => decode(cli, code, *sigma, received.as_deref(), *seed),
        Command::Simulate {
            code,
            sigma,
            frames,
            seed,
        } => {
            let (_, h) = load(code)?;
            let table = decoder::simulate_fer(&h, sigma, *frames, *seed)?;
            Ok(if cli.csv {
                Output::Text(table.to_csv())
            } else {
                Output::Json(serde_json::to_value(&table).expect("serializable"))
            })
        }
    }
}

fn info(cli: &Cli, code: &str) -> Result<Output, Failure> {
    let (spec, h) = load(code)?;
    let guard = if cli.force {
        usize::MAX
    } else {
        codes::DEFAULT_MAX_DIMENSION
    };
    let k = h.dimension();
    if k > codes::DEFAULT_MAX_DIMENSION && cli.force {
        warn_forced("codeword enumeration");
    }
    let facts = (k <= guard)
        .then(|| codes::code_facts_with_guard(&h, guard))
        .transpose()?;
    let profile = |w: Vec<usize>| {
        let mut counts = std::collections::BTreeMap::new();
        for d in w {
            *counts.entry(d).or_insert(0usize) += 1;
        }
        counts
    };
    let cw = bounds::column_weight_bound(&h);
    if cli.csv {
        let d_min = facts
            .as_ref()
            .and_then(|f| f.d_min)
            .map(|d| d.to_string())
            .unwrap_or_default();
        return Ok(Output::Text(format!(
            "code,n,rows,k,four_cycle_free,d_min\n{},{},{},{},{},{}\n",
            spec.name(),
            h.cols(),
            h.rows(),
            k,
            h.is_four_cycle_free(),
            d_min
        )));
    }
    Ok(Output::Json(json!({
        "code": spec.name(),
        "n": h.cols(),
        "rows": h.rows(),
        "k": k,
        "column_weights": profile(h.column_weights()),
        "row_weights": profile(h.row_weights()),
        "four_cycle_free": h.is_four_cycle_free(),
        "column_weight_bound": cw,
        "facts": facts,
    })))
}

fn spectrum(cli: &Cli, code: &str, resolution: f64, dump: Option<&PathBuf>) -> Result<Output, Failure> {
    let (spec, h) = load(code)?;
    if h.cols() > DEFAULT_MAX_LENGTH && !cli.force {
        return Err(Failure {
            code: EXIT_GUARD,
            message: format!(
                "generator enumeration is limited to length {DEFAULT_MAX_LENGTH} (got {}); use `bounds` for long codes or --force",
                h.cols()
            ),
        });
    }
    if h.cols() > DEFAULT_MAX_LENGTH {
        warn_forced("generator enumeration");
    }
    let cone = polytope::fundamental_cone(&h);
    let gens = generators::enumerate_generators_with_guard(&cone, Some(&h), usize::MAX)?;
    let hist = generators::spectrum(&gens, resolution)?;
    // The minimum over all generators can never beat a valid lower bound.
    let first = bounds::first_order_bound(&cone)?;
    if hist.min_pw < first * (1.0 - 1e-9) {
        return Err(Failure {
            code: EXIT_FAILURE,
            message: format!(
                "internal error: enumerated minimum {} is below the first-order bound {}",
                hist.min_pw, first
            ),
        });
    }
    if let Some(path) = dump {
        std::fs::write(path, generators::format_generators(&gens))
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    eprintln!(
        "min_pw {} over {} generators",
        pseudocone::report::sig6(hist.min_pw),
        hist.generator_count
    );
    Ok(if cli.csv {
        Output::Text(hist.to_csv())
    } else {
        let mut v = serde_json::to_value(&hist).expect("serializable");
        v["code"] = json!(spec.name());
        v["n"] = json!(h.cols());
        Output::Json(v)
    })
}

fn decode(cli: &Cli, code: &str, sigma: f64, received: Option<&[f64]>, seed: u64) -> Result<Output, Failure> {
    let (spec, h) = load(code)?;
    let llr = match received {
        Some(r) => {
            if r.len() != h.cols() {
                return Err(Error::DimensionMismatch {
                    expected: h.cols(),
                    got: r.len(),
                }
                .into());
            }
            LlrVector::from_received(r.to_vec(), sigma)?
        }
        None => decoder::awgn_transmit(&vec![0; h.cols()], sigma, seed)?,
    };
    let limit = if cli.force { usize::MAX } else { DEFAULT_MAX_CONSTRAINTS };
    let p = polytope::fundamental_polytope_with_guard(&h, limit)?;
    let mut outcome = decoder::lp_decode(&p, llr.gamma())?;
    let ml_guard = if cli.force {
        usize::MAX
    } else {
        codes::DEFAULT_MAX_DIMENSION
    };
    let ml = match MlDecoder::new(&h, ml_guard) {
        Ok(d) => Some(d.decode(llr.gamma())?),
        Err(Error::Guard { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(word) = &ml {
        outcome.ml_agrees = Some(outcome.codeword().as_ref() == Some(word));
    }
    if cli.csv {
        let point: Vec<String> = outcome.point.iter().map(|&v| pseudocone::report::sig6(v)).collect();
        return Ok(Output::Text(format!(
            "status,cost,ml_agrees,point\n{},{},{},{}\n",
            serde_json::to_value(outcome.status)
                .expect("serializable")
                .as_str()
                .unwrap_or_default(),
            pseudocone::report::sig6(outcome.cost),
            outcome.ml_agrees.map(|b| b.to_string()).unwrap_or_default(),
            point.join(" ")
        )));
    }
    Ok(Output::Json(json!({
        "code": spec.name(),
        "channel": llr,
        "lp": outcome,
        "ml": ml,
    })))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    let body = match run(&cli) {
        Ok(Output::Json(v)) => format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable")),
        Ok(Output::Text(t)) => t,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::SUCCESS
}
