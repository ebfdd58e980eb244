use std::path::PathBuf;
use std::process::ExitCode;

use cachelab::analysis::RdMode;
use cachelab::workload::PatternSpec;
use cachelab_cli::{commands, CliError};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Cache replacement laboratory: generate request traces, replay them
/// through replacement policies, and analyze the results.
#[derive(Parser)]
#[command(name = "cachelab", version, max_term_width = 100)]
struct Cli {
    /// Worker threads for experiment fan-out.
    #[arg(long, global = true, env = "ICN_CACHE_LAB_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic request trace.
    #[command(subcommand)]
    Generate(Generate),
    /// Run the experiment described by a config file.
    Simulate {
        /// TOML experiment description.
        #[arg(long)]
        config: PathBuf,
    },
    /// Offline analytics over traces.
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Subcommand)]
enum Generate {
    /// Independent Zipf draws at content granularity.
    Zipf {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        contents: u64,
        #[arg(long)]
        requests: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// One of the canonical access patterns.
    Pattern(PatternArgs),
    /// Zipf draws expanded into paced chunk requests.
    Chunked {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        contents: u64,
        #[arg(long)]
        requests: u64,
        #[arg(long)]
        seed: u64,
        /// Chunk size in KB (1000 bytes).
        #[arg(long)]
        chunk_kb: f64,
        /// Download bitrate in kbit/s.
        #[arg(long)]
        bitrate_kbps: f64,
        /// Content size in KB.
        #[arg(long, default_value_t = 60.0)]
        content_kb: f64,
        /// Content request arrivals per virtual second.
        #[arg(long, default_value_t = 1)]
        arrivals_per_sec: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stream matching given total/unique/repeated counts, for trace-shaped
    /// synthetic workloads.
    Profile {
        #[arg(long)]
        total: u64,
        #[arg(long)]
        unique: u64,
        #[arg(long)]
        repeated: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long)]
    kind: PatternKind,
    /// Scan length.
    #[arg(long, default_value_t = 100)]
    length: u64,
    /// Loop period.
    #[arg(long, default_value_t = 10)]
    period: u64,
    /// Loop repetitions.
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// Correlated burst set size.
    #[arg(long, default_value_t = 2)]
    set: u64,
    /// Correlated burst length.
    #[arg(long, default_value_t = 6)]
    burst: u64,
    /// Number of correlated bursts.
    #[arg(long, default_value_t = 10)]
    bursts: u64,
    /// Fickle working-set size.
    #[arg(long, default_value_t = 8)]
    working_set: u64,
    /// Fickle phase length.
    #[arg(long, default_value_t = 50)]
    phase_len: u64,
    /// Fickle phase count.
    #[arg(long, default_value_t = 10)]
    phases: u64,
    /// Fickle id shift per phase.
    #[arg(long, default_value_t = 8)]
    shift: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum PatternKind {
    Scan,
    Loop,
    Correlated,
    Fickle,
}

#[derive(Subcommand)]
enum Analyze {
    /// Cumulative distribution of reuse distances.
    RdCdf {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = RdModeArg::Distinct)]
        mode: RdModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank-frequency table.
    Popularity {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tumbling-window h1/h2/h3 statistics and pooled beta/gamma.
    BetaGamma {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Control-state cost of a policy in bits.
    Overhead {
        #[arg(long)]
        policy: String,
        #[arg(long)]
        entries: u64,
        #[arg(long)]
        pointer_bits: u32,
        #[arg(long, default_value_t = 32)]
        counter_bits: u32,
        #[arg(long, default_value_t = 0)]
        ghosts: u64,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum RdModeArg {
    Distinct,
    Raw,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Generate(Generate::Zipf { alpha, contents, requests, seed, out }) => {
            commands::generate_zipf(alpha, contents, requests, seed, &out)
        }
        Command::Generate(Generate::Pattern(args)) => {
            let spec = match args.kind {
                PatternKind::Scan => PatternSpec::Scan { length: args.length },
                PatternKind::Loop => PatternSpec::Loop { period: args.period, reps: args.reps },
                PatternKind::Correlated => PatternSpec::Correlated {
                    set_size: args.set,
                    burst_len: args.burst,
                    bursts: args.bursts,
                },
                PatternKind::Fickle => PatternSpec::Fickle {
                    working_set: args.working_set,
                    phase_len: args.phase_len,
                    phases: args.phases,
                    shift: args.shift,
                },
            };
            commands::generate_pattern(&spec, &args.out)
        }
        Command::Generate(Generate::Chunked {
            alpha,
            contents,
            requests,
            seed,
            chunk_kb,
            bitrate_kbps,
            content_kb,
            arrivals_per_sec,
            out,
        }) => commands::generate_chunked(
            alpha,
            contents,
            requests,
            seed,
            chunk_kb,
            bitrate_kbps,
            content_kb,
            arrivals_per_sec,
            &out,
        ),
        Command::Generate(Generate::Profile { total, unique, repeated, seed, out }) => {
            commands::generate_profile(total, unique, repeated, seed, &out)
        }
        Command::Simulate { config } => commands::simulate_from_path(&config),
        Command::Analyze(Analyze::RdCdf { trace, mode, out }) => {
            let mode = match mode {
                RdModeArg::Distinct => RdMode::Distinct,
                RdModeArg::Raw => RdMode::Raw,
            };
            commands::analyze_rd_cdf(&trace, mode, &out)
        }
        Command::Analyze(Analyze::Popularity { trace, out }) => {
            commands::analyze_popularity(&trace, &out)
        }
        Command::Analyze(Analyze::BetaGamma { trace, window, out }) => {
            commands::analyze_beta_gamma(&trace, window, out.as_deref())
        }
        Command::Analyze(Analyze::Overhead {
            policy,
            entries,
            pointer_bits,
            counter_bits,
            ghosts,
        }) => commands::analyze_overhead(&policy, entries, pointer_bits, counter_bits, ghosts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // Help and version requests.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
