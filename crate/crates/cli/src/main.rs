use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qutrit_cli::bench::{run_bench, synthesize, BenchConfig, SynthOptions, TargetGate};
use qutrit_cli::records::write_csv;
use qutrit_cli::{lower_bound_line, verify_word, Algorithm, CliError, Result};
use qutrit_core::exhaustive::{BudgetSplit, HornMode};
use qutrit_core::householder::DEFAULT_CONTRACTION;
use qutrit_core::normeq::all_norm_solutions;
use qutrit_core::synthesis::decompose;
use qutrit_core::RingMatrix3;
use serde_json::json;

#[derive(Parser)]
#[command(name = "qutrit", version, about = "Clifford+R synthesis of qutrit diagonal rotations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Exhaustive,
    Householder,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Exhaustive => Algorithm::Exhaustive,
            AlgorithmArg::Householder => Algorithm::Householder,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BudgetArg {
    Symmetric,
    Joint,
}

#[derive(Clone, Copy, ValueEnum)]
enum HornArg {
    Inclusive,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateArg {
    Rz,
    T3,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "householder")]
    algorithm: AlgorithmArg,
    /// Householder contraction factor in (0, 1].
    #[arg(long, default_value_t = DEFAULT_CONTRACTION)]
    contraction: f64,
    /// Householder: keep the closest candidate at the first feasible f.
    #[arg(long)]
    best_at_f: bool,
    /// Exhaustive: how ε is shared between the columns.
    #[arg(long, value_enum, default_value = "symmetric")]
    budget: BudgetArg,
    /// Exhaustive: `strict` also rejects diagonals on the Horn boundary.
    #[arg(long, value_enum, default_value = "inclusive")]
    horn: HornArg,
    #[arg(long)]
    workers: Option<usize>,
}

impl SynthArgs {
    fn options(&self) -> SynthOptions {
        SynthOptions {
            algorithm: self.algorithm.into(),
            contraction: self.contraction,
            best_at_f: self.best_at_f,
            budget: match self.budget {
                BudgetArg::Symmetric => BudgetSplit::Symmetric,
                BudgetArg::Joint => BudgetSplit::Joint,
            },
            horn: match self.horn {
                HornArg::Inclusive => HornMode::Inclusive,
                HornArg::Strict => HornMode::Strict,
            },
            workers: self.workers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Approximate R^Z(θ) (or T3) within ε and print the gate word.
    Synth {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "rz")]
        gate: GateArg,
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long)]
        json: bool,
    },
    /// Decompose an exact unitary given as JSON {"f": .., "rows": [[[a,b],..],..]}.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Multiply a token word exactly and report its distance to R^Z(θ).
    Verify {
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        json: bool,
    },
    /// All Eisenstein integers of norm N, one per line.
    Normeq { n: i128 },
    /// Lower-bound reference line for dimension d.
    LowerBound {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Benchmark over random angles and a list of tolerances, with fits.
    Bench {
        #[arg(long, default_value_t = 50)]
        angles: usize,
        /// Comma-separated tolerances.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "rz")]
        gate: GateArg,
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also fit wall time against ε (informational).
        #[arg(long)]
        fit_runtime: bool,
        /// Write zero wall times so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

fn gate_of(g: GateArg) -> TargetGate {
    match g {
        GateArg::Rz => TargetGate::Rz,
        GateArg::T3 => TargetGate::T3,
    }
}

fn emit_json<W: Write>(mut out: W, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Synth {
            theta,
            eps,
            gate,
            synth,
            json,
        } => {
            let s = synthesize(gate_of(gate), theta, eps, &synth.options())?;
            if json {
                emit_json(
                    &mut out,
                    &json!({
                        "theta": theta,
                        "eps": eps,
                        "algorithm": Algorithm::from(synth.algorithm),
                        "f": s.f,
                        "n_r": s.word.n_r,
                        "distance": s.distance,
                        "matrix": s.matrix,
                        "word": s.word,
                    }),
                )?;
            } else {
                writeln!(out, "{}", s.word)?;
                writeln!(out, "n_r={} f={} distance={:e} phase={}", s.word.n_r, s.f, s.distance, s.word.phase)?;
            }
        }
        Command::Decompose { input, json } => {
            let m: RingMatrix3 = serde_json::from_reader(File::open(&input)?)?;
            let w = decompose(&m)?;
            if json {
                emit_json(&mut out, &w)?;
            } else {
                writeln!(out, "{w}")?;
                writeln!(out, "n_r={} phase={}", w.n_r, w.phase)?;
            }
        }
        Command::Verify { word, theta, json } => {
            let v = verify_word(&word, theta)?;
            if json {
                emit_json(&mut out, &v)?;
            } else {
                writeln!(out, "distance={:e} phase={} n_r={}", v.distance, v.phase, v.n_r)?;
            }
        }
        Command::Normeq { n } => {
            let sols = all_norm_solutions(n);
            for s in &sols {
                writeln!(out, "{s}")?;
            }
            if sols.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::LowerBound { d, eps } => {
            let l = lower_bound_line(d)?;
            writeln!(out, "N >= {:.4}*log10(1/eps) + {:.4}", l.slope_log10, l.intercept)?;
            if let Some(e) = eps {
                writeln!(out, "{:.6}", qutrit_cli::lower_bound(d, e)?)?;
            }
        }
        Command::Bench {
            angles,
            eps,
            seed,
            gate,
            synth,
            out: format,
            output,
            fit_runtime,
            no_timing,
        } => {
            let cfg = BenchConfig {
                angles,
                eps_list: eps,
                seed,
                gate: gate_of(gate),
                synth: synth.options(),
                record_timing: !no_timing,
            };
            let report = run_bench(&cfg, fit_runtime)?;
            let sink: Box<dyn Write> = match &output {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(&mut out),
            };
            match format {
                OutFormat::Csv => {
                    write_csv(sink, seed, &report.records)?;
                    if let Some(fit) = &report.fit {
                        eprintln!(
                            "fit: N_R = {:.4} + {:.4}*log10(1/eps) (stderr {:.4}, {:.4}); slope_log3 = {:.4}",
                            fit.intercept, fit.slope_log10, fit.stderr_intercept, fit.stderr_slope, fit.slope_log3
                        );
                    }
                    if let Some(rt) = &report.runtime {
                        eprintln!("runtime: t ~ eps^-{:.3}", rt.exponent);
                    }
                }
                OutFormat::Json => emit_json(sink, &report)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        // A closed stdout (e.g. piping into `head`) is not an error.
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
