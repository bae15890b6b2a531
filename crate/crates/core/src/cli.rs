//! `wstate` command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or parse error,
//! 3 capacity exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    angle_sensitivity, gate_growth_table, growth_csv, pdc_rates, plate_angle_csv,
    plate_angle_table, report_json, resource_report, sensitivity_csv, PdcModel,
    DEFAULT_FAILURE_THRESHOLD, DEFAULT_PDC_DELTA,
};
use crate::circuit::Level;
use crate::error::Error;
use crate::format;
use crate::lowering::lower;
use crate::simulator::{fidelity, w_reference_on, BackendChoice, SimConfig, Simulator};
use crate::synthesis::build_w_circuit;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;

/// Minimum fidelity `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "wstate",
    version,
    about = "Deterministic W-state circuits: synthesis, lowering, simulation, analysis"
)]
struct Cli {
    /// Largest register the dense backend accepts.
    #[arg(long, global = true, default_value_t = crate::simulator::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    /// `--backend auto` uses dense up to this many qubits.
    #[arg(long, global = true, default_value_t = crate::simulator::DEFAULT_AUTO_DENSE_MAX)]
    auto_dense_max: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Dense,
    Sparse,
    Auto,
}

impl From<BackendArg> for BackendChoice {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Dense => BackendChoice::Dense,
            BackendArg::Sparse => BackendChoice::Sparse,
            BackendArg::Auto => BackendChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Composite,
    #[value(alias = "cz", alias = "cz_level")]
    CzLevel,
    Elementary,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Composite => Level::Composite,
            LevelArg::CzLevel => Level::CzLevel,
            LevelArg::Elementary => Level::Elementary,
        }
    }
}

#[derive(Debug, Args)]
struct OutArg {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the n-qubit W-state circuit as a wcircuit file.
    Synth {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Lower a circuit file to CZ_LEVEL or ELEMENTARY.
    Lower {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "elementary")]
        level: LevelArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run a circuit on a basis input and dump the output state.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        /// Basis state as H/V or 0/1 characters, mode 1 first.
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Synthesize, simulate from |VH..H> and compare with the W state.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
    },
    /// Gate counts, success probability and source rates as JSON.
    Analyze {
        #[arg(long)]
        n: usize,
        /// Success probability per cNOT, decimal or fraction such as 1/9.
        #[arg(long, default_value = "1/9", value_parser = parse_probability)]
        p: f64,
        /// Single-photon generation rate; enables the pdc section.
        #[arg(long)]
        gamma: Option<f64>,
        /// Extra-pair rate.
        #[arg(long, default_value_t = DEFAULT_PDC_DELTA, requires = "gamma")]
        delta: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// First-plate angle against n, as CSV.
    Angles {
        #[arg(long)]
        max: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Two-qubit, F and cNOT counts against n, as CSV.
    Growth {
        #[arg(long)]
        max: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fidelity under plate-angle errors on one F gate, as CSV.
    Sweep {
        #[arg(long)]
        n: usize,
        /// Control qubit j of the perturbed F(j, j+1).
        #[arg(long, default_value_t = 1)]
        position: usize,
        /// Comma-separated plate-angle offsets in degrees.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_FAILURE_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
        #[command(flatten)]
        out: OutArg,
    },
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            num / den
        }
        None => s.trim().parse().map_err(|_| format!("bad number {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not a finite number"))
    }
}

enum Failure {
    Usage(String),
    Capacity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_capacity() {
            Failure::Capacity(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn emit(out: &OutArg, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write output: {e}"))),
    }
}

fn read_circuit(path: &Path) -> Result<crate::circuit::Circuit, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<u8, Failure> {
    let config = SimConfig {
        dense_cap: cli.dense_cap,
        auto_dense_max: cli.auto_dense_max,
        ..SimConfig::default()
    };
    let sim = Simulator::new(config);

    match cli.command {
        Command::Synth { n, out } => {
            let circuit = build_w_circuit(n)?;
            emit(&out, &format::to_text(&circuit), stdout)?;
        }
        Command::Lower {
            circuit,
            level,
            out,
        } => {
            let c = read_circuit(&circuit)?;
            let lowered = lower(&c, level.into())?;
            emit(&out, &format::to_text(&lowered), stdout)?;
        }
        Command::Simulate {
            circuit,
            input,
            backend,
            out,
        } => {
            let c = read_circuit(&circuit)?;
            let state = sim.basis_state(c.n_qubits(), &input, backend.into())?;
            let result = sim.run(&c, &state)?;
            emit(&out, &result.dump(config.prune_threshold), stdout)?;
        }
        Command::Verify { n, backend } => {
            let c = build_w_circuit(n)?;
            let backend = config.resolve(n, backend.into());
            let bits: String = std::iter::once('V')
                .chain(std::iter::repeat_n('H', n - 1))
                .collect();
            let input = crate::simulator::QuantumState::basis(n, &bits, backend, &config)?;
            let result = sim.run(&c, &input)?;
            let f = fidelity(&result, &w_reference_on(n, backend, &config)?)?;
            writeln!(stdout, "n={n} fidelity={f:.12}")
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))?;
            if f < 1.0 - VERIFY_TOLERANCE {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Analyze {
            n,
            p,
            gamma,
            delta,
            out,
        } => {
            let report = resource_report(n, p)?;
            let text = match gamma {
                Some(gamma) => {
                    let model = PdcModel::new(gamma, delta)?;
                    let rates = pdc_rates(n, &model)?;
                    report_json(&report, Some((&model, &rates)))
                }
                None => report_json(&report, None),
            };
            emit(&out, &text, stdout)?;
        }
        Command::Angles { max, out } => {
            emit(&out, &plate_angle_csv(&plate_angle_table(max)), stdout)?;
        }
        Command::Growth { max, out } => {
            emit(&out, &growth_csv(&gate_growth_table(max)), stdout)?;
        }
        Command::Sweep {
            n,
            position,
            deltas,
            threshold,
            backend,
            out,
        } => {
            let records = angle_sensitivity(n, position, &deltas, backend.into(), &config)?;
            emit(&out, &sensitivity_csv(&records, threshold), stdout)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
                return EXIT_OK;
            }
            let _ = stderr.write_all(rendered.as_bytes());
            return EXIT_USAGE;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Capacity(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CAPACITY
        }
    }
}
