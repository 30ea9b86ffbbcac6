//! Command-line front end. Exit codes: 0 success, 1 check failure or I/O
//! error, 2 configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;

use crate::error::Error;
use crate::linalg::LogBase;
use crate::measures::{measure_report_with, MeasureReport};
use crate::report::{
    emit, emit_reproduction, parse_qubit_spec, reproduce_paper, reproduce_paper_with, run_checks,
    run_report, verify_reports, EpsilonSpec, OutputFormat, RunConfig,
};
use crate::states::{x_of, PhaseConvention};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ghz-entangle",
    version,
    about = "Separability and entanglement of N-qubit pseudo-pure GHZ states"
)]
pub struct Cli {
    /// Qubit count, or an inclusive range such as 2..8
    #[arg(long = "n", default_value = "4")]
    pub n: String,

    /// Purity parameter, or an inclusive grid start:stop:step
    #[arg(long, default_value = "0.54")]
    pub epsilon: String,

    /// Output format: table, csv or json
    #[arg(long, default_value = "table")]
    pub format: String,

    /// Logarithm base for entanglement values (2 reports multiples of log 2)
    #[arg(long, default_value_t = 2.0)]
    pub log_base: f64,

    /// Decimals shown in table output
    #[arg(long, default_value_t = 3)]
    pub precision: usize,

    /// Run the oracle cross-check suite over the sweep
    #[arg(long)]
    pub checks: bool,

    /// Rebuild every point from dense matrices (n <= 10) and compare
    #[arg(long)]
    pub verify_matrices: bool,

    /// Print the four-ion reproduction table and exit
    #[arg(long)]
    pub reproduce_paper: bool,

    /// GHZ phase convention: paper (i^(n+1)) or plus
    #[arg(long, default_value = "paper")]
    pub phase: String,

    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Scale the Werner-weight formula (negative control for the reproduction)
    #[arg(long, hide = true)]
    pub inject_x_scale: Option<f64>,
}

fn parse_phase(s: &str) -> Result<PhaseConvention, Error> {
    match s {
        "paper" => Ok(PhaseConvention::PaperIN1),
        "plus" => Ok(PhaseConvention::Plus),
        other => Err(Error::Config(format!(
            "unknown phase convention '{other}' (expected paper or plus)"
        ))),
    }
}

impl Cli {
    pub fn to_config(&self) -> Result<RunConfig, Error> {
        let config = RunConfig {
            ns: parse_qubit_spec(&self.n)?,
            epsilon: self.epsilon.parse::<EpsilonSpec>()?,
            log_base: LogBase::new(self.log_base)?,
            format: self.format.parse::<OutputFormat>()?,
            precision: self.precision,
            checks: self.checks,
            verify_matrices: self.verify_matrices,
            convention: parse_phase(&self.phase)?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parses `args` (including the program name) and runs, writing to `stdout`
/// unless `--out` is given. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let config = match cli.to_config() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                let code = execute(&cli, &config, &mut w, stderr);
                code.and_then(|c| w.flush().map(|_| c))
            }
            Err(e) => Err(e),
        },
        None => execute(&cli, &config, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CHECK_FAILED
        }
    }
}

fn execute(
    cli: &Cli,
    config: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    if cli.reproduce_paper {
        let repro = match cli.inject_x_scale {
            Some(scale) => reproduce_paper_with(config.log_base, &move |n, e| scale * x_of(n, e)),
            None => reproduce_paper(config.log_base),
        };
        return match repro {
            Ok(r) => {
                emit_reproduction(&r, &mut *out)?;
                Ok(if r.all_passed() {
                    EXIT_OK
                } else {
                    EXIT_CHECK_FAILED
                })
            }
            Err(e) => {
                writeln!(err, "error: {e}")?;
                Ok(EXIT_CHECK_FAILED)
            }
        };
    }

    let reports = match cli.inject_x_scale {
        Some(scale) => config
            .points()
            .into_iter()
            .map(|(n, e)| {
                measure_report_with(n, e, config.log_base, &move |n, e| scale * x_of(n, e))
            })
            .collect::<Result<Vec<MeasureReport>, Error>>(),
        None => run_report(config),
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_CONFIG);
        }
    };
    emit(&reports, config.format, config.precision, &mut *out)?;

    let mut code = EXIT_OK;
    if config.verify_matrices {
        match verify_reports(&reports, config.convention) {
            Ok(checks) => {
                let failed: Vec<_> = checks.iter().filter(|(_, _, c)| !c.passes()).collect();
                for (n, e, c) in &failed {
                    writeln!(
                        err,
                        "verify FAIL n={n} eps={e} {}: closed form {} vs matrix {} (|diff| {:e})",
                        c.quantity,
                        c.closed_form,
                        c.matrix,
                        c.deviation()
                    )?;
                }
                writeln!(
                    err,
                    "verify-matrices: {}/{} comparisons within tolerance",
                    checks.len() - failed.len(),
                    checks.len()
                )?;
                if !failed.is_empty() {
                    code = EXIT_CHECK_FAILED;
                }
            }
            Err(e) => {
                writeln!(err, "error: {e}")?;
                return Ok(EXIT_CONFIG);
            }
        }
    }
    if config.checks {
        match run_checks(config) {
            Ok(outcomes) => {
                for o in &outcomes {
                    writeln!(
                        err,
                        "check {} {}: {}",
                        if o.passed { "PASS" } else { "FAIL" },
                        o.name,
                        o.detail
                    )?;
                }
                if outcomes.iter().any(|o| !o.passed) {
                    code = EXIT_CHECK_FAILED;
                }
            }
            Err(e) => {
                writeln!(err, "error: {e}")?;
                return Ok(EXIT_CONFIG);
            }
        }
    }
    Ok(code)
}
