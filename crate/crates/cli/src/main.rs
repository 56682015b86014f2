//! `qfreud`: drives the library modules and writes their tables as JSON or
//! CSV. Exit status 0 means every check passed, 1 a numeric failure, 2 a
//! configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qfreud_cli::commands::{self, Command, RayOptions};
use qfreud_cli::config::{ConfigError, Format, Overrides, RunConfig};
use qfreud_cli::report::Report;

#[derive(Debug, Parser)]
#[command(name = "qfreud", version, about = "q-Freud II orthogonal polynomials at high precision")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Base q in (0, 1), as a decimal string.
    #[arg(long, global = true)]
    q: Option<String>,
    /// Working precision in bits (default grows with n-max and 1/q).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Series and lattice truncation tolerance (default 2^(-bits/2)).
    #[arg(long, global = true)]
    trunc_tol: Option<String>,
    /// Largest degree or index n (default 24)
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Lattice shift c in (q, 1]; repeat for several.
    #[arg(long = "shift-c", global = true)]
    shift_c: Vec<String>,
    /// Report format (default json)
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled evaluation points (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Lattice moments and their ratio identities.
    Moments,
    /// Monic orthogonal polynomials, norms and recurrence coefficients.
    Polys,
    /// Recurrence coefficients against the q-Painleve equation.
    Painleve,
    /// Power-series solutions and their equation residuals.
    Series,
    /// Glue residual of the parametrices.
    Rhp,
    /// Near- and far-field asymptotics of P_n.
    Asym,
    /// h_q along a ray and on the two imaginary circles.
    Hq {
        /// Ray angle as a multiple of pi.
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        angle: f64,
        #[arg(long, default_value_t = 0.1)]
        r_min: f64,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            q: self.q.clone(),
            precision_bits: self.precision_bits,
            trunc_tol: self.trunc_tol.clone(),
            n_max: self.n_max,
            shift_c: (!self.shift_c.is_empty()).then(|| self.shift_c.clone()),
            format: self.format.as_deref().and_then(|f| f.parse::<Format>().ok()),
            out: self.out.clone(),
            seed: self.seed,
        }
    }
}

fn resolve(g: &GlobalArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &g.config {
        Overrides::from_file(path)?.apply(&mut cfg);
    }
    g.overrides().apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, rep: &Report) -> io::Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            rep.write(cfg.format, &mut w)?;
            w.flush()
        }
        None => rep.write(cfg.format, io::stdout().lock()),
    }
}

fn fail(status: &str, command: &str, message: String, code: u8) -> ExitCode {
    let v = json!({ "status": status, "command": command, "message": message });
    eprintln!("{}", serde_json::to_string_pretty(&v).unwrap_or(message));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Moments => Command::Moments,
        Cmd::Polys => Command::Polys,
        Cmd::Painleve => Command::Painleve,
        Cmd::Series => Command::Series,
        Cmd::Rhp => Command::Rhp,
        Cmd::Asym => Command::Asym,
        Cmd::Hq {
            angle,
            r_min,
            r_max,
            points,
        } => Command::Hq(RayOptions {
            angle,
            r_min,
            r_max,
            points,
        }),
    };
    let name = command.name();
    let cfg = match resolve(&cli.global) {
        Ok(c) => c,
        Err(e) => return fail("config_error", name, e.to_string(), 2),
    };
    let rep = match commands::run(&command, &cfg) {
        Ok(r) => r,
        Err(e) => return fail("numeric_failure", name, e.to_string(), 1),
    };
    if let Err(e) = emit(&cfg, &rep) {
        return fail("io_error", name, e.to_string(), 1);
    }
    if rep.passed() {
        ExitCode::SUCCESS
    } else {
        let v = rep.failure_report(name);
        eprintln!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
        ExitCode::from(1)
    }
}
