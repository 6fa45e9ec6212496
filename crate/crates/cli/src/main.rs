use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tfem::{run, CliError, CommandKind, RawConfig};

/// Quadratic temporal finite element integrators for the single-degree-of-freedom
/// Kelvin–Voigt oscillator.
#[derive(Parser)]
#[command(name = "tfem", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the oscillator and write one trajectory CSV per algorithm.
    Simulate(Common),
    /// Spectral radius, dispersion and reversibility over an h/Tn grid.
    Spectrum(Common),
    /// Period elongation table, one column per algorithm.
    PeTable(Common),
    /// Errors and observed orders under successive halving of h.
    Converge(Common),
    /// Compare the closed-form step matrices with their derivations.
    ValidateMatrices(Common),
}

/// Flags override values from `--config`. Unset keys take their defaults.
#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Algorithm names separated by commas, `tfem`, or `all`.
    #[arg(long)]
    alg: Option<String>,
    /// Time step (initial step for `converge`).
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    duration: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Flexibility (reciprocal stiffness).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Natural period; use with --xi instead of --c/--a.
    #[arg(long = "Tn", alias = "tn", allow_hyphen_values = true)]
    tn: Option<String>,
    /// Damping ratio.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<String>,
    /// Impulse accumulated before t = 0.
    #[arg(long, allow_hyphen_values = true)]
    jhat0: Option<String>,
    /// zero | sin:F0,W0 | record:PATH
    #[arg(long)]
    forcing: Option<String>,
    /// force | ground-accel
    #[arg(long)]
    record_kind: Option<String>,
    /// two-column | fixed-dt
    #[arg(long)]
    record_format: Option<String>,
    /// Sample spacing of fixed-dt records.
    #[arg(long)]
    record_dt: Option<String>,
    #[arg(long)]
    record_header_lines: Option<String>,
    /// Sample count declared by the record header, if any.
    #[arg(long)]
    record_points: Option<String>,
    /// Multiplier applied to record values (required for ground-accel).
    #[arg(long, allow_hyphen_values = true)]
    scale: Option<String>,
    /// Number of halvings for `converge`.
    #[arg(long)]
    levels: Option<String>,
    /// default | lin:LO,HI,N | log:LO,HI,N | comma list of h/Tn values
    #[arg(long)]
    grid: Option<String>,
    /// undamped | damped | both
    #[arg(long)]
    damping: Option<String>,
}

impl Common {
    fn overrides(&self) -> [(&'static str, &Option<String>); 22] {
        [
            ("out", &self.out),
            ("alg", &self.alg),
            ("h", &self.h),
            ("duration", &self.duration),
            ("m", &self.m),
            ("c", &self.c),
            ("a", &self.a),
            ("tn", &self.tn),
            ("xi", &self.xi),
            ("u0", &self.u0),
            ("v0", &self.v0),
            ("jhat0", &self.jhat0),
            ("forcing", &self.forcing),
            ("record_kind", &self.record_kind),
            ("record_format", &self.record_format),
            ("record_dt", &self.record_dt),
            ("record_header_lines", &self.record_header_lines),
            ("record_points", &self.record_points),
            ("scale", &self.scale),
            ("levels", &self.levels),
            ("grid", &self.grid),
            ("damping", &self.damping),
        ]
    }
}

fn execute(kind: CommandKind, args: &Common) -> Result<String, CliError> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            RawConfig::parse(&text)
        }
        None => RawConfig::default(),
    };
    for (key, value) in args.overrides() {
        if let Some(v) = value {
            raw.set(key, v);
        }
    }
    let cfg = raw.resolve(kind)?;
    let outcome = run(kind, &cfg)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    Ok(outcome.summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.cmd {
        Cmd::Simulate(a) => (CommandKind::Simulate, a),
        Cmd::Spectrum(a) => (CommandKind::Spectrum, a),
        Cmd::PeTable(a) => (CommandKind::PeTable, a),
        Cmd::Converge(a) => (CommandKind::Converge, a),
        Cmd::ValidateMatrices(a) => (CommandKind::ValidateMatrices, a),
    };
    match execute(kind, args) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
