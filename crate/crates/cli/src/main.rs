mod commands;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use afftool_core::descriptor::SystemDescriptor;
use afftool_core::forge::CaseChoice;
use afftool_core::json as ejson;
use afftool_core::verify::{GridSpec, DEFAULT_PER_AXIS};
use afftool_core::Rat;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use commands::Report;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "afftool", version, about = "Classify affine maps of tori and build centralizer witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit JSON (default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,

    /// Emit a short human-readable summary.
    #[arg(long, global = true)]
    text: bool,

    /// Largest accepted torus dimension.
    #[arg(long, global = true, env = "AFFTOOL_MAX_DIM", default_value_t = 8)]
    max_dim: usize,
}

#[derive(Args)]
struct Input {
    /// System descriptor (JSON).
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Ergodic hierarchy and centralizer prediction.
    Classify {
        #[command(flatten)]
        input: Input,
        /// Cross-check with a brute-force character search up to this height.
        #[arg(long)]
        height: Option<u64>,
    },
    /// Fibration over the periodic base.
    Structure {
        #[command(flatten)]
        input: Input,
    },
    /// Commutant, Jordan blocks and block constraints.
    Centralizer {
        #[command(flatten)]
        input: Input,
    },
    /// Rationalize the base and emit commuting witnesses.
    Perturb {
        #[command(flatten)]
        input: Input,
        /// Allowed size of the translation change ("p/q" or decimal).
        #[arg(long, default_value = "1/100", value_parser = commands::parse_epsilon)]
        epsilon: Rat,
        /// auto, 1 (fiber flows) or 2 (product maps).
        #[arg(long = "case", default_value = "auto", value_parser = commands::parse_case)]
        case: CaseChoice,
        /// Grid points per axis for the inline residual check.
        #[arg(long, default_value_t = DEFAULT_PER_AXIS)]
        grid: usize,
    },
    /// Commutation residual of a witness against the input map.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Witness expression, or a perturb report.
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PER_AXIS)]
        grid: usize,
    },
    /// Central series and K test on a nilpotent Lie algebra.
    Nil {
        #[command(flatten)]
        input: Input,
        /// JSON rational matrix for the automorphism (defaults to the descriptor's).
        #[arg(long)]
        automorphism: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Structure { .. } => "structure",
            Command::Centralizer { .. } => "centralizer",
            Command::Perturb { .. } => "perturb",
            Command::Verify { .. } => "verify",
            Command::Nil { .. } => "nil",
        }
    }

    fn input(&self) -> &Path {
        match self {
            Command::Classify { input, .. }
            | Command::Structure { input }
            | Command::Centralizer { input }
            | Command::Perturb { input, .. }
            | Command::Verify { input, .. }
            | Command::Nil { input, .. } => &input.input,
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_json(path: &Path) -> CliResult<Value> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Schema(format!("{}: invalid JSON: {e}", path.display())))
}

fn load(path: &Path, max_dim: usize) -> CliResult<SystemDescriptor> {
    let v = read_json(path)?;
    // check the size before any heavy validation
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize > max_dim {
            return Err(CliError::TooLarge { n: n as usize, max: max_dim });
        }
    }
    Ok(SystemDescriptor::from_json(&v)?)
}

fn grid_for(n: usize, per_axis: usize) -> CliResult<GridSpec> {
    Ok(GridSpec::new(n, per_axis, 0)?)
}

fn run(cli: &Cli) -> CliResult<(Value, String)> {
    let desc = load(cli.command.input(), cli.max_dim)?;
    let n = desc.map.dim();
    let report: Report = match &cli.command {
        Command::Classify { height, .. } => commands::classify_cmd(&desc, *height)?,
        Command::Structure { .. } => commands::structure_cmd(&desc)?,
        Command::Centralizer { .. } => commands::centralizer_cmd(&desc)?,
        Command::Perturb { epsilon, case, grid, .. } => {
            commands::perturb_cmd(&desc, epsilon, *case, &grid_for(n, *grid)?)?
        }
        Command::Verify { witness, grid, .. } => {
            let g = grid_for(n, *grid)?;
            let w = commands::parse_witness(&read_json(witness)?)?;
            commands::verify_cmd(&desc, &w, &g)?
        }
        Command::Nil { automorphism, .. } => {
            let m = match automorphism {
                None => None,
                Some(p) => {
                    let v = read_json(p)?;
                    let m = v.get("automorphism").unwrap_or(&v);
                    Some(ejson::parse_rat_matrix(m)?)
                }
            };
            commands::nil_cmd(&desc, m)?
        }
    };
    let canonical = desc.to_canonical_string();
    let mut out = Map::new();
    out.insert("tool".into(), json!("afftool"));
    out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("command".into(), json!(cli.command.name()));
    out.insert("input_sha256".into(), json!(hex::encode(Sha256::digest(canonical.as_bytes()))));
    out.insert("descriptor".into(), desc.to_json());
    out.extend(report.body);
    Ok((Value::Object(out), report.text))
}

fn emit(cli: &Cli, body: &str) -> CliResult<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(v, text)| {
        let body = if cli.text {
            text
        } else {
            serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n"
        };
        emit(&cli, &body)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("afftool: {e}");
            if !cli.text {
                println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("JSON values serialize"));
            }
            ExitCode::from(e.exit_code())
        }
    }
}
