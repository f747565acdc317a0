//! `zkphase` command-line interface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

mod commands;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Failure, Outcome};
use workspace::Workspace;

#[derive(Parser)]
#[command(name = "zkphase", version, about = "Attestation chains and zero-knowledge phase proofs")]
struct Cli {
    /// Workspace directory.
    #[arg(short = 'w', long, global = true, default_value = ".")]
    workspace: PathBuf,

    /// Print a machine-readable JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write spec.toml into the workspace (the bundled railway spec by default).
    Init {
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Generate a key for a role.
    Keygen {
        role: String,
        /// Derive the key deterministically from this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sign a role delegation. Defaults: the spec parent attests the spec permissions.
    AttestRole {
        #[arg(long)]
        subject: String,
        #[arg(long)]
        attestor: Option<String>,
        /// Permission mask: a number (`0b..`, `0x..`, decimal) or comma-separated doctypes.
        #[arg(long)]
        rinfo: Option<String>,
    },
    /// Sign a document. The identifier is the SHA-256 of the file.
    AttestDoc {
        #[arg(long)]
        doctype: String,
        #[arg(long)]
        document: PathBuf,
        #[arg(long)]
        author: Option<String>,
    },
    /// Assemble and pad one chain per document slot.
    BuildChains,
    /// Check chain files natively against both policies.
    VerifyChains {
        /// Root key: a role name, a key file or 128 hex characters.
        #[arg(long)]
        rpk: Option<String>,
    },
    /// Generate proving and verification keys for the spec.
    Setup {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Prove the phase for a root key.
    Prove {
        #[arg(long)]
        rpk: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a proof. Exits 1 when it does not verify.
    Verify {
        #[arg(long)]
        rpk: Option<String>,
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long)]
        vk: Option<PathBuf>,
    },
    /// Constraint counts per component for the spec.
    Cost,
    /// Scaling measurements over synthetic specs.
    Bench {
        /// Grid points as `LxN`, comma separated.
        #[arg(long, default_value = "1x1,2x1,2x2,4x2,4x4")]
        grid: String,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the CSV table to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Table format on stdout: csv or markdown.
        #[arg(long, default_value = "markdown")]
        format: String,
        /// Measure constraint counts only.
        #[arg(long)]
        constraints_only: bool,
    },
    /// Write the verification key and public-input layout as JSON.
    ExportVerifier {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the full railway workspace from a seed and run it end to end.
    DemoRailway {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let ws = Workspace::new(&cli.workspace);
    match &cli.command {
        Command::Init { spec } => commands::init(&ws, spec.as_deref()),
        Command::Keygen { role, seed } => commands::keygen(&ws, role, *seed),
        Command::AttestRole { subject, attestor, rinfo } => {
            commands::attest_role(&ws, subject, attestor.as_deref(), rinfo.as_deref())
        }
        Command::AttestDoc { doctype, document, author } => {
            commands::attest_doc(&ws, doctype, document, author.as_deref())
        }
        Command::BuildChains => commands::build_chains(&ws),
        Command::VerifyChains { rpk } => commands::verify_chains(&ws, rpk.as_deref()),
        Command::Setup { seed } => commands::setup(&ws, *seed),
        Command::Prove { rpk, seed, out } => commands::prove(&ws, rpk.as_deref(), *seed, out.as_deref()),
        Command::Verify { rpk, proof, vk } => {
            commands::verify(&ws, rpk.as_deref(), proof.as_deref(), vk.as_deref())
        }
        Command::Cost => commands::cost(&ws),
        Command::Bench { grid, reps, threads, seed, csv, format, constraints_only } => commands::bench(
            grid,
            *reps,
            *threads,
            *seed,
            csv.as_deref(),
            format,
            !*constraints_only,
        ),
        Command::ExportVerifier { out } => commands::export_verifier(&ws, out.as_deref()),
        Command::DemoRailway { seed } => commands::demo_railway(&ws, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.json {
                let mut report = outcome.report;
                report["ok"] = json!(outcome.ok);
                println!("{report}");
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::from(if outcome.ok { 0 } else { 1 })
        }
        Err(failure) => {
            let code = failure.exit_code();
            if cli.json {
                println!("{}", json!({ "ok": false, "error": failure.to_string() }));
            } else {
                eprintln!("error: {failure}");
            }
            ExitCode::from(code)
        }
    }
}
