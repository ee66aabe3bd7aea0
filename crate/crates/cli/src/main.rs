use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use diversity_cli::{
    cmd_analyze_econ, cmd_analyze_slash, cmd_commit, cmd_contract_inspect, cmd_prove,
    cmd_simulate, cmd_verify, parse_seed_range, CliError,
};
use diversity_core::analysis::GasStat;
use diversity_core::proofs::ProofMechanism;

#[derive(Parser)]
#[command(
    name = "diversity",
    version,
    about = "Code-identity commitments, execution-proof verification, and the client diversity reward protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Succinct,
    Attested,
}

impl From<MechanismArg> for ProofMechanism {
    fn from(arg: MechanismArg) -> Self {
        match arg {
            MechanismArg::Succinct => ProofMechanism::Succinct,
            MechanismArg::Attested => ProofMechanism::Attested,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GasStatArg {
    Min,
    Avg,
    Max,
}

impl From<GasStatArg> for GasStat {
    fn from(arg: GasStatArg) -> Self {
        match arg {
            GasStatArg::Min => GasStat::Min,
            GasStatArg::Avg => GasStat::Avg,
            GasStatArg::Max => GasStat::Max,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print code-identity commitments for payload files (impl id = file stem)
    Commit {
        /// Payload files, one per implementation
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Protocol step the segments implement
        #[arg(long, default_value = "attest")]
        step: String,
    },
    /// Generate a proof of execution in the canonical encoding
    Prove {
        /// Payload file for the implementation being proven
        #[arg(long)]
        segment: PathBuf,
        #[arg(long, default_value = "attest")]
        step: String,
        /// Block number the proof is bound to
        #[arg(long)]
        block: u64,
        /// Deterministic node-key seed (any string)
        #[arg(long)]
        key_seed: String,
        #[arg(long, value_enum, default_value_t = MechanismArg::Attested)]
        mechanism: MechanismArg,
        /// Where to write the encoded proof
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a canonically encoded proof file against a registry
    Verify {
        /// Encoded proof file
        #[arg(long)]
        proof: PathBuf,
        /// Payload files defining the approved registry
        #[arg(long, required = true)]
        segment: Vec<PathBuf>,
        #[arg(long, default_value = "attest")]
        step: String,
        /// Hex-encoded trusted verification keys (required for attested proofs)
        #[arg(long)]
        trusted_key: Vec<String>,
    },
    /// Run a scenario and write series.csv, plot.csv, series.json,
    /// snapshot.json, and manifest.json under --out
    Simulate {
        /// Scenario config JSON
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        /// Inclusive seed range a..b; runs land in <out>/seed-<n>
        #[arg(long)]
        seeds: Option<String>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Failure-model and economics reports
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// Operations on contract state snapshots
    Contract {
        #[command(subcommand)]
        what: ContractCommand,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Impact of a correlated bug: mass-slashing and state corruption
    Slash {
        /// Distribution, e.g. A=2,B=8,C=2
        #[arg(long)]
        counts: String,
        /// Implementation assumed to carry the bug
        #[arg(long)]
        buggy: String,
    },
    /// Break-even reward and block-time feasibility
    Econ {
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        /// Reward units per gas unit
        #[arg(long)]
        gas_price: u64,
        #[arg(long, value_enum, default_value_t = GasStatArg::Avg)]
        gas_stat: GasStatArg,
        /// Block interval the prover must fit in (seconds)
        #[arg(long, default_value_t = 12.0)]
        block_time: f64,
    },
}

#[derive(Subcommand)]
enum ContractCommand {
    /// Print the distribution and minority implementation of a snapshot
    Inspect { snapshot: PathBuf },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Commit { files, step } => cmd_commit(&files, &step, &mut out),
        Command::Prove {
            segment,
            step,
            block,
            key_seed,
            mechanism,
            out: out_path,
        } => cmd_prove(
            &segment,
            &step,
            block,
            &key_seed,
            mechanism.into(),
            &out_path,
            &mut out,
        ),
        Command::Verify {
            proof,
            segment,
            step,
            trusted_key,
        } => cmd_verify(&proof, &segment, &step, &trusted_key, &mut out),
        Command::Simulate {
            config,
            seed,
            seeds,
            out: out_dir,
        } => {
            let range = seeds.as_deref().map(parse_seed_range).transpose()?;
            cmd_simulate(&config, seed, range, &out_dir)
        }
        Command::Analyze { what } => match what {
            AnalyzeCommand::Slash { counts, buggy } => {
                cmd_analyze_slash(&counts, &buggy, &mut out)
            }
            AnalyzeCommand::Econ {
                mechanism,
                gas_price,
                gas_stat,
                block_time,
            } => cmd_analyze_econ(
                mechanism.into(),
                gas_price,
                gas_stat.into(),
                block_time,
                &mut out,
            ),
        },
        Command::Contract { what } => match what {
            ContractCommand::Inspect { snapshot } => cmd_contract_inspect(&snapshot, &mut out),
        },
    }
}

fn main() -> ExitCode {
    // clap itself exits with code 2 on usage errors
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `diversity --help` for usage");
            ExitCode::from(2)
        }
        Err(CliError::Domain(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
