//! Command handlers behind the `diversity` binary.
//!
//! Every handler returns [`CliError`], which main maps onto the exit-code
//! contract: 0 success, 1 domain error, 2 usage error. Unreadable input paths
//! are usage errors; malformed or invalid file contents are domain errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use diversity_core::analysis::{
    break_even_reward_at, proving_feasible, slash_impact, GasStat,
};
use diversity_core::contract::ContractState;
use diversity_core::identity::{build_registry, sha256, CodeSegment, CommitmentRegistry};
use diversity_core::proofs::{
    default_cost_model, generate_proof, verify_proof, ExecutionProof, NodeKey, ProofMechanism,
    TrustedKeys,
};
use diversity_core::sim::{ScenarioConfig, Simulation, TimeSeries};

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation: unknown flags, unreadable inputs. Exit code 2.
    Usage(String),
    /// The inputs were readable but the operation failed. Exit code 1.
    Domain(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Domain(err) => write!(f, "{err:#}"),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(err: E) -> Self {
        CliError::Domain(err.into())
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|err| CliError::Usage(format!("cannot read {}: {err}", path.display())))
}

/// Build code segments from payload files: the implementation id is the file
/// stem, the step id is shared, the payload is the raw file contents.
fn segments_from_files(files: &[PathBuf], step: &str) -> Result<Vec<CodeSegment>, CliError> {
    let mut segments = Vec::with_capacity(files.len());
    for path in files {
        let code = read_input(path)?;
        let impl_id = path
            .file_stem()
            .and_then(|stem| stem.to_str())
            .unwrap_or_default()
            .to_string();
        segments.push(CodeSegment::new(impl_id, step, code).map_err(anyhow::Error::from)?);
    }
    Ok(segments)
}

fn registry_from_files(files: &[PathBuf], step: &str) -> Result<CommitmentRegistry, CliError> {
    let segments = segments_from_files(files, step)?;
    Ok(build_registry(&segments).map_err(anyhow::Error::from)?)
}

/// `commit`: print one `impl_id step_id digest` line per segment, in registry
/// order.
pub fn cmd_commit(files: &[PathBuf], step: &str, out: &mut impl Write) -> Result<(), CliError> {
    let registry = registry_from_files(files, step)?;
    for entry in registry.entries() {
        writeln!(out, "{} {} {}", entry.impl_id, entry.step_id, entry.digest)?;
    }
    Ok(())
}

/// `prove`: write the canonical proof encoding and describe it on stdout.
pub fn cmd_prove(
    segment: &Path,
    step: &str,
    block: u64,
    key_seed: &str,
    mechanism: ProofMechanism,
    out_path: &Path,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let segments = segments_from_files(&[segment.to_path_buf()], step)?;
    let registry = build_registry(&segments).map_err(anyhow::Error::from)?;
    let identity = registry.entries().next().expect("one segment").clone();
    let key = NodeKey::from_label(key_seed.as_bytes());
    let proof = generate_proof(mechanism, &identity, block, &key);
    fs::write(out_path, proof.encode())?;
    let summary = serde_json::json!({
        "mechanism": mechanism,
        "commitment_digest": identity.digest,
        "block_number": block,
        "submitter": proof.submitter,
        "public_key": hex::encode(key.public_key().as_bytes()),
        "proof_file": out_path.display().to_string(),
    });
    writeln!(out, "{summary}")?;
    Ok(())
}

/// `verify`: check a canonical proof file against the registry built from the
/// given segments; print the attested digest on success.
pub fn cmd_verify(
    proof_path: &Path,
    segments: &[PathBuf],
    step: &str,
    trusted_key_hex: &[String],
    out: &mut impl Write,
) -> Result<(), CliError> {
    let bytes = read_input(proof_path)?;
    let proof = ExecutionProof::decode(&bytes).map_err(anyhow::Error::from)?;
    let registry = registry_from_files(segments, step)?;
    let mut trusted = TrustedKeys::new();
    for item in trusted_key_hex {
        let mut raw = [0u8; 32];
        hex::decode_to_slice(item, &mut raw)
            .map_err(|err| CliError::Usage(format!("bad --trusted-key {item:?}: {err}")))?;
        trusted
            .insert_bytes(&raw)
            .map_err(|_| CliError::Domain(anyhow::anyhow!("invalid trusted key {item:?}")))?;
    }
    let digest = verify_proof(&registry, &trusted, &proof).map_err(anyhow::Error::from)?;
    writeln!(out, "{digest}")?;
    Ok(())
}

/// Self-describing record of one simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the canonical (resolved, sorted-key) config JSON.
    pub config_hash: String,
    pub seed: u64,
    pub artifacts: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn for_config(config: &ScenarioConfig, artifacts: Vec<String>) -> Self {
        RunManifest {
            config_hash: sha256(config.canonical_json().as_bytes()).to_hex(),
            seed: config.seed,
            artifacts,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_value(self).expect("manifest serializes").to_string()
    }
}

/// Long-format per-implementation plot data: `block,impl_id,count,share`.
pub fn emit_plot_data(series: &TimeSeries, path: &Path) -> std::io::Result<()> {
    let mut out = String::from("block,impl_id,count,share\n");
    for row in &series.rows {
        let total: u64 = row.counts.iter().sum();
        for (impl_id, count) in series.impl_ids.iter().zip(&row.counts) {
            let share = if total == 0 {
                0.0
            } else {
                *count as f64 / total as f64
            };
            out.push_str(&format!("{},{},{},{}\n", row.block, impl_id, count, share));
        }
    }
    fs::write(path, out)
}

const ARTIFACT_SERIES_CSV: &str = "series.csv";
const ARTIFACT_PLOT_CSV: &str = "plot.csv";
const ARTIFACT_SERIES_JSON: &str = "series.json";
const ARTIFACT_SNAPSHOT: &str = "snapshot.json";
const ARTIFACT_MANIFEST: &str = "manifest.json";

/// Run one scenario and write the full artifact set under `dir`.
pub fn write_run(config: &ScenarioConfig, dir: &Path) -> Result<(), CliError> {
    let mut sim = Simulation::new(config.clone()).map_err(anyhow::Error::from)?;
    let series = sim.run_to_end();
    fs::create_dir_all(dir)?;
    fs::write(dir.join(ARTIFACT_SERIES_CSV), series.to_csv())?;
    emit_plot_data(&series, &dir.join(ARTIFACT_PLOT_CSV))?;
    fs::write(dir.join(ARTIFACT_SERIES_JSON), series.to_json(config))?;
    fs::write(dir.join(ARTIFACT_SNAPSHOT), sim.state().to_snapshot_json())?;
    let manifest = RunManifest::for_config(
        config,
        vec![
            ARTIFACT_MANIFEST.into(),
            ARTIFACT_PLOT_CSV.into(),
            ARTIFACT_SERIES_CSV.into(),
            ARTIFACT_SERIES_JSON.into(),
            ARTIFACT_SNAPSHOT.into(),
        ],
    );
    fs::write(dir.join(ARTIFACT_MANIFEST), manifest.to_canonical_json())?;
    Ok(())
}

/// `simulate`: single seed into `out`, or an inclusive seed range fanned out
/// into `out/seed-<n>` subdirectories (independent runs, one thread each).
pub fn cmd_simulate(
    config_path: &Path,
    seed_override: Option<u64>,
    seed_range: Option<(u64, u64)>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let bytes = read_input(config_path)?;
    let mut config =
        ScenarioConfig::from_json_slice(&bytes).map_err(anyhow::Error::from)?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    match seed_range {
        None => write_run(&config, out_dir),
        Some((first, last)) => {
            if first > last {
                return Err(CliError::Usage(format!(
                    "empty seed range {first}..{last}"
                )));
            }
            let results: Vec<Result<(), CliError>> = std::thread::scope(|scope| {
                let handles: Vec<_> = (first..=last)
                    .map(|seed| {
                        let mut run_config = config.clone();
                        run_config.seed = seed;
                        let dir = out_dir.join(format!("seed-{seed}"));
                        scope.spawn(move || write_run(&run_config, &dir))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|handle| handle.join().expect("run thread panicked"))
                    .collect()
            });
            results.into_iter().collect()
        }
    }
}

/// Parse a `--counts` spec like `A=2,B=8,C=2`.
pub fn parse_counts(spec: &str) -> Result<BTreeMap<String, u64>, String> {
    let mut counts = BTreeMap::new();
    if spec.trim().is_empty() {
        return Err("counts spec is empty".into());
    }
    for entry in spec.split(',') {
        let (id, value) = entry
            .split_once('=')
            .ok_or_else(|| format!("entry {entry:?} is not of the form impl=count"))?;
        let id = id.trim();
        if id.is_empty()
            || !id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(format!("bad implementation id {id:?}"));
        }
        let count: u64 = value
            .trim()
            .parse()
            .map_err(|err| format!("bad count for {id}: {err}"))?;
        if counts.insert(id.to_string(), count).is_some() {
            return Err(format!("implementation {id} listed twice"));
        }
    }
    Ok(counts)
}

/// `analyze slash`: JSON resilience report for a bugged implementation.
pub fn cmd_analyze_slash(
    counts_spec: &str,
    buggy: &str,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let counts = parse_counts(counts_spec).map_err(CliError::Usage)?;
    let report = slash_impact(&counts, buggy).map_err(anyhow::Error::from)?;
    let mut doc = serde_json::to_value(&report)?;
    doc["counts"] = serde_json::to_value(&counts)?;
    writeln!(out, "{doc}")?;
    Ok(())
}

/// `analyze econ`: break-even reward and block-time feasibility for a
/// mechanism.
pub fn cmd_analyze_econ(
    mechanism: ProofMechanism,
    gas_price: u64,
    gas_stat: GasStat,
    block_time_s: f64,
    out: &mut impl Write,
) -> Result<(), CliError> {
    if block_time_s <= 0.0 {
        return Err(CliError::Usage("--block-time must be positive".into()));
    }
    let break_even = break_even_reward_at(mechanism, gas_price, gas_stat);
    let break_even = u64::try_from(break_even)
        .map_err(|_| CliError::Domain(anyhow::anyhow!("break-even reward overflows u64")))?;
    let (feasible, margin) = proving_feasible(mechanism, block_time_s);
    let doc = serde_json::json!({
        "mechanism": mechanism,
        "gas_price": gas_price,
        "gas_stat": gas_stat,
        "break_even_reward": break_even,
        "proving": {
            "block_time_s": block_time_s,
            "feasible": feasible,
            "margin": margin,
        },
        "cost_model": default_cost_model(mechanism),
    });
    writeln!(out, "{doc}")?;
    Ok(())
}

/// `contract inspect`: distribution and minority from a snapshot file.
pub fn cmd_contract_inspect(snapshot: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let bytes = read_input(snapshot)?;
    let state = ContractState::from_snapshot_json(&bytes).map_err(anyhow::Error::from)?;
    let doc = serde_json::json!({
        "distribution": state.get_distribution(),
        "minority": state.get_minority(),
    });
    writeln!(out, "{doc}")?;
    Ok(())
}

/// Parse an inclusive `a..b` seed range.
pub fn parse_seed_range(spec: &str) -> Result<(u64, u64), CliError> {
    let (first, last) = spec
        .split_once("..")
        .ok_or_else(|| CliError::Usage(format!("--seeds expects a..b, got {spec:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|err| CliError::Usage(format!("bad seed {s:?}: {err}")))
    };
    Ok((parse(first)?, parse(last)?))
}
