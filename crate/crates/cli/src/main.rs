//! Command-line front end. Every subcommand emits one JSON report on
//! stdout (indented with --pretty) and exits 0 on success, 2 on a
//! malformed scenario or usage error, 3 when a mathematical precondition
//! fails, and 4 when a verification claim is false. Reports are
//! deterministic: the same scenario, seed and binary version produce the
//! same bytes, which is what `verify-all` replays against recorded
//! golden files.

mod commands;
mod examples;
mod report;
mod scenario;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::{effective, run_scenario_command, GlobalFlags};
use report::{envelope, CmdError, Envelope, EXIT_OK, EXIT_VERIFICATION};
use scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "agres",
    version,
    about = "Residue codes from complete intersections on P^r and (P^1)^r"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Scenario file (JSON) describing field, variety, divisors and points
    #[arg(long, global = true, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Override the scenario's random seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest extension degree searched when certifying intersections
    #[arg(long, global = true)]
    e_max: Option<usize>,
    /// Largest truncation order tried for local point representations
    #[arg(long, global = true)]
    a_max: Option<usize>,
    /// Indent the JSON report for reading
    #[arg(long, global = true)]
    pretty: bool,
    /// Also write the compact report to this file
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify the divisors' intersection over field extensions
    Intersect,
    /// Residues of the canonically bounded forms at every point
    Residue,
    /// Classify the scenario's theta at each point
    CheckRectifying,
    /// Construct a rectifying function for the scenario's points
    SynthRectifier,
    /// Evaluation code of the functions bounded by G
    BuildFunctional,
    /// Residue code, rectified by theta when the scenario has one
    BuildDifferential,
    /// Check the differential code lies in the dual of the functional one
    VerifyDuality,
    /// Check residues of the bounded forms sum to zero over all points
    VerifyResidueTheorem,
    /// Re-express a differential code as a functional one, or back
    RoundTrip {
        /// Attempts when searching for a representing divisor family
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Compare the product construction against the factor codes
    ProductCheck {
        /// Second factor scenario; defaults to squaring the first
        #[arg(long, value_name = "FILE")]
        with: Option<PathBuf>,
    },
    /// Re-run a worked example and check its published tables
    ReproduceExample {
        /// One of 3.1, 3.2, 5.3
        name: String,
        /// Field size for example 5.3
        #[arg(long, default_value_t = 4)]
        q: u64,
        /// Comma-separated block degrees for example 5.3
        #[arg(long, default_value = "1,1")]
        m: String,
    },
    /// Replay recorded reports and compare bytes
    VerifyAll {
        /// Directory holding *.scenario.json files and a golden/ subdir
        fixtures: PathBuf,
    },
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Intersect => "intersect",
        Cmd::Residue => "residue",
        Cmd::CheckRectifying => "check-rectifying",
        Cmd::SynthRectifier => "synth-rectifier",
        Cmd::BuildFunctional => "build-functional",
        Cmd::BuildDifferential => "build-differential",
        Cmd::VerifyDuality => "verify-duality",
        Cmd::VerifyResidueTheorem => "verify-residue-theorem",
        Cmd::RoundTrip { .. } => "round-trip",
        Cmd::ProductCheck { .. } => "product-check",
        Cmd::ReproduceExample { .. } => "reproduce-example",
        Cmd::VerifyAll { .. } => "verify-all",
    }
}

fn parse_degrees(m: &str) -> Result<Vec<u32>, CmdError> {
    m.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| CmdError::schema(format!("bad block degree {s:?}: {e}")))
        })
        .collect()
}

fn load_required(cli: &Cli) -> Result<Scenario, CmdError> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CmdError::schema("this command needs --scenario".into()))?;
    scenario::load(path)
}

fn finish(
    name: &str,
    seed: Option<u64>,
    sha: Option<String>,
    result: Result<Value, CmdError>,
) -> Envelope {
    match result {
        Ok(v) => envelope(name, seed, sha, EXIT_OK, v),
        Err(e) => envelope(name, seed, sha, e.exit, e.to_value()),
    }
}

fn execute(cli: &Cli) -> Envelope {
    let name = command_name(&cli.cmd);
    match &cli.cmd {
        Cmd::ReproduceExample { name: ex, q, m } => {
            let result = parse_degrees(m).and_then(|deg| examples::reproduce(ex, *q, &deg));
            finish(name, None, None, result)
        }
        Cmd::VerifyAll { fixtures } => finish(name, None, None, verify_all(fixtures)),
        _ => {
            let flags = GlobalFlags {
                seed: cli.seed,
                e_max: cli.e_max,
                a_max: cli.a_max,
            };
            let scn = match load_required(cli) {
                Ok(s) => s,
                Err(e) => return finish(name, None, None, Err(e)),
            };
            let sha = Some(scn.sha256.clone());
            let eff = effective(&scn, &flags);
            let (seed, result) = match &cli.cmd {
                Cmd::RoundTrip { trials } => (
                    Some(eff.seed),
                    commands::round_trip(&scn, &eff, *trials),
                ),
                Cmd::ProductCheck { with: Some(path) } => {
                    let result = scenario::load(path)
                        .and_then(|other| commands::product_check(&scn, &other, &eff));
                    (None, result)
                }
                Cmd::ProductCheck { with: None } => {
                    (None, commands::product_check(&scn, &scn, &eff))
                }
                _ => (None, run_scenario_command(name, &scn, &flags)),
            };
            finish(name, seed, sha, result)
        }
    }
}

/// Render an envelope exactly as `--output` records it: compact JSON and
/// a trailing newline. Golden comparisons are over these bytes.
fn canonical_bytes(env: &Envelope) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(env).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Replay every recorded report under `<fixtures>/golden` and compare
/// bytes. Golden files are named either `reproduce-<example>.json` or
/// `<stem>.<command>.json`, the latter replayed against
/// `<fixtures>/<stem>.scenario.json` using only the options stored in
/// the scenario itself.
fn verify_all(fixtures: &Path) -> Result<Value, CmdError> {
    let golden_dir = fixtures.join("golden");
    let mut names: Vec<String> = match std::fs::read_dir(&golden_dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|n| n.ends_with(".json"))
            .collect(),
        Err(e) => {
            return Err(CmdError::schema(format!(
                "cannot read {}: {e}",
                golden_dir.display()
            )))
        }
    };
    names.sort();
    if names.is_empty() {
        return Err(CmdError::schema(format!(
            "nothing to verify: no golden reports under {}",
            golden_dir.display()
        )));
    }

    let mut checked = Vec::new();
    let mut failures = Vec::new();
    for fname in &names {
        let recorded = std::fs::read(golden_dir.join(fname))
            .map_err(|e| CmdError::schema(format!("cannot read golden {fname}: {e}")))?;
        match replay_golden(fixtures, fname) {
            Ok(bytes) if bytes == recorded => checked.push(fname.clone()),
            Ok(_) => failures.push(format!("{fname}: output differs from recorded report")),
            Err(e) => failures.push(format!("{fname}: replay failed ({})", e.message)),
        }
    }
    if !failures.is_empty() {
        return Err(CmdError {
            exit: EXIT_VERIFICATION,
            kind: "golden-mismatch".into(),
            message: failures.join("; "),
        });
    }
    Ok(json!({
        "fixtures": fixtures.display().to_string(),
        "checked": checked.len(),
        "goldens": checked,
        "all_match": true,
    }))
}

fn replay_golden(fixtures: &Path, fname: &str) -> Result<Vec<u8>, CmdError> {
    let base = fname
        .strip_suffix(".json")
        .ok_or_else(|| CmdError::schema(format!("unrecognized golden name {fname}")))?;
    if let Some(example) = base.strip_prefix("reproduce-") {
        let result = examples::reproduce(example, 4, &[1, 1]);
        return Ok(canonical_bytes(&finish("reproduce-example", None, None, result)));
    }
    let (stem, command) = base
        .rsplit_once('.')
        .ok_or_else(|| CmdError::schema(format!("unrecognized golden name {fname}")))?;
    let scn = scenario::load(&fixtures.join(format!("{stem}.scenario.json")))?;
    let flags = GlobalFlags::default();
    let seed = match command {
        "round-trip" => Some(effective(&scn, &flags).seed),
        _ => None,
    };
    let sha = Some(scn.sha256.clone());
    let result = run_scenario_command(command, &scn, &flags);
    Ok(canonical_bytes(&finish(command, seed, sha, result)))
}

fn main() {
    let cli = Cli::parse();
    let env = execute(&cli);
    let shown = if cli.pretty {
        serde_json::to_string_pretty(&env).expect("report serializes")
    } else {
        serde_json::to_string(&env).expect("report serializes")
    };
    use std::io::Write;
    // tolerate a reader that closes the pipe early (e.g. head)
    if let Err(e) = writeln!(std::io::stdout().lock(), "{shown}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("cannot write report: {e}");
            std::process::exit(report::EXIT_SCHEMA);
        }
    }
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, canonical_bytes(&env)) {
            eprintln!("cannot write {}: {e}", path.display());
            std::process::exit(report::EXIT_SCHEMA);
        }
    }
    std::process::exit(env.exit);
}
