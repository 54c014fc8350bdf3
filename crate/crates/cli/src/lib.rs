//! Scenario-driven front end for `stdsub-core`: parses JSON scenarios, runs
//! the check groups of the requested mode (in parallel, with deterministic
//! ordering) and assembles a JSON report.

pub mod anchors;
pub mod groups;
pub mod report;
pub mod scenario;

use rayon::prelude::*;
use thiserror::Error;

use report::{CheckRecord, GroupOutput, Report};
use scenario::{Mode, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("scenario infeasible: {0}")]
    Infeasible(#[from] stdsub_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 for malformed input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            _ => 1,
        }
    }
}

/// Names of the check groups, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Lattice,
    Modular,
    Fiber,
    Pairing,
    Skeleton,
    CrossProduct,
    Classify,
    Extension,
    Fock,
}

impl Group {
    pub const ALL: [Group; 9] = [
        Group::Lattice,
        Group::Modular,
        Group::Fiber,
        Group::Pairing,
        Group::Skeleton,
        Group::CrossProduct,
        Group::Classify,
        Group::Extension,
        Group::Fock,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Group::Lattice => "lattice",
            Group::Modular => "modular",
            Group::Fiber => "fiber",
            Group::Pairing => "pairing",
            Group::Skeleton => "skeleton",
            Group::CrossProduct => "crossproduct",
            Group::Classify => "classify",
            Group::Extension => "extension",
            Group::Fock => "fock",
        }
    }

    fn run(self, s: &Scenario) -> Result<GroupOutput, CliError> {
        let seed = s.seed;
        Ok(match self {
            Group::Lattice => groups::lattice::run(&s.lattice, seed),
            Group::Modular => groups::modular::run_random(&s.modular, seed)?,
            Group::Fiber => groups::modular::run_fibers(&s.modular)?,
            Group::Pairing => groups::modular::run_pairing(&s.modular, seed)?,
            Group::Skeleton => groups::skeleton::run(&s.skeleton, seed)?,
            Group::CrossProduct => groups::tower::run(&s.tower, seed)?,
            Group::Classify => groups::classify::run(&s.classify),
            Group::Extension => groups::seqmodel::run(&s.seqmodel)?,
            Group::Fock => groups::fock::run(&s.fock, seed)?,
        })
    }
}

pub fn groups_for(mode: Mode) -> Vec<Group> {
    match mode {
        Mode::Lattice => vec![Group::Lattice],
        Mode::Modular => vec![Group::Modular, Group::Fiber, Group::Pairing],
        Mode::Skeleton => vec![Group::Skeleton],
        Mode::Tower => vec![Group::CrossProduct],
        Mode::Seqmodel => vec![Group::Extension],
        Mode::Classify => vec![Group::Classify],
        Mode::Fock => vec![Group::Fock],
        Mode::Suite => Group::ALL.to_vec(),
    }
}

/// Run the groups in parallel and merge their output; the report sorts checks
/// by name, so completion order never shows.
fn run_groups(s: &Scenario, groups: &[Group]) -> Result<(Vec<CheckRecord>, serde_json::Map<String, serde_json::Value>), CliError> {
    let outputs: Vec<Result<GroupOutput, CliError>> = groups.par_iter().map(|g| g.run(s)).collect();
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    for (g, out) in groups.iter().zip(outputs) {
        let out = out?;
        checks.extend(out.checks);
        if !out.data.is_empty() {
            data.insert(g.key().to_string(), serde_json::Value::Object(out.data));
        }
    }
    Ok((checks, data))
}

/// Run a scenario of any mode. Suite scenarios also repeat the whole battery
/// and compare the serialized results byte for byte.
pub fn run_scenario(s: &Scenario) -> Result<Report, CliError> {
    let groups = groups_for(s.mode);
    let (mut checks, data) = run_groups(s, &groups)?;
    let mut out_of_scope = Vec::new();
    if s.mode == Mode::Suite {
        let first = serde_json::to_string(&(&checks, &data)).expect("serializes");
        let (again, again_data) = run_groups(s, &groups)?;
        let second = serde_json::to_string(&(&again, &again_data)).expect("serializes");
        checks.push(
            CheckRecord::count("determinism.repeat-identical", anchors::PLUMBING, usize::from(first != second))
                .with_detail(format!("battery run twice with seed {}", s.seed)),
        );
        out_of_scope = anchors::out_of_scope();
    }
    Ok(Report::new(s.clone(), checks, data, out_of_scope))
}

/// Full acceptance battery with the given seed and optional tolerance override.
pub fn run_suite(seed: u64, tolerance: Option<f64>) -> Result<Report, CliError> {
    let mut s = Scenario::new(Mode::Suite, seed);
    s.tolerance = tolerance;
    run_scenario(&s)
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, CliError> {
    Scenario::parse(&std::fs::read_to_string(path)?)
}
