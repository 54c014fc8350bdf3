//! Scenario files. Every field has a default, unknown fields are rejected, and
//! the parsed scenario (defaults filled in) is echoed into the report.

use serde::{Deserialize, Serialize};
use stdsub_core::seqmodel::{AngleDescriptor, Goal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Lattice,
    Modular,
    Tower,
    Skeleton,
    Seqmodel,
    Classify,
    Fock,
    Suite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeParams {
    pub d_max: usize,
    pub cases: usize,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self { d_max: 6, cases: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModularParams {
    pub d_max: usize,
    pub cases: usize,
    /// Principal-angle range used to draw random standard subspaces.
    pub angle_range: (f64, f64),
    pub flow_times: Vec<f64>,
    /// Fiber angles are `i·(π/2)/grid_points` for `i = 1..=grid_points`.
    pub grid_points: usize,
    pub direct_sums: usize,
}

impl Default for ModularParams {
    fn default() -> Self {
        Self {
            d_max: 4,
            cases: 100,
            angle_range: (0.15, 1.5),
            flow_times: vec![-2.7, -1.0, -0.3, 0.3, 1.0, 2.7],
            grid_points: 50,
            direct_sums: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SkeletonParams {
    /// Verify this one skeleton instead of the random battery.
    pub dims: Option<Vec<usize>>,
    pub even_cases: usize,
    pub odd_cases: usize,
    /// Lengths `2p` and `2p+1` for `p = 1..=max_half_length`.
    pub max_half_length: usize,
    pub max_block_dim: usize,
    pub odd_max_block_dim: usize,
}

impl Default for SkeletonParams {
    fn default() -> Self {
        Self {
            dims: None,
            even_cases: 500,
            odd_cases: 100,
            max_half_length: 4,
            max_block_dim: 3,
            odd_max_block_dim: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TowerParams {
    pub skeleton_dims: Vec<Vec<usize>>,
    pub truncated_fibers: Vec<usize>,
    pub fixedpoint_tolerance: f64,
}

impl Default for TowerParams {
    fn default() -> Self {
        Self {
            skeleton_dims: vec![vec![1, 1, 1, 1], vec![2, 2, 2, 2], vec![1, 1, 1, 1, 1, 1]],
            truncated_fibers: vec![8, 16, 32],
            fixedpoint_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeqmodelParams {
    pub angles: AngleDescriptor,
    pub goal: Goal,
    pub cross_check_n: usize,
    pub cross_check_tolerance: f64,
    /// Constant angles that must be reported infeasible.
    pub constant_angles: Vec<f64>,
}

impl Default for SeqmodelParams {
    fn default() -> Self {
        Self {
            angles: AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 },
            goal: Goal::Standard,
            cross_check_n: 1_000_000,
            cross_check_tolerance: 0.01,
            constant_angles: vec![0.3, std::f64::consts::FRAC_PI_3, 1.2, std::f64::consts::FRAC_PI_2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyParams {
    pub grid_points: usize,
    /// Descriptors that must not be classified as constant-angle products.
    pub non_constant: Vec<AngleDescriptor>,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            grid_points: 50,
            non_constant: vec![
                AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 },
                AngleDescriptor::RightAnglePowerLaw { c: 0.5, alpha: 0.5 },
                AngleDescriptor::Alternate {
                    odd: Box::new(AngleDescriptor::Constant { theta: 0.4 }),
                    even: Box::new(AngleDescriptor::Constant { theta: 1.1 }),
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockParams {
    pub d: usize,
    pub cutoff: usize,
    pub radius: f64,
    pub samples: usize,
}

impl Default for FockParams {
    fn default() -> Self {
        Self { d: 1, cutoff: 32, radius: 1.0, samples: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    /// Replaces every check's tolerance when set.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub lattice: LatticeParams,
    #[serde(default)]
    pub modular: ModularParams,
    #[serde(default)]
    pub skeleton: SkeletonParams,
    #[serde(default)]
    pub tower: TowerParams,
    #[serde(default)]
    pub seqmodel: SeqmodelParams,
    #[serde(default)]
    pub classify: ClassifyParams,
    #[serde(default)]
    pub fock: FockParams,
}

impl Scenario {
    pub fn new(mode: Mode, seed: u64) -> Self {
        Self {
            mode,
            seed,
            tolerance: None,
            output: None,
            lattice: Default::default(),
            modular: Default::default(),
            skeleton: Default::default(),
            tower: Default::default(),
            seqmodel: Default::default(),
            classify: Default::default(),
            fock: Default::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, crate::CliError> {
        serde_json::from_str(text).map_err(|e| crate::CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}
