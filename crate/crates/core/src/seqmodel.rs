//! Symbolic model of `⊕_n ℂ²` with one angle fiber per index, plus
//! cross-fiber coefficient sequences.
//!
//! Convergence questions are answered on the descriptors, never by
//! thresholding partial sums. Each descriptor splits the indices into finitely
//! many residue classes on which the angle behaves like one of
//!
//! * `θ_n → 0` as `c n^{−α}`,
//! * `θ_n → π/2` as `π/2 − c n^{−α}`,
//! * `θ_n` constant,
//!
//! and every weight of interest has a closed-form power-law asymptotic on each
//! class. A series `Σ w_n |c_n|²` then converges iff every class term `K n^p`
//! has `K = 0` or `p < −1`. Partial sums are only a cross-check.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{angle_fiber, direct_sum, join, RealSubspace};
use crate::scalar::{lit, Real};

/// Default number of fibers materialized for concrete linear algebra.
pub const DEFAULT_MATERIALIZE_CAP: usize = 64;

/// Angle sequence `θ_n`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleDescriptor {
    Constant {
        theta: f64,
    },
    /// `θ_n = c n^{−α}`.
    PowerLaw {
        c: f64,
        alpha: f64,
    },
    /// `θ_n = π/2 − c n^{−α}`.
    RightAnglePowerLaw {
        c: f64,
        alpha: f64,
    },
    /// Explicit `θ_1, …, θ_L`, then `tail` evaluated at the global index.
    Table {
        values: Vec<f64>,
        tail: Box<AngleDescriptor>,
    },
    /// Odd `n = 2m − 1` follow `odd` at index `m`, even `n = 2m` follow `even`.
    Alternate {
        odd: Box<AngleDescriptor>,
        even: Box<AngleDescriptor>,
    },
}

/// Coefficient sequence `c_n`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffDescriptor {
    Zero,
    /// `c_n = c n^{−α}`.
    PowerLaw {
        c: f64,
        alpha: f64,
    },
    Table {
        values: Vec<f64>,
        tail: Box<CoeffDescriptor>,
    },
    Alternate {
        odd: Box<CoeffDescriptor>,
        even: Box<CoeffDescriptor>,
    },
    /// No closed form available; every test on it is inconclusive.
    Unknown {
        #[serde(default)]
        note: String,
    },
}

/// Which δ-eigenvector of a fiber the coefficient multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Eigenvalue `cot²(θ/2)`.
    Large,
    /// Eigenvalue `tan²(θ/2)`.
    Small,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSequence {
    pub coefficients: CoeffDescriptor,
    #[serde(default = "default_branch")]
    pub branch: Branch,
}

fn default_branch() -> Branch {
    Branch::Large
}

fn default_cap() -> usize {
    DEFAULT_MATERIALIZE_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSequenceModel {
    pub angles: AngleDescriptor,
    #[serde(default)]
    pub extensions: Vec<CoefficientSequence>,
    #[serde(default = "default_cap")]
    pub n_materialize: usize,
}

impl AngleSequenceModel {
    pub fn new(angles: AngleDescriptor) -> Result<Self> {
        let m = Self {
            angles,
            extensions: Vec::new(),
            n_materialize: DEFAULT_MATERIALIZE_CAP,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_extension(mut self, ext: CoefficientSequence) -> Self {
        self.extensions.push(ext);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.angles.validate()
    }

    pub fn theta(&self, n: usize) -> f64 {
        self.angles.theta(n)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Index inside a sub-sequence of an alternating descriptor, and the residue
/// of that index modulo `half`.
fn sub_index(n: usize) -> usize {
    n.div_ceil(2)
}

fn sub_residue(r: usize, period: usize) -> usize {
    let half = period / 2;
    if r % 2 == 1 { r.div_ceil(2) % half } else { (r / 2) % half }
}

impl AngleDescriptor {
    pub fn theta(&self, n: usize) -> f64 {
        assert!(n >= 1, "fiber indices start at 1");
        match self {
            AngleDescriptor::Constant { theta } => *theta,
            AngleDescriptor::PowerLaw { c, alpha } => c * (n as f64).powf(-alpha),
            AngleDescriptor::RightAnglePowerLaw { c, alpha } => FRAC_PI_2 - c * (n as f64).powf(-alpha),
            AngleDescriptor::Table { values, tail } => {
                values.get(n - 1).copied().unwrap_or_else(|| tail.theta(n))
            }
            AngleDescriptor::Alternate { odd, even } => {
                if n % 2 == 1 { odd.theta(sub_index(n)) } else { even.theta(sub_index(n)) }
            }
        }
    }

    /// Every `θ_n` lies in `(0, π/2]`.
    pub fn validate(&self) -> Result<()> {
        let ok_angle = |t: f64| t > 0.0 && t <= FRAC_PI_2 + 1e-15;
        match self {
            AngleDescriptor::Constant { theta } if !ok_angle(*theta) => {
                Err(Error::InvalidModel(format!("constant angle {theta} outside (0, π/2]")))
            }
            AngleDescriptor::PowerLaw { c, alpha } if !(*alpha >= 0.0 && ok_angle(*c)) => Err(
                Error::InvalidModel(format!("power law c = {c}, alpha = {alpha} leaves (0, π/2]")),
            ),
            AngleDescriptor::RightAnglePowerLaw { c, alpha }
                if !(*alpha >= 0.0 && *c > 0.0 && *c < FRAC_PI_2) =>
            {
                Err(Error::InvalidModel(format!(
                    "right-angle power law c = {c}, alpha = {alpha} leaves (0, π/2]"
                )))
            }
            AngleDescriptor::Table { values, tail } => {
                if let Some(bad) = values.iter().find(|t| !ok_angle(**t)) {
                    return Err(Error::InvalidModel(format!("table angle {bad} outside (0, π/2]")));
                }
                tail.validate()
            }
            AngleDescriptor::Alternate { odd, even } => {
                odd.validate()?;
                even.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn period(&self) -> usize {
        match self {
            AngleDescriptor::Table { tail, .. } => tail.period(),
            AngleDescriptor::Alternate { odd, even } => 2 * lcm(odd.period(), even.period()),
            _ => 1,
        }
    }

    /// Asymptotic form of `θ_n` along `n ≡ r (mod period)`, with constants
    /// expressed in the global index `n`.
    pub fn class_asymptotic(&self, period: usize, r: usize) -> AngleAsym {
        match self {
            AngleDescriptor::Constant { theta } => AngleAsym::Const { theta: *theta },
            AngleDescriptor::PowerLaw { c, alpha } => {
                if *alpha == 0.0 {
                    AngleAsym::Const { theta: *c }
                } else {
                    AngleAsym::ToZero { c: *c, alpha: *alpha }
                }
            }
            AngleDescriptor::RightAnglePowerLaw { c, alpha } => {
                if *alpha == 0.0 {
                    AngleAsym::Const { theta: FRAC_PI_2 - c }
                } else {
                    AngleAsym::ToRight { c: *c, alpha: *alpha }
                }
            }
            AngleDescriptor::Table { tail, .. } => tail.class_asymptotic(period, r),
            AngleDescriptor::Alternate { odd, even } => {
                let sub = if r % 2 == 1 { odd } else { even };
                sub.class_asymptotic(period / 2, sub_residue(r, period)).rescaled_by_half()
            }
        }
    }

    /// Asymptotic forms on each residue class `r = 0..period`.
    pub fn classes(&self) -> Vec<AngleAsym> {
        let p = self.period();
        (0..p).map(|r| self.class_asymptotic(p, r)).collect()
    }
}

/// Asymptotic behaviour of the angle along one residue class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngleAsym {
    ToZero { c: f64, alpha: f64 },
    ToRight { c: f64, alpha: f64 },
    Const { theta: f64 },
}

impl AngleAsym {
    /// Re-express `c m^{−α}` with `m ≈ n/2` as `c 2^α n^{−α}`.
    fn rescaled_by_half(self) -> Self {
        match self {
            AngleAsym::ToZero { c, alpha } => AngleAsym::ToZero { c: c * 2f64.powf(alpha), alpha },
            AngleAsym::ToRight { c, alpha } => AngleAsym::ToRight { c: c * 2f64.powf(alpha), alpha },
            other => other,
        }
    }

    /// Index from which the class stays on its limiting side of π/4.
    fn settle_index(self) -> usize {
        match self {
            AngleAsym::ToZero { c, alpha } | AngleAsym::ToRight { c, alpha } => {
                ((c / FRAC_PI_4).powf(1.0 / alpha)).ceil() as usize + 1
            }
            AngleAsym::Const { .. } => 1,
        }
    }
}

impl CoeffDescriptor {
    pub fn value(&self, n: usize) -> Option<f64> {
        match self {
            CoeffDescriptor::Zero => Some(0.0),
            CoeffDescriptor::PowerLaw { c, alpha } => Some(c * (n as f64).powf(-alpha)),
            CoeffDescriptor::Table { values, tail } => match values.get(n - 1) {
                Some(v) => Some(*v),
                None => tail.value(n),
            },
            CoeffDescriptor::Alternate { odd, even } => {
                if n % 2 == 1 { odd.value(sub_index(n)) } else { even.value(sub_index(n)) }
            }
            CoeffDescriptor::Unknown { .. } => None,
        }
    }

    pub fn period(&self) -> usize {
        match self {
            CoeffDescriptor::Table { tail, .. } => tail.period(),
            CoeffDescriptor::Alternate { odd, even } => 2 * lcm(odd.period(), even.period()),
            _ => 1,
        }
    }

    /// `|c_n| ~ k n^{−β}` along the class, or `None` when unknown.
    pub fn class_asymptotic(&self, period: usize, r: usize) -> Option<CoeffAsym> {
        match self {
            CoeffDescriptor::Zero => Some(CoeffAsym::Zero),
            CoeffDescriptor::PowerLaw { c, alpha } => Some(if *c == 0.0 {
                CoeffAsym::Zero
            } else {
                CoeffAsym::Power { k: c.abs(), beta: *alpha }
            }),
            CoeffDescriptor::Table { tail, .. } => tail.class_asymptotic(period, r),
            CoeffDescriptor::Alternate { odd, even } => {
                let sub = if r % 2 == 1 { odd } else { even };
                sub.class_asymptotic(period / 2, sub_residue(r, period)).map(|a| match a {
                    CoeffAsym::Power { k, beta } => CoeffAsym::Power { k: k * 2f64.powf(beta), beta },
                    z => z,
                })
            }
            CoeffDescriptor::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffAsym {
    Zero,
    Power { k: f64, beta: f64 },
}

/// Weight `w_n` in `Σ w_n |c_n|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightRule {
    /// `w_n = 1`: membership in the Hilbert space.
    Unit,
    /// `cot²(θ_n/2)`: the large δ-eigenvalue; divergence means the vector is
    /// outside the domain of `δ^{1/2}`.
    DeltaLarge,
    /// `tan²(θ_n/2)`: the small δ-eigenvalue.
    DeltaSmall,
    /// `(1 + sin²θ_n)/cos²θ_n`: the quadratic form of the positive part of
    /// `s_{N,N′}` on a δ-eigenvector; divergence is the irreducibility test.
    PairForm,
    /// `w_n = c n^{α}`.
    PowerLaw { c: f64, alpha: f64 },
}

impl WeightRule {
    pub fn name(&self) -> String {
        match self {
            WeightRule::Unit => "unit".into(),
            WeightRule::DeltaLarge => "delta-large".into(),
            WeightRule::DeltaSmall => "delta-small".into(),
            WeightRule::PairForm => "pair-form".into(),
            WeightRule::PowerLaw { c, alpha } => format!("power-law({c}, {alpha})"),
        }
    }

    pub fn value(&self, theta: f64, n: usize) -> f64 {
        match self {
            WeightRule::Unit => 1.0,
            WeightRule::DeltaLarge => (theta / 2.0).tan().powi(-2),
            WeightRule::DeltaSmall => (theta / 2.0).tan().powi(2),
            WeightRule::PairForm => (1.0 + theta.sin().powi(2)) / theta.cos().powi(2),
            WeightRule::PowerLaw { c, alpha } => c * (n as f64).powf(*alpha),
        }
    }

    /// `w_n ~ K n^p` along an angle class; `None` when the weight is undefined
    /// there (the pair form on a constant right-angle class).
    fn asymptotic(&self, a: AngleAsym) -> Option<(f64, f64)> {
        Some(match (self, a) {
            (WeightRule::Unit, _) => (1.0, 0.0),
            (WeightRule::PowerLaw { c, alpha }, _) => (*c, *alpha),
            (WeightRule::DeltaLarge, AngleAsym::ToZero { c, alpha }) => (4.0 / (c * c), 2.0 * alpha),
            (WeightRule::DeltaSmall, AngleAsym::ToZero { c, alpha }) => (c * c / 4.0, -2.0 * alpha),
            (WeightRule::DeltaLarge | WeightRule::DeltaSmall, AngleAsym::ToRight { .. }) => (1.0, 0.0),
            (WeightRule::PairForm, AngleAsym::ToZero { .. }) => (1.0, 0.0),
            (WeightRule::PairForm, AngleAsym::ToRight { c, alpha }) => (2.0 / (c * c), 2.0 * alpha),
            (rule, AngleAsym::Const { theta }) => {
                if matches!(rule, WeightRule::PairForm) && (theta - FRAC_PI_2).abs() < 1e-15 {
                    return None;
                }
                (rule.value(theta, 1), 0.0)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// `w_n |c_n|² ~ k n^p` on one residue class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassTerm {
    pub residue: usize,
    pub period: usize,
    pub coefficient: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumCertificate {
    pub weight: String,
    pub verdict: Verdict,
    pub classes: Vec<ClassTerm>,
    pub reason: String,
}

/// Decide `Σ w_n |c_n|² < ∞` on descriptors.
pub fn weighted_sum_test(
    angles: &AngleDescriptor,
    coeffs: &CoeffDescriptor,
    weight: WeightRule,
) -> SumCertificate {
    let period = lcm(angles.period(), coeffs.period());
    let mut classes = Vec::with_capacity(period);
    let mut diverging = None;
    for r in 0..period {
        let a = angles.class_asymptotic(period, r);
        let Some(ca) = coeffs.class_asymptotic(period, r) else {
            return SumCertificate {
                weight: weight.name(),
                verdict: Verdict::Inconclusive,
                classes,
                reason: "coefficient sequence has no closed-form tail".into(),
            };
        };
        let (k, p) = match ca {
            CoeffAsym::Zero => (0.0, 0.0),
            CoeffAsym::Power { k, beta } => {
                let Some((wk, wp)) = weight.asymptotic(a) else {
                    return SumCertificate {
                        weight: weight.name(),
                        verdict: Verdict::Inconclusive,
                        classes,
                        reason: format!("weight {} undefined on a class with θ = π/2", weight.name()),
                    };
                };
                (wk * k * k, wp - 2.0 * beta)
            }
        };
        if k > 0.0 && p >= -1.0 && diverging.is_none() {
            diverging = Some((r, k, p));
        }
        classes.push(ClassTerm {
            residue: r,
            period,
            coefficient: k,
            exponent: p,
        });
    }
    let (verdict, reason) = match diverging {
        Some((r, k, p)) => (
            Verdict::Diverges,
            format!("class n ≡ {r} mod {period}: term ~ {k:.6} n^{p:.6} with exponent ≥ −1"),
        ),
        None => (
            Verdict::Converges,
            "every class term is zero or ~ K n^p with p < −1".into(),
        ),
    };
    SumCertificate {
        weight: weight.name(),
        verdict,
        classes,
        reason,
    }
}

/// Numeric partial sum and its comparison with the leading asymptotic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartialSumCheck {
    pub n: usize,
    pub partial_sum: f64,
    /// Divergent series: leading asymptotic of `S_N`. Convergent series:
    /// `S_{N/2}` plus its tail estimate.
    pub reference: f64,
    /// Convergent series only: `S_N` plus its tail estimate.
    pub estimate: Option<f64>,
    pub relative_gap: f64,
}

pub fn partial_sum(angles: &AngleDescriptor, coeffs: &CoeffDescriptor, weight: WeightRule, n: usize) -> Option<f64> {
    let mut s = 0.0;
    for i in 1..=n {
        let c = coeffs.value(i)?;
        if c != 0.0 {
            s += weight.value(angles.theta(i), i) * c * c;
        }
    }
    Some(s)
}

fn tail_estimate(cert: &SumCertificate, n: usize) -> f64 {
    cert.classes
        .iter()
        .filter(|c| c.coefficient > 0.0)
        .map(|c| c.coefficient / c.period as f64 * (n as f64).powf(c.exponent + 1.0) / (-c.exponent - 1.0))
        .sum()
}

fn leading_growth(cert: &SumCertificate, n: usize) -> f64 {
    let top = cert
        .classes
        .iter()
        .filter(|c| c.coefficient > 0.0)
        .map(|c| c.exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    cert.classes
        .iter()
        .filter(|c| c.coefficient > 0.0 && c.exponent == top)
        .map(|c| {
            let k = c.coefficient / c.period as f64;
            if c.exponent == -1.0 {
                k * (n as f64).ln()
            } else {
                k * (n as f64).powf(c.exponent + 1.0) / (c.exponent + 1.0)
            }
        })
        .sum()
}

/// Compare partial sums at `n` against the certificate's asymptotics.
pub fn cross_check(
    angles: &AngleDescriptor,
    coeffs: &CoeffDescriptor,
    weight: WeightRule,
    n: usize,
) -> Option<PartialSumCheck> {
    let cert = weighted_sum_test(angles, coeffs, weight);
    let s = partial_sum(angles, coeffs, weight, n)?;
    match cert.verdict {
        Verdict::Diverges => {
            let reference = leading_growth(&cert, n);
            Some(PartialSumCheck {
                n,
                partial_sum: s,
                reference,
                estimate: None,
                relative_gap: (s - reference).abs() / reference.abs().max(f64::MIN_POSITIVE),
            })
        }
        Verdict::Converges => {
            let half = n / 2;
            let s_half = partial_sum(angles, coeffs, weight, half)?;
            let est = s + tail_estimate(&cert, n);
            let reference = s_half + tail_estimate(&cert, half);
            Some(PartialSumCheck {
                n,
                partial_sum: s,
                reference,
                estimate: Some(est),
                relative_gap: (est - reference).abs() / reference.abs().max(f64::MIN_POSITIVE),
            })
        }
        Verdict::Inconclusive => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    Standard,
    Irreducible,
    Both,
}

impl Goal {
    fn required_weights(self) -> Vec<WeightRule> {
        match self {
            Goal::Standard => vec![WeightRule::DeltaLarge],
            Goal::Irreducible => vec![WeightRule::PairForm],
            Goal::Both => vec![WeightRule::DeltaLarge, WeightRule::PairForm],
        }
    }
}

/// Constructed extension vector with its certificates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Extension {
    pub goal: Goal,
    pub vector: CoefficientSequence,
    /// Must be `Diverges` for every required weight.
    pub divergence: Vec<SumCertificate>,
    /// Must be `Converges`: the vector lies in the Hilbert space.
    pub membership: SumCertificate,
}

impl Extension {
    pub fn certified(&self) -> bool {
        self.membership.verdict == Verdict::Converges
            && self.divergence.iter().all(|c| c.verdict == Verdict::Diverges)
    }
}

/// Replace each angle class by a coefficient rule, keeping the descriptor's
/// alternation structure so classes line up index for index.
fn mirror(angles: &AngleDescriptor, f: &impl Fn(AngleAsym) -> CoeffDescriptor) -> CoeffDescriptor {
    match angles {
        AngleDescriptor::Table { tail, .. } => mirror(tail, f),
        AngleDescriptor::Alternate { odd, even } => CoeffDescriptor::Alternate {
            odd: Box::new(mirror(odd, f)),
            even: Box::new(mirror(even, f)),
        },
        other => f(other.class_asymptotic(1, 0)),
    }
}

fn spectral_trend(angles: &AngleDescriptor) -> String {
    let parts: Vec<String> = angles
        .classes()
        .iter()
        .map(|a| match a {
            AngleAsym::ToZero { .. } => "tan²(θ/2) → 0".to_string(),
            AngleAsym::ToRight { .. } => "θ → π/2".to_string(),
            AngleAsym::Const { theta } => {
                let l = (theta / 2.0).tan().powi(2);
                format!("constant δ-pair {{{l:.6}, {:.6}}}", 1.0 / l)
            }
        })
        .collect();
    format!("class trends: [{}]", parts.join(", "))
}

/// `c_n = n^{−(1+α)/2}` on the classes selected by `keep`, zero elsewhere.
fn branch_vector(angles: &AngleDescriptor, keep: fn(&AngleAsym) -> bool) -> CoeffDescriptor {
    mirror(
        angles,
        &|a| {
            if !keep(&a) {
                return CoeffDescriptor::Zero;
            }
            match a {
                AngleAsym::ToZero { alpha, .. } | AngleAsym::ToRight { alpha, .. } => {
                    CoeffDescriptor::PowerLaw { c: 1.0, alpha: (1.0 + alpha) / 2.0 }
                }
                AngleAsym::Const { .. } => CoeffDescriptor::Zero,
            }
        },
    )
}

fn is_to_zero(a: &AngleAsym) -> bool {
    matches!(a, AngleAsym::ToZero { .. })
}

fn is_to_right(a: &AngleAsym) -> bool {
    matches!(a, AngleAsym::ToRight { .. })
}

/// Build the extension vector for `goal`.
///
/// * `Standard`: supported on classes with `θ_n → 0` (δ accumulates at 0), on
///   the large branch, so `Σ cot²(θ_n/2)|c_n|²` diverges.
/// * `Irreducible`: supported on classes with `θ_n → π/2`, so the pair-form sum diverges.
/// * `Both`: `z = χ_{[0,π/4]}(Θ)x + χ_{[π/4,π/2]}(Θ)y`, evaluated fiber by fiber up
///   to the index after which every class stays on its side of π/4, then the
///   sum of the two class-supported tails.
pub fn construct_extension(model: &AngleSequenceModel, goal: Goal) -> Result<Extension> {
    model.validate()?;
    let classes = model.angles.classes();
    let has_zero = classes.iter().any(is_to_zero);
    let has_right = classes.iter().any(is_to_right);
    let need_zero = matches!(goal, Goal::Standard | Goal::Both);
    let need_right = matches!(goal, Goal::Irreducible | Goal::Both);
    if need_zero && !has_zero {
        return Err(Error::GoalInfeasible {
            goal: format!("{goal:?}"),
            reason: format!(
                "no class with θ_n → 0, so the δ-spectrum stays away from 0; {}",
                spectral_trend(&model.angles)
            ),
        });
    }
    if need_right && !has_right {
        return Err(Error::GoalInfeasible {
            goal: format!("{goal:?}"),
            reason: format!(
                "no class with θ_n → π/2, so 1 is not an accumulation point of the δ-spectrum; {}",
                spectral_trend(&model.angles)
            ),
        });
    }
    let coefficients = match goal {
        Goal::Standard => branch_vector(&model.angles, is_to_zero),
        Goal::Irreducible => branch_vector(&model.angles, is_to_right),
        Goal::Both => {
            let x = branch_vector(&model.angles, is_to_zero);
            let y = branch_vector(&model.angles, is_to_right);
            let settle = classes.iter().map(|a| a.settle_index()).max().unwrap_or(1)
                + model.angles.period();
            let prefix: Vec<f64> = (1..=settle)
                .map(|n| {
                    let pick = if model.theta(n) <= FRAC_PI_4 { &x } else { &y };
                    pick.value(n).unwrap_or(0.0)
                })
                .collect();
            // x and y have disjoint class supports, so past the settle index z = x + y
            let tail = mirror(
                &model.angles,
                &|a| match a {
                    AngleAsym::ToZero { alpha, .. } | AngleAsym::ToRight { alpha, .. } => {
                        CoeffDescriptor::PowerLaw { c: 1.0, alpha: (1.0 + alpha) / 2.0 }
                    }
                    AngleAsym::Const { .. } => CoeffDescriptor::Zero,
                },
            );
            CoeffDescriptor::Table {
                values: prefix,
                tail: Box::new(tail),
            }
        }
    };
    let divergence = goal
        .required_weights()
        .into_iter()
        .map(|w| weighted_sum_test(&model.angles, &coefficients, w))
        .collect();
    let membership = weighted_sum_test(&model.angles, &coefficients, WeightRule::Unit);
    Ok(Extension {
        goal,
        vector: CoefficientSequence {
            coefficients,
            branch: Branch::Large,
        },
        divergence,
        membership,
    })
}

/// First `D` fibers as a standard subspace `M0` of `ℂ^{2D}` and `M1 = M0 + span(y)`
/// for the truncated extension vectors.
#[derive(Debug, Clone)]
pub struct Materialized<T: Real> {
    pub fibers: usize,
    pub m0: RealSubspace<T>,
    pub m1: RealSubspace<T>,
    pub extension_vectors: Vec<DVector<T>>,
}

/// Coordinate of the δ-eigenvector of fiber `n` (1-based) on `branch`.
pub fn branch_coordinate(n: usize, branch: Branch) -> usize {
    4 * (n - 1) + if branch == Branch::Large { 2 } else { 0 }
}

pub fn materialize<T: Real>(model: &AngleSequenceModel, d: usize) -> Result<Materialized<T>> {
    model.validate()?;
    if d == 0 || d > model.n_materialize {
        return Err(Error::Precondition(format!(
            "fiber count {d} outside 1..={}",
            model.n_materialize
        )));
    }
    let fibers: Vec<RealSubspace<T>> = (1..=d)
        .map(|n| angle_fiber(lit::<T>(model.theta(n))))
        .collect::<Result<_>>()?;
    let m0 = direct_sum(&fibers)?;
    let space = m0.space();
    let mut m1 = m0.clone();
    let mut vectors = Vec::new();
    for ext in &model.extensions {
        let mut y = DVector::zeros(space.real_dim());
        for n in 1..=d {
            let c = ext.coefficients.value(n).ok_or_else(|| {
                Error::InvalidModel("extension coefficients have no closed form".into())
            })?;
            y[branch_coordinate(n, ext.branch)] = lit(c);
        }
        let ys = RealSubspace::from_columns(space, &DMatrix::from_column_slice(y.len(), 1, y.as_slice()))?;
        m1 = join(&m1, &ys);
        vectors.push(y);
    }
    Ok(Materialized {
        fibers: d,
        m0,
        m1,
        extension_vectors: vectors,
    })
}

/// Closed-form `min_{n ≤ D} tan²(θ_n/2)`.
pub fn lambda_min(model: &AngleSequenceModel, d: usize) -> f64 {
    (1..=d)
        .map(|n| (model.theta(n) / 2.0).tan().powi(2))
        .fold(f64::INFINITY, f64::min)
}

/// Type label of the infinite tensor product built from the angle sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum TypeLabel {
    /// Constant angle in `(0, π/2)`: type III_λ with `λ = tan²(θ/2)`; the
    /// eigenvalue ratios are `{λ^k : k ∈ ℤ}`.
    ThreeLambda { lambda: f64, inverse: f64 },
    /// Constant angle π/2: δ = I on every fiber.
    TrivialModular { lambda: f64 },
    /// Outside the constant-angle case; ratios `tan²(θ_n/2)` attached raw.
    Unknown { ratios: Vec<f64> },
}

pub const UNKNOWN_RATIO_SAMPLES: usize = 16;

pub fn itpfi_classify(angles: &AngleDescriptor) -> TypeLabel {
    match angles {
        AngleDescriptor::Constant { theta } if (*theta - FRAC_PI_2).abs() < 1e-15 => {
            TypeLabel::TrivialModular { lambda: 1.0 }
        }
        AngleDescriptor::Constant { theta } => {
            let lambda = (theta / 2.0).tan().powi(2);
            TypeLabel::ThreeLambda {
                lambda,
                inverse: 1.0 / lambda,
            }
        }
        other => TypeLabel::Unknown {
            ratios: (1..=UNKNOWN_RATIO_SAMPLES)
                .map(|n| (other.theta(n) / 2.0).tan().powi(2))
                .collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::tomita;
    use std::f64::consts::FRAC_PI_3;

    fn inv_n() -> AngleDescriptor {
        AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 }
    }

    fn one_over_n() -> CoeffDescriptor {
        CoeffDescriptor::PowerLaw { c: 1.0, alpha: 1.0 }
    }

    #[test]
    fn basic_sum_verdicts() {
        let a = inv_n();
        let c = one_over_n();
        assert_eq!(weighted_sum_test(&a, &c, WeightRule::Unit).verdict, Verdict::Converges);
        let w = WeightRule::PowerLaw { c: 1.0, alpha: 2.0 };
        assert_eq!(weighted_sum_test(&a, &c, w).verdict, Verdict::Diverges);
        assert_eq!(weighted_sum_test(&a, &c, WeightRule::DeltaLarge).verdict, Verdict::Diverges);
        let unk = CoeffDescriptor::Unknown { note: String::new() };
        assert_eq!(weighted_sum_test(&a, &unk, WeightRule::Unit).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn cot_squared_asymptotic() {
        // cot²(x/2) ~ 4/x² as x → 0
        for x in [1e-2, 1e-3, 1e-4] {
            let ratio = WeightRule::DeltaLarge.value(x, 1) * x * x / 4.0;
            assert!((ratio - 1.0).abs() < x);
        }
    }

    #[test]
    fn cross_checks_agree() {
        let a = inv_n();
        let c = one_over_n();
        let div = cross_check(&a, &c, WeightRule::DeltaLarge, 100_000).unwrap();
        assert!(div.relative_gap < 0.01, "{div:?}");
        let conv = cross_check(&a, &c, WeightRule::Unit, 100_000).unwrap();
        assert!(conv.relative_gap < 0.01);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((conv.estimate.unwrap() - zeta2).abs() < 1e-6);
    }

    #[test]
    fn standard_extension_for_inverse_angles() {
        let m = AngleSequenceModel::new(inv_n()).unwrap();
        let ext = construct_extension(&m, Goal::Standard).unwrap();
        assert!(ext.certified());
        assert_eq!(ext.vector.coefficients, one_over_n());
        assert_eq!(ext.vector.branch, Branch::Large);
    }

    #[test]
    fn constant_model_is_infeasible() {
        let m = AngleSequenceModel::new(AngleDescriptor::Constant { theta: FRAC_PI_3 }).unwrap();
        for goal in [Goal::Standard, Goal::Irreducible, Goal::Both] {
            match construct_extension(&m, goal) {
                Err(Error::GoalInfeasible { reason, .. }) => assert!(reason.contains("0.333333")),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn both_goal_on_split_model() {
        let angles = AngleDescriptor::Alternate {
            odd: Box::new(inv_n()),
            even: Box::new(AngleDescriptor::RightAnglePowerLaw { c: 0.5, alpha: 1.0 }),
        };
        let m = AngleSequenceModel::new(angles).unwrap();
        let ext = construct_extension(&m, Goal::Both).unwrap();
        assert!(ext.certified(), "{ext:?}");
        // χ selection: fiber 1 has θ = 1 > π/4 on a class where only x lives, so z_1 = 0
        assert_eq!(ext.vector.coefficients.value(1), Some(0.0));
        assert!(ext.vector.coefficients.value(3).unwrap() > 0.0);
        assert!(ext.vector.coefficients.value(2).unwrap() > 0.0);
        let std_only = construct_extension(&m, Goal::Standard).unwrap();
        assert!(std_only.certified());
        assert_eq!(std_only.vector.coefficients.value(2), Some(0.0));
    }

    #[test]
    fn alternate_class_constants() {
        let a = AngleDescriptor::Alternate {
            odd: Box::new(inv_n()),
            even: Box::new(AngleDescriptor::Constant { theta: 1.0 }),
        };
        assert_eq!(a.period(), 2);
        // odd n = 2m − 1: θ = 1/m ≈ 2/n
        match a.class_asymptotic(2, 1) {
            AngleAsym::ToZero { c, alpha } => assert!((c - 2.0).abs() < 1e-15 && alpha == 1.0),
            other => panic!("{other:?}"),
        }
        assert!((a.theta(5) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a.theta(4), 1.0);
    }

    #[test]
    fn materialize_shapes_and_spectra() {
        let m = AngleSequenceModel::new(AngleDescriptor::Constant { theta: FRAC_PI_3 }).unwrap();
        let mat = materialize::<f64>(&m, 4).unwrap();
        assert_eq!(mat.m0.dim(), 8);
        assert_eq!(mat.m0, mat.m1);

        let ext = construct_extension(&AngleSequenceModel::new(inv_n()).unwrap(), Goal::Standard).unwrap();
        let m = AngleSequenceModel::new(inv_n()).unwrap().with_extension(ext.vector);
        let mat = materialize::<f64>(&m, 8).unwrap();
        assert_eq!(mat.m1.dim(), mat.m0.dim() + 1);
        let md = tomita(&mat.m0).unwrap();
        let mut want: Vec<f64> = (1..=8)
            .flat_map(|n| {
                let t = (m.theta(n) / 2.0).tan().powi(2);
                [t, 1.0 / t]
            })
            .collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, w) in md.delta_spectrum().iter().zip(&want) {
            assert!((got - w).abs() <= 1e-10 * w.max(1.0));
        }
        assert!(materialize::<f64>(&m, 65).is_err());
    }

    #[test]
    fn lambda_min_decreases() {
        let m = AngleSequenceModel::new(inv_n()).unwrap();
        let vals: Vec<f64> = [4, 8, 16, 32].iter().map(|&d| lambda_min(&m, d)).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        assert!((lambda_min(&m, 8) - (1.0f64 / 16.0).tan().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn classifier_contract() {
        match itpfi_classify(&AngleDescriptor::Constant { theta: FRAC_PI_3 }) {
            TypeLabel::ThreeLambda { lambda, inverse } => {
                assert!((lambda - 1.0 / 3.0).abs() < 1e-12);
                assert!((lambda * inverse - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            itpfi_classify(&AngleDescriptor::Constant { theta: FRAC_PI_2 }),
            TypeLabel::TrivialModular { lambda: 1.0 }
        );
        assert!(matches!(itpfi_classify(&inv_n()), TypeLabel::Unknown { .. }));
    }

    #[test]
    fn descriptors_roundtrip_json() {
        let json = r#"{"angles": {"kind":"power_law","c":1,"alpha":1},
                       "extensions": [{"coefficients": {"kind":"power_law","c":1,"alpha":1}}]}"#;
        let m: AngleSequenceModel = serde_json::from_str(json).unwrap();
        assert_eq!(m.angles, inv_n());
        assert_eq!(m.n_materialize, 64);
        assert_eq!(m.extensions[0].branch, Branch::Large);
        let bad = r#"{"angles": {"kind":"power_law","c":1,"alpha":1,"oops":2}}"#;
        assert!(serde_json::from_str::<AngleSequenceModel>(bad).is_err());
        let invalid = AngleSequenceModel::new(AngleDescriptor::Constant { theta: 0.0 });
        assert!(invalid.is_err());
    }
}
