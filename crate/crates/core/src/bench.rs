//! Executable ordering theorems: each scenario builds hypothesis-satisfying
//! instances (the worked examples plus seeded random draws), certifies the
//! claimed order and aggregates the verdicts.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certify::{
    certify, order_curve, verdict_from_curve, Curve, Grid, GridPolicy, Order, OrderVerdict,
    Tolerance, DEFAULT_GRID_COUNT,
};
use crate::error::{Error, Result};
use crate::lifetime::{Baseline, GompertzMakeham, Lifetime, LifetimeModel, WeibullG};
use crate::majorization::{
    apply_chain, apply_t_transform, generate_with_rng, majorize_check, pn_membership,
    GeneratorConfig, HypothesisKind, HypothesisPair, MajorizationKind, ParamMatrix, TTransform,
};
use crate::numeric::exact_sum;
use crate::system::{lambda_aggregate_sf, Structure, SystemSpec};

pub const DEFAULT_INSTANCE_COUNT: usize = 200;

/// Top and bottom rows of the worked-example base matrix.
pub const EXAMPLE_BASE: [[f64; 2]; 2] = [[4.8, 3.4], [2.5, 1.6]];
pub const EXAMPLE_LAMBDA: f64 = 0.45;
pub const EXAMPLE_WG_BETA: f64 = 3.0;
pub const EXAMPLE_GM_LAMBDA: f64 = 1.0;

/// Number of abscissae used to screen the odds-function derivatives.
const ODDS_SCREEN_POINTS: usize = 64;
/// Quantum for λ values used in the sum-invariance check; transfers by
/// multiples of it are exact in binary floating point.
const DYADIC_QUANTUM: f64 = 1.0 / (1u64 << 30) as f64;
const SUM_INVARIANCE_REL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T3_1,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T4_1,
    T4_2,
    T4_3,
    T4_4,
    T4_5,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T3_5,
        TheoremId::T4_1,
        TheoremId::T4_2,
        TheoremId::T4_3,
        TheoremId::T4_4,
        TheoremId::T4_5,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::T3_1 => "T3.1",
            TheoremId::T3_2 => "T3.2",
            TheoremId::T3_3 => "T3.3",
            TheoremId::T3_4 => "T3.4",
            TheoremId::T3_5 => "T3.5",
            TheoremId::T4_1 => "T4.1",
            TheoremId::T4_2 => "T4.2",
            TheoremId::T4_3 => "T4.3",
            TheoremId::T4_4 => "T4.4",
            TheoremId::T4_5 => "T4.5",
        }
    }

    pub fn default_n(&self) -> usize {
        match self {
            TheoremId::T3_1 | TheoremId::T4_1 => 2,
            _ => 4,
        }
    }

    /// Whether the theorem family is Weibull-G (otherwise Gompertz-Makeham).
    pub fn is_weibull_g(&self) -> bool {
        matches!(
            self,
            TheoremId::T3_1 | TheoremId::T3_2 | TheoremId::T3_3 | TheoremId::T3_4 | TheoremId::T3_5
        )
    }

    fn is_chain(&self) -> bool {
        matches!(
            self,
            TheoremId::T3_1
                | TheoremId::T3_2
                | TheoremId::T3_3
                | TheoremId::T4_1
                | TheoremId::T4_2
                | TheoremId::T4_3
        )
    }

    fn has_example(&self) -> bool {
        matches!(self, TheoremId::T3_1 | TheoremId::T4_1)
    }

    pub fn claim(&self) -> Claim {
        match self {
            id if id.is_chain() => Claim {
                order: Order::Hr,
                structure: Structure::Series,
                statement: "X_{1:n} >=hr Y_{1:n}",
            },
            TheoremId::T3_4 => Claim {
                order: Order::Rh,
                structure: Structure::Parallel,
                statement: "X_{n:n} <=rh Y_{n:n}",
            },
            TheoremId::T4_4 => Claim {
                order: Order::St,
                structure: Structure::Series,
                statement: "sf of X_{1:n} depends on sum(lambda) only; X_{1:n} <=st Y_{1:n}",
            },
            _ => Claim {
                order: Order::St,
                structure: Structure::Parallel,
                statement: "X_{n:n} <=st Y_{n:n}",
            },
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(wanted))
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown theorem id {wanted:?}; expected one of T3.1-T3.5, T4.1-T4.5"
                ))
            })
    }
}

/// The order a theorem asserts and the order statistic it is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Claim {
    pub order: Order,
    pub structure: Structure,
    pub statement: &'static str,
}

/// A hypothesis that [`counterexample_probe`] can switch off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DroppedHypothesis {
    Nothing,
    /// Draw the common W-G shape from `[0.5, 2)` instead of `[2, 4]`.
    ShapeAtLeastTwo,
    /// Do not keep the base matrix and intermediate products in `P_n`.
    SimilarOrdering,
    /// Draw `a ≺_w b` pairs where the result needs `a ≺^w b`.
    WeakSupermajorization,
}

impl DroppedHypothesis {
    pub fn as_str(&self) -> &'static str {
        match self {
            DroppedHypothesis::Nothing => "nothing",
            DroppedHypothesis::ShapeAtLeastTwo => "shape",
            DroppedHypothesis::SimilarOrdering => "pn",
            DroppedHypothesis::WeakSupermajorization => "weak-super",
        }
    }

    fn applies_to(&self, id: TheoremId) -> bool {
        match self {
            DroppedHypothesis::Nothing => true,
            DroppedHypothesis::ShapeAtLeastTwo => id.is_chain() && id.is_weibull_g(),
            DroppedHypothesis::SimilarOrdering => id.is_chain(),
            DroppedHypothesis::WeakSupermajorization => !id.is_chain(),
        }
    }
}

impl fmt::Display for DroppedHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DroppedHypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nothing" | "none" => Ok(DroppedHypothesis::Nothing),
            "shape" | "beta" => Ok(DroppedHypothesis::ShapeAtLeastTwo),
            "pn" | "similar-ordering" => Ok(DroppedHypothesis::SimilarOrdering),
            "weak-super" | "weak-supermajorization" => Ok(DroppedHypothesis::WeakSupermajorization),
            other => Err(Error::Usage(format!(
                "unknown hypothesis {other:?}; expected nothing, shape, pn or weak-super"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremScenario {
    pub id: TheoremId,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub grid_count: usize,
    pub policy: GridPolicy,
    pub x_max: Option<f64>,
    pub tolerance: Tolerance,
    /// Use the worked example as instance 0 where one exists.
    pub include_example: bool,
    pub baseline: Baseline,
}

impl TheoremScenario {
    pub fn new(id: TheoremId) -> Self {
        Self {
            id,
            n: id.default_n(),
            count: DEFAULT_INSTANCE_COUNT,
            seed: 0,
            grid_count: DEFAULT_GRID_COUNT,
            policy: GridPolicy::LogSpaced,
            x_max: None,
            tolerance: Tolerance {
                abs: 1e-9,
                rel: 1e-9,
            },
            include_example: true,
            baseline: Baseline::Exponential,
        }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_grid(mut self, count: usize, policy: GridPolicy, x_max: Option<f64>) -> Self {
        self.grid_count = count;
        self.policy = policy;
        self.x_max = x_max;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_example(mut self, include: bool) -> Self {
        self.include_example = include;
        self
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Scenario {
            id: self.id.to_string(),
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(self.error("count must be at least 1"));
        }
        let min_n = if self.id.is_chain() { 2 } else { 1 };
        if self.n < min_n.max(2) {
            return Err(self.error("n must be at least 2"));
        }
        if matches!(self.id, TheoremId::T3_1 | TheoremId::T4_1) && self.n != 2 {
            return Err(self.error("this theorem is stated for n = 2"));
        }
        if self.id == TheoremId::T3_5 && !self.baseline.is_exponential() {
            return Err(self.error("requires the exponential baseline"));
        }
        Ok(())
    }
}

/// Chain-majorization instance: the base `B ∈ P_n` parametrizes `Y`, and
/// `X` uses `B·T_1⋯T_k`.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainFamily {
    /// Rows are `(alpha, gamma)`.
    WeibullG { beta: f64, baseline: Baseline },
    /// Rows are `(alpha, beta)`.
    GompertzMakeham { lambda: f64 },
}

/// Vector-majorization instance: only one parameter differs between `X`
/// and `Y`.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorFamily {
    /// Parallel W-G, varied `alpha`.
    WeibullGAlpha {
        beta: f64,
        gamma: f64,
        baseline: Baseline,
    },
    /// Parallel W-Exp, varied `gamma`.
    WeibullGGamma { alpha: f64, beta: f64 },
    /// Series GM, varied `lambda`.
    GompertzMakehamLambda { alpha: f64, beta: f64 },
    /// Parallel GM, varied `alpha`.
    GompertzMakehamAlpha { beta: f64, lambda: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Chain {
        family: ChainFamily,
        base: ParamMatrix,
        transforms: Vec<TTransform>,
    },
    Vectors {
        family: VectorFamily,
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

impl Instance {
    /// Worked example for T3.1 (W-Exp, `beta = 3`) or T4.1 (GM, `lambda = 1`).
    pub fn example(id: TheoremId) -> Option<Self> {
        let family = match id {
            TheoremId::T3_1 => ChainFamily::WeibullG {
                beta: EXAMPLE_WG_BETA,
                baseline: Baseline::Exponential,
            },
            TheoremId::T4_1 => ChainFamily::GompertzMakeham {
                lambda: EXAMPLE_GM_LAMBDA,
            },
            _ => return None,
        };
        Some(Instance::Chain {
            family,
            base: ParamMatrix::from_rows(EXAMPLE_BASE).expect("example matrix is valid"),
            transforms: vec![TTransform::new(EXAMPLE_LAMBDA, 0, 1).expect("valid transform")],
        })
    }

    /// The chain of parameter matrices `B, B·T_1, …, B·T_1⋯T_k`.
    pub fn chain_matrices(&self) -> Result<Vec<ParamMatrix>> {
        match self {
            Instance::Chain {
                base, transforms, ..
            } => {
                let mut out = vec![base.clone()];
                for t in transforms {
                    let next = apply_t_transform(out.last().expect("non-empty"), t)?;
                    out.push(next);
                }
                Ok(out)
            }
            Instance::Vectors { .. } => Err(Error::Usage("not a chain instance".into())),
        }
    }

    /// `(X, Y)` systems of the instance.
    pub fn systems(&self) -> Result<(SystemSpec, SystemSpec)> {
        match self {
            Instance::Chain {
                family,
                base,
                transforms,
            } => {
                let x = apply_chain(base, transforms)?;
                Ok((chain_system(family, &x)?, chain_system(family, base)?))
            }
            Instance::Vectors { family, x, y } => {
                Ok((vector_system(family, x)?, vector_system(family, y)?))
            }
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Chain {
                family,
                base,
                transforms,
            } => {
                match family {
                    ChainFamily::WeibullG { beta, .. } => {
                        write!(f, "W-G beta={beta}; rows (alpha, gamma)")?
                    }
                    ChainFamily::GompertzMakeham { lambda } => {
                        write!(f, "GM lambda={lambda}; rows (alpha, beta)")?
                    }
                }
                write!(f, "; B=[{:?}; {:?}]; T=", base.row(0), base.row(1))?;
                let parts: Vec<String> = transforms
                    .iter()
                    .map(|t| {
                        let (i, j) = t.indices();
                        format!("T^{}_({},{})", t.lambda(), i + 1, j + 1)
                    })
                    .collect();
                f.write_str(&parts.join(" "))
            }
            Instance::Vectors { family, x, y } => {
                match family {
                    VectorFamily::WeibullGAlpha { beta, gamma, .. } => {
                        write!(f, "W-G beta={beta} gamma={gamma}; alpha")?
                    }
                    VectorFamily::WeibullGGamma { alpha, beta } => {
                        write!(f, "W-Exp alpha={alpha} beta={beta}; gamma")?
                    }
                    VectorFamily::GompertzMakehamLambda { alpha, beta } => {
                        write!(f, "GM alpha={alpha} beta={beta}; lambda")?
                    }
                    VectorFamily::GompertzMakehamAlpha { beta, lambda } => {
                        write!(f, "GM beta={beta} lambda={lambda}; alpha")?
                    }
                }
                write!(f, " X={x:?} Y={y:?}")
            }
        }
    }
}

fn chain_system(family: &ChainFamily, m: &ParamMatrix) -> Result<SystemSpec> {
    let components = (0..m.cols())
        .map(|c| {
            let (top, bottom) = m.column(c);
            Ok(match family {
                ChainFamily::WeibullG { beta, baseline } => {
                    WeibullG::new(top, *beta, bottom, baseline.clone())?.into()
                }
                ChainFamily::GompertzMakeham { lambda } => {
                    GompertzMakeham::new(top, bottom, *lambda)?.into()
                }
            })
        })
        .collect::<Result<Vec<LifetimeModel>>>()?;
    SystemSpec::series(components)
}

fn vector_system(family: &VectorFamily, v: &[f64]) -> Result<SystemSpec> {
    let components = v
        .iter()
        .map(|&p| {
            Ok(match family {
                VectorFamily::WeibullGAlpha {
                    beta,
                    gamma,
                    baseline,
                } => WeibullG::new(p, *beta, *gamma, baseline.clone())?.into(),
                VectorFamily::WeibullGGamma { alpha, beta } => {
                    WeibullG::exponential(*alpha, *beta, p)?.into()
                }
                VectorFamily::GompertzMakehamLambda { alpha, beta } => {
                    GompertzMakeham::new(*alpha, *beta, p)?.into()
                }
                VectorFamily::GompertzMakehamAlpha { beta, lambda } => {
                    GompertzMakeham::new(p, *beta, *lambda)?.into()
                }
            })
        })
        .collect::<Result<Vec<LifetimeModel>>>()?;
    let structure = match family {
        VectorFamily::GompertzMakehamLambda { .. } => Structure::Series,
        _ => Structure::Parallel,
    };
    SystemSpec::new(components, structure)
}

/// A failed instance with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub instance: usize,
    pub parameters: String,
    pub check: String,
    pub verdict: Option<OrderVerdict>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub id: TheoremId,
    pub claim: Claim,
    pub run: usize,
    pub passed: usize,
    /// Smallest slack over all checks (negative below the allowance means failure).
    pub worst_margin: f64,
    pub failures: Vec<Failure>,
    /// Comparison curve of instance 0 (`diff` is the claimed slack).
    pub curve: Option<Curve>,
    pub notes: Vec<String>,
}

impl BenchReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.run
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem: {}", self.id)?;
        writeln!(f, "claim: {}", self.claim.statement)?;
        writeln!(f, "order: {}", self.claim.order)?;
        writeln!(f, "run: {}", self.run)?;
        writeln!(f, "passed: {}", self.passed)?;
        writeln!(f, "worst_margin: {:e}", self.worst_margin)?;
        writeln!(
            f,
            "status: {}",
            if self.all_passed() { "pass" } else { "fail" }
        )?;
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        for fail in &self.failures {
            write!(
                f,
                "failure: instance={} check={} params={}",
                fail.instance, fail.check, fail.parameters
            )?;
            if let Some(v) = &fail.verdict {
                write!(f, " margin={:e} tolerance={:e}", v.margin, v.tolerance)?;
                if let Some(x) = v.witness_x {
                    write!(f, " witness_x={x}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of evaluating one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceOutcome {
    pub passed: bool,
    pub worst_margin: f64,
    pub failed_checks: Vec<(String, Option<OrderVerdict>)>,
    pub curve: Curve,
}

struct Probe {
    shape_range: (f64, f64),
    enforce_pn: bool,
    vector_kind: HypothesisKind,
}

impl Probe {
    fn from(dropped: DroppedHypothesis) -> Self {
        Self {
            shape_range: if dropped == DroppedHypothesis::ShapeAtLeastTwo {
                (0.5, 2.0)
            } else {
                (2.0, 4.0)
            },
            enforce_pn: dropped != DroppedHypothesis::SimilarOrdering,
            vector_kind: if dropped == DroppedHypothesis::WeakSupermajorization {
                HypothesisKind::WeakSub
            } else {
                HypothesisKind::WeakSuper
            },
        }
    }
}

/// Run every instance of a scenario with all hypotheses enforced.
pub fn run_scenario(s: &TheoremScenario) -> Result<BenchReport> {
    run_with(s, DroppedHypothesis::Nothing)
}

/// Rerun a scenario with one hypothesis switched off. The report records
/// how many instances still satisfy the conclusion; nothing is asserted.
pub fn counterexample_probe(
    s: &TheoremScenario,
    dropped: DroppedHypothesis,
) -> Result<BenchReport> {
    if !dropped.applies_to(s.id) {
        return Err(s.error(format!("hypothesis {dropped:?} does not apply")));
    }
    let mut report = run_with(s, dropped)?;
    if dropped != DroppedHypothesis::Nothing {
        report.notes.push(format!(
            "probe: dropped {dropped}; {} of {} instances violate the conclusion",
            report.run - report.passed,
            report.run
        ));
    }
    Ok(report)
}

fn run_with(s: &TheoremScenario, dropped: DroppedHypothesis) -> Result<BenchReport> {
    s.validate()?;
    let probe = Probe::from(dropped);
    let mut report = BenchReport {
        id: s.id,
        claim: s.id.claim(),
        run: 0,
        passed: 0,
        worst_margin: f64::INFINITY,
        failures: Vec::new(),
        curve: None,
        notes: Vec::new(),
    };
    for index in 0..s.count {
        let instance = build_instance(s, &probe, dropped, index)?;
        if dropped == DroppedHypothesis::Nothing {
            validate_hypotheses(s, &instance)?;
        }
        let outcome = evaluate_instance(s, &instance)?;
        report.run += 1;
        report.worst_margin = report.worst_margin.min(outcome.worst_margin);
        if outcome.passed {
            report.passed += 1;
        }
        for (check, verdict) in outcome.failed_checks {
            report.failures.push(Failure {
                instance: index,
                parameters: instance.to_string(),
                check,
                verdict,
            });
        }
        if index == 0 {
            report.curve = Some(outcome.curve);
        }
    }
    if s.include_example && s.id.has_example() {
        report.notes.push("instance 0 is the worked example".into());
    }
    Ok(report)
}

fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn build_instance(
    s: &TheoremScenario,
    probe: &Probe,
    dropped: DroppedHypothesis,
    index: usize,
) -> Result<Instance> {
    if index == 0 && s.include_example {
        if let Some(mut example) = Instance::example(s.id) {
            if dropped == DroppedHypothesis::SimilarOrdering {
                // swap the top row so the base leaves P_2
                if let Instance::Chain { base, .. } = &mut example {
                    let top: Vec<f64> = base.row(0).iter().rev().copied().collect();
                    *base = ParamMatrix::new(top, base.row(1).to_vec())?;
                }
            }
            return Ok(example);
        }
    }
    let mut rng = instance_rng(s.seed, index);
    if s.id.is_chain() {
        let transforms = match s.id {
            TheoremId::T3_3 | TheoremId::T4_3 => (2, 4),
            _ => (1, 1),
        };
        let family = if s.id.is_weibull_g() {
            ChainFamily::WeibullG {
                beta: rng.gen_range(probe.shape_range.0..probe.shape_range.1),
                baseline: s.baseline.clone(),
            }
        } else {
            ChainFamily::GompertzMakeham {
                lambda: rng.gen_range(0.1..=10.0),
            }
        };
        let mut cfg = GeneratorConfig::new(s.n, HypothesisKind::ChainViaTransforms)
            .with_transforms(transforms.0, transforms.1);
        cfg.enforce_pn = probe.enforce_pn;
        let pair = generate_with_rng(&cfg, &mut rng)
            .map_err(|e| s.error(format!("P_n chain construction failed: {e}")))?;
        let HypothesisPair::Chain { b, transforms, .. } = pair else {
            unreachable!("chain generator returns chains")
        };
        return Ok(Instance::Chain {
            family,
            base: b,
            transforms,
        });
    }

    let family = match s.id {
        TheoremId::T3_4 => VectorFamily::WeibullGAlpha {
            beta: rng.gen_range(2.0..=4.0),
            gamma: rng.gen_range(0.5..=5.0),
            baseline: s.baseline.clone(),
        },
        TheoremId::T3_5 => VectorFamily::WeibullGGamma {
            alpha: rng.gen_range(0.5..=5.0),
            beta: rng.gen_range(2.0..=4.0),
        },
        TheoremId::T4_4 => VectorFamily::GompertzMakehamLambda {
            alpha: rng.gen_range(0.5..=5.0),
            beta: rng.gen_range(0.5..=5.0),
        },
        _ => VectorFamily::GompertzMakehamAlpha {
            beta: rng.gen_range(0.5..=5.0),
            lambda: rng.gen_range(0.1..=10.0),
        },
    };
    let range = if s.id == TheoremId::T4_4 {
        (0.1, 10.0)
    } else {
        (0.5, 5.0)
    };
    let cfg = GeneratorConfig::new(s.n, probe.vector_kind).with_ranges(range, range);
    let pair = generate_with_rng(&cfg, &mut rng)
        .map_err(|e| s.error(format!("majorized pair construction failed: {e}")))?;
    let HypothesisPair::Vectors { a, b, .. } = pair else {
        unreachable!("vector generator returns vectors")
    };
    Ok(Instance::Vectors { family, x: a, y: b })
}

/// Re-check the theorem's hypotheses on a built instance.
pub fn validate_hypotheses(s: &TheoremScenario, instance: &Instance) -> Result<()> {
    match instance {
        Instance::Chain {
            family, transforms, ..
        } => {
            let chain = instance.chain_matrices()?;
            if s.id.is_chain()
                && matches!(s.id, TheoremId::T3_3 | TheoremId::T4_3)
                && transforms.len() < 2
            {
                return Err(s.error("chain needs at least two T-transforms"));
            }
            // every matrix a transform is applied to must lie in P_n
            if let Some(k) = chain[..chain.len() - 1]
                .iter()
                .position(|m| !pn_membership(m))
            {
                return Err(s.error(format!("P_n violated by chain matrix {k}")));
            }
            if let ChainFamily::WeibullG { beta, baseline } = family {
                if *beta < 2.0 {
                    return Err(s.error(format!("shape beta = {beta} < 2")));
                }
                let x_max = instance_grid(s, instance)?.x_max();
                let gammas = chain.iter().flat_map(|m| m.row(1).to_vec());
                screen_odds_derivatives(baseline, gammas, x_max).map_err(|m| s.error(m))?;
            }
            Ok(())
        }
        Instance::Vectors { x, y, .. } => {
            if !majorize_check(x, y, MajorizationKind::WeakSuper)? {
                return Err(s.error("weak supermajorization violated by the generated pair"));
            }
            Ok(())
        }
    }
}

/// `w' >= 0`, `w'' >= 0` and `w''' >= 0` on `(0, gamma · x_max]` for every
/// scale `gamma`.
fn screen_odds_derivatives(
    baseline: &Baseline,
    gammas: impl Iterator<Item = f64>,
    x_max: f64,
) -> std::result::Result<(), String> {
    if baseline.is_exponential() {
        // w = e^t - 1: all derivatives equal e^t > 0
        return Ok(());
    }
    let odds = baseline.odds();
    for gamma in gammas {
        for k in 1..=ODDS_SCREEN_POINTS {
            let t = gamma * x_max * k as f64 / ODDS_SCREEN_POINTS as f64;
            for (name, v) in [
                ("w'", odds.dw(t)),
                ("w''", odds.d2w(t)),
                ("w'''", odds.d3w(t)),
            ] {
                if v < 0.0 {
                    return Err(format!("{name}({t}) = {v} < 0"));
                }
            }
        }
    }
    Ok(())
}

fn instance_grid(s: &TheoremScenario, instance: &Instance) -> Result<Grid> {
    let x_max = match s.x_max {
        Some(x) => x,
        None => {
            let systems: Vec<SystemSpec> = match instance {
                Instance::Chain { family, .. } => instance
                    .chain_matrices()?
                    .iter()
                    .map(|m| chain_system(family, m))
                    .collect::<Result<_>>()?,
                Instance::Vectors { .. } => {
                    let (x, y) = instance.systems()?;
                    vec![x, y]
                }
            };
            systems.iter().map(|sys| sys.x_max()).fold(0.0, f64::max)
        }
    };
    Grid::new(x_max, s.grid_count, s.policy)
}

/// Certify one instance against the scenario's claim.
pub fn evaluate_instance(s: &TheoremScenario, instance: &Instance) -> Result<InstanceOutcome> {
    let grid = instance_grid(s, instance)?;
    let tol = s.tolerance;
    let mut failed = Vec::new();
    let mut worst = f64::INFINITY;
    let mut record =
        |label: String, v: OrderVerdict, failed: &mut Vec<(String, Option<OrderVerdict>)>| {
            worst = worst.min(v.margin);
            if !v.holds {
                failed.push((label, Some(v)));
            }
        };

    let (x_sys, y_sys) = instance.systems()?;
    let curve = match instance {
        Instance::Chain { family, .. } => {
            // Y = B is hr-smaller; each further transform moves up in hr.
            let chain = instance.chain_matrices()?;
            let systems = chain
                .iter()
                .map(|m| chain_system(family, m))
                .collect::<Result<Vec<_>>>()?;
            if systems.len() > 2 {
                for (k, pair) in systems.windows(2).enumerate() {
                    let v = certify(Order::Hr, &pair[0], &pair[1], &grid, tol);
                    record(format!("hr step {k}->{}", k + 1), v, &mut failed);
                }
            }
            let curve = order_curve(Order::Hr, &y_sys, &x_sys, &grid);
            record(
                "hr".into(),
                verdict_from_curve(&curve, &grid, tol),
                &mut failed,
            );
            record(
                "st".into(),
                certify(Order::St, &y_sys, &x_sys, &grid, tol),
                &mut failed,
            );
            curve
        }
        Instance::Vectors { family, x, y } => {
            let order = s.id.claim().order;
            let curve = order_curve(order, &x_sys, &y_sys, &grid);
            if let VectorFamily::GompertzMakehamLambda { alpha, beta } = family {
                if let Err(msg) = sum_invariance(x, *alpha, *beta, &grid, s.seed) {
                    failed.push((format!("sum invariance: {msg}"), None));
                }
                // the sf depends on the total only; equal totals give no strict order
                if exact_sum(x) > exact_sum(y) {
                    record(
                        order.to_string(),
                        verdict_from_curve(&curve, &grid, tol),
                        &mut failed,
                    );
                }
            } else {
                record(
                    order.to_string(),
                    verdict_from_curve(&curve, &grid, tol),
                    &mut failed,
                );
            }
            curve
        }
    };
    Ok(InstanceOutcome {
        passed: failed.is_empty(),
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
        failed_checks: failed,
        curve,
    })
}

/// Round to the dyadic quantum so transfers between entries are exact.
fn quantize(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| ((x / DYADIC_QUANTUM).round() * DYADIC_QUANTUM).max(DYADIC_QUANTUM))
        .collect()
}

/// Redistribute `lambdas` without changing the exact total: a dyadic
/// transfer between two entries followed by a shuffle.
pub fn sum_preserving_redistribution<R: Rng + ?Sized>(lambdas: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out = quantize(lambdas);
    if out.len() >= 2 {
        let mut idx: Vec<usize> = (0..out.len()).collect();
        idx.partial_shuffle(rng, 2);
        let (i, j) = (idx[0], idx[1]);
        // largest power of two not exceeding half of the donor entry
        let mut delta = 2f64.powi((out[i] / 2.0).log2().floor() as i32);
        delta = delta.max(DYADIC_QUANTUM);
        if delta < out[i] {
            out[i] -= delta;
            out[j] += delta;
        }
    }
    out.shuffle(rng);
    out
}

fn sum_invariance(
    lambdas: &[f64],
    alpha: f64,
    beta: f64,
    grid: &Grid,
    seed: u64,
) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1a4b_da00_0000);
    let base = quantize(lambdas);
    let moved = sum_preserving_redistribution(&base, &mut rng);
    if exact_sum(&base) != exact_sum(&moved) {
        return Err("redistribution changed the total".into());
    }
    for &x in grid.points() {
        let a = lambda_aggregate_sf(&base, alpha, beta, x);
        let b = lambda_aggregate_sf(&moved, alpha, beta, x);
        if (a - b).abs() > SUM_INVARIANCE_REL * a.abs() {
            return Err(format!("sf differs at x={x}: {a} vs {b}"));
        }
    }
    Ok(())
}
