//! Monte Carlo harness, duality comparisons and convergence sweeps.
//!
//! Replicate `r` of a run with seed `seed` draws from stream
//! `stream_base + r`. Replicates run in parallel but are reduced in index
//! order, so every result is identical for any worker count.

pub mod oracle;
pub mod stats;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::{grow_binary, grow_caterpillar_pa, grow_caterpillar_uniform};
use crate::error::{invalid, Error, Result};
use crate::gini::{degree_gini, wealth_gini, GraphSample};
use crate::poisson::{grow_binary_poisson, grow_caterpillar_pa_poisson, grow_caterpillar_poisson, CaterpillarMode};
use crate::rng::RandomSource;
use crate::types::{BinaryModel, BinaryTreeState, DegreeMultiset, SpineState};
use crate::urn::predicted_limit;

use self::stats::{bootstrap_class_estimate, summarize, Summary};

/// Stream offset of the poissonized arm in a duality run.
pub const POISSON_ARM_STREAM: u64 = 1 << 32;

/// Largest poissonized time the front ends accept for classes whose size
/// grows like e^t.
pub const MAX_EXPONENTIAL_TIME: f64 = 12.0;

/// Stream of the bootstrap resampler, offset from the run's base stream.
pub const BOOTSTRAP_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TreeClass {
    Bst,
    Pyramid,
    CaterpillarUniform,
    CaterpillarPa,
}

impl TreeClass {
    pub const ALL: [TreeClass; 4] =
        [TreeClass::Bst, TreeClass::Pyramid, TreeClass::CaterpillarUniform, TreeClass::CaterpillarPa];

    pub fn id(self) -> &'static str {
        match self {
            TreeClass::Bst => "bst",
            TreeClass::Pyramid => "pyramid",
            TreeClass::CaterpillarUniform => "caterpillar-uniform",
            TreeClass::CaterpillarPa => "caterpillar-pa",
        }
    }

    pub fn binary_model(self) -> Option<BinaryModel> {
        match self {
            TreeClass::Bst => Some(BinaryModel::Bst),
            TreeClass::Pyramid => Some(BinaryModel::Pyramid),
            _ => None,
        }
    }

    pub fn is_caterpillar(self) -> bool {
        self.binary_model().is_none()
    }
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Discrete,
    Poisson,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Discrete => "discrete",
            Regime::Poisson => "poisson",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GiniVariant {
    /// Per-tree degree Gini, averaged over replicates.
    #[default]
    Topological,
    /// Class-relative index with plug-in class means.
    Class,
    /// Spine wealth inequality (caterpillars only).
    Wealth,
}

impl fmt::Display for GiniVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GiniVariant::Topological => "topological",
            GiniVariant::Class => "class",
            GiniVariant::Wealth => "wealth",
        })
    }
}

/// One tree class at one horizon: `n` steps (discrete) or time `t`
/// (poisson). `spine` is ignored by the binary classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub class: TreeClass,
    pub regime: Regime,
    pub param: f64,
    pub spine: u64,
}

impl Scenario {
    pub fn discrete(class: TreeClass, n: u64, spine: u64) -> Self {
        Self { class, regime: Regime::Discrete, param: n as f64, spine }
    }

    pub fn poisson(class: TreeClass, t: f64, spine: u64) -> Self {
        Self { class, regime: Regime::Poisson, param: t, spine }
    }

    pub fn validate(&self) -> Result<()> {
        match self.regime {
            Regime::Discrete => {
                let n = self.param;
                if !(n >= 0.0 && n.fract() == 0.0 && n <= u64::MAX as f64) {
                    return Err(invalid(format!("n must be a nonnegative integer, got {n}")));
                }
                if !self.class.is_caterpillar() && n < 1.0 {
                    return Err(invalid("tree order n must be at least 1"));
                }
            }
            Regime::Poisson => {
                let t = self.param;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(invalid(format!("time t must be finite and >= 0, got {t}")));
                }
            }
        }
        if self.class.is_caterpillar() && self.spine == 0 {
            return Err(invalid("spine length s must be at least 1"));
        }
        if self.class == TreeClass::CaterpillarPa && self.regime == Regime::Poisson && self.spine < 2 {
            return Err(invalid("poissonized preferential caterpillars need s >= 2"));
        }
        Ok(())
    }

    fn steps(&self) -> u64 {
        self.param as u64
    }
}

/// One grown tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrownTree {
    Binary { state: BinaryTreeState, event_count: Option<u64> },
    Caterpillar { state: SpineState, event_count: Option<u64> },
}

impl GrownTree {
    pub fn degrees(&self) -> DegreeMultiset {
        match self {
            GrownTree::Binary { state, .. } => state.degree_multiset(),
            GrownTree::Caterpillar { state, .. } => state.degree_multiset(),
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            GrownTree::Binary { state, .. } => state.size,
            GrownTree::Caterpillar { state, .. } => state.order(),
        }
    }

    pub fn event_count(&self) -> Option<u64> {
        match self {
            GrownTree::Binary { event_count, .. } | GrownTree::Caterpillar { event_count, .. } => {
                *event_count
            }
        }
    }

    pub fn spine(&self) -> Option<&SpineState> {
        match self {
            GrownTree::Caterpillar { state, .. } => Some(state),
            GrownTree::Binary { .. } => None,
        }
    }
}

/// Grows one tree of the scenario on `rng`.
pub fn grow(scenario: &Scenario, rng: &mut RandomSource) -> Result<GrownTree> {
    scenario.validate()?;
    let s = scenario.spine;
    Ok(match (scenario.class.binary_model(), scenario.regime) {
        (Some(model), Regime::Discrete) => {
            GrownTree::Binary { state: grow_binary(model, scenario.steps(), rng)?, event_count: None }
        }
        (Some(model), Regime::Poisson) => {
            let run = grow_binary_poisson(model, scenario.param, rng, false)?;
            GrownTree::Binary { state: run.state, event_count: Some(run.event_count) }
        }
        (None, Regime::Discrete) => {
            let state = match scenario.class {
                TreeClass::CaterpillarUniform => grow_caterpillar_uniform(s, scenario.steps(), rng)?,
                _ => grow_caterpillar_pa(s, scenario.steps(), rng)?,
            };
            GrownTree::Caterpillar { state, event_count: None }
        }
        (None, Regime::Poisson) => {
            let run = match scenario.class {
                TreeClass::CaterpillarUniform => {
                    grow_caterpillar_poisson(s, scenario.param, rng, CaterpillarMode::Direct, false)?
                }
                _ => grow_caterpillar_pa_poisson(s, scenario.param, rng, false)?,
            };
            GrownTree::Caterpillar { state: run.state, event_count: Some(run.event_count) }
        }
    })
}

/// Per-replicate quantities kept by the harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    pub sample: GraphSample,
    /// Per-tree index for the topological and wealth variants.
    pub value: Option<f64>,
}

fn measure(tree: &GrownTree, variant: GiniVariant) -> Result<Replicate> {
    let degrees = tree.degrees();
    let sample = GraphSample::from_degrees(&degrees);
    let value = match variant {
        GiniVariant::Topological => Some(degree_gini(&degrees)?),
        GiniVariant::Class => None,
        GiniVariant::Wealth => {
            let spine = tree.spine().ok_or_else(|| invalid("wealth Gini applies to caterpillars only"))?;
            Some(wealth_gini(spine.attachments(), spine.total())?)
        }
    };
    Ok(Replicate { sample, value })
}

/// Monte Carlo summary of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub class: TreeClass,
    pub regime: Regime,
    pub param: f64,
    pub spine: Option<u64>,
    pub variant: GiniVariant,
    pub reps: u64,
    pub mean: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub wall_ms: u64,
    pub mean_order: f64,
}

/// Worker-count control for the harness; `None` uses rayon's global pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Parallelism(pub Option<usize>);

impl Parallelism {
    fn run<T: Send>(self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.0 {
            None => Ok(job()),
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k.max(1))
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// Grows and measures replicates `0..reps` on streams
/// `stream_base + r`, returned in replicate order.
pub fn run_replicates(
    scenario: &Scenario,
    variant: GiniVariant,
    reps: u64,
    seed: u64,
    stream_base: u64,
    threads: Parallelism,
) -> Result<Vec<Replicate>> {
    scenario.validate()?;
    if reps == 0 {
        return Err(invalid("replicate count R must be at least 1"));
    }
    if variant == GiniVariant::Wealth && !scenario.class.is_caterpillar() {
        return Err(invalid("wealth Gini applies to caterpillars only"));
    }
    let outcomes: Vec<Result<Replicate>> = threads.run(|| {
        (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = RandomSource::new(seed, stream_base.wrapping_add(r));
                grow(scenario, &mut rng).and_then(|tree| measure(&tree, variant))
            })
            .collect()
    })?;
    outcomes
        .into_iter()
        .enumerate()
        .map(|(r, o)| o.map_err(|e| Error::Replicate { replicate: r as u64, source: Box::new(e) }))
        .collect()
}

/// Estimates the class mean of the chosen Gini variant from `reps`
/// independent replicates on streams `0..reps`.
pub fn run_monte_carlo(
    scenario: &Scenario,
    variant: GiniVariant,
    reps: u64,
    seed: u64,
    threads: Parallelism,
) -> Result<EstimateRecord> {
    run_monte_carlo_on(scenario, variant, reps, seed, 0, threads)
}

pub(crate) fn run_monte_carlo_on(
    scenario: &Scenario,
    variant: GiniVariant,
    reps: u64,
    seed: u64,
    stream_base: u64,
    threads: Parallelism,
) -> Result<EstimateRecord> {
    let started = Instant::now();
    let replicates = run_replicates(scenario, variant, reps, seed, stream_base, threads)?;
    let summary = summarize_replicates(&replicates, variant, seed, stream_base)?;
    let mean_order =
        summarize(&replicates.iter().map(|r| r.sample.order as f64).collect::<Vec<_>>()).mean;
    Ok(EstimateRecord {
        class: scenario.class,
        regime: scenario.regime,
        param: scenario.param,
        spine: scenario.class.is_caterpillar().then_some(scenario.spine),
        variant,
        reps,
        mean: summary.mean,
        se: summary.se,
        ci_lo: summary.ci_lo,
        ci_hi: summary.ci_hi,
        seed,
        wall_ms: started.elapsed().as_millis() as u64,
        mean_order,
    })
}

fn summarize_replicates(
    replicates: &[Replicate],
    variant: GiniVariant,
    seed: u64,
    stream_base: u64,
) -> Result<Summary> {
    match variant {
        GiniVariant::Class => {
            let samples: Vec<GraphSample> = replicates.iter().map(|r| r.sample).collect();
            let mut rng = RandomSource::new(seed, BOOTSTRAP_STREAM.wrapping_add(stream_base));
            bootstrap_class_estimate(&samples, &mut rng)
        }
        _ => {
            let values: Vec<f64> = replicates.iter().filter_map(|r| r.value).collect();
            Ok(summarize(&values))
        }
    }
}

/// Discrete horizon matched to poissonized time `t`.
///
/// Classes whose insertion positions grow with the tree use `n = e^t`. The
/// uniform caterpillar has `s` fixed positions, so `t` time units bring
/// `s t` attachments on average. The preferential caterpillar's total rate
/// is its total spine degree, which starts at `2s - 2` and grows by one per
/// attachment, giving `(2s - 2)(e^t - 1)` expected attachments.
pub fn mapped_steps(class: TreeClass, t: f64, spine: u64) -> u64 {
    let n = match class {
        TreeClass::Bst | TreeClass::Pyramid => t.exp(),
        TreeClass::CaterpillarUniform => spine as f64 * t,
        TreeClass::CaterpillarPa => (2.0 * spine as f64 - 2.0) * t.exp_m1(),
    };
    let n = n.round() as u64;
    if class.is_caterpillar() {
        n
    } else {
        n.max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub class: TreeClass,
    pub spine: Option<u64>,
    pub t: f64,
    pub mapped_n: u64,
    pub discrete: EstimateRecord,
    pub poisson: EstimateRecord,
    pub abs_diff: f64,
    pub pooled_se: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Runs the discrete class at `n = g(t)` and the poissonized class at `t`
/// on disjoint streams and compares the two estimates. Passes when the gap
/// is within `tolerance + 3 * pooled SE`.
#[allow(clippy::too_many_arguments)]
pub fn duality_experiment(
    class: TreeClass,
    spine: u64,
    t: f64,
    reps: u64,
    seed: u64,
    tolerance: f64,
    variant: GiniVariant,
    threads: Parallelism,
) -> Result<DualityReport> {
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(invalid(format!("tolerance must be finite and >= 0, got {tolerance}")));
    }
    let poisson_scenario = Scenario::poisson(class, t, spine);
    poisson_scenario.validate()?;
    let mapped_n = mapped_steps(class, t, spine);
    let discrete_scenario = Scenario::discrete(class, mapped_n, spine);
    let discrete = run_monte_carlo_on(&discrete_scenario, variant, reps, seed, 0, threads)?;
    let poisson = run_monte_carlo_on(&poisson_scenario, variant, reps, seed, POISSON_ARM_STREAM, threads)?;
    let abs_diff = (discrete.mean - poisson.mean).abs();
    let pooled_se = discrete.se.hypot(poisson.se);
    Ok(DualityReport {
        class,
        spine: class.is_caterpillar().then_some(spine),
        t,
        mapped_n,
        discrete,
        poisson,
        abs_diff,
        pooled_se,
        tolerance,
        pass: abs_diff <= tolerance + 3.0 * pooled_se,
    })
}

/// Analytical limit of the variant's class Gini.
pub fn analytical_limit(class: TreeClass, variant: GiniVariant) -> Result<f64> {
    match (class.binary_model(), variant) {
        (Some(_), GiniVariant::Wealth) => Err(invalid("wealth Gini applies to caterpillars only")),
        (Some(model), _) => predicted_limit(model),
        (None, GiniVariant::Wealth) => Ok(0.0),
        (None, _) => Ok(0.5),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub class: String,
    pub limit: f64,
    pub source: String,
}

/// Table of limiting indices. The binary rows are computed from the urn
/// eigen-structure.
pub fn analytical_limits() -> Result<Vec<LimitRow>> {
    let row = |class: &str, limit: f64, source: &str| LimitRow {
        class: class.to_string(),
        limit,
        source: source.to_string(),
    };
    Ok(vec![
        row("bst", predicted_limit(BinaryModel::Bst)?, "urn eigen-structure"),
        row("pyramid", predicted_limit(BinaryModel::Pyramid)?, "urn eigen-structure"),
        row("caterpillar-uniform", 0.5, "closed form"),
        row("caterpillar-pa", 0.5, "closed form"),
        row("caterpillar-wealth", 0.0, "closed form"),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub record: EstimateRecord,
    pub limit: f64,
}

/// One estimate per grid point (each on streams `0..reps`) alongside the
/// analytical limit.
#[allow(clippy::too_many_arguments)]
pub fn convergence_sweep(
    class: TreeClass,
    regime: Regime,
    grid: &[f64],
    spine: u64,
    variant: GiniVariant,
    reps: u64,
    seed: u64,
    threads: Parallelism,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(invalid("sweep grid is empty"));
    }
    let limit = analytical_limit(class, variant)?;
    grid.iter()
        .map(|&param| {
            let scenario = Scenario { class, regime, param, spine };
            let record = run_monte_carlo(&scenario, variant, reps, seed, threads)?;
            Ok(SweepRow { record, limit })
        })
        .collect()
}
