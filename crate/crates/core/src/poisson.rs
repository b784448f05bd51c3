//! Poissonized growth in continuous time.
//!
//! Every insertion position carries an independent Exp(1) clock. With `k`
//! positions the next event comes after an Exponential(rate `k`) wait and
//! lands on a uniform position, and by memorylessness all other clocks
//! restart. So one aggregated clock per event suffices. An event whose
//! arrival time exceeds the horizon `t` is discarded.

use serde::{Deserialize, Serialize};

use crate::discrete::{pa_weights, step_binary, WeightTree};
use crate::error::{invalid, Result};
use crate::rng::RandomSource;
use crate::types::{BinaryModel, BinaryTreeState, SpineState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRunResult<S> {
    pub state: S,
    /// Always the requested horizon.
    pub elapsed: f64,
    pub event_count: u64,
    /// Arrival times, when recorded.
    pub event_times: Option<Vec<f64>>,
}

fn check_horizon(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("time t must be finite and >= 0, got {t}")))
    }
}

struct EventLog {
    count: u64,
    times: Option<Vec<f64>>,
}

impl EventLog {
    fn new(record: bool) -> Self {
        Self { count: 0, times: record.then(Vec::new) }
    }

    #[inline]
    fn push(&mut self, at: f64) {
        self.count += 1;
        if let Some(times) = &mut self.times {
            times.push(at);
        }
    }

    fn finish<S>(self, state: S, t: f64) -> PoissonRunResult<S> {
        PoissonRunResult { state, elapsed: t, event_count: self.count, event_times: self.times }
    }
}

/// Poissonized binary tree started from a lone root at time 0.
pub fn grow_binary_poisson(
    model: BinaryModel,
    t: f64,
    rng: &mut RandomSource,
    record_times: bool,
) -> Result<PoissonRunResult<BinaryTreeState>> {
    check_horizon(t)?;
    let mut state = BinaryTreeState::root(model);
    let mut log = EventLog::new(record_times);
    let mut clock = 0.0;
    loop {
        clock += rng.exponential(state.slot_count() as f64);
        if clock > t {
            break;
        }
        step_binary(model, &mut state, rng);
        log.push(clock);
    }
    Ok(log.finish(state, t))
}

pub fn grow_bst_poisson(t: f64, rng: &mut RandomSource) -> Result<PoissonRunResult<BinaryTreeState>> {
    grow_binary_poisson(BinaryModel::Bst, t, rng, false)
}

pub fn grow_pyramid_poisson(t: f64, rng: &mut RandomSource) -> Result<PoissonRunResult<BinaryTreeState>> {
    grow_binary_poisson(BinaryModel::Pyramid, t, rng, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaterpillarMode {
    /// Sample each spine node's Poisson(t) count directly.
    #[default]
    Direct,
    /// Run the superposed rate-`s` clock with uniform spine assignment.
    EventLoop,
}

/// Poissonized uniform caterpillar: each spine node receives attachments as
/// an independent rate-1 Poisson process.
pub fn grow_caterpillar_poisson(
    spine: u64,
    t: f64,
    rng: &mut RandomSource,
    mode: CaterpillarMode,
    record_times: bool,
) -> Result<PoissonRunResult<SpineState>> {
    check_horizon(t)?;
    let mut state = SpineState::new(spine)?;
    match mode {
        CaterpillarMode::Direct => {
            let counts: Vec<u64> = (0..spine).map(|_| rng.poisson(t)).collect();
            let total = counts.iter().sum();
            state = SpineState::from_attachments(counts)?;
            Ok(PoissonRunResult { state, elapsed: t, event_count: total, event_times: None })
        }
        CaterpillarMode::EventLoop => {
            let mut log = EventLog::new(record_times);
            let rate = spine as f64;
            let mut clock = 0.0;
            loop {
                clock += rng.exponential(rate);
                if clock > t {
                    break;
                }
                state.attach(rng.below(spine) as usize);
                log.push(clock);
            }
            Ok(log.finish(state, t))
        }
    }
}

/// Poissonized preferential-attachment caterpillar: spine node `i` runs a
/// clock at rate equal to its degree, so the total rate is
/// `sum X_i + 2s - 2` and grows with every attachment.
pub fn grow_caterpillar_pa_poisson(
    spine: u64,
    t: f64,
    rng: &mut RandomSource,
    record_times: bool,
) -> Result<PoissonRunResult<SpineState>> {
    check_horizon(t)?;
    if spine < 2 {
        return Err(invalid("poissonized preferential caterpillars need spine length >= 2"));
    }
    let mut state = SpineState::new(spine)?;
    let mut weights = WeightTree::new(&pa_weights(&state));
    let mut log = EventLog::new(record_times);
    let mut clock = 0.0;
    loop {
        clock += rng.exponential(weights.total() as f64);
        if clock > t {
            break;
        }
        let i = weights.sample(rng);
        state.attach(i);
        weights.increment(i);
        log.push(clock);
    }
    Ok(log.finish(state, t))
}
