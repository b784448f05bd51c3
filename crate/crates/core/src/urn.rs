//! Two-color Pólya urns and their spectral limit predictor.
//!
//! Colors are white (index 0) and blue (index 1). Row `i` of a
//! [`ReplacementMatrix`] lists the balls added, white then blue, when a ball
//! of color `i` is drawn.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gini::LimitProfile;
use crate::rng::RandomSource;
use crate::types::BinaryModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementMatrix(pub [[i64; 2]; 2]);

impl ReplacementMatrix {
    pub const BST: Self = Self([[0, 1], [2, -1]]);
    pub const PYRAMID: Self = Self([[0, 1], [1, -1]]);

    pub fn for_model(model: BinaryModel) -> Self {
        match model {
            BinaryModel::Bst => Self::BST,
            BinaryModel::Pyramid => Self::PYRAMID,
        }
    }

    pub fn transpose(&self) -> [[f64; 2]; 2] {
        let a = self.0;
        [[a[0][0] as f64, a[1][0] as f64], [a[0][1] as f64, a[1][1] as f64]]
    }
}

/// Principal eigenvalue of the transposed replacement matrix and its
/// eigenvector normalized to component sum 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPrediction {
    pub lambda1: f64,
    pub v1: [f64; 2],
    /// Set when the eigenvalue is repeated and `v1` is a tie-broken choice.
    pub degenerate: bool,
}

impl EigenPrediction {
    /// `max |A^T v1 - lambda1 v1|`.
    pub fn residual(&self, m: &ReplacementMatrix) -> f64 {
        let t = m.transpose();
        (0..2)
            .map(|i| (t[i][0] * self.v1[0] + t[i][1] * self.v1[1] - self.lambda1 * self.v1[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form eigen-solve of a 2x2 transpose.
pub fn principal_eigenpair(m: &ReplacementMatrix) -> Result<EigenPrediction> {
    let t = m.transpose();
    let half_trace = (t[0][0] + t[1][1]) / 2.0;
    let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
    let disc = half_trace * half_trace - det;
    if disc < 0.0 {
        return Err(Error::UnsupportedMatrix("complex eigenvalues".into()));
    }
    let root = disc.sqrt();
    let lambda1 = half_trace + root;
    let degenerate = disc == 0.0;

    let raw = if t[0][1] != 0.0 {
        [t[0][1], lambda1 - t[0][0]]
    } else if t[1][0] != 0.0 {
        [lambda1 - t[1][1], t[1][0]]
    } else if t[0][0] == lambda1 {
        // diagonal: first basis direction wins ties
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let sum = raw[0] + raw[1];
    if sum == 0.0 || raw[0] * raw[1] < 0.0 {
        return Err(Error::UnsupportedMatrix("principal eigenvector has mixed signs".into()));
    }
    let v1 = [raw[0] / sum, raw[1] / sum];
    Ok(EigenPrediction { lambda1, v1, degenerate })
}

/// Limiting degree proportions of a binary model from its urn's eigenpair.
///
/// Per tree node, white and blue balls tend to `lambda1 * v1`. A leaf holds
/// `whites_per_leaf` white balls and a one-child node one blue ball; the
/// saturated nodes take the remainder.
pub fn predict_proportions(model: BinaryModel, prediction: &EigenPrediction) -> Result<LimitProfile> {
    let white = prediction.lambda1 * prediction.v1[0];
    let blue = prediction.lambda1 * prediction.v1[1];
    let p1 = white / model.whites_per_leaf() as f64;
    let p2 = blue;
    let p3 = 1.0 - p1 - p2;
    if p3 < -1e-12 {
        return Err(Error::InconsistentMapping(format!("remainder {p3} is negative")));
    }
    LimitProfile::new(p1, p2, p3.max(0.0))
        .map_err(|e| Error::InconsistentMapping(e.to_string()))
}

/// Limiting degree Gini index of a binary model, derived from its urn.
pub fn predicted_limit(model: BinaryModel) -> Result<f64> {
    let prediction = principal_eigenpair(&ReplacementMatrix::for_model(model))?;
    let profile = predict_proportions(model, &prediction)?;
    Ok(crate::gini::limit_gini(&profile))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    White,
    Blue,
}

/// Draws a uniform ball. The tree growers make the identical draw, so an urn
/// and a tree on the same stream follow the same color sequence.
#[inline]
pub fn draw_ball(rng: &mut RandomSource, white: u64, blue: u64) -> (Color, u64) {
    let u = rng.below(white + blue);
    if u < white {
        (Color::White, u)
    } else {
        (Color::Blue, u - white)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrnState {
    pub white: u64,
    pub blue: u64,
}

impl UrnState {
    pub fn total(&self) -> u64 {
        self.white + self.blue
    }

    fn apply(&self, m: &ReplacementMatrix, color: Color) -> Result<Self> {
        let row = m.0[match color {
            Color::White => 0,
            Color::Blue => 1,
        }];
        let white = self.white as i64 + row[0];
        let blue = self.blue as i64 + row[1];
        if white < 0 || blue < 0 {
            return Err(Error::Tenability(format!(
                "({}, {}) + {:?} goes negative",
                self.white, self.blue, row
            )));
        }
        Ok(Self { white: white as u64, blue: blue as u64 })
    }
}

/// Runs `draws` discrete draws; the trajectory includes the initial state.
pub fn run_urn_discrete(
    m: &ReplacementMatrix,
    initial: UrnState,
    draws: u64,
    rng: &mut RandomSource,
) -> Result<Vec<UrnState>> {
    let mut trajectory = Vec::with_capacity(draws as usize + 1);
    let mut state = initial;
    trajectory.push(state);
    for _ in 0..draws {
        if state.total() == 0 {
            return Err(Error::Tenability("urn is empty".into()));
        }
        let (color, _) = draw_ball(rng, state.white, state.blue);
        state = state.apply(m, color)?;
        trajectory.push(state);
    }
    Ok(trajectory)
}

/// Continuous-time urn: every ball carries an Exp(1) clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrnPoissonRun {
    pub states: Vec<UrnState>,
    /// `event_times[k]` is when `states[k + 1]` was entered.
    pub event_times: Vec<f64>,
    pub elapsed: f64,
}

impl UrnPoissonRun {
    pub fn final_state(&self) -> UrnState {
        *self.states.last().expect("trajectory holds the initial state")
    }

    pub fn event_count(&self) -> u64 {
        self.event_times.len() as u64
    }

    /// `e^{-lambda1 t} (W(t), B(t))`.
    pub fn scaled_final(&self, lambda1: f64) -> [f64; 2] {
        let s = self.final_state();
        let f = (-lambda1 * self.elapsed).exp();
        [s.white as f64 * f, s.blue as f64 * f]
    }
}

/// Event loop with total rate equal to the ball count, stopped at time `t`.
pub fn run_urn_poisson(
    m: &ReplacementMatrix,
    initial: UrnState,
    t: f64,
    rng: &mut RandomSource,
) -> Result<UrnPoissonRun> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(crate::error::invalid(format!("time must be finite and >= 0, got {t}")));
    }
    let mut state = initial;
    let mut states = vec![state];
    let mut event_times = Vec::new();
    let mut clock = 0.0;
    loop {
        if state.total() == 0 {
            break;
        }
        clock += rng.exponential(state.total() as f64);
        if clock > t {
            break;
        }
        let (color, _) = draw_ball(rng, state.white, state.blue);
        state = state.apply(m, color)?;
        states.push(state);
        event_times.push(clock);
    }
    Ok(UrnPoissonRun { states, event_times, elapsed: t })
}
