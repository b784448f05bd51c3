//! Serialized forms of experiment results.
//!
//! JSON carries full double precision. CSV rounds every real to nine
//! significant digits and prints it in plain decimal notation where the
//! shortest round-trip form allows.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{DualityReport, EstimateRecord, GrownTree, LimitRow, Regime, Scenario, SweepRow, TreeClass};
use crate::gini::{degree_gini, wealth_gini};

/// One grown tree as printed by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSummary {
    pub class: TreeClass,
    pub regime: Regime,
    pub param: f64,
    pub spine: Option<u64>,
    pub seed: u64,
    pub stream: u64,
    pub order: u64,
    pub event_count: Option<u64>,
    pub degrees: BTreeMap<u64, u64>,
    /// `None` when the index is undefined (a lone root).
    pub gini: Option<f64>,
    pub wealth_gini: Option<f64>,
    pub attachments: Option<Vec<u64>>,
}

impl TreeSummary {
    pub fn new(scenario: &Scenario, seed: u64, stream: u64, tree: &GrownTree) -> Result<Self> {
        let degrees = tree.degrees();
        let gini = match degree_gini(&degrees) {
            Ok(g) => Some(g),
            Err(Error::UndefinedIndex) => None,
            Err(e) => return Err(e),
        };
        let spine = tree.spine();
        let wealth = match spine {
            Some(sp) if sp.total() > 0 => Some(wealth_gini(sp.attachments(), sp.total())?),
            _ => None,
        };
        Ok(Self {
            class: scenario.class,
            regime: scenario.regime,
            param: scenario.param,
            spine: spine.map(|sp| sp.spine()),
            seed,
            stream,
            order: tree.order(),
            event_count: tree.event_count(),
            degrees: degrees.as_map().clone(),
            gini,
            wealth_gini: wealth,
            attachments: spine.map(|sp| sp.attachments().to_vec()),
        })
    }
}

/// Rounds to nine significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_real(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(out)
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub const ESTIMATE_HEADER: [&str; 10] =
    ["class", "regime", "param", "R", "mean", "se", "ci_lo", "ci_hi", "seed", "wall_ms"];

fn estimate_fields(r: &EstimateRecord) -> Vec<String> {
    vec![
        r.class.to_string(),
        r.regime.to_string(),
        sig9(r.param),
        r.reps.to_string(),
        sig9(r.mean),
        sig9(r.se),
        sig9(r.ci_lo),
        sig9(r.ci_hi),
        r.seed.to_string(),
        r.wall_ms.to_string(),
    ]
}

pub fn write_estimates_csv<W: Write>(out: W, records: &[EstimateRecord]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(ESTIMATE_HEADER).map_err(io)?;
    for r in records {
        w.write_record(estimate_fields(r)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(ESTIMATE_HEADER.iter().chain(&["limit"])).map_err(io)?;
    for row in rows {
        let mut fields = estimate_fields(&row.record);
        fields.push(sig9(row.limit));
        w.write_record(fields).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_limits_csv<W: Write>(out: W, rows: &[LimitRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["class", "limit", "source"]).map_err(io)?;
    for r in rows {
        w.write_record([r.class.clone(), sig9(r.limit), r.source.clone()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_duality_csv<W: Write>(out: W, report: &DualityReport) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "class", "spine", "t", "mapped_n", "R", "discrete_mean", "discrete_se", "poisson_mean",
        "poisson_se", "abs_diff", "pooled_se", "tolerance", "pass",
    ])
    .map_err(io)?;
    w.write_record([
        report.class.to_string(),
        opt(report.spine),
        sig9(report.t),
        report.mapped_n.to_string(),
        report.discrete.reps.to_string(),
        sig9(report.discrete.mean),
        sig9(report.discrete.se),
        sig9(report.poisson.mean),
        sig9(report.poisson.se),
        sig9(report.abs_diff),
        sig9(report.pooled_se),
        sig9(report.tolerance),
        report.pass.to_string(),
    ])
    .map_err(io)?;
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_tree_csv<W: Write>(out: W, s: &TreeSummary) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "class", "regime", "param", "spine", "seed", "stream", "order", "event_count", "degrees",
        "gini", "wealth_gini",
    ])
    .map_err(io)?;
    let degrees =
        s.degrees.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(";");
    w.write_record([
        s.class.to_string(),
        s.regime.to_string(),
        sig9(s.param),
        opt(s.spine),
        s.seed.to_string(),
        s.stream.to_string(),
        s.order.to_string(),
        opt(s.event_count),
        degrees,
        opt_real(s.gini),
        opt_real(s.wealth_gini),
    ])
    .map_err(io)?;
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Exact expectation printed by `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub class: TreeClass,
    pub n: u64,
    pub spine: Option<u64>,
    pub numer: i128,
    pub denom: i128,
    pub value: f64,
}

pub fn write_oracle_csv<W: Write>(out: W, r: &OracleRecord) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["class", "n", "spine", "numer", "denom", "value"]).map_err(io)?;
    w.write_record([
        r.class.to_string(),
        r.n.to_string(),
        opt(r.spine),
        r.numer.to_string(),
        r.denom.to_string(),
        sig9(r.value),
    ])
    .map_err(io)?;
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
