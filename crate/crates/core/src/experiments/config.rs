//! Sweep configuration and its per-experiment parameter sets.
//!
//! Parameters arrive as a free key→value table so that configs stay
//! serializable as plain JSON; each experiment decodes the table into its own
//! parameter struct, rejecting unknown keys, and writes the fully resolved
//! struct back into the report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fredholm::GridParams;
use crate::par::Parallelism;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TailFit,
    TailBoundScan,
    DecorrelationSweep,
    CorrelationSweep,
    McVsFredholm,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::TailFit,
        ExperimentKind::TailBoundScan,
        ExperimentKind::DecorrelationSweep,
        ExperimentKind::CorrelationSweep,
        ExperimentKind::McVsFredholm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TailFit => "tail_fit",
            ExperimentKind::TailBoundScan => "tail_bound_scan",
            ExperimentKind::DecorrelationSweep => "decorrelation_sweep",
            ExperimentKind::CorrelationSweep => "correlation_sweep",
            ExperimentKind::McVsFredholm => "mc_vs_fredholm",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;
/// Coarse and fine Gauss–Legendre orders for sweeps.
pub const DEFAULT_ORDERS: [usize; 2] = [48, 96];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// `[order]` or `[order, fine_order]`; one entry skips refinement.
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_orders() -> Vec<usize> {
    DEFAULT_ORDERS.to_vec()
}

impl SweepConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            parameters: BTreeMap::new(),
            seed: DEFAULT_SEED,
            orders: default_orders(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Sets one parameter from any serializable value.
    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_owned(), v);
        self
    }

    /// Quadrature settings implied by `orders`.
    pub fn grid_params(&self, par: Parallelism) -> Result<GridParams> {
        let mut p = GridParams {
            parallelism: par,
            ..GridParams::default()
        };
        match self.orders.as_slice() {
            [m] => {
                p.order = *m;
                p.refine = false;
            }
            [m, f] if f > m => {
                p.order = *m;
                p.fine_order = Some(*f);
            }
            other => {
                return Err(Error::Config(format!(
                    "orders must be [order] or [order, larger fine order], got {other:?}"
                )))
            }
        }
        if p.order == 0 {
            return Err(Error::Config("order must be positive".into()));
        }
        Ok(p)
    }

    /// Decodes the parameter table, rejecting unknown keys.
    pub fn decode<P: DeserializeOwned>(&self) -> Result<P> {
        let map: serde_json::Map<String, Value> = self.parameters.clone().into_iter().collect();
        serde_json::from_value(Value::Object(map))
            .map_err(|e| Error::Config(format!("{} parameters: {e}", self.experiment)))
    }

    /// This config with its parameter table replaced by the resolved `params`.
    pub fn resolved<P: Serialize>(&self, params: &P) -> Self {
        let parameters = match serde_json::to_value(params) {
            Ok(Value::Object(m)) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Self {
            parameters,
            ..self.clone()
        }
    }
}

/// A real grid given either explicitly or as `start:stop:step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range(String),
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Range(s) => Ok(parse_range(s)?.points()),
        }
    }

    /// The points as positive integers.
    pub fn integers(&self) -> Result<Vec<u32>> {
        self.points()?
            .into_iter()
            .map(|x| {
                if x.fract() == 0.0 && (0.0..=f64::from(u32::MAX)).contains(&x) {
                    Ok(x as u32)
                } else {
                    Err(Error::Config(format!("expected a nonnegative integer, got {x}")))
                }
            })
            .collect()
    }
}

impl From<RangeSpec> for GridSpec {
    fn from(r: RangeSpec) -> Self {
        GridSpec::Range(r.to_string())
    }
}

/// `start:stop:step`, inclusive of `stop` when it lies on the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Most points a range may expand to.
pub const MAX_RANGE_POINTS: usize = 1_000_000;

impl RangeSpec {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

pub fn parse_range(s: &str) -> Result<RangeSpec> {
    let bad = || Error::Config(format!("range {s:?} is not start:stop:step"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(bad());
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let r = RangeSpec {
        start: num(a)?,
        stop: num(b)?,
        step: num(c)?,
    };
    if !(r.start.is_finite() && r.stop.is_finite() && r.step > 0.0 && r.stop >= r.start) {
        return Err(Error::Config(format!(
            "range {s:?} needs finite start <= stop and step > 0"
        )));
    }
    if (r.stop - r.start) / r.step >= MAX_RANGE_POINTS as f64 {
        return Err(Error::Config(format!("range {s:?} has too many points")));
    }
    Ok(r)
}

impl FromStr for RangeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_range(s)
    }
}
