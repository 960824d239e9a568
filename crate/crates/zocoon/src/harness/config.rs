//! Experiment configuration: a flat `key = value` text format with `#`
//! comments and comma-separated lists. Every key has a CLI flag equivalent
//! in the `zocoon-bench` binary.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Solver selection for a benchmark run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Zocoon,
    Zoo2n,
    Gfm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Zocoon, Method::Zoo2n, Method::Gfm];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Zocoon => "zocoon",
            Method::Zoo2n => "zoo2n",
            Method::Gfm => "gfm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zocoon" => Ok(Method::Zocoon),
            "zoo2n" => Ok(Method::Zoo2n),
            "gfm" => Ok(Method::Gfm),
            other => Err(Error::parameter(
                "method",
                format!("unknown method `{other}` (expected zocoon, zoo2n, or gfm)"),
            )),
        }
    }
}

/// How solver parameters are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlannerMode {
    /// Step size and domain radius from the tuning grids.
    Manual,
    /// In-expectation schedule from `(delta, delta_bound, L, p)`.
    Theorem1,
    /// High-probability schedule; additionally needs `q`.
    Theorem2,
}

impl FromStr for PlannerMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "manual" => Ok(PlannerMode::Manual),
            "theorem1" => Ok(PlannerMode::Theorem1),
            "theorem2" => Ok(PlannerMode::Theorem2),
            other => Err(Error::parameter(
                "planner",
                format!("unknown planner mode `{other}`"),
            )),
        }
    }
}

/// Arguments consumed by the schedule planners.
#[derive(Clone, Copy, Debug)]
pub struct PlannerArgs {
    /// Target Goldstein radius.
    pub delta: f64,
    /// Upper bound on `f(x0) - f*`.
    pub delta_bound: f64,
    /// Lipschitz/moment constant `L` (0 = take it from the objective).
    pub lipschitz: f64,
    /// Moment order `p` (0 = take it from the objective).
    pub moment_order: f64,
    /// Failure probability `q` for the high-probability schedule.
    pub confidence: f64,
}

impl Default for PlannerArgs {
    fn default() -> Self {
        PlannerArgs {
            delta: 0.05,
            delta_bound: 1.0,
            lipschitz: 0.0,
            moment_order: 0.0,
            confidence: 0.1,
        }
    }
}

/// Full description of one benchmark invocation.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub dataset_path: PathBuf,
    /// Draw this many examples (without replacement) before running.
    pub subset_size: Option<usize>,
    /// Methods to compare; each gets its own grid sweep.
    pub methods: Vec<Method>,
    /// Total zeroth-order calls per run; two per iteration, so must be even.
    pub budget_oracle_calls: u64,
    pub seeds: Vec<u64>,
    pub stepsize_grid: Vec<f64>,
    pub d_grid: Vec<f64>,
    /// Clipping threshold for the clipped solver.
    pub tau: f64,
    pub delta_prime: f64,
    pub planner_mode: PlannerMode,
    pub planner: PlannerArgs,
    /// Checkpoint cadence in iterations; 0 = choose automatically
    /// (about 100 checkpoints per run).
    pub checkpoint_every: u64,
    pub output_dir: PathBuf,
}

/// `{1, 3} x 10^{-k}` for `k` in `lo..=hi`, descending. Values go through
/// decimal parsing so each is the shortest-representation double (its
/// display form is exactly `3e-2`, not `3.0000000000000004e-2`).
fn decade_grid(lo: i32, hi: i32) -> Vec<f64> {
    let mut grid = Vec::new();
    for k in lo..=hi {
        for coef in [3, 1] {
            grid.push(format!("{coef}e-{k}").parse::<f64>().expect("valid literal"));
        }
    }
    grid
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            dataset_path: PathBuf::new(),
            subset_size: None,
            methods: vec![Method::Zocoon],
            // Desk-scale default budget.
            budget_oracle_calls: 200_000,
            seeds: (0..10).collect(),
            stepsize_grid: decade_grid(1, 7),
            d_grid: decade_grid(2, 5),
            tau: 1e-2,
            delta_prime: 1e-3,
            planner_mode: PlannerMode::Manual,
            planner: PlannerArgs::default(),
            checkpoint_every: 0,
            output_dir: PathBuf::from("bench-out"),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dataset_path.as_os_str().is_empty() {
            return Err(Error::parameter("dataset", "no dataset path given"));
        }
        if self.methods.is_empty() {
            return Err(Error::parameter("method", "no methods selected"));
        }
        if self.budget_oracle_calls == 0 || !self.budget_oracle_calls.is_multiple_of(2) {
            return Err(Error::parameter(
                "budget",
                format!(
                    "budget must be a positive even number of oracle calls, got {}",
                    self.budget_oracle_calls
                ),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::parameter("seeds", "need at least one seed"));
        }
        match self.planner_mode {
            PlannerMode::Manual => {
                if self.stepsize_grid.is_empty() {
                    return Err(Error::parameter("stepsize_grid", "manual mode needs a stepsize grid"));
                }
                let needs_d = self
                    .methods
                    .iter()
                    .any(|m| matches!(m, Method::Zocoon | Method::Zoo2n));
                if needs_d && self.d_grid.is_empty() {
                    return Err(Error::parameter("d_grid", "manual mode needs a D grid"));
                }
            }
            PlannerMode::Theorem1 | PlannerMode::Theorem2 => {
                if self.methods.contains(&Method::Gfm) {
                    return Err(Error::parameter(
                        "planner",
                        "theorem schedules apply to zocoon/zoo2n only",
                    ));
                }
                if !(self.planner.delta > 0.0 && self.planner.delta < 1.0) {
                    return Err(Error::parameter("delta", "planner modes need delta in (0,1)"));
                }
                if self.planner_mode == PlannerMode::Theorem2
                    && !(self.planner.confidence > 0.0 && self.planner.confidence < 1.0)
                {
                    return Err(Error::parameter("confidence", "theorem2 needs q in (0,1)"));
                }
            }
        }
        if !(self.delta_prime > 0.0) {
            return Err(Error::parameter("delta_prime", "must be positive"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::parameter("tau", "must be positive"));
        }
        Ok(())
    }

    /// Iterations per run (two oracle calls each).
    pub fn iterations(&self) -> u64 {
        self.budget_oracle_calls / 2
    }

    /// Effective checkpoint cadence.
    pub fn checkpoint_cadence(&self) -> u64 {
        if self.checkpoint_every > 0 {
            self.checkpoint_every
        } else {
            (self.iterations() / 100).max(1)
        }
    }

    /// Apply one `key = value` assignment.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "dataset" => self.dataset_path = PathBuf::from(value),
            "subset_size" => {
                self.subset_size = if value.is_empty() || value == "none" {
                    None
                } else {
                    Some(parse_scalar(key, value)?)
                }
            }
            "method" => {
                self.methods = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(Method::from_str)
                    .collect::<Result<Vec<_>>>()?;
            }
            "budget" => self.budget_oracle_calls = parse_scalar(key, value)?,
            "seeds" => self.seeds = parse_list(key, value)?,
            "stepsize_grid" => self.stepsize_grid = parse_list(key, value)?,
            "d_grid" => self.d_grid = parse_list(key, value)?,
            "tau" => self.tau = parse_scalar(key, value)?,
            "delta_prime" => self.delta_prime = parse_scalar(key, value)?,
            "planner" => self.planner_mode = value.parse()?,
            "delta" => self.planner.delta = parse_scalar(key, value)?,
            "delta_bound" => self.planner.delta_bound = parse_scalar(key, value)?,
            "lipschitz" => self.planner.lipschitz = parse_scalar(key, value)?,
            "moment_order" => self.planner.moment_order = parse_scalar(key, value)?,
            "confidence" => self.planner.confidence = parse_scalar(key, value)?,
            "checkpoint_every" => self.checkpoint_every = parse_scalar(key, value)?,
            "out" => self.output_dir = PathBuf::from(value),
            other => {
                return Err(Error::parameter(
                    "config",
                    format!("unknown key `{other}`"),
                ))
            }
        }
        Ok(())
    }

    /// Apply a whole config file.
    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_config_str(text)? {
            self.apply(&key, &value)?;
        }
        Ok(())
    }
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::parameter("config", format!("cannot parse `{value}` for key `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| {
                Error::parameter("config", format!("cannot parse list item `{s}` for key `{key}`"))
            })
        })
        .collect()
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_str(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::parse(line_no + 1, format!("expected `key = value`, got `{line}`"))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids_follow_the_decade_pattern() {
        let spec = ExperimentSpec::default();
        assert_eq!(spec.stepsize_grid.len(), 14);
        assert_eq!(spec.d_grid.len(), 8);
        assert_eq!(spec.stepsize_grid[0], 0.3);
        assert_eq!(spec.stepsize_grid[1], 0.1);
        assert_eq!(*spec.stepsize_grid.last().unwrap(), 1e-7);
        assert_eq!(spec.d_grid[1], 1e-2);
        assert_eq!(*spec.d_grid.last().unwrap(), 1e-5);
        // descending
        assert!(spec.stepsize_grid.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn config_text_round_trip() {
        let text = "
            # comparison run
            dataset = data/a9a
            method = zocoon, gfm
            budget = 1000   # oracle calls
            seeds = 1,2,3
            stepsize_grid = 0.1, 0.01
            d_grid = 1e-2
            tau = 0.01
            delta_prime = 0.001
            out = /tmp/out
        ";
        let mut spec = ExperimentSpec::default();
        spec.apply_config_str(text).unwrap();
        assert_eq!(spec.methods, vec![Method::Zocoon, Method::Gfm]);
        assert_eq!(spec.budget_oracle_calls, 1000);
        assert_eq!(spec.seeds, vec![1, 2, 3]);
        assert_eq!(spec.stepsize_grid, vec![0.1, 0.01]);
        assert_eq!(spec.output_dir, PathBuf::from("/tmp/out"));
        spec.validate().unwrap();
    }

    #[test]
    fn validation_catches_odd_budget() {
        let spec = ExperimentSpec {
            dataset_path: PathBuf::from("x"),
            budget_oracle_calls: 11,
            ..ExperimentSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        let mut spec = ExperimentSpec::default();
        assert!(spec.apply("no_such_key", "1").is_err());
    }

    #[test]
    fn malformed_config_line_located() {
        let err = parse_config_str("a = 1\nnot an assignment\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
