//! Batch experiment harness: build a table, corrupt it across seeded
//! trials, recover every entry, and emit a JSON or CSV report.
//!
//! Per-trial seeds derive from the master seed and the trial index, so
//! reports are independent of thread scheduling. All report fields except
//! the wall-time `ms` column are byte-identical across reruns of the same
//! config.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::noise::{build_table, corrupt, CorruptionStrategy, NoiseModel};
use crate::problems::{make_problem, Params};
use crate::ratio::Ratio64;
use crate::recover::{recover_all, recovery_threshold, RecoveryConfig};
use crate::rng::derive_seed;
use crate::aggregate::ProblemSpec;
use crate::{Error, Result};

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Everything one experiment run depends on.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub problem: String,
    pub params: Params,
    pub delta: Ratio64,
    pub epsilon: Ratio64,
    pub sample_size_override: Option<u64>,
    pub trials: u32,
    pub master_seed: u64,
    pub model: NoiseModel,
    pub strategy: CorruptionStrategy,
    pub parallelism: usize,
    pub report_path: Option<String>,
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::BadParams("trials must be at least 1".into()));
        }
        // The recovery guarantee needs delta < 1/2.
        if self.delta.cmp_fraction(1, 2) != std::cmp::Ordering::Less {
            return Err(Error::BadDelta(self.delta.to_string()));
        }
        Ok(())
    }

    /// Builds the problem, separating the optional `clause` bitmask
    /// parameter into the clause table.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let mut params = self.params.clone();
        let clause_table = params.remove("clause").map(|mask| {
            let sigma = params.get("sigma").copied().unwrap_or(2) as u32;
            let k = params.get("k").copied().unwrap_or(1) as u32;
            let len = (sigma as u64).pow(k) as usize;
            (0..len).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>()
        });
        make_problem(&self.problem, &params, clause_table)
    }
}

/// One trial's counters.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub corrupted: u64,
    pub total: u64,
    pub symmetric: u64,
    pub query_branch: u64,
    pub correct: u64,
    pub majority_undefined: u64,
    pub queries: u64,
    pub ms: u64,
}

/// Aggregate statistics over all trials.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub instance_success_rate: f64,
    pub trial_all_correct_rate: f64,
    /// Union bound `N * exp(-(1/2 - delta)^2 * s / 8)` recomputed for the
    /// sample size actually used. Not clamped: values above 1 flag that the
    /// asymptotic bound says nothing at this scale.
    pub theoretical_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

/// Runs the full pipeline: build the table once, then per trial corrupt
/// with the derived seed, sweep-recover, and compare against the pristine
/// table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let problem = config.problem_spec()?;
    let table = Arc::new(build_table(problem.as_ref(), config.parallelism)?);
    let mut recovery = RecoveryConfig::new(config.epsilon)?;
    if let Some(s) = config.sample_size_override {
        recovery = recovery.with_override(s);
    }
    let sample_size = recovery_threshold(problem.as_ref(), &recovery);

    let mut trials = Vec::with_capacity(config.trials as usize);
    let mut total_correct = 0u64;
    let mut total_instances = 0u64;
    let mut perfect_trials = 0u64;
    for t in 0..config.trials {
        let seed = derive_seed(config.master_seed, t as u64);
        let (corrupted, mask) = corrupt(
            table.clone(),
            config.delta,
            seed,
            config.model,
            config.strategy,
        )?;
        let started = Instant::now();
        let sweep = recover_all(
            problem.as_ref(),
            &corrupted,
            &recovery,
            config.parallelism,
        )?;
        let ms = started.elapsed().as_millis() as u64;
        total_correct += sweep.correct;
        total_instances += sweep.total;
        if sweep.correct == sweep.total {
            perfect_trials += 1;
        }
        trials.push(TrialRecord {
            seed,
            corrupted: mask.count(),
            total: sweep.total,
            symmetric: sweep.symmetric,
            query_branch: sweep.query_branch,
            correct: sweep.correct,
            majority_undefined: sweep.majority_undefined,
            queries: sweep.queries,
            ms,
        });
    }

    let epsilon_effective = 0.5 - config.delta.as_f64();
    let per_set_failure =
        (-(epsilon_effective * epsilon_effective) * sample_size as f64 / 8.0).exp();
    let aggregate = Aggregate {
        instance_success_rate: total_correct as f64 / total_instances as f64,
        trial_all_correct_rate: perfect_trials as f64 / config.trials as f64,
        theoretical_bound: table.entry_count() as f64 * per_set_failure,
    };
    Ok(ExperimentReport {
        config: config.clone(),
        trials,
        aggregate,
    })
}

/// Renders the report; rendering the same report twice is byte-identical.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Format(format!("json: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut out = String::from(
                "seed,corrupted,total,symmetric,query_branch,correct,majority_undefined,queries,ms\n",
            );
            for t in &report.trials {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    t.seed,
                    t.corrupted,
                    t.total,
                    t.symmetric,
                    t.query_branch,
                    t.correct,
                    t.majority_undefined,
                    t.queries,
                    t.ms
                ));
            }
            Ok(out)
        }
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render_report(report, format)?)?;
    Ok(())
}

/// Parses a `key = value` config file with `#` comments; returns
/// `(key, value, line_number)` triples in file order.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            });
        };
        out.push((key.trim().to_string(), value.trim().to_string(), line));
    }
    Ok(out)
}

/// Accumulates config-file entries and flag overrides into an
/// [`ExperimentConfig`], rejecting unknown keys with their source line.
#[derive(Debug, Default)]
pub struct ConfigBuilder {
    entries: BTreeMap<String, (String, usize)>,
}

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "n",
    "k",
    "d",
    "sigma",
    "clause",
    "delta",
    "epsilon",
    "sample_size",
    "trials",
    "seed",
    "model",
    "strategy",
    "parallelism",
    "report",
    "format",
];

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// `line` 0 marks command-line flags in error messages.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        self.entries
            .insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    pub fn load_file(&mut self, text: &str) -> Result<()> {
        for (key, value, line) in parse_config_file(text)? {
            self.set(&key, &value, line)?;
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&(String, usize)> {
        self.entries.get(key)
    }

    fn parse_with<T, F: FnOnce(&str) -> Option<T>>(
        &self,
        key: &str,
        parse: F,
    ) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((value, line)) => parse(value).map(Some).ok_or_else(|| Error::Config {
                line: *line,
                msg: format!("bad value `{value}` for `{key}`"),
            }),
        }
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let (problem, _) = self
            .get("problem")
            .cloned()
            .ok_or_else(|| Error::Config {
                line: 0,
                msg: "missing `problem`".into(),
            })?;
        let mut params = Params::new();
        for key in ["n", "k", "d", "sigma", "clause"] {
            if let Some(v) = self.parse_with(key, |s| s.parse::<i64>().ok())? {
                params.insert(key.to_string(), v);
            }
        }
        let delta = self
            .parse_with("delta", |s| s.parse::<Ratio64>().ok())?
            .unwrap_or(Ratio64::zero());
        let epsilon = self
            .parse_with("epsilon", |s| s.parse::<Ratio64>().ok())?
            .unwrap_or(Ratio64::new(1, 4).expect("constant"));
        let sample_size_override = self.parse_with("sample_size", |s| s.parse::<u64>().ok())?;
        let trials = self
            .parse_with("trials", |s| s.parse::<u32>().ok())?
            .unwrap_or(1);
        let master_seed = self
            .parse_with("seed", |s| s.parse::<u64>().ok())?
            .unwrap_or(0);
        let model = self
            .parse_with("model", |s| match s {
                "exact" => Some(NoiseModel::ExactFraction),
                "bernoulli" => Some(NoiseModel::IidBernoulli),
                _ => None,
            })?
            .unwrap_or(NoiseModel::ExactFraction);
        let strategy = self
            .parse_with("strategy", |s| {
                if s == "flip" {
                    Some(CorruptionStrategy::FlipBoolean)
                } else if s == "wrong" {
                    Some(CorruptionStrategy::ReplaceUniformWrong)
                } else {
                    s.strip_prefix("constant:")
                        .and_then(|v| v.parse::<u64>().ok())
                        .map(CorruptionStrategy::Constant)
                }
            })?
            .unwrap_or(CorruptionStrategy::FlipBoolean);
        let parallelism = self
            .parse_with("parallelism", |s| s.parse::<usize>().ok())?
            .unwrap_or(0);
        let report_path = self.get("report").map(|(v, _)| v.clone());
        let format = self
            .parse_with("format", |s| match s {
                "json" => Some(ReportFormat::Json),
                "csv" => Some(ReportFormat::Csv),
                _ => None,
            })?
            .unwrap_or(ReportFormat::Json);

        let config = ExperimentConfig {
            problem,
            params,
            delta,
            epsilon,
            sample_size_override,
            trials,
            master_seed,
            model,
            strategy,
            parallelism,
            report_path,
            format,
        };
        config.validate()?;
        Ok(config)
    }
}
