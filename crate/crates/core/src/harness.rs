// Copyright 2026 The libound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Config-driven sweeps that measure query costs and check them against the
//! closed-form bounds.
//!
//! Trial `t` of every configuration draws its keys with seed `base_seed + t`
//! and its queries with seed `base_seed + t + 1_000_000`, so key and query
//! streams never share a seed for fewer than a million trials.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::approx::{optimal_piecewise_dp, ModelClass};
use crate::bounds::{log_bound_constants, BoundReport, BoundRow, BoundSpec};
use crate::distributions::{draw_iid, sample_iid, CdfModel, MeasureSpec};
use crate::empirical::KeySample;
use crate::error::{Error, Result};
use crate::index::{FitKind, LearnedIndex, Strategy};

pub const QUERY_SEED_OFFSET: u64 = 1_000_000;
pub const SCHEMA: &str = "schema=1";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dist: CdfModel,
    pub mu: MeasureSpec,
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub model_class: ModelClass,
    pub fit: FitKind,
    pub strategy: Strategy,
    pub trials: usize,
    pub queries_per_trial: usize,
    pub base_seed: u64,
    pub grid: usize,
    pub output_path: PathBuf,
    /// Replaces the computed approximation error. For sanity inversions only.
    pub r_override: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dist: CdfModel::uniform(0.0, 1.0).expect("unit interval"),
            mu: MeasureSpec::Matched,
            n_list: vec![100_000],
            k_list: vec![16],
            model_class: ModelClass::P0,
            fit: FitKind::Opt,
            strategy: Strategy::Linear,
            trials: 20,
            queries_per_trial: 2000,
            base_seed: 1,
            grid: 1000,
            output_path: PathBuf::from("results.csv"),
            r_override: None,
        }
    }
}

fn parse_list(value: &str) -> Result<Vec<usize>> {
    value.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("`{t}`: {e}")))).collect()
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| Error::Parse(format!("{key} = `{value}`: {e}")))
}

impl ExperimentConfig {
    /// Reads `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dist" => self.dist = value.parse()?,
            "mu" => self.mu = value.parse()?,
            "n_list" => self.n_list = parse_list(value)?,
            "k_list" => self.k_list = parse_list(value)?,
            "model_class" => self.model_class = value.parse()?,
            "fit" => self.fit = value.parse()?,
            "strategy" => self.strategy = value.parse()?,
            "trials" => self.trials = parse_num(key, value)?,
            "queries_per_trial" => self.queries_per_trial = parse_num(key, value)?,
            "base_seed" => self.base_seed = parse_num(key, value)?,
            "grid" => self.grid = parse_num(key, value)?,
            "output_path" => self.output_path = PathBuf::from(value),
            "r_override" => self.r_override = Some(parse_num(key, value)?),
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.queries_per_trial == 0 {
            return Err(Error::Domain("trials and queries_per_trial must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.k_list.is_empty() {
            return Err(Error::Domain("n_list and k_list must not be empty".into()));
        }
        if self.n_list.contains(&0) || self.k_list.contains(&0) {
            return Err(Error::Domain("n and K must be at least 1".into()));
        }
        if let Some(r) = self.r_override {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Domain(format!("r_override must lie in [0, 1], got {r}")));
            }
        }
        Ok(())
    }

    /// The summary file written next to the trial records.
    pub fn summary_path(&self) -> PathBuf {
        self.output_path.with_file_name("summary.csv")
    }

    /// Rows whose hypotheses this configuration satisfies.
    pub fn applicable_rows(&self) -> Vec<BoundRow> {
        let matched = self.mu.is_matched();
        BoundRow::ALL
            .into_iter()
            .filter(|r| r.strategy() == self.strategy)
            .filter(|r| matched || !r.needs_matched_measure())
            .filter(|r| *r != BoundRow::E1 || (self.model_class == ModelClass::P0 && self.density_bounds().is_some()))
            .collect()
    }

    /// Common bounds on the data and query densities, when both are positive
    /// and finite.
    fn density_bounds(&self) -> Option<crate::DensityBounds> {
        let data = self.dist.density_bounds();
        let query = self.mu.resolve(&self.dist).ok()?.density_bounds();
        let both = data.union(query);
        both.is_nondegenerate().then_some(both)
    }
}

/// Costs of one trial, averaged or maximised over its queries.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub trial: usize,
    pub seed: u64,
    pub mean_eps: f64,
    pub max_eps: f64,
    pub mean_search_steps: f64,
    pub max_search_steps: u32,
    pub mean_routing_steps: f64,
}

/// Sums in a fixed pairwise order, independent of thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Aggregate search-step statistics of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    /// Mean over every trial and query.
    pub type_a: f64,
    /// Maximum over trials of the per-trial mean.
    pub type_b: f64,
    /// Maximum over every trial and query.
    pub type_c: f64,
    /// `0.5 · sqrt(var(trial means) / trials)`.
    pub mean_slack: f64,
}

impl Aggregates {
    fn of(trials: &[TrialStats]) -> Self {
        let means: Vec<f64> = trials.iter().map(|t| t.mean_search_steps).collect();
        let type_a = mean(&means);
        let type_b = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let type_c = trials.iter().map(|t| t.max_search_steps as f64).fold(f64::NEG_INFINITY, f64::max);
        let t = means.len() as f64;
        let var = if means.len() > 1 {
            let sq: Vec<f64> = means.iter().map(|m| (m - type_a) * (m - type_a)).collect();
            pairwise_sum(&sq) / (t - 1.0)
        } else {
            0.0
        };
        Self { type_a, type_b, type_c, mean_slack: 0.5 * (var / t).sqrt() }
    }

    fn for_row(&self, row: BoundRow) -> f64 {
        match row.statistic() {
            crate::Statistic::GrandMean => self.type_a,
            crate::Statistic::MaxTrialMean => self.type_b,
            crate::Statistic::GlobalMax => self.type_c,
        }
    }

    fn slack_for(&self, row: BoundRow) -> f64 {
        if row.is_logarithmic() {
            1.0
        } else {
            self.mean_slack
        }
    }
}

/// Where the approximation error used by the bounds came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RSource {
    ClosedForm,
    DpOracle,
    Override,
}

impl fmt::Display for RSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RSource::ClosedForm => "closed",
            RSource::DpOracle => "dp",
            RSource::Override => "override",
        })
    }
}

/// Results of one `(n, K)` point of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigOutcome {
    pub n: usize,
    pub k: usize,
    pub r_used: f64,
    pub r_source: RSource,
    pub trials: Vec<TrialStats>,
    pub aggregates: Option<Aggregates>,
    pub reports: Vec<BoundReport>,
    /// Set when a module error aborted this configuration.
    pub error: Option<String>,
}

impl ConfigOutcome {
    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.reports.iter().all(|r| r.satisfied)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub outcomes: Vec<ConfigOutcome>,
}

impl ExperimentOutput {
    /// True iff every configuration ran and every non-vacuous bound held.
    pub fn success(&self) -> bool {
        self.outcomes.iter().all(ConfigOutcome::succeeded)
    }
}

/// Classic binary search over the whole array: at most `ceil(log2(n + 1))`
/// comparisons, at least one.
pub fn baseline_binary_search(sample: &KeySample, q: f64) -> (usize, u32) {
    let keys = sample.keys();
    let (mut lo, mut hi, mut steps) = (0, keys.len(), 0);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        steps += 1;
        if keys[mid - 1] <= q {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    (lo, steps.max(1))
}

fn approximation_error(cfg: &ExperimentConfig, k: usize) -> Result<(f64, RSource)> {
    if let Some(r) = cfg.r_override {
        return Ok((r, RSource::Override));
    }
    match cfg.fit {
        FitKind::Opt => Ok((1.0 / (4.0 * k as f64), RSource::ClosedForm)),
        _ => {
            let fit = optimal_piecewise_dp(&cfg.dist, k, cfg.model_class, &cfg.mu, cfg.grid)?;
            Ok((fit.error, RSource::DpOracle))
        }
    }
}

fn run_trial(cfg: &ExperimentConfig, n: usize, k: usize, trial: usize) -> Result<TrialStats> {
    let seed = cfg.base_seed.wrapping_add(trial as u64);
    let sample = sample_iid(&cfg.dist, n, seed)?;
    let fit = cfg.fit.with(cfg.grid, cfg.mu.clone());
    let index = LearnedIndex::build(sample, k, cfg.model_class, cfg.strategy, &fit)?;
    let measure = cfg.mu.resolve(&cfg.dist)?;
    let queries = draw_iid(&measure, cfg.queries_per_trial, seed.wrapping_add(QUERY_SEED_OFFSET));
    let mut eps = Vec::with_capacity(queries.len());
    let mut steps = Vec::with_capacity(queries.len());
    let mut routing = Vec::with_capacity(queries.len());
    let mut max_steps = 0;
    for &q in &queries {
        let cost = index.rank(q)?;
        let truth = index.sample().count_le(q);
        if cost.rank != truth {
            return Err(Error::Invariant(format!("rank of {q} is {truth}, search returned {}", cost.rank)));
        }
        eps.push(cost.epsilon);
        steps.push(cost.search_steps as f64);
        routing.push(cost.routing_steps as f64);
        max_steps = max_steps.max(cost.search_steps);
    }
    Ok(TrialStats {
        trial,
        seed,
        mean_eps: mean(&eps),
        max_eps: eps.iter().copied().fold(0.0, f64::max),
        mean_search_steps: mean(&steps),
        max_search_steps: max_steps,
        mean_routing_steps: mean(&routing),
    })
}

fn run_point(cfg: &ExperimentConfig, n: usize, k: usize) -> Result<ConfigOutcome> {
    let (r_used, r_source) = approximation_error(cfg, k)?;
    let trials = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, n, k, t)).collect::<Result<Vec<_>>>()?;
    let aggregates = Aggregates::of(&trials);
    let mut reports = Vec::new();
    for row in cfg.applicable_rows() {
        let mut spec = BoundSpec::new(row, n, k, r_used)?;
        if row == BoundRow::E1 {
            if let Some(d) = cfg.density_bounds() {
                spec = spec.with_density(d)?;
            }
        }
        reports.push(BoundReport::evaluate(spec, aggregates.for_row(row), aggregates.slack_for(row))?);
    }
    Ok(ConfigOutcome { n, k, r_used, r_source, trials, aggregates: Some(aggregates), reports, error: None })
}

/// Runs every `(n, K)` point. A failing point is recorded and the sweep goes on.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut outcomes = Vec::new();
    for &n in &cfg.n_list {
        for &k in &cfg.k_list {
            outcomes.push(run_point(cfg, n, k).unwrap_or_else(|e| ConfigOutcome {
                n,
                k,
                r_used: f64::NAN,
                r_source: RSource::ClosedForm,
                trials: Vec::new(),
                aggregates: None,
                reports: Vec::new(),
                error: Some(e.to_string()),
            }));
        }
    }
    Ok(ExperimentOutput { config: cfg.clone(), outcomes })
}

/// Runs the sweep and writes both CSV files.
pub fn verify_bounds(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let out = run_experiment(cfg)?;
    write_outputs(&out)?;
    Ok(out)
}

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub const TRIAL_COLUMNS: [&str; 16] = [
    "trial",
    "seed",
    "n",
    "k",
    "class",
    "fit",
    "strategy",
    "mean_eps",
    "max_eps",
    "mean_search_steps",
    "max_search_steps",
    "mean_routing_steps",
    "r_used",
    "bound_row",
    "bound_value",
    "satisfied",
];

pub const SUMMARY_COLUMNS: [&str; 20] = [
    "dist",
    "mu",
    "n",
    "k",
    "class",
    "fit",
    "strategy",
    "r_used",
    "r_source",
    "bound_row",
    "statistic",
    "bound_value",
    "measured",
    "slack",
    "satisfied",
    "vacuous",
    "type_a",
    "type_b",
    "type_c",
    "status",
];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Invariant(format!("csv: {other:?}")),
    }
}

/// One record per trial and applicable row. `satisfied` compares the trial's
/// own statistic with the bound; the configuration verdict is in the summary.
pub fn write_trial_records<W: std::io::Write>(out: &ExperimentOutput, sink: W) -> Result<()> {
    let cfg = &out.config;
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(sink);
    w.write_record([SCHEMA]).map_err(csv_err)?;
    w.write_record(TRIAL_COLUMNS).map_err(csv_err)?;
    for o in &out.outcomes {
        for t in &o.trials {
            let rows: Vec<Option<&BoundReport>> =
                if o.reports.is_empty() { vec![None] } else { o.reports.iter().map(Some).collect() };
            for rep in rows {
                let (row, value, ok) = match rep {
                    Some(r) => {
                        let stat = match r.spec.row.statistic() {
                            crate::Statistic::GlobalMax => t.max_search_steps as f64,
                            _ => t.mean_search_steps,
                        };
                        let ok = r.vacuous || stat >= r.bound_value - r.slack;
                        (r.spec.row.to_string(), fmt_f64(r.bound_value), ok.to_string())
                    }
                    None => ("none".to_string(), String::new(), String::new()),
                };
                w.write_record([
                    t.trial.to_string(),
                    t.seed.to_string(),
                    o.n.to_string(),
                    o.k.to_string(),
                    cfg.model_class.to_string(),
                    cfg.fit.to_string(),
                    cfg.strategy.to_string(),
                    fmt_f64(t.mean_eps),
                    fmt_f64(t.max_eps),
                    fmt_f64(t.mean_search_steps),
                    t.max_search_steps.to_string(),
                    fmt_f64(t.mean_routing_steps),
                    fmt_f64(o.r_used),
                    row,
                    value,
                    ok,
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per configuration and bound row; failed configurations get a
/// single row carrying the error.
pub fn write_summary<W: std::io::Write>(out: &ExperimentOutput, sink: W) -> Result<()> {
    let cfg = &out.config;
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(sink);
    w.write_record([SCHEMA]).map_err(csv_err)?;
    w.write_record(SUMMARY_COLUMNS).map_err(csv_err)?;
    for o in &out.outcomes {
        let head = [
            cfg.dist.to_string(),
            cfg.mu.to_string(),
            o.n.to_string(),
            o.k.to_string(),
            cfg.model_class.to_string(),
            cfg.fit.to_string(),
            cfg.strategy.to_string(),
            fmt_f64(o.r_used),
            o.r_source.to_string(),
        ];
        let agg = |f: fn(&Aggregates) -> f64| o.aggregates.as_ref().map(|a| fmt_f64(f(a))).unwrap_or_default();
        let tail = [agg(|a| a.type_a), agg(|a| a.type_b), agg(|a| a.type_c)];
        if let Some(e) = &o.error {
            let mut rec: Vec<String> = head.to_vec();
            rec.extend(std::iter::repeat_n(String::new(), 7));
            rec.extend(tail.iter().cloned());
            rec.push(format!("error: {e}"));
            w.write_record(&rec).map_err(csv_err)?;
            continue;
        }
        for r in &o.reports {
            let mut rec: Vec<String> = head.to_vec();
            rec.extend([
                r.spec.row.to_string(),
                r.statistic.to_string(),
                fmt_f64(r.bound_value),
                fmt_f64(r.measured),
                fmt_f64(r.slack),
                r.satisfied.to_string(),
                r.vacuous.to_string(),
            ]);
            rec.extend(tail.iter().cloned());
            rec.push("ok".into());
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the trial records to `output_path` and the summary beside it.
pub fn write_outputs(out: &ExperimentOutput) -> Result<()> {
    let path = &out.config.output_path;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_trial_records(out, std::fs::File::create(path)?)?;
    write_summary(out, std::fs::File::create(out.config.summary_path())?)
}

/// `C₂` for the configuration's density bounds, when the E1 row applies.
pub fn e1_offset(cfg: &ExperimentConfig) -> Option<f64> {
    let d = cfg.density_bounds()?;
    log_bound_constants(d.lower, d.upper).ok().map(|c| c.1)
}
