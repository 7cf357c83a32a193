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

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use libound::approx::{
    adversarial_lower_bound, best_affine_l1, interpolant, l1_error, optimal_p0_general, optimal_p0_matched,
    optimal_piecewise_dp,
};
use libound::bounds::{log_bound_constants, table1_bound, table_form, vacuity_threshold};
use libound::distributions::{draw_iid, sample_iid};
use libound::empirical::{cvm_statistic, cvm_threshold, dkw_expected_bound, l1_deviation, sup_deviation};
use libound::harness::{fmt_f64, run_experiment, write_outputs, ExperimentConfig, ExperimentOutput};
use libound::index::FitKind;
use libound::{
    ApproxMethod, BoundRow, BoundSpec, CdfModel, DensityBounds, LearnedIndex, MeasureSpec, ModelClass, PiecewiseModel,
    Segment, Strategy, Target,
};

/// Learned-index cost and bound experiments.
#[derive(Parser)]
#[command(name = "libound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deviation statistics of one sample against its source CDF.
    Stats {
        #[arg(long)]
        dist: CdfModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "lebesgue")]
        mu: MeasureSpec,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Piecewise L1 approximation error of a CDF.
    Approx {
        #[arg(long)]
        dist: CdfModel,
        #[arg(long, default_value = "matched")]
        mu: MeasureSpec,
        #[arg(long, default_value = "p0")]
        class: ModelClass,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "dp")]
        method: ApproxMethod,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Per-query ranks and costs of a learned index.
    Query {
        #[arg(long)]
        dist: CdfModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "p0")]
        class: ModelClass,
        #[arg(long, default_value = "opt")]
        fit: FitKind,
        #[arg(long, default_value = "binary")]
        strategy: Strategy,
        #[arg(long, default_value = "matched")]
        mu: MeasureSpec,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 10)]
        queries: usize,
        #[arg(long, default_value_t = 2)]
        qseed: u64,
    },
    /// One row of the lower-bound table.
    Bound {
        #[arg(long)]
        row: BoundRow,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Approximation error; defaults to 1/(4K).
        #[arg(long)]
        r: Option<f64>,
        /// Lower density bound, E1 only.
        #[arg(long)]
        cf: Option<f64>,
        /// Upper density bound, E1 only.
        #[arg(long)]
        cff: Option<f64>,
    },
    /// Runs a sweep and writes the trial and summary CSV files.
    Experiment(SweepArgs),
    /// Like `experiment`, but exits with status 1 if any bound is violated.
    Verify(SweepArgs),
}

/// Flags override the matching config keys.
#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    k_list: Option<String>,
    #[arg(long)]
    model_class: Option<String>,
    #[arg(long)]
    fit: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    queries_per_trial: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    output_path: Option<String>,
    #[arg(long)]
    r_override: Option<String>,
}

impl SweepArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("dist", &self.dist),
            ("mu", &self.mu),
            ("n_list", &self.n_list),
            ("k_list", &self.k_list),
            ("model_class", &self.model_class),
            ("fit", &self.fit),
            ("strategy", &self.strategy),
            ("trials", &self.trials),
            ("queries_per_trial", &self.queries_per_trial),
            ("base_seed", &self.base_seed),
            ("grid", &self.grid),
            ("output_path", &self.output_path),
            ("r_override", &self.r_override),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn stats(dist: &CdfModel, n: usize, seed: u64, mu: &MeasureSpec, grid: usize) -> Result<()> {
    let sample = sample_iid(dist, n, seed)?;
    let sup = sup_deviation(&sample, dist);
    let l1 = l1_deviation(&sample, dist, mu, grid)?;
    let cvm = cvm_statistic(&sample, dist);
    println!("n,seed,sup_norm,l1_norm,cvm,dkw_bound,cvm_threshold");
    println!(
        "{n},{seed},{},{},{},{},{}",
        fmt_f64(sup),
        fmt_f64(l1),
        fmt_f64(cvm),
        fmt_f64(dkw_expected_bound(n)),
        fmt_f64(cvm_threshold(n))
    );
    Ok(())
}

fn approx(
    dist: &CdfModel,
    mu: &MeasureSpec,
    class: ModelClass,
    k: usize,
    method: ApproxMethod,
    grid: usize,
) -> Result<()> {
    let error = match method {
        ApproxMethod::ClosedForm => {
            if class != ModelClass::P0 || !mu.is_matched() {
                bail!("the closed form covers piecewise-constant fits under the matched measure only");
            }
            optimal_p0_matched(dist, k)?.error
        }
        ApproxMethod::DpOracle => optimal_piecewise_dp(dist, k, class, mu, grid)?.error,
        ApproxMethod::Quantizer => {
            if class != ModelClass::P0 {
                bail!("the quantizer produces piecewise-constant fits only");
            }
            optimal_p0_general(dist, &mu.resolve(dist)?, k, grid)?.error
        }
        ApproxMethod::Interpolation => {
            let (lo, hi) = dist.support();
            let affine = interpolant(dist, lo, hi, k)?;
            let model = match class {
                ModelClass::P1 => affine,
                ModelClass::P0 => {
                    let segments = affine
                        .breakpoints()
                        .windows(2)
                        .map(|w| Segment::Constant(0.5 * (dist.value(w[0]) + dist.value_left(w[1]))))
                        .collect();
                    PiecewiseModel::new(affine.breakpoints().to_vec(), segments)?
                }
            };
            l1_error(&model, dist, mu, grid)?
        }
        ApproxMethod::DirectSearch => {
            if class != ModelClass::P1 || k != 1 {
                bail!("direct search fits a single affine segment: use --class p1 --k 1");
            }
            let (lo, hi) = dist.support();
            best_affine_l1(dist, lo, hi, &mu.resolve(dist)?, grid)?.error
        }
    };
    let adversarial = adversarial_lower_bound(k).ok().map(|(_, b)| b);
    println!("class,k,method,grid,error,bound_1_over_4K,adversarial_bound");
    println!("{class},{k},{method},{grid},{},{},{}", fmt_f64(error), fmt_f64(1.0 / (4.0 * k as f64)), opt(adversarial));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn query(
    dist: &CdfModel,
    n: usize,
    seed: u64,
    k: usize,
    class: ModelClass,
    fit: FitKind,
    strategy: Strategy,
    mu: MeasureSpec,
    grid: usize,
    queries: usize,
    qseed: u64,
) -> Result<()> {
    let sample = sample_iid(dist, n, seed)?;
    let measure = mu.resolve(dist)?;
    let index = LearnedIndex::build(sample, k, class, strategy, &fit.with(grid, mu))?;
    println!("q,rank,epsilon,routing_steps,search_steps");
    for q in draw_iid(&measure, queries, qseed) {
        let c = index.rank(q)?;
        println!("{},{},{},{},{}", fmt_f64(q), c.rank, fmt_f64(c.epsilon), c.routing_steps, c.search_steps);
    }
    Ok(())
}

fn bound(row: BoundRow, n: usize, k: usize, r: Option<f64>, cf: Option<f64>, cff: Option<f64>) -> Result<()> {
    let r = r.unwrap_or(1.0 / (4.0 * k as f64));
    let mut spec = BoundSpec::new(row, n, k, r)?;
    let mut c2 = None;
    match (cf, cff) {
        (Some(lower), Some(upper)) => {
            spec = spec.with_density(DensityBounds { lower, upper })?;
            c2 = Some(log_bound_constants(lower, upper)?.1);
        }
        (None, None) => {}
        _ => bail!("--cf and --cff go together"),
    }
    println!("row,n,k,r,bound,table_form,vacuity_threshold");
    println!(
        "{row},{n},{k},{},{},{},{}",
        fmt_f64(r),
        fmt_f64(table1_bound(&spec)?),
        fmt_f64(table_form(&spec)?),
        fmt_f64(vacuity_threshold(row, n, c2)?)
    );
    Ok(())
}

fn report(out: &ExperimentOutput) {
    for o in &out.outcomes {
        if let Some(e) = &o.error {
            println!("n={} k={} error: {e}", o.n, o.k);
            continue;
        }
        for r in &o.reports {
            let verdict = match (r.vacuous, r.satisfied) {
                (true, _) => "vacuous",
                (false, true) => "ok",
                (false, false) => "VIOLATED",
            };
            println!(
                "n={} k={} R={} row={} {}={} bound={} slack={} {verdict}",
                o.n,
                o.k,
                fmt_f64(o.r_used),
                r.spec.row,
                r.statistic,
                fmt_f64(r.measured),
                fmt_f64(r.bound_value),
                fmt_f64(r.slack)
            );
        }
    }
}

fn sweep(args: &SweepArgs, strict: bool) -> Result<ExitCode> {
    let cfg = args.config()?;
    let out = run_experiment(&cfg)?;
    write_outputs(&out).with_context(|| format!("writing {}", cfg.output_path.display()))?;
    report(&out);
    if strict && !out.success() {
        eprintln!("bound verification failed; see {}", cfg.summary_path().display());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Stats { dist, n, seed, mu, grid } => stats(&dist, n, seed, &mu, grid)?,
        Command::Approx { dist, mu, class, k, method, grid } => approx(&dist, &mu, class, k, method, grid)?,
        Command::Query { dist, n, seed, k, class, fit, strategy, mu, grid, queries, qseed } => {
            query(&dist, n, seed, k, class, fit, strategy, mu, grid, queries, qseed)?
        }
        Command::Bound { row, n, k, r, cf, cff } => bound(row, n, k, r, cf, cff)?,
        Command::Experiment(args) => return sweep(&args, false),
        Command::Verify(args) => return sweep(&args, true),
    }
    Ok(ExitCode::SUCCESS)
}
