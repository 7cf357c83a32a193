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

//! Closed-form lower bounds on local-search cost.
//!
//! Every row compares the approximation error `R` (rank-fraction units) with a
//! fluctuation term of the empirical CDF. A row whose bracket is not positive
//! is vacuous: its value is reported as is, never clamped.

use std::fmt;
use std::str::FromStr;

use crate::distributions::DensityBounds;
use crate::error::{domain, Error, Result};
use crate::index::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundRow {
    /// Linear search, any μ, grand mean.
    L1,
    /// Linear search, matched μ, worst realization of the query mean.
    L2,
    /// Exponential search, any μ, worst realization of the query mean.
    E1,
    /// Exponential search, matched μ, worst case.
    E2,
    /// Binary search, any μ, worst case.
    B1,
    /// Binary search, matched μ, worst case.
    B2,
}

/// How per-query costs are aggregated before comparison with a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// Mean over every trial and query.
    GrandMean,
    /// Maximum over trials of the per-trial query mean. Only a sampled witness
    /// for a supremum over realizations.
    MaxTrialMean,
    /// Maximum over every trial and query.
    GlobalMax,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::GrandMean => "mean",
            Statistic::MaxTrialMean => "max_trial_mean",
            Statistic::GlobalMax => "max",
        })
    }
}

impl BoundRow {
    pub const ALL: [BoundRow; 6] = [BoundRow::L1, BoundRow::L2, BoundRow::E1, BoundRow::E2, BoundRow::B1, BoundRow::B2];

    pub fn statistic(self) -> Statistic {
        match self {
            BoundRow::L1 => Statistic::GrandMean,
            BoundRow::L2 | BoundRow::E1 => Statistic::MaxTrialMean,
            BoundRow::E2 | BoundRow::B1 | BoundRow::B2 => Statistic::GlobalMax,
        }
    }

    pub fn strategy(self) -> Strategy {
        match self {
            BoundRow::L1 | BoundRow::L2 => Strategy::Linear,
            BoundRow::E1 | BoundRow::E2 => Strategy::Exponential,
            BoundRow::B1 | BoundRow::B2 => Strategy::Binary,
        }
    }

    /// True for rows that hold only when queries follow the data distribution.
    pub fn needs_matched_measure(self) -> bool {
        matches!(self, BoundRow::L2 | BoundRow::E2 | BoundRow::B2)
    }

    /// True for rows measured in log-steps, which get one step of rounding slack.
    pub fn is_logarithmic(self) -> bool {
        !matches!(self, BoundRow::L1 | BoundRow::L2)
    }
}

impl fmt::Display for BoundRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundRow::L1 => "l1",
            BoundRow::L2 => "l2",
            BoundRow::E1 => "e1",
            BoundRow::E2 => "e2",
            BoundRow::B1 => "b1",
            BoundRow::B2 => "b2",
        })
    }
}

impl FromStr for BoundRow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let row = s.trim().to_ascii_lowercase();
        BoundRow::ALL
            .into_iter()
            .find(|r| r.to_string() == row)
            .ok_or_else(|| Error::Parse(format!("unknown bound row `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub row: BoundRow,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    /// Common density bounds for the data and query densities. Required by E1.
    pub density: Option<DensityBounds>,
}

impl BoundSpec {
    pub fn new(row: BoundRow, n: usize, k: usize, r: f64) -> Result<Self> {
        if n == 0 || k == 0 {
            return domain("n and K must be at least 1");
        }
        if !(0.0..=1.0).contains(&r) {
            return domain(format!("R must lie in [0, 1], got {r}"));
        }
        Ok(Self { row, n, k, r, density: None })
    }

    pub fn with_density(mut self, density: DensityBounds) -> Result<Self> {
        if !(density.lower > 0.0 && density.lower <= density.upper && density.upper.is_finite()) {
            return domain(format!(
                "density bounds need 0 < cF <= CF < inf, got ({}, {})",
                density.lower, density.upper
            ));
        }
        self.density = Some(density);
        Ok(self)
    }
}

/// `√(π/(2n))`, the expected sup-norm fluctuation of the empirical CDF.
fn dkw_term(n: f64) -> f64 {
    (std::f64::consts::PI / (2.0 * n)).sqrt()
}

/// `1/(√6 n)`, the matched-measure fluctuation.
fn matched_term(n: f64) -> f64 {
    1.0 / (6f64.sqrt() * n)
}

fn log2_or_neg_inf(v: f64) -> f64 {
    if v > 0.0 {
        v.log2()
    } else {
        f64::NEG_INFINITY
    }
}

/// `C₁ = γ⁷/54` and `C₂ = log₂(8/γ¹²)` with `γ = c_F/(2 C_F)`.
pub fn log_bound_constants(cf: f64, cff: f64) -> Result<(f64, f64)> {
    if !(cf > 0.0 && cf <= cff && cff.is_finite()) {
        return domain(format!("need 0 < cF <= CF < inf, got cF = {cf}, CF = {cff}"));
    }
    let gamma = cf / (2.0 * cff);
    Ok((gamma.powi(7) / 54.0, 3.0 - 12.0 * gamma.log2()))
}

/// The row's lower bound on search steps. Log rows return `-inf` when their
/// bracket is not positive.
pub fn table1_bound(spec: &BoundSpec) -> Result<f64> {
    let n = spec.n as f64;
    let r = spec.r;
    Ok(match spec.row {
        BoundRow::L1 => n * (r - dkw_term(n)),
        BoundRow::L2 => n * (r - matched_term(n)),
        BoundRow::E1 => {
            let (c1, c2) = e1_constants(spec)?;
            c1 * (log2_or_neg_inf(n * r) - c2)
        }
        BoundRow::E2 | BoundRow::B2 => log2_or_neg_inf(n * (r - matched_term(n))),
        BoundRow::B1 => log2_or_neg_inf(n * (r - dkw_term(n))),
    })
}

fn e1_constants(spec: &BoundSpec) -> Result<(f64, f64)> {
    let d = spec.density.ok_or_else(|| Error::Domain("the exponential any-measure row needs density bounds".into()))?;
    log_bound_constants(d.lower, d.upper)
}

/// The exponential any-measure row without its leading constant:
/// `log₂(nR) − C₂`. For reporting only; measurements are compared with the
/// constant-bearing form.
pub fn e1_table_form(spec: &BoundSpec) -> Result<f64> {
    let (_, c2) = e1_constants(spec)?;
    Ok(log2_or_neg_inf(spec.n as f64 * spec.r) - c2)
}

/// The value printed in the table column: the bound itself for every row but
/// E1, which shows [`e1_table_form`].
pub fn table_form(spec: &BoundSpec) -> Result<f64> {
    match spec.row {
        BoundRow::E1 => e1_table_form(spec),
        _ => table1_bound(spec),
    }
}

/// The smallest `R` for which the row's bound is positive. E1 needs `C₂`.
pub fn vacuity_threshold(row: BoundRow, n: usize, c2: Option<f64>) -> Result<f64> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let nf = n as f64;
    Ok(match row {
        BoundRow::L1 => dkw_term(nf),
        BoundRow::L2 => matched_term(nf),
        BoundRow::B1 => dkw_term(nf) + 1.0 / nf,
        BoundRow::E2 | BoundRow::B2 => matched_term(nf) + 1.0 / nf,
        BoundRow::E1 => {
            let c2 = c2.ok_or_else(|| Error::Domain("the E1 threshold needs C2".into()))?;
            c2.exp2() / nf
        }
    })
}

/// A bound checked against a measured statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub spec: BoundSpec,
    pub bound_value: f64,
    pub measured: f64,
    pub statistic: Statistic,
    /// Allowance subtracted from the bound before comparison.
    pub slack: f64,
    pub satisfied: bool,
    pub vacuous: bool,
}

impl BoundReport {
    /// Vacuous bounds (value ≤ 0) are satisfied by definition and flagged.
    pub fn evaluate(spec: BoundSpec, measured: f64, slack: f64) -> Result<Self> {
        let bound_value = table1_bound(&spec)?;
        let vacuous = !(bound_value > 0.0);
        let satisfied = vacuous || measured >= bound_value - slack;
        Ok(Self { spec, bound_value, measured, statistic: spec.row.statistic(), slack, satisfied, vacuous })
    }
}
