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

//! Analytic CDF families on compact supports, with inverse-transform sampling.
//!
//! Every model lives on a finite closed interval `[a, b]`. Unbounded families
//! (logistic, exponential) enter only in truncated form.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::empirical::KeySample;
use crate::error::{domain, Error, Result};
use crate::target::{TabulatedFn, Target};

#[derive(Debug, Clone, PartialEq)]
pub enum CdfKind {
    Uniform {
        a: f64,
        b: f64,
    },
    TruncatedLogistic {
        center: f64,
        scale: f64,
        a: f64,
        b: f64,
    },
    TruncatedExponential {
        rate: f64,
        a: f64,
        b: f64,
    },
    /// `F(x) = x^p` on `[0, 1]`.
    PowerLaw {
        p: f64,
    },
    /// `M` rescaled copies of `x^2` stitched into one CDF on `[0, 1]`.
    AdversarialStaircase {
        steps: usize,
    },
    /// Strictly increasing piecewise-linear CDF on `[0, 1]`.
    Tabulated(TabulatedFn),
}

/// Lower and upper bounds on the density over the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBounds {
    pub lower: f64,
    pub upper: f64,
}

impl DensityBounds {
    /// Both bounds positive and finite.
    pub fn is_nondegenerate(&self) -> bool {
        self.lower > 0.0 && self.upper.is_finite()
    }

    /// The tightest common bounds for two densities.
    pub fn union(self, other: DensityBounds) -> DensityBounds {
        DensityBounds { lower: self.lower.min(other.lower), upper: self.upper.max(other.upper) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfModel {
    kind: CdfKind,
    support: (f64, f64),
    density_bounds: DensityBounds,
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn logit(v: f64) -> f64 {
    (v / (1.0 - v)).ln()
}

fn finite(vals: &[f64]) -> bool {
    vals.iter().all(|v| v.is_finite())
}

impl CdfModel {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !finite(&[a, b]) || !(a < b) {
            return domain(format!("uniform needs finite a < b, got [{a}, {b}]"));
        }
        let d = 1.0 / (b - a);
        Ok(Self {
            kind: CdfKind::Uniform { a, b },
            support: (a, b),
            density_bounds: DensityBounds { lower: d, upper: d },
        })
    }

    pub fn truncated_logistic(center: f64, scale: f64, a: f64, b: f64) -> Result<Self> {
        if !finite(&[center, scale, a, b]) || !(scale > 0.0) || !(a < b) {
            return domain("logistic needs scale > 0 and finite a < b");
        }
        let mut m = Self {
            kind: CdfKind::TruncatedLogistic { center, scale, a, b },
            support: (a, b),
            density_bounds: DensityBounds { lower: 0.0, upper: 0.0 },
        };
        // The density is symmetric and unimodal about `center`.
        let mode = center.clamp(a, b);
        let far = if (a - center).abs() > (b - center).abs() { a } else { b };
        m.density_bounds = DensityBounds { lower: m.density_raw(far), upper: m.density_raw(mode) };
        Ok(m)
    }

    pub fn truncated_exponential(rate: f64, a: f64, b: f64) -> Result<Self> {
        if !finite(&[rate, a, b]) || !(rate > 0.0) || !(a < b) {
            return domain("exponential needs rate > 0 and finite a < b");
        }
        let mut m = Self {
            kind: CdfKind::TruncatedExponential { rate, a, b },
            support: (a, b),
            density_bounds: DensityBounds { lower: 0.0, upper: 0.0 },
        };
        m.density_bounds = DensityBounds { lower: m.density_raw(b), upper: m.density_raw(a) };
        Ok(m)
    }

    pub fn power_law(p: f64) -> Result<Self> {
        if !p.is_finite() || !(p > 0.0) {
            return domain(format!("power law needs p > 0, got {p}"));
        }
        let density_bounds = if p == 1.0 {
            DensityBounds { lower: 1.0, upper: 1.0 }
        } else if p > 1.0 {
            DensityBounds { lower: 0.0, upper: p }
        } else {
            DensityBounds { lower: p, upper: f64::INFINITY }
        };
        Ok(Self { kind: CdfKind::PowerLaw { p }, support: (0.0, 1.0), density_bounds })
    }

    pub fn adversarial_staircase(steps: usize) -> Result<Self> {
        if steps == 0 {
            return domain("staircase needs at least one step");
        }
        Ok(Self {
            kind: CdfKind::AdversarialStaircase { steps },
            support: (0.0, 1.0),
            density_bounds: DensityBounds { lower: 0.0, upper: 2.0 },
        })
    }

    /// A piecewise-linear CDF through `values` on a uniform grid over `[0, 1]`.
    /// The values must rise strictly from 0 to 1.
    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        let table = TabulatedFn::new(0.0, 1.0, values)?;
        let v = table.values();
        if v[0] != 0.0 || v[v.len() - 1] != 1.0 {
            return domain("tabulated CDF must start at 0 and end at 1");
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("tabulated CDF must be strictly increasing");
        }
        let cells = table.cells() as f64;
        let (lower, upper) = v
            .windows(2)
            .map(|w| (w[1] - w[0]) * cells)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s), hi.max(s)));
        Ok(Self {
            kind: CdfKind::Tabulated(table),
            support: (0.0, 1.0),
            density_bounds: DensityBounds { lower, upper },
        })
    }

    pub fn kind(&self) -> &CdfKind {
        &self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn density_bounds(&self) -> DensityBounds {
        self.density_bounds
    }

    /// `F(x)`: 0 below the support, 1 above it.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return domain("cdf of NaN");
        }
        Ok(self.cdf_raw(x))
    }

    pub(crate) fn cdf_raw(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return 1.0;
        }
        match &self.kind {
            CdfKind::Uniform { a, b } => (x - a) / (b - a),
            CdfKind::TruncatedLogistic { center, scale, a, b } => {
                let la = logistic((a - center) / scale);
                let lb = logistic((b - center) / scale);
                (logistic((x - center) / scale) - la) / (lb - la)
            }
            CdfKind::TruncatedExponential { rate, a, b } => (-rate * (x - a)).exp_m1() / (-rate * (b - a)).exp_m1(),
            CdfKind::PowerLaw { p } => x.powf(*p),
            CdfKind::AdversarialStaircase { steps } => {
                let m = *steps as f64;
                let i = (m * x).floor().min(m - 1.0);
                let t = m * x - i;
                (t * t + i) / m
            }
            CdfKind::Tabulated(t) => t.value(x),
        }
        .clamp(0.0, 1.0)
    }

    /// `F⁻¹(u)` for `u` in `[0, 1]`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return domain(format!("inverse CDF needs u in [0, 1], got {u}"));
        }
        Ok(self.inverse_raw(u))
    }

    pub(crate) fn inverse_raw(&self, u: f64) -> f64 {
        let (lo, hi) = self.support;
        if u <= 0.0 {
            return lo;
        }
        if u >= 1.0 {
            return hi;
        }
        let x = match &self.kind {
            CdfKind::Uniform { a, b } => a + u * (b - a),
            CdfKind::TruncatedLogistic { center, scale, a, b } => {
                let la = logistic((a - center) / scale);
                let lb = logistic((b - center) / scale);
                center + scale * logit(la + u * (lb - la))
            }
            CdfKind::TruncatedExponential { rate, a, b } => {
                let z = (-rate * (b - a)).exp_m1();
                a - (u * z).ln_1p() / rate
            }
            CdfKind::PowerLaw { p } => u.powf(1.0 / p),
            CdfKind::AdversarialStaircase { steps } => {
                // Each step is an affine image of x^2, so invert it with a square root.
                let m = *steps as f64;
                let i = (m * u).floor().min(m - 1.0);
                let t = (m * u - i).max(0.0).sqrt();
                (i + t) / m
            }
            CdfKind::Tabulated(t) => {
                let v = t.values();
                let j = v.partition_point(|&y| y <= u).clamp(1, v.len() - 1) - 1;
                let frac = (u - v[j]) / (v[j + 1] - v[j]);
                t.node(j) + frac * (t.node(j + 1) - t.node(j))
            }
        };
        x.clamp(lo, hi)
    }

    /// Density at a point of the support.
    pub fn density(&self, x: f64) -> Result<f64> {
        let (a, b) = self.support;
        if !(x >= a && x <= b) {
            return domain(format!("density at {x} outside support [{a}, {b}]"));
        }
        Ok(self.density_raw(x))
    }

    /// Density with 0 outside the support. Right-continuous at kinks.
    pub(crate) fn density_raw(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        if x < a || x > b {
            return 0.0;
        }
        match &self.kind {
            CdfKind::Uniform { a, b } => 1.0 / (b - a),
            CdfKind::TruncatedLogistic { center, scale, a, b } => {
                let la = logistic((a - center) / scale);
                let lb = logistic((b - center) / scale);
                let l = logistic((x - center) / scale);
                l * (1.0 - l) / scale / (lb - la)
            }
            CdfKind::TruncatedExponential { rate, a, b } => {
                rate * (-rate * (x - a)).exp() / -(-rate * (b - a)).exp_m1()
            }
            CdfKind::PowerLaw { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    p * x.powf(p - 1.0)
                }
            }
            CdfKind::AdversarialStaircase { steps } => {
                let m = *steps as f64;
                let i = (m * x).floor().min(m - 1.0);
                2.0 * (m * x - i)
            }
            CdfKind::Tabulated(t) => {
                let (j, _) = t.cell_of(x);
                let v = t.values();
                (v[j + 1] - v[j]) * t.cells() as f64
            }
        }
    }

    /// Interior points where the density is discontinuous or not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            CdfKind::AdversarialStaircase { steps } => (1..*steps).map(|i| i as f64 / *steps as f64).collect(),
            CdfKind::Tabulated(t) => Target::kinks(t),
            _ => Vec::new(),
        }
    }
}

impl Target for CdfModel {
    fn value(&self, x: f64) -> f64 {
        self.cdf_raw(x)
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn kinks(&self) -> Vec<f64> {
        CdfModel::kinks(self)
    }
}

impl fmt::Display for CdfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CdfKind::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            CdfKind::TruncatedLogistic { center, scale, a, b } => {
                write!(f, "logistic:{center},{scale},{a},{b}")
            }
            CdfKind::TruncatedExponential { rate, a, b } => write!(f, "exp:{rate},{a},{b}"),
            CdfKind::PowerLaw { p } => write!(f, "pow:{p}"),
            CdfKind::AdversarialStaircase { steps } => write!(f, "staircase:{steps}"),
            CdfKind::Tabulated(t) => write!(f, "tabulated:{}", t.cells()),
        }
    }
}

impl FromStr for CdfModel {
    type Err = Error;

    /// `uniform:a,b | logistic:center,scale,a,b | exp:rate,a,b | pow:p | staircase:M`
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) =
            s.trim().split_once(':').ok_or_else(|| Error::Parse(format!("distribution spec `{s}` lacks `name:`")))?;
        let nums = args
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("distribution spec `{s}`: {e}")))?;
        let arity = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!("`{name}` takes {k} arguments, got {}", nums.len())))
            }
        };
        match name.trim() {
            "uniform" => arity(2).and_then(|_| Self::uniform(nums[0], nums[1])),
            "logistic" => arity(4).and_then(|_| Self::truncated_logistic(nums[0], nums[1], nums[2], nums[3])),
            "exp" => arity(3).and_then(|_| Self::truncated_exponential(nums[0], nums[1], nums[2])),
            "pow" => arity(1).and_then(|_| Self::power_law(nums[0])),
            "staircase" => {
                arity(1)?;
                let m = nums[0];
                if m.fract() != 0.0 || m < 1.0 {
                    return Err(Error::Parse(format!("staircase needs a positive integer, got {m}")));
                }
                Self::adversarial_staircase(m as usize)
            }
            other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
        }
    }
}

/// The query measure `μ`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Uniform probability measure on the data support.
    Lebesgue,
    /// `dμ = dF`: queries follow the data distribution.
    Matched,
    Explicit(CdfModel),
}

impl MeasureSpec {
    /// The query distribution as a CDF model on the data support.
    pub fn resolve(&self, data: &CdfModel) -> Result<CdfModel> {
        let (a, b) = data.support();
        match self {
            MeasureSpec::Lebesgue => CdfModel::uniform(a, b),
            MeasureSpec::Matched => Ok(data.clone()),
            MeasureSpec::Explicit(m) => {
                let (c, d) = m.support();
                let tol = 1e-12 * (b - a).abs().max(1.0);
                if (c - a).abs() > tol || (d - b).abs() > tol {
                    return domain(format!("query measure support [{c}, {d}] differs from data support [{a}, {b}]"));
                }
                Ok(m.clone())
            }
        }
    }

    pub fn is_matched(&self) -> bool {
        matches!(self, MeasureSpec::Matched)
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Lebesgue => f.write_str("lebesgue"),
            MeasureSpec::Matched => f.write_str("matched"),
            MeasureSpec::Explicit(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lebesgue" => Ok(MeasureSpec::Lebesgue),
            "matched" => Ok(MeasureSpec::Matched),
            other => other.parse().map(MeasureSpec::Explicit),
        }
    }
}

/// The seeded generator behind every random draw: ChaCha8 keyed by the
/// 64-bit seed, which is counter-based and platform independent.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` unsorted i.i.d. draws by inverse transform.
pub fn draw_iid(model: &CdfModel, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed);
    (0..count).map(|_| model.inverse_raw(rng.random::<f64>())).collect()
}

/// `n` i.i.d. keys, sorted ascending.
pub fn sample_iid(model: &CdfModel, n: usize, seed: u64) -> Result<KeySample> {
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    let mut keys = draw_iid(model, n, seed);
    keys.sort_by(f64::total_cmp);
    Ok(KeySample::from_model_draw(keys, seed, model.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_models() -> Vec<CdfModel> {
        vec![
            CdfModel::uniform(0.0, 1.0).unwrap(),
            CdfModel::uniform(2.0, 4.0).unwrap(),
            CdfModel::truncated_logistic(0.5, 0.1, 0.0, 1.0).unwrap(),
            CdfModel::truncated_logistic(2.0, 0.7, -1.0, 1.0).unwrap(),
            CdfModel::truncated_exponential(3.0, 0.0, 2.0).unwrap(),
            CdfModel::power_law(2.0).unwrap(),
            CdfModel::power_law(0.5).unwrap(),
            CdfModel::adversarial_staircase(1).unwrap(),
            CdfModel::adversarial_staircase(2).unwrap(),
            CdfModel::adversarial_staircase(7).unwrap(),
        ]
    }

    #[test]
    fn cdf_examples() {
        let u = CdfModel::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.cdf(0.25).unwrap(), 0.25);
        assert_eq!(u.cdf(-3.0).unwrap(), 0.0);
        assert_eq!(u.cdf(3.0).unwrap(), 1.0);
        let s1 = CdfModel::adversarial_staircase(1).unwrap();
        assert!((s1.cdf(0.5).unwrap() - 0.25).abs() < 1e-15);
        let s2 = CdfModel::adversarial_staircase(2).unwrap();
        assert!((s2.cdf(0.25).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(u.cdf(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_examples() {
        let u = CdfModel::uniform(0.0, 1.0).unwrap();
        assert!((u.inverse(0.7).unwrap() - 0.7).abs() < 1e-15);
        let s1 = CdfModel::adversarial_staircase(1).unwrap();
        assert!((s1.inverse(0.25).unwrap() - 0.5).abs() < 1e-15);
        let u24 = CdfModel::uniform(2.0, 4.0).unwrap();
        assert_eq!(u24.inverse(0.5).unwrap(), 3.0);
        assert!(matches!(u.inverse(1.5), Err(Error::Domain(_))));
        assert!(matches!(u.inverse(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn density_examples() {
        let u = CdfModel::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.density(0.3).unwrap(), 1.0);
        let s1 = CdfModel::adversarial_staircase(1).unwrap();
        assert!((s1.density(0.5).unwrap() - 1.0).abs() < 1e-15);
        let s2 = CdfModel::adversarial_staircase(2).unwrap();
        assert!((s2.density(0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(u.density(1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn density_matches_numerical_derivative() {
        for m in all_models() {
            let (a, b) = m.support();
            for j in 1..40 {
                let x = a + (b - a) * (j as f64 + 0.37) / 41.0;
                // Stay clear of staircase junctions.
                if m.kinks().iter().any(|k| (k - x).abs() < 1e-4) {
                    continue;
                }
                let h = 1e-6 * (b - a);
                let numeric = (m.cdf_raw(x + h) - m.cdf_raw(x - h)) / (2.0 * h);
                let exact = m.density(x).unwrap();
                assert!((numeric - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{m} at {x}: {numeric} vs {exact}");
            }
        }
    }

    #[test]
    fn density_within_declared_bounds() {
        for m in all_models() {
            let (a, b) = m.support();
            let bd = m.density_bounds();
            for j in 0..=1000 {
                let x = a + (b - a) * j as f64 / 1000.0;
                let d = m.density(x).unwrap();
                assert!(d >= bd.lower * (1.0 - 1e-12) && d <= bd.upper * (1.0 + 1e-12), "{m} {x} {d}");
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for m in all_models() {
            if !m.density_bounds().upper.is_finite() {
                continue;
            }
            let (a, b) = m.support();
            let g = 100_000;
            let h = (b - a) / g as f64;
            let kinks = m.kinks();
            let mut s = 0.5 * (m.density_raw(a) + m.density_raw(b));
            for j in 1..g {
                let x = a + h * j as f64;
                // At a density jump the trapezoid node takes the mean of both sides.
                s += if kinks.iter().any(|k| (k - x).abs() < 1e-12) {
                    0.5 * (m.density_raw(x) + m.density_raw(x - 1e-12))
                } else {
                    m.density_raw(x)
                };
            }
            assert!((s * h - 1.0).abs() < 1e-6, "{m}: {}", s * h);
        }
    }

    #[test]
    fn staircase_continuity() {
        for steps in 1..=12 {
            let m = CdfModel::adversarial_staircase(steps).unwrap();
            assert_eq!(m.cdf_raw(0.0), 0.0);
            assert_eq!(m.cdf_raw(1.0), 1.0);
            for i in 1..steps {
                let x = i as f64 / steps as f64;
                let left = m.cdf_raw(x - 1e-13);
                let right = m.cdf_raw(x + 1e-13);
                assert!((left - right).abs() < 1e-12);
                assert!((m.cdf_raw(x) - i as f64 / steps as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn logistic_density_bounds_are_endpoint_and_mode() {
        let m = CdfModel::truncated_logistic(0.5, 0.1, 0.0, 1.0).unwrap();
        let bd = m.density_bounds();
        assert_eq!(bd.upper, m.density(0.5).unwrap());
        assert_eq!(bd.lower, m.density(1.0).unwrap());
    }

    #[test]
    fn sampling_is_deterministic_and_sorted() {
        let u = CdfModel::uniform(0.0, 1.0).unwrap();
        let a = sample_iid(&u, 3, 42).unwrap();
        let b = sample_iid(&u, 3, 42).unwrap();
        assert_eq!(a.keys(), b.keys());
        assert!(matches!(sample_iid(&u, 0, 1), Err(Error::Domain(_))));

        let s = CdfModel::adversarial_staircase(4).unwrap();
        let k = sample_iid(&s, 10_000, 7).unwrap();
        assert!(k.keys().windows(2).all(|w| w[0] <= w[1]));
        assert!(k.keys().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn uniform_sample_mean() {
        let u = CdfModel::uniform(0.0, 1.0).unwrap();
        let k = sample_iid(&u, 100_000, 2026).unwrap();
        let mean = k.keys().iter().sum::<f64>() / k.len() as f64;
        // 3 sigma of the mean is 3 * sqrt(1/12) / sqrt(1e5) ~ 0.0027.
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["uniform:0,1", "logistic:0.5,0.1,0,1", "exp:3,0,2", "pow:2", "staircase:8"] {
            let m: CdfModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("staircase:1.5".parse::<CdfModel>().is_err());
        assert!("gauss:0,1".parse::<CdfModel>().is_err());
        assert!("uniform:1".parse::<CdfModel>().is_err());
        assert_eq!("matched".parse::<MeasureSpec>().unwrap(), MeasureSpec::Matched);
        assert!(matches!("pow:2".parse::<MeasureSpec>().unwrap(), MeasureSpec::Explicit(_)));
    }

    #[test]
    fn measure_resolution() {
        let data = CdfModel::uniform(2.0, 4.0).unwrap();
        let leb = MeasureSpec::Lebesgue.resolve(&data).unwrap();
        assert_eq!(leb.support(), (2.0, 4.0));
        let bad = MeasureSpec::Explicit(CdfModel::uniform(0.0, 1.0).unwrap());
        assert!(bad.resolve(&data).is_err());
    }

    #[test]
    fn tabulated_cdf_inverts() {
        let m = CdfModel::tabulated(vec![0.0, 0.1, 0.5, 1.0]).unwrap();
        for j in 0..=100 {
            let u = j as f64 / 100.0;
            assert!((m.cdf_raw(m.inverse_raw(u)) - u).abs() < 1e-12);
        }
        assert!(CdfModel::tabulated(vec![0.0, 0.5, 0.5, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn cdf_is_monotone(idx in 0usize..10, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let m = &all_models()[idx];
            let (a, b) = m.support();
            let (x, y) = (a + (b - a) * x.min(y), a + (b - a) * x.max(y));
            prop_assert!(m.cdf(x).unwrap() <= m.cdf(y).unwrap());
        }

        #[test]
        fn inverse_round_trips(idx in 0usize..10, u in 0.0f64..=1.0) {
            let m = &all_models()[idx];
            let back = m.cdf(m.inverse(u).unwrap()).unwrap();
            prop_assert!((back - u).abs() <= 1e-12, "{} u={} back={}", m, u, back);
        }

        #[test]
        fn inverse_is_monotone(idx in 0usize..10, u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
            let m = &all_models()[idx];
            prop_assert!(m.inverse(u.min(v)).unwrap() <= m.inverse(u.max(v)).unwrap());
        }
    }
}
