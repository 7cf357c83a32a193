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

//! Real functions on a compact interval that the approximation routines fit.

use crate::distributions::CdfModel;
use crate::quad;

/// A function on a closed interval, piecewise smooth between its [`kinks`].
///
/// [`kinks`]: Target::kinks
pub trait Target: Sync {
    fn value(&self, x: f64) -> f64;

    /// Left limit at `x`. Equal to [`value`](Target::value) for continuous targets.
    fn value_left(&self, x: f64) -> f64 {
        self.value(x)
    }

    fn support(&self) -> (f64, f64);

    /// Interior points where the function or its derivative may jump.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: Target + ?Sized> Target for &T {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn value_left(&self, x: f64) -> f64 {
        (**self).value_left(x)
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn kinks(&self) -> Vec<f64> {
        (**self).kinks()
    }
}

/// `factor · inner`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<T> {
    pub inner: T,
    pub factor: f64,
}

impl<T: Target> Target for Scaled<T> {
    fn value(&self, x: f64) -> f64 {
        self.factor * self.inner.value(x)
    }
    fn value_left(&self, x: f64) -> f64 {
        self.factor * self.inner.value_left(x)
    }
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
    fn kinks(&self) -> Vec<f64> {
        self.inner.kinks()
    }
}

/// Piecewise-linear interpolation of values sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFn {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl TabulatedFn {
    /// `values[j]` is the function at `lo + j (hi - lo) / (len - 1)`.
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> crate::Result<Self> {
        if values.len() < 2 || !(hi > lo) || values.iter().any(|v| !v.is_finite()) {
            return crate::error::domain("tabulated function needs >= 2 finite values on lo < hi");
        }
        Ok(Self { lo, hi, values })
    }

    /// Samples `f` at `cells + 1` uniform nodes.
    pub fn sample(lo: f64, hi: f64, cells: usize, f: impl Fn(f64) -> f64) -> crate::Result<Self> {
        let cells = cells.max(1);
        let values = (0..=cells).map(|j| f(lo + (hi - lo) * j as f64 / cells as f64)).collect();
        Self::new(lo, hi, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.cells() {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * j as f64 / self.cells() as f64
    }

    pub(crate) fn cell_of(&self, x: f64) -> (usize, f64) {
        let cells = self.cells();
        let s = ((x - self.lo) / (self.hi - self.lo) * cells as f64).clamp(0.0, cells as f64);
        let j = (s.floor() as usize).min(cells - 1);
        (j, s - j as f64)
    }
}

impl Target for TabulatedFn {
    fn value(&self, x: f64) -> f64 {
        let (j, t) = self.cell_of(x);
        self.values[j] + t * (self.values[j + 1] - self.values[j])
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn kinks(&self) -> Vec<f64> {
        (1..self.cells()).map(|j| self.node(j)).collect()
    }
}

/// `∫ |a - b| dμ` over the support of `mu`, using about `grid` panels plus a
/// split at every kink of `a`, `b` and the measure.
pub(crate) fn l1_distance<A: Target, B: Target>(a: &A, b: &B, mu: &CdfModel, grid: usize) -> f64 {
    let (lo, hi) = mu.support();
    let cuts = a.kinks().into_iter().chain(b.kinks()).chain(Target::kinks(mu));
    let pts = quad::pieces(lo, hi, cuts);
    let total = hi - lo;
    let d = |x: f64| a.value(x) - b.value(x);
    let w = |x: f64| mu.density_raw(x);
    pts.windows(2)
        .map(|p| {
            let d_hi = a.value_left(p[1]) - b.value_left(p[1]);
            let panels = quad::panels_for(p[1] - p[0], total, grid);
            quad::abs_integral(p[0], p[1], panels, d, d_hi, w)
        })
        .sum()
}
