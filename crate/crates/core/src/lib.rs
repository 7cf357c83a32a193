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

//! Learned-index cost model and lower-bound verification.
//!
//! Keys are sampled from analytic CDFs, indexed by a piecewise predictor with
//! step-counted local search, and the measured costs are compared against
//! closed-form lower bounds driven by the piecewise approximation error `R`.

// `!(a < b)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bounds;
pub mod distributions;
pub mod empirical;
mod error;
pub mod harness;
pub mod index;
mod quad;
pub mod target;

pub use approx::{ApproxMethod, ApproxResult, ModelClass, PiecewiseModel, Segment};
pub use bounds::{BoundRow, BoundSpec, Statistic};
pub use distributions::{CdfKind, CdfModel, DensityBounds, MeasureSpec};
pub use empirical::KeySample;
pub use error::{Error, Result};
pub use index::{CostBreakdown, Fit, LearnedIndex, Strategy};
pub use target::Target;
