// Copyright 2026 The delisort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Ranking engine and attention simulator for proposal lists on online
//! deliberation platforms.
//!
//! The crate covers three families of sorting methods:
//!
//! * single-parameter baselines seen on deployed platforms ([`baseline`]),
//! * holistic rules that look at the whole list: sequential PAV, sequential
//!   Phragmén and layered greedy coverage ([`holistic`]),
//! * an exposure-aware pipeline that gates on inspection counts and
//!   diversifies by tag and author ([`integrated`]).
//!
//! [`metrics`] measures what a list does to users and groups, and [`sim`]
//! runs seeded discrete-time simulations of users browsing the list.
//!
//! Score arithmetic in the holistic rules is generic over [`Scalar`]. The
//! default entry points use [`Exact`] (arbitrary-precision rationals) so that
//! tie-breaking never depends on floating-point rounding; the `*_with`
//! variants accept `f64` or `f32` where speed matters more than exactness.

pub mod baseline;
pub mod error;
pub mod holistic;
pub mod integrated;
pub mod io;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod sorter;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact score type used by the default holistic entry points.
pub type Exact = num_rational::BigRational;

/// Floating-point score type for approximate runs.
pub type Approx = f64;

/// Exposure-adjusted score (Wilson lower bound) in double precision.
pub type ExposureScore = f64;
