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

//! Numeric abstraction for score arithmetic.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, ToPrimitive};

/// A totally comparable field-like number type used for ranking scores.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. Rationals make every
/// comparison exact; floats compare with `total_cmp`.
pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync + 'static {
    fn from_count(n: u64) -> Self;

    /// Conversion from a finite real. Rationals convert the binary value exactly.
    fn from_real(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn total_cmp(&self, other: &Self) -> Ordering;

    fn recip_count(n: u64) -> Self {
        Self::one() / Self::from_count(n)
    }
}

macro_rules! float_scalar {
    ($($t:ty)*) => ($(
        impl Scalar for $t {
            fn from_count(n: u64) -> Self {
                n as $t
            }

            fn from_real(x: f64) -> Option<Self> {
                x.is_finite().then_some(x as $t)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn total_cmp(&self, other: &Self) -> Ordering {
                <$t>::total_cmp(self, other)
            }
        }
    )*)
}

float_scalar!(f32 f64);

impl Scalar for BigRational {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn from_real(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}
