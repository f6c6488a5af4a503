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

//! A single entry point over every sorting method, used by the simulator and
//! the command line.

use serde::{Deserialize, Serialize};

use crate::baseline::{
    random_order, sort_by_approvals, sort_by_comments, sort_by_cost, sort_by_date, sort_by_ratio, sort_most_active,
    RandomPolicy, TieBreak,
};
use crate::error::{Error, Result};
use crate::holistic::{rank_greedy_coverage, rank_seq_pav, rank_seq_phragmen};
use crate::integrated::{integrated_rank, IntegratedConfig};
use crate::model::{ApprovalProfile, EvaluationEvent, InspectionStats, Proposal, RankedList, SortContext};
use crate::scalar::Scalar;
use crate::Exact;

/// Platform state a sorter may read.
#[derive(Clone, Copy, Debug)]
pub struct RankInput<'a> {
    pub proposals: &'a [Proposal],
    pub profile: &'a ApprovalProfile,
    pub events: &'a [EvaluationEvent],
    pub inspections: &'a InspectionStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Method {
    Date {
        newest_first: bool,
    },
    Approvals,
    Ratio {
        prior_approvals: f64,
        prior_total: f64,
    },
    /// Approval events inside a trailing window of `window` seconds.
    Active {
        window: i64,
    },
    Cost {
        highest_first: bool,
    },
    Comments,
    Random {
        policy: RandomPolicy,
    },
    SeqPav,
    SeqPhragmen,
    Coverage {
        reset_on_saturation: bool,
    },
    Integrated(IntegratedConfig),
}

impl Method {
    pub const NAMES: [&'static str; 11] = [
        "date",
        "approvals",
        "ratio",
        "active",
        "cost",
        "comments",
        "random",
        "seqpav",
        "seqphragmen",
        "coverage",
        "integrated",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Date { .. } => "date",
            Method::Approvals => "approvals",
            Method::Ratio { .. } => "ratio",
            Method::Active { .. } => "active",
            Method::Cost { .. } => "cost",
            Method::Comments => "comments",
            Method::Random { .. } => "random",
            Method::SeqPav => "seqpav",
            Method::SeqPhragmen => "seqphragmen",
            Method::Coverage { .. } => "coverage",
            Method::Integrated(_) => "integrated",
        }
    }

    /// The method with its default parameters.
    pub fn by_name(name: &str) -> Option<Method> {
        Some(match name {
            "date" => Method::Date { newest_first: true },
            "approvals" => Method::Approvals,
            "ratio" => Method::Ratio { prior_approvals: 1.0, prior_total: 2.0 },
            "active" => Method::Active { window: 3 * 86_400 },
            "cost" => Method::Cost { highest_first: true },
            "comments" => Method::Comments,
            "random" => Method::Random { policy: RandomPolicy::PerView },
            "seqpav" => Method::SeqPav,
            "seqphragmen" => Method::SeqPhragmen,
            "coverage" => Method::Coverage { reset_on_saturation: true },
            "integrated" => Method::Integrated(IntegratedConfig::default()),
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    #[serde(default)]
    pub tiebreak: TieBreak,
}

impl MethodSpec {
    pub fn new(method: Method, tiebreak: TieBreak) -> Self {
        Self { method, tiebreak }
    }

    /// Produces the list and stamps it with the context it was made under.
    pub fn rank(&self, input: &RankInput<'_>, ctx: &SortContext) -> Result<RankedList> {
        let tb = self.tiebreak;
        let RankInput { proposals, profile, events, inspections } = *input;
        let list = match &self.method {
            Method::Date { newest_first } => sort_by_date(proposals, *newest_first, tb),
            Method::Approvals => sort_by_approvals(profile, proposals, tb),
            Method::Ratio { prior_approvals, prior_total } => {
                let a = Exact::from_real(*prior_approvals).ok_or(Error::InvalidPrior)?;
                let t = Exact::from_real(*prior_total).ok_or(Error::InvalidPrior)?;
                sort_by_ratio(profile, proposals, a, t, tb)?
            }
            Method::Active { window } => sort_most_active(events, proposals, *window, ctx.now, tb)?,
            Method::Cost { highest_first } => sort_by_cost(proposals, *highest_first, tb),
            Method::Comments => sort_by_comments(proposals, tb),
            Method::Random { policy } => random_order(proposals, *policy, ctx)?,
            Method::SeqPav => rank_seq_pav(profile, proposals, tb),
            Method::SeqPhragmen => rank_seq_phragmen(profile, proposals, tb),
            Method::Coverage { reset_on_saturation } => {
                rank_greedy_coverage(profile, proposals, tb, *reset_on_saturation)
            }
            Method::Integrated(cfg) => integrated_rank(profile, proposals, inspections, cfg, tb)?,
        };
        Ok(list.with_context(ctx))
    }
}
