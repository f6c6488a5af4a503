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

#![allow(dead_code)]

use delisort_core::model::{
    build_profile, pid, uid, ApprovalProfile, EvaluationEvent, InspectionStats, Polarity, Proposal, ProposalId,
};
use delisort_core::sorter::RankInput;
use proptest::prelude::*;

/// A random platform state with everything a sorter may read.
#[derive(Clone, Debug)]
pub struct Instance {
    pub proposals: Vec<Proposal>,
    pub events: Vec<EvaluationEvent>,
    pub profile: ApprovalProfile,
    pub views: InspectionStats,
}

impl Instance {
    pub fn input(&self) -> RankInput<'_> {
        RankInput { proposals: &self.proposals, profile: &self.profile, events: &self.events, inspections: &self.views }
    }

    pub fn proposal(&self, id: &ProposalId) -> &Proposal {
        self.proposals.iter().find(|p| &p.id == id).expect("listed id")
    }
}

#[derive(Clone, Debug)]
struct Attrs {
    ts: i64,
    cost: Option<u32>,
    comments: u64,
    tag: u8,
    author: u8,
    views: u64,
}

fn attrs() -> impl Strategy<Value = Attrs> {
    (0i64..6, proptest::option::of(0u32..5), 0u64..5, 0u8..3, 0u8..4, 0u64..25)
        .prop_map(|(ts, cost, comments, tag, author, views)| Attrs { ts, cost, comments, tag, author, views })
}

/// Builds an instance from per-proposal attributes and a vote matrix
/// (`votes[u][p]` in {-1, 0, 1}).
fn assemble(attrs: Vec<Attrs>, votes: Vec<Vec<i8>>) -> Instance {
    let proposals: Vec<Proposal> = attrs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = Proposal::new(pid(&format!("p{i:02}")), uid(&format!("author{}", a.author)), a.ts * 3_600)
                .with_tags([format!("t{}", a.tag)])
                .with_comments(a.comments);
            match a.cost {
                Some(c) => p.with_cost(c as f64 * 100.0).expect("non-negative"),
                None => p,
            }
        })
        .collect();
    let mut events = Vec::new();
    for (u, row) in votes.iter().enumerate() {
        for (p, &v) in row.iter().enumerate() {
            let polarity = match v {
                1 => Polarity::Approve,
                -1 => Polarity::Disapprove,
                _ => continue,
            };
            let at = ((u * 7 + p * 13) % 6) as i64 * 3_600;
            events.push(EvaluationEvent {
                user: uid(&format!("u{u:02}")),
                proposal: proposals[p].id.clone(),
                polarity,
                at,
            });
        }
    }
    let profile = build_profile(&events, &proposals).expect("consistent instance");
    let views = proposals.iter().zip(&attrs).map(|(p, a)| (p.id.clone(), a.views)).collect();
    Instance { proposals, events, profile, views }
}

/// Instances with up to `max_props` proposals and `max_users` voters.
pub fn arb_instance(max_props: usize, max_users: usize) -> impl Strategy<Value = Instance> {
    (1..=max_props, 0..=max_users).prop_flat_map(|(n, m)| {
        let vote = prop_oneof![3 => Just(0i8), 2 => Just(1i8), 1 => Just(-1i8)];
        (proptest::collection::vec(attrs(), n), proptest::collection::vec(proptest::collection::vec(vote, n), m))
            .prop_map(|(a, v)| assemble(a, v))
    })
}

/// Approval-only profile from `ballots[u]` = indices of approved proposals.
pub fn approval_instance(n_props: usize, ballots: &[Vec<usize>]) -> (Vec<Proposal>, ApprovalProfile) {
    let proposals: Vec<Proposal> = (0..n_props).map(|i| Proposal::new(pid(&format!("p{i:02}")), uid("a"), 0)).collect();
    let events: Vec<EvaluationEvent> = ballots
        .iter()
        .enumerate()
        .flat_map(|(u, b)| {
            let proposals = &proposals;
            b.iter().map(move |&p| EvaluationEvent::approve(uid(&format!("u{u:02}")), proposals[p].id.clone(), 0))
        })
        .collect();
    let profile = build_profile(&events, &proposals).expect("consistent instance");
    (proposals, profile)
}

/// Random approval ballots over `1..=max_props` proposals and `1..=max_users` users.
pub fn arb_ballots(max_props: usize, max_users: usize) -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1..=max_props, 1..=max_users).prop_flat_map(|(n, m)| {
        let ballot = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n);
        (Just(n), proptest::collection::vec(ballot, m))
    })
}
