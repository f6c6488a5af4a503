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

//! Built-in datasets: the three-group example profile and a synthetic
//! large-profile generator for throughput checks.

use rand::seq::index::sample;
use rand::Rng;

use super::{pid, uid, ApprovalProfile, EvaluationEvent, ProfileBuilder, Proposal};
use crate::rng;

/// `(label, group size)` for the three disjoint groups of the 100-user example.
/// Each group approves exactly the ten proposals carrying its label.
pub const S100_GROUPS: [(&str, usize); 3] = [("x", 45), ("y", 35), ("z", 20)];

const S100_POOL: usize = 10;

fn s100_proposals() -> Vec<Proposal> {
    S100_GROUPS
        .iter()
        .flat_map(|(label, _)| {
            (1..=S100_POOL).map(move |i| {
                let id = format!("{label}{i:02}");
                Proposal::new(pid(&id), uid(&format!("author-{id}")), 0)
            })
        })
        .collect()
}

/// One approval event per group member per group proposal, users `u001..u100`
/// assigned to groups in order.
pub fn s100_events() -> Vec<EvaluationEvent> {
    let mut events = Vec::new();
    let mut next_user = 1;
    for (label, size) in S100_GROUPS {
        for u in next_user..next_user + size {
            for i in 1..=S100_POOL {
                events.push(EvaluationEvent::approve(uid(&format!("u{u:03}")), pid(&format!("{label}{i:02}")), 0));
            }
        }
        next_user += size;
    }
    events
}

/// 30 proposals `x01..z10` and 100 users in disjoint groups of 45, 35 and 20.
pub fn scenario_s100() -> (Vec<Proposal>, ApprovalProfile) {
    let proposals = s100_proposals();
    let profile = super::build_profile(&s100_events(), &proposals).expect("fixture is consistent");
    (proposals, profile)
}

/// Uniformly random instance with exactly `n_approvals` distinct
/// `(user, proposal)` approvals. Ids are zero-padded so index order equals id order.
pub fn synthetic_instance(
    n_proposals: usize,
    n_users: usize,
    n_approvals: usize,
    seed: u64,
) -> (Vec<Proposal>, ApprovalProfile) {
    assert!(n_approvals <= n_proposals * n_users, "more approvals than pairs");
    let mut rng = rng::stream("synthetic", seed, b"");
    let pw = n_proposals.to_string().len();
    let uw = n_users.to_string().len();
    let proposals: Vec<Proposal> = (0..n_proposals)
        .map(|i| {
            let ts = rng.gen_range(0..1_000_000);
            Proposal::new(pid(&format!("p{i:0pw$}")), uid(&format!("a{:0uw$}", i % n_users)), ts)
        })
        .collect();
    let mut builder = ProfileBuilder::new(proposals.iter().map(|p| p.id.clone()));
    for u in 0..n_users {
        builder.add_user(uid(&format!("u{u:0uw$}")));
    }
    for flat in sample(&mut rng, n_proposals * n_users, n_approvals) {
        let (p, u) = (flat / n_users, flat % n_users);
        builder.approve(uid(&format!("u{u:0uw$}")), proposals[p].id.clone()).expect("generated proposal");
    }
    (proposals, builder.build())
}
