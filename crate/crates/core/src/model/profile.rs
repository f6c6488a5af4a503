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

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::{Serialize, Serializer};

use super::{EvaluationEvent, Polarity, Proposal, ProposalId, UserId};
use crate::error::{Error, Result};

/// Immutable snapshot of who approves and disapproves which proposal.
///
/// Proposals and users are stored sorted by id; their positions in those
/// sorted vectors are the dense indices returned by the `*_indices` accessors.
/// Approver lists and per-user ballots are exact transposes of each other.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApprovalProfile {
    proposals: Vec<ProposalId>,
    users: Vec<UserId>,
    approvers: Vec<Vec<u32>>,
    disapprovers: Vec<Vec<u32>>,
    approved_by_user: Vec<Vec<u32>>,
}

impl ApprovalProfile {
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_proposals(&self) -> usize {
        self.proposals.len()
    }

    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn proposal_ids(&self) -> &[ProposalId] {
        &self.proposals
    }

    pub fn proposal_index(&self, id: &ProposalId) -> Option<usize> {
        self.proposals.binary_search(id).ok()
    }

    pub fn user_index(&self, id: &UserId) -> Option<usize> {
        self.users.binary_search(id).ok()
    }

    /// User indices approving `id`; empty for proposals outside the profile.
    pub fn approver_indices(&self, id: &ProposalId) -> &[u32] {
        self.proposal_index(id).map_or(&[], |i| &self.approvers[i])
    }

    pub fn disapprover_indices(&self, id: &ProposalId) -> &[u32] {
        self.proposal_index(id).map_or(&[], |i| &self.disapprovers[i])
    }

    /// Proposal indices approved by the user at `user` index.
    pub fn approved_indices(&self, user: usize) -> &[u32] {
        &self.approved_by_user[user]
    }

    pub fn approvers<'a>(&'a self, id: &ProposalId) -> impl Iterator<Item = &'a UserId> + 'a {
        let users = &self.users;
        self.approver_indices(id).iter().map(move |&u| &users[u as usize])
    }

    pub fn disapprovers<'a>(&'a self, id: &ProposalId) -> impl Iterator<Item = &'a UserId> + 'a {
        let users = &self.users;
        self.disapprover_indices(id).iter().map(move |&u| &users[u as usize])
    }

    pub fn approved_by<'a>(&'a self, user: &UserId) -> impl Iterator<Item = &'a ProposalId> + 'a {
        let ids = self.user_index(user).map_or(&[][..], |u| &self.approved_by_user[u][..]);
        ids.iter().map(move |&p| &self.proposals[p as usize])
    }

    pub fn approver_count(&self, id: &ProposalId) -> usize {
        self.approver_indices(id).len()
    }

    pub fn disapprover_count(&self, id: &ProposalId) -> usize {
        self.disapprover_indices(id).len()
    }

    pub fn total_approvals(&self) -> usize {
        self.approvers.iter().map(Vec::len).sum()
    }

    /// Number of users approving at least one proposal.
    pub fn active_approvers(&self) -> usize {
        self.approved_by_user.iter().filter(|a| !a.is_empty()).count()
    }

    /// Full-scan check that the approver lists and the per-user index agree.
    pub fn is_transpose_consistent(&self) -> bool {
        let forward: BTreeSet<(u32, u32)> =
            self.approvers.iter().enumerate().flat_map(|(p, us)| us.iter().map(move |&u| (u, p as u32))).collect();
        let backward: BTreeSet<(u32, u32)> = self
            .approved_by_user
            .iter()
            .enumerate()
            .flat_map(|(u, ps)| ps.iter().map(move |&p| (u as u32, p)))
            .collect();
        let no_double_vote = self.approvers.iter().zip(&self.disapprovers).all(|(a, d)| {
            let a: BTreeSet<_> = a.iter().collect();
            d.iter().all(|u| !a.contains(u))
        });
        forward == backward && no_double_vote
    }
}

impl Serialize for ApprovalProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Repr<'a> {
            users: &'a [UserId],
            approvers: BTreeMap<&'a ProposalId, Vec<&'a UserId>>,
            disapprovers: BTreeMap<&'a ProposalId, Vec<&'a UserId>>,
        }
        fn side<'a>(
            proposals: &'a [ProposalId],
            users: &'a [UserId],
            lists: &'a [Vec<u32>],
        ) -> BTreeMap<&'a ProposalId, Vec<&'a UserId>> {
            proposals.iter().zip(lists).map(|(p, us)| (p, us.iter().map(|&u| &users[u as usize]).collect())).collect()
        }
        Repr {
            users: &self.users,
            approvers: side(&self.proposals, &self.users, &self.approvers),
            disapprovers: side(&self.proposals, &self.users, &self.disapprovers),
        }
        .serialize(serializer)
    }
}

/// Incremental construction of an [`ApprovalProfile`]; later votes on the
/// same `(user, proposal)` pair overwrite earlier ones.
#[derive(Clone, Debug, Default)]
pub struct ProfileBuilder {
    proposals: BTreeSet<ProposalId>,
    users: BTreeSet<UserId>,
    votes: BTreeMap<(ProposalId, UserId), Polarity>,
}

impl ProfileBuilder {
    pub fn new<I: IntoIterator<Item = ProposalId>>(proposals: I) -> Self {
        Self { proposals: proposals.into_iter().collect(), ..Self::default() }
    }

    /// Registers a user even if they never vote.
    pub fn add_user(&mut self, user: UserId) -> &mut Self {
        self.users.insert(user);
        self
    }

    pub fn vote(&mut self, user: UserId, proposal: ProposalId, polarity: Polarity) -> Result<&mut Self> {
        if !self.proposals.contains(&proposal) {
            return Err(Error::UnknownProposal(proposal.to_string()));
        }
        self.users.insert(user.clone());
        self.votes.insert((proposal, user), polarity);
        Ok(self)
    }

    pub fn approve(&mut self, user: UserId, proposal: ProposalId) -> Result<&mut Self> {
        self.vote(user, proposal, Polarity::Approve)
    }

    pub fn build(&self) -> ApprovalProfile {
        let proposals: Vec<ProposalId> = self.proposals.iter().cloned().collect();
        let users: Vec<UserId> = self.users.iter().cloned().collect();
        let mut approvers = vec![Vec::new(); proposals.len()];
        let mut disapprovers = vec![Vec::new(); proposals.len()];
        let mut approved_by_user = vec![Vec::new(); users.len()];
        // votes iterate in (proposal, user) order, so every list comes out sorted
        for ((p, u), polarity) in &self.votes {
            let pi = proposals.binary_search(p).expect("vote on registered proposal");
            let ui = users.binary_search(u).expect("voter registered");
            match polarity {
                Polarity::Approve => {
                    approvers[pi].push(ui as u32);
                    approved_by_user[ui].push(pi as u32);
                }
                Polarity::Disapprove => disapprovers[pi].push(ui as u32),
            }
        }
        ApprovalProfile { proposals, users, approvers, disapprovers, approved_by_user }
    }
}

/// Snapshot of an event log: the latest event per `(user, proposal)` wins,
/// equal timestamps resolved by position in `events`.
pub fn build_profile(events: &[EvaluationEvent], proposals: &[Proposal]) -> Result<ApprovalProfile> {
    build_profile_with_users(events, proposals, std::iter::empty())
}

/// As [`build_profile`], additionally registering `users` who may have cast
/// no votes (they still count in coverage denominators).
pub fn build_profile_with_users<I>(
    events: &[EvaluationEvent],
    proposals: &[Proposal],
    users: I,
) -> Result<ApprovalProfile>
where
    I: IntoIterator<Item = UserId>,
{
    let mut builder = ProfileBuilder::new(proposals.iter().map(|p| p.id.clone()));
    for u in users {
        builder.add_user(u);
    }
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by_key(|&i| events[i].at); // stable: sequence order breaks ties
    for i in order {
        let e = &events[i];
        builder.vote(e.user.clone(), e.proposal.clone(), e.polarity)?;
    }
    Ok(builder.build())
}
