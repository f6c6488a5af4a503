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

//! Single-parameter sorting methods found on deployed platforms: by date,
//! cost, comments, approval count, smoothed approval ratio, recent activity,
//! and three randomization contracts.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApprovalProfile, EvaluationEvent, Polarity, Proposal, RankedList, SortContext, Timestamp};
use crate::rng;
use crate::scalar::Scalar;

/// Order among proposals that a sorter's primary key cannot separate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Byte-lexicographic proposal id.
    #[default]
    ById,
    /// Earlier submission first, then id.
    OldestFirst,
    /// Later submission first, then id.
    NewestFirst,
}

impl TieBreak {
    pub fn compare(self, a: &Proposal, b: &Proposal) -> Ordering {
        match self {
            TieBreak::ById => a.id.cmp(&b.id),
            TieBreak::OldestFirst => a.submitted_at.cmp(&b.submitted_at).then_with(|| a.id.cmp(&b.id)),
            TieBreak::NewestFirst => b.submitted_at.cmp(&a.submitted_at).then_with(|| a.id.cmp(&b.id)),
        }
    }

    /// Position of every input proposal in tie-break order (0 = preferred).
    pub(crate) fn ranks(self, proposals: &[Proposal]) -> Vec<u32> {
        let mut idx: Vec<usize> = (0..proposals.len()).collect();
        idx.sort_by(|&a, &b| self.compare(&proposals[a], &proposals[b]));
        let mut ranks = vec![0u32; proposals.len()];
        for (r, i) in idx.into_iter().enumerate() {
            ranks[i] = r as u32;
        }
        ranks
    }
}

/// How a random order is keyed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomPolicy {
    /// New order on every view; the caller passes a fresh nonce as the context seed.
    PerView,
    /// Stable for a session key, like an order kept in the browser.
    PerSession,
    /// Shared by everyone, changing with the UTC calendar day.
    #[serde(rename = "daily")]
    DailyShared,
}

/// Stable sort by `cmp`, with `tiebreak` deciding between equal keys.
fn sort_with<F>(proposals: &[Proposal], tiebreak: TieBreak, method: &str, cmp: F) -> RankedList
where
    F: Fn(usize, usize) -> Ordering,
{
    let mut idx: Vec<usize> = (0..proposals.len()).collect();
    idx.sort_by(|&a, &b| cmp(a, b).then_with(|| tiebreak.compare(&proposals[a], &proposals[b])));
    RankedList::new(idx.into_iter().map(|i| proposals[i].id.clone()).collect(), method)
}

pub fn sort_by_date(proposals: &[Proposal], newest_first: bool, tiebreak: TieBreak) -> RankedList {
    sort_with(proposals, tiebreak, "date", |a, b| {
        let ord = proposals[a].submitted_at.cmp(&proposals[b].submitted_at);
        if newest_first {
            ord.reverse()
        } else {
            ord
        }
    })
}

/// Most approvals first.
pub fn sort_by_approvals(profile: &ApprovalProfile, proposals: &[Proposal], tiebreak: TieBreak) -> RankedList {
    let counts: Vec<usize> = proposals.iter().map(|p| profile.approver_count(&p.id)).collect();
    sort_with(proposals, tiebreak, "approvals", |a, b| counts[b].cmp(&counts[a]))
}

/// `(approvals + prior_approvals) / (approvals + disapprovals + prior_total)`.
pub fn ratio_score<S: Scalar>(approvals: u64, disapprovals: u64, prior_approvals: &S, prior_total: &S) -> S {
    (S::from_count(approvals) + prior_approvals.clone())
        / (S::from_count(approvals + disapprovals) + prior_total.clone())
}

/// Highest smoothed approval/disapproval ratio first. The pseudo-count prior
/// keeps the score defined for proposals without votes.
pub fn sort_by_ratio<S: Scalar>(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    prior_approvals: S,
    prior_total: S,
    tiebreak: TieBreak,
) -> Result<RankedList> {
    if prior_total <= S::zero() || prior_approvals < S::zero() || prior_approvals > prior_total {
        return Err(Error::InvalidPrior);
    }
    let scores: Vec<S> = proposals
        .iter()
        .map(|p| {
            ratio_score(
                profile.approver_count(&p.id) as u64,
                profile.disapprover_count(&p.id) as u64,
                &prior_approvals,
                &prior_total,
            )
        })
        .collect();
    Ok(sort_with(proposals, tiebreak, "ratio", |a, b| scores[b].total_cmp(&scores[a])))
}

/// Most approval events in the window `(now - window, now]` first.
pub fn sort_most_active(
    events: &[EvaluationEvent],
    proposals: &[Proposal],
    window: i64,
    now: Timestamp,
    tiebreak: TieBreak,
) -> Result<RankedList> {
    if window <= 0 {
        return Err(Error::InvalidWindow(window));
    }
    let start = now.saturating_sub(window);
    let mut ids: Vec<usize> = (0..proposals.len()).collect();
    ids.sort_by(|&a, &b| proposals[a].id.cmp(&proposals[b].id));
    let mut counts = vec![0usize; proposals.len()];
    for e in events {
        if e.polarity != Polarity::Approve || e.at <= start || e.at > now {
            continue;
        }
        if let Ok(k) = ids.binary_search_by(|&i| proposals[i].id.cmp(&e.proposal)) {
            counts[ids[k]] += 1;
        }
    }
    Ok(sort_with(proposals, tiebreak, "active", |a, b| counts[b].cmp(&counts[a])))
}

/// Costed proposals by cost; proposals without a cost go last in either direction.
pub fn sort_by_cost(proposals: &[Proposal], highest_first: bool, tiebreak: TieBreak) -> RankedList {
    sort_with(proposals, tiebreak, "cost", |a, b| match (proposals[a].cost, proposals[b].cost) {
        (Some(x), Some(y)) if highest_first => y.total_cmp(&x),
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    })
}

pub fn sort_by_comments(proposals: &[Proposal], tiebreak: TieBreak) -> RankedList {
    sort_with(proposals, tiebreak, "comments", |a, b| proposals[b].comment_count.cmp(&proposals[a].comment_count))
}

/// Uniform permutation fully determined by a seed derived from the policy key:
/// the context seed for [`RandomPolicy::PerView`], the session key for
/// [`RandomPolicy::PerSession`], the UTC day for [`RandomPolicy::DailyShared`].
pub fn random_order(proposals: &[Proposal], policy: RandomPolicy, ctx: &SortContext) -> Result<RankedList> {
    let seed = match policy {
        RandomPolicy::PerView => rng::derive_seed("random/per-view", ctx.seed, b""),
        RandomPolicy::PerSession => {
            let key = ctx.session_key.as_deref().ok_or(Error::MissingSessionKey)?;
            rng::derive_seed("random/per-session", ctx.seed, key.as_bytes())
        }
        RandomPolicy::DailyShared => {
            let day = ctx.day_key().format("%Y-%m-%d").to_string();
            rng::derive_seed("random/daily", ctx.seed, day.as_bytes())
        }
    };
    let mut order: Vec<_> = proposals.iter().map(|p| p.id.clone()).collect();
    order.sort();
    order.shuffle(&mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed));
    Ok(RankedList::new(order, "random").with_context(ctx))
}
