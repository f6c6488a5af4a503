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

//! Domain types: proposals, evaluation events, approval snapshots, inspection
//! counts and ranked lists.

mod fixtures;
mod profile;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fixtures::{s100_events, scenario_s100, synthetic_instance, S100_GROUPS};
pub use profile::{build_profile, build_profile_with_users, ApprovalProfile, ProfileBuilder};

/// Epoch seconds, UTC.
pub type Timestamp = i64;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self> {
                let id = id.into();
                if id.is_empty() {
                    return Err(Error::EmptyId);
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;

            fn try_from(id: String) -> Result<Self> {
                Self::new(id)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = Error;

            fn try_from(id: &str) -> Result<Self> {
                Self::new(id)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Proposal identifier. Ordering is byte-lexicographic and doubles as the
    /// default tie-break order.
    ProposalId
);
string_id!(
    /// User identifier, ordered byte-lexicographically.
    UserId
);

/// A proposal: content (title, body, tags, cost) plus metadata (author,
/// submission time, comment count).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub id: ProposalId,
    pub title: String,
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub tags: BTreeSet<String>,
    #[serde(default)]
    pub cost: Option<f64>,
    pub author: UserId,
    pub submitted_at: Timestamp,
    #[serde(default)]
    pub comment_count: u64,
}

impl Proposal {
    pub fn new(id: ProposalId, author: UserId, submitted_at: Timestamp) -> Self {
        Self {
            title: id.as_str().to_owned(),
            id,
            body: String::new(),
            tags: BTreeSet::new(),
            cost: None,
            author,
            submitted_at,
            comment_count: 0,
        }
    }

    pub fn with_tags<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tags = tags.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_cost(mut self, cost: f64) -> Result<Self> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(Error::InvalidCost(cost, self.id.to_string()));
        }
        self.cost = Some(cost);
        Ok(self)
    }

    pub fn with_comments(mut self, count: u64) -> Self {
        self.comment_count = count;
        self
    }

    /// Lexicographically smallest tag, used for diversification.
    pub fn primary_tag(&self) -> Option<&str> {
        self.tags.iter().next().map(String::as_str)
    }

    pub fn validate(&self) -> Result<()> {
        match self.cost {
            Some(c) if !c.is_finite() || c < 0.0 => Err(Error::InvalidCost(c, self.id.to_string())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Polarity {
    Approve,
    Disapprove,
}

impl TryFrom<i8> for Polarity {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Polarity::Approve),
            -1 => Ok(Polarity::Disapprove),
            other => Err(Error::MalformedPolarity(other.to_string())),
        }
    }
}

impl From<Polarity> for i8 {
    fn from(p: Polarity) -> i8 {
        match p {
            Polarity::Approve => 1,
            Polarity::Disapprove => -1,
        }
    }
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" => Ok(Polarity::Approve),
            "-1" => Ok(Polarity::Disapprove),
            other => Err(Error::MalformedPolarity(other.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationEvent {
    pub user: UserId,
    pub proposal: ProposalId,
    pub polarity: Polarity,
    pub at: Timestamp,
}

impl EvaluationEvent {
    pub fn approve(user: UserId, proposal: ProposalId, at: Timestamp) -> Self {
        Self { user, proposal, polarity: Polarity::Approve, at }
    }

    pub fn disapprove(user: UserId, proposal: ProposalId, at: Timestamp) -> Self {
        Self { user, proposal, polarity: Polarity::Disapprove, at }
    }
}

/// Per-proposal count of list impressions in inspected positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InspectionStats {
    views: BTreeMap<ProposalId, u64>,
}

impl InspectionStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Views for `id`; proposals never recorded count as 0.
    pub fn views(&self, id: &ProposalId) -> u64 {
        self.views.get(id).copied().unwrap_or(0)
    }

    pub fn set(&mut self, id: ProposalId, views: u64) {
        self.views.insert(id, views);
    }

    pub fn record(&mut self, id: &ProposalId, n: u64) {
        match self.views.get_mut(id) {
            Some(v) => *v += n,
            None => {
                self.views.insert(id.clone(), n);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProposalId, u64)> {
        self.views.iter().map(|(k, v)| (k, *v))
    }

    pub fn total(&self) -> u64 {
        self.views.values().sum()
    }
}

impl FromIterator<(ProposalId, u64)> for InspectionStats {
    fn from_iter<T: IntoIterator<Item = (ProposalId, u64)>>(iter: T) -> Self {
        let mut stats = Self::new();
        for (id, n) in iter {
            stats.record(&id, n);
        }
        stats
    }
}

/// What the list is for. Only online deliberation drives algorithmic
/// choices; the others are carried as metadata.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Purpose {
    #[default]
    OnlineDeliberation,
    OfflineDeliberation,
    Voting,
}

/// Inputs that vary between views of the list rather than between datasets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortContext {
    pub now: Timestamp,
    /// Global seed, or the per-view nonce for per-view randomization.
    pub seed: u64,
    pub session_key: Option<String>,
    pub viewer: Option<UserId>,
    pub purpose: Purpose,
}

impl SortContext {
    pub fn new(now: Timestamp, seed: u64) -> Self {
        Self { now, seed, session_key: None, viewer: None, purpose: Purpose::default() }
    }

    pub fn with_session(mut self, key: impl Into<String>) -> Self {
        self.session_key = Some(key.into());
        self
    }

    pub fn with_viewer(mut self, viewer: UserId) -> Self {
        self.viewer = Some(viewer);
        self
    }

    /// Calendar date (UTC) of `now`.
    pub fn day_key(&self) -> NaiveDate {
        DateTime::from_timestamp(self.now, 0).map(|dt| dt.date_naive()).unwrap_or(NaiveDate::MIN)
    }

    pub fn summary(&self) -> ContextSummary {
        ContextSummary {
            now: self.now,
            seed: self.seed,
            session_key: self.session_key.clone(),
            viewer: self.viewer.clone(),
            day_key: self.day_key().format("%Y-%m-%d").to_string(),
            purpose: self.purpose,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSummary {
    pub now: Timestamp,
    pub seed: u64,
    pub session_key: Option<String>,
    pub viewer: Option<UserId>,
    pub day_key: String,
    pub purpose: Purpose,
}

/// A permutation of proposal ids together with how it was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedList {
    pub order: Vec<ProposalId>,
    pub method: String,
    pub seed: Option<u64>,
    pub context: Option<ContextSummary>,
    pub produced_at: Option<Timestamp>,
    /// Set when only a shortlist prefix was kept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_to: Option<usize>,
}

impl RankedList {
    pub fn new(order: Vec<ProposalId>, method: impl Into<String>) -> Self {
        Self { order, method: method.into(), seed: None, context: None, produced_at: None, truncated_to: None }
    }

    /// Stamps provenance from the sort context.
    pub fn with_context(mut self, ctx: &SortContext) -> Self {
        self.seed = Some(ctx.seed);
        self.produced_at = Some(ctx.now);
        self.context = Some(ctx.summary());
        self
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based position of `id`.
    pub fn position(&self, id: &ProposalId) -> Option<usize> {
        self.order.iter().position(|p| p == id).map(|i| i + 1)
    }

    /// Keeps only the first `k` entries, e.g. for a voting shortlist.
    pub fn truncate(&mut self, k: usize) {
        if k < self.order.len() {
            self.order.truncate(k);
            self.truncated_to = Some(k);
        }
    }

    /// Whether `order` is a permutation of `proposals`' ids.
    pub fn is_permutation_of(&self, proposals: &[Proposal]) -> bool {
        let mut a: Vec<&ProposalId> = self.order.iter().collect();
        let mut b: Vec<&ProposalId> = proposals.iter().map(|p| &p.id).collect();
        a.sort();
        b.sort();
        a == b
    }
}

/// Convenience for tests and fixtures: panics on empty ids.
pub fn pid(s: &str) -> ProposalId {
    ProposalId::new(s).expect("non-empty proposal id")
}

pub fn uid(s: &str) -> UserId {
    UserId::new(s).expect("non-empty user id")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_reject_empty() {
        assert!(matches!(ProposalId::new(""), Err(Error::EmptyId)));
        assert!(serde_json::from_str::<UserId>("\"\"").is_err());
    }

    #[test]
    fn id_order_is_bytewise() {
        assert!(pid("Z") < pid("a"));
        assert!(pid("x01") < pid("x10"));
        assert!(pid("x10") < pid("y01"));
    }

    #[test]
    fn polarity_parsing() {
        assert_eq!("+1".parse::<Polarity>().unwrap(), Polarity::Approve);
        assert_eq!("1".parse::<Polarity>().unwrap(), Polarity::Approve);
        assert_eq!("-1".parse::<Polarity>().unwrap(), Polarity::Disapprove);
        assert!(matches!("0".parse::<Polarity>(), Err(Error::MalformedPolarity(_))));
        assert!(Polarity::try_from(2i8).is_err());
    }

    #[test]
    fn negative_cost_rejected() {
        let p = Proposal::new(pid("a"), uid("u"), 0);
        assert!(p.clone().with_cost(-1.0).is_err());
        assert!(p.clone().with_cost(f64::NAN).is_err());
        assert_eq!(p.with_cost(3.0).unwrap().cost, Some(3.0));
    }

    #[test]
    fn tags_are_deduplicated_and_primary_is_smallest() {
        let p = Proposal::new(pid("a"), uid("u"), 0).with_tags(["parks", "bikes", "parks"]);
        assert_eq!(p.tags.len(), 2);
        assert_eq!(p.primary_tag(), Some("bikes"));
    }

    #[test]
    fn day_key_is_utc_date() {
        let ctx = SortContext::new(86_400 * 3 + 5, 0);
        assert_eq!(ctx.day_key().to_string(), "1970-01-04");
        let late = SortContext::new(86_400 * 4 - 1, 0);
        assert_eq!(late.day_key(), ctx.day_key());
    }

    #[test]
    fn ranked_list_json_round_trip() {
        let ctx = SortContext::new(1_700_000_000, 42).with_session("s1");
        let list = RankedList::new(vec![pid("b"), pid("a")], "approvals").with_context(&ctx);
        let json = serde_json::to_string(&list).unwrap();
        let back: RankedList = serde_json::from_str(&json).unwrap();
        assert_eq!(back, list);
        assert_eq!(back.context.unwrap().day_key, "2023-11-14");
    }

    #[test]
    fn truncation_marks_shortlist() {
        let mut list = RankedList::new(vec![pid("a"), pid("b"), pid("c")], "m");
        list.truncate(5);
        assert_eq!(list.truncated_to, None);
        list.truncate(2);
        assert_eq!(list.order.len(), 2);
        assert_eq!(list.truncated_to, Some(2));
    }
}
