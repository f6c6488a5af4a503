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

//! Exposure-aware ranking: approvals are read against how often a proposal
//! was actually inspected, under-inspected proposals get a fixed share of
//! slots, and the ranked stream is diversified by tag and author.

use std::collections::{BTreeMap, HashMap, VecDeque};

use log::warn;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::baseline::TieBreak;
use crate::error::{Error, Result};
use crate::holistic::{rank_greedy_coverage, rank_seq_pav, rank_seq_phragmen, HolisticRule};
use crate::model::{ApprovalProfile, InspectionStats, Proposal, ProposalId, RankedList};

/// Share of list slots reserved for under-inspected proposals.
pub const EXPLORATION_SHARE: f64 = 0.25;

/// What ranks the sufficiently inspected proposals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratedBase {
    /// Wilson lower bound of approvals per view.
    #[default]
    ApprovalCount,
    SeqPav,
    SeqPhragmen,
    GreedyCoverage,
}

impl IntegratedBase {
    fn rule(self) -> Option<HolisticRule> {
        match self {
            IntegratedBase::ApprovalCount => None,
            IntegratedBase::SeqPav => Some(HolisticRule::SeqPav),
            IntegratedBase::SeqPhragmen => Some(HolisticRule::SeqPhragmen),
            IntegratedBase::GreedyCoverage => Some(HolisticRule::GreedyCoverage),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratedConfig {
    /// Views needed before approvals are trusted.
    pub min_views: u64,
    /// Confidence width of the Wilson bound.
    pub z: f64,
    pub base: IntegratedBase,
    /// Diversification window, in positions.
    pub tag_window: usize,
    /// Max proposals by one author inside any window.
    pub author_cap: usize,
}

impl Default for IntegratedConfig {
    fn default() -> Self {
        Self { min_views: 10, z: 1.96, base: IntegratedBase::ApprovalCount, tag_window: 3, author_cap: 1 }
    }
}

impl IntegratedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(Error::InvalidZ);
        }
        if self.tag_window == 0 {
            return Err(Error::InvalidConfig("tag_window must be at least 1".into()));
        }
        if self.author_cap == 0 {
            return Err(Error::InvalidConfig("author_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Wilson score lower bound for `approvals` successes in `views` trials.
///
/// Returns 0 without views. If `approvals > views` the view count is raised
/// to match, since every approval implies at least one view.
pub fn exposure_adjusted_score<F: Float>(approvals: u64, views: u64, z: F) -> Result<F> {
    if !(z.is_finite() && z > F::zero()) {
        return Err(Error::InvalidZ);
    }
    let views = if approvals > views {
        warn!("{approvals} approvals recorded against {views} views; clamping views up");
        approvals
    } else {
        views
    };
    if views == 0 {
        return Ok(F::zero());
    }
    let cast = |x: u64| F::from(x).expect("count fits in float");
    let n = cast(views);
    let p = cast(approvals) / n;
    let two = F::one() + F::one();
    let four = two + two;
    let z2 = z * z;
    let centre = p + z2 / (two * n);
    let spread = z * (p * (F::one() - p) / n + z2 / (four * n * n)).sqrt();
    let bound = (centre - spread) / (F::one() + z2 / n);
    Ok(bound.max(F::zero()).min(F::one()))
}

/// Re-orders `ranked` so that no primary tag repeats, and no author exceeds
/// `author_cap`, within any `tag_window` consecutive positions. When nothing
/// fits, the tag rule is dropped first, then the author rule. Feasible
/// candidates keep their input order.
pub fn diversify(
    ranked: &RankedList,
    proposals: &[Proposal],
    tag_window: usize,
    author_cap: usize,
) -> Result<RankedList> {
    if tag_window == 0 || author_cap == 0 {
        return Err(Error::InvalidConfig("tag_window and author_cap must be at least 1".into()));
    }
    let by_id: HashMap<&ProposalId, &Proposal> = proposals.iter().map(|p| (&p.id, p)).collect();
    let lookup = |id: &ProposalId| by_id.get(id).copied().ok_or_else(|| Error::UnknownProposal(id.to_string()));
    let mut remaining: Vec<&Proposal> = ranked.order.iter().map(lookup).collect::<Result<_>>()?;
    let mut recent: VecDeque<&Proposal> = VecDeque::with_capacity(tag_window);
    let mut tags: HashMap<&str, usize> = HashMap::new();
    let mut authors: HashMap<&str, usize> = HashMap::new();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let tag_ok = |p: &Proposal| p.primary_tag().is_none_or(|t| !tags.contains_key(t));
        let author_ok = |p: &Proposal| authors.get(p.author.as_str()).copied().unwrap_or(0) < author_cap;
        let pick = remaining
            .iter()
            .position(|p| tag_ok(p) && author_ok(p))
            .or_else(|| remaining.iter().position(|p| author_ok(p)))
            .unwrap_or(0);
        let chosen = remaining.remove(pick);
        order.push(chosen.id.clone());
        if tag_window > 1 {
            if recent.len() == tag_window - 1 {
                let old = recent.pop_front().expect("window is full");
                decrement(&mut authors, old.author.as_str());
                if let Some(t) = old.primary_tag() {
                    decrement(&mut tags, t);
                }
            }
            *authors.entry(chosen.author.as_str()).or_default() += 1;
            if let Some(t) = chosen.primary_tag() {
                *tags.entry(t).or_default() += 1;
            }
            recent.push_back(chosen);
        }
    }
    Ok(RankedList::new(order, ranked.method.clone()))
}

fn decrement<'a>(counts: &mut HashMap<&'a str, usize>, key: &'a str) {
    if let Some(c) = counts.get_mut(key) {
        *c -= 1;
        if *c == 0 {
            counts.remove(key);
        }
    }
}

/// Whether a proposal still lacks the views needed to trust its approvals.
pub fn is_under_inspected(inspections: &InspectionStats, id: &ProposalId, min_views: u64) -> bool {
    inspections.views(id) < min_views
}

/// Gate, rank, diversify, then interleave the under-inspected proposals at
/// every `ceil(1 / EXPLORATION_SHARE)`-th position, fewest views first.
pub fn integrated_rank(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    inspections: &InspectionStats,
    cfg: &IntegratedConfig,
    tiebreak: TieBreak,
) -> Result<RankedList> {
    cfg.validate()?;
    let (inspected, mut under): (Vec<Proposal>, Vec<Proposal>) =
        proposals.iter().cloned().partition(|p| !is_under_inspected(inspections, &p.id, cfg.min_views));

    let ranked = match cfg.base.rule() {
        None => {
            let scores: BTreeMap<&ProposalId, f64> = inspected
                .iter()
                .map(|p| {
                    let a = profile.approver_count(&p.id) as u64;
                    exposure_adjusted_score(a, inspections.views(&p.id), cfg.z).map(|s| (&p.id, s))
                })
                .collect::<Result<_>>()?;
            let mut idx: Vec<&Proposal> = inspected.iter().collect();
            idx.sort_by(|a, b| scores[&b.id].total_cmp(&scores[&a.id]).then_with(|| tiebreak.compare(a, b)));
            RankedList::new(idx.into_iter().map(|p| p.id.clone()).collect(), "integrated")
        }
        Some(HolisticRule::SeqPav) => rank_seq_pav(profile, &inspected, tiebreak),
        Some(HolisticRule::SeqPhragmen) => rank_seq_phragmen(profile, &inspected, tiebreak),
        Some(HolisticRule::GreedyCoverage) => rank_greedy_coverage(profile, &inspected, tiebreak, true),
    };
    let ranked = diversify(&ranked, &inspected, cfg.tag_window, cfg.author_cap)?;

    under.sort_by(|a, b| inspections.views(&a.id).cmp(&inspections.views(&b.id)).then_with(|| tiebreak.compare(a, b)));
    let stride = (1.0 / EXPLORATION_SHARE).ceil() as usize;
    let mut main = ranked.order.into_iter();
    let mut explore = under.into_iter().map(|p| p.id);
    let mut order = Vec::with_capacity(proposals.len());
    for pos in 1..=proposals.len() {
        let next = if pos % stride == 0 {
            explore.next().or_else(|| main.next())
        } else {
            main.next().or_else(|| explore.next())
        };
        order.extend(next);
    }
    Ok(RankedList::new(order, "integrated"))
}
