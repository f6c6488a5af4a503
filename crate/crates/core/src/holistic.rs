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

//! Rules that place a proposal by looking at everything already placed above
//! it: sequential PAV, sequential Phragmén and greedy maximal coverage, plus
//! exhaustive oracles for small instances.
//!
//! All three greedy rules use lazy evaluation. PAV marginals only shrink as
//! the list grows and Phragmén candidate loads only grow, so a stale heap
//! entry is always a valid bound and the first fresh entry on top is the true
//! optimum, tie-break included.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::baseline::TieBreak;
use crate::error::{Error, Result};
use crate::model::{ApprovalProfile, Proposal, ProposalId, RankedList};
use crate::scalar::Scalar;
use crate::Exact;

/// Largest instance [`exact_coverage_prefix`] will enumerate.
pub const MAX_EXACT_PROPOSALS: usize = 20;
pub const MAX_EXACT_K: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolisticRule {
    SeqPav,
    SeqPhragmen,
    /// Layered coverage: the covered set resets once nobody new can be reached.
    GreedyCoverage,
}

impl HolisticRule {
    pub fn name(self) -> &'static str {
        match self {
            HolisticRule::SeqPav => "seqpav",
            HolisticRule::SeqPhragmen => "seqphragmen",
            HolisticRule::GreedyCoverage => "coverage",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HolisticMethod {
    pub rule: HolisticRule,
    #[serde(default)]
    pub tiebreak: TieBreak,
}

impl HolisticMethod {
    pub fn new(rule: HolisticRule, tiebreak: TieBreak) -> Self {
        Self { rule, tiebreak }
    }

    pub fn rank(&self, profile: &ApprovalProfile, proposals: &[Proposal]) -> RankedList {
        match self.rule {
            HolisticRule::SeqPav => rank_seq_pav(profile, proposals, self.tiebreak),
            HolisticRule::SeqPhragmen => rank_seq_phragmen(profile, proposals, self.tiebreak),
            HolisticRule::GreedyCoverage => rank_greedy_coverage(profile, proposals, self.tiebreak, true),
        }
    }
}

/// One greedy step: the proposal placed and the score that won it.
#[derive(Clone, Debug, PartialEq)]
pub struct Pick<S> {
    pub proposal: ProposalId,
    pub score: S,
}

struct Candidates<'a> {
    approvers: Vec<&'a [u32]>,
    ties: Vec<u32>,
}

impl<'a> Candidates<'a> {
    fn new(profile: &'a ApprovalProfile, proposals: &[Proposal], tiebreak: TieBreak) -> Self {
        Self {
            approvers: proposals.iter().map(|p| profile.approver_indices(&p.id)).collect(),
            ties: tiebreak.ranks(proposals),
        }
    }

    fn by_tie(&self, mut cands: Vec<usize>) -> Vec<usize> {
        cands.sort_by_key(|&c| self.ties[c]);
        cands
    }
}

/// Heap entry ordered by score, then by preferred tie-break rank.
struct Entry<S> {
    score: S,
    tie: u32,
    cand: usize,
    stamp: usize,
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score.total_cmp(&other.score).then_with(|| other.tie.cmp(&self.tie))
    }
}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

/// `Σ_u 1/(1 + placed_u)` over approvers, grouping approvers by level so the
/// sum needs one division per distinct level.
fn pav_marginal<S: Scalar>(approvers: &[u32], placed: &[u32], levels: &mut Vec<u64>) -> S {
    levels.clear();
    for &u in approvers {
        let l = placed[u as usize] as usize;
        if levels.len() <= l {
            levels.resize(l + 1, 0);
        }
        levels[l] += 1;
    }
    levels
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .fold(S::zero(), |acc, (l, &c)| acc + S::from_count(c) / S::from_count(l as u64 + 1))
}

/// Sequential PAV: each step appends the proposal with the largest marginal
/// harmonic score.
pub fn seq_pav_trace<S: Scalar>(profile: &ApprovalProfile, proposals: &[Proposal], tiebreak: TieBreak) -> Vec<Pick<S>> {
    let cands = Candidates::new(profile, proposals, tiebreak);
    let mut placed = vec![0u32; profile.num_users()];
    let mut levels = Vec::new();
    let mut heap: BinaryHeap<Entry<S>> = (0..proposals.len())
        .map(|c| Entry {
            score: pav_marginal(cands.approvers[c], &placed, &mut levels),
            tie: cands.ties[c],
            cand: c,
            stamp: 0,
        })
        .collect();
    let mut picks = Vec::with_capacity(proposals.len());
    for step in 0..proposals.len() {
        loop {
            let mut top = heap.pop().expect("one candidate per remaining step");
            if top.stamp == step {
                for &u in cands.approvers[top.cand] {
                    placed[u as usize] += 1;
                }
                picks.push(Pick { proposal: proposals[top.cand].id.clone(), score: top.score });
                break;
            }
            top.score = pav_marginal(cands.approvers[top.cand], &placed, &mut levels);
            top.stamp = step;
            heap.push(top);
        }
    }
    picks
}

pub fn rank_seq_pav_with<S: Scalar>(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    tiebreak: TieBreak,
) -> RankedList {
    let order = seq_pav_trace::<S>(profile, proposals, tiebreak).into_iter().map(|p| p.proposal).collect();
    RankedList::new(order, HolisticRule::SeqPav.name())
}

/// Sequential PAV in exact rational arithmetic.
pub fn rank_seq_pav(profile: &ApprovalProfile, proposals: &[Proposal], tiebreak: TieBreak) -> RankedList {
    rank_seq_pav_with::<Exact>(profile, proposals, tiebreak)
}

/// Result of sequential Phragmén: approved proposals with the load at which
/// they were bought, then unapproved proposals in tie-break order.
#[derive(Clone, Debug, PartialEq)]
pub struct PhragmenTrace<S> {
    pub picks: Vec<Pick<S>>,
    pub unapproved: Vec<ProposalId>,
}

pub fn seq_phragmen_trace<S: Scalar>(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    tiebreak: TieBreak,
) -> PhragmenTrace<S> {
    let cands = Candidates::new(profile, proposals, tiebreak);
    let mut loads = vec![S::zero(); profile.num_users()];
    let candidate_load = |c: usize, loads: &[S]| -> S {
        let approvers = cands.approvers[c];
        let total = approvers.iter().fold(S::one(), |acc, &u| acc + loads[u as usize].clone());
        total / S::from_count(approvers.len() as u64)
    };
    let (approved, unapproved): (Vec<usize>, Vec<usize>) =
        (0..proposals.len()).partition(|&c| !cands.approvers[c].is_empty());
    // max-heap over negated loads == min-heap over loads with the same tie preference
    let mut heap: BinaryHeap<Entry<S>> = approved
        .iter()
        .map(|&c| Entry { score: S::zero() - candidate_load(c, &loads), tie: cands.ties[c], cand: c, stamp: 0 })
        .collect();
    let mut picks = Vec::with_capacity(approved.len());
    for step in 0..approved.len() {
        loop {
            let mut top = heap.pop().expect("one candidate per remaining step");
            if top.stamp == step {
                let load = S::zero() - top.score;
                for &u in cands.approvers[top.cand] {
                    loads[u as usize] = load.clone();
                }
                picks.push(Pick { proposal: proposals[top.cand].id.clone(), score: load });
                break;
            }
            top.score = S::zero() - candidate_load(top.cand, &loads);
            top.stamp = step;
            heap.push(top);
        }
    }
    let unapproved = cands.by_tie(unapproved).into_iter().map(|c| proposals[c].id.clone()).collect();
    PhragmenTrace { picks, unapproved }
}

pub fn rank_seq_phragmen_with<S: Scalar>(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    tiebreak: TieBreak,
) -> RankedList {
    let trace = seq_phragmen_trace::<S>(profile, proposals, tiebreak);
    let order = trace.picks.into_iter().map(|p| p.proposal).chain(trace.unapproved).collect();
    RankedList::new(order, HolisticRule::SeqPhragmen.name())
}

/// Sequential Phragmén in exact rational arithmetic.
pub fn rank_seq_phragmen(profile: &ApprovalProfile, proposals: &[Proposal], tiebreak: TieBreak) -> RankedList {
    rank_seq_phragmen_with::<Exact>(profile, proposals, tiebreak)
}

/// Greedy maximal coverage. Each step appends the proposal reaching the most
/// not-yet-covered users, preferring more approvals and then the tie-break.
/// Once nobody new can be reached, `reset_on_saturation` clears the covered
/// set and starts a new layer; otherwise the rest follows by approval count.
pub fn rank_greedy_coverage(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    tiebreak: TieBreak,
    reset_on_saturation: bool,
) -> RankedList {
    let cands = Candidates::new(profile, proposals, tiebreak);
    let mut covered = vec![false; profile.num_users()];
    let (approved, unapproved): (Vec<usize>, Vec<usize>) =
        (0..proposals.len()).partition(|&c| !cands.approvers[c].is_empty());
    let uncovered = |c: usize, covered: &[bool]| cands.approvers[c].iter().filter(|&&u| !covered[u as usize]).count();
    // (marginal, total approvals, preferred tie, candidate, stamp)
    type Key = (usize, usize, Reverse<u32>, usize, usize);
    let fresh = |c: usize, epoch: usize| -> Key {
        let total = cands.approvers[c].len();
        (total, total, Reverse(cands.ties[c]), c, epoch)
    };
    let mut epoch = 0;
    let mut heap: BinaryHeap<Key> = approved.iter().map(|&c| fresh(c, epoch)).collect();
    let mut order = Vec::with_capacity(proposals.len());
    while let Some((marginal, total, tie, c, stamp)) = heap.pop() {
        if stamp != epoch {
            heap.push((uncovered(c, &covered), total, tie, c, epoch));
            continue;
        }
        if marginal == 0 {
            let mut rest: Vec<usize> = heap.drain().map(|k| k.3).collect();
            rest.push(c);
            if reset_on_saturation {
                covered.iter_mut().for_each(|x| *x = false);
                epoch += 1;
                heap = rest.into_iter().map(|c| fresh(c, epoch)).collect();
                continue;
            }
            rest.sort_by_key(|&c| (Reverse(cands.approvers[c].len()), cands.ties[c]));
            order.extend(rest);
            break;
        }
        for &u in cands.approvers[c] {
            covered[u as usize] = true;
        }
        order.push(c);
        epoch += 1;
    }
    order.extend(cands.by_tie(unapproved));
    RankedList::new(order.into_iter().map(|c| proposals[c].id.clone()).collect(), HolisticRule::GreedyCoverage.name())
}

/// Size-`k` set maximizing the number of users approving at least one member,
/// by exhaustive enumeration. Among optimal sets the first in id order wins.
pub fn exact_coverage_prefix(
    profile: &ApprovalProfile,
    proposals: &[Proposal],
    k: usize,
) -> Result<(BTreeSet<ProposalId>, usize)> {
    let n = proposals.len();
    let too_large =
        || Error::InstanceTooLarge { proposals: n, k, max_proposals: MAX_EXACT_PROPOSALS, max_k: MAX_EXACT_K };
    if n > MAX_EXACT_PROPOSALS {
        return Err(too_large());
    }
    let mut ids: Vec<&ProposalId> = proposals.iter().map(|p| &p.id).collect();
    ids.sort();
    let words = profile.num_users().div_ceil(64);
    let sets: Vec<Vec<u64>> = ids
        .iter()
        .map(|id| {
            let mut bits = vec![0u64; words];
            for &u in profile.approver_indices(id) {
                bits[u as usize / 64] |= 1 << (u % 64);
            }
            bits
        })
        .collect();
    let value = |members: &[usize]| -> usize {
        (0..words).map(|w| members.iter().fold(0u64, |acc, &m| acc | sets[m][w]).count_ones() as usize).sum()
    };
    if k >= n {
        let all: Vec<usize> = (0..n).collect();
        return Ok((ids.into_iter().cloned().collect(), value(&all)));
    }
    if k > MAX_EXACT_K {
        return Err(too_large());
    }
    let mut best: Option<(Vec<usize>, usize)> = None;
    for combo in (0..n).combinations(k) {
        let v = value(&combo);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((combo, v));
        }
    }
    let (members, v) = best.unwrap_or_default();
    Ok((members.into_iter().map(|m| ids[m].clone()).collect(), v))
}

/// PAV objective of a prefix: `Σ_u H(|A(u) ∩ prefix|)` with `H` the harmonic number.
pub fn pav_prefix_score_with<S: Scalar>(profile: &ApprovalProfile, prefix: &[ProposalId]) -> Result<S> {
    let mut seen = HashSet::with_capacity(prefix.len());
    let mut placed = vec![0u64; profile.num_users()];
    for id in prefix {
        if !seen.insert(id) {
            return Err(Error::DuplicateInPrefix(id.to_string()));
        }
        for &u in profile.approver_indices(id) {
            placed[u as usize] += 1;
        }
    }
    // users reaching level j each contribute 1/j
    let max = placed.iter().copied().max().unwrap_or(0);
    let mut at_least = vec![0u64; max as usize + 2];
    for &k in &placed {
        at_least[k as usize] += 1;
    }
    for j in (0..=max as usize).rev() {
        at_least[j] += at_least[j + 1];
    }
    Ok((1..=max).fold(S::zero(), |acc, j| acc + S::from_count(at_least[j as usize]) / S::from_count(j)))
}

pub fn pav_prefix_score(profile: &ApprovalProfile, prefix: &[ProposalId]) -> Result<Exact> {
    pav_prefix_score_with::<Exact>(profile, prefix)
}
