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

//! List-quality measures: user coverage, first-hit depth, attention
//! concentration and proportionality on disjoint-group profiles.

use std::collections::{BTreeMap, HashMap};

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApprovalProfile, ProposalId, UserId};

/// Probability of inspecting each list position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AttentionModel {
    /// Only the first `k` positions are inspected.
    TopK { k: usize },
    /// Position `i` (0-based) is inspected with probability `p^i`.
    Geometric { p: f64 },
}

impl AttentionModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AttentionModel::TopK { k: 0 } => Err(Error::InvalidAttention("k must be at least 1".into())),
            AttentionModel::Geometric { p } if !(p > 0.0 && p < 1.0) => {
                Err(Error::InvalidAttention(format!("p must lie in (0, 1), got {p}")))
            }
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for AttentionModel {
    type Err = Error;

    /// Parses `top:K` or `geometric:P`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAttention(format!("expected top:K or geometric:P, got `{s}`"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let model = match kind {
            "top" | "topk" => AttentionModel::TopK { k: arg.parse().map_err(|_| bad())? },
            "geometric" | "geo" => AttentionModel::Geometric { p: arg.parse().map_err(|_| bad())? },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

fn check_k(k: usize, len: usize) -> Result<()> {
    if k == 0 || k > len {
        return Err(Error::KOutOfRange { k, len });
    }
    Ok(())
}

/// Fraction of users approving at least one of the first `k` proposals.
pub fn coverage_at_k(profile: &ApprovalProfile, list: &[ProposalId], k: usize) -> Result<f64> {
    check_k(k, list.len())?;
    if profile.num_users() == 0 {
        return Ok(0.0);
    }
    let mut covered = vec![false; profile.num_users()];
    for id in &list[..k] {
        for &u in profile.approver_indices(id) {
            covered[u as usize] = true;
        }
    }
    Ok(covered.iter().filter(|&&c| c).count() as f64 / profile.num_users() as f64)
}

/// 1-based position of each user's first approved proposal, `None` if the
/// list holds none of them.
pub fn first_hit_positions(profile: &ApprovalProfile, list: &[ProposalId]) -> BTreeMap<UserId, Option<usize>> {
    let mut hits = vec![None; profile.num_users()];
    for (pos, id) in list.iter().enumerate() {
        for &u in profile.approver_indices(id) {
            hits[u as usize].get_or_insert(pos + 1);
        }
    }
    profile.users().iter().cloned().zip(hits).collect()
}

/// Share of attention for each of `n` positions. Sums to one for `n >= 1`.
pub fn attention_weights<F: Float>(n: usize, model: AttentionModel) -> Vec<F> {
    let cast = |x: f64| F::from(x).expect("representable");
    match model {
        AttentionModel::TopK { k } => {
            let k = k.max(1);
            let w = F::one() / cast(k.min(n) as f64);
            (0..n).map(|i| if i < k { w } else { F::zero() }).collect()
        }
        AttentionModel::Geometric { p } => {
            let p = cast(p);
            let mut raw = Vec::with_capacity(n);
            let mut w = F::one();
            for _ in 0..n {
                raw.push(w);
                w = w * p;
            }
            let total = raw.iter().fold(F::zero(), |a, &b| a + b);
            raw.into_iter().map(|w| w / total).collect()
        }
    }
}

/// Gini coefficient of non-negative weights: 0 for perfect equality,
/// `(n-1)/n` when one entry holds everything.
pub fn attention_gini<F: Float>(weights: &[F]) -> Result<F> {
    let total = weights.iter().fold(F::zero(), |a, &b| a + b);
    if weights.is_empty() || total <= F::zero() {
        return Err(Error::AllZeroWeights);
    }
    let mut sorted = weights.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    let n = F::from(sorted.len()).expect("representable");
    let ranked =
        sorted.iter().enumerate().fold(F::zero(), |acc, (i, &w)| acc + F::from(i + 1).expect("representable") * w);
    let two = F::one() + F::one();
    Ok(two * ranked / (n * total) - (n + F::one()) / n)
}

/// A set of users who approve exactly the same proposals, with those proposals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApprovalGroup {
    pub members: Vec<u32>,
    pub proposals: Vec<ProposalId>,
}

/// Splits a profile whose non-empty approver sets are pairwise equal or
/// disjoint into its groups, largest first (ties by first proposal id).
pub fn disjoint_groups(profile: &ApprovalProfile) -> Result<Vec<ApprovalGroup>> {
    let mut owner: Vec<Option<usize>> = vec![None; profile.num_users()];
    let mut groups: Vec<ApprovalGroup> = Vec::new();
    for id in profile.proposal_ids() {
        let approvers = profile.approver_indices(id);
        let Some(&first) = approvers.first() else { continue };
        match owner[first as usize] {
            Some(g) if groups[g].members == approvers => groups[g].proposals.push(id.clone()),
            Some(g) => return Err(Error::NonDisjointProfile(groups[g].proposals[0].to_string(), id.to_string())),
            None => {
                if let Some(g) = approvers.iter().find_map(|&u| owner[u as usize]) {
                    return Err(Error::NonDisjointProfile(groups[g].proposals[0].to_string(), id.to_string()));
                }
                for &u in approvers {
                    owner[u as usize] = Some(groups.len());
                }
                groups.push(ApprovalGroup { members: approvers.to_vec(), proposals: vec![id.clone()] });
            }
        }
    }
    groups.sort_by(|a, b| b.members.len().cmp(&a.members.len()).then_with(|| a.proposals[0].cmp(&b.proposals[0])));
    Ok(groups)
}

/// Total-variation distance between each group's share of the first `k`
/// slots and its share of the grouped population. Slots held by proposals
/// without approvers count against an empty bucket of population share 0.
pub fn proportionality_deviation(profile: &ApprovalProfile, list: &[ProposalId], k: usize) -> Result<f64> {
    check_k(k, list.len())?;
    let groups = disjoint_groups(profile)?;
    let population: usize = groups.iter().map(|g| g.members.len()).sum();
    if population == 0 {
        return Ok(0.0);
    }
    let group_of: HashMap<&ProposalId, usize> =
        groups.iter().enumerate().flat_map(|(g, grp)| grp.proposals.iter().map(move |p| (p, g))).collect();
    let mut slots = vec![0usize; groups.len() + 1];
    for id in &list[..k] {
        slots[group_of.get(id).copied().unwrap_or(groups.len())] += 1;
    }
    let k = k as f64;
    let mut l1 = slots[groups.len()] as f64 / k;
    for (g, grp) in groups.iter().enumerate() {
        l1 += (slots[g] as f64 / k - grp.members.len() as f64 / population as f64).abs();
    }
    Ok(l1 / 2.0)
}

/// Pearson correlation; `None` when either side has no variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Average ranks (1-based), ties sharing their mean rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            ranks[t] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with tie correction.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{sort_by_approvals, TieBreak};
    use crate::holistic::{rank_greedy_coverage, rank_seq_pav};
    use crate::model::{pid, scenario_s100, uid, ProfileBuilder, Proposal};

    #[test]
    fn coverage_s100() {
        let (proposals, profile) = scenario_s100();
        let max = sort_by_approvals(&profile, &proposals, TieBreak::ById);
        let cov = rank_greedy_coverage(&profile, &proposals, TieBreak::ById, true);
        assert_eq!(coverage_at_k(&profile, &max.order, 3).unwrap(), 0.45);
        assert_eq!(coverage_at_k(&profile, &cov.order, 3).unwrap(), 1.0);
        assert_eq!(coverage_at_k(&profile, &max.order, 30).unwrap(), 1.0);
        assert!(matches!(coverage_at_k(&profile, &max.order, 0), Err(Error::KOutOfRange { .. })));
        assert!(coverage_at_k(&profile, &max.order, 31).is_err());
    }

    #[test]
    fn coverage_full_list_counts_silent_users_out() {
        let proposals = [Proposal::new(pid("a"), uid("x"), 0)];
        let mut b = ProfileBuilder::new([pid("a")]);
        b.approve(uid("u1"), pid("a")).unwrap();
        b.add_user(uid("u2"));
        let profile = b.build();
        let list: Vec<_> = proposals.iter().map(|p| p.id.clone()).collect();
        assert_eq!(coverage_at_k(&profile, &list, 1).unwrap(), 0.5);
        let hits = first_hit_positions(&profile, &list);
        assert_eq!(hits[&uid("u1")], Some(1));
        assert_eq!(hits[&uid("u2")], None);
    }

    #[test]
    fn first_hits_s100() {
        let (proposals, profile) = scenario_s100();
        let max = sort_by_approvals(&profile, &proposals, TieBreak::ById);
        let pav = rank_seq_pav(&profile, &proposals, TieBreak::ById);
        let hits_max = first_hit_positions(&profile, &max.order);
        let hits_pav = first_hit_positions(&profile, &pav.order);
        for u in 81..=100 {
            let user = uid(&format!("u{u:03}"));
            assert_eq!(hits_max[&user], Some(21));
            assert_eq!(hits_pav[&user], Some(4));
        }
    }

    #[test]
    fn weights() {
        let top: Vec<f64> = attention_weights(5, AttentionModel::TopK { k: 3 });
        assert_eq!(top, vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0]);
        let geo: Vec<f64> = attention_weights(3, AttentionModel::Geometric { p: 0.5 });
        for (w, e) in geo.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert!((w - e).abs() < 1e-15);
        }
        let one: Vec<f64> = attention_weights(1, AttentionModel::Geometric { p: 0.3 });
        assert_eq!(one, vec![1.0]);
        let short: Vec<f64> = attention_weights(2, AttentionModel::TopK { k: 5 });
        assert_eq!(short, vec![0.5, 0.5]);
    }

    #[test]
    fn attention_parse() {
        assert_eq!("top:3".parse::<AttentionModel>().unwrap(), AttentionModel::TopK { k: 3 });
        assert_eq!("geometric:0.7".parse::<AttentionModel>().unwrap(), AttentionModel::Geometric { p: 0.7 });
        assert!("geometric:1.5".parse::<AttentionModel>().is_err());
        assert!("top:0".parse::<AttentionModel>().is_err());
        assert!("uniform".parse::<AttentionModel>().is_err());
    }

    #[test]
    fn gini_examples() {
        assert_eq!(attention_gini(&[0.25f64; 4]).unwrap(), 0.0);
        assert!((attention_gini(&[1.0f64, 0.0, 0.0, 0.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!((attention_gini(&[1.0f64, 1.0, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(attention_gini(&[0.0f64, 0.0]), Err(Error::AllZeroWeights)));
    }

    /// Mean absolute difference over all ordered pairs, as an independent route.
    fn gini_pairwise(w: &[f64]) -> f64 {
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let sum: f64 = w.iter().flat_map(|a| w.iter().map(move |b| (a - b).abs())).sum();
        sum / (2.0 * n * n * mean)
    }

    #[test]
    fn gini_matches_pairwise_definition() {
        let w = [0.3, 0.05, 0.0, 0.9, 0.2, 0.2];
        assert!((attention_gini(&w).unwrap() - gini_pairwise(&w)).abs() < 1e-12);
    }

    #[test]
    fn proportionality_s100() {
        let (proposals, profile) = scenario_s100();
        let max = sort_by_approvals(&profile, &proposals, TieBreak::ById);
        let pav = rank_seq_pav(&profile, &proposals, TieBreak::ById);
        assert!((proportionality_deviation(&profile, &max.order, 10).unwrap() - 0.55).abs() < 1e-12);
        assert!(proportionality_deviation(&profile, &pav.order, 20).unwrap() <= 0.10);
    }

    #[test]
    fn proportionality_exact_quota_is_zero() {
        let (_, profile) = scenario_s100();
        // 9 x, 7 y, 4 z in the first 20 slots is exactly 45:35:20
        let mut list: Vec<ProposalId> = Vec::new();
        list.extend((1..=9).map(|i| pid(&format!("x{i:02}"))));
        list.extend((1..=7).map(|i| pid(&format!("y{i:02}"))));
        list.extend((1..=4).map(|i| pid(&format!("z{i:02}"))));
        assert!(proportionality_deviation(&profile, &list, 20).unwrap().abs() < 1e-12);
    }

    #[test]
    fn proportionality_rejects_overlap() {
        let mut b = ProfileBuilder::new([pid("a"), pid("b")]);
        b.approve(uid("u1"), pid("a")).unwrap();
        b.approve(uid("u2"), pid("a")).unwrap();
        b.approve(uid("u2"), pid("b")).unwrap();
        let profile = b.build();
        let err = proportionality_deviation(&profile, &[pid("a"), pid("b")], 1).unwrap_err();
        assert!(matches!(err, Error::NonDisjointProfile(..)));
    }

    #[test]
    fn groups_largest_first() {
        let (_, profile) = scenario_s100();
        let groups = disjoint_groups(&profile).unwrap();
        let sizes: Vec<_> = groups.iter().map(|g| g.members.len()).collect();
        assert_eq!(sizes, [45, 35, 20]);
        assert_eq!(groups[2].proposals.len(), 10);
    }

    #[test]
    fn correlations() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[1.0, 10.0, 100.0, 1000.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&x, &[1.0; 4]), None);
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }
}
