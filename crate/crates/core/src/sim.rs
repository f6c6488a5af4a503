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

//! Seeded discrete-time simulation of users browsing a proposal list.
//!
//! Each tick, new proposals arrive, the list is re-sorted on schedule, and
//! `sessions_per_tick` uniformly drawn users inspect positions according to
//! an [`AttentionModel`]. An inspected proposal from the user's own group's
//! pool is approved with the group's probability, decided once per
//! `(user, proposal)` on first inspection.
//!
//! Randomness is split into independent streams (arrivals, session users,
//! attention draws, latent approvals, random sorters), all derived from the
//! run seed, so changing the sorting method never perturbs the other streams.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{random_order, RandomPolicy, TieBreak};
use crate::error::{Error, Result};
use crate::integrated::IntegratedConfig;
use crate::metrics::{attention_gini, coverage_at_k, pearson, spearman, AttentionModel};
use crate::model::{
    build_profile_with_users, pid, uid, ApprovalProfile, EvaluationEvent, InspectionStats, Proposal, ProposalId,
    RankedList, SortContext, UserId,
};
use crate::rng;
use crate::sorter::{Method, MethodSpec, RankInput};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Arrivals {
    AllAtStart,
    /// Each proposal arrives at a tick drawn uniformly from `0..horizon`.
    UniformOverHorizon,
    /// Each proposal arrives at one of `times`, drawn uniformly.
    Burst {
        times: Vec<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    /// Prefix of the group's proposal ids; `g1`, `g2`, ... when absent.
    pub label: Option<String>,
    pub size: usize,
    pub pool_size: usize,
    pub approval_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_users: usize,
    pub groups: Vec<GroupSpec>,
    pub arrivals: Arrivals,
    pub horizon: u32,
    pub sessions_per_tick: u32,
    pub attention: AttentionModel,
    pub resort_every: u32,
    /// Simulated seconds per tick; 86400 makes a tick a day.
    pub tick_seconds: i64,
    /// Depth used for the per-resort coverage series.
    pub report_k: usize,
    /// Start with every group member approving their whole pool.
    pub preseed_approvals: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n_users: 0,
            groups: Vec::new(),
            arrivals: Arrivals::AllAtStart,
            horizon: 30,
            sessions_per_tick: 20,
            attention: AttentionModel::Geometric { p: 0.7 },
            resort_every: 1,
            tick_seconds: 86_400,
            report_k: 3,
            preseed_approvals: false,
        }
    }
}

impl Scenario {
    /// Builds a scenario from `(size, pool, prob)` groups with default settings.
    pub fn with_groups(groups: &[(usize, usize, f64)]) -> Self {
        let groups: Vec<GroupSpec> = groups
            .iter()
            .map(|&(size, pool_size, approval_prob)| GroupSpec { label: None, size, pool_size, approval_prob })
            .collect();
        Self { n_users: groups.iter().map(|g| g.size).sum(), groups, ..Self::default() }
    }

    /// The three-group example as a one-tick simulation with approvals
    /// already in place.
    pub fn s100_static() -> Self {
        let mut s = Self::with_groups(&[(45, 10, 1.0), (35, 10, 1.0), (20, 10, 1.0)]);
        for (g, label) in s.groups.iter_mut().zip(["x", "y", "z"]) {
            g.label = Some(label.to_owned());
        }
        s.horizon = 1;
        s.preseed_approvals = true;
        s
    }

    /// Proposals trickling in over a month, for timing effects.
    pub fn timing_default() -> Self {
        let mut s = Self::with_groups(&[(50, 5, 0.3), (50, 5, 0.3), (50, 5, 0.3), (50, 5, 0.3)]);
        s.arrivals = Arrivals::UniformOverHorizon;
        s
    }

    /// Equal-quality groups with everything present from the start, for
    /// feedback-loop effects.
    pub fn feedback_default() -> Self {
        Self::with_groups(&[(50, 10, 0.5), (50, 10, 0.5), (50, 10, 0.5), (50, 10, 0.5)])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.n_users == 0 {
            return bad("n_users must be positive".into());
        }
        if self.groups.is_empty() {
            return bad("at least one group is required".into());
        }
        let total: usize = self.groups.iter().map(|g| g.size).sum();
        if total != self.n_users {
            return bad(format!("group sizes sum to {total}, expected n_users = {}", self.n_users));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if !(0.0..=1.0).contains(&g.approval_prob) {
                return bad(format!("group {} approval_prob {} outside [0, 1]", i + 1, g.approval_prob));
            }
            if g.label.as_deref() == Some("") {
                return bad(format!("group {} has an empty label", i + 1));
            }
        }
        if self.horizon == 0 {
            return bad("horizon must be at least one tick".into());
        }
        if self.resort_every == 0 {
            return bad("resort_every must be at least 1".into());
        }
        if self.tick_seconds <= 0 {
            return bad("tick_seconds must be positive".into());
        }
        if self.report_k == 0 {
            return bad("report_k must be at least 1".into());
        }
        if let Arrivals::Burst { times } = &self.arrivals {
            if times.is_empty() {
                return bad("burst arrivals need at least one time".into());
            }
            if let Some(t) = times.iter().find(|&&t| t >= self.horizon) {
                return bad(format!("burst time {t} is not before horizon {}", self.horizon));
            }
        }
        self.attention.validate().map_err(|e| Error::InvalidScenario(e.to_string()))
    }
}

/// Coverage and attention concentration at one re-sort.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResortMetrics {
    pub tick: u32,
    pub coverage_at_k: Option<f64>,
    /// Gini of accumulated views across arrived proposals.
    pub attention_gini: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalOutcome {
    pub id: ProposalId,
    pub group: usize,
    pub arrival_tick: u32,
    pub views: u64,
    /// Views during the first tenth of the horizon (at least one tick).
    pub early_views: u64,
    pub approvals: usize,
    /// Mean over ticks alive of this proposal's views relative to the
    /// average arrived proposal that tick; 1.0 means a fair share.
    pub exposure_rate: Option<f64>,
    /// 1-based position in the final list.
    pub final_position: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub method: String,
    pub seed: u64,
    pub final_profile: ApprovalProfile,
    pub final_views: InspectionStats,
    pub final_list: RankedList,
    pub series: Vec<ResortMetrics>,
    pub views_per_tick: Vec<u64>,
    pub inspections_per_tick: Vec<u64>,
    pub proposals: Vec<ProposalOutcome>,
    /// Spearman between arrival tick and final standing (higher = nearer the top).
    pub rank_vs_arrival_correlation: Option<f64>,
    /// Spearman between early views and final standing.
    pub rank_vs_early_exposure_correlation: Option<f64>,
}

struct World {
    users: Vec<UserId>,
    user_group: Vec<usize>,
    proposals: Vec<Proposal>,
    proposal_group: Vec<usize>,
    arrival: Vec<u32>,
}

impl World {
    fn new(s: &Scenario, seed: u64) -> Result<Self> {
        let uw = s.n_users.to_string().len().max(3);
        let mut users = Vec::with_capacity(s.n_users);
        let mut user_group = Vec::with_capacity(s.n_users);
        for (g, spec) in s.groups.iter().enumerate() {
            for _ in 0..spec.size {
                users.push(uid(&format!("u{:0uw$}", users.len() + 1)));
                user_group.push(g);
            }
        }
        let mut proposals = Vec::new();
        let mut proposal_group = Vec::new();
        let mut seen = HashSet::new();
        for (g, spec) in s.groups.iter().enumerate() {
            let label = spec.label.clone().unwrap_or_else(|| format!("g{}", g + 1));
            let w = spec.pool_size.to_string().len().max(2);
            for i in 1..=spec.pool_size {
                let id = format!("{label}{i:0w$}");
                if !seen.insert(id.clone()) {
                    return Err(Error::InvalidScenario(format!("group labels produce duplicate id `{id}`")));
                }
                proposals.push(Proposal::new(pid(&id), uid(&format!("author-{id}")), 0));
                proposal_group.push(g);
            }
        }
        let mut arrivals_rng = rng::stream("sim/arrivals", seed, b"");
        let arrival: Vec<u32> = proposals
            .iter()
            .map(|_| match &s.arrivals {
                Arrivals::AllAtStart => 0,
                Arrivals::UniformOverHorizon => arrivals_rng.gen_range(0..s.horizon),
                Arrivals::Burst { times } => times[arrivals_rng.gen_range(0..times.len())],
            })
            .collect();
        for (p, &t) in proposals.iter_mut().zip(&arrival) {
            p.submitted_at = t as i64 * s.tick_seconds;
        }
        Ok(Self { users, user_group, proposals, proposal_group, arrival })
    }
}

fn context(now: i64, seed: u64) -> SortContext {
    SortContext::new(now, seed).with_session("list")
}

/// Runs one simulation. Identical `(scenario, method, seed)` give identical reports.
pub fn run_simulation(scenario: &Scenario, method: &MethodSpec, seed: u64) -> Result<SimReport> {
    scenario.validate()?;
    let world = World::new(scenario, seed)?;
    let n_props = world.proposals.len();
    let index: HashMap<&ProposalId, usize> = world.proposals.iter().enumerate().map(|(i, p)| (&p.id, i)).collect();
    let sort_seed = rng::derive_seed("sim/sorter", seed, b"");
    let mut session_rng = rng::stream("sim/sessions", seed, b"");
    let mut attention_rng = rng::stream("sim/attention", seed, b"");

    let mut events: Vec<EvaluationEvent> = Vec::new();
    let mut decided: HashSet<(usize, usize)> = HashSet::new();
    if scenario.preseed_approvals {
        for (u, &g) in world.user_group.iter().enumerate() {
            for p in (0..n_props).filter(|&p| world.proposal_group[p] == g) {
                decided.insert((u, p));
                events.push(EvaluationEvent::approve(world.users[u].clone(), world.proposals[p].id.clone(), 0));
            }
        }
    }

    let early_cutoff = scenario.horizon.div_ceil(10).max(1);
    let mut views = vec![0u64; n_props];
    let mut early_views = None;
    let mut exposure_sum = vec![0.0f64; n_props];
    let mut exposure_ticks = vec![0u32; n_props];
    let mut alive: Vec<usize> = Vec::new();
    let mut alive_props: Vec<Proposal> = Vec::new();
    let mut current: Vec<ProposalId> = Vec::new();
    let mut series = Vec::new();
    let mut views_per_tick = Vec::with_capacity(scenario.horizon as usize);
    let mut inspections_per_tick = Vec::with_capacity(scenario.horizon as usize);
    let geometric: Option<Vec<f64>> = match scenario.attention {
        AttentionModel::Geometric { p } => Some((0..n_props).map(|i| p.powi(i as i32)).collect()),
        AttentionModel::TopK { .. } => None,
    };

    let snapshot = |events: &[EvaluationEvent], views: &[u64]| -> Result<(ApprovalProfile, InspectionStats)> {
        let profile = build_profile_with_users(events, &world.proposals, world.users.iter().cloned())?;
        let stats = world.proposals.iter().zip(views).map(|(p, &v)| (p.id.clone(), v)).collect();
        Ok((profile, stats))
    };

    for tick in 0..scenario.horizon {
        let now = tick as i64 * scenario.tick_seconds;
        let arriving: Vec<usize> = (0..n_props).filter(|&p| world.arrival[p] == tick).collect();
        if !arriving.is_empty() {
            alive.extend(arriving);
            alive.sort_by(|&a, &b| world.proposals[a].id.cmp(&world.proposals[b].id));
            alive_props = alive.iter().map(|&p| world.proposals[p].clone()).collect();
        }

        if tick % scenario.resort_every == 0 {
            let (profile, stats) = snapshot(&events, &views)?;
            let input = RankInput { proposals: &alive_props, profile: &profile, events: &events, inspections: &stats };
            current = method.rank(&input, &context(now, sort_seed))?.order;
            let coverage = (!current.is_empty())
                .then(|| coverage_at_k(&profile, &current, scenario.report_k.min(current.len())))
                .transpose()?;
            let alive_views: Vec<f64> = alive.iter().map(|&p| views[p] as f64).collect();
            series.push(ResortMetrics {
                tick,
                coverage_at_k: coverage,
                attention_gini: attention_gini(&alive_views).ok(),
            });
        }

        let mut tick_views = vec![0u64; n_props];
        let mut inspected = 0u64;
        for session in 0..scenario.sessions_per_tick {
            let user = session_rng.gen_range(0..scenario.n_users);
            let personal;
            let list: &[ProposalId] = match &method.method {
                Method::Random { policy } => {
                    let ctx = match policy {
                        RandomPolicy::PerView => {
                            let mut nonce = [0u8; 8];
                            nonce[..4].copy_from_slice(&tick.to_le_bytes());
                            nonce[4..].copy_from_slice(&session.to_le_bytes());
                            SortContext::new(now, rng::derive_seed("sim/view", seed, &nonce))
                        }
                        RandomPolicy::PerSession => {
                            SortContext::new(now, sort_seed).with_session(format!("session-{}", world.users[user]))
                        }
                        RandomPolicy::DailyShared => SortContext::new(now, sort_seed),
                    };
                    personal = random_order(&alive_props, *policy, &ctx)?.order;
                    &personal
                }
                _ => &current,
            };
            let depth = match scenario.attention {
                AttentionModel::TopK { k } => k.min(list.len()),
                AttentionModel::Geometric { .. } => list.len(),
            };
            let user_group = world.user_group[user];
            for (pos, id) in list.iter().enumerate().take(depth) {
                if let Some(probs) = &geometric {
                    if attention_rng.gen::<f64>() >= probs[pos] {
                        continue;
                    }
                }
                let p = index[id];
                views[p] += 1;
                tick_views[p] += 1;
                inspected += 1;
                let group = world.proposal_group[p];
                if group == user_group && decided.insert((user, p)) {
                    let draw = rng::keyed_unit("sim/approve", seed, user as u64, p as u64);
                    if draw < scenario.groups[group].approval_prob {
                        events.push(EvaluationEvent::approve(
                            world.users[user].clone(),
                            id.clone(),
                            now + session as i64,
                        ));
                    }
                }
            }
        }
        let tick_total: u64 = tick_views.iter().sum();
        views_per_tick.push(tick_total);
        inspections_per_tick.push(inspected);
        if tick_total > 0 && !alive.is_empty() {
            let fair = tick_total as f64 / alive.len() as f64;
            for &p in &alive {
                exposure_sum[p] += tick_views[p] as f64 / fair;
                exposure_ticks[p] += 1;
            }
        }
        if tick + 1 == early_cutoff {
            early_views = Some(views.clone());
        }
    }

    let (final_profile, final_views) = snapshot(&events, &views)?;
    let end = scenario.horizon as i64 * scenario.tick_seconds;
    let input =
        RankInput { proposals: &alive_props, profile: &final_profile, events: &events, inspections: &final_views };
    let final_list = method.rank(&input, &context(end, sort_seed))?;
    let early_views = early_views.unwrap_or_else(|| views.clone());

    let position: HashMap<&ProposalId, usize> =
        final_list.order.iter().enumerate().map(|(i, id)| (id, i + 1)).collect();
    let proposals: Vec<ProposalOutcome> = world
        .proposals
        .iter()
        .enumerate()
        .map(|(p, prop)| ProposalOutcome {
            id: prop.id.clone(),
            group: world.proposal_group[p],
            arrival_tick: world.arrival[p],
            views: views[p],
            early_views: early_views[p],
            approvals: final_profile.approver_count(&prop.id),
            exposure_rate: (exposure_ticks[p] > 0).then(|| exposure_sum[p] / exposure_ticks[p] as f64),
            final_position: position.get(&prop.id).copied().unwrap_or(n_props),
        })
        .collect();
    let standing: Vec<f64> = proposals.iter().map(|o| (n_props - o.final_position) as f64).collect();
    let arrivals: Vec<f64> = proposals.iter().map(|o| o.arrival_tick as f64).collect();
    let early: Vec<f64> = proposals.iter().map(|o| o.early_views as f64).collect();

    Ok(SimReport {
        method: method.method.name().to_owned(),
        seed,
        rank_vs_arrival_correlation: spearman(&arrivals, &standing),
        rank_vs_early_exposure_correlation: spearman(&early, &standing),
        final_profile,
        final_views,
        final_list,
        series,
        views_per_tick,
        inspections_per_tick,
        proposals,
    })
}

/// Seed of run `i` in a batch.
pub fn run_seed(seed: u64, i: usize) -> u64 {
    rng::derive_seed("experiment/run", seed, &(i as u64).to_le_bytes())
}

/// Runs `n_runs` independently seeded simulations in parallel, in run order.
pub fn run_batch(scenario: &Scenario, method: &MethodSpec, seed: u64, n_runs: usize) -> Result<Vec<SimReport>> {
    (0..n_runs).into_par_iter().map(|i| run_simulation(scenario, method, run_seed(seed, i))).collect()
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRun {
    pub seed: u64,
    /// Pearson between arrival tick and total views.
    pub arrival_vs_views: Option<f64>,
    /// Pearson between arrival tick and exposure rate per tick alive.
    pub arrival_vs_exposure_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub method: String,
    pub runs: usize,
    pub arrival_vs_views: Option<f64>,
    pub arrival_vs_exposure_rate: Option<f64>,
    pub per_run: Vec<TimingRun>,
}

/// How much arrival time decides exposure under `method`, averaged over runs.
pub fn experiment_timing(template: &Scenario, method: &MethodSpec, seed: u64, n_runs: usize) -> Result<TimingSummary> {
    if template.arrivals != Arrivals::UniformOverHorizon {
        return Err(Error::InvalidScenario("timing experiment needs uniform arrivals".into()));
    }
    let per_run: Vec<TimingRun> = run_batch(template, method, seed, n_runs)?
        .into_iter()
        .map(|r| {
            let arrivals: Vec<f64> = r.proposals.iter().map(|o| o.arrival_tick as f64).collect();
            let views: Vec<f64> = r.proposals.iter().map(|o| o.views as f64).collect();
            let (a, e): (Vec<f64>, Vec<f64>) =
                r.proposals.iter().filter_map(|o| o.exposure_rate.map(|e| (o.arrival_tick as f64, e))).unzip();
            TimingRun {
                seed: r.seed,
                arrival_vs_views: pearson(&arrivals, &views),
                arrival_vs_exposure_rate: if a.len() >= 2 { pearson(&a, &e) } else { None },
            }
        })
        .collect();
    Ok(TimingSummary {
        method: method.method.name().to_owned(),
        runs: n_runs,
        arrival_vs_views: mean(per_run.iter().map(|r| r.arrival_vs_views)),
        arrival_vs_exposure_rate: mean(per_run.iter().map(|r| r.arrival_vs_exposure_rate)),
        per_run,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedbackPair {
    pub seed: u64,
    pub raw: Option<f64>,
    pub integrated: Option<f64>,
}

impl FeedbackPair {
    pub fn raw_exceeds(&self) -> bool {
        matches!((self.raw, self.integrated), (Some(r), Some(i)) if r > i)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedbackSummary {
    pub runs: usize,
    pub raw_mean: Option<f64>,
    pub integrated_mean: Option<f64>,
    /// Share of paired runs where raw approval sorting ties final standing
    /// more tightly to early exposure than the integrated sorter does.
    pub raw_exceeds_fraction: Option<f64>,
    pub pairs: Vec<FeedbackPair>,
}

/// Raw approval sorting vs the exposure-adjusted integrated sorter with
/// default settings, on identical seeds.
pub fn experiment_feedback_loop(template: &Scenario, seed: u64, n_runs: usize) -> Result<FeedbackSummary> {
    experiment_feedback_loop_with(template, &IntegratedConfig::default(), seed, n_runs)
}

pub fn experiment_feedback_loop_with(
    template: &Scenario,
    cfg: &IntegratedConfig,
    seed: u64,
    n_runs: usize,
) -> Result<FeedbackSummary> {
    let first = template.groups.first().map(|g| g.approval_prob);
    if template.groups.iter().any(|g| Some(g.approval_prob) != first) {
        return Err(Error::InvalidScenario("feedback experiment needs equal approval_prob in every group".into()));
    }
    let raw = MethodSpec::new(Method::Approvals, TieBreak::ById);
    let integrated = MethodSpec::new(Method::Integrated(cfg.clone()), TieBreak::ById);
    let pairs: Vec<FeedbackPair> = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let s = run_seed(seed, i);
            let r = run_simulation(template, &raw, s)?;
            let g = run_simulation(template, &integrated, s)?;
            Ok(FeedbackPair {
                seed: s,
                raw: r.rank_vs_early_exposure_correlation,
                integrated: g.rank_vs_early_exposure_correlation,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FeedbackSummary {
        runs: n_runs,
        raw_mean: mean(pairs.iter().map(|p| p.raw)),
        integrated_mean: mean(pairs.iter().map(|p| p.integrated)),
        raw_exceeds_fraction: (n_runs > 0)
            .then(|| pairs.iter().filter(|p| p.raw_exceeds()).count() as f64 / n_runs as f64),
        pairs,
    })
}
