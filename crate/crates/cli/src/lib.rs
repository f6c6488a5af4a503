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

//! `delisort` command line: `rank`, `compare` and `simulate`.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on data errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use delisort_core::baseline::{RandomPolicy, TieBreak};
use delisort_core::integrated::{IntegratedBase, IntegratedConfig};
use delisort_core::io::{load_dataset_dir, load_integrated_config, load_scenario};
use delisort_core::metrics::{
    attention_gini, attention_weights, coverage_at_k, disjoint_groups, first_hit_positions, proportionality_deviation,
    AttentionModel,
};
use delisort_core::model::{ApprovalProfile, ProposalId, Purpose, RankedList, SortContext, UserId};
use delisort_core::sim::{experiment_feedback_loop_with, experiment_timing, run_batch, run_simulation};
use delisort_core::sorter::{Method, MethodSpec, RankInput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(delisort_core::Error),
}

impl From<delisort_core::Error> for CliError {
    fn from(e: delisort_core::Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "delisort", version, about = "Sort, compare and simulate deliberation-platform proposal lists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the proposals of a dataset with one method.
    Rank(RankArgs),
    /// Rank with several methods and report list-quality metrics side by side.
    Compare(CompareArgs),
    /// Run the attention simulator on a scenario file.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Id,
    Oldest,
    Newest,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::Id => TieBreak::ById,
            TieBreakArg::Oldest => TieBreak::OldestFirst,
            TieBreakArg::Newest => TieBreak::NewestFirst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    PerView,
    PerSession,
    Daily,
}

impl From<PolicyArg> for RandomPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::PerView => RandomPolicy::PerView,
            PolicyArg::PerSession => RandomPolicy::PerSession,
            PolicyArg::Daily => RandomPolicy::DailyShared,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Approvals,
    Seqpav,
    Seqphragmen,
    Coverage,
}

impl From<BaseArg> for IntegratedBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Approvals => IntegratedBase::ApprovalCount,
            BaseArg::Seqpav => IntegratedBase::SeqPav,
            BaseArg::Seqphragmen => IntegratedBase::SeqPhragmen,
            BaseArg::Coverage => IntegratedBase::GreedyCoverage,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PurposeArg {
    Online,
    Offline,
    Voting,
}

impl From<PurposeArg> for Purpose {
    fn from(p: PurposeArg) -> Self {
        match p {
            PurposeArg::Online => Purpose::OnlineDeliberation,
            PurposeArg::Offline => Purpose::OfflineDeliberation,
            PurposeArg::Voting => Purpose::Voting,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    None,
    Timing,
    Feedback,
}

/// Tie-breaking and per-method parameters shared by every subcommand.
#[derive(Args)]
struct MethodOptions {
    #[arg(long, value_enum, default_value = "id")]
    tiebreak: TieBreakArg,
    #[arg(long, value_enum, default_value = "per-view")]
    random_policy: PolicyArg,
    /// Session key for the per-session random policy.
    #[arg(long)]
    session_key: Option<String>,
    /// Date sorting: oldest proposals first instead of newest.
    #[arg(long)]
    oldest_first: bool,
    /// Cost sorting: cheapest proposals first instead of most expensive.
    #[arg(long)]
    lowest_first: bool,
    /// Ratio sorting: pseudo-approvals added to every proposal.
    #[arg(long, default_value_t = 1.0)]
    prior_approvals: f64,
    /// Ratio sorting: pseudo-evaluations added to every proposal.
    #[arg(long, default_value_t = 2.0)]
    prior_total: f64,
    /// Most-active sorting: trailing window in seconds.
    #[arg(long, default_value_t = 3 * 86_400)]
    window: i64,
    /// Greedy coverage: stop counting once every user is covered instead of starting a new layer.
    #[arg(long)]
    no_reset: bool,
    /// Integrated sorter settings file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_views: Option<u64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long, value_enum)]
    base: Option<BaseArg>,
    #[arg(long)]
    tag_window: Option<usize>,
    #[arg(long)]
    author_cap: Option<usize>,
}

impl MethodOptions {
    fn integrated_config(&self) -> CliResult<IntegratedConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_integrated_config(path)?,
            None => IntegratedConfig::default(),
        };
        if let Some(v) = self.min_views {
            cfg.min_views = v;
        }
        if let Some(z) = self.z {
            cfg.z = z;
        }
        if let Some(b) = self.base {
            cfg.base = b.into();
        }
        if let Some(w) = self.tag_window {
            cfg.tag_window = w;
        }
        if let Some(c) = self.author_cap {
            cfg.author_cap = c;
        }
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    fn spec(&self, name: &str) -> CliResult<MethodSpec> {
        let method = match name {
            "date" => Method::Date { newest_first: !self.oldest_first },
            "ratio" => Method::Ratio { prior_approvals: self.prior_approvals, prior_total: self.prior_total },
            "active" => Method::Active { window: self.window },
            "cost" => Method::Cost { highest_first: !self.lowest_first },
            "random" => {
                let policy = self.random_policy.into();
                if policy == RandomPolicy::PerSession && self.session_key.is_none() {
                    return Err(CliError::Usage("--random-policy per-session requires --session-key".into()));
                }
                Method::Random { policy }
            }
            "coverage" => Method::Coverage { reset_on_saturation: !self.no_reset },
            "integrated" => Method::Integrated(self.integrated_config()?),
            other => Method::by_name(other).ok_or_else(|| {
                CliError::Usage(format!("unknown method `{other}`; valid methods: {}", Method::NAMES.join(", ")))
            })?,
        };
        Ok(MethodSpec::new(method, self.tiebreak.into()))
    }
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    method: String,
    /// Directory holding proposals.{csv,jsonl} and optionally events and views files.
    #[arg(long)]
    input_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluation time in epoch seconds; defaults to the current time.
    #[arg(long)]
    now: Option<i64>,
    #[arg(long)]
    viewer: Option<String>,
    #[arg(long, value_enum, default_value = "online")]
    purpose: PurposeArg,
    /// Keep only the first N positions.
    #[arg(long)]
    top: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    options: MethodOptions,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long)]
    input_dir: PathBuf,
    /// `top:K` or `geometric:P`.
    #[arg(long, default_value = "geometric:0.7")]
    attention: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    now: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    options: MethodOptions,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "approvals")]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, value_enum, default_value = "none")]
    experiment: Experiment,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    options: MethodOptions,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Rank(a) => cmd_rank(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn wall_clock() -> i64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs() as i64)
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    let io_err = |path: &Path, source| CliError::Data(delisort_core::Error::Io { path: path.to_owned(), source });
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn context(seed: u64, now: Option<i64>, options: &MethodOptions) -> SortContext {
    let mut ctx = SortContext::new(now.unwrap_or_else(wall_clock), seed);
    if let Some(key) = &options.session_key {
        ctx = ctx.with_session(key.clone());
    }
    ctx
}

fn cmd_rank(a: RankArgs) -> CliResult<()> {
    let spec = a.options.spec(&a.method)?;
    let mut ctx = context(a.seed, a.now, &a.options);
    ctx.purpose = a.purpose.into();
    if let Some(v) = a.viewer {
        ctx = ctx.with_viewer(UserId::new(v).map_err(|e| CliError::Usage(e.to_string()))?);
    }
    let data = load_dataset_dir(&a.input_dir)?;
    let profile = data.profile()?;
    let inspections = data.inspections();
    let input =
        RankInput { proposals: &data.proposals, profile: &profile, events: &data.events, inspections: &inspections };
    let mut list = spec.rank(&input, &ctx)?;
    if let Some(top) = a.top {
        list.truncate(top);
    }
    write_json(&list, a.out.as_deref())
}

#[derive(Serialize)]
struct FirstHitSummary {
    /// Users approving at least one listed proposal.
    users: usize,
    p50: Option<usize>,
    p90: Option<usize>,
    max: Option<usize>,
}

#[derive(Serialize)]
struct GroupFirstHit {
    size: usize,
    proposals: usize,
    first_hit: Option<usize>,
}

#[derive(Serialize)]
struct MethodReport {
    method: String,
    prefix: Vec<ProposalId>,
    coverage_at_k: Option<f64>,
    first_hit: FirstHitSummary,
    /// Present only when approvers form disjoint groups.
    group_first_hit: Option<Vec<GroupFirstHit>>,
    proportionality_deviation: Option<f64>,
    /// Gini of attention across proposals under the attention model.
    attention_gini: Option<f64>,
    /// Gini of the attention landing on each active user's approved proposals.
    approver_attention_gini: Option<f64>,
}

#[derive(Serialize)]
struct CompareReport {
    k: usize,
    proposals: usize,
    users: usize,
    attention: AttentionModel,
    methods: Vec<MethodReport>,
}

/// Nearest-rank percentile of sorted values.
fn percentile(sorted: &[usize], q: f64) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

fn method_report(
    profile: &ApprovalProfile,
    list: RankedList,
    k: usize,
    attention: AttentionModel,
) -> CliResult<MethodReport> {
    let n = list.len();
    let mut hits: Vec<usize> = first_hit_positions(profile, &list.order).into_values().flatten().collect();
    hits.sort_unstable();
    let first_hit = FirstHitSummary {
        users: hits.len(),
        p50: percentile(&hits, 0.5),
        p90: percentile(&hits, 0.9),
        max: hits.last().copied(),
    };
    let groups = disjoint_groups(profile).ok();
    let group_first_hit = groups.as_ref().map(|gs| {
        gs.iter()
            .map(|g| GroupFirstHit {
                size: g.members.len(),
                proposals: g.proposals.len(),
                first_hit: g.proposals.iter().filter_map(|p| list.position(p)).min(),
            })
            .collect()
    });
    let proportionality =
        if groups.is_some() && n > 0 { Some(proportionality_deviation(profile, &list.order, k)?) } else { None };
    let weights: Vec<f64> = attention_weights(n, attention);
    let user_mass: Vec<f64> = (0..profile.num_users())
        .map(|u| {
            profile.approved_by(&profile.users()[u]).filter_map(|p| list.position(p)).map(|pos| weights[pos - 1]).sum()
        })
        .collect();
    let active: Vec<f64> = profile
        .users()
        .iter()
        .zip(&user_mass)
        .filter(|(u, _)| profile.approved_by(u).next().is_some())
        .map(|(_, &m)| m)
        .collect();
    Ok(MethodReport {
        method: list.method.clone(),
        prefix: list.order.iter().take(k).cloned().collect(),
        coverage_at_k: (n > 0).then(|| coverage_at_k(profile, &list.order, k)).transpose()?,
        first_hit,
        group_first_hit,
        proportionality_deviation: proportionality,
        attention_gini: attention_gini(&weights).ok(),
        approver_attention_gini: attention_gini(&active).ok(),
    })
}

fn cmd_compare(a: CompareArgs) -> CliResult<()> {
    let attention: AttentionModel =
        a.attention.parse().map_err(|e: delisort_core::Error| CliError::Usage(e.to_string()))?;
    let specs = a.methods.iter().map(|m| a.options.spec(m.trim())).collect::<CliResult<Vec<_>>>()?;
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let data = load_dataset_dir(&a.input_dir)?;
    let n = data.proposals.len();
    if n > 0 && a.k > n {
        return Err(CliError::Usage(format!("--k {} exceeds the {n} listed proposals", a.k)));
    }
    let profile = data.profile()?;
    let inspections = data.inspections();
    let input =
        RankInput { proposals: &data.proposals, profile: &profile, events: &data.events, inspections: &inspections };
    let ctx = context(a.seed, a.now, &a.options);
    let methods = specs
        .iter()
        .map(|spec| method_report(&profile, spec.rank(&input, &ctx)?, a.k, attention))
        .collect::<CliResult<Vec<_>>>()?;
    let report = CompareReport { k: a.k, proposals: n, users: profile.num_users(), attention, methods };
    write_json(&report, a.out.as_deref())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let spec = a.options.spec(&a.method)?;
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let scenario = load_scenario(&a.scenario)?;
    let out = a.out.as_deref();
    match a.experiment {
        Experiment::None if a.runs == 1 => write_json(&run_simulation(&scenario, &spec, a.seed)?, out),
        Experiment::None => write_json(&run_batch(&scenario, &spec, a.seed, a.runs)?, out),
        Experiment::Timing => write_json(&experiment_timing(&scenario, &spec, a.seed, a.runs)?, out),
        Experiment::Feedback => {
            let cfg = a.options.integrated_config()?;
            let summary = experiment_feedback_loop_with(&scenario, &cfg, a.seed, a.runs)?;
            let mut value = serde_json::to_value(&summary).expect("summary serializes");
            value["integrated_config"] = serde_json::to_value(&cfg).expect("config serializes");
            write_json(&value, out)
        }
    }
}
