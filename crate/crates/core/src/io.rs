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

//! Dataset ingestion (CSV with header, or JSON lines) and the flat TOML
//! formats for scenarios and integrated-sorter settings.
//!
//! Column sets:
//!
//! * proposals: `id,title,author,submitted_at,tags,cost,comment_count`
//!   (`tags` semicolon-joined; `body`, `cost` and `comment_count` optional)
//! * events: `user,proposal,polarity,at` (`polarity` is `+1` or `-1`)
//! * views: `proposal,views`
//!
//! Timestamps are integer epoch seconds (UTC).

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::{self, DeserializeOwned, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::integrated::IntegratedConfig;
use crate::metrics::AttentionModel;
use crate::model::{
    build_profile, ApprovalProfile, EvaluationEvent, InspectionStats, Polarity, Proposal, ProposalId, UserId,
};
use crate::sim::{Arrivals, GroupSpec, Scenario};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub proposals: Vec<Proposal>,
    pub events: Vec<EvaluationEvent>,
    pub views: Option<InspectionStats>,
}

impl Dataset {
    pub fn profile(&self) -> Result<ApprovalProfile> {
        build_profile(&self.events, &self.proposals)
    }

    /// Recorded views, or all-zero stats when no views file was given.
    pub fn inspections(&self) -> InspectionStats {
        self.views.clone().unwrap_or_default()
    }
}

#[derive(Default)]
struct Tags(Vec<String>);

impl<'de> Deserialize<'de> for Tags {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Tags;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("semicolon-joined tags or a list of tags")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Tags, E> {
                Ok(Tags(s.split(';').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Tags, E> {
                Ok(Tags(vec![v.to_string()]))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Tags, E> {
                Ok(Tags(vec![v.to_string()]))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Tags, E> {
                Ok(Tags(vec![v.to_string()]))
            }
            fn visit_bool<E: de::Error>(self, v: bool) -> std::result::Result<Tags, E> {
                Ok(Tags(vec![v.to_string()]))
            }
            fn visit_unit<E: de::Error>(self) -> std::result::Result<Tags, E> {
                Ok(Tags(Vec::new()))
            }
            fn visit_none<E: de::Error>(self) -> std::result::Result<Tags, E> {
                Ok(Tags(Vec::new()))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Tags, A::Error> {
                let mut tags = Vec::new();
                while let Some(t) = seq.next_element::<String>()? {
                    tags.push(t);
                }
                Ok(Tags(tags))
            }
        }
        d.deserialize_any(V)
    }
}

struct PolarityField(Polarity);

impl<'de> Deserialize<'de> for PolarityField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PolarityField;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("+1 or -1")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<PolarityField, E> {
                i8::try_from(v)
                    .ok()
                    .and_then(|v| Polarity::try_from(v).ok())
                    .map(PolarityField)
                    .ok_or_else(|| E::custom(format!("malformed polarity `{v}`, expected +1 or -1")))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<PolarityField, E> {
                self.visit_i64(i64::try_from(v).unwrap_or(i64::MAX))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<PolarityField, E> {
                s.parse().map(PolarityField).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Deserialize)]
struct ProposalRow {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    body: String,
    author: String,
    submitted_at: i64,
    #[serde(default)]
    tags: Tags,
    #[serde(default)]
    cost: Option<f64>,
    #[serde(default)]
    comment_count: Option<u64>,
}

#[derive(Deserialize)]
struct EventRow {
    user: String,
    proposal: String,
    polarity: PolarityField,
    at: i64,
}

#[derive(Deserialize)]
struct ViewRow {
    proposal: String,
    views: u64,
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { file: display(path), line, column, message: message.into() }
}

fn is_json_lines(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("jsonl" | "ndjson" | "json"))
}

/// Reads typed rows, each tagged with its 1-based line number.
fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    let mut rows = Vec::new();
    if is_json_lines(path) {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = serde_json::from_str(line).map_err(|e| parse_error(path, i + 1, e.column(), e.to_string()))?;
            rows.push((i + 1, row));
        }
        return Ok(rows);
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_error(path, 1, 1, e.to_string()))?.clone();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record.deserialize(Some(&headers)).map_err(|e| {
            let (column, message) = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => {
                    let field = err.field().map_or(1, |f| f as usize + 1);
                    let name = err
                        .field()
                        .and_then(|f| headers.get(f as usize))
                        .map_or(String::new(), |h| format!("column `{h}`: "));
                    (field, format!("{name}{}", err.kind()))
                }
                _ => (1, e.to_string()),
            };
            parse_error(path, line, column, message)
        })?;
        rows.push((line, row));
    }
    Ok(rows)
}

fn id_at<T>(path: &Path, line: usize, raw: String, make: fn(String) -> Result<T>) -> Result<T> {
    make(raw).map_err(|e| parse_error(path, line, 1, e.to_string()))
}

pub fn load_proposals(path: &Path) -> Result<Vec<Proposal>> {
    let mut seen = HashSet::new();
    let mut proposals = Vec::new();
    for (line, row) in read_rows::<ProposalRow>(path)? {
        let id = id_at(path, line, row.id, ProposalId::new)?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateProposal(id.to_string()));
        }
        let author = id_at(path, line, row.author, UserId::new)?;
        let mut p = Proposal::new(id, author, row.submitted_at)
            .with_tags(row.tags.0)
            .with_comments(row.comment_count.unwrap_or(0));
        if !row.title.is_empty() {
            p.title = row.title;
        }
        p.body = row.body;
        if let Some(c) = row.cost {
            p = p.with_cost(c).map_err(|e| parse_error(path, line, 1, e.to_string()))?;
        }
        proposals.push(p);
    }
    Ok(proposals)
}

fn check_known(path: &Path, known: &HashSet<&ProposalId>, id: &ProposalId) -> Result<()> {
    if known.contains(id) {
        Ok(())
    } else {
        Err(Error::DanglingReference { file: display(path), id: id.to_string() })
    }
}

/// Loads and cross-checks a dataset; every event and view must name a
/// proposal from the proposals file.
pub fn load_dataset(proposals_path: &Path, events_path: Option<&Path>, views_path: Option<&Path>) -> Result<Dataset> {
    let proposals = load_proposals(proposals_path)?;
    let known: HashSet<&ProposalId> = proposals.iter().map(|p| &p.id).collect();
    let mut events = Vec::new();
    if let Some(path) = events_path {
        for (line, row) in read_rows::<EventRow>(path)? {
            let proposal = id_at(path, line, row.proposal, ProposalId::new)?;
            check_known(path, &known, &proposal)?;
            events.push(EvaluationEvent {
                user: id_at(path, line, row.user, UserId::new)?,
                proposal,
                polarity: row.polarity.0,
                at: row.at,
            });
        }
    }
    let views = match views_path {
        None => None,
        Some(path) => {
            let mut stats = InspectionStats::new();
            for (line, row) in read_rows::<ViewRow>(path)? {
                let proposal = id_at(path, line, row.proposal, ProposalId::new)?;
                check_known(path, &known, &proposal)?;
                stats.record(&proposal, row.views);
            }
            Some(stats)
        }
    };
    Ok(Dataset { proposals, events, views })
}

fn find(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["csv", "jsonl", "ndjson"].iter().map(|ext| dir.join(format!("{stem}.{ext}"))).find(|p| p.is_file())
}

/// Loads `proposals.*`, and when present `events.*` and `views.*`, from `dir`
/// (`.csv`, `.jsonl` or `.ndjson`).
pub fn load_dataset_dir(dir: &Path) -> Result<Dataset> {
    let proposals = find(dir, "proposals").ok_or_else(|| Error::Io {
        path: dir.join("proposals.csv"),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "no proposals.csv or proposals.jsonl"),
    })?;
    load_dataset(&proposals, find(dir, "events").as_deref(), find(dir, "views").as_deref())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    n_users: Option<usize>,
    group_sizes: Vec<usize>,
    group_pools: Vec<usize>,
    group_approval_probs: Vec<f64>,
    group_labels: Option<Vec<String>>,
    #[serde(default = "default_arrivals")]
    arrivals: String,
    #[serde(default)]
    burst_times: Vec<u32>,
    horizon: Option<u32>,
    sessions_per_tick: Option<u32>,
    attention: Option<String>,
    resort_every: Option<u32>,
    tick_seconds: Option<i64>,
    report_k: Option<usize>,
    preseed_approvals: Option<bool>,
}

fn default_arrivals() -> String {
    "all-at-start".into()
}

fn toml_error(path: &Path, text: &str, e: &toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((1, 1), |span| {
        let before = &text[..span.start.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    });
    parse_error(path, line, column, e.message())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })
}

/// Parses a flat key-value scenario file.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario> {
    let raw: ScenarioFile = toml::from_str(text).map_err(|e| toml_error(path, text, &e))?;
    let n = raw.group_sizes.len();
    if raw.group_pools.len() != n || raw.group_approval_probs.len() != n {
        return Err(Error::InvalidScenario(
            "group_sizes, group_pools and group_approval_probs must have equal length".into(),
        ));
    }
    if raw.group_labels.as_ref().is_some_and(|l| l.len() != n) {
        return Err(Error::InvalidScenario("group_labels must have one entry per group".into()));
    }
    let groups: Vec<GroupSpec> = (0..n)
        .map(|g| GroupSpec {
            label: raw.group_labels.as_ref().map(|l| l[g].clone()),
            size: raw.group_sizes[g],
            pool_size: raw.group_pools[g],
            approval_prob: raw.group_approval_probs[g],
        })
        .collect();
    let arrivals = match raw.arrivals.as_str() {
        "all-at-start" => Arrivals::AllAtStart,
        "uniform" => Arrivals::UniformOverHorizon,
        "burst" => Arrivals::Burst { times: raw.burst_times },
        other => {
            return Err(Error::InvalidScenario(format!(
                "unknown arrivals `{other}`, expected all-at-start, uniform or burst"
            )))
        }
    };
    let defaults = Scenario::default();
    let attention = match raw.attention {
        Some(s) => s.parse::<AttentionModel>().map_err(|e| Error::InvalidScenario(e.to_string()))?,
        None => defaults.attention,
    };
    let scenario = Scenario {
        n_users: raw.n_users.unwrap_or_else(|| groups.iter().map(|g| g.size).sum()),
        groups,
        arrivals,
        horizon: raw.horizon.unwrap_or(defaults.horizon),
        sessions_per_tick: raw.sessions_per_tick.unwrap_or(defaults.sessions_per_tick),
        attention,
        resort_every: raw.resort_every.unwrap_or(defaults.resort_every),
        tick_seconds: raw.tick_seconds.unwrap_or(defaults.tick_seconds),
        report_k: raw.report_k.unwrap_or(defaults.report_k),
        preseed_approvals: raw.preseed_approvals.unwrap_or(defaults.preseed_approvals),
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&read_text(path)?, path)
}

/// Reads `min_views`, `z`, `base`, `tag_window` and `author_cap`; absent keys keep defaults.
pub fn load_integrated_config(path: &Path) -> Result<IntegratedConfig> {
    let text = read_text(path)?;
    let cfg: IntegratedConfig = toml::from_str(&text).map_err(|e| toml_error(path, &text, &e))?;
    cfg.validate()?;
    Ok(cfg)
}
