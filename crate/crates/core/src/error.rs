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

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("identifiers must be non-empty")]
    EmptyId,
    #[error("unknown proposal `{0}`")]
    UnknownProposal(String),
    #[error("duplicate proposal `{0}`")]
    DuplicateProposal(String),
    #[error("malformed polarity `{0}`, expected +1 or -1")]
    MalformedPolarity(String),
    #[error("invalid cost {0} for proposal `{1}`")]
    InvalidCost(f64, String),
    #[error("invalid ratio prior: need prior_total > 0 and 0 <= prior_approvals <= prior_total")]
    InvalidPrior,
    #[error("activity window must be positive, got {0}s")]
    InvalidWindow(i64),
    #[error("per-session randomization requires a session key")]
    MissingSessionKey,
    #[error("confidence width z must be positive and finite")]
    InvalidZ,
    #[error(
        "instance too large for exhaustive enumeration: {proposals} proposals, k = {k} \
         (limits: at most {max_proposals} proposals and k <= {max_k})"
    )]
    InstanceTooLarge { proposals: usize, k: usize, max_proposals: usize, max_k: usize },
    #[error("k = {k} is out of range 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("proposal `{0}` appears twice in the prefix")]
    DuplicateInPrefix(String),
    #[error("approver sets of `{0}` and `{1}` overlap without being equal; profile is not disjoint")]
    NonDisjointProfile(String, String),
    #[error("attention weights are all zero")]
    AllZeroWeights,
    #[error("invalid attention model: {0}")]
    InvalidAttention(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{file}:{line}:{column}: {message}")]
    Parse { file: String, line: usize, column: usize, message: String },
    #[error("{file}: references unknown proposal `{id}`")]
    DanglingReference { file: String, id: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
