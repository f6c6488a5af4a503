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

mod common;

use common::arb_instance;
use delisort_core::baseline::{sort_by_approvals, RandomPolicy, TieBreak};
use delisort_core::model::{build_profile, uid, EvaluationEvent, SortContext};
use delisort_core::sorter::{Method, MethodSpec};
use proptest::prelude::*;

const TIEBREAKS: [TieBreak; 3] = [TieBreak::ById, TieBreak::OldestFirst, TieBreak::NewestFirst];

fn all_specs(tiebreak: TieBreak) -> Vec<MethodSpec> {
    let mut specs: Vec<MethodSpec> =
        Method::NAMES.iter().map(|n| MethodSpec::new(Method::by_name(n).unwrap(), tiebreak)).collect();
    for policy in [RandomPolicy::PerSession, RandomPolicy::DailyShared] {
        specs.push(MethodSpec::new(Method::Random { policy }, tiebreak));
    }
    specs.push(MethodSpec::new(Method::Date { newest_first: false }, tiebreak));
    specs.push(MethodSpec::new(Method::Cost { highest_first: false }, tiebreak));
    specs.push(MethodSpec::new(Method::Coverage { reset_on_saturation: false }, tiebreak));
    specs
}

fn ctx(seed: u64) -> SortContext {
    SortContext::new(5 * 3_600, seed).with_session("viewer-session")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn every_sorter_permutes_and_is_deterministic(inst in arb_instance(10, 10), seed in any::<u64>(), t in 0usize..3) {
        for spec in all_specs(TIEBREAKS[t]) {
            let a = spec.rank(&inst.input(), &ctx(seed)).unwrap();
            let b = spec.rank(&inst.input(), &ctx(seed)).unwrap();
            prop_assert!(a.is_permutation_of(&inst.proposals), "{}", spec.method.name());
            prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }

    #[test]
    fn comparators_are_consistent(inst in arb_instance(10, 10), t in 0usize..3) {
        let tb = TIEBREAKS[t];
        let rank = |m: Method| MethodSpec::new(m, tb).rank(&inst.input(), &ctx(0)).unwrap().order;

        let approvals = rank(Method::Approvals);
        for w in approvals.windows(2) {
            prop_assert!(inst.profile.approver_count(&w[0]) >= inst.profile.approver_count(&w[1]));
        }
        let newest = rank(Method::Date { newest_first: true });
        for w in newest.windows(2) {
            prop_assert!(inst.proposal(&w[0]).submitted_at >= inst.proposal(&w[1]).submitted_at);
        }
        let oldest = rank(Method::Date { newest_first: false });
        for w in oldest.windows(2) {
            prop_assert!(inst.proposal(&w[0]).submitted_at <= inst.proposal(&w[1]).submitted_at);
        }
        let comments = rank(Method::Comments);
        for w in comments.windows(2) {
            prop_assert!(inst.proposal(&w[0]).comment_count >= inst.proposal(&w[1]).comment_count);
        }
        let cost = rank(Method::Cost { highest_first: true });
        for w in cost.windows(2) {
            match (inst.proposal(&w[0]).cost, inst.proposal(&w[1]).cost) {
                (Some(a), Some(b)) => prop_assert!(a >= b),
                (None, Some(_)) => prop_assert!(false, "uncosted before costed"),
                _ => {}
            }
        }
        let ratio = rank(Method::Ratio { prior_approvals: 1.0, prior_total: 2.0 });
        let score = |id| {
            let a = inst.profile.approver_count(id) as f64;
            let d = inst.profile.disapprover_count(id) as f64;
            (a + 1.0) / (a + d + 2.0)
        };
        for w in ratio.windows(2) {
            prop_assert!(score(&w[0]) >= score(&w[1]) - 1e-12);
        }
    }

    #[test]
    fn equal_keys_follow_the_tiebreak(inst in arb_instance(10, 6)) {
        let order = sort_by_approvals(&inst.profile, &inst.proposals, TieBreak::ById).order;
        for w in order.windows(2) {
            if inst.profile.approver_count(&w[0]) == inst.profile.approver_count(&w[1]) {
                prop_assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn an_extra_approval_never_demotes(inst in arb_instance(10, 10), pick in any::<proptest::sample::Index>(), t in 0usize..3) {
        let tb = TIEBREAKS[t];
        let target = inst.proposals[pick.index(inst.proposals.len())].id.clone();
        let before = sort_by_approvals(&inst.profile, &inst.proposals, tb);
        let mut events = inst.events.clone();
        events.push(EvaluationEvent::approve(uid("newcomer"), target.clone(), 0));
        let profile = build_profile(&events, &inst.proposals).unwrap();
        let after = sort_by_approvals(&profile, &inst.proposals, tb);
        prop_assert!(after.position(&target) <= before.position(&target));
    }
}
