mod common;

use qadjoint::verify::{check_relations, gram_closed_form, gram_from_contract, run_suite, Suite};

use common::{rs, ALL_PRESETS, SMALL_RANK_PRESETS};

#[test]
fn relations_hold_for_every_preset() {
    for name in ALL_PRESETS {
        let report = check_relations(&rs(name));
        assert!(report.all_pass(), "{name}:\n{report}");
    }
}

#[test]
fn contract_gram_equals_closed_form_up_to_rank_four() {
    for name in SMALL_RANK_PRESETS {
        let r = rs(name);
        let solved = gram_from_contract(&r).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(solved.differences(&gram_closed_form(&r)), vec![], "{name}");
    }
}

#[test]
fn full_suite_on_small_types() {
    for name in ["A3", "B3", "C3", "D4", "G2"] {
        let report = run_suite(&rs(name), Suite::All);
        assert!(report.all_pass(), "{name}:\n{report}");
        assert_eq!(report.failure_count(), 0);
    }
}
