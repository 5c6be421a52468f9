//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every comparison is exact.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use qadjoint::chevalley::{self, group_closure, one_param_check, Closure, PrimeField, DEFAULT_CAP};
use qadjoint::verify::{
    check_operator_properties, check_relations_with, check_string_norms, gram_closed_form, gram_from_contract,
    Generators,
};

use common::{exp_oracle, exp_series, integer_generator, reduce, rs, ALL_PRESETS, RELATION_PRESETS, SMALL_RANK_PRESETS};

type Outcome = Result<String, Vec<String>>;
type Criterion = (&'static str, fn() -> Outcome);

fn collect(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures)
    }
}

fn operator_check(names: &[&str], wanted: &[&str]) -> Outcome {
    let mut failures = Vec::new();
    let mut instances = 0;
    for name in names {
        let r = rs(name);
        let gens = Generators::build(&r);
        let mut report = check_relations_with(&r, &gens);
        report.merge(check_operator_properties(&r, &gens));
        for want in wanted {
            let check = report.check(want).unwrap_or_else(|| panic!("no check {want}"));
            instances += check.instances_checked;
            if !check.passed() {
                failures.push(format!("{name} {want}: {:?}", check.failures.first()));
            }
        }
    }
    collect(failures, format!("{} types, {instances} instances", names.len()))
}

const RELATION_CHECKS: &[&str] = &[
    "relation_k_product",
    "relation_k_e",
    "relation_k_f",
    "relation_ef_commutator",
    "relation_serre_e",
    "relation_serre_f",
];

fn criterion_1() -> Outcome {
    operator_check(RELATION_PRESETS, RELATION_CHECKS)
}

fn criterion_1_stress() -> Outcome {
    operator_check(&["E8"], RELATION_CHECKS)
}

fn criterion_2() -> Outcome {
    operator_check(RELATION_PRESETS, &["positivity"])
}

fn criterion_3() -> Outcome {
    operator_check(RELATION_PRESETS, &["divided_power_consistency"])
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let names = ["A1", "A2", "A3", "B2", "C3", "G2", "F4"];
    let mut entries = 0;
    for name in names {
        let r = rs(name);
        let closed = gram_closed_form(&r);
        match gram_from_contract(&r) {
            Ok(solved) => {
                entries += closed.dim() * closed.dim();
                let diffs = solved.differences(&closed);
                if !diffs.is_empty() {
                    failures.push(format!("{name}: {} entries differ, first {:?}", diffs.len(), diffs[0]));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    collect(failures, format!("{} types, {entries} entries", names.len()))
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut instances = 0;
    let mut lengths = BTreeSet::new();
    for name in ["B2", "G2", "F4"] {
        let r = rs(name);
        for i in r.datum().nodes() {
            for n in 0..r.len() {
                if r.q(i, n) == 0 && r.p(i, n) > 0 {
                    lengths.insert(r.p(i, n));
                }
            }
        }
        match gram_from_contract(&r).and_then(|g| check_string_norms(&r, &g)) {
            Ok(report) => {
                let c = report.check("string_norm_recursion").unwrap();
                instances += c.instances_checked;
                if !c.passed() {
                    failures.push(format!("{name}: {:?}", c.failures));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    if lengths != BTreeSet::from([1, 2, 3]) {
        failures.push(format!("string lengths covered {lengths:?}, expected {{1, 2, 3}}"));
    }
    collect(failures, format!("{instances} instances, string lengths {lengths:?}"))
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0;
    for name in ALL_PRESETS {
        let report = rs(name).check_root_facts();
        checks += report.entries.len();
        failures.extend(report.failures().map(|c| format!("{name} {} at {}", c.check, c.location)));
    }
    collect(failures, format!("{} types, {checks} checks", ALL_PRESETS.len()))
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut compared = 0;
    for name in SMALL_RANK_PRESETS {
        let r = rs(name);
        for i in r.datum().nodes() {
            for raise in [true, false] {
                let op = if raise { qadjoint::adjoint::build_e(&r, i) } else { qadjoint::adjoint::build_f(&r, i) };
                let specialized: Vec<Vec<i64>> = chevalley::specialize(&op).rows().map(<[i64]>::to_vec).collect();
                let oracle = integer_generator(&r, i, raise);
                if specialized != oracle {
                    failures.push(format!("{name} node {} raise={raise}: specialization differs", i + 1));
                }
                let Some(series) = exp_series(&oracle) else {
                    failures.push(format!("{name} node {}: exponential not integral", i + 1));
                    continue;
                };
                for p in [2u32, 3, 5] {
                    let field = PrimeField::new(p as u64).unwrap();
                    for z in 0..p {
                        let built = if raise {
                            chevalley::x_gen(&r, i, z, field)
                        } else {
                            chevalley::y_gen(&r, i, z, field)
                        };
                        let built: Vec<Vec<u32>> = built.rows().map(<[u32]>::to_vec).collect();
                        compared += 1;
                        if reduce(&exp_oracle(&series, z as i64), p) != built {
                            failures.push(format!("{name} node {} raise={raise} p={p} z={z}", i + 1));
                        }
                    }
                }
            }
        }
    }
    collect(failures, format!("{} types, {compared} matrices", SMALL_RANK_PRESETS.len()))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for name in SMALL_RANK_PRESETS {
        let r = rs(name);
        for p in [2u64, 3, 5, 7] {
            let field = PrimeField::new(p).unwrap();
            for i in r.datum().nodes() {
                let report = one_param_check(&r, i, field).unwrap();
                pairs += report.pairs_checked;
                if !report.passed() {
                    failures.push(format!("{name} p={p}: {:?}", report.failures.first()));
                }
            }
        }
    }
    collect(failures, format!("{} types, {pairs} pairs", SMALL_RANK_PRESETS.len()))
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let mut found = Vec::new();
    for (name, p, expected) in
        [("A1", 2, 6u64), ("A1", 3, 12), ("A2", 2, 168), ("B2", 2, 720), ("G2", 2, 12096), ("A2", 3, 5616)]
    {
        let r = rs(name);
        let field = PrimeField::new(p).unwrap();
        let closure = group_closure(&chevalley::generators(&r, field), DEFAULT_CAP).unwrap();
        let classical = chevalley::classical_order(r.datum().preset_type().unwrap(), p).unwrap();
        if closure != Closure::Order(expected) || classical != expected as u128 {
            failures.push(format!("{name}/F{p}: closure {closure:?}, classical {classical}, expected {expected}"));
        }
        found.push(format!("{name}/F{p}={expected}"));
    }
    collect(failures, found.join(" "))
}

fn criterion_10() -> Outcome {
    let invocations: &[&[&str]] = &[
        &["roots", "G2"],
        &["roots", "F4", "--format", "json"],
        &["matrices", "B2"],
        &["matrices", "G2", "--gen", "E:1", "--divided", "3", "--format", "json"],
        &["matrices", "A2", "--gen", "K:1,-1"],
        &["verify", "A2", "--suite", "all"],
        &["verify", "B2", "--suite", "all", "--format", "json"],
        &["gram", "B2", "--source", "both"],
        &["gram", "G2", "--format", "json"],
        &["chevalley", "A2", "--p", "2", "--order"],
        &["chevalley", "G2", "--p", "3", "--check-one-param", "--format", "text"],
        &["chevalley", "A3", "--p", "3", "--cap", "500"],
        &["roots", "BogusType"],
    ];
    let mut failures = Vec::new();
    for args in invocations {
        let run = || Command::new(env!("CARGO_BIN_EXE_qadjoint")).args(*args).output().unwrap();
        let (a, b) = (run(), run());
        if a.stdout != b.stdout || a.stderr != b.stderr || a.status != b.status {
            failures.push(format!("{args:?}: outputs differ"));
        }
    }
    collect(failures, format!("{} invocations", invocations.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1", criterion_1),
        ("1 (E8 stress)", criterion_1_stress),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(summary) => println!("criterion {id}: PASS ({summary}; {secs:.2}s)"),
            Err(failures) => {
                failed += 1;
                println!("criterion {id}: FAIL ({} failures; {secs:.2}s)", failures.len());
                for f in failures.iter().take(10) {
                    println!("    {f}");
                }
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
