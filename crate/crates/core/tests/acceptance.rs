//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Case counts, seeds and time limits are pinned below.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use invsat_core::harness::{
    bench_scaling, differential_run, generate, sampled_specs, to_csv, BenchConfig, CampaignConfig,
    CampaignReport, Classification, InstanceSpec,
};
use invsat_core::{
    candidate_formula, close_clauses, decide, is_closed_3limited, prefix_cover,
    three_limited_closure, verify_witness, Answer, Clause, DecideOptions, Formula, Literal,
    ModelSet, PartialAssignment, PrefixAssignment, TotalAssignment, VarIndex,
    DEFAULT_ENUMERATION_CAP,
};

const PROPERTY_CASES: u32 = 10_000;
const CLOSURE_MAX_N: usize = 8;
const CLOSURE_MAX_CLAUSES: usize = 30;
const RESTRICTION_MAX_N: usize = 10;
const SAMPLED_INSTANCES: usize = 100_000;
const SAMPLED_N: (usize, usize) = (5, 12);
const CAMPAIGN_SEED: u64 = 0x1357_9bdf;
const DETERMINISM_SUBSET: usize = 2_000;
/// Thread count of the parallel side of the determinism check, fixed so the
/// comparison is meaningful on single-core machines too.
const DETERMINISM_JOBS: usize = 4;
const BENCH_N_MAX: usize = 30;
const BENCH_TRIALS: usize = 10;
const BENCH_TIMEOUT: Duration = Duration::from_secs(60);
const GOLDEN_BUDGET: Duration = Duration::from_secs(1);

const EXAMPLE: [&str; 8] = [
    "00111", "01011", "10101", "11100", "11111", "10011", "01101", "00100",
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn check(cond: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: cond,
        detail: detail.into(),
    }
}

fn example() -> ModelSet {
    ModelSet::from_strs(&EXAMPLE).unwrap()
}

fn formula(n: usize, clauses: &[&[i64]]) -> Formula {
    Formula::new(n, clauses.iter().map(|c| Clause::from_dimacs(c)))
}

fn prefixes(strs: &[&str]) -> Vec<PrefixAssignment> {
    strs.iter().map(|s| s.parse().unwrap()).collect()
}

fn golden_example_1() -> Outcome {
    let expected_candidate = formula(
        5,
        &[
            &[1, 2, 3],
            &[-1, -2, 3],
            &[1, -2, 5],
            &[-1, 2, 5],
            &[1, 3, 4],
            &[-1, 3, 4],
            &[1, 3, 5],
            &[-1, 3, 5],
            &[1, -4, 5],
            &[-1, -4, 5],
            &[2, 3, 4],
            &[-2, 3, 4],
            &[2, 3, 5],
            &[-2, 3, 5],
            &[2, -4, 5],
            &[-2, -4, 5],
            &[3, 4, 5],
            &[3, 4, -5],
            &[3, -4, 5],
            &[-3, -4, 5],
        ],
    );
    let expected_closed = formula(
        5,
        &[
            &[1, 2, 3],
            &[-1, -2, 3],
            &[1, -2, 5],
            &[-1, 2, 5],
            &[3, 4],
            &[3, 5],
            &[-4, 5],
        ],
    );
    let started = Instant::now();
    let candidate = candidate_formula(&example()).unwrap();
    let closed = three_limited_closure(&candidate).unwrap().closed;
    let elapsed = started.elapsed();
    if candidate != expected_candidate {
        return fail(format!(
            "candidate has {} clauses: {candidate}",
            candidate.len()
        ));
    }
    if closed != expected_closed {
        return fail(format!("closure is {closed}"));
    }
    check(
        elapsed < GOLDEN_BUDGET,
        format!("20 candidate clauses, 7 closed clauses, {elapsed:?} (limit {GOLDEN_BUDGET:?})"),
    )
}

fn golden_example_2() -> Outcome {
    let cover = prefix_cover(&example(), 4).unwrap();
    let level4: Vec<PrefixAssignment> = cover.level(4).copied().collect();
    let level5: Vec<PrefixAssignment> = cover.level(5).copied().collect();
    let want4 = prefixes(&["0100", "1011", "1000", "0111"]);
    let want5 = prefixes(&[
        "00110", "01010", "10100", "11101", "11110", "10010", "01100", "00101",
    ]);
    let as_set = |v: &[PrefixAssignment]| v.iter().copied().collect::<BTreeSet<_>>();
    check(
        as_set(&level4) == as_set(&want4) && as_set(&level5) == as_set(&want5) && cover.len() == 12,
        format!(
            "k=4: {}; k=5: {}",
            level4
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
            level5
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    )
}

fn golden_example_3() -> Outcome {
    let phi = example();
    let report = match decide(&phi, &DecideOptions::paper_mode()) {
        Ok(r) => r,
        Err(e) => return fail(format!("decide failed: {e}")),
    };
    let expected: TotalAssignment = "10111".parse().unwrap();
    let p0100 = "0100".parse().unwrap();
    let p1011 = "1011".parse().unwrap();
    let x5 = formula(5, &[&[5]]);
    let empty_at_0100 = report.trace_for(&p0100).is_some_and(|e| e.contains_empty);
    let x5_at_1011 = report.trace_for(&p1011).is_some_and(|e| e.closure == x5);
    check(
        report.answer == Answer::ExtraModelExists
            && report.witness == Some(expected)
            && empty_at_0100
            && x5_at_1011
            && verify_witness(&phi, &expected),
        format!(
            "answer={:?} witness={} I=0100 contains_empty={empty_at_0100} I=1011 closure=(x5):{x5_at_1011}",
            report.answer,
            report.witness.map(|w| w.to_string()).unwrap_or_default()
        ),
    )
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: PROPERTY_CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn clause_strategy(n: usize, max_width: usize) -> impl Strategy<Value = Clause> {
    (
        subsequence((1..=n as u32).collect::<Vec<_>>(), 1..=max_width.min(n)),
        vec(any::<bool>(), max_width),
    )
        .prop_map(|(vars, signs)| {
            Clause::new(
                vars.iter()
                    .zip(signs)
                    .map(|(&v, s)| Literal::new(VarIndex::new(v), s)),
            )
            .unwrap()
        })
}

fn clause_list(
    max_n: usize,
    max_clauses: usize,
    max_width: usize,
) -> impl Strategy<Value = (usize, Vec<Clause>)> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), vec(clause_strategy(n, max_width), 0..=max_clauses)))
}

fn closure_battery() -> Outcome {
    let strategy =
        clause_list(CLOSURE_MAX_N, CLOSURE_MAX_CLAUSES, 3).prop_flat_map(|(n, clauses)| {
            (Just(n), Just(clauses.clone()), Just(clauses).prop_shuffle())
        });
    let result = runner().run(&strategy, |(n, clauses, shuffled)| {
        let input = Formula::new(n, clauses.iter().cloned());
        let first = close_clauses(n, &clauses).unwrap();
        let permuted = close_clauses(n, &shuffled).unwrap();
        prop_assert_eq!(&first.closed, &permuted.closed, "order dependence");
        prop_assert!(is_closed_3limited(&first.closed), "not closed");
        let again = three_limited_closure(&first.closed).unwrap();
        prop_assert_eq!(&again.closed, &first.closed, "not idempotent");
        prop_assert_eq!(again.resolution_steps + again.subsumption_deletions, 0);
        prop_assert_eq!(
            first
                .closed
                .enumerate_models(DEFAULT_ENUMERATION_CAP)
                .unwrap(),
            input.enumerate_models(DEFAULT_ENUMERATION_CAP).unwrap(),
            "models changed"
        );
        Ok(())
    });
    match result {
        Ok(()) => pass(format!(
            "{PROPERTY_CASES} cases, n<={CLOSURE_MAX_N}, <={CLOSURE_MAX_CLAUSES} clauses: order independence, idempotence, model preservation"
        )),
        Err(e) => fail(e.to_string()),
    }
}

fn restriction_battery() -> Outcome {
    let strategy =
        clause_list(RESTRICTION_MAX_N, CLOSURE_MAX_CLAUSES, 4).prop_flat_map(|(n, clauses)| {
            (
                Just(n),
                Just(clauses),
                vec(proptest::option::of(any::<bool>()), n),
            )
        });
    let result = runner().run(&strategy, |(n, clauses, binding)| {
        let f = Formula::new(n, clauses);
        let partial: PartialAssignment = binding
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| (VarIndex::new(i as u32 + 1), b)))
            .collect();
        let restricted = f.restrict(&partial);
        for clause in restricted.clauses() {
            prop_assert!(
                clause
                    .literals()
                    .iter()
                    .all(|l| partial.get(l.var()).is_none()),
                "bound variable survives in {}",
                clause
            );
        }
        // Projection definition: the models of F|I, over the free
        // variables, are exactly the free parts of F's models extending I.
        let free: Vec<usize> = (0..n).filter(|&i| binding[i].is_none()).collect();
        let mut from_f = BTreeSet::new();
        let mut from_restricted = BTreeSet::new();
        for bits in 0..1u64 << n {
            let a = TotalAssignment::new(n, bits);
            let consistent = partial.iter().all(|(v, b)| a.value(v) == b);
            let free_part: Vec<bool> = free
                .iter()
                .map(|&i| a.value(VarIndex::new(i as u32 + 1)))
                .collect();
            if consistent && f.evaluate(&a) {
                from_f.insert(free_part.clone());
            }
            if restricted.evaluate(&a) {
                from_restricted.insert(free_part);
            }
        }
        prop_assert_eq!(from_f, from_restricted);
        Ok(())
    });
    match result {
        Ok(()) => pass(format!(
            "{PROPERTY_CASES} cases, n<={RESTRICTION_MAX_N}, arbitrary partial assignments"
        )),
        Err(e) => fail(e.to_string()),
    }
}

fn cover_exactness() -> Outcome {
    let n = 4;
    let mut checked = 0;
    for spec in InstanceSpec::exhaustive(n) {
        let phi = generate(&spec).unwrap();
        let cover = prefix_cover(&phi, 1).unwrap();
        if cover.len() > n * phi.len() {
            return fail(format!(
                "{spec}: |cover|={} > n|phi|={}",
                cover.len(),
                n * phi.len()
            ));
        }
        for bits in 0..1u64 << n {
            let a = TotalAssignment::new(n, bits);
            if cover.covers(&a) == phi.contains(&a) {
                return fail(format!("{spec}: cover misclassifies {a}"));
            }
        }
        checked += 1;
    }
    check(
        checked == 65_535,
        format!("{checked} model sets over 4 variables"),
    )
}

struct Campaigns {
    exhaustive3: CampaignReport,
    exhaustive4: CampaignReport,
    sampled: CampaignReport,
    deterministic: Result<(), String>,
    elapsed: Duration,
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_campaigns() -> Campaigns {
    let started = Instant::now();
    let config = CampaignConfig {
        jobs: jobs(),
        ..Default::default()
    };
    let exhaustive3 =
        differential_run(&InstanceSpec::exhaustive(3).collect::<Vec<_>>(), &config).unwrap();
    let exhaustive4 =
        differential_run(&InstanceSpec::exhaustive(4).collect::<Vec<_>>(), &config).unwrap();
    let specs = sampled_specs(SAMPLED_N.0, SAMPLED_N.1, SAMPLED_INSTANCES, CAMPAIGN_SEED);
    let sampled = differential_run(&specs, &config).unwrap();

    let subset = &specs[..DETERMINISM_SUBSET];
    let single = differential_run(subset, &CampaignConfig::default()).unwrap();
    let again = differential_run(
        subset,
        &CampaignConfig {
            jobs: DETERMINISM_JOBS,
            ..Default::default()
        },
    )
    .unwrap();
    let deterministic =
        if single.to_text() != again.to_text() || single.summary_json() != again.summary_json() {
            Err("jobs=1 and parallel reports differ".to_string())
        } else if !sampled
            .to_text()
            .contains(&format!("instances={}\n", SAMPLED_INSTANCES))
        {
            Err("sampled report lost instances".to_string())
        } else {
            Ok(())
        };
    Campaigns {
        exhaustive3,
        exhaustive4,
        sampled,
        deterministic,
        elapsed: started.elapsed(),
    }
}

fn reports(c: &Campaigns) -> [(&'static str, &CampaignReport); 3] {
    [
        ("exhaustive n=3", &c.exhaustive3),
        ("exhaustive n=4", &c.exhaustive4),
        ("sampled n=5..12", &c.sampled),
    ]
}

fn witness_soundness(c: &Campaigns) -> Outcome {
    let mut checked = 0;
    let mut sound = 0;
    let mut failures = 0;
    for (_, r) in reports(c) {
        checked += r.summary.witnesses_checked;
        sound += r.summary.witnesses_sound;
        failures += r.summary.witness_failures;
    }
    check(
        checked == sound && failures == 0 && checked > 0,
        format!("{sound}/{checked} witnesses verified, {failures} extraction failures"),
    )
}

fn differential(c: &Campaigns) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = c.deterministic.is_ok();
    for (name, r) in reports(c) {
        let s = &r.summary;
        let unclassified = s.instances - s.generator_errors - s.agreements - s.discrepancies;
        // A PAPER-CLAIM report must be checkable by hand from its text.
        let checkable = r.discrepancies.iter().all(|d| {
            d.classification != Classification::PaperClaim
                || (d.minimized_candidate_models.len() <= 32
                    && d.to_text().contains("minimized_candidate_models="))
        });
        ok &= unclassified == 0 && s.generator_errors == 0 && checkable;
        parts.push(format!(
            "{name}: {} instances, {} agree, {} discrepancies ({} bug, {} paper-claim)",
            s.instances, s.agreements, s.discrepancies, s.implementation_bugs, s.paper_claims
        ));
    }
    if let Err(e) = &c.deterministic {
        parts.push(e.clone());
    } else {
        parts.push(format!("deterministic across jobs=1/{DETERMINISM_JOBS}"));
    }
    parts.push(format!("{:.1?}", c.elapsed));
    check(ok, parts.join("; "))
}

fn quine_probe(c: &Campaigns) -> Outcome {
    let r = &c.exhaustive4;
    let reported = r
        .discrepancies
        .iter()
        .filter(|d| d.quine_mismatch && d.classification == Classification::PaperClaim)
        .count();
    check(
        r.summary.quine_checks > 0 && r.summary.quine_mismatches == reported,
        format!(
            "{} (phi, I) pairs, {} mismatches, {} reported as PAPER-CLAIM",
            r.summary.quine_checks, r.summary.quine_mismatches, reported
        ),
    )
}

fn scaling_bench() -> Outcome {
    let config = BenchConfig {
        n_values: (5..=BENCH_N_MAX).collect(),
        trials: BENCH_TRIALS,
        seed: CAMPAIGN_SEED,
        kmin: 1,
        timeout: Some(BENCH_TIMEOUT),
    };
    let rows = match bench_scaling(&config) {
        Ok(rows) => rows,
        Err(e) => return fail(e.to_string()),
    };
    let csv = to_csv(&rows);
    let has_columns = csv.lines().next().is_some_and(|h| {
        h.contains("step1_closure_us")
            && h.contains("step2_cover_us")
            && h.contains("step3_prefix_closures_us")
    });
    let timeouts: usize = rows.iter().map(|r| r.timeouts).sum();
    let last = rows.last().expect("rows");
    check(
        has_columns && timeouts == 0 && rows.len() == BENCH_N_MAX - 4,
        format!(
            "n=5..{BENCH_N_MAX}, {BENCH_TRIALS} trials, {timeouts} timeouts (limit {BENCH_TIMEOUT:?}); n={} median total {} us, max {} us",
            last.n, last.total_us, last.max_total_us
        ),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |name: &str, outcome: Outcome| {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        failures += !outcome.passed as usize;
        println!("{tag} {name}: {}", outcome.detail);
    };
    report("golden_example_1_candidate_and_closure", golden_example_1());
    report("golden_example_2_prefix_cover", golden_example_2());
    report("golden_example_3_decide_paper_mode", golden_example_3());
    report("closure_engine_battery", closure_battery());
    report("restriction_semantics_battery", restriction_battery());
    report("cover_exactness_exhaustive_n4", cover_exactness());
    let campaigns = run_campaigns();
    report("witness_soundness", witness_soundness(&campaigns));
    report("differential_campaign", differential(&campaigns));
    report("quine_probe_exhaustive_n4", quine_probe(&campaigns));
    report("scaling_bench", scaling_bench());
    for (name, r) in reports(&campaigns) {
        let s = &r.summary;
        println!(
            "  {name}: oracle extra/none {}/{}, restricted already closed {}/{}, kmin=4 divergences {}/{}",
            s.oracle_extra_model,
            s.oracle_no_extra_model,
            s.restricted_already_closed,
            s.quine_checks,
            s.kmin_divergences,
            s.kmin_comparisons
        );
        for d in r.discrepancies.iter().take(3) {
            println!(
                "{}",
                d.to_text()
                    .lines()
                    .map(|l| format!("    {l}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            );
        }
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
