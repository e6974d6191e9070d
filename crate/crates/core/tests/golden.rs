use invsat_core::harness::{analyze, CampaignConfig};
use invsat_core::{
    candidate_formula, closed_candidate_formula, cover_level, decide, oracle_decide,
    verify_witness, Answer, Clause, DecideOptions, Formula, ModelSet, PrefixAssignment,
    TotalAssignment, DEFAULT_ENUMERATION_CAP,
};

fn phi() -> ModelSet {
    ModelSet::from_strs(&[
        "00111", "01011", "10101", "11100", "11111", "10011", "01101", "00100",
    ])
    .unwrap()
}

fn formula(clauses: &[&[i64]]) -> Formula {
    Formula::new(5, clauses.iter().map(|c| Clause::from_dimacs(c)))
}

fn prefixes(strs: &[&str]) -> Vec<PrefixAssignment> {
    strs.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn candidate_formula_of_example() {
    let f = candidate_formula(&phi()).unwrap();
    assert_eq!(f.len(), 20);
    for c in [[1, 2, 3], [-1, -2, 3], [3, 4, -5], [-3, -4, 5], [-2, -4, 5]] {
        assert!(f.contains(&Clause::from_dimacs(&c)), "missing {c:?}");
    }
    assert!(!f.contains(&Clause::from_dimacs(&[-3, 4, 5])));
}

#[test]
fn closure_of_example() {
    let closed = closed_candidate_formula(&phi()).unwrap();
    let expected = formula(&[
        &[1, 2, 3],
        &[-1, -2, 3],
        &[1, -2, 5],
        &[-1, 2, 5],
        &[3, 4],
        &[3, 5],
        &[-4, 5],
    ]);
    assert_eq!(closed, expected);
}

#[test]
fn cover_levels_in_generation_order() {
    assert_eq!(
        cover_level(&phi(), 4).unwrap(),
        prefixes(&["0100", "1011", "1000", "0111"])
    );
    assert_eq!(
        cover_level(&phi(), 5).unwrap(),
        prefixes(&["00110", "01010", "10100", "11101", "11110", "10010", "01100", "00101"])
    );
}

#[test]
fn short_levels_are_refuted_by_the_candidate() {
    assert!(cover_level(&phi(), 1).unwrap().is_empty());
    assert!(cover_level(&phi(), 2).unwrap().is_empty());
    // 000 and 110 are excluded by (x1 x2 x3) and (-x1 -x2 x3).
    assert_eq!(cover_level(&phi(), 3).unwrap(), prefixes(&["000", "110"]));
    let full = decide(&phi(), &DecideOptions::default()).unwrap();
    assert_eq!(full.cover_entries, 14);
    assert!(full.trace[..2].iter().all(|e| e.contains_empty));
    assert_eq!(full.witness, Some("10111".parse().unwrap()));
}

#[test]
fn decide_reproduces_the_worked_example() {
    let report = decide(&phi(), &DecideOptions::paper_mode()).unwrap();
    assert_eq!(report.answer, Answer::ExtraModelExists);
    let witness: TotalAssignment = "10111".parse().unwrap();
    assert_eq!(report.witness, Some(witness));
    assert_eq!(report.witness_prefix, Some("1011".parse().unwrap()));
    assert!(
        report
            .trace_for(&"0100".parse().unwrap())
            .unwrap()
            .contains_empty
    );
    assert_eq!(
        report.trace_for(&"1011".parse().unwrap()).unwrap().closure,
        formula(&[&[5]])
    );
    assert!(verify_witness(&phi(), &witness));
}

#[test]
fn oracle_sees_the_same_extra_models() {
    let verdict = oracle_decide(&phi(), DEFAULT_ENUMERATION_CAP).unwrap();
    let extra: Vec<String> = verdict.extra_models.iter().map(|m| m.to_string()).collect();
    assert_eq!(extra, ["00101", "01111", "10111", "11101"]);
    let report = decide(&phi(), &DecideOptions::default()).unwrap();
    assert!(verdict.extra_models.contains(&report.witness.unwrap()));
}

#[test]
fn campaign_analysis_agrees_on_the_example() {
    let analysis = analyze(
        &phi(),
        &CampaignConfig {
            kmin: 4,
            ..Default::default()
        },
    );
    assert_eq!(analysis.kind(), None);
    assert_eq!(analysis.quine_checks, 12);
}
