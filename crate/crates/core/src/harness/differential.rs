//! Differential campaigns: the polynomial pipeline against the exhaustive
//! oracle, plus per-prefix probes of the pipeline's intermediate claims.

use std::fmt::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{PrefixAssignment, TotalAssignment};
use crate::closure::is_closed_3limited;
use crate::error::{Error, Result};
use crate::formula::{Formula, PackedFormula, DEFAULT_ENUMERATION_CAP};
use crate::harness::battery::{run_battery, BatteryReport};
use crate::harness::generate::{generate, InstanceSpec};
use crate::harness::shrink::shrink;
use crate::inverse::{run_pipeline, Answer, DecideOptions, PAPER_KMIN};
use crate::model_set::ModelSet;
use crate::oracle::{oracle_decide, verify_witness, OracleVerdict};

/// Minimized instances with at most this many candidate-formula models get
/// the full model list printed in their report.
pub const INLINE_MODEL_LIMIT: usize = 32;

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub kmin: usize,
    pub oracle_cap: usize,
    /// Worker threads across instances; results merge in spec order.
    pub jobs: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            kmin: 1,
            oracle_cap: DEFAULT_ENUMERATION_CAP,
            jobs: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// The pipeline's yes/no claim differs from the oracle's.
    AnswerMismatch,
    /// For some cover entry, brute-force satisfiability of the restricted
    /// closed candidate disagrees with the absence of `(∅)` in its closure.
    QuineMismatch,
    /// Witness extraction failed, or a returned witness failed verification,
    /// without a per-prefix mismatch explaining it.
    WitnessFailure,
    /// The pipeline or the oracle returned an error.
    PipelineError,
}

impl fmt::Display for DiscrepancyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscrepancyKind::AnswerMismatch => "answer_mismatch",
            DiscrepancyKind::QuineMismatch => "quine_mismatch",
            DiscrepancyKind::WitnessFailure => "witness_failure",
            DiscrepancyKind::PipelineError => "pipeline_error",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    #[serde(rename = "IMPLEMENTATION-BUG")]
    ImplementationBug,
    #[serde(rename = "PAPER-CLAIM")]
    PaperClaim,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::ImplementationBug => "IMPLEMENTATION-BUG",
            Classification::PaperClaim => "PAPER-CLAIM",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuineMismatch {
    pub prefix: PrefixAssignment,
    /// Brute-force satisfiability of the restricted closed candidate.
    pub satisfiable: bool,
    pub closure: Formula,
}

/// Everything one run of pipeline plus oracle says about a model set.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub kmin: usize,
    /// The pipeline's answer before witness extraction.
    pub claim: Option<Answer>,
    pub pipeline_error: Option<Error>,
    pub witness: Option<TotalAssignment>,
    pub witness_error: Option<Error>,
    pub witness_sound: Option<bool>,
    pub oracle: std::result::Result<OracleVerdict, Error>,
    pub closed_candidate: Option<Formula>,
    pub quine_checks: usize,
    pub quine_mismatch: Option<QuineMismatch>,
    pub restricted_already_closed: usize,
    /// `Some(diverged)` when the other `kmin` setting was compared.
    pub kmin_divergence: Option<bool>,
}

impl Analysis {
    pub fn oracle_answer(&self) -> Option<Answer> {
        self.oracle.as_ref().ok().map(OracleVerdict::answer)
    }

    pub fn kind(&self) -> Option<DiscrepancyKind> {
        if self.pipeline_error.is_some() || self.oracle.is_err() {
            return Some(DiscrepancyKind::PipelineError);
        }
        if self.claim != self.oracle_answer() {
            return Some(DiscrepancyKind::AnswerMismatch);
        }
        if self.quine_mismatch.is_some() {
            return Some(DiscrepancyKind::QuineMismatch);
        }
        if self.witness_error.is_some() || self.witness_sound == Some(false) {
            return Some(DiscrepancyKind::WitnessFailure);
        }
        None
    }

    pub fn algorithm_answer_text(&self) -> String {
        match (
            &self.pipeline_error,
            self.claim,
            &self.witness_error,
            self.witness,
        ) {
            (Some(e), _, _, _) => format!("error: {e}"),
            (None, Some(answer), Some(e), _) => {
                format!("{} (witness error: {e})", answer_name(answer))
            }
            (None, Some(answer), None, Some(w)) => format!("{} (witness {w})", answer_name(answer)),
            (None, Some(answer), None, None) => answer_name(answer).to_string(),
            (None, None, _, _) => "none".to_string(),
        }
    }

    pub fn oracle_answer_text(&self) -> String {
        match &self.oracle {
            Ok(v) => match v.extra_models.first() {
                Some(w) => format!("{} (first extra model {w})", answer_name(v.answer())),
                None => answer_name(v.answer()).to_string(),
            },
            Err(e) => format!("error: {e}"),
        }
    }
}

fn answer_name(answer: Answer) -> &'static str {
    match answer {
        Answer::ExtraModelExists => "extra_model_exists",
        Answer::NoExtraModel => "no_extra_model",
    }
}

/// Satisfiability of `formula` among assignments extending `prefix`, by
/// enumeration.
pub fn satisfiable_extending(formula: &Formula, prefix: &PrefixAssignment) -> bool {
    if formula.contains_empty() {
        return false;
    }
    let n = formula.num_vars();
    let free = n - prefix.len();
    let packed = PackedFormula::new(formula);
    (0..1u64 << free).any(|suffix| packed.eval(prefix.bits() << free | suffix))
}

/// Runs the pipeline and the oracle on `phi` and every per-prefix probe.
pub fn analyze(phi: &ModelSet, config: &CampaignConfig) -> Analysis {
    let mut analysis = Analysis {
        kmin: config.kmin,
        claim: None,
        pipeline_error: None,
        witness: None,
        witness_error: None,
        witness_sound: None,
        oracle: oracle_decide(phi, config.oracle_cap),
        closed_candidate: None,
        quine_checks: 0,
        quine_mismatch: None,
        restricted_already_closed: 0,
        kmin_divergence: None,
    };
    let run = match run_pipeline(phi, &DecideOptions::with_kmin(config.kmin)) {
        Ok(run) => run,
        Err(e) => {
            analysis.pipeline_error = Some(e);
            return analysis;
        }
    };
    analysis.claim = Some(run.claim());
    analysis.closed_candidate = Some(run.closed.clone());

    for entry in &run.trace {
        let restricted = run.closed.restrict(&entry.prefix.to_partial());
        let satisfiable = satisfiable_extending(&restricted, &entry.prefix);
        analysis.quine_checks += 1;
        if is_closed_3limited(&restricted) {
            analysis.restricted_already_closed += 1;
        }
        if satisfiable == entry.contains_empty && analysis.quine_mismatch.is_none() {
            analysis.quine_mismatch = Some(QuineMismatch {
                prefix: entry.prefix,
                satisfiable,
                closure: entry.closure.clone(),
            });
        }
    }

    if phi.n() >= PAPER_KMIN {
        analysis.kmin_divergence = if config.kmin == 1 {
            let paper_claim = run
                .trace
                .iter()
                .any(|e| e.prefix.len() >= PAPER_KMIN && !e.contains_empty);
            Some(paper_claim != run.claim().extra_model_exists())
        } else {
            run_pipeline(phi, &DecideOptions::with_kmin(1))
                .ok()
                .map(|full| full.claim() != run.claim())
        };
    }

    match run.into_decision(phi) {
        Ok(report) => {
            analysis.witness = report.witness;
            analysis.witness_sound = report.witness.map(|w| verify_witness(phi, &w));
        }
        Err(e) => analysis.witness_error = Some(e),
    }
    analysis
}

/// Decides the classification of a discrepancy of `kind` given the analysis
/// and battery of the minimized instance.
pub fn classify(
    kind: DiscrepancyKind,
    analysis: &Analysis,
    battery: &BatteryReport,
) -> Classification {
    let vetted = battery.passed();
    let paper_side = match kind {
        DiscrepancyKind::PipelineError | DiscrepancyKind::WitnessFailure => false,
        // Resolution is sound: `(∅)` in the closure of a satisfiable
        // restriction can only be a bug here.
        DiscrepancyKind::QuineMismatch => analysis
            .quine_mismatch
            .as_ref()
            .is_some_and(|m| !m.satisfiable),
        DiscrepancyKind::AnswerMismatch => match analysis.claim {
            Some(Answer::ExtraModelExists) => true,
            // Missing an extra model is only attributable to the procedure
            // when strata below PAPER_KMIN were skipped.
            Some(Answer::NoExtraModel) => analysis.kmin > 1,
            None => false,
        },
    };
    if paper_side && vetted {
        Classification::PaperClaim
    } else {
        Classification::ImplementationBug
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub index: usize,
    pub spec: String,
    pub reproduction_seed: Option<u64>,
    pub kind: DiscrepancyKind,
    pub classification: Classification,
    /// Whether the original instance had a per-prefix satisfiability
    /// mismatch, whatever `kind` took priority.
    pub quine_mismatch: bool,
    pub instance: ModelSet,
    pub algorithm_answer: String,
    pub oracle_answer: String,
    pub minimized_instance: ModelSet,
    pub minimized_algorithm_answer: String,
    pub minimized_oracle_answer: String,
    /// Models of the minimized instance's candidate formula.
    pub minimized_candidate_models: Vec<TotalAssignment>,
    pub minimized_closed_candidate: Option<Formula>,
    pub offending_prefix: Option<PrefixAssignment>,
    pub offending_closure: Option<Formula>,
    pub battery: BatteryReport,
}

/// Shrinks `phi` while `kind` persists, vets the result and builds the report.
pub fn investigate(
    index: usize,
    spec: &InstanceSpec,
    phi: &ModelSet,
    first: &Analysis,
    kind: DiscrepancyKind,
    config: &CampaignConfig,
) -> DiscrepancyReport {
    let min_n = config.kmin.max(3);
    let minimized = shrink(phi, min_n, |candidate| {
        analyze(candidate, config).kind() == Some(kind)
    });
    let last = analyze(&minimized, config);
    let battery = run_battery(&minimized, config.oracle_cap).unwrap_or_else(|e| BatteryReport {
        checks: vec![crate::harness::battery::BatteryCheck {
            name: "battery_setup",
            passed: false,
            detail: e.to_string(),
        }],
    });
    let classification = classify(kind, &last, &battery);
    let minimized_candidate_models = match &last.oracle {
        Ok(v) => {
            let mut all: Vec<TotalAssignment> = minimized
                .iter()
                .copied()
                .chain(v.extra_models.iter().copied())
                .collect();
            all.sort();
            all
        }
        Err(_) => Vec::new(),
    };
    let (offending_prefix, offending_closure) = match &last.quine_mismatch {
        Some(m) => (Some(m.prefix), Some(m.closure.clone())),
        None => match &last.witness_error {
            Some(
                Error::WitnessExtractionFailed { prefix } | Error::WitnessRejected { prefix, .. },
            ) => (Some(*prefix), None),
            _ => (None, None),
        },
    };
    DiscrepancyReport {
        index,
        spec: spec.to_string(),
        reproduction_seed: spec.seed(),
        kind,
        classification,
        quine_mismatch: first.quine_mismatch.is_some(),
        instance: phi.clone(),
        algorithm_answer: first.algorithm_answer_text(),
        oracle_answer: first.oracle_answer_text(),
        minimized_algorithm_answer: last.algorithm_answer_text(),
        minimized_oracle_answer: last.oracle_answer_text(),
        minimized_candidate_models,
        minimized_closed_candidate: last.closed_candidate.clone(),
        minimized_instance: minimized,
        offending_prefix,
        offending_closure,
        battery,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub kmin: usize,
    pub instances: usize,
    pub generator_errors: usize,
    pub agreements: usize,
    pub discrepancies: usize,
    pub implementation_bugs: usize,
    pub paper_claims: usize,
    pub oracle_extra_model: usize,
    pub oracle_no_extra_model: usize,
    pub witnesses_checked: usize,
    pub witnesses_sound: usize,
    pub witness_failures: usize,
    pub quine_checks: usize,
    pub quine_mismatches: usize,
    pub restricted_already_closed: usize,
    pub kmin_comparisons: usize,
    pub kmin_divergences: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorFailure {
    pub index: usize,
    pub spec: String,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KminDivergence {
    pub index: usize,
    pub spec: String,
    pub instance: ModelSet,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CampaignReport {
    pub summary: Summary,
    pub discrepancies: Vec<DiscrepancyReport>,
    pub generator_failures: Vec<GeneratorFailure>,
    pub kmin_divergences: Vec<KminDivergence>,
}

enum InstanceOutcome {
    GeneratorFailed(Error),
    Ran {
        phi: ModelSet,
        analysis: Box<Analysis>,
        discrepancy: Option<Box<DiscrepancyReport>>,
    },
}

fn run_instance(index: usize, spec: &InstanceSpec, config: &CampaignConfig) -> InstanceOutcome {
    let phi = match generate(spec) {
        Ok(phi) => phi,
        Err(e) => return InstanceOutcome::GeneratorFailed(e),
    };
    let analysis = analyze(&phi, config);
    let discrepancy = analysis
        .kind()
        .map(|kind| Box::new(investigate(index, spec, &phi, &analysis, kind, config)));
    InstanceOutcome::Ran {
        phi,
        analysis: Box::new(analysis),
        discrepancy,
    }
}

/// Runs every spec through [`analyze`]; disagreements are shrunk, vetted
/// and reported. The report depends only on `specs` and `config.kmin` /
/// `config.oracle_cap`, not on `config.jobs`.
pub fn differential_run(specs: &[InstanceSpec], config: &CampaignConfig) -> Result<CampaignReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let outcomes: Vec<InstanceOutcome> = pool.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| run_instance(i, spec, config))
            .collect()
    });

    let mut report = CampaignReport::default();
    let summary = &mut report.summary;
    summary.kmin = config.kmin;
    for (index, (spec, outcome)) in specs.iter().zip(outcomes).enumerate() {
        summary.instances += 1;
        match outcome {
            InstanceOutcome::GeneratorFailed(e) => {
                summary.generator_errors += 1;
                report.generator_failures.push(GeneratorFailure {
                    index,
                    spec: spec.to_string(),
                    error: e.to_string(),
                });
            }
            InstanceOutcome::Ran {
                phi,
                analysis,
                discrepancy,
            } => {
                match analysis.oracle_answer() {
                    Some(Answer::ExtraModelExists) => summary.oracle_extra_model += 1,
                    Some(Answer::NoExtraModel) => summary.oracle_no_extra_model += 1,
                    None => {}
                }
                if let Some(sound) = analysis.witness_sound {
                    summary.witnesses_checked += 1;
                    summary.witnesses_sound += sound as usize;
                }
                summary.witness_failures += analysis.witness_error.is_some() as usize;
                summary.quine_checks += analysis.quine_checks;
                summary.quine_mismatches += analysis.quine_mismatch.is_some() as usize;
                summary.restricted_already_closed += analysis.restricted_already_closed;
                if let Some(diverged) = analysis.kmin_divergence {
                    summary.kmin_comparisons += 1;
                    if diverged {
                        summary.kmin_divergences += 1;
                        report.kmin_divergences.push(KminDivergence {
                            index,
                            spec: spec.to_string(),
                            instance: phi,
                        });
                    }
                }
                match discrepancy {
                    None => summary.agreements += 1,
                    Some(d) => {
                        summary.discrepancies += 1;
                        match d.classification {
                            Classification::ImplementationBug => summary.implementation_bugs += 1,
                            Classification::PaperClaim => summary.paper_claims += 1,
                        }
                        report.discrepancies.push(*d);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn join_models<'a>(models: impl IntoIterator<Item = &'a TotalAssignment>) -> String {
    models
        .into_iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl CampaignReport {
    /// `key=value` records: one summary record, then one record per
    /// discrepancy, generator failure and kmin divergence, separated by
    /// blank lines.
    pub fn to_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let counters = [
            ("kmin", s.kmin),
            ("instances", s.instances),
            ("generator_errors", s.generator_errors),
            ("agreements", s.agreements),
            ("discrepancies", s.discrepancies),
            ("implementation_bugs", s.implementation_bugs),
            ("paper_claims", s.paper_claims),
            ("oracle_extra_model", s.oracle_extra_model),
            ("oracle_no_extra_model", s.oracle_no_extra_model),
            ("witnesses_checked", s.witnesses_checked),
            ("witnesses_sound", s.witnesses_sound),
            ("witness_failures", s.witness_failures),
            ("quine_checks", s.quine_checks),
            ("quine_mismatches", s.quine_mismatches),
            ("restricted_already_closed", s.restricted_already_closed),
            ("kmin_comparisons", s.kmin_comparisons),
            ("kmin_divergences", s.kmin_divergences),
        ];
        out.push_str("record=summary\n");
        for (key, value) in counters {
            writeln!(out, "{key}={value}").unwrap();
        }
        for d in &self.discrepancies {
            out.push('\n');
            out.push_str(&d.to_text());
        }
        for g in &self.generator_failures {
            write!(
                out,
                "\nrecord=generator_error\nindex={}\nspec={}\nerror={}\n",
                g.index, g.spec, g.error
            )
            .unwrap();
        }
        for k in &self.kmin_divergences {
            write!(
                out,
                "\nrecord=kmin_divergence\nindex={}\nspec={}\nmodels={}\n",
                k.index,
                k.spec,
                join_models(k.instance.iter())
            )
            .unwrap();
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("plain counters")
    }
}

impl DiscrepancyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "record=discrepancy").unwrap();
        writeln!(out, "index={}", self.index).unwrap();
        writeln!(out, "spec={}", self.spec).unwrap();
        match self.reproduction_seed {
            Some(seed) => writeln!(out, "seed={seed}").unwrap(),
            None => writeln!(out, "seed=none").unwrap(),
        }
        writeln!(out, "kind={}", self.kind).unwrap();
        writeln!(out, "classification={}", self.classification).unwrap();
        writeln!(out, "quine_mismatch={}", self.quine_mismatch).unwrap();
        writeln!(out, "n={}", self.instance.n()).unwrap();
        writeln!(out, "models={}", join_models(self.instance.iter())).unwrap();
        writeln!(out, "algorithm={}", self.algorithm_answer).unwrap();
        writeln!(out, "oracle={}", self.oracle_answer).unwrap();
        writeln!(out, "minimized_n={}", self.minimized_instance.n()).unwrap();
        writeln!(
            out,
            "minimized_models={}",
            join_models(self.minimized_instance.iter())
        )
        .unwrap();
        writeln!(
            out,
            "minimized_algorithm={}",
            self.minimized_algorithm_answer
        )
        .unwrap();
        writeln!(out, "minimized_oracle={}", self.minimized_oracle_answer).unwrap();
        writeln!(
            out,
            "minimized_candidate_model_count={}",
            self.minimized_candidate_models.len()
        )
        .unwrap();
        if self.minimized_candidate_models.len() <= INLINE_MODEL_LIMIT {
            writeln!(
                out,
                "minimized_candidate_models={}",
                join_models(&self.minimized_candidate_models)
            )
            .unwrap();
        }
        if let Some(f) = &self.minimized_closed_candidate {
            writeln!(out, "minimized_closed_candidate={f}").unwrap();
        }
        if let Some(p) = self.offending_prefix {
            writeln!(out, "offending_prefix={p}").unwrap();
        }
        if let Some(f) = &self.offending_closure {
            writeln!(out, "offending_closure={f}").unwrap();
        }
        for check in &self.battery.checks {
            if check.passed {
                writeln!(out, "battery.{}=pass", check.name).unwrap();
            } else {
                writeln!(out, "battery.{}=FAIL {}", check.name, check.detail).unwrap();
            }
        }
        out
    }
}
