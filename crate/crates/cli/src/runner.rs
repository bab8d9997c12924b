//! `run`: builds an experiment from a config, executes it and writes the CSV
//! table and its JSON sidecar.

use std::path::{Path, PathBuf};

use serde::Serialize;

use korovkin::harness::{
    apriori_bound, run_korovkin_experiment, weyl_experiment, AprioriReport, ConvergenceReport, HypothesisReport,
    Tolerances,
};
use korovkin::operators::{run_axiom_suite, AxiomReport, Operator, SampleGenerator};
use korovkin::{Error, GridDomain, OperatorFamily, Verdict};

use crate::build;
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::CliError;

pub const CSV_HEADER: [&str; 4] = ["n", "function_id", "norm", "error"];
pub const AXIOM_TOLERANCE: f64 = 1e-8;
pub const APRIORI_TOLERANCE: f64 = 1e-8;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GATE_REFUSED: i32 = 2;
pub const EXIT_CONVERGENCE_FAIL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    GateRefused,
    ConvergenceFail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => EXIT_PASS,
            Outcome::GateRefused => EXIT_GATE_REFUSED,
            Outcome::ConvergenceFail => EXIT_CONVERGENCE_FAIL,
        }
    }
}

/// Everything written to the JSON sidecar.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub hypotheses: Option<HypothesisReport>,
    pub axioms: Vec<AxiomReport>,
    pub apriori: Vec<AprioriReport>,
    pub report: Option<ConvergenceReport>,
    pub verdict: Outcome,
    pub exit_code: i32,
}

/// The sidecar sits next to the CSV with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn run(config_path: &Path, out: &Path, seed_override: Option<u64>) -> Result<RunRecord, CliError> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let record = execute(cfg)?;
    write_outputs(&record, out)?;
    Ok(record)
}

/// Runs the experiment described by `cfg` without touching the filesystem.
pub fn execute(cfg: ExperimentConfig) -> Result<RunRecord, CliError> {
    let domain = build::domain(&cfg)?;
    let norm = build::norm(&cfg, &domain);
    let probes = build::probes(&cfg, &domain)?;
    let mut tolerances = Tolerances::for_norm(&norm);
    if let Some(t) = cfg.tolerance {
        tolerances.convergence = t;
    }
    if let Some(t) = cfg.hypothesis_tolerance {
        tolerances.hypothesis = t;
    }

    if cfg.experiment == ExperimentKind::Weyl {
        let alpha = build::rotation_angle(&cfg.alpha)?;
        let report = weyl_experiment(&domain, alpha, &cfg.schedule, &probes, tolerances.convergence)?;
        let family = korovkin::trig::rotation_family(alpha, *cfg.schedule.last().unwrap(), domain.clone())?;
        let axioms = axioms_for(&cfg, &family, &domain)?;
        return Ok(finish(cfg, None, axioms, Vec::new(), report));
    }

    let phi = build::phi(&cfg.phi, &domain)?;
    let family = build::family(&cfg.family, &cfg, &domain, &phi)?;
    let limit = build::limit(&cfg.limit, &domain, &phi)?;
    let alpha = build::deficit_override(&cfg)?;

    let report = match run_korovkin_experiment(
        &family,
        limit.as_ref(),
        &cfg.schedule,
        &probes,
        &norm,
        alpha,
        tolerances,
    ) {
        Ok(r) => r,
        Err(Error::GateRefused(h)) => {
            return Ok(RunRecord {
                config: cfg.clone(),
                seed: cfg.seed,
                hypotheses: Some(*h),
                axioms: Vec::new(),
                apriori: Vec::new(),
                report: None,
                verdict: Outcome::GateRefused,
                exit_code: EXIT_GATE_REFUSED,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let axioms = axioms_for(&cfg, &family, &domain)?;
    let first = family.member(cfg.schedule[0])?;
    let mut apriori = Vec::new();
    for f in &probes {
        for &eps in &cfg.apriori_epsilon {
            apriori.push(apriori_bound(
                first.as_ref(),
                limit.as_ref(),
                f,
                eps,
                alpha,
                APRIORI_TOLERANCE,
            )?);
        }
    }
    let hypotheses = report.hypotheses.clone();
    Ok(finish(cfg, hypotheses, axioms, apriori, report))
}

fn axioms_for(
    cfg: &ExperimentConfig,
    family: &OperatorFamily,
    domain: &GridDomain,
) -> Result<Vec<AxiomReport>, CliError> {
    if !cfg.axioms {
        return Ok(Vec::new());
    }
    let op = family.member(cfg.schedule[0])?;
    Ok(axiom_suite(op.as_ref(), domain, cfg.axiom_samples, cfg.seed)?)
}

/// Seeded SL/TR*/M/CA/Krein suite at [`AXIOM_TOLERANCE`].
pub fn axiom_suite(
    op: &dyn Operator,
    domain: &GridDomain,
    samples: usize,
    seed: u64,
) -> korovkin::Result<Vec<AxiomReport>> {
    let mut gen = SampleGenerator::new(domain, seed);
    let pairs = gen.pairs(samples);
    let ordered = gen.ordered_pairs(samples);
    run_axiom_suite(op, &pairs, &ordered, AXIOM_TOLERANCE, true, seed)
}

fn finish(
    cfg: ExperimentConfig,
    hypotheses: Option<HypothesisReport>,
    axioms: Vec<AxiomReport>,
    apriori: Vec<AprioriReport>,
    report: ConvergenceReport,
) -> RunRecord {
    let verdict = if report.verdict == Verdict::Pass {
        Outcome::Pass
    } else {
        Outcome::ConvergenceFail
    };
    RunRecord {
        seed: cfg.seed,
        config: cfg,
        hypotheses,
        axioms,
        apriori,
        report: Some(report),
        verdict,
        exit_code: verdict.exit_code(),
    }
}

pub fn write_outputs(record: &RunRecord, out: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(CSV_HEADER)?;
    if let Some(report) = &record.report {
        for s in &report.series {
            for (n, e) in &s.errors {
                w.write_record([n.to_string(), s.function_id.clone(), report.norm.clone(), e.to_string()])?;
            }
        }
    }
    w.flush()?;
    let mut json = serde_json::to_string_pretty(record)?;
    json.push('\n');
    std::fs::write(sidecar_path(out), json)?;
    Ok(())
}
