use rayon::prelude::*;
use serde::Serialize;

use super::hypotheses::{check_hypotheses, HypothesisReport};
use crate::domain::{korovkin_test_set, norm, trig_test_set, GridDomain, NormKind};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::operators::{apply_checked, operator_norm, Operator, OperatorFamily};
use crate::trig::{check_irrational_rotation, rotation_family, CircleMean};
use crate::Verdict;

/// Errors at or below this count as converged regardless of the ratio test.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Verdict thresholds for an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Bound on the final error of every series.
    pub convergence: f64,
    /// Bound on the functional-equation residual.
    pub hypothesis: f64,
}

impl Tolerances {
    pub const SUP: f64 = 5e-2;
    pub const L1: f64 = 2e-2;
    pub const HYPOTHESIS: f64 = 1e-8;

    pub fn for_norm(kind: &NormKind) -> Self {
        Tolerances {
            convergence: match kind {
                NormKind::Sup => Self::SUP,
                NormKind::L1 { .. } => Self::L1,
            },
            hypothesis: Self::HYPOTHESIS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesRole {
    TestFunction,
    Probe,
}

/// Errors `‖T_n(f) - A(f)‖` for one function over the schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub function_id: String,
    pub role: SeriesRole,
    pub errors: Vec<(usize, f64)>,
    pub verdict: Verdict,
}

impl Series {
    pub fn first(&self) -> f64 {
        self.errors.first().map_or(0.0, |e| e.1)
    }

    pub fn last(&self) -> f64 {
        self.errors.last().map_or(0.0, |e| e.1)
    }

    /// Whether the errors never increase along the schedule.
    pub fn is_nonincreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Final error below `tol`, and at most half the first error (or below
/// [`NOISE_FLOOR`]).
pub fn series_verdict(errors: &[(usize, f64)], tol: f64) -> Verdict {
    let (Some(first), Some(last)) = (errors.first(), errors.last()) else {
        return Verdict::Fail;
    };
    Verdict::from_bool(last.1 < tol && (last.1 <= 0.5 * first.1 || last.1 <= NOISE_FLOOR))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub limit: String,
    pub norm: String,
    pub schedule: Vec<usize>,
    pub tolerances: Tolerances,
    pub hypotheses: Option<HypothesisReport>,
    pub series: Vec<Series>,
    /// `‖T_n‖ = ‖T_n(1)‖∞` per schedule entry, recorded for L¹ experiments.
    pub operator_norms: Option<Vec<(usize, f64)>>,
    pub sup_operator_norm: Option<f64>,
    pub test_set_verdict: Verdict,
    pub probe_verdict: Verdict,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn test_functions(&self) -> impl Iterator<Item = &Series> {
        self.series.iter().filter(|s| s.role == SeriesRole::TestFunction)
    }

    pub fn probes(&self) -> impl Iterator<Item = &Series> {
        self.series.iter().filter(|s| s.role == SeriesRole::Probe)
    }

    pub fn series_for(&self, function_id: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.function_id == function_id)
    }
}

fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::precondition("empty schedule"));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::precondition(format!(
            "schedule {schedule:?} must be strictly increasing positive integers"
        )));
    }
    Ok(())
}

struct Tabulated {
    errors: Vec<Vec<(usize, f64)>>,
    norms: Vec<(usize, f64)>,
}

/// Errors for every function at every schedule entry; entries run in
/// parallel and are merged in schedule order.
fn tabulate(
    family: &OperatorFamily,
    limit: &dyn Operator,
    schedule: &[usize],
    functions: &[RealFunction],
    kind: &NormKind,
) -> Result<Tabulated> {
    if family.input_domain() != limit.input_domain() || family.output_domain() != limit.output_domain() {
        return Err(Error::invariant(format!(
            "family {} and limit {} do not share domains",
            family.label(),
            limit.label()
        )));
    }
    let targets = functions
        .iter()
        .map(|f| apply_checked(limit, f))
        .collect::<Result<Vec<_>>>()?;
    let rows = schedule
        .par_iter()
        .map(|&n| {
            let op = family.member(n)?;
            let errs = functions
                .iter()
                .zip(&targets)
                .map(|(f, target)| {
                    let out = apply_checked(op.as_ref(), f)?;
                    let diff: Vec<f64> = out.iter().zip(target).map(|(a, b)| a - b).collect();
                    norm(&diff, kind)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((errs, operator_norm(op.as_ref())?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut errors = vec![Vec::with_capacity(schedule.len()); functions.len()];
    let mut norms = Vec::with_capacity(schedule.len());
    for (&n, (errs, op_norm)) in schedule.iter().zip(rows) {
        for (series, e) in errors.iter_mut().zip(errs) {
            series.push((n, e));
        }
        norms.push((n, op_norm));
    }
    Ok(Tabulated { errors, norms })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    family: &OperatorFamily,
    limit: &dyn Operator,
    schedule: &[usize],
    test_set: Vec<RealFunction>,
    probes: &[RealFunction],
    kind: &NormKind,
    tolerances: Tolerances,
    hypotheses: Option<HypothesisReport>,
) -> Result<ConvergenceReport> {
    validate_schedule(schedule)?;
    let n_tests = test_set.len();
    let mut functions = test_set;
    functions.extend(probes.iter().cloned());
    let tab = tabulate(family, limit, schedule, &functions, kind)?;
    let series: Vec<Series> = functions
        .iter()
        .zip(tab.errors)
        .enumerate()
        .map(|(i, (f, errors))| Series {
            function_id: f.to_string(),
            role: if i < n_tests {
                SeriesRole::TestFunction
            } else {
                SeriesRole::Probe
            },
            verdict: series_verdict(&errors, tolerances.convergence),
            errors,
        })
        .collect();
    let all = |role| Verdict::from_bool(series.iter().filter(|s| s.role == role).all(|s| s.verdict.passed()));
    let test_set_verdict = all(SeriesRole::TestFunction);
    let probe_verdict = all(SeriesRole::Probe);

    let (operator_norms, sup_operator_norm, bounded) = match kind {
        NormKind::L1 { .. } => {
            let sup = tab.norms.iter().map(|e| e.1).fold(0.0, f64::max);
            let first = tab.norms[0].1;
            // Bounded: finite and no growth beyond twice the first norm.
            let bounded = sup.is_finite() && sup <= 2.0 * first;
            (Some(tab.norms), Some(sup), Verdict::from_bool(bounded))
        }
        NormKind::Sup => (None, None, Verdict::Pass),
    };
    Ok(ConvergenceReport {
        family: family.label().to_string(),
        limit: limit.label(),
        norm: kind.tag().to_string(),
        schedule: schedule.to_vec(),
        tolerances,
        hypotheses,
        series,
        operator_norms,
        sup_operator_norm,
        test_set_verdict,
        probe_verdict,
        verdict: test_set_verdict.and(probe_verdict).and(bounded),
    })
}

/// Gated convergence experiment: refuses with [`Error::GateRefused`] unless
/// the limit passes [`check_hypotheses`], then tabulates the Korovkin test
/// set and the probes. Test-set and probe verdicts are reported separately.
pub fn run_korovkin_experiment(
    family: &OperatorFamily,
    limit: &dyn Operator,
    schedule: &[usize],
    probes: &[RealFunction],
    kind: &NormKind,
    alpha: Option<f64>,
    tolerances: Tolerances,
) -> Result<ConvergenceReport> {
    validate_schedule(schedule)?;
    let report = check_hypotheses(limit, alpha, tolerances.hypothesis)?;
    if !report.passed() {
        return Err(Error::GateRefused(Box::new(report)));
    }
    let domain = family.input_domain();
    let test_set = if domain.is_circle() {
        trig_test_set(domain, true)?
    } else {
        korovkin_test_set(domain, report.alpha, false)?
    };
    assemble(
        family,
        limit,
        schedule,
        test_set,
        probes,
        kind,
        tolerances,
        Some(report),
    )
}

/// Weyl averages of the rotation by `alpha` against the circle mean, in sup
/// norm, on the test set `{1, -cos, -sin, cos² + sin²}` and the probes.
pub fn weyl_experiment(
    domain: &GridDomain,
    alpha: f64,
    schedule: &[usize],
    probes: &[RealFunction],
    tol: f64,
) -> Result<ConvergenceReport> {
    validate_schedule(schedule)?;
    check_irrational_rotation(alpha)?;
    let max_n = *schedule.last().expect("schedule validated nonempty");
    let family = rotation_family(alpha, max_n, domain.clone())?;
    let limit = CircleMean::new(domain.clone())?;
    let test_set = ["1", "-cos(x)", "-sin(x)", "cos(x)^2+sin(x)^2"]
        .iter()
        .map(|s| RealFunction::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let tolerances = Tolerances {
        convergence: tol,
        hypothesis: Tolerances::HYPOTHESIS,
    };
    assemble(
        &family,
        &limit,
        schedule,
        test_set,
        probes,
        &NormKind::Sup,
        tolerances,
        None,
    )
}

/// Ungated variant used for exploratory runs: same tables, no hypothesis check.
pub fn tabulate_convergence(
    family: &OperatorFamily,
    limit: &dyn Operator,
    schedule: &[usize],
    probes: &[RealFunction],
    kind: &NormKind,
    tolerances: Tolerances,
) -> Result<ConvergenceReport> {
    assemble(family, limit, schedule, Vec::new(), probes, kind, tolerances, None)
}
