use std::fmt;

use serde::Serialize;

use crate::domain::{deficit_of_positivity, korovkin_test_set, norm, trig_test_set, NormKind};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::operators::{apply_checked, Operator, OperatorInstance};
use crate::Verdict;

/// Which form of the functional equation was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisForm {
    /// `A(1) A(Σ(pr_k+α)²) = Σ (A(-pr_k-α))²`.
    Generic,
    /// `A(3+2cos+2sin) = (A(-1-cos))² + (A(-1-sin))²`, with `A(1) = 1`.
    TrigPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityCheck {
    pub min_value: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualCheck {
    pub residual: f64,
    pub verdict: Verdict,
}

impl ResidualCheck {
    fn new(residual: f64, tol: f64) -> Self {
        ResidualCheck {
            residual,
            verdict: Verdict::from_bool(residual <= tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub operator: String,
    pub form: HypothesisForm,
    pub alpha: f64,
    pub tolerance: f64,
    pub strict_positivity: PositivityCheck,
    /// `‖A(1) - 1‖∞`; only checked for the trigonometric form.
    pub unitality: Option<ResidualCheck>,
    pub functional_equation_residual: ResidualCheck,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.strict_positivity.verdict.passed()
            && self.functional_equation_residual.verdict.passed()
            && self.unitality.is_none_or(|u| u.verdict.passed())
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match self.form {
            HypothesisForm::Generic => "functional equation",
            HypothesisForm::TrigPlus => "trigonometric functional equation",
        };
        write!(
            f,
            "{}: min A(1) = {} ({}), ",
            self.operator, self.strict_positivity.min_value, self.strict_positivity.verdict
        )?;
        if let Some(u) = &self.unitality {
            write!(f, "‖A(1) - 1‖ = {} ({}), ", u.residual, u.verdict)?;
        }
        write!(
            f,
            "{form} residual = {} ({}) at tolerance {}",
            self.functional_equation_residual.residual, self.functional_equation_residual.verdict, self.tolerance
        )
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> Result<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d, &NormKind::Sup)
}

/// Checks `A(1) > 0` on the output grid and the functional equation in sup
/// norm. Circle inputs use the trigonometric form (which fixes `α = 1`);
/// otherwise `alpha` defaults to the deficit of positivity.
pub fn check_hypotheses(a: &dyn Operator, alpha: Option<f64>, tol: f64) -> Result<HypothesisReport> {
    if !(tol >= 0.0) {
        return Err(Error::precondition(format!("tolerance {tol} must be nonnegative")));
    }
    let domain = a.input_domain();
    let one = apply_checked(a, &RealFunction::one())?;
    let min_value = one.iter().copied().fold(f64::INFINITY, f64::min);
    let strict_positivity = PositivityCheck {
        min_value,
        verdict: Verdict::from_bool(min_value > 0.0),
    };

    if domain.is_circle() {
        let set = trig_test_set(domain, true)?;
        let ac = apply_checked(a, &set[1])?;
        let as_ = apply_checked(a, &set[2])?;
        let rhs: Vec<f64> = ac.iter().zip(&as_).map(|(c, s)| c * c + s * s).collect();
        let lhs = apply_checked(a, &set[3])?;
        let ones = vec![1.0; one.len()];
        return Ok(HypothesisReport {
            operator: a.label(),
            form: HypothesisForm::TrigPlus,
            alpha: 1.0,
            tolerance: tol,
            strict_positivity,
            unitality: Some(ResidualCheck::new(sup_diff(&one, &ones)?, tol)),
            functional_equation_residual: ResidualCheck::new(sup_diff(&lhs, &rhs)?, tol),
        });
    }

    let deficit = deficit_of_positivity(domain)?;
    let alpha = alpha.unwrap_or(deficit);
    if alpha < deficit {
        return Err(Error::precondition(format!(
            "alpha {alpha} is below the deficit of positivity {deficit}"
        )));
    }
    // [1, -(pr_1+α), ..., -(pr_N+α), Σ(pr_k+α)²]
    let set = korovkin_test_set(domain, alpha, false)?;
    let (s, negated) = set[1..].split_last().expect("test set has at least three functions");
    let a_s = apply_checked(a, s)?;
    let mut rhs = vec![0.0; one.len()];
    for u in negated {
        for (r, v) in rhs.iter_mut().zip(apply_checked(a, u)?) {
            *r += v * v;
        }
    }
    let lhs: Vec<f64> = one.iter().zip(&a_s).map(|(u, v)| u * v).collect();
    Ok(HypothesisReport {
        operator: a.label(),
        form: HypothesisForm::Generic,
        alpha,
        tolerance: tol,
        strict_positivity,
        unitality: None,
        functional_equation_residual: ResidualCheck::new(sup_diff(&lhs, &rhs)?, tol),
    })
}

/// Evaluates the functional equation for each candidate limit operator.
pub fn probe_functional_equation(
    candidates: &[OperatorInstance],
    alpha: Option<f64>,
    tol: f64,
) -> Result<Vec<HypothesisReport>> {
    if let Some(first) = candidates.first() {
        for c in &candidates[1..] {
            if c.input_domain() != first.input_domain() || c.output_domain() != first.output_domain() {
                return Err(Error::invariant(format!(
                    "{} and {} do not share domains",
                    first.label(),
                    c.label()
                )));
            }
        }
    }
    candidates
        .iter()
        .map(|c| check_hypotheses(c.as_ref(), alpha, tol))
        .collect()
}
