use serde::Serialize;

use crate::domain::{
    deficit_of_positivity, korovkin_delta, korovkin_excess, korovkin_test_set, norm, GridDomain, NormKind,
};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::operators::{apply_checked, Operator};
use crate::Verdict;

/// Largest grid on which `δ` is computed. Operators sample `f` between grid
/// points, so `δ` comes from a refinement of the input grid.
const DELTA_GRID_LIMIT: usize = 4096;
const DELTA_REFINEMENT: usize = 8;

/// Both sides of the estimate
///
/// ```text
/// ‖T(f)A(1) - T(1)A(f)‖ ≤ ε‖T(1)‖‖A(1)‖ + δ { ‖A(1)‖ ‖T(S) - A(S)‖ + ‖A(S)‖ ‖T(1) - A(1)‖
///                        + 2‖A(1)A(S) - Σ A(u_k)²‖ + 2 Σ ‖A(u_k)‖ ‖T(u_k) - A(u_k)‖ }
/// ```
///
/// with `S = Σ(pr_k+α)²` and `u_k = -pr_k-α`, all norms sup norms on the
/// output grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriReport {
    pub operator: String,
    pub limit: String,
    pub function_id: String,
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

fn delta_grid(domain: &GridDomain) -> Result<GridDomain> {
    let mut factor = DELTA_REFINEMENT;
    loop {
        let g = domain.refined(factor)?;
        if factor == 1 || g.len() <= DELTA_GRID_LIMIT {
            return Ok(g);
        }
        factor /= 2;
    }
}

fn sup(v: &[f64]) -> Result<f64> {
    norm(v, &NormKind::Sup)
}

fn sup_diff(a: &[f64], b: &[f64]) -> Result<f64> {
    sup(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

/// Evaluates both sides of the a-priori estimate for `T`, `A` and `f`.
/// `alpha` defaults to the deficit of positivity of the input grid.
pub fn apriori_bound(
    t: &dyn Operator,
    a: &dyn Operator,
    f: &RealFunction,
    epsilon: f64,
    alpha: Option<f64>,
    tol: f64,
) -> Result<AprioriReport> {
    if t.input_domain() != a.input_domain() || t.output_domain() != a.output_domain() {
        return Err(Error::invariant(format!(
            "{} and {} do not share domains",
            t.label(),
            a.label()
        )));
    }
    let domain = t.input_domain();
    let alpha = match alpha {
        Some(v) => v,
        None => deficit_of_positivity(domain)?,
    };
    let grid = delta_grid(domain)?;
    let delta = korovkin_delta(f, &grid, epsilon)?;
    if !delta.is_finite() {
        return Err(Error::Internal(format!("no finite delta for {f} at epsilon {epsilon}")));
    }
    let excess = korovkin_excess(f, &grid, epsilon, delta)?;
    if excess > 0.0 {
        return Err(Error::Internal(format!(
            "delta {delta} violates the estimate for {f} by {excess}"
        )));
    }

    let set = korovkin_test_set(domain, alpha, false)?;
    let (s, negated) = set[1..].split_last().expect("test set has at least three functions");
    let one = RealFunction::one();
    let (t1, a1) = (apply_checked(t, &one)?, apply_checked(a, &one)?);
    let (tf, af) = (apply_checked(t, f)?, apply_checked(a, f)?);
    let (ts, as_) = (apply_checked(t, s)?, apply_checked(a, s)?);

    let lhs_vec: Vec<f64> = (0..tf.len()).map(|i| tf[i] * a1[i] - t1[i] * af[i]).collect();
    let lhs = sup(&lhs_vec)?;

    let mut residual: Vec<f64> = a1.iter().zip(&as_).map(|(x, y)| x * y).collect();
    let mut cross = 0.0;
    for u in negated {
        let (tu, au) = (apply_checked(t, u)?, apply_checked(a, u)?);
        for (r, v) in residual.iter_mut().zip(&au) {
            *r -= v * v;
        }
        cross += sup(&au)? * sup_diff(&tu, &au)?;
    }
    let a1n = sup(&a1)?;
    let braces = a1n * sup_diff(&ts, &as_)? + sup(&as_)? * sup_diff(&t1, &a1)? + 2.0 * sup(&residual)? + 2.0 * cross;
    let rhs = epsilon * sup(&t1)? * a1n + delta * braces;
    let slack = rhs - lhs;
    Ok(AprioriReport {
        operator: t.label(),
        limit: a.label(),
        function_id: f.to_string(),
        alpha,
        epsilon,
        delta,
        lhs,
        rhs,
        slack,
        tolerance: tol,
        verdict: Verdict::from_bool(slack >= -tol),
    })
}
