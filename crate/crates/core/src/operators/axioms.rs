//! Sampled checks of the operator axioms.
//!
//! Each check evaluates the axiom's identity or inequality pointwise on the
//! output grid for a finite set of inputs and scalars, and records the
//! largest absolute violation. Violations are raw differences, so a report
//! passes exactly when `max_violation <= tolerance`.

use serde::{Deserialize, Serialize};

use super::{apply_checked, operator_norm, Operator, SampleGenerator};
use crate::domain::{norm, NormKind};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::Verdict;

/// Scalars `λ` for positive homogeneity.
pub const HOMOGENEITY_SCALARS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
/// Shifts for translatability by nonnegative multiples of unity.
pub const WEAK_SHIFTS: [f64; 4] = [0.0, 0.5, 1.0, 3.0];
/// Extra negative shifts checked for strong translatability.
pub const STRONG_SHIFTS: [f64; 2] = [-0.5, -2.0];

const COMONOTONE_PAIRS: usize = 10;
const KREIN_REFINEMENT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    #[serde(rename = "SL")]
    Sublinear,
    #[serde(rename = "TR")]
    Translatable,
    #[serde(rename = "TRstar")]
    StronglyTranslatable,
    #[serde(rename = "CA")]
    ComonotoneAdditive,
    #[serde(rename = "M")]
    Monotone,
    #[serde(rename = "Krein")]
    Krein,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub trials: usize,
    pub max_violation: f64,
    pub verdict: Verdict,
    pub witness: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

struct Tracker {
    axiom: Axiom,
    tol: f64,
    trials: usize,
    max_violation: f64,
    witness: Option<(f64, String)>,
}

impl Tracker {
    fn new(axiom: Axiom, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return Err(Error::precondition(format!("tolerance must be nonnegative, got {tol}")));
        }
        Ok(Tracker {
            axiom,
            tol,
            trials: 0,
            max_violation: 0.0,
            witness: None,
        })
    }

    /// Records one checked identity whose pointwise violations are `excess`
    /// (positive means violated).
    fn record(&mut self, excess: impl IntoIterator<Item = f64>, describe: impl FnOnce(usize, f64) -> String) {
        self.trials += 1;
        let (idx, worst) = excess
            .into_iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
                if v > acc.1 || v.is_nan() {
                    (i, v)
                } else {
                    acc
                }
            });
        let worst = if worst.is_nan() { f64::INFINITY } else { worst.max(0.0) };
        if worst > self.max_violation {
            self.max_violation = worst;
            if worst > self.tol {
                self.witness = Some((worst, describe(idx, worst)));
            }
        }
    }

    fn finish(self) -> AxiomReport {
        let pass = self.max_violation <= self.tol;
        AxiomReport {
            axiom: self.axiom,
            trials: self.trials,
            max_violation: self.max_violation,
            verdict: Verdict::from_bool(pass),
            witness: if pass { None } else { self.witness.map(|w| w.1) },
        }
    }
}

fn nonempty<T>(samples: &[T]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::precondition("no samples given"));
    }
    Ok(())
}

fn with_witness(op: &dyn Operator, f: &RealFunction, r: Result<Vec<f64>>) -> Result<Vec<f64>> {
    r.map_err(|e| Error::Evaluation {
        point: Vec::new(),
        message: format!("{} failed on f = {f}: {e}", op.label()),
    })
}

fn eval(op: &dyn Operator, f: &RealFunction) -> Result<Vec<f64>> {
    with_witness(op, f, apply_checked(op, f))
}

/// Subadditivity `T(f+g) <= T(f)+T(g)` and positive homogeneity
/// `T(λf) = λT(f)` for `λ ∈ {0, 1/2, 1, 2}`.
pub fn check_sublinear(op: &dyn Operator, samples: &[(RealFunction, RealFunction)], tol: f64) -> Result<AxiomReport> {
    nonempty(samples)?;
    let mut t = Tracker::new(Axiom::Sublinear, tol)?;
    for (i, (f, g)) in samples.iter().enumerate() {
        let tf = eval(op, f)?;
        let tg = eval(op, g)?;
        let tfg = eval(op, &(f.clone() + g.clone()))?;
        t.record(tfg.iter().zip(&tf).zip(&tg).map(|((s, a), b)| s - a - b), |j, v| {
            format!("pair {i}: T(f+g) exceeds T(f)+T(g) by {v} at output point {j}; f = {f}, g = {g}")
        });
        for (h, th, name) in [(f, &tf, "f"), (g, &tg, "g")] {
            for lambda in HOMOGENEITY_SCALARS {
                let tl = eval(op, &h.clone().scale(lambda))?;
                t.record(tl.iter().zip(th).map(|(a, b)| (a - lambda * b).abs()), |j, v| {
                    format!(
                        "pair {i}: |T(λ{name}) - λT({name})| = {v} at output point {j} for λ = {lambda}; {name} = {h}"
                    )
                });
            }
        }
    }
    Ok(t.finish())
}

/// `T(f + α·1) = T(f) + αT(1)` for `α ∈ {0, 1/2, 1, 3}`, and additionally
/// `α ∈ {-1/2, -2}` when `strong` is set.
pub fn check_translatable(
    op: &dyn Operator,
    samples: &[(RealFunction, RealFunction)],
    tol: f64,
    strong: bool,
) -> Result<AxiomReport> {
    nonempty(samples)?;
    let axiom = if strong {
        Axiom::StronglyTranslatable
    } else {
        Axiom::Translatable
    };
    let mut t = Tracker::new(axiom, tol)?;
    let t1 = eval(op, &RealFunction::one())?;
    let shifts: Vec<f64> = if strong {
        WEAK_SHIFTS.iter().chain(&STRONG_SHIFTS).copied().collect()
    } else {
        WEAK_SHIFTS.to_vec()
    };
    for (i, (f, g)) in samples.iter().enumerate() {
        for h in [f, g] {
            let th = eval(op, h)?;
            for &alpha in &shifts {
                let ts = eval(op, &h.clone().shift(alpha))?;
                t.record(
                    ts.iter().zip(&th).zip(&t1).map(|((s, a), u)| (s - a - alpha * u).abs()),
                    |j, v| {
                        format!(
                            "sample {i}: |T(f+α) - T(f) - αT(1)| = {v} at output point {j} for α = {alpha}; f = {h}"
                        )
                    },
                );
            }
        }
    }
    Ok(t.finish())
}

/// `f <= g` on the input grid implies `T(f) <= T(g)`.
pub fn check_monotone(op: &dyn Operator, samples: &[(RealFunction, RealFunction)], tol: f64) -> Result<AxiomReport> {
    nonempty(samples)?;
    let mut t = Tracker::new(Axiom::Monotone, tol)?;
    let grid = op.input_domain();
    for (i, (f, g)) in samples.iter().enumerate() {
        let fv = f.sample(grid)?;
        let gv = g.sample(grid)?;
        if let Some(j) = fv.iter().zip(&gv).position(|(a, b)| a > b) {
            return Err(Error::precondition(format!(
                "sample pair {i} is not ordered: f > g at input point {:?}; f = {f}, g = {g}",
                grid.points()[j]
            )));
        }
        let tf = eval(op, f)?;
        let tg = eval(op, g)?;
        t.record(tf.iter().zip(&tg).map(|(a, b)| a - b), |j, v| {
            format!("pair {i}: T(f) exceeds T(g) by {v} at output point {j}; f = {f}, g = {g}")
        });
    }
    Ok(t.finish())
}

fn comonotone_on_grid(op: &dyn Operator, f: &RealFunction, g: &RealFunction) -> Result<bool> {
    let grid = op.input_domain();
    let fv = f.sample(grid)?;
    let gv = g.sample(grid)?;
    let scale = fv.iter().chain(&gv).fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * scale * scale;
    for s in 0..fv.len() {
        for u in (s + 1)..fv.len() {
            if (fv[s] - fv[u]) * (gv[s] - gv[u]) < -slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Comonotone additivity `T(f+g) = T(f)+T(g)` on the given pairs, each of
/// which must be comonotone on the input grid.
pub fn check_comonotone_additive_on(
    op: &dyn Operator,
    pairs: &[(RealFunction, RealFunction)],
    tol: f64,
) -> Result<AxiomReport> {
    nonempty(pairs)?;
    for (i, (f, g)) in pairs.iter().enumerate() {
        if !comonotone_on_grid(op, f, g)? {
            return Err(Error::precondition(format!(
                "pair {i} is not comonotone: f = {f}, g = {g}"
            )));
        }
    }
    comonotone_additive(op, pairs, tol)
}

fn comonotone_additive(op: &dyn Operator, pairs: &[(RealFunction, RealFunction)], tol: f64) -> Result<AxiomReport> {
    let mut t = Tracker::new(Axiom::ComonotoneAdditive, tol)?;
    for (i, (f, g)) in pairs.iter().enumerate() {
        let tf = eval(op, f)?;
        let tg = eval(op, g)?;
        let tfg = eval(op, &(f.clone() + g.clone()))?;
        t.record(
            tfg.iter().zip(&tf).zip(&tg).map(|((s, a), b)| (s - a - b).abs()),
            |j, v| format!("pair {i}: |T(f+g) - T(f) - T(g)| = {v} at output point {j}; f = {f}, g = {g}"),
        );
    }
    Ok(t.finish())
}

/// Comonotone additivity on generated pairs `(h, φ∘h)`.
pub fn check_comonotone_additive(op: &dyn Operator, tol: f64, seed: u64) -> Result<AxiomReport> {
    let pairs = SampleGenerator::new(op.input_domain(), seed).comonotone_pairs(COMONOTONE_PAIRS);
    for (i, (f, g)) in pairs.iter().enumerate() {
        if !comonotone_on_grid(op, f, g)? {
            return Err(Error::Internal(format!(
                "generated pair {i} fails the comonotonicity witness: f = {f}, g = {g}"
            )));
        }
    }
    comonotone_additive(op, &pairs, tol)
}

/// `|T(f) - T(g)| <= T(|f-g|)` pointwise and `‖T(f)-T(g)‖ <= ‖T‖·‖f-g‖`.
///
/// Expects an operator that already passed the sublinearity and
/// monotonicity checks. `‖f-g‖` is measured on the input grid refined
/// eightfold, since operators evaluate inputs between grid points.
pub fn check_krein(op: &dyn Operator, samples: &[(RealFunction, RealFunction)], tol: f64) -> Result<AxiomReport> {
    nonempty(samples)?;
    let mut t = Tracker::new(Axiom::Krein, tol)?;
    let op_norm = operator_norm(op)?;
    let fine = op.input_domain().refined(KREIN_REFINEMENT)?;
    for (i, (f, g)) in samples.iter().enumerate() {
        let tf = eval(op, f)?;
        let tg = eval(op, g)?;
        let diff = (f.clone() - g.clone()).abs();
        let tabs = eval(op, &diff)?;
        t.record(
            tf.iter().zip(&tg).zip(&tabs).map(|((a, b), c)| (a - b).abs() - c),
            |j, v| format!("pair {i}: |T(f)-T(g)| exceeds T(|f-g|) by {v} at output point {j}; f = {f}, g = {g}"),
        );
        let lhs = norm(
            &tf.iter().zip(&tg).map(|(a, b)| a - b).collect::<Vec<_>>(),
            &NormKind::Sup,
        )?;
        let input_gap = norm(&diff.sample(&fine)?, &NormKind::Sup)?;
        t.record([lhs - op_norm * input_gap], |_, v| {
            format!("pair {i}: ‖T(f)-T(g)‖ exceeds ‖T‖·‖f-g‖ by {v}; f = {f}, g = {g}")
        });
    }
    Ok(t.finish())
}

/// Runs SL, TR (or TR*), M, CA and Krein in sequence. Krein is only run when
/// SL and M passed.
pub fn run_axiom_suite(
    op: &dyn Operator,
    pairs: &[(RealFunction, RealFunction)],
    ordered: &[(RealFunction, RealFunction)],
    tol: f64,
    strong: bool,
    seed: u64,
) -> Result<Vec<AxiomReport>> {
    let sl = check_sublinear(op, pairs, tol)?;
    let tr = check_translatable(op, pairs, tol, strong)?;
    let m = check_monotone(op, ordered, tol)?;
    let ca = check_comonotone_additive(op, tol, seed)?;
    let chained = sl.passed() && m.passed();
    let mut reports = vec![sl, tr, m, ca];
    if chained {
        reports.push(check_krein(op, pairs, tol)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::GridDomain;
    use crate::operators::FnOperator;

    fn grid() -> GridDomain {
        GridDomain::unit_interval(21).unwrap()
    }

    fn pairs() -> Vec<(RealFunction, RealFunction)> {
        SampleGenerator::new(&grid(), 11).pairs(10)
    }

    #[test]
    fn identity_passes_everything() {
        let id = FnOperator::identity(grid());
        let ordered = SampleGenerator::new(&grid(), 5).ordered_pairs(10);
        let reports = run_axiom_suite(&id, &pairs(), &ordered, 1e-12, true, 1).unwrap();
        assert_eq!(reports.len(), 5);
        for r in reports {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn squaring_is_not_sublinear() {
        let sq = FnOperator::pointwise("square", grid(), |v| v * v);
        let one = RealFunction::one();
        let r = check_sublinear(&sq, &[(one.clone(), one)], 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.max_violation, 2.0);
        assert!(r.witness.is_some());
    }

    #[test]
    fn positive_part_is_not_strongly_translatable() {
        let pos = FnOperator::pointwise("max(f,0)", grid(), |v| v.max(0.0));
        let minus_one = RealFunction::constant(-1.0);
        let r = check_translatable(&pos, &[(minus_one.clone(), minus_one)], 1e-9, true).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.axiom, Axiom::StronglyTranslatable);
        assert!(r.max_violation >= 1.0);
    }

    #[test]
    fn negation_is_not_monotone() {
        let neg = FnOperator::pointwise("neg", grid(), |v| -v);
        let r = check_monotone(&neg, &[(RealFunction::constant(0.0), RealFunction::one())], 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.max_violation, 1.0);
    }

    #[test]
    fn unordered_pair_is_a_precondition_error() {
        let id = FnOperator::identity(grid());
        let err = check_monotone(&id, &[(RealFunction::x(), RealFunction::constant(0.5))], 1e-9).unwrap_err();
        match err {
            Error::Precondition(msg) => assert!(msg.contains("pair 0")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn squaring_not_comonotone_additive() {
        let sq = FnOperator::pointwise("square", grid(), |v| v * v);
        let one = RealFunction::one();
        let r = check_comonotone_additive_on(&sq, &[(one.clone(), one)], 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.max_violation, 2.0);
    }

    #[test]
    fn non_comonotone_pair_rejected() {
        let id = FnOperator::identity(grid());
        let pair = (RealFunction::x(), -RealFunction::x());
        assert!(matches!(
            check_comonotone_additive_on(&id, &[pair], 1e-9),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn empty_samples_and_negative_tol() {
        let id = FnOperator::identity(grid());
        assert!(matches!(check_sublinear(&id, &[], 1e-9), Err(Error::Precondition(_))));
        assert!(matches!(
            check_sublinear(&id, &pairs(), -1.0),
            Err(Error::Precondition(_))
        ));
    }
}
