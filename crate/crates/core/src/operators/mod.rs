//! The operator abstraction, operator families and their Cesàro means, and
//! sampled checkers for the operator axioms.

mod axioms;
mod samples;

use std::fmt;
use std::sync::Arc;

use crate::domain::{norm, GridDomain, NormKind};
use crate::error::{Error, Result};
use crate::function::RealFunction;

pub use axioms::{
    check_comonotone_additive, check_comonotone_additive_on, check_krein, check_monotone, check_sublinear,
    check_translatable, run_axiom_suite, Axiom, AxiomReport, HOMOGENEITY_SCALARS, STRONG_SHIFTS, WEAK_SHIFTS,
};
pub use samples::SampleGenerator;

/// An operator `T: C(K) -> C(X)` whose output is sampled on the grid of `X`.
pub trait Operator: Send + Sync {
    fn label(&self) -> String;

    /// Grid of `K`, where inputs are sampled by checkers and norms.
    fn input_domain(&self) -> &GridDomain;

    /// Grid of `X`; `apply` returns one value per point of this grid.
    fn output_domain(&self) -> &GridDomain;

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>>;
}

pub type OperatorInstance = Arc<dyn Operator>;

impl fmt::Debug for dyn Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({})", self.label())
    }
}

/// Applies `op` and checks the output has one value per output grid point.
pub(crate) fn apply_checked(op: &dyn Operator, f: &RealFunction) -> Result<Vec<f64>> {
    let out = op.apply(f)?;
    if out.len() != op.output_domain().len() {
        return Err(Error::invariant(format!(
            "{} produced {} values for {} output points",
            op.label(),
            out.len(),
            op.output_domain().len()
        )));
    }
    Ok(out)
}

type MapFn = dyn Fn(&RealFunction) -> Result<Vec<f64>> + Send + Sync;

/// An operator given by a closure.
#[derive(Clone)]
pub struct FnOperator {
    label: String,
    input: GridDomain,
    output: GridDomain,
    map: Arc<MapFn>,
}

impl FnOperator {
    pub fn new<F>(label: impl Into<String>, input: GridDomain, output: GridDomain, map: F) -> Self
    where
        F: Fn(&RealFunction) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        FnOperator {
            label: label.into(),
            input,
            output,
            map: Arc::new(map),
        }
    }

    /// `T(f)(x) = g(f(x))` on a single grid.
    pub fn pointwise<G>(label: impl Into<String>, domain: GridDomain, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let grid = domain.clone();
        Self::new(label, domain.clone(), domain, move |f| {
            Ok(f.sample(&grid)?.into_iter().map(&g).collect())
        })
    }

    pub fn identity(domain: GridDomain) -> Self {
        Self::pointwise("identity", domain, |v| v)
    }
}

impl Operator for FnOperator {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn input_domain(&self) -> &GridDomain {
        &self.input
    }

    fn output_domain(&self) -> &GridDomain {
        &self.output
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        (self.map)(f)
    }
}

type BuildFn = dyn Fn(usize) -> Result<OperatorInstance> + Send + Sync;

/// An indexed family `n -> T_n` sharing input and output grids.
#[derive(Clone)]
pub struct OperatorFamily {
    label: String,
    input: GridDomain,
    output: GridDomain,
    max_n: Option<usize>,
    build: Arc<BuildFn>,
}

impl fmt::Debug for OperatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorFamily")
            .field("label", &self.label)
            .field("max_n", &self.max_n)
            .finish()
    }
}

impl OperatorFamily {
    pub fn new<F>(label: impl Into<String>, input: GridDomain, output: GridDomain, build: F) -> Self
    where
        F: Fn(usize) -> Result<OperatorInstance> + Send + Sync + 'static,
    {
        OperatorFamily {
            label: label.into(),
            input,
            output,
            max_n: None,
            build: Arc::new(build),
        }
    }

    /// Restricts the family to indices `1..=max_n`.
    pub fn with_max_n(mut self, max_n: usize) -> Self {
        self.max_n = Some(max_n);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn input_domain(&self) -> &GridDomain {
        &self.input
    }

    pub fn output_domain(&self) -> &GridDomain {
        &self.output
    }

    pub fn max_n(&self) -> Option<usize> {
        self.max_n
    }

    pub fn member(&self, n: usize) -> Result<OperatorInstance> {
        let max = self.max_n.unwrap_or(usize::MAX);
        if n == 0 || n > max {
            return Err(Error::Index { index: n, max });
        }
        let op = (self.build)(n)?;
        if op.input_domain() != &self.input || op.output_domain() != &self.output {
            return Err(Error::invariant(format!(
                "member {n} of {} does not share the family's domains",
                self.label
            )));
        }
        Ok(op)
    }
}

/// Sup norm of `T(1)`, which is `‖T‖` for monotone sublinear `T`.
pub fn operator_norm(op: &dyn Operator) -> Result<f64> {
    let t1 = apply_checked(op, &RealFunction::one())?;
    norm(&t1, &NormKind::Sup)
}

/// `member(n) = (1/n) Σ_{k=1}^{n} F.member(k)`.
pub fn cesaro_family(family: &OperatorFamily) -> OperatorFamily {
    let inner = family.clone();
    let label = format!("cesaro:{}", family.label);
    let result = OperatorFamily::new(label, family.input.clone(), family.output.clone(), move |n| {
        let members = (1..=n).map(|k| inner.member(k)).collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(CesaroMean {
            label: format!("cesaro:{}[{n}]", inner.label),
            input: inner.input.clone(),
            output: inner.output.clone(),
            members,
        }) as OperatorInstance)
    });
    match family.max_n {
        Some(max) => result.with_max_n(max),
        None => result,
    }
}

struct CesaroMean {
    label: String,
    input: GridDomain,
    output: GridDomain,
    members: Vec<OperatorInstance>,
}

impl Operator for CesaroMean {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn input_domain(&self) -> &GridDomain {
        &self.input
    }

    fn output_domain(&self) -> &GridDomain {
        &self.output
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; self.output.len()];
        for m in &self.members {
            for (a, v) in acc.iter_mut().zip(apply_checked(m.as_ref(), f)?) {
                *a += v;
            }
        }
        let n = self.members.len() as f64;
        Ok(acc.into_iter().map(|a| a / n).collect())
    }
}
