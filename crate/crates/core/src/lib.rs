//! Weakly nonlinear monotone operators sampled on finite grids, and a
//! Korovkin-type harness that checks their axioms, the a-priori estimate
//! relating an operator to a limit operator, and convergence on test sets.
//!
//! The operator families provided are
//!
//! * sup-Bernstein: `Σ p_{n,k}(φ(x)) sup_{window k} f`, in one and two dimensions,
//! * Kantorovich and max-Kantorovich: Bernstein-weighted window averages,
//! * Choquet–Kantorovich: window averages taken as Choquet integrals against
//!   a concave distortion of Lebesgue measure,
//! * Cesàro averages of circle rotations (Weyl ergodic averages).
//!
//! All functions are evaluable objects ([`RealFunction`]); operators map a
//! function to its values on an output grid.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod choquet;
pub mod domain;
pub mod error;
pub mod expr;
pub mod function;
pub mod harness;
pub mod operators;
pub mod quadrature;
pub mod trig;

use serde::{Deserialize, Serialize};

pub use domain::{GridDomain, NormKind};
pub use error::{Error, Result};
pub use expr::Expr;
pub use function::RealFunction;
pub use operators::{Operator, OperatorFamily, OperatorInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        Verdict::from_bool(self.passed() && other.passed())
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}
