//! Evaluable real-valued functions on a domain's bounding box.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::domain::GridDomain;
use crate::error::{Error, Result};
use crate::expr::{Builtin, Expr};

/// A monomial `coef * Π x_k^{exps[k]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    /// Univariate polynomial `c0 + c1 x + c2 x^2 + ...` in coordinate 0.
    pub fn univariate(coeffs: &[f64]) -> Self {
        Polynomial {
            terms: coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| Monomial {
                    coef: c,
                    exps: vec![k as u32],
                })
                .collect(),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                m.exps.iter().enumerate().fold(m.coef, |acc, (k, &e)| {
                    acc * point.get(k).copied().unwrap_or(f64::NAN).powi(e as i32)
                })
            })
            .sum()
    }
}

/// Values attached to the points of a tensor grid, interpolated multilinearly
/// between them (periodically along angle axes).
#[derive(Debug, Clone)]
pub struct GridSamples {
    domain: GridDomain,
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::invariant(format!(
                "grid samples need {} values, got {}",
                domain.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invariant(format!("sample {i} is not finite")));
        }
        Ok(GridSamples { domain, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let axes = self.domain.axes();
        let mut corners: Vec<(usize, f64)> = vec![(0, 1.0)];
        let mut stride = 1usize;
        // Row-major layout: the last axis varies fastest.
        for (axis, &coord) in axes.iter().zip(point).rev() {
            let (i0, i1, t) = axis.bracket(coord);
            let mut next = Vec::with_capacity(corners.len() * 2);
            for &(offset, w) in &corners {
                next.push((offset + i0 * stride, w * (1.0 - t)));
                if t > 0.0 {
                    next.push((offset + i1 * stride, w * t));
                }
            }
            corners = next;
            stride *= axis.len();
        }
        corners.iter().map(|&(i, w)| w * self.values[i]).sum()
    }
}

/// An evaluable function `K -> R`.
#[derive(Debug, Clone)]
pub enum RealFunction {
    Constant(f64),
    /// The k-th coordinate of the raw grid point.
    Projection(usize),
    Polynomial(Polynomial),
    Unary(Builtin, Arc<RealFunction>),
    Expr(Arc<Expr>),
    Samples(Arc<GridSamples>),
    Sum(Arc<RealFunction>, Arc<RealFunction>),
    Product(Arc<RealFunction>, Arc<RealFunction>),
    Scaled(f64, Arc<RealFunction>),
}

impl RealFunction {
    pub fn constant(c: f64) -> Self {
        RealFunction::Constant(c)
    }

    pub fn one() -> Self {
        RealFunction::Constant(1.0)
    }

    pub fn x() -> Self {
        RealFunction::Projection(0)
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(RealFunction::Expr(Arc::new(Expr::parse(src)?)))
    }

    pub fn apply_builtin(self, b: Builtin) -> Self {
        RealFunction::Unary(b, Arc::new(self))
    }

    pub fn abs(self) -> Self {
        self.apply_builtin(Builtin::Abs)
    }

    pub fn scale(self, s: f64) -> Self {
        RealFunction::Scaled(s, Arc::new(self))
    }

    pub fn shift(self, c: f64) -> Self {
        self + RealFunction::Constant(c)
    }

    pub fn square(self) -> Self {
        let f = Arc::new(self);
        RealFunction::Product(f.clone(), f)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            RealFunction::Constant(c) => *c,
            RealFunction::Projection(k) => point.get(*k).copied().unwrap_or(f64::NAN),
            RealFunction::Polynomial(p) => p.eval(point),
            RealFunction::Unary(b, f) => b.apply(f.eval(point)),
            RealFunction::Expr(e) => e.eval(point),
            RealFunction::Samples(s) => s.eval(point),
            RealFunction::Sum(f, g) => f.eval(point) + g.eval(point),
            RealFunction::Product(f, g) => f.eval(point) * g.eval(point),
            RealFunction::Scaled(s, f) => s * f.eval(point),
        }
    }

    pub fn try_eval(&self, point: &[f64]) -> Result<f64> {
        let v = self.eval(point);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                point: point.to_vec(),
                message: format!("`{self}` evaluates to {v}"),
            })
        }
    }

    /// Samples the function at every point of `domain`.
    pub fn sample(&self, domain: &GridDomain) -> Result<Vec<f64>> {
        domain.points().iter().map(|p| self.try_eval(p)).collect()
    }
}

impl From<Expr> for RealFunction {
    fn from(e: Expr) -> Self {
        RealFunction::Expr(Arc::new(e))
    }
}

impl From<Polynomial> for RealFunction {
    fn from(p: Polynomial) -> Self {
        RealFunction::Polynomial(p)
    }
}

impl From<f64> for RealFunction {
    fn from(c: f64) -> Self {
        RealFunction::Constant(c)
    }
}

impl Add for RealFunction {
    type Output = RealFunction;
    fn add(self, rhs: RealFunction) -> RealFunction {
        RealFunction::Sum(Arc::new(self), Arc::new(rhs))
    }
}

impl Sub for RealFunction {
    type Output = RealFunction;
    fn sub(self, rhs: RealFunction) -> RealFunction {
        self + rhs.scale(-1.0)
    }
}

impl Mul for RealFunction {
    type Output = RealFunction;
    fn mul(self, rhs: RealFunction) -> RealFunction {
        RealFunction::Product(Arc::new(self), Arc::new(rhs))
    }
}

impl Neg for RealFunction {
    type Output = RealFunction;
    fn neg(self) -> RealFunction {
        self.scale(-1.0)
    }
}

fn var_name(k: usize) -> String {
    match k {
        0 => "x".into(),
        1 => "y".into(),
        _ => format!("x{k}"),
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        f.write_str("(")?;
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if m.coef < 0.0 {
                write!(f, "(-{})", -m.coef)?;
            } else {
                write!(f, "{}", m.coef)?;
            }
            for (k, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", var_name(k))?,
                    _ => write!(f, "*{}^{e}", var_name(k))?,
                }
            }
        }
        f.write_str(")")
    }
}

impl fmt::Display for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealFunction::Constant(c) if *c < 0.0 => write!(f, "(-{})", -c),
            RealFunction::Constant(c) => write!(f, "{c}"),
            RealFunction::Projection(k) => f.write_str(&var_name(*k)),
            RealFunction::Polynomial(p) => write!(f, "{p}"),
            RealFunction::Unary(b, g) => write!(f, "{}({g})", b.name()),
            RealFunction::Expr(e) => write!(f, "{e}"),
            RealFunction::Samples(s) => write!(f, "samples[{}]", s.values.len()),
            RealFunction::Sum(a, b) => match b.as_ref() {
                RealFunction::Scaled(s, inner) if *s == -1.0 => write!(f, "({a}-{inner})"),
                _ => write!(f, "({a}+{b})"),
            },
            RealFunction::Product(a, b) => write!(f, "{a}*{b}"),
            RealFunction::Scaled(s, g) if *s == -1.0 => write!(f, "(-{g})"),
            RealFunction::Scaled(s, g) if *s < 0.0 => write!(f, "(-{})*{g}", -s),
            RealFunction::Scaled(s, g) => write!(f, "{s}*{g}"),
        }
    }
}
