//! Bernstein basis and the Bernstein-type operator families on `C([0,1])`:
//! sup-Bernstein (also in a two-dimensional tensor form), Kantorovich,
//! max-Kantorovich, and the composition operator `f ↦ f∘φ`.
//!
//! Every family uses the windows `[k/(n+1), (k+1)/(n+1)]`, `k = 0..=n`.

use std::sync::Arc;

use crate::domain::{AxisKind, GridDomain};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::operators::{Operator, OperatorFamily, OperatorInstance};
use crate::quadrature::Quadrature;

/// `p_{n,k}(x) = C(n,k) x^k (1-x)^{n-k}` for `k = 0..=n`.
///
/// Computed with the de Casteljau triangle, which needs no binomial
/// coefficients and stays accurate for large `n`.
pub fn bernstein_basis(n: usize, x: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::precondition("Bernstein degree must be at least 1"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "Bernstein basis evaluated at {x} outside [0, 1]"
        )));
    }
    Ok(basis_unchecked(n, x))
}

fn basis_unchecked(n: usize, x: f64) -> Vec<f64> {
    let y = 1.0 - x;
    let mut b = vec![0.0; n + 1];
    b[0] = 1.0;
    for m in 1..=n {
        for j in (1..=m).rev() {
            b[j] = y * b[j] + x * b[j - 1];
        }
        b[0] *= y;
    }
    b
}

/// The window `[k/(n+1), (k+1)/(n+1)]`.
pub fn window(n: usize, k: usize) -> (f64, f64) {
    let m = (n + 1) as f64;
    (k as f64 / m, (k + 1) as f64 / m)
}

/// A continuous map `φ: [0,1] -> [0,1]`.
#[derive(Debug, Clone)]
pub struct CompositionMap {
    phi: RealFunction,
    identity: bool,
}

const RANGE_SLACK: f64 = 1e-12;

impl CompositionMap {
    pub fn identity() -> Self {
        CompositionMap {
            phi: RealFunction::x(),
            identity: true,
        }
    }

    /// Checks that `φ` maps every grid coordinate into `[0, 1]`.
    pub fn new(phi: RealFunction, grid: &GridDomain) -> Result<Self> {
        for axis in grid.axes() {
            for &c in axis.coords() {
                let v = phi.try_eval(&[c])?;
                if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v) {
                    return Err(Error::domain(format!("φ = {phi} maps {c} to {v}, outside [0, 1]")));
                }
            }
        }
        Ok(CompositionMap { phi, identity: false })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.identity {
            x
        } else {
            self.phi.eval(&[x]).clamp(0.0, 1.0)
        }
    }

    pub fn function(&self) -> &RealFunction {
        &self.phi
    }
}

impl std::fmt::Display for CompositionMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.identity {
            f.write_str("id")
        } else {
            write!(f, "{}", self.phi)
        }
    }
}

fn require_unit_interval(domain: &GridDomain) -> Result<()> {
    let ok = domain.dimension() == 1
        && domain.axes()[0].kind() == AxisKind::Linear
        && domain.bounds()[0] == (0.0, 1.0)
        && domain.len() >= 2;
    if ok {
        Ok(())
    } else {
        Err(Error::domain(
            "operator needs a grid on [0, 1] with at least two points",
        ))
    }
}

fn require_unit_square(domain: &GridDomain) -> Result<()> {
    let ok = domain.dimension() == 2
        && domain
            .axes()
            .iter()
            .all(|a| a.kind() == AxisKind::Linear && a.len() >= 2)
        && domain.bounds().iter().all(|&b| b == (0.0, 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain("tensor operator needs a grid on [0, 1] x [0, 1]"))
    }
}

fn basis_rows(n: usize, phi: &CompositionMap, coords: &[f64]) -> Vec<Vec<f64>> {
    coords.iter().map(|&x| basis_unchecked(n, phi.eval(x))).collect()
}

/// Equispaced sample points of every window: both endpoints plus
/// `refinement * ceil(density / (n+1))` interior points, where `density` is
/// the number of grid spacings per unit length.
fn window_nodes(n: usize, grid_len: usize, refinement: usize) -> Vec<Vec<f64>> {
    let density = grid_len.saturating_sub(1).max(1);
    let interior = refinement * density.div_ceil(n + 1);
    (0..=n)
        .map(|k| {
            let (a, b) = window(n, k);
            let steps = interior + 1;
            (0..=steps)
                .map(|i| {
                    if i == steps {
                        b
                    } else {
                        a + (b - a) * i as f64 / steps as f64
                    }
                })
                .collect()
        })
        .collect()
}

fn window_max(f: &RealFunction, nodes: &[f64]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::Internal("sup window has no sample points".into()));
    }
    nodes
        .iter()
        .map(|&t| f.try_eval(&[t]))
        .try_fold(f64::NEG_INFINITY, |m, v| Ok(m.max(v?)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `T_n(f)(x) = Σ_k p_{n,k}(φ(x)) · sup_{t ∈ window k} f(t)`.
#[derive(Debug, Clone)]
pub struct SupBernstein {
    n: usize,
    phi: CompositionMap,
    domain: GridDomain,
    nodes: Vec<Vec<f64>>,
    rows: Vec<Vec<f64>>,
}

impl SupBernstein {
    pub fn new(n: usize, phi: CompositionMap, refinement: usize, domain: GridDomain) -> Result<Self> {
        if n == 0 || refinement == 0 {
            return Err(Error::precondition("sup-Bernstein needs n >= 1 and refinement >= 1"));
        }
        require_unit_interval(&domain)?;
        let nodes = window_nodes(n, domain.len(), refinement);
        let rows = basis_rows(n, &phi, domain.axes()[0].coords());
        Ok(SupBernstein {
            n,
            phi,
            domain,
            nodes,
            rows,
        })
    }

    /// The window maxima `sup_{window k} f`.
    pub fn window_sups(&self, f: &RealFunction) -> Result<Vec<f64>> {
        self.nodes.iter().map(|w| window_max(f, w)).collect()
    }
}

impl Operator for SupBernstein {
    fn label(&self) -> String {
        format!("sup_bernstein[n={}, φ={}]", self.n, self.phi)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let sups = self.window_sups(f)?;
        Ok(self.rows.iter().map(|r| dot(r, &sups)).collect())
    }
}

/// `(K_n f)(x) = (n+1) Σ_k p_{n,k}(φ(x)) ∫_{window k} f`.
#[derive(Debug, Clone)]
pub struct Kantorovich {
    n: usize,
    phi: CompositionMap,
    domain: GridDomain,
    rules: Vec<(Vec<f64>, Vec<f64>)>,
    rows: Vec<Vec<f64>>,
}

impl Kantorovich {
    pub fn new(n: usize, phi: CompositionMap, quadrature: Quadrature, domain: GridDomain) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("Kantorovich needs n >= 1"));
        }
        quadrature.validate()?;
        require_unit_interval(&domain)?;
        let rules = (0..=n)
            .map(|k| {
                let (a, b) = window(n, k);
                quadrature.rule(a, b)
            })
            .collect();
        let rows = basis_rows(n, &phi, domain.axes()[0].coords());
        Ok(Kantorovich {
            n,
            phi,
            domain,
            rules,
            rows,
        })
    }

    /// `(n+1) ∫_{window k} f` for every window.
    pub fn window_averages(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let scale = (self.n + 1) as f64;
        self.rules
            .iter()
            .map(|(nodes, weights)| {
                let mut acc = 0.0;
                for (&t, &w) in nodes.iter().zip(weights) {
                    acc += w * f.try_eval(&[t])?;
                }
                Ok(scale * acc)
            })
            .collect()
    }
}

impl Operator for Kantorovich {
    fn label(&self) -> String {
        format!("kantorovich[n={}, φ={}]", self.n, self.phi)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let avg = self.window_averages(f)?;
        Ok(self.rows.iter().map(|r| dot(r, &avg)).collect())
    }
}

/// `T_n(f) = max(K_n f, K_{n+1} f)` pointwise.
#[derive(Debug, Clone)]
pub struct MaxKantorovich {
    lower: Kantorovich,
    upper: Kantorovich,
}

impl MaxKantorovich {
    pub fn new(n: usize, phi: CompositionMap, quadrature: Quadrature, domain: GridDomain) -> Result<Self> {
        Ok(MaxKantorovich {
            lower: Kantorovich::new(n, phi.clone(), quadrature, domain.clone())?,
            upper: Kantorovich::new(n + 1, phi, quadrature, domain)?,
        })
    }
}

impl Operator for MaxKantorovich {
    fn label(&self) -> String {
        format!("max_kantorovich[n={}, φ={}]", self.lower.n, self.lower.phi)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.lower.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.lower.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let a = self.lower.apply(f)?;
        let b = self.upper.apply(f)?;
        Ok(a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect())
    }
}

/// `A(f) = f∘φ`, with `φ` applied to every coordinate.
#[derive(Debug, Clone)]
pub struct CompositionOperator {
    phi: CompositionMap,
    domain: GridDomain,
}

impl CompositionOperator {
    pub fn new(phi: CompositionMap, domain: GridDomain) -> Result<Self> {
        if domain.axes().iter().any(|a| a.kind() != AxisKind::Linear) {
            return Err(Error::domain("composition operator needs linear axes"));
        }
        Ok(CompositionOperator { phi, domain })
    }
}

impl Operator for CompositionOperator {
    fn label(&self) -> String {
        format!("composition[φ={}]", self.phi)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        self.domain
            .points()
            .iter()
            .map(|p| {
                let q: Vec<f64> = p.iter().map(|&c| self.phi.eval(c)).collect();
                f.try_eval(&q)
            })
            .collect()
    }
}

/// Tensor-product sup-Bernstein operator on `[0,1]²`:
/// `T_n(f)(x,y) = Σ_k Σ_j p_{n,k}(φ(x)) p_{n,j}(φ(y)) sup_{window k × window j} f`.
#[derive(Debug, Clone)]
pub struct TensorSupBernstein {
    n: usize,
    phi: CompositionMap,
    domain: GridDomain,
    nodes: [Vec<Vec<f64>>; 2],
    rows: [Vec<Vec<f64>>; 2],
}

impl TensorSupBernstein {
    pub fn new(n: usize, phi: CompositionMap, refinement: usize, domain: GridDomain) -> Result<Self> {
        if n == 0 || refinement == 0 {
            return Err(Error::precondition("sup-Bernstein needs n >= 1 and refinement >= 1"));
        }
        require_unit_square(&domain)?;
        let axes = domain.axes();
        let nodes = [
            window_nodes(n, axes[0].len(), refinement),
            window_nodes(n, axes[1].len(), refinement),
        ];
        let rows = [
            basis_rows(n, &phi, axes[0].coords()),
            basis_rows(n, &phi, axes[1].coords()),
        ];
        Ok(TensorSupBernstein {
            n,
            phi,
            domain,
            nodes,
            rows,
        })
    }
}

impl Operator for TensorSupBernstein {
    fn label(&self) -> String {
        format!("tensor_sup_bernstein[n={}, φ={}]", self.n, self.phi)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let [nx, ny] = &self.nodes;
        let mut sups = vec![vec![0.0; ny.len()]; nx.len()];
        for (k, wx) in nx.iter().enumerate() {
            for (j, wy) in ny.iter().enumerate() {
                if wx.is_empty() || wy.is_empty() {
                    return Err(Error::Internal("sup window has no sample points".into()));
                }
                let mut m = f64::NEG_INFINITY;
                for &t in wx {
                    for &s in wy {
                        m = m.max(f.try_eval(&[t, s])?);
                    }
                }
                sups[k][j] = m;
            }
        }
        let [rx, ry] = &self.rows;
        let mut out = Vec::with_capacity(rx.len() * ry.len());
        for bx in rx {
            // Σ_k bx[k] · S[k][j], then contract with the y basis.
            let inner: Vec<f64> = (0..ny.len())
                .map(|j| bx.iter().zip(&sups).map(|(b, row)| b * row[j]).sum())
                .collect();
            out.extend(ry.iter().map(|by| dot(by, &inner)));
        }
        Ok(out)
    }
}

pub fn sup_bernstein_family(phi: CompositionMap, refinement: usize, domain: GridDomain) -> OperatorFamily {
    let d = domain.clone();
    OperatorFamily::new(format!("sup_bernstein[φ={phi}]"), domain.clone(), domain, move |n| {
        Ok(Arc::new(SupBernstein::new(n, phi.clone(), refinement, d.clone())?) as OperatorInstance)
    })
}

pub fn kantorovich_family(phi: CompositionMap, quadrature: Quadrature, domain: GridDomain) -> OperatorFamily {
    let d = domain.clone();
    OperatorFamily::new(format!("kantorovich[φ={phi}]"), domain.clone(), domain, move |n| {
        Ok(Arc::new(Kantorovich::new(n, phi.clone(), quadrature, d.clone())?) as OperatorInstance)
    })
}

pub fn max_kantorovich_family(phi: CompositionMap, quadrature: Quadrature, domain: GridDomain) -> OperatorFamily {
    let d = domain.clone();
    OperatorFamily::new(format!("max_kantorovich[φ={phi}]"), domain.clone(), domain, move |n| {
        Ok(Arc::new(MaxKantorovich::new(n, phi.clone(), quadrature, d.clone())?) as OperatorInstance)
    })
}

pub fn tensor_sup_bernstein_family(phi: CompositionMap, refinement: usize, domain: GridDomain) -> OperatorFamily {
    let d = domain.clone();
    OperatorFamily::new(
        format!("tensor_sup_bernstein[φ={phi}]"),
        domain.clone(),
        domain,
        move |n| Ok(Arc::new(TensorSupBernstein::new(n, phi.clone(), refinement, d.clone())?) as OperatorInstance),
    )
}
