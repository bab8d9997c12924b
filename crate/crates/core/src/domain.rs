//! Compact domains sampled on finite grids, norms on sampled values, the
//! Korovkin test-function sets and the Korovkin absolute continuity modulus.
//!
//! Every grid is a tensor product of one-dimensional axes. An axis is either
//! linear (a closed interval) or angular (the circle, stored as angles in
//! `[0, 2π)`). Angular axes embed into the plane as `(cos θ, sin θ)`; all
//! quantities that refer to the ambient Euclidean space (projections, the
//! deficit of positivity, distances in the Korovkin modulus) use that
//! embedding.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Builtin;
use crate::function::RealFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Box,
    CircleAngle,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Linear,
    Angle,
}

/// One sorted coordinate axis of a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    coords: Vec<f64>,
    lo: f64,
    hi: f64,
    kind: AxisKind,
}

impl Axis {
    pub fn linear(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        if count == 0 {
            return Err(Error::domain("grid needs at least one point"));
        }
        if count > 1 && hi == lo {
            return Err(Error::domain("degenerate interval needs exactly one grid point"));
        }
        let coords = if count == 1 {
            vec![lo]
        } else {
            let h = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + i as f64 * h })
                .collect()
        };
        Ok(Axis {
            coords,
            lo,
            hi,
            kind: AxisKind::Linear,
        })
    }

    pub fn angle(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::domain("circle grid needs at least two angles"));
        }
        let coords = (0..count).map(|i| TAU * i as f64 / count as f64).collect();
        Ok(Axis {
            coords,
            lo: 0.0,
            hi: TAU,
            kind: AxisKind::Angle,
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    /// Neighbouring node indices and the fractional position of `coord`
    /// between them, for linear interpolation.
    pub(crate) fn bracket(&self, coord: f64) -> (usize, usize, f64) {
        let n = self.coords.len();
        if n == 1 {
            return (0, 0, 0.0);
        }
        match self.kind {
            AxisKind::Linear => {
                let c = coord.clamp(self.coords[0], self.coords[n - 1]);
                let i1 = self.coords.partition_point(|&v| v <= c).clamp(1, n - 1);
                let i0 = i1 - 1;
                let (a, b) = (self.coords[i0], self.coords[i1]);
                let t = if c >= b { 1.0 } else { (c - a) / (b - a) };
                if t >= 1.0 {
                    (i1, i1, 0.0)
                } else {
                    (i0, i1, t)
                }
            }
            AxisKind::Angle => {
                let c = coord.rem_euclid(TAU);
                let i0 = self.coords.partition_point(|&v| v <= c).saturating_sub(1);
                let i1 = (i0 + 1) % n;
                let b = if i1 == 0 { TAU } else { self.coords[i1] };
                let t = (c - self.coords[i0]) / (b - self.coords[i0]);
                (i0, i1, t.clamp(0.0, 1.0))
            }
        }
    }

    /// Quadrature weights: trapezoid on linear axes, uniform on the circle.
    fn weights(&self) -> Vec<f64> {
        let n = self.coords.len();
        match self.kind {
            AxisKind::Angle => vec![TAU / n as f64; n],
            AxisKind::Linear if n == 1 => vec![1.0],
            AxisKind::Linear => (0..n)
                .map(|i| {
                    let left = if i > 0 {
                        self.coords[i] - self.coords[i - 1]
                    } else {
                        0.0
                    };
                    let right = if i + 1 < n {
                        self.coords[i + 1] - self.coords[i]
                    } else {
                        0.0
                    };
                    0.5 * (left + right)
                })
                .collect(),
        }
    }
}

/// A finite sampling of a compact set `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    kind: DomainKind,
    axes: Vec<Axis>,
    points: Arc<Vec<Vec<f64>>>,
}

impl GridDomain {
    fn from_axes(kind: DomainKind, axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(Axis::is_empty) {
            return Err(Error::domain("domain has no points"));
        }
        let mut points: Vec<Vec<f64>> = vec![Vec::with_capacity(axes.len())];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.coords.iter().map(move |&c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        let domain = GridDomain {
            kind,
            axes,
            points: Arc::new(points),
        };
        domain.validate()?;
        Ok(domain)
    }

    fn validate(&self) -> Result<()> {
        for p in self.points.iter() {
            for (c, axis) in p.iter().zip(&self.axes) {
                if !c.is_finite() {
                    return Err(Error::invariant("grid coordinate is not finite"));
                }
                let ok = match axis.kind {
                    AxisKind::Linear => (axis.lo..=axis.hi).contains(c),
                    AxisKind::Angle => (0.0..TAU).contains(c),
                };
                if !ok {
                    return Err(Error::invariant(format!("grid coordinate {c} outside bounds")));
                }
            }
        }
        Ok(())
    }

    /// Equispaced grid of `count` points on `[lo, hi]`, endpoints included.
    pub fn interval(lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::from_axes(DomainKind::Interval, vec![Axis::linear(lo, hi, count)?])
    }

    pub fn unit_interval(count: usize) -> Result<Self> {
        Self::interval(0.0, 1.0, count)
    }

    /// Single-point domain, used as the codomain of functionals.
    pub fn point(at: f64) -> Self {
        Self::interval(at, at, 1).expect("a single point is a valid domain")
    }

    /// Tensor grid over a box with `count` points along every axis.
    pub fn boxed(bounds: &[(f64, f64)], count: usize) -> Result<Self> {
        let axes = bounds
            .iter()
            .map(|&(lo, hi)| Axis::linear(lo, hi, count))
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(DomainKind::Box, axes)
    }

    pub fn unit_square(count: usize) -> Result<Self> {
        Self::boxed(&[(0.0, 1.0), (0.0, 1.0)], count)
    }

    /// `count` equispaced angles `2πi/count` on the circle.
    pub fn circle(count: usize) -> Result<Self> {
        Self::from_axes(DomainKind::CircleAngle, vec![Axis::angle(count)?])
    }

    /// Cartesian product of two grids.
    pub fn product(a: &GridDomain, b: &GridDomain) -> Result<Self> {
        let axes = a.axes.iter().chain(&b.axes).cloned().collect();
        Self::from_axes(DomainKind::Product, axes)
    }

    /// The same domain with every axis subdivided `factor` times.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::precondition("refinement factor must be positive"));
        }
        let axes = self
            .axes
            .iter()
            .map(|a| match a.kind {
                AxisKind::Angle => Axis::angle(a.len() * factor),
                AxisKind::Linear if a.len() == 1 => Ok(a.clone()),
                AxisKind::Linear => Axis::linear(a.lo, a.hi, (a.len() - 1) * factor + 1),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(self.kind, axes)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(Axis::bounds).collect()
    }

    pub fn is_circle(&self) -> bool {
        self.kind == DomainKind::CircleAngle
    }

    pub fn ambient_dimension(&self) -> usize {
        self.axes
            .iter()
            .map(|a| if a.kind == AxisKind::Angle { 2 } else { 1 })
            .sum()
    }

    /// The point in the ambient Euclidean space represented by grid coordinates `p`.
    pub fn ambient_point(&self, p: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ambient_dimension());
        for (axis, &c) in self.axes.iter().zip(p) {
            match axis.kind {
                AxisKind::Linear => out.push(c),
                AxisKind::Angle => {
                    out.push(c.cos());
                    out.push(c.sin());
                }
            }
        }
        out
    }

    /// The canonical projections `pr_1, ..., pr_N` of the ambient space, as
    /// functions of grid coordinates.
    pub fn ambient_projections(&self) -> Vec<RealFunction> {
        let mut out = Vec::new();
        for (k, axis) in self.axes.iter().enumerate() {
            let coord = RealFunction::Projection(k);
            match axis.kind {
                AxisKind::Linear => out.push(coord),
                AxisKind::Angle => {
                    out.push(coord.clone().apply_builtin(Builtin::Cos));
                    out.push(coord.apply_builtin(Builtin::Sin));
                }
            }
        }
        out
    }

    /// Quadrature weights per grid point, summing to the domain's measure.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let mut w = vec![1.0];
        for axis in &self.axes {
            let aw = axis.weights();
            w = w.iter().flat_map(|&a| aw.iter().map(move |&b| a * b)).collect();
        }
        w
    }

    pub fn measure(&self) -> f64 {
        self.quadrature_weights().iter().sum()
    }
}

/// Which norm to measure sampled functions in.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    Sup,
    L1 { weights: Vec<f64> },
}

impl NormKind {
    /// Grid L¹ norm with the domain's quadrature weights.
    pub fn l1_on(domain: &GridDomain) -> Self {
        NormKind::L1 {
            weights: domain.quadrature_weights(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            NormKind::Sup => "sup",
            NormKind::L1 { .. } => "l1",
        }
    }
}

pub fn norm(values: &[f64], kind: &NormKind) -> Result<f64> {
    match kind {
        NormKind::Sup => Ok(values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))),
        NormKind::L1 { weights } => {
            if weights.len() != values.len() {
                return Err(Error::invariant(format!(
                    "{} L1 weights for {} values",
                    weights.len(),
                    values.len()
                )));
            }
            if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
                return Err(Error::invariant("L1 weights must be nonnegative"));
            }
            Ok(weights.iter().zip(values).map(|(w, v)| w * v.abs()).sum())
        }
    }
}

/// Smallest `α ≥ 0` with `K + α(1,...,1)` inside the positive orthant.
pub fn deficit_of_positivity(domain: &GridDomain) -> Result<f64> {
    if domain.is_empty() {
        return Err(Error::domain("empty domain"));
    }
    let min = domain
        .points()
        .iter()
        .flat_map(|p| domain.ambient_point(p))
        .fold(f64::INFINITY, f64::min);
    Ok((-min).max(0.0))
}

/// Test functions `{1, -(pr_k+α), Σ(pr_k+α)²}`, or with `simplified` the set
/// `{1, -pr_k, Σ(pr_k² + 2α pr_k)}` valid for strongly translatable operators.
pub fn korovkin_test_set(domain: &GridDomain, alpha: f64, simplified: bool) -> Result<Vec<RealFunction>> {
    let deficit = deficit_of_positivity(domain)?;
    if !(alpha >= deficit) {
        return Err(Error::precondition(format!(
            "alpha {alpha} is below the deficit of positivity {deficit}"
        )));
    }
    let projections = domain.ambient_projections();
    let shifted = |p: &RealFunction| {
        if alpha == 0.0 {
            p.clone()
        } else {
            p.clone().shift(alpha)
        }
    };
    let mut set = vec![RealFunction::one()];
    if simplified {
        set.extend(projections.iter().map(|p| -p.clone()));
        let sum = projections
            .iter()
            .map(|p| {
                let sq = p.clone().square();
                if alpha == 0.0 {
                    sq
                } else {
                    sq + p.clone().scale(2.0 * alpha)
                }
            })
            .reduce(|a, b| a + b)
            .expect("at least one projection");
        set.push(sum);
    } else {
        set.extend(projections.iter().map(|p| -shifted(p)));
        set.push(sum_of_shifted_squares(&projections, alpha));
    }
    Ok(set)
}

/// `Σ_k (pr_k + α)²`.
pub(crate) fn sum_of_shifted_squares(projections: &[RealFunction], alpha: f64) -> RealFunction {
    projections
        .iter()
        .map(|p| {
            if alpha == 0.0 {
                p.clone()
            } else {
                p.clone().shift(alpha)
            }
            .square()
        })
        .reduce(|a, b| a + b)
        .expect("at least one projection")
}

/// Trigonometric test set on the circle: `{1, -1-cos, -1-sin, 3+2cos+2sin}`,
/// or `{1, -cos, -sin, 2cos+2sin}` when `plus_form` is false.
pub fn trig_test_set(domain: &GridDomain, plus_form: bool) -> Result<Vec<RealFunction>> {
    if !domain.is_circle() {
        return Err(Error::domain("trigonometric test set needs a circle domain"));
    }
    let src: [&str; 4] = if plus_form {
        ["1", "-1-cos(x)", "-1-sin(x)", "3+2*cos(x)+2*sin(x)"]
    } else {
        ["1", "-cos(x)", "-sin(x)", "2*cos(x)+2*sin(x)"]
    };
    src.iter().map(|s| RealFunction::parse(s)).collect()
}

/// Smallest `δ` with `|f(x) - f(y)| ≤ ε + δ‖x - y‖²` over all pairs of grid
/// points (Euclidean distance in the ambient space). Returns `+∞` when two
/// coincident points carry different values.
pub fn korovkin_delta(f: &RealFunction, domain: &GridDomain, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if domain.len() < 2 {
        return Err(Error::precondition("korovkin delta needs at least two grid points"));
    }
    let values = f.sample(domain)?;
    let ambient: Vec<Vec<f64>> = domain.points().iter().map(|p| domain.ambient_point(p)).collect();
    let mut delta = 0.0_f64;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let diff = (values[i] - values[j]).abs();
            if diff <= epsilon {
                continue;
            }
            let dist2: f64 = ambient[i].iter().zip(&ambient[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist2 == 0.0 {
                return Ok(f64::INFINITY);
            }
            let mut cand = (diff - epsilon) / dist2;
            // Round up until the inequality holds in floating point.
            while epsilon + cand * dist2 < diff {
                cand = cand.next_up();
            }
            delta = delta.max(cand);
        }
    }
    Ok(delta)
}

/// Re-scans every grid pair and returns the largest excess of
/// `|f(x)-f(y)|` over `ε + δ‖x-y‖²` (nonpositive when `δ` is valid).
pub fn korovkin_excess(f: &RealFunction, domain: &GridDomain, epsilon: f64, delta: f64) -> Result<f64> {
    let values = f.sample(domain)?;
    let ambient: Vec<Vec<f64>> = domain.points().iter().map(|p| domain.ambient_point(p)).collect();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let dist2: f64 = ambient[i].iter().zip(&ambient[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            let excess = (values[i] - values[j]).abs() - (epsilon + delta * dist2);
            worst = worst.max(excess);
        }
    }
    Ok(worst)
}
