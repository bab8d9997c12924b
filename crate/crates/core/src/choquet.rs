//! Choquet integrals against a distorted Lebesgue measure `μ = g∘m`, and the
//! Choquet–Kantorovich operator built from them.

use std::fmt;
use std::sync::Arc;

use crate::bernstein::{window, CompositionMap};
use crate::domain::{AxisKind, GridDomain};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::function::RealFunction;
use crate::operators::{Operator, OperatorFamily, OperatorInstance};

pub const DEFAULT_RESOLUTION: usize = 256;

const PROBE_POINTS: usize = 1001;
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Kind {
    Identity,
    Power(f64),
    Expr(Arc<Expr>),
}

/// A concave, strictly increasing `g: [0,1] -> [0,1]` with `g(0) = 0` and
/// `g(1) = 1`.
#[derive(Debug, Clone)]
pub struct DistortionFunction {
    kind: Kind,
}

impl DistortionFunction {
    pub fn identity() -> Self {
        DistortionFunction { kind: Kind::Identity }
    }

    pub fn sqrt() -> Self {
        DistortionFunction { kind: Kind::Power(0.5) }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invariant(format!("distortion exponent {p} outside (0, 1]")));
        }
        Ok(DistortionFunction { kind: Kind::Power(p) })
    }

    /// A user expression in the variable `x`, validated on a probe grid.
    pub fn from_expr(expr: Expr) -> Result<Self> {
        let g = DistortionFunction {
            kind: Kind::Expr(Arc::new(expr)),
        };
        g.validate()?;
        Ok(g)
    }

    /// `identity | sqrt | power:<p> | expr:<source>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "identity" => return Ok(Self::identity()),
            "sqrt" => return Ok(Self::sqrt()),
            _ => {}
        }
        if let Some(p) = spec.strip_prefix("power:") {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::invariant(format!("bad distortion exponent {p:?}")))?;
            return Self::power(p);
        }
        if let Some(src) = spec.strip_prefix("expr:") {
            return Self::from_expr(Expr::parse(src)?);
        }
        Err(Error::invariant(format!(
            "unknown distortion {spec:?} (expected identity, sqrt, power:<p> or expr:<source>)"
        )))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Identity => t,
            Kind::Power(p) => t.powf(*p),
            Kind::Expr(e) => e.eval(&[t]),
        }
    }

    /// Checks the boundary values, strict monotonicity and midpoint
    /// concavity on 1001 equispaced points.
    pub fn validate(&self) -> Result<()> {
        let g0 = self.eval(0.0);
        let g1 = self.eval(1.0);
        if (g0).abs() > SLACK || (g1 - 1.0).abs() > SLACK {
            return Err(Error::invariant(format!(
                "distortion {self} has g(0) = {g0}, g(1) = {g1}"
            )));
        }
        let step = 1.0 / (PROBE_POINTS - 1) as f64;
        let vals: Vec<f64> = (0..PROBE_POINTS).map(|i| self.eval(i as f64 * step)).collect();
        if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::invariant(format!(
                "distortion {self} is not finite at {}",
                i as f64 * step
            )));
        }
        if let Some(i) = (1..PROBE_POINTS).find(|&i| vals[i] <= vals[i - 1]) {
            return Err(Error::invariant(format!(
                "distortion {self} is not strictly increasing near {}",
                i as f64 * step
            )));
        }
        // Midpoints of (i-1, i+1) are the probe points themselves.
        if let Some(i) = (1..PROBE_POINTS - 1).find(|&i| vals[i] < (vals[i - 1] + vals[i + 1]) / 2.0 - SLACK) {
            return Err(Error::invariant(format!(
                "distortion {self} is not concave near {}",
                i as f64 * step
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DistortionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Identity => f.write_str("identity"),
            Kind::Power(p) if *p == 0.5 => f.write_str("sqrt"),
            Kind::Power(p) => write!(f, "power:{p}"),
            Kind::Expr(e) => write!(f, "expr:{e}"),
        }
    }
}

/// Increments `g(i h) - g((i-1) h)` for `i = 1..=r`.
fn increments(g: &DistortionFunction, h: f64, r: usize) -> Vec<f64> {
    let mut prev = g.eval(0.0);
    (1..=r)
        .map(|i| {
            let cur = g.eval(i as f64 * h);
            let d = cur - prev;
            prev = cur;
            d
        })
        .collect()
}

/// Sorted sum `Σ f_(i) Δg_i` over the cell midpoints of `[a, b]`.
///
/// Signed values need no special handling: adding `c` to every sample adds
/// `c · Σ Δg_i = c · g(b - a)`, so this equals the shifted form exactly.
fn sorted_sum(f: &RealFunction, a: f64, b: f64, dg: &[f64], buf: &mut Vec<f64>) -> Result<f64> {
    let r = dg.len();
    let h = (b - a) / r as f64;
    buf.clear();
    for i in 0..r {
        buf.push(f.try_eval(&[a + (i as f64 + 0.5) * h])?);
    }
    buf.sort_unstable_by(|x, y| y.total_cmp(x));
    Ok(buf.iter().zip(dg).map(|(v, d)| v * d).sum())
}

/// Discrete Choquet integral of `f` over `[a, b]` with respect to `g∘m`,
/// using `resolution` equal-length cells sampled at their midpoints.
pub fn choquet_integral(f: &RealFunction, a: f64, b: f64, g: &DistortionFunction, resolution: usize) -> Result<f64> {
    if resolution < 2 {
        return Err(Error::precondition(format!("resolution {resolution} < 2")));
    }
    if !(b > a) {
        return Err(Error::precondition(format!("empty interval [{a}, {b}]")));
    }
    if b - a > 1.0 + SLACK {
        return Err(Error::domain(format!(
            "interval [{a}, {b}] is longer than 1; the distortion is defined on [0, 1]"
        )));
    }
    let dg = increments(g, (b - a) / resolution as f64, resolution);
    sorted_sum(f, a, b, &dg, &mut Vec::with_capacity(resolution))
}

/// `T_n(f)(x) = Σ_k p_{n,k}(φ(x)) · (C)∫_{window k} f dμ / μ(window k)`.
#[derive(Debug, Clone)]
pub struct ChoquetKantorovich {
    n: usize,
    phi: CompositionMap,
    g: DistortionFunction,
    domain: GridDomain,
    dg: Vec<f64>,
    normalizer: f64,
    rows: Vec<Vec<f64>>,
}

impl ChoquetKantorovich {
    pub fn new(
        n: usize,
        phi: CompositionMap,
        g: DistortionFunction,
        resolution: usize,
        domain: GridDomain,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("Choquet-Kantorovich needs n >= 1"));
        }
        if resolution < 2 {
            return Err(Error::precondition(format!("resolution {resolution} < 2")));
        }
        g.validate()?;
        let unit = domain.dimension() == 1
            && domain.axes()[0].kind() == AxisKind::Linear
            && domain.bounds()[0] == (0.0, 1.0)
            && domain.len() >= 2;
        if !unit {
            return Err(Error::domain(
                "operator needs a grid on [0, 1] with at least two points",
            ));
        }
        let width = 1.0 / (n + 1) as f64;
        let normalizer = g.eval(width);
        if !(normalizer > 0.0) {
            return Err(Error::invariant(format!("window measure g({width}) = {normalizer}")));
        }
        let dg = increments(&g, width / resolution as f64, resolution);
        let rows = domain.axes()[0]
            .coords()
            .iter()
            .map(|&x| crate::bernstein::bernstein_basis(n, phi.eval(x)))
            .collect::<Result<_>>()?;
        Ok(ChoquetKantorovich {
            n,
            phi,
            g,
            domain,
            dg,
            normalizer,
            rows,
        })
    }

    /// The normalised window integrals.
    pub fn window_terms(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let mut buf = Vec::with_capacity(self.dg.len());
        (0..=self.n)
            .map(|k| {
                let (a, b) = window(self.n, k);
                Ok(sorted_sum(f, a, b, &self.dg, &mut buf)? / self.normalizer)
            })
            .collect()
    }
}

impl Operator for ChoquetKantorovich {
    fn label(&self) -> String {
        format!("choquet_kantorovich[n={}, φ={}, g={}]", self.n, self.phi, self.g)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let terms = self.window_terms(f)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().zip(&terms).map(|(p, t)| p * t).sum())
            .collect())
    }
}

pub fn choquet_kantorovich_family(
    phi: CompositionMap,
    g: DistortionFunction,
    resolution: usize,
    domain: GridDomain,
) -> OperatorFamily {
    let d = domain.clone();
    OperatorFamily::new(
        format!("choquet_kantorovich[φ={phi}, g={g}]"),
        domain.clone(),
        domain,
        move |n| {
            Ok(Arc::new(ChoquetKantorovich::new(
                n,
                phi.clone(),
                g.clone(),
                resolution,
                d.clone(),
            )?) as OperatorInstance)
        },
    )
}

/// `f ↦ (C)∫_a^b f dμ` as an operator into the one-point space, so the
/// axiom checkers apply to the integral itself.
#[derive(Debug, Clone)]
pub struct ChoquetFunctional {
    a: f64,
    b: f64,
    g: DistortionFunction,
    dg: Vec<f64>,
    input: GridDomain,
    output: GridDomain,
}

impl ChoquetFunctional {
    pub fn new(a: f64, b: f64, g: DistortionFunction, resolution: usize, grid_points: usize) -> Result<Self> {
        // Validates the interval and resolution.
        choquet_integral(&RealFunction::one(), a, b, &g, resolution)?;
        let dg = increments(&g, (b - a) / resolution as f64, resolution);
        Ok(ChoquetFunctional {
            a,
            b,
            g,
            dg,
            input: GridDomain::interval(a, b, grid_points)?,
            output: GridDomain::point(0.0),
        })
    }
}

impl Operator for ChoquetFunctional {
    fn label(&self) -> String {
        format!("choquet[{}, {}; g={}]", self.a, self.b, self.g)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.input
    }

    fn output_domain(&self) -> &GridDomain {
        &self.output
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        Ok(vec![sorted_sum(f, self.a, self.b, &self.dg, &mut Vec::new())?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::Kantorovich;
    use crate::operators::SampleGenerator;
    use crate::operators::{check_comonotone_additive, check_monotone, check_sublinear, check_translatable};
    use crate::quadrature::Quadrature;

    #[test]
    fn spec_parsing() {
        assert_eq!(DistortionFunction::from_spec("identity").unwrap().eval(0.3), 0.3);
        assert_eq!(DistortionFunction::from_spec("sqrt").unwrap().eval(0.25), 0.5);
        assert_eq!(DistortionFunction::from_spec("power:0.25").unwrap().eval(0.0625), 0.5);
        let e = DistortionFunction::from_spec("expr:2*x-x^2").unwrap();
        assert!((e.eval(0.5) - 0.75).abs() < 1e-15);
        for bad in ["power:2", "power:0", "expr:x^2", "expr:x+0.1", "expr:0.5*x", "cubic"] {
            assert!(
                matches!(DistortionFunction::from_spec(bad), Err(Error::Invariant(_))),
                "{bad} accepted"
            );
        }
        assert!(matches!(
            DistortionFunction::from_spec("expr:sqrt(x"),
            Err(Error::Parse { offset: 6, .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        for s in ["identity", "sqrt", "power:0.3", "expr:((2*x)-(x^2))"] {
            let g = DistortionFunction::from_spec(s).unwrap();
            let again = DistortionFunction::from_spec(&g.to_string()).unwrap();
            assert_eq!(g.eval(0.37), again.eval(0.37));
        }
    }

    #[test]
    fn identity_is_riemann() {
        let v = choquet_integral(&RealFunction::x(), 0.0, 1.0, &DistortionFunction::identity(), 10_000).unwrap();
        assert!((v - 0.5).abs() < 1e-3);
    }

    #[test]
    fn sqrt_distortion_of_x() {
        // Layer cake: ∫_0^1 g(m{x > t}) dt = ∫_0^1 √(1-t) dt, evaluated by an
        // independent quadrature (with the endpoint singularity resolved by t = 1 - s²).
        let oracle = Quadrature::Simpson { panels: 2000 }.integrate(|s| 2.0 * s * s, 0.0, 1.0);
        assert!((oracle - 2.0 / 3.0).abs() < 1e-12);
        let v = choquet_integral(&RealFunction::x(), 0.0, 1.0, &DistortionFunction::sqrt(), 10_000).unwrap();
        assert!((v - oracle).abs() < 2e-3);
    }

    #[test]
    fn constant_is_single_layer() {
        let g = DistortionFunction::sqrt();
        let v = choquet_integral(&RealFunction::constant(3.0), 0.2, 0.6, &g, 64).unwrap();
        assert!((v - 3.0 * 0.4_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn translation_identity() {
        let g = DistortionFunction::power(0.7).unwrap();
        let f = RealFunction::parse("sin(8*x)").unwrap();
        let base = choquet_integral(&f, 0.1, 0.9, &g, 300).unwrap();
        for c in [0.0, 0.5, 2.0, 10.0] {
            let v = choquet_integral(&f.clone().shift(c), 0.1, 0.9, &g, 300).unwrap();
            assert!((v - (base + c * g.eval(0.8))).abs() < 1e-9);
        }
    }

    #[test]
    fn resolution_consistency() {
        let g = DistortionFunction::sqrt();
        let f = RealFunction::parse("x^3-x").unwrap();
        let lip = 2.0;
        for r in [16, 64, 256] {
            let a = choquet_integral(&f, 0.0, 1.0, &g, r).unwrap();
            let b = choquet_integral(&f, 0.0, 1.0, &g, 2 * r).unwrap();
            assert!((a - b).abs() <= lip / r as f64, "R={r}");
        }
    }

    #[test]
    fn preconditions() {
        let g = DistortionFunction::identity();
        let f = RealFunction::x();
        assert!(matches!(
            choquet_integral(&f, 0.0, 1.0, &g, 1),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            choquet_integral(&f, 1.0, 1.0, &g, 8),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(choquet_integral(&f, 0.0, 2.0, &g, 8), Err(Error::Domain(_))));
    }

    #[test]
    fn functional_axioms() {
        let op = ChoquetFunctional::new(0.0, 1.0, DistortionFunction::sqrt(), 512, 65).unwrap();
        let mut gen = SampleGenerator::new(op.input_domain(), 5);
        let pairs = gen.pairs(10);
        let ordered = gen.ordered_pairs(10);
        assert!(check_sublinear(&op, &pairs, 1e-9).unwrap().passed());
        assert!(check_monotone(&op, &ordered, 1e-9).unwrap().passed());
        assert!(check_translatable(&op, &pairs, 1e-9, true).unwrap().passed());
        assert!(check_comonotone_additive(&op, 1e-9, 11).unwrap().passed());
    }

    #[test]
    fn operator_unital() {
        let d = GridDomain::unit_interval(21).unwrap();
        for n in [1, 4, 30] {
            let t = ChoquetKantorovich::new(n, CompositionMap::identity(), DistortionFunction::sqrt(), 32, d.clone())
                .unwrap();
            for v in t.apply(&RealFunction::one()).unwrap() {
                assert!((v - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn identity_distortion_matches_kantorovich() {
        let d = GridDomain::unit_interval(41).unwrap();
        let phi = CompositionMap::new(RealFunction::parse("x^2").unwrap(), &d).unwrap();
        for src in ["x^2", "sin(4*x)", "abs(x-0.5)"] {
            let f = RealFunction::parse(src).unwrap();
            for n in [2, 9] {
                let c =
                    ChoquetKantorovich::new(n, phi.clone(), DistortionFunction::identity(), 1024, d.clone()).unwrap();
                let k = Kantorovich::new(n, phi.clone(), Quadrature::Simpson { panels: 64 }, d.clone()).unwrap();
                let (oc, ok) = (c.apply(&f).unwrap(), k.apply(&f).unwrap());
                for (a, b) in oc.iter().zip(&ok) {
                    assert!((a - b).abs() < 1e-4, "{src} n={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn operator_axioms() {
        let d = GridDomain::unit_interval(33).unwrap();
        let t =
            ChoquetKantorovich::new(6, CompositionMap::identity(), DistortionFunction::sqrt(), 64, d.clone()).unwrap();
        let mut gen = SampleGenerator::new(&d, 21);
        let pairs = gen.pairs(10);
        let ordered = gen.ordered_pairs(10);
        assert!(check_sublinear(&t, &pairs, 1e-8).unwrap().passed());
        assert!(check_monotone(&t, &ordered, 1e-8).unwrap().passed());
        assert!(check_translatable(&t, &pairs, 1e-8, false).unwrap().passed());
    }

    #[test]
    fn rejects_bad_domain() {
        let d = GridDomain::interval(0.0, 2.0, 11).unwrap();
        assert!(matches!(
            ChoquetKantorovich::new(2, CompositionMap::identity(), DistortionFunction::sqrt(), 16, d),
            Err(Error::Domain(_))
        ));
    }
}
