//! Circle rotations, their Cesàro (Weyl) averages, and the mean operator.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::GridDomain;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::operators::{Operator, OperatorFamily, OperatorInstance};

/// `2π (√5 - 1) / 2`.
pub fn golden_angle() -> f64 {
    TAU * (5.0_f64.sqrt() - 1.0) / 2.0
}

/// Largest denominator tried by the rationality heuristic.
pub const MAX_DENOMINATOR: i64 = 10_000;
/// Distance below which a convergent counts as equal.
pub const RATIONAL_TOLERANCE: f64 = 1e-12;

/// `R_α(θ) = (θ + α) mod 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMap {
    alpha: f64,
}

impl RotationMap {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < TAU) {
            return Err(Error::precondition(format!("rotation angle {alpha} outside (0, 2π)")));
        }
        Ok(RotationMap { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn apply(&self, theta: f64) -> f64 {
        (theta + self.alpha).rem_euclid(TAU)
    }

    /// `R_α^k(θ)`, computed in one step.
    pub fn iterate(&self, theta: f64, k: usize) -> f64 {
        // kα loses low bits once it is large; carry the product's rounding
        // error separately and reduce with a fused multiply-add.
        let k = k as f64;
        let p = k * self.alpha;
        let err = k.mul_add(self.alpha, -p);
        let turns = (p / TAU).floor();
        let reduced = (-turns).mul_add(TAU, p);
        (theta + (reduced + err)).rem_euclid(TAU)
    }
}

/// A continued-fraction convergent `p/q` of `x` with `q ≤ max_q` lying
/// within `tol` of `x`, if one exists.
pub fn rational_approximation(x: f64, max_q: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0_i64, 1_i64, 1_i64, 0_i64);
    let mut r = x;
    loop {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let (p, q) = (a * p1 + p0, a * q1 + q0);
        if q > max_q {
            return None;
        }
        if (x - p as f64 / q as f64).abs() < tol {
            return Some((p, q));
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
}

/// Errors if `α/π` looks rational: some convergent `p/q` with
/// `q ≤ 10⁴` lies within `1e-12`.
pub fn check_irrational_rotation(alpha: f64) -> Result<()> {
    match rational_approximation(alpha / PI, MAX_DENOMINATOR, RATIONAL_TOLERANCE) {
        Some((p, q)) => Err(Error::precondition(format!(
            "rotation angle {alpha} is π·{p}/{q} up to {RATIONAL_TOLERANCE}; the rotation is not uniquely ergodic"
        ))),
        None => Ok(()),
    }
}

/// Star discrepancy of `{kα / 2π mod 1 : k = 0..n}`.
pub fn orbit_discrepancy(alpha: f64, n: usize) -> f64 {
    let mut xs: Vec<f64> = (0..n).map(|k| (k as f64 * alpha / TAU).rem_euclid(1.0)).collect();
    xs.sort_unstable_by(f64::total_cmp);
    let m = n as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / m - x).max(x - i as f64 / m))
        .fold(0.0, f64::max)
}

fn require_circle(domain: &GridDomain) -> Result<()> {
    if domain.is_circle() {
        Ok(())
    } else {
        Err(Error::domain("operator needs a circle grid"))
    }
}

/// `T_n(f)(θ) = (1/n) Σ_{k=0}^{n-1} f(R_α^k θ)`.
#[derive(Debug, Clone)]
pub struct RotationAverage {
    n: usize,
    rotation: RotationMap,
    domain: GridDomain,
}

impl RotationAverage {
    pub fn new(n: usize, rotation: RotationMap, domain: GridDomain) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("rotation average needs n >= 1"));
        }
        require_circle(&domain)?;
        Ok(RotationAverage { n, rotation, domain })
    }
}

impl Operator for RotationAverage {
    fn label(&self) -> String {
        format!("rotation_average[n={}, α={}]", self.n, self.rotation.alpha)
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        let n = self.n;
        self.domain
            .points()
            .par_iter()
            .map(|p| {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += f.try_eval(&[self.rotation.iterate(p[0], k)])?;
                }
                Ok(acc / n as f64)
            })
            .collect()
    }
}

/// `f ↦ f∘R_α^k`.
#[derive(Debug, Clone)]
pub struct RotationPower {
    k: usize,
    rotation: RotationMap,
    domain: GridDomain,
}

impl RotationPower {
    pub fn new(k: usize, rotation: RotationMap, domain: GridDomain) -> Result<Self> {
        require_circle(&domain)?;
        Ok(RotationPower { k, rotation, domain })
    }
}

impl Operator for RotationPower {
    fn label(&self) -> String {
        format!("rotation[k={}, α={}]", self.k, self.rotation.alpha)
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
            .map(|p| f.try_eval(&[self.rotation.iterate(p[0], self.k)]))
            .collect()
    }
}

/// Family `n ↦ (1/n) Σ_{k<n} f∘R_α^k`, for `n = 1..=max_n`.
pub fn rotation_family(alpha: f64, max_n: usize, domain: GridDomain) -> Result<OperatorFamily> {
    let rotation = RotationMap::new(alpha)?;
    require_circle(&domain)?;
    let d = domain.clone();
    Ok(
        OperatorFamily::new(format!("weyl[α={alpha}]"), domain.clone(), domain, move |n| {
            Ok(Arc::new(RotationAverage::new(n, rotation, d.clone())?) as OperatorInstance)
        })
        .with_max_n(max_n),
    )
}

/// Family `n ↦ f∘R_α^{n-1}`; its Cesàro means are the rotation averages.
pub fn rotation_power_family(alpha: f64, max_n: usize, domain: GridDomain) -> Result<OperatorFamily> {
    let rotation = RotationMap::new(alpha)?;
    require_circle(&domain)?;
    let d = domain.clone();
    Ok(
        OperatorFamily::new(format!("rotation[α={alpha}]"), domain.clone(), domain, move |n| {
            Ok(Arc::new(RotationPower::new(n - 1, rotation, d.clone())?) as OperatorInstance)
        })
        .with_max_n(max_n),
    )
}

/// `A(f) = (1/2π ∫ f) · 1`, with the mean taken by the periodic trapezoid rule.
#[derive(Debug, Clone)]
pub struct CircleMean {
    domain: GridDomain,
}

impl CircleMean {
    pub fn new(domain: GridDomain) -> Result<Self> {
        require_circle(&domain)?;
        Ok(CircleMean { domain })
    }

    pub fn mean(&self, f: &RealFunction) -> Result<f64> {
        let vals = f.sample(&self.domain)?;
        // Equal weights 2π/n, so the 2π cancels.
        Ok(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

impl Operator for CircleMean {
    fn label(&self) -> String {
        "circle_mean".into()
    }

    fn input_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn output_domain(&self) -> &GridDomain {
        &self.domain
    }

    fn apply(&self, f: &RealFunction) -> Result<Vec<f64>> {
        Ok(vec![self.mean(f)?; self.domain.len()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{cesaro_family, check_monotone, check_sublinear, check_translatable, SampleGenerator};

    fn circle() -> GridDomain {
        GridDomain::circle(64).unwrap()
    }

    fn circ_dist(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn rotation_angle_range() {
        assert!(RotationMap::new(0.0).is_err());
        assert!(RotationMap::new(TAU).is_err());
        assert!(RotationMap::new(1.0).is_ok());
    }

    /// Oracle: k-fold sum of α kept as an unreduced double-double (two-sum),
    /// reduced once at the end.
    fn compensated_orbit(theta: f64, alpha: f64, k: usize) -> f64 {
        let (mut hi, mut lo) = (0.0_f64, 0.0_f64);
        for _ in 0..k {
            let s = hi + alpha;
            let bb = s - hi;
            lo += (hi - (s - bb)) + (alpha - bb);
            hi = s;
        }
        let turns = (hi / TAU).floor();
        (theta + ((-turns).mul_add(TAU, hi) + lo)).rem_euclid(TAU)
    }

    #[test]
    fn iterate_matches_compensated_orbit() {
        let r = RotationMap::new(golden_angle()).unwrap();
        for k in [0, 1, 2, 17, 999, 5000, 10_000] {
            assert!(
                circ_dist(r.iterate(0.4, k), compensated_orbit(0.4, r.alpha(), k)) < 1e-12,
                "k={k}"
            );
        }
    }

    #[test]
    fn repeated_application_drifts_at_most_one_ulp_per_step() {
        let r = RotationMap::new(golden_angle()).unwrap();
        let ulp = TAU.next_up() - TAU;
        let mut theta = 0.4;
        for k in 1..=10_000 {
            theta = r.apply(theta);
            if k % 1000 == 0 {
                assert!(circ_dist(theta, r.iterate(0.4, k)) <= k as f64 * ulp, "k={k}");
            }
        }
    }

    #[test]
    fn rationality_heuristic() {
        assert!(check_irrational_rotation(golden_angle()).is_ok());
        assert!(check_irrational_rotation(2.0_f64.sqrt()).is_ok());
        assert!(check_irrational_rotation(PI).is_err());
        assert!(check_irrational_rotation(PI * 3.0 / 7.0).is_err());
        assert!(check_irrational_rotation(PI * 1234.0 / 9973.0).is_err());
        assert_eq!(rational_approximation(0.75, 100, 1e-12), Some((3, 4)));
    }

    #[test]
    fn discrepancy_trends_down() {
        let a = golden_angle();
        let d: Vec<f64> = [16, 64, 256, 1024, 4096]
            .iter()
            .map(|&n| orbit_discrepancy(a, n))
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    #[test]
    fn family_members() {
        let fam = rotation_family(golden_angle(), 100, circle()).unwrap();
        let cos = RealFunction::parse("cos(x)").unwrap();
        assert_eq!(
            fam.member(1).unwrap().apply(&cos).unwrap(),
            cos.sample(&circle()).unwrap()
        );
        for n in [1, 7, 100] {
            for v in fam.member(n).unwrap().apply(&RealFunction::one()).unwrap() {
                assert!((v - 1.0).abs() < 1e-15);
            }
        }
        assert!(matches!(fam.member(101), Err(Error::Index { .. })));
    }

    #[test]
    fn half_turn_cancels_cosine() {
        let fam = rotation_family(PI, 4, circle()).unwrap();
        let out = fam
            .member(2)
            .unwrap()
            .apply(&RealFunction::parse("cos(x)").unwrap())
            .unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn cesaro_of_powers_is_average() {
        let a = golden_angle();
        let avg = rotation_family(a, 20, circle()).unwrap();
        let ces = cesaro_family(&rotation_power_family(a, 20, circle()).unwrap());
        let f = RealFunction::parse("exp(sin(x))").unwrap();
        for n in [1, 5, 20] {
            let x = avg.member(n).unwrap().apply(&f).unwrap();
            let y = ces.member(n).unwrap().apply(&f).unwrap();
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cosine_envelope() {
        let a = golden_angle();
        let d = GridDomain::circle(256).unwrap();
        let fam = rotation_family(a, 1000, d).unwrap();
        let bound = |n: usize| 2.0 / n as f64 / (2.0 - 2.0 * a.cos()).sqrt();
        for n in [3, 10, 99, 1000] {
            let out = fam
                .member(n)
                .unwrap()
                .apply(&RealFunction::parse("cos(x)").unwrap())
                .unwrap();
            let err = out.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            assert!(err <= bound(n) + 1e-12, "n={n}");
        }
    }

    #[test]
    fn mean_operator() {
        let d = GridDomain::circle(2048).unwrap();
        let m = CircleMean::new(d.clone()).unwrap();
        assert!((m.mean(&RealFunction::one()).unwrap() - 1.0).abs() < 1e-14);
        assert!(m.mean(&RealFunction::parse("cos(x)").unwrap()).unwrap().abs() < 1e-14);
        assert!((m.mean(&RealFunction::parse("cos(x)^2").unwrap()).unwrap() - 0.5).abs() < 1e-6);
        assert!(CircleMean::new(GridDomain::unit_interval(5).unwrap()).is_err());
    }

    #[test]
    fn members_are_linear_positive_unital() {
        let d = circle();
        let mut gen = SampleGenerator::new(&d, 4);
        let pairs = gen.pairs(10);
        let ordered = gen.ordered_pairs(10);
        let fam = rotation_family(golden_angle(), 50, d.clone()).unwrap();
        for n in [1, 13, 50] {
            let op = fam.member(n).unwrap();
            assert!(check_sublinear(op.as_ref(), &pairs, 1e-12).unwrap().passed());
            assert!(check_monotone(op.as_ref(), &ordered, 1e-12).unwrap().passed());
            assert!(check_translatable(op.as_ref(), &pairs, 1e-12, true).unwrap().passed());
        }
        let m = CircleMean::new(d).unwrap();
        assert!(check_monotone(&m, &ordered, 1e-12).unwrap().passed());
    }
}
