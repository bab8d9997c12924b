use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{AxisKind, GridDomain};
use crate::function::{Monomial, Polynomial, RealFunction};

const MAX_DEGREE: u32 = 4;
const COEF_RANGE: f64 = 2.0;

/// Seeded generator of sample functions for the axiom checkers: polynomials
/// of total degree at most 4 in the ambient coordinates with coefficients in
/// `[-2, 2]`.
pub struct SampleGenerator {
    rng: ChaCha8Rng,
    projections: Vec<RealFunction>,
    linear_dims: Option<usize>,
}

impl SampleGenerator {
    pub fn new(domain: &GridDomain, seed: u64) -> Self {
        let all_linear = domain.axes().iter().all(|a| a.kind() == AxisKind::Linear);
        SampleGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            projections: domain.ambient_projections(),
            linear_dims: all_linear.then(|| domain.dimension()),
        }
    }

    fn exponents(&mut self, dims: usize) -> Vec<u32> {
        let mut budget = self.rng.gen_range(0..=MAX_DEGREE);
        let mut exps = vec![0; dims];
        for e in exps.iter_mut() {
            let take = self.rng.gen_range(0..=budget);
            *e = take;
            budget -= take;
        }
        exps
    }

    pub fn polynomial(&mut self) -> RealFunction {
        let dims = self.projections.len();
        let n_terms = self.rng.gen_range(1..=5);
        let terms: Vec<Monomial> = (0..n_terms)
            .map(|_| Monomial {
                coef: self.rng.gen_range(-COEF_RANGE..=COEF_RANGE),
                exps: self.exponents(dims),
            })
            .collect();
        if self.linear_dims.is_some() {
            return Polynomial { terms }.into();
        }
        // Angle axes: build the monomials from cos/sin projections.
        terms
            .into_iter()
            .map(|m| {
                m.exps
                    .iter()
                    .zip(&self.projections)
                    .flat_map(|(&e, p)| std::iter::repeat_n(p.clone(), e as usize))
                    .fold(RealFunction::constant(m.coef), |acc, p| acc * p)
            })
            .reduce(|a, b| a + b)
            .expect("at least one term")
    }

    pub fn pairs(&mut self, count: usize) -> Vec<(RealFunction, RealFunction)> {
        (0..count).map(|_| (self.polynomial(), self.polynomial())).collect()
    }

    /// Pairs `f ≤ g` everywhere: `g = f + q²/4 + c` with `c ∈ [0, 1]`.
    pub fn ordered_pairs(&mut self, count: usize) -> Vec<(RealFunction, RealFunction)> {
        (0..count)
            .map(|_| {
                let f = self.polynomial();
                let bump = self
                    .polynomial()
                    .square()
                    .scale(0.25)
                    .shift(self.rng.gen_range(0.0..=1.0));
                (f.clone(), f + bump)
            })
            .collect()
    }

    /// Comonotone pairs `(h, φ∘h)` with `h` an increasing function of a
    /// positive combination of the ambient coordinates and `φ` increasing.
    pub fn comonotone_pairs(&mut self, count: usize) -> Vec<(RealFunction, RealFunction)> {
        (0..count)
            .map(|_| {
                let s = self
                    .projections
                    .clone()
                    .into_iter()
                    .map(|p| p.scale(self.rng.gen_range(0.1..=1.0)))
                    .reduce(|a, b| a + b)
                    .expect("at least one projection");
                let a = self.rng.gen_range(0.1..=2.0);
                let b = self.rng.gen_range(0.0..=1.0);
                let c = self.rng.gen_range(-1.0..=1.0);
                let h = (s.clone().scale(a) + s.clone() * s.clone() * s.scale(b)).shift(c);
                let g = match self.rng.gen_range(0..3) {
                    0 => h
                        .clone()
                        .scale(self.rng.gen_range(0.1..=3.0))
                        .shift(self.rng.gen_range(-1.0..=1.0)),
                    1 => h.clone().apply_builtin(crate::expr::Builtin::Exp),
                    _ => h.clone() * h.clone() * h.clone() + h.clone(),
                };
                (h, g)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let d = GridDomain::unit_interval(21).unwrap();
        let a = SampleGenerator::new(&d, 7).pairs(5);
        let b = SampleGenerator::new(&d, 7).pairs(5);
        for ((f1, g1), (f2, g2)) in a.iter().zip(&b) {
            assert_eq!(f1.to_string(), f2.to_string());
            assert_eq!(g1.to_string(), g2.to_string());
        }
    }

    #[test]
    fn ordered_pairs_are_ordered() {
        let d = GridDomain::unit_interval(101).unwrap();
        for (f, g) in SampleGenerator::new(&d, 3).ordered_pairs(20) {
            for p in d.points() {
                assert!(f.eval(p) <= g.eval(p));
            }
        }
    }

    #[test]
    fn circle_samples_are_periodic() {
        let d = GridDomain::circle(32).unwrap();
        let f = SampleGenerator::new(&d, 1).polynomial();
        let tau = std::f64::consts::TAU;
        assert!((f.eval(&[0.3]) - f.eval(&[0.3 + tau])).abs() < 1e-12);
    }
}
