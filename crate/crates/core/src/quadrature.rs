//! Composite Newton–Cotes rules on a single interval.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    /// Composite Simpson with an even number of panels (`panels + 1` nodes).
    Simpson {
        panels: usize,
    },
    Trapezoid {
        panels: usize,
    },
    Midpoint {
        panels: usize,
    },
}

impl Default for Quadrature {
    /// Simpson with 9 nodes, exact for cubics.
    fn default() -> Self {
        Quadrature::Simpson { panels: 8 }
    }
}

impl Quadrature {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Quadrature::Simpson { panels } if panels < 2 || panels % 2 != 0 => Err(Error::precondition(format!(
                "Simpson needs an even positive panel count, got {panels}"
            ))),
            Quadrature::Trapezoid { panels } | Quadrature::Midpoint { panels } if panels == 0 => {
                Err(Error::precondition("quadrature needs at least one panel"))
            }
            _ => Ok(()),
        }
    }

    /// Nodes and weights for `∫_a^b`.
    pub fn rule(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        match *self {
            Quadrature::Simpson { panels } => {
                let h = (b - a) / panels as f64;
                let nodes = (0..=panels).map(|i| node(a, b, h, i, panels)).collect();
                let weights = (0..=panels)
                    .map(|i| {
                        let c = if i == 0 || i == panels {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        c * h / 3.0
                    })
                    .collect();
                (nodes, weights)
            }
            Quadrature::Trapezoid { panels } => {
                let h = (b - a) / panels as f64;
                let nodes = (0..=panels).map(|i| node(a, b, h, i, panels)).collect();
                let weights = (0..=panels)
                    .map(|i| if i == 0 || i == panels { 0.5 * h } else { h })
                    .collect();
                (nodes, weights)
            }
            Quadrature::Midpoint { panels } => {
                let h = (b - a) / panels as f64;
                let nodes = (0..panels).map(|i| a + (i as f64 + 0.5) * h).collect();
                (nodes, vec![h; panels])
            }
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let (nodes, weights) = self.rule(a, b);
        nodes.iter().zip(&weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

fn node(a: f64, b: f64, h: f64, i: usize, panels: usize) -> f64 {
    if i == panels {
        b
    } else {
        a + i as f64 * h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics() {
        let q = Quadrature::default();
        let v = q.integrate(|t| 4.0 * t * t * t - 3.0 * t * t + 2.0 * t - 1.0, 0.25, 0.75);
        // Antiderivative t^4 - t^3 + t^2 - t.
        let anti = |t: f64| t.powi(4) - t.powi(3) + t * t - t;
        assert!((v - (anti(0.75) - anti(0.25))).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_and_midpoint_exact_for_lines() {
        for q in [Quadrature::Trapezoid { panels: 3 }, Quadrature::Midpoint { panels: 3 }] {
            assert!((q.integrate(|t| 2.0 * t + 1.0, 0.0, 1.0) - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_sum_to_length() {
        for q in [
            Quadrature::Simpson { panels: 10 },
            Quadrature::Trapezoid { panels: 7 },
            Quadrature::Midpoint { panels: 5 },
        ] {
            let (_, w) = q.rule(-1.0, 2.0);
            assert!((w.iter().sum::<f64>() - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn odd_simpson_rejected() {
        assert!(Quadrature::Simpson { panels: 3 }.validate().is_err());
        assert!(Quadrature::Midpoint { panels: 0 }.validate().is_err());
        assert!(Quadrature::default().validate().is_ok());
    }
}
