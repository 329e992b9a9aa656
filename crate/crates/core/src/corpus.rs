//! Seeded families of smooth radial test functions with declared decay.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::radial::{Jet, RadialFunction, MIN_DECAY};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    /// amplitude * exp(-(r/width)^2)
    Gaussian { amplitude: f64, width: f64 },
    /// amplitude * (1 + (r/width)^2)^(-power)
    Rational { amplitude: f64, width: f64, power: f64 },
}

impl Term {
    fn validate(&self) -> Result<()> {
        let (a, w) = match self {
            Term::Gaussian { amplitude, width } => (*amplitude, *width),
            Term::Rational { amplitude, width, power } => {
                if !(power.is_finite() && *power > 0.0) {
                    return invalid(format!("rational power must be positive, got {power}"));
                }
                (*amplitude, *width)
            }
        };
        if !a.is_finite() || !(w.is_finite() && w > 0.0) {
            return invalid("term needs finite amplitude and positive width");
        }
        Ok(())
    }

    /// Actual algebraic decay exponent (infinite for Gaussians).
    fn decay(&self) -> f64 {
        match self {
            Term::Gaussian { .. } => f64::INFINITY,
            Term::Rational { power, .. } => 2.0 * power,
        }
    }

    fn jet(&self, r: f64) -> Jet {
        match *self {
            Term::Gaussian { amplitude, width } => {
                let s2 = width * width;
                let e = amplitude * (-r * r / s2).exp();
                Jet::new(e, -2.0 * r / s2 * e, (4.0 * r * r / (s2 * s2) - 2.0 / s2) * e)
            }
            Term::Rational { amplitude, width, power: k } => {
                let s2 = width * width;
                let q = 1.0 + r * r / s2;
                let u = amplitude * q.powf(-k);
                let du = -2.0 * k * r / s2 * u / q;
                let d2u = -2.0 * k / s2 * u / q + 4.0 * k * (k + 1.0) * r * r / (s2 * s2) * u / (q * q);
                Jet::new(u, du, d2u)
            }
        }
    }
}

/// A finite sum of terms with an optional declared decay exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
}

impl FunctionSpec {
    pub fn actual_decay(&self) -> f64 {
        self.terms.iter().map(Term::decay).fold(f64::INFINITY, f64::min)
    }

    pub fn declared_decay(&self) -> f64 {
        self.decay.unwrap_or_else(|| self.actual_decay())
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return invalid("function needs at least one term");
        }
        for t in &self.terms {
            t.validate()?;
        }
        let actual = self.actual_decay();
        let declared = self.declared_decay();
        if !(declared >= MIN_DECAY) {
            return invalid(format!("declared decay exponent {declared} below the minimum {MIN_DECAY}"));
        }
        if declared > actual {
            return invalid(format!("declared decay {declared} exceeds the actual decay {actual} of the terms"));
        }
        Ok(())
    }

    pub fn build(&self, label: impl Into<String>) -> Result<RadialFunction> {
        self.validate()?;
        let terms = self.terms.clone();
        let jet = Arc::new(move |r: f64| {
            terms.iter().fold(Jet::default(), |acc, t| {
                let j = t.jet(r);
                Jet::new(acc.u + j.u, acc.du + j.du, acc.d2u + j.d2u)
            })
        });
        RadialFunction::smooth(jet, self.declared_decay(), label)
    }
}

/// `n` random functions: one to three Gaussian or rational terms each, with
/// amplitudes in [-2, 2], widths in [0.3, 3] and rational powers in {1, 1.5, 2, 3}.
pub fn random_corpus(n: usize, seed: u64) -> Vec<FunctionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let count = rng.gen_range(1..=3);
            let terms = (0..count)
                .map(|_| {
                    let amplitude = rng.gen_range(-2.0..2.0);
                    let width = rng.gen_range(0.3..3.0);
                    if rng.gen_bool(0.5) {
                        Term::Gaussian { amplitude, width }
                    } else {
                        let power = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
                        Term::Rational { amplitude, width, power }
                    }
                })
                .collect();
            FunctionSpec { terms, decay: None }
        })
        .collect()
}

/// Builds every member of a corpus.
pub fn build_corpus(specs: &[FunctionSpec]) -> Result<Vec<RadialFunction>> {
    specs.iter().enumerate().map(|(i, s)| s.build(format!("corpus[{i}]"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn seeded_corpus_is_reproducible() {
        assert_eq!(random_corpus(20, 7), random_corpus(20, 7));
        assert_ne!(random_corpus(20, 7), random_corpus(20, 8));
    }

    #[test]
    fn rational_jet_matches_finite_differences() {
        let t = Term::Rational { amplitude: 1.3, width: 0.7, power: 1.5 };
        let h = 1e-4;
        for r in [0.2, 1.0, 3.0] {
            let (a, b, c) = (t.jet(r - h).u, t.jet(r).u, t.jet(r + h).u);
            assert_relative_eq!(t.jet(r).du, (c - a) / (2.0 * h), max_relative = 1e-6);
            assert_relative_eq!(t.jet(r).d2u, (c - 2.0 * b + a) / (h * h), max_relative = 1e-4);
        }
    }

    #[test]
    fn decay_validation() {
        let bad = FunctionSpec { terms: vec![Term::Rational { amplitude: 1.0, width: 1.0, power: 0.5 }], decay: None };
        assert!(bad.validate().is_err());
        let lying = FunctionSpec { terms: vec![Term::Rational { amplitude: 1.0, width: 1.0, power: 1.0 }], decay: Some(6.0) };
        assert!(lying.validate().is_err());
        let ok = FunctionSpec { terms: vec![Term::Gaussian { amplitude: 1.0, width: 1.0 }], decay: None };
        assert!(ok.build("g").is_ok());
    }
}
