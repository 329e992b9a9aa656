//! The radial weight omega_beta and certificates for the structural
//! conditions placed on its tail chi.

mod a2;
mod chi;
mod conditions;
mod growth;

pub use a2::{a2_product, check_a2, default_ball_suite, BallAverage, BallSample};
pub use chi::{ChiSpec, Pchip, TailLaw};
pub use conditions::{check_structural_conditions, power_window};
pub use growth::{check_growth_conditions_d, outer_tail_integral, inner_growth_integral, GrowthKernels};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use chi::Chi;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawProfile {
    beta: f64,
    chi: ChiSpec,
}

/// omega_beta(r) = (log(e/r))^beta for r < 1 and chi(r) for r >= 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct WeightProfile {
    beta: f64,
    spec: ChiSpec,
    chi: Chi,
}

impl TryFrom<RawProfile> for WeightProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        WeightProfile::new(raw.beta, raw.chi)
    }
}

impl From<WeightProfile> for RawProfile {
    fn from(p: WeightProfile) -> Self {
        RawProfile { beta: p.beta, chi: p.spec }
    }
}

impl WeightProfile {
    pub fn new(beta: f64, spec: ChiSpec) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return invalid(format!("beta must lie in (0, 1), got {beta}"));
        }
        let chi = Chi::compile(&spec)?;
        Ok(Self { beta, spec, chi })
    }

    pub fn power(beta: f64, a: f64) -> Result<Self> {
        Self::new(beta, ChiSpec::Power { a })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn chi_spec(&self) -> &ChiSpec {
        &self.spec
    }

    /// Exponent a when chi(y) = y^a.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.chi {
            Chi::Power(a) => Some(a),
            Chi::Table { .. } => None,
        }
    }

    /// Declared power-law tail; `None` for a table without tail exponent.
    pub fn tail(&self) -> Option<TailLaw> {
        self.chi.tail()
    }

    /// Radii where chi may fail to be smooth (1 and any table nodes).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.chi.breakpoints()
    }

    pub(crate) fn table_min(&self) -> Option<f64> {
        self.chi.table_min()
    }

    /// The weight at r > 0.
    pub fn eval_weight(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Err(Error::SingularAtOrigin);
        }
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("radius must be positive and finite, got {r}"));
        }
        Ok(self.omega(r))
    }

    /// Unchecked evaluation for r > 0.
    #[inline]
    pub fn omega(&self, r: f64) -> f64 {
        if r < 1.0 {
            (1.0 - r.ln()).powf(self.beta)
        } else {
            self.chi.eval(r)
        }
    }

    /// chi(y) for y >= 1.
    #[inline]
    pub fn chi(&self, y: f64) -> f64 {
        self.chi.eval(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn spec_points() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        assert_relative_eq!(w.eval_weight(1.0).unwrap(), 1.0);
        assert_relative_eq!(w.eval_weight((-3.0f64).exp()).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(w.eval_weight(2.0).unwrap(), 8.0, max_relative = 1e-15);
    }

    #[test]
    fn origin_is_an_error() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        assert!(matches!(w.eval_weight(0.0), Err(Error::SingularAtOrigin)));
        assert!(w.eval_weight(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(WeightProfile::power(0.0, 3.0).is_err());
        assert!(WeightProfile::power(1.0, 3.0).is_err());
    }

    #[test]
    fn json_shape() {
        let w: WeightProfile = serde_json::from_str(r#"{"beta":0.5,"chi":{"kind":"power","a":3}}"#).unwrap();
        assert_eq!(w.power_exponent(), Some(3.0));
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"beta":0.5,"chi":{"kind":"power","a":3.0}}"#);
        assert!(serde_json::from_str::<WeightProfile>(r#"{"beta":1.5,"chi":{"kind":"power","a":3}}"#).is_err());
    }

    proptest! {
        #[test]
        fn continuous_at_one(beta in 0.01f64..0.99, a in 0.0f64..6.0) {
            let w = WeightProfile::power(beta, a).unwrap();
            let mut prev = f64::INFINITY;
            for k in 2..=8 {
                let h = 10f64.powi(-k);
                let jump = (w.omega(1.0 - h) - w.omega(1.0 + h)).abs();
                prop_assert!(jump <= prev + 1e-15);
                prev = jump;
            }
            prop_assert!(prev < 1e-7);
        }

        #[test]
        fn table_weight_continuous_at_one(beta in 0.05f64..0.95, v in 1.5f64..50.0) {
            let w = WeightProfile::new(beta, ChiSpec::Table { r: vec![1.0, 2.0, 5.0], chi: vec![3.0, 3.0 * v.sqrt(), 3.0 * v], tail_exponent: Some(3.0) }).unwrap();
            prop_assert!((w.omega(1.0 - 1e-9) - w.omega(1.0 + 1e-9)).abs() < 1e-6);
        }
    }
}
