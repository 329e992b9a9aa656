use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Sharp exponent alpha_beta = 4 [8 pi^2 (1 - beta)]^{1/(1-beta)}.
pub fn alpha_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta must lie in (0, 1), got {beta}"));
    }
    let base = 8.0 * PI * PI * (1.0 - beta);
    Ok(4.0 * (base.ln() / (1.0 - beta)).exp())
}

/// P_beta = (1 - |u|^2)^{-1/(1-beta)}; +inf at |u| = 1.
pub fn concentration_limit_pbeta(norm_u: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta must lie in (0, 1), got {beta}"));
    }
    if !(0.0..=1.0).contains(&norm_u) {
        return invalid(format!("norm must lie in [0, 1], got {norm_u}"));
    }
    if norm_u == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 - norm_u * norm_u).powf(-1.0 / (1.0 - beta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        assert_relative_eq!(alpha_beta(0.5).unwrap(), 64.0 * PI.powi(4), max_relative = 1e-14);
        assert_relative_eq!(alpha_beta(0.75).unwrap(), 64.0 * PI.powi(8), max_relative = 1e-13);
        assert!(alpha_beta(1.0).is_err());
    }

    #[test]
    fn pbeta_points() {
        assert_eq!(concentration_limit_pbeta(0.0, 0.5).unwrap(), 1.0);
        assert!(concentration_limit_pbeta(1.0, 0.5).unwrap().is_infinite());
        assert_relative_eq!(concentration_limit_pbeta(0.75f64.sqrt(), 0.5).unwrap(), 16.0, max_relative = 1e-12);
        assert!(concentration_limit_pbeta(1.0 + 1e-12, 0.5).is_err());
    }
}
