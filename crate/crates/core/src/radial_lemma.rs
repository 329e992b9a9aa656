//! Pointwise decay bound for radial profiles at |x| >= 1 and the
//! half-line substitution behind it.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::radial::{fornberg_weights, integrate_profile, RadialFunction, SPHERE_AREA};
use crate::weights::{GrowthKernels, WeightProfile};

/// Constants of the bound. `c1` is fixed at 1; `c2 = 2 pi |u'(1)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub c1: f64,
    pub c2: f64,
}

/// u'(1) from the right.
pub fn slope_at_one(u: &RadialFunction) -> Result<f64> {
    if u.is_closed_form() {
        return Ok(u.jet_right(1.0).du);
    }
    let grid = u.grid().expect("sampled");
    let vals = u.samples().expect("sampled");
    let k = grid.kink_index();
    if grid.len() < k + 5 {
        return Err(Error::Discretization("need five nodes at or beyond r = 1".into()));
    }
    let t: Vec<f64> = grid.nodes()[k..k + 5].iter().map(|r| r.ln()).collect();
    let w = fornberg_weights(0.0, &t, 1);
    Ok((0..5).map(|j| w[1][j] * vals[k + j]).sum())
}

/// Tail energy int_{|x| >= 1} |Delta u|^2 chi dx.
pub fn tail_energy(u: &RadialFunction, profile: &WeightProfile, quad: &QuadratureSpec) -> Result<f64> {
    if !u.has_laplacian() {
        return Err(Error::Discretization("Laplacian unavailable".into()));
    }
    if u.support() <= 1.0 {
        return Ok(0.0);
    }
    let mut extra = vec![1.0];
    extra.extend(profile.breakpoints());
    let i = integrate_profile(
        u,
        &extra,
        |r| {
            if r < 1.0 {
                return 0.0;
            }
            let l = u.laplacian(r);
            if l == 0.0 {
                0.0
            } else {
                l * l * profile.chi(r) * r.powi(3)
            }
        },
        quad,
    )?;
    Ok(SPHERE_AREA * i.value)
}

/// Everything about u that the bound needs, computed once.
pub struct RadialBound<'a> {
    kernels: GrowthKernels<'a>,
    energy: f64,
    constants: LemmaConstants,
}

impl<'a> RadialBound<'a> {
    pub fn new(u: &RadialFunction, profile: &'a WeightProfile, quad: &QuadratureSpec) -> Result<Self> {
        let kernels = GrowthKernels::new(profile, quad)?;
        let energy = tail_energy(u, profile, quad)?;
        let c2 = 2.0 * PI * slope_at_one(u)?.abs();
        Ok(Self { kernels, energy, constants: LemmaConstants { c1: 1.0, c2 } })
    }

    pub fn constants(&self) -> LemmaConstants {
        self.constants
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// (sqrt2 c1 / 4 pi) sqrt(E) [sqrt(T(r)) + sqrt(I(r)) / r] + c2 / r^2.
    pub fn rhs(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0 && r.is_finite()) {
            return invalid(format!("the bound holds for r >= 1, got {r}"));
        }
        let t = self.kernels.outer(r);
        let i = self.kernels.inner(r);
        let c = self.constants;
        Ok(SQRT_2 * c.c1 / (4.0 * PI) * self.energy.sqrt() * (t.sqrt() + i.sqrt() / r) + c.c2 / (r * r))
    }
}

/// Right-hand side of the radial bound at a single radius.
pub fn radial_bound_rhs(u: &RadialFunction, profile: &WeightProfile, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    if r < 1.0 {
        return invalid(format!("the bound holds for r >= 1, got {r}"));
    }
    RadialBound::new(u, profile, quad)?.rhs(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub label: String,
    pub rows: Vec<MarginRow>,
    pub min_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub constants: LemmaConstants,
    pub tail_energy: f64,
}

impl MarginReport {
    pub fn write_csv(reports: &[MarginReport], path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["function", "r", "lhs", "rhs", "margin"])?;
        for rep in reports {
            for row in &rep.rows {
                w.write_record([
                    rep.label.clone(),
                    format!("{:e}", row.r),
                    format!("{:e}", row.lhs),
                    format!("{:e}", row.rhs),
                    format!("{:e}", row.margin),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        crate::io::write_atomic(path, &bytes)
    }
}

/// Checks |u(r)| <= RHS(r) + tol at every radius.
pub fn verify_radial_lemma(
    u: &RadialFunction,
    profile: &WeightProfile,
    radii: &[f64],
    tol: f64,
    quad: &QuadratureSpec,
) -> Result<MarginReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
        return invalid("radii must be non-empty and lie in [1, inf)");
    }
    if !(tol >= 0.0) {
        return invalid("tolerance must be nonnegative");
    }
    let bound = RadialBound::new(u, profile, quad)?;
    let rows: Vec<MarginRow> = radii
        .par_iter()
        .map(|&r| {
            let lhs = u.value(r).abs();
            let rhs = bound.rhs(r)?;
            Ok(MarginRow { r, lhs, rhs, margin: rhs - lhs })
        })
        .collect::<Result<_>>()?;
    let min_margin = rows.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
    Ok(MarginReport {
        label: u.label().to_string(),
        pass: min_margin >= -tol,
        rows,
        min_margin,
        tolerance: tol,
        constants: bound.constants(),
        tail_energy: bound.energy(),
    })
}

/// Max over s of |w''(s) - pi s^{-3} Delta u(s^{-1/2})| / (1 + |w''(s)|) with
/// w(s) = 4 pi u(s^{-1/2}).
pub fn half_space_transform_check(u: &RadialFunction, s_samples: &[f64]) -> Result<f64> {
    if s_samples.is_empty() || s_samples.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
        return invalid("samples must lie in (0, 1]");
    }
    if !u.has_laplacian() {
        return Err(Error::Discretization("Laplacian unavailable".into()));
    }
    let mut worst: f64 = 0.0;
    for &s in s_samples {
        let r = s.powf(-0.5);
        let w2 = if u.is_closed_form() {
            let j = u.jet_right(r);
            let dr = -0.5 * s.powf(-1.5);
            let d2r = 0.75 * s.powf(-2.5);
            4.0 * PI * (j.d2u * dr * dr + j.du * d2r)
        } else {
            let h = 1e-3 * s;
            let w = |x: f64| 4.0 * PI * u.value(x.powf(-0.5));
            (-w(s + 2.0 * h) + 16.0 * w(s + h) - 30.0 * w(s) + 16.0 * w(s - h) - w(s - 2.0 * h)) / (12.0 * h * h)
        };
        let rhs = PI * s.powi(-3) * u.laplacian(r);
        worst = worst.max((w2 - rhs).abs() / (1.0 + w2.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{Jet, Piece};
    use std::sync::Arc;

    #[test]
    fn zero_function_has_zero_rhs() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let z = RadialFunction::smooth(Arc::new(|_| Jet::default()), f64::INFINITY, "0").unwrap();
        let rep = verify_radial_lemma(&z, &w, &[1.0, 10.0], 0.0, &QuadratureSpec::default()).unwrap();
        assert!(rep.pass);
        assert!(rep.rows.iter().all(|m| m.rhs == 0.0 && m.margin == 0.0));
    }

    #[test]
    fn quadratic_transform_is_exact() {
        let u = RadialFunction::closed(vec![Piece::new(0.0, 1e6, Arc::new(|r: f64| Jet::new(r * r, 2.0 * r, 2.0)))], 2.0, "r^2").unwrap();
        let res = half_space_transform_check(&u, &[0.1, 0.5, 1.0]).unwrap();
        assert!(res < 1e-14, "{res}");
    }

    #[test]
    fn radii_below_one_rejected() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let z = RadialFunction::smooth(Arc::new(|_| Jet::default()), f64::INFINITY, "0").unwrap();
        assert!(radial_bound_rhs(&z, &w, 0.5, &QuadratureSpec::default()).is_err());
        assert!(half_space_transform_check(&z, &[0.0]).is_err());
        assert!(half_space_transform_check(&z, &[1.5]).is_err());
    }
}
