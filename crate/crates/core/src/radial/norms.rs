use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Integral, QuadratureSpec};
use crate::weights::WeightProfile;

use super::function::{Piece, RadialFunction, ScalarFn};

/// Surface measure of the unit sphere S^3.
pub const SPHERE_AREA: f64 = 2.0 * PI * PI;

/// Largest exponent whose exponential is finite in double precision.
const EXP_LIMIT: f64 = 709.0;

/// Integrates f over [0, inf), splitting at the function's own breakpoints and
/// at `extra`, and switching to a semi-infinite map past the last breakpoint.
pub(crate) fn integrate_profile<F: Fn(f64) -> f64>(
    u: &RadialFunction,
    extra: &[f64],
    f: F,
    quad: &QuadratureSpec,
) -> Result<Integral> {
    let support = u.support();
    let mut pts: Vec<f64> = vec![0.0];
    pts.extend(u.breakpoints());
    pts.extend_from_slice(extra);
    pts.retain(|&x| x >= 0.0 && x.is_finite() && x <= support);
    if support.is_finite() {
        pts.push(support);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut acc = Integral::default();
    for w in pts.windows(2) {
        acc = acc + integrate(&f, w[0], w[1], quad)?;
    }
    if support.is_infinite() {
        let last = *pts.last().unwrap_or(&0.0);
        let start = if last > 0.0 { last } else { 1.0 };
        if last == 0.0 {
            acc = acc + integrate(&f, 0.0, 1.0, quad)?;
        }
        acc = acc + integrate_to_infinity(&f, start, quad)?;
    }
    Ok(acc)
}

fn check_decay(u: &RadialFunction, needed: f64, what: &str) -> Result<()> {
    if u.support().is_infinite() && u.decay() <= needed {
        return Err(Error::Divergent(format!(
            "{what}: declared decay exponent {} must exceed {needed}",
            u.decay()
        )));
    }
    Ok(())
}

/// 2 pi^2 int_0^inf g(r) r^3 dr.
pub fn integrate_radial(g: &RadialFunction, quad: &QuadratureSpec) -> Result<Integral> {
    quad.validate()?;
    check_decay(g, 4.0, "r^3 g is not integrable")?;
    let i = integrate_profile(g, &[], |r| g.value(r) * r.powi(3), quad)?;
    Ok(Integral { value: SPHERE_AREA * i.value, error: SPHERE_AREA * i.error, evaluations: i.evaluations })
}

/// Squared weighted seminorm 2 pi^2 int omega |Delta u|^2 r^3 dr, split at r = 1.
pub fn weighted_seminorm_sq(u: &RadialFunction, profile: &WeightProfile, quad: &QuadratureSpec) -> Result<Integral> {
    quad.validate()?;
    if !u.has_laplacian() {
        return Err(Error::Discretization("Laplacian unavailable for this profile".into()));
    }
    if let Some(t) = profile.tail() {
        check_decay(u, t.exponent / 2.0, "omega |Delta u|^2 r^3 is not integrable")?;
    }
    let mut extra = vec![1.0];
    extra.extend(profile.breakpoints());
    let i = integrate_profile(
        u,
        &extra,
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            let l = u.laplacian(r);
            if l == 0.0 {
                0.0
            } else {
                profile.omega(r) * l * l * r.powi(3)
            }
        },
        quad,
    )?;
    Ok(Integral { value: SPHERE_AREA * i.value, error: SPHERE_AREA * i.error, evaluations: i.evaluations })
}

/// ||u||_beta = (int omega_beta |Delta u|^2 dx)^{1/2}.
pub fn weighted_seminorm(u: &RadialFunction, profile: &WeightProfile, quad: &QuadratureSpec) -> Result<f64> {
    Ok(weighted_seminorm_sq(u, profile, quad)?.value.max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub value: f64,
    /// Set when p is below the embedding threshold 2/(1-beta).
    pub below_embedding_threshold: bool,
}

/// (2 pi^2 int |u|^p r^3 dr)^{1/p}.
pub fn lp_norm(u: &RadialFunction, p: f64, beta: f64, quad: &QuadratureSpec) -> Result<LpNorm> {
    quad.validate()?;
    if !(p >= 1.0 && p.is_finite()) {
        return invalid(format!("p must be a finite real >= 1, got {p}"));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta must lie in (0, 1), got {beta}"));
    }
    check_decay(u, 4.0 / p, "|u|^p r^3 is not integrable")?;
    let i = integrate_profile(u, &[1.0], |r| u.value(r).abs().powf(p) * r.powi(3), quad)?;
    Ok(LpNorm {
        value: (SPHERE_AREA * i.value).powf(1.0 / p),
        below_embedding_threshold: p < 2.0 / (1.0 - beta),
    })
}

/// Dense radii used to locate the supremum of |u| and overflow regions.
fn probe_radii(u: &RadialFunction) -> Vec<f64> {
    let mut v = vec![0.0];
    let hi = if u.support().is_finite() {
        u.support()
    } else {
        u.breakpoints().into_iter().fold(1.0, f64::max) * 1e3
    };
    let n = 4000;
    for i in 0..=n {
        v.push(1e-12 * (hi / 1e-12).powf(i as f64 / n as f64));
        v.push(hi * i as f64 / n as f64);
    }
    v.extend(u.breakpoints());
    v.retain(|x| x.is_finite() && *x <= hi);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Supremum of |u| over a dense probe set.
pub fn sup_abs(u: &RadialFunction) -> f64 {
    probe_radii(u).into_iter().map(|r| u.value(r).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamsValue {
    /// The functional, or +inf when the exponent overflows.
    pub value: f64,
    pub error: f64,
    /// Largest probed radius where alpha |u|^{2/(1-beta)} overflows.
    pub blowup_radius: Option<f64>,
}

/// 2 pi^2 int (exp(alpha |u|^{2/(1-beta)}) - 1) r^3 dr.
pub fn adams_functional(u: &RadialFunction, alpha: f64, beta: f64, quad: &QuadratureSpec) -> Result<AdamsValue> {
    quad.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta must lie in (0, 1), got {beta}"));
    }
    let sigma = 2.0 / (1.0 - beta);
    check_decay(u, 4.0 / sigma, "exp(alpha |u|^sigma) - 1 is not integrable")?;
    let blow = probe_radii(u)
        .into_iter()
        .filter(|&r| alpha * u.value(r).abs().powf(sigma) > EXP_LIMIT)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    if blow.is_some() {
        return Ok(AdamsValue { value: f64::INFINITY, error: 0.0, blowup_radius: blow });
    }
    let res = integrate_profile(u, &[1.0], |r| (alpha * u.value(r).abs().powf(sigma)).exp_m1() * r.powi(3), quad);
    match res {
        Ok(i) => Ok(AdamsValue { value: SPHERE_AREA * i.value, error: SPHERE_AREA * i.error, blowup_radius: None }),
        Err(Error::Quadrature { estimate, .. }) if estimate.is_nan() => {
            Ok(AdamsValue { value: f64::INFINITY, error: 0.0, blowup_radius: Some(f64::NAN) })
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Accumulated quadrature error of the partial sum.
    pub error: f64,
    pub terms: Vec<f64>,
}

/// Partial sum sum_{k<=K} alpha^k/k! int |u|^{2k/(1-beta)} plus a tail bound.
///
/// With S = sup |u|^{2/(1-beta)}, every omitted term is at most
/// alpha^k/k! S^{k-1} int |u|^{2/(1-beta)}, so the tail is bounded by
/// (I_1 / S) sum_{k>K} (alpha S)^k / k!.
pub fn adams_functional_series(
    u: &RadialFunction,
    alpha: f64,
    beta: f64,
    k_terms: usize,
    quad: &QuadratureSpec,
) -> Result<SeriesValue> {
    quad.validate()?;
    if k_terms < 1 {
        return invalid("series needs K >= 1");
    }
    if !(beta > 0.0 && beta < 1.0) || !(alpha > 0.0) {
        return invalid("series needs alpha > 0 and beta in (0, 1)");
    }
    let sigma = 2.0 / (1.0 - beta);
    check_decay(u, 4.0 / sigma, "|u|^sigma r^3 is not integrable")?;
    let s = sup_abs(u).powf(sigma);
    if !s.is_finite() {
        return invalid("sup |u| must be finite");
    }
    if s == 0.0 {
        return Ok(SeriesValue { value: 0.0, tail_bound: 0.0, error: 0.0, terms: vec![0.0; k_terms] });
    }
    let mut terms = Vec::with_capacity(k_terms);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut ln_fact = 0.0;
    let mut i1 = 0.0;
    for k in 1..=k_terms {
        let kf = k as f64;
        ln_fact += kf.ln();
        // Integrate (alpha |u|^sigma)^k / k! as a whole so the quadrature's
        // absolute tolerance applies to the term itself, not to |u|^{sigma k}.
        let i = integrate_profile(
            u,
            &[1.0],
            |r| {
                let a = u.value(r).abs();
                if a == 0.0 {
                    0.0
                } else {
                    (kf * (alpha.ln() + sigma * a.ln()) - ln_fact).exp() * r.powi(3)
                }
            },
            quad,
        )?;
        let term = SPHERE_AREA * i.value;
        if k == 1 {
            i1 = term / alpha;
        }
        terms.push(term);
        value += term;
        error += SPHERE_AREA * i.error;
    }
    let x = alpha * s;
    let mut t = 1.0;
    for k in 1..=k_terms {
        t *= x / k as f64;
    }
    let mut rem = 0.0;
    let mut k = k_terms + 1;
    loop {
        t *= x / k as f64;
        rem += t;
        if t <= 1e-18 * rem || k > k_terms + 10_000 {
            break;
        }
        k += 1;
    }
    Ok(SeriesValue { value, tail_bound: i1 / s * rem, error, terms })
}

/// Closed-form or finite-difference Laplacian as a new radial profile.
pub fn radial_laplacian(u: &RadialFunction) -> Result<RadialFunction> {
    if let Some(pieces) = u.pieces() {
        if !u.has_laplacian() {
            return Err(Error::Discretization("closed form lacks second derivatives".into()));
        }
        let out = pieces
            .iter()
            .map(|p| {
                let q = p.clone();
                let f: ScalarFn = std::sync::Arc::new(move |r| q.laplacian(r));
                Piece::values_only(p.lo, p.hi, f)
            })
            .collect();
        let decay = u.decay() + 2.0;
        return RadialFunction::closed_unchecked(out, decay, format!("laplacian({})", u.label()));
    }
    let grid = u.grid().expect("sampled");
    let samples = u.samples().expect("sampled");
    let lap = super::function::sampled_laplacian(grid, samples)?;
    RadialFunction::sampled(grid.clone(), lap, u.decay() + 2.0, format!("laplacian({})", u.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::function::Jet;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn gaussian() -> RadialFunction {
        RadialFunction::smooth(
            Arc::new(|r: f64| {
                let e = (-r * r).exp();
                Jet::new(e, -2.0 * r * e, (4.0 * r * r - 2.0) * e)
            }),
            f64::INFINITY,
            "gauss",
        )
        .unwrap()
    }

    #[test]
    fn unit_ball_volume() {
        let ind = RadialFunction::closed(vec![Piece::new(0.0, 1.0, Arc::new(|_| Jet::new(1.0, 0.0, 0.0)))], 2.0, "1_B").unwrap();
        assert_relative_eq!(integrate_radial(&ind, &QuadratureSpec::default()).unwrap().value, PI * PI / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn gaussian_volume_integral() {
        assert_relative_eq!(integrate_radial(&gaussian(), &QuadratureSpec::default()).unwrap().value, PI * PI, max_relative = 1e-10);
    }

    #[test]
    fn closed_laplacian_of_gaussian() {
        let g = gaussian();
        let l = radial_laplacian(&g).unwrap();
        for r in [0.1, 0.5, 1.0, 2.5] {
            assert_relative_eq!(l.value(r), (4.0 * r * r - 8.0) * (-r * r).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn slow_decay_is_refused() {
        let f = RadialFunction::smooth(Arc::new(|r: f64| Jet::new((1.0 + r * r).powf(-1.0), 0.0, 0.0)), 2.0, "rat").unwrap();
        assert!(integrate_radial(&f, &QuadratureSpec::default()).is_err());
    }
}
