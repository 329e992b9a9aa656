use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::{integrate_breaks, QuadratureSpec};
use crate::report::{ConditionEntry, ConditionReport};

use super::WeightProfile;

/// A ball B(x0, radius) with |x0| = center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSample {
    pub center: f64,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallAverage {
    pub center: f64,
    pub radius: f64,
    pub avg_omega: f64,
    pub avg_inverse: f64,
    pub product: f64,
}

/// 16 log-spaced radii in [1e-3, 1e3], each at centers 0, r, 3r and 10r.
pub fn default_ball_suite() -> Vec<BallSample> {
    let mut v = Vec::with_capacity(64);
    for i in 0..16 {
        let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 15.0);
        for m in [0.0, 1.0, 3.0, 10.0] {
            v.push(BallSample { center: m * r, radius: r });
        }
    }
    v
}

/// (x - sin x) / 2 with x = 2 theta, i.e. theta - sin(theta) cos(theta).
fn cap_angle_term(theta: f64) -> f64 {
    let x = 2.0 * theta;
    if x < 0.1 {
        let x2 = x * x;
        0.5 * x * x2 * (1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 / 362_880.0)))
    } else {
        0.5 * (x - x.sin())
    }
}

/// Area of the part of the sphere |x| = s inside B(x0, rho), |x0| = c > 0.
fn sphere_section(s: f64, c: f64, rho: f64) -> f64 {
    if s + c <= rho {
        return 2.0 * PI * PI * s.powi(3);
    }
    let one_minus_cos = ((rho * rho - (s - c) * (s - c)) / (2.0 * s * c)).clamp(0.0, 2.0);
    let theta = 2.0 * (0.5 * one_minus_cos).sqrt().asin();
    2.0 * PI * s.powi(3) * cap_angle_term(theta)
}

/// Ball averages of omega and 1/omega by reduction to a radial integral.
pub fn a2_product(profile: &WeightProfile, center: f64, radius: f64, quad: &QuadratureSpec) -> Result<BallAverage> {
    if !(radius > 0.0 && radius.is_finite()) || !(center >= 0.0 && center.is_finite()) {
        return invalid(format!("ball needs radius > 0 and center >= 0, got ({center}, {radius})"));
    }
    let lo = (center - radius).max(0.0);
    let hi = center + radius;
    let mut pts = vec![lo];
    if center > 0.0 && radius > center {
        pts.push(radius - center);
    }
    for b in profile.breakpoints() {
        if b > lo && b < hi {
            pts.push(b);
        }
    }
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let section = |s: f64| {
        if center == 0.0 {
            2.0 * PI * PI * s.powi(3)
        } else {
            sphere_section(s, center, radius)
        }
    };
    let vol = 0.5 * PI * PI * radius.powi(4);
    let a = integrate_breaks(|s| if s > 0.0 { profile.omega(s) * section(s) / vol } else { 0.0 }, &pts, quad)?.value;
    let b = integrate_breaks(|s| if s > 0.0 { section(s) / (vol * profile.omega(s)) } else { 0.0 }, &pts, quad)?.value;
    Ok(BallAverage { center, radius, avg_omega: a, avg_inverse: b, product: a * b })
}

/// Empirical A_2 constant over the sampled balls.
pub fn check_a2(profile: &WeightProfile, balls: &[BallSample], quad: &QuadratureSpec) -> Result<ConditionReport> {
    quad.validate()?;
    if balls.is_empty() {
        return invalid("ball sample list must be non-empty");
    }
    let results: Vec<Result<BallAverage>> = balls
        .par_iter()
        .map(|b| a2_product(profile, b.center, b.radius, quad))
        .collect();
    let mut entries = Vec::with_capacity(balls.len() + 1);
    let mut max_product: f64 = 0.0;
    let mut concentric = Vec::new();
    let mut all_ok = true;
    for (i, (b, res)) in balls.iter().zip(results).enumerate() {
        let case = if b.center < 2.0 * b.radius { "meets B(0,r)" } else { "disjoint from B(0,r)" };
        match res {
            Ok(avg) => {
                let ok = avg.product.is_finite() && avg.product >= 1.0 - 1e-9;
                all_ok &= ok;
                max_product = max_product.max(avg.product);
                if b.center == 0.0 {
                    concentric.push([b.radius, avg.product]);
                }
                entries.push(
                    ConditionEntry::new(format!("ball[{i}]"), ok, format!("|x0| = {:e}, r = {:e}, {case}", b.center, b.radius))
                        .values(vec![avg.avg_omega, avg.avg_inverse, avg.product])
                        .threshold(1.0)
                        .margin(avg.product - 1.0),
                );
            }
            Err(e) => {
                all_ok = false;
                entries.push(ConditionEntry::new(format!("ball[{i}]"), false, format!("{case}: {e}")));
            }
        }
    }
    concentric.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let slope = if concentric.len() >= 2 {
        let n = concentric.len();
        let target = concentric[n - 1][0] / 10.0;
        let i = concentric.iter().position(|p| p[0] >= target).unwrap_or(0).min(n - 2);
        (concentric[n - 1][1] / concentric[i][1]).ln() / (concentric[n - 1][0] / concentric[i][0]).ln()
    } else {
        f64::NAN
    };
    let (tail_ok, rule) = match profile.tail() {
        Some(t) => (
            t.exponent > -4.0 && t.exponent < 4.0,
            format!("tail exponent {} in (-4, 4) keeps large balls bounded", t.exponent),
        ),
        None => (false, "no declared tail exponent: large balls cannot be certified".to_string()),
    };
    entries.push(
        ConditionEntry::new(
            "a2_constant",
            all_ok && tail_ok,
            format!("empirical max over {} balls; concentric last-decade slope {slope:.4}; {rule}", balls.len()),
        )
        .values(vec![max_product, slope])
        .trace(concentric),
    );
    Ok(ConditionReport::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sections_fill_the_ball() {
        for (c, rho) in [(0.5, 1.0), (3.0, 1.0), (1.0, 1.0), (0.01, 2.0)] {
            let pts = if rho > c { vec![0.0, rho - c, c + rho] } else { vec![c - rho, c + rho] };
            let v = integrate_breaks(|s| sphere_section(s, c, rho), &pts, &QuadratureSpec::default()).unwrap().value;
            assert_relative_eq!(v, 0.5 * PI * PI * rho.powi(4), max_relative = 1e-8);
        }
    }

    #[test]
    fn constant_weight_ball_is_one() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let a = a2_product(&w, 100.0, 1e-4, &QuadratureSpec::default()).unwrap();
        assert!((a.product - 1.0).abs() < 1e-9);
    }

    #[test]
    fn default_suite_passes_for_cube() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let rep = check_a2(&w, &default_ball_suite(), &QuadratureSpec::default()).unwrap();
        assert!(rep.pass, "{:?}", rep.entry("a2_constant"));
        assert_eq!(default_ball_suite().len(), 64);
    }
}
