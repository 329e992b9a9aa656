use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_log, QuadratureSpec};
use crate::report::{ConditionEntry, ConditionReport};

use super::{TailLaw, WeightProfile};

/// Ratio of consecutive grid radii for the (chi1)-(chi3) suprema.
const GRID_RATIO: f64 = 1.1;

/// Whether a power tail y^a sits inside max{2, 4(1-beta)} < a < 4.
pub fn power_window(beta: f64, a: f64) -> bool {
    let lo = 2.0_f64.max(4.0 * (1.0 - beta));
    a > lo && a < 4.0
}

/// Breakpoints in [lo, hi] including both ends and every interior weight node.
fn breaks_between(profile: &WeightProfile, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    pts.extend(profile.breakpoints().into_iter().filter(|&x| x > lo && x < hi));
    pts.push(hi);
    pts
}

/// Integral of chi(y)^{-1} y^m over [lo, hi] on the log scale.
fn inverse_moment(profile: &WeightProfile, m: f64, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    let pts = breaks_between(profile, lo, hi);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += integrate_log(|y| y.powf(m) / profile.chi(y), w[0], w[1], quad)?.value;
    }
    Ok(acc)
}

/// Integral of y^m / (coef y^e) over [start, inf), or `None` if divergent.
fn tail_inverse_moment(tail: &TailLaw, m: f64, start: f64) -> Option<f64> {
    let p = m - tail.exponent;
    (p < -1.0).then(|| start.powf(p + 1.0) / (-(p + 1.0) * tail.coef))
}

fn improper_entry(
    profile: &WeightProfile,
    tail: &TailLaw,
    name: &str,
    m: f64,
    split: f64,
    quad: &QuadratureSpec,
) -> Result<ConditionEntry> {
    let mut trace = Vec::new();
    let mut lo = 1.0;
    let mut acc = 0.0;
    let mut decade: f64 = 10.0;
    while lo < split {
        let hi = decade.min(split);
        acc += inverse_moment(profile, m, lo, hi, quad)?;
        trace.push([hi, acc]);
        lo = hi;
        decade *= 10.0;
    }
    let threshold_exp = m + 1.0;
    let margin = tail.exponent - threshold_exp;
    Ok(match tail_inverse_moment(tail, m, split) {
        Some(t) => ConditionEntry::new(
            name,
            true,
            format!("quadrature on [1, {split:e}] plus analytic tail from declared exponent {}", tail.exponent),
        )
        .values(vec![acc + t, acc, t])
        .margin(margin)
        .trace(trace),
        None => ConditionEntry::new(
            name,
            false,
            format!(
                "divergent: tail exponent {} must exceed {threshold_exp}; partial sums in trace",
                tail.exponent
            ),
        )
        .values(vec![f64::INFINITY, acc])
        .margin(margin)
        .trace(trace),
    })
}

/// Log-log slope of the last `span` decades of a sampled curve.
fn tail_slope(r: &[f64], v: &[f64], span: f64) -> f64 {
    let n = r.len();
    let r_end = r[n - 1];
    let target = r_end / 10f64.powf(span);
    let i = r.partition_point(|&x| x < target).min(n - 2);
    if v[i] <= 0.0 || v[n - 1] <= 0.0 {
        return f64::NAN;
    }
    (v[n - 1] / v[i]).ln() / (r_end / r[i]).ln()
}

fn geometric_grid(r_max: f64) -> Vec<f64> {
    let mut g = vec![1.0];
    let mut j = 1;
    loop {
        let r = GRID_RATIO.powi(j);
        if r > r_max {
            break;
        }
        g.push(r);
        j += 1;
    }
    g
}

fn sup_entry(name: &str, r: &[f64], v: &[f64], bounded: bool, margin: Option<f64>, rule: &str) -> ConditionEntry {
    let sup = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slope = tail_slope(r, v, 2.0);
    let stride = (r.len() / 40).max(1);
    let trace: Vec<[f64; 2]> = r.iter().zip(v).step_by(stride).map(|(a, b)| [*a, *b]).collect();
    let finite = v.iter().all(|x| x.is_finite());
    let mut e = ConditionEntry::new(
        name,
        bounded && finite,
        format!(
            "empirical sup over r = 1.1^j <= {:e}; last-two-decade log-log slope {slope:.4}; asymptotic verdict: {rule}",
            r[r.len() - 1]
        ),
    )
    .values(vec![sup, v[v.len() - 1], slope])
    .trace(trace);
    if let Some(m) = margin {
        e = e.margin(m);
    }
    e
}

/// Certifies (chi0), (chi0(1)) and the M-quantities of (chi1)-(chi3).
pub fn check_structural_conditions(
    profile: &WeightProfile,
    quad: &QuadratureSpec,
    r_max: f64,
) -> Result<ConditionReport> {
    quad.validate()?;
    if !(r_max >= 1e3 && r_max.is_finite()) {
        return invalid(format!("r_max must be at least 1e3, got {r_max}"));
    }
    let tail = profile
        .tail()
        .ok_or_else(|| Error::InvalidParameter("tabulated chi without tail exponent: cannot certify improper integrals".into()))?;
    let split = r_max.max(tail.start);
    let mut entries = Vec::new();

    let grid = geometric_grid(split);
    let chi_grid: Vec<f64> = grid.iter().map(|&y| profile.chi(y)).collect();
    let mut inf = chi_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(m) = profile.table_min() {
        inf = inf.min(m);
    }
    let positive = inf > 0.0 && tail.exponent >= 0.0;
    entries.push(
        ConditionEntry::new(
            "chi_positive",
            positive,
            format!("min of chi over samples; tail exponent {} must be >= 0 for a positive infimum", tail.exponent),
        )
        .values(vec![inf])
        .threshold(0.0)
        .margin(inf),
    );

    entries.push(
        ConditionEntry::new(
            "chi_normalized",
            (profile.chi(1.0) - 1.0).abs() <= 1e-12,
            "chi(1) = 1",
        )
        .values(vec![profile.chi(1.0)])
        .threshold(1.0),
    );

    entries.push(improper_entry(profile, &tail, "chi0", -1.0, split, quad)?);
    entries.push(improper_entry(profile, &tail, "chi0(1)", 1.0, split, quad)?);

    // Running integrals of t^3 chi and t^3 / chi along the grid.
    let n = grid.len();
    let mut s_up = vec![0.0; n];
    let mut s_dn = vec![0.0; n];
    for i in 1..n {
        let pts = breaks_between(profile, grid[i - 1], grid[i]);
        let mut up = 0.0;
        let mut dn = 0.0;
        for w in pts.windows(2) {
            up += crate::quadrature::integrate(|t| t.powi(3) * profile.chi(t), w[0], w[1], quad)?.value;
            dn += crate::quadrature::integrate(|t| t.powi(3) / profile.chi(t), w[0], w[1], quad)?.value;
        }
        s_up[i] = s_up[i - 1] + up;
        s_dn[i] = s_dn[i - 1] + dn;
    }
    let tau = tail.exponent;
    let m1: Vec<f64> = (0..n).map(|i| s_up[i] * s_dn[i] / grid[i].powi(8)).collect();
    let m2: Vec<f64> = (0..n).map(|i| s_up[i] / grid[i].powi(8)).collect();
    let m3: Vec<f64> = grid
        .iter()
        .map(|&r| {
            let mut pts: Vec<f64> = (0..=64).map(|k| r * 4f64.powf(k as f64 / 64.0)).collect();
            pts.extend(profile.breakpoints().into_iter().filter(|&x| x > r && x < 4.0 * r));
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for y in pts {
                let c = profile.chi(y);
                lo = lo.min(c);
                hi = hi.max(c);
            }
            hi / lo
        })
        .collect();

    entries.push(sup_entry(
        "chi1",
        &grid,
        &m1,
        tau > -4.0 && tau < 4.0,
        Some((tau + 4.0).min(4.0 - tau)),
        "bounded iff -4 < tail exponent < 4",
    ));
    entries.push(sup_entry("chi2", &grid, &m2, tau <= 4.0, Some(4.0 - tau), "bounded iff tail exponent <= 4"));
    entries.push(sup_entry("chi3", &grid, &m3, true, None, "a power tail has bounded oscillation on [r, 4r]"));

    if let Some(a) = profile.power_exponent() {
        let lo = 2.0_f64.max(4.0 * (1.0 - profile.beta()));
        entries.push(
            ConditionEntry::new(
                "power_window",
                power_window(profile.beta(), a),
                format!("max{{2, 4(1-beta)}} = {lo} < a < 4"),
            )
            .values(vec![a])
            .margin((a - lo).min(4.0 - a)),
        );
    }
    Ok(ConditionReport::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cube_closed_forms() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let r = check_structural_conditions(&w, &QuadratureSpec::default(), 1e6).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_relative_eq!(r.entry("chi0").unwrap().values[0], 1.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(r.entry("chi0(1)").unwrap().values[0], 1.0, max_relative = 1e-9);
    }

    #[test]
    fn chi2_fails_above_four() {
        let w = WeightProfile::power(0.5, 4.5).unwrap();
        let r = check_structural_conditions(&w, &QuadratureSpec::default(), 1e6).unwrap();
        assert!(!r.entry("chi2").unwrap().pass);
        assert!(r.entry("chi2").unwrap().values[2] > 0.45);
    }

    #[test]
    fn table_without_tail_is_refused() {
        let w = WeightProfile::new(
            0.5,
            super::super::ChiSpec::Table { r: vec![1.0, 2.0], chi: vec![1.0, 8.0], tail_exponent: None },
        )
        .unwrap();
        assert!(check_structural_conditions(&w, &QuadratureSpec::default(), 1e6).is_err());
    }

    #[test]
    fn window_limits() {
        assert!(power_window(0.5, 3.0));
        assert!(!power_window(0.5, 1.5));
        assert!(!power_window(0.25, 2.5));
        assert!(power_window(0.25, 3.5));
        assert!(!power_window(0.5, 4.0));
    }
}
