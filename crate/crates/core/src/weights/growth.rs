use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, integrate_log, integrate_to_infinity, QuadratureSpec};
use crate::report::{ConditionEntry, ConditionReport};

use super::{TailLaw, WeightProfile};

/// Radius separating quadrature from the declared-tail treatment.
const SPLIT: f64 = 1e6;
/// Allowed growth of consecutive J(k)^{1/k} near k_max.
const STEP_TOLERANCE: f64 = 1.05;

/// Tabulated building blocks T(r) = int_r^inf dy/(chi y) and I(r) = int_1^r y/chi dy.
#[derive(Clone, Debug)]
pub struct GrowthKernels<'a> {
    profile: &'a WeightProfile,
    tail: TailLaw,
    nodes: Vec<f64>,
    t_at: Vec<f64>,
    i_at: Vec<f64>,
    quad: QuadratureSpec,
}

impl<'a> GrowthKernels<'a> {
    pub fn new(profile: &'a WeightProfile, quad: &QuadratureSpec) -> Result<Self> {
        let tail = profile
            .tail()
            .ok_or_else(|| Error::InvalidParameter("tabulated chi without tail exponent: cannot certify improper integrals".into()))?;
        if tail.exponent <= 0.0 {
            return Err(Error::Divergent(format!(
                "int_r^inf dy/(chi y) diverges for tail exponent {} <= 0",
                tail.exponent
            )));
        }
        let mut nodes: Vec<f64> = profile.breakpoints().into_iter().filter(|&x| x <= tail.start).collect();
        if nodes.last().copied() != Some(tail.start) {
            nodes.push(tail.start);
        }
        let n = nodes.len();
        let mut t_at = vec![0.0; n];
        t_at[n - 1] = tail.start.powf(-tail.exponent) / (tail.coef * tail.exponent);
        for k in (0..n - 1).rev() {
            t_at[k] = t_at[k + 1] + integrate(|y| 1.0 / (profile.chi(y) * y), nodes[k], nodes[k + 1], quad)?.value;
        }
        let mut i_at = vec![0.0; n];
        for k in 1..n {
            i_at[k] = i_at[k - 1] + integrate(|y| y / profile.chi(y), nodes[k - 1], nodes[k], quad)?.value;
        }
        Ok(Self { profile, tail, nodes, t_at, i_at, quad: *quad })
    }

    pub fn tail(&self) -> TailLaw {
        self.tail
    }

    /// T(r) = int_r^inf chi(y)^{-1} y^{-1} dy for r >= 1.
    pub fn outer(&self, r: f64) -> f64 {
        if r >= self.tail.start {
            return r.powf(-self.tail.exponent) / (self.tail.coef * self.tail.exponent);
        }
        let k = self.nodes.partition_point(|&x| x <= r).max(1) - 1;
        let hi = self.nodes[k + 1];
        let p = self.profile;
        let part = integrate(|y| 1.0 / (p.chi(y) * y), r, hi, &self.quad).map(|v| v.value).unwrap_or(f64::NAN);
        self.t_at[k + 1] + part
    }

    /// I(r) = int_1^r y chi(y)^{-1} dy for r >= 1.
    pub fn inner(&self, r: f64) -> f64 {
        let tl = &self.tail;
        if r >= tl.start {
            let base = self.i_at[self.i_at.len() - 1];
            let e = 2.0 - tl.exponent;
            let extra = if e.abs() < 1e-12 {
                (r / tl.start).ln() / tl.coef
            } else {
                (r.powf(e) - tl.start.powf(e)) / (e * tl.coef)
            };
            return base + extra;
        }
        let k = self.nodes.partition_point(|&x| x <= r).max(1) - 1;
        let lo = self.nodes[k];
        let p = self.profile;
        let part = integrate(|y| y / p.chi(y), lo, r, &self.quad).map(|v| v.value).unwrap_or(f64::NAN);
        self.i_at[k] + part
    }
}

/// T(r) for a single radius.
pub fn outer_tail_integral(profile: &WeightProfile, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    if r < 1.0 {
        return invalid(format!("radius must be >= 1, got {r}"));
    }
    Ok(GrowthKernels::new(profile, quad)?.outer(r))
}

/// I(r) for a single radius.
pub fn inner_growth_integral(profile: &WeightProfile, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    if r < 1.0 {
        return invalid(format!("radius must be >= 1, got {r}"));
    }
    Ok(GrowthKernels::new(profile, quad)?.inner(r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Order {
    Finite(f64),
    Divergent,
    Exempt,
}

fn breaks(k: &GrowthKernels, hi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = k.nodes.iter().copied().filter(|&x| x < hi).collect();
    pts.push(hi);
    pts
}

fn j1(kern: &GrowthKernels, m: f64, quad: &QuadratureSpec) -> Result<Order> {
    let tl = kern.tail;
    if tl.exponent * m <= 4.0 {
        return Ok(Order::Divergent);
    }
    let s = SPLIT.max(tl.start);
    let mut acc = 0.0;
    for w in breaks(kern, s).windows(2) {
        acc += integrate_log(|r| (3.0 * r.ln() + m * kern.outer(r).ln()).exp(), w[0], w[1], quad)?.value;
    }
    let p = tl.exponent * m - 4.0;
    acc += (tl.coef * tl.exponent).powf(-m) * s.powf(-p) / p;
    Ok(Order::Finite(acc))
}

fn j2(kern: &GrowthKernels, m: f64, quad: &QuadratureSpec) -> Result<Order> {
    if m <= 2.0 {
        return Ok(Order::Exempt);
    }
    let tl = kern.tail;
    let converges = if tl.exponent >= 2.0 { m > 2.0 } else { m * tl.exponent > 4.0 };
    if !converges {
        return Ok(Order::Divergent);
    }
    let s = SPLIT.max(tl.start);
    // Log space: for large r and m the two factors separately under- and overflow.
    let g = |r: f64| {
        let i = kern.inner(r);
        if i <= 0.0 {
            return 0.0;
        }
        ((3.0 - 2.0 * m) * r.ln() + m * i.ln()).exp()
    };
    let mut acc = 0.0;
    for w in breaks(kern, s).windows(2) {
        acc += integrate_log(g, w[0], w[1], quad)?.value;
    }
    acc += integrate_to_infinity(
        |t| {
            let r = s * t.exp();
            if r.is_finite() {
                g(r) * r
            } else {
                0.0
            }
        },
        0.0,
        quad,
    )?
    .value;
    Ok(Order::Finite(acc))
}

fn order_entry(name: &str, orders: &[Order], beta: f64, rule: &str) -> ConditionEntry {
    let k_max = orders.len();
    let roots: Vec<f64> = orders
        .iter()
        .enumerate()
        .map(|(i, o)| match o {
            Order::Finite(j) => j.powf(1.0 / (i + 1) as f64),
            Order::Divergent => f64::INFINITY,
            Order::Exempt => f64::NAN,
        })
        .collect();
    let divergent: Vec<usize> = (0..k_max).filter(|&i| orders[i] == Order::Divergent).map(|i| i + 1).collect();
    let exempt: Vec<usize> = (0..k_max).filter(|&i| orders[i] == Order::Exempt).map(|i| i + 1).collect();
    let r1 = roots[k_max - 1] / roots[k_max - 2];
    let r2 = roots[k_max - 2] / roots[k_max - 3];
    let worst = r1.max(r2);
    let c = roots.iter().copied().filter(|v| v.is_finite()).fold(f64::NAN, f64::max);
    let pass = divergent.is_empty() && worst.is_finite() && worst <= STEP_TOLERANCE;
    let detail = if !divergent.is_empty() {
        format!("divergent at k = {divergent:?} (exponent k/(1-beta) with beta = {beta}); {rule}")
    } else {
        format!(
            "C = max_k J(k)^(1/k) = {c:.6e}; last step ratios {r2:.4}, {r1:.4} (tolerance {STEP_TOLERANCE}); exempt orders {exempt:?}; {rule}"
        )
    };
    let trace = orders
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let v = match o {
                Order::Finite(j) => *j,
                Order::Divergent => f64::INFINITY,
                Order::Exempt => f64::NAN,
            };
            [(i + 1) as f64, v]
        })
        .collect();
    let mut values = vec![c];
    values.extend(roots);
    ConditionEntry::new(name, pass, detail)
        .values(values)
        .threshold(STEP_TOLERANCE)
        .margin(STEP_TOLERANCE - worst)
        .trace(trace)
}

/// Computes J_1(k), J_2(k) for k = 1..k_max and certifies geometric growth.
///
/// Orders with k/(1-beta) <= 2 are exempt for J_2: there r^{3-2m} I(r)^m is
/// not integrable for any chi, and those powers are controlled by the
/// L^{2/(1-beta)} part of the space instead.
pub fn check_growth_conditions_d(profile: &WeightProfile, k_max: usize, quad: &QuadratureSpec) -> Result<ConditionReport> {
    quad.validate()?;
    if k_max < 8 {
        return invalid(format!("k_max must be at least 8, got {k_max}"));
    }
    let beta = profile.beta();
    let kern = match GrowthKernels::new(profile, quad) {
        Ok(k) => k,
        Err(Error::Divergent(msg)) => {
            return Ok(ConditionReport::from_entries(vec![
                ConditionEntry::new("D1", false, format!("inner integral divergent: {msg}")),
                ConditionEntry::new("D2", false, format!("inner integral divergent: {msg}")),
            ]))
        }
        Err(e) => return Err(e),
    };
    let ks: Vec<usize> = (1..=k_max).collect();
    let d1: Vec<Order> = ks
        .par_iter()
        .map(|&k| j1(&kern, k as f64 / (1.0 - beta), quad))
        .collect::<Result<_>>()?;
    let d2: Vec<Order> = ks
        .par_iter()
        .map(|&k| j2(&kern, k as f64 / (1.0 - beta), quad))
        .collect::<Result<_>>()?;
    Ok(ConditionReport::from_entries(vec![
        order_entry("D1", &d1, beta, "J1(k) = int_1^inf r^3 T(r)^(k/(1-beta)) dr"),
        order_entry("D2", &d2, beta, "J2(k) = int_1^inf r^(3-2k/(1-beta)) I(r)^(k/(1-beta)) dr"),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernels_match_power_closed_forms() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let k = GrowthKernels::new(&w, &QuadratureSpec::default()).unwrap();
        for r in [1.0, 2.0, 17.0, 1e4] {
            assert_relative_eq!(k.outer(r), 1.0 / (3.0 * r * r * r), max_relative = 1e-12);
            assert_relative_eq!(k.inner(r), 1.0 - 1.0 / r, max_relative = 1e-12);
        }
    }

    #[test]
    fn table_kernels_agree_with_equivalent_power() {
        let r: Vec<f64> = (0..40).map(|i| 1.0 + 0.25 * i as f64).collect();
        let chi = r.iter().map(|x: &f64| x.powi(3)).collect();
        let w = WeightProfile::new(0.5, super::super::ChiSpec::Table { r, chi, tail_exponent: Some(3.0) }).unwrap();
        let k = GrowthKernels::new(&w, &QuadratureSpec::default()).unwrap();
        for x in [1.0, 1.3, 4.4, 30.0] {
            assert_relative_eq!(k.outer(x), 1.0 / (3.0 * x * x * x), max_relative = 2e-3);
            assert_relative_eq!(k.inner(x), 1.0 - 1.0 / x, max_relative = 2e-3);
        }
    }

    #[test]
    fn first_order_chain() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let rep = check_growth_conditions_d(&w, 12, &QuadratureSpec::default()).unwrap();
        let d1 = rep.entry("D1").unwrap();
        assert_relative_eq!(d1.trace[0][1], 1.0 / 18.0, max_relative = 1e-8);
        assert!(rep.pass, "{rep:#?}");
    }
}
