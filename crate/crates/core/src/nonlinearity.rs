//! Exponential-growth nonlinearities f with f = 0 on s <= 0, and numeric
//! checks of the growth, ratio and liminf conditions.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::radial::alpha_beta;
use crate::report::{ConditionEntry, ConditionReport};
use crate::weights::Pchip;

/// Largest exponent evaluated before saturating to +inf.
const EXP_LIMIT: f64 = 700.0;

/// Data of the model f(s) = C s^{p-1} (sigma alpha s^sigma + 1)(e^{alpha s^sigma} - 1),
/// sigma = 2/(1-beta), together with the growth constants (q, c0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub c0: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        Self { p: 5.0, q: 9.0, alpha: 1.0, beta: 0.5, c: 1.0, c0: 8.0 }
    }
}

impl GrowthParams {
    /// 2/(1-beta).
    pub fn sigma(&self) -> f64 {
        2.0 / (1.0 - self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return invalid(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        for (name, v) in [("alpha", self.alpha), ("C", self.c), ("c0", self.c0)] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive and finite, got {v}"));
            }
        }
        let s = self.sigma();
        if !(self.p.min(self.q) > s) || !self.p.is_finite() || !self.q.is_finite() {
            return invalid(format!("min{{p, q}} must exceed 2/(1-beta) = {s}, got p = {}, q = {}", self.p, self.q));
        }
        Ok(())
    }

    /// Smallest q for which the model meets the growth bound: p + 2/(1-beta).
    pub fn minimal_q(&self) -> f64 {
        self.p + self.sigma()
    }
}

/// The model nonlinearity; 0 for s <= 0, +inf once alpha s^sigma exceeds 700.
pub fn f_model(s: f64, params: &GrowthParams) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let sg = params.sigma();
    let x = params.alpha * s.powf(sg);
    if x > EXP_LIMIT {
        return f64::INFINITY;
    }
    params.c * s.powf(params.p - 1.0) * (sg * x + 1.0) * x.exp_m1()
}

/// f'(s) for s > 0.
pub fn f_model_derivative(s: f64, params: &GrowthParams) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let (p, sg) = (params.p, params.sigma());
    let x = params.alpha * s.powf(sg);
    if x > EXP_LIMIT {
        return f64::INFINITY;
    }
    let e = x.exp_m1();
    let inner = (p - 1.0) * (sg * x + 1.0) * e + sg * sg * x * e + sg * x * (sg * x + 1.0) * (e + 1.0);
    params.c * s.powf(p - 2.0) * inner
}

/// The closed form C s^p (e^{alpha s^sigma} - 1) offered as the primitive of
/// the model. Its derivative is C s^{p-1}(p (e^x - 1) + sigma x e^x), which is
/// not f; see [`antiderivative`] for the exact primitive.
pub fn antiderivative_printed(s: f64, params: &GrowthParams) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let x = params.alpha * s.powf(params.sigma());
    if x > EXP_LIMIT {
        return f64::INFINITY;
    }
    params.c * s.powf(params.p) * x.exp_m1()
}

/// F(s) = int_0^s f, summed as the positive series
/// C s^p sum_{k>=1} x^k/k! [sigma x/(p + (k+1) sigma) + 1/(p + k sigma)], x = alpha s^sigma.
pub fn antiderivative(s: f64, params: &GrowthParams) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let (p, sg) = (params.p, params.sigma());
    let x = params.alpha * s.powf(sg);
    if x > EXP_LIMIT {
        return f64::INFINITY;
    }
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        term *= x / kf;
        let add = term * (sg * x / (p + (kf + 1.0) * sg) + 1.0 / (p + kf * sg));
        sum += add;
        if (kf > x && add <= 1e-17 * sum) || k > 100_000 {
            break;
        }
        k += 1;
    }
    params.c * s.powf(p) * sum
}

/// f(s) s e^{-alpha s^sigma} = C s^p (sigma x + 1)(1 - e^{-x}), free of overflow.
pub fn liminf_ratio(s: f64, params: &GrowthParams) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let sg = params.sigma();
    let x = params.alpha * s.powf(sg);
    params.c * s.powf(params.p) * (sg * x + 1.0) * (-(-x).exp_m1())
}

/// 2/(pi^2 e^4) (alpha_beta/alpha)^{1-beta}.
pub fn kappa_threshold(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    let a = alpha_beta(beta)?;
    Ok(2.0 / (PI * PI * E.powi(4)) * ((1.0 - beta) * (a / alpha).ln()).exp())
}

/// m* = (1/2)(alpha_beta/alpha)^{1-beta}.
pub fn m_star(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    let a = alpha_beta(beta)?;
    Ok(0.5 * ((1.0 - beta) * (a / alpha).ln()).exp())
}

/// A nonlinearity vanishing on s <= 0 with a primitive.
pub trait Nonlinearity: Sync {
    fn f(&self, s: f64) -> f64;
    fn primitive(&self, s: f64) -> f64;
    /// f(s) s e^{-alpha s^sigma}.
    fn liminf_ratio(&self, s: f64, alpha: f64, sigma: f64) -> f64 {
        self.f(s) * s * (-alpha * s.powf(sigma)).exp()
    }
}

/// The model with its exact primitive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model(pub GrowthParams);

impl Nonlinearity for Model {
    fn f(&self, s: f64) -> f64 {
        f_model(s, &self.0)
    }
    fn primitive(&self, s: f64) -> f64 {
        antiderivative(s, &self.0)
    }
    fn liminf_ratio(&self, s: f64, _alpha: f64, _sigma: f64) -> f64 {
        liminf_ratio(s, &self.0)
    }
}

/// Samples of f on s >= 0 (monotone cubic interpolation, f = 0 for s <= 0,
/// constant past the last node).
#[derive(Clone, Debug)]
pub struct TabulatedNonlinearity {
    interp: Pchip,
    cumulative: Vec<f64>,
}

impl TabulatedNonlinearity {
    pub fn new(s: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if s.first() != Some(&0.0) {
            return invalid("tabulated f must start at s = 0");
        }
        if f[0] != 0.0 {
            return invalid("tabulated f must vanish at s = 0");
        }
        let interp = Pchip::new(s, f)?;
        let nodes = interp.nodes().to_vec();
        let mut cumulative = vec![0.0; nodes.len()];
        let quad = QuadratureSpec::default();
        for i in 1..nodes.len() {
            cumulative[i] = cumulative[i - 1] + integrate(|t| interp.eval(t), nodes[i - 1], nodes[i], &quad)?.value;
        }
        Ok(Self { interp, cumulative })
    }
}

impl Nonlinearity for TabulatedNonlinearity {
    fn f(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            self.interp.eval(s)
        }
    }

    fn primitive(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let nodes = self.interp.nodes();
        let last = nodes.len() - 1;
        if s >= nodes[last] {
            return self.cumulative[last] + (s - nodes[last]) * self.interp.values()[last];
        }
        let i = nodes.partition_point(|&x| x <= s) - 1;
        let part = integrate(|t| self.interp.eval(t), nodes[i], s, &QuadratureSpec::default()).map(|v| v.value).unwrap_or(f64::NAN);
        self.cumulative[i] + part
    }
}

/// Largest s with alpha s^sigma <= 700.
pub fn overflow_point(params: &GrowthParams) -> f64 {
    (EXP_LIMIT / params.alpha).powf(1.0 / params.sigma())
}

/// 400 log-spaced samples in [1e-3, s_top] with alpha s_top^sigma = 600, which
/// leaves room for the polynomial factors in front of the exponential.
pub fn default_samples(params: &GrowthParams) -> Vec<f64> {
    let hi = ((EXP_LIMIT - 100.0) / params.alpha).powf(1.0 / params.sigma());
    let n = 400;
    let (a, b) = (1e-3f64.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn validate_samples(s: &[f64]) -> Result<()> {
    if s.len() < 4 || s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return invalid("need at least four positive finite samples");
    }
    if s.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("samples must be strictly increasing");
    }
    Ok(())
}

/// Growth bound for the model.
pub fn check_f1(params: &GrowthParams, samples: &[f64]) -> Result<ConditionReport> {
    check_f1_with(&Model(*params), params, samples)
}

/// |f(s)| <= c0 (s^{p-1} + s^{q-1}(e^{alpha s^sigma} - 1)) on the samples.
///
/// Reports the smallest feasible c0 and the log-log slope of the ratio over
/// the top factor-2 range; a positive slope means no finite c0 exists.
pub fn check_f1_with(f: &dyn Nonlinearity, params: &GrowthParams, samples: &[f64]) -> Result<ConditionReport> {
    params.validate()?;
    validate_samples(samples)?;
    let sg = params.sigma();
    let ratio: Vec<f64> = samples
        .iter()
        .map(|&s| {
            let x = params.alpha * s.powf(sg);
            let bound = s.powf(params.p - 1.0) + s.powf(params.q - 1.0) * x.exp_m1();
            f.f(s).abs() / bound
        })
        .collect();
    if ratio.iter().any(|r| !r.is_finite()) {
        return invalid("samples reach the overflow range of f");
    }
    let min_c0 = ratio.iter().copied().fold(0.0, f64::max);
    let top = samples[samples.len() - 1] / 2.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .zip(&ratio)
        .filter(|(s, r)| **s >= top && **r > 0.0)
        .map(|(s, r)| (s.ln(), r.ln()))
        .unzip();
    let slope = if xs.len() >= 2 { crate::extremals::least_squares_slope(&xs, &ys) } else { 0.0 };
    let finite = slope <= 1e-3;
    let exponents = params.p.min(params.q) > sg;
    let entries = vec![
        ConditionEntry::new("F1_exponents", exponents, format!("min{{p, q}} > 2/(1-beta) = {sg}"))
            .values(vec![params.p, params.q])
            .threshold(sg)
            .margin(params.p.min(params.q) - sg),
        ConditionEntry::new(
            "F1_growth",
            finite,
            format!("log-log slope of f / bound over the top factor 2 of the samples is {slope:.4e}; positive means no finite c0"),
        )
        .values(vec![min_c0, slope])
        .threshold(1e-3)
        .margin(1e-3 - slope),
        ConditionEntry::new("F1_constant", finite && min_c0 <= params.c0, format!("minimal c0 {min_c0:.6e} against configured c0 {}", params.c0))
            .values(vec![min_c0])
            .threshold(params.c0)
            .margin(params.c0 - min_c0),
    ];
    Ok(ConditionReport::from_entries(entries))
}

/// F <= M0 f for the model on samples >= s0.
pub fn check_f2(params: &GrowthParams, m0: f64, s0: f64, samples: &[f64]) -> Result<ConditionReport> {
    params.validate()?;
    check_f2_with(&Model(*params), m0, s0, samples)
}

/// F(s) <= M0 f(s) on the samples >= s0; reports the minimal feasible M0.
pub fn check_f2_with(f: &dyn Nonlinearity, m0: f64, s0: f64, samples: &[f64]) -> Result<ConditionReport> {
    if !(s0 > 0.0) || !(m0 > 0.0) {
        return invalid("M0 and s0 must be positive");
    }
    validate_samples(samples)?;
    let used: Vec<f64> = samples.iter().copied().filter(|&s| s >= s0).collect();
    let mut min_m0: f64 = 0.0;
    let mut trace = Vec::with_capacity(used.len());
    for &s in &used {
        let big = f.primitive(s);
        let small = f.f(s);
        let r = if big == 0.0 && small == 0.0 { 0.0 } else { big / small };
        if !r.is_finite() {
            return invalid(format!("F/f is not finite at s = {s}"));
        }
        min_m0 = min_m0.max(r);
        trace.push([s, r]);
    }
    let pass = min_m0 <= m0;
    let entry = ConditionEntry::new(
        "F2",
        pass,
        format!("{} samples at s >= {s0}; minimal M0 {min_m0:.6e} against M0 = {m0}", used.len()),
    )
    .values(vec![min_m0, m0])
    .threshold(m0)
    .margin(m0 - min_m0)
    .trace(trace);
    Ok(ConditionReport::from_entries(vec![entry]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F3Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct F3Result {
    pub liminf_estimate: f64,
    pub kappa_threshold: f64,
    pub monotone: bool,
    pub verdict: F3Verdict,
    pub pass: bool,
}

impl F3Result {
    pub fn entry(&self) -> ConditionEntry {
        ConditionEntry::new(
            "F3",
            self.pass,
            format!(
                "f(s)s/e^(alpha s^sigma) at the largest sample against 2/(pi^2 e^4)(alpha_beta/alpha)^(1-beta); tail monotone: {}; verdict {:?}",
                self.monotone, self.verdict
            ),
        )
        .values(vec![self.liminf_estimate])
        .threshold(self.kappa_threshold)
        .margin(self.liminf_estimate - self.kappa_threshold)
    }
}

/// Default largest sample for the liminf estimate.
pub const DEFAULT_F3_SMAX: f64 = 10.0;

pub fn check_f3(params: &GrowthParams, s_max: f64) -> Result<F3Result> {
    params.validate()?;
    check_f3_with(&Model(*params), params, s_max)
}

/// Estimates the liminf by the ratio at s_max, provided it is monotone over
/// [s_max/10, s_max]; otherwise the verdict is inconclusive.
pub fn check_f3_with(f: &dyn Nonlinearity, params: &GrowthParams, s_max: f64) -> Result<F3Result> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return invalid(format!("s_max must be positive, got {s_max}"));
    }
    let sg = params.sigma();
    let n = 200;
    let ratios: Vec<f64> = (0..n)
        .map(|i| {
            let s = s_max / 10.0 * 10f64.powf(i as f64 / (n - 1) as f64);
            f.liminf_ratio(s, params.alpha, sg)
        })
        .collect();
    let inc = ratios.windows(2).all(|w| w[1] >= w[0]);
    let dec = ratios.windows(2).all(|w| w[1] <= w[0]);
    let monotone = (inc || dec) && ratios.iter().all(|r| r.is_finite());
    let estimate = ratios[n - 1];
    let threshold = kappa_threshold(params.alpha, params.beta)?;
    let verdict = if !monotone {
        F3Verdict::Inconclusive
    } else if estimate > threshold {
        F3Verdict::Pass
    } else {
        F3Verdict::Fail
    };
    Ok(F3Result { liminf_estimate: estimate, kappa_threshold: threshold, monotone, verdict, pass: verdict == F3Verdict::Pass })
}

/// All three conditions with defaults M0 = 1, s0 = 1, s_max = 10.
pub fn check_all(params: &GrowthParams) -> Result<ConditionReport> {
    let samples = default_samples(params);
    let f1 = check_f1(params, &samples)?;
    let f2 = check_f2(params, 1.0, 1.0, &samples)?;
    let f3 = check_f3(params, DEFAULT_F3_SMAX)?;
    Ok(f1.merge(f2).merge(ConditionReport::from_entries(vec![f3.entry()])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn model_points() {
        let p = GrowthParams::default();
        assert_eq!(f_model(-1.0, &p), 0.0);
        assert_eq!(f_model(0.0, &p), 0.0);
        assert_relative_eq!(f_model(1.0, &p), 5.0 * (E - 1.0), max_relative = 1e-14);
        assert_relative_eq!(antiderivative_printed(1.0, &p), E - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn exact_primitive_small_s() {
        let p = GrowthParams::default();
        let s: f64 = 0.1;
        // leading term C s^p x / (p + sigma) with x = s^4
        let lead = s.powi(9) / 9.0;
        assert_relative_eq!(antiderivative(s, &p), lead, max_relative = 1e-3);
    }

    #[test]
    fn thresholds() {
        assert_relative_eq!(kappa_threshold(1.0, 0.5).unwrap(), 16.0 / E.powi(4), max_relative = 1e-12);
        assert_relative_eq!(m_star(1.0, 0.5).unwrap(), 4.0 * PI * PI, max_relative = 1e-12);
        let a = alpha_beta(0.3).unwrap();
        assert_relative_eq!(m_star(a, 0.3).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn rejects_small_exponents() {
        let p = GrowthParams { p: 3.0, ..GrowthParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_table() {
        let t = TabulatedNonlinearity::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0; 4]).unwrap();
        let p = GrowthParams::default();
        let s = vec![0.5, 1.0, 1.5, 2.0, 2.5];
        let r = check_f1_with(&t, &p, &s).unwrap();
        assert!(r.pass);
        assert_eq!(r.entry("F1_constant").unwrap().values[0], 0.0);
        assert!(check_f2_with(&t, 1.0, 1.0, &s).unwrap().pass);
    }
}
