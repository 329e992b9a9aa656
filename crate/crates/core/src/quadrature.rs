//! Adaptive Gauss-Kronrod quadrature (G10/K21) with helpers for log-scaled
//! and semi-infinite ranges, plus Gauss-Legendre rules for element assembly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of subintervals kept by the global adaptive scheme.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return invalid(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return invalid(format!("abs_tol must be positive, got {}", self.abs_tol));
        }
        if self.max_subdivisions < 1 {
            return invalid("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            error: self.error + o.error,
            evaluations: self.evaluations + o.evaluations,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_805_177_860,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > e {
            e = min_err;
        }
    }
    e
}

/// One 21-point Kronrod panel. Returns (estimate, error) or `None` if the
/// integrand produced a non-finite value.
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Option<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return None;
    }
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jt = 2 * j + 1;
        let x = h * XGK[jt];
        let (f1, f2) = (f(c - x), f(c + x));
        if !(f1.is_finite() && f2.is_finite()) {
            return None;
        }
        fv1[jt] = f1;
        fv2[jt] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jt] * (f1 + f2);
        resabs += WGK[jt] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jt = 2 * j;
        let x = h * XGK[jt];
        let (f1, f2) = (f(c - x), f(c + x));
        if !(f1.is_finite() && f2.is_finite()) {
            return None;
        }
        fv1[jt] = f1;
        fv2[jt] = f2;
        resk += WGK[jt] * (f1 + f2);
        resabs += WGK[jt] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * h;
    let err = rescale_error((resk - resg) * h, resabs * h.abs(), resasc * h.abs());
    Some((result, err))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive integration of `f` over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return invalid(format!("finite limits required, got [{a}, {b}]"));
    }
    if a == b {
        return Ok(Integral::default());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let nonfinite = |x0: f64, x1: f64| Error::Quadrature {
        a: x0,
        b: x1,
        estimate: f64::NAN,
        error: f64::INFINITY,
    };
    let (v, e) = qk21(&f, lo, hi).ok_or_else(|| nonfinite(lo, hi))?;
    let mut evals = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a: lo, b: hi, value: v, error: e });
    let (mut total, mut total_err) = (v, e);
    let (mut frozen_val, mut frozen_err) = (0.0, 0.0);
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::Quadrature { a: lo, b: hi, estimate: sign * total, error: total_err });
        }
        let Some(p) = heap.pop() else {
            break;
        };
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) || (p.b - p.a) <= 1e-14 * p.a.abs().max(p.b.abs()) {
            frozen_val += p.value;
            frozen_err += p.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = qk21(&f, p.a, m).ok_or_else(|| nonfinite(p.a, m))?;
        let (v2, e2) = qk21(&f, m, p.b).ok_or_else(|| nonfinite(m, p.b))?;
        evals += 42;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
    }
    // Re-sum from the panels to shed accumulated update round-off.
    let mut value = frozen_val;
    let mut error = frozen_err;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
    }
    let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
    if error > tol && frozen_err > 0.0 && frozen_err > 0.5 * error {
        return Err(Error::Quadrature { a: lo, b: hi, estimate: sign * value, error });
    }
    Ok(Integral { value: sign * value, error, evaluations: evals })
}

/// Integrates over consecutive breakpoints, summing the pieces.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral> {
    let mut acc = Integral::default();
    for w in points.windows(2) {
        if w[1] > w[0] {
            acc = acc + integrate(&f, w[0], w[1], spec)?;
        }
    }
    Ok(acc)
}

/// Integrates over [a, b] with 0 < a < b in the variable s = ln x; suited to
/// ranges spanning many decades.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    if !(a > 0.0 && b >= a) {
        return invalid(format!("log-scaled integration needs 0 < a <= b, got [{a}, {b}]"));
    }
    integrate(
        |s| {
            let x = s.exp();
            f(x) * x
        },
        a.ln(),
        b.ln(),
        spec,
    )
}

/// Integrates over [a, inf) through x = a + t/(1-t).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            f(a + t / u) / (u * u)
        },
        0.0,
        1.0,
        spec,
    )
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x + 2.0, 0.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_log_singularity() {
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-10);
    }

    #[test]
    fn semi_infinite_power() {
        let r = integrate_to_infinity(|y: f64| y.powi(-4), 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, 1.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn log_scaled_wide_range() {
        let r = integrate_log(|y: f64| 1.0 / y, 1.0, 1e6, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, 1e6_f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(|x| x, 1.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, -0.5, max_relative = 1e-14);
    }

    #[test]
    fn nonfinite_integrand_is_an_error() {
        assert!(integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &QuadratureSpec::default()).is_err()
            || integrate(|x: f64| 1.0 / (x - 0.5).powi(2), 0.0, 1.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn gauss_legendre_moments() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-13);
            let deg = 2 * n - 2;
            let m: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            assert_relative_eq!(m, 2.0 / (deg as f64 + 1.0), max_relative = 1e-12);
        }
    }
}
