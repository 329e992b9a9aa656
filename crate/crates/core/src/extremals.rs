//! The concentrating family u_eps, its norm decomposition, and the
//! bounded/divergent sweep of the exponential functional along it.

use std::f64::consts::{E, PI};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, integrate_log, QuadratureSpec};
use crate::radial::{adams_functional, alpha_beta, Jet, Piece, RadialFunction, SPHERE_AREA};
use crate::weights::WeightProfile;

const CONTINUITY_TOL: f64 = 1e-9;

/// Parameters of u_eps. The integer variant uses eps = 1/n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamsFamilyParams {
    pub epsilon: f64,
    pub beta: f64,
}

impl AdamsFamilyParams {
    pub fn new(epsilon: f64, beta: f64) -> Result<Self> {
        let p = Self { epsilon, beta };
        p.validate()?;
        Ok(p)
    }

    /// eps = 1/n. The piecewise structure needs eps^{1/4} < 1/2, so n >= 17.
    pub fn from_n(n: u64, beta: f64) -> Result<Self> {
        if n < 17 {
            return invalid(format!("n must be at least 17 so that n^(-1/4) < 1/2, got {n}"));
        }
        Self::new(1.0 / n as f64, beta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return invalid(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 16.0) {
            return invalid(format!("epsilon must lie in (0, 1/16) so that eps^(1/4) < 1/2, got {}", self.epsilon));
        }
        Ok(())
    }

    /// log(e^4 / eps).
    pub fn big_log(&self) -> f64 {
        4.0 - self.epsilon.ln()
    }

    /// Inner radius eps^{1/4}.
    pub fn r0(&self) -> f64 {
        self.epsilon.powf(0.25)
    }
}

/// Coefficients of the three pieces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCoefficients {
    pub alpha_beta: f64,
    /// (log(e^4/eps) / alpha_beta)^{(1-beta)/2}
    pub peak: f64,
    /// Coefficient of r^{2(1-beta)} in the inner piece.
    pub b: f64,
    /// Additive constant of the inner piece.
    pub d: f64,
    /// Amplitude of (log(e/r))^{1-beta} in the middle piece.
    pub k: f64,
}

impl FamilyCoefficients {
    pub fn new(params: &AdamsFamilyParams) -> Result<Self> {
        params.validate()?;
        let beta = params.beta;
        let a = alpha_beta(beta)?;
        let l = params.big_log();
        let h = 0.5 * (1.0 - beta);
        let tail = (0.25 * l).powf(0.5 * (1.0 + beta));
        Ok(Self {
            alpha_beta: a,
            peak: (l / a).powf(h),
            b: 1.0 / (2.0 * (0.25 * a * params.epsilon).powf(h) * tail),
            d: 1.0 / (2.0 * (0.25 * a).powf(h) * tail),
            k: (a * l / 16.0).powf(-h),
        })
    }
}

/// Quintic cap on [1/2, 1]: matches value, slope and curvature of the middle
/// piece at 1/2 and vanishes with two derivatives at 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub degree: u32,
    pub start: f64,
    pub support: f64,
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl CapSpec {
    pub fn new(params: &AdamsFamilyParams) -> Result<Self> {
        let c = FamilyCoefficients::new(params)?;
        let m = middle_jet(c.k, params.beta, 0.5);
        Ok(Self { degree: 5, start: 0.5, support: 1.0, value: m.u, slope: m.du, curvature: m.d2u })
    }

    /// eta(1/2) as printed: (log 2e)^{1-beta} / (alpha_beta/16 log(e^4/eps))^{(1-beta)/2}.
    pub fn printed_value(params: &AdamsFamilyParams) -> Result<f64> {
        let a = alpha_beta(params.beta)?;
        let g = 1.0 - params.beta;
        Ok((2.0 * E).ln().powf(g) / (a / 16.0 * params.big_log()).powf(0.5 * g))
    }

    /// eta'(1/2) as printed: -2(1-beta) (log 2e)^{-beta} / (alpha_beta/16 log(e^4/eps))^{(1-beta)/2}.
    pub fn printed_slope(params: &AdamsFamilyParams) -> Result<f64> {
        let a = alpha_beta(params.beta)?;
        let g = 1.0 - params.beta;
        Ok(-2.0 * g * (2.0 * E).ln().powf(-params.beta) / (a / 16.0 * params.big_log()).powf(0.5 * g))
    }

    pub fn jet(&self, r: f64) -> Jet {
        let h = self.support - self.start;
        let t = (r - self.start) / h;
        let (t2, t3, t4, t5) = (t * t, t * t * t, t.powi(4), t.powi(5));
        let h0 = [1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5, -30.0 * t2 + 60.0 * t3 - 30.0 * t4, -60.0 * t + 180.0 * t2 - 120.0 * t3];
        let h1 = [t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5, 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4, -36.0 * t + 96.0 * t2 - 60.0 * t3];
        let h2 = [
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
        ];
        let c = [self.value, self.slope * h, self.curvature * h * h];
        let d = |i: usize| c[0] * h0[i] + c[1] * h1[i] + c[2] * h2[i];
        Jet::new(d(0), d(1) / h, d(2) / (h * h))
    }
}

fn inner_jet(c: &FamilyCoefficients, beta: f64, r: f64) -> Jet {
    let g = 2.0 * (1.0 - beta);
    let rg = r.powf(g);
    if r == 0.0 {
        return Jet::new(c.peak + c.d, 0.0, if g == 2.0 { -2.0 * c.b } else { f64::NAN });
    }
    Jet::new(c.peak - c.b * rg + c.d, -c.b * g * rg / r, -c.b * g * (g - 1.0) * rg / (r * r))
}

fn middle_jet(k: f64, beta: f64, r: f64) -> Jet {
    let g = 1.0 - beta;
    let l = 1.0 - r.ln();
    let u = k * l.powf(g);
    let du = -k * g * l.powf(-beta) / r;
    let d2u = k * g * (l.powf(-beta) - beta * l.powf(-beta - 1.0)) / (r * r);
    Jet::new(u, du, d2u)
}

/// Laplacian of the inner piece, -B g (g + 2) r^{-2 beta} with g = 2(1-beta).
fn inner_laplacian(c: &FamilyCoefficients, beta: f64, r: f64) -> f64 {
    let g = 2.0 * (1.0 - beta);
    -c.b * g * (g + 2.0) * r.powf(-2.0 * beta)
}

/// Laplacian of the middle piece, K(1-beta) r^{-2} l^{-beta} (-beta/l - 2) with l = log(e/r).
fn middle_laplacian(k: f64, beta: f64, r: f64) -> f64 {
    let l = 1.0 - r.ln();
    k * (1.0 - beta) / (r * r) * l.powf(-beta) * (-beta / l - 2.0)
}

/// Builds u_eps with Laplacians obtained by differentiating the value pieces.
pub fn adams_family(params: &AdamsFamilyParams) -> Result<RadialFunction> {
    let c = FamilyCoefficients::new(params)?;
    let cap = CapSpec::new(params)?;
    let beta = params.beta;
    let r0 = params.r0();
    let left = inner_jet(&c, beta, r0);
    let right = middle_jet(c.k, beta, r0);
    for (what, a, b) in [("value", left.u, right.u), ("slope", left.du, right.du)] {
        if (a - b).abs() > CONTINUITY_TOL * a.abs().max(b.abs()) {
            return Err(Error::Construction(format!("{what} mismatch at r = eps^(1/4): {a:e} vs {b:e}")));
        }
    }
    let end = cap.jet(1.0);
    if end.u.abs() + end.du.abs() + end.d2u.abs() > 1e-12 * cap.value.abs() {
        return Err(Error::Construction("cap does not vanish to second order at r = 1".into()));
    }
    let ci = c;
    let cl = c;
    let k = c.k;
    let pieces = vec![
        Piece::with_laplacian(
            0.0,
            r0,
            Arc::new(move |r| inner_jet(&ci, beta, r)),
            Arc::new(move |r| inner_laplacian(&cl, beta, r)),
        ),
        Piece::with_laplacian(
            r0,
            0.5,
            Arc::new(move |r| middle_jet(k, beta, r)),
            Arc::new(move |r| middle_laplacian(k, beta, r)),
        ),
        Piece::new(0.5, 1.0, Arc::new(move |r| cap.jet(r))),
    ];
    RadialFunction::closed(pieces, f64::INFINITY, format!("u_eps(eps={:e}, beta={beta})", params.epsilon))
}

/// Derived and printed Laplacian at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianAudit {
    pub r: f64,
    pub derived: f64,
    pub printed: f64,
    pub relative_gap: f64,
}

/// Compares the Laplacian of the value pieces with the printed closed form,
/// which writes log(1/eps) for log(e^4/eps) and log(1/r) for log(e/r).
pub fn laplacian_audit(params: &AdamsFamilyParams, r: f64) -> Result<LaplacianAudit> {
    let c = FamilyCoefficients::new(params)?;
    let beta = params.beta;
    let g = 1.0 - beta;
    if !(r > 0.0 && r <= 0.5) {
        return invalid(format!("audit radius must lie in (0, 1/2], got {r}"));
    }
    let small_log = -params.epsilon.ln();
    let a = c.alpha_beta;
    let (derived, printed) = if r <= params.r0() {
        let p = -g * (4.0 - 2.0 * beta) * r.powf(-2.0 * beta)
            / ((0.25 * a * params.epsilon).powf(0.5 * g) * (0.25 * small_log).powf(0.5 * (1.0 + beta)));
        (inner_laplacian(&c, beta, r), p)
    } else {
        let lr = -r.ln();
        let p = g / (a / 16.0 * small_log).powf(0.5 * g) * lr.powf(-beta) / (r * r) * (-beta / lr - 2.0);
        (middle_laplacian(c.k, beta, r), p)
    };
    Ok(LaplacianAudit { r, derived, printed, relative_gap: (printed - derived).abs() / derived.abs() })
}

/// Contributions to ||u_eps||^2 on [0, eps^{1/4}], [eps^{1/4}, 1/2], [1/2, 1]
/// and [1, inf) (identically zero: the cap is supported in the unit ball).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDecomposition {
    pub epsilon: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3_inner: f64,
    pub a3_outer: f64,
    pub total: f64,
}

impl NormDecomposition {
    pub fn a3(&self) -> f64 {
        self.a3_inner + self.a3_outer
    }
}

fn check_profile(params: &AdamsFamilyParams, profile: &WeightProfile) -> Result<()> {
    if (profile.beta() - params.beta).abs() > 1e-15 {
        return invalid(format!("weight beta {} differs from family beta {}", profile.beta(), params.beta));
    }
    Ok(())
}

pub fn family_norm_decomposition(
    params: &AdamsFamilyParams,
    profile: &WeightProfile,
    quad: &QuadratureSpec,
) -> Result<NormDecomposition> {
    check_profile(params, profile)?;
    let u = adams_family(params)?;
    let r0 = params.r0();
    let density = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let l = u.laplacian(r);
        SPHERE_AREA * l * l * profile.omega(r) * r.powi(3)
    };
    let a1 = integrate(density, 0.0, r0, quad)?.value;
    let a2 = integrate_log(density, r0, 0.5, quad)?.value;
    let a3_inner = integrate(density, 0.5, 1.0, quad)?.value;
    Ok(NormDecomposition { epsilon: params.epsilon, a1, a2, a3_inner, a3_outer: 0.0, total: a1 + a2 + a3_inner })
}

/// ||u_eps||_beta.
pub fn family_norm(params: &AdamsFamilyParams, profile: &WeightProfile, quad: &QuadratureSpec) -> Result<f64> {
    Ok(family_norm_decomposition(params, profile, quad)?.total.sqrt())
}

/// u_eps / ||u_eps||_beta.
pub fn normalized_family(params: &AdamsFamilyParams, profile: &WeightProfile, quad: &QuadratureSpec) -> Result<RadialFunction> {
    let n = family_norm(params, profile, quad)?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Construction(format!("family norm {n} is not positive")));
    }
    Ok(adams_family(params)?.scaled(1.0 / n))
}

/// Decomposition along an eps-sweep with fitted decay of | ||u_eps||^2 - 1 |.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSweep {
    pub beta: f64,
    pub rows: Vec<NormDecomposition>,
    /// | ||u_eps||^2 - 1 | per row.
    pub corrections: Vec<f64>,
    pub decreasing: bool,
    /// -slope of log|correction| against log log(e/eps^{1/4}).
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
}

pub fn normalization_sweep(
    beta: f64,
    profile: &WeightProfile,
    epsilons: &[f64],
    quad: &QuadratureSpec,
) -> Result<NormalizationSweep> {
    if epsilons.len() < 2 {
        return invalid("sweep needs at least two epsilon values");
    }
    let rows: Vec<NormDecomposition> = epsilons
        .par_iter()
        .map(|&e| family_norm_decomposition(&AdamsFamilyParams::new(e, beta)?, profile, quad))
        .collect::<Result<_>>()?;
    let corrections: Vec<f64> = rows.iter().map(|r| (r.total - 1.0).abs()).collect();
    let decreasing = corrections.windows(2).all(|w| w[1] < w[0]);
    let xs: Vec<f64> = epsilons.iter().map(|e| (1.0 - 0.25 * e.ln()).ln()).collect();
    let ys: Vec<f64> = corrections.iter().map(|c| c.ln()).collect();
    Ok(NormalizationSweep {
        beta,
        rows,
        corrections,
        decreasing,
        fitted_exponent: -least_squares_slope(&xs, &ys),
        predicted_exponent: 1.0 - beta,
    })
}

pub(crate) fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// pi^2/2 eps ((e^4/eps)^{alpha/alpha_beta} - 1).
pub fn blowup_lower_bound(alpha: f64, beta: f64, epsilon: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(epsilon > 0.0) {
        return invalid("alpha and epsilon must be positive");
    }
    let a = alpha_beta(beta)?;
    Ok(0.5 * PI * PI * epsilon * (alpha / a * (4.0 - epsilon.ln())).exp_m1())
}

/// The same bound with the peak of u_eps divided by ||u_eps||: the
/// exponent becomes alpha log(e^4/eps) / (alpha_beta ||u_eps||^{2/(1-beta)}).
pub fn normalized_blowup_bound(alpha: f64, beta: f64, epsilon: f64, norm: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(epsilon > 0.0) || !(norm > 0.0) {
        return invalid("alpha, epsilon and norm must be positive");
    }
    let a = alpha_beta(beta)?;
    let s = norm.powf(2.0 / (1.0 - beta));
    Ok(0.5 * PI * PI * epsilon * (alpha / (a * s) * (4.0 - epsilon.ln())).exp_m1())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Bounded,
    Divergent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "BOUNDED",
            Verdict::Divergent => "DIVERGENT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub epsilon: f64,
    pub norm: f64,
    pub functional_value: f64,
    pub lower_bound: f64,
    pub normalized_lower_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaVerdict {
    pub alpha: f64,
    pub ratio: f64,
    pub verdict: Verdict,
    /// Verdict the sharp constant predicts: BOUNDED iff alpha <= alpha_beta.
    pub expected: Verdict,
    pub growth: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub beta: f64,
    pub alpha_beta: f64,
    pub epsilons: Vec<f64>,
    pub cells: Vec<SweepCell>,
    pub verdicts: Vec<AlphaVerdict>,
}

impl SweepReport {
    pub fn verdict(&self, alpha: f64) -> Option<Verdict> {
        self.verdicts.iter().find(|v| v.alpha == alpha).map(|v| v.verdict)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict == Verdict::Inconclusive)
    }

    pub fn matches_dichotomy(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict == v.expected)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["alpha", "epsilon", "functional_value", "lower_bound", "verdict"])?;
        for c in &self.cells {
            let v = self.verdict(c.alpha).map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                format!("{:e}", c.alpha),
                format!("{:e}", c.epsilon),
                format!("{:e}", c.functional_value),
                format!("{:e}", c.lower_bound),
                v,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        crate::io::write_atomic(path, &bytes)
    }
}

/// Plateau ratio separating BOUNDED from growing sequences.
const PLATEAU_RATIO: f64 = 2.0;

fn classify(values: &[f64], bounds: &[f64]) -> (Verdict, f64, String) {
    let first = values[0];
    let last = values[values.len() - 1];
    let growth = if last.is_infinite() { f64::INFINITY } else { last / first };
    if values.iter().all(|v| v.is_finite()) && growth <= PLATEAU_RATIO {
        return (Verdict::Bounded, growth, format!("last/first = {growth:.4} <= {PLATEAU_RATIO}"));
    }
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let dominated = values.iter().zip(bounds).all(|(v, b)| v >= b);
    if monotone && growth > PLATEAU_RATIO && dominated {
        return (Verdict::Divergent, growth, format!("monotone growth, last/first = {growth:.4e}, every value above the blow-up bound"));
    }
    let why = match (monotone, dominated) {
        (false, _) => "growth is not monotone",
        (true, false) => "values grow but fall below the blow-up bound",
        _ => "undetermined",
    };
    (Verdict::Inconclusive, growth, format!("last/first = {growth:.4e}; {why}"))
}

/// Evaluates the functional along the normalized family for every (alpha, eps).
pub fn dichotomy_sweep(
    alphas: &[f64],
    beta: f64,
    profile: &WeightProfile,
    epsilons: &[f64],
    quad: &QuadratureSpec,
) -> Result<SweepReport> {
    if alphas.is_empty() || epsilons.is_empty() {
        return invalid("alpha and epsilon lists must be non-empty");
    }
    if alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return invalid("alpha values must be positive and finite");
    }
    if (profile.beta() - beta).abs() > 1e-15 {
        return invalid(format!("weight beta {} differs from sweep beta {beta}", profile.beta()));
    }
    let a_beta = alpha_beta(beta)?;
    let families: Vec<(f64, f64, RadialFunction)> = epsilons
        .par_iter()
        .map(|&e| {
            let p = AdamsFamilyParams::new(e, beta)?;
            let n = family_norm(&p, profile, quad)?;
            Ok((e, n, adams_family(&p)?.scaled(1.0 / n)))
        })
        .collect::<Result<_>>()?;
    let grid: Vec<(f64, usize)> = alphas.iter().flat_map(|&a| (0..families.len()).map(move |i| (a, i))).collect();
    let cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(alpha, i)| {
            let (e, n, u) = &families[i];
            let v = adams_functional(u, alpha, beta, quad)?;
            Ok(SweepCell {
                alpha,
                epsilon: *e,
                norm: *n,
                functional_value: v.value,
                lower_bound: blowup_lower_bound(alpha, beta, *e)?,
                normalized_lower_bound: normalized_blowup_bound(alpha, beta, *e, *n)?,
            })
        })
        .collect::<Result<_>>()?;
    let m = families.len();
    let verdicts = alphas
        .iter()
        .enumerate()
        .map(|(j, &alpha)| {
            let row = &cells[j * m..(j + 1) * m];
            let values: Vec<f64> = row.iter().map(|c| c.functional_value).collect();
            let bounds: Vec<f64> = row.iter().map(|c| c.lower_bound).collect();
            let (verdict, growth, detail) = classify(&values, &bounds);
            let expected = if alpha <= a_beta { Verdict::Bounded } else { Verdict::Divergent };
            AlphaVerdict { alpha, ratio: alpha / a_beta, verdict, expected, growth, detail }
        })
        .collect();
    Ok(SweepReport { beta, alpha_beta: a_beta, epsilons: epsilons.to_vec(), cells, verdicts })
}

/// Default eps-sweep.
pub const DEFAULT_EPSILONS: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn printed_cap_data_match_middle_piece() {
        for beta in [0.25, 0.5, 0.75] {
            let p = AdamsFamilyParams::new(1e-4, beta).unwrap();
            let cap = CapSpec::new(&p).unwrap();
            assert_relative_eq!(cap.value, CapSpec::printed_value(&p).unwrap(), max_relative = 1e-12);
            assert_relative_eq!(cap.slope, CapSpec::printed_slope(&p).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn peak_value() {
        let p = AdamsFamilyParams::new(1e-4, 0.5).unwrap();
        let c = FamilyCoefficients::new(&p).unwrap();
        let u = adams_family(&p).unwrap();
        assert_relative_eq!(u.value(0.0), c.peak + c.d, max_relative = 1e-15);
        assert_relative_eq!(u.value(p.r0()), c.peak, max_relative = 1e-12);
    }

    #[test]
    fn cap_vanishes_at_one() {
        let p = AdamsFamilyParams::new(1e-6, 0.5).unwrap();
        let u = adams_family(&p).unwrap();
        assert_eq!(u.value(1.5), 0.0);
        assert!(u.value(1.0).abs() < 1e-15);
    }

    #[test]
    fn small_n_rejected() {
        assert!(AdamsFamilyParams::from_n(16, 0.5).is_err());
        let a = AdamsFamilyParams::from_n(10_000, 0.5).unwrap();
        assert_eq!(a.epsilon, 1e-4);
    }

    #[test]
    fn blowup_bound_points() {
        let a = alpha_beta(0.5).unwrap();
        let b = blowup_lower_bound(a, 0.5, 1e-4).unwrap();
        assert_relative_eq!(b, 0.5 * PI * PI * 1e-4 * (E.powi(4) * 1e4 - 1.0), max_relative = 1e-12);
        assert!(blowup_lower_bound(a, 0.5, E.powi(4)).unwrap().abs() < 1e-12);
    }
}
