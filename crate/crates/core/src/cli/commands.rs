use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{random_corpus, FunctionSpec, Term};
use crate::error::{invalid, Error, Result};
use crate::extremals::{dichotomy_sweep, SweepReport, DEFAULT_EPSILONS};
use crate::io::write_atomic;
use crate::radial::{
    adams_functional, adams_functional_series, alpha_beta, concentration_limit_pbeta, lp_norm, sup_abs, weighted_seminorm,
};
use crate::radial_lemma::{half_space_transform_check, verify_radial_lemma, MarginReport};
use crate::report::ConditionReport;
use crate::solver::{mountain_pass_solve, verify_solution, SolveConfig, SolveReport, VerificationCertificate};
use crate::weights::{check_a2, check_growth_conditions_d, check_structural_conditions, default_ball_suite, BallSample};

use super::{write_json, Command, Exit, Outcome, RunConfig};

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<std::path::PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, &csv_bytes(header, rows)?)?;
    Ok(path)
}

// check-weight

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckWeightParams {
    /// Upper end of the sampled range for the chi suprema.
    pub r_max: f64,
    /// Largest order k in the D-conditions.
    pub k_max: usize,
    /// Balls for the A2 product; empty means the built-in suite.
    pub balls: Vec<BallSample>,
}

impl Default for CheckWeightParams {
    fn default() -> Self {
        Self { r_max: 1e6, k_max: 12, balls: Vec::new() }
    }
}

#[derive(Serialize)]
struct CheckWeightReport<'a> {
    config: &'a RunConfig,
    pass: bool,
    structural: ConditionReport,
    a2: ConditionReport,
    growth: ConditionReport,
}

/// Structural, A2 and D-condition certificates for the configured weight.
pub fn cmd_check_weight(run: &RunConfig) -> Result<Outcome> {
    run.check_command(Command::CheckWeight)?;
    run.quad.validate()?;
    let params: CheckWeightParams = run.params()?;
    let balls = if params.balls.is_empty() { default_ball_suite() } else { params.balls.clone() };
    let structural = check_structural_conditions(&run.weight, &run.quad, params.r_max)?;
    let a2 = check_a2(&run.weight, &balls, &run.quad)?;
    let growth = check_growth_conditions_d(&run.weight, params.k_max, &run.quad)?;
    let pass = structural.pass && a2.pass && growth.pass;
    let failed: Vec<String> = [&structural, &a2, &growth]
        .iter()
        .flat_map(|r| r.entries.iter().filter(|e| !e.pass).map(|e| e.name.clone()))
        .collect();
    let config = run.resolved(Command::CheckWeight, &params)?;
    let report = CheckWeightReport { config: &config, pass, structural, a2, growth };
    let file = write_json(&run.out_dir(), "check_weight.json", &report)?;
    let summary = if pass { "all weight conditions hold".to_string() } else { format!("failed: {}", failed.join(", ")) };
    Ok(Outcome { exit: if pass { Exit::Pass } else { Exit::ConditionFail }, summary, files: vec![file] })
}

// dichotomy

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DichotomyParams {
    /// Exponents as multiples of alpha_beta.
    pub alpha_factors: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl Default for DichotomyParams {
    fn default() -> Self {
        Self { alpha_factors: vec![0.9, 1.0, 1.2], epsilons: DEFAULT_EPSILONS.to_vec() }
    }
}

#[derive(Serialize)]
struct DichotomyOutput<'a> {
    config: &'a RunConfig,
    sweep: &'a SweepReport,
    matches: bool,
}

/// Extremal-family sweep across the configured multiples of alpha_beta.
pub fn cmd_dichotomy(run: &RunConfig) -> Result<Outcome> {
    run.check_command(Command::Dichotomy)?;
    run.quad.validate()?;
    let params: DichotomyParams = run.params()?;
    if params.alpha_factors.is_empty() {
        return invalid("alpha list is empty");
    }
    let beta = run.weight.beta();
    let a_beta = alpha_beta(beta)?;
    let alphas: Vec<f64> = params.alpha_factors.iter().map(|f| f * a_beta).collect();
    let sweep = dichotomy_sweep(&alphas, beta, &run.weight, &params.epsilons, &run.quad)?;
    let dir = run.out_dir();
    let csv = dir.join("dichotomy.csv");
    sweep.write_csv(&csv)?;
    let matches = sweep.matches_dichotomy();
    let config = run.resolved(Command::Dichotomy, &params)?;
    let json = write_json(&dir, "dichotomy.json", &DichotomyOutput { config: &config, sweep: &sweep, matches })?;
    let verdicts: Vec<String> =
        sweep.verdicts.iter().zip(&params.alpha_factors).map(|(v, f)| format!("{f}*alpha_beta: {}", v.verdict)).collect();
    let exit = if sweep.any_inconclusive() {
        Exit::Inconclusive
    } else if matches {
        Exit::Pass
    } else {
        Exit::ConditionFail
    };
    Ok(Outcome { exit, summary: verdicts.join("; "), files: vec![csv, json] })
}

// solve

#[derive(Serialize)]
struct SolveOutput<'a> {
    config: &'a RunConfig,
    certified: bool,
    report: &'a SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<&'a VerificationCertificate>,
}

/// Mountain-pass solve followed by independent verification.
pub fn cmd_solve(run: &RunConfig) -> Result<Outcome> {
    run.check_command(Command::Solve)?;
    if let Some(w) = run.params.get("weight") {
        if serde_json::from_value::<crate::weights::WeightProfile>(w.clone())? != run.weight {
            return invalid("the weight is set at the top level of the config, not inside params");
        }
    }
    let mut cfg: SolveConfig = run.params()?;
    cfg.weight = run.weight.clone();
    cfg.seed = run.seed;
    cfg.validate()?;
    let report = mountain_pass_solve(&cfg)?;
    let verification = if report.converged { Some(verify_solution(&report, &cfg)?) } else { None };
    let dir = run.out_dir();
    let mut files = Vec::new();
    let s = &report.solution;
    files.push(write_csv(
        &dir,
        "solution.csv",
        &["r", "u", "laplacian"],
        (0..s.r.len()).map(|i| vec![format!("{:e}", s.r[i]), format!("{:e}", s.u[i]), format!("{:e}", s.laplacian[i])]),
    )?);
    if !report.converged {
        files.push(write_csv(
            &dir,
            "trace.csv",
            &["iteration", "stage", "energy", "gradient_norm", "norm"],
            report.trace.iter().map(|t| {
                vec![
                    t.iteration.to_string(),
                    serde_json::to_value(t.stage).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    format!("{:e}", t.energy),
                    format!("{:e}", t.gradient_norm),
                    format!("{:e}", t.norm),
                ]
            }),
        )?);
    }
    let certified = report.certified() && verification.as_ref().is_some_and(|v| v.certified);
    let config = run.resolved(Command::Solve, &cfg)?;
    files.insert(
        0,
        write_json(&dir, "solve.json", &SolveOutput { config: &config, certified, report: &report, verification: verification.as_ref() })?,
    );
    let (exit, summary) = if !report.converged {
        (
            Exit::NonConvergence,
            format!(
                "no convergence after {} iterations (residual {:e}); trace in {}",
                report.iterations,
                report.residual,
                files[2].display()
            ),
        )
    } else {
        let mut msg = format!("m_num = {:.6} (m* = {:.6}), residual {:e}", report.m_num, report.m_star, report.residual);
        if let Some(v) = &verification {
            for d in &v.diagnostics {
                msg.push_str("; ");
                msg.push_str(d);
            }
        }
        (if certified { Exit::Pass } else { Exit::ConditionFail }, msg)
    };
    Ok(Outcome { exit, summary, files })
}

// radial-lemma

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialLemmaParams {
    /// Size of the seeded random corpus.
    pub corpus_size: usize,
    /// Extra functions checked after the corpus.
    pub functions: Vec<FunctionSpec>,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    /// Points s in (0, 1] for the half-space transform identity.
    pub transform_samples: Vec<f64>,
}

impl Default for RadialLemmaParams {
    fn default() -> Self {
        Self {
            corpus_size: 20,
            functions: Vec::new(),
            radii: vec![1.0, 2.0, 5.0, 10.0, 1e2, 1e3],
            tolerance: 1e-8,
            transform_samples: vec![0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9],
        }
    }
}

#[derive(Serialize)]
struct RadialLemmaOutput<'a> {
    config: &'a RunConfig,
    pass: bool,
    min_margin: f64,
    /// Max relative residual of the transform identity per function.
    transform_residuals: Vec<f64>,
    reports: &'a [MarginReport],
}

/// Pointwise radial bound on a seeded corpus plus user functions.
pub fn cmd_radial_lemma(run: &RunConfig) -> Result<Outcome> {
    run.check_command(Command::RadialLemma)?;
    run.quad.validate()?;
    let params: RadialLemmaParams = run.params()?;
    let mut specs = random_corpus(params.corpus_size, run.seed);
    specs.extend(params.functions.iter().cloned());
    if specs.is_empty() {
        return invalid("no functions to check");
    }
    let functions: Vec<_> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let label =
                if i < params.corpus_size { format!("corpus[{i}]") } else { format!("user[{}]", i - params.corpus_size) };
            s.build(label)
        })
        .collect::<Result<_>>()?;
    let reports: Vec<MarginReport> = functions
        .iter()
        .map(|u| verify_radial_lemma(u, &run.weight, &params.radii, params.tolerance, &run.quad))
        .collect::<Result<_>>()?;
    let transform_residuals: Vec<f64> = if params.transform_samples.is_empty() {
        Vec::new()
    } else {
        functions.iter().map(|u| half_space_transform_check(u, &params.transform_samples)).collect::<Result<_>>()?
    };
    let pass = reports.iter().all(|r| r.pass);
    let min_margin = reports.iter().map(|r| r.min_margin).fold(f64::INFINITY, f64::min);
    let dir = run.out_dir();
    let csv = dir.join("radial_lemma.csv");
    MarginReport::write_csv(&reports, &csv)?;
    let config = run.resolved(Command::RadialLemma, &params)?;
    let json = write_json(
        &dir,
        "radial_lemma.json",
        &RadialLemmaOutput { config: &config, pass, min_margin, transform_residuals, reports: &reports },
    )?;
    let failing = reports.iter().filter(|r| !r.pass).count();
    let summary = format!("{} functions, {failing} failing, min margin {min_margin:e}", reports.len());
    Ok(Outcome { exit: if pass { Exit::Pass } else { Exit::ConditionFail }, summary, files: vec![csv, json] })
}

// norms

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsParams {
    pub functions: Vec<FunctionSpec>,
    /// Exponents for the L^p norms.
    pub p_values: Vec<f64>,
    /// Adams exponent as a multiple of alpha_beta.
    pub alpha_factor: f64,
    /// Terms K of the truncated exponential series.
    pub series_terms: usize,
}

impl Default for NormsParams {
    fn default() -> Self {
        Self {
            functions: vec![
                FunctionSpec { terms: vec![Term::Gaussian { amplitude: 0.2, width: 1.0 }], decay: None },
                FunctionSpec { terms: vec![Term::Rational { amplitude: 0.1, width: 1.5, power: 2.0 }], decay: None },
            ],
            p_values: vec![2.0, 4.0, 6.0],
            alpha_factor: 1.0,
            series_terms: 40,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct NormsRow {
    label: String,
    seminorm: f64,
    sup: f64,
    lp: Vec<(f64, f64)>,
    alpha: f64,
    adams: f64,
    adams_error: f64,
    series: f64,
    series_tail_bound: f64,
    series_gap: f64,
    consistent: bool,
    /// P_beta(u), reported when the seminorm is at most one.
    p_beta: Option<f64>,
}

#[derive(Serialize)]
struct NormsOutput<'a> {
    config: &'a RunConfig,
    rows: &'a [NormsRow],
}

/// Seminorm, L^p norms, Adams functional and its series for each function.
pub fn cmd_norms(run: &RunConfig) -> Result<Outcome> {
    run.check_command(Command::Norms)?;
    run.quad.validate()?;
    let params: NormsParams = run.params()?;
    if params.functions.is_empty() {
        return invalid("no functions given");
    }
    if !(params.alpha_factor > 0.0) {
        return invalid("alpha_factor must be positive");
    }
    let beta = run.weight.beta();
    let alpha = params.alpha_factor * alpha_beta(beta)?;
    let rows: Vec<NormsRow> = params
        .functions
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let u = spec.build(format!("f[{i}]"))?;
            let seminorm = weighted_seminorm(&u, &run.weight, &run.quad)?;
            let lp = params.p_values.iter().map(|&p| Ok((p, lp_norm(&u, p, beta, &run.quad)?.value))).collect::<Result<_>>()?;
            let a = adams_functional(&u, alpha, beta, &run.quad)?;
            let s = adams_functional_series(&u, alpha, beta, params.series_terms, &run.quad)?;
            let gap = (a.value - s.value).abs();
            let p_beta = if seminorm <= 1.0 { Some(concentration_limit_pbeta(seminorm, beta)?) } else { None };
            Ok(NormsRow {
                label: u.label().to_string(),
                seminorm,
                sup: sup_abs(&u),
                lp,
                alpha,
                adams: a.value,
                adams_error: a.error,
                series: s.value,
                series_tail_bound: s.tail_bound,
                series_gap: gap,
                consistent: gap <= s.tail_bound + 1e-8,
                p_beta,
            })
        })
        .collect::<Result<_>>()?;
    let dir = run.out_dir();
    let config = run.resolved(Command::Norms, &params)?;
    let json = write_json(&dir, "norms.json", &NormsOutput { config: &config, rows: &rows })?;
    let csv = write_csv(
        &dir,
        "norms.csv",
        &["function", "seminorm", "sup", "adams", "series", "series_tail_bound", "consistent"],
        rows.iter().map(|r| {
            vec![
                r.label.clone(),
                format!("{:e}", r.seminorm),
                format!("{:e}", r.sup),
                format!("{:e}", r.adams),
                format!("{:e}", r.series),
                format!("{:e}", r.series_tail_bound),
                r.consistent.to_string(),
            ]
        }),
    )?;
    let ok = rows.iter().all(|r| r.consistent);
    let summary = format!("{} functions, series consistent: {ok}", rows.len());
    Ok(Outcome { exit: if ok { Exit::Pass } else { Exit::ConditionFail }, summary, files: vec![json, csv] })
}
