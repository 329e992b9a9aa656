use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nonlinearity::m_star;

use super::config::SolveConfig;
use super::fem::{FemSpace, MeshSpec};
use super::mountain_pass::{certify, resolve_from, Certificates, SolveReport};
use super::problem::Problem;

/// Outcome of a re-solve on a modified discretization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolveCheck {
    pub m_num: f64,
    pub residual: f64,
    pub converged: bool,
    pub relative_change: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationCertificate {
    /// |<u, v>_beta - int f(u) v| / (||u|| ||v||) per test direction.
    pub weak_defects: Vec<f64>,
    pub max_weak_defect: f64,
    pub weak_ok: bool,
    /// Flags recomputed with twice the Gauss points per element.
    pub recomputed: Certificates,
    pub m_recomputed: f64,
    pub nontrivial_ok: bool,
    pub refinement: Option<ResolveCheck>,
    pub extension: Option<ResolveCheck>,
    pub certified: bool,
    pub diagnostics: Vec<String>,
}

/// Smooth signed test function: a random signed sum of Gaussians.
pub(crate) fn random_signed_direction(space: &FemSpace, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let k = rng.gen_range(2..=4);
    let terms: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.2..4.0))).collect();
    space.interpolate(|r| {
        terms.iter().fold((0.0, 0.0), |(u, d), &(a, w)| {
            let e = a * (-(r / w).powi(2)).exp();
            (u + e, d - 2.0 * r / (w * w) * e)
        })
    })
}

/// Relative weak-identity defects of c against the given directions.
pub fn weak_defects(problem: &Problem, c: &DVector<f64>, directions: &[DVector<f64>]) -> Vec<f64> {
    let res = problem.residual(c);
    let nu = problem.norm(c);
    directions
        .iter()
        .map(|v| {
            let d = res.dot(v).abs() / (nu * problem.norm(v));
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
        .collect()
}

fn resolve_check(report: &SolveReport, config: &SolveConfig, mesh: MeshSpec) -> Result<ResolveCheck> {
    let mut cfg = SolveConfig { mesh, ..config.clone() };
    cfg.verify.extended_radius = cfg.verify.extended_radius.max(2.0 * mesh.radius);
    let (m, residual, converged) = resolve_from(&report.solution, &cfg)?;
    let relative_change = (m - report.m_num).abs() / report.m_num.abs();
    let ok = converged && relative_change <= config.verify.refinement_tolerance;
    Ok(ResolveCheck { m_num: m, residual, converged, relative_change, ok })
}

/// Independent re-check of a solve: weak identity against seeded random
/// directions, certificate flags at doubled quadrature order, and re-solves
/// on a refined mesh and on an extended domain.
pub fn verify_solution(report: &SolveReport, config: &SolveConfig) -> Result<VerificationCertificate> {
    config.validate()?;
    let mut diagnostics = Vec::new();
    let ms = m_star(config.growth.alpha, config.growth.beta)?;

    let problem = Problem::new(&config.mesh, &config.weight, &config.growth)?;
    let c = report.solution.coefficients(problem.space())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let dirs: Vec<DVector<f64>> =
        (0..config.verify.test_directions).map(|_| random_signed_direction(problem.space(), &mut rng)).collect();
    let weak = weak_defects(&problem, &c, &dirs);
    let max_weak_defect = weak.iter().copied().fold(0.0, f64::max);
    let weak_ok = max_weak_defect <= config.verify.weak_tolerance;
    if !weak_ok {
        diagnostics.push(format!("weak identity defect {max_weak_defect:e} exceeds {:e}", config.verify.weak_tolerance));
    }

    let fine = MeshSpec { gauss_points: 2 * config.mesh.gauss_points, ..config.mesh };
    let fine_problem = Problem::new(&fine, &config.weight, &config.growth)?;
    let cf = report.solution.coefficients(fine_problem.space())?;
    let (recomputed, m_recomputed, _, _) = certify(&fine_problem, &cf, report.geometry.ok, ms);
    let nontrivial_ok = m_recomputed > 0.0 && problem.norm(&c) > 0.0;
    if !nontrivial_ok {
        diagnostics.push("trivial state: level is not positive".into());
    }
    for (flag, name) in [
        (recomputed.geometry_ok, "geometry"),
        (recomputed.level_below_mstar, "level window (0, m*)"),
        (recomputed.nonneg_ok, "nonnegativity"),
        (recomputed.nehari_ok, "Nehari identity"),
    ] {
        if !flag {
            diagnostics.push(format!("{name} check fails at doubled quadrature order"));
        }
    }

    let (refinement, extension) = if report.converged && nontrivial_ok {
        let refined = resolve_check(report, config, config.mesh.refined())?;
        let extended = resolve_check(report, config, MeshSpec { radius: config.verify.extended_radius, ..config.mesh })?;
        for (chk, name) in [(&refined, "mesh refinement"), (&extended, "domain extension")] {
            if !chk.ok {
                diagnostics.push(format!(
                    "{name}: level {} (change {:.3e}, converged {})",
                    chk.m_num, chk.relative_change, chk.converged
                ));
            }
        }
        (Some(refined), Some(extended))
    } else {
        if !report.converged {
            diagnostics.push(format!("solve did not converge (residual {:e})", report.residual));
        }
        (None, None)
    };

    let certified = report.converged
        && weak_ok
        && nontrivial_ok
        && recomputed.all()
        && refinement.is_some_and(|r| r.ok)
        && extension.is_some_and(|r| r.ok);
    Ok(VerificationCertificate {
        weak_defects: weak,
        max_weak_defect,
        weak_ok,
        recomputed,
        m_recomputed,
        nontrivial_ok,
        refinement,
        extension,
        certified,
        diagnostics,
    })
}

/// Worst relative mismatch between central differences of the energy and
/// <gradient, v>_beta over random states and directions.
pub fn gradient_check(problem: &Problem, states: usize, h: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..states)
        .map(|_| {
            let u = random_signed_direction(problem.space(), &mut rng) * rng.gen_range(0.5..2.0);
            let v = random_signed_direction(problem.space(), &mut rng);
            let v = &v / problem.norm(&v);
            let fd = (problem.energy(&(&u + &v * h)) - problem.energy(&(&u - &v * h))) / (2.0 * h);
            let exact = problem.inner(&problem.gradient(&u), &v);
            (fd - exact).abs() / exact.abs().max(1e-12)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{mountain_pass_solve, Profile};

    #[test]
    fn zero_state_is_not_certified() {
        let cfg = SolveConfig::default();
        let report = mountain_pass_solve(&SolveConfig { mode: super::super::SolveMode::Nehari, ..cfg.clone() }).unwrap();
        let problem = Problem::new(&cfg.mesh, &cfg.weight, &cfg.growth).unwrap();
        let zero = Profile::from_state(problem.space(), &DVector::zeros(problem.ndof()));
        let fake = SolveReport { solution: zero, m_num: 0.0, ..report };
        let cert = verify_solution(&fake, &cfg).unwrap();
        assert!(!cert.nontrivial_ok);
        assert!(!cert.certified);
    }

    #[test]
    fn gradient_matches_differences() {
        let cfg = SolveConfig::default();
        let problem = Problem::new(&cfg.mesh, &cfg.weight, &cfg.growth).unwrap();
        for e in gradient_check(&problem, 5, 1e-4, 3) {
            assert!(e < 1e-4, "{e}");
        }
    }
}
