use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::m_star;
use crate::radial::alpha_beta;

use super::config::{SolveConfig, SolveMode};
use super::fem::FemSpace;
use super::problem::Problem;

const STALL_DROP: f64 = 1e-6;
/// Moves per path point without a new minimum of the path maximum.
const STALL_SWEEPS: usize = 4;

/// Nodal description of a discrete state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub laplacian: Vec<f64>,
}

impl Profile {
    pub fn from_state(space: &FemSpace, c: &DVector<f64>) -> Self {
        let r = space.nodes().to_vec();
        let laplacian = r.iter().map(|&x| space.evaluate(c, x)[3]).collect();
        Self { u: space.nodal_values(c), du: space.nodal_slopes(c), laplacian, r }
    }

    /// Coefficients on a space with the same nodes.
    pub fn coefficients(&self, space: &FemSpace) -> Result<DVector<f64>> {
        if space.nodes().len() != self.r.len() || space.nodes().iter().zip(&self.r).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::Discretization("profile nodes differ from the mesh".into()));
        }
        Ok(space.from_nodal(&self.u, &self.du))
    }

    /// Cubic Hermite evaluation (u, u') at r; past the last node the end
    /// value continues as u(R) (R/r)^2.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.r.len();
        if x >= self.r[n - 1] {
            let k = self.u[n - 1] * self.r[n - 1].powi(2);
            return (k / (x * x), -2.0 * k / x.powi(3));
        }
        let e = self.r.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let (a, b) = (self.r[e], self.r[e + 1]);
        let h = b - a;
        let t = (x - a) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (1.0 - 3.0 * t2 + 2.0 * t3) * self.u[e]
            + h * (t - 2.0 * t2 + t3) * self.du[e]
            + (3.0 * t2 - 2.0 * t3) * self.u[e + 1]
            + h * (-t2 + t3) * self.du[e + 1];
        let d = ((-6.0 * t + 6.0 * t2) * self.u[e]
            + h * (1.0 - 4.0 * t + 3.0 * t2) * self.du[e]
            + (6.0 * t - 6.0 * t2) * self.u[e + 1]
            + h * (-2.0 * t + 3.0 * t2) * self.du[e + 1])
            / h;
        (v, d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryProbe {
    /// (alpha_beta / (alpha (1 + q)))^{(1-beta)/2}.
    pub rho0_analytic: f64,
    /// Radius at which tau was measured (halved from the analytic one if needed).
    pub rho0: f64,
    pub halvings: u32,
    pub tau: f64,
    pub e0_scale: f64,
    pub e0_energy: f64,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Descent,
    Newton,
    Polish,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub stage: Stage,
    pub energy: f64,
    pub gradient_norm: f64,
    pub norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub geometry_ok: bool,
    pub level_below_mstar: bool,
    pub nonneg_ok: bool,
    pub nehari_ok: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.geometry_ok && self.level_below_mstar && self.nonneg_ok && self.nehari_ok
    }
}

/// Observational record of the norms visited against (alpha_beta/alpha)^{(1-beta)/2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsDiagnostics {
    pub threshold: f64,
    pub max_norm: f64,
    pub near_threshold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: SolveMode,
    pub converged: bool,
    pub m_num: f64,
    pub m_star: f64,
    pub residual: f64,
    pub norm: f64,
    pub nehari_defect: f64,
    pub min_nodal_value: f64,
    pub truncated: bool,
    pub certificates: Certificates,
    pub geometry: GeometryProbe,
    pub iterations: usize,
    /// Energies along the final path: the deformed path, or once converged the
    /// ray 0 -> u followed by the segment u -> e0.
    pub path_energies: Vec<f64>,
    pub path_unimodal: bool,
    pub ps: PsDiagnostics,
    pub trace: Vec<TraceRow>,
    pub solution: Profile,
}

impl SolveReport {
    pub fn certified(&self) -> bool {
        self.converged && self.certificates.all()
    }
}

/// Nonnegative Gaussian sums exp(-(r/w)^2) with random weights and widths.
pub(crate) fn random_positive_direction(space: &FemSpace, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let k = rng.gen_range(1..=3);
    let terms: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(0.2..3.0))).collect();
    space.interpolate(|r| {
        terms.iter().fold((0.0, 0.0), |(u, d), &(a, w)| {
            let e = a * (-(r / w).powi(2)).exp();
            (u + e, d - 2.0 * r / (w * w) * e)
        })
    })
}

pub(crate) fn gaussian(space: &FemSpace, width: f64) -> DVector<f64> {
    space.interpolate(|r| {
        let e = (-(r / width).powi(2)).exp();
        (e, -2.0 * r / (width * width) * e)
    })
}

/// rho0 from the explicit bound, tau as the least energy on ||u|| = rho0 over
/// random nonnegative directions, and e0 = t * direction with t doubled until
/// the energy is negative.
pub fn mountain_pass_geometry_probe(
    problem: &Problem,
    config: &SolveConfig,
    direction: &DVector<f64>,
) -> Result<(GeometryProbe, DVector<f64>)> {
    let n = problem.norm(direction);
    if !(n > 0.0) {
        return Err(Error::InvalidParameter("probe direction must be nonzero".into()));
    }
    let g = &config.growth;
    let a = alpha_beta(g.beta)?;
    let rho0_analytic = (a / (g.alpha * (1.0 + g.q))).powf(0.5 * (1.0 - g.beta));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut dirs: Vec<DVector<f64>> = (0..config.probe_directions).map(|_| random_positive_direction(problem.space(), &mut rng)).collect();
    dirs.push(direction.clone());
    let unit: Vec<DVector<f64>> = dirs.iter().map(|d| d / problem.norm(d)).collect();
    let tau_at = |rho: f64| unit.par_iter().map(|d| problem.energy(&(d * rho))).reduce(|| f64::INFINITY, f64::min);
    let mut rho0 = rho0_analytic;
    let mut halvings = 0;
    let mut tau = tau_at(rho0);
    while !(tau > 0.0) && halvings < 20 {
        rho0 *= 0.5;
        halvings += 1;
        tau = tau_at(rho0);
    }
    let mut t = 1.0;
    let mut e = problem.energy(&(direction * t));
    let mut doublings = 0;
    while !(e < 0.0) && doublings < 60 {
        t *= 2.0;
        e = problem.energy(&(direction * t));
        doublings += 1;
    }
    let ok = halvings == 0 && tau > 0.0 && e < 0.0;
    Ok((GeometryProbe { rho0_analytic, rho0, halvings, tau, e0_scale: t, e0_energy: e, ok }, direction * t))
}

/// Maximizer t > 0 of I(t v), found from the sign change of d/dt I(t v).
pub(crate) fn nehari_scale(problem: &Problem, v: &DVector<f64>) -> Option<f64> {
    let nv = problem.inner(v, v);
    let dphi = |t: f64| {
        let b = problem.load(&(v * t));
        t * nv - b.dot(v)
    };
    let neg = |t: f64| {
        let d = dphi(t);
        !d.is_finite() || d <= 0.0
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    if neg(1.0) {
        while neg(lo) {
            lo *= 0.5;
            if lo < 1e-30 {
                return None;
            }
        }
        hi = 2.0 * lo;
    } else {
        while !neg(hi) {
            hi *= 2.0;
            if hi > 1e30 {
                return None;
            }
        }
        lo = 0.5 * hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if neg(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

struct Run<'a> {
    problem: &'a Problem,
    config: &'a SolveConfig,
    trace: Vec<TraceRow>,
    iterations: usize,
    max_norm: f64,
}

impl<'a> Run<'a> {
    fn record(&mut self, stage: Stage, c: &DVector<f64>, energy: f64, grad: f64) {
        let norm = self.problem.norm(c);
        self.max_norm = self.max_norm.max(norm);
        self.trace.push(TraceRow { iteration: self.iterations, stage, energy, gradient_norm: grad, norm });
    }

    fn budget_left(&self) -> bool {
        self.iterations < self.config.max_iterations
    }

    /// Armijo step along -w from c; None if no decrease is found.
    fn descend(&self, c: &DVector<f64>, e: f64, w: &DVector<f64>, g2: f64, lambda0: f64) -> Option<(DVector<f64>, f64, f64)> {
        let s = &self.config.step;
        let mut lambda = lambda0;
        for _ in 0..s.max_backtracks {
            let trial = c - w * lambda;
            let et = self.problem.energy(&trial);
            if et.is_finite() && et <= e - s.armijo * lambda * g2 {
                return Some((trial, et, lambda));
            }
            lambda *= s.shrink;
        }
        None
    }

    /// Path deformation: moves the interior maximizer down the gradient by at
    /// most one path spacing, then redistributes the points by arclength.
    fn mountain_pass(&mut self, e0: &DVector<f64>) -> (DVector<f64>, Vec<f64>) {
        let p = self.problem;
        let n = self.config.path_points;
        let mut path: Vec<DVector<f64>> = (0..n).map(|j| e0 * (j as f64 / (n - 1) as f64)).collect();
        let mut energies: Vec<f64> = path.par_iter().map(|c| p.energy(c)).collect();
        let mut lambda = self.config.step.initial;
        let mut moves = 0usize;
        let (mut best, mut since_best) = (f64::INFINITY, 0usize);
        while self.budget_left() {
            let j = argmax_interior(&energies);
            let (c, e) = local_path_max(p, &path[j - 1], &path[j], &path[j + 1]);
            path[j] = c.clone();
            energies[j] = e;
            let w = p.gradient(&c);
            let g = p.norm(&w);
            self.record(Stage::Descent, &c, e, g);
            if g <= self.config.handoff * p.norm(&c).max(1.0) {
                break;
            }
            // The path maximum has stopped dropping: leave the rest to Newton.
            if e < best - STALL_DROP * best.abs().max(1.0) {
                best = e;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= STALL_SWEEPS * n {
                    break;
                }
            }
            self.iterations += 1;
            let tangent = &path[j + 1] - &path[j - 1];
            let wn = &w - &tangent * (p.inner(&w, &tangent) / p.inner(&tangent, &tangent));
            let gn = p.norm(&wn);
            let spacing = 0.5 * (p.norm(&(&path[j] - &path[j - 1])) + p.norm(&(&path[j + 1] - &path[j])));
            let cap = if gn > 0.0 { spacing / gn } else { 0.0 };
            let start = (2.0 * lambda).min(self.config.step.initial).min(cap);
            match self.descend(&c, e, &wn, gn * gn, start) {
                Some((next, e, l)) => {
                    path[j] = next;
                    energies[j] = e;
                    lambda = l;
                }
                None => break,
            }
            moves += 1;
            if moves.is_multiple_of(10) {
                reparametrize(p, &mut path);
                energies = path.par_iter().map(|c| p.energy(c)).collect();
            }
        }
        let j = argmax_interior(&energies);
        (path[j].clone(), energies)
    }

    /// Gradient descent restricted to the Nehari manifold.
    fn nehari(&mut self, e0: &DVector<f64>) -> DVector<f64> {
        let p = self.problem;
        let t = nehari_scale(p, e0).unwrap_or(1.0);
        let mut u = e0 * t;
        let mut e = p.energy(&u);
        let mut lambda = self.config.step.initial;
        while self.budget_left() {
            let w = p.gradient(&u);
            let g = p.norm(&w);
            self.record(Stage::Descent, &u, e, g);
            if g <= self.config.handoff * p.norm(&u).max(1.0) {
                break;
            }
            self.iterations += 1;
            let wt = &w - &u * (p.inner(&w, &u) / p.inner(&u, &u));
            let gt2 = p.inner(&wt, &wt);
            let mut l = (2.0 * lambda).min(self.config.step.initial);
            let mut accepted = false;
            for _ in 0..self.config.step.max_backtracks {
                let trial = &u - &wt * l;
                if let Some(s) = nehari_scale(p, &trial) {
                    let cand = trial * s;
                    let ec = p.energy(&cand);
                    if ec.is_finite() && ec <= e - self.config.step.armijo * l * gt2 {
                        u = cand;
                        e = ec;
                        lambda = l;
                        accepted = true;
                        break;
                    }
                }
                l *= self.config.step.shrink;
            }
            if !accepted {
                break;
            }
        }
        u
    }

    /// Newton iteration on A c = b(c) with a residual line search.
    fn newton(&mut self, mut c: DVector<f64>, stage: Stage) -> (DVector<f64>, f64) {
        let p = self.problem;
        let mut g = p.norm(&p.gradient(&c));
        loop {
            self.record(stage, &c, p.energy(&c), g);
            if g.is_nan() {
                return (c, f64::INFINITY);
            }
            if g <= self.config.tolerance || !self.budget_left() {
                return (c, g);
            }
            self.iterations += 1;
            let res = p.residual(&c);
            let Some(delta) = p.jacobian(&c).lu().solve(&(-res)) else {
                return (c, g);
            };
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial = &c + &delta * step;
                let gt = p.norm(&p.gradient(&trial));
                if gt.is_finite() && gt < g {
                    c = trial;
                    g = gt;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                return (c, g);
            }
        }
    }
}

/// Maximizes the energy on the polyline a - b - c near b (golden section).
fn local_path_max(p: &Problem, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> (DVector<f64>, f64) {
    let point = |s: f64| if s < 0.0 { b + (b - a) * s } else { b + (c - b) * s };
    let phi = |s: f64| {
        let e = p.energy(&point(s));
        if e.is_finite() {
            e
        } else {
            f64::NEG_INFINITY
        }
    };
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..50 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = phi(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = phi(x1);
        }
    }
    let s = 0.5 * (lo + hi);
    let e0 = p.energy(b);
    let es = phi(s);
    if es > e0 {
        (point(s), es)
    } else {
        (b.clone(), e0)
    }
}

fn argmax_interior(e: &[f64]) -> usize {
    let mut j = 1;
    for i in 1..e.len() - 1 {
        if e[i] > e[j] {
            j = i;
        }
    }
    j
}

/// Redistributes path points uniformly in beta-arclength (piecewise linear).
fn reparametrize(p: &Problem, path: &mut [DVector<f64>]) {
    let n = path.len();
    let mut s = vec![0.0; n];
    for i in 1..n {
        s[i] = s[i - 1] + p.norm(&(&path[i] - &path[i - 1]));
    }
    let total = s[n - 1];
    if !(total > 0.0) {
        return;
    }
    let old = path.to_vec();
    for (k, slot) in path.iter_mut().enumerate().take(n - 1).skip(1) {
        let target = total * k as f64 / (n - 1) as f64;
        let i = s.partition_point(|&x| x <= target).clamp(1, n - 1);
        let seg = s[i] - s[i - 1];
        let t = if seg > 0.0 { (target - s[i - 1]) / seg } else { 0.0 };
        *slot = &old[i - 1] * (1.0 - t) + &old[i] * t;
    }
}

/// Energies along 0 -> u (ray) followed by u -> e0 (segment), a path of the
/// admissible class that passes through the critical point.
fn final_path_energies(p: &Problem, u: &DVector<f64>, e0: &DVector<f64>, n: usize) -> Vec<f64> {
    let half = n / 2;
    let pts: Vec<DVector<f64>> = (0..=half)
        .map(|k| u * (k as f64 / half as f64))
        .chain((1..n - half).map(|k| {
            let t = k as f64 / (n - half - 1) as f64;
            u * (1.0 - t) + e0 * t
        }))
        .collect();
    pts.par_iter().map(|c| p.energy(c)).collect()
}

fn unimodal(e: &[f64]) -> bool {
    let peaks = (1..e.len() - 1).filter(|&i| e[i] > e[i - 1] && e[i] >= e[i + 1]).count();
    peaks == 1
}

/// Evaluates the level window, Nehari identity and sign of a converged state.
pub(crate) fn certify(problem: &Problem, c: &DVector<f64>, geometry_ok: bool, m_star: f64) -> (Certificates, f64, f64, f64) {
    let m = problem.energy(c);
    let defect = problem.nehari_defect(c);
    let min_val = problem.space().nodal_values(c).into_iter().fold(f64::INFINITY, f64::min);
    let cert = Certificates {
        geometry_ok,
        level_below_mstar: m > 0.0 && m < m_star,
        nonneg_ok: min_val >= -1e-8,
        nehari_ok: defect <= 1e-5,
    };
    (cert, m, defect, min_val)
}

/// Solves on a prebuilt problem.
pub fn solve_on(problem: &Problem, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let direction = gaussian(problem.space(), config.direction_width);
    let (geometry, e0) = mountain_pass_geometry_probe(problem, config, &direction)?;
    let ms = m_star(config.growth.alpha, config.growth.beta)?;
    let mut run = Run { problem, config, trace: Vec::new(), iterations: 0, max_norm: 0.0 };
    let (start, path_energies) = match config.mode {
        SolveMode::MountainPass => run.mountain_pass(&e0),
        SolveMode::Nehari => (run.nehari(&e0), Vec::new()),
    };
    let (mut c, mut residual) = run.newton(start, Stage::Newton);
    let mut truncated = false;
    let min_val = problem.space().nodal_values(&c).into_iter().fold(f64::INFINITY, f64::min);
    if min_val < -1e-8 && residual <= config.tolerance {
        let u: Vec<f64> = problem.space().nodal_values(&c).into_iter().map(|v| v.max(0.0)).collect();
        let du: Vec<f64> = problem
            .space()
            .nodal_slopes(&c)
            .into_iter()
            .zip(problem.space().nodal_values(&c))
            .map(|(d, v)| if v < 0.0 { 0.0 } else { d })
            .collect();
        let (c2, r2) = run.newton(problem.space().from_nodal(&u, &du), Stage::Polish);
        c = c2;
        residual = r2;
        truncated = true;
    }
    let converged = residual <= config.tolerance;
    let path_energies = if converged { final_path_energies(problem, &c, &e0, config.path_points) } else { path_energies };
    let (certificates, m_num, nehari_defect, min_nodal_value) = certify(problem, &c, geometry.ok, ms);
    let threshold = (alpha_beta(config.growth.beta)? / config.growth.alpha).powf(0.5 * (1.0 - config.growth.beta));
    Ok(SolveReport {
        mode: config.mode,
        converged,
        m_num,
        m_star: ms,
        residual,
        norm: problem.norm(&c),
        nehari_defect,
        min_nodal_value,
        truncated,
        certificates,
        geometry,
        iterations: run.iterations,
        path_unimodal: path_energies.len() >= 3 && unimodal(&path_energies),
        path_energies,
        ps: PsDiagnostics { threshold, max_norm: run.max_norm, near_threshold: run.max_norm >= 0.9 * threshold },
        trace: run.trace,
        solution: Profile::from_state(problem.space(), &c),
    })
}

/// Builds the discretization and runs the configured solver.
pub fn mountain_pass_solve(config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let problem = Problem::new(&config.mesh, &config.weight, &config.growth)?;
    solve_on(&problem, config)
}

/// Newton from the interpolant of a known profile (mesh refinement and
/// domain extension re-solves).
pub fn resolve_from(profile: &Profile, config: &SolveConfig) -> Result<(f64, f64, bool)> {
    config.validate()?;
    let problem = Problem::new(&config.mesh, &config.weight, &config.growth)?;
    let c0 = problem.space().interpolate(|r| profile.eval(r));
    let mut run = Run { problem: &problem, config, trace: Vec::new(), iterations: 0, max_norm: 0.0 };
    let (c, g) = run.newton(c0, Stage::Newton);
    Ok((problem.energy(&c), g, g <= config.tolerance))
}
