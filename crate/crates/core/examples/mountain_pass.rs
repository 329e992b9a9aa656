//! Mountain-pass solve of Delta(omega_beta Delta u) = f(u) with the default
//! parameters, its verification, and the Nehari cross-check.
//!
//! Run with `cargo run --release --example mountain_pass`.

use wadams::solver::{mountain_pass_solve, verify_solution, SolveConfig, SolveMode};

fn main() -> wadams::Result<()> {
    let cfg = SolveConfig::default();
    let rep = mountain_pass_solve(&cfg)?;
    let g = &rep.geometry;
    println!("geometry: rho0 = {:.5}, tau = {:.4}, e0 = {:.0} * direction, I(e0) = {:.3e}", g.rho0, g.tau, g.e0_scale, g.e0_energy);
    println!("converged {} after {} iterations, residual {:.2e}", rep.converged, rep.iterations, rep.residual);
    println!("m_num = {:.6} < m* = {:.6}", rep.m_num, rep.m_star);
    println!("||u|| = {:.4}, Nehari defect {:.2e}, min nodal value {:.2e}", rep.norm, rep.nehari_defect, rep.min_nodal_value);
    println!("certificates {:?}", rep.certificates);
    println!("final path unimodal: {}", rep.path_unimodal);
    println!("PS window: max norm {:.4} vs threshold {:.4}", rep.ps.max_norm, rep.ps.threshold);

    println!("\nprofile:");
    let s = &rep.solution;
    for i in (0..s.r.len()).step_by(8) {
        println!("  r = {:>7.3}  u = {:.6e}  Delta u = {:+.6e}", s.r[i], s.u[i], s.laplacian[i]);
    }

    let v = verify_solution(&rep, &cfg)?;
    println!("\nweak identity, worst of {}: {:.2e}", v.weak_defects.len(), v.max_weak_defect);
    if let (Some(r), Some(e)) = (v.refinement, v.extension) {
        println!("2x elements: m = {:.6} (change {:.2e})", r.m_num, r.relative_change);
        println!("R = {}: m = {:.6} (change {:.2e})", cfg.verify.extended_radius, e.m_num, e.relative_change);
    }
    println!("certified: {}", v.certified);

    let nehari = mountain_pass_solve(&SolveConfig { mode: SolveMode::Nehari, ..cfg })?;
    println!("\nNehari route: m = {:.6}, residual {:.2e}", nehari.m_num, nehari.residual);
    Ok(())
}
