//! The concentrating family u_eps: norm decomposition, normalization rate,
//! and the Laplacian audit of its middle piece.
//!
//! Run with `cargo run --release --example extremal_family`.

use wadams::extremals::{
    adams_family, family_norm_decomposition, laplacian_audit, normalization_sweep, AdamsFamilyParams, DEFAULT_EPSILONS,
};
use wadams::radial::alpha_beta;
use wadams::weights::WeightProfile;
use wadams::QuadratureSpec;

fn main() -> wadams::Result<()> {
    let quad = QuadratureSpec::default();
    let beta = 0.5;
    let w = WeightProfile::power(beta, 3.0)?;
    println!("alpha_beta({beta}) = {:.6}", alpha_beta(beta)?);

    println!("\n{:>8} {:>10} {:>10} {:>10} {:>12}", "eps", "A1", "A2", "A3", "||u||^2");
    for &eps in &DEFAULT_EPSILONS {
        let d = family_norm_decomposition(&AdamsFamilyParams::new(eps, beta)?, &w, &quad)?;
        println!("{:>8.0e} {:>10.4} {:>10.4} {:>10.4} {:>12.4}", eps, d.a1, d.a2, d.a3(), d.total);
    }

    let sweep = normalization_sweep(beta, &w, &DEFAULT_EPSILONS, &quad)?;
    println!("\n| ||u||^2 - 1 |: {:?}", sweep.corrections.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>());
    println!("decreasing: {}", sweep.decreasing);
    println!("fitted exponent {:.4}, predicted 1 - beta = {:.4}", sweep.fitted_exponent, sweep.predicted_exponent);

    let p = AdamsFamilyParams::new(1e-4, beta)?;
    let u = adams_family(&p)?;
    println!("\nprofile at eps = 1e-4 (r0 = {:.4}):", p.r0());
    for r in [0.0, 0.05, p.r0(), 0.2, 0.4, 0.5, 0.75, 1.0] {
        println!("  u({r:.4}) = {:.6}", u.value(r));
    }

    println!("\nLaplacian of the middle piece, derived vs printed:");
    for r in [0.15, 0.25, 0.4, 0.5] {
        let a = laplacian_audit(&p, r)?;
        println!("  r = {r:.2}: derived {:+.6}, printed {:+.6}, gap {:.2e}", a.derived, a.printed, a.relative_gap);
    }
    Ok(())
}
