//! Bounded/divergent sweep of the normalized family around alpha_beta at
//! three values of beta.
//!
//! Run with `cargo run --release --example dichotomy`.

use wadams::extremals::{dichotomy_sweep, DEFAULT_EPSILONS};
use wadams::radial::alpha_beta;
use wadams::weights::WeightProfile;
use wadams::QuadratureSpec;

fn main() -> wadams::Result<()> {
    let quad = QuadratureSpec::default();
    for (beta, a) in [(0.25, 3.5), (0.5, 3.0), (0.75, 3.0)] {
        let w = WeightProfile::power(beta, a)?;
        let ab = alpha_beta(beta)?;
        let alphas: Vec<f64> = [0.9, 1.0, 1.2].iter().map(|f| f * ab).collect();
        let rep = dichotomy_sweep(&alphas, beta, &w, &DEFAULT_EPSILONS, &quad)?;
        println!("beta = {beta}, chi = y^{a}, alpha_beta = {ab:.4}");
        println!("  {:>6} {:>8} {:>10} {:>14} {:>14}", "ratio", "eps", "norm", "functional", "bound");
        for c in &rep.cells {
            println!(
                "  {:>6.2} {:>8.0e} {:>10.4} {:>14.6e} {:>14.6e}",
                c.alpha / ab,
                c.epsilon,
                c.norm,
                c.functional_value,
                c.normalized_lower_bound
            );
        }
        for v in &rep.verdicts {
            println!("  {:.2} alpha_beta: {} (expected {}) {}", v.ratio, v.verdict, v.expected, v.detail);
        }
        println!("  matches the sharp constant: {}\n", rep.matches_dichotomy());
    }
    Ok(())
}
