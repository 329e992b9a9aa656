//! Adams functional by adaptive quadrature against its truncated exponential
//! series on bounded test functions.
//!
//! Run with `cargo run --release --example series_vs_quadrature`.

use wadams::corpus::{FunctionSpec, Term};
use wadams::radial::{adams_functional, adams_functional_series, alpha_beta};
use wadams::QuadratureSpec;

fn main() -> wadams::Result<()> {
    let quad = QuadratureSpec::default();
    let beta = 0.5;
    let alpha = alpha_beta(beta)?;
    println!("{:>4} {:>16} {:>16} {:>10} {:>10}", "i", "quadrature", "series K=40", "gap", "tail");
    for i in 0..10 {
        let a = 0.02 + 0.015 * i as f64;
        let spec = FunctionSpec {
            terms: vec![
                Term::Gaussian { amplitude: a, width: 0.5 + 0.2 * i as f64 },
                Term::Rational { amplitude: 0.5 * a, width: 1.0, power: 2.0 },
            ],
            decay: None,
        };
        let u = spec.build(format!("f{i}"))?;
        let q = adams_functional(&u, alpha, beta, &quad)?;
        let s = adams_functional_series(&u, alpha, beta, 40, &quad)?;
        let gap = (q.value - s.value).abs();
        println!("{:>4} {:>16.10e} {:>16.10e} {:>10.2e} {:>10.2e}", i, q.value, s.value, gap, s.tail_bound);
    }
    Ok(())
}
