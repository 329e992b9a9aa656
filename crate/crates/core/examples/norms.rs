//! Weighted seminorm, L^p norms and the Adams functional of a scaled Gaussian,
//! with the concentration exponent P_beta.
//!
//! Run with `cargo run --release --example norms`.

use std::sync::Arc;

use wadams::radial::{
    adams_functional, alpha_beta, concentration_limit_pbeta, lp_norm, sup_abs, weighted_seminorm, Jet, RadialFunction,
};
use wadams::weights::WeightProfile;
use wadams::QuadratureSpec;

fn gaussian(a: f64) -> wadams::Result<RadialFunction> {
    let jet = Arc::new(move |r: f64| {
        let e = a * (-r * r).exp();
        Jet::new(e, -2.0 * r * e, (4.0 * r * r - 2.0) * e)
    });
    RadialFunction::smooth(jet, f64::INFINITY, format!("{a} exp(-r^2)"))
}

fn main() -> wadams::Result<()> {
    let quad = QuadratureSpec::default();
    let beta = 0.5;
    let w = WeightProfile::power(beta, 3.0)?;
    let ab = alpha_beta(beta)?;
    let base = gaussian(1.0)?;
    let n1 = weighted_seminorm(&base, &w, &quad)?;
    println!("||exp(-r^2)||_beta = {n1:.6}");
    println!("\n{:>8} {:>8} {:>10} {:>10} {:>10} {:>14} {:>10}", "||u||", "sup", "L^2", "L^4", "L^6", "Adams(a_b)", "P_beta");
    for target in [0.25, 0.5, 0.75, 0.9, 1.0] {
        let u = gaussian(target / n1)?;
        let n = weighted_seminorm(&u, &w, &quad)?;
        let l: Vec<f64> = [2.0, 4.0, 6.0].iter().map(|&p| lp_norm(&u, p, beta, &quad).map(|v| v.value)).collect::<Result<_, _>>()?;
        let a = adams_functional(&u, ab, beta, &quad)?;
        let pb = concentration_limit_pbeta(n.min(1.0), beta)?;
        println!(
            "{:>8.4} {:>8.4} {:>10.4e} {:>10.4e} {:>10.4e} {:>14.6e} {:>10.4}",
            n,
            sup_abs(&u),
            l[0],
            l[1],
            l[2],
            a.value,
            pb
        );
    }
    Ok(())
}
