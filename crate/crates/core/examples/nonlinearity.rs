//! The model nonlinearity: growth certificates, the exact primitive against
//! the closed form C s^p (e^x - 1), and the kappa threshold.
//!
//! Run with `cargo run --release --example nonlinearity`.

use wadams::nonlinearity::{
    antiderivative, antiderivative_printed, check_all, f_model, kappa_threshold, liminf_ratio, m_star, GrowthParams,
};

fn main() -> wadams::Result<()> {
    let g = GrowthParams::default();
    println!("defaults: {g:?}");
    let rep = check_all(&g)?;
    for e in &rep.entries {
        println!("  {:<14} {:<5} {}", e.name, e.pass, e.detail);
    }
    println!("kappa threshold {:.12}, m* = {:.6}", kappa_threshold(g.alpha, g.beta)?, m_star(g.alpha, g.beta)?);

    println!("\n{:>6} {:>14} {:>14} {:>14} {:>12}", "s", "f(s)", "F(s)", "C s^p(e^x-1)", "liminf ratio");
    for s in [0.1, 0.5, 1.0, 1.5, 2.0, 3.0] {
        println!(
            "{:>6.2} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.6}",
            s,
            f_model(s, &g),
            antiderivative(s, &g),
            antiderivative_printed(s, &g),
            liminf_ratio(s, &g)
        );
    }

    let bad = GrowthParams { q: g.p, ..g };
    let f1 = check_all(&bad)?;
    println!("\nq = p: overall pass {}", f1.pass);
    Ok(())
}
