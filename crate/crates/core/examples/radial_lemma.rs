//! Pointwise bound |u(r)| <= RHS(r) for r >= 1 on a random corpus, and the
//! half-space transform identity.
//!
//! Run with `cargo run --release --example radial_lemma`.

use wadams::corpus::{build_corpus, random_corpus};
use wadams::radial_lemma::{half_space_transform_check, verify_radial_lemma};
use wadams::weights::WeightProfile;
use wadams::QuadratureSpec;

fn main() -> wadams::Result<()> {
    let quad = QuadratureSpec::default();
    let w = WeightProfile::power(0.5, 3.0)?;
    let radii = [1.0, 2.0, 5.0, 10.0, 1e2, 1e3];
    let corpus = build_corpus(&random_corpus(20, 7))?;
    let s = [0.01, 0.1, 0.3, 0.6, 0.9];
    println!("{:<12} {:>10} {:>10} {:>12} {:>10}", "function", "c2", "tail E", "min margin", "transform");
    for u in &corpus {
        let rep = verify_radial_lemma(u, &w, &radii, 1e-8, &quad)?;
        let t = half_space_transform_check(u, &s)?;
        println!(
            "{:<12} {:>10.4} {:>10.3e} {:>12.4e} {:>10.1e}",
            rep.label, rep.constants.c2, rep.tail_energy, rep.min_margin, t
        );
    }
    let u = &corpus[0];
    let rep = verify_radial_lemma(u, &w, &radii, 1e-8, &quad)?;
    println!("\n{} in detail:", rep.label);
    for row in &rep.rows {
        println!("  r = {:>7.1}: |u| = {:.4e} <= {:.4e}", row.r, row.lhs, row.rhs);
    }
    Ok(())
}
