//! Certifies the structural, A2 and D-conditions for a few tails chi.
//!
//! Run with `cargo run --release --example check_weight`.

use wadams::weights::{
    check_a2, check_growth_conditions_d, check_structural_conditions, default_ball_suite, power_window, ChiSpec,
    WeightProfile,
};
use wadams::{ConditionReport, QuadratureSpec};

fn show(title: &str, rep: &ConditionReport) {
    println!("  {title}: {}", if rep.pass { "pass" } else { "FAIL" });
    // Long reports (one entry per ball) are cut to their tightest entries.
    let mut entries: Vec<_> = rep.entries.iter().collect();
    if entries.len() > 10 {
        entries.sort_by(|a, b| a.margin.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.margin.unwrap_or(f64::NEG_INFINITY)));
        println!("    ({} entries, tightest three shown)", entries.len());
        entries.truncate(3);
    }
    for e in entries {
        let margin = e.margin.map_or("-".to_string(), |m| format!("{m:+.3e}"));
        println!("    {:<16} {:<5} margin {:<11} {}", e.name, e.pass, margin, e.detail);
    }
}

fn main() -> wadams::Result<()> {
    let quad = QuadratureSpec::default();
    let table = ChiSpec::Table {
        r: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        chi: vec![1.0, 8.0, 64.0, 512.0, 4096.0],
        tail_exponent: Some(3.0),
    };
    let cases = [
        ("chi = y^3, beta = 0.5", WeightProfile::power(0.5, 3.0)?),
        ("chi = y^4.5, beta = 0.5", WeightProfile::power(0.5, 4.5)?),
        ("chi = y^1.5, beta = 0.5", WeightProfile::power(0.5, 1.5)?),
        ("chi = y^3.5, beta = 0.25", WeightProfile::power(0.25, 3.5)?),
        ("tabulated y^3, beta = 0.5", WeightProfile::new(0.5, table)?),
    ];
    for (name, w) in &cases {
        println!("{name}");
        if let Some(a) = w.power_exponent() {
            println!("  power window max(2, 4(1-beta)) < a < 4: {}", power_window(w.beta(), a));
        }
        let s = check_structural_conditions(w, &quad, 1e6)?;
        let a2 = check_a2(w, &default_ball_suite(), &quad)?;
        let d = check_growth_conditions_d(w, 12, &quad)?;
        show("structural", &s);
        show("A2", &a2);
        show("D", &d);
        println!("  overall: {}\n", s.pass && a2.pass && d.pass);
    }
    Ok(())
}
