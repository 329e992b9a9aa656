use std::f64::consts::{E, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use wadams::corpus::{build_corpus, random_corpus, FunctionSpec, Term};
use wadams::extremals::{adams_family, AdamsFamilyParams};
use wadams::nonlinearity::{
    antiderivative, antiderivative_printed, f_model, f_model_derivative, kappa_threshold, m_star, GrowthParams,
};
use wadams::radial::{adams_functional, adams_functional_series, alpha_beta, weighted_seminorm_sq};
use wadams::radial_lemma::verify_radial_lemma;
use wadams::solver::{MeshSpec, Problem};
use wadams::weights::WeightProfile;
use wadams::QuadratureSpec;

fn central(f: impl Fn(f64) -> f64, s: f64) -> f64 {
    let h = 1e-5 * s.max(1e-2);
    (f(s + h) - f(s - h)) / (2.0 * h)
}

#[test]
fn printed_primitive_is_not_a_primitive() {
    let p = GrowthParams::default();
    let d = central(|s| antiderivative_printed(s, &p), 1.0);
    assert!((d - f_model(1.0, &p)).abs() > 1.0, "printed F' = {d}, f = {}", f_model(1.0, &p));
}

#[test]
fn sharp_exponent_closed_forms() {
    assert_relative_eq!(alpha_beta(0.5).unwrap(), 64.0 * PI.powi(4), max_relative = 1e-12);
    assert_relative_eq!(kappa_threshold(1.0, 0.5).unwrap(), 16.0 / E.powi(4), max_relative = 1e-12);
    assert_relative_eq!(m_star(1.0, 0.5).unwrap(), 4.0 * PI * PI, max_relative = 1e-12);
}

#[test]
fn fem_energy_matches_quadrature() {
    let w = WeightProfile::power(0.5, 3.0).unwrap();
    let problem = Problem::new(&MeshSpec::default(), &w, &GrowthParams::default()).unwrap();
    let width = 1.3;
    let c = problem.space().interpolate(|r| {
        let e = (-(r / width).powi(2)).exp();
        (e, -2.0 * r / (width * width) * e)
    });
    let spec = FunctionSpec { terms: vec![Term::Gaussian { amplitude: 1.0, width }], decay: None };
    let u = spec.build("gaussian").unwrap();
    let exact = weighted_seminorm_sq(&u, &w, &QuadratureSpec::default()).unwrap().value;
    let fem = problem.inner(&c, &c);
    assert_relative_eq!(fem, exact, max_relative = 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn primitive_differentiates_to_f(s in 0.05f64..1.5, beta in 0.2f64..0.7, dp in 0.1f64..3.0, dq in 0.0f64..4.0) {
        let sigma = 2.0 / (1.0 - beta);
        let p = GrowthParams { p: sigma + dp, q: sigma + dp + dq, beta, ..GrowthParams::default() };
        let d = central(|x| antiderivative(x, &p), s);
        let f = f_model(s, &p);
        prop_assert!((d - f).abs() <= 1e-6 * f.abs().max(1e-12), "F' = {d}, f = {f}");
    }

    #[test]
    fn f_derivative_matches_differences(s in 0.05f64..1.5, beta in 0.2f64..0.7) {
        let p = GrowthParams { beta, p: 2.0 / (1.0 - beta) + 1.0, q: 2.0 / (1.0 - beta) + 1.0, ..GrowthParams::default() };
        let d = central(|x| f_model(x, &p), s);
        let exact = f_model_derivative(s, &p);
        prop_assert!((d - exact).abs() <= 1e-6 * exact.abs().max(1e-12), "{d} vs {exact}");
    }

    #[test]
    fn kappa_matches_definition(alpha in 0.1f64..10.0, beta in 0.05f64..0.95) {
        let k = kappa_threshold(alpha, beta).unwrap();
        let ab = 4.0 * (8.0 * PI * PI * (1.0 - beta)).powf(1.0 / (1.0 - beta));
        let oracle = 2.0 / (PI * PI * E.powi(4)) * (ab / alpha).powf(1.0 - beta);
        prop_assert!((k - oracle).abs() <= 1e-10 * oracle);
    }

    #[test]
    fn family_is_c1_at_breakpoints(k in 2.0f64..8.0, beta in 0.2f64..0.8) {
        let params = AdamsFamilyParams::new(10f64.powf(-k), beta).unwrap();
        let u = adams_family(&params).unwrap();
        for b in u.breakpoints() {
            if b <= 0.0 || !b.is_finite() {
                continue;
            }
            let h = 1e-9 * b;
            let (l, r) = (u.jet(b - h), u.jet(b + h));
            prop_assert!((l.u - r.u).abs() <= 1e-6 * (1.0 + l.u.abs()), "u jumps at {b}: {} vs {}", l.u, r.u);
            prop_assert!((l.du - r.du).abs() <= 1e-5 * (1.0 + l.du.abs()), "u' jumps at {b}: {} vs {}", l.du, r.du);
        }
        prop_assert!(u.value(2.0).abs() == 0.0);
    }

    #[test]
    fn radial_bound_holds_on_random_corpora(seed in 0u64..1000) {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let quad = QuadratureSpec::default();
        for u in build_corpus(&random_corpus(3, seed)).unwrap() {
            let rep = verify_radial_lemma(&u, &w, &[1.0, 3.0, 30.0, 300.0], 1e-8, &quad).unwrap();
            prop_assert!(rep.pass, "{}: min margin {}", rep.label, rep.min_margin);
        }
    }

    #[test]
    fn series_partial_sums_bracket_the_functional(a in 0.01f64..0.2, width in 0.3f64..2.0) {
        let quad = QuadratureSpec::default();
        let alpha = alpha_beta(0.5).unwrap();
        let u = FunctionSpec { terms: vec![Term::Gaussian { amplitude: a, width }], decay: None }.build("g").unwrap();
        let q = adams_functional(&u, alpha, 0.5, &quad).unwrap().value;
        let s = adams_functional_series(&u, alpha, 0.5, 40, &quad).unwrap();
        prop_assert!(s.terms.iter().all(|t| *t >= 0.0));
        prop_assert!(s.value <= q * (1.0 + 1e-9) + 1e-12);
        prop_assert!(q - s.value <= s.tail_bound + 1e-8);
    }
}
