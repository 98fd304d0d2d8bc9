mod common;

use std::sync::Arc;

use zeta_ladder::generator::{legendre, Cosine, GeneratedSystem, Generator};
use zeta_ladder::harness::{
    check_lemma1, check_theorem_equality_chain, gram_matrix, integrate, QuadratureSpec,
};
use zeta_ladder::Dd;

#[test]
fn classical_integrals() {
    let spec = QuadratureSpec::default();
    let q = integrate(|x| x * x, 0.0, 1.0, &spec).unwrap();
    assert!((q.value - 1.0 / 3.0).abs() < 1e-14);
    let odd = integrate(|x| legendre(2, x).unwrap() * legendre(3, x).unwrap(), -1.0, 1.0, &spec).unwrap();
    assert!(odd.value.abs() < 1e-12);
    let norm = integrate(|x| legendre(3, x).unwrap().powi(2), -1.0, 1.0, &spec).unwrap();
    assert!((norm.value - 2.0 / 7.0).abs() < 1e-10);
}

#[test]
fn halving_the_tolerance_stays_within_the_estimate() {
    let w = 40.0;
    let kinks: Vec<f64> = (1..39).map(|k| k as f64 * std::f64::consts::PI / w).collect();
    let cases: [(Box<dyn Fn(f64) -> f64 + Sync>, Vec<f64>); 2] = [
        (Box::new(move |x: f64| (w * x).sin().powi(2) * (1.0 + x) * (-x).exp()), Vec::new()),
        (Box::new(move |x: f64| (w * x).sin().abs() * (-x).exp()), kinks),
    ];
    for (f, kinks) in &cases {
        let mut prev: Option<(f64, f64)> = None;
        for tol in [1e-6, 5e-7, 2.5e-7, 1.25e-7, 1e-10] {
            let spec = QuadratureSpec::default().with_abs_tol(tol).with_kinks(kinks.clone());
            let q = integrate(f, 0.0, 3.0, &spec).unwrap();
            if let Some((v, e)) = prev {
                assert!((q.value - v).abs() <= e.max(tol), "{tol}: {} vs {v}, est {e}", q.value);
            }
            prev = Some((q.value, q.error));
        }
    }
}

#[test]
fn base_legendre_gram() {
    let sys = GeneratedSystem::new(common::legendre(), common::generator(), Vec::new()).unwrap();
    let gram = gram_matrix(&sys, 5, &QuadratureSpec::default()).unwrap();
    assert!(gram.max_offdiag_abs < 1e-10);
    for (n, d) in gram.diag.iter().enumerate() {
        assert!((d - 2.0 / (2 * n + 1) as f64).abs() < 1e-12);
    }
    assert!(gram.symmetry_defect() <= 1e-12);
    assert!(gram_matrix(&sys, 0, &QuadratureSpec::default()).is_err());
}

#[test]
fn first_generation_at_t_5000() {
    let g = Arc::new(Generator::new(common::ladder(), 5000.0, 2, -1.0, 1.0).unwrap());
    let sys = GeneratedSystem::new(common::legendre(), g, vec![1]).unwrap();
    let gram = gram_matrix(&sys, 5, &QuadratureSpec::default().with_rel_tol(1e-10)).unwrap();
    assert!(gram.converged);
    assert!(gram.max_offdiag_abs < 1e-6 * gram.max_diag());
    let factors: Vec<f64> = (0..=5).map(|n| sys.normalization_factor(n).unwrap()).collect();
    let unit = gram.scaled(&factors);
    for d in &unit.diag {
        assert!((d - 1.0).abs() < 1e-5, "{d}");
    }
    let json: serde_json::Value = serde_json::from_str(&unit.to_report("gram", true).to_json()).unwrap();
    assert_eq!(json["schema"], "v1");
    assert_eq!(json["values"].as_array().unwrap().len(), 6);
}

#[test]
fn lemma1_constant_integrand_telescopes() {
    let ladder = common::ladder();
    let spec = QuadratureSpec::default();
    for p in 1..=4 {
        let r = check_lemma1(&ladder, |_| Dd::ONE, 5000.0, 3.0, p, &spec).unwrap();
        assert!((r.lhs - 3.0).hi.abs() < 1e-13);
        assert!(r.residual().abs() < 2.0 * spec.abs_tol, "p={p}: {}", r.residual());
    }
}

#[test]
fn lemma1_polynomials_at_ten_thousand() {
    let ladder = common::ladder();
    let spec = QuadratureSpec::default();
    let r = check_lemma1(&ladder, |t| t, 1e4, 2.0, 2, &spec).unwrap();
    assert!(r.residual().abs() < 1e-7, "{}", r.residual());
    assert!(r.limits.0.hi > 1e4 && r.limits.1.hi > r.limits.0.hi);
}

#[test]
fn lemma1_smooth_bump() {
    let ladder = common::ladder();
    let spec = QuadratureSpec::default();
    let bump = |t: Dd| {
        let x = (t - 8001.0).hi / 0.3;
        Dd::from((-x * x).exp())
    };
    for p in 1..=3 {
        let r = check_lemma1(&ladder, bump, 8000.0, 2.0, p, &spec).unwrap();
        assert!(r.residual().abs() <= (5.0 * r.quad_error()).max(1e-12), "p={p}: {} vs {}", r.residual(), r.quad_error());
    }
}

#[test]
fn lemma1_enforces_the_smallness_bound() {
    let ladder = common::ladder();
    assert!(check_lemma1(&ladder, |_| Dd::ONE, 1e4, 50.0, 1, &QuadratureSpec::default()).is_err());
}

#[test]
fn chain_for_the_constant_cosine() {
    let g = common::generator();
    let cos = Cosine::new(-1.0, 1.0).unwrap();
    for p in 1..=3 {
        let c = check_theorem_equality_chain(&g, &cos, 0, 0, p, &QuadratureSpec::default()).unwrap();
        assert!((c.values[0] - 2.0).abs() < 1e-14);
        for v in c.values {
            assert!((v - 2.0).abs() < 1e-9, "p={p}: {:?}", c.values);
        }
    }
}

#[test]
fn chain_for_legendre_pairs() {
    let g = common::generator();
    let base = common::legendre();
    let c = check_theorem_equality_chain(&g, base.as_ref(), 0, 1, 2, &QuadratureSpec::default()).unwrap();
    for v in c.values {
        assert!(v.abs() < 1e-7);
    }
    let c = check_theorem_equality_chain(&g, base.as_ref(), 3, 3, 3, &QuadratureSpec::default()).unwrap();
    assert!((c.values[2] - c.values[3]).abs() < 1e-7);
    assert!(c.spread() < 1e-7);
    assert!((c.values[0] - base.norm_sq(3).unwrap()).abs() < 1e-12);
    assert!(c.to_report(1e-7).pass);
}
