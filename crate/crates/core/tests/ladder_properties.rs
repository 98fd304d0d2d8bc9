mod common;

use proptest::prelude::*;
use zeta_ladder::consts::EULER_GAMMA;
use zeta_ladder::ladder::{IterationTower, JacobsLadder, LadderConstants};
use zeta_ladder::Dd;

fn z_abs(t: f64) -> f64 {
    common::table().engine().hardy_z(t).unwrap().abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defining_relation_holds(t in 1000.0f64..10_000.0) {
        let ladder = common::ladder();
        let y = ladder.phi1_dd(Dd::from(t)).unwrap();
        let g = ladder.g(Dd::from(t)).unwrap();
        let f = ladder.constants().f(y);
        prop_assert!(((f - g) / g).hi.abs() < 1e-11);
        prop_assert!(y.hi < t);
    }

    #[test]
    fn inverse_round_trip(t in 200.0f64..10_000.0) {
        let ladder = common::ladder();
        let back = ladder.phi1_inverse(ladder.phi1(t).unwrap()).unwrap();
        prop_assert!(((back - t) / t).abs() < 1e-9);
    }

    #[test]
    fn monotone(t in 200.0f64..9_999.0, dt in 1e-6f64..1.0) {
        let ladder = common::ladder();
        prop_assert!(ladder.phi1(t + dt).unwrap() > ladder.phi1(t).unwrap());
    }

    #[test]
    fn iterates_decrease(t in 500.0f64..10_000.0, p in 0usize..3) {
        let ladder = common::ladder();
        prop_assert!(ladder.phi1_iter(t, p + 1).unwrap() < ladder.phi1_iter(t, p).unwrap());
    }
}

#[test]
fn derivative_matches_central_differences() {
    let ladder = common::ladder();
    let h = 1e-5;
    let mut checked = 0;
    for i in 0..100 {
        let t = 1000.0 + 90.0 * i as f64 + 0.377 * i as f64;
        if z_abs(t) <= 0.1 {
            continue;
        }
        let fd = (ladder.phi1_dd(Dd::from(t) + h).unwrap() - ladder.phi1_dd(Dd::from(t) - h).unwrap()).hi / (2.0 * h);
        let exact = ladder.ztilde_sq(t).unwrap();
        assert!((fd / exact - 1.0).abs() < 1e-5, "t = {t}: {fd} vs {exact}");
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn chain_rule_for_iterates() {
    let ladder = common::ladder();
    let h = 1e-5;
    for (t, p) in [(6000.3, 2), (8123.7, 3), (9500.1, 1)] {
        let (orbit, jac) = ladder.orbit(Dd::from(t), p).unwrap();
        let direct: f64 = (0..p).map(|r| ladder.ztilde_sq(orbit[r].hi).unwrap()).product();
        assert!((jac / direct - 1.0).abs() < 1e-10);
        let fd = (ladder.phi1_iter_dd(Dd::from(t) + h, p).unwrap() - ladder.phi1_iter_dd(Dd::from(t) - h, p).unwrap())
            .hi
            / (2.0 * h);
        assert!((fd / jac - 1.0).abs() < 1e-4, "t = {t}, p = {p}: {fd} vs {jac}");
    }
}

#[test]
fn ztilde_vanishes_at_the_first_zero() {
    let ladder = common::ladder();
    assert!(ladder.domain().0 < 14.0);
    let zero = common::table().engine().zeros_in(14.0, 14.3).unwrap()[0];
    assert!(ladder.ztilde_sq(zero).unwrap() < 1e-8);
}

#[test]
fn omega_is_close_to_log() {
    let ladder = common::ladder();
    let ratio = ladder.omega(Dd::from(1e4)).unwrap().hi / 1e4f64.ln();
    assert!((0.9..=1.1).contains(&ratio), "{ratio}");
}

#[test]
fn gap_at_ten_thousand() {
    let ladder = common::ladder();
    let t = 1e4;
    let d = t - ladder.phi1(t).unwrap();
    let scale = (1.0 - EULER_GAMMA) * t / t.ln();
    assert!((0.5 * scale..=1.5 * scale).contains(&d), "{d} vs {scale}");
}

#[test]
fn tower_geometry_at_ten_thousand() {
    let ladder = common::ladder();
    let tower = IterationTower::build(&ladder, 1e4, 3, 1.0).unwrap();
    let geo = tower.geometry();
    assert!(geo.ordered && tower.is_ordered());
    assert!(geo.lengths_small);
    for g in &geo.normalized_gaps {
        assert!((0.8..=1.2).contains(g), "{g}");
    }
    assert_eq!(tower.lo(0).hi, 1e4);
    assert_eq!(tower.hi(0).hi, 1e4 + 2.0);
    for r in 1..=3 {
        let back = ladder.phi1_dd(tower.lo(r)).unwrap();
        assert!(((back - tower.lo(r - 1)) / tower.lo(r - 1)).hi.abs() < 1e-12);
    }
    let json: serde_json::Value = serde_json::from_str(&tower.to_json()).unwrap();
    assert_eq!(json["endpoints_lo"].as_array().unwrap().len(), 4);
    assert_eq!(json["normalized_gaps"].as_array().unwrap().len(), 3);
}

#[test]
fn tower_segments_shrink_with_l() {
    let ladder = common::ladder();
    let lengths: Vec<Vec<f64>> = [2.0, 1.0, 0.5, 0.1]
        .iter()
        .map(|&l| {
            let tower = IterationTower::build(&ladder, 8000.0, 2, l).unwrap();
            (0..=2).map(|r| tower.length(r)).collect()
        })
        .collect();
    for w in lengths.windows(2) {
        for r in 0..=2 {
            assert!(w[1][r] < w[0][r]);
        }
    }
    let single = IterationTower::build(&ladder, 8000.0, 0, 1.0).unwrap();
    assert_eq!(single.endpoints_lo(), vec![8000.0]);
    assert!(IterationTower::build(&ladder, 1e4, 2, 10.0).is_err());
    assert!(IterationTower::build(&ladder, 50.0, 2, 0.01).is_err());
}

#[test]
fn c0_shift_moves_phi_to_first_order() {
    let table = common::table().clone();
    let base = common::ladder();
    for shift in [10.0, -10.0] {
        let shifted = JacobsLadder::new(table.clone(), LadderConstants::default().with_c0(shift)).unwrap();
        for t in [3000.0, 9000.0] {
            let y = base.phi1(t).unwrap();
            let dy = shifted.phi1(t).unwrap() - y;
            let first_order = -shift / base.constants().f_prime(Dd::from(y)).hi;
            assert!((dy / first_order - 1.0).abs() < 1e-3, "{dy} vs {first_order}");
            assert!(dy.abs() < 2.0 * shift.abs() / t.ln());
        }
    }
}

#[test]
fn c0_fit_is_range_stable() {
    let ladder = common::ladder();
    let low = ladder.calibrate_c0(1000.0, 5000.0).unwrap();
    let high = ladder.calibrate_c0(5000.0, 10_000.0).unwrap();
    assert!((low.c0 - high.c0).abs() < 0.5, "{} vs {}", low.c0, high.c0);
    assert!(low.samples > 100 && high.samples > 100);
}

#[test]
fn ingham_residual_is_bounded() {
    let table = common::table();
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        let r = table.check_ingham(500.0 * i as f64).unwrap();
        worst = worst.max(r.normalized.abs());
    }
    assert!(worst < 1.0, "{worst}");
    assert!(table.check_ingham(1e4).unwrap().relative_to_main() < 0.01);
}
