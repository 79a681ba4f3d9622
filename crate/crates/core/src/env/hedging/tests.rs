use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::evt::cvar_sa;
use crate::optimizer::{Environment, PolicyParams};

fn env() -> HedgeEnv {
    HedgeEnv::new(HedgeMarket::default(), HedgeConfig::default()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn pure_delta_hedge_at_zero_ratio() {
    let e = env();
    let m = e.market();
    for &(t, s) in &[(0usize, 1000.0), (10, 930.0), (25, 1080.0)] {
        let (psi_s, psi_o) = e.positions(0.0, t, s).unwrap();
        assert_eq!(psi_o, 0.0);
        let direct = m.call_delta(s, (26 - t) as f64, 1000.0).unwrap();
        assert!((psi_s - direct).abs() < 1e-7, "t={t}: {psi_s} vs {direct}");
    }
}

#[test]
fn full_ratio_neutralizes_gamma() {
    let e = env();
    let m = e.market();
    for &(t, s) in &[(0usize, 1000.0), (13, 870.0), (24, 1150.0)] {
        let (_, psi_o) = e.positions(1.0, t, s).unwrap();
        let gamma_h = m.call_gamma(s, 5.2, s).unwrap();
        let gamma_t = m.call_gamma(s, (26 - t) as f64, 1000.0).unwrap();
        assert!(rel(psi_o * gamma_h, gamma_t) < 1e-10);
    }
    assert!(e.positions(0.5, 26, 1000.0).is_err());
}

#[test]
fn hedging_option_constants_at_purchase() {
    let e = env();
    let (d1, g1) = e.hedge_greeks(1000.0);
    let (d2, g2) = e.hedge_greeks(731.5);
    assert!((d1 - d2).abs() < 1e-12);
    assert!((g1 * 1000.0 - g2 * 731.5).abs() < 1e-12);
    assert!((e.hedge_price(1000.0) / 1000.0 - e.hedge_price(731.5) / 731.5).abs() < 1e-12);
    let m = e.market();
    let direct = m.greeks(731.5, 5.2, 731.5).unwrap();
    assert!((d2 - direct.delta).abs() < 1e-12);
    assert!(rel(g2, direct.gamma) < 1e-12);
    assert!(rel(e.hedge_price(731.5), direct.price) < 1e-10);
}

#[test]
fn rolled_price_is_one_week_older_option() {
    let e = env();
    let m = e.market();
    for &(prev, next) in &[(1000.0, 1000.0), (1000.0, 1040.0), (950.0, 900.0)] {
        let direct = m.call_price(next, 4.2, prev).unwrap();
        assert!((e.rolled_price(prev, next) - direct).abs() < 1e-6, "{prev}->{next}");
    }
}

#[test]
fn expired_hedging_option_pays_intrinsic() {
    let cfg = HedgeConfig { tau_h: 1.0, ..HedgeConfig::default() };
    let e = HedgeEnv::new(HedgeMarket::default(), cfg).unwrap();
    assert_eq!(e.rolled_price(1000.0, 1030.0), 30.0);
    assert_eq!(e.rolled_price(1000.0, 990.0), 0.0);
}

#[test]
fn flat_portfolio_accrues_interest() {
    let e = env();
    let z = e.sample_returns(4, 0);
    let out = e.simulate_path(&z, 0.7, PositionMode::Flat).unwrap();
    let expected = e.premium() * libm::exp(e.market().r * 26.0);
    assert!(rel(out.terminal_value, expected) < 1e-13);
}

#[test]
fn constant_path_smoke() {
    let e = env();
    let z = vec![0.0; 26];
    let a = e.simulate_path(&z, 0.6, PositionMode::Policy).unwrap();
    let b = e.simulate_path(&z, 0.6, PositionMode::Policy).unwrap();
    assert_eq!(a, b);
    assert!(a.shortfall.is_finite());
    assert_eq!(a.terminal_price, 1000.0);
    // each week the hedging option is sold one week older at the same spot
    let decay = e.hedge_price(1000.0) - e.rolled_price(1000.0, 1000.0);
    assert!(decay > 0.0);
}

#[test]
fn decomposition_matches_recursion() {
    let e = env();
    for episode in 0..50 {
        let z = e.sample_returns(99, episode);
        let d = e.decompose(&z).unwrap();
        for &theta in &[0.0, 0.3, 0.6, 1.0, 1.7] {
            let direct = e.simulate_path(&z, theta, PositionMode::Policy).unwrap().shortfall;
            assert!((d.shortfall(theta) - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{episode} {theta}");
        }
    }
}

#[test]
fn paths_do_not_depend_on_theta() {
    let e = env();
    let a = e.sample_costs(&PolicyParams::scalar(0.2).unwrap(), 20, 8).unwrap();
    let b = e.sample_costs(&PolicyParams::scalar(0.7).unwrap(), 20, 8).unwrap();
    assert_eq!(a, e.sample_costs(&PolicyParams::scalar(0.2).unwrap(), 20, 8).unwrap());
    for i in 0..20 {
        let z = e.sample_returns(8, i);
        let ca = e.simulate_path(&z, 0.2, PositionMode::Policy).unwrap().shortfall;
        let cb = e.simulate_path(&z, 0.7, PositionMode::Policy).unwrap().shortfall;
        assert_eq!(a.values()[i as usize], ca);
        assert_eq!(b.values()[i as usize], cb);
    }
    assert!(e.sample_costs(&PolicyParams::scalar(0.2).unwrap(), 0, 8).is_err());
}

#[test]
fn mean_shortfall_below_tail_cvar() {
    let e = env();
    let s = e.sample_costs(&PolicyParams::scalar(0.6).unwrap(), 100_000, 3).unwrap();
    let cvar = cvar_sa(&s, e.config().level).value;
    assert!(s.mean() < cvar, "{} vs {cvar}", s.mean());
}

#[test]
fn gamma_hedging_cuts_extreme_tail() {
    let e = env();
    let curve = e.brute_force_curve(&[0.0, 1.0], 100_000, 12).unwrap();
    assert!(curve.values.iter().all(|v| v.is_finite()));
    assert!(curve.values[1] < curve.values[0], "{:?}", curve.values);
    assert_eq!(curve.theta_min(), 1.0);
}

#[test]
fn cash_account_must_not_be_charged_twice() {
    // Subtracting the purchases from the cash account and again from the
    // asset gains loses roughly the full position value every week.
    let e = env();
    let growth = libm::exp(e.market().r);
    let z = e.sample_returns(1, 0);
    let mut s = e.market().s0;
    let mut v = e.premium();
    for (t, zt) in z.iter().enumerate() {
        let s1 = s * libm::exp(*zt);
        let (ps, po) = e.positions(0.6, t, s).unwrap();
        let hb = e.hedge_price(s);
        let he = e.rolled_price(s, s1);
        v = (v - ps * s - po * hb) * growth + ps * (s1 - s) + po * (he - hb);
        s = s1;
    }
    let charged_twice = (s - 1000.0).max(0.0) - v;
    let self_financing = e.simulate_path(&z, 0.6, PositionMode::Policy).unwrap().shortfall;
    assert!(charged_twice > 1_000.0, "{charged_twice}");
    assert!(self_financing.abs() < 200.0, "{self_financing}");
}

#[test]
fn premium_matches_risk_neutral_monte_carlo() {
    let e = env();
    let m = e.market();
    let law = m.pricing_law(1.0, Measure::Cash).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1_000_000;
    let disc = libm::exp(-m.r * 26.0);
    let payoffs: Vec<f64> = (0..n)
        .map(|_| {
            let log_ret: f64 = (0..26).map(|_| law.draw(&mut rng)).sum();
            disc * (m.s0 * libm::exp(log_ret) - 1000.0).max(0.0)
        })
        .collect();
    let mean = payoffs.iter().sum::<f64>() / n as f64;
    let var = payoffs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1) as f64;
    let se = libm::sqrt(var / n as f64);
    assert!((mean - e.premium()).abs() < 3.0 * se, "{mean} vs {} (se {se})", e.premium());
}

#[test]
fn sweep_smoke() {
    let e = env();
    let c = e.brute_force_curve(&[0.0], 1, 0).unwrap();
    assert_eq!(c.values.len(), 1);
    assert!(c.j_min().is_finite());
    assert_eq!(c.theta_min(), 0.0);
    assert!(e.brute_force_curve(&[], 10, 0).is_err());
}

#[test]
fn config_validation() {
    assert!(HedgeEnv::new(HedgeMarket::default(), HedgeConfig { maturity: 0, ..HedgeConfig::default() }).is_err());
    assert!(HedgeEnv::new(HedgeMarket::default(), HedgeConfig { tau_h: 0.0, ..HedgeConfig::default() }).is_err());
    let mut bad = HedgeMarket::default();
    bad.q_params.a = 5.0;
    assert!(HedgeEnv::new(bad, HedgeConfig::default()).is_err());
}
