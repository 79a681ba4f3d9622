//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed.

use std::process::Command;
use std::time::Instant;

use potpg::experiment::preset;
use potpg::run::run_experiment;
use potpg_core::env::gpd::gpd_cvar;
use potpg_core::env::hedging::{self, HedgeConfig, HedgeEnv, HedgeMarket, Measure, NigParams};
use potpg_core::evt::{
    ad_statistic, cvar_sa, estimate_cvar, fit_gpd_mom, CostSample, Estimator, GpdParams, RiskLevel, ThresholdConfig,
};
use potpg_core::numeric::integrate;
use potpg_core::optimizer::{
    finite_diff_gradient, AdamConfig, Environment, PolicyParams, ThresholdSharing, TrainConfig,
};
use potpg_core::seed::mix_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rmse(xs: &[f64], truth: f64) -> f64 {
    (xs.iter().map(|x| (x - truth) * (x - truth)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// A² transcribed term by term: sort, transform with the fitted CDF (clamped
/// away from 0 and 1), then accumulate `(2i - 1)[ln z_i + ln(1 - z_{k+1-i})]`
/// for `i = 1..k`.
fn ad_transcribed(excesses: &[f64], p: &GpdParams) -> f64 {
    let mut y = excesses.to_vec();
    y.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = y.len();
    let z: Vec<f64> = y
        .iter()
        .map(|&v| {
            let g = if v <= 0.0 {
                0.0
            } else if v >= p.upper_endpoint() {
                1.0
            } else {
                p.cdf(v).unwrap()
            };
            g.clamp(f64::EPSILON, 1.0 - f64::EPSILON)
        })
        .collect();
    let mut sum = 0.0;
    for i in 1..=k {
        sum += (2 * i - 1) as f64 * (libm::log(z[i - 1]) + libm::log(1.0 - z[k - i]));
    }
    -(k as f64) - sum / k as f64
}

fn ac1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC1);
    let mut worst_rt: f64 = 0.0;
    for _ in 0..10_000 {
        let p = GpdParams::new(rng.random_range(-0.5..1.5), rng.random_range(0.05..20.0)).unwrap();
        let q: f64 = rng.random_range(0.0..0.999_999);
        worst_rt = worst_rt.max((p.cdf(p.quantile(q).unwrap()).unwrap() - q).abs());
    }

    let mut worst_mom: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(10..500);
        let src = GpdParams::new(rng.random_range(-0.3..0.45), rng.random_range(0.1..5.0)).unwrap();
        let y = src.sample(n, &mut rng).unwrap().into_values();
        let fit = fit_gpd_mom(&y).unwrap();
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        worst_mom = worst_mom.max(rel(fit.mean().unwrap(), mean)).max(rel(fit.variance().unwrap(), var));
    }

    let mut mismatches = 0;
    for _ in 0..1000 {
        let k = rng.random_range(2..400);
        let truth = GpdParams::new(rng.random_range(-0.3..0.8), rng.random_range(0.2..4.0)).unwrap();
        let y = truth.sample(k, &mut rng).unwrap().into_values();
        let fitted = GpdParams::new(truth.xi() + rng.random_range(-0.2..0.2), truth.sigma() * rng.random_range(0.7..1.3)).unwrap();
        if ad_statistic(&y, &fitted).to_bits() != ad_transcribed(&y, &fitted).to_bits() {
            mismatches += 1;
        }
    }
    let pass = worst_rt < 1e-10 && worst_mom < 1e-10 && mismatches == 0;
    outcome(
        pass,
        format!(
            "GPD oracles: quantile/cdf round trip max err {worst_rt:.1e} (<1e-10), MOM moment identity max rel err {worst_mom:.1e}, AD mismatches {mismatches}/1000"
        ),
    )
}

fn ac2() -> Outcome {
    let level = RiskLevel::new(0.998).unwrap();
    let truth = gpd_cvar(0.4, 2.0, level);
    let g = GpdParams::new(0.4, 2.0).unwrap();
    let cfg = ThresholdConfig::default();
    let (mut pot, mut sa) = (Vec::new(), Vec::new());
    for i in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0xAC2, i));
        let s = g.sample(2000, &mut rng).unwrap();
        pot.push(estimate_cvar(&s, level, &cfg, None).value);
        sa.push(cvar_sa(&s, level).value);
    }
    let (rp, rs) = (rmse(&pot, truth), rmse(&sa, truth));
    outcome(rp < rs, format!("POT estimator accuracy: true CVaR {truth:.4}, RMSE POT {rp:.3} vs SA {rs:.3} over 100 samples"))
}

fn final_abs_errors(out: &potpg::ExperimentOutcome, est: Estimator, star: f64) -> Vec<f64> {
    out.get(est).unwrap().runs.iter().map(|r| (r.trace.final_theta[0] - star).abs()).collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn ac3() -> Outcome {
    let spec = preset("gpd-desk").unwrap();
    let out = run_experiment(&spec).unwrap();
    let (rp, rs) = (out.get(Estimator::Pot).unwrap().report.final_rmse_theta, out.get(Estimator::Sa).unwrap().report.final_rmse_theta);
    let med = median(final_abs_errors(&out, Estimator::Pot, 0.4));
    outcome(
        rp <= rs && med < 0.15,
        format!(
            "GPD training, R={} M={}: final RMSE_theta POT {rp:.5} vs SA {rs:.5}, POT median |theta-0.4| {med:.5} (<0.15)",
            spec.runs, spec.train.iterations
        ),
    )
}

/// `ζ = r - ln ∫ eˣ f(x) dx` with the Q-density integrated numerically.
fn zeta_by_quadrature(m: &HedgeMarket) -> f64 {
    let q = m.q_params;
    let (lo, hi) = (q.mu - 2.0, q.mu + 2.0);
    let mgf = integrate(|x| x.exp() * q.pdf(x), lo, hi, 1e-15, 1e-14, 20_000);
    m.r - mgf.ln()
}

fn ac4() -> Outcome {
    let m = HedgeMarket::default();
    let zeta = m.zeta_q().unwrap();
    let oracle = zeta_by_quadrature(&m);
    let zeta_ok = (zeta - oracle).abs() < 1e-6;

    let mut worst_mart: f64 = 0.0;
    for tau in [1.0, 4.2, 5.2, 26.0] {
        let law = m.pricing_law(tau, Measure::Cash).unwrap();
        worst_mart = worst_mart.max((law.log_mgf(1.0).unwrap() - m.r * tau).abs());
    }

    let strike = 1000.0;
    let (mut worst_d, mut worst_g): (f64, f64) = (0.0, 0.0);
    for tau in [1.0, 4.2, 5.2, 13.0, 26.0] {
        for i in 0..=8 {
            let s = strike * (0.8 + 0.05 * i as f64);
            let g = m.greeks(s, tau, strike).unwrap();
            // central differences; truncation error is O(h²)
            let h = 1e-4 * s;
            let p = |x: f64| m.call_price(x, tau, strike).unwrap();
            let fd_d = (p(s + h) - p(s - h)) / (2.0 * h);
            let fd_g = (p(s + h) - 2.0 * p(s) + p(s - h)) / (h * h);
            worst_d = worst_d.max(((g.delta - fd_d) / g.delta).abs());
            worst_g = worst_g.max(((g.gamma - fd_g) / g.gamma).abs());
        }
    }

    // 26 weekly risk-neutral log-returns per path
    let premium = m.call_price(m.s0, 26.0, strike).unwrap();
    let weekly = NigParams { mu: m.q_params.mu + zeta, ..m.q_params };
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC4);
    let n = 1_000_000;
    let disc = (-26.0 * m.r).exp();
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let z: f64 = (0..26).map(|_| weekly.draw(&mut rng)).sum();
        let pay = disc * (m.s0 * z.exp() - strike).max(0.0);
        sum += pay;
        sum2 += pay * pay;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    let mc_ok = (mean - premium).abs() < 3.0 * se;

    let pass = zeta_ok && worst_mart < 1e-12 && worst_d < 1e-5 && worst_g < 1e-3 && mc_ok;
    outcome(
        pass,
        format!(
            "NIG pricing: zeta {zeta:.7} vs quadrature {oracle:.7}, martingale err {worst_mart:.1e}, Delta rel err {worst_d:.1e}, Gamma rel err {worst_g:.1e}, premium {premium:.4} vs MC {mean:.4} (SE {se:.4})"
        ),
    )
}

fn ac5() -> Outcome {
    let env = HedgeEnv::new(HedgeMarket::default(), HedgeConfig::default()).unwrap();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let c = env.brute_force_curve(&grid, 200_000, 1).unwrap();
    let t = c.theta_min();
    outcome(
        (0.45..=0.75).contains(&t),
        format!("hedging sweep, 2e5 paths, step 0.05: argmin theta {t:.2} (in [0.45, 0.75]), CVaR {:.3}", c.j_min()),
    )
}

fn ac5_full() -> Outcome {
    let env = HedgeEnv::new(HedgeMarket::default(), HedgeConfig::default()).unwrap();
    let grid: Vec<f64> = (0..=40).map(|i| 0.4 + i as f64 * 0.01).collect();
    let c = env.brute_force_curve(&grid, 1_000_000, 1).unwrap();
    let (t, j) = (c.theta_min(), c.j_min());
    let dt = (t - hedging::THETA_STAR).abs();
    let dj = (j - hedging::J_STAR).abs() / hedging::J_STAR;
    outcome(
        dt <= 0.05 && dj <= 0.15,
        format!(
            "full-scale hedging sweep, 1e6 paths, step 0.01: argmin {t:.2} (|d| {dt:.3} <= 0.05 of {}), CVaR {j:.3} ({:+.1}% of {})",
            hedging::THETA_STAR,
            100.0 * (j / hedging::J_STAR - 1.0),
            hedging::J_STAR
        ),
    )
}

fn ac6() -> Outcome {
    let spec = preset("hedging-desk").unwrap();
    let out = run_experiment(&spec).unwrap();
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let mp = mean(final_abs_errors(&out, Estimator::Pot, hedging::THETA_STAR));
    let ms = mean(final_abs_errors(&out, Estimator::Sa, hedging::THETA_STAR));
    outcome(
        mp <= ms,
        format!(
            "hedging training, R={} M={}: mean final |theta-{}| POT {mp:.4} vs SA {ms:.4}",
            spec.runs,
            spec.train.iterations,
            hedging::THETA_STAR
        ),
    )
}

/// Costs drawn from the seed alone.
struct Noise;

impl Environment for Noise {
    fn dim(&self) -> usize {
        2
    }

    fn sample_costs(&self, _: &PolicyParams, n: usize, seed: u64) -> potpg_core::Result<CostSample> {
        GpdParams::new(0.3, 1.0)?.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

fn ac7() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = preset("hedging-desk").unwrap();
    spec.runs = 2;
    spec.train.iterations = 5;
    spec.train.n = 300;
    spec.output_dir = None;
    let cfg = dir.path().join("exp.json");
    std::fs::write(&cfg, spec.to_json()).unwrap();
    let mut dirs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_potpg"))
            .args(["train", "--config", cfg.to_str().unwrap(), "--seed", "7", "--out", out.to_str().unwrap()])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        dirs.push(out);
    }
    let files = ["pot/run_0000.csv", "pot/run_0001.csv", "sa/run_0000.csv", "sa/run_0001.csv"];
    let identical = files
        .iter()
        .all(|f| std::fs::read(dirs[0].join(f)).unwrap() == std::fs::read(dirs[1].join(f)).unwrap());

    let mut nonzero = 0;
    for estimator in [Estimator::Pot, Estimator::Sa] {
        for sharing in [ThresholdSharing::Level, ThresholdSharing::Value] {
            let c = TrainConfig {
                n: 2000,
                iterations: 1,
                eps: 0.01,
                level: RiskLevel::new(0.99).unwrap(),
                step_size: 0.01,
                estimator,
                threshold: ThresholdConfig::default(),
                sharing,
                adam: AdamConfig::default(),
                base_seed: 0,
                theta0: PolicyParams::new(vec![0.3, -1.0]).unwrap(),
            };
            for seed in 0..20 {
                let g = finite_diff_gradient(&Noise, &c.theta0, &c, seed).unwrap();
                nonzero += g.grad.iter().filter(|x| **x != 0.0).count();
            }
        }
    }
    outcome(
        identical && nonzero == 0,
        format!(
            "reproducibility: repeated `train` traces byte-identical: {identical}; CRN null gradient nonzero components {nonzero}/160"
        ),
    )
}

fn main() {
    // libtest-style flags such as `--nocapture` are accepted and ignored;
    // `--list` lists nothing so test discovery tools see an empty suite.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 7] =
        [("AC1", ac1), ("AC2", ac2), ("AC3", ac3), ("AC4", ac4), ("AC5", ac5), ("AC6", ac6), ("AC7", ac7)];
    let mut failed = 0;
    for (id, f) in criteria {
        let t0 = Instant::now();
        let o = f();
        println!("{id} {} {} [{:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail, t0.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
        if id == "AC5" {
            let t0 = Instant::now();
            let o = ac5_full();
            println!("AC5-full {} {} [{:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail, t0.elapsed().as_secs_f64());
            failed += usize::from(!o.pass);
        }
    }
    println!("acceptance: {} checks, {failed} failed", criteria.len() + 1);
    if failed > 0 {
        std::process::exit(1);
    }
}
