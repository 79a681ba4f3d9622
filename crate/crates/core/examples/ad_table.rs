//! Monte-Carlo percentage points of the Anderson-Darling statistic for a
//! GPD fitted by maximum likelihood.
//!
//! Usage: `ad_table <k> <reps> <xi>...`

use potpg_core::evt::{ad_statistic, fit_gpd, FitMethod, GpdParams};
use potpg_core::seed::mix_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LEVELS: [f64; 8] = [0.5, 0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 3 {
        eprintln!("usage: ad_table <k> <reps> <xi>...");
        std::process::exit(2);
    }
    let k: usize = args[0].parse().expect("k");
    let reps: usize = args[1].parse().expect("reps");
    for (row, xi) in args[2..].iter().enumerate() {
        let xi: f64 = xi.parse().expect("xi");
        let law = GpdParams::new(xi, 1.0).unwrap();
        let mut stats: Vec<f64> = (0..reps)
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(row as u64, r as u64));
                let y = law.sample(k, &mut rng).unwrap().into_values();
                let fit = fit_gpd(&y, FitMethod::Mle).unwrap();
                ad_statistic(&y, &fit)
            })
            .collect();
        stats.sort_by(f64::total_cmp);
        let crit: Vec<String> = LEVELS
            .iter()
            .map(|p| format!("{:.4}", stats[((1.0 - p) * reps as f64) as usize]))
            .collect();
        println!("{xi:5.2}: [{}],", crit.join(", "));
    }
}
