//! Seeded simulation: reproducible trajectories, empirical frequencies
//! against the exact transition row, and total-variation decay toward the
//! target compared with the spectral bound.
//!
//! ```bash
//! cargo run -p hbspectra --example simulate_trajectory
//! ```

use hbspectra::simulate::{
    rng_from_seed, run_trajectory, trajectory_csv, tv_distance, HeatBathSampler, Start,
    TrajectoryConfig,
};
use hbspectra::spectral::{certify_psd, mixing_time_bound, DEFAULT_PSD_TOLERANCE};
use hbspectra::{build_chain, zoo};

fn main() -> hbspectra::Result<()> {
    let spec = zoo::three_state_two_label();
    let pi = spec.target()?;

    // Identical seeds give identical trajectories, on any platform.
    let config = TrajectoryConfig { seed: 7, steps: 10, start: Start::State(0) };
    let trajectory = run_trajectory(&spec, &config)?;
    println!("trajectory (seed 7):\n{}", trajectory_csv(spec.space(), &trajectory));
    assert_eq!(trajectory, run_trajectory(&spec, &config)?);

    // Empirical one-step frequencies from state 0 against the exact row.
    let sampler = HeatBathSampler::new(&spec)?;
    let mut rng = rng_from_seed(123);
    let samples = 100_000;
    let mut counts = [0usize; 3];
    for _ in 0..samples {
        counts[sampler.step(0, &mut rng)] += 1;
    }
    let p = build_chain(&spec)?;
    println!("exact row from s0:     {:?}", p.to_f64_rows()[0]);
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    println!("empirical frequencies: {freqs:?}");

    // Exact matrix-power convergence versus the spectral upper bound.
    let report = certify_psd(&p, &pi, DEFAULT_PSD_TOLERANCE)?;
    let bound = mixing_time_bound(&report, &pi, 0.01)?;
    println!("\ntau(0.01) <= {bound:.4}");
    let pi_floats = pi.to_f64();
    for steps in [1usize, 5, 10, 23] {
        let row = &p.pow(steps).to_f64_rows()[0];
        println!("tv(P^{steps} from s0, pi) = {:.6}", tv_distance(row, &pi_floats)?);
    }
    Ok(())
}
