//! Certify that a heat-bath chain has no negative eigenvalues and bound
//! its mixing time, then contrast with a periodic chain where both fail.
//!
//! ```bash
//! cargo run -p hbspectra --example spectrum_certificate
//! ```

use hbspectra::matrix::{lazify, RatMatrix, StateSpace, StochasticMatrix, TargetDistribution};
use hbspectra::spectral::{certify_psd, mixing_time_bound, DEFAULT_PSD_TOLERANCE};
use hbspectra::{build_chain, zoo};

fn main() -> hbspectra::Result<()> {
    let spec = zoo::three_state_two_label();
    let pi = spec.target()?;
    let p = build_chain(&spec)?;

    let report = certify_psd(&p, &pi, DEFAULT_PSD_TOLERANCE)?;
    println!("heat-bath chain:");
    println!("  eigenvalues: {:?}", report.eigenvalues);
    println!("  lambda_star: {}", report.lambda_star);
    println!("  psd: {}", report.psd);
    let bound = mixing_time_bound(&report, &pi, 0.01)?;
    println!("  tau(0.01) <= {bound:.4}");

    // A periodic swap chain: reversible, but its spectrum dips to -1, so
    // the direct bound is useless until the chain is made lazy.
    let swap = StochasticMatrix::new(
        StateSpace::indexed(2),
        RatMatrix::from_i64_pairs(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]),
    )?;
    let uniform = TargetDistribution::uniform(swap.space().clone());
    let swap_report = certify_psd(&swap, &uniform, DEFAULT_PSD_TOLERANCE)?;
    println!("\nswap chain:");
    println!("  eigenvalues: {:?}", swap_report.eigenvalues);
    println!("  psd: {}", swap_report.psd);
    println!("  mixing bound: {:?}", mixing_time_bound(&swap_report, &uniform, 0.01).err());

    let lazy = lazify(&swap);
    let lazy_report = certify_psd(&lazy, &uniform, DEFAULT_PSD_TOLERANCE)?;
    println!("\nlazified swap:");
    println!("  eigenvalues: {:?}", lazy_report.eigenvalues);
    println!("  psd: {} (exact: {})", lazy_report.psd, lazy_report.exact_binary_spectrum);
    println!("  tau(0.01) <= {:.4}", mixing_time_bound(&lazy_report, &uniform, 0.01)?);

    // Heat-bath chains never need the lazification step: their smallest
    // eigenvalue is already nonnegative, so lambda_star = lambda_1.
    assert!(report.lambda_min >= -1e-9);
    assert_eq!(report.lambda_star, report.lambda_1.unwrap());
    Ok(())
}
