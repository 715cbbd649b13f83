//! Lift a chain through an auxiliary space: adjoints, condition checks,
//! and the composition `P = R T R*` that inherits positive
//! semidefiniteness from the lifted kernel.
//!
//! ```bash
//! cargo run -p hbspectra --example transfer_lifting
//! ```

use hbspectra::matrix::{RatMatrix, StateSpace, TargetDistribution};
use hbspectra::rat::{format_rationals, rat};
use hbspectra::spectral::certify_psd;
use hbspectra::transfer::{adjoint, compose_transfer, verify_transfer_conditions};

fn main() -> hbspectra::Result<()> {
    // Base space: two states weighted (2/3, 1/3). Lifted space: three
    // auxiliary states. R spreads each base state over the lifted space.
    let pi = TargetDistribution::new(StateSpace::indexed(2), vec![rat(2, 3), rat(1, 3)])?;
    let r = RatMatrix::from_i64_pairs(&[
        &[(3, 4), (1, 4), (0, 1)],
        &[(0, 1), (1, 2), (1, 2)],
    ]);

    // mu must be the pushforward pi R for the adjoint to be stochastic.
    let mut mu_vec = Vec::new();
    for y in 0..3 {
        let mut acc = rat(0, 1);
        for x in 0..2 {
            acc += pi.prob(x) * r.get(x, y);
        }
        mu_vec.push(acc);
    }
    let mu = TargetDistribution::new(StateSpace::indexed(3), mu_vec)?;
    println!("mu = pi R = [{}]", format_rationals(mu.probs()));

    let r_star = adjoint(&r, &pi, &mu)?;
    println!("adjoint R*:\n{r_star:?}");

    // The lifted kernel: a rank-one resampler, idempotent hence PSD.
    let mut t = RatMatrix::zeros(3, 3);
    for x in 0..3 {
        for y in 0..3 {
            t.set(x, y, mu.prob(y).clone());
        }
    }

    let report = verify_transfer_conditions(&r, &t, &pi, &mu)?;
    println!("\ncondition report: {report:#?}");
    assert!(report.all_pass());

    let p = compose_transfer(&r, &t, &pi, &mu)?;
    println!("\ncomposed chain P = R T R*:\n{:?}", p.matrix());
    let spectrum = certify_psd(&p, &pi, 1e-9)?;
    println!("eigenvalues: {:?}", spectrum.eigenvalues);
    println!("psd: {}", spectrum.psd);
    Ok(())
}
