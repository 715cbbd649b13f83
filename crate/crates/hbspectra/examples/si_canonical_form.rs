//! Classify stochastic idempotent matrices and compute their canonical
//! block decomposition, including the ephemeral-state case that blocks
//! both the direct-sum form and reversibility.
//!
//! ```bash
//! cargo run -p hbspectra --example si_canonical_form
//! ```

use hbspectra::matrix::RatMatrix;
use hbspectra::rat::format_rationals;
use hbspectra::sicanon::{is_idempotent, reversible_si_equivalence, si_classify, si_decompose};

fn main() -> hbspectra::Result<()> {
    // A matrix often quoted as idempotent; exact multiplication says no.
    let pretender = RatMatrix::from_i64_pairs(&[
        &[(1, 2), (1, 2), (0, 1)],
        &[(1, 1), (0, 1), (0, 1)],
        &[(0, 1), (1, 1), (0, 1)],
    ]);
    println!("pretender is idempotent: {}", is_idempotent(&pretender)?);
    println!("pretender squared, row 0: [{}]", format_rationals(pretender.mul(&pretender)?.row(0)));

    // The idempotent neighbor: one rank-one block and one ephemeral state
    // (its column is identically zero, so nothing ever reaches it).
    let ephemeral = RatMatrix::from_i64_pairs(&[
        &[(1, 2), (1, 2), (0, 1)],
        &[(1, 2), (1, 2), (0, 1)],
        &[(1, 2), (1, 2), (0, 1)],
    ]);
    println!("\nephemeral example classifies as {:?}", si_classify(&ephemeral)?);
    let d = si_decompose(&ephemeral)?;
    println!("decomposition:\n{}", d.to_json_string());
    assert_eq!(d.reassemble(), ephemeral);

    // With a zero column the three equivalent properties all fail...
    let eq = reversible_si_equivalence(&ephemeral)?;
    println!(
        "no zero columns: {}, direct sum: {}, reversible: {}",
        eq.no_zero_columns,
        eq.direct_sum,
        eq.reversible_witness.is_some()
    );

    // ... and without one they all hold, with an explicit diagonal witness.
    let direct_sum = RatMatrix::from_i64_pairs(&[
        &[(1, 2), (1, 2), (0, 1)],
        &[(1, 2), (1, 2), (0, 1)],
        &[(0, 1), (0, 1), (1, 1)],
    ]);
    let eq = reversible_si_equivalence(&direct_sum)?;
    println!(
        "\ndirect-sum example witness: [{}]",
        format_rationals(&eq.reversible_witness.unwrap())
    );
    Ok(())
}
