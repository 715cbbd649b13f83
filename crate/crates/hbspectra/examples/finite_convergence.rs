//! Chains that reach a fixed matrix power in finitely many steps: find the
//! settling power, inspect the idempotent limit, and see why reversible
//! settling chains are already idempotent.
//!
//! ```bash
//! cargo run -p hbspectra --example finite_convergence
//! ```

use hbspectra::matrix::{RatMatrix, StateSpace, StochasticMatrix, TargetDistribution};
use hbspectra::rat::rat;
use hbspectra::sicanon::{reversible_settles_implies_idempotent, settle_analysis};

fn chain(rows: &[&[(i64, i64)]]) -> hbspectra::Result<StochasticMatrix> {
    let m = RatMatrix::from_i64_pairs(rows);
    StochasticMatrix::new(StateSpace::indexed(m.rows()), m)
}

fn main() -> hbspectra::Result<()> {
    // A transient path into an absorbing state: settles at m = 2, but the
    // matrix itself is not in the rank-one-blocks-plus-ephemeral shape
    // because state 0 feeds state 1 through a nonzero column.
    let p = chain(&[
        &[(0, 1), (1, 1), (0, 1)],
        &[(0, 1), (0, 1), (1, 1)],
        &[(0, 1), (0, 1), (1, 1)],
    ])?;
    let report = settle_analysis(&p, None)?;
    println!("absorbing path:");
    println!("  settles: {} at m = {:?}", report.settles, report.m);
    println!("  spectrum contained in {{0, 1}}: {}", report.spectrum_binary);
    println!("  recurrent blocks: {:?}", report.recurrent_blocks);
    println!("  strict block shape: {}", report.strict_form);

    // The periodic swap never settles; its spectrum contains -1.
    let swap = chain(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]])?;
    let report = settle_analysis(&swap, Some(64))?;
    println!("\nswap: settles = {}, binary spectrum = {}", report.settles, report.spectrum_binary);

    // Reversible + settling forces idempotence: the settled limit is the
    // matrix itself. Any rank-one-rows chain settles at m = 1.
    let rank_one = chain(&[&[(2, 3), (1, 3)], &[(2, 3), (1, 3)]])?;
    let pi = TargetDistribution::new(StateSpace::indexed(2), vec![rat(2, 3), rat(1, 3)])?;
    reversible_settles_implies_idempotent(&rank_one, &pi)?;
    println!("\nreversible settling chain confirmed idempotent");
    Ok(())
}
