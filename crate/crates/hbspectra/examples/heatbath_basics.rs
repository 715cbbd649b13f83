//! Build a heat-bath chain from a partition spec: validation, label
//! kernels, exact assembly, and the JSON interchange format.
//!
//! ```bash
//! cargo run -p hbspectra --example heatbath_basics
//! ```

use hbspectra::heatbath::{build_chain, build_label_kernel, validate_spec, HeatBathSpec, LabelSpec};
use hbspectra::matrix::StateSpace;
use hbspectra::rat::{rat, uniform_probs};

fn main() -> hbspectra::Result<()> {
    // Three states with a uniform target and two labels. Label `a` can
    // merge states 0 and 1, label `b` can merge 1 and 2.
    let spec = HeatBathSpec::new(
        StateSpace::indexed(3),
        uniform_probs(3),
        vec![
            LabelSpec::new("a", rat(1, 2), vec![vec![0, 1], vec![2]]),
            LabelSpec::new("b", rat(1, 2), vec![vec![0], vec![1, 2]]),
        ],
    );

    let report = validate_spec(&spec);
    println!("validation: {}", report.render());

    for label in spec.labels() {
        let kernel = build_label_kernel(&spec, &label.id)?;
        println!("\nkernel P_{}:", label.id);
        println!("{:?}", kernel.matrix.matrix());
        // Each kernel is idempotent: resampling twice is resampling once.
        let m = kernel.matrix.matrix();
        assert_eq!(m.mul(m)?, *m);
    }

    let p = build_chain(&spec)?;
    println!("\nassembled chain P = (P_a + P_b) / 2:");
    println!("{:?}", p.matrix());

    // A spec that breaks the partition axioms is reported with witnesses.
    let broken = HeatBathSpec::new(
        StateSpace::indexed(3),
        uniform_probs(3),
        vec![LabelSpec::new("a", rat(1, 1), vec![vec![0, 1], vec![1, 2]])],
    );
    println!("\nbroken spec:\n{}", validate_spec(&broken).render());

    println!("\ninterchange JSON:\n{}", spec.to_json_string());
    Ok(())
}
