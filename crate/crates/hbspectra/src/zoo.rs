//! Small named instances used by tests, examples, and the docs.
//!
//! Everything here is desk-scale on purpose: the largest chain has a few
//! dozen states, so exact matrix powers and full spectra stay cheap.

use crate::heatbath::{HeatBathSpec, LabelSpec};
use crate::matrix::StateSpace;
use crate::models::{
    build_contingency_chain, build_spin_heatbath, ContingencyInstance, EnumerationCaps, Graph,
    SpinSystem,
};
use crate::rat::{rat, rat_int, uniform_probs, Rat};
use crate::Result;

/// Three states, uniform target, two overlapping-coarseness labels.
/// Spectrum (1, 3/4, 1/4); the standard worked example.
pub fn three_state_two_label() -> HeatBathSpec {
    HeatBathSpec::new(
        StateSpace::indexed(3),
        uniform_probs(3),
        vec![
            LabelSpec::new("a", rat(1, 2), vec![vec![0, 1], vec![2]]),
            LabelSpec::new("b", rat(1, 2), vec![vec![0], vec![1, 2]]),
        ],
    )
}

/// Singleton blocks everywhere: the identity chain.
pub fn identity_spec(n: usize) -> HeatBathSpec {
    HeatBathSpec::new(
        StateSpace::indexed(n),
        uniform_probs(n),
        vec![LabelSpec::new("a", rat_int(1), (0..n).map(|i| vec![i]).collect())],
    )
}

/// One block covering everything: every row of the chain equals pi.
pub fn single_block_spec() -> HeatBathSpec {
    HeatBathSpec::new(
        StateSpace::indexed(3),
        vec![rat(1, 2), rat(1, 3), rat(1, 6)],
        vec![LabelSpec::new("a", rat_int(1), vec![vec![0, 1, 2]])],
    )
}

/// Spin chains: Ising and Potts on small paths, cycles, and cliques, plus
/// proper colorings (hard constraints) where the state space is nonempty.
pub fn spin_chains(caps: &EnumerationCaps) -> Result<Vec<(String, HeatBathSpec)>> {
    let mut out: Vec<(String, HeatBathSpec)> = Vec::new();
    let systems: Vec<(String, SpinSystem)> = vec![
        ("ising-path2-w2".into(), SpinSystem::ising(Graph::path(2)?, rat_int(2))?),
        ("ising-path3-w2".into(), SpinSystem::ising(Graph::path(3)?, rat_int(2))?),
        ("ising-cycle4-w2".into(), SpinSystem::ising(Graph::cycle(4)?, rat_int(2))?),
        ("ising-complete4-w3/2".into(), SpinSystem::ising(Graph::complete(4)?, rat(3, 2))?),
        ("potts3-path3-w2".into(), SpinSystem::potts(Graph::path(3)?, 3, rat_int(2))?),
        ("colorings3-path3".into(), SpinSystem::proper_colorings(Graph::path(3)?, 3)?),
        ("colorings3-cycle3".into(), SpinSystem::proper_colorings(Graph::cycle(3)?, 3)?),
        ("colorings2-path3".into(), SpinSystem::proper_colorings(Graph::path(3)?, 2)?),
    ];
    for (name, sys) in systems {
        out.push((name, build_spin_heatbath(&sys, caps)?));
    }
    Ok(out)
}

/// Contingency-table margins small enough to enumerate instantly.
pub fn contingency_instances() -> Vec<(String, ContingencyInstance)> {
    vec![
        (
            "tables-1,1x1,1".into(),
            ContingencyInstance::new(vec![1, 1], vec![1, 1]).expect("margins"),
        ),
        (
            "tables-2,2x2,2".into(),
            ContingencyInstance::new(vec![2, 2], vec![2, 2]).expect("margins"),
        ),
        (
            "tables-1,1,1x1,1,1".into(),
            ContingencyInstance::new(vec![1, 1, 1], vec![1, 1, 1]).expect("margins"),
        ),
        (
            "tables-2,1x1,2".into(),
            ContingencyInstance::new(vec![2, 1], vec![1, 2]).expect("margins"),
        ),
        (
            "tables-2,2x1,3".into(),
            ContingencyInstance::new(vec![2, 2], vec![1, 3]).expect("margins"),
        ),
    ]
}

/// Subsquare chains for the margin zoo.
pub fn contingency_chains(caps: &EnumerationCaps) -> Result<Vec<(String, HeatBathSpec)>> {
    contingency_instances()
        .into_iter()
        .map(|(name, inst)| Ok((name, build_contingency_chain(&inst, caps)?)))
        .collect()
}

/// Every heat-bath chain in the zoo.
pub fn heatbath_chains(caps: &EnumerationCaps) -> Result<Vec<(String, HeatBathSpec)>> {
    let mut out = vec![
        ("three-state-two-label".to_string(), three_state_two_label()),
        ("identity3".to_string(), identity_spec(3)),
        ("single-block".to_string(), single_block_spec()),
    ];
    out.extend(spin_chains(caps)?);
    out.extend(contingency_chains(caps)?);
    Ok(out)
}

/// Graphs and parameters for the cluster-dynamics comparisons.
pub fn swendsen_wang_instances() -> Result<Vec<(String, Graph, usize, Rat)>> {
    Ok(vec![
        ("sw-edge-q2-w2".into(), Graph::path(2)?, 2, rat_int(2)),
        ("sw-path3-q2-w2".into(), Graph::path(3)?, 2, rat_int(2)),
        ("sw-cycle3-q2-w3".into(), Graph::cycle(3)?, 2, rat_int(3)),
        ("sw-path3-q3-w2".into(), Graph::path(3)?, 3, rat_int(2)),
    ])
}
