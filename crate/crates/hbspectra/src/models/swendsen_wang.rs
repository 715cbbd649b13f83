//! Swendsen-Wang cluster dynamics, built two independent ways.
//!
//! The lifted route works on pairs `(sigma, A)` of a coloring and a subset
//! of its monochromatic edges, weighted `mu(sigma, A) = (w-1)^|A| / Z` with
//! the same normalizer as the coloring distribution. The lift `R` keeps the
//! coloring and samples a bond set; the kernel `T` resamples the coloring
//! uniformly among those consistent with the bond set (it is idempotent:
//! each row depends only on the bond set); the projection is the adjoint.
//! The composition `R T R*` is the Swendsen-Wang transition matrix.
//!
//! The direct route sums over bond subsets explicitly: each monochromatic
//! edge is kept with probability `(w-1)/w`, then every connected component
//! of the kept bonds is recolored uniformly. Both routes are exact
//! rational, so they can be compared entrywise.

use std::collections::BTreeMap;

use num_traits::One;

use crate::matrix::{RatMatrix, StateSpace, StochasticMatrix, TargetDistribution};
use crate::models::{EnumerationCaps, Graph, SpinSystem};
use crate::rat::{rat, rat_pow, rat_sum, Rat};
use crate::transfer::{compose_transfer, LiftingMatrix};
use crate::{Error, Result};

/// The full lifted construction.
#[derive(Debug, Clone)]
pub struct SwendsenWang {
    /// Coloring distribution on the base space.
    pub pi: TargetDistribution,
    /// Distribution on the lifted (coloring, bond set) space.
    pub mu: TargetDistribution,
    /// Bond-sampling lift, rows indexed by colorings.
    pub r: LiftingMatrix,
    /// Recoloring kernel on the lifted space; idempotent.
    pub t: StochasticMatrix,
    /// The composed Swendsen-Wang chain `R T R*`.
    pub p: StochasticMatrix,
}

struct ColoringSetup {
    assignments: Vec<Vec<usize>>,
    space: StateSpace,
    pi: TargetDistribution,
    /// Monochromatic edge indices per coloring, ascending.
    mono: Vec<Vec<usize>>,
}

fn coloring_setup(graph: &Graph, q: usize, w: &Rat, caps: &EnumerationCaps) -> Result<ColoringSetup> {
    let sys = SpinSystem::potts(graph.clone(), q, w.clone())?;
    let assignments = sys.enumerate(caps)?;
    let spec = crate::models::spin::build_spin_heatbath(&sys, caps)?;
    let space = spec.space().clone();
    let pi = spec.target()?;
    let mono: Vec<Vec<usize>> = assignments
        .iter()
        .map(|sigma| {
            graph
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| sigma[u] == sigma[v])
                .map(|(e, _)| e)
                .collect()
        })
        .collect();
    Ok(ColoringSetup { assignments, space, pi, mono })
}

fn bond_subset(mono: &[usize], mask: u32) -> Vec<usize> {
    mono.iter()
        .enumerate()
        .filter(|&(pos, _)| mask & (1 << pos) != 0)
        .map(|(_, &e)| e)
        .collect()
}

/// Vertex component ids under the subgraph with the given edges.
fn components(graph: &Graph, bond_edges: &[usize]) -> Vec<usize> {
    let n = graph.n_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in bond_edges {
        let (u, v) = graph.edges()[e];
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Builds the Swendsen-Wang chain through the lifted composition.
///
/// `w` is the exponential of the inverse temperature and must exceed 1 so
/// the lifted distribution stays strictly positive; `q >= 2`. The returned
/// kernel `T` carries a structural idempotence guarantee (rows within a
/// bond-set fiber are identical), and the composition is certified
/// reversible and positive semidefinite before being returned.
pub fn build_swendsen_wang(
    graph: &Graph,
    q: usize,
    w: &Rat,
    caps: &EnumerationCaps,
) -> Result<SwendsenWang> {
    if q < 2 {
        return Err(Error::InvalidInput("Swendsen-Wang needs q >= 2".into()));
    }
    if *w <= Rat::one() {
        return Err(Error::InvalidInput(
            "w must exceed 1; the lifted distribution degenerates at w = 1".into(),
        ));
    }
    if graph.n_edges() >= 31 {
        return Err(Error::CapExceeded("graphs with 31 or more edges are not enumerable".into()));
    }
    let setup = coloring_setup(graph, q, w, caps)?;

    // Lifted states: (coloring, subset of its monochromatic edges).
    let mut lifted_labels = Vec::new();
    let mut lifted: Vec<(usize, Vec<usize>)> = Vec::new();
    for (s, mono) in setup.mono.iter().enumerate() {
        let subsets = 1u32 << mono.len();
        if lifted.len() + subsets as usize > caps.max_lifted {
            return Err(Error::CapExceeded(format!(
                "lifted state count exceeds {}",
                caps.max_lifted
            )));
        }
        for mask in 0..subsets {
            let bonds = bond_subset(mono, mask);
            let suffix =
                bonds.iter().map(|e| format!("e{e}")).collect::<Vec<_>>().join(".");
            lifted_labels.push(format!("{}|{suffix}", setup.space.label(s)));
            lifted.push((s, bonds));
        }
    }
    let lifted_space = StateSpace::new(lifted_labels)?;
    let n_lifted = lifted.len();

    // mu(sigma, A) = (w-1)^|A| / Z with Z the coloring normalizer.
    let z: Rat = rat_sum(
        &setup
            .mono
            .iter()
            .map(|mono| rat_pow(w, mono.len()))
            .collect::<Vec<_>>(),
    );
    let w_minus_1 = w - Rat::one();
    let mu_probs: Vec<Rat> = lifted
        .iter()
        .map(|(_, bonds)| rat_pow(&w_minus_1, bonds.len()) / &z)
        .collect();
    let mu = TargetDistribution::new(lifted_space.clone(), mu_probs)?;

    // R(sigma, (tau, A)) = [sigma = tau] (w-1)^|A| w^-|E(sigma)|.
    let mut r = RatMatrix::zeros(setup.assignments.len(), n_lifted);
    for (l, (s, bonds)) in lifted.iter().enumerate() {
        let value = rat_pow(&w_minus_1, bonds.len()) / rat_pow(w, setup.mono[*s].len());
        r.set(*s, l, value);
    }
    let r = LiftingMatrix::new(r, &setup.pi, &mu)?;

    // T resamples the coloring given the bond set: uniform over the fiber
    // of lifted states sharing A, which are exactly the colorings constant
    // on the components of (V, A).
    let mut fibers: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (l, (_, bonds)) in lifted.iter().enumerate() {
        fibers.entry(bonds.clone()).or_default().push(l);
    }
    let mut t = RatMatrix::zeros(n_lifted, n_lifted);
    for (bonds, members) in &fibers {
        let comp = components(graph, bonds);
        let n_components = {
            let mut ids: Vec<usize> = comp.clone();
            ids.sort_unstable();
            ids.dedup();
            ids.len()
        };
        let expected = rat_pow(&rat(q as i64, 1), n_components);
        if rat(members.len() as i64, 1) != expected {
            return Err(Error::Internal(format!(
                "fiber size {} differs from q^components = {}",
                members.len(),
                expected
            )));
        }
        let share = rat(1, members.len() as i64);
        for &from in members {
            for &to in members {
                t.set(from, to, share.clone());
            }
        }
    }
    let t = StochasticMatrix::new(lifted_space, t)?;

    let p = compose_transfer(r.matrix(), t.matrix(), &setup.pi, &mu)?;
    Ok(SwendsenWang { pi: setup.pi, mu, r, t, p })
}

/// The Swendsen-Wang transition matrix by direct summation over bond
/// subsets and component recolorings; the independent cross-check for the
/// lifted composition. Accepts `w >= 1` (at `w = 1` every bond is dropped).
pub fn direct_swendsen_wang(
    graph: &Graph,
    q: usize,
    w: &Rat,
    caps: &EnumerationCaps,
) -> Result<StochasticMatrix> {
    if q < 2 {
        return Err(Error::InvalidInput("Swendsen-Wang needs q >= 2".into()));
    }
    if *w < Rat::one() {
        return Err(Error::InvalidInput("w must be at least 1".into()));
    }
    if graph.n_edges() >= 31 {
        return Err(Error::CapExceeded("graphs with 31 or more edges are not enumerable".into()));
    }
    let setup = coloring_setup(graph, q, w, caps)?;
    let n = setup.assignments.len();
    let nv = graph.n_vertices();

    let keep = (w - Rat::one()) / w; // per-edge inclusion probability
    let drop = Rat::one() / w;
    let q_inv = rat(1, q as i64);

    let mut p = RatMatrix::zeros(n, n);
    for (s, mono) in setup.mono.iter().enumerate() {
        for mask in 0..(1u32 << mono.len()) {
            let bonds = bond_subset(mono, mask);
            let prob = rat_pow(&keep, bonds.len()) * rat_pow(&drop, mono.len() - bonds.len());
            let comp = components(graph, &bonds);
            let mut reps: Vec<usize> = comp.clone();
            reps.sort_unstable();
            reps.dedup();
            let share = &prob * rat_pow(&q_inv, reps.len());

            // Every coloring constant on the components receives `share`.
            let mut choice = vec![0usize; reps.len()];
            loop {
                let mut tau = vec![0usize; nv];
                for v in 0..nv {
                    let idx = reps.iter().position(|&r| r == comp[v]).expect("component rep");
                    tau[v] = choice[idx];
                }
                // Index of tau in lexicographic enumeration order.
                let target = tau.iter().fold(0usize, |acc, &c| acc * q + c);
                let cur = p.get(s, target).clone();
                p.set(s, target, cur + &share);

                let mut pos = reps.len();
                let mut done = reps.is_empty();
                while pos > 0 {
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < q {
                        break;
                    }
                    choice[pos] = 0;
                    if pos == 0 {
                        done = true;
                    }
                }
                if done {
                    break;
                }
            }
        }
    }
    StochasticMatrix::new(setup.space, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use crate::spectral::{certify_psd, DEFAULT_PSD_TOLERANCE};
    use crate::transfer::adjoint;
    use num_traits::Zero;

    fn caps() -> EnumerationCaps {
        EnumerationCaps::default()
    }

    #[test]
    fn single_edge_row_and_spectrum() {
        let graph = Graph::path(2).unwrap();
        let sw = build_swendsen_wang(&graph, 2, &rat_int(2), &caps()).unwrap();
        let space = sw.p.space().clone();
        let aa = space.index_of("AA").unwrap();
        let row: Vec<Rat> = sw.p.row(aa).to_vec();
        assert_eq!(row, vec![rat(3, 8), rat(1, 8), rat(1, 8), rat(3, 8)]);

        let report = certify_psd(&sw.p, &sw.pi, DEFAULT_PSD_TOLERANCE).unwrap();
        assert!(report.psd);
        let expected = [1.0, 0.25, 0.0, 0.0];
        for (got, want) in report.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn lifted_equals_direct_on_small_graphs() {
        for graph in [Graph::path(2).unwrap(), Graph::path(3).unwrap()] {
            let sw = build_swendsen_wang(&graph, 2, &rat_int(2), &caps()).unwrap();
            let direct = direct_swendsen_wang(&graph, 2, &rat_int(2), &caps()).unwrap();
            assert_eq!(sw.p.matrix(), direct.matrix());
        }
    }

    #[test]
    fn kernel_is_exactly_idempotent() {
        let graph = Graph::path(2).unwrap();
        let sw = build_swendsen_wang(&graph, 2, &rat_int(2), &caps()).unwrap();
        let t = sw.t.matrix();
        assert_eq!(t.mul(t).unwrap(), *t);
    }

    #[test]
    fn adjoint_is_coloring_indicator() {
        // R*((sigma, A), tau) = [sigma = tau].
        let graph = Graph::path(2).unwrap();
        let sw = build_swendsen_wang(&graph, 2, &rat_int(2), &caps()).unwrap();
        let star = adjoint(sw.r.matrix(), &sw.pi, &sw.mu).unwrap();
        let lifted_labels = sw.mu.space().labels().to_vec();
        let base_labels = sw.pi.space().labels().to_vec();
        for (y, ylabel) in lifted_labels.iter().enumerate() {
            let coloring = ylabel.split('|').next().unwrap();
            for (x, xlabel) in base_labels.iter().enumerate() {
                let expected = if coloring == xlabel { rat_int(1) } else { Rat::zero() };
                assert_eq!(*star.get(y, x), expected, "({ylabel}, {xlabel})");
            }
        }
    }

    #[test]
    fn strong_coupling_concentrates_on_cluster_flips() {
        let graph = Graph::path(2).unwrap();
        let direct = direct_swendsen_wang(&graph, 2, &rat_int(100), &caps()).unwrap();
        let space = direct.space().clone();
        let aa = space.index_of("AA").unwrap();
        let ab = space.index_of("AB").unwrap();
        let bb = space.index_of("BB").unwrap();
        assert_eq!(*direct.get(aa, ab), rat(1, 400));
        assert_eq!(*direct.get(aa, aa), rat(199, 400));
        assert_eq!(*direct.get(aa, bb), rat(199, 400));
    }

    #[test]
    fn no_edges_means_uniform_rows() {
        let graph = Graph::new(vec!["u".into(), "v".into()], vec![]).unwrap();
        let direct = direct_swendsen_wang(&graph, 2, &rat_int(1), &caps()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(*direct.get(i, j), rat(1, 4));
            }
        }
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        let graph = Graph::path(2).unwrap();
        assert!(build_swendsen_wang(&graph, 1, &rat_int(2), &caps()).is_err());
        assert!(build_swendsen_wang(&graph, 2, &rat_int(1), &caps()).is_err());
        assert!(direct_swendsen_wang(&graph, 2, &rat(1, 2), &caps()).is_err());
    }
}
