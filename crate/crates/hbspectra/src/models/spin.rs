//! Single-site dynamics for spin systems.
//!
//! States are assignments of spins to vertices, possibly restricted by a
//! hard admissibility constraint, weighted by a positive rational weight.
//! The single-site chain picks a vertex uniformly and resamples its spin
//! from the target conditioned on the other vertices staying fixed; in
//! heat-bath terms the labels are the vertices and the block of a state
//! under vertex `v` is the set of admissible one-site modifications at `v`.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::heatbath::{HeatBathSpec, LabelSpec};
use crate::matrix::StateSpace;
use crate::models::{EnumerationCaps, Graph};
use crate::rat::{rat, rat_int, rat_pow, Rat};
use crate::{Error, Result};

type AdmissiblePredicate = Box<dyn Fn(&Graph, &[usize]) -> bool>;
type WeightFunction = Box<dyn Fn(&Graph, &[usize]) -> Rat>;

/// A spin system: a graph, a finite spin set, an admissibility predicate
/// restricting the state space, and a positive weight per admissible
/// assignment (the target distribution is the normalized weight).
pub struct SpinSystem {
    graph: Graph,
    spin_names: Vec<String>,
    admissible: AdmissiblePredicate,
    weight: WeightFunction,
}

fn spin_names(q: usize) -> Vec<String> {
    if q <= 26 {
        (0..q).map(|k| ((b'A' + k as u8) as char).to_string()).collect()
    } else {
        (0..q).map(|k| format!("c{k}")).collect()
    }
}

/// Number of edges whose endpoints share a spin.
pub(crate) fn monochromatic_edges(graph: &Graph, sigma: &[usize]) -> usize {
    graph.edges().iter().filter(|&&(u, v)| sigma[u] == sigma[v]).count()
}

impl SpinSystem {
    /// Potts model with `q` spins: soft constraints, weight `w^mono(sigma)`
    /// where `mono` counts monochromatic edges. `w` is the exponential of
    /// the inverse temperature and must be a rational at least 1 so that
    /// every weight stays exact.
    pub fn potts(graph: Graph, q: usize, w: Rat) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput("the Potts model needs q >= 2".into()));
        }
        if w < Rat::one() {
            return Err(Error::InvalidInput("edge weight w must be at least 1".into()));
        }
        Ok(Self {
            graph,
            spin_names: spin_names(q),
            admissible: Box::new(|_, _| true),
            weight: Box::new(move |g, sigma| rat_pow(&w, monochromatic_edges(g, sigma))),
        })
    }

    /// Ising model: the two-spin Potts model.
    pub fn ising(graph: Graph, w: Rat) -> Result<Self> {
        Self::potts(graph, 2, w)
    }

    /// Proper q-colorings: hard constraint forbidding monochromatic edges,
    /// uniform weight.
    pub fn proper_colorings(graph: Graph, q: usize) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidInput("colorings need q >= 1".into()));
        }
        Ok(Self {
            graph,
            spin_names: spin_names(q),
            admissible: Box::new(|g, sigma| monochromatic_edges(g, sigma) == 0),
            weight: Box::new(|_, _| rat_int(1)),
        })
    }

    /// Fully custom system.
    pub fn custom(
        graph: Graph,
        spin_names: Vec<String>,
        admissible: AdmissiblePredicate,
        weight: WeightFunction,
    ) -> Result<Self> {
        if spin_names.is_empty() {
            return Err(Error::InvalidInput("spin set must be nonempty".into()));
        }
        Ok(Self { graph, spin_names, admissible, weight })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n_spins(&self) -> usize {
        self.spin_names.len()
    }

    fn state_label(&self, sigma: &[usize]) -> String {
        if self.spin_names.iter().all(|s| s.len() == 1) {
            sigma.iter().map(|&k| self.spin_names[k].as_str()).collect()
        } else {
            sigma
                .iter()
                .map(|&k| self.spin_names[k].as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Enumerates the admissible assignments in lexicographic spin order.
    pub fn enumerate(&self, caps: &EnumerationCaps) -> Result<Vec<Vec<usize>>> {
        let n = self.graph.n_vertices();
        let q = self.n_spins();
        let mut out = Vec::new();
        let mut sigma = vec![0usize; n];
        loop {
            if (self.admissible)(&self.graph, &sigma) {
                if out.len() == caps.max_states {
                    return Err(Error::CapExceeded(format!(
                        "spin state space exceeds {} states",
                        caps.max_states
                    )));
                }
                out.push(sigma.clone());
            }
            // Odometer increment.
            let mut pos = n;
            while pos > 0 {
                pos -= 1;
                sigma[pos] += 1;
                if sigma[pos] < q {
                    break;
                }
                sigma[pos] = 0;
                if pos == 0 {
                    return Ok(out);
                }
            }
            if n == 0 {
                return Ok(out);
            }
        }
    }
}

/// Builds the single-site heat-bath spec for a spin system.
///
/// Labels are the vertices with uniform selection weight. The block of a
/// state under vertex `v` collects all admissible states that agree with it
/// off `v`; the target is the normalized weight.
pub fn build_spin_heatbath(sys: &SpinSystem, caps: &EnumerationCaps) -> Result<HeatBathSpec> {
    let assignments = sys.enumerate(caps)?;
    if assignments.is_empty() {
        return Err(Error::InvalidInput("no admissible spin assignments".into()));
    }
    let labels_vec: Vec<String> = assignments.iter().map(|s| sys.state_label(s)).collect();
    let space = StateSpace::new(labels_vec)?;

    let mut weights = Vec::with_capacity(assignments.len());
    for sigma in &assignments {
        let w = (sys.weight)(&sys.graph, sigma);
        if !w.is_positive() {
            return Err(Error::InvalidInput(format!(
                "state `{}` has nonpositive weight",
                sys.state_label(sigma)
            )));
        }
        weights.push(w);
    }
    let total: Rat = crate::rat::rat_sum(&weights);
    let pi: Vec<Rat> = weights.into_iter().map(|w| w / &total).collect();

    let n_vertices = sys.graph.n_vertices();
    let rho = rat(1, n_vertices as i64);
    let mut labels = Vec::with_capacity(n_vertices);
    for v in 0..n_vertices {
        // Group states by their assignment away from v.
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (idx, sigma) in assignments.iter().enumerate() {
            let mut key = sigma.clone();
            key[v] = usize::MAX;
            groups.entry(key).or_default().push(idx);
        }
        let blocks: Vec<Vec<usize>> = groups.into_values().collect();
        labels.push(LabelSpec::new(sys.graph.vertices()[v].clone(), rho.clone(), blocks));
    }

    Ok(HeatBathSpec::new(space, pi, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatbath::{build_chain, validate_spec};
    use crate::matrix::RatMatrix;
    use crate::rat::{rat, rat_int};

    fn single_edge_ising() -> HeatBathSpec {
        let sys = SpinSystem::ising(Graph::path(2).unwrap(), rat_int(2)).unwrap();
        build_spin_heatbath(&sys, &EnumerationCaps::default()).unwrap()
    }

    #[test]
    fn single_edge_ising_chain_entries() {
        let spec = single_edge_ising();
        assert!(validate_spec(&spec).is_valid());
        let space = spec.space().clone();
        assert_eq!(space.labels(), &["AA", "AB", "BA", "BB"]);
        // Weights 2,1,1,2: pi = (1/3, 1/6, 1/6, 1/3).
        assert_eq!(spec.pi_raw()[0], rat(1, 3));
        assert_eq!(spec.pi_raw()[1], rat(1, 6));
        let p = build_chain(&spec).unwrap();
        let aa = space.index_of("AA").unwrap();
        let ab = space.index_of("AB").unwrap();
        assert_eq!(*p.get(aa, ab), rat(1, 6));
        assert_eq!(*p.get(aa, aa), rat(2, 3));
    }

    // Independent oracle for the single-site transition rule:
    // P(sigma, tau) = (1/|V|) sum over v with tau in the one-site
    // neighborhood of sigma at v of pi(tau) / pi(neighborhood).
    fn single_site_oracle(sys: &SpinSystem, caps: &EnumerationCaps) -> RatMatrix {
        let assignments = sys.enumerate(caps).unwrap();
        let weights: Vec<Rat> =
            assignments.iter().map(|s| (sys.weight)(sys.graph(), s)).collect();
        let total = crate::rat::rat_sum(&weights);
        let pi: Vec<Rat> = weights.iter().map(|w| w / &total).collect();
        let nv = sys.graph().n_vertices();
        let n = assignments.len();
        let mut p = RatMatrix::zeros(n, n);
        for (i, sigma) in assignments.iter().enumerate() {
            for v in 0..nv {
                let neighborhood: Vec<usize> = assignments
                    .iter()
                    .enumerate()
                    .filter(|(_, tau)| {
                        tau.iter().enumerate().all(|(u, &s)| u == v || s == sigma[u])
                    })
                    .map(|(j, _)| j)
                    .collect();
                let mass =
                    crate::rat::rat_sum(&neighborhood.iter().map(|&j| pi[j].clone()).collect::<Vec<_>>());
                for &j in &neighborhood {
                    let contrib = &pi[j] / &mass / rat_int(nv as i64);
                    let cur = p.get(i, j).clone();
                    p.set(i, j, cur + contrib);
                }
            }
        }
        p
    }

    #[test]
    fn chain_matches_single_site_oracle() {
        let caps = EnumerationCaps::default();
        for (sys, name) in [
            (SpinSystem::ising(Graph::path(2).unwrap(), rat_int(2)).unwrap(), "ising path2"),
            (SpinSystem::ising(Graph::path(3).unwrap(), rat_int(2)).unwrap(), "ising path3"),
            (SpinSystem::potts(Graph::cycle(3).unwrap(), 3, rat(3, 2)).unwrap(), "potts3 cycle3"),
            (SpinSystem::proper_colorings(Graph::path(3).unwrap(), 3).unwrap(), "col3 path3"),
        ] {
            let spec = build_spin_heatbath(&sys, &caps).unwrap();
            let p = build_chain(&spec).unwrap();
            let oracle = single_site_oracle(&sys, &caps);
            assert_eq!(p.matrix(), &oracle, "{name}");
        }
    }

    #[test]
    fn infinite_temperature_rows_are_uniform_within_blocks() {
        // w = 1 gives uniform pi; every kernel row is uniform over its block.
        let sys = SpinSystem::ising(Graph::path(2).unwrap(), rat_int(1)).unwrap();
        let spec = build_spin_heatbath(&sys, &EnumerationCaps::default()).unwrap();
        for label in spec.labels() {
            let kernel = crate::heatbath::build_label_kernel(&spec, &label.id).unwrap();
            for block in &label.blocks {
                let share = rat(1, block.len() as i64);
                for &x in block {
                    for &y in block {
                        assert_eq!(kernel.matrix.get(x, y), &share);
                    }
                }
            }
        }
    }

    #[test]
    fn hard_constraint_single_edge_colorings_give_identity() {
        let sys = SpinSystem::proper_colorings(Graph::path(2).unwrap(), 2).unwrap();
        let spec = build_spin_heatbath(&sys, &EnumerationCaps::default()).unwrap();
        assert_eq!(spec.space().labels(), &["AB", "BA"]);
        let p = build_chain(&spec).unwrap();
        assert_eq!(p.matrix(), &RatMatrix::identity(2));
    }

    #[test]
    fn empty_state_space_is_an_error() {
        // A triangle has no proper 2-coloring.
        let sys = SpinSystem::proper_colorings(Graph::cycle(3).unwrap(), 2).unwrap();
        assert!(build_spin_heatbath(&sys, &EnumerationCaps::default()).is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let sys = SpinSystem::ising(Graph::path(4).unwrap(), rat_int(2)).unwrap();
        let caps = EnumerationCaps { max_states: 3, max_lifted: 10 };
        assert!(matches!(build_spin_heatbath(&sys, &caps), Err(Error::CapExceeded(_))));
    }
}
