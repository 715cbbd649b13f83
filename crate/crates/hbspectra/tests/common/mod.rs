//! Shared randomized-instance generators for the integration suites.
//! Everything is driven by a fixed-seed ChaCha stream, so failures are
//! reproducible by seed.

use hbspectra::heatbath::{HeatBathSpec, LabelSpec};
use hbspectra::matrix::{RatMatrix, StateSpace, StochasticMatrix, TargetDistribution};
use hbspectra::rat::{rat, rat_sum, Rat};
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `lo..=hi`.
pub fn rand_in(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() as usize) % (hi - lo + 1)
}

/// Strictly positive rational probabilities summing to exactly 1.
pub fn random_probs(rng: &mut ChaCha8Rng, n: usize, max_numer: usize) -> Vec<Rat> {
    let numerators: Vec<i64> =
        (0..n).map(|_| rand_in(rng, 1, max_numer) as i64).collect();
    let total: i64 = numerators.iter().sum();
    numerators.into_iter().map(|v| rat(v, total)).collect()
}

/// Nonnegative rationals summing to exactly 1, at least one positive.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize, max_numer: usize) -> Vec<Rat> {
    loop {
        let numerators: Vec<i64> =
            (0..n).map(|_| rand_in(rng, 0, max_numer) as i64).collect();
        let total: i64 = numerators.iter().sum();
        if total > 0 {
            return numerators.into_iter().map(|v| rat(v, total)).collect();
        }
    }
}

/// Random partition of `0..n` into nonempty blocks.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let groups = rand_in(rng, 1, n);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); groups];
    for state in 0..n {
        blocks[rand_in(rng, 0, groups - 1)].push(state);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

/// Random valid heat-bath spec: positive rational target, 1..=max_labels
/// labels with random partitions and positive weights.
pub fn random_spec(rng: &mut ChaCha8Rng, max_n: usize, max_labels: usize) -> HeatBathSpec {
    let n = rand_in(rng, 2, max_n);
    let space = StateSpace::indexed(n);
    let pi = random_probs(rng, n, 20);
    let n_labels = rand_in(rng, 1, max_labels);
    let rho = random_probs(rng, n_labels, 12);
    let labels = (0..n_labels)
        .map(|i| LabelSpec::new(format!("l{i}"), rho[i].clone(), random_partition(rng, n)))
        .collect();
    HeatBathSpec::new(space, pi, labels)
}

/// Fisher-Yates permutation of `0..n`.
pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rand_in(rng, 0, i));
    }
    perm
}

/// Random SI matrix built from the canonical block form and then permuted:
/// `k` rank-one diagonal blocks plus `t` ephemeral coupling rows. Returns
/// the permuted matrix with its block count and zero-column count.
pub fn random_si_matrix(
    rng: &mut ChaCha8Rng,
    max_blocks: usize,
    max_block_size: usize,
    max_ephemeral: usize,
) -> (RatMatrix, usize, usize) {
    let k = rand_in(rng, 1, max_blocks);
    let sizes: Vec<usize> = (0..k).map(|_| rand_in(rng, 1, max_block_size)).collect();
    let t = rand_in(rng, 0, max_ephemeral);
    let body: usize = sizes.iter().sum();
    let n = body + t;

    let mut u = RatMatrix::zeros(n, n);
    let mut offsets = Vec::with_capacity(k);
    let mut cursor = 0usize;
    let mut block_pis = Vec::with_capacity(k);
    for &size in &sizes {
        offsets.push(cursor);
        let pi = random_probs(rng, size, 9);
        for x in cursor..cursor + size {
            for (j, p) in pi.iter().enumerate() {
                u.set(x, cursor + j, p.clone());
            }
        }
        block_pis.push(pi);
        cursor += size;
    }
    for e in 0..t {
        let coeffs = random_simplex_point(rng, k, 9);
        for (b, coeff) in coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (j, p) in block_pis[b].iter().enumerate() {
                u.set(body + e, offsets[b] + j, coeff * p);
            }
        }
    }

    let perm = random_permutation(rng, n);
    let m = u.permute_conjugate(&perm).expect("square");
    (m, k, t)
}

/// Random reversible chain: a symmetric positive-diagonal rational joint
/// matrix is row-normalized; its row masses give the stationary target.
pub fn random_reversible(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (StochasticMatrix, TargetDistribution) {
    let mut joint = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            // Positive diagonal keeps row masses nonzero; off-diagonal
            // entries may vanish.
            let v = if i == j {
                rat(rand_in(rng, 1, 9) as i64, 1)
            } else {
                rat(rand_in(rng, 0, 6) as i64, 1)
            };
            joint.set(i, j, v.clone());
            joint.set(j, i, v);
        }
    }
    let row_masses: Vec<Rat> = (0..n).map(|i| rat_sum(joint.row(i))).collect();
    let total = rat_sum(&row_masses);
    let mut p = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p.set(i, j, joint.get(i, j) / &row_masses[i]);
        }
    }
    let space = StateSpace::indexed(n);
    let chain = StochasticMatrix::new(space.clone(), p).expect("row-normalized");
    let pi = TargetDistribution::new(
        space,
        row_masses.into_iter().map(|m| m / &total).collect(),
    )
    .expect("positive row masses");
    (chain, pi)
}
