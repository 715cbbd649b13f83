//! Canonical structure of stochastic idempotent (SI) matrices.
//!
//! An SI matrix with `t` zero columns is permutation-similar to a block
//! form with `k` rank-one diagonal blocks `1 pi_i` (each `pi_i` positive,
//! summing to 1) followed by `t` ephemeral rows `[p_1 pi_1 ... p_k pi_k 0]`
//! with `sum_i p_i = 1`. The rank of the matrix equals `k`, and the matrix
//! is permutation-similar to a plain direct sum of rank-one blocks exactly
//! when `t = 0`, which is also exactly when it is reversible with respect
//! to some positive diagonal.
//!
//! [`settle_analysis`] covers the wider class of chains that reach a fixed
//! matrix power: minimal `m` with `M^(m+1) = M^m`. Such chains have
//! spectrum contained in `{0, 1}`; reversible ones are already idempotent.
//! All structure here is decided in exact rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{
    check_reversible, strongly_connected_components, zero_columns, RatMatrix, StochasticMatrix,
    StochasticVerdict, TargetDistribution,
};
use crate::rat::{format_rational, parse_rational, rat_sum, Rat};
use crate::{Error, Result};

/// Exact test `M * M == M`.
pub fn is_idempotent(m: &RatMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    Ok(m.mul(m)? == *m)
}

/// Exact rank by fraction-free (Bareiss) elimination.
///
/// Rows are first cleared of denominators (a row scaling, which preserves
/// rank), then eliminated over the integers so every intermediate division
/// is exact.
pub fn rank(m: &RatMatrix) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let lcm = m
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            m.row(i)
                .iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let mut rank = 0usize;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for i in (rank + 1)..rows {
            for j in (col + 1)..cols {
                let num = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Classification of a square rational matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiClass {
    NotStochastic,
    NotIdempotent,
    /// Stochastic idempotent with `t` zero columns and exact rank `r`.
    Si { t: usize, r: usize },
}

/// Classifies a square matrix as SI or not; for SI matrices reports the
/// zero-column count and the exact rank.
pub fn si_classify(m: &RatMatrix) -> Result<SiClass> {
    if crate::matrix::check_stochastic(m)? != StochasticVerdict::Stochastic {
        return Ok(SiClass::NotStochastic);
    }
    if !is_idempotent(m)? {
        return Ok(SiClass::NotIdempotent);
    }
    Ok(SiClass::Si { t: zero_columns(m).len(), r: rank(m) })
}

/// One rank-one block of the canonical form: its states (original indices,
/// ascending) and the positive stationary row shared by all of them.
#[derive(Clone, PartialEq, Eq)]
pub struct SiBlock {
    pub states: Vec<usize>,
    pub pi: Vec<Rat>,
}

impl std::fmt::Debug for SiBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pi: Vec<String> = self.pi.iter().map(format_rational).collect();
        write!(f, "SiBlock {{ states: {:?}, pi: [{}] }}", self.states, pi.join(", "))
    }
}

/// Canonical decomposition of an SI matrix.
///
/// `permutation[j]` is the original state index occupying position `j` of
/// the canonical ordering: block states first (blocks ordered by smallest
/// original index), then ephemeral states ascending. `ephemeral_p[e][i]` is
/// the mass ephemeral row `e` places on block `i`; each such row of
/// coefficients sums to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiDecomposition {
    pub permutation: Vec<usize>,
    pub blocks: Vec<SiBlock>,
    pub ephemeral_states: Vec<usize>,
    pub ephemeral_p: Vec<Vec<Rat>>,
    pub k: usize,
    pub t: usize,
}

impl SiDecomposition {
    /// Rebuilds the original matrix exactly from the decomposition data.
    pub fn reassemble(&self) -> RatMatrix {
        let n = self.permutation.len();
        let mut m = RatMatrix::zeros(n, n);
        for block in &self.blocks {
            for &x in &block.states {
                for (j, &y) in block.states.iter().enumerate() {
                    m.set(x, y, block.pi[j].clone());
                }
            }
        }
        for (e_idx, &e) in self.ephemeral_states.iter().enumerate() {
            for (i, block) in self.blocks.iter().enumerate() {
                let coeff = &self.ephemeral_p[e_idx][i];
                for (j, &y) in block.states.iter().enumerate() {
                    m.set(e, y, coeff * &block.pi[j]);
                }
            }
        }
        m
    }

    pub fn to_json_string(&self) -> String {
        let dto = DecompositionDto {
            permutation: self.permutation.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDto {
                    states: b.states.clone(),
                    pi: b.pi.iter().map(format_rational).collect(),
                })
                .collect(),
            ephemeral: EphemeralDto {
                states: self.ephemeral_states.clone(),
                p: self
                    .ephemeral_p
                    .iter()
                    .map(|row| row.iter().map(format_rational).collect())
                    .collect(),
            },
            k: self.k,
            t: self.t,
        };
        serde_json::to_string_pretty(&dto).expect("decomposition serialization")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let dto: DecompositionDto = serde_json::from_str(text)?;
        let blocks = dto
            .blocks
            .into_iter()
            .map(|b| {
                Ok(SiBlock {
                    states: b.states,
                    pi: b.pi.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ephemeral_p = dto
            .ephemeral
            .p
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<_>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            permutation: dto.permutation,
            blocks,
            ephemeral_states: dto.ephemeral.states,
            ephemeral_p,
            k: dto.k,
            t: dto.t,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionDto {
    permutation: Vec<usize>,
    blocks: Vec<BlockDto>,
    ephemeral: EphemeralDto,
    k: usize,
    t: usize,
}

#[derive(Serialize, Deserialize)]
struct BlockDto {
    states: Vec<usize>,
    pi: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EphemeralDto {
    states: Vec<usize>,
    p: Vec<Vec<String>>,
}

/// Computes the canonical decomposition of an SI matrix.
///
/// Zero columns and their rows are deleted; the remainder splits into
/// communicating classes, each of which must be a rank-one block with
/// identical positive rows. Ephemeral rows are factored through the blocks:
/// the coefficient vector is recovered as the row mass per block and the
/// factorization `row = p_i * pi_i` is re-verified entrywise. Failures past
/// classification indicate an internal bug, not bad input.
pub fn si_decompose(m: &RatMatrix) -> Result<SiDecomposition> {
    match si_classify(m)? {
        SiClass::Si { .. } => {}
        c => return Err(Error::NotSi(format!("classification: {c:?}"))),
    }
    let n = m.rows();
    let ephemeral_states = zero_columns(m);
    let is_ephemeral: Vec<bool> = {
        let mut v = vec![false; n];
        for &e in &ephemeral_states {
            v[e] = true;
        }
        v
    };
    let kept: Vec<usize> = (0..n).filter(|&i| !is_ephemeral[i]).collect();

    // Communicating classes of the retained submatrix.
    let adj: Vec<Vec<usize>> = kept
        .iter()
        .map(|&x| {
            kept.iter()
                .enumerate()
                .filter(|&(_, &y)| !m.get(x, y).is_zero())
                .map(|(local, _)| local)
                .collect()
        })
        .collect();
    let components = strongly_connected_components(&adj);

    let mut blocks = Vec::new();
    for comp in &components {
        let states: Vec<usize> = comp.iter().map(|&local| kept[local]).collect();
        let first = states[0];
        let mut pi = Vec::with_capacity(states.len());
        for &y in &states {
            let v = m.get(first, y).clone();
            if !v.is_positive() {
                return Err(Error::Internal(format!(
                    "block row has nonpositive entry at ({first}, {y})"
                )));
            }
            pi.push(v);
        }
        if rat_sum(&pi) != Rat::one() {
            return Err(Error::Internal("block row does not sum to 1".into()));
        }
        for &x in &states {
            // Rows must agree across the block and vanish off it.
            for (j, &y) in states.iter().enumerate() {
                if m.get(x, y) != &pi[j] {
                    return Err(Error::Internal("rows differ within a communicating block".into()));
                }
            }
        }
        blocks.push(SiBlock { states, pi });
    }
    blocks.sort_by_key(|b| b.states[0]);

    // Coupling coefficients for ephemeral rows.
    let mut ephemeral_p = Vec::with_capacity(ephemeral_states.len());
    for &e in &ephemeral_states {
        let mut coeffs = Vec::with_capacity(blocks.len());
        for block in &blocks {
            let p = rat_sum(&block.states.iter().map(|&y| m.get(e, y).clone()).collect::<Vec<_>>());
            for (j, &y) in block.states.iter().enumerate() {
                if m.get(e, y) != &(&p * &block.pi[j]) {
                    return Err(Error::Internal(
                        "ephemeral row is not a multiple of the block row".into(),
                    ));
                }
            }
            coeffs.push(p);
        }
        if rat_sum(&coeffs) != Rat::one() {
            return Err(Error::Internal("ephemeral coupling coefficients do not sum to 1".into()));
        }
        ephemeral_p.push(coeffs);
    }

    let mut permutation: Vec<usize> = blocks.iter().flat_map(|b| b.states.clone()).collect();
    permutation.extend(&ephemeral_states);

    let decomposition = SiDecomposition {
        k: blocks.len(),
        t: ephemeral_states.len(),
        permutation,
        blocks,
        ephemeral_states,
        ephemeral_p,
    };
    if decomposition.reassemble() != *m {
        return Err(Error::Internal("decomposition does not reassemble the input".into()));
    }
    Ok(decomposition)
}

/// The three equivalent properties of an SI matrix, decided independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiEquivalence {
    /// No state has an all-zero column.
    pub no_zero_columns: bool,
    /// Permutation-similar to a direct sum of rank-one stochastic blocks.
    pub direct_sum: bool,
    /// Positive diagonal weights `d` with `d(x) M(x,y) = d(y) M(y,x)`
    /// verified exactly; present iff the matrix is reversible.
    pub reversible_witness: Option<Vec<Rat>>,
}

/// Decides, separately, the three equivalent characterizations of an SI
/// matrix without ephemeral states, and checks that they agree:
/// no zero columns; direct sum of rank-one blocks up to permutation;
/// reversibility with respect to a positive diagonal. The witness is the
/// concatenation of the block stationary rows.
pub fn reversible_si_equivalence(m: &RatMatrix) -> Result<SiEquivalence> {
    match si_classify(m)? {
        SiClass::Si { .. } => {}
        c => return Err(Error::NotSi(format!("classification: {c:?}"))),
    }
    let n = m.rows();
    let no_zero_columns = zero_columns(m).is_empty();

    // Structural direct-sum test on the full matrix: every communicating
    // class must be closed, with identical positive rows summing to 1.
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| !m.get(x, y).is_zero()).collect())
        .collect();
    let components = strongly_connected_components(&adj);
    let mut class_of = vec![0usize; n];
    for (id, comp) in components.iter().enumerate() {
        for &x in comp {
            class_of[x] = id;
        }
    }
    let mut direct_sum = true;
    'outer: for comp in &components {
        let first = comp[0];
        for &x in comp {
            for y in 0..n {
                let v = m.get(x, y);
                if !v.is_zero() && class_of[y] != class_of[x] {
                    direct_sum = false;
                    break 'outer;
                }
                if m.get(first, y) != v {
                    direct_sum = false;
                    break 'outer;
                }
            }
        }
        let row_sum = rat_sum(m.row(first));
        let on_class_positive = comp.iter().all(|&y| m.get(first, y).is_positive());
        if row_sum != Rat::one() || !on_class_positive {
            direct_sum = false;
            break;
        }
    }

    // Reversibility witness: concatenated block rows, verified by exact
    // detailed balance.
    let reversible_witness = if direct_sum {
        let mut d = vec![Rat::zero(); n];
        for comp in &components {
            let first = comp[0];
            for &y in comp {
                d[y] = m.get(first, y).clone();
            }
        }
        let balanced = (0..n).all(|x| {
            (0..n).all(|y| &d[x] * m.get(x, y) == &d[y] * m.get(y, x))
        });
        if !balanced {
            return Err(Error::Internal("direct-sum witness failed detailed balance".into()));
        }
        Some(d)
    } else {
        None
    };

    let reversible = reversible_witness.is_some();
    if no_zero_columns != direct_sum || direct_sum != reversible {
        return Err(Error::Internal(format!(
            "equivalence failed: no_zero_columns={no_zero_columns} direct_sum={direct_sum} reversible={reversible}"
        )));
    }
    Ok(SiEquivalence { no_zero_columns, direct_sum, reversible_witness })
}

/// Exact test that all eigenvalues lie in `{0, 1}`: the minimal polynomial
/// must divide `x^n (x - 1)^n`, so `M^n (M - I)^n = 0`.
fn spectrum_is_binary(m: &RatMatrix) -> Result<bool> {
    let n = m.rows();
    let mut shifted = m.clone();
    for i in 0..n {
        let v = shifted.get(i, i) - Rat::one();
        shifted.set(i, i, v);
    }
    Ok(m.pow(n)?.mul(&shifted.pow(n)?)?.is_zero())
}

/// Outcome of the finite-convergence analysis of a stochastic matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteConvergenceReport {
    /// True when some power repeats: `M^(m+1) = M^m` within the cap.
    pub settles: bool,
    /// The minimal such `m`, when it exists.
    pub m: Option<usize>,
    /// Exact certificate that the spectrum is contained in `{0, 1}`,
    /// computed independently of the settling search.
    pub spectrum_binary: bool,
    /// Rank-one blocks of the idempotent limit `M^m`.
    pub recurrent_blocks: Vec<SiBlock>,
    /// True when `M` itself is permutation-similar to the block form with
    /// rank-one diagonal blocks and all remaining states ephemeral: every
    /// state outside the recurrent blocks must be a zero column of `M`, and
    /// every block row of `M` must already equal its stationary row. The
    /// weaker zero-column condition alone does not pin the shape, so both
    /// are required.
    pub strict_form: bool,
}

/// Searches for the minimal `m <= cap` with `M^(m+1) = M^m` (default cap:
/// the dimension) and, when found, decomposes the idempotent limit.
///
/// On success the limit is re-verified idempotent via `M^2m = M^m`, plus
/// spot checks at `m+2` and `m+3`.
pub fn settle_analysis(p: &StochasticMatrix, m_cap: Option<usize>) -> Result<FiniteConvergenceReport> {
    let n = p.n();
    let cap = m_cap.unwrap_or(n).max(1);
    let m = p.matrix();
    let spectrum_binary = spectrum_is_binary(m)?;

    let mut prev = m.clone();
    let mut settled_at = None;
    for j in 1..=cap {
        let next = prev.mul(m)?;
        if next == prev {
            settled_at = Some(j);
            break;
        }
        prev = next;
    }

    let Some(mm) = settled_at else {
        return Ok(FiniteConvergenceReport {
            settles: false,
            m: None,
            spectrum_binary,
            recurrent_blocks: Vec::new(),
            strict_form: false,
        });
    };

    // prev holds M^m. Idempotence of the limit plus nearby powers.
    let limit = prev;
    if m.pow(2 * mm)? != limit || m.pow(mm + 2)? != limit || m.pow(mm + 3)? != limit {
        return Err(Error::Internal("settled power is not stable".into()));
    }
    if !spectrum_binary {
        return Err(Error::Internal("settling matrix failed the binary-spectrum test".into()));
    }
    let decomposition = si_decompose(&limit)?;

    // Strict block shape of M itself.
    let mut in_block = vec![false; n];
    for block in &decomposition.blocks {
        for &x in &block.states {
            in_block[x] = true;
        }
    }
    let zero_cols: std::collections::BTreeSet<usize> = zero_columns(m).into_iter().collect();
    let outside_ephemeral = (0..n).filter(|&x| !in_block[x]).all(|x| zero_cols.contains(&x));
    let blocks_already_fixed = decomposition.blocks.iter().all(|block| {
        block.states.iter().all(|&x| {
            (0..n).all(|y| match block.states.iter().position(|&s| s == y) {
                Some(j) => m.get(x, y) == &block.pi[j],
                None => m.get(x, y).is_zero(),
            })
        })
    });
    let strict_form = outside_ephemeral && blocks_already_fixed;

    Ok(FiniteConvergenceReport {
        settles: true,
        m: Some(mm),
        spectrum_binary,
        recurrent_blocks: decomposition.blocks,
        strict_form,
    })
}

/// For a reversible settling chain, confirms exact idempotence `M^2 = M`.
///
/// Reversibility and settling are preconditions; a settling reversible
/// matrix that fails idempotence would falsify the structure theory and is
/// reported as such rather than swallowed.
pub fn reversible_settles_implies_idempotent(
    p: &StochasticMatrix,
    pi: &TargetDistribution,
) -> Result<()> {
    if !check_reversible(p, pi)? {
        return Err(Error::Precondition("matrix is not reversible with respect to pi".into()));
    }
    let report = settle_analysis(p, None)?;
    if !report.settles {
        return Err(Error::Precondition("matrix does not settle within the cap".into()));
    }
    if !is_idempotent(p.matrix())? {
        return Err(Error::Falsified(format!(
            "reversible matrix settles at m={:?} but M^2 != M",
            report.m
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::StateSpace;
    use crate::rat::{rat, rat_int};

    fn corrected_example() -> RatMatrix {
        RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
        ])
    }

    #[test]
    fn idempotence_examples() {
        let rank_one = RatMatrix::from_i64_pairs(&[&[(2, 3), (1, 3)], &[(2, 3), (1, 3)]]);
        assert!(is_idempotent(&rank_one).unwrap());
        assert!(is_idempotent(&RatMatrix::identity(3)).unwrap());

        // This matrix is sometimes claimed idempotent; exact multiplication
        // refutes it: row 0 of M^2 is (3/4, 1/4, 0).
        let printed = RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
        ]);
        assert!(!is_idempotent(&printed).unwrap());
        let sq = printed.mul(&printed).unwrap();
        assert_eq!(sq.row(0), &[rat(3, 4), rat(1, 4), rat(0, 1)]);
    }

    #[test]
    fn rank_is_exact() {
        assert_eq!(rank(&RatMatrix::identity(4)), 4);
        assert_eq!(rank(&corrected_example()), 1);
        let m = RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&RatMatrix::zeros(3, 3)), 0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(si_classify(&corrected_example()).unwrap(), SiClass::Si { t: 1, r: 1 });
        let half = RatMatrix::from_i64_pairs(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        assert_eq!(si_classify(&half).unwrap(), SiClass::Si { t: 0, r: 1 });
        let swap = RatMatrix::from_i64_pairs(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(si_classify(&swap).unwrap(), SiClass::NotIdempotent);
        let sub = RatMatrix::from_i64_pairs(&[&[(1, 2), (1, 4)], &[(0, 1), (1, 1)]]);
        assert_eq!(si_classify(&sub).unwrap(), SiClass::NotStochastic);
    }

    #[test]
    fn decompose_with_ephemeral_state() {
        let d = si_decompose(&corrected_example()).unwrap();
        assert_eq!(d.k, 1);
        assert_eq!(d.t, 1);
        assert_eq!(d.blocks[0].states, vec![0, 1]);
        assert_eq!(d.blocks[0].pi, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(d.ephemeral_states, vec![2]);
        assert_eq!(d.ephemeral_p, vec![vec![rat_int(1)]]);
        assert_eq!(d.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn decompose_direct_sum() {
        let m = RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]);
        let d = si_decompose(&m).unwrap();
        assert_eq!(d.k, 2);
        assert_eq!(d.t, 0);
        assert_eq!(d.blocks[0].pi, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(d.blocks[1].states, vec![2]);
        assert_eq!(d.blocks[1].pi, vec![rat_int(1)]);
    }

    #[test]
    fn decompose_single_block() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1, 4), rat(1, 4), rat(1, 2)],
            vec![rat(1, 4), rat(1, 4), rat(1, 2)],
            vec![rat(1, 4), rat(1, 4), rat(1, 2)],
        ])
        .unwrap();
        let d = si_decompose(&m).unwrap();
        assert_eq!(d.k, 1);
        assert_eq!(d.t, 0);
        assert_eq!(d.blocks[0].pi, vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
        assert_eq!(d.reassemble(), m);
    }

    #[test]
    fn decompose_rejects_non_si() {
        let swap = RatMatrix::from_i64_pairs(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert!(matches!(si_decompose(&swap), Err(Error::NotSi(_))));
    }

    #[test]
    fn equivalence_examples() {
        let m = RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]);
        let eq = reversible_si_equivalence(&m).unwrap();
        assert!(eq.no_zero_columns && eq.direct_sum);
        assert_eq!(eq.reversible_witness.unwrap(), vec![rat(1, 2), rat(1, 2), rat_int(1)]);

        let eq = reversible_si_equivalence(&corrected_example()).unwrap();
        assert!(!eq.no_zero_columns && !eq.direct_sum && eq.reversible_witness.is_none());

        let eq = reversible_si_equivalence(&RatMatrix::identity(3)).unwrap();
        assert_eq!(eq.reversible_witness.unwrap(), vec![rat_int(1); 3]);
    }

    #[test]
    fn witness_satisfies_conjugation_identity() {
        // d M d^-1 = M^T entrywise, i.e. d(x) M(x,y) / d(y) = M(y,x).
        let m = RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]);
        let d = reversible_si_equivalence(&m).unwrap().reversible_witness.unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(&d[x] * m.get(x, y) / &d[y], m.get(y, x).clone());
            }
        }
    }

    fn sm(m: RatMatrix) -> StochasticMatrix {
        StochasticMatrix::new(StateSpace::indexed(m.rows()), m).unwrap()
    }

    #[test]
    fn settle_chain_with_transient_path() {
        let p = sm(RatMatrix::from_i64_pairs(&[
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]));
        let report = settle_analysis(&p, None).unwrap();
        assert!(report.settles);
        assert_eq!(report.m, Some(2));
        assert!(report.spectrum_binary);
        assert_eq!(report.recurrent_blocks.len(), 1);
        assert_eq!(report.recurrent_blocks[0].states, vec![2]);
        // State 0 -> 1 is a transition between transient states with
        // nonzero columns, so the strict block shape fails.
        assert!(!report.strict_form);
    }

    #[test]
    fn settle_si_matrix_at_one() {
        let p = sm(corrected_example());
        let report = settle_analysis(&p, None).unwrap();
        assert_eq!(report.m, Some(1));
        assert!(report.strict_form);

        let p = sm(RatMatrix::from_i64_pairs(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]));
        let report = settle_analysis(&p, None).unwrap();
        assert_eq!(report.m, Some(1));
        assert!(report.strict_form);
    }

    #[test]
    fn periodic_swap_never_settles() {
        let p = sm(RatMatrix::from_i64_pairs(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]));
        let report = settle_analysis(&p, Some(64)).unwrap();
        assert!(!report.settles);
        assert!(!report.spectrum_binary);
    }

    #[test]
    fn settling_but_not_idempotent_matrix_is_detected() {
        // 1pi plus a nilpotent perturbation: settles at m = 2, irreducible,
        // not idempotent. Its limit blocks cover every state, so the
        // zero-column condition alone would wrongly report the strict shape.
        let third = (1, 3);
        let eps = (1, 12);
        let p = sm(RatMatrix::from_rows(vec![
            vec![rat(third.0, third.1) + rat(eps.0, eps.1), rat(third.0, third.1) + rat(eps.0, eps.1), rat(third.0, third.1) - rat(2 * eps.0, eps.1)],
            vec![rat(third.0, third.1) - rat(eps.0, eps.1), rat(third.0, third.1) - rat(eps.0, eps.1), rat(third.0, third.1) + rat(2 * eps.0, eps.1)],
            vec![rat(third.0, third.1), rat(third.0, third.1), rat(third.0, third.1)],
        ])
        .unwrap());
        assert!(!is_idempotent(p.matrix()).unwrap());
        let report = settle_analysis(&p, None).unwrap();
        assert!(report.settles);
        assert_eq!(report.m, Some(2));
        assert!(!report.strict_form);
    }

    #[test]
    fn reversible_settling_confirms_idempotence() {
        let space = StateSpace::indexed(2);
        let m = sm(RatMatrix::from_i64_pairs(&[&[(2, 3), (1, 3)], &[(2, 3), (1, 3)]]));
        let pi = TargetDistribution::new(space.clone(), vec![rat(2, 3), rat(1, 3)]).unwrap();
        reversible_settles_implies_idempotent(&m, &pi).unwrap();

        let id = StochasticMatrix::identity(space.clone());
        let pi = TargetDistribution::uniform(space);
        reversible_settles_implies_idempotent(&id, &pi).unwrap();
    }

    #[test]
    fn reversible_settling_preconditions() {
        // Reversible but never settles.
        let p = sm(RatMatrix::from_i64_pairs(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]));
        let pi = TargetDistribution::uniform(p.space().clone());
        assert!(matches!(
            reversible_settles_implies_idempotent(&p, &pi),
            Err(Error::Precondition(_))
        ));

        // Not reversible with respect to the supplied distribution.
        let p = sm(RatMatrix::from_i64_pairs(&[&[(2, 3), (1, 3)], &[(2, 3), (1, 3)]]));
        let pi = TargetDistribution::uniform(p.space().clone());
        assert!(matches!(
            reversible_settles_implies_idempotent(&p, &pi),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn decomposition_json_round_trip() {
        let d = si_decompose(&corrected_example()).unwrap();
        let text = d.to_json_string();
        let back = SiDecomposition::from_json_str(&text).unwrap();
        assert_eq!(d, back);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["k"], 1);
        assert_eq!(value["t"], 1);
        assert_eq!(value["blocks"][0]["pi"][0], "1/2");
        assert_eq!(value["ephemeral"]["p"][0][0], "1");
    }
}
