//! Exact-rational dense matrices, indexed state spaces, and the
//! stochasticity / reversibility / reachability primitives.
//!
//! Everything here is immutable after construction and all operations are
//! pure, so values can be shared freely across threads.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rat::{format_rational, parse_rational, rat_sum, rat_to_f64, Rat};
use crate::{Error, Result};

/// Ordered finite state space with opaque string labels.
///
/// The ordering is fixed at construction; every matrix and distribution in
/// the crate indexes states through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("state space must be nonempty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate state label `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    /// `n` states labelled `s0`, `s1`, ...
    pub fn indexed(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("s{i}")).collect()).expect("n >= 1")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Strictly positive probability vector on a [`StateSpace`], exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetDistribution {
    space: StateSpace,
    probs: Vec<Rat>,
}

impl TargetDistribution {
    pub fn new(space: StateSpace, probs: Vec<Rat>) -> Result<Self> {
        if probs.len() != space.len() {
            return Err(Error::Dimension(format!(
                "distribution has {} entries for {} states",
                probs.len(),
                space.len()
            )));
        }
        for (i, p) in probs.iter().enumerate() {
            if *p <= Rat::zero() {
                return Err(Error::InvalidInput(format!(
                    "probability of state {i} is {} (must be strictly positive)",
                    format_rational(p)
                )));
            }
        }
        let total = rat_sum(&probs);
        if total != Rat::one() {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Self { space, probs })
    }

    pub fn uniform(space: StateSpace) -> Self {
        let probs = crate::rat::uniform_probs(space.len());
        Self { space, probs }
    }

    /// Normalizes a vector of positive weights into a distribution.
    pub fn from_weights(space: StateSpace, weights: Vec<Rat>) -> Result<Self> {
        let total = rat_sum(&weights);
        if total <= Rat::zero() {
            return Err(Error::InvalidInput("weights must have positive total".into()));
        }
        let probs = weights.into_iter().map(|w| w / &total).collect();
        Self::new(space, probs)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> &Rat {
        &self.probs[i]
    }

    /// Smallest entry.
    pub fn min_prob(&self) -> &Rat {
        self.probs.iter().min().expect("nonempty")
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(rat_to_f64).collect()
    }
}

/// Dense rectangular matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix must have at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidInput("matrix must have at least one column".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows in matrix".into()));
        }
        let n = rows.len();
        let data = rows.into_iter().flatten().collect();
        Ok(Self { rows: n, cols, data })
    }

    /// Convenience constructor from small integer-pair literals, for tests
    /// and examples: each entry is `(numerator, denominator)`.
    pub fn from_i64_pairs(rows: &[&[(i64, i64)]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&(n, d)| crate::rat::rat(n, d)).collect())
            .collect();
        Self::from_rows(rows).expect("literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<Rat> {
        (0..self.rows).map(|i| rat_sum(self.row(i))).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix addition shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// `self^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, k: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Simultaneous row/column reordering: entry `(i, j)` of the result is
    /// `self(perm[i], perm[j])`. With `A` the permutation matrix sending
    /// position `i` to state `perm[i]`, this is `A M A^T` expressed on
    /// positions; it is the similarity used for canonical forms.
    pub fn permute_conjugate(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if perm.len() != self.rows {
            return Err(Error::Dimension("permutation length mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(perm[i], perm[j]).clone());
            }
        }
        Ok(out)
    }

    /// Float mirror of the exact entries.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(rat_to_f64).collect())
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Verdict of the exact row-sum test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochasticVerdict {
    /// Nonnegative, every row sums to exactly 1.
    Stochastic,
    /// Nonnegative, every row sums to at most 1, some row sums to less.
    Substochastic,
    /// Negative entries or a row sum above 1.
    Neither,
}

/// Classifies a square matrix by exact row sums.
pub fn check_stochastic(m: &RatMatrix) -> Result<StochasticVerdict> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_nonnegative() {
        return Ok(StochasticVerdict::Neither);
    }
    let one = Rat::one();
    let sums = m.row_sums();
    if sums.iter().all(|s| *s == one) {
        Ok(StochasticVerdict::Stochastic)
    } else if sums.iter().all(|s| *s <= one) {
        Ok(StochasticVerdict::Substochastic)
    } else {
        Ok(StochasticVerdict::Neither)
    }
}

/// Row-stochastic square matrix over a [`StateSpace`], exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix {
    space: StateSpace,
    m: RatMatrix,
}

impl StochasticMatrix {
    pub fn new(space: StateSpace, m: RatMatrix) -> Result<Self> {
        if m.rows() != space.len() || m.cols() != space.len() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but the state space has {} states",
                m.rows(),
                m.cols(),
                space.len()
            )));
        }
        match check_stochastic(&m)? {
            StochasticVerdict::Stochastic => Ok(Self { space, m }),
            v => Err(Error::NotStochastic(format!("row-sum verdict is {v:?}"))),
        }
    }

    pub fn identity(space: StateSpace) -> Self {
        let m = RatMatrix::identity(space.len());
        Self { space, m }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        self.m.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        self.m.row(i)
    }

    /// Exact power; the result shares the state space.
    pub fn pow(&self, k: usize) -> Self {
        let m = self.m.pow(k).expect("square by construction");
        Self { space: self.space.clone(), m }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.m.to_f64_rows()
    }

    pub fn into_matrix(self) -> RatMatrix {
        self.m
    }
}

/// Substochastic square matrix: nonnegative with row sums at most 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstochasticMatrix {
    space: StateSpace,
    m: RatMatrix,
}

impl SubstochasticMatrix {
    pub fn new(space: StateSpace, m: RatMatrix) -> Result<Self> {
        if m.rows() != space.len() || m.cols() != space.len() {
            return Err(Error::Dimension("substochastic matrix shape mismatch".into()));
        }
        match check_stochastic(&m)? {
            StochasticVerdict::Neither => {
                Err(Error::NotStochastic("negative entry or row sum above 1".into()))
            }
            _ => Ok(Self { space, m }),
        }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }
}

/// Exact detailed-balance test: `pi(x) M(x,y) == pi(y) M(y,x)` for all pairs.
///
/// A true verdict implies `pi` is stationary for `M`; that consequence is
/// re-checked exactly on every true return.
pub fn check_reversible(m: &StochasticMatrix, pi: &TargetDistribution) -> Result<bool> {
    if m.space() != pi.space() {
        return Err(Error::Dimension("matrix and distribution use different state spaces".into()));
    }
    let n = m.n();
    for x in 0..n {
        for y in (x + 1)..n {
            if pi.prob(x) * m.get(x, y) != pi.prob(y) * m.get(y, x) {
                return Ok(false);
            }
        }
    }
    // Detailed balance implies stationarity; verify it exactly.
    for y in 0..n {
        let mut acc = Rat::zero();
        for x in 0..n {
            acc += pi.prob(x) * m.get(x, y);
        }
        if acc != *pi.prob(y) {
            return Err(Error::Internal(
                "detailed balance held but stationarity failed".into(),
            ));
        }
    }
    Ok(true)
}

/// The lazy chain `(I + M) / 2`. Every diagonal entry of the result is at
/// least 1/2, and all eigenvalues are nonnegative.
pub fn lazify(m: &StochasticMatrix) -> StochasticMatrix {
    let n = m.n();
    let half = crate::rat::rat(1, 2);
    let mut out = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = m.get(i, j) * &half;
            if i == j {
                v += &half;
            }
            out.set(i, j, v);
        }
    }
    StochasticMatrix::new(m.space().clone(), out).expect("lazification preserves stochasticity")
}

/// Indices of identically-zero columns (exact test). For a stochastic
/// matrix these are the ephemeral states: reachable from no state,
/// including themselves.
pub fn zero_columns(m: &RatMatrix) -> Vec<usize> {
    (0..m.cols())
        .filter(|&j| (0..m.rows()).all(|i| m.get(i, j).is_zero()))
        .collect()
}

/// One communicating class of the support digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommClass {
    /// Sorted state indices.
    pub states: Vec<usize>,
    /// True iff no edge leaves the class (closed class).
    pub recurrent: bool,
}

/// Communicating-class decomposition of a stochastic matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunicatingStructure {
    /// Classes sorted by smallest member.
    pub classes: Vec<CommClass>,
    pub is_irreducible: bool,
}

/// Strongly connected components of an adjacency-list digraph, iterative
/// Kosaraju. Components are returned sorted by smallest member.
pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    // First pass: record finish order with an explicit stack.
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        visited[start] = true;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let u = adj[v][*next];
                *next += 1;
                if !visited[u] {
                    visited[u] = true;
                    stack.push((u, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    // Reverse graph.
    let mut radj = vec![Vec::new(); n];
    for (v, outs) in adj.iter().enumerate() {
        for &u in outs {
            radj[u].push(v);
        }
    }
    // Second pass in reverse finish order.
    let mut comp = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in &radj[v] {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by_key(|c| c[0]);
    components
}

/// Communicating classes of the digraph with an edge `x -> y` whenever
/// `M(x, y) > 0`, tagged recurrent (closed) or transient.
pub fn communicating_structure(m: &StochasticMatrix) -> CommunicatingStructure {
    let n = m.n();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| !m.get(i, j).is_zero()).collect())
        .collect();
    let comps = strongly_connected_components(&adj);
    let mut comp_of = vec![0usize; n];
    for (id, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = id;
        }
    }
    let classes: Vec<CommClass> = comps
        .iter()
        .enumerate()
        .map(|(id, c)| {
            let recurrent = c
                .iter()
                .all(|&v| adj[v].iter().all(|&u| comp_of[u] == id));
            CommClass { states: c.clone(), recurrent }
        })
        .collect();
    let is_irreducible = classes.len() == 1;
    CommunicatingStructure { classes, is_irreducible }
}

// ---------------------------------------------------------------------------
// Matrix CSV: first row is the column state labels, each following row holds
// exact rationals, either `p/q` or decimal strings.
// ---------------------------------------------------------------------------

/// Parses a matrix CSV document into labels and an exact matrix.
pub fn read_matrix_csv(text: &str) -> Result<(Vec<String>, RatMatrix)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix CSV".into()))?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if labels.is_empty() || labels.iter().any(|l| l.is_empty()) {
        return Err(Error::Parse("matrix CSV header has empty labels".into()));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let entries: Vec<&str> = line.split(',').collect();
        if entries.len() != labels.len() {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {}",
                lineno + 1,
                entries.len(),
                labels.len()
            )));
        }
        let row: Result<Vec<Rat>> = entries.iter().map(|e| parse_rational(e)).collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix CSV has no data rows".into()));
    }
    Ok((labels, RatMatrix::from_rows(rows)?))
}

/// Renders labels and a matrix as CSV with exact `p/q` entries.
pub fn write_matrix_csv(labels: &[String], m: &RatMatrix) -> Result<String> {
    if labels.len() != m.cols() {
        return Err(Error::Dimension("label count differs from column count".into()));
    }
    if labels.iter().any(|l| l.contains(',')) {
        return Err(Error::InvalidInput("state labels must not contain commas".into()));
    }
    let mut out = String::new();
    out.push_str(&labels.join(","));
    out.push('\n');
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
