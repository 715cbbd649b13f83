//! The 2x2-subsquare chain for contingency tables.
//!
//! States are nonnegative integer matrices with prescribed row and column
//! sums. A transition picks a 2x2 subsquare position uniformly and replaces
//! its four entries by a uniform choice among the fills with the same
//! subsquare margins. In heat-bath terms: labels are subsquare positions,
//! the block of a table is the set of tables agreeing with it outside the
//! subsquare, and the target is uniform.

use std::collections::BTreeMap;

use crate::heatbath::{HeatBathSpec, LabelSpec};
use crate::matrix::StateSpace;
use crate::models::EnumerationCaps;
use crate::rat::{rat, uniform_probs};
use crate::{Error, Result};

/// Margins: positive row sums and column sums with equal totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyInstance {
    rows: Vec<u64>,
    cols: Vec<u64>,
}

impl ContingencyInstance {
    pub fn new(rows: Vec<u64>, cols: Vec<u64>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::InvalidInput("margins must be nonempty".into()));
        }
        if rows.iter().any(|&r| r == 0) || cols.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput("margins must be positive".into()));
        }
        let rs: u64 = rows.iter().sum();
        let cs: u64 = cols.iter().sum();
        if rs != cs {
            return Err(Error::InvalidInput(format!(
                "row sums total {rs} but column sums total {cs}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn cols(&self) -> &[u64] {
        &self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

fn table_label(table: &[u64]) -> String {
    table.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}

/// Enumerates every table with the given margins, in lexicographic order of
/// the row-major flattened entries. Returns the labelled state space and
/// the tables themselves.
pub fn enumerate_tables(
    inst: &ContingencyInstance,
    caps: &EnumerationCaps,
) -> Result<(StateSpace, Vec<Vec<u64>>)> {
    let (m, n) = inst.shape();
    let mut tables = Vec::new();
    let mut current = vec![0u64; m * n];
    let mut row_rem = inst.rows.to_vec();
    let mut col_rem = inst.cols.to_vec();

    // Depth-first fill in row-major order; the last cell of each row and
    // the last row are forced by the margins, which prunes hard.
    fn fill(
        pos: usize,
        m: usize,
        n: usize,
        current: &mut Vec<u64>,
        row_rem: &mut Vec<u64>,
        col_rem: &mut Vec<u64>,
        tables: &mut Vec<Vec<u64>>,
        cap: usize,
    ) -> Result<()> {
        if pos == m * n {
            if tables.len() == cap {
                return Err(Error::CapExceeded(format!("table count exceeds {cap}")));
            }
            tables.push(current.clone());
            return Ok(());
        }
        let (i, j) = (pos / n, pos % n);
        let max_v = row_rem[i].min(col_rem[j]);
        let forced_row = j == n - 1;
        let forced_col = i == m - 1;
        let candidates: Vec<u64> = match (forced_row, forced_col) {
            (false, false) => (0..=max_v).collect(),
            (true, false) => (row_rem[i] <= col_rem[j]).then_some(row_rem[i]).into_iter().collect(),
            (false, true) => (col_rem[j] <= row_rem[i]).then_some(col_rem[j]).into_iter().collect(),
            (true, true) => (row_rem[i] == col_rem[j]).then_some(row_rem[i]).into_iter().collect(),
        };
        for v in candidates {
            current[pos] = v;
            row_rem[i] -= v;
            col_rem[j] -= v;
            fill(pos + 1, m, n, current, row_rem, col_rem, tables, cap)?;
            row_rem[i] += v;
            col_rem[j] += v;
            current[pos] = 0;
        }
        Ok(())
    }

    fill(0, m, n, &mut current, &mut row_rem, &mut col_rem, &mut tables, caps.max_states)?;
    if tables.is_empty() {
        return Err(Error::InvalidInput("no table satisfies the margins".into()));
    }
    let space = StateSpace::new(tables.iter().map(|t| table_label(t)).collect())?;
    Ok((space, tables))
}

/// Builds the heat-bath spec of the subsquare chain: uniform target,
/// uniform label weights over the `C(m,2) C(n,2)` subsquare positions,
/// blocks grouping tables that agree outside the subsquare.
pub fn build_contingency_chain(
    inst: &ContingencyInstance,
    caps: &EnumerationCaps,
) -> Result<HeatBathSpec> {
    let (m, n) = inst.shape();
    if m < 2 || n < 2 {
        return Err(Error::InvalidInput(
            "the subsquare chain needs at least two rows and two columns".into(),
        ));
    }
    let (space, tables) = enumerate_tables(inst, caps)?;
    let pi = uniform_probs(tables.len());

    let n_positions = (m * (m - 1) / 2) * (n * (n - 1) / 2);
    let rho = rat(1, n_positions as i64);
    let mut labels = Vec::with_capacity(n_positions);
    for i1 in 0..m {
        for i2 in (i1 + 1)..m {
            for j1 in 0..n {
                for j2 in (j1 + 1)..n {
                    // Group tables by their entries outside the subsquare.
                    let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
                    for (idx, table) in tables.iter().enumerate() {
                        let mut key = table.clone();
                        for &(i, j) in &[(i1, j1), (i1, j2), (i2, j1), (i2, j2)] {
                            key[i * n + j] = u64::MAX;
                        }
                        groups.entry(key).or_default().push(idx);
                    }
                    let blocks: Vec<Vec<usize>> = groups.into_values().collect();
                    let id = format!("r{i1}r{i2}c{j1}c{j2}");
                    labels.push(LabelSpec::new(id, rho.clone(), blocks));
                }
            }
        }
    }

    Ok(HeatBathSpec::new(space, pi, labels))
}
