//! Lifting a chain through an auxiliary state space.
//!
//! Given distributions `pi` on the base space and `mu` on a lifted space,
//! a nonnegative matrix `R` with unit row sums and `pi R = mu`, and a
//! positive semidefinite chain `T` on the lifted space reversible with
//! respect to `mu`, the composition `P = R T R*` is a stochastic matrix on
//! the base space, reversible with respect to `pi`, and positive
//! semidefinite. The adjoint is `R*(y, x) = pi(x) R(x, y) / mu(y)`.
//!
//! Operationally a step of `P` generates a lifted state from `R(x, .)`,
//! runs one step of `T`, and projects back through `R*`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{
    check_stochastic, RatMatrix, StochasticMatrix, StochasticVerdict, TargetDistribution,
};
use crate::rat::Rat;
use crate::spectral;
use crate::{Error, Result};

/// Validated lifting matrix: nonnegative, unit row sums, `pi R = mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingMatrix {
    m: RatMatrix,
}

impl LiftingMatrix {
    pub fn new(m: RatMatrix, pi: &TargetDistribution, mu: &TargetDistribution) -> Result<Self> {
        if m.rows() != pi.space().len() || m.cols() != mu.space().len() {
            return Err(Error::Dimension(format!(
                "lifting matrix is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                pi.space().len(),
                mu.space().len()
            )));
        }
        if !m.is_nonnegative() {
            return Err(Error::InvalidInput("lifting matrix has a negative entry".into()));
        }
        if m.row_sums().iter().any(|s| *s != Rat::one()) {
            return Err(Error::InvalidInput("every row of a lifting matrix must sum to 1".into()));
        }
        if !pi_r_equals_mu(&m, pi, mu) {
            return Err(Error::InvalidInput("pi R != mu".into()));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }
}

fn pi_r_equals_mu(r: &RatMatrix, pi: &TargetDistribution, mu: &TargetDistribution) -> bool {
    if r.rows() != pi.space().len() || r.cols() != mu.space().len() {
        return false;
    }
    for y in 0..r.cols() {
        let mut acc = Rat::zero();
        for x in 0..r.rows() {
            acc += pi.prob(x) * r.get(x, y);
        }
        if acc != *mu.prob(y) {
            return false;
        }
    }
    true
}

/// The adjoint `R*(y, x) = pi(x) R(x, y) / mu(y)`, exact.
///
/// Requires `pi R = mu`; that identity is what makes every adjoint row sum
/// to 1, which is re-verified. The adjoint is itself a valid lifting matrix
/// in the opposite direction, with `mu R* = pi`.
pub fn adjoint(
    r: &RatMatrix,
    pi: &TargetDistribution,
    mu: &TargetDistribution,
) -> Result<RatMatrix> {
    if r.rows() != pi.space().len() || r.cols() != mu.space().len() {
        return Err(Error::Dimension("adjoint: R shape does not match pi and mu".into()));
    }
    if !pi_r_equals_mu(r, pi, mu) {
        return Err(Error::InvalidInput(
            "adjoint requires pi R = mu; otherwise its rows are not stochastic".into(),
        ));
    }
    let mut star = RatMatrix::zeros(r.cols(), r.rows());
    for y in 0..r.cols() {
        for x in 0..r.rows() {
            star.set(y, x, pi.prob(x) * r.get(x, y) / mu.prob(y));
        }
    }
    for sum in star.row_sums() {
        if sum != Rat::one() {
            return Err(Error::Internal("adjoint row does not sum to 1".into()));
        }
    }
    Ok(star)
}

/// How positive semidefiniteness of `T` was established.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PsdEvidence {
    /// `T * T == T` exactly; idempotent matrices have spectrum in `{0, 1}`.
    ExactIdempotent,
    /// Jacobi spectrum of the symmetrized matrix.
    Numeric { lambda_min: f64 },
    /// Could not be evaluated because an earlier condition failed.
    NotEvaluated,
}

/// Per-condition outcome of checking a transfer triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferConditionReport {
    pub r_nonnegative: bool,
    pub r_rows_sum_one: bool,
    pub pi_r_equals_mu: bool,
    pub t_stochastic: bool,
    pub t_reversible: bool,
    pub t_psd: bool,
    pub t_psd_evidence: PsdEvidence,
}

impl TransferConditionReport {
    pub fn all_pass(&self) -> bool {
        self.r_nonnegative
            && self.r_rows_sum_one
            && self.pi_r_equals_mu
            && self.t_stochastic
            && self.t_reversible
            && self.t_psd
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.r_nonnegative {
            out.push("R has a negative entry");
        }
        if !self.r_rows_sum_one {
            out.push("a row of R does not sum to 1");
        }
        if !self.pi_r_equals_mu {
            out.push("pi R != mu");
        }
        if !self.t_stochastic {
            out.push("T is not stochastic");
        }
        if !self.t_reversible {
            out.push("T is not reversible with respect to mu");
        }
        if !self.t_psd {
            out.push("T has a negative eigenvalue");
        }
        out
    }
}

/// Checks every hypothesis of the transfer composition and reports each
/// separately; nothing is thrown. Exact checks are used wherever the
/// algebra allows; the PSD condition on `T` is certified exactly when `T`
/// is idempotent and numerically otherwise.
pub fn verify_transfer_conditions(
    r: &RatMatrix,
    t: &RatMatrix,
    pi: &TargetDistribution,
    mu: &TargetDistribution,
) -> Result<TransferConditionReport> {
    let shapes_ok = r.rows() == pi.space().len()
        && r.cols() == mu.space().len()
        && t.rows() == mu.space().len()
        && t.cols() == mu.space().len();
    if !shapes_ok {
        return Err(Error::Dimension("transfer triple has inconsistent shapes".into()));
    }
    let r_nonnegative = r.is_nonnegative();
    let r_rows_sum_one = r.row_sums().iter().all(|s| *s == Rat::one());
    let pi_r = pi_r_equals_mu(r, pi, mu);
    let t_stochastic = check_stochastic(t)? == StochasticVerdict::Stochastic;

    let mut t_reversible = false;
    let mut t_psd = false;
    let mut t_psd_evidence = PsdEvidence::NotEvaluated;
    if t_stochastic {
        let t_chain = StochasticMatrix::new(mu.space().clone(), t.clone())?;
        t_reversible = crate::matrix::check_reversible(&t_chain, mu)?;
        if t.mul(t)? == *t {
            t_psd = true;
            t_psd_evidence = PsdEvidence::ExactIdempotent;
        } else if t_reversible {
            let report = spectral::certify_psd(&t_chain, mu, spectral::DEFAULT_PSD_TOLERANCE)?;
            t_psd = report.psd;
            t_psd_evidence = PsdEvidence::Numeric { lambda_min: report.lambda_min };
        }
    }

    Ok(TransferConditionReport {
        r_nonnegative,
        r_rows_sum_one,
        pi_r_equals_mu: pi_r,
        t_stochastic,
        t_reversible,
        t_psd,
        t_psd_evidence,
    })
}

/// Composes `P = R T R*` exactly after verifying all conditions.
///
/// The conclusions are re-verified rather than assumed: `P` is constructed
/// as a stochastic matrix, checked reversible with respect to `pi`, and
/// certified to have no eigenvalue below `-1e-9`.
pub fn compose_transfer(
    r: &RatMatrix,
    t: &RatMatrix,
    pi: &TargetDistribution,
    mu: &TargetDistribution,
) -> Result<StochasticMatrix> {
    let report = verify_transfer_conditions(r, t, pi, mu)?;
    if !report.all_pass() {
        return Err(Error::InvalidInput(format!(
            "transfer conditions failed: {}",
            report.failures().join("; ")
        )));
    }
    let r_star = adjoint(r, pi, mu)?;
    let product = r.mul(t)?.mul(&r_star)?;
    let p = StochasticMatrix::new(pi.space().clone(), product)?;
    if !crate::matrix::check_reversible(&p, pi)? {
        return Err(Error::Internal("composed chain is not reversible".into()));
    }
    let certificate = spectral::certify_psd(&p, pi, spectral::DEFAULT_PSD_TOLERANCE)?;
    if !certificate.psd {
        return Err(Error::Falsified(format!(
            "R T R* produced lambda_min = {}",
            certificate.lambda_min
        )));
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Triple bundle JSON: omega with pi, omega_prime with mu, and file
// references for the R and T matrices.
// ---------------------------------------------------------------------------

/// Serialized form of a transfer triple; `R` and `T` are paths to matrix
/// CSV files, resolved relative to the bundle file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleBundle {
    pub omega: BaseSpaceDto,
    pub omega_prime: LiftedSpaceDto,
    #[serde(rename = "R")]
    pub r: String,
    #[serde(rename = "T")]
    pub t: String,
}

/// Base space with its target distribution, rationals as strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseSpaceDto {
    pub states: Vec<String>,
    pub pi: Vec<String>,
}

/// Lifted space with its distribution, rationals as strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftedSpaceDto {
    pub states: Vec<String>,
    pub mu: Vec<String>,
}
