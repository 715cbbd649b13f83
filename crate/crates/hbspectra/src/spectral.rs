//! Spectral certification of reversible chains.
//!
//! A chain `P` reversible with respect to `pi` is similar to the symmetric
//! matrix `Q(x,y) = sqrt(P(x,y) P(y,x))`, so its spectrum is real and can be
//! computed with plain Jacobi rotations. The certification pipeline is:
//! exact reversibility check, symmetrize, eigenvalues, then the verdict
//! `lambda_min >= -tol`. When the input is exactly idempotent the spectrum
//! is contained in `{0, 1}` and an exact certificate is recorded alongside
//! the numeric one.
//!
//! The eigensolver is cyclic Jacobi: sweeps of plane rotations until the
//! off-diagonal Frobenius norm drops below `1e-13`, capped at 100 sweeps.
//! That is adequate for dense symmetric matrices up to a few hundred states,
//! which is the intended scale.

use num_traits::Zero;
use serde::Serialize;

use crate::matrix::{communicating_structure, StochasticMatrix, TargetDistribution};
use crate::rat::rat_to_f64;
use crate::{Error, Result};

const OFF_DIAGONAL_TARGET: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
const ASYMMETRY_TOLERANCE: f64 = 1e-10;

/// Default tolerance for the positive-semidefiniteness verdict.
pub const DEFAULT_PSD_TOLERANCE: f64 = 1e-9;

/// Mixing-time upper bound attached to a [`SpectralReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingBound {
    pub epsilon: f64,
    pub tau_upper: f64,
}

/// Full spectral certificate for a reversible chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Second-largest eigenvalue; absent for a single-state chain.
    pub lambda_1: Option<f64>,
    /// Smallest eigenvalue.
    pub lambda_min: f64,
    /// `max(lambda_1, |lambda_min|)`, the quantity controlling mixing.
    pub lambda_star: f64,
    pub psd: bool,
    pub tolerance: f64,
    /// True when exact idempotence proves the spectrum lies in `{0, 1}`,
    /// independently of floating point.
    pub exact_binary_spectrum: bool,
    /// Irreducible with at least one positive diagonal entry.
    pub is_ergodic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixing_bound: Option<MixingBound>,
}

/// Symmetrizes a reversible chain: `Q(x,y) = sqrt(P(x,y) P(y,x))`.
///
/// Under exact detailed balance this equals `sqrt(pi(x)/pi(y)) P(x,y)`, the
/// conjugation of `P` by `diag(sqrt(pi))`, so `Q` has the same eigenvalues
/// as `P`. The product is formed exactly before the single rounding, which
/// makes the output symmetric to the last bit. Refuses non-reversible input:
/// the conjugation would not be symmetric and its spectrum would not be real.
pub fn symmetrize(p: &StochasticMatrix, pi: &TargetDistribution) -> Result<Vec<Vec<f64>>> {
    if !crate::matrix::check_reversible(p, pi)? {
        return Err(Error::NotReversible(
            "symmetrization requires exact detailed balance".into(),
        ));
    }
    let n = p.n();
    let mut q = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in x..n {
            let prod = p.get(x, y) * p.get(y, x);
            let v = rat_to_f64(&prod).sqrt();
            q[x][y] = v;
            q[y][x] = v;
        }
    }
    Ok(q)
}

fn off_diagonal_frobenius(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += a[i][j] * a[i][j];
        }
    }
    (2.0 * acc).sqrt()
}

/// Cyclic Jacobi on a symmetric matrix; consumes its working copy.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = a.len();
    if n == 1 {
        return Ok(vec![a[0][0]]);
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_frobenius(&a) < OFF_DIAGONAL_TARGET {
            let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
            ev.sort_by(|x, y| y.partial_cmp(x).expect("real eigenvalues"));
            return Ok(ev);
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                a[p][p] -= h;
                a[q][q] += h;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp - s * (akq + tau * akp);
                    a[p][k] = a[k][p];
                    a[k][q] = akq + s * (akp - tau * akq);
                    a[q][k] = a[k][q];
                }
            }
        }
    }
    Err(Error::EigenNotConverged)
}

/// All eigenvalues of a symmetric float matrix, descending.
///
/// Input asymmetry up to `1e-10` is tolerated and averaged away; anything
/// beyond that is rejected rather than silently symmetrized.
pub fn eigenvalues_symmetric(q: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = q.len();
    if n == 0 || q.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("eigenvalue input must be square and nonempty".into()));
    }
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_asym = max_asym.max((q[i][j] - q[j][i]).abs());
        }
    }
    if max_asym > ASYMMETRY_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "matrix asymmetry {max_asym:.3e} exceeds tolerance {ASYMMETRY_TOLERANCE:.0e}"
        )));
    }
    let mut a = q.to_vec();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    jacobi_eigenvalues(a)
}

/// Certifies that a reversible chain has no negative eigenvalues.
///
/// The verdict is `lambda_min >= -tol` on the Jacobi spectrum, upgraded to
/// an exact certificate when `P` is exactly idempotent (idempotent matrices
/// have spectrum contained in `{0, 1}`).
pub fn certify_psd(
    p: &StochasticMatrix,
    pi: &TargetDistribution,
    tol: f64,
) -> Result<SpectralReport> {
    let q = symmetrize(p, pi)?;
    let eigenvalues = eigenvalues_symmetric(&q)?;
    let n = eigenvalues.len();
    let lambda_min = eigenvalues[n - 1];
    let lambda_1 = if n >= 2 { Some(eigenvalues[1]) } else { None };
    let lambda_star = match lambda_1 {
        Some(l1) => l1.max(lambda_min.abs()),
        None => 0.0,
    };
    if eigenvalues[0] > 1.0 + tol.max(1e-9) || lambda_min < -1.0 - tol.max(1e-9) {
        return Err(Error::Internal(format!(
            "stochastic spectrum escaped [-1, 1]: top {}, bottom {}",
            eigenvalues[0], lambda_min
        )));
    }
    let exact_binary_spectrum = {
        let m = p.matrix();
        m.mul(m)? == *m
    };
    let structure = communicating_structure(p);
    let has_self_loop = (0..p.n()).any(|i| !p.get(i, i).is_zero());
    let is_ergodic = structure.is_irreducible && has_self_loop;
    let psd = exact_binary_spectrum || lambda_min >= -tol;
    Ok(SpectralReport {
        eigenvalues,
        lambda_1,
        lambda_min,
        lambda_star,
        psd,
        tolerance: tol,
        exact_binary_spectrum,
        is_ergodic,
        mixing_bound: None,
    })
}

/// Upper bound on the mixing time: `(1 - lambda_star)^-1 ln(1/(eps pi_min))`.
///
/// Valid only for ergodic chains with `lambda_star < 1`; refuses anything
/// else, since the formula is meaningless there.
pub fn mixing_time_bound(
    report: &SpectralReport,
    pi: &TargetDistribution,
    epsilon: f64,
) -> Result<f64> {
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !report.is_ergodic {
        return Err(Error::MixingBound(
            "chain is not ergodic (needs irreducibility and a self-loop)".into(),
        ));
    }
    let gap = 1.0 - report.lambda_star;
    if gap < 1e-12 {
        return Err(Error::MixingBound(format!(
            "1 - lambda_star = {gap:.3e} is below 1e-12; the bound diverges"
        )));
    }
    let pi_min = rat_to_f64(pi.min_prob());
    Ok((1.0 / (epsilon * pi_min)).ln() / gap)
}

/// Computes and stores the mixing bound on the report.
pub fn attach_mixing_bound(
    report: &mut SpectralReport,
    pi: &TargetDistribution,
    epsilon: f64,
) -> Result<()> {
    let tau_upper = mixing_time_bound(report, pi, epsilon)?;
    report.mixing_bound = Some(MixingBound { epsilon, tau_upper });
    Ok(())
}
