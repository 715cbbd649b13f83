//! Seeded trajectory simulation and total-variation checks.
//!
//! The generator contract: ChaCha8 seeded from a single 64-bit integer.
//! Every heat-bath step consumes exactly two `u64` draws (one to select
//! the label, one for the in-block sample) and every transfer step exactly
//! three (lift, kernel, projection), so identical seeds give identical
//! trajectories on every platform. Draws are mapped to categories through
//! exact cumulative thresholds scaled to `2^64`; the sampled law matches
//! the exact row up to `2^-64` per entry, and outcomes with probability
//! below `2^-64` are never selected.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::heatbath::{validate_spec, HeatBathSpec};
use crate::matrix::{RatMatrix, StateSpace, TargetDistribution};
use crate::rat::{rat_sum, Rat};
use crate::transfer;
use crate::{Error, Result};

/// The deterministic generator used by every simulation entry point.
pub type ChainRng = ChaCha8Rng;

/// Seeds the generator; the seed is the whole reproducibility contract.
pub fn rng_from_seed(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact inverse-CDF table: category `i` is selected when the draw lands in
/// `[floor(c_{i-1} 2^64), floor(c_i 2^64))` for cumulative weights `c_i`.
#[derive(Debug, Clone)]
struct CdfTable {
    thresholds: Vec<u128>,
}

impl CdfTable {
    fn new(weights: &[Rat]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("empty weight vector".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidInput("negative weight".into()));
        }
        if rat_sum(weights) != Rat::one() {
            return Err(Error::InvalidInput("weights must sum to exactly 1".into()));
        }
        let two64 = BigInt::one() << 64u32;
        let mut acc = Rat::zero();
        let mut thresholds = Vec::with_capacity(weights.len());
        for w in weights {
            acc += w;
            let scaled = (acc.numer() * &two64) / acc.denom();
            let t = scaled
                .to_u128()
                .ok_or_else(|| Error::Internal("cumulative threshold out of range".into()))?;
            thresholds.push(t);
        }
        if *thresholds.last().expect("nonempty") != 1u128 << 64 {
            return Err(Error::Internal("final threshold is not 2^64".into()));
        }
        Ok(Self { thresholds })
    }

    fn pick(&self, draw: u64) -> usize {
        let u = draw as u128;
        self.thresholds.partition_point(|&t| t <= u)
    }
}

struct SamplerLabel {
    block_of_state: Vec<usize>,
    blocks: Vec<(Vec<usize>, CdfTable)>,
}

/// Precomputed sampling tables for a heat-bath spec; use this form for
/// anything beyond a handful of steps.
pub struct HeatBathSampler {
    label_table: CdfTable,
    labels: Vec<SamplerLabel>,
    n_states: usize,
}

impl HeatBathSampler {
    pub fn new(spec: &HeatBathSpec) -> Result<Self> {
        let report = validate_spec(spec);
        if !report.is_valid() {
            return Err(Error::InvalidSpec(report.render()));
        }
        let pi = spec.target()?;
        let n = spec.space().len();
        let rho: Vec<Rat> = spec.labels().iter().map(|l| l.rho.clone()).collect();
        let label_table = CdfTable::new(&rho)?;
        let mut labels = Vec::with_capacity(spec.labels().len());
        for label in spec.labels() {
            let mut block_of_state = vec![usize::MAX; n];
            let mut blocks = Vec::with_capacity(label.blocks.len());
            for (bi, block) in label.blocks.iter().enumerate() {
                for &x in block {
                    block_of_state[x] = bi;
                }
                let mass = rat_sum(
                    &block.iter().map(|&y| pi.prob(y).clone()).collect::<Vec<_>>(),
                );
                let conditional: Vec<Rat> =
                    block.iter().map(|&y| pi.prob(y) / &mass).collect();
                blocks.push((block.clone(), CdfTable::new(&conditional)?));
            }
            labels.push(SamplerLabel { block_of_state, blocks });
        }
        Ok(Self { label_table, labels, n_states: n })
    }

    /// One transition from `x`: draw a label, then draw within its block.
    /// Consumes exactly two `u64` values from the generator.
    pub fn step(&self, x: usize, rng: &mut ChainRng) -> usize {
        let a = self.label_table.pick(rng.next_u64());
        let label = &self.labels[a];
        let (members, table) = &label.blocks[label.block_of_state[x]];
        members[table.pick(rng.next_u64())]
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }
}

/// One heat-bath transition. Convenience wrapper that rebuilds the
/// sampling tables; loops should construct a [`HeatBathSampler`] once.
pub fn step(spec: &HeatBathSpec, x: usize, rng: &mut ChainRng) -> Result<usize> {
    let sampler = HeatBathSampler::new(spec)?;
    if x >= sampler.n_states() {
        return Err(Error::InvalidInput(format!("state index {x} out of range")));
    }
    Ok(sampler.step(x, rng))
}

/// Precomputed tables for the three-stage lifted transition.
pub struct TransferSampler {
    r_rows: Vec<CdfTable>,
    t_rows: Vec<CdfTable>,
    r_star_rows: Vec<CdfTable>,
}

impl TransferSampler {
    pub fn new(
        r: &RatMatrix,
        t: &RatMatrix,
        pi: &TargetDistribution,
        mu: &TargetDistribution,
    ) -> Result<Self> {
        let report = transfer::verify_transfer_conditions(r, t, pi, mu)?;
        if !report.all_pass() {
            return Err(Error::InvalidInput(format!(
                "transfer conditions failed: {}",
                report.failures().join("; ")
            )));
        }
        let r_star = transfer::adjoint(r, pi, mu)?;
        let rows_of = |m: &RatMatrix| -> Result<Vec<CdfTable>> {
            (0..m.rows()).map(|i| CdfTable::new(m.row(i))).collect()
        };
        Ok(Self {
            r_rows: rows_of(r)?,
            t_rows: rows_of(t)?,
            r_star_rows: rows_of(&r_star)?,
        })
    }

    /// One transition of `R T R*` from `x`: lift, kernel step, project.
    /// Consumes exactly three `u64` values from the generator.
    pub fn step(&self, x: usize, rng: &mut ChainRng) -> usize {
        let lifted = self.r_rows[x].pick(rng.next_u64());
        let moved = self.t_rows[lifted].pick(rng.next_u64());
        self.r_star_rows[moved].pick(rng.next_u64())
    }
}

/// One lifted transition; wrapper over [`TransferSampler`].
pub fn transfer_step(
    r: &RatMatrix,
    t: &RatMatrix,
    pi: &TargetDistribution,
    mu: &TargetDistribution,
    x: usize,
    rng: &mut ChainRng,
) -> Result<usize> {
    let sampler = TransferSampler::new(r, t, pi, mu)?;
    if x >= pi.space().len() {
        return Err(Error::InvalidInput(format!("state index {x} out of range")));
    }
    Ok(sampler.step(x, rng))
}

/// Where a trajectory starts: a fixed state or a draw from a distribution
/// (which consumes one extra `u64` before the first step).
#[derive(Debug, Clone)]
pub enum Start {
    State(usize),
    Distribution(Vec<Rat>),
}

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub seed: u64,
    pub steps: usize,
    pub start: Start,
}

/// Runs a seeded trajectory; the result has `steps + 1` entries and begins
/// with the start state.
pub fn run_trajectory(spec: &HeatBathSpec, config: &TrajectoryConfig) -> Result<Vec<usize>> {
    let sampler = HeatBathSampler::new(spec)?;
    let mut rng = rng_from_seed(config.seed);
    let mut x = match &config.start {
        Start::State(i) => {
            if *i >= sampler.n_states() {
                return Err(Error::InvalidInput(format!("start state {i} out of range")));
            }
            *i
        }
        Start::Distribution(d) => {
            if d.len() != sampler.n_states() {
                return Err(Error::Dimension("start distribution length mismatch".into()));
            }
            CdfTable::new(d)?.pick(rng.next_u64())
        }
    };
    let mut out = Vec::with_capacity(config.steps + 1);
    out.push(x);
    for _ in 0..config.steps {
        x = sampler.step(x, &mut rng);
        out.push(x);
    }
    Ok(out)
}

/// Renders a trajectory as `step,state` CSV with labelled states.
pub fn trajectory_csv(space: &StateSpace, trajectory: &[usize]) -> String {
    let mut out = String::from("step,state\n");
    for (i, &x) in trajectory.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i, space.label(x)));
    }
    out
}

/// Total variation distance `(1/2) sum |p_i - q_i|` between float
/// distributions.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension("distributions differ in length".into()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Exact total variation distance between rational distributions.
pub fn tv_distance_exact(p: &[Rat], q: &[Rat]) -> Result<Rat> {
    if p.len() != q.len() {
        return Err(Error::Dimension("distributions differ in length".into()));
    }
    let two = Rat::new(2.into(), 1.into());
    let sum = p
        .iter()
        .zip(q)
        .fold(Rat::zero(), |acc, (a, b)| acc + (a - b).abs());
    Ok(sum / two)
}
