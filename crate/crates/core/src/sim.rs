//! Exact measurement statistics of the two-register routines.
//!
//! Nothing here builds a state vector. Measuring the output register after
//! the oracle is simulated by drawing the input label `m` uniformly: outcome
//! word `w` then occurs with probability `|S_w| / 2^n`, which is exactly the
//! Born probability of seeing `w`. The input register is left in the uniform
//! superposition over the collapse set `S`, and its Hadamard-basis
//! distribution `|Σ_{x∈S} (-1)^{x·y}|² / (|S|·2^n)` is computed with one
//! Walsh–Hadamard transform of the indicator of `S`.

use rand::Rng as _;

use crate::boolfn::{MultiTruthTable, TruthTable};
use crate::error::{check_dim, Error, Result};
use crate::gf2::{null_space_basis, BitMatrix, BitVector, Subspace, DEFAULT_N_CAP};
use crate::seed::{self, derive_seed};
use crate::walsh::fwht;

/// Post-measurement state of the input register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseOutcome {
    pub n: usize,
    /// Anchors `a_1..a_l`; the implicit `a_0 = 0` is not stored.
    pub anchors: Vec<BitVector>,
    /// The hidden label that produced the outcome.
    pub m: BitVector,
    /// Measured word `(F_0, ..., F_l)` with `F_j = f(m ⊕ a_j)`.
    pub observed: Vec<bool>,
    /// Indicator of `S = { x : f(x ⊕ a_j) = F_j for all j }`.
    pub members: TruthTable,
    pub size: u64,
}

impl CollapseOutcome {
    pub fn contains(&self, x: u64) -> bool {
        self.members.get(x)
    }

    pub fn observed_string(&self) -> String {
        self.observed.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Collapse with a uniformly drawn label `m`.
pub fn collapse(f: &TruthTable, anchors: &[BitVector], seed: u64) -> Result<CollapseOutcome> {
    let m = seed::rng(seed).gen::<u64>() & (f.len() - 1);
    collapse_at(f, anchors, &BitVector::from_bits_truncate(f.vars(), m))
}

/// Collapse for a given label `m`.
pub fn collapse_at(f: &TruthTable, anchors: &[BitVector], m: &BitVector) -> Result<CollapseOutcome> {
    if anchors.is_empty() {
        return Err(Error::EmptyAnchors);
    }
    let n = f.vars();
    check_dim(n, m.dim())?;
    for a in anchors {
        check_dim(n, a.dim())?;
    }
    let mut observed = Vec::with_capacity(anchors.len() + 1);
    let mut members = TruthTable::constant(n, true)?;
    for shift in std::iter::once(0).chain(anchors.iter().map(BitVector::bits)) {
        let value = f.get(m.bits() ^ shift);
        observed.push(value);
        let shifted = f.shifted(shift);
        let agree = if value { shifted } else { shifted.complement() };
        members = members.and(&agree)?;
    }
    let size = members.count_ones();
    debug_assert!(size >= 1 && members.get(m.bits()));
    Ok(CollapseOutcome { n, anchors: anchors.to_vec(), m: *m, observed, members, size })
}

/// Hadamard-basis measurement law of the uniform superposition over a set.
#[derive(Clone, Debug, PartialEq)]
pub struct YDistribution {
    pub n: usize,
    /// `Σ_{x∈S} (-1)^{x·y}` for every `y`.
    pub amplitudes: Vec<i64>,
    pub size: u64,
    pub probs: Vec<f64>,
}

impl YDistribution {
    /// Distribution for the superposition over the set indicated by `members`.
    pub fn of_set(members: &TruthTable) -> Result<Self> {
        let n = members.vars();
        let size = members.count_ones();
        if size == 0 {
            return Err(Error::OutOfRange("collapse set is empty".into()));
        }
        let mut amplitudes: Vec<i64> = (0..members.len()).map(|x| members.get(x) as i64).collect();
        fwht(&mut amplitudes);
        let norm = (size as f64) * (members.len() as f64);
        let probs = amplitudes.iter().map(|&a| (a * a) as f64 / norm).collect();
        Ok(Self { n, amplitudes, size, probs })
    }

    pub fn prob(&self, y: u64) -> f64 {
        self.probs[y as usize]
    }

    /// Outcomes with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(move |(y, _)| BitVector::from_bits_truncate(self.n, y as u64))
    }

    /// Exact draw using integer weights `A(y)^2`, which sum to `|S|·2^n`.
    pub fn sample(&self, rng: &mut seed::Rng) -> BitVector {
        let total = self.size << self.n;
        let mut u = rng.gen_range(0..total);
        for (y, &a) in self.amplitudes.iter().enumerate() {
            let w = (a * a) as u64;
            if u < w {
                return BitVector::from_bits_truncate(self.n, y as u64);
            }
            u -= w;
        }
        unreachable!("weights sum to |S|·2^n by Parseval")
    }
}

pub fn y_distribution(c: &CollapseOutcome) -> YDistribution {
    YDistribution::of_set(&c.members).expect("collapse sets contain their label")
}

pub fn sample_y(c: &CollapseOutcome, seed: u64) -> BitVector {
    y_distribution(c).sample(&mut seed::rng(seed))
}

/// One collapse followed by one Hadamard-basis measurement.
pub fn collapse_and_sample(f: &TruthTable, anchors: &[BitVector], seed: u64) -> Result<(CollapseOutcome, BitVector)> {
    let c = collapse(f, anchors, derive_seed(seed, 0))?;
    let y = sample_y(&c, derive_seed(seed, 1));
    Ok((c, y))
}

/// One repetition of the period-finding routine on a multi-output table.
pub fn simon_round(f: &MultiTruthTable, seed: u64) -> Result<BitVector> {
    if f.outputs() == 0 {
        return Err(Error::OutOfRange("function needs at least one output bit".into()));
    }
    let n = f.vars();
    let mut rng = seed::rng(seed);
    let m = rng.gen::<u64>() & ((1u64 << n) - 1);
    let target = f.get(m);
    let members = TruthTable::from_fn(n, |x| f.get(x) == target)?;
    Ok(YDistribution::of_set(&members)?.sample(&mut rng))
}

/// How `quantum_solve` draws from the solution superposition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolveSampler {
    /// Uniform coefficients over a precomputed null-space basis.
    #[default]
    Coefficients,
    /// Enumerates the whole support `{ z : y·z = 0 for all rows y }` and picks
    /// uniformly; `O(2^n)` per draw, kept for cross-checking.
    Support,
}

/// Simulates preparing the uniform superposition over the row span of `ys`,
/// applying `H^{⊗n}`, and measuring `samples` times. Each draw is uniform over
/// the solutions of `ys · z = 0`; the span of all draws is returned.
pub fn quantum_solve(ys: &BitMatrix, seed: u64, samples: usize) -> Result<Subspace> {
    quantum_solve_with(ys, seed, samples, SolveSampler::Coefficients)
}

pub fn quantum_solve_with(ys: &BitMatrix, seed: u64, samples: usize, sampler: SolveSampler) -> Result<Subspace> {
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be at least 1".into()));
    }
    let n = ys.dim();
    let mut rng = seed::rng(seed);
    let draws: Vec<BitVector> = match sampler {
        SolveSampler::Coefficients => {
            let ns = null_space_basis(ys);
            let k = ns.dim();
            (0..samples)
                .map(|_| {
                    let coeffs = if k == 0 { 0 } else { rng.gen::<u64>() & (u64::MAX >> (64 - k)) };
                    ns.combine(coeffs)
                })
                .collect()
        }
        SolveSampler::Support => {
            if n > DEFAULT_N_CAP {
                return Err(Error::DimensionTooLarge { n, cap: DEFAULT_N_CAP });
            }
            let support: Vec<u64> = (0..1u64 << n)
                .filter(|&z| ys.words().iter().all(|&y| (y & z).count_ones() % 2 == 0))
                .collect();
            (0..samples)
                .map(|_| BitVector::from_bits_truncate(n, support[rng.gen_range(0..support.len())]))
                .collect()
        }
    };
    Subspace::from_vectors(n, &draws)
}
