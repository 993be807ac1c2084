//! Top-level structure-finding procedures: multi-period recovery, the
//! single-anchor-set algorithm, and the multi-pass algorithm that waits for
//! the recovered span to stabilize.
//!
//! All three share the same guarantee. Every sampled `y` is orthogonal to the
//! true zero-class structure space, so the null space of the collected `y`s
//! always contains it; the sampled verification step is what rejects extra
//! directions.

use rand::Rng as _;

use crate::boolfn::{MultiTruthTable, TruthTable};
use crate::error::{Error, Result};
use crate::gf2::{null_space_basis, BitMatrix, BitVector, RowReducer, Subspace};
use crate::oracle::{self, Verification};
use crate::seed::{self, derive_seed};
use crate::sim;

/// Knobs of the sampling procedures. [`RunConfig::for_n`] gives the defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// Maximum sampling rounds per anchor set; also the pass budget of the
    /// multi-pass variant.
    pub rounds_cap: usize,
    /// Consecutive identical spans that end the multi-pass variant.
    pub stabilize_window: usize,
    /// Points checked per candidate basis vector in the verification step.
    pub verify_p: u64,
    /// Anchors per collapse (`l`); the first pass of the multi-pass variant
    /// uses `max(n, anchor_count)`.
    pub anchor_count: usize,
    /// Growth of the anchor count between passes.
    pub anchor_growth: usize,
    /// Consecutive rounds without a rank increase after which the `y`
    /// collection is considered converged.
    pub rank_patience: usize,
    pub seed: u64,
    /// Cross-check the result against the exhaustive oracle.
    pub oracle_check: bool,
}

impl RunConfig {
    pub fn for_n(n: usize) -> Self {
        Self {
            rounds_cap: 8 * n.max(1),
            stabilize_window: 3,
            verify_p: (4 * n as u64).max(64),
            anchor_count: n.max(1),
            anchor_growth: n.div_ceil(2).max(1),
            rank_patience: (2 * n).max(20).min(8 * n.max(1)),
            seed: seed::DEFAULT_SEED,
            oracle_check: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("rounds_cap", self.rounds_cap as u64),
            ("stabilize_window", self.stabilize_window as u64),
            ("verify_p", self.verify_p),
            ("anchor_count", self.anchor_count as u64),
            ("anchor_growth", self.anchor_growth as u64),
            ("rank_patience", self.rank_patience as u64),
        ];
        match counts.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(Error::OutOfRange(format!("{name} must be at least 1"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    /// Claimed span of the zero-class structures.
    pub candidate: Subspace,
    /// Outcome of the sampled verification of every candidate basis vector.
    pub verified: bool,
    /// `(x, b)` with `f(x) ≠ f(x ⊕ b)` when verification failed.
    pub witness: Option<(BitVector, BitVector)>,
    /// Sampling rounds over all passes.
    pub rounds_used: usize,
    pub passes: usize,
    /// The `y`s behind `candidate` (those of the last pass).
    pub ys_collected: BitMatrix,
    /// False when a budget ran out before convergence.
    pub stabilized: bool,
    /// Exhaustive structure space, when an oracle check was requested.
    pub oracle_u0: Option<Subspace>,
    /// Verification passed but the oracle disagrees: a pseudo structure.
    pub pseudo_flag: bool,
}

impl StructureReport {
    /// Whether the oracle check ran and matched the candidate.
    pub fn oracle_agrees(&self) -> Option<bool> {
        self.oracle_u0.as_ref().map(|u0| *u0 == self.candidate)
    }

    /// A failure a caller can see: unverified, unstabilized, or contradicted
    /// by the oracle.
    pub fn flagged(&self) -> bool {
        !self.verified || !self.stabilized || self.oracle_agrees() == Some(false)
    }
}

struct Collection {
    ys: BitMatrix,
    rounds: usize,
    converged: bool,
}

/// Draws `y`s until the rank is full, has stalled for `rank_patience` rounds,
/// or `rounds_cap` is reached.
fn collect_ys(
    n: usize,
    cfg: &RunConfig,
    seed: u64,
    mut draw: impl FnMut(u64) -> Result<BitVector>,
) -> Result<Collection> {
    let mut ys = BitMatrix::empty(n);
    let mut reducer = RowReducer::new(n);
    let mut stall = 0;
    for round in 0..cfg.rounds_cap {
        let y = draw(derive_seed(seed, round as u64))?;
        ys.push(y)?;
        if reducer.insert(&y)? {
            stall = 0;
        } else {
            stall += 1;
        }
        if reducer.rank() == n || stall >= cfg.rank_patience {
            return Ok(Collection { ys, rounds: round + 1, converged: true });
        }
    }
    Ok(Collection { ys, rounds: cfg.rounds_cap, converged: false })
}

/// Outcome of multi-period recovery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodReport {
    pub periods: Subspace,
    pub rounds_used: usize,
    pub stabilized: bool,
    pub ys_collected: BitMatrix,
}

/// Repeats the period-finding routine and solves the orthogonality system.
pub fn find_periods(f: &MultiTruthTable, cfg: &RunConfig) -> Result<PeriodReport> {
    cfg.validate()?;
    let n = f.vars();
    let c = collect_ys(n, cfg, cfg.seed, |s| sim::simon_round(f, s))?;
    Ok(PeriodReport {
        periods: null_space_basis(&c.ys),
        rounds_used: c.rounds,
        stabilized: c.converged,
        ys_collected: c.ys,
    })
}

fn independent_anchors(n: usize, count: usize, seed: u64) -> Result<Vec<BitVector>> {
    if count > n {
        return Err(Error::OutOfRange(format!("cannot pick {count} independent anchors in dimension {n}")));
    }
    let mut rng = seed::rng(seed);
    let mut reducer = RowReducer::new(n);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = BitVector::from_bits_truncate(n, rng.gen());
        if reducer.insert(&a)? {
            out.push(a);
        }
    }
    Ok(out)
}

fn random_anchors(n: usize, count: usize, seed: u64) -> Vec<BitVector> {
    let mut rng = seed::rng(seed);
    (0..count).map(|_| BitVector::from_bits_truncate(n, rng.gen())).collect()
}

fn finish(
    f: &TruthTable,
    cfg: &RunConfig,
    candidate: Subspace,
    ys: BitMatrix,
    rounds_used: usize,
    passes: usize,
    stabilized: bool,
) -> Result<StructureReport> {
    let basis: Vec<BitVector> = candidate.basis_vectors().collect();
    let check = oracle::sampled_verify(f, &basis, cfg.verify_p, derive_seed(cfg.seed, 2))?;
    let witness = match check {
        Verification::Confirmed => None,
        Verification::Refuted { x, b } => Some((x, b)),
    };
    let verified = check.passed();
    let oracle_u0 = if cfg.oracle_check { Some(oracle::brute_structures(f)?.u0) } else { None };
    let pseudo_flag = verified && oracle_u0.as_ref().is_some_and(|u0| *u0 != candidate);
    Ok(StructureReport {
        candidate,
        verified,
        witness,
        rounds_used,
        passes,
        ys_collected: ys,
        stabilized,
        oracle_u0,
        pseudo_flag,
    })
}

fn require_vars(f: &TruthTable) -> Result<usize> {
    match f.vars() {
        0 => Err(Error::InvalidDimension(0)),
        n => Ok(n),
    }
}

/// One fixed set of linearly independent anchors, repeated collapse and
/// measurement, one null-space solve, then sampled verification.
pub fn find_structure_simple(f: &TruthTable, cfg: &RunConfig) -> Result<StructureReport> {
    cfg.validate()?;
    let n = require_vars(f)?;
    let anchors = independent_anchors(n, cfg.anchor_count, derive_seed(cfg.seed, 0))?;
    let c = collect_ys(n, cfg, derive_seed(cfg.seed, 1), |s| {
        sim::collapse_and_sample(f, &anchors, s).map(|(_, y)| y)
    })?;
    let candidate = null_space_basis(&c.ys);
    finish(f, cfg, candidate, c.ys, c.rounds, 1, c.converged)
}

/// Independent passes with fresh random anchor sets of growing size; stops
/// once `stabilize_window` consecutive passes return the same span.
pub fn find_structure_iterative(f: &TruthTable, cfg: &RunConfig) -> Result<StructureReport> {
    cfg.validate()?;
    let n = require_vars(f)?;
    let pass_seed = derive_seed(cfg.seed, 3);
    let mut anchors_len = n.max(cfg.anchor_count);
    let mut history: Vec<Subspace> = Vec::new();
    let mut rounds_used = 0;
    let mut last_ys = BitMatrix::empty(n);
    for pass in 0..cfg.rounds_cap {
        let seed = derive_seed(pass_seed, pass as u64);
        let anchors = random_anchors(n, anchors_len, derive_seed(seed, 0));
        let c = collect_ys(n, cfg, derive_seed(seed, 1), |s| {
            sim::collapse_and_sample(f, &anchors, s).map(|(_, y)| y)
        })?;
        rounds_used += c.rounds;
        history.push(null_space_basis(&c.ys));
        last_ys = c.ys;
        anchors_len += cfg.anchor_growth;

        let window = cfg.stabilize_window;
        if history.len() >= window && history[history.len() - window..].windows(2).all(|w| w[0] == w[1]) {
            let candidate = history.pop().expect("history is nonempty");
            return finish(f, cfg, candidate, last_ys, rounds_used, pass + 1, true);
        }
    }
    let candidate = history.pop().expect("rounds_cap is at least 1");
    finish(f, cfg, candidate, last_ys, rounds_used, cfg.rounds_cap, false)
}

/// One confirmation experiment for a suspected structure `alpha`: `p`
/// experiments of `l + 1` uniformly drawn checks each. Returns whether no
/// violation was seen.
pub fn confirm_trial(f: &TruthTable, alpha: &BitVector, l: u64, p: u64, seed: u64) -> Result<bool> {
    let draws = (l + 1)
        .checked_mul(p)
        .ok_or_else(|| Error::OutOfRange("(l + 1) * p overflows".into()))?;
    Ok(oracle::sampled_verify(f, std::slice::from_ref(alpha), draws, seed)?.passed())
}
