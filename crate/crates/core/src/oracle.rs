//! Exhaustive ground truth for linear structures, independent of the
//! quantum simulation path.
//!
//! Everything here is derived from the autocorrelation spectrum
//! `r_f(α) = Σ_x (-1)^{f(x) ⊕ f(x ⊕ α)}`: `α` is a zero-class structure iff
//! `r_f(α) = 2^n`, a one-class structure iff `r_f(α) = -2^n`, and in general
//! the number of inputs breaking constancy in direction `α` is
//! `(2^n - |r_f(α)|) / 2`.

use rand::Rng as _;

use crate::boolfn::{MultiTruthTable, TruthTable};
use crate::error::{check_dim, Error, Result};
use crate::gf2::{BitVector, Subspace};
use crate::seed;
use crate::walsh::fwht;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutocorrSpectrum {
    pub n: usize,
    pub values: Vec<i64>,
}

impl AutocorrSpectrum {
    pub fn get(&self, alpha: u64) -> i64 {
        self.values[alpha as usize]
    }

    /// Inputs `x` on which `f(x ⊕ α) ⊕ f(x)` differs from its majority value.
    pub fn violations(&self, alpha: u64) -> u64 {
        (((1i64 << self.n) - self.get(alpha).abs()) / 2) as u64
    }
}

pub fn autocorrelation(f: &TruthTable) -> AutocorrSpectrum {
    let n = f.vars();
    let mut w = f.signs();
    fwht(&mut w);
    for v in w.iter_mut() {
        *v = v.wrapping_mul(*v);
    }
    // inverse transform of the power spectrum, scaled by 2^n
    fwht(&mut w);
    for v in w.iter_mut() {
        *v >>= n;
    }
    AutocorrSpectrum { n, values: w }
}

/// Zero-class structures as a subspace plus the one-class structures listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureSets {
    pub u0: Subspace,
    pub u1: Vec<BitVector>,
}

pub fn brute_structures(f: &TruthTable) -> Result<StructureSets> {
    let n = f.vars();
    let spec = autocorrelation(f);
    let full = 1i64 << n;
    let mut zero_class = Vec::new();
    let mut u1 = Vec::new();
    for (a, &v) in spec.values.iter().enumerate() {
        if v == full {
            zero_class.push(BitVector::from_bits_truncate(n, a as u64));
        } else if v == -full {
            u1.push(BitVector::from_bits_truncate(n, a as u64));
        }
    }
    let u0 = Subspace::from_vectors(n, &zero_class)?;
    if (1usize << u0.dim()) != zero_class.len() {
        return Err(Error::Internal(format!(
            "{} zero-class structures do not form a subspace of dimension {}",
            zero_class.len(),
            u0.dim()
        )));
    }
    Ok(StructureSets { u0, u1 })
}

/// One direction whose constancy fails on at most `r` inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RTypeEntry {
    pub alpha: BitVector,
    /// Majority value of `f(x ⊕ α) ⊕ f(x)`; ties resolve to 0.
    pub c: bool,
    pub violations: u64,
}

/// Every `α` whose violation count, minimized over the constant `c`, is at most `r`.
pub fn r_type_scan(f: &TruthTable, r: u64) -> Result<Vec<RTypeEntry>> {
    if r > f.len() {
        return Err(Error::OutOfRange(format!("r = {r} exceeds table size {}", f.len())));
    }
    let spec = autocorrelation(f);
    Ok((0..f.len())
        .filter_map(|a| {
            let violations = spec.violations(a);
            (violations <= r).then(|| RTypeEntry {
                alpha: BitVector::from_bits_truncate(f.vars(), a),
                c: spec.get(a) < 0,
                violations,
            })
        })
        .collect())
}

/// `{ x : f(x ⊕ α) ⊕ f(x) ≠ c }`.
pub fn violation_set(f: &TruthTable, alpha: &BitVector, c: bool) -> Result<TruthTable> {
    check_dim(f.vars(), alpha.dim())?;
    let mut g = f.shifted(alpha.bits()).xor(f)?;
    if c {
        g = g.complement();
    }
    Ok(g)
}

/// Whether all listed directions share a single violation set, the "uniform"
/// reading of an r-type structure.
pub fn violation_sets_coincide(f: &TruthTable, entries: &[RTypeEntry]) -> Result<bool> {
    let mut sets = entries.iter().map(|e| violation_set(f, &e.alpha, e.c));
    let first = match sets.next() {
        Some(s) => s?,
        None => return Ok(true),
    };
    for s in sets {
        if s? != first {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the sampled structure check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verification {
    Confirmed,
    /// `f(x) ≠ f(x ⊕ b)` was observed.
    Refuted { x: BitVector, b: BitVector },
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Confirmed)
    }
}

/// Checks `f(x) = f(x ⊕ b)` for every candidate at `p` uniform points drawn
/// with replacement.
pub fn sampled_verify(f: &TruthTable, candidates: &[BitVector], p: u64, seed: u64) -> Result<Verification> {
    if p == 0 {
        return Err(Error::OutOfRange("sample count p must be at least 1".into()));
    }
    let n = f.vars();
    for b in candidates {
        check_dim(n, b.dim())?;
    }
    let mut rng = seed::rng(seed);
    let mask = f.len() - 1;
    for b in candidates {
        for _ in 0..p {
            let x = rng.gen::<u64>() & mask;
            if f.get(x) != f.get(x ^ b.bits()) {
                return Ok(Verification::Refuted {
                    x: BitVector::from_bits_truncate(n, x),
                    b: *b,
                });
            }
        }
    }
    Ok(Verification::Confirmed)
}

/// All `s` with `F(x) = F(x ⊕ s)` for every `x`, including `s = 0`.
pub fn brute_periods(f: &MultiTruthTable) -> Result<Subspace> {
    let n = f.vars();
    let len = 1u64 << n;
    let periods: Vec<BitVector> = (0..len)
        .filter(|&s| (0..len).all(|x| f.get(x) == f.get(x ^ s)))
        .map(|s| BitVector::from_bits_truncate(n, s))
        .collect();
    let span = Subspace::from_vectors(n, &periods)?;
    if 1usize << span.dim() != periods.len() {
        return Err(Error::Internal("period set is not closed under xor".into()));
    }
    Ok(span)
}
