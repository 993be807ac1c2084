//! Probability of collecting a full-rank set of uniform vectors, and the
//! confirmation odds of pseudo-structures under random checking.
//!
//! With `P_n = Π_{i=1}^{n} (1 − 2^{−i})` and `q(n, i)` the excess-draw
//! weight, the chance that `k ≥ n` uniform draws from `F_2^n` span the space
//! is `s(n, k) = P_n · q(n, k − n)`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, RowReducer};
use crate::seed;

/// `Π_{i=1}^{n} (1 − 2^{−i})`.
pub fn p_full(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 - (-(i as f64)).exp2()).product()
}

/// Excess weight via the prefix recurrence `q(n,i) = Σ_{m≤i} 2^{−m} q(n−1,m)`.
pub fn q(n: usize, i: usize) -> f64 {
    q_row(n, i)[i]
}

/// `q(n, 0..=i)` in one pass.
fn q_row(n: usize, i: usize) -> Vec<f64> {
    // q(0, m) = 1 reproduces q(1, m) = 2 − 2^{−m}
    let mut row = vec![1.0; i + 1];
    for _ in 0..n {
        let mut acc = 0.0;
        for (m, v) in row.iter_mut().enumerate() {
            acc += (-(m as f64)).exp2() * *v;
            *v = acc;
        }
    }
    row
}

/// Exact rational counterpart of [`q`].
pub fn q_exact(n: usize, i: usize) -> BigRational {
    let mut row = vec![BigRational::one(); i + 1];
    for _ in 0..n {
        let mut acc = BigRational::zero();
        for (m, v) in row.iter_mut().enumerate() {
            acc += dyadic(m) * &*v;
            *v = acc.clone();
        }
    }
    row.swap_remove(i)
}

fn dyadic(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

pub const Q_DIRECT_MAX_N: usize = 8;
pub const Q_DIRECT_MAX_I: usize = 12;

/// Sum over all compositions `x_0 + … + x_n = i` of `2^{−(n x_0 + (n−1) x_1 + … + x_{n−1})}`,
/// evaluated exactly. `x_n` carries weight zero.
pub fn q_direct_exact(n: usize, i: usize) -> Result<BigRational> {
    if n == 0 || n > Q_DIRECT_MAX_N {
        return Err(Error::OutOfRange(format!("q_direct needs 1 <= n <= {Q_DIRECT_MAX_N}, got {n}")));
    }
    if i > Q_DIRECT_MAX_I {
        return Err(Error::OutOfRange(format!("q_direct needs i <= {Q_DIRECT_MAX_I}, got {i}")));
    }
    // exponent -> number of compositions reaching it
    let mut counts = vec![0u64; n * i + 1];
    let mut parts = vec![0usize; n + 1];
    compositions(&mut parts, 0, i, &mut |xs| {
        let e: usize = xs[..n].iter().enumerate().map(|(j, &x)| (n - j) * x).sum();
        counts[e] += 1;
    });
    let mut total = BigRational::zero();
    for (e, &c) in counts.iter().enumerate() {
        if c > 0 {
            total += dyadic(e) * BigRational::from_integer(BigInt::from(c));
        }
    }
    Ok(total)
}

pub fn q_direct(n: usize, i: usize) -> Result<f64> {
    q_direct_exact(n, i).map(|r| to_f64(&r))
}

fn compositions(parts: &mut [usize], pos: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
    if pos + 1 == parts.len() {
        parts[pos] = left;
        visit(parts);
        return;
    }
    for x in 0..=left {
        parts[pos] = x;
        compositions(parts, pos + 1, left - x, visit);
    }
}

/// Nearest-ish double for a rational with a power-of-two-friendly size.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// `s(n, k) = P_n · q(n, k − n)`; zero when `k < n`.
pub fn success_prob(n: usize, k: usize) -> f64 {
    if k < n {
        return 0.0;
    }
    p_full(n) * q(n, k - n)
}

/// `log2(1 − s(n, k))`, from the complementary product
/// `1 − Π_{i=0}^{n−1} (1 − 2^{i−k})` so that it stays accurate as `s → 1`.
pub fn log_failure(n: usize, k: usize) -> f64 {
    let ln_s: f64 = (0..n).map(|i| (-(((i as f64) - (k as f64)).exp2())).ln_1p()).sum();
    (-ln_s.exp_m1()).log2()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbRow {
    pub k: usize,
    pub s: f64,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    pub n: usize,
    pub rows: Vec<ProbRow>,
}

impl ProbTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema=1\nn,k,s,h\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", self.n, r.k, r.s, r.h);
        }
        out
    }
}

pub fn prob_table(n: usize, k_max: usize) -> Result<ProbTable> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    if k_max < n {
        return Err(Error::OutOfRange(format!("k_max {k_max} below n {n}")));
    }
    let p = p_full(n);
    let qs = q_row(n, k_max - n);
    let rows = (n..=k_max)
        .map(|k| ProbRow { k, s: p * qs[k - n], h: log_failure(n, k) })
        .collect();
    Ok(ProbTable { n, rows })
}

/// `(1 − r/2^n)^{(l+1)p}`: chance that `(l+1)p` uniform checks all miss the
/// `r` violating inputs.
pub fn pseudo_confirm_prob(n: usize, r: u64, l: u64, p: u64) -> Result<f64> {
    let size = (n as f64).exp2();
    if r as f64 > size {
        return Err(Error::OutOfRange(format!("r = {r} exceeds 2^{n}")));
    }
    let miss = 1.0 - r as f64 / size;
    Ok(miss.powf(((l + 1) * p) as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialBound {
    /// `β n / ((l+1) · (−log2(1 − r/2^n)))`
    pub bound: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Verification rounds needed to push pseudo-confirmation below `2^{−βn}`,
/// with the sandwich `(β n ln2/(l+1)) · (2^n/r) · [1/2, 1]`.
pub fn required_trials(n: usize, r: u64, l: u64, beta: f64) -> Result<TrialBound> {
    if n == 0 || n > 62 {
        return Err(Error::InvalidDimension(n));
    }
    if r == 0 || r >= 1u64 << (n - 1) {
        return Err(Error::OutOfRange(format!("need 0 < r < 2^{}, got {r}", n - 1)));
    }
    let x = r as f64 / (n as f64).exp2();
    let scale = beta * n as f64 / (l + 1) as f64;
    let bound = scale / -(-x).ln_1p() * std::f64::consts::LN_2;
    let upper = scale * std::f64::consts::LN_2 / x;
    Ok(TrialBound { bound, lower: upper / 2.0, upper })
}

/// Fraction of `trials` in which `k` uniform vectors of `F_2^n` reach full rank.
pub fn full_rank_rate(n: usize, k: usize, trials: usize, seed: u64) -> Result<f64> {
    if n == 0 || n > 64 {
        return Err(Error::InvalidDimension(n));
    }
    let mut rng = seed::rng(seed);
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut red = RowReducer::new(n);
        for _ in 0..k {
            red.insert(&BitVector::from_bits_truncate(n, rng.gen()))?;
        }
        if red.rank() == n {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Outcome of one self-check run by `prob --verify`.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Recurrence against direct enumeration, and the rank experiment against `s(n, k)`.
pub fn self_check(seed: u64, trials: usize) -> Vec<CheckLine> {
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for n in 1..=Q_DIRECT_MAX_N {
        for i in 0..=Q_DIRECT_MAX_I {
            let d = q_direct(n, i).expect("within caps");
            worst = worst.max((q(n, i) - d).abs());
        }
    }
    out.push(CheckLine {
        name: "q_recurrence_vs_direct".into(),
        passed: worst <= 1e-12,
        detail: format!("max_abs_err={worst:e}"),
    });
    for (idx, n) in [4usize, 8].into_iter().enumerate() {
        let mut bad = Vec::new();
        for k in n..=n + 8 {
            let s = success_prob(n, k);
            let sub = seed::derive_seed(seed, (idx * 64 + k) as u64);
            let rate = full_rank_rate(n, k, trials, sub).expect("valid n");
            let se = (s * (1.0 - s) / trials as f64).sqrt();
            if (rate - s).abs() > 3.0 * se {
                bad.push(k);
            }
        }
        out.push(CheckLine {
            name: format!("rank_rate_n{n}"),
            passed: bad.is_empty(),
            detail: format!("trials={trials} outside_3se={bad:?}"),
        });
    }
    out
}
