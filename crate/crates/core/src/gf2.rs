//! Bit-packed vectors, matrices and subspaces over GF(2).
//!
//! Coordinate `x_1` lives in bit 0 of the packed word. Text forms list
//! coordinates `x_1 x_2 ... x_n` left to right, so `"110"` has `x_1 = x_2 = 1`
//! and packs to `0b011`.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};

/// Largest dimension a [`BitVector`] can hold.
pub const MAX_VECTOR_DIM: usize = 64;

/// Default cap on the number of variables of anything stored as a 2^n table.
pub const DEFAULT_N_CAP: usize = 24;

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// An element of F_2^n.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: usize,
    bits: u64,
}

impl BitVector {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_VECTOR_DIM {
            return Err(Error::DimensionTooLarge { n, cap: MAX_VECTOR_DIM });
        }
        if bits & !low_mask(n) != 0 {
            return Err(Error::OutOfRange(format!("bits {bits:#x} do not fit in {n} coordinates")));
        }
        Ok(Self { n, bits })
    }

    /// Builds a vector, silently truncating `bits` to the low `n` positions.
    pub fn from_bits_truncate(n: usize, bits: u64) -> Self {
        assert!(n <= MAX_VECTOR_DIM, "dimension {n} exceeds {MAX_VECTOR_DIM}");
        Self { n, bits: bits & low_mask(n) }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_bits_truncate(n, 0)
    }

    pub fn ones(n: usize) -> Self {
        Self::from_bits_truncate(n, u64::MAX)
    }

    /// Unit vector `e_i` with `i` zero-based (`i = 0` is `x_1`).
    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i < n, "coordinate {i} out of range for dimension {n}");
        Self { n, bits: 1 << i }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Coordinate `i`, zero-based.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Inner product `self · other` over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        check_dim(self.n, other.n)?;
        Ok(parity(self.bits & other.bits))
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        check_dim(self.n, other.n)?;
        Ok(Self { n: self.n, bits: self.bits ^ other.bits })
    }
}

#[inline]
pub(crate) fn parity(w: u64) -> bool {
    w.count_ones() & 1 == 1
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_VECTOR_DIM {
            return Err(Error::DimensionTooLarge { n: s.len(), cap: MAX_VECTOR_DIM });
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                other => return Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(Self { n: s.len(), bits })
    }
}

/// An ordered list of equal-dimension row vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VECTOR_DIM);
        Self { n, rows: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: &[BitVector]) -> Result<Self> {
        if n > MAX_VECTOR_DIM {
            return Err(Error::DimensionTooLarge { n, cap: MAX_VECTOR_DIM });
        }
        for r in rows {
            check_dim(n, r.dim())?;
        }
        Ok(Self { n, rows: rows.iter().map(BitVector::bits).collect() })
    }

    /// Rows given as packed words; bits above `n` are rejected.
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        if n > MAX_VECTOR_DIM {
            return Err(Error::DimensionTooLarge { n, cap: MAX_VECTOR_DIM });
        }
        if let Some(w) = words.iter().find(|&&w| w & !low_mask(n) != 0) {
            return Err(Error::OutOfRange(format!("row {w:#x} does not fit in {n} coordinates")));
        }
        Ok(Self { n, rows: words })
    }

    pub fn push(&mut self, row: BitVector) -> Result<()> {
        check_dim(self.n, row.dim())?;
        self.rows.push(row.bits());
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector { n: self.n, bits: self.rows[i] }
    }

    pub fn rows(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.rows.iter().map(move |&bits| BitVector { n: self.n, bits })
    }

    pub fn words(&self) -> &[u64] {
        &self.rows
    }

    /// `self · v` as a vector of per-row inner products, packed row 0 first.
    pub fn mul_vec(&self, v: &BitVector) -> Result<Vec<bool>> {
        check_dim(self.n, v.dim())?;
        Ok(self.rows.iter().map(|&r| parity(r & v.bits)).collect())
    }

    /// Parses one vector per non-empty line.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<BitVector> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(BitVector::from_str)
            .collect::<Result<_>>()?;
        let n = rows.first().map(BitVector::dim).ok_or_else(|| Error::Parse("no rows".into()))?;
        Self::from_rows(n, &rows)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rows() {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows().map(|r| r.to_string())).finish()
    }
}

/// Reduces `rows` in place to reduced row echelon form and returns the rank.
///
/// Pivots are the lowest set bit of each row; the output rows are sorted by
/// ascending pivot and each pivot bit is cleared from every other row.
fn rref(rows: &mut Vec<u64>) -> usize {
    let mut basis: Vec<u64> = Vec::with_capacity(rows.len().min(64));
    for &r in rows.iter() {
        let mut v = r;
        for &b in &basis {
            let pivot = b & b.wrapping_neg();
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let pivot = v & v.wrapping_neg();
        for b in basis.iter_mut() {
            if *b & pivot != 0 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_unstable_by_key(|b| b.trailing_zeros());
    let rank = basis.len();
    *rows = basis;
    rank
}

/// A subspace of F_2^n held as its canonical reduced echelon basis.
///
/// Equal spans have bit-identical bases, so `==` is span equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<u64>,
}

impl Subspace {
    pub fn trivial(n: usize) -> Self {
        assert!(n <= MAX_VECTOR_DIM);
        Self { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VECTOR_DIM);
        Self { n, basis: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn span(m: &BitMatrix) -> Self {
        let mut rows = m.rows.clone();
        rref(&mut rows);
        Self { n: m.n, basis: rows }
    }

    pub fn from_vectors(n: usize, vs: &[BitVector]) -> Result<Self> {
        Ok(Self::span(&BitMatrix::from_rows(n, vs)?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Rank of the basis.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> BitMatrix {
        BitMatrix { n: self.n, rows: self.basis.clone() }
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.basis.iter().map(move |&bits| BitVector { n: self.n, bits })
    }

    /// Mask of pivot coordinates.
    pub fn pivot_mask(&self) -> u64 {
        self.basis.iter().fold(0, |acc, b| acc | (b & b.wrapping_neg()))
    }

    /// Canonical coset representative of `w + self`: the unique element of the
    /// coset whose pivot coordinates are all zero.
    #[inline]
    pub fn reduce_word(&self, w: u64) -> u64 {
        let mut v = w;
        for &b in &self.basis {
            if v & b & b.wrapping_neg() != 0 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        check_dim(self.n, v.dim())?;
        Ok(self.reduce_word(v.bits()) == 0)
    }

    /// The subspace `{ s : b · s = 0 for every basis row b }`.
    pub fn orthogonal_complement(&self) -> Subspace {
        null_space_words(self.n, &self.basis)
    }

    /// Enumerates every element; only sensible for small dimension.
    pub fn elements(&self) -> Vec<BitVector> {
        let k = self.basis.len();
        assert!(k <= 30, "refusing to enumerate a subspace of dimension {k}");
        let mut out = Vec::with_capacity(1 << k);
        let mut acc = 0u64;
        out.push(BitVector { n: self.n, bits: 0 });
        // Gray-code walk over coefficient vectors.
        for i in 1u64..(1u64 << k) {
            acc ^= self.basis[i.trailing_zeros() as usize];
            out.push(BitVector { n: self.n, bits: acc });
        }
        out
    }

    /// Element with coefficient vector `coeffs` over the basis.
    pub fn combine(&self, coeffs: u64) -> BitVector {
        let bits = self
            .basis
            .iter()
            .enumerate()
            .filter(|(i, _)| (coeffs >> i) & 1 == 1)
            .fold(0, |acc, (_, &b)| acc ^ b);
        BitVector { n: self.n, bits }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?}", self.basis())
    }
}

fn null_space_words(n: usize, rows: &[u64]) -> Subspace {
    let mut r = rows.to_vec();
    rref(&mut r);
    let pivots = r.iter().fold(0u64, |acc, b| acc | (b & b.wrapping_neg()));
    let mut out = Vec::with_capacity(n - r.len());
    for free in (0..n).filter(|&j| pivots >> j & 1 == 0) {
        let mut v = 1u64 << free;
        for b in &r {
            if b >> free & 1 == 1 {
                v |= b & b.wrapping_neg();
            }
        }
        out.push(v);
    }
    rref(&mut out);
    Subspace { n, basis: out }
}

/// Incremental row reduction: feed vectors one at a time and learn whether
/// each one enlarged the span.
#[derive(Clone, Debug)]
pub struct RowReducer {
    n: usize,
    basis: Vec<u64>,
}

impl RowReducer {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_VECTOR_DIM);
        Self { n, basis: Vec::new() }
    }

    /// Adds `v` and returns whether it was independent of the rows so far.
    pub fn insert(&mut self, v: &BitVector) -> Result<bool> {
        check_dim(self.n, v.dim())?;
        let mut w = v.bits();
        for &b in &self.basis {
            if w & b & b.wrapping_neg() != 0 {
                w ^= b;
            }
        }
        if w == 0 {
            return Ok(false);
        }
        let pivot = w & w.wrapping_neg();
        for b in self.basis.iter_mut() {
            if *b & pivot != 0 {
                *b ^= w;
            }
        }
        self.basis.push(w);
        Ok(true)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn into_subspace(mut self) -> Subspace {
        rref(&mut self.basis);
        Subspace { n: self.n, basis: self.basis }
    }
}

/// Dimension of the row span of `m`.
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows = m.rows.clone();
    rref(&mut rows)
}

/// Canonical basis of `{ s : row · s = 0 for every row of m }`.
pub fn null_space_basis(m: &BitMatrix) -> Subspace {
    null_space_words(m.n, &m.rows)
}

pub fn span_equal(a: &Subspace, b: &Subspace) -> Result<bool> {
    check_dim(a.n, b.n)?;
    Ok(a.basis == b.basis)
}

pub fn in_span(v: &BitVector, s: &Subspace) -> Result<bool> {
    s.contains(v)
}
