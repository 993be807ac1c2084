//! Boolean function representations: packed truth tables, multi-output
//! tables, algebraic normal form, the directional derivative, and generators
//! for instances with a known structure.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;

use crate::error::{check_dim, Error, Result};
use crate::gf2::{BitVector, Subspace, DEFAULT_N_CAP};
use crate::oracle;
use crate::seed;

/// Masks selecting table positions whose index has bit `i` clear, `i < 6`.
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

fn check_table_vars(n: usize) -> Result<()> {
    if n > DEFAULT_N_CAP {
        Err(Error::DimensionTooLarge { n, cap: DEFAULT_N_CAP })
    } else {
        Ok(())
    }
}

/// Truth table of `f: F_2^n -> F_2`, bit `m` holding `f(m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(n: usize) -> Result<Self> {
        check_table_vars(n)?;
        let words = if n >= 6 { 1 << (n - 6) } else { 1 };
        Ok(Self { n, words: vec![0; words] })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        if value {
            let tail = t.tail_mask();
            t.words.iter_mut().for_each(|w| *w = u64::MAX);
            t.words[0] &= tail;
        }
        Ok(t)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for x in 0..t.len() {
            if f(x) {
                t.words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(t)
    }

    fn tail_mask(&self) -> u64 {
        if self.n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << self.n)) - 1
        }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> u64 {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, x: u64) -> bool {
        (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u64, value: bool) {
        let w = &mut self.words[(x >> 6) as usize];
        if value {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
    }

    #[inline]
    pub fn flip(&mut self, x: u64) {
        self.words[(x >> 6) as usize] ^= 1 << (x & 63);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the set entries, ascending.
    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(((i as u64) << 6) | b)
            })
        })
    }

    /// The table of `x -> f(x ⊕ s)`.
    pub fn shifted(&self, s: u64) -> TruthTable {
        debug_assert!(s < self.len());
        let low = s & 63;
        let high = (s >> 6) as usize;
        let mut out = Vec::with_capacity(self.words.len());
        for j in 0..self.words.len() {
            let mut w = self.words[j ^ high];
            for (i, &m) in LOW_MASKS.iter().enumerate() {
                if low >> i & 1 == 1 {
                    let sh = 1 << i;
                    w = ((w & m) << sh) | ((w >> sh) & m);
                }
            }
            out.push(w);
        }
        TruthTable { n: self.n, words: out }
    }

    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        check_dim(self.n, other.n)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(TruthTable { n: self.n, words })
    }

    pub fn and(&self, other: &TruthTable) -> Result<TruthTable> {
        check_dim(self.n, other.n)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(TruthTable { n: self.n, words })
    }

    pub fn complement(&self) -> TruthTable {
        let mut t = self.clone();
        let tail = t.tail_mask();
        t.words.iter_mut().for_each(|w| *w = !*w);
        t.words[0] &= tail;
        t
    }

    /// `±1` image `(-1)^{f(x)}` as a dense vector.
    pub(crate) fn signs(&self) -> Vec<i64> {
        (0..self.len()).map(|x| if self.get(x) { -1 } else { 1 }).collect()
    }

    /// In-place binary Möbius transform; it is its own inverse.
    fn mobius_in_place(&mut self) {
        let low_vars = self.n.min(6);
        for w in self.words.iter_mut() {
            for (i, &m) in LOW_MASKS.iter().enumerate().take(low_vars) {
                *w ^= (*w & m) << (1 << i);
            }
        }
        for i in 6..self.n {
            let stride = 1usize << (i - 6);
            for j in 0..self.words.len() {
                if j & stride != 0 {
                    self.words[j] ^= self.words[j ^ stride];
                }
            }
        }
    }

    /// Serializes as `n=<k>` followed by the 2^k table characters.
    pub fn to_file_string(&self) -> String {
        format!("n={}\n{}\n", self.n, self)
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty truth-table file".into()))?;
        let n = parse_header_value(header, "n")?;
        let body = lines.next().ok_or_else(|| Error::Parse("missing table line".into()))?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing data after table line".into()));
        }
        let t: TruthTable = body.parse()?;
        check_dim(n, t.vars())?;
        Ok(t)
    }
}

fn parse_header_value(header: &str, key: &str) -> Result<usize> {
    let rest = header
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::Parse(format!("expected header `{key}=<k>`, got {header:?}")))?;
    rest.trim().parse().map_err(|_| Error::Parse(format!("bad value in header {header:?}")))
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len()).map(|x| if self.get(x) { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 6 {
            write!(f, "TruthTable(n={}, {})", self.n, self)
        } else {
            write!(f, "TruthTable(n={}, weight={})", self.n, self.count_ones())
        }
    }
}

/// Parses the 2^n characters of a table in index order.
impl FromStr for TruthTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let len = s.len();
        if !len.is_power_of_two() {
            return Err(Error::Parse(format!("table length {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        let bytes = s.as_bytes();
        let mut t = TruthTable::zeros(n)?;
        for (x, &c) in bytes.iter().enumerate() {
            match c {
                b'0' => {}
                b'1' => t.set(x as u64, true),
                other => return Err(Error::Parse(format!("unexpected byte {:?} in table", other as char))),
            }
        }
        Ok(t)
    }
}

/// Table of `F: F_2^n -> F_2^{m_out}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiTruthTable {
    n: usize,
    m_out: usize,
    values: Vec<u64>,
}

impl MultiTruthTable {
    pub fn new(n: usize, m_out: usize, values: Vec<u64>) -> Result<Self> {
        check_table_vars(n)?;
        if m_out > 64 {
            return Err(Error::DimensionTooLarge { n: m_out, cap: 64 });
        }
        check_dim(1 << n, values.len())?;
        if m_out < 64 {
            if let Some(v) = values.iter().find(|&&v| v >> m_out != 0) {
                return Err(Error::OutOfRange(format!("entry {v} has more than {m_out} bits")));
            }
        }
        Ok(Self { n, m_out, values })
    }

    pub fn from_fn(n: usize, m_out: usize, f: impl FnMut(u64) -> u64) -> Result<Self> {
        check_table_vars(n)?;
        Self::new(n, m_out, (0..1u64 << n).map(f).collect())
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn outputs(&self) -> usize {
        self.m_out
    }

    #[inline]
    pub fn get(&self, x: u64) -> u64 {
        self.values[x as usize]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Header `n=<k> m=<m_out>`, then one output word per line in index order,
    /// output bit 1 first.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("n={} m={}\n", self.n, self.m_out);
        for &v in &self.values {
            s.push_str(&BitVector::from_bits_truncate(self.m_out, v).to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty multi-output file".into()))?;
        let mut fields = header.split_whitespace();
        let n = parse_header_value(fields.next().unwrap_or(""), "n")?;
        let m_out = parse_header_value(fields.next().unwrap_or(""), "m")?;
        check_table_vars(n)?;
        let values = lines
            .map(|l| {
                let v: BitVector = l.parse()?;
                check_dim(m_out, v.dim())?;
                Ok(v.bits())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, m_out, values)
    }
}

/// Algebraic normal form: the set of monomials with coefficient 1.
///
/// A monomial is a bitmask over variables, bit `i - 1` standing for `x_i`;
/// the empty mask is the constant term.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Anf {
    n: usize,
    monomials: BTreeSet<u32>,
}

impl Anf {
    pub fn new(n: usize, monomials: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_table_vars(n)?;
        let mut set = BTreeSet::new();
        for m in monomials {
            if n < 32 && m >> n != 0 {
                return Err(Error::OutOfRange(format!("monomial {m:#b} uses a variable beyond x{n}")));
            }
            // x + x = 0 over GF(2)
            if !set.insert(m) {
                set.remove(&m);
            }
        }
        Ok(Self { n, monomials: set })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, monomials: BTreeSet::new() }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &BTreeSet<u32> {
        &self.monomials
    }

    pub fn contains(&self, monomial: u32) -> bool {
        self.monomials.contains(&monomial)
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Degree of the highest monomial, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.monomials.iter().map(|m| m.count_ones()).max()
    }

    pub(crate) fn toggle(&mut self, monomial: u32) {
        if !self.monomials.insert(monomial) {
            self.monomials.remove(&monomial);
        }
    }

    /// Sum of two polynomials over the same variables.
    pub fn add(&self, other: &Anf) -> Result<Anf> {
        check_dim(self.n, other.n)?;
        let monomials = self.monomials.symmetric_difference(&other.monomials).copied().collect();
        Ok(Anf { n: self.n, monomials })
    }

    /// Product, reduced with `x_i^2 = x_i`.
    pub fn mul(&self, other: &Anf) -> Result<Anf> {
        check_dim(self.n, other.n)?;
        let mut out = Anf::zero(self.n);
        for &a in &self.monomials {
            for &b in &other.monomials {
                out.toggle(a | b);
            }
        }
        Ok(out)
    }

    /// Formats with a custom variable letter, e.g. `s1*s2 + 1`.
    pub fn to_string_with(&self, var: &str) -> String {
        if self.monomials.is_empty() {
            return "0".into();
        }
        let mut ms: Vec<u32> = self.monomials.iter().copied().collect();
        ms.sort_by(display_order);
        ms.iter().map(|&m| monomial_to_string(m, var)).collect::<Vec<_>>().join(" + ")
    }

    pub fn eval(&self, x: u64) -> bool {
        self.monomials.iter().filter(|&&m| x & m as u64 == m as u64).count() % 2 == 1
    }

    /// Parses text like `x1*x2 + x3 + 1`. An empty string or `0` is the zero
    /// polynomial. `n` is the largest variable index unless given explicitly.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Self> {
        let text = text.trim();
        let mut monos = Vec::new();
        let mut max_var = 0usize;
        if !(text.is_empty() || text == "0") {
            for term in text.split('+') {
                let term = term.trim();
                if term == "1" {
                    monos.push(0u32);
                    continue;
                }
                let mut mask = 0u32;
                for factor in term.split('*') {
                    let factor = factor.trim();
                    let idx: usize = factor
                        .strip_prefix('x')
                        .and_then(|d| d.parse().ok())
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| Error::Parse(format!("bad factor {factor:?} in term {term:?}")))?;
                    if idx > DEFAULT_N_CAP {
                        return Err(Error::DimensionTooLarge { n: idx, cap: DEFAULT_N_CAP });
                    }
                    max_var = max_var.max(idx);
                    mask |= 1 << (idx - 1);
                }
                monos.push(mask);
            }
        }
        let n = n.unwrap_or(max_var);
        if max_var > n {
            return Err(Error::OutOfRange(format!("variable x{max_var} exceeds n={n}")));
        }
        Anf::new(n, monos)
    }
}

/// Formats a monomial mask as `x1*x3`, or `1` for the constant.
pub fn monomial_to_string(m: u32, var: &str) -> String {
    if m == 0 {
        return "1".into();
    }
    (0..32)
        .filter(|i| m >> i & 1 == 1)
        .map(|i| format!("{var}{}", i + 1))
        .collect::<Vec<_>>()
        .join("*")
}

/// Display order: higher degree first, then lexicographic by variable list.
pub(crate) fn display_order(a: &u32, b: &u32) -> std::cmp::Ordering {
    let vars = |m: u32| (0..32).filter(move |i| m >> i & 1 == 1);
    b.count_ones().cmp(&a.count_ones()).then_with(|| vars(*a).cmp(vars(*b)))
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with("x"))
    }
}

impl fmt::Debug for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Anf(n={}, {})", self.n, self)
    }
}

pub fn eval(f: &TruthTable, x: &BitVector) -> Result<bool> {
    check_dim(f.vars(), x.dim())?;
    Ok(f.get(x.bits()))
}

/// ANF coefficients of `f` via the binary Möbius transform.
pub fn anf_of(f: &TruthTable) -> Anf {
    let mut t = f.clone();
    t.mobius_in_place();
    Anf { n: f.vars(), monomials: t.ones().map(|m| m as u32).collect() }
}

pub fn tt_of(a: &Anf) -> TruthTable {
    let mut t = TruthTable::zeros(a.vars()).expect("Anf dimension already validated");
    for &m in &a.monomials {
        t.set(m as u64, true);
    }
    t.mobius_in_place();
    t
}

/// `g(x) = f(x ⊕ s) ⊕ f(x)`.
pub fn derivative(f: &TruthTable, s: &BitVector) -> Result<TruthTable> {
    check_dim(f.vars(), s.dim())?;
    f.shifted(s.bits()).xor(f)
}

/// Instance request: a function whose zero-class linear structures are
/// exactly `structure_basis`.
#[derive(Clone, Debug)]
pub struct PlantSpec {
    pub n: usize,
    pub structure_basis: Subspace,
    pub seed: u64,
}

pub const PLANT_RETRY_CAP: usize = 64;

/// Positions of the zero bits of `pivot_mask` among the low `n` coordinates.
fn free_positions(n: usize, pivot_mask: u64) -> Vec<usize> {
    (0..n).filter(|&i| pivot_mask >> i & 1 == 0).collect()
}

fn expand(index: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| index >> j & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | 1 << p)
}

fn compress(word: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .filter(|(_, &p)| word >> p & 1 == 1)
        .fold(0, |acc, (j, _)| acc | 1 << j)
}

/// Random `f` constant on every coset of the requested span, retried until
/// the brute-force structure space matches it exactly.
pub fn plant_structure(spec: &PlantSpec) -> Result<TruthTable> {
    let n = spec.n;
    check_table_vars(n)?;
    check_dim(n, spec.structure_basis.ambient_dim())?;
    let v = &spec.structure_basis;
    let reps = free_positions(n, v.pivot_mask());
    let elems = v.elements();
    let mut rng = seed::rng(spec.seed);
    for _ in 0..PLANT_RETRY_CAP {
        let mut t = TruthTable::zeros(n)?;
        for c in 0..1u64 << reps.len() {
            if rng.gen::<bool>() {
                let r = expand(c, &reps);
                for e in &elems {
                    t.set(r ^ e.bits(), true);
                }
            }
        }
        if oracle::brute_structures(&t)?.u0 == *v {
            return Ok(t);
        }
    }
    Err(Error::RetryCapExceeded(PLANT_RETRY_CAP))
}

/// Flips `f` on `r` distinct uniformly chosen inputs.
pub fn plant_r_type(f: &TruthTable, r: u64, seed: u64) -> Result<TruthTable> {
    if r > f.len() {
        return Err(Error::OutOfRange(format!("r = {r} exceeds table size {}", f.len())));
    }
    let mut rng = seed::rng(seed);
    let mut out = f.clone();
    for x in index::sample(&mut rng, f.len() as usize, r as usize) {
        out.flip(x as u64);
    }
    Ok(out)
}

/// `F: F_2^n -> F_2^{n-1}` whose period set is exactly `span(basis)`.
///
/// Distinct output words are drawn for distinct cosets, so `F` separates
/// cosets by construction.
pub fn plant_periods(n: usize, basis: &Subspace, seed: u64) -> Result<MultiTruthTable> {
    check_dim(n, basis.ambient_dim())?;
    check_table_vars(n)?;
    if basis.dim() == 0 {
        return Err(Error::OutOfRange("period space must contain a nonzero period".into()));
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let m_out = n - 1;
    let reps = free_positions(n, basis.pivot_mask());
    let mut rng = seed::rng(seed);
    let labels: Vec<u64> = index::sample(&mut rng, 1 << m_out, 1 << reps.len())
        .into_iter()
        .map(|v| v as u64)
        .collect();
    MultiTruthTable::from_fn(n, m_out, |x| {
        labels[compress(basis.reduce_word(x), &reps) as usize]
    })
}

/// Uniformly random `k`-dimensional subspace of F_2^n.
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    if k > n {
        return Err(Error::OutOfRange(format!("dimension {k} exceeds ambient {n}")));
    }
    let mut rng = seed::rng(seed);
    let mut vs: Vec<BitVector> = Vec::with_capacity(k);
    while vs.len() < k {
        let v = BitVector::from_bits_truncate(n, rng.gen());
        let candidate = Subspace::from_vectors(n, &vs)?;
        if !candidate.contains(&v)? {
            vs.push(v);
        }
    }
    Subspace::from_vectors(n, &vs)
}
