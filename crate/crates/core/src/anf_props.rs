//! Structure conditions read off the algebraic normal form.
//!
//! Expanding `g(x) = f(x ⊕ s) + f(x)` monomial by monomial gives, for every
//! x-monomial `x^U`, a polynomial in the unknown shift `s`:
//!
//! ```text
//! coeff_U(s) = Σ_{T ∈ f, T ⊋ U} s^{T \ U}
//! ```
//!
//! and `s` is a zero-class structure iff every one of these vanishes. The
//! classifiers below look only at the top-degree conditions and return a
//! necessary condition on any nonzero structure.

use std::collections::BTreeMap;
use std::fmt;

use crate::boolfn::{monomial_to_string, tt_of, Anf, TruthTable};
use crate::error::{check_dim, Error, Result};
use crate::gf2::BitVector;

/// Iterates every subset of `mask`, including `0` and `mask` itself.
fn subsets(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// ANF of `f(x ⊕ s) + f(x)` for a concrete `s`.
pub fn g_anf(f: &Anf, s: &BitVector) -> Result<Anf> {
    check_dim(f.vars(), s.dim())?;
    let s = s.bits() as u32;
    let mut out = Anf::zero(f.vars());
    for &t in f.monomials() {
        // (x ⊕ s)^T = Σ_{U ⊆ T, T\U ⊆ s} x^U
        let fixed = t & !s;
        for w in subsets(t & s) {
            let u = fixed | w;
            if u != t {
                out.toggle(u);
            }
        }
    }
    Ok(out)
}

/// Coefficient of `x^U` in `g`, as a polynomial in `s_1..s_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct SymbolicCondition {
    pub x_monomial: u32,
    pub poly: Anf,
}

impl SymbolicCondition {
    pub fn holds_at(&self, s: u64) -> bool {
        !self.poly.eval(s)
    }
}

impl fmt::Display for SymbolicCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} = 0", monomial_to_string(self.x_monomial, "x"), self.poly.to_string_with("s"))
    }
}

impl fmt::Debug for SymbolicCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Every nonzero coefficient condition of `g`, ordered by x-monomial.
pub fn theorem2_system(f: &Anf) -> Vec<SymbolicCondition> {
    let n = f.vars();
    let mut conds: BTreeMap<u32, Anf> = BTreeMap::new();
    for &t in f.monomials() {
        for u in subsets(t).filter(|&u| u != t) {
            conds.entry(u).or_insert_with(|| Anf::zero(n)).toggle(t & !u);
        }
    }
    conds
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(x_monomial, poly)| SymbolicCondition { x_monomial, poly })
        .collect()
}

/// Indicator over `s ∈ F_2^n` of the common zeros of `conds`.
pub fn system_solutions(conds: &[SymbolicCondition], n: usize) -> Result<TruthTable> {
    let mut sol = TruthTable::constant(n, true)?;
    for c in conds {
        check_dim(n, c.poly.vars())?;
        sol = sol.and(&tt_of(&c.poly).complement())?;
    }
    Ok(sol)
}

/// Which top-degree pattern fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyCase {
    /// The full-degree monomial is present.
    One,
    /// Some degree-`n-1` monomial is present.
    Two,
    /// Degree `n-1` absent, every degree-`n-2` monomial present, `n ≥ 4`.
    Three,
    /// Every degree-`n-2m` monomial present, nothing above, `n ≥ 2m+2`.
    Four { m: usize },
    /// Every degree-`n-2m+1` monomial present, nothing above, `n ≥ 2m+1`.
    Five { m: usize },
    None,
}

/// What any nonzero zero-class structure must equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forced {
    /// No nonzero structure exists.
    Zero,
    Vector(BitVector),
    AllOnes,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifierVerdict {
    pub case: PropertyCase,
    pub forced: Forced,
}

impl ClassifierVerdict {
    /// Whether `s` is compatible with the verdict. Zero always is; the verdict
    /// is a necessary condition, so `true` does not imply `s` is a structure.
    pub fn admits(&self, s: &BitVector) -> bool {
        if s.is_zero() {
            return true;
        }
        match self.forced {
            Forced::Zero => false,
            Forced::Vector(v) => *s == v,
            Forced::AllOnes => *s == BitVector::ones(s.dim()),
            Forced::Undetermined => true,
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Reads the forced conclusion off the highest-degree coefficients.
pub fn classify_top(f: &Anf) -> ClassifierVerdict {
    let n = f.vars();
    let verdict = |case, forced| ClassifierVerdict { case, forced };
    if n == 0 {
        return verdict(PropertyCase::None, Forced::Undetermined);
    }
    let full: u32 = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
    if f.contains(full) {
        return verdict(PropertyCase::One, Forced::Zero);
    }
    // a'_i is the coefficient of the degree-(n-1) monomial missing x_i
    let a_prime = (0..n).fold(0u64, |acc, i| if f.contains(full & !(1 << i)) { acc | 1 << i } else { acc });
    if a_prime != 0 {
        let v = BitVector::from_bits_truncate(n, a_prime);
        return verdict(PropertyCase::Two, Forced::Vector(v));
    }
    let Some(d) = f.degree().map(|d| d as usize) else {
        return verdict(PropertyCase::None, Forced::Undetermined);
    };
    let top_count = f.monomials().iter().filter(|m| m.count_ones() as usize == d).count();
    if d < 2 || top_count != binomial(n, d) {
        return verdict(PropertyCase::None, Forced::Undetermined);
    }
    let gap = n - d;
    if gap % 2 == 0 {
        let m = gap / 2;
        let case = if m == 1 { PropertyCase::Three } else { PropertyCase::Four { m } };
        verdict(case, Forced::Zero)
    } else {
        verdict(PropertyCase::Five { m: (gap + 1) / 2 }, Forced::AllOnes)
    }
}

/// Checks "vanishes on every binary point ⟺ has no monomials" for one
/// multilinear polynomial in `k` variables.
pub fn lemma1_check(p: &Anf, k: usize) -> Result<bool> {
    if k > 20 {
        return Err(Error::DimensionTooLarge { n: k, cap: 20 });
    }
    if p.vars() > k {
        return Err(Error::DimensionMismatch { expected: k, found: p.vars() });
    }
    let vanishes = (0..1u64 << k).all(|x| !p.eval(x));
    Ok(vanishes == p.is_zero())
}
