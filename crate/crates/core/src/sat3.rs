//! 3-CNF formulas as systems of cubic product equations over the shift
//! variables, plus symbolic checks of the coefficient patterns that produce
//! such equations in the structure conditions of a Boolean function.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::anf_props::theorem2_system;
use crate::boolfn::Anf;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::seed;

pub const SOLVE_N_CAP: usize = 24;
pub const EQUISAT_N_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    fn from_dimacs(v: i64) -> Self {
        Self { var: v.unsigned_abs() as usize, negated: v < 0 }
    }

    pub fn holds(&self, assignment: u64) -> bool {
        (assignment >> (self.var - 1) & 1 == 1) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf3 {
    n: usize,
    clauses: Vec<[Literal; 3]>,
}

impl Cnf3 {
    pub fn new(n: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        if n > 64 {
            return Err(Error::DimensionTooLarge { n, cap: 64 });
        }
        for lit in clauses.iter().flatten() {
            if lit.var == 0 || lit.var > n {
                return Err(Error::OutOfRange(format!("literal {lit} outside 1..={n}")));
            }
        }
        Ok(Self { n, clauses })
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    /// Reads `p cnf n m` followed by `m` zero-terminated clauses of exactly
    /// three literals. Lines starting with `c` or `%` are skipped.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut pending: Vec<Literal> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(Error::Parse("duplicate problem line".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let [kind, n, m] = fields[..] else {
                    return Err(Error::Parse(format!("bad problem line: {line}")));
                };
                if kind != "cnf" {
                    return Err(Error::Parse(format!("expected cnf, got {kind}")));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s}: {e}")));
                header = Some((num(n)?, num(m)?));
                continue;
            }
            if header.is_none() {
                return Err(Error::Parse("clause before problem line".into()));
            }
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|e| Error::Parse(format!("{tok}: {e}")))?;
                if v != 0 {
                    pending.push(Literal::from_dimacs(v));
                    continue;
                }
                let clause: [Literal; 3] = pending
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::Parse(format!("clause {} has {} literals, need 3", clauses.len() + 1, pending.len())))?;
                clauses.push(clause);
                pending.clear();
            }
        }
        let (n, m) = header.ok_or_else(|| Error::Parse("missing problem line".into()))?;
        if !pending.is_empty() {
            return Err(Error::Parse("last clause not terminated by 0".into()));
        }
        if clauses.len() != m {
            return Err(Error::Parse(format!("header declares {m} clauses, found {}", clauses.len())));
        }
        Self::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for [a, b, c] in &self.clauses {
            out.push_str(&format!("{a} {b} {c} 0\n"));
        }
        out
    }

    /// Uniform clauses over `1..=n`; repeated variables within a clause allowed.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        let mut rng = seed::rng(seed);
        let mut lit = || Literal { var: rng.gen_range(1..=n), negated: rng.gen() };
        let clauses = (0..m).map(|_| [lit(), lit(), lit()]).collect();
        Self::new(n, clauses)
    }
}

impl FromStr for Cnf3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_dimacs(s)
    }
}

/// One factor `(s_index + r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    /// 1-based.
    pub index: usize,
    pub r: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEquationSystem {
    pub n: usize,
    /// Each triple means `(s_{i1}+r_1)(s_{i2}+r_2)(s_{i3}+r_3) = 0`.
    pub equations: Vec<[Factor; 3]>,
}

impl ProductEquationSystem {
    /// Whether every product vanishes at `s` (bit `i-1` is `s_i`).
    pub fn satisfied_by(&self, s: u64) -> bool {
        self.equations.iter().all(|eq| eq.iter().any(|f| (s >> (f.index - 1) & 1 == 1) == f.r))
    }
}

impl fmt::Display for ProductEquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            for fac in eq {
                write!(f, "(s{}+{})", fac.index, u8::from(fac.r))?;
            }
            writeln!(f, "=0")?;
        }
        Ok(())
    }
}

/// Positive literal `x_i` becomes `(s_i + 1)`, negated becomes `(s_i + 0)`,
/// so each product is 1 exactly on its clause's falsifying assignment.
pub fn reduce(c: &Cnf3) -> ProductEquationSystem {
    let equations = c
        .clauses
        .iter()
        .map(|clause| clause.map(|l| Factor { index: l.var, r: !l.negated }))
        .collect();
    ProductEquationSystem { n: c.n, equations }
}

/// First `s` in ascending integer order making every product zero.
pub fn solve_brute(sys: &ProductEquationSystem) -> Result<Option<BitVector>> {
    let n = sys.n;
    if n > SOLVE_N_CAP {
        return Err(Error::DimensionTooLarge { n, cap: SOLVE_N_CAP });
    }
    // A product is 1 iff s agrees with `value` on `mask`; a clash between
    // two factors on the same index means it can never be 1.
    let mut patterns = Vec::with_capacity(sys.equations.len());
    for eq in &sys.equations {
        let mut mask = 0u64;
        let mut value = 0u64;
        let mut clash = false;
        for f in eq {
            if f.index == 0 || f.index > n {
                return Err(Error::OutOfRange(format!("factor index {} outside 1..={n}", f.index)));
            }
            let bit = 1u64 << (f.index - 1);
            let want = if f.r { 0 } else { bit };
            if mask & bit != 0 && value & bit != want {
                clash = true;
            }
            mask |= bit;
            value |= want;
        }
        if !clash {
            patterns.push((mask, value));
        }
    }
    let found = (0..1u64 << n).find(|&s| patterns.iter().all(|&(m, v)| s & m != v));
    Ok(found.map(|s| BitVector::from_bits_truncate(n, s)))
}

/// First satisfying assignment of the formula, by direct clause evaluation.
pub fn sat_brute(c: &Cnf3) -> Result<Option<u64>> {
    if c.n > SOLVE_N_CAP {
        return Err(Error::DimensionTooLarge { n: c.n, cap: SOLVE_N_CAP });
    }
    Ok((0..1u64 << c.n).find(|&a| c.satisfied_by(a)))
}

/// Formula satisfiable ⟺ reduced system solvable.
pub fn equisat_check(c: &Cnf3) -> Result<bool> {
    if c.n > EQUISAT_N_CAP {
        return Err(Error::DimensionTooLarge { n: c.n, cap: EQUISAT_N_CAP });
    }
    let sat = sat_brute(c)?.is_some();
    let solvable = solve_brute(&reduce(c))?.is_some();
    Ok(sat == solvable)
}

/// Which coefficient pattern to plant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternCase {
    /// `s_a (s_b+1)(s_c+1)(s_d+1)`, needs `k ≥ 4`.
    One,
    /// `s_b (s_c+1)(s_d+1)`
    TwoA,
    /// `s_b s_c (s_d+1)`
    TwoB,
    /// `s_b s_c s_d`
    TwoC,
}

impl PatternCase {
    pub const ALL: [PatternCase; 4] = [Self::One, Self::TwoA, Self::TwoB, Self::TwoC];

    pub fn min_k(self) -> usize {
        match self {
            Self::One => 4,
            _ => 3,
        }
    }

    /// Number of trailing indices that are not part of the shared prefix.
    fn tail(self) -> usize {
        match self {
            Self::One => 4,
            _ => 3,
        }
    }
}

impl FromStr for PatternCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Self::One),
            "2a" => Ok(Self::TwoA),
            "2b" => Ok(Self::TwoB),
            "2c" => Ok(Self::TwoC),
            _ => Err(Error::Parse(format!("unknown pattern case {s:?}; expected 1, 2a, 2b or 2c"))),
        }
    }
}

impl fmt::Display for PatternCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "1",
            Self::TwoA => "2a",
            Self::TwoB => "2b",
            Self::TwoC => "2c",
        })
    }
}

/// Planted pattern, the x-monomial it targets, and the product it should yield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternInstance {
    pub f: Anf,
    pub prefix: u32,
    pub expected: Anf,
}

/// Builds the coefficient pattern over the 1-based `indices` (length `k`).
/// `noise` monomials must not contain the shared prefix.
pub fn pattern_instance(case: PatternCase, indices: &[usize], n: usize, noise: &[u32]) -> Result<PatternInstance> {
    let k = indices.len();
    if k < case.min_k() {
        return Err(Error::OutOfRange(format!("case {case} needs k >= {}, got {k}", case.min_k())));
    }
    if n > 31 {
        return Err(Error::DimensionTooLarge { n, cap: 31 });
    }
    let mut seen = 0u32;
    for &i in indices {
        if i == 0 || i > n || seen >> (i - 1) & 1 == 1 {
            return Err(Error::OutOfRange(format!("indices must be distinct and within 1..={n}")));
        }
        seen |= 1 << (i - 1);
    }
    let split = k - case.tail();
    let prefix = indices[..split].iter().fold(0u32, |m, &i| m | 1 << (i - 1));
    if let Some(bad) = noise.iter().find(|&&m| m & prefix == prefix) {
        return Err(Error::OutOfRange(format!("noise monomial {bad:#b} contains the prefix")));
    }
    let bit = |j: usize| 1u32 << (indices[j] - 1);
    let var = |j: usize| Anf::new(n, [bit(j)]);
    let plus_one = |j: usize| Ok::<_, Error>(var(j)?.add(&Anf::new(n, [0])?)?);

    let top = indices[split..].iter().fold(prefix, |m, &i| m | 1 << (i - 1));
    let mut monomials = vec![top];
    let expected;
    match case {
        PatternCase::One => {
            // a_{P a}, a_{P a j}, a_{P a j l} for j < l among the last three
            let a = prefix | bit(split);
            let rest = [bit(split + 1), bit(split + 2), bit(split + 3)];
            monomials.push(a);
            monomials.extend(rest.iter().map(|r| a | r));
            monomials.extend([a | rest[0] | rest[1], a | rest[0] | rest[2], a | rest[1] | rest[2]]);
            expected = var(split)?.mul(&plus_one(split + 1)?)?.mul(&plus_one(split + 2)?)?.mul(&plus_one(split + 3)?)?;
        }
        PatternCase::TwoA => {
            let b = prefix | bit(split);
            monomials.extend([b | bit(split + 1), b | bit(split + 2), b]);
            expected = var(split)?.mul(&plus_one(split + 1)?)?.mul(&plus_one(split + 2)?)?;
        }
        PatternCase::TwoB => {
            monomials.push(prefix | bit(split) | bit(split + 1));
            expected = var(split)?.mul(&var(split + 1)?)?.mul(&plus_one(split + 2)?)?;
        }
        PatternCase::TwoC => {
            expected = var(split)?.mul(&var(split + 1)?)?.mul(&var(split + 2)?)?;
        }
    }
    monomials.extend_from_slice(noise);
    Ok(PatternInstance { f: Anf::new(n, monomials)?, prefix, expected })
}

/// Plants the pattern, derives the structure condition attached to the
/// prefix monomial, and compares it with the stated product.
pub fn theorem4_verify(case: PatternCase, indices: &[usize], n: usize, noise: &[u32]) -> Result<bool> {
    let inst = pattern_instance(case, indices, n, noise)?;
    let derived = theorem2_system(&inst.f)
        .into_iter()
        .find(|c| c.x_monomial == inst.prefix)
        .map(|c| c.poly)
        .unwrap_or_else(|| Anf::zero(n));
    Ok(derived == inst.expected)
}

/// Random distinct indices in `1..=n` plus a few noise monomials avoiding the prefix.
pub fn theorem4_random_trial(case: PatternCase, k: usize, n: usize, seed: u64) -> Result<bool> {
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds n = {n}")));
    }
    if n > 31 {
        return Err(Error::DimensionTooLarge { n, cap: 31 });
    }
    let mut rng = seed::rng(seed);
    let indices: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).iter().map(|i| i + 1).collect();
    let split = k.saturating_sub(case.tail());
    let prefix = indices[..split].iter().fold(0u32, |m, &i| m | 1 << (i - 1));
    let full = ((1u64 << n) - 1) as u32;
    let noise: Vec<u32> = if prefix == 0 {
        Vec::new()
    } else {
        (0..rng.gen_range(0..8)).map(|_| rng.gen::<u32>() & full).filter(|m| m & prefix != prefix).collect()
    };
    theorem4_verify(case, &indices, n, &noise)
}
