//! Exact arithmetic for the concrete towers: prime-field helpers and sparse
//! multivariate Laurent polynomials.
//!
//! A [`LaurentElement`] represents an element of F_p((t_1))...((t_r)) that
//! happens to be a Laurent *polynomial*: a finite map from exponent vectors
//! in Z^r to non-zero coefficients mod p. This is all the oracle layer ever
//! needs, since witnesses and square-class representatives are polynomial.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;

// ---------------------------------------------------------------------------
// F_p helpers
// ---------------------------------------------------------------------------

pub(crate) fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, a != 0 mod p
    mod_pow(a, p - 2, p)
}

/// True iff `a` (non-zero mod p) is a quadratic residue mod the odd prime `p`.
pub(crate) fn is_quadratic_residue(a: u64, p: u64) -> bool {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, (p - 1) / 2, p) == 1
}

/// The smallest positive non-residue mod `p`; used as the canonical
/// representative `s` of the non-square unit class.
pub(crate) fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| !is_quadratic_residue(a, p))
        .expect("every odd prime has a non-residue")
}

// ---------------------------------------------------------------------------
// Valuations
// ---------------------------------------------------------------------------

/// A discrete valuation value: an integer, or infinite (the valuation of 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    Finite(i64),
    Infinite,
}

impl Val {
    pub fn is_infinite(self) -> bool {
        matches!(self, Val::Infinite)
    }

    /// `self > 2 * other`, the Newton slack condition. Infinite on the left
    /// always wins; an infinite right-hand side can never be exceeded.
    pub fn exceeds_twice(self, other: Val) -> bool {
        match (self, other) {
            (_, Val::Infinite) => false,
            (Val::Infinite, _) => true,
            (Val::Finite(a), Val::Finite(b)) => a > 2 * b,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Val::Infinite, Val::Infinite) => std::cmp::Ordering::Equal,
            (Val::Infinite, _) => std::cmp::Ordering::Greater,
            (_, Val::Infinite) => std::cmp::Ordering::Less,
            (Val::Finite(a), Val::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// Sparse Laurent polynomials
// ---------------------------------------------------------------------------

/// A multivariate Laurent polynomial over F_p in canonical sparse form.
///
/// Keys are exponent vectors of length `vars` (variable `t_i` is the
/// coordinate `i - 1`); values are coefficients in `1..p`. Zero coefficients
/// are never stored, so the zero element is the empty map and structural
/// equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentElement {
    vars: usize,
    terms: BTreeMap<Vec<i64>, u64>,
}

impl LaurentElement {
    pub fn zero(vars: usize) -> Self {
        LaurentElement {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: u64, p: u64) -> Self {
        Self::monomial(vars, vec![0; vars], c, p)
    }

    pub fn monomial(vars: usize, exps: Vec<i64>, c: u64, p: u64) -> Self {
        assert_eq!(exps.len(), vars, "exponent vector length must equal vars");
        let c = c % p;
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(exps, c);
        }
        LaurentElement { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn add(&self, other: &Self, p: u64) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut terms = self.terms.clone();
        for (e, &c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert(0);
            *entry = add_mod(*entry, c, p);
            if *entry == 0 {
                terms.remove(e);
            }
        }
        LaurentElement {
            vars: self.vars,
            terms,
        }
    }

    pub fn neg(&self, p: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (e.clone(), p - c))
            .collect();
        LaurentElement {
            vars: self.vars,
            terms,
        }
    }

    pub fn sub(&self, other: &Self, p: u64) -> Self {
        self.add(&other.neg(p), p)
    }

    pub fn mul(&self, other: &Self, p: u64) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut terms: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e).or_insert(0);
                *entry = add_mod(*entry, mul_mod(ca, cb, p), p);
            }
        }
        terms.retain(|_, c| *c != 0);
        LaurentElement {
            vars: self.vars,
            terms,
        }
    }

    pub fn square(&self, p: u64) -> Self {
        self.mul(self, p)
    }

    /// The `t_var`-adic valuation (`var` is 1-based): the minimal exponent of
    /// that variable occurring in a term, or infinite for the zero element.
    pub fn valuation(&self, var: u32) -> Val {
        assert!(var >= 1 && var as usize <= self.vars);
        self.terms
            .keys()
            .map(|e| e[var as usize - 1])
            .min()
            .map_or(Val::Infinite, Val::Finite)
    }

    /// Leading coefficient of `self` with respect to `t_var` for the
    /// outermost variable `var = vars`: the sub-element (in one fewer
    /// variable) multiplying the minimal power of `t_var`.
    ///
    /// Panics on the zero element.
    pub fn leading_coefficient(&self) -> Self {
        assert!(self.vars >= 1 && !self.is_zero());
        let var = self.vars - 1;
        let v = self.terms.keys().map(|e| e[var]).min().unwrap();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] == v)
            .map(|(e, &c)| (e[..var].to_vec(), c))
            .collect();
        LaurentElement {
            vars: var,
            terms,
        }
    }

    /// Re-interprets an element of the depth-`vars` tower inside the tower
    /// with one more Laurent layer (t_{vars+1}-exponent 0 on every term).
    pub fn promote(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e = e.clone();
                e.push(0);
                (e, c)
            })
            .collect();
        LaurentElement {
            vars: self.vars + 1,
            terms,
        }
    }

    /// Multiplies by `t_vars^k` (shift of the outermost exponent).
    pub fn shift_outer(&self, k: i64) -> Self {
        assert!(self.vars >= 1);
        let var = self.vars - 1;
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e = e.clone();
                e[var] += k;
                (e, c)
            })
            .collect();
        LaurentElement {
            vars: self.vars,
            terms,
        }
    }

    /// The value of a zero-variable element as a constant in `0..p`.
    pub fn constant_value(&self) -> Result<u64, Error> {
        if self.vars != 0 {
            return Err(Error::Unsupported(
                "constant_value needs a zero-variable element".into(),
            ));
        }
        Ok(self.terms.get(&Vec::new()).copied().unwrap_or(0))
    }
}

impl fmt::Display for LaurentElement {
    /// Sparse-polynomial syntax, e.g. `3*t1^-2 + 1*t1^3` (single-variable
    /// elements print `t1` as `t`). The zero element prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if self.vars == 1 {
                    write!(f, "*t")?;
                } else {
                    write!(f, "*t{}", i + 1)?;
                }
                if k != 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}
