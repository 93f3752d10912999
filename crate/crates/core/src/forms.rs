//! Exact quadratic-form engine over the towers F_p((t_1))...((t_r)).
//!
//! Forms are stored at square-class resolution: the square-class group of
//! the depth-r tower is (Z/2)^{r+1}, generated by the canonical non-residue
//! `s` and the uniformizers t_1..t_r, so every decision below is a finite
//! exact computation. Isotropy descends through the outermost uniformizer
//! one layer at a time: a form splits as q1 ⟂ t_r·q2 with unit entries, and
//! is anisotropic exactly when both residue forms are.

use std::fmt;

use crate::descriptor::AuSet;
use crate::error::Error;
use crate::laurent::{is_odd_prime, is_quadratic_residue, least_nonresidue, LaurentElement};

/// Hard cap on Laurent depth so class bits fit comfortably in a `u32`.
pub const MAX_TOWER_DEPTH: u32 = 20;

/// Default cap on the Laurent depth accepted by the exhaustive enumerations.
pub const DEFAULT_ENUMERATION_CAP: u32 = 2;

// ---------------------------------------------------------------------------
// Towers and square classes
// ---------------------------------------------------------------------------

/// The iterated Laurent-series field F_p((t_1))...((t_r)); `r = 0` is F_p
/// itself. `t_r` is the outermost uniformizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tower {
    p: u64,
    r: u32,
}

impl Tower {
    pub fn new(p: u64, r: u32) -> Result<Self, Error> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidPrime { p });
        }
        if r > MAX_TOWER_DEPTH {
            return Err(Error::TowerTooDeep {
                r,
                max: MAX_TOWER_DEPTH,
            });
        }
        Ok(Tower { p, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of square classes, 2^{r+1}.
    pub fn class_count(&self) -> u32 {
        1 << (self.r + 1)
    }

    /// The residue tower F_p((t_1))...((t_{r-1})). Panics for r = 0.
    pub fn residue(&self) -> Tower {
        assert!(self.r >= 1, "F_p has no residue tower");
        Tower {
            p: self.p,
            r: self.r - 1,
        }
    }

    /// All square classes in a fixed canonical order (bit patterns ascending).
    pub fn classes(&self) -> impl Iterator<Item = SquareClass> {
        (0..self.class_count()).map(SquareClass::from_bits)
    }

    pub fn class_from_bits(&self, bits: u32) -> Result<SquareClass, Error> {
        if bits >= self.class_count() {
            return Err(Error::VariableOutOfRange {
                index: 32 - bits.leading_zeros(),
                r: self.r,
            });
        }
        Ok(SquareClass::from_bits(bits))
    }

    /// Canonical representative `s` of the non-square unit class: the least
    /// positive non-residue mod p.
    pub fn nonresidue(&self) -> u64 {
        least_nonresidue(self.p)
    }

    /// The square class of -1: non-trivial exactly when p ≡ 3 (mod 4).
    pub fn minus_one(&self) -> SquareClass {
        if self.p % 4 == 3 {
            SquareClass::from_bits(1)
        } else {
            SquareClass::TRIVIAL
        }
    }

    /// The class of a non-zero constant.
    pub fn class_of_constant(&self, a: u64) -> Result<SquareClass, Error> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroElement);
        }
        let eps = !is_quadratic_residue(a % self.p, self.p);
        Ok(SquareClass::from_bits(eps as u32))
    }

    /// Canonical Laurent representative of a class: `s^eps * t_1^{e_1} ... t_r^{e_r}`.
    pub fn representative(&self, c: SquareClass) -> LaurentElement {
        let coeff = if c.eps() { self.nonresidue() } else { 1 };
        let exps: Vec<i64> = (1..=self.r).map(|i| c.t_exp(i) as i64).collect();
        LaurentElement::monomial(self.r as usize, exps, coeff, self.p)
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.r)
    }
}

/// An element of the square-class group k^×/k^×² of a tower, as a bit
/// vector: bit 0 is set iff the unit part reduces to a non-residue of F_p,
/// bit i (1 ≤ i ≤ r) records the parity of the t_i-adic valuation.
///
/// The group law is bitwise XOR; every class is self-inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    bits: u32,
}

impl SquareClass {
    pub const TRIVIAL: SquareClass = SquareClass { bits: 0 };

    pub fn from_bits(bits: u32) -> Self {
        SquareClass { bits }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn is_trivial(self) -> bool {
        self.bits == 0
    }

    /// Group multiplication.
    pub fn product(self, other: SquareClass) -> SquareClass {
        SquareClass {
            bits: self.bits ^ other.bits,
        }
    }

    pub fn eps(self) -> bool {
        self.bits & 1 == 1
    }

    /// Parity bit of t_i (1-based).
    pub fn t_exp(self, i: u32) -> bool {
        self.bits >> i & 1 == 1
    }

    /// Token rendering used by the form-literal syntax: `1`, `s`, `t2`, `s*t1*t3`, ...
    pub fn render(self) -> String {
        if self.bits == 0 {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        if self.eps() {
            parts.push("s".to_string());
        }
        for i in 1..=31 {
            if self.t_exp(i) {
                parts.push(format!("t{i}"));
            }
        }
        parts.join("*")
    }
}

// ---------------------------------------------------------------------------
// Diagonal forms
// ---------------------------------------------------------------------------

/// A regular diagonal quadratic form ⟨a_1, ..., a_n⟩ with entries recorded
/// as square classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassForm {
    entries: Vec<SquareClass>,
}

impl ClassForm {
    pub fn new(entries: Vec<SquareClass>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::DimensionTooSmall { needed: 1, got: 0 });
        }
        Ok(ClassForm { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[SquareClass] {
        &self.entries
    }

    /// The form a·q (every entry multiplied by one class).
    pub fn scaled(&self, a: SquareClass) -> ClassForm {
        ClassForm {
            entries: self.entries.iter().map(|e| e.product(a)).collect(),
        }
    }

    /// q ⟂ ⟨c⟩.
    pub fn appended(&self, c: SquareClass) -> ClassForm {
        let mut entries = self.entries.clone();
        entries.push(c);
        ClassForm { entries }
    }
}

impl fmt::Display for ClassForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.entries.iter().map(|c| c.render()).collect();
        write!(f, "[{}]", rendered.join(","))
    }
}

// ---------------------------------------------------------------------------
// Decision procedures
// ---------------------------------------------------------------------------

impl Tower {
    /// The square class of a non-zero element, computed by recursion on the
    /// outermost variable: take the t_r-adic valuation v, recurse on the
    /// leading coefficient for the remaining bits, and record v mod 2.
    pub fn class_of_element(&self, e: &LaurentElement) -> Result<SquareClass, Error> {
        if e.is_zero() {
            return Err(Error::ZeroElement);
        }
        assert_eq!(
            e.vars(),
            self.r as usize,
            "element and tower depth disagree"
        );
        if self.r == 0 {
            return self.class_of_constant(e.constant_value()?);
        }
        let v = match e.valuation(self.r) {
            crate::laurent::Val::Finite(v) => v,
            crate::laurent::Val::Infinite => unreachable!("non-zero element"),
        };
        let inner = self.residue().class_of_element(&e.leading_coefficient())?;
        let outer_bit = ((v.rem_euclid(2)) as u32) << self.r;
        Ok(SquareClass::from_bits(inner.bits() | outer_bit))
    }

    /// Isotropy of a regular diagonal form, by Springer descent.
    pub fn is_isotropic(&self, q: &ClassForm) -> bool {
        self.is_isotropic_with_depth(q).0
    }

    /// Isotropy together with the depth of the residue recursion actually
    /// explored (1 for a base-field decision).
    pub fn is_isotropic_with_depth(&self, q: &ClassForm) -> (bool, u32) {
        let bits: Vec<u32> = q.entries.iter().map(|c| c.bits()).collect();
        isotropic_rec(self.p, self.r, &bits)
    }

    /// First Representation Theorem: q represents a iff q ⟂ ⟨-a⟩ is isotropic.
    pub fn represents(&self, q: &ClassForm, a: SquareClass) -> bool {
        self.is_isotropic(&q.appended(self.minus_one().product(a)))
    }

    /// A form is universal when it represents every square class.
    pub fn is_universal(&self, q: &ClassForm) -> bool {
        self.classes().all(|a| self.represents(q, a))
    }

    pub fn is_anisotropic_universal(&self, q: &ClassForm) -> bool {
        !self.is_isotropic(q) && self.is_universal(q)
    }
}

fn isotropic_rec(p: u64, r: u32, entries: &[u32]) -> (bool, u32) {
    if r == 0 {
        let iso = match entries.len() {
            // An empty Springer part is anisotropic by convention.
            0 | 1 => false,
            // ⟨a,b⟩ is isotropic iff -ab is a square.
            2 => {
                let minus_one_bit = if p % 4 == 3 { 1 } else { 0 };
                entries[0] ^ entries[1] ^ minus_one_bit == 0
            }
            // Every form in ≥ 3 variables over a finite field is isotropic.
            _ => true,
        };
        return (iso, 1);
    }
    let bit = 1u32 << r;
    let unit_part: Vec<u32> = entries.iter().filter(|&&e| e & bit == 0).copied().collect();
    let uniformizer_part: Vec<u32> = entries
        .iter()
        .filter(|&&e| e & bit != 0)
        .map(|&e| e & !bit)
        .collect();
    let (iso1, d1) = isotropic_rec(p, r - 1, &unit_part);
    if iso1 {
        return (true, 1 + d1);
    }
    let (iso2, d2) = isotropic_rec(p, r - 1, &uniformizer_part);
    (iso2, 1 + d1.max(d2))
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Result of enumerating anisotropic universal forms by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuEnumeration {
    pub dims: AuSet,
    /// min(dims); `None` when no anisotropic universal form was found.
    pub m: Option<u64>,
    /// max(dims).
    pub u: Option<u64>,
}

impl Tower {
    /// Enumerates the dimensions of anisotropic universal forms up to
    /// `max_dim` (default 2^{r+1}, the u-invariant of the tower).
    ///
    /// Forms are enumerated as multisets of square classes with the first
    /// entry fixed to the trivial class; by scaling invariance this covers
    /// every form up to the similitudes that preserve both isotropy and
    /// universality.
    pub fn au_enumerate(
        &self,
        max_dim: Option<usize>,
        cap: u32,
    ) -> Result<AuEnumeration, Error> {
        if self.r > cap {
            return Err(Error::EnumerationCapExceeded { r: self.r, cap });
        }
        let max_dim = max_dim.unwrap_or(self.class_count() as usize);
        let mut dims = AuSet::default();
        for d in 1..=max_dim {
            let mut found = false;
            for_each_multiset(self.class_count(), d - 1, &mut |rest| {
                let mut entries = Vec::with_capacity(d);
                entries.push(SquareClass::TRIVIAL);
                entries.extend(rest.iter().map(|&b| SquareClass::from_bits(b)));
                let q = ClassForm { entries };
                if self.is_anisotropic_universal(&q) {
                    found = true;
                }
                found
            });
            if found {
                dims.insert(d as u64);
            }
        }
        Ok(AuEnumeration {
            m: dims.min_dim(),
            u: dims.max_dim(),
            dims,
        })
    }

    /// The Kaplansky radical: classes a with ⟨1, -a⟩ universal. Computed
    /// definitionally, one universality check per class.
    pub fn kaplansky_radical(&self, cap: u32) -> Result<Vec<SquareClass>, Error> {
        if self.r > cap {
            return Err(Error::EnumerationCapExceeded { r: self.r, cap });
        }
        Ok(self
            .classes()
            .filter(|&a| {
                let q = ClassForm {
                    entries: vec![SquareClass::TRIVIAL, self.minus_one().product(a)],
                };
                self.is_universal(&q)
            })
            .collect())
    }
}

/// Calls `f` on every non-decreasing sequence of class bits of length `len`
/// (a multiset over `0..num_classes`), stopping early when `f` returns true.
pub fn for_each_multiset(
    num_classes: u32,
    len: usize,
    f: &mut impl FnMut(&[u32]) -> bool,
) {
    let mut cur = vec![0u32; len];
    loop {
        if f(&cur) {
            return;
        }
        // advance the odometer: bump the rightmost position that can grow,
        // resetting everything after it to the same value
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] + 1 < num_classes {
                let v = cur[i] + 1;
                for slot in cur.iter_mut().skip(i) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Form and element literals
// ---------------------------------------------------------------------------

impl Tower {
    /// Parses the form-literal syntax shared with the CLI: a bracketed list
    /// of entries, each a `*`-product of tokens over {1, s, t1..tr} with
    /// optional integer exponents, or an `elem{...}` sparse-polynomial
    /// literal reduced through `class_of_element`.
    pub fn parse_form(&self, text: &str) -> Result<ClassForm, Error> {
        let text = text.trim();
        let inner = text
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::parse(1, 1, "form literal must be enclosed in [ ]"))?;
        let mut entries = Vec::new();
        for piece in split_top_level(inner, ',') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Error::parse(1, 1, "empty form entry"));
            }
            entries.push(self.parse_entry(piece)?);
        }
        ClassForm::new(entries)
    }

    fn parse_entry(&self, piece: &str) -> Result<SquareClass, Error> {
        if let Some(rest) = piece.strip_prefix("elem{") {
            let body = rest
                .strip_suffix('}')
                .ok_or_else(|| Error::parse(1, 1, "unterminated elem{...} literal"))?;
            let e = self.parse_element(body)?;
            return self.class_of_element(&e);
        }
        let mut bits = 0u32;
        for token in piece.split('*') {
            let token = token.trim();
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let exp: i64 = e.trim().parse().map_err(|_| {
                        Error::parse(1, 1, format!("bad exponent `{e}`"))
                    })?;
                    (n.trim(), exp)
                }
                None => (token, 1),
            };
            let parity = (exp.rem_euclid(2)) as u32;
            match name {
                "1" => {}
                "s" => bits ^= parity,
                _ => {
                    let idx = self.parse_var(name)?;
                    bits ^= parity << idx;
                }
            }
        }
        self.class_from_bits(bits)
    }

    /// Parses the sparse-polynomial element syntax, e.g. `3*t^-2 + 1*t^3`.
    /// Terms are separated by `+` or `-`; each term is an optional constant
    /// coefficient times optional `t_i^e` factors. `t` is accepted as an
    /// alias for `t1` on depth-1 towers.
    pub fn parse_element(&self, text: &str) -> Result<LaurentElement, Error> {
        let mut acc = LaurentElement::zero(self.r as usize);
        for (sign, term) in split_signed_terms(text) {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::parse(1, 1, "empty term in element literal"));
            }
            let mut coeff: u64 = 1;
            let mut exps = vec![0i64; self.r as usize];
            let mut saw_factor = false;
            for factor in term.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(Error::parse(1, 1, "empty factor in element literal"));
                }
                saw_factor = true;
                if factor.chars().next().unwrap().is_ascii_digit() {
                    let c: u64 = factor.parse().map_err(|_| {
                        Error::parse(1, 1, format!("bad coefficient `{factor}`"))
                    })?;
                    coeff = crate::laurent::mul_mod(coeff, c % self.p, self.p);
                } else {
                    let (name, exp) = match factor.split_once('^') {
                        Some((n, e)) => {
                            let exp: i64 = e.trim().parse().map_err(|_| {
                                Error::parse(1, 1, format!("bad exponent `{e}`"))
                            })?;
                            (n.trim(), exp)
                        }
                        None => (factor, 1),
                    };
                    let idx = self.parse_var(name)?;
                    exps[idx as usize - 1] += exp;
                }
            }
            if !saw_factor {
                return Err(Error::parse(1, 1, "empty term in element literal"));
            }
            if sign < 0 {
                coeff = (self.p - coeff % self.p) % self.p;
            }
            let term = LaurentElement::monomial(self.r as usize, exps, coeff, self.p);
            acc = acc.add(&term, self.p);
        }
        Ok(acc)
    }

    /// Variable index (1-based) of `t`, `t1`, ..; `t` is only valid when r = 1.
    fn parse_var(&self, name: &str) -> Result<u32, Error> {
        if name == "t" {
            if self.r == 1 {
                return Ok(1);
            }
            return Err(Error::parse(
                1,
                1,
                format!("bare `t` is ambiguous over a tower with r={}", self.r),
            ));
        }
        let idx: u32 = name
            .strip_prefix('t')
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::parse(1, 1, format!("unknown token `{name}`")))?;
        if idx == 0 || idx > self.r {
            return Err(Error::VariableOutOfRange { index: idx, r: self.r });
        }
        Ok(idx)
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Splits `a + b - c` into signed terms; a leading sign is allowed.
fn split_signed_terms(s: &str) -> Vec<(i32, &str)> {
    let mut out = Vec::new();
    let mut sign = 1i32;
    let mut start = 0usize;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && !is_exponent_sign(bytes, i) {
            if s[start..i].trim().is_empty() && out.is_empty() && start == 0 {
                // leading sign
            } else {
                out.push((sign, &s[start..i]));
            }
            sign = if b == b'-' { -1 } else { 1 };
            start = i + 1;
        }
    }
    out.push((sign, &s[start..]));
    out
}

fn is_exponent_sign(bytes: &[u8], i: usize) -> bool {
    // a '-' directly after '^' belongs to the exponent
    let mut j = i;
    while j > 0 {
        j -= 1;
        match bytes[j] {
            b' ' => continue,
            b'^' => return true,
            _ => return false,
        }
    }
    false
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(p: u64, r: u32) -> Tower {
        Tower::new(p, r).unwrap()
    }

    fn form(t: &Tower, text: &str) -> ClassForm {
        t.parse_form(text).unwrap()
    }

    #[test]
    fn tower_rejects_non_primes() {
        assert!(matches!(Tower::new(4, 1), Err(Error::InvalidPrime { p: 4 })));
        assert!(matches!(Tower::new(2, 0), Err(Error::InvalidPrime { .. })));
        assert!(Tower::new(13, 2).is_ok());
    }

    #[test]
    fn class_group_is_elementary_abelian() {
        let t = tower(5, 2);
        assert_eq!(t.class_count(), 8);
        for a in t.classes() {
            assert_eq!(a.product(a), SquareClass::TRIVIAL);
            for b in t.classes() {
                assert_eq!(a.product(b), b.product(a));
            }
        }
    }

    #[test]
    fn class_of_element_examples() {
        let t = tower(5, 1);
        // identity
        let one = LaurentElement::constant(1, 1, 5);
        assert_eq!(t.class_of_element(&one).unwrap().bits(), 0b00);
        // t^-1: odd valuation, unit lead coefficient 1
        let tinv = LaurentElement::monomial(1, vec![-1], 1, 5);
        assert_eq!(t.class_of_element(&tinv).unwrap().bits(), 0b10);
        // 3t^2 + t^3: even valuation, lead coefficient 3 is a non-residue mod 5
        let e = t.parse_element("3*t^2 + 1*t^3").unwrap();
        assert_eq!(t.class_of_element(&e).unwrap().bits(), 0b01);
        // zero element has no class
        assert!(matches!(
            t.class_of_element(&LaurentElement::zero(1)),
            Err(Error::ZeroElement)
        ));
    }

    #[test]
    fn isotropy_base_cases() {
        let f5 = tower(5, 0);
        // ⟨1,2⟩ over F_5: -2 ≡ 3 is a non-square, anisotropic
        assert!(!f5.is_isotropic(&form(&f5, "[1,s]")));
        // ⟨1,1,1⟩ over F_3 is isotropic ((1,1,1) sums to 0)
        let f3 = tower(3, 0);
        assert!(f3.is_isotropic(&form(&f3, "[1,1,1]")));
        // dim 1 is never isotropic
        assert!(!f5.is_isotropic(&form(&f5, "[s]")));
        // ⟨1,1⟩: isotropic iff -1 is a square, i.e. p ≡ 1 (mod 4)
        assert!(f5.is_isotropic(&form(&f5, "[1,1]")));
        assert!(!f3.is_isotropic(&form(&f3, "[1,1]")));
    }

    #[test]
    fn isotropy_descends_through_springer_split() {
        let t = tower(5, 1);
        // both residue forms ⟨1,2⟩ anisotropic over F_5
        assert!(!t.is_isotropic(&form(&t, "[1,s,t1,s*t1]")));
        let (_, depth) = t.is_isotropic_with_depth(&form(&t, "[1,s,t1,s*t1]"));
        assert_eq!(depth, 2);
    }

    #[test]
    fn representation_examples() {
        let f5 = tower(5, 0);
        // 4 is a square: represented by ⟨1⟩
        let four = f5.class_of_constant(4).unwrap();
        assert!(f5.represents(&form(&f5, "[1]"), four));
        // 2 is a non-square: not represented by ⟨1⟩
        let two = f5.class_of_constant(2).unwrap();
        assert!(!f5.represents(&form(&f5, "[1]"), two));

        let t = tower(5, 1);
        let tcl = t.class_from_bits(0b10).unwrap();
        assert!(t.represents(&form(&t, "[1,s,t1,s*t1]"), tcl));
    }

    #[test]
    fn universality_examples() {
        let f5 = tower(5, 0);
        // anisotropic binary over F_p is the norm form of F_{p^2}, universal
        assert!(f5.is_universal(&form(&f5, "[1,s]")));
        assert!(!f5.is_universal(&form(&f5, "[1]")));

        let t = tower(5, 1);
        assert!(t.is_universal(&form(&t, "[1,s,t1,s*t1]")));
    }

    #[test]
    fn au_enumeration_small_towers() {
        let f5 = tower(5, 0);
        let e = f5.au_enumerate(None, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(e.dims.iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!((e.m, e.u), (Some(2), Some(2)));

        let t = tower(5, 1);
        let e = t.au_enumerate(None, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(e.dims.iter().collect::<Vec<_>>(), vec![4]);

        // cap is enforced
        let deep = tower(3, 3);
        assert!(matches!(
            deep.au_enumerate(None, DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationCapExceeded { r: 3, cap: 2 })
        ));
        // lifting the cap with a small max_dim stays cheap: at r = 3 the
        // only anisotropic universal dimension is 16, so nothing below 5
        let e = deep.au_enumerate(Some(4), 3).unwrap();
        assert!(e.dims.is_empty());
        assert_eq!(e.m, None);
    }

    #[test]
    fn au_enumeration_is_an_iterated_sumset() {
        for p in [3u64, 5, 7, 13] {
            let mut expect = vec![2u64];
            for r in 0..=2u32 {
                let e = tower(p, r).au_enumerate(None, 2).unwrap();
                assert_eq!(e.dims.iter().collect::<Vec<_>>(), expect, "p={p} r={r}");
                expect = vec![2 * expect[0]];
            }
        }
    }

    #[test]
    fn kaplansky_radical_examples() {
        // R(F_5) is all of F_5^×: both binary forms ⟨1,-1⟩, ⟨1,-2⟩ are
        // universal. This coexists with m(F_5) = 2; the radical-criterion
        // reading that would force strict inclusions is not asserted
        // anywhere, only the two computed facts are.
        let f5 = tower(5, 0);
        assert_eq!(f5.kaplansky_radical(2).unwrap().len(), 2);
        assert_eq!(f5.au_enumerate(None, 2).unwrap().m, Some(2));
        // one Laurent layer shrinks the radical to the trivial class
        for p in [3, 5] {
            let t = tower(p, 1);
            let rad = t.kaplansky_radical(2).unwrap();
            assert_eq!(rad, vec![SquareClass::TRIVIAL]);
        }
    }

    #[test]
    fn form_literals() {
        let t = tower(5, 1);
        let q = form(&t, "[1, s, t1, s*t1]");
        let bits: Vec<u32> = q.entries().iter().map(|c| c.bits()).collect();
        assert_eq!(bits, vec![0b00, 0b01, 0b10, 0b11]);

        // exponents reduce mod 2
        let f3 = tower(3, 1);
        let q = form(&f3, "[t1^3]");
        assert_eq!(q.entries()[0].bits(), 0b10);

        // elem entries reduce through class_of_element
        let q = form(&t, "[elem{3*t^2 + 1*t^3}]");
        assert_eq!(q.entries()[0].bits(), 0b01);

        // unknown variable index
        assert!(matches!(
            t.parse_form("[t2]"),
            Err(Error::VariableOutOfRange { index: 2, r: 1 })
        ));
    }

    #[test]
    fn form_display_roundtrip() {
        let t = tower(7, 2);
        let q = form(&t, "[1,s*t1,t2,s*t1*t2]");
        let reparsed = t.parse_form(&q.to_string()).unwrap();
        assert_eq!(q, reparsed);
    }

    #[test]
    fn multiset_odometer_counts() {
        // multisets of size 3 over 4 symbols: C(6,3) = 20
        let mut n = 0;
        for_each_multiset(4, 3, &mut |ms| {
            assert!(ms.windows(2).all(|w| w[0] <= w[1]));
            n += 1;
            false
        });
        assert_eq!(n, 20);
    }
}
