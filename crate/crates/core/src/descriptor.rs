//! The recursive field-descriptor algebra and the invariant value types
//! shared by every other module.
//!
//! A descriptor is a purely symbolic description of a field: a base class,
//! a complete discretely valued layer over a residue descriptor, a rational
//! function field, or a semi-global field (one-variable function field over
//! a CDVF) equipped with regular-model data.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::graphs::Model;
use crate::laurent::is_odd_prime;

// ---------------------------------------------------------------------------
// Base classes
// ---------------------------------------------------------------------------

/// The admissible base fields, each carrying a declared exponent r with
/// m_s = u_s = 2^r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseClass {
    AlgebraicallyClosed,
    /// A finite field of odd order p (prime).
    Finite(u64),
    /// An abstract base with declared exponent and an explicit flag for the
    /// hypothesis that every one-variable function field L over the base has
    /// m(L) = u(L) = 2^{r+1}. The flag is implicitly true for the two named
    /// base classes and must be asserted for custom bases.
    Custom { r: u32, fnfield_hypothesis: bool },
}

impl BaseClass {
    /// The exponent r with m_s = u_s = 2^r.
    pub fn exponent(&self) -> u32 {
        match self {
            BaseClass::AlgebraicallyClosed => 0,
            BaseClass::Finite(_) => 1,
            BaseClass::Custom { r, .. } => *r,
        }
    }

    pub fn fnfield_hypothesis(&self) -> bool {
        match self {
            BaseClass::AlgebraicallyClosed | BaseClass::Finite(_) => true,
            BaseClass::Custom {
                fnfield_hypothesis, ..
            } => *fnfield_hypothesis,
        }
    }

    pub fn ms_us(&self) -> u64 {
        1 << self.exponent()
    }
}

impl fmt::Display for BaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseClass::AlgebraicallyClosed => write!(f, "algclosed"),
            BaseClass::Finite(p) => write!(f, "finite({p})"),
            BaseClass::Custom {
                r,
                fnfield_hypothesis,
            } => write!(f, "custom(r={r},hyp={fnfield_hypothesis})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

/// Cap on Cdvf nesting and declared base exponents; keeps every invariant
/// the calculus produces comfortably inside a `u64`.
pub const MAX_CDVF_DEPTH: u32 = 32;

/// Recursive description of a field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Base(BaseClass),
    /// A complete discretely valued field with the given residue field.
    Cdvf(Box<FieldDescriptor>),
    /// K(x) for K the inner descriptor.
    RationalFnField(Box<FieldDescriptor>),
    /// A one-variable function field over a CDVF, with regular-model data.
    SemiGlobal {
        over: Box<FieldDescriptor>,
        model: Model,
    },
}

impl FieldDescriptor {
    pub fn base(b: BaseClass) -> Self {
        FieldDescriptor::Base(b)
    }

    pub fn cdvf(residue: FieldDescriptor) -> Self {
        FieldDescriptor::Cdvf(Box::new(residue))
    }

    /// `Cdvf` applied `n` times.
    pub fn cdvf_tower(foot: FieldDescriptor, n: u32) -> Self {
        (0..n).fold(foot, |acc, _| FieldDescriptor::cdvf(acc))
    }

    pub fn rational_fn_field(over: FieldDescriptor) -> Self {
        FieldDescriptor::RationalFnField(Box::new(over))
    }

    pub fn semi_global(over: FieldDescriptor, model: Model) -> Self {
        FieldDescriptor::SemiGlobal {
            over: Box::new(over),
            model,
        }
    }

    pub fn is_cdvf_shaped(&self) -> bool {
        matches!(self, FieldDescriptor::Cdvf(_))
    }

    /// The unique base class at the bottom of the descriptor.
    pub fn bottom_base(&self) -> &BaseClass {
        match self {
            FieldDescriptor::Base(b) => b,
            FieldDescriptor::Cdvf(inner)
            | FieldDescriptor::RationalFnField(inner) => inner.bottom_base(),
            FieldDescriptor::SemiGlobal { over, .. } => over.bottom_base(),
        }
    }

    /// Strips the Cdvf layers off a tower: the first non-Cdvf descriptor.
    pub fn tower_foot(&self) -> &FieldDescriptor {
        match self {
            FieldDescriptor::Cdvf(inner) => inner.tower_foot(),
            other => other,
        }
    }

    /// Number of Cdvf constructors down to the base.
    pub fn cdvf_depth(&self) -> u32 {
        match self {
            FieldDescriptor::Base(_) => 0,
            FieldDescriptor::Cdvf(inner) => 1 + inner.cdvf_depth(),
            FieldDescriptor::RationalFnField(inner) => inner.cdvf_depth(),
            FieldDescriptor::SemiGlobal { over, .. } => over.cdvf_depth(),
        }
    }

    /// Whether the common value m_s = u_s is known for this descriptor:
    /// bases, Cdvf towers over such, and rational function fields over an
    /// algebraically closed base.
    pub fn is_ms_us_computable(&self) -> bool {
        match self {
            FieldDescriptor::Base(_) => true,
            FieldDescriptor::Cdvf(inner) => inner.is_ms_us_computable(),
            FieldDescriptor::RationalFnField(inner) => {
                matches!(**inner, FieldDescriptor::Base(BaseClass::AlgebraicallyClosed))
            }
            FieldDescriptor::SemiGlobal { .. } => false,
        }
    }

    /// The common value m_s = u_s, a power of two. Doubles across each Cdvf
    /// layer; a rational function field over an algebraically closed base
    /// contributes 2.
    pub fn ms_us(&self) -> Result<u64, Error> {
        if !self.is_ms_us_computable() {
            return Err(Error::NotMsUsComputable {
                descriptor: self.to_string(),
            });
        }
        Ok(self.ms_us_unchecked())
    }

    fn ms_us_unchecked(&self) -> u64 {
        match self {
            FieldDescriptor::Base(b) => b.ms_us(),
            FieldDescriptor::Cdvf(inner) => 2 * inner.ms_us_unchecked(),
            FieldDescriptor::RationalFnField(_) => 2,
            FieldDescriptor::SemiGlobal { .. } => unreachable!("checked above"),
        }
    }

    /// Checks every descriptor invariant recursively. Violations are data,
    /// not failures: the report lists each one with a path into the value.
    pub fn validate(&self) -> ValidityReport {
        let mut report = ValidityReport::default();
        self.validate_into("", &mut report);
        if self.cdvf_depth() > MAX_CDVF_DEPTH {
            report.push(
                "",
                format!("Cdvf nesting deeper than {MAX_CDVF_DEPTH} is not supported"),
            );
        }
        report
    }

    fn validate_into(&self, path: &str, report: &mut ValidityReport) {
        match self {
            FieldDescriptor::Base(BaseClass::Finite(p)) => {
                if !is_odd_prime(*p) {
                    report.push(path, format!("{p} is not an odd prime"));
                }
            }
            FieldDescriptor::Base(BaseClass::Custom { r, .. }) => {
                if *r > MAX_CDVF_DEPTH {
                    report.push(path, format!("exponent r must be at most {MAX_CDVF_DEPTH}"));
                }
            }
            FieldDescriptor::Base(_) => {}
            FieldDescriptor::Cdvf(residue) => {
                if !residue.is_ms_us_computable() {
                    report.push(
                        &join(path, "residue"),
                        "residue not ms-us-computable".to_string(),
                    );
                }
                residue.validate_into(&join(path, "residue"), report);
            }
            FieldDescriptor::RationalFnField(inner) => {
                inner.validate_into(&join(path, "over"), report);
            }
            FieldDescriptor::SemiGlobal { over, model } => {
                if !over.is_cdvf_shaped() {
                    report.push(&join(path, "over"), "over must be Cdvf-shaped".to_string());
                }
                over.validate_into(&join(path, "over"), report);
                model.validate_into(over, &join(path, "model"), report);
            }
        }
    }

    /// Shorthand for `validate().ok()` that converts violations to an error.
    pub fn ensure_valid(&self) -> Result<(), Error> {
        let report = self.validate();
        if report.ok() {
            Ok(())
        } else {
            Err(Error::InvalidDescriptor(report))
        }
    }
}

pub(crate) fn join(path: &str, seg: &str) -> String {
    if path.is_empty() {
        seg.to_string()
    } else {
        format!("{path}.{seg}")
    }
}

// ---------------------------------------------------------------------------
// Validity reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

/// Outcome of `validate`: ok iff no violations were recorded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidityReport {
    violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub(crate) fn push(&mut self, path: &str, message: String) {
        self.violations.push(Violation {
            path: path.to_string(),
            message,
        });
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        let rendered: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                if v.path.is_empty() {
                    v.message.clone()
                } else {
                    format!("{}: {}", v.path, v.message)
                }
            })
            .collect();
        write!(f, "{}", rendered.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Invariant values
// ---------------------------------------------------------------------------

/// A natural number extended with infinity. Arithmetic saturates at
/// infinity, so fully-arboreal layers are first-class values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantValue {
    Finite(u64),
    Infinite,
}

impl InvariantValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            InvariantValue::Finite(v) => Some(v),
            InvariantValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, InvariantValue::Infinite)
    }

    pub fn saturating_add(self, other: InvariantValue) -> InvariantValue {
        match (self, other) {
            (InvariantValue::Finite(a), InvariantValue::Finite(b)) => {
                InvariantValue::Finite(a.saturating_add(b))
            }
            _ => InvariantValue::Infinite,
        }
    }

    pub fn saturating_mul(self, other: InvariantValue) -> InvariantValue {
        match (self, other) {
            (InvariantValue::Finite(a), InvariantValue::Finite(b)) => {
                InvariantValue::Finite(a.saturating_mul(b))
            }
            _ => InvariantValue::Infinite,
        }
    }
}

impl From<u64> for InvariantValue {
    fn from(v: u64) -> Self {
        InvariantValue::Finite(v)
    }
}

impl fmt::Display for InvariantValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantValue::Finite(v) => write!(f, "{v}"),
            InvariantValue::Infinite => write!(f, "inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// AU sets
// ---------------------------------------------------------------------------

/// A finite set of dimensions of anisotropic universal forms. Ordered and
/// canonical: min is the m-invariant, max the u-invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AuSet {
    dims: BTreeSet<u64>,
}

impl AuSet {
    pub fn singleton(d: u64) -> Self {
        AuSet {
            dims: BTreeSet::from([d]),
        }
    }

    pub fn insert(&mut self, d: u64) {
        self.dims.insert(d);
    }

    pub fn min_dim(&self) -> Option<u64> {
        self.dims.iter().next().copied()
    }

    pub fn max_dim(&self) -> Option<u64> {
        self.dims.iter().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn contains(&self, d: u64) -> bool {
        self.dims.contains(&d)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.dims.iter().copied()
    }

    /// The exact sumset {a + b | a, b ∈ self}.
    pub fn sumset(&self) -> AuSet {
        let mut dims = BTreeSet::new();
        for a in &self.dims {
            for b in &self.dims {
                dims.insert(a + b);
            }
        }
        AuSet { dims }
    }

    pub fn union_with(&mut self, other: &AuSet) {
        self.dims.extend(other.dims.iter().copied());
    }
}

impl FromIterator<u64> for AuSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        AuSet {
            dims: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for AuSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", rendered.join(","))
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{ComponentField, Model};

    fn leaf_model(tree: bool) -> Model {
        Model::with_tree_flag(tree, vec![ComponentField::Leaf, ComponentField::Leaf])
    }

    #[test]
    fn validate_examples() {
        assert!(FieldDescriptor::base(BaseClass::Finite(5)).validate().ok());

        // semi-global over a bare base is rejected
        let bad = FieldDescriptor::semi_global(
            FieldDescriptor::base(BaseClass::Finite(5)),
            leaf_model(true),
        );
        let report = bad.validate();
        assert!(!report.ok());
        assert!(report
            .violations()
            .iter()
            .any(|v| v.message.contains("Cdvf-shaped")));

        // Cdvf over a general rational function field is rejected
        let bad = FieldDescriptor::cdvf(FieldDescriptor::rational_fn_field(
            FieldDescriptor::base(BaseClass::Finite(5)),
        ));
        let report = bad.validate();
        assert!(!report.ok());
        assert!(report
            .violations()
            .iter()
            .any(|v| v.message.contains("not ms-us-computable")));

        // ... but over an algebraically closed base it is fine (k(x) has m_s = u_s = 2)
        let good = FieldDescriptor::cdvf(FieldDescriptor::rational_fn_field(
            FieldDescriptor::base(BaseClass::AlgebraicallyClosed),
        ));
        assert!(good.validate().ok());

        let bad = FieldDescriptor::base(BaseClass::Finite(4));
        assert!(!bad.validate().ok());
    }

    #[test]
    fn validate_is_idempotent() {
        let f = FieldDescriptor::cdvf(FieldDescriptor::rational_fn_field(
            FieldDescriptor::base(BaseClass::Finite(7)),
        ));
        assert_eq!(f.validate(), f.validate());
    }

    #[test]
    fn cdvf_depth_examples() {
        let f3 = FieldDescriptor::base(BaseClass::Finite(3));
        assert_eq!(FieldDescriptor::cdvf_tower(f3.clone(), 2).cdvf_depth(), 2);
        assert_eq!(
            FieldDescriptor::base(BaseClass::AlgebraicallyClosed).cdvf_depth(),
            0
        );
        let sg = FieldDescriptor::semi_global(
            FieldDescriptor::cdvf(FieldDescriptor::base(BaseClass::Finite(5))),
            leaf_model(true),
        );
        assert_eq!(sg.cdvf_depth(), 1);
    }

    #[test]
    fn ms_us_examples() {
        assert_eq!(
            FieldDescriptor::base(BaseClass::Finite(5)).ms_us().unwrap(),
            2
        );
        let qp = FieldDescriptor::cdvf(FieldDescriptor::base(BaseClass::Finite(7)));
        assert_eq!(qp.ms_us().unwrap(), 4);
        let f3_2 = FieldDescriptor::cdvf_tower(FieldDescriptor::base(BaseClass::Finite(3)), 2);
        assert_eq!(f3_2.ms_us().unwrap(), 8);

        // doubling law across a Cdvf layer
        for r in 0..6 {
            let k = FieldDescriptor::cdvf_tower(
                FieldDescriptor::base(BaseClass::AlgebraicallyClosed),
                r,
            );
            assert_eq!(
                FieldDescriptor::cdvf(k.clone()).ms_us().unwrap(),
                2 * k.ms_us().unwrap()
            );
        }

        // semi-global descriptors are rejected
        let sg = FieldDescriptor::semi_global(
            FieldDescriptor::cdvf(FieldDescriptor::base(BaseClass::Finite(5))),
            leaf_model(true),
        );
        assert!(matches!(sg.ms_us(), Err(Error::NotMsUsComputable { .. })));
    }

    #[test]
    fn invariant_value_saturates() {
        let inf = InvariantValue::Infinite;
        let two = InvariantValue::Finite(2);
        assert_eq!(two.saturating_add(inf), inf);
        assert_eq!(two.saturating_mul(two), InvariantValue::Finite(4));
        assert!(two < inf);
    }

    #[test]
    fn au_set_sumset() {
        let s: AuSet = [2u64, 8].into_iter().collect();
        let sum = s.sumset();
        assert_eq!(sum.iter().collect::<Vec<_>>(), vec![4, 10, 16]);
    }
}
