//! The m/u/AU calculus over valid field descriptors.
//!
//! AU sets are computed bottom-up: a base contributes its single power of
//! two, a CDVF layer takes the exact self-sumset of its residue field's
//! set, a rational function field over K contributes {2·m_s(K)}, and a
//! semi-global field takes the union of self-sumsets over its components,
//! joined with {2} exactly when the reduction graph is not a tree. The
//! m- and u-invariants are the minimum and maximum of the AU set.

use std::collections::BTreeSet;
use std::collections::HashMap;

use crate::descriptor::{AuSet, BaseClass, FieldDescriptor, InvariantValue};
use crate::error::Error;
use crate::graphs::ComponentField;

/// The set of dimensions of anisotropic universal forms over the field the
/// descriptor denotes.
pub fn au_set(f: &FieldDescriptor) -> Result<AuSet, Error> {
    f.ensure_valid()?;
    let mut memo = HashMap::new();
    au_set_memo(f, &mut memo)
}

/// min AU(f).
pub fn m_invariant(f: &FieldDescriptor) -> Result<InvariantValue, Error> {
    let au = au_set(f)?;
    Ok(InvariantValue::Finite(
        au.min_dim().expect("AU set of a valid descriptor is non-empty"),
    ))
}

/// max AU(f).
pub fn u_invariant(f: &FieldDescriptor) -> Result<InvariantValue, Error> {
    let au = au_set(f)?;
    Ok(InvariantValue::Finite(
        au.max_dim().expect("AU set of a valid descriptor is non-empty"),
    ))
}

fn au_set_memo(
    f: &FieldDescriptor,
    memo: &mut HashMap<FieldDescriptor, AuSet>,
) -> Result<AuSet, Error> {
    if let Some(hit) = memo.get(f) {
        return Ok(hit.clone());
    }
    let result = match f {
        FieldDescriptor::Base(b) => AuSet::singleton(b.ms_us()),
        FieldDescriptor::Cdvf(residue) => au_set_memo(residue, memo)?.sumset(),
        FieldDescriptor::RationalFnField(over) => AuSet::singleton(2 * over.ms_us()?),
        FieldDescriptor::SemiGlobal { over, model } => {
            let residue = match over.as_ref() {
                FieldDescriptor::Cdvf(residue) => residue.as_ref(),
                _ => unreachable!("validated semi-global over-field is Cdvf-shaped"),
            };
            let mut dims = AuSet::default();
            for c in &model.components {
                let comp_au = match c {
                    ComponentField::Leaf => {
                        // Pinned to {2·m_s(residue)} only under the
                        // function-field hypothesis on the base.
                        let base = f.bottom_base();
                        if !base.fnfield_hypothesis() {
                            return Err(Error::HypothesisRequired {
                                base: base.to_string(),
                            });
                        }
                        AuSet::singleton(2 * residue.ms_us()?)
                    }
                    ComponentField::RationalLeaf => AuSet::singleton(2 * residue.ms_us()?),
                    ComponentField::Nested(inner) => {
                        let nested =
                            FieldDescriptor::semi_global(residue.clone(), inner.clone());
                        au_set_memo(&nested, memo)?
                    }
                };
                dims.union_with(&comp_au.sumset());
            }
            if !model.is_tree()? {
                dims.insert(2);
            }
            dims
        }
    };
    memo.insert(f.clone(), result.clone());
    Ok(result)
}

/// The possible m-invariants of one-variable function fields over an
/// n-local tower over `base`: {2^j | j = 1..n} together with 2^{n+r+1}
/// where 2^r = m_s(base). For n = 0 this degenerates to {2^r}, the base
/// itself (an extension of the attainability statement, kept for CLI
/// convenience).
pub fn possible_m(n: u32, base: BaseClass) -> Result<BTreeSet<u64>, Error> {
    if !base.fnfield_hypothesis() {
        return Err(Error::HypothesisRequired {
            base: base.to_string(),
        });
    }
    let r = base.exponent();
    if n > crate::descriptor::MAX_CDVF_DEPTH || r > crate::descriptor::MAX_CDVF_DEPTH {
        return Err(Error::Unsupported(format!(
            "depth {n} with base exponent {r} exceeds the supported maximum of {}",
            crate::descriptor::MAX_CDVF_DEPTH
        )));
    }
    if n == 0 {
        return Ok(BTreeSet::from([1 << r]));
    }
    let mut out: BTreeSet<u64> = (1..=n).map(|j| 1u64 << j).collect();
    out.insert(1 << (n + r + 1));
    Ok(out)
}
