//! Independent verification layer.
//!
//! Three oracles sit alongside the class-arithmetic engine: exhaustive
//! vector search over F_p, Hensel-certificate witness search over the
//! towers, and a cross-validation harness that replays every engine
//! decision against them. Isotropy claims must be backed by a certificate
//! that re-verifies under exact Laurent arithmetic; anisotropy claims are
//! confirmed structurally by brute-forcing every base residue form. A
//! failed witness search is only ever "inconclusive", since bounded search
//! cannot prove non-existence.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::forms::{for_each_multiset, ClassForm, SquareClass, Tower};
use crate::laurent::{add_mod, mul_mod, LaurentElement, Val};

/// Default candidate budget for the exhaustive F_p searches.
pub const DEFAULT_FP_BUDGET: u64 = 10_000_000;

/// Default candidate budget for the bounded tower witness search.
pub const DEFAULT_WITNESS_BUDGET: u64 = 200_000;

/// Cap on the number of forms an exhaustive cross-validation may visit.
pub const DEFAULT_FORM_BUDGET: u64 = 2_000_000;

// ---------------------------------------------------------------------------
// Brute force over F_p
// ---------------------------------------------------------------------------

/// Instantiates the entries of a base-field form by their canonical
/// representatives (1 and the least non-residue).
fn fp_entries(p: u64, q: &ClassForm) -> Vec<u64> {
    let s = crate::laurent::least_nonresidue(p);
    q.entries()
        .iter()
        .map(|c| if c.eps() { s } else { 1 })
        .collect()
}

/// Exhaustively searches F_p^dim for a non-zero isotropic vector of `q`
/// (entries instantiated canonically). A found witness is normalized so its
/// first non-zero coordinate is 1; `None` means no isotropic vector exists.
pub fn fp_isotropy_witness(p: u64, q: &ClassForm) -> Result<Option<Vec<u64>>, Error> {
    fp_isotropy_witness_with_budget(p, q, DEFAULT_FP_BUDGET)
}

pub fn fp_isotropy_witness_with_budget(
    p: u64,
    q: &ClassForm,
    budget: u64,
) -> Result<Option<Vec<u64>>, Error> {
    let dim = q.dim();
    let candidates = (p as f64).powi(dim as i32);
    if candidates > budget as f64 {
        return Err(Error::BudgetExceeded {
            what: format!("{p}^{dim} candidate vectors over budget {budget}"),
        });
    }
    let entries = fp_entries(p, q);
    let mut x = vec![0u64; dim];
    'outer: loop {
        // advance first: the all-zero vector is not a witness
        let mut i = dim;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            x[i] += 1;
            if x[i] < p {
                break;
            }
            x[i] = 0;
        }
        let value = entries
            .iter()
            .zip(&x)
            .fold(0u64, |acc, (&a, &xi)| add_mod(acc, mul_mod(a, mul_mod(xi, xi, p), p), p));
        if value == 0 {
            let lead = x.iter().copied().find(|&v| v != 0).unwrap();
            let inv = crate::laurent::inv_mod(lead, p);
            let normalized = x.iter().map(|&v| mul_mod(v, inv, p)).collect();
            return Ok(Some(normalized));
        }
    }
    Ok(None)
}

/// The set of non-zero values represented by `q` over F_p, by direct image
/// computation.
pub fn fp_image(p: u64, q: &ClassForm) -> Result<BTreeSet<u64>, Error> {
    let dim = q.dim();
    if (p as f64).powi(dim as i32) > DEFAULT_FP_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            what: format!("{p}^{dim} vectors"),
        });
    }
    let entries = fp_entries(p, q);
    let mut image = BTreeSet::new();
    let mut x = vec![0u64; dim];
    loop {
        let value = entries
            .iter()
            .zip(&x)
            .fold(0u64, |acc, (&a, &xi)| add_mod(acc, mul_mod(a, mul_mod(xi, xi, p), p), p));
        if value != 0 {
            image.insert(value);
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(image);
            }
            i -= 1;
            x[i] += 1;
            if x[i] < p {
                break;
            }
            x[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Hensel certificates
// ---------------------------------------------------------------------------

/// An isotropy witness over a tower: either an exact zero of the form, or
/// an approximate one whose defect valuation exceeds twice the derivative
/// valuation at the pivot coordinate, which guarantees a true zero in the
/// complete field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselCertificate {
    pub witness: Vec<LaurentElement>,
    pub pivot: usize,
    /// (v_q, v_d): outermost valuations of q(witness) and of a_pivot·x_pivot.
    pub slack: (Val, i64),
}

impl HenselCertificate {
    pub fn is_exact_zero(&self) -> bool {
        self.slack.0.is_infinite()
    }
}

/// q(witness) under exact Laurent arithmetic with canonical representatives.
pub fn evaluate_form(tower: &Tower, q: &ClassForm, witness: &[LaurentElement]) -> LaurentElement {
    let p = tower.p();
    let mut acc = LaurentElement::zero(tower.r() as usize);
    for (c, w) in q.entries().iter().zip(witness) {
        acc = acc.add(&tower.representative(*c).mul(&w.square(p), p), p);
    }
    acc
}

fn certificate_for(tower: &Tower, q: &ClassForm, witness: Vec<LaurentElement>) -> Option<HenselCertificate> {
    let r = tower.r();
    let value = evaluate_form(tower, q, &witness);
    if r == 0 {
        let pivot = witness.iter().position(|w| !w.is_zero())?;
        return value.is_zero().then_some(HenselCertificate {
            witness,
            pivot,
            slack: (Val::Infinite, 0),
        });
    }
    let v_q = value.valuation(r);
    // pivot: the non-zero coordinate minimizing v(a_j x_j)
    let mut best: Option<(usize, i64)> = None;
    for (j, w) in witness.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let Val::Finite(vd) = tower.representative(q.entries()[j]).mul(w, tower.p()).valuation(r)
        else {
            continue;
        };
        if best.is_none_or(|(_, b)| vd < b) {
            best = Some((j, vd));
        }
    }
    let (pivot, v_d) = best?;
    v_q.exceeds_twice(Val::Finite(v_d)).then_some(HenselCertificate {
        witness,
        pivot,
        slack: (v_q, v_d),
    })
}

/// Re-checks a certificate from scratch: exact re-evaluation of q(witness),
/// integrality and primitivity of the witness in the outermost valuation,
/// the recorded slack, and the Newton condition v_q > 2·v_d.
pub fn verify_certificate(tower: &Tower, q: &ClassForm, cert: &HenselCertificate) -> bool {
    let r = tower.r();
    if cert.witness.len() != q.dim() || cert.pivot >= q.dim() {
        return false;
    }
    if cert.witness.iter().any(|w| w.vars() != r as usize) {
        return false;
    }
    if cert.witness.iter().all(|w| w.is_zero()) {
        return false;
    }
    if cert.witness[cert.pivot].is_zero() {
        return false;
    }
    let value = evaluate_form(tower, q, &cert.witness);
    if r == 0 {
        return value.is_zero() && cert.slack == (Val::Infinite, 0);
    }
    let vals: Vec<Val> = cert
        .witness
        .iter()
        .filter(|w| !w.is_zero())
        .map(|w| w.valuation(r))
        .collect();
    // integral and primitive: min entry valuation exactly 0
    if vals.iter().any(|v| *v < Val::Finite(0)) || !vals.contains(&Val::Finite(0)) {
        return false;
    }
    let v_q = value.valuation(r);
    let Val::Finite(v_d) = tower
        .representative(q.entries()[cert.pivot])
        .mul(&cert.witness[cert.pivot], tower.p())
        .valuation(r)
    else {
        return false;
    };
    cert.slack == (v_q, v_d) && v_q.exceeds_twice(Val::Finite(v_d))
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Found(HenselCertificate),
    /// No certificate found. Never a proof of anisotropy.
    NotFound { reason: String, candidates_tried: u64 },
}

impl SearchResult {
    pub fn found(&self) -> Option<&HenselCertificate> {
        match self {
            SearchResult::Found(c) => Some(c),
            SearchResult::NotFound { .. } => None,
        }
    }
}

/// Searches for an isotropy certificate for `q` over the tower.
///
/// The search first tries to assemble an exact zero by descending the
/// uniformizer split and brute-forcing the base residue forms; this covers
/// every isotropic form whose entries are canonical class representatives.
/// It then falls back to enumerating witness vectors whose coordinates are
/// monomials with exponents in [-degree_bound, degree_bound], up to
/// `budget` candidates. Certificates are always re-verified by exact
/// arithmetic before being returned.
pub fn witness_search(
    tower: &Tower,
    q: &ClassForm,
    degree_bound: i64,
    budget: u64,
) -> Result<SearchResult, Error> {
    if tower.r() == 0 {
        return Err(Error::Unsupported(
            "witness_search needs at least one Laurent layer; use fp_isotropy_witness".into(),
        ));
    }
    if q.dim() < 2 {
        return Err(Error::DimensionTooSmall {
            needed: 2,
            got: q.dim(),
        });
    }
    if degree_bound < 0 {
        return Err(Error::Unsupported("degree_bound must be non-negative".into()));
    }
    if let Some(witness) = exact_witness(tower, q)? {
        let cert = certificate_for(tower, q, witness)
            .expect("assembled exact zero must certify");
        debug_assert!(verify_certificate(tower, q, &cert));
        return Ok(SearchResult::Found(cert));
    }
    bounded_search(tower, q, degree_bound, budget)
}

/// Assembles an exact zero by Springer descent: pick a residue form with an
/// isotropic base leaf (decided by brute force, not by the engine's residue
/// rules), lift its witness as constants in the outer uniformizer, and zero
/// the complementary coordinates.
fn exact_witness(tower: &Tower, q: &ClassForm) -> Result<Option<Vec<LaurentElement>>, Error> {
    let r = tower.r();
    let p = tower.p();
    if r == 0 {
        let found = fp_isotropy_witness(p, q)?;
        return Ok(found.map(|w| {
            w.into_iter()
                .map(|c| LaurentElement::constant(0, c, p))
                .collect()
        }));
    }
    let bit = 1u32 << r;
    let residue_tower = tower.residue();
    for keep_bit in [0u32, bit] {
        let indices: Vec<usize> = q
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.bits() & bit == keep_bit)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            continue;
        }
        let residue_entries: Vec<SquareClass> = indices
            .iter()
            .map(|&i| SquareClass::from_bits(q.entries()[i].bits() & !bit))
            .collect();
        let residue_form = ClassForm::new(residue_entries).expect("non-empty");
        if let Some(w) = exact_witness(&residue_tower, &residue_form)? {
            let mut witness = vec![LaurentElement::zero(r as usize); q.dim()];
            for (slot, inner) in indices.iter().zip(w) {
                witness[*slot] = inner.promote();
            }
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

fn bounded_search(
    tower: &Tower,
    q: &ClassForm,
    degree_bound: i64,
    budget: u64,
) -> Result<SearchResult, Error> {
    let r = tower.r() as usize;
    let p = tower.p();
    // candidate coordinate values: 0 and c·t^e monomials within the bound
    let mut pool = vec![LaurentElement::zero(r)];
    let mut exps = vec![-degree_bound; r];
    loop {
        for c in 1..p {
            pool.push(LaurentElement::monomial(r, exps.clone(), c, p));
        }
        let mut i = r;
        let mut carried = true;
        while carried && i > 0 {
            i -= 1;
            exps[i] += 1;
            if exps[i] <= degree_bound {
                carried = false;
            } else {
                exps[i] = -degree_bound;
            }
        }
        if carried {
            break;
        }
    }

    let dim = q.dim();
    let mut tried = 0u64;
    let mut odometer = vec![0usize; dim];
    loop {
        // advance first: skip the all-zero vector
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(SearchResult::NotFound {
                    reason: "bounded search space exhausted".into(),
                    candidates_tried: tried,
                });
            }
            i -= 1;
            odometer[i] += 1;
            if odometer[i] < pool.len() {
                break;
            }
            odometer[i] = 0;
        }
        tried += 1;
        if tried > budget {
            return Ok(SearchResult::NotFound {
                reason: format!("budget of {budget} candidates exhausted"),
                candidates_tried: tried - 1,
            });
        }
        let raw: Vec<LaurentElement> = odometer.iter().map(|&k| pool[k].clone()).collect();
        let witness = normalize_primitive(tower, raw);
        if let Some(cert) = certificate_for(tower, q, witness) {
            if verify_certificate(tower, q, &cert) {
                return Ok(SearchResult::Found(cert));
            }
        }
    }
}

/// Scales a vector by a power of the outermost uniformizer so the minimal
/// entry valuation is 0.
fn normalize_primitive(tower: &Tower, witness: Vec<LaurentElement>) -> Vec<LaurentElement> {
    let r = tower.r();
    let min = witness
        .iter()
        .filter(|w| !w.is_zero())
        .map(|w| w.valuation(r))
        .min();
    match min {
        Some(Val::Finite(m)) if m != 0 => witness
            .into_iter()
            .map(|w| if w.is_zero() { w } else { w.shift_outer(-m) })
            .collect(),
        _ => witness,
    }
}

// ---------------------------------------------------------------------------
// Cross-validation harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Exhaustive,
    Random { n: u64, seed: u64 },
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleMode::Exhaustive => write!(f, "exhaustive"),
            SampleMode::Random { n, seed } => write!(f, "random:{n}:{seed}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    CertifiedIsotropic,
    ConfirmedAnisotropic,
    Inconclusive,
}

impl fmt::Display for OracleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OracleOutcome::CertifiedIsotropic => "certified-isotropic",
            OracleOutcome::ConfirmedAnisotropic => "confirmed-anisotropic",
            OracleOutcome::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct ValidationRecord {
    pub form: ClassForm,
    pub engine_isotropic: bool,
    pub outcome: OracleOutcome,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationSummary {
    pub total: u64,
    pub certified_isotropic: u64,
    pub confirmed_anisotropic: u64,
    pub inconclusive: u64,
}

/// Outcome of a cross-validation run. By construction a report never holds
/// a contradiction record: a brute-force refutation of an engine decision
/// aborts the run with a hard error instead.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub tower: Tower,
    pub dims: (usize, usize),
    pub mode: SampleMode,
    pub records: Vec<ValidationRecord>,
}

impl ValidationReport {
    pub fn summary(&self) -> ValidationSummary {
        let mut s = ValidationSummary {
            total: self.records.len() as u64,
            ..Default::default()
        };
        for rec in &self.records {
            match rec.outcome {
                OracleOutcome::CertifiedIsotropic => s.certified_isotropic += 1,
                OracleOutcome::ConfirmedAnisotropic => s.confirmed_anisotropic += 1,
                OracleOutcome::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "validation tower={} dims={}..{} mode={}",
            self.tower, self.dims.0, self.dims.1, self.mode
        )?;
        for rec in &self.records {
            writeln!(
                f,
                "record form={} engine={} oracle={}",
                rec.form,
                if rec.engine_isotropic {
                    "isotropic"
                } else {
                    "anisotropic"
                },
                rec.outcome
            )?;
        }
        let s = self.summary();
        writeln!(
            f,
            "summary total={} certified-isotropic={} confirmed-anisotropic={} inconclusive={} contradictions=0",
            s.total, s.certified_isotropic, s.confirmed_anisotropic, s.inconclusive
        )
    }
}

/// Replays engine decisions against the oracles over all (or sampled)
/// forms with dimensions in `dims`.
///
/// Engine-isotropic forms must produce a verified certificate (else they
/// are recorded inconclusive). Engine-anisotropic forms are re-derived by
/// descending the uniformizer split to the base and brute-forcing every
/// non-empty residue leaf; a leaf witness would contradict the engine and
/// aborts with [`Error::Contradiction`]. Deterministic for a fixed seed.
pub fn cross_validate(
    tower: &Tower,
    dims: (usize, usize),
    mode: SampleMode,
    degree_bound: i64,
    budget: u64,
) -> Result<ValidationReport, Error> {
    let (lo, hi) = dims;
    if lo < 1 || hi < lo {
        return Err(Error::Unsupported(format!("bad dimension range {lo}..{hi}")));
    }
    let forms = collect_forms(tower, lo, hi, mode)?;
    let mut records = Vec::with_capacity(forms.len());
    for form in forms {
        let engine_isotropic = tower.is_isotropic(&form);
        let outcome = if engine_isotropic {
            certify_isotropic(tower, &form, degree_bound, budget)?
        } else {
            confirm_anisotropic(tower, &form)?
        };
        records.push(ValidationRecord {
            form,
            engine_isotropic,
            outcome,
        });
    }
    Ok(ValidationReport {
        tower: *tower,
        dims,
        mode,
        records,
    })
}

fn collect_forms(
    tower: &Tower,
    lo: usize,
    hi: usize,
    mode: SampleMode,
) -> Result<Vec<ClassForm>, Error> {
    let classes = tower.class_count();
    let mut forms = Vec::new();
    match mode {
        SampleMode::Exhaustive => {
            let total: u128 = (lo..=hi).map(|d| multiset_count(classes as u128, d)).sum();
            if total > DEFAULT_FORM_BUDGET as u128 {
                return Err(Error::BudgetExceeded {
                    what: format!("{total} forms to enumerate, over the {DEFAULT_FORM_BUDGET} cap"),
                });
            }
            for d in lo..=hi {
                for_each_multiset(classes, d, &mut |bits| {
                    let entries = bits.iter().map(|&b| SquareClass::from_bits(b)).collect();
                    forms.push(ClassForm::new(entries).expect("d >= 1"));
                    false
                });
            }
        }
        SampleMode::Random { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let d = rng.gen_range(lo..=hi);
                let entries = (0..d)
                    .map(|_| SquareClass::from_bits(rng.gen_range(0..classes)))
                    .collect();
                forms.push(ClassForm::new(entries).expect("d >= 1"));
            }
        }
    }
    Ok(forms)
}

fn certify_isotropic(
    tower: &Tower,
    form: &ClassForm,
    degree_bound: i64,
    budget: u64,
) -> Result<OracleOutcome, Error> {
    if tower.r() == 0 {
        let Some(witness) = fp_isotropy_witness(tower.p(), form)? else {
            return Ok(OracleOutcome::Inconclusive);
        };
        let witness: Vec<LaurentElement> = witness
            .into_iter()
            .map(|c| LaurentElement::constant(0, c, tower.p()))
            .collect();
        let Some(cert) = certificate_for(tower, form, witness) else {
            return Ok(OracleOutcome::Inconclusive);
        };
        return Ok(if verify_certificate(tower, form, &cert) {
            OracleOutcome::CertifiedIsotropic
        } else {
            OracleOutcome::Inconclusive
        });
    }
    if form.dim() < 2 {
        // dim-1 forms are never isotropic; the engine cannot say otherwise
        return Ok(OracleOutcome::Inconclusive);
    }
    match witness_search(tower, form, degree_bound, budget)? {
        SearchResult::Found(cert) => Ok(if verify_certificate(tower, form, &cert) {
            OracleOutcome::CertifiedIsotropic
        } else {
            OracleOutcome::Inconclusive
        }),
        SearchResult::NotFound { .. } => Ok(OracleOutcome::Inconclusive),
    }
}

fn confirm_anisotropic(tower: &Tower, form: &ClassForm) -> Result<OracleOutcome, Error> {
    let mut leaves = Vec::new();
    springer_leaves(tower.r(), form.entries().iter().map(|c| c.bits()).collect(), &mut leaves);
    for leaf in leaves {
        if leaf.is_empty() {
            continue; // an empty residue part is anisotropic by convention
        }
        let leaf_form = ClassForm::new(
            leaf.iter().map(|&b| SquareClass::from_bits(b)).collect(),
        )
        .expect("non-empty");
        if let Some(w) = fp_isotropy_witness(tower.p(), &leaf_form)? {
            return Err(Error::Contradiction {
                form: form.to_string(),
                detail: format!(
                    "engine claims anisotropic, but base residue form {leaf_form} has isotropic vector {w:?}"
                ),
            });
        }
    }
    Ok(OracleOutcome::ConfirmedAnisotropic)
}

/// Number of multisets of size `d` over `c` symbols, saturating high.
fn multiset_count(c: u128, d: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..d as u128 {
        acc = acc.saturating_mul(c + i) / (i + 1);
    }
    acc
}

/// All base residue forms of the full uniformizer-split recursion (bit
/// patterns of depth r), empties included.
fn springer_leaves(r: u32, entries: Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if r == 0 {
        out.push(entries);
        return;
    }
    let bit = 1u32 << r;
    let unit: Vec<u32> = entries.iter().filter(|&&e| e & bit == 0).copied().collect();
    let uni: Vec<u32> = entries
        .iter()
        .filter(|&&e| e & bit != 0)
        .map(|&e| e & !bit)
        .collect();
    springer_leaves(r - 1, unit, out);
    springer_leaves(r - 1, uni, out);
}

// ---------------------------------------------------------------------------
