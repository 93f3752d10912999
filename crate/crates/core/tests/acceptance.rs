//! Acceptance suite: one test per criterion, exact equality throughout.
//!
//! The suite pits the symbolic calculus against the concrete engine and
//! the brute-force oracles at desk scale: base facts over F_p, the CDVF
//! sumset law, the named m-invariants, the 1-local dichotomy, the
//! attainable AU landscapes, the layer calculus, and full Springer
//! cross-validation with certificate-backed isotropy decisions.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfi_core::descriptor::{AuSet, BaseClass, FieldDescriptor, InvariantValue};
use qfi_core::forms::{ClassForm, SquareClass, Tower};
use qfi_core::graphs::{ComponentField, Model, ReductionGraph};
use qfi_core::oracle::{self, OracleOutcome, SampleMode};
use qfi_core::{calculus, graphs};

const PRIMES: [u64; 4] = [3, 5, 7, 13];

fn tower(p: u64, r: u32) -> Tower {
    Tower::new(p, r).unwrap()
}

fn au_dims(t: &Tower) -> Vec<u64> {
    t.au_enumerate(None, 3).unwrap().dims.iter().collect()
}

fn assert_within(start: Instant, limit: Duration, what: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= limit,
        "{what} took {elapsed:?}, over the {limit:?} budget"
    );
}

#[test]
fn criterion_1_base_facts_by_brute_force() {
    let start = Instant::now();
    for p in PRIMES {
        let e = tower(p, 0).au_enumerate(None, 3).unwrap();
        assert_eq!(e.dims.iter().collect::<Vec<_>>(), vec![2], "AU(F_{p})");
        assert_eq!((e.m, e.u), (Some(2), Some(2)), "m(F_{p}) = u(F_{p}) = 2");
    }
    assert_within(start, Duration::from_secs(1), "criterion 1");
}

#[test]
fn criterion_2_sumset_law_across_laurent_layers() {
    let start = Instant::now();
    for p in PRIMES {
        let base: AuSet = au_dims(&tower(p, 0)).into_iter().collect();
        let one = au_dims(&tower(p, 1));
        assert_eq!(one, vec![4], "AU(F_{p}((t)))");
        assert_eq!(
            base.sumset().iter().collect::<Vec<_>>(),
            one,
            "enumerated AU at r=1 must be the sumset of r=0"
        );
        // and it matches the symbolic calculus on the CDVF descriptor
        let sym = calculus::au_set(&FieldDescriptor::cdvf(FieldDescriptor::base(
            BaseClass::Finite(p),
        )))
        .unwrap();
        assert_eq!(sym.iter().collect::<Vec<_>>(), one);
    }
    let one: AuSet = au_dims(&tower(3, 1)).into_iter().collect();
    let two = au_dims(&tower(3, 2));
    assert_eq!(two, vec![8], "AU(F_3((t1))((t2)))");
    assert_eq!(one.sumset().iter().collect::<Vec<_>>(), two);
    assert_within(start, Duration::from_secs(30), "criterion 2");
}

#[test]
fn criterion_3_named_m_invariants() {
    let start = Instant::now();
    let m = |f: &FieldDescriptor| calculus::m_invariant(f).unwrap();
    for p in PRIMES {
        let qpx = FieldDescriptor::rational_fn_field(FieldDescriptor::cdvf(
            FieldDescriptor::base(BaseClass::Finite(p)),
        ));
        assert_eq!(m(&qpx), InvariantValue::Finite(8));
    }
    let kxyz = FieldDescriptor::rational_fn_field(FieldDescriptor::cdvf(
        FieldDescriptor::rational_fn_field(FieldDescriptor::base(BaseClass::AlgebraicallyClosed)),
    ));
    assert_eq!(m(&kxyz), InvariantValue::Finite(8));
    for r in 1..=4u32 {
        let f = FieldDescriptor::rational_fn_field(FieldDescriptor::cdvf_tower(
            FieldDescriptor::base(BaseClass::Finite(3)),
            r,
        ));
        assert_eq!(m(&f), InvariantValue::Finite(1 << (r + 2)), "r = {r}");
    }
    assert_within(start, Duration::from_secs(1), "criterion 3");
}

#[test]
fn criterion_4_one_local_au_dichotomy() {
    let start = Instant::now();
    let cases = [
        (BaseClass::Finite(5), true, vec![8u64]),
        (BaseClass::Finite(5), false, vec![2, 8]),
        (BaseClass::AlgebraicallyClosed, true, vec![4]),
        (BaseClass::AlgebraicallyClosed, false, vec![2, 4]),
    ];
    for (base, tree, expect) in cases {
        let f = FieldDescriptor::semi_global(
            FieldDescriptor::cdvf(FieldDescriptor::base(base)),
            Model::with_tree_flag(tree, vec![ComponentField::Leaf, ComponentField::Leaf]),
        );
        let au = calculus::au_set(&f).unwrap();
        assert_eq!(au.iter().collect::<Vec<_>>(), expect, "tree={tree} base={base}");
        // 2 belongs to AU exactly when the graph is not a tree
        assert_eq!(au.contains(2), !tree);
    }
    assert_within(start, Duration::from_secs(1), "criterion 4");
}

#[test]
fn criterion_5_attainable_au_landscapes() {
    let start = Instant::now();
    let to_sets = |raw: &[&[u64]]| -> BTreeSet<AuSet> {
        raw.iter()
            .map(|s| s.iter().copied().collect::<AuSet>())
            .collect()
    };

    let got = graphs::attainable_au(2, BaseClass::Finite(3)).unwrap();
    let expect = to_sets(&[
        &[16],
        &[2, 16],
        &[4, 10, 16],
        &[2, 4, 10, 16],
    ]);
    assert_eq!(got, expect, "four AU sets over a 2-local finite tower");

    let got = graphs::attainable_au(3, BaseClass::AlgebraicallyClosed).unwrap();
    let expect = to_sets(&[
        &[16],
        &[4, 10, 16],
        &[8, 10, 12, 14, 16],
        &[4, 8, 10, 12, 14, 16],
        &[4, 6, 8, 10, 12, 14, 16],
        &[2, 16],
        &[2, 4, 10, 16],
        &[2, 8, 10, 12, 14, 16],
        &[2, 4, 8, 10, 12, 14, 16],
        &[2, 4, 6, 8, 10, 12, 14, 16],
    ]);
    assert_eq!(
        got, expect,
        "ten AU sets over a 3-local algebraically closed tower"
    );
    assert_within(start, Duration::from_secs(5), "criterion 5");
}

/// A random valid model over an n-local tower; nesting only descends while
/// the residue stays Cdvf-shaped.
fn random_model(rng: &mut ChaCha8Rng, depth: u32) -> Model {
    let s = rng.gen_range(1..=3);
    let components: Vec<ComponentField> = (0..s)
        .map(|_| {
            if depth >= 2 && rng.gen_bool(0.45) {
                ComponentField::Nested(random_model(rng, depth - 1))
            } else if rng.gen_bool(0.5) {
                ComponentField::Leaf
            } else {
                ComponentField::RationalLeaf
            }
        })
        .collect();
    let tree = rng.gen_bool(0.5);
    if rng.gen_bool(0.3) {
        let graph = if tree {
            ReductionGraph::component_path(s)
        } else {
            ReductionGraph::component_cycle(s)
        };
        Model::with_graph(graph, components)
    } else {
        Model::with_tree_flag(tree, components)
    }
}

#[test]
fn criterion_6_layer_calculus() {
    let start = Instant::now();
    let bases = [BaseClass::AlgebraicallyClosed, BaseClass::Finite(3)];

    for n in 1..=4 {
        for j in 1..=n {
            for base in bases {
                let f = graphs::make_layer_example(n, j, base).unwrap();
                assert!(f.validate().ok());
                assert_eq!(
                    graphs::layer(&f).unwrap(),
                    InvariantValue::Finite(j as u64),
                    "layer(n={n}, j={j}, {base})"
                );
                assert_eq!(
                    graphs::m_from_layer(&f).unwrap(),
                    InvariantValue::Finite(1 << j),
                    "m(n={n}, j={j}, {base})"
                );
            }
        }
    }

    // fully arboreal chains: a single rational component at every level
    for n in 1..=4u32 {
        let mut model = Model::with_tree_flag(true, vec![ComponentField::RationalLeaf]);
        for _ in 1..n {
            model = Model::with_tree_flag(true, vec![ComponentField::Nested(model)]);
        }
        for (base, expect) in [
            (BaseClass::AlgebraicallyClosed, 1u64 << (n + 1)),
            (BaseClass::Finite(3), 1 << (n + 2)),
        ] {
            let f = FieldDescriptor::semi_global(
                FieldDescriptor::cdvf_tower(FieldDescriptor::base(base), n),
                model.clone(),
            );
            assert_eq!(graphs::layer(&f).unwrap(), InvariantValue::Infinite);
            assert_eq!(
                graphs::m_from_layer(&f).unwrap(),
                InvariantValue::Finite(expect)
            );
            assert_eq!(calculus::m_invariant(&f).unwrap(), InvariantValue::Finite(expect));
        }
    }

    // the layer route agrees with the AU-minimum route on random descriptors
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for n in 1..=3 {
        for base in bases {
            for i in 0..200 {
                let f = FieldDescriptor::semi_global(
                    FieldDescriptor::cdvf_tower(FieldDescriptor::base(base), n),
                    random_model(&mut rng, n),
                );
                assert!(f.validate().ok(), "generated descriptor must be valid");
                assert_eq!(
                    graphs::m_from_layer(&f).unwrap(),
                    calculus::m_invariant(&f).unwrap(),
                    "n={n} base={base} sample={i}: {f}"
                );
            }
        }
    }
    assert_within(start, Duration::from_secs(10), "criterion 6");
}

#[test]
fn criterion_7_possible_m_matches_attainable_minima() {
    let start = Instant::now();
    for n in 1..=3 {
        for base in [BaseClass::AlgebraicallyClosed, BaseClass::Finite(3)] {
            let minima: BTreeSet<u64> = graphs::attainable_au(n, base)
                .unwrap()
                .iter()
                .map(|u| u.min_dim().expect("attainable sets are non-empty"))
                .collect();
            let possible = calculus::possible_m(n, base).unwrap();
            assert_eq!(minima, possible, "n={n} base={base}");
        }
    }
    assert_within(start, Duration::from_secs(5), "criterion 7");
}

#[test]
fn criterion_8_springer_cross_validation() {
    let start = Instant::now();

    let t31 = tower(3, 1);
    let report = oracle::cross_validate(&t31, (1, 4), SampleMode::Exhaustive, 2, 200_000).unwrap();
    let summary = report.summary();
    assert!(summary.total > 0);
    // every engine isotropy decision is certificate-backed
    for rec in &report.records {
        if rec.engine_isotropic {
            assert_eq!(
                rec.outcome,
                OracleOutcome::CertifiedIsotropic,
                "uncertified isotropic decision on {}",
                rec.form
            );
        } else {
            assert_eq!(rec.outcome, OracleOutcome::ConfirmedAnisotropic);
        }
    }

    let t51 = tower(5, 1);
    let mode = SampleMode::Random { n: 1000, seed: 42 };
    let report = oracle::cross_validate(&t51, (1, 5), mode, 2, 200_000).unwrap();
    let summary = report.summary();
    assert_eq!(summary.total, 1000);
    let decided = summary.certified_isotropic + summary.confirmed_anisotropic;
    assert!(
        decided * 100 >= summary.total * 95,
        "at least 95% of sampled forms must be certified or confirmed, got {decided}/1000"
    );
    assert_within(start, Duration::from_secs(60), "criterion 8");
}

#[test]
fn criterion_9_property_suites() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7_071);

    // scaling and permutation invariance, 500 random cases per tower
    for p in PRIMES {
        for r in 0..=2u32 {
            let t = tower(p, r);
            let classes = t.class_count();
            for _ in 0..500 {
                let dim = rng.gen_range(1..=(classes as usize + 1));
                let entries: Vec<SquareClass> = (0..dim)
                    .map(|_| SquareClass::from_bits(rng.gen_range(0..classes)))
                    .collect();
                let q = ClassForm::new(entries.clone()).unwrap();
                let a = SquareClass::from_bits(rng.gen_range(0..classes));
                let scaled = q.scaled(a);
                let mut shuffled = entries;
                shuffled.shuffle(&mut rng);
                let permuted = ClassForm::new(shuffled).unwrap();

                let iso = t.is_isotropic(&q);
                assert_eq!(iso, t.is_isotropic(&scaled), "scaling, p={p} r={r} q={q}");
                assert_eq!(iso, t.is_isotropic(&permuted), "permutation, p={p} r={r} q={q}");
                let uni = t.is_universal(&q);
                assert_eq!(uni, t.is_universal(&scaled), "scaling, p={p} r={r} q={q}");
                assert_eq!(uni, t.is_universal(&permuted), "permutation, p={p} r={r} q={q}");
                // isotropic regular forms of dim >= 2 are universal
                if iso && dim >= 2 {
                    assert!(uni, "isotropic implies universal, p={p} r={r} q={q}");
                }
            }
        }
    }

    // residue-form law, exhaustively at r = 1 for dims <= 6: q = q1 ⟂ t·q2
    // is anisotropic and universal iff both residue forms are non-empty,
    // anisotropic and universal. The residue side is decided by brute force.
    for p in [3u64, 5] {
        let t = tower(p, 1);
        for d in 1..=6usize {
            qfi_core::forms::for_each_multiset(t.class_count(), d, &mut |bits| {
                let q = ClassForm::new(
                    bits.iter().map(|&b| SquareClass::from_bits(b)).collect(),
                )
                .unwrap();
                let left = t.is_anisotropic_universal(&q);

                let resid = |want_odd: bool| -> Option<ClassForm> {
                    let entries: Vec<SquareClass> = bits
                        .iter()
                        .filter(|&&b| (b & 0b10 != 0) == want_odd)
                        .map(|&b| SquareClass::from_bits(b & 0b01))
                        .collect();
                    ClassForm::new(entries).ok()
                };
                let right = match (resid(false), resid(true)) {
                    (Some(q1), Some(q2)) => [q1, q2].iter().all(|qr| {
                        let aniso =
                            oracle::fp_isotropy_witness(p, qr).unwrap().is_none();
                        let universal =
                            oracle::fp_image(p, qr).unwrap().len() as u64 == p - 1;
                        aniso && universal
                    }),
                    _ => false,
                };
                assert_eq!(left, right, "residue law, p={p} q={q}");
                false
            });
        }
    }

    // m is never 3 or 5, and the power-of-two sandwich m <= 2^floor(log2 u) <= u,
    // across every field this suite computes
    let mut corpus: Vec<FieldDescriptor> = Vec::new();
    for p in PRIMES {
        corpus.push(FieldDescriptor::base(BaseClass::Finite(p)));
    }
    corpus.push(FieldDescriptor::base(BaseClass::AlgebraicallyClosed));
    for r in 1..=4u32 {
        corpus.push(FieldDescriptor::cdvf_tower(
            FieldDescriptor::base(BaseClass::Finite(3)),
            r,
        ));
        corpus.push(FieldDescriptor::rational_fn_field(FieldDescriptor::cdvf_tower(
            FieldDescriptor::base(BaseClass::Finite(5)),
            r,
        )));
    }
    for n in 1..=4 {
        for j in 1..=n {
            for base in [BaseClass::AlgebraicallyClosed, BaseClass::Finite(7)] {
                corpus.push(graphs::make_layer_example(n, j, base).unwrap());
            }
        }
    }
    for n in 1..=3 {
        for base in [BaseClass::AlgebraicallyClosed, BaseClass::Finite(13)] {
            for _ in 0..50 {
                corpus.push(FieldDescriptor::semi_global(
                    FieldDescriptor::cdvf_tower(FieldDescriptor::base(base), n),
                    random_model(&mut rng, n),
                ));
            }
        }
    }
    for f in &corpus {
        let m = calculus::m_invariant(f).unwrap().finite().unwrap();
        let u = calculus::u_invariant(f).unwrap().finite().unwrap();
        assert!(m != 3 && m != 5, "m({f}) = {m}");
        assert!(u != 3 && u != 5, "u({f}) = {u}");
        let pow = 1u64 << u.ilog2();
        assert!(m <= pow && pow <= u, "sandwich fails for {f}: m={m} u={u}");
    }
    // concrete towers too
    for p in PRIMES {
        for r in 0..=2u32 {
            let e = tower(p, r).au_enumerate(None, 3).unwrap();
            let m = e.m.unwrap();
            let u = e.u.unwrap();
            assert!(m != 3 && m != 5);
            let pow = 1u64 << u.ilog2();
            assert!(m <= pow && pow <= u);
        }
    }
    assert_within(start, Duration::from_secs(30), "criterion 9");
}
