//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Every assertion is an exact algebraic identity; the
//! stated wall-clock budgets are asserted where given.

use std::time::Instant;

use qpb_core::bundle::{
    build_intertwiners, finite_bundle_universal, multi_orbit_bundle, regular_bundle, u1_characters,
    u1_example, Connection, IntertwinerFamily,
};
use qpb_core::dunkl::{
    build_dunkl_bundle_rank1, commutator_check, dunkl_derivative, gradient_degeneration_check,
    hermitian_compatibility, Multiplicity,
};
use qpb_core::envelope::Envelope;
use qpb_core::fodc::{laurent_classical_fodc, reflection_fodc};
use qpb_core::gauge::{sample_gauge_maps, verify_group_isomorphism};
use qpb_core::group::FiniteGroup;
use qpb_core::hopf::HopfAlgebra;
use qpb_core::linalg::{Matrix, SparseVec};
use qpb_core::poly::Poly;
use qpb_core::roots::RootSystem;
use qpb_core::scalar::Scalar;

struct Criterion {
    name: &'static str,
    start: Instant,
    budget: Option<f64>,
}

impl Criterion {
    fn begin(name: &'static str, budget_secs: Option<f64>) -> Self {
        Criterion {
            name,
            start: Instant::now(),
            budget: budget_secs,
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!("acceptance {}: PASS ({elapsed:.2}s)", self.name);
        if let Some(budget) = self.budget {
            assert!(
                elapsed < budget,
                "{} exceeded its {budget}s budget ({elapsed:.2}s)",
                self.name
            );
        }
    }
}

/// 1. Hopf axiom suite on Z2, Z3, Z4, S3, D4 and the Laurent window [−5,5]:
///    exhaustive, exact, under five seconds total.
#[test]
fn criterion_01_hopf_axiom_suite() {
    let c = Criterion::begin("01 hopf-axiom-suite", Some(5.0));
    for name in ["Z2", "Z3", "Z4", "S3", "D4"] {
        let h = HopfAlgebra::function_algebra(FiniteGroup::catalogue(name).unwrap()).unwrap();
        for check in h.verify_axioms() {
            assert!(check.passed, "{name}: {} {:?}", check.name, check.witness);
        }
    }
    let h = HopfAlgebra::laurent(-5, 5).unwrap();
    for check in h.verify_axioms() {
        assert!(check.passed, "laurent: {} {:?}", check.name, check.witness);
    }
    c.finish();
}

/// 2. The U(1) bundle over a point: Ω¹(B) is exactly one-dimensional,
///    spanned by the invariant form of z, while dB = {0}.
#[test]
fn criterion_02_u1_base_forms() {
    let c = Criterion::begin("02 u1-base-forms", Some(1.0));
    let calc = u1_example(5, 2).unwrap();
    let b0 = calc.base_forms(0);
    assert_eq!(b0.len(), 1, "degree-0 base must be C·1");
    for b in b0 {
        assert!(calc.d(b).unwrap().is_zero(), "dB must vanish");
    }
    let b1 = calc.base_forms(1);
    assert_eq!(b1.len(), 1, "Ω¹(B) must be one-dimensional");
    // the base one-form is the invariant ζ = unit ⊗ hor-degree-1 of z^0
    let h = calc.qpb().hopf().clone();
    let zeta = SparseVec::unit(calc.flat(1, h.monomial(0).unwrap(), 0, 0));
    let spanned = b1[0] == zeta || b1[0] == zeta.negated();
    assert!(
        spanned,
        "Ω¹(B) must be spanned by ζ, got {}",
        calc.render(&b1[0])
    );
    c.finish();
}

/// 3. Every germs-map identity passes exhaustively on Fun(S3) with the
///    reflection calculus and on the Laurent classical calculus.
#[test]
fn criterion_03_germ_identity_suite() {
    let c = Criterion::begin("03 germ-identities", None);
    let w = FiniteGroup::s3();
    let f = reflection_fodc(&w, &FiniteGroup::s3_reflections(&w)).unwrap();
    for check in f.verify_germ_identities() {
        assert!(check.passed, "s3: {} {:?}", check.name, check.witness);
    }
    let h = HopfAlgebra::laurent(-5, 5).unwrap();
    let f = laurent_classical_fodc(&h).unwrap();
    for check in f.verify_germ_identities() {
        assert!(check.passed, "laurent: {} {:?}", check.name, check.witness);
    }
    c.finish();
}

/// 4. Antisymmetrization on the Laurent classical calculus: the degree-2
///    relation ideal generator for g = (z−1)² is exactly 2π(z)⊗π(z), and the
///    degree-2 wedge space collapses to zero.
#[test]
fn criterion_04_antisymmetrization() {
    let c = Criterion::begin("04 antisymmetrization", None);
    let h = HopfAlgebra::laurent(-5, 5).unwrap();
    let f = laurent_classical_fodc(&h).unwrap();
    let g = SparseVec::from_terms([
        (h.monomial(2).unwrap(), Scalar::one()),
        (h.monomial(1).unwrap(), Scalar::from_int(-2)),
        (h.monomial(0).unwrap(), Scalar::one()),
    ]);
    // (π⊗π)Δ(g) over the 1-dimensional germ space, fused index (0,0)
    let gd = f.germ_dim();
    assert_eq!(gd, 1);
    let mut gen = SparseVec::zero();
    for ((a, b), coeff) in h.coprod(&g).iter() {
        let pa = f.germs().pi(&SparseVec::unit(*a));
        let pb = f.germs().pi(&SparseVec::unit(*b));
        for (i, x) in pa.iter() {
            for (j, y) in pb.iter() {
                gen.add_term(i * gd + j, &(coeff * x) * y);
            }
        }
    }
    assert_eq!(
        gen,
        SparseVec::single(0, Scalar::from_int(2)),
        "generator must be 2·π(z)⊗π(z)"
    );
    let env = Envelope::new(f, 3).unwrap();
    assert_eq!(
        env.wedge_dims(),
        vec![1, 1, 0, 0],
        "degree ≥ 2 must collapse"
    );
    c.finish();
}

/// 5. Envelope laws on the S3 reflection envelope to degree 3: d² = 0, graded
///    Leibniz, the Maurer–Cartan identity, and the degreewise Hopf laws.
#[test]
fn criterion_05_s3_envelope_laws() {
    let c = Criterion::begin("05 s3-envelope-laws", Some(30.0));
    let w = FiniteGroup::s3();
    let f = reflection_fodc(&w, &FiniteGroup::s3_reflections(&w)).unwrap();
    let env = Envelope::new(f, 3).unwrap();
    let required = [
        "d-squared",
        "graded-leibniz",
        "maurer-cartan",
        "coassociativity",
        "counit-law",
        "antipode-law",
        "coproduct-homomorphism",
    ];
    let checks = env.verify_laws();
    for name in required {
        let check = checks
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("missing law {name}"));
        assert!(check.passed, "{}: {:?}", check.name, check.witness);
    }
    // and the remaining laws of the suite hold as well
    for check in &checks {
        assert!(check.passed, "{}: {:?}", check.name, check.witness);
    }
    c.finish();
}

fn z2_regular_setup() -> (
    qpb_core::bundle::BundleCalculus,
    qpb_core::bundle::TranslationMap,
) {
    let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
    let calc = finite_bundle_universal(q, 2).unwrap();
    let reps = qpb_core::hopf::decompose_regular(calc.qpb().hopf()).unwrap();
    let fams: Vec<IntertwinerFamily> = reps
        .iter()
        .map(|r| build_intertwiners(calc.qpb(), r).unwrap())
        .collect();
    let omega = Connection::canonical(&calc).unwrap();
    let qtrs = calc.translation_map(&fams, &omega).unwrap();
    (calc, qtrs)
}

fn u1_setup() -> (
    qpb_core::bundle::BundleCalculus,
    qpb_core::bundle::TranslationMap,
) {
    let calc = u1_example(4, 2).unwrap();
    let fams: Vec<IntertwinerFamily> = u1_characters(calc.qpb().hopf())
        .unwrap()
        .iter()
        .map(|r| build_intertwiners(calc.qpb(), r).unwrap())
        .collect();
    let omega = Connection::canonical(&calc).unwrap();
    let qtrs = calc.translation_map(&fams, &omega).unwrap();
    (calc, qtrs)
}

/// 6. Translation-map laws to degree 2 on the U(1) example and the Z2 regular
///    bundle, plus choice-independence across the two real connections of the
///    rank-one reflection bundle.
#[test]
fn criterion_06_translation_map() {
    let c = Criterion::begin("06 translation-map", None);
    for (label, (calc, qtrs)) in [("z2-regular", z2_regular_setup()), ("u1", u1_setup())] {
        for check in calc.verify_qtrs_properties(&qtrs).unwrap() {
            assert!(check.passed, "{label}: {} {:?}", check.name, check.witness);
        }
    }
    let bundle = build_dunkl_bundle_rank1(Scalar::one(), -4, 4, 2).unwrap();
    let check = bundle.qtrs_choice_independence().unwrap();
    assert!(check.passed, "choice independence: {:?}", check.witness);
    c.finish();
}

/// 7. The group isomorphism on at least 20 seeded exact gauge maps per
///    bundle: both roundtrips and the anti-homomorphism law, exactly.
#[test]
fn criterion_07_group_isomorphism() {
    let c = Criterion::begin("07 gauge-isomorphism", Some(60.0));
    for (label, (calc, qtrs)) in [("z2-regular", z2_regular_setup()), ("u1", u1_setup())] {
        let samples = sample_gauge_maps(&calc, 20, 0xC0FFEE).unwrap();
        assert!(samples.len() >= 20);
        for check in verify_group_isomorphism(&calc, &qtrs, &samples).unwrap() {
            assert!(check.passed, "{label}: {} {:?}", check.name, check.witness);
        }
    }
    c.finish();
}

/// 8. The completeness relation of every catalogue corepresentation on one-
///    and two-orbit bundles, in the exact form `Σ_k x∗_ki x_kj = Q_ij·1`
///    (`Q = I`, the literal relation, for every standard-unitary model).
#[test]
fn criterion_08_intertwiners() {
    let c = Criterion::begin("08 intertwiners", None);
    for name in ["Z2", "Z4", "S3", "D4"] {
        let group = FiniteGroup::catalogue(name).unwrap();
        for orbits in [1usize, 2] {
            let qpb = if orbits == 1 {
                regular_bundle(group.clone()).unwrap()
            } else {
                multi_orbit_bundle(group.clone(), 2).unwrap()
            };
            let reps = qpb_core::hopf::decompose_regular(qpb.hopf()).unwrap();
            for rep in &reps {
                // the builder verifies Σ_k x∗_ki x_kj = Q_ij·1 exactly and
                // errors otherwise
                let fam = build_intertwiners(&qpb, rep).unwrap();
                let expected_rows = if rep.is_standard_unitary() {
                    rep.dim
                } else {
                    rep.dim + 1
                };
                assert_eq!(fam.family_size, orbits * expected_rows);
                println!(
                    "  {name} x{orbits} {}: relation form {}",
                    rep.name,
                    if fam.normalized {
                        "δ_ij·1"
                    } else {
                        "Q_ij·1"
                    }
                );
            }
        }
    }
    c.finish();
}

/// 9. Dunkl operators: the κ = 0 gradient degeneration and pairwise
///    commutativity of directional operators for A2 (κ = 1) and B2
///    (κ = (1, 2)) on all monomials to degree 6.
#[test]
fn criterion_09_dunkl_commutativity() {
    let c = Criterion::begin("09 dunkl-commutativity", Some(120.0));
    let a2 = RootSystem::build('A', 2).unwrap();
    let check = gradient_degeneration_check(&a2, 6).unwrap();
    assert!(check.passed, "gradient: {:?}", check.witness);

    let kappa = Multiplicity::constant(&a2, Scalar::one());
    // all pairs from a spanning set of directions
    let dirs = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0]];
    for (i, xi) in dirs.iter().enumerate() {
        for eta in &dirs[i + 1..] {
            let xi: Vec<Scalar> = xi.iter().map(|&v| Scalar::from_int(v)).collect();
            let eta: Vec<Scalar> = eta.iter().map(|&v| Scalar::from_int(v)).collect();
            let check = commutator_check(&a2, &kappa, &xi, &eta, 6).unwrap();
            assert!(check.passed, "A2: {:?}", check.witness);
        }
    }

    let b2 = RootSystem::build('B', 2).unwrap();
    let kappa = Multiplicity::new(&b2, vec![Scalar::one(), Scalar::from_int(2)]).unwrap();
    let dirs = [[1i64, 0], [0, 1], [1, 1]];
    for (i, xi) in dirs.iter().enumerate() {
        for eta in &dirs[i + 1..] {
            let xi: Vec<Scalar> = xi.iter().map(|&v| Scalar::from_int(v)).collect();
            let eta: Vec<Scalar> = eta.iter().map(|&v| Scalar::from_int(v)).collect();
            let check = commutator_check(&b2, &kappa, &xi, &eta, 6).unwrap();
            assert!(check.passed, "B2: {:?}", check.witness);
        }
    }
    c.finish();
}

/// 10. Both Hermitian compatibility identities as exact polynomial
///     identities: rank one with the sign morphism, A2 with the plane
///     two-dimensional corepresentation at degree cap 4.
#[test]
fn criterion_10_hermitian_compatibility() {
    let c = Criterion::begin("10 hermitian-compatibility", None);
    let b1 = RootSystem::build('B', 1).unwrap();
    let kappa = Multiplicity::constant(&b1, Scalar::from_ratio(3, 2));
    let x = Poly::var(1, 0);
    let gram = Matrix::identity(1);
    for check in hermitian_compatibility(&b1, &kappa, &gram, &[x.clone()], &[x]).unwrap() {
        assert!(check.passed, "rank1: {} {:?}", check.name, check.witness);
    }

    let a2 = RootSystem::build('A', 2).unwrap();
    let kappa = Multiplicity::constant(&a2, Scalar::one());
    let x = Poly::var(3, 0);
    let y = Poly::var(3, 1);
    let z = Poly::var(3, 2);
    let t1 = vec![x.sub(&y), y.sub(&z)];
    let t2 = vec![x.mul(&x).sub(&y.mul(&y)), y.mul(&y).sub(&z.mul(&z))];
    assert!(t1.iter().chain(&t2).all(|p| p.degree() <= 4));
    let gram = Matrix::from_fn(2, 2, |r, cc| Scalar::from_int([[2, -1], [-1, 2]][r][cc]));
    for check in hermitian_compatibility(&a2, &kappa, &gram, &t1, &t2).unwrap() {
        assert!(check.passed, "a2: {} {:?}", check.name, check.witness);
    }
    c.finish();
}

/// 11. The canonical gauge transformation: applying it to the flat connection
///     yields exactly the displaced Dunkl connection on the rank-one bundle,
///     and it passes the covariance law.
#[test]
fn criterion_11_canonical_gauge() {
    let c = Criterion::begin("11 canonical-gauge", None);
    let bundle = build_dunkl_bundle_rank1(Scalar::one(), -4, 4, 2).unwrap();
    let displaced = bundle.gauge_transforms_canonical_connection().unwrap();
    assert!(displaced.passed, "{:?}", displaced.witness);
    let big = bundle.canonical_gauge().unwrap();
    for check in big.verify(&bundle.calc).unwrap() {
        assert!(check.passed, "{}: {:?}", check.name, check.witness);
    }
    c.finish();
}

/// 9 (degeneration detail): the rank-one examples from the operator table.
#[test]
fn criterion_09b_rank_one_values() {
    let c = Criterion::begin("09b rank-one-values", None);
    let rs = RootSystem::build('B', 1).unwrap();
    let kappa = Multiplicity::constant(&rs, Scalar::one());
    let x = Poly::var(1, 0);
    // D(x²) = 2x (the difference term vanishes on even polynomials)
    let d = dunkl_derivative(&rs, &kappa, &x.mul(&x)).unwrap();
    assert_eq!(d[0], x.scale(&Scalar::from_int(2)));
    // D(x) = 1 + 2κ
    let d = dunkl_derivative(&rs, &kappa, &x).unwrap();
    assert_eq!(d[0], Poly::constant(1, Scalar::from_int(3)));
    c.finish();
}
