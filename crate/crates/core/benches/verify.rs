//! Benchmarks of the heavy verification kernels.
//!
//! The `sweep/*` pair contrasts the parallel and sequential execution paths
//! of the same workload inside one run (the library's internal sweeps use the
//! parallel path when the default `parallel` feature is on). To measure the
//! whole library sequentially, rerun with `--no-default-features`; criterion
//! baselines make the comparison:
//!
//! ```text
//! cargo bench -p qpb-core -- --save-baseline parallel
//! cargo bench -p qpb-core --no-default-features -- --baseline parallel
//! ```

use criterion::{criterion_group, criterion_main, Criterion};

use qpb_core::dunkl::{commutator_check, dunkl_directional, Multiplicity};
use qpb_core::envelope::Envelope;
use qpb_core::fodc::reflection_fodc;
use qpb_core::group::FiniteGroup;
use qpb_core::hopf::HopfAlgebra;
use qpb_core::poly::Poly;
use qpb_core::roots::RootSystem;
use qpb_core::scalar::Scalar;

fn bench_hopf_axioms(c: &mut Criterion) {
    let s3 = HopfAlgebra::function_algebra(FiniteGroup::s3()).unwrap();
    let d4 = HopfAlgebra::function_algebra(FiniteGroup::d4()).unwrap();
    c.bench_function("hopf_axioms/s3", |b| {
        b.iter(|| {
            assert!(s3.verify_axioms().iter().all(|c| c.passed));
        })
    });
    c.bench_function("hopf_axioms/d4", |b| {
        b.iter(|| {
            assert!(d4.verify_axioms().iter().all(|c| c.passed));
        })
    });
}

fn bench_envelope_laws(c: &mut Criterion) {
    let w = FiniteGroup::s3();
    let f = reflection_fodc(&w, &FiniteGroup::s3_reflections(&w)).unwrap();
    let env = Envelope::new(f, 3).unwrap();
    let mut group = c.benchmark_group("envelope_laws");
    group.sample_size(10);
    group.bench_function("s3_degree3", |b| {
        b.iter(|| {
            assert!(env.verify_laws().iter().all(|c| c.passed));
        })
    });
    group.finish();
}

fn bench_dunkl_commutators(c: &mut Criterion) {
    let a2 = RootSystem::build('A', 2).unwrap();
    let kappa = Multiplicity::constant(&a2, Scalar::one());
    let xi: Vec<Scalar> = [1, 0, 0].iter().map(|&v| Scalar::from_int(v)).collect();
    let eta: Vec<Scalar> = [0, 1, -1].iter().map(|&v| Scalar::from_int(v)).collect();
    let mut group = c.benchmark_group("dunkl_commute");
    group.sample_size(10);
    group.bench_function("a2_degree5", |b| {
        b.iter(|| {
            assert!(commutator_check(&a2, &kappa, &xi, &eta, 5).unwrap().passed);
        })
    });
    group.finish();
}

/// The same monomial sweep against the parallel and the always-sequential
/// executors, contrasted within one run.
fn bench_sweep_modes(c: &mut Criterion) {
    let a2 = RootSystem::build('A', 2).unwrap();
    let kappa = Multiplicity::constant(&a2, Scalar::one());
    let xi: Vec<Scalar> = [1, 0, 0].iter().map(|&v| Scalar::from_int(v)).collect();
    let eta: Vec<Scalar> = [0, 0, 1].iter().map(|&v| Scalar::from_int(v)).collect();
    // all monomials in three variables up to total degree 5
    let mut monos = Vec::new();
    for a in 0..=5u16 {
        for b in 0..=5u16 {
            for d in 0..=5u16 {
                if a + b + d <= 5 {
                    monos.push(Poly::monomial(3, &[a, b, d], Scalar::one()));
                }
            }
        }
    }
    let commutes = |f: &Poly| -> bool {
        let ab = dunkl_directional(
            &a2,
            &kappa,
            &xi,
            &dunkl_directional(&a2, &kappa, &eta, f).unwrap(),
        )
        .unwrap();
        let ba = dunkl_directional(
            &a2,
            &kappa,
            &eta,
            &dunkl_directional(&a2, &kappa, &xi, f).unwrap(),
        )
        .unwrap();
        ab == ba
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let results = qpb_core::exec::map(&monos, |f| commutes(f));
            assert!(results.into_iter().all(|ok| ok));
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let results = qpb_core::exec::map_seq(&monos, |f| commutes(f));
            assert!(results.into_iter().all(|ok| ok));
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_hopf_axioms,
    bench_envelope_laws,
    bench_dunkl_commutators,
    bench_sweep_modes
);
criterion_main!(benches);
