use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qae_bench::{ansatz_fixture, framed_images};
use qae_core::ansatz::AnsatzFamily;
use qae_core::circuit::{apply, apply_to_density};
use qae_core::descriptors::{entangling_capability, expressibility, DescriptorConfig};
use qae_core::quantum::{fidelity, partial_trace, pure_density, QubitSubset};

const FAMILIES: [AnsatzFamily; 3] = [
    AnsatzFamily::Circuit1,
    AnsatzFamily::Circuit2,
    AnsatzFamily::Circuit3,
];

fn statevector(c: &mut Criterion) {
    let input = framed_images(1).remove(0).state;
    let mut group = c.benchmark_group("apply");
    for family in FAMILIES {
        for layers in [3, 7] {
            let (circuit, theta) = ansatz_fixture(family, 4, layers);
            group.bench_with_input(BenchmarkId::new(family.name(), layers), &layers, |b, _| {
                b.iter(|| apply(&circuit, black_box(&theta), black_box(&input)).unwrap())
            });
        }
    }
    group.finish();
}

fn density(c: &mut Criterion) {
    let state = framed_images(4).remove(3).state;
    let rho = pure_density(&state);
    let (circuit, theta) = ansatz_fixture(AnsatzFamily::Circuit3, 4, 3);
    let trash = QubitSubset::highest(2, 4).unwrap();
    c.bench_function("apply_to_density/circuit3-L3", |b| {
        b.iter(|| apply_to_density(&circuit, black_box(&theta), black_box(&rho)).unwrap())
    });
    c.bench_function("partial_trace/4to2", |b| {
        b.iter(|| partial_trace(black_box(&rho), &trash).unwrap())
    });
    let sigma = apply_to_density(&circuit, &theta, &rho).unwrap();
    c.bench_function("fidelity/uhlmann-16", |b| {
        b.iter(|| fidelity(black_box(&rho), black_box(&sigma)).unwrap())
    });
}

fn descriptors(c: &mut Criterion) {
    let config = DescriptorConfig {
        num_samples: 500,
        num_bins: 40,
        seed: 0,
    };
    let mut group = c.benchmark_group("descriptors");
    group.sample_size(10);
    for family in FAMILIES {
        let (circuit, _) = ansatz_fixture(family, 4, 3);
        group.bench_function(BenchmarkId::new("expressibility", family.name()), |b| {
            b.iter(|| expressibility(&circuit, &config).unwrap())
        });
        group.bench_function(BenchmarkId::new("entangling", family.name()), |b| {
            b.iter(|| entangling_capability(&circuit, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, statevector, density, descriptors);
criterion_main!(benches);
