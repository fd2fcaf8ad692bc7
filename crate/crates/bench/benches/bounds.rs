use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use frameforge::{
    build_sequence, frame_bounds, interleave_identity_construction, weighted_frame_verdict,
    FamilyName, MultiplierSpec, RunConfig, SequenceSpec, SizeRule, SymbolSpec,
};

fn gaussian(seed: u64) -> SequenceSpec {
    SequenceSpec::family(FamilyName::RandomGaussian {
        seed,
        dim: SizeRule::identity(),
        count: SizeRule::Linear { slope: 2, offset: 0 },
        complex: true,
    })
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame_bounds");
    for n in [16, 64, 256] {
        let seq = build_sequence(&gaussian(1), n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &seq, |b, seq| {
            b.iter(|| frame_bounds(black_box(seq)))
        });
    }
    group.finish();
}

fn verdict(c: &mut Criterion) {
    let spec = SequenceSpec::family(FamilyName::OnePlusEn);
    let config = RunConfig::default();
    c.bench_function("verdict/one_plus_en", |b| {
        b.iter(|| weighted_frame_verdict(black_box(&spec), &config).unwrap())
    });
}

fn interleave(c: &mut Criterion) {
    let spec = MultiplierSpec::new(SymbolSpec::constant(frameforge::linalg::real(0.5)), gaussian(2), gaussian(3));
    let mut group = c.benchmark_group("interleave");
    for n in [8, 32] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| interleave_identity_construction(black_box(&spec), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bounds, verdict, interleave);
criterion_main!(benches);
