//! Full relation sweep from a cold cache, rayon against the plain loop.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use superw::exec::Mode;
use superw::verify::verify_all_relations;
use superw::{Pyramid, ShiftMatrix, ZeroOneSequence};

fn triple(ell: usize, ups: &str, shift: Vec<Vec<usize>>) -> Pyramid {
    Pyramid::from_triple(&ShiftMatrix::new(shift).unwrap(), ell, &ZeroOneSequence::parse(ups).unwrap()).unwrap()
}

fn relations(c: &mut Criterion) {
    let cases = [
        ("p1", triple(2, "01", vec![vec![0, 1], vec![0, 0]]), 5),
        ("c3", triple(3, "011", vec![vec![0, 1, 1], vec![0, 0, 0], vec![1, 1, 0]]), 4),
    ];
    let mut g = c.benchmark_group("relations");
    g.sample_size(10);
    for (name, p, bound) in &cases {
        for (label, mode) in [("parallel", Mode::Parallel), ("sequential", Mode::Sequential)] {
            g.bench_with_input(BenchmarkId::new(label, name), p, |b, p| {
                b.iter(|| {
                    let rep = verify_all_relations(p, None, *bound, mode).unwrap();
                    assert!(rep.all_pass());
                    rep
                })
            });
        }
    }
    g.finish();
}

criterion_group!(benches, relations);
criterion_main!(benches);
