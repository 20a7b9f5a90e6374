use criterion::{criterion_group, criterion_main, Criterion};
use formalpatch_core::par::Exec;
use formalpatch_core::patch::{make_config, pose_problem, solve, PatchProblem};
use formalpatch_core::surface::{BaseRing, PrimeData};
use formalpatch_core::tower::PresModule;
use formalpatch_core::{Field, FreeVec};

fn ideal_problem(depth: u32) -> PatchProblem {
    let b = BaseRing::new(Field::Rational, &["x", "y", "t"], &[], "t").unwrap();
    let r = b.ring().clone();
    let pd = PrimeData::validate(&b, vec![vec![r.parse("t").unwrap()]], vec![r.one()]).unwrap();
    let c = make_config(
        &b,
        &pd,
        &r.parse("y").unwrap(),
        &r.parse("x").unwrap(),
        depth,
    )
    .unwrap();
    let rel = vec![vec!["y", "-x"]];
    let m1 = PresModule::parse(c.r1().clone(), 2, &rel).unwrap();
    let m2 = PresModule::parse(c.r2().clone(), 2, &rel).unwrap();
    let m0 = PresModule::parse(c.r0().clone(), 2, &rel).unwrap();
    let id: Vec<FreeVec> = (0..2)
        .map(|j| FreeVec::unit(2, j, Field::Rational))
        .collect();
    pose_problem(&c, &m1, &m2, &m0, &id, &id, 1, Exec::Sequential).unwrap()
}

fn bench_solve(c: &mut Criterion) {
    let problem = ideal_problem(4);
    let mut group = c.benchmark_group("solve-ideal-depth4");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| solve(&problem, &[0, 1, 2, 3], exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solve);
criterion_main!(benches);
