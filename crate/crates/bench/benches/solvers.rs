use criterion::{criterion_group, criterion_main, Criterion};
use ctcsim_bench::{minus_input, reference_params};
use ctcsim_core::gates::fig1_unitary;
use ctcsim_core::{pctc_output, solve_deutsch, sweep, Grid, ParamGrids, SweepCircuit, SweepSpec};

fn bench_deutsch(c: &mut Criterion) {
    let (u, rho, d) = (fig1_unitary(), minus_input(), reference_params());
    c.bench_function("solve_deutsch_fig1", |b| b.iter(|| solve_deutsch(&u, &rho, &d).unwrap()));
}

fn bench_pctc(c: &mut Criterion) {
    let (rho, d) = (minus_input(), reference_params());
    c.bench_function("pctc_output", |b| b.iter(|| pctc_output(&rho, &d).unwrap()));
}

fn bench_sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        circuit: SweepCircuit::DeutschFig1,
        grids: ParamGrids {
            p: Grid::fixed(0.25),
            a: Grid::Values(vec![0.5, 1.0, 2.0]),
            g: Grid::fixed(1.0),
            omega: Grid::fixed(1.0),
            t: Grid::Range { start: 0.0, stop: 5.0, count: 20 },
        },
    };
    c.bench_function("sweep_60_points", |b| b.iter(|| sweep(&spec).unwrap()));
}

criterion_group!(benches, bench_deutsch, bench_pctc, bench_sweep);
criterion_main!(benches);
