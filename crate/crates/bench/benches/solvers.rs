use criterion::{black_box, criterion_group, criterion_main, Criterion};

use msac_core::approx::{fgr_lifetime, lz_ladder, FgrOptions, VelocityRule};
use msac_core::stationary::lifetime_flux;
use msac_core::tdse::{hamiltonian, propagate, Absorber, PropagationOptions};
use msac_core::tidse::{scan_resonances, solve_slope, Shooter, SolverOptions};
use msac_core::{Grid, Parity, Representation, TwoComponentWave};
use num_complex::Complex64;

const V: f64 = 1.5275;

fn shooting(c: &mut Criterion) {
    let shooter = Shooter::new(V, Representation::Adiabatic, 14.0, 1e-3).unwrap();
    c.bench_function("slope solve, adiabatic, 14k steps", |b| {
        b.iter(|| solve_slope(&shooter, black_box(1.73), Parity::Even).unwrap())
    });
    let diabatic = Shooter::new(V, Representation::Diabatic, 14.0, 1e-3).unwrap();
    c.bench_function("slope solve, diabatic, 14k steps", |b| {
        b.iter(|| solve_slope(&diabatic, black_box(1.73), Parity::Even).unwrap())
    });
}

fn stationary_lifetimes(c: &mut Criterion) {
    let opts = SolverOptions { window: 0.6, ..Default::default() };
    let record = scan_resonances(V, Representation::Adiabatic, &opts).unwrap().remove(0);
    let wave = record.solve().unwrap().solution.to_wave();
    c.bench_function("flux lifetime from a solved wave", |b| b.iter(|| lifetime_flux(&record, &wave, 3.0).unwrap()));

    let mut group = c.benchmark_group("resonance scan");
    group.sample_size(10);
    group.bench_function("adiabatic ladder, 0.6 window", |b| {
        b.iter(|| scan_resonances(black_box(V), Representation::Adiabatic, &opts).unwrap())
    });
    group.finish();
}

fn propagation(c: &mut Criterion) {
    let grid = Grid::new(12.0, 1e-3).unwrap();
    let packet: Vec<Complex64> = grid.points().map(|x| Complex64::new((-x * x).exp(), 0.0)).collect();
    let state = TwoComponentWave {
        grid,
        first: packet.clone(),
        second: packet,
        representation: Representation::Adiabatic,
        parity: Parity::Even,
    };
    let absorber = Absorber { onset: 9.0, strength: 10.0, x_max: 12.0 };
    c.bench_function("band Hamiltonian assembly, 24k nodes", |b| {
        b.iter(|| hamiltonian(&grid, V, Representation::Adiabatic, &absorber))
    });
    let opts = PropagationOptions { dt: 1e-2, t_end: 1.0, record_every: 10 };
    let mut group = c.benchmark_group("Crank-Nicolson");
    group.sample_size(10);
    group.bench_function("100 steps, 24k nodes", |b| b.iter(|| propagate(&state, V, &absorber, &opts).unwrap()));
    group.finish();
}

fn approximations(c: &mut Criterion) {
    let mut group = c.benchmark_group("approximations");
    group.sample_size(10);
    group.bench_function("golden rule, nu = 3", |b| b.iter(|| fgr_lifetime(black_box(V), 3, &FgrOptions::default())));
    group.finish();
    let ladder: Vec<f64> = (0..12).map(|j| V + 0.2 + 0.3 * j as f64).collect();
    c.bench_function("Landau-Zener ladder, 12 levels", |b| {
        b.iter(|| lz_ladder(black_box(V), &ladder, VelocityRule::TotalEnergy).unwrap())
    });
}

criterion_group!(benches, shooting, stationary_lifetimes, propagation, approximations);
criterion_main!(benches);
