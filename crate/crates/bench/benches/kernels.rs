use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lubrimortar::lubrication::Film;
use lubrimortar::mesh::{generate_pin_layers, DIRICHLET, SLAVE};
use lubrimortar::solid::DofMap;
use lubrimortar::sparse::Coo;
use lubrimortar::{
    flow_factors, FluidParams, InterfaceParams, Loading, LubricatedContact, NeoHookean, RegularizationParams,
    RigidPlane, Solid, SolverParams, Stepper, TimeIntegrator,
};

fn fluid() -> FluidParams {
    FluidParams {
        viscosity: 4e-8,
        penalty: 1e8,
        density: 0.0,
    }
}

fn pointwise(c: &mut Criterion) {
    let reg = RegularizationParams::new(3e-3, 1.0).unwrap();
    c.bench_function("gap_law", |b| b.iter(|| reg.gap_law(black_box(1.3e-3))));
    c.bench_function("flow_factors", |b| {
        b.iter(|| flow_factors(black_box(2.5e-3), black_box(1e-3)).unwrap())
    });
}

fn reynolds(c: &mut Criterion) {
    let n = 256;
    let nodes: Vec<[f64; 2]> = (0..=n).map(|i| [i as f64 / n as f64, 0.0]).collect();
    let h = nodes.iter().map(|x| 2e-3 - 1e-3 * x[0]).collect();
    let film = Film::sliding(nodes, h, [30.0, 0.0]);
    let f = fluid();
    let p = vec![1e-4; n + 1];
    c.bench_function("reynolds_residual_256", |b| {
        b.iter(|| film.residual(black_box(&p), &f, 1e-3, 0.1).unwrap())
    });
    c.bench_function("reynolds_solve_256", |b| {
        b.iter(|| film.solve(&f, 1e-3, f64::INFINITY, 1e-14, 20).unwrap())
    });
}

fn pin(n_surf: usize) -> LubricatedContact {
    let mesh = generate_pin_layers(1.5, 1.0, 1.0, n_surf, n_surf / 4).unwrap();
    let solid = Solid::new(mesh, vec![NeoHookean::new(1e-2, 0.0, 0.0).unwrap()]).unwrap();
    let params = InterfaceParams {
        fluid: fluid(),
        regularization: RegularizationParams::new(3e-3, 1.0).unwrap().with_sigma(1e-3),
        friction: 0.25,
        search_radius: 1.0,
        c_n: None,
        c_t: Some(0.01),
    };
    LubricatedContact::new(solid, SLAVE, params, SolverParams::default()).unwrap()
}

fn pressed(sys: &LubricatedContact, delta: f64) -> Loading {
    let fixed: Vec<usize> = sys
        .solid
        .mesh
        .nodes_in(DIRICHLET)
        .iter()
        .flat_map(|&n| [2 * n, 2 * n + 1])
        .collect();
    Loading {
        map: DofMap::new(sys.solid.n_dofs(), &fixed, &[]).unwrap(),
        prescribed: fixed.iter().map(|&d| (d, if d % 2 == 1 { -delta } else { 0.0 })).collect(),
        f_ext: vec![0.0; sys.solid.n_dofs()],
        plane: RigidPlane {
            height: 0.0,
            velocity: [0.05, 0.0],
        },
    }
}

fn coupled(c: &mut Criterion) {
    let sys = pin(40);
    let mut s = sys.initial_state(RigidPlane {
        height: 0.0,
        velocity: [0.0; 2],
    });
    for d in s.solid.d.iter_mut().skip(1).step_by(2) {
        *d = 2e-3;
    }
    let load = pressed(&sys, 5e-3);
    let st = Stepper::new(TimeIntegrator::QuasiStatic, 0.5).unwrap();
    let s = sys.solve_step(&s, st, &load).unwrap().0;
    let ctx = sys.context(&s, st, &load).unwrap();
    let u = ctx.initial_unknowns();
    c.bench_function("coupled_evaluate_pin40", |b| b.iter(|| ctx.evaluate(black_box(&u), true).unwrap()));
    let ev = ctx.evaluate(&u, true).unwrap();
    let jac: Coo = ev.jacobian.unwrap();
    let rhs: Vec<f64> = ev.residual.iter().map(|r| -r).collect();
    c.bench_function("sparse_lu_pin40", |b| b.iter(|| jac.solve(black_box(&rhs)).unwrap()));
    c.bench_function("coupled_step_pin40", |b| b.iter(|| sys.solve_step(&s, st, &load).unwrap()));
}

criterion_group!(benches, pointwise, reynolds, coupled);
criterion_main!(benches);
