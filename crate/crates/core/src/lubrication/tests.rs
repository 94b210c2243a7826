use super::*;
use proptest::prelude::*;

fn fluid(penalty: f64) -> FluidParams {
    FluidParams {
        viscosity: 4e-8,
        penalty,
        density: 0.0,
    }
}

#[test]
fn smooth_limit_flow_factors() {
    let f = flow_factors(1e-3, 0.0).unwrap();
    assert_eq!((f.pressure, f.shear, f.friction), (1.0, 0.0, 1.0));
}

#[test]
fn flow_factors_at_unit_ratio() {
    let f = flow_factors(2.0, 2.0).unwrap();
    assert!((f.pressure - 4.0).abs() < 1e-15);
    assert!((f.shear + 33.0 / 7.0).abs() < 1e-14);
    assert!((f.friction - 2.0).abs() < 1e-15);
    let half = flow_factors(2.0, 1.0).unwrap();
    assert!((half.pressure - 1.75).abs() < 1e-15);
}

#[test]
fn flow_factors_reject_closed_film() {
    assert!(matches!(flow_factors(0.0, 0.1), Err(Error::Domain(_))));
    assert!(matches!(flow_factors(-1e-3, 0.1), Err(Error::Domain(_))));
}

fn state(p: [f64; 2], h: [f64; 2], u: f64) -> FacetState<f64> {
    FacetState {
        x: [V2::new(0.1, 0.0), V2::new(0.35, 0.0)],
        p,
        h,
        h_prev: h,
        v_mean: [V2::new(0.5 * u, 0.0); 2],
        v_rel: [V2::new(-0.5 * u, 0.0); 2],
    }
}

#[test]
fn smooth_facet_matches_classical_reynolds() {
    // linear p, linear h, sigma = 0: hand integrated
    let (p, h, u) = ([0.2, 0.5], [2e-3, 1e-3], 30.0);
    let eta = 4e-8;
    let l = 0.25;
    let r = facet_residual(&state(p, h, u), &fluid(0.0), 0.0, f64::INFINITY);
    // int h^3 dx over the facet for linear h
    let h3 = l * (h[0] + h[1]) * (h[0] * h[0] + h[1] * h[1]) / 4.0;
    let flux = h3 / (12.0 * eta) * (p[1] - p[0]) / l / l;
    let couette = 0.5 * u * 0.5 * (h[0] + h[1]);
    let expect = [-flux + couette, flux - couette];
    for j in 0..2 {
        assert!((r[j] - expect[j]).abs() < 1e-12 * expect[j].abs(), "{j}: {} vs {}", r[j], expect[j]);
    }
}

#[test]
fn rough_facet_matches_dense_quadrature() {
    let (p, h, u, sigma) = ([0.2, 0.5], [2e-3, 1e-3], 30.0, 6e-4);
    let eta = 4e-8;
    let l = 0.25;
    let r = facet_residual(&state(p, h, u), &fluid(0.0), sigma, f64::INFINITY);
    let n = 20000;
    let mut expect = [0.0; 2];
    for i in 0..n {
        let xi = (i as f64 + 0.5) / n as f64;
        let hh = h[0] * (1.0 - xi) + h[1] * xi;
        let rr = sigma / hh;
        let phi_p = 1.0 + 3.0 * rr * rr;
        let phi_s = (-3.0 * rr - 30.0 * rr.powi(3)) / (1.0 + 6.0 * rr * rr);
        let dp = (p[1] - p[0]) / l;
        for (j, dn) in [-1.0 / l, 1.0 / l].into_iter().enumerate() {
            let v = hh.powi(3) * phi_p / (12.0 * eta) * dn * dp - hh * 0.5 * u * dn - sigma * phi_s * (-0.5 * u) * dn;
            expect[j] += v * l / n as f64;
        }
    }
    for j in 0..2 {
        assert!((r[j] - expect[j]).abs() < 1e-6 * expect[j].abs());
    }
}

#[test]
fn squeeze_and_cavitation_terms() {
    let mut s = state([-0.1, 0.0], [1e-3, 1e-3], 0.0);
    s.h_prev = [1.2e-3, 1.2e-3];
    let r = facet_residual(&s, &fluid(1e6), 0.0, 0.5);
    let l = 0.25;
    let hdot = -0.2e-3 / 0.5;
    let cond = 1e-9 / (12.0 * 4e-8);
    let flux = cond * 0.1 / l;
    let expect = [-flux + hdot * l / 2.0 - 1e6 * 0.1 * l / 2.0, flux + hdot * l / 2.0];
    for j in 0..2 {
        assert!((r[j] - expect[j]).abs() < 1e-10 * expect[j].abs().max(1.0));
    }
}

#[test]
fn traction_parts() {
    let f = fluid(0.0);
    let n = V2::new(0.0, -1.0);
    let (tp, tn) = fluid_traction(0.3, V2::new(0.0, 0.0), 1e-3, n, V2::new(0.0, 0.0), &f, 0.0);
    assert_eq!((tp.x, tp.y), (0.0, 0.0));
    assert!((tn.y - 0.3).abs() < 1e-15 && tn.x == 0.0);
    // Couette shear with v_rel = -U/2 on a smooth film: +eta U / (2h) along x
    let (_, tn) = fluid_traction(0.0, V2::new(0.0, 0.0), 1e-3, n, V2::new(-5.0, 0.0), &f, 0.0);
    assert!((tn.x - 4e-8 * 5.0 / 1e-3).abs() < 1e-18);
    let (tp, _) = fluid_traction(0.0, V2::new(2.0, 0.0), 1e-3, n, V2::new(0.0, 0.0), &f, 0.0);
    assert!((tp.x + 1e-3).abs() < 1e-18);
}

/// Closed-form pressure in a plane slider with linear film thickness.
fn slider_exact(x: f64, len: f64, h_in: f64, h_out: f64, eta: f64, u: f64) -> f64 {
    let a = (h_out - h_in) / len;
    let h = h_in + a * x;
    let hs = 2.0 * h_in * h_out / (h_in + h_out);
    6.0 * eta * u * ((1.0 / h_in - 1.0 / h) / a - hs * (1.0 / (h_in * h_in) - 1.0 / (h * h)) / (2.0 * a))
}

fn slider(n: usize, h_in: f64, h_out: f64, u: f64) -> Film {
    let len = 1.0;
    let nodes: Vec<[f64; 2]> = (0..=n).map(|i| [len * i as f64 / n as f64, 0.0]).collect();
    let h = nodes.iter().map(|x| h_in + (h_out - h_in) * x[0] / len).collect();
    Film::sliding(nodes, h, [u, 0.0])
}

#[test]
fn slider_bearing_pressure() {
    let (h_in, h_out, u, eta) = (2e-3, 1e-3, 30.0, 4e-8);
    let film = slider(64, h_in, h_out, u);
    let p = film.solve(&fluid(0.0), 0.0, f64::INFINITY, 1e-14, 20).unwrap();
    let peak = p.iter().cloned().fold(0.0, f64::max);
    assert!(peak > 0.0);
    for (x, pk) in film.nodes.iter().zip(&p) {
        let e = slider_exact(x[0], 1.0, h_in, h_out, eta, u);
        assert!((pk - e).abs() < 1e-3 * peak, "x = {}: {pk} vs {e}", x[0]);
    }
}

#[test]
fn diverging_film_cavitates() {
    // flow from thin to thick: the unpenalised solution goes negative
    let film = slider(64, 1e-3, 2e-3, 30.0);
    let free = film.solve(&fluid(0.0), 0.0, f64::INFINITY, 1e-14, 20).unwrap();
    let min_free = free.iter().cloned().fold(0.0, f64::min);
    assert!(min_free < -1e-3);
    let mut last = min_free;
    for eps in [1e4, 1e6, 1e8] {
        let p = film.solve(&fluid(eps), 0.0, f64::INFINITY, 1e-14, 50).unwrap();
        let m = p.iter().cloned().fold(0.0, f64::min);
        assert!(m > last && m <= 0.0);
        last = m;
    }
    assert!(last > 1e-4 * min_free);
}

#[test]
fn nonpositive_thickness_is_model_violation() {
    let mut film = slider(8, 1e-3, 1e-3, 1.0);
    film.h[3] = 0.0;
    assert!(matches!(
        film.solve(&fluid(0.0), 0.0, f64::INFINITY, 1e-12, 5),
        Err(Error::ModelViolation { node: 3, .. })
    ));
}

proptest! {
    #[test]
    fn flow_factor_ranges(h in 1e-5f64..1.0, s in 0.0f64..1.0) {
        let f = flow_factors(h, s).unwrap();
        prop_assert!(f.pressure >= 1.0 && f.friction >= 1.0 && f.shear <= 0.0);
        // Poiseuille integrand is polynomial in h
        prop_assert!((h.powi(3) * f.pressure - (h.powi(3) + 3.0 * s * s * h)).abs() <= 1e-12 * (h.powi(3) + 3.0 * s * s * h));
    }

    #[test]
    fn facet_jacobian_matches_differences(pa in -1.0f64..1.0, pb in -1.0f64..1.0, ha in 5e-4f64..3e-3, hb in 5e-4f64..3e-3, ya in -0.1f64..0.1) {
        let f = fluid(1e5);
        let build = |v: [f64; 7]| FacetState {
            x: [V2::new(v[0], v[1]), V2::new(v[2], v[3])],
            p: [v[4], v[5]],
            h: [v[6], hb],
            h_prev: [1e-3, 1e-3],
            v_mean: [V2::new(3.0, 0.0); 2],
            v_rel: [V2::new(-2.0, 0.5); 2],
        };
        prop_assume!(pa.abs() > 1e-3 && pb.abs() > 1e-3);
        let base = [0.0, ya, 0.3, 0.02, pa, pb, ha];
        let dual: FacetState<Dual<7>> = {
            let d = |i: usize| Dual::<7>::variable(base[i], i);
            FacetState {
                x: [V2::new(d(0), d(1)), V2::new(d(2), d(3))],
                p: [d(4), d(5)],
                h: [d(6), Dual::constant(hb)],
                h_prev: [1e-3, 1e-3],
                v_mean: [V2::cst([3.0, 0.0]); 2],
                v_rel: [V2::cst([-2.0, 0.5]); 2],
            }
        };
        let r = facet_residual(&dual, &f, 2e-4, 0.1);
        for i in 0..7 {
            let step = if i == 6 { 1e-5 * ha } else { 1e-6 };
            let mut a = base;
            a[i] += step;
            let mut b = base;
            b[i] -= step;
            let ra = facet_residual(&build(a), &f, 2e-4, 0.1);
            let rb = facet_residual(&build(b), &f, 2e-4, 0.1);
            for j in 0..2 {
                let fd = (ra[j] - rb[j]) / (2.0 * step);
                let noise = 1e-14 * ra[j].abs().max(rb[j].abs()) / step;
                prop_assert!((fd - r[j].d[i]).abs() <= 1e-5 * (1.0 + fd.abs()) + noise, "i={i} j={j} fd={fd} ad={}", r[j].d[i]);
            }
        }
    }
}
