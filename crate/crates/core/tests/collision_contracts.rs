//! Contract suite for the collision operators: exact conservation, the
//! per-irreducible-component relaxation factor checked against central
//! moments formed by direct summation, the BGK limit, trace-channel inertness
//! without internal energy, and the infinite-time projection limit.

mod common;

use common::*;
use hermite_lbm::collision::{
    bgk_collide, collide_with_internal_energy, equilibrium_populations, irreducible_moments,
    macro_from_populations, mrt_collide, pressure_heatflux, MacroState, RelaxationSpec,
};
use hermite_lbm::hermite::hermite_eval;
use hermite_lbm::irrep::decompose;
use hermite_lbm::tensor::{CoeffSet, SymTensor};
use hermite_lbm::velset::{
    coeffs_from_populations, d2q37, d2q9, populations_from_coeffs, VelocitySet,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn spec() -> RelaxationSpec {
    RelaxationSpec::new(0.7, 1.3, 0.9, 1.1, 0.8, 1.6, 0.6).unwrap()
}

/// A perturbed but positive population vector near equilibrium.
fn random_populations(r: &mut ChaCha8Rng, set: &VelocitySet, scale: f64) -> Vec<f64> {
    set.weights()
        .iter()
        .map(|w| w * (1.0 + r.gen_range(-scale..scale)))
        .collect()
}

/// Central Hermite coefficients by direct summation over populations,
/// independent of the binomial-transform path.
fn central_by_direct_sum(
    f: &[f64],
    set: &VelocitySet,
    u: &[f64],
    theta: f64,
    n: usize,
) -> SymTensor {
    let dim = set.dim();
    let mut acc = SymTensor::zeros(n, dim).unwrap();
    for (i, &fi) in f.iter().enumerate() {
        let v: Vec<f64> = set
            .xi(i)
            .iter()
            .zip(u)
            .map(|(x, w)| (x - w) / theta.sqrt())
            .collect();
        acc.add_scaled(&hermite_eval(n, &v).unwrap(), fi);
    }
    acc.scale(theta.powf(-(dim as f64) / 2.0))
}

#[test]
fn conservation_is_exact_per_collision() {
    for (set, n_max) in [(d2q9(), 2usize), (d2q37().unwrap(), 4usize)] {
        let mut r = rng(211);
        for _ in 0..50 {
            let f = random_populations(&mut r, &set, 0.05);
            let out = mrt_collide(&f, &set, &spec(), n_max).unwrap();
            let dim = set.dim();
            let mut din = vec![0.0; dim + 2];
            let mut dout = vec![0.0; dim + 2];
            for (i, (&a, &b)) in f.iter().zip(&out).enumerate() {
                let xi = set.xi(i);
                din[0] += a;
                dout[0] += b;
                for j in 0..dim {
                    din[1 + j] += a * xi[j];
                    dout[1 + j] += b * xi[j];
                }
                let sq: f64 = xi.iter().map(|x| x * x).sum();
                din[dim + 1] += a * sq;
                dout[dim + 1] += b * sq;
            }
            assert!((din[0] - dout[0]).abs() <= 1e-14 * din[0]);
            for j in 0..dim {
                assert!((din[1 + j] - dout[1 + j]).abs() <= 1e-14 * din[0]);
            }
            assert!((din[dim + 1] - dout[dim + 1]).abs() <= 1e-13 * din[dim + 1]);
        }
    }
}

#[test]
fn each_irreducible_moment_relaxes_at_its_own_rate() {
    let set = d2q37().unwrap();
    let n_max = 4;
    let relax = spec();
    let mut r = rng(223);
    for _ in 0..20 {
        let f = random_populations(&mut r, &set, 0.05);
        let out = mrt_collide(&f, &set, &relax, n_max).unwrap();
        let m = macro_from_populations(&f, &set, 0, None).unwrap();
        let feq = equilibrium_populations(&m, &set, n_max).unwrap();
        for n in 2..=n_max {
            let taus = relax.for_order(n);
            let d_in = central_by_direct_sum(&f, &set, &m.velocity, m.theta, n);
            let d_out = central_by_direct_sum(&out, &set, &m.velocity, m.theta, n);
            let d_eq = central_by_direct_sum(&feq, &set, &m.velocity, m.theta, n);
            let parts_in = decompose(&(&d_in - &d_eq)).unwrap();
            let parts_out = decompose(&(&d_out - &d_eq)).unwrap();
            for (k, tau) in taus.iter().enumerate() {
                let expect = parts_in.part(k).scale(1.0 - 1.0 / tau);
                assert!(
                    max_component_diff(parts_out.part(k), &expect) < 1e-12,
                    "order {n} component {k}"
                );
            }
        }
    }
}

#[test]
fn equal_rates_reproduce_bgk_moments() {
    let set = d2q37().unwrap();
    let n_max = 4;
    let tau = 0.85;
    let mut r = rng(227);
    let f = random_populations(&mut r, &set, 0.05);
    let m = macro_from_populations(&f, &set, 0, None).unwrap();
    let mrt_out = mrt_collide(&f, &set, &RelaxationSpec::uniform(tau).unwrap(), n_max).unwrap();
    let bgk_out = bgk_collide(&f, &m, &set, tau, n_max).unwrap();
    let a_mrt = coeffs_from_populations(&mrt_out, &set, n_max).unwrap();
    let a_bgk = coeffs_from_populations(&bgk_out, &set, n_max).unwrap();
    for n in 0..=n_max {
        assert!(
            max_component_diff(a_mrt.order(n), a_bgk.order(n)) < 1e-12,
            "order {n}"
        );
    }
}

#[test]
fn bgk_halves_nonequilibrium_moments_at_tau_two() {
    let set = d2q9();
    let mut r = rng(229);
    let f = random_populations(&mut r, &set, 0.05);
    let m = macro_from_populations(&f, &set, 0, None).unwrap();
    let feq = equilibrium_populations(&m, &set, 2).unwrap();
    let out = bgk_collide(&f, &m, &set, 2.0, 2).unwrap();
    let a_in = coeffs_from_populations(&f, &set, 2).unwrap();
    let a_eq = coeffs_from_populations(&feq, &set, 2).unwrap();
    let a_out = coeffs_from_populations(&out, &set, 2).unwrap();
    for n in 0..=2 {
        let before = a_in.order(n) - a_eq.order(n);
        let after = a_out.order(n) - a_eq.order(n);
        assert!(max_component_diff(&after, &before.scale(0.5)) < 1e-13);
    }
}

#[test]
fn tau22_is_inert_without_internal_energy() {
    let set = d2q37().unwrap();
    let mut r = rng(233);
    let f = random_populations(&mut r, &set, 0.05);
    let mut fast = spec();
    fast.tau22 = 0.6;
    let mut slow = spec();
    slow.tau22 = 5.0;
    let out_fast = mrt_collide(&f, &set, &fast, 4).unwrap();
    let out_slow = mrt_collide(&f, &set, &slow, 4).unwrap();
    for (a, b) in out_fast.iter().zip(&out_slow) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn infinite_rates_reduce_to_hermite_projection() {
    let set = d2q37().unwrap();
    let n_max = 4;
    let mut r = rng(239);
    let f = random_populations(&mut r, &set, 0.08);
    let frozen = RelaxationSpec::uniform(1e12).unwrap();
    let out = mrt_collide(&f, &set, &frozen, n_max).unwrap();
    let projected =
        populations_from_coeffs(&coeffs_from_populations(&f, &set, n_max).unwrap(), &set).unwrap();
    for (a, b) in out.iter().zip(&projected) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn projection_of_populations_is_idempotent() {
    let set = d2q37().unwrap();
    let mut r = rng(241);
    let f = random_populations(&mut r, &set, 0.1);
    let once =
        populations_from_coeffs(&coeffs_from_populations(&f, &set, 4).unwrap(), &set).unwrap();
    let twice =
        populations_from_coeffs(&coeffs_from_populations(&once, &set, 4).unwrap(), &set).unwrap();
    for (a, b) in once.iter().zip(&twice) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn transform_chain_matches_direct_central_sums() {
    // Galilean consistency: central moments through the binomial transforms
    // equal direct sums over shifted, scaled abscissas for arbitrary u, theta
    let set = d2q37().unwrap();
    let mut r = rng(251);
    for _ in 0..20 {
        let f = random_populations(&mut r, &set, 0.3);
        let u = random_vec(&mut r, 2, 0.4);
        let theta = r.gen_range(0.6..1.5);
        let a = coeffs_from_populations(&f, &set, 4).unwrap();
        let d = hermite_lbm::hermite::central_from_raw(&a, &u, theta).unwrap();
        for n in 0..=4 {
            let direct = central_by_direct_sum(&f, &set, &u, theta, n);
            assert!(
                max_component_diff(d.order(n), &direct) < 1e-10,
                "order {n}"
            );
        }
    }
}

#[test]
fn moment_table_recombines_to_central_coefficients() {
    let set = d2q37().unwrap();
    let mut r = rng(257);
    let f = random_populations(&mut r, &set, 0.05);
    let m = macro_from_populations(&f, &set, 0, None).unwrap();
    let a = coeffs_from_populations(&f, &set, 4).unwrap();
    let d = hermite_lbm::hermite::central_from_raw(&a, &m.velocity, m.theta).unwrap();
    let table = irreducible_moments(&f, &set, 4).unwrap();
    for n in 2..=4 {
        let parts: Vec<SymTensor> = table
            .entries
            .iter()
            .filter(|(order, _, _)| *order == n)
            .map(|(_, _, part)| part.clone())
            .collect();
        let rebuilt = hermite_lbm::irrep::reassemble(
            &hermite_lbm::irrep::IrrepParts::from_parts(n, parts).unwrap(),
        )
        .unwrap();
        assert!(max_component_diff(&rebuilt, d.order(n)) < 1e-13);
    }
}

#[test]
fn moment_table_vanishes_at_equilibrium_beyond_order_one() {
    let set = d2q37().unwrap();
    let m = MacroState {
        rho: 1.1,
        velocity: vec![0.06, -0.04],
        theta: 1.05,
    };
    let feq = equilibrium_populations(&m, &set, 4).unwrap();
    let table = irreducible_moments(&feq, &set, 4).unwrap();
    for (n, k, part) in &table.entries {
        assert!(
            part.max_abs() < 1e-12,
            "equilibrium moment ({n},{k}) = {:.3e}",
            part.max_abs()
        );
    }
}

#[test]
fn pressure_heatflux_matches_direct_summation() {
    let set = d2q37().unwrap();
    let mut r = rng(263);
    let f = random_populations(&mut r, &set, 0.2);
    let m = macro_from_populations(&f, &set, 0, None).unwrap();
    let (p, q) = pressure_heatflux(&f, &set, &m).unwrap();
    // independent accumulation
    let mut p_direct = [[0.0f64; 2]; 2];
    let mut q_direct = [0.0f64; 2];
    for (i, &fi) in f.iter().enumerate() {
        let xi = set.xi(i);
        let c = [xi[0] - m.velocity[0], xi[1] - m.velocity[1]];
        let csq = c[0] * c[0] + c[1] * c[1];
        for a in 0..2 {
            for b in 0..2 {
                p_direct[a][b] += fi * c[a] * c[b];
            }
            q_direct[a] += 0.5 * fi * csq * c[a];
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            assert!((p.get(&[a, b]) - p_direct[a][b]).abs() < 1e-13);
        }
        assert!((q[a] - q_direct[a]).abs() < 1e-13);
    }
    // deviatoric perturbations leave the trace alone
    let trace_before = p.get(&[0, 0]) + p.get(&[1, 1]);
    let mut a_pert = CoeffSet::zeros(2, 2).unwrap();
    a_pert.order_mut(2).set(&[0, 1], 1e-3);
    let df = populations_from_coeffs(&a_pert, &set).unwrap();
    let f2: Vec<f64> = f.iter().zip(&df).map(|(x, y)| x + y).collect();
    let (p2, _) = pressure_heatflux(&f2, &set, &m).unwrap();
    let trace_after = p2.get(&[0, 0]) + p2.get(&[1, 1]);
    assert!((trace_before - trace_after).abs() < 1e-12);
}

#[test]
fn internal_energy_collision_conserves_total_energy() {
    let set: Arc<VelocitySet> = d2q37().unwrap();
    let s_internal = 3u32;
    let mut r = rng(269);
    for _ in 0..20 {
        let f = random_populations(&mut r, &set, 0.05);
        // internal energy out of equilibrium with the translational part
        let eint: f64 = r.gen_range(0.5..2.5);
        let g: Vec<f64> = set.weights().iter().map(|w| w * eint).collect();
        let (f_out, g_out) = collide_with_internal_energy(
            &f,
            &g,
            &set,
            &spec(),
            s_internal,
            None,
            4,
        )
        .unwrap();
        let energy = |fv: &[f64], gv: &[f64]| -> f64 {
            let mut e: f64 = gv.iter().sum();
            for (i, &fi) in fv.iter().enumerate() {
                let sq: f64 = set.xi(i).iter().map(|x| x * x).sum();
                e += 0.5 * fi * sq;
            }
            e
        };
        let before = energy(&f, &g);
        let after = energy(&f_out, &g_out);
        assert!((before - after).abs() <= 1e-12 * before.abs());
        // mass and momentum of f are still conserved
        let m_in = macro_from_populations(&f, &set, 0, None).unwrap();
        let m_out = macro_from_populations(&f_out, &set, 0, None).unwrap();
        assert!((m_in.rho - m_out.rho).abs() < 1e-14 * m_in.rho);
        for j in 0..2 {
            assert!((m_in.velocity[j] - m_out.velocity[j]).abs() < 1e-13);
        }
    }
}

#[test]
fn unit_tau22_equilibrates_translational_trace_in_one_collision() {
    let set = d2q37().unwrap();
    let s_internal = 3u32;
    let mut relax = spec();
    relax.tau22 = 1.0;
    let m = MacroState {
        rho: 1.0,
        velocity: vec![0.0, 0.0],
        theta: 1.0,
    };
    let f = equilibrium_populations(&m, &set, 4).unwrap();
    // hotter internal reservoir
    let g: Vec<f64> = set.weights().iter().map(|w| w * 2.4).collect();
    let eint: f64 = g.iter().sum();
    let total = macro_from_populations(&f, &set, s_internal, Some(eint)).unwrap();
    let (f_out, _) =
        collide_with_internal_energy(&f, &g, &set, &relax, s_internal, None, 4).unwrap();
    let m_out = macro_from_populations(&f_out, &set, 0, None).unwrap();
    assert!(
        (m_out.theta - total.theta).abs() < 1e-13,
        "translational theta {} vs total {}",
        m_out.theta,
        total.theta
    );
}
