//! Shared oracles for the integration suites: finite-difference evaluation of
//! the generating-function definition of the Hermite polynomials, dense-grid
//! velocity-space integration, random tensors and rotations. Everything here
//! is deliberately independent of the library's transform implementations.

#![allow(dead_code)]

use hermite_lbm::tensor::{CoeffSet, SymTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, rank: usize, dim: usize, scale: f64) -> SymTensor {
    let mut t = SymTensor::zeros(rank, dim).unwrap();
    for v in t.components_mut() {
        *v = rng.gen_range(-scale..scale);
    }
    t
}

/// Random coefficients for orders `0..=max_order`; orders listed in
/// `zero_orders` stay zero.
pub fn random_coeffs(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_order: usize,
    zero_orders: &[usize],
) -> CoeffSet {
    let tensors = (0..=max_order)
        .map(|n| {
            if zero_orders.contains(&n) {
                SymTensor::zeros(n, dim).unwrap()
            } else {
                random_tensor(rng, n, dim, 1.0)
            }
        })
        .collect();
    CoeffSet::from_tensors(tensors).unwrap()
}

/// The Gaussian weight `ω(ξ) = (2π)^{-D/2} e^{-ξ²/2}`.
pub fn omega(xi: &[f64]) -> f64 {
    let d = xi.len() as f64;
    let sq: f64 = xi.iter().map(|x| x * x).sum();
    (2.0 * PI).powf(-d / 2.0) * (-0.5 * sq).exp()
}

/// Mixed partial derivative of `f` with respect to the listed coordinate
/// indices, by nested fourth-order central differences.
pub fn mixed_partial(f: &dyn Fn(&[f64]) -> f64, indices: &[usize], x: &[f64], h: f64) -> f64 {
    match indices.split_first() {
        None => f(x),
        Some((&i, rest)) => {
            let shifted = |steps: f64| {
                let mut y = x.to_vec();
                y[i] += steps * h;
                mixed_partial(f, rest, &y, h)
            };
            (-shifted(2.0) + 8.0 * shifted(1.0) - 8.0 * shifted(-1.0) + shifted(-2.0)) / (12.0 * h)
        }
    }
}

/// Hermite tensor component straight from the derivative definition
/// `(-1)^n ∂^n ω / ω`, evaluated numerically.
pub fn rodrigues_component(indices: &[usize], xi: &[f64], h: f64) -> f64 {
    let sign = if indices.len() % 2 == 0 { 1.0 } else { -1.0 };
    sign * mixed_partial(&omega, indices, xi, h) / omega(xi)
}

/// Dense midpoint-rule integral of `f` over velocity space. The integrand is
/// expected to decay like the Gaussian weight; `half_width = 10` and
/// `step = 0.2` leave truncation and discretization error far below 1e-10.
pub fn integrate_velocity(dim: usize, half_width: f64, step: f64, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let n = (2.0 * half_width / step).round() as usize;
    let coord = |i: usize| -half_width + (i as f64 + 0.5) * step;
    let mut sum = 0.0;
    let mut idx = vec![0usize; dim];
    let mut xi = vec![0.0f64; dim];
    loop {
        for (j, &i) in idx.iter().enumerate() {
            xi[j] = coord(i);
        }
        sum += f(&xi);
        let mut j = 0;
        loop {
            if j == dim {
                return sum * step.powi(dim as i32);
            }
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Reconstructs `f(ξ) = ω(ξ) Σ_n a^(n) : H^(n)(ξ) / n!` from coefficients.
pub fn reconstruct_distribution(a: &CoeffSet, xi: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut factorial = 1.0;
    for n in 0..=a.max_order() {
        if n > 0 {
            factorial *= n as f64;
        }
        let h = hermite_lbm::hermite::hermite_eval(n, xi).unwrap();
        total += a.order(n).full_dot(&h) / factorial;
    }
    omega(xi) * total
}

/// Random rotation matrix (row-major `dim x dim`).
pub fn random_rotation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => {
            let a = rng.gen_range(0.0..2.0 * PI);
            vec![vec![a.cos(), -a.sin()], vec![a.sin(), a.cos()]]
        }
        3 => {
            // Gram-Schmidt on a random Gaussian-ish matrix
            let mut m: Vec<Vec<f64>> = (0..3).map(|_| random_vec(rng, 3, 1.0)).collect();
            for i in 0..3 {
                for j in 0..i {
                    let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                    for k in 0..3 {
                        m[i][k] -= dot * m[j][k];
                    }
                }
                let norm: f64 = m[i].iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-6 {
                    return random_rotation(rng, dim);
                }
                for v in m[i].iter_mut() {
                    *v /= norm;
                }
            }
            m
        }
        _ => panic!("rotations implemented for 2 and 3 dimensions"),
    }
}

/// Applies a rotation to every index of a symmetric tensor.
pub fn rotate_tensor(t: &SymTensor, rot: &[Vec<f64>]) -> SymTensor {
    let dim = t.dim();
    let rank = t.rank();
    let mut out = SymTensor::zeros(rank, dim).unwrap();
    let mut target = vec![0usize; rank];
    let mut source = vec![0usize; rank];
    loop {
        let mut acc = 0.0;
        source.iter_mut().for_each(|s| *s = 0);
        loop {
            let mut weight = 1.0;
            for (slot, &s) in source.iter().enumerate() {
                weight *= rot[target[slot]][s];
            }
            acc += weight * t.get(&source);
            if !advance(&mut source, dim) {
                break;
            }
        }
        out.set(&target, acc);
        if !advance_sorted(&mut target, dim) {
            break;
        }
    }
    out
}

fn advance(idx: &mut [usize], dim: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < dim {
            return true;
        }
        *slot = 0;
    }
    false
}

fn advance_sorted(idx: &mut [usize], dim: usize) -> bool {
    let rank = idx.len();
    if rank == 0 {
        return false;
    }
    let mut j = rank;
    while j > 0 {
        j -= 1;
        if idx[j] + 1 < dim {
            let v = idx[j] + 1;
            for slot in idx.iter_mut().skip(j) {
                *slot = v;
            }
            return true;
        }
    }
    false
}

/// All index tuples of the given rank (for exhaustive componentwise checks).
pub fn all_index_tuples(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; rank];
    loop {
        out.push(idx.clone());
        if !advance(&mut idx, dim) {
            break;
        }
    }
    out
}

pub fn max_component_diff(a: &SymTensor, b: &SymTensor) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
