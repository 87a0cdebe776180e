//! Hermite tensor polynomials and the closed-form transforms between
//! laboratory-frame and co-moving, temperature-scaled expansion coefficients.
//!
//! All index symmetrization follows the distinct-partition convention of
//! [`crate::tensor::sym_prod`], under which the printed combinatorial factors
//! (binomials and pairing counts) are exactly the number of partition terms.

use crate::error::{Error, Result};
use crate::tensor::{delta_power, sym_prod, CoeffSet, SymTensor, MAX_RANK};

/// `n! / ((n - 2k)! 2^k k!)`, the pairing-count coefficients of the Hermite
/// polynomial expansion, in exact integer arithmetic.
pub fn dnk(n: i64, k: i64) -> Result<u64> {
    if n < 0 || k < 0 || 2 * k > n {
        return Err(Error::InvalidCoefficient { n, k });
    }
    let (n, k) = (n as u128, k as u128);
    let mut acc: u128 = 1;
    for j in (n - 2 * k + 1)..=n {
        acc *= j;
    }
    for j in 1..=k {
        acc /= 2 * j;
    }
    Ok(acc as u64)
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_RANK {
        return Err(Error::UnsupportedRank { rank: n });
    }
    Ok(())
}

/// Rank-`n` Hermite tensor polynomial `H(ξ)`, assembled from its explicit
/// monomial form: alternating sums of `ξ`-powers against Kronecker pairings.
pub fn hermite_eval(n: usize, xi: &[f64]) -> Result<SymTensor> {
    check_order(n)?;
    let dim = xi.len();
    let mut out = SymTensor::zeros(n, dim)?;
    for k in 0..=n / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sym_prod(&SymTensor::outer_power(xi, n - 2 * k)?, &delta_power(dim, k));
        out.add_scaled(&term, sign);
    }
    Ok(out)
}

/// The moving-frame polynomial `A_m(u, θ)`: `u`-powers against Kronecker
/// pairings weighted by `(1 - θ)^k`. `A_0 = 1`, `A_1 = u`, and at `θ = 1`
/// the whole sum collapses to the outer power `u^m`.
pub fn a_poly(m: usize, u: &[f64], theta: f64) -> Result<SymTensor> {
    check_order(m)?;
    let dim = u.len();
    let mut out = SymTensor::zeros(m, dim)?;
    for k in 0..=m / 2 {
        let term = sym_prod(&SymTensor::outer_power(u, m - 2 * k)?, &delta_power(dim, k));
        out.add_scaled(&term, (1.0 - theta).powi(k as i32));
    }
    Ok(out)
}

/// `H(ξ + u)` via the binomial shift theorem; must agree with evaluating
/// the polynomial at the shifted argument directly.
pub fn shift_hermite(n: usize, xi: &[f64], u: &[f64]) -> Result<SymTensor> {
    check_order(n)?;
    let dim = xi.len();
    let mut out = SymTensor::zeros(n, dim)?;
    for k in 0..=n {
        let term = sym_prod(&hermite_eval(k, xi)?, &SymTensor::outer_power(u, n - k)?);
        out.add_scaled(&term, 1.0);
    }
    Ok(out)
}

/// `H(αξ)` via the scaling theorem.
pub fn scale_hermite(n: usize, xi: &[f64], alpha: f64) -> Result<SymTensor> {
    check_order(n)?;
    if alpha == 0.0 {
        return Err(Error::ZeroScale);
    }
    let dim = xi.len();
    let shrink = 1.0 - alpha.powi(-2);
    let mut out = SymTensor::zeros(n, dim)?;
    for m in 0..=n / 2 {
        let term = sym_prod(&hermite_eval(n - 2 * m, xi)?, &delta_power(dim, m));
        out.add_scaled(&term, shrink.powi(m as i32));
    }
    Ok(out.scale(alpha.powi(n as i32)))
}

/// `H((ξ - u)/√θ)` expressed through laboratory-frame polynomials and the
/// `A_m` family (combined shift + scale theorem).
pub fn moving_frame_hermite(n: usize, xi: &[f64], u: &[f64], theta: f64) -> Result<SymTensor> {
    check_order(n)?;
    if theta <= 0.0 {
        return Err(Error::NonPositiveTheta(theta));
    }
    let dim = xi.len();
    let mut out = SymTensor::zeros(n, dim)?;
    for k in 0..=n {
        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
        let term = sym_prod(&hermite_eval(k, xi)?, &a_poly(n - k, u, theta)?);
        out.add_scaled(&term, sign);
    }
    Ok(out.scale(theta.powf(-(n as f64) / 2.0)))
}

/// Order-`n` laboratory-frame Hermite coefficient of the Maxwell-Boltzmann
/// distribution at `(ρ, u, θ)`.
pub fn equilibrium_raw_coeffs(rho: f64, u: &[f64], theta: f64, n: usize) -> Result<SymTensor> {
    check_order(n)?;
    let dim = u.len();
    let mut out = SymTensor::zeros(n, dim)?;
    for k in 0..=n / 2 {
        let term = sym_prod(&SymTensor::outer_power(u, n - 2 * k)?, &delta_power(dim, k));
        out.add_scaled(&term, (theta - 1.0).powi(k as i32));
    }
    Ok(out.scale(rho))
}

/// Transforms laboratory-frame coefficients `a` into co-moving,
/// temperature-scaled coefficients `d`:
/// `d = θ^{-(D+n)/2} Σ_k (-1)^{n-k} a^(k) A_{n-k}(u, θ)`.
pub fn central_from_raw(a: &CoeffSet, u: &[f64], theta: f64) -> Result<CoeffSet> {
    if theta <= 0.0 {
        return Err(Error::NonPositiveTheta(theta));
    }
    let dim = a.dim();
    if u.len() != dim {
        return Err(Error::DimMismatch(format!(
            "velocity has {} components, coefficients are {}D",
            u.len(),
            dim
        )));
    }
    let mut d = CoeffSet::zeros(dim, a.max_order())?;
    for n in 0..=a.max_order() {
        let prefactor = theta.powf(-((dim + n) as f64) / 2.0);
        let out = d.order_mut(n);
        for k in 0..=n {
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            let term = sym_prod(a.order(k), &a_poly(n - k, u, theta)?);
            out.add_scaled(&term, sign * prefactor);
        }
    }
    Ok(d)
}

/// Inverse transform for collision increments, valid on inputs whose order-0
/// and order-1 coefficients vanish (conservation of mass and momentum):
///
/// ```text
/// a2 = θ^{(D+2)/2} d2
/// a3 = θ^{(D+3)/2} d3 + 3 u a2
/// a4 = θ^{(D+4)/2} d4 + 4 u a3 - 6 [uu + (1-θ)δ] a2
/// ```
pub fn raw_from_central_collision(d_omega: &CoeffSet, u: &[f64], theta: f64) -> Result<CoeffSet> {
    if theta <= 0.0 {
        return Err(Error::NonPositiveTheta(theta));
    }
    let dim = d_omega.dim();
    let scale = d_omega.max_abs().max(1.0);
    for order in 0..=d_omega.max_order().min(1) {
        let norm = d_omega.order(order).max_abs();
        if norm > 1e-12 * scale {
            return Err(Error::NonzeroConservedOrder { order, norm });
        }
    }
    let u_vec = SymTensor::vector(u)?;
    let mut a = CoeffSet::zeros(dim, d_omega.max_order())?;
    for n in 2..=d_omega.max_order() {
        let dpow = (dim + n) as f64 / 2.0;
        let mut out = d_omega.order(n).scale(theta.powf(dpow));
        match n {
            2 => {}
            3 => out.add_scaled(&sym_prod(&u_vec, a.order(2)), 1.0),
            4 => {
                out.add_scaled(&sym_prod(&u_vec, a.order(3)), 1.0);
                let mut bracket = SymTensor::outer_power(u, 2)?;
                bracket.add_scaled(&delta_power(dim, 1), 1.0 - theta);
                out.add_scaled(&sym_prod(&bracket, a.order(2)), -1.0);
            }
            _ => unreachable!("CoeffSet caps the order at MAX_RANK"),
        }
        *a.order_mut(n) = out;
    }
    Ok(a)
}
