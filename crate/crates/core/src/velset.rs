//! Quadrature velocity sets: integer lattice abscissas with Gaussian weights.
//!
//! A set of degree `Q` integrates `ω(ξ) p(ξ)` exactly for every polynomial
//! `p` of total degree `<= Q`, which makes populations and Hermite moments up
//! to order `N` interchangeable as long as `Q >= 2N`. Streaming displacements
//! are the raw integer vectors; the dimensionless abscissas are `ξ_i = r c_i`.

use crate::error::{Error, Result};
use crate::hermite::hermite_eval;
use crate::linalg;
use crate::tensor::{component_count, CoeffSet, MAX_RANK};
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock};

/// Discrete velocity set with quadrature weights and lattice scale.
#[derive(Debug)]
pub struct VelocitySet {
    name: String,
    dim: usize,
    cvecs: Vec<Vec<i64>>,
    weights: Vec<f64>,
    scale: f64,
    degree: u32,
    /// abscissas, row-major `d x dim`
    xi: Vec<f64>,
    kernels: [OnceLock<Arc<MomentKernel>>; MAX_RANK + 1],
}

impl VelocitySet {
    /// Builds a set and checks the structural invariants: consistent shapes,
    /// positive weights, and closure under coordinate permutations and sign
    /// flips (weights equal within each symmetry orbit).
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        cvecs: Vec<Vec<i64>>,
        weights: Vec<f64>,
        scale: f64,
        degree: u32,
    ) -> Result<Self> {
        let name = name.into();
        if dim == 0 || dim > 3 {
            return Err(Error::DimMismatch(format!(
                "velocity set dimension {dim} out of the supported range 1..=3"
            )));
        }
        if cvecs.len() != weights.len() || cvecs.is_empty() {
            return Err(Error::DimMismatch(format!(
                "{} vectors vs {} weights",
                cvecs.len(),
                weights.len()
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::ZeroScale);
        }
        for c in &cvecs {
            if c.len() != dim {
                return Err(Error::DimMismatch(format!(
                    "vector {c:?} does not have {dim} components"
                )));
            }
        }
        for &w in &weights {
            if !(w > 0.0) {
                return Err(Error::DimMismatch(format!("non-positive weight {w}")));
            }
        }
        let set = Self {
            name,
            dim,
            xi: cvecs
                .iter()
                .flat_map(|c| c.iter().map(|&x| x as f64 * scale))
                .collect(),
            cvecs,
            weights,
            scale,
            degree,
            kernels: Default::default(),
        };
        set.check_symmetry_closure()?;
        Ok(set)
    }

    fn check_symmetry_closure(&self) -> Result<()> {
        let find = |v: &[i64]| -> Option<usize> { self.cvecs.iter().position(|c| c == v) };
        for (i, c) in self.cvecs.iter().enumerate() {
            for image in symmetry_orbit(c) {
                match find(&image) {
                    Some(j) if (self.weights[j] - self.weights[i]).abs() <= 1e-14 => {}
                    Some(j) => {
                        return Err(Error::DimMismatch(format!(
                            "weights differ within a symmetry orbit: {:?} vs {:?}",
                            self.cvecs[i], self.cvecs[j]
                        )))
                    }
                    None => {
                        return Err(Error::DimMismatch(format!(
                            "set not closed under lattice symmetry: image {image:?} of {c:?} missing"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of discrete velocities.
    pub fn count(&self) -> usize {
        self.cvecs.len()
    }

    /// Integer streaming displacements.
    pub fn cvecs(&self) -> &[Vec<i64>] {
        &self.cvecs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Lattice scale `r`; the abscissas are `ξ_i = r c_i`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Declared algebraic degree of exactness.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Abscissa of population `i`.
    pub fn xi(&self, i: usize) -> &[f64] {
        &self.xi[i * self.dim..(i + 1) * self.dim]
    }

    /// Moment kernel for Hermite orders `0..=n_max`, built once and cached.
    pub fn kernel(&self, n_max: usize) -> Result<Arc<MomentKernel>> {
        if n_max > MAX_RANK {
            return Err(Error::UnsupportedRank { rank: n_max });
        }
        if 2 * n_max as u32 > self.degree {
            return Err(Error::OrderDegreeMismatch {
                order: n_max,
                needed: 2 * n_max as u32,
                degree: self.degree,
                set: self.name.clone(),
            });
        }
        Ok(self.kernels[n_max]
            .get_or_init(|| Arc::new(MomentKernel::build(self, n_max)))
            .clone())
    }
}

/// All images of an integer vector under coordinate permutations and sign
/// flips, deduplicated.
pub fn symmetry_orbit(c: &[i64]) -> Vec<Vec<i64>> {
    let mut perms: Vec<Vec<i64>> = Vec::new();
    let mut v = c.to_vec();
    permute_into(&mut v, 0, &mut perms);
    let mut out: Vec<Vec<i64>> = Vec::new();
    for p in perms {
        let dim = p.len();
        for mask in 0u32..(1 << dim) {
            let image: Vec<i64> = p
                .iter()
                .enumerate()
                .map(|(j, &x)| if mask & (1 << j) != 0 { -x } else { x })
                .collect();
            if !out.contains(&image) {
                out.push(image);
            }
        }
    }
    out.sort();
    out
}

fn permute_into(v: &mut Vec<i64>, k: usize, out: &mut Vec<Vec<i64>>) {
    if k + 1 >= v.len() {
        if !out.contains(v) {
            out.push(v.clone());
        }
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_into(v, k + 1, out);
        v.swap(k, i);
    }
}

// --------------------------------------------------------------------------
// Gaussian moments and validation.

/// `∫ ω(ξ) Π ξ_j^{e_j} dξ`: products of double factorials for even
/// exponents, zero otherwise.
pub fn gaussian_moment(exponents: &[u32]) -> f64 {
    let mut m = 1.0;
    for &e in exponents {
        if e % 2 == 1 {
            return 0.0;
        }
        let mut df = 1.0f64;
        let mut k = e as i64 - 1;
        while k > 1 {
            df *= k as f64;
            k -= 2;
        }
        m *= df;
    }
    m
}

/// All exponent vectors with total degree `<= max_degree`, ordered by total
/// degree and then lexicographically.
pub fn monomials(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=max_degree {
        let mut current = vec![0u32; dim];
        fill_monomials(dim, 0, total, &mut current, &mut out);
    }
    out
}

fn fill_monomials(
    dim: usize,
    slot: usize,
    remaining: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if slot + 1 == dim {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[slot] = e;
        fill_monomials(dim, slot + 1, remaining - e, current, out);
    }
}

/// Outcome of checking the quadrature identity monomial by monomial.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub degree: u32,
    pub max_defect: f64,
    /// `(exponents, quadrature value, exact value)` of the worst monomial.
    pub worst: (Vec<u32>, f64, f64),
    /// First monomial whose defect exceeds the tolerance, in degree order.
    pub first_failure: Option<(Vec<u32>, f64, f64)>,
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub const VALIDATE_TOLERANCE: f64 = 1e-12;

/// Checks the Gaussian-moment identity for every monomial up to the set's
/// declared degree.
pub fn validate(set: &VelocitySet) -> ValidationReport {
    validate_at_degree(set, set.degree, VALIDATE_TOLERANCE)
}

pub fn validate_at_degree(set: &VelocitySet, degree: u32, tolerance: f64) -> ValidationReport {
    let mut report = ValidationReport {
        degree,
        max_defect: 0.0,
        worst: (vec![0; set.dim()], 0.0, 0.0),
        first_failure: None,
        tolerance,
    };
    for expo in monomials(set.dim(), degree) {
        let mut sum = 0.0;
        for i in 0..set.count() {
            let xi = set.xi(i);
            let mut p = set.weights[i];
            for (j, &e) in expo.iter().enumerate() {
                p *= xi[j].powi(e as i32);
            }
            sum += p;
        }
        let exact = gaussian_moment(&expo);
        let defect = (sum - exact).abs();
        if defect > report.max_defect {
            report.max_defect = defect;
            report.worst = (expo.clone(), sum, exact);
        }
        if defect > tolerance && report.first_failure.is_none() {
            report.first_failure = Some((expo, sum, exact));
        }
    }
    report
}

// --------------------------------------------------------------------------
// Weight derivation.

/// Finds positive per-group weights and the lattice scale `r` so that the
/// grouped vectors form a degree-`q` quadrature. Groups must each be closed
/// under lattice symmetry; members of a group share one weight.
///
/// The moment conditions are linear in the weights at fixed `r`; a scan over
/// `r` followed by a Gauss-Newton polish of the full system pins both.
pub fn derive_weights(groups: &[Vec<Vec<i64>>], q: u32) -> Result<(Vec<f64>, f64)> {
    let dim = groups
        .first()
        .and_then(|g| g.first())
        .map(|c| c.len())
        .ok_or_else(|| Error::DimMismatch("empty group list".into()))?;
    for g in groups {
        for c in g {
            if c.len() != dim {
                return Err(Error::DimMismatch(format!(
                    "group member {c:?} does not have {dim} components"
                )));
            }
        }
    }
    // order-independent internal arrangement
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&g| {
        let mut members = groups[g].clone();
        members.sort();
        (
            members[0].iter().map(|&x| x * x).sum::<i64>(),
            members[0].clone(),
        )
    });

    // even-degree moment conditions, deduplicated by exponent multiset
    let mut conds: Vec<Vec<u32>> = Vec::new();
    for expo in monomials(dim, q) {
        if expo.iter().any(|&e| e % 2 == 1) {
            continue;
        }
        let mut key = expo.clone();
        key.sort_unstable();
        if !conds.iter().any(|c| {
            let mut k = c.clone();
            k.sort_unstable();
            k == key
        }) {
            conds.push(expo);
        }
    }

    // per-group integer power sums, independent of r
    let power_sum = |g: usize, expo: &[u32]| -> f64 {
        groups[order[g]]
            .iter()
            .map(|c| {
                c.iter()
                    .zip(expo)
                    .map(|(&x, &e)| (x as f64).powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    };
    let sums: Vec<Vec<f64>> = (0..order.len())
        .map(|g| conds.iter().map(|e| power_sum(g, e)).collect())
        .collect();
    let degrees: Vec<i32> = conds.iter().map(|e| e.iter().sum::<u32>() as i32).collect();
    let rhs: Vec<f64> = conds.iter().map(|e| gaussian_moment(e)).collect();

    let residual_at = |r: f64| -> (Vec<f64>, f64) {
        let a: Vec<Vec<f64>> = (0..conds.len())
            .map(|m| {
                (0..order.len())
                    .map(|g| r.powi(degrees[m]) * sums[g][m])
                    .collect()
            })
            .collect();
        match linalg::lstsq_real(&a, &rhs) {
            Some(w) => {
                let res: f64 = (0..conds.len())
                    .map(|m| {
                        let lhs: f64 = (0..w.len()).map(|g| a[m][g] * w[g]).sum();
                        (lhs - rhs[m]).powi(2)
                    })
                    .sum();
                (w, res.sqrt())
            }
            None => (vec![0.0; order.len()], f64::INFINITY),
        }
    };

    // coarse scan for candidate scales
    let mut best: Option<(f64, f64)> = None; // (r, residual)
    let mut r = 0.2;
    while r <= 4.0 {
        let (w, res) = residual_at(r);
        if w.iter().all(|&x| x > 0.0) {
            if best.map_or(true, |(_, b)| res < b) {
                best = Some((r, res));
            }
        }
        r += 0.002;
    }
    let (mut r_best, _) = best.ok_or(Error::InfeasibleWeights {
        residual: f64::INFINITY,
    })?;

    // golden-section refinement of the scan minimum
    let phi = 0.5 * (3.0 - 5.0f64.sqrt());
    let (mut lo, mut hi) = (r_best - 0.004, r_best + 0.004);
    for _ in 0..200 {
        let m1 = lo + phi * (hi - lo);
        let m2 = hi - phi * (hi - lo);
        if residual_at(m1).1 < residual_at(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    r_best = 0.5 * (lo + hi);
    let (mut w_best, _) = residual_at(r_best);

    // Newton polish on (w, r) jointly; the deduplicated system is square for
    // the standard sets, so this converges to round-off
    let defect = |w: &[f64], r: f64| -> f64 {
        (0..conds.len())
            .map(|m| {
                let lhs: f64 = (0..w.len()).map(|g| r.powi(degrees[m]) * sums[g][m] * w[g]).sum();
                (lhs - rhs[m]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    };
    for _ in 0..60 {
        let jac: Vec<Vec<f64>> = (0..conds.len())
            .map(|m| {
                let mut row: Vec<f64> = (0..order.len())
                    .map(|g| r_best.powi(degrees[m]) * sums[g][m])
                    .collect();
                let dr: f64 = (0..order.len())
                    .map(|g| {
                        degrees[m] as f64 * r_best.powi(degrees[m] - 1) * sums[g][m] * w_best[g]
                    })
                    .sum();
                row.push(dr);
                row
            })
            .collect();
        let f: Vec<f64> = (0..conds.len())
            .map(|m| {
                let lhs: f64 = (0..order.len())
                    .map(|g| r_best.powi(degrees[m]) * sums[g][m] * w_best[g])
                    .sum();
                rhs[m] - lhs
            })
            .collect();
        let step = if conds.len() == order.len() + 1 {
            linalg::solve_real(jac, f).map(|(x, _)| x)
        } else {
            linalg::lstsq_real(&jac, &f)
        };
        let step = match step {
            Some(s) => s,
            None => break,
        };
        for g in 0..order.len() {
            w_best[g] += step[g];
        }
        r_best += step[order.len()];
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-15 {
            break;
        }
    }

    let final_res = defect(&w_best, r_best);
    if !(r_best > 0.0) || w_best.iter().any(|&w| !(w > 0.0)) || final_res > 1e-10 {
        return Err(Error::InfeasibleWeights {
            residual: final_res,
        });
    }

    // back to the caller's group order
    let mut weights = vec![0.0; groups.len()];
    for (slot, &g) in order.iter().enumerate() {
        weights[g] = w_best[slot];
    }
    Ok((weights, r_best))
}

/// Assembles a [`VelocitySet`] from grouped vectors and per-group weights.
pub fn assemble_set(
    name: impl Into<String>,
    groups: &[Vec<Vec<i64>>],
    group_weights: &[f64],
    scale: f64,
    degree: u32,
) -> Result<VelocitySet> {
    let dim = groups[0][0].len();
    let mut cvecs = Vec::new();
    let mut weights = Vec::new();
    for (g, members) in groups.iter().enumerate() {
        for c in members {
            cvecs.push(c.clone());
            weights.push(group_weights[g]);
        }
    }
    VelocitySet::new(name, dim, cvecs, weights, scale, degree)
}

// --------------------------------------------------------------------------
// Built-in sets.

pub const BUILTIN_NAMES: [&str; 3] = ["D1Q3", "D2Q9", "D2Q37"];

/// Returns a built-in set by name (`D1Q3`, `D2Q9`, or `D2Q37`).
pub fn builtin(name: &str) -> Result<Arc<VelocitySet>> {
    match name {
        "D1Q3" => Ok(d1q3()),
        "D2Q9" => Ok(d2q9()),
        "D2Q37" => d2q37(),
        other => Err(Error::DimMismatch(format!(
            "unknown velocity set `{other}` (built-ins: {BUILTIN_NAMES:?})"
        ))),
    }
}

pub fn d1q3() -> Arc<VelocitySet> {
    static SET: OnceLock<Arc<VelocitySet>> = OnceLock::new();
    SET.get_or_init(|| {
        Arc::new(
            VelocitySet::new(
                "D1Q3",
                1,
                vec![vec![0], vec![1], vec![-1]],
                vec![2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
                3.0f64.sqrt(),
                5,
            )
            .expect("d1q3 constants are well-formed"),
        )
    })
    .clone()
}

pub fn d2q9() -> Arc<VelocitySet> {
    static SET: OnceLock<Arc<VelocitySet>> = OnceLock::new();
    SET.get_or_init(|| {
        let mut cvecs = vec![vec![0, 0]];
        let mut weights = vec![4.0 / 9.0];
        for c in symmetry_orbit(&[1, 0]) {
            cvecs.push(c);
            weights.push(1.0 / 9.0);
        }
        for c in symmetry_orbit(&[1, 1]) {
            cvecs.push(c);
            weights.push(1.0 / 36.0);
        }
        Arc::new(
            VelocitySet::new("D2Q9", 2, cvecs, weights, 3.0f64.sqrt(), 5)
                .expect("d2q9 constants are well-formed"),
        )
    })
    .clone()
}

/// Representatives of the eight symmetry groups of the 37-point degree-9 set.
pub fn d2q37_group_reps() -> [[i64; 2]; 8] {
    [
        [0, 0],
        [1, 0],
        [1, 1],
        [2, 0],
        [2, 1],
        [2, 2],
        [3, 0],
        [3, 1],
    ]
}

/// The 37-point degree-9 set. Weights and scale are not transcribed from
/// tables: they are derived from the moment conditions on first use and
/// gated by [`validate`].
pub fn d2q37() -> Result<Arc<VelocitySet>> {
    static SET: OnceLock<std::result::Result<Arc<VelocitySet>, String>> = OnceLock::new();
    SET.get_or_init(|| {
        let groups: Vec<Vec<Vec<i64>>> = d2q37_group_reps()
            .iter()
            .map(|rep| symmetry_orbit(rep))
            .collect();
        let (weights, scale) = derive_weights(&groups, 9).map_err(|e| e.to_string())?;
        let set = assemble_set("D2Q37", &groups, &weights, scale, 9).map_err(|e| e.to_string())?;
        let report = validate(&set);
        if !report.passed() {
            return Err(format!(
                "derived D2Q37 fails validation: max defect {:.3e}",
                report.max_defect
            ));
        }
        Ok(Arc::new(set))
    })
    .clone()
    .map_err(Error::SetConstruction)
}

// --------------------------------------------------------------------------
// Population <-> coefficient isomorphism.

/// Precomputed Hermite values per population, for fast moment projection and
/// reconstruction. `moments` computes `a = Σ_i f_i H(ξ_i)`; `populations`
/// computes `f_i = w_i Σ_n a_n : H_n(ξ_i) / n!`.
#[derive(Debug)]
pub struct MomentKernel {
    n_max: usize,
    dim: usize,
    count: usize,
    comps: usize,
    offsets: Vec<usize>,
    /// `d x comps`: stacked distinct components of `H^(0..=N)(ξ_i)`
    h: Vec<f64>,
    /// `d x comps`: `w_i * mult_c / n! * h`
    v: Vec<f64>,
}

impl MomentKernel {
    fn build(set: &VelocitySet, n_max: usize) -> Self {
        let dim = set.dim();
        let mut offsets = Vec::with_capacity(n_max + 2);
        let mut comps = 0;
        for n in 0..=n_max {
            offsets.push(comps);
            comps += component_count(dim, n);
        }
        offsets.push(comps);
        let count = set.count();
        let mut h = vec![0.0; count * comps];
        let mut v = vec![0.0; count * comps];
        let mut factorial = vec![1.0f64; n_max + 1];
        for n in 1..=n_max {
            factorial[n] = factorial[n - 1] * n as f64;
        }
        for i in 0..count {
            let xi = set.xi(i);
            for n in 0..=n_max {
                let hn = hermite_eval(n, xi).expect("n <= MAX_RANK");
                let base = i * comps + offsets[n];
                for (c, (_, _, mult)) in hn.iter_components().enumerate() {
                    h[base + c] = hn.components()[c];
                    v[base + c] = set.weights()[i] * mult / factorial[n] * hn.components()[c];
                }
            }
        }
        Self {
            n_max,
            dim,
            count,
            comps,
            offsets,
            h,
            v,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of stacked moment components.
    pub fn component_total(&self) -> usize {
        self.comps
    }

    /// Offset of order `n` in a stacked moment vector.
    pub fn order_offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    /// `out[c] = Σ_i f[i] H_c(ξ_i)` over all stacked components. Fused
    /// multiply-adds keep the accumulated rounding bias low enough for the
    /// long-run conservation budget.
    pub fn moments(&self, f: &[f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.count);
        debug_assert_eq!(out.len(), self.comps);
        out.fill(0.0);
        for (i, &fi) in f.iter().enumerate() {
            let row = &self.h[i * self.comps..(i + 1) * self.comps];
            for (o, hv) in out.iter_mut().zip(row) {
                *o = fi.mul_add(*hv, *o);
            }
        }
    }

    /// `out[i] = w_i Σ_n a_n : H_n(ξ_i) / n!` from a stacked moment vector.
    pub fn populations(&self, a: &[f64], out: &mut [f64]) {
        debug_assert_eq!(a.len(), self.comps);
        debug_assert_eq!(out.len(), self.count);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.v[i * self.comps..(i + 1) * self.comps];
            let mut acc = 0.0f64;
            for (v, a) in row.iter().zip(a) {
                acc = v.mul_add(*a, acc);
            }
            *o = acc;
        }
    }

    /// Copies a [`CoeffSet`] into the stacked layout.
    pub fn stack_coeffs(&self, a: &CoeffSet, out: &mut [f64]) {
        debug_assert!(a.max_order() <= self.n_max);
        out.fill(0.0);
        for n in 0..=a.max_order() {
            let base = self.offsets[n];
            out[base..base + a.order(n).components().len()]
                .copy_from_slice(a.order(n).components());
        }
    }

    /// Reads a stacked moment vector back into a [`CoeffSet`].
    pub fn unstack_coeffs(&self, stacked: &[f64]) -> CoeffSet {
        let mut set = CoeffSet::zeros(self.dim, self.n_max).expect("kernel dims valid");
        for n in 0..=self.n_max {
            let base = self.offsets[n];
            set.order_mut(n)
                .components_mut()
                .copy_from_slice(&stacked[base..self.offsets[n + 1]]);
        }
        set
    }
}

/// Hermite coefficients of a discrete population vector:
/// `a^(n) = Σ_i f_i H^(n)(ξ_i)` for `n = 0..=n_max`.
pub fn coeffs_from_populations(f: &[f64], set: &VelocitySet, n_max: usize) -> Result<CoeffSet> {
    if f.len() != set.count() {
        return Err(Error::PopulationLength {
            got: f.len(),
            expected: set.count(),
        });
    }
    let kernel = set.kernel(n_max)?;
    let mut stacked = vec![0.0; kernel.component_total()];
    kernel.moments(f, &mut stacked);
    Ok(kernel.unstack_coeffs(&stacked))
}

/// Populations carrying the given Hermite coefficients:
/// `f_i = w_i Σ_n a^(n) : H^(n)(ξ_i) / n!`.
pub fn populations_from_coeffs(a: &CoeffSet, set: &VelocitySet) -> Result<Vec<f64>> {
    let kernel = set.kernel(a.max_order())?;
    let mut stacked = vec![0.0; kernel.component_total()];
    kernel.stack_coeffs(a, &mut stacked);
    let mut f = vec![0.0; set.count()];
    kernel.populations(&stacked, &mut f);
    Ok(f)
}

// --------------------------------------------------------------------------
// Plain-text file format: header lines `D`, `d`, `Q`, `r`, then one row per
// velocity with the integer components followed by the weight.

pub fn write_file(set: &VelocitySet, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# velocity set {}", set.name())?;
    writeln!(out, "D {}", set.dim())?;
    writeln!(out, "d {}", set.count())?;
    writeln!(out, "Q {}", set.degree())?;
    writeln!(out, "r {:.16e}", set.scale())?;
    for (c, w) in set.cvecs().iter().zip(set.weights()) {
        let comps: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{} {:.16e}", comps.join(" "), w)?;
    }
    Ok(())
}

pub fn read_file(path: &Path) -> Result<VelocitySet> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    let mut dim: Option<usize> = None;
    let mut count: Option<usize> = None;
    let mut degree: Option<u32> = None;
    let mut scale: Option<f64> = None;
    let mut cvecs = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let bad = |msg: &str| Error::VelocitySetFile {
            line: lineno + 1,
            msg: msg.into(),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "D" => dim = Some(fields.get(1).ok_or_else(|| bad("missing D value"))?.parse().map_err(|_| bad("bad D value"))?),
            "d" => count = Some(fields.get(1).ok_or_else(|| bad("missing d value"))?.parse().map_err(|_| bad("bad d value"))?),
            "Q" => degree = Some(fields.get(1).ok_or_else(|| bad("missing Q value"))?.parse().map_err(|_| bad("bad Q value"))?),
            "r" => scale = Some(fields.get(1).ok_or_else(|| bad("missing r value"))?.parse().map_err(|_| bad("bad r value"))?),
            _ => {
                let d = dim.ok_or_else(|| bad("velocity row before D header"))?;
                if fields.len() != d + 1 {
                    return Err(bad(&format!("expected {} integers and a weight", d)));
                }
                let mut c = Vec::with_capacity(d);
                for f in &fields[..d] {
                    c.push(f.parse().map_err(|_| bad("bad integer component"))?);
                }
                cvecs.push(c);
                weights.push(fields[d].parse().map_err(|_| bad("bad weight"))?);
            }
        }
    }
    let bad = |msg: &str| Error::VelocitySetFile { line: 0, msg: msg.into() };
    let dim = dim.ok_or_else(|| bad("missing D header"))?;
    let degree = degree.ok_or_else(|| bad("missing Q header"))?;
    let scale = scale.ok_or_else(|| bad("missing r header"))?;
    if let Some(cnt) = count {
        if cnt != cvecs.len() {
            return Err(bad(&format!(
                "header d = {cnt} but {} rows present",
                cvecs.len()
            )));
        }
    }
    VelocitySet::new(name, dim, cvecs, weights, scale, degree)
}
