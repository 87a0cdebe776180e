//! Fully symmetric tensors of rank 0..=4 in 1..=3 dimensions.
//!
//! Only the distinct components are stored, one per nondecreasing index
//! tuple, in colexicographic order. Products of symmetric factors follow the
//! distinct-partition convention: `sym_prod(a, b)` sums over the ways of
//! splitting the index slots between the two factors, with no overcount
//! factor, so that e.g. `sym_prod(xi, xi_outer)` for rank 1 x rank 2 has the
//! three terms familiar from symmetric tensor calculus.

use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

/// Highest tensor rank carried anywhere in the crate.
pub const MAX_RANK: usize = 4;
const MAX_DIM: usize = 3;

/// Inline storage: rank 4 in 3 dimensions has 15 distinct components.
type Comps = SmallVec<[f64; 15]>;

/// Binomial coefficient, exact in integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Number of distinct components of a symmetric rank-`rank` tensor.
pub fn component_count(dim: usize, rank: usize) -> usize {
    binomial((dim + rank).saturating_sub(1) as u64, rank as u64) as usize
}

/// Storage position of a nondecreasing index tuple (internal fast path).
pub(crate) fn comp_position_of(sorted: &[usize]) -> usize {
    comp_index(sorted)
}

/// Colexicographic rank of a nondecreasing index tuple.
fn comp_index(sorted: &[usize]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(j, &i)| binomial((i + j) as u64, (j + 1) as u64) as usize)
        .sum()
}

fn check_dim_rank(dim: usize, rank: usize) -> Result<()> {
    if rank > MAX_RANK {
        return Err(Error::UnsupportedRank { rank });
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::DimMismatch(format!(
            "dimension {dim} out of the supported range 1..=3"
        )));
    }
    Ok(())
}

/// A fully symmetric tensor; value type for Hermite coefficients, Kronecker
/// powers and everything built from them.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    rank: u8,
    dim: u8,
    comps: Comps,
}

impl SymTensor {
    pub fn zeros(rank: usize, dim: usize) -> Result<Self> {
        check_dim_rank(dim, rank)?;
        Ok(Self {
            rank: rank as u8,
            dim: dim as u8,
            comps: SmallVec::from_elem(0.0, component_count(dim, rank)),
        })
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut t = Self::zeros(0, dim).expect("rank 0 always valid");
        t.comps[0] = value;
        t
    }

    pub fn vector(values: &[f64]) -> Result<Self> {
        check_dim_rank(values.len(), 1)?;
        Ok(Self {
            rank: 1,
            dim: values.len() as u8,
            comps: Comps::from_slice(values),
        })
    }

    /// Builds a tensor from its distinct components in storage order.
    pub fn from_components(rank: usize, dim: usize, comps: &[f64]) -> Result<Self> {
        check_dim_rank(dim, rank)?;
        let expect = component_count(dim, rank);
        if comps.len() != expect {
            return Err(Error::DimMismatch(format!(
                "rank {rank} in {dim}D has {expect} components, got {}",
                comps.len()
            )));
        }
        Ok(Self {
            rank: rank as u8,
            dim: dim as u8,
            comps: Comps::from_slice(comps),
        })
    }

    /// Kronecker delta as a rank-2 tensor.
    pub fn kron_delta(dim: usize) -> Self {
        delta_power(dim, 1)
    }

    /// Symmetric outer power `u ⊗ … ⊗ u` (`m` factors).
    pub fn outer_power(u: &[f64], m: usize) -> Result<Self> {
        check_dim_rank(u.len(), m)?;
        let dim = u.len();
        let mut out = Self::zeros(m, dim)?;
        let table = comp_table(dim, m);
        for (c, multi) in table.multi.iter().enumerate() {
            out.comps[c] = multi[..m].iter().map(|&i| u[i as usize]).product();
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Component for an arbitrary index tuple; any permutation of the same
    /// indices returns the identical value.
    pub fn get(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), self.rank());
        let mut idx = [0usize; MAX_RANK];
        let idx = &mut idx[..indices.len()];
        idx.copy_from_slice(indices);
        idx.sort_unstable();
        debug_assert!(idx.iter().all(|&i| i < self.dim()));
        self.comps[comp_index(idx)]
    }

    pub fn set(&mut self, indices: &[usize], value: f64) {
        assert_eq!(indices.len(), self.rank());
        let mut idx = [0usize; MAX_RANK];
        let idx = &mut idx[..indices.len()];
        idx.copy_from_slice(indices);
        idx.sort_unstable();
        self.comps[comp_index(idx)] = value;
    }

    /// Distinct components in storage order.
    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.comps
    }

    /// The value of a rank-0 tensor.
    pub fn as_scalar(&self) -> f64 {
        assert_eq!(self.rank, 0);
        self.comps[0]
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.comps.iter_mut() {
            *v *= factor;
        }
        out
    }

    /// `self += factor * other`, shape-checked.
    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        assert_eq!((self.rank, self.dim), (other.rank, other.dim));
        for (a, b) in self.comps.iter_mut().zip(other.comps.iter()) {
            *a += factor * b;
        }
    }

    /// Contraction over one index pair; symmetry makes the choice of pair
    /// immaterial.
    pub fn trace(&self) -> Self {
        assert!(self.rank >= 2, "trace needs rank >= 2");
        let dim = self.dim();
        let out_rank = self.rank() - 2;
        let mut out = Self::zeros(out_rank, dim).expect("shrinking rank stays valid");
        let table = comp_table(dim, out_rank);
        let mut idx = [0usize; MAX_RANK];
        for (c, multi) in table.multi.iter().enumerate() {
            let mut acc = 0.0;
            for p in 0..dim {
                for (slot, &i) in multi[..out_rank].iter().enumerate() {
                    idx[slot] = i as usize;
                }
                idx[out_rank] = p;
                idx[out_rank + 1] = p;
                let idx = &mut idx[..out_rank + 2];
                idx.sort_unstable();
                acc += self.comps[comp_index(idx)];
            }
            out.comps[c] = acc;
        }
        out
    }

    /// Full contraction `a : b` over all indices (with permutation
    /// multiplicities).
    pub fn full_dot(&self, other: &Self) -> f64 {
        assert_eq!((self.rank, self.dim), (other.rank, other.dim));
        let table = comp_table(self.dim(), self.rank());
        self.comps
            .iter()
            .zip(other.comps.iter())
            .zip(table.mult.iter())
            .map(|((a, b), m)| m * a * b)
            .sum()
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Iterates `(component index, index tuple, permutation multiplicity)`.
    pub fn iter_components(&self) -> impl Iterator<Item = (usize, &'static [u8], f64)> {
        let table = comp_table(self.dim(), self.rank());
        let rank = self.rank();
        table
            .multi
            .iter()
            .zip(table.mult.iter())
            .enumerate()
            .map(move |(c, (multi, &m))| (c, &multi[..rank], m))
    }
}

impl Add for &SymTensor {
    type Output = SymTensor;
    fn add(self, rhs: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Mul<f64> for &SymTensor {
    type Output = SymTensor;
    fn mul(self, rhs: f64) -> SymTensor {
        self.scale(rhs)
    }
}

/// Symmetrized product of two symmetric tensors over distinct index
/// partitions: each way of assigning `a.rank()` of the output slots to `a`
/// contributes one term. Rank-0 factors reduce to plain scaling.
pub fn sym_prod(a: &SymTensor, b: &SymTensor) -> SymTensor {
    assert_eq!(a.dim, b.dim);
    if a.rank == 0 {
        return b.scale(a.comps[0]);
    }
    if b.rank == 0 {
        return a.scale(b.comps[0]);
    }
    let rank = a.rank() + b.rank();
    assert!(rank <= MAX_RANK, "product rank {rank} exceeds {MAX_RANK}");
    let dim = a.dim();
    let table = pair_table(dim, a.rank(), b.rank());
    let mut out = SymTensor::zeros(rank, dim).expect("checked above");
    for (c, terms) in table.terms.iter().enumerate() {
        let mut acc = 0.0;
        for &(ia, ib, count) in terms {
            acc += count * a.comps[ia as usize] * b.comps[ib as usize];
        }
        out.comps[c] = acc;
    }
    out
}

/// The `k`-fold Kronecker product `δ^k` summed over distinct pairings
/// (`k = 2` gives `δ_ij δ_kl + δ_ik δ_jl + δ_il δ_jk`). `k = 0` is the
/// scalar 1.
pub fn delta_power(dim: usize, k: usize) -> SymTensor {
    assert!(2 * k <= MAX_RANK);
    tables().delta[dim - 1][k].clone()
}

/// An ordered collection of symmetric tensors, one per order `0..=max_order`;
/// the slot-`n` tensor has rank `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSet {
    dim: u8,
    tensors: Vec<SymTensor>,
}

impl CoeffSet {
    pub fn zeros(dim: usize, max_order: usize) -> Result<Self> {
        check_dim_rank(dim, max_order)?;
        let tensors = (0..=max_order)
            .map(|n| SymTensor::zeros(n, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: dim as u8,
            tensors,
        })
    }

    /// Builds a set from rank-ascending tensors (slot `n` must have rank `n`).
    pub fn from_tensors(tensors: Vec<SymTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::DimMismatch("empty coefficient set".into()));
        }
        let dim = tensors[0].dim();
        for (n, t) in tensors.iter().enumerate() {
            if t.rank() != n || t.dim() != dim {
                return Err(Error::DimMismatch(format!(
                    "slot {n} holds rank {} dim {}, expected rank {n} dim {dim}",
                    t.rank(),
                    t.dim()
                )));
            }
        }
        Ok(Self {
            dim: dim as u8,
            tensors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn max_order(&self) -> usize {
        self.tensors.len() - 1
    }

    pub fn order(&self, n: usize) -> &SymTensor {
        &self.tensors[n]
    }

    pub fn order_mut(&mut self, n: usize) -> &mut SymTensor {
        &mut self.tensors[n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymTensor> {
        self.tensors.iter()
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors.iter().fold(0.0, |m, t| m.max(t.max_abs()))
    }
}

// --------------------------------------------------------------------------
// Static combinatorial tables.

struct CompTable {
    /// Nondecreasing index tuples in storage (colex) order, padded to 4.
    multi: Vec<[u8; 4]>,
    /// Number of distinct permutations of each tuple.
    mult: Vec<f64>,
}

struct PairTable {
    /// Per output component: `(a_component, b_component, partition count)`.
    terms: Vec<Vec<(u16, u16, f64)>>,
}

struct Tables {
    /// `comp[dim-1][rank]`
    comp: Vec<Vec<CompTable>>,
    /// `pair[dim-1][p][q]` for `p, q >= 1`, `p + q <= MAX_RANK`
    pair: Vec<Vec<Vec<Option<PairTable>>>>,
    /// `delta[dim-1][k]` for `2k <= MAX_RANK`
    delta: Vec<Vec<SymTensor>>,
}

static TABLES: OnceLock<Tables> = OnceLock::new();

fn tables() -> &'static Tables {
    TABLES.get_or_init(build_tables)
}

fn comp_table(dim: usize, rank: usize) -> &'static CompTable {
    &tables().comp[dim - 1][rank]
}

fn pair_table(dim: usize, p: usize, q: usize) -> &'static PairTable {
    tables().pair[dim - 1][p][q]
        .as_ref()
        .expect("pair table exists for 1 <= p, q and p + q <= MAX_RANK")
}

fn build_tables() -> Tables {
    let mut comp = Vec::new();
    let mut pair = Vec::new();
    let mut delta = Vec::new();
    for dim in 1..=MAX_DIM {
        comp.push(
            (0..=MAX_RANK)
                .map(|r| build_comp_table(dim, r))
                .collect::<Vec<CompTable>>(),
        );
        let mut by_p: Vec<Vec<Option<PairTable>>> = Vec::new();
        for p in 0..=MAX_RANK {
            let mut by_q: Vec<Option<PairTable>> = Vec::new();
            for q in 0..=MAX_RANK {
                by_q.push((p >= 1 && q >= 1 && p + q <= MAX_RANK).then(|| {
                    build_pair_table(&comp[dim - 1], p, q)
                }));
            }
            by_p.push(by_q);
        }
        pair.push(by_p);
        delta.push(
            (0..=MAX_RANK / 2)
                .map(|k| build_delta_power(&comp[dim - 1], dim, k))
                .collect(),
        );
    }
    Tables { comp, pair, delta }
}

fn build_comp_table(dim: usize, rank: usize) -> CompTable {
    let count = component_count(dim, rank);
    let mut multi = vec![[0u8; 4]; count];
    let mut mult = vec![0.0; count];
    let mut tuple = vec![0usize; rank];
    loop {
        let c = comp_index(&tuple);
        let mut padded = [0u8; 4];
        for (slot, &i) in tuple.iter().enumerate() {
            padded[slot] = i as u8;
        }
        multi[c] = padded;
        mult[c] = permutation_count(&tuple);
        // advance the nondecreasing odometer
        let mut j = rank;
        loop {
            if j == 0 {
                return CompTable { multi, mult };
            }
            j -= 1;
            if tuple[j] + 1 < dim {
                let v = tuple[j] + 1;
                for t in tuple.iter_mut().skip(j) {
                    *t = v;
                }
                break;
            }
        }
    }
}

fn permutation_count(sorted: &[usize]) -> f64 {
    let mut fact = 1u64;
    for j in 1..=sorted.len() as u64 {
        fact *= j;
    }
    let mut run = 1u64;
    for j in 1..=sorted.len() {
        if j < sorted.len() && sorted[j] == sorted[j - 1] {
            run += 1;
            continue;
        }
        let mut run_fact = 1u64;
        for v in 1..=run {
            run_fact *= v;
        }
        fact /= run_fact;
        run = 1;
    }
    fact as f64
}

fn build_pair_table(comp: &[CompTable], p: usize, q: usize) -> PairTable {
    let rank = p + q;
    let out = &comp[rank];
    let mut terms = Vec::with_capacity(out.multi.len());
    for multi in &out.multi {
        let mut acc: Vec<(u16, u16, f64)> = Vec::new();
        // every way of assigning p of the index slots to the first factor
        for mask in 0u32..(1 << rank) {
            if mask.count_ones() as usize != p {
                continue;
            }
            let mut ia = Vec::with_capacity(p);
            let mut ib = Vec::with_capacity(q);
            for (slot, &i) in multi[..rank].iter().enumerate() {
                if mask & (1 << slot) != 0 {
                    ia.push(i as usize);
                } else {
                    ib.push(i as usize);
                }
            }
            ia.sort_unstable();
            ib.sort_unstable();
            let key = (comp_index(&ia) as u16, comp_index(&ib) as u16);
            match acc.iter_mut().find(|(a, b, _)| (*a, *b) == key) {
                Some(entry) => entry.2 += 1.0,
                None => acc.push((key.0, key.1, 1.0)),
            }
        }
        terms.push(acc);
    }
    PairTable { terms }
}

fn build_delta_power(comp: &[CompTable], dim: usize, k: usize) -> SymTensor {
    if k == 0 {
        return SymTensor::scalar(dim, 1.0);
    }
    let rank = 2 * k;
    let mut out = SymTensor::zeros(rank, dim).expect("2k <= MAX_RANK");
    for (c, multi) in comp[rank].multi.iter().enumerate() {
        let slots: Vec<usize> = multi[..rank].iter().map(|&i| i as usize).collect();
        out.comps[c] = count_delta_pairings(&slots);
    }
    out
}

/// Number of ways to split the index values into equal-valued pairs.
fn count_delta_pairings(values: &[usize]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let first = values[0];
    let rest = &values[1..];
    let mut total = 0.0;
    for (j, &v) in rest.iter().enumerate() {
        if v == first {
            let mut remaining = Vec::with_capacity(rest.len() - 1);
            remaining.extend_from_slice(&rest[..j]);
            remaining.extend_from_slice(&rest[j + 1..]);
            total += count_delta_pairings(&remaining);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_counts_match_multiset_formula() {
        assert_eq!(component_count(2, 2), 3);
        assert_eq!(component_count(2, 4), 5);
        assert_eq!(component_count(3, 2), 6);
        assert_eq!(component_count(3, 3), 10);
        assert_eq!(component_count(3, 4), 15);
    }

    #[test]
    fn accessor_is_permutation_invariant() {
        let mut t = SymTensor::zeros(3, 3).unwrap();
        t.set(&[2, 0, 1], 7.5);
        assert_eq!(t.get(&[0, 1, 2]), 7.5);
        assert_eq!(t.get(&[1, 2, 0]), 7.5);
        assert_eq!(t.get(&[2, 1, 0]), 7.5);
    }

    #[test]
    fn kron_delta_has_unit_diagonal() {
        let d = SymTensor::kron_delta(3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(d.get(&[i, j]), expect);
            }
        }
    }

    #[test]
    fn delta_squared_is_the_three_pairing_sum() {
        let d2 = delta_power(2, 2);
        assert_eq!(d2.get(&[0, 0, 0, 0]), 3.0);
        assert_eq!(d2.get(&[0, 0, 1, 1]), 1.0);
        assert_eq!(d2.get(&[0, 0, 0, 1]), 0.0);
        assert_eq!(d2.get(&[1, 1, 1, 1]), 3.0);
        let d2 = delta_power(3, 2);
        // delta_ij delta_kl + delta_ik delta_jl + delta_il delta_jk at iijk
        assert_eq!(d2.get(&[0, 0, 1, 2]), 0.0);
        assert_eq!(d2.get(&[0, 1, 0, 1]), 1.0);
    }

    #[test]
    fn sym_prod_of_two_vectors() {
        let a = SymTensor::vector(&[1.0, 2.0]).unwrap();
        let b = SymTensor::vector(&[3.0, 5.0]).unwrap();
        let p = sym_prod(&a, &b);
        // (a b)_ij = a_i b_j + a_j b_i
        assert_eq!(p.get(&[0, 0]), 6.0);
        assert_eq!(p.get(&[0, 1]), 1.0 * 5.0 + 2.0 * 3.0);
        assert_eq!(p.get(&[1, 1]), 20.0);
    }

    #[test]
    fn outer_power_matches_repeated_components() {
        let u = [0.5, -2.0, 1.5];
        let t = SymTensor::outer_power(&u, 3).unwrap();
        assert_eq!(t.get(&[0, 1, 2]), 0.5 * -2.0 * 1.5);
        assert_eq!(t.get(&[1, 1, 1]), -8.0);
    }

    #[test]
    fn trace_contracts_one_pair() {
        let mut t = SymTensor::zeros(2, 2).unwrap();
        t.set(&[0, 0], 2.0);
        t.set(&[1, 1], 3.0);
        t.set(&[0, 1], -1.0);
        assert_eq!(t.trace().as_scalar(), 5.0);

        let d2 = delta_power(3, 2);
        let tr = d2.trace();
        // trace of the isotropic rank-4 tensor is (D + 2) delta
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 5.0 } else { 0.0 };
                assert_eq!(tr.get(&[i, j]), expect);
            }
        }
    }

    #[test]
    fn full_dot_counts_permutations() {
        let mut a = SymTensor::zeros(2, 2).unwrap();
        a.set(&[0, 1], 1.0);
        assert_eq!(a.full_dot(&a), 2.0);
        let d = SymTensor::kron_delta(3);
        assert_eq!(d.full_dot(&d), 3.0);
    }

    #[test]
    fn coeff_set_rejects_rank_mismatch() {
        let bad = vec![SymTensor::scalar(2, 1.0), SymTensor::scalar(2, 1.0)];
        assert!(CoeffSet::from_tensors(bad).is_err());
    }

    #[test]
    fn add_and_scale_preserve_shape() {
        let a = SymTensor::outer_power(&[1.0, 2.0], 2).unwrap();
        let b = SymTensor::kron_delta(2);
        let c = &(&a + &b) - &b;
        assert_eq!(c.rank(), 2);
        for (x, y) in c.components().iter().zip(a.components()) {
            assert!((x - y).abs() < 1e-15);
        }
        let s = &a * 2.0;
        assert_eq!(s.get(&[1, 1]), 8.0);
    }
}
