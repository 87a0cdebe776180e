//! Irreducible (traceless) decomposition of symmetric rank-2/3/4 tensors.
//!
//! A rank-n symmetric tensor splits into the minimal components closed under
//! spatial rotation by repeatedly subtracting distributed traces. The split
//! is exact: `reassemble(decompose(a)) == a` to round-off, and every primed
//! part contracts to zero on any index pair.

use crate::error::{Error, Result};
use crate::tensor::{delta_power, sym_prod, SymTensor};

/// Number of irreducible components of a symmetric tensor of the given rank.
pub fn irrep_count(rank: usize) -> Result<usize> {
    match rank {
        2 | 3 => Ok(2),
        4 => Ok(3),
        _ => Err(Error::UndecomposableRank { rank }),
    }
}

/// The irreducible pieces of one symmetric tensor, in the order they appear
/// on the right-hand side of the decomposition:
///
/// * rank 2: traceless rank-2, trace scalar
/// * rank 3: traceless rank-3, trace vector
/// * rank 4: traceless rank-4, traceless rank-2 (of the contracted tensor),
///   double-trace scalar
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepParts {
    rank: usize,
    dim: usize,
    parts: Vec<SymTensor>,
}

impl IrrepParts {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[SymTensor] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> &SymTensor {
        &self.parts[k]
    }

    pub fn from_parts(rank: usize, parts: Vec<SymTensor>) -> Result<Self> {
        if parts.len() != irrep_count(rank)? {
            return Err(Error::DimMismatch(format!(
                "rank {rank} needs {} parts, got {}",
                irrep_count(rank)?,
                parts.len()
            )));
        }
        let dim = parts[0].dim();
        let expected_ranks: &[usize] = match rank {
            2 => &[2, 0],
            3 => &[3, 1],
            _ => &[4, 2, 0],
        };
        for (part, &want) in parts.iter().zip(expected_ranks) {
            if part.rank() != want || part.dim() != dim {
                return Err(Error::DimMismatch(format!(
                    "part of rank {} dim {}, expected rank {want} dim {dim}",
                    part.rank(),
                    part.dim()
                )));
            }
        }
        Ok(Self { rank, dim, parts })
    }
}

/// Splits a rank-2/3/4 symmetric tensor into its traceless irreducible parts.
pub fn decompose(a: &SymTensor) -> Result<IrrepParts> {
    irrep_count(a.rank())?;
    let dim = a.dim() as f64;
    let delta = delta_power(a.dim(), 1);
    let parts = match a.rank() {
        2 => {
            let s = a.trace();
            let mut prime = a.clone();
            prime.add_scaled(&delta, -s.as_scalar() / dim);
            vec![prime, s]
        }
        3 => {
            let t = a.trace();
            let mut prime = a.clone();
            prime.add_scaled(&sym_prod(&t, &delta), -1.0 / (dim + 2.0));
            vec![prime, t]
        }
        _ => {
            let contracted = a.trace();
            let s = contracted.trace();
            let mut second = contracted.clone();
            second.add_scaled(&delta, -s.as_scalar() / dim);
            let mut prime = a.clone();
            prime.add_scaled(&sym_prod(&second, &delta), -1.0 / (dim + 4.0));
            prime.add_scaled(
                &delta_power(a.dim(), 2),
                -s.as_scalar() / (dim * (dim + 2.0)),
            );
            vec![prime, second, s]
        }
    };
    IrrepParts::from_parts(a.rank(), parts)
}

/// Rebuilds the full symmetric tensor from its irreducible parts.
pub fn reassemble(parts: &IrrepParts) -> Result<SymTensor> {
    let dim = parts.dim() as f64;
    let delta = delta_power(parts.dim(), 1);
    let mut out = parts.part(0).clone();
    match parts.rank() {
        2 => out.add_scaled(&delta, parts.part(1).as_scalar() / dim),
        3 => out.add_scaled(&sym_prod(parts.part(1), &delta), 1.0 / (dim + 2.0)),
        4 => {
            out.add_scaled(&sym_prod(parts.part(1), &delta), 1.0 / (dim + 4.0));
            out.add_scaled(
                &delta_power(parts.dim(), 2),
                parts.part(2).as_scalar() / (dim * (dim + 2.0)),
            );
        }
        _ => unreachable!("IrrepParts only holds ranks 2..=4"),
    }
    Ok(out)
}

/// Scales each irreducible part by `-1/τ` for its own relaxation time; this
/// is the per-component collision increment in the co-moving frame.
pub fn relax_parts(parts: &IrrepParts, taus: &[f64]) -> Result<IrrepParts> {
    if taus.len() != parts.parts().len() {
        return Err(Error::DimMismatch(format!(
            "{} relaxation times for {} parts",
            taus.len(),
            parts.parts().len()
        )));
    }
    for &tau in taus {
        if tau <= 0.0 {
            return Err(Error::NonPositiveTau(tau));
        }
    }
    let relaxed = parts
        .parts()
        .iter()
        .zip(taus)
        .map(|(p, &tau)| p.scale(-1.0 / tau))
        .collect();
    IrrepParts::from_parts(parts.rank(), relaxed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_two_explicit() {
        let a = SymTensor::from_components(2, 2, &[2.0, 1.0, 0.0]).unwrap();
        let parts = decompose(&a).unwrap();
        assert_eq!(parts.part(1).as_scalar(), 2.0);
        let prime = parts.part(0);
        assert_eq!(prime.get(&[0, 0]), 1.0);
        assert_eq!(prime.get(&[0, 1]), 1.0);
        assert_eq!(prime.get(&[1, 1]), -1.0);
    }

    #[test]
    fn pure_trace_has_no_deviatoric_part() {
        for dim in [2usize, 3] {
            let c = 1.75;
            let a = delta_power(dim, 1).scale(c);
            let parts = decompose(&a).unwrap();
            assert!(parts.part(0).max_abs() < 1e-15);
            assert!((parts.part(1).as_scalar() - c * dim as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_three_single_component() {
        let mut a = SymTensor::zeros(3, 2).unwrap();
        a.set(&[0, 0, 0], 1.0);
        let parts = decompose(&a).unwrap();
        assert!((parts.part(0).get(&[0, 0, 0]) - 0.25).abs() < 1e-15);
        assert!((parts.part(1).get(&[0]) - 1.0).abs() < 1e-15);
        assert!(parts.part(1).get(&[1]).abs() < 1e-15);
    }

    #[test]
    fn reassemble_trivia() {
        let zero = SymTensor::zeros(4, 3).unwrap();
        let parts = decompose(&zero).unwrap();
        assert_eq!(reassemble(&parts).unwrap().max_abs(), 0.0);

        let dim = 2usize;
        let parts = IrrepParts::from_parts(
            2,
            vec![
                SymTensor::zeros(2, dim).unwrap(),
                SymTensor::scalar(dim, dim as f64),
            ],
        )
        .unwrap();
        let back = reassemble(&parts).unwrap();
        for (x, y) in back
            .components()
            .iter()
            .zip(delta_power(dim, 1).components())
        {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn relax_negates_at_unit_tau_and_freezes_at_huge_tau() {
        let mut a = SymTensor::zeros(2, 3).unwrap();
        a.set(&[0, 1], 1.0);
        a.set(&[2, 2], -0.5);
        let parts = decompose(&a).unwrap();
        let negated = relax_parts(&parts, &[1.0, 1.0]).unwrap();
        for (p, n) in parts.parts().iter().zip(negated.parts()) {
            for (x, y) in p.components().iter().zip(n.components()) {
                assert!((x + y).abs() < 1e-15);
            }
        }
        let frozen = relax_parts(&parts, &[1e12, 1e12]).unwrap();
        assert!(frozen.part(0).max_abs() <= 1e-12);
    }

    #[test]
    fn relax_distinct_rates_scale_each_part() {
        let a = SymTensor::from_components(2, 2, &[2.0, 1.0, 0.0]).unwrap();
        let parts = decompose(&a).unwrap();
        let relaxed = relax_parts(&parts, &[2.0, 0.5]).unwrap();
        for (x, y) in relaxed
            .part(0)
            .components()
            .iter()
            .zip(parts.part(0).components())
        {
            assert!((x + 0.5 * y).abs() < 1e-15);
        }
        assert!((relaxed.part(1).as_scalar() + 2.0 * parts.part(1).as_scalar()).abs() < 1e-15);
    }

    #[test]
    fn relax_rejects_non_positive_tau() {
        let a = SymTensor::zeros(2, 2).unwrap();
        let parts = decompose(&a).unwrap();
        assert!(relax_parts(&parts, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn unsupported_ranks_are_reported() {
        let v = SymTensor::vector(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            decompose(&v),
            Err(Error::UndecomposableRank { rank: 1 })
        ));
    }
}
