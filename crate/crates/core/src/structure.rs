//! Covering dimension and the lattice elementary symmetric polynomials `σ_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::upset::{Cover, UpperSet};

/// Cap on `|F₀|` for the exact dimension search.
pub const DIMENSION_CAP: usize = 16;

/// Which covers count towards the covering dimension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimConvention {
    /// Any nonempty subsets of the ground set.
    #[default]
    Unrestricted,
    /// Cover elements must themselves be members of `F`.
    WithinFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionResult {
    pub dim: usize,
    pub witness: Cover,
    pub convention: DimConvention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaResult {
    pub k: usize,
    pub value: SubsetMask,
}

/// `σ_k(S_1, .., S_m)`: the elements lying in at least `k` of the sets.
pub fn sigma_k(sets: &[SubsetMask], k: usize) -> Result<SigmaResult> {
    let first = sets.first().ok_or(Error::EmptyInput)?;
    if k == 0 || k > sets.len() {
        return Err(Error::KOutOfRange { k, m: sets.len() });
    }
    let width = first.width();
    for s in sets {
        s.check_width(width)?;
    }
    let counts = element_counts(sets, width);
    let bits = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= k)
        .fold(0u64, |acc, (e, _)| acc | 1 << e);
    Ok(SigmaResult {
        k,
        value: SubsetMask::raw(width, bits),
    })
}

/// For each ground element, the number of minimal elements containing it.
/// `σ_k(F₀)` is nonempty iff the maximum of this profile is at least `k`.
pub fn element_profile(f: &UpperSet) -> Vec<usize> {
    element_counts(f.minimals(), f.ground_size())
}

fn element_counts(sets: &[SubsetMask], width: usize) -> Vec<usize> {
    let mut counts = vec![0usize; width];
    for s in sets {
        for e in s.elements() {
            counts[e] += 1;
        }
    }
    counts
}

/// Largest `m` with `σ_m(F₀) ≠ ∅`, found by binary search (`σ_m` shrinks as
/// `m` grows and `σ_1` is the nonempty union).
pub fn max_nonempty_sigma_index(f: &UpperSet) -> usize {
    let sets = f.minimals();
    let (mut lo, mut hi) = (1usize, sets.len());
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let empty = sigma_k(sets, mid).expect("1 ≤ mid ≤ |F₀|").value.is_empty();
        if empty {
            hi = mid - 1;
        } else {
            lo = mid;
        }
    }
    lo
}

/// `|F₀| + 1 - max{m : σ_m(F₀) ≠ ∅}`.
pub fn dim_upper_bound_via_sigma(f: &UpperSet) -> usize {
    f.min_count() + 1 - max_nonempty_sigma_index(f)
}

/// Exact covering dimension under `convention`.
///
/// A single cover element `S` covers exactly the minimals containing it, so a
/// cover with `d` elements splits `F₀` into `d` blocks each with a nonempty
/// common intersection, and that intersection is the cheapest witness for its
/// block. The minimum number of blocks is found by dynamic programming over
/// the bitmask of still-uncovered minimals. Under `WithinFamily` a block is
/// admissible only when its intersection is itself a member of `F`.
pub fn covering_dimension(f: &UpperSet, convention: DimConvention) -> Result<DimensionResult> {
    let m = f.min_count();
    if m > DIMENSION_CAP {
        return Err(Error::SizeLimitExceeded {
            what: "minimal elements for the exact dimension search",
            value: m as u128,
            limit: DIMENSION_CAP as u128,
        });
    }
    let width = f.ground_size();
    let full_set = (1usize << m) - 1;
    let minimals: Vec<u64> = f.minimals().iter().map(SubsetMask::bits).collect();

    // inter[B]: intersection of the minimals indexed by B (inter[0] = X).
    let mut inter = vec![0u64; 1 << m];
    inter[0] = crate::mask::low_bits(width);
    for b in 1..=full_set {
        let low = b.trailing_zeros() as usize;
        inter[b] = inter[b & (b - 1)] & minimals[low];
    }
    let admissible = |b: usize| -> bool {
        let i = inter[b];
        i != 0
            && match convention {
                DimConvention::Unrestricted => true,
                DimConvention::WithinFamily => f.contains_bits(i),
            }
    };

    // best[U]: (blocks needed to cover U, first block chosen).
    let mut best = vec![(usize::MAX, 0usize); 1 << m];
    best[0] = (0, 0);
    for u in 1..=full_set {
        let low_bit = u & u.wrapping_neg();
        let rest = u ^ low_bit;
        // Blocks containing the lowest uncovered minimal, as submasks of U.
        let mut sub = rest;
        let mut chosen = (usize::MAX, 0usize);
        loop {
            let block = sub | low_bit;
            if admissible(block) {
                let (d, _) = best[u ^ block];
                if d != usize::MAX && (d + 1 < chosen.0 || (d + 1 == chosen.0 && block > chosen.1))
                {
                    chosen = (d + 1, block);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[u] = chosen;
    }

    let (dim, _) = best[full_set];
    debug_assert!(dim != usize::MAX, "singleton blocks are always admissible");
    let mut witness = Vec::with_capacity(dim);
    let mut u = full_set;
    while u != 0 {
        let block = best[u].1;
        witness.push(SubsetMask::raw(width, inter[block]));
        u ^= block;
    }
    Ok(DimensionResult {
        dim,
        witness: Cover::new(witness)?,
        convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upset::normalize_to_antichain;

    fn masks(n: usize, sets: &[&[usize]]) -> Vec<SubsetMask> {
        sets.iter()
            .map(|s| SubsetMask::from_elements(n, s.iter().copied()).unwrap())
            .collect()
    }

    fn upset(n: usize, sets: &[&[usize]]) -> UpperSet {
        normalize_to_antichain(n, &masks(n, sets)).unwrap()
    }

    /// Union over all k-subsets of the intersections.
    fn sigma_naive(sets: &[SubsetMask], k: usize) -> u64 {
        let m = sets.len();
        let mut acc = 0u64;
        for idx in 0u32..1 << m {
            if idx.count_ones() as usize == k {
                let i = (0..m)
                    .filter(|j| idx >> j & 1 == 1)
                    .fold(u64::MAX, |a, j| a & sets[j].bits());
                acc |= i;
            }
        }
        acc
    }

    #[test]
    fn sigma_examples() {
        let sets = masks(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(sigma_k(&sets, 1).unwrap().value.bits(), 0b111);
        assert_eq!(sigma_k(&sets, 2).unwrap().value.bits(), 0b111);
        assert!(sigma_k(&sets, 3).unwrap().value.is_empty());
        for k in 1..=3 {
            assert_eq!(
                sigma_k(&sets, k).unwrap().value.bits(),
                sigma_naive(&sets, k)
            );
        }
        assert!(matches!(sigma_k(&sets, 0), Err(Error::KOutOfRange { .. })));
        assert!(matches!(sigma_k(&sets, 4), Err(Error::KOutOfRange { .. })));
        assert!(sigma_k(&[], 1).is_err());
    }

    #[test]
    fn max_sigma_index() {
        assert_eq!(
            max_nonempty_sigma_index(&upset(3, &[&[0, 1], &[1, 2], &[0, 2]])),
            2
        );
        assert_eq!(max_nonempty_sigma_index(&upset(3, &[&[0, 1]])), 1);
        assert_eq!(max_nonempty_sigma_index(&upset(3, &[&[0], &[1], &[2]])), 1);
    }

    #[test]
    fn sigma_bound_examples() {
        assert_eq!(
            dim_upper_bound_via_sigma(&upset(3, &[&[0, 1], &[1, 2], &[0, 2]])),
            2
        );
        assert_eq!(dim_upper_bound_via_sigma(&upset(4, &[&[0, 1, 2]])), 1);
        assert_eq!(dim_upper_bound_via_sigma(&upset(3, &[&[0], &[1], &[2]])), 3);
    }

    #[test]
    fn k3_dimensions() {
        let f = upset(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let u = covering_dimension(&f, DimConvention::Unrestricted).unwrap();
        assert_eq!(u.dim, 2);
        assert!(u.witness.covers(&f));
        assert_eq!(u.witness.len(), 2);
        let w = covering_dimension(&f, DimConvention::WithinFamily).unwrap();
        assert_eq!(w.dim, 3);
        assert!(w.witness.elements().iter().all(|s| f.contains(s).unwrap()));
    }

    #[test]
    fn principal_dimension_one() {
        let f = upset(4, &[&[0, 1, 2]]);
        for c in [DimConvention::Unrestricted, DimConvention::WithinFamily] {
            assert_eq!(covering_dimension(&f, c).unwrap().dim, 1);
        }
    }

    #[test]
    fn dimension_cap() {
        let sets: Vec<Vec<usize>> = (0..17).map(|i| vec![i]).collect();
        let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
        let f = upset(18, &refs);
        assert!(covering_dimension(&f, DimConvention::Unrestricted)
            .unwrap_err()
            .is_cap());
    }
}
