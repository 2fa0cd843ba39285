use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set any mask can describe.
pub const MAX_WIDTH: usize = 64;

/// A subset of the ground set `{0, .., width - 1}`; element `i` is present
/// iff bit `i` is set.
///
/// Equality and hashing are bitwise over `(width, bits)`. The derived `Ord` is
/// numeric; [`SubsetMask::canonical_cmp`] gives the (popcount, value) order
/// used for every list the library emits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u64,
    width: u8,
}

impl SubsetMask {
    pub fn empty(width: usize) -> Result<Self> {
        Self::from_bits(width, 0)
    }

    pub fn full(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Self {
            bits: low_bits(width),
            width: width as u8,
        })
    }

    pub fn from_bits(width: usize, bits: u64) -> Result<Self> {
        check_width(width)?;
        if bits & !low_bits(width) != 0 {
            let element = 63 - bits.leading_zeros() as usize;
            return Err(Error::ElementOutOfRange {
                element,
                ground_size: width,
            });
        }
        Ok(Self {
            bits,
            width: width as u8,
        })
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(width: usize, elements: I) -> Result<Self> {
        check_width(width)?;
        let mut bits = 0u64;
        for e in elements {
            if e >= width {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    ground_size: width,
                });
            }
            bits |= 1 << e;
        }
        Ok(Self {
            bits,
            width: width as u8,
        })
    }

    /// Internal constructor for bit patterns already known to fit.
    pub(crate) fn raw(width: usize, bits: u64) -> Self {
        debug_assert!(width <= MAX_WIDTH && bits & !low_bits(width) == 0);
        Self {
            bits,
            width: width as u8,
        }
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == low_bits(self.width())
    }

    #[inline]
    pub fn contains(&self, element: usize) -> bool {
        element < self.width() && self.bits >> element & 1 == 1
    }

    /// `self ⊆ other`; widths are assumed equal.
    #[inline]
    pub fn is_subset(&self, other: &SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn is_superset(&self, other: &SubsetMask) -> bool {
        other.is_subset(self)
    }

    #[inline]
    pub fn union(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits | other.bits,
            width: self.width,
        }
    }

    #[inline]
    pub fn intersection(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits & other.bits,
            width: self.width,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let e = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(e)
            }
        })
    }

    /// All nonempty subsets of `self`, in increasing numeric order.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        let full = self.bits;
        let width = self.width;
        // Standard submask walk: next = (cur - full) & full enumerates upward.
        let mut cur = 0u64;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            cur = cur.wrapping_sub(full) & full;
            if cur == full {
                done = true;
            }
            Some(SubsetMask { bits: cur, width })
        })
    }

    /// (popcount, numeric value) order.
    pub fn canonical_cmp(&self, other: &SubsetMask) -> Ordering {
        (self.len(), self.bits).cmp(&(other.len(), other.bits))
    }

    pub fn check_width(&self, expected: usize) -> Result<()> {
        if self.width() != expected {
            return Err(Error::WidthMismatch {
                expected,
                found: self.width(),
            });
        }
        Ok(())
    }
}

impl serde::Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

#[inline]
pub(crate) fn low_bits(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::GroundSizeOutOfRange {
            size: width,
            max: MAX_WIDTH,
        });
    }
    Ok(())
}

/// Sort masks into canonical order.
pub fn sort_canonical(masks: &mut [SubsetMask]) {
    masks.sort_by(SubsetMask::canonical_cmp);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_of_pair() {
        let m = SubsetMask::from_elements(3, [0, 2]).unwrap();
        let subs: Vec<u64> = m.nonempty_subsets().map(|s| s.bits()).collect();
        assert_eq!(subs, vec![0b001, 0b100, 0b101]);
    }

    #[test]
    fn subsets_of_empty_is_empty() {
        let m = SubsetMask::empty(4).unwrap();
        assert_eq!(m.nonempty_subsets().count(), 0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            SubsetMask::from_elements(3, [3]),
            Err(Error::ElementOutOfRange { element: 3, .. })
        ));
        assert!(SubsetMask::from_bits(2, 0b100).is_err());
        assert!(SubsetMask::empty(0).is_err());
        assert!(SubsetMask::full(64).unwrap().is_full());
    }

    #[test]
    fn canonical_order() {
        let a = SubsetMask::from_elements(4, [3]).unwrap();
        let b = SubsetMask::from_elements(4, [0, 1]).unwrap();
        let c = SubsetMask::from_elements(4, [0, 2]).unwrap();
        let mut v = vec![c, b, a];
        sort_canonical(&mut v);
        assert_eq!(v, vec![a, b, c]);
        assert_eq!(format!("{c}"), "{0,2}");
    }
}
