//! Upper sets stored by their minimal antichain, plus covers and the JSON
//! instance format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{sort_canonical, SubsetMask, MAX_WIDTH};

/// Ground-size cap for instances that exact methods will accept.
pub const EXACT_GROUND_CAP: usize = 30;

/// A nontrivial upper set `F ⊆ 2^X` with `X = {0, .., ground_size - 1}`,
/// represented by its minimal elements.
///
/// Construction guarantees `F ≠ ∅` (at least one minimal element) and
/// `F ≠ 2^X` (the empty set is not minimal), that no minimal element contains
/// another, and that minimals are sorted by (popcount, value).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpperSet {
    ground_size: usize,
    minimals: Vec<SubsetMask>,
}

/// A family `G` of nonempty masks; `G` covers `F` when every minimal element
/// of `F` contains some member of `G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "Vec<Vec<usize>>")]
pub struct Cover {
    elements: Vec<SubsetMask>,
}

impl UpperSet {
    /// Builds the upper set generated by `generators`, keeping only the
    /// ⊆-minimal ones. Ground size is capped at [`EXACT_GROUND_CAP`].
    pub fn from_generators(ground_size: usize, generators: &[SubsetMask]) -> Result<Self> {
        normalize_to_antichain(ground_size, generators)
    }

    /// Like [`UpperSet::from_generators`] but allows ground sets up to 64
    /// elements. Exact methods still enforce their own caps.
    pub fn from_generators_relaxed(ground_size: usize, generators: &[SubsetMask]) -> Result<Self> {
        build(ground_size, generators, MAX_WIDTH)
    }

    /// Builds from a list that must already be an antichain.
    pub fn from_antichain(ground_size: usize, minimals: &[SubsetMask]) -> Result<Self> {
        check_ground(ground_size, EXACT_GROUND_CAP)?;
        check_generators(ground_size, minimals)?;
        for (i, a) in minimals.iter().enumerate() {
            for (j, b) in minimals.iter().enumerate() {
                if i != j && a.is_subset(b) {
                    return Err(Error::NotAntichain(format!("{a} is contained in {b}")));
                }
            }
        }
        let mut minimals = minimals.to_vec();
        sort_canonical(&mut minimals);
        Ok(Self {
            ground_size,
            minimals,
        })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    /// The antichain `F₀`, canonically ordered.
    #[inline]
    pub fn minimals(&self) -> &[SubsetMask] {
        &self.minimals
    }

    /// `|F₀|`.
    #[inline]
    pub fn min_count(&self) -> usize {
        self.minimals.len()
    }

    /// Membership: `s ∈ F` iff `s` contains a minimal element.
    pub fn contains(&self, s: &SubsetMask) -> Result<bool> {
        s.check_width(self.ground_size)?;
        Ok(self.contains_bits(s.bits()))
    }

    #[inline]
    pub(crate) fn contains_bits(&self, bits: u64) -> bool {
        self.minimals.iter().any(|m| m.bits() & !bits == 0)
    }

    /// `(ℓ₀, ℓ)`: the largest minimal size and that value floored at 2.
    pub fn ell(&self) -> (usize, usize) {
        let ell0 = self.minimals.iter().map(SubsetMask::len).max().unwrap_or(0);
        (ell0, ell0.max(2))
    }

    /// Intersection of all minimal elements.
    pub fn common_intersection(&self) -> SubsetMask {
        self.minimals.iter().fold(
            SubsetMask::raw(self.ground_size, crate::mask::low_bits(self.ground_size)),
            |acc, m| acc.intersection(m),
        )
    }

    /// Serializes to the JSON instance format.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile::from(self)).expect("instance serialization")
    }

    /// Parses the JSON instance format. Input that is not an antichain is
    /// rejected unless the document sets `"normalize": true`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_upper_set()
    }
}

/// Reduces `generators` to the canonical antichain of their ⊆-minimal members.
pub fn normalize_to_antichain(ground_size: usize, generators: &[SubsetMask]) -> Result<UpperSet> {
    build(ground_size, generators, EXACT_GROUND_CAP)
}

fn build(ground_size: usize, generators: &[SubsetMask], cap: usize) -> Result<UpperSet> {
    check_ground(ground_size, cap)?;
    check_generators(ground_size, generators)?;
    Ok(UpperSet {
        ground_size,
        minimals: reduce_antichain(generators),
    })
}

/// ⊆-minimal members of `masks`, deduplicated and canonically ordered.
pub(crate) fn reduce_antichain(masks: &[SubsetMask]) -> Vec<SubsetMask> {
    let mut sorted = masks.to_vec();
    sort_canonical(&mut sorted);
    sorted.dedup();
    // Smaller sets come first, so a mask survives iff no kept mask is inside it.
    let mut kept: Vec<SubsetMask> = Vec::with_capacity(sorted.len());
    for m in sorted {
        if !kept.iter().any(|k| k.is_subset(&m)) {
            kept.push(m);
        }
    }
    kept
}

fn check_ground(ground_size: usize, cap: usize) -> Result<()> {
    if ground_size == 0 || ground_size > cap {
        return Err(Error::GroundSizeOutOfRange {
            size: ground_size,
            max: cap,
        });
    }
    Ok(())
}

fn check_generators(ground_size: usize, generators: &[SubsetMask]) -> Result<()> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    for g in generators {
        g.check_width(ground_size)?;
        if g.is_empty() {
            return Err(Error::TrivialUpperSet(
                "the empty set is a generator, so F = 2^X".into(),
            ));
        }
    }
    Ok(())
}

impl Cover {
    /// Builds a cover; every element must be nonempty. Elements are
    /// deduplicated and canonically ordered.
    pub fn new(mut elements: Vec<SubsetMask>) -> Result<Self> {
        if let Some(w) = elements.first().map(SubsetMask::width) {
            for e in &elements {
                e.check_width(w)?;
            }
        }
        if elements.iter().any(SubsetMask::is_empty) {
            return Err(Error::TrivialUpperSet(
                "a cover containing the empty set generates 2^X".into(),
            ));
        }
        sort_canonical(&mut elements);
        elements.dedup();
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[SubsetMask] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True iff every minimal element of `f` is a superset of some element.
    pub fn covers(&self, f: &UpperSet) -> bool {
        f.minimals()
            .iter()
            .all(|m| self.elements.iter().any(|s| s.is_subset(m)))
    }

    /// `Σ p^{|S|}` summed by ascending element size.
    pub fn cost(&self, p: f64) -> f64 {
        cost_of_sizes(self.elements.iter().map(SubsetMask::len), p)
    }

    /// Numeric comparison of the element lists, used for tie-breaking.
    pub(crate) fn lex_key(&self) -> Vec<(usize, u64)> {
        self.elements.iter().map(|m| (m.len(), m.bits())).collect()
    }
}

/// `Σ p^{k}` over the given sizes, accumulated as a size histogram so equal
/// histograms give bit-identical costs.
pub(crate) fn cost_of_sizes<I: IntoIterator<Item = usize>>(sizes: I, p: f64) -> f64 {
    let mut hist = [0u32; MAX_WIDTH + 1];
    for s in sizes {
        hist[s] += 1;
    }
    hist.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| c as f64 * p.powi(k as i32))
        .sum()
}

impl From<Cover> for Vec<Vec<usize>> {
    fn from(c: Cover) -> Self {
        c.elements.iter().map(|m| m.elements().collect()).collect()
    }
}

/// On-disk instance: `{"ground_size": n, "minimal_elements": [[..], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub ground_size: usize,
    pub minimal_elements: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

impl From<&UpperSet> for InstanceFile {
    fn from(f: &UpperSet) -> Self {
        Self {
            ground_size: f.ground_size,
            minimal_elements: f.minimals.iter().map(|m| m.elements().collect()).collect(),
            normalize: false,
        }
    }
}

impl InstanceFile {
    pub fn into_upper_set(self) -> Result<UpperSet> {
        check_ground(self.ground_size, MAX_WIDTH)?;
        let mut masks = Vec::with_capacity(self.minimal_elements.len());
        for elems in &self.minimal_elements {
            let m = SubsetMask::from_elements(self.ground_size, elems.iter().copied())?;
            if m.len() != elems.len() {
                return Err(Error::Parse(format!("repeated element in {elems:?}")));
            }
            masks.push(m);
        }
        let cap = if self.ground_size <= EXACT_GROUND_CAP {
            EXACT_GROUND_CAP
        } else {
            MAX_WIDTH
        };
        if self.normalize {
            build(self.ground_size, &masks, cap)
        } else {
            check_ground(self.ground_size, cap)?;
            check_generators(self.ground_size, &masks)?;
            let reduced = reduce_antichain(&masks);
            if reduced.len() != masks.len() {
                return Err(Error::NotAntichain(
                    "minimal_elements contains nested or repeated sets; set \"normalize\": true to reduce".into(),
                ));
            }
            Ok(UpperSet {
                ground_size: self.ground_size,
                minimals: reduced,
            })
        }
    }
}
