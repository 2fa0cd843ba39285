//! The product measure `μ_p(F)` and the critical probability `p_c(F)`.
//!
//! Two exact evaluators are provided. [`RankProfile`] enumerates `2^X` once
//! and stores how many members of `F` have each size, so `μ_p(F)` becomes
//! `Σ_k c_k p^k (1-p)^{n-k}`. [`UnionProfile`] expands inclusion-exclusion over
//! the minimal elements once and stores the signed number of index sets whose
//! union has each size, so `μ_p(F) = Σ_u a_u p^u`. Both are built once and then
//! evaluated at any `p` in `O(n)`, which is what the bisection for `p_c` needs.
//!
//! Monte Carlo sampling uses ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! which is stable across platforms. Do not change the generator family
//! without bumping the crate's minor version.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::upset::UpperSet;

/// Ground-size cap for full enumeration.
pub const ENUMERATION_CAP: usize = 24;
/// Cap on `|F₀|` for inclusion-exclusion.
pub const INCLUSION_EXCLUSION_CAP: usize = 24;
/// Default bisection tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const MAX_BISECTION_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    InclusionExclusion,
    MonteCarlo,
}

impl Method {
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::MonteCarlo)
    }

    /// Exact method chosen automatically: enumeration for `n ≤ 20`,
    /// inclusion-exclusion for `|F₀| ≤ 20`, otherwise a cap error.
    pub fn auto(f: &UpperSet) -> Result<Method> {
        if f.ground_size() <= 20 {
            Ok(Method::Enumeration)
        } else if f.min_count() <= 20 {
            Ok(Method::InclusionExclusion)
        } else {
            Err(Error::CapExceeded(format!(
                "no exact method for ground size {} with {} minimal elements",
                f.ground_size(),
                f.min_count()
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
}

/// One evaluation of `μ_p(F)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuEstimate {
    pub value: f64,
    /// Binomial standard error for Monte Carlo, zero for exact methods.
    /// A Monte Carlo run whose hit fraction is exactly 0 or 1 also reports 0.
    pub std_error: f64,
    pub method: Method,
    pub samples: u64,
}

/// Result of the bisection for `μ_p(F) = 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalProbability {
    pub p_c: f64,
    /// `|μ_{p_c}(F) - 1/2|`.
    pub residual: f64,
    pub tolerance: f64,
}

/// Counts of members of `F` by cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    counts: Vec<u64>,
}

impl RankProfile {
    pub fn new(f: &UpperSet) -> Result<Self> {
        let n = f.ground_size();
        if n > ENUMERATION_CAP {
            return Err(Error::SizeLimitExceeded {
                what: "ground size for enumeration",
                value: n as u128,
                limit: ENUMERATION_CAP as u128,
            });
        }
        // Mark minimal elements, then close upward one coordinate at a time.
        let size = 1usize << n;
        let mut member = vec![false; size];
        for m in f.minimals() {
            member[m.bits() as usize] = true;
        }
        for bit in 0..n {
            let step = 1usize << bit;
            for s in 0..size {
                if s & step != 0 && member[s ^ step] {
                    member[s] = true;
                }
            }
        }
        let mut counts = vec![0u64; n + 1];
        for (s, &inside) in member.iter().enumerate() {
            if inside {
                counts[s.count_ones() as usize] += 1;
            }
        }
        Ok(Self { counts })
    }

    /// Number of members of `F` with exactly `k` elements.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mu(&self, p: f64) -> f64 {
        let n = self.counts.len() - 1;
        let q = 1.0 - p;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| c as f64 * p.powi(k as i32) * q.powi((n - k) as i32))
            .sum()
    }
}

/// Signed inclusion-exclusion coefficients grouped by union size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionProfile {
    coefficients: Vec<i64>,
}

impl UnionProfile {
    pub fn new(f: &UpperSet) -> Result<Self> {
        let m = f.min_count();
        if m > INCLUSION_EXCLUSION_CAP {
            return Err(Error::SizeLimitExceeded {
                what: "minimal elements for inclusion-exclusion",
                value: m as u128,
                limit: INCLUSION_EXCLUSION_CAP as u128,
            });
        }
        let masks: Vec<u64> = f.minimals().iter().map(|s| s.bits()).collect();
        let mut coefficients = vec![0i64; f.ground_size() + 1];
        // Depth-first over index sets: each node is a nonempty I, sign (-1)^{|I|+1}.
        fn walk(masks: &[u64], start: usize, union: u64, sign: i64, out: &mut [i64]) {
            for i in start..masks.len() {
                let u = union | masks[i];
                out[u.count_ones() as usize] += sign;
                walk(masks, i + 1, u, -sign, out);
            }
        }
        walk(&masks, 0, 0, 1, &mut coefficients);
        Ok(Self { coefficients })
    }

    /// `a_u`: signed count of index sets whose union has `u` elements.
    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn mu(&self, p: f64) -> f64 {
        neumaier_sum(
            self.coefficients
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(u, &a)| a as f64 * p.powi(u as i32)),
        )
    }
}

/// Compensated summation; the alternating inclusion-exclusion terms cancel.
fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// An exact evaluator built once per instance.
#[derive(Clone, Debug)]
pub enum ExactProfile {
    Rank(RankProfile),
    Union(UnionProfile),
}

impl ExactProfile {
    pub fn new(f: &UpperSet, method: Method) -> Result<Self> {
        match method {
            Method::Enumeration => Ok(Self::Rank(RankProfile::new(f)?)),
            Method::InclusionExclusion => Ok(Self::Union(UnionProfile::new(f)?)),
            Method::MonteCarlo => Err(Error::InexactMethod("monte_carlo")),
        }
    }

    pub fn mu(&self, p: f64) -> f64 {
        let v = match self {
            Self::Rank(r) => r.mu(p),
            Self::Union(u) => u.mu(p),
        };
        v.clamp(0.0, 1.0)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// `μ_p(F)` by the chosen method.
pub fn mu(f: &UpperSet, p: f64, method: Method, mc: Option<McParams>) -> Result<MuEstimate> {
    check_probability(p)?;
    match method {
        Method::Enumeration | Method::InclusionExclusion => Ok(MuEstimate {
            value: ExactProfile::new(f, method)?.mu(p),
            std_error: 0.0,
            method,
            samples: 0,
        }),
        Method::MonteCarlo => {
            let mc = mc.ok_or(Error::MissingMcParams)?;
            if mc.samples == 0 {
                return Err(Error::MissingMcParams);
            }
            Ok(monte_carlo(f, p, mc))
        }
    }
}

fn monte_carlo(f: &UpperSet, p: f64, mc: McParams) -> MuEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let n = f.ground_size();
    let mut hits = 0u64;
    for _ in 0..mc.samples {
        let mut s = 0u64;
        for e in 0..n {
            if rng.gen_bool(p) {
                s |= 1 << e;
            }
        }
        if f.contains_bits(s) {
            hits += 1;
        }
    }
    let value = hits as f64 / mc.samples as f64;
    MuEstimate {
        value,
        std_error: (value * (1.0 - value) / mc.samples as f64).sqrt(),
        method: Method::MonteCarlo,
        samples: mc.samples,
    }
}

/// Bisection for the unique `p` with `μ_p(F) = 1/2`.
///
/// Runs until the bracket is no wider than `tol` and the residual is within
/// `tol`, or until the bracket stops shrinking in floating point.
pub fn critical_probability(f: &UpperSet, tol: f64, method: Method) -> Result<CriticalProbability> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let profile = ExactProfile::new(f, method)?;
    critical_probability_of(&profile, tol)
}

pub fn critical_probability_of(profile: &ExactProfile, tol: f64) -> Result<CriticalProbability> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_BISECTION_STEPS {
        mid = 0.5 * (lo + hi);
        let value = profile.mu(mid);
        residual = (value - 0.5).abs();
        if hi - lo <= tol && residual <= tol {
            break;
        }
        if mid <= lo || mid >= hi {
            break;
        }
        if value < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if residual > 10.0 * tol {
        return Err(Error::NonConvergence {
            residual,
            tolerance: tol,
        });
    }
    Ok(CriticalProbability {
        p_c: mid,
        residual,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::SubsetMask;
    use crate::upset::normalize_to_antichain;

    fn upset(n: usize, sets: &[&[usize]]) -> UpperSet {
        let masks: Vec<_> = sets
            .iter()
            .map(|s| SubsetMask::from_elements(n, s.iter().copied()).unwrap())
            .collect();
        normalize_to_antichain(n, &masks).unwrap()
    }

    /// Direct sum over all subsets using the membership test.
    fn brute_mu(f: &UpperSet, p: f64) -> f64 {
        let n = f.ground_size();
        (0u64..1 << n)
            .filter(|&s| f.contains_bits(s))
            .map(|s| {
                let k = s.count_ones() as i32;
                p.powi(k) * (1.0 - p).powi(n as i32 - k)
            })
            .sum()
    }

    #[test]
    fn principal_pair() {
        let f = upset(4, &[&[0, 1]]);
        let v = mu(&f, 0.5, Method::Enumeration, None).unwrap();
        assert_eq!(v.value, 0.25);
        assert_eq!(v.std_error, 0.0);
    }

    #[test]
    fn triangle_connectivity_half() {
        let f = upset(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        // brute force: {01},{02},{12} and {012} → 3/8 + 1/8
        assert_eq!(brute_mu(&f, 0.5), 0.5);
        for m in [Method::Enumeration, Method::InclusionExclusion] {
            assert!((mu(&f, 0.5, m, None).unwrap().value - 0.5).abs() < 1e-15);
        }
        for p in [0.1, 0.37, 0.8] {
            let poly = 3.0 * p * p - 2.0 * p * p * p;
            assert!((mu(&f, p, Method::Enumeration, None).unwrap().value - poly).abs() < 1e-15);
        }
    }

    #[test]
    fn endpoints() {
        let f = upset(5, &[&[0, 3], &[1, 2, 4]]);
        for m in [Method::Enumeration, Method::InclusionExclusion] {
            assert_eq!(mu(&f, 1.0, m, None).unwrap().value, 1.0);
            assert_eq!(mu(&f, 0.0, m, None).unwrap().value, 0.0);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let f = upset(6, &[&[0, 1], &[2, 3, 4], &[1, 5], &[0, 4]]);
        let r = RankProfile::new(&f).unwrap();
        for p in [0.05, 0.3, 0.5, 0.77] {
            assert!((r.mu(p) - brute_mu(&f, p)).abs() < 1e-14);
        }
    }

    #[test]
    fn argument_errors() {
        let f = upset(3, &[&[0]]);
        assert_eq!(
            mu(&f, 0.5, Method::MonteCarlo, None),
            Err(Error::MissingMcParams)
        );
        assert!(matches!(
            mu(&f, 1.5, Method::Enumeration, None),
            Err(Error::InvalidProbability(_))
        ));
        assert!(critical_probability(&f, 0.0, Method::Enumeration).is_err());
        assert!(matches!(
            critical_probability(&f, 1e-9, Method::MonteCarlo),
            Err(Error::InexactMethod(_))
        ));
        let big =
            UpperSet::from_generators(25, &[SubsetMask::from_elements(25, [0]).unwrap()]).unwrap();
        assert!(mu(&big, 0.5, Method::Enumeration, None)
            .unwrap_err()
            .is_cap());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let f = upset(5, &[&[0, 1], &[2, 3]]);
        let mc = McParams {
            samples: 2000,
            seed: 9,
        };
        let a = mu(&f, 0.4, Method::MonteCarlo, Some(mc)).unwrap();
        let b = mu(&f, 0.4, Method::MonteCarlo, Some(mc)).unwrap();
        assert_eq!(a, b);
        assert!(a.std_error > 0.0);
    }

    #[test]
    fn principal_critical_probability() {
        let f = upset(5, &[&[0, 1, 2]]);
        let pc = critical_probability(&f, 1e-9, Method::Enumeration).unwrap();
        assert!((pc.p_c - 2f64.powf(-1.0 / 3.0)).abs() < 1e-9);
        assert!(pc.residual <= 1e-9);
    }

    #[test]
    fn k3_critical_probability() {
        let f = upset(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let pc = critical_probability(&f, 1e-9, Method::InclusionExclusion).unwrap();
        assert!((pc.p_c - 0.5).abs() <= 1e-9);
    }
}
