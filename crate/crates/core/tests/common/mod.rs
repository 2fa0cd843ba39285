//! Brute-force reference implementations. They share nothing with the
//! library beyond reading the minimal elements as plain bitmasks.

#![allow(dead_code)]

use thresholds::UpperSet;

pub fn minimal_bits(f: &UpperSet) -> Vec<u64> {
    f.minimals().iter().map(|m| m.bits()).collect()
}

fn member(minimals: &[u64], s: u64) -> bool {
    minimals.iter().any(|&m| m & !s == 0)
}

/// `μ_p(F)` summed over all `2^n` subsets.
pub fn mu(f: &UpperSet, p: f64) -> f64 {
    let minimals = minimal_bits(f);
    let n = f.ground_size();
    (0u64..1 << n)
        .filter(|&s| member(&minimals, s))
        .map(|s| {
            let k = s.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(n as i32 - k)
        })
        .sum()
}

/// Solves `μ_p = 1/2` by plain bisection on the brute-force measure.
pub fn critical_probability(f: &UpperSet) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mu(f, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Every nonempty subset of every minimal element, deduplicated.
pub fn candidates(f: &UpperSet) -> Vec<u64> {
    let mut out = Vec::new();
    for m in minimal_bits(f) {
        let mut sub = m;
        while sub != 0 {
            out.push(sub);
            sub = (sub - 1) & m;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn cost(sets: &[u64], p: f64) -> f64 {
    sets.iter().map(|s| p.powi(s.count_ones() as i32)).sum()
}

fn covers(sets: &[u64], minimals: &[u64]) -> bool {
    minimals.iter().all(|&m| sets.iter().any(|&s| s & !m == 0))
}

/// Minimum cover cost. With at most 20 candidates every subfamily of the
/// candidate pool is tried; otherwise every assignment of a candidate to each
/// minimal element (the distinct chosen sets of an optimal assignment form an
/// optimal cover).
pub fn min_cover_cost(f: &UpperSet, p: f64) -> f64 {
    let minimals = minimal_bits(f);
    let pool = candidates(f);
    if pool.len() <= 20 {
        let mut best = f64::INFINITY;
        for pick in 1u32..1 << pool.len() {
            let sets: Vec<u64> = (0..pool.len())
                .filter(|i| pick >> i & 1 == 1)
                .map(|i| pool[i])
                .collect();
            if covers(&sets, &minimals) {
                best = best.min(cost(&sets, p));
            }
        }
        return best;
    }
    let options: Vec<Vec<u64>> = minimals
        .iter()
        .map(|&m| pool.iter().copied().filter(|&s| s & !m == 0).collect())
        .collect();
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(minimals.len());
    assign(&options, &mut chosen, p, &mut best);
    best
}

fn assign(options: &[Vec<u64>], chosen: &mut Vec<u64>, p: f64, best: &mut f64) {
    if chosen.len() == options.len() {
        let mut sets = chosen.clone();
        sets.sort_unstable();
        sets.dedup();
        *best = best.min(cost(&sets, p));
        return;
    }
    for &s in &options[chosen.len()] {
        chosen.push(s);
        assign(options, chosen, p, best);
        chosen.pop();
    }
}

/// `q(F)` by bisection on the brute-force cover cost.
pub fn expectation_threshold(f: &UpperSet) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if min_cover_cost(f, mid) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unrestricted covering dimension. Any cover element can be shrunk to one
/// of its points without uncovering anything, so this is the smallest set
/// of ground elements meeting every minimal.
pub fn dimension(f: &UpperSet) -> usize {
    let minimals = minimal_bits(f);
    (0u64..1 << f.ground_size())
        .filter(|&s| minimals.iter().all(|&m| m & s != 0))
        .map(|s| s.count_ones() as usize)
        .min()
        .expect("the full ground set meets every minimal")
}

/// Covering dimension when cover elements must be members of `F`: tries
/// every subfamily of members that lie inside some minimal.
pub fn dimension_within_family(f: &UpperSet) -> usize {
    let minimals = minimal_bits(f);
    let usable: Vec<u64> = (1u64..1 << f.ground_size())
        .filter(|&s| member(&minimals, s) && minimals.iter().any(|&m| s & !m == 0))
        .collect();
    assert!(usable.len() <= 20, "oracle limited to small families");
    (1u32..1 << usable.len())
        .filter(|pick| {
            let sets: Vec<u64> = (0..usable.len())
                .filter(|i| pick >> i & 1 == 1)
                .map(|i| usable[i])
                .collect();
            covers(&sets, &minimals)
        })
        .map(|pick| pick.count_ones() as usize)
        .min()
        .expect("the minimals cover themselves")
}

/// `σ_k`: the union over all k-subsets of sets of their intersections.
pub fn sigma(sets: &[u64], k: usize) -> u64 {
    let m = sets.len();
    let mut acc = 0u64;
    for pick in 0u32..1 << m {
        if pick.count_ones() as usize == k {
            acc |= (0..m)
                .filter(|i| pick >> i & 1 == 1)
                .fold(u64::MAX, |a, i| a & sets[i]);
        }
    }
    acc
}
