//! Instance generators: principal upper sets, graph properties on `K_n`, and
//! seeded random antichains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::upset::{normalize_to_antichain, UpperSet, EXACT_GROUND_CAP};

/// Default cap on the number of labelled embeddings enumerated.
pub const EMBEDDING_CAP: u128 = 1_000_000;

/// Edges of `K_n` indexed lexicographically by `(min, max)`:
/// `(0,1), (0,2), .., (0,n-1), (1,2), ..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphGround {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphGround {
    pub fn new(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        if n < 2 || edges.len() > EXACT_GROUND_CAP {
            return Err(Error::OutOfRange(format!(
                "K_{n} needs 2 ≤ n and at most {EXACT_GROUND_CAP} edges"
            )));
        }
        Ok(Self { n, edges })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Ground index of the edge `{u, v}`.
    pub fn index(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if a == b || b >= self.n {
            return None;
        }
        // Edges before row a: Σ_{i<a} (n-1-i).
        Some(a * (2 * self.n - a - 1) / 2 + (b - a - 1))
    }

    pub fn edge(&self, index: usize) -> Option<(usize, usize)> {
        self.edges.get(index).copied()
    }

    pub fn mask<I: IntoIterator<Item = (usize, usize)>>(&self, edges: I) -> Result<SubsetMask> {
        let mut idx = Vec::new();
        for (u, v) in edges {
            idx.push(self.index(u, v).ok_or_else(|| {
                Error::OutOfRange(format!("({u},{v}) is not an edge of K_{}", self.n))
            })?);
        }
        SubsetMask::from_elements(self.edge_count(), idx)
    }
}

/// The principal upper set `⟨S⟩`; `S` must be neither empty nor the whole ground set.
pub fn principal(ground_size: usize, s: SubsetMask) -> Result<UpperSet> {
    s.check_width(ground_size)?;
    if s.is_empty() {
        return Err(Error::TrivialUpperSet("⟨∅⟩ = 2^X".into()));
    }
    if s.is_full() {
        return Err(Error::TrivialUpperSet(
            "a principal upper set needs S ≠ X".into(),
        ));
    }
    normalize_to_antichain(ground_size, &[s])
}

/// Connected spanning subgraphs of `K_n`: the minimal elements are the
/// spanning trees, enumerated as acyclic `(n-1)`-edge subsets in increasing
/// numeric order.
pub fn graph_connectivity(n: usize) -> Result<UpperSet> {
    if !(3..=7).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "connectivity needs 3 ≤ n ≤ 7, got {n}"
        )));
    }
    let ground = GraphGround::new(n)?;
    let e = ground.edge_count();
    let mut trees = Vec::new();
    for_each_k_subset(e, n - 1, |bits| {
        if is_acyclic(&ground, bits) {
            trees.push(SubsetMask::raw(e, bits));
        }
    });
    normalize_to_antichain(e, &trees)
}

fn is_acyclic(ground: &GraphGround, bits: u64) -> bool {
    let mut parent: Vec<usize> = (0..ground.vertices()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut rest = bits;
    while rest != 0 {
        let (u, v) = ground.edges[rest.trailing_zeros() as usize];
        rest &= rest - 1;
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Calls `visit` with every `k`-subset of `{0, .., n-1}` as a bit pattern, in
/// increasing numeric order.
fn for_each_k_subset(n: usize, k: usize, mut visit: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        visit(0);
        return;
    }
    let limit = 1u64 << n;
    let mut s = (1u64 << k) - 1;
    while s < limit {
        visit(s);
        // Gosper's hack.
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// Edge sets of `K_n` that contain a copy of `h` (given as an edge list on at
/// most `n` vertices; labels are arbitrary). Minimal elements are the
/// ⊆-minimal images of `h` under injective vertex maps.
pub fn subgraph_containment(n: usize, h: &[(usize, usize)]) -> Result<UpperSet> {
    subgraph_containment_with_cap(n, h, EMBEDDING_CAP)
}

pub fn subgraph_containment_with_cap(
    n: usize,
    h: &[(usize, usize)],
    cap: u128,
) -> Result<UpperSet> {
    if h.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let mut labels: Vec<usize> = h.iter().flat_map(|&(u, v)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    if h.iter().any(|&(u, v)| u == v) {
        return Err(Error::OutOfRange("pattern graph has a loop".into()));
    }
    let k = labels.len();
    if k > n {
        return Err(Error::OutOfRange(format!(
            "pattern has {k} vertices but the host has {n}"
        )));
    }
    let ground = GraphGround::new(n)?;
    let embeddings: u128 = (0..k).map(|i| (n - i) as u128).product();
    if embeddings > cap {
        return Err(Error::CapExceeded(format!(
            "{embeddings} labelled embeddings exceed the cap {cap}"
        )));
    }
    let pattern: Vec<(usize, usize)> = h
        .iter()
        .map(|&(u, v)| {
            let a = labels.binary_search(&u).unwrap();
            let b = labels.binary_search(&v).unwrap();
            (a, b)
        })
        .collect();

    let mut images = Vec::new();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; n];
    fn place(
        depth: usize,
        map: &mut [usize],
        used: &mut [bool],
        pattern: &[(usize, usize)],
        ground: &GraphGround,
        images: &mut Vec<SubsetMask>,
    ) {
        if depth == map.len() {
            let bits = pattern.iter().fold(0u64, |acc, &(a, b)| {
                acc | 1 << ground.index(map[a], map[b]).unwrap()
            });
            images.push(SubsetMask::raw(ground.edge_count(), bits));
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                map[depth] = v;
                place(depth + 1, map, used, pattern, ground, images);
                used[v] = false;
            }
        }
    }
    place(0, &mut map, &mut used, &pattern, &ground, &mut images);
    normalize_to_antichain(ground.edge_count(), &images)
}

pub fn triangle(n: usize) -> Result<UpperSet> {
    subgraph_containment(n, &[(0, 1), (1, 2), (0, 2)])
}

/// Star with `leaves` leaves.
pub fn star(n: usize, leaves: usize) -> Result<UpperSet> {
    let h: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    subgraph_containment(n, &h)
}

/// Hamiltonian cycle on all `n` vertices.
pub fn hamiltonian_cycle(n: usize) -> Result<UpperSet> {
    if n < 3 {
        return Err(Error::OutOfRange(
            "a cycle needs at least 3 vertices".into(),
        ));
    }
    let h: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    subgraph_containment(n, &h)
}

/// Hamiltonian path on all `n` vertices.
pub fn hamiltonian_path(n: usize) -> Result<UpperSet> {
    let h: Vec<_> = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
    subgraph_containment(n, &h)
}

/// Matching with `edges` disjoint edges.
pub fn matching(n: usize, edges: usize) -> Result<UpperSet> {
    let h: Vec<_> = (0..edges).map(|i| (2 * i, 2 * i + 1)).collect();
    subgraph_containment(n, &h)
}

/// All nonempty subsets of an `n`-element ground set: minimals are the singletons.
pub fn singletons(n: usize) -> Result<UpperSet> {
    let gens: Vec<_> = (0..n)
        .map(|i| SubsetMask::from_elements(n, [i]))
        .collect::<Result<_>>()?;
    normalize_to_antichain(n, &gens)
}

/// All subsets of size at least `k`: minimals are the `k`-subsets of `{0, .., n-1}`.
pub fn uniform(n: usize, k: usize) -> Result<UpperSet> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!(
            "uniform family needs 1 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    SubsetMask::full(n)?;
    let mut gens = Vec::new();
    for_each_k_subset(n, k, |bits| gens.push(SubsetMask::raw(n, bits)));
    normalize_to_antichain(n, &gens)
}

/// `count` masks drawn uniformly from the nonempty subsets of size at most
/// `max_size`, reduced to an antichain. Deterministic in `seed`.
pub fn random_upper_set(
    ground_size: usize,
    count: usize,
    max_size: usize,
    seed: u64,
) -> Result<UpperSet> {
    if count == 0 {
        return Err(Error::OutOfRange("count must be at least 1".into()));
    }
    if max_size == 0 || max_size >= ground_size {
        return Err(Error::OutOfRange(format!(
            "need 1 ≤ max_size < ground_size, got max_size={max_size}, ground_size={ground_size}"
        )));
    }
    SubsetMask::full(ground_size)?;
    let by_size: Vec<u64> = (1..=max_size).map(|k| binomial(ground_size, k)).collect();
    let total: u64 = by_size.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(count);
    for _ in 0..count {
        let mut r = rng.gen_range(0..total);
        let mut k = 1;
        for &c in &by_size {
            if r < c {
                break;
            }
            r -= c;
            k += 1;
        }
        draws.push(SubsetMask::raw(ground_size, unrank_combination(r, k)));
    }
    let f = normalize_to_antichain(ground_size, &draws)?;
    if f.min_count() == 0 {
        return Err(Error::OutOfRange("degenerate draw".into()));
    }
    Ok(f)
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// The `rank`-th `k`-subset in colexicographic order.
fn unrank_combination(mut rank: u64, k: usize) -> u64 {
    let mut bits = 0u64;
    for i in (1..=k).rev() {
        let mut c = i - 1;
        while binomial(c + 1, i) <= rank {
            c += 1;
        }
        rank -= binomial(c, i);
        bits |= 1 << c;
    }
    bits
}
