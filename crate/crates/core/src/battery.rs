//! The builtin regression battery: every family at the sizes the exact
//! solvers handle, plus seeded random antichains.

use crate::error::Result;
use crate::families;
use crate::mask::SubsetMask;
use crate::upset::UpperSet;

/// Number of seeded random antichains in the battery.
pub const RANDOM_INSTANCES: usize = 150;
/// Base seed for the random part; instance `i` uses `RANDOM_SEED_BASE + i`.
pub const RANDOM_SEED_BASE: u64 = 0x5eed_0000;

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryInstance {
    pub name: String,
    pub upset: UpperSet,
}

fn push(out: &mut Vec<BatteryInstance>, name: String, f: Result<UpperSet>) {
    out.push(BatteryInstance {
        name,
        upset: f.expect("battery instances are valid by construction"),
    });
}

/// Family instances only.
pub fn family_instances() -> Vec<BatteryInstance> {
    let mut out = Vec::new();
    for k in 1..=6 {
        let s = SubsetMask::from_elements(7, 0..k).unwrap();
        push(
            &mut out,
            format!("principal(n=7,|S|={k})"),
            families::principal(7, s),
        );
    }
    for k in 1..=8 {
        let s = SubsetMask::from_elements(k + 1, 0..k).unwrap();
        push(
            &mut out,
            format!("principal(n={},|S|={k})", k + 1),
            families::principal(k + 1, s),
        );
    }
    for k in 1..=8 {
        push(
            &mut out,
            format!("singletons({k})"),
            families::singletons(k),
        );
    }
    // K_5 (125 spanning trees) is past the exact cover search cap.
    for n in 3..=4 {
        push(
            &mut out,
            format!("connectivity({n})"),
            families::graph_connectivity(n),
        );
    }
    for n in 3..=6 {
        push(&mut out, format!("triangle({n})"), families::triangle(n));
    }
    for n in 3..=6 {
        push(
            &mut out,
            format!("spanning_star({n})"),
            families::star(n, n - 1),
        );
    }
    for n in 4..=6 {
        push(&mut out, format!("star3({n})"), families::star(n, 3));
    }
    for n in 4..=6 {
        push(
            &mut out,
            format!("hamiltonian_cycle({n})"),
            families::hamiltonian_cycle(n),
        );
    }
    for n in 3..=5 {
        push(
            &mut out,
            format!("hamiltonian_path({n})"),
            families::hamiltonian_path(n),
        );
    }
    for n in 3..=5 {
        push(
            &mut out,
            format!("two_edge_path({n})"),
            families::subgraph_containment(n, &[(0, 1), (1, 2)]),
        );
    }
    for n in [4, 5, 6] {
        push(
            &mut out,
            format!("matching2({n})"),
            families::matching(n, 2),
        );
    }
    for n in 3..=7 {
        for k in 2..n {
            push(
                &mut out,
                format!("uniform({n},{k})"),
                families::uniform(n, k),
            );
        }
    }
    out
}

/// Seeded random antichains with `n ≤ 12` and `|F₀| ≤ 10`.
pub fn random_instances() -> Vec<BatteryInstance> {
    (0..RANDOM_INSTANCES)
        .map(|i| {
            let seed = RANDOM_SEED_BASE + i as u64;
            let n = 4 + i % 9;
            let count = 1 + i % 10;
            let max_size = 1 + (i / 3) % (n - 1).min(5);
            BatteryInstance {
                name: format!("random(n={n},count={count},max={max_size},seed={seed})"),
                upset: families::random_upper_set(n, count, max_size, seed)
                    .expect("battery parameters are in range"),
            }
        })
        .collect()
}

pub fn builtin() -> Vec<BatteryInstance> {
    let mut all = family_instances();
    all.extend(random_instances());
    all
}
