//! Finite-range diagnostics for statements about sequences `F_n`.
//!
//! A sweep evaluates one instance per `n`. Nothing here proves a limit: the
//! reports say whether the observed rows are consistent with, or contradict,
//! a sequence-level statement, and name the `N` from which that is observed.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{BoundVariant, InstanceQuantities, VerifyOptions};
use crate::error::{Error, Result};
use crate::families;
use crate::format::{format_sig, sig12_opt};
use crate::mask::SubsetMask;
use crate::upset::UpperSet;

/// Parameterized instance families available to sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Connected spanning subgraphs of `K_n`.
    Connectivity,
    /// `⟨{0, .., n-1}⟩` inside a ground set of size `n + 1`.
    Principal,
    /// All singletons of an `n`-element ground set.
    Singletons,
    /// Triangle containment in `K_n`.
    Triangle,
    /// Spanning star `S_{n-1}` in `K_n`.
    Star,
    /// Hamiltonian cycle in `K_n`.
    Hamiltonian,
    /// Hamiltonian path in `K_n`.
    Path,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Connectivity,
        Family::Principal,
        Family::Singletons,
        Family::Triangle,
        Family::Star,
        Family::Hamiltonian,
        Family::Path,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Connectivity => "connectivity",
            Family::Principal => "principal",
            Family::Singletons => "singletons",
            Family::Triangle => "triangle",
            Family::Star => "star",
            Family::Hamiltonian => "hamiltonian",
            Family::Path => "path",
        }
    }

    pub fn parse(name: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::OutOfRange(format!("unknown family {name:?}")))
    }

    pub fn instance(self, n: usize) -> Result<UpperSet> {
        match self {
            Family::Connectivity => families::graph_connectivity(n),
            Family::Principal => {
                let s = SubsetMask::from_elements(n + 1, 0..n)?;
                families::principal(n + 1, s)
            }
            Family::Singletons => families::singletons(n),
            Family::Triangle => families::triangle(n),
            Family::Star => families::star(n, n.saturating_sub(1)),
            Family::Hamiltonian => families::hamiltonian_cycle(n),
            Family::Path => families::hamiltonian_path(n),
        }
    }
}

/// One row of a sweep. Quantities past a computation cap are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub min_count: Option<usize>,
    pub ell0: Option<usize>,
    pub ell: Option<usize>,
    pub dim_unrestricted: Option<usize>,
    pub dim_within_family: Option<usize>,
    #[serde(serialize_with = "sig12_opt")]
    pub q: Option<f64>,
    #[serde(serialize_with = "sig12_opt")]
    pub p_c: Option<f64>,
    #[serde(serialize_with = "sig12_opt")]
    pub bound_value: Option<f64>,
    #[serde(serialize_with = "sig12_opt")]
    pub width: Option<f64>,
    pub nontrivial_info: Option<bool>,
    /// `q · log ℓ`, in the variant's logarithm base.
    #[serde(serialize_with = "sig12_opt")]
    pub ratio_perfect: Option<f64>,
    /// Entry `t`: whether `σ_{|F₀|-t}(F₀) = ∅`; `None` when `|F₀| - t < 1`.
    pub sigma_empty_at: Vec<Option<bool>>,
    /// The variant constant the row was computed with.
    #[serde(rename = "K")]
    pub k_constant: f64,
    pub error: Option<String>,
}

impl SweepRecord {
    fn empty(n: usize, t_max: usize, k: f64) -> Self {
        Self {
            n,
            min_count: None,
            ell0: None,
            ell: None,
            dim_unrestricted: None,
            dim_within_family: None,
            q: None,
            p_c: None,
            bound_value: None,
            width: None,
            nontrivial_info: None,
            ratio_perfect: None,
            sigma_empty_at: vec![None; t_max + 1],
            k_constant: k,
            error: None,
        }
    }

    /// Builds a row from already computed quantities.
    pub fn from_quantities(
        n: usize,
        x: &InstanceQuantities,
        v: &BoundVariant,
        t_max: usize,
    ) -> Self {
        let bound = v.bound_from_q(x.q, x.ell0, x.ell);
        let m = x.min_count;
        Self {
            n,
            min_count: Some(m),
            ell0: Some(x.ell0),
            ell: Some(x.ell),
            dim_unrestricted: x.dim_unrestricted,
            dim_within_family: x.dim_within_family,
            q: Some(x.q),
            p_c: Some(x.p_c),
            bound_value: Some(bound),
            width: Some(bound - x.q),
            nontrivial_info: Some(bound < 1.0),
            ratio_perfect: Some(x.q * v.log(x.ell as f64)),
            sigma_empty_at: (0..=t_max)
                .map(|t| (t < m).then(|| m - t > x.max_sigma_index))
                .collect(),
            k_constant: v.k,
            error: None,
        }
    }
}

/// Evaluates `family` at every `n` in `range` (inclusive). Rows are computed
/// independently; a failing row records its error and the sweep continues.
pub fn sweep(
    family: Family,
    range: std::ops::RangeInclusive<usize>,
    v: &BoundVariant,
    t_max: usize,
    options: &VerifyOptions,
) -> Vec<SweepRecord> {
    let ns: Vec<usize> = range.collect();
    ns.par_iter()
        .map(|&n| {
            let computed = family
                .instance(n)
                .and_then(|f| InstanceQuantities::compute(&f, options).map(|x| (f, x)));
            match computed {
                Ok((_, x)) => SweepRecord::from_quantities(n, &x, v, t_max),
                Err(e) => {
                    let mut row = SweepRecord::empty(n, t_max, v.k);
                    if let Ok(f) = family.instance(n) {
                        let (ell0, ell) = f.ell();
                        let m = f.min_count();
                        let t = crate::structure::element_profile(&f)
                            .into_iter()
                            .max()
                            .unwrap_or(0);
                        row.min_count = Some(m);
                        row.ell0 = Some(ell0);
                        row.ell = Some(ell);
                        row.sigma_empty_at =
                            (0..=t_max).map(|tp| (tp < m).then(|| m - tp > t)).collect();
                    }
                    row.error = Some(e.to_string());
                    row
                }
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "n,min_count,ell0,ell,dim_u,dim_f,q,p_c,bound,width,nontrivial,ratio";

/// CSV text: fixed header, one `sigma_empty_t{t}` column per `t`, 12 significant digits.
pub fn to_csv(records: &[SweepRecord], t_max: usize) -> String {
    let mut out = String::from(CSV_HEADER);
    for t in 0..=t_max {
        write!(out, ",sigma_empty_t{t}").unwrap();
    }
    out.push('\n');
    fn int(x: Option<usize>) -> String {
        x.map(|v| v.to_string()).unwrap_or_default()
    }
    fn real(x: Option<f64>) -> String {
        x.map(format_sig).unwrap_or_default()
    }
    fn flag(x: Option<bool>) -> String {
        x.map(|b| b.to_string()).unwrap_or_default()
    }
    for r in records {
        let cells = [
            r.n.to_string(),
            int(r.min_count),
            int(r.ell0),
            int(r.ell),
            int(r.dim_unrestricted),
            int(r.dim_within_family),
            real(r.q),
            real(r.p_c),
            real(r.bound_value),
            real(r.width),
            flag(r.nontrivial_info),
            real(r.ratio_perfect),
        ];
        out.push_str(&cells.join(","));
        for t in 0..=t_max {
            out.push(',');
            out.push_str(&flag(r.sigma_empty_at.get(t).copied().flatten()));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaOnset {
    pub t: usize,
    /// Smallest observed `n` from which `σ_{|F₀|-t} = ∅` in every later row.
    pub from_n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryConditionsReport {
    pub sigma_onsets: Vec<SigmaOnset>,
    /// `|F₀|` strictly increasing over the observed rows.
    pub min_count_increasing: bool,
    /// Unrestricted dimension strictly increasing over rows where it is known;
    /// `None` with fewer than two such rows.
    pub dim_increasing: Option<bool>,
    /// Rows with `nontrivial_info = true`, `K ≥ 2`, and a nonempty common
    /// intersection of minimals. Any entry indicates a bug.
    pub contradictions: Vec<usize>,
    pub observed_range: (usize, usize),
    pub disclaimer: &'static str,
}

const DISCLAIMER: &str =
    "finite-range diagnostic over the observed rows; not a statement about the limit";

pub fn necessary_conditions_report(records: &[SweepRecord]) -> Result<NecessaryConditionsReport> {
    let (first, last) = match (records.first(), records.last()) {
        (Some(a), Some(b)) => (a.n, b.n),
        _ => return Err(Error::EmptyInput),
    };
    let t_max = records
        .iter()
        .map(|r| r.sigma_empty_at.len())
        .max()
        .unwrap_or(0);
    let sigma_onsets = (0..t_max)
        .map(|t| {
            let flags: Vec<bool> = records
                .iter()
                .map(|r| r.sigma_empty_at.get(t).copied().flatten() == Some(true))
                .collect();
            let from_n = suffix_start(&flags).map(|i| records[i].n);
            SigmaOnset { t, from_n }
        })
        .collect();
    let counts: Vec<usize> = records.iter().filter_map(|r| r.min_count).collect();
    let dims: Vec<usize> = records.iter().filter_map(|r| r.dim_unrestricted).collect();
    let contradictions = records
        .iter()
        .filter(|r| {
            r.nontrivial_info == Some(true)
                && r.k_constant >= 2.0
                && r.sigma_empty_at.first().copied().flatten() == Some(false)
        })
        .map(|r| r.n)
        .collect();
    Ok(NecessaryConditionsReport {
        sigma_onsets,
        min_count_increasing: counts.len() == records.len() && strictly_increasing(&counts),
        dim_increasing: (dims.len() >= 2).then(|| strictly_increasing(&dims)),
        contradictions,
        observed_range: (first, last),
        disclaimer: DISCLAIMER,
    })
}

/// Index where the final all-true run of `flags` begins.
fn suffix_start(flags: &[bool]) -> Option<usize> {
    let run = flags.iter().rev().take_while(|&&b| b).count();
    (run > 0).then(|| flags.len() - run)
}

fn strictly_increasing(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// `bound < 1` in every observed row from `n` on.
    NontrivialFromN { n: usize },
    /// As above, and `q · log ℓ` strictly decreasing over the trailing window.
    PerfectTrend { n: usize },
    /// No observed row has `bound < 1`.
    NeverNontrivial,
    /// Some rows have `bound < 1` but the last observed row does not, or
    /// bounds are missing.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformationClassification {
    pub classification: Classification,
    pub window: usize,
    pub disclaimer: &'static str,
}

/// Default trailing-window fraction for the perfect-information proxy.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;

pub fn information_classification(records: &[SweepRecord]) -> Result<InformationClassification> {
    information_classification_with(records, DEFAULT_WINDOW_FRACTION)
}

/// Classifies the observed trend; the trailing window covers
/// `⌈fraction · rows⌉` rows.
pub fn information_classification_with(
    records: &[SweepRecord],
    window_fraction: f64,
) -> Result<InformationClassification> {
    if records.len() < 3 {
        return Err(Error::TooFewRecords {
            needed: 3,
            found: records.len(),
        });
    }
    let window = ((window_fraction * records.len() as f64).ceil() as usize).clamp(2, records.len());
    let nontrivial: Option<Vec<bool>> = records.iter().map(|r| r.nontrivial_info).collect();
    let classification = match nontrivial {
        None => Classification::Inconclusive,
        Some(flags) if !flags.iter().any(|&b| b) => Classification::NeverNontrivial,
        Some(flags) => match suffix_start(&flags) {
            None => Classification::Inconclusive,
            Some(i) => {
                let n = records[i].n;
                let ratios: Option<Vec<f64>> = records[records.len() - window..]
                    .iter()
                    .map(|r| r.ratio_perfect)
                    .collect();
                let decreasing = ratios.is_some_and(|r| r.windows(2).all(|w| w[1] < w[0]));
                if decreasing {
                    Classification::PerfectTrend { n }
                } else {
                    Classification::NontrivialFromN { n }
                }
            }
        },
    };
    Ok(InformationClassification {
        classification,
        window,
        disclaimer: DISCLAIMER,
    })
}

/// The trailing JSON summary printed after a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub family: &'static str,
    pub classification: Option<InformationClassification>,
    pub necessary_conditions: Option<NecessaryConditionsReport>,
    pub row_errors: Vec<(usize, String)>,
}

pub fn summarize(family: Family, records: &[SweepRecord]) -> SweepSummary {
    SweepSummary {
        family: family.name(),
        classification: information_classification(records).ok(),
        necessary_conditions: necessary_conditions_report(records).ok(),
        row_errors: records
            .iter()
            .filter_map(|r| r.error.clone().map(|e| (r.n, e)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(n: usize, q: f64, ell: usize, v: &BoundVariant) -> SweepRecord {
        let bound = v.bound_from_q(q, ell, ell);
        let mut r = SweepRecord::empty(n, 0, v.k);
        r.q = Some(q);
        r.ell0 = Some(ell);
        r.ell = Some(ell);
        r.bound_value = Some(bound);
        r.width = Some(bound - q);
        r.nontrivial_info = Some(bound < 1.0);
        r.ratio_perfect = Some(q * v.log(ell as f64));
        r
    }

    #[test]
    fn synthetic_perfect_trend() {
        let v = BoundVariant::kk_log_ell(8.0);
        let rows: Vec<_> = (3..=10)
            .map(|n| synthetic(n, 1.0 / (n * n) as f64, n, &v))
            .collect();
        let c = information_classification(&rows).unwrap();
        // 8 log2(n) / n² < 1 from n = 5 on
        assert_eq!(c.classification, Classification::PerfectTrend { n: 5 });
    }

    #[test]
    fn too_few_records() {
        let v = BoundVariant::bell();
        let rows: Vec<_> = (3..=4).map(|n| synthetic(n, 0.1, n, &v)).collect();
        assert_eq!(
            information_classification(&rows),
            Err(Error::TooFewRecords {
                needed: 3,
                found: 2
            })
        );
        assert_eq!(necessary_conditions_report(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn never_and_inconclusive() {
        let v = BoundVariant::bell();
        let rows: Vec<_> = (3..=6).map(|n| synthetic(n, 0.5, n, &v)).collect();
        assert_eq!(
            information_classification(&rows).unwrap().classification,
            Classification::NeverNontrivial
        );
        let mut rows: Vec<_> = (3..=6).map(|n| synthetic(n, 0.01, n, &v)).collect();
        rows.push(synthetic(7, 0.9, 7, &v));
        assert_eq!(
            information_classification(&rows).unwrap().classification,
            Classification::Inconclusive
        );
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::parse(f.name()).unwrap(), f);
        }
        assert!(Family::parse("planarity").is_err());
    }

    #[test]
    fn empty_range_sweep() {
        #[allow(clippy::reversed_empty_ranges)]
        let rows = sweep(
            Family::Connectivity,
            3..=2,
            &BoundVariant::bell(),
            1,
            &VerifyOptions::default(),
        );
        assert!(rows.is_empty());
        assert_eq!(
            to_csv(&rows, 1),
            format!("{CSV_HEADER},sigma_empty_t0,sigma_empty_t1\n")
        );
    }
}
