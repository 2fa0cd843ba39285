//! The Park-Pham sandwich `q ≤ p_c ≤ K q log ℓ` and the companion inequalities
//! on a single instance, gathered into a [`BoundReport`].
//!
//! Every check carries `slack = rhs - lhs` (nonnegative when the inequality
//! holds). Logical implications report the slack of their conclusion when the
//! premise holds and `null` when they are vacuous.

use serde::Serialize;

use crate::error::Result;
use crate::expectation::{CoverOptions, CoverSearch};
use crate::format::{sig12, sig12_opt};
use crate::measure::{self, ExactProfile, Method, MuEstimate, DEFAULT_TOLERANCE};
use crate::structure::{covering_dimension, element_profile, DimConvention};
use crate::upset::UpperSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    KkLogEll,
    Bell8Log2Ell0,
    ParkVondrak4p5,
    Custom,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

/// What the logarithm is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundArgument {
    /// `ℓ = max(ℓ₀, 2)`.
    Ell,
    /// `2ℓ₀`.
    TwoEll0,
}

/// A concrete form `K · q · log_base(argument)` of the upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundVariant {
    pub name: VariantName,
    #[serde(rename = "K")]
    pub k: f64,
    pub log_base: LogBase,
    pub argument: BoundArgument,
}

impl BoundVariant {
    /// `K q log₂ ℓ` with a caller-chosen constant.
    pub fn kk_log_ell(k: f64) -> Self {
        Self {
            name: VariantName::KkLogEll,
            k,
            log_base: LogBase::Two,
            argument: BoundArgument::Ell,
        }
    }

    /// `8 q log₂(2ℓ₀)`.
    pub fn bell() -> Self {
        Self {
            name: VariantName::Bell8Log2Ell0,
            k: 8.0,
            log_base: LogBase::Two,
            argument: BoundArgument::TwoEll0,
        }
    }

    /// `4.5 q log₂(2ℓ₀)`.
    pub fn park_vondrak() -> Self {
        Self {
            name: VariantName::ParkVondrak4p5,
            k: 4.5,
            log_base: LogBase::Two,
            argument: BoundArgument::TwoEll0,
        }
    }

    pub fn custom(k: f64, log_base: LogBase, argument: BoundArgument) -> Self {
        Self {
            name: VariantName::Custom,
            k,
            log_base,
            argument,
        }
    }

    pub fn log(&self, x: f64) -> f64 {
        match self.log_base {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    pub fn argument_value(&self, ell0: usize, ell: usize) -> f64 {
        match self.argument {
            BoundArgument::Ell => ell as f64,
            BoundArgument::TwoEll0 => 2.0 * ell0 as f64,
        }
    }

    /// `log(argument)` for `f`.
    pub fn log_factor(&self, f: &UpperSet) -> f64 {
        let (ell0, ell) = f.ell();
        self.log(self.argument_value(ell0, ell))
    }

    pub fn bound_from_q(&self, q: f64, ell0: usize, ell: usize) -> f64 {
        self.k * q * self.log(self.argument_value(ell0, ell))
    }
}

impl Default for BoundVariant {
    fn default() -> Self {
        Self::bell()
    }
}

/// Settings shared by every single-instance computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: f64,
    /// Exact method for `p_c`; `None` picks one with [`Method::auto`].
    pub method: Option<Method>,
    /// Which dimension feeds the `q` estimate and the dimension checks.
    pub dim_convention: DimConvention,
    pub cover: CoverOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            method: None,
            dim_convention: DimConvention::Unrestricted,
            cover: CoverOptions::default(),
        }
    }
}

/// The raw quantities of one instance; the checks are a pure function of these.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceQuantities {
    pub ground_size: usize,
    pub min_count: usize,
    pub q: f64,
    pub p_c: f64,
    pub ell0: usize,
    pub ell: usize,
    pub dim_unrestricted: Option<usize>,
    pub dim_within_family: Option<usize>,
    /// Largest `m` with `σ_m(F₀) ≠ ∅`.
    pub max_sigma_index: usize,
    pub tolerance: f64,
}

impl InstanceQuantities {
    pub fn compute(f: &UpperSet, options: &VerifyOptions) -> Result<Self> {
        let tol = options.tolerance;
        let method = match options.method {
            Some(m) => m,
            None => Method::auto(f)?,
        };
        let ((q, p_c), (dim_u, dim_f)) = rayon::join(
            || {
                rayon::join(
                    || -> Result<f64> {
                        Ok(CoverSearch::new(f, options.cover)?
                            .expectation_threshold(tol)?
                            .q)
                    },
                    || -> Result<f64> {
                        let profile = ExactProfile::new(f, method)?;
                        Ok(measure::critical_probability_of(&profile, tol)?.p_c)
                    },
                )
            },
            || {
                rayon::join(
                    || {
                        covering_dimension(f, DimConvention::Unrestricted)
                            .ok()
                            .map(|d| d.dim)
                    },
                    || {
                        covering_dimension(f, DimConvention::WithinFamily)
                            .ok()
                            .map(|d| d.dim)
                    },
                )
            },
        );
        let (ell0, ell) = f.ell();
        Ok(Self {
            ground_size: f.ground_size(),
            min_count: f.min_count(),
            q: q?,
            p_c: p_c?,
            ell0,
            ell,
            dim_unrestricted: dim_u,
            dim_within_family: dim_f,
            max_sigma_index: element_profile(f).into_iter().max().unwrap_or(0),
            tolerance: tol,
        })
    }

    pub fn dim(&self, convention: DimConvention) -> Option<usize> {
        match convention {
            DimConvention::Unrestricted => self.dim_unrestricted,
            DimConvention::WithinFamily => self.dim_within_family,
        }
    }

    /// `σ_{|F₀|}(F₀) = ∅`, i.e. the minimals have empty common intersection.
    pub fn common_intersection_empty(&self) -> bool {
        self.max_sigma_index < self.min_count
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaFlag {
    pub k: usize,
    pub empty: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    /// `None` when the check could not be evaluated (missing quantity or a
    /// configuration it is not stated for).
    pub holds: Option<bool>,
    /// `rhs - lhs`; `None` for vacuous implications or skipped checks.
    #[serde(serialize_with = "sig12_opt")]
    pub slack: Option<f64>,
}

impl InequalityCheck {
    pub fn violated(&self) -> bool {
        self.holds == Some(false)
    }
}

/// Everything computed for one instance, serialized with a fixed field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub variant: BoundVariant,
    pub ground_size: usize,
    pub min_count: usize,
    #[serde(serialize_with = "sig12")]
    pub q: f64,
    #[serde(serialize_with = "sig12")]
    pub p_c: f64,
    pub ell0: usize,
    pub ell: usize,
    pub dim_unrestricted: Option<usize>,
    pub dim_within_family: Option<usize>,
    pub dim_convention: DimConvention,
    #[serde(serialize_with = "sig12")]
    pub bound_value: f64,
    #[serde(serialize_with = "sig12")]
    pub width: f64,
    pub nontrivial_info: bool,
    pub sigma_profile: Vec<SigmaFlag>,
    pub inequality_checks: Vec<InequalityCheck>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_check: Option<MuEstimate>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        !self.inequality_checks.iter().any(InequalityCheck::violated)
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.inequality_checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

/// `K · q(F) · log(argument)`.
pub fn kk_bound(f: &UpperSet, v: &BoundVariant) -> Result<f64> {
    let q = crate::expectation::expectation_threshold(f, DEFAULT_TOLERANCE)?.q;
    let (ell0, ell) = f.ell();
    Ok(v.bound_from_q(q, ell0, ell))
}

/// Whether the bound improves on the trivial `p_c < 1`.
pub fn provides_nontrivial_info(f: &UpperSet, v: &BoundVariant) -> Result<bool> {
    Ok(kk_bound(f, v)? < 1.0)
}

/// `((2 dim)^{-1}, (2 dim)^{-1/ℓ})` with the unrestricted dimension.
pub fn q_estimate_interval(f: &UpperSet) -> Result<(f64, f64)> {
    let dim = covering_dimension(f, DimConvention::Unrestricted)?.dim;
    Ok(q_interval(dim, f.ell().1))
}

fn q_interval(dim: usize, ell: usize) -> (f64, f64) {
    let two_dim = 2.0 * dim as f64;
    (1.0 / two_dim, two_dim.powf(-1.0 / ell as f64))
}

/// Computes every quantity of `f` and evaluates all checks.
pub fn verify_instance(f: &UpperSet, v: &BoundVariant) -> Result<BoundReport> {
    verify_instance_with(f, v, &VerifyOptions::default())
}

pub fn verify_instance_with(
    f: &UpperSet,
    v: &BoundVariant,
    options: &VerifyOptions,
) -> Result<BoundReport> {
    let quantities = InstanceQuantities::compute(f, options)?;
    Ok(evaluate(&quantities, v, options.dim_convention))
}

/// Evaluates every check on precomputed quantities.
pub fn evaluate(
    x: &InstanceQuantities,
    v: &BoundVariant,
    convention: DimConvention,
) -> BoundReport {
    let tol = x.tolerance;
    let bound = v.bound_from_q(x.q, x.ell0, x.ell);
    let log_factor = v.log(v.argument_value(x.ell0, x.ell));
    let m = x.min_count;
    let t = x.max_sigma_index;
    let dim = x.dim(convention);
    let mut notes = Vec::new();
    let mut checks = Vec::new();

    let ineq = |name, slack: f64, allowance: f64| InequalityCheck {
        name,
        holds: Some(slack >= -allowance),
        slack: Some(slack),
    };
    let skipped = |name| InequalityCheck {
        name,
        holds: None,
        slack: None,
    };

    checks.push(ineq("sandwich_left", x.p_c - x.q, 2.0 * tol));
    checks.push(ineq("sandwich_right", bound - x.p_c, 2.0 * tol));

    match dim {
        Some(d) => {
            let (lo, hi) = q_interval(d, x.ell);
            checks.push(ineq("q_estimate_lower", x.q - lo, tol));
            checks.push(ineq("q_estimate_upper", hi - x.q, tol));

            // For every m with σ_m ≠ ∅ (exactly m ≤ t): dim ≤ |F₀| - m + 1.
            let dim_ineq_ok = (1..=m).all(|mm| d + mm <= m + 1 || mm > t);
            checks.push(InequalityCheck {
                name: "dim_inequality",
                holds: Some(dim_ineq_ok),
                slack: Some((m + 1 - t) as f64 - d as f64),
            });
            checks.push(ineq("dim_formula", (m + 1 - t) as f64 - d as f64, 0.0));

            // σ_{|F₀|-t'} ≠ ∅ ⇒ dim ≤ t' + 1, for 0 ≤ t' < |F₀|.
            let applicable: Vec<usize> = (0..m).filter(|&tp| m - tp <= t).collect();
            let slack = applicable
                .iter()
                .map(|&tp| (tp + 1) as f64 - d as f64)
                .reduce(f64::min);
            checks.push(InequalityCheck {
                name: "sigma_emptiness_corollary",
                holds: Some(slack.is_none_or(|s| s >= 0.0)),
                slack,
            });

            // dim > ½ (K log)^ℓ ⇒ bound < 1.
            let threshold = 0.5 * (v.k * log_factor).powi(x.ell as i32);
            let premise = (d as f64) > threshold;
            checks.push(InequalityCheck {
                name: "dim_sufficient_condition",
                holds: Some(!premise || bound < 1.0),
                slack: premise.then_some(1.0 - bound),
            });
        }
        None => {
            notes.push(format!(
                "dimension not computed: |F0| = {m} exceeds the exact-search cap"
            ));
            for name in [
                "q_estimate_lower",
                "q_estimate_upper",
                "dim_inequality",
                "dim_formula",
                "sigma_emptiness_corollary",
                "dim_sufficient_condition",
            ] {
                checks.push(skipped(name));
            }
        }
    }

    match (x.dim_unrestricted, x.dim_within_family) {
        (Some(u), Some(w)) => {
            let slack = (w as f64 - u as f64).min(m as f64 - w as f64);
            checks.push(ineq("dim_ordering", slack, 0.0));
        }
        _ => checks.push(skipped("dim_ordering")),
    }

    // Nonempty common intersection and K ≥ 2 ⇒ bound ≥ 1. The argument uses
    // log(argument) ≥ 1, so it is only stated for the base-2 logarithm.
    let no_go = if v.k < 2.0 {
        InequalityCheck {
            name: "intersection_no_go",
            holds: Some(true),
            slack: None,
        }
    } else if v.log_base != LogBase::Two {
        notes.push("intersection_no_go is not checked under the natural logarithm".into());
        skipped("intersection_no_go")
    } else if x.common_intersection_empty() {
        InequalityCheck {
            name: "intersection_no_go",
            holds: Some(true),
            slack: None,
        }
    } else {
        ineq("intersection_no_go", bound - 1.0, 0.0)
    };
    checks.push(no_go);

    if v.k < 4.5 {
        notes.push(format!(
            "K = {} is below 4.5; constants this small are only established for sequences with ℓ → ∞",
            v.k
        ));
    }

    let sigma_profile = (1..=m).map(|k| SigmaFlag { k, empty: k > t }).collect();

    BoundReport {
        variant: *v,
        ground_size: x.ground_size,
        min_count: m,
        q: x.q,
        p_c: x.p_c,
        ell0: x.ell0,
        ell: x.ell,
        dim_unrestricted: x.dim_unrestricted,
        dim_within_family: x.dim_within_family,
        dim_convention: convention,
        bound_value: bound,
        width: bound - x.q,
        nontrivial_info: bound < 1.0,
        sigma_profile,
        inequality_checks: checks,
        notes,
        mc_check: None,
    }
}
