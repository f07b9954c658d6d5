//! One-sided Gâteaux derivatives of the tuple norm and smoothness tests.

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linops::OperatorTuple;
use crate::normcalc::{attainment_set, joint_attainment_check, tuple_norm, tuple_norm_with, JointAttainment, SearchOptions};
use crate::spaces::Vector;

/// Step sizes of the difference quotients, largest first.
const STEPS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
/// Disagreement between methods that gets flagged.
const CROSS_CHECK_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateauxMethod {
    DifferenceQuotient,
    AttainmentFormula,
    ComponentFormula,
}

impl std::fmt::Display for GateauxMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GateauxMethod::DifferenceQuotient => "difference_quotient",
            GateauxMethod::AttainmentFormula => "attainment_formula",
            GateauxMethod::ComponentFormula => "component_formula",
        })
    }
}

/// The formula `max/min_x ρ±(𝒯x, 𝒮x)` over attainment representatives.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub orbits: usize,
    pub disagreement: f64,
    pub flagged: bool,
}

/// `ρ−(𝒯,𝒮) ≤ ρ+(𝒯,𝒮)`.
#[derive(Clone, Debug, Serialize)]
pub struct GateauxPair {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub method: GateauxMethod,
    /// `(t, q(t))`; negative `t` belongs to the left quotient.
    pub quotient_trace: Vec<(f64, f64)>,
    /// `q(10^-5) − q(10^-6)` on each side, as nonnegative bounds.
    pub error_minus: f64,
    pub error_plus: f64,
    /// Quotients move monotonically toward the limit (within 1e-9).
    pub monotone: bool,
    pub cross_check: Option<CrossCheck>,
    /// Components entering a component formula.
    pub components: Vec<usize>,
}

impl GateauxPair {
    /// `ρ− ≤ ρ+` up to the reported quotient errors and 1e-9.
    pub fn ordered(&self) -> bool {
        self.rho_minus <= self.rho_plus + self.error_minus + self.error_plus + 1e-9
    }
}

/// `ρ±(𝒯,𝒮)` from difference quotients of `t ↦ ‖𝒯 + t𝒮‖`, cross-checked
/// against the attainment formula.
pub fn rho_operator(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<GateauxPair> {
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    if s.d() != t.d() {
        return Err(Error::DimensionMismatch { expected: t.d(), found: s.d() });
    }
    let base = tuple_norm(t, cfg);
    let mut hints = base.witness_entries();
    let mut plus = Vec::with_capacity(STEPS.len());
    let mut minus = Vec::with_capacity(STEPS.len());
    for &h in &STEPS {
        for (sign, out) in [(1.0, &mut plus), (-1.0, &mut minus)] {
            let shifted = t.plus_scaled(sign * h, s)?;
            let opts = SearchOptions { hints: hints.clone(), ..Default::default() };
            let r = tuple_norm_with(&shifted, cfg, &opts);
            for w in r.witness_entries().into_iter().take(2) {
                if !hints.contains(&w) {
                    hints.push(w);
                }
            }
            out.push(r.value);
        }
    }
    // the base value as the best of every maximizer seen, so the quotients
    // share one reference point
    let stacked = t.stacked();
    let n0 = hints.iter().map(|x| stacked.image_norm(x)).fold(base.value, f64::max);
    let qp: Vec<f64> = STEPS.iter().zip(&plus).map(|(h, v)| (v - n0) / h).collect();
    let qm: Vec<f64> = STEPS.iter().zip(&minus).map(|(h, v)| (n0 - v) / h).collect();
    let monotone = qp.windows(2).all(|w| w[1] <= w[0] + 1e-9) && qm.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let k = STEPS.len() - 1;
    let mut trace: Vec<(f64, f64)> = STEPS.iter().zip(&qp).map(|(&h, &q)| (h, q)).collect();
    trace.extend(STEPS.iter().zip(&qm).map(|(&h, &q)| (-h, q)));
    let rho_plus = qp[k];
    let rho_minus = qm[k];

    let set = attainment_set(t, cfg);
    let codomain = t.codomain();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in &set.representatives {
        let y = stacked.matrix.mul_vec(x.entries());
        let sy = s.stacked().matrix.mul_vec(x.entries());
        if let Ok((a, b)) = codomain.rho(&y, &sy, cfg.tau_cluster) {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    let cross_check = lo.is_finite().then(|| {
        let disagreement = (lo - rho_minus).abs().max((hi - rho_plus).abs());
        CrossCheck {
            rho_minus: lo,
            rho_plus: hi,
            orbits: set.orbits(),
            disagreement,
            flagged: disagreement > CROSS_CHECK_TOL,
        }
    });
    Ok(GateauxPair {
        rho_minus,
        rho_plus,
        method: GateauxMethod::DifferenceQuotient,
        quotient_trace: trace,
        error_minus: (qm[k] - qm[k - 1]).abs(),
        error_plus: (qp[k - 1] - qp[k]).abs(),
        monotone,
        cross_check,
        components: Vec::new(),
    })
}

/// Sup-norm tuples: `ρ+(𝒯,𝒮) = max ρ+(T_i,S_i)` and `ρ−(𝒯,𝒮) = min ρ−(T_i,S_i)`
/// over the components with `‖T_i‖ = ‖𝒯‖` (up to `τ_tie`).
pub fn rho_tuple_infty_formula(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<GateauxPair> {
    if t.d() > 1 && !t.outer().is_infinite() {
        return Err(Error::ShapeMismatch("component formula needs the sup-norm outer exponent".into()));
    }
    if s.d() != t.d() {
        return Err(Error::DimensionMismatch { expected: t.d(), found: s.d() });
    }
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let norms: Vec<f64> =
        t.components().iter().map(|c| tuple_norm(&OperatorTuple::single(c.clone()), cfg).value).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    let mut out = GateauxPair {
        rho_minus: f64::INFINITY,
        rho_plus: f64::NEG_INFINITY,
        method: GateauxMethod::ComponentFormula,
        quotient_trace: Vec::new(),
        error_minus: 0.0,
        error_plus: 0.0,
        monotone: true,
        cross_check: None,
        components: Vec::new(),
    };
    for (i, &n) in norms.iter().enumerate() {
        if n < top - cfg.tau_tie {
            continue;
        }
        let ti = OperatorTuple::single(t.component(i).clone());
        let si = OperatorTuple::single(s.component(i).clone());
        let r = rho_operator(&ti, &si, cfg)?;
        out.rho_minus = out.rho_minus.min(r.rho_minus);
        out.rho_plus = out.rho_plus.max(r.rho_plus);
        out.error_minus = out.error_minus.max(r.error_minus);
        out.error_plus = out.error_plus.max(r.error_plus);
        out.monotone &= r.monotone;
        out.components.push(i);
    }
    Ok(out)
}

/// `(Σ ρ−(T_i,S_i), Σ ρ+(T_i,S_i))` without checking any hypothesis.
pub fn component_rho_sums(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<(f64, f64)> {
    if s.d() != t.d() {
        return Err(Error::DimensionMismatch { expected: t.d(), found: s.d() });
    }
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (a, b) in t.components().iter().zip(s.components()) {
        if a.is_zero() {
            // ‖t S‖ = |t| ‖S‖
            let n = tuple_norm(&OperatorTuple::single(b.clone()), cfg).value;
            lo -= n;
            hi += n;
            continue;
        }
        let r = rho_operator(&OperatorTuple::single(a.clone()), &OperatorTuple::single(b.clone()), cfg)?;
        lo += r.rho_minus;
        hi += r.rho_plus;
    }
    Ok((lo, hi))
}

/// Component sums bracketing `ρ±(𝒯,𝒮)` for finite outer exponents, under
/// the hypothesis `∩ M_{T_i} ≠ ∅`.
pub fn rho_sandwich_bounds(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<(f64, f64)> {
    if t.outer().is_infinite() && t.d() > 1 {
        return Err(Error::ShapeMismatch("sandwich bounds need a finite outer exponent".into()));
    }
    let joint = joint_attainment_check(t, cfg);
    if !joint.nonempty {
        return Err(Error::HypothesisNotSatisfied { name: "joint_attainment".into(), margin: joint.margin });
    }
    component_rho_sums(t, s, cfg)
}

const CAVEAT: &str = "attainment orbits come from a multi-start search; a missed orbit would make a non-smooth operator look smooth";

/// Smoothness of `𝒯` via its attainment orbits and the image of the witness.
#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    pub smooth: bool,
    pub attainment_orbits: usize,
    pub witness: Option<Vector>,
    pub codomain_point_smooth: Option<bool>,
    /// Heuristic completeness flag of the attainment search.
    pub search_complete: bool,
    pub caveat: String,
}

/// `𝒯` is smooth iff `M_𝒯` is a single phase orbit `{αx}` and `𝒯x` is a
/// smooth point of the codomain.
pub fn smoothness_of_operator(t: &OperatorTuple, cfg: &Config) -> Result<SmoothnessReport> {
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let set = attainment_set(t, cfg);
    let orbits = set.orbits();
    let (witness, point) = if orbits == 1 {
        let x = set.representatives[0].clone();
        let y = t.stacked().matrix.mul_vec(x.entries());
        let smooth = t.codomain().is_smooth_point(&y, cfg.tau_cluster)?;
        (Some(x), Some(smooth))
    } else {
        (None, None)
    };
    Ok(SmoothnessReport {
        smooth: orbits == 1 && point == Some(true),
        attainment_orbits: orbits,
        witness,
        codomain_point_smooth: point,
        search_complete: set.complete_flag,
        caveat: CAVEAT.into(),
    })
}

/// Smooth components with a common maximizer force a smooth tuple.
#[derive(Clone, Debug)]
pub struct SufficiencyReport {
    pub joint: JointAttainment,
    pub components: Vec<SmoothnessReport>,
    pub tuple: SmoothnessReport,
    pub all_components_smooth: bool,
    /// `all components smooth ⇒ tuple smooth` held on this instance.
    pub implication_holds: bool,
    /// The tuple is smooth although some component is not.
    pub converse_fails: bool,
}

pub fn check_smoothness_sufficiency(t: &OperatorTuple, cfg: &Config) -> Result<SufficiencyReport> {
    let joint = joint_attainment_check(t, cfg);
    if !joint.nonempty {
        return Err(Error::HypothesisNotSatisfied { name: "joint_attainment".into(), margin: joint.margin });
    }
    let components = t
        .components()
        .iter()
        .map(|c| smoothness_of_operator(&OperatorTuple::single(c.clone()), cfg))
        .collect::<Result<Vec<_>>>()?;
    let tuple = smoothness_of_operator(t, cfg)?;
    let all = components.iter().all(|r| r.smooth);
    Ok(SufficiencyReport {
        joint,
        implication_holds: !all || tuple.smooth,
        converse_fails: tuple.smooth && !all,
        all_components_smooth: all,
        components,
        tuple,
    })
}
