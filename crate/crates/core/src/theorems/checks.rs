//! One checker per result. Hypotheses are evaluated with signed margins and
//! conclusions are always computed, even when a hypothesis fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generators::functional_maximizer;
use super::{CheckReport, CheckSettings, Conclusion, Hypothesis, Instance, TheoremId};
use crate::approx::search::golden_section;
use crate::approx::{bj_orthogonal, distance_to_diagonal_subspace, distance_to_line, kernel_distance_functional_tuple};
use crate::config::Config;
use crate::derivatives::{rho_operator, rho_tuple_infty_formula, smoothness_of_operator, GateauxPair};
use crate::error::{Error, Result};
use crate::linops::OperatorTuple;
use crate::normcalc::{joint_attainment_check, operator_norm, tuple_norm, JointAttainment};
use crate::spaces::{lp_norm_slice, pair, Field, LpSpace, Vector, C64};

const DIST_TOL: f64 = 1e-5;
const RHO_TOL: f64 = 1e-4;
const LOWER_BOUND_SAMPLES: usize = 20;
const LOWER_BOUND_SLACK: f64 = 1e-6;

const JOINT: &str = "joint_attainment";
const RESIDUAL_JOINT: &str = "residual_joint_attainment";
const NOT_IN_SUBSPACE: &str = "not_in_subspace";

fn require_sup(inst: &Instance, sup: bool) -> Result<()> {
    let is_sup = inst.t.outer().is_infinite() && inst.t.d() > 1;
    if sup && !is_sup && inst.t.d() > 1 {
        return Err(Error::ShapeMismatch("this check needs the sup-norm outer exponent".into()));
    }
    if !sup && is_sup {
        return Err(Error::ShapeMismatch("this check needs a finite outer exponent".into()));
    }
    Ok(())
}

/// Outer exponent used in sums; any value works for one component.
fn outer_p(t: &OperatorTuple) -> f64 {
    if t.d() == 1 {
        1.0
    } else {
        t.outer().value()
    }
}

fn joint_hypothesis(name: &str, j: &JointAttainment) -> Hypothesis {
    Hypothesis { name: name.into(), satisfied: j.nonempty, margin: j.margin + j.epsilon }
}

fn flag(name: &str, value: bool) -> Hypothesis {
    Hypothesis { name: name.into(), satisfied: value, margin: if value { 0.0 } else { -1.0 } }
}

fn single(t: &OperatorTuple, i: usize) -> OperatorTuple {
    OperatorTuple::single(t.component(i).clone())
}

fn invariant(name: &str, holds: bool) -> Conclusion {
    Conclusion::new(name, holds, f64::from(u8::from(holds)), 1.0, 0.0, 0.0, &[])
}

/// `min_z ‖y − z w‖` in `space`, by golden section (nested for complex
/// scalars). Returns the distance and the minimizer.
pub fn vector_line_distance(y: &[C64], w: &[C64], space: LpSpace) -> (f64, C64) {
    let ny = lp_norm_slice(space.p, y);
    let nw = lp_norm_slice(space.p, w);
    if nw == 0.0 {
        return (ny, C64::new(0.0, 0.0));
    }
    let r = 2.0 * ny / nw + 1.0;
    let at = |z: C64| {
        let v: Vec<C64> = y.iter().zip(w).map(|(a, b)| a - z * b).collect();
        lp_norm_slice(space.p, &v)
    };
    let (z, v) = match space.field {
        Field::Real => {
            let (a, v) = golden_section(&mut |a| at(C64::new(a, 0.0)), -r, r, 1e-12);
            (C64::new(a, 0.0), v)
        }
        Field::Complex => {
            let inner = |a: f64| golden_section(&mut |b| at(C64::new(a, b)), -r, r, 1e-12);
            let (a, v) = golden_section(&mut |a| inner(a).1, -r, r, 1e-12);
            (C64::new(a, inner(a).0), v)
        }
    };
    if ny <= v {
        (ny, C64::new(0.0, 0.0))
    } else {
        (v, z)
    }
}

/// Sup-norm tuples: the generic distance search against `max_i dist(T_i, 𝔽S_i)`,
/// and the norm against `max_i ‖T_i‖`.
pub fn check_max_distance_infty(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, true)?;
    let (t, s) = (&inst.t, &inst.s);
    let generic = cfg.generic();
    let dist = distance_to_diagonal_subspace(t, s, &generic)?;
    let formula = t
        .components()
        .iter()
        .zip(s.components())
        .map(|(a, b)| distance_to_line(a, b, cfg).value)
        .fold(0.0, f64::max);
    let norm = tuple_norm(t, &generic).value;
    let norm_formula = t.components().iter().map(|c| operator_norm(c, cfg).value).fold(0.0, f64::max);
    let tol = settings.tol(DIST_TOL);
    let conclusions = vec![
        Conclusion::equality("distance", dist.value, formula, tol, &[]),
        Conclusion::equality("norm", norm, norm_formula, tol, &[]),
    ];
    let notes = vec![format!("generic search used {} norm evaluations", dist.evaluations)];
    Ok(CheckReport::build(TheoremId::MaxDistanceInfty, inst, Vec::new(), conclusions, Vec::new(), notes))
}

/// `dist(𝒯, 𝔽^d𝒮)^p = Σ dist(T_j, 𝔽S_j)^p` and `dist(T_j, 𝔽S_j) = ‖T_j⁰‖`
/// when the residual components share a maximizer.
pub fn check_sum_distance_theorem(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, false)?;
    let (t, s) = (&inst.t, &inst.s);
    let p = outer_p(t);
    let dist = distance_to_diagonal_subspace(t, s, cfg)?;
    let residual = t.affine(s, &dist.minimizer_z)?;
    let joint = joint_attainment_check(&residual, cfg);
    let hypotheses = vec![
        joint_hypothesis(RESIDUAL_JOINT, &joint),
        Hypothesis { name: NOT_IN_SUBSPACE.into(), satisfied: dist.value > cfg.tau_norm, margin: dist.value - cfg.tau_norm },
    ];
    let req = [RESIDUAL_JOINT, NOT_IN_SUBSPACE];
    let comps: Vec<f64> =
        t.components().iter().zip(s.components()).map(|(a, b)| distance_to_line(a, b, cfg).value).collect();
    let tol = settings.tol(DIST_TOL);
    let mut conclusions = vec![Conclusion::equality(
        "sum_identity",
        dist.value.powf(p),
        comps.iter().map(|v| v.powf(p)).sum(),
        tol * t.d() as f64,
        &req,
    )];
    for (j, &dj) in comps.iter().enumerate() {
        let rj = operator_norm(residual.component(j), cfg).value;
        conclusions.push(Conclusion::equality(&format!("component_distance_{j}"), dj, rj, tol, &req));
    }
    let notes = vec![format!("minimizer z = {:?}", dist.minimizer_z.z)];
    Ok(CheckReport::build(
        TheoremId::SumDistance,
        inst,
        hypotheses,
        conclusions,
        joint.witness.into_iter().collect(),
        notes,
    ))
}

/// `dist(𝒯, 𝔽^d𝒮)^p = Σ dist(T_jx, 𝔽S_jx)^p` at the maximizer of a smooth
/// residual, the upper bound by component distances, and the pointwise lower
/// bound at random unit vectors.
pub fn check_pointwise_distance(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, false)?;
    let (t, s) = (&inst.t, &inst.s);
    let p = outer_p(t);
    let dist = distance_to_diagonal_subspace(t, s, cfg)?;
    let residual = t.affine(s, &dist.minimizer_z)?;
    let smooth = smoothness_of_operator(&residual, cfg).ok();
    let is_smooth = smooth.as_ref().is_some_and(|r| r.smooth);
    let hypotheses = vec![
        flag("residual_smooth", is_smooth),
        Hypothesis { name: NOT_IN_SUBSPACE.into(), satisfied: dist.value > cfg.tau_norm, margin: dist.value - cfg.tau_norm },
    ];
    let req = ["residual_smooth", NOT_IN_SUBSPACE];
    let x = match smooth.as_ref().and_then(|r| r.witness.clone()) {
        Some(x) => x,
        None => dist.inner_norm.best_witness().clone(),
    };
    // `dist(y, 𝔽w)` only sees the direction of `w`, so an `S_jx` that is zero
    // up to the accuracy of `x` is snapped to zero instead of spanning a
    // random line.
    let snap: Vec<f64> = s.components().iter().map(|b| cfg.tau_attain.sqrt() * operator_norm(b, cfg).value).collect();
    let pointwise = |x: &[C64]| -> Vec<(f64, f64)> {
        t.components()
            .iter()
            .zip(s.components())
            .zip(residual.components())
            .zip(&snap)
            .map(|(((a, b), r), &eps)| {
                let mut w = b.matrix().mul_vec(x);
                if lp_norm_slice(b.codomain().p, &w) <= eps {
                    w.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
                }
                let (v, _) = vector_line_distance(&a.matrix().mul_vec(x), &w, a.codomain());
                (v, r.image_norm(x))
            })
            .collect()
    };
    let at_x = pointwise(x.entries());
    let tol = settings.tol(DIST_TOL);
    let dp = dist.value.powf(p);
    let mut conclusions = vec![Conclusion::equality(
        "pointwise_identity",
        dp,
        at_x.iter().map(|(v, _)| v.powf(p)).sum(),
        tol * t.d() as f64,
        &req,
    )];
    for (j, (v, r)) in at_x.iter().enumerate() {
        conclusions.push(Conclusion::equality(&format!("pointwise_component_{j}"), *v, *r, tol, &req));
    }
    let comps: f64 =
        t.components().iter().zip(s.components()).map(|(a, b)| distance_to_line(a, b, cfg).value.powf(p)).sum();
    conclusions.push(Conclusion::at_most("upper_bound", dp, comps, tol * t.d() as f64, &req));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let domain = t.domain();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..LOWER_BOUND_SAMPLES {
        let mut v: Vec<C64> = (0..domain.dim)
            .map(|_| match domain.field {
                Field::Real => C64::new(rng.gen_range(-1.0..1.0), 0.0),
                Field::Complex => C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            })
            .collect();
        let n = lp_norm_slice(domain.p, &v);
        if n == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= n);
        worst = worst.max(pointwise(&v).iter().map(|(d, _)| d.powf(p)).sum());
    }
    conclusions.push(Conclusion::at_most("lower_bound", worst, dp, settings.tol(LOWER_BOUND_SLACK), &[]));
    let notes = vec![format!(
        "residual attainment orbits: {}",
        smooth.as_ref().map_or("n/a".to_string(), |r| r.attainment_orbits.to_string())
    )];
    Ok(CheckReport::build(TheoremId::PointwiseDistance, inst, hypotheses, conclusions, vec![x], notes))
}

fn component_margins(inst: &Instance, cfg: &Config) -> Vec<(f64, f64)> {
    inst.t
        .components()
        .iter()
        .zip(inst.s.components())
        .map(|(a, b)| {
            let n = operator_norm(a, cfg).value;
            (distance_to_line(a, b, cfg).value - n, n)
        })
        .collect()
}

fn certificate_note(d: &crate::approx::BJDecision) -> String {
    match (&d.certificate, &d.certificate_error) {
        (Some(c), _) => format!("certificate with h = {}", c.h),
        (None, Some(e)) => format!("no certificate: {e}"),
        (None, None) => "not orthogonal".into(),
    }
}

/// Finite outer exponent: `𝒯 ⊥_B 𝔽^d𝒮 ⇒ T_j ⊥_B S_j` for all `j`, and the
/// converse when every `T_j` is smooth.
pub fn check_bj_equivalence_finite_p(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, false)?;
    let (t, s) = (&inst.t, &inst.s);
    let joint = joint_attainment_check(t, cfg);
    let smooth = (0..t.d())
        .all(|i| smoothness_of_operator(&single(t, i), cfg).map(|r| r.smooth).unwrap_or(false));
    let hypotheses = vec![joint_hypothesis(JOINT, &joint), flag("components_smooth", smooth)];
    let tuple = bj_orthogonal(t, s, cfg)?;
    let margins = component_margins(inst, cfg);
    let min_comp = margins.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
    let tau = settings.tol(cfg.tau_bj);
    let a = tuple.margin >= -tau;
    let b = min_comp >= -tau;
    let conclusions = vec![
        Conclusion::new("forward", !a || b, tuple.margin, min_comp, min_comp, tau, &[JOINT]),
        Conclusion::new("reverse", !b || a, min_comp, tuple.margin, tuple.margin, tau, &[JOINT, "components_smooth"]),
    ];
    let witnesses = tuple.certificate.iter().flat_map(|c| c.entries.iter().map(|e| e.x.clone())).collect();
    let notes = vec![certificate_note(&tuple)];
    Ok(CheckReport::build(TheoremId::BjFinite, inst, hypotheses, conclusions, witnesses, notes))
}

/// Sup-norm tuples: `𝒯 ⊥_B 𝔽^d𝒮 ⇔ T_i ⊥_B S_i and ‖T_i‖ = ‖𝒯‖ for some i`.
pub fn check_bj_equivalence_infty(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, true)?;
    let (t, s) = (&inst.t, &inst.s);
    let tuple = bj_orthogonal(t, s, &cfg.generic())?;
    let margins = component_margins(inst, cfg);
    let top = margins.iter().map(|m| m.1).fold(0.0, f64::max);
    let rhs = margins.iter().map(|&(m, n)| m.min(n - top)).fold(f64::NEG_INFINITY, f64::max);
    let tau = settings.tol(cfg.tau_bj);
    let a = tuple.margin >= -tau;
    let equal = margins.iter().all(|m| (m.1 - top).abs() <= cfg.tau_tie * top.max(1.0));
    let hypotheses = vec![flag("equal_norms", equal)];
    let some_orth = margins.iter().map(|m| m.0).fold(f64::NEG_INFINITY, f64::max);
    let conclusions = vec![
        Conclusion::new("equivalence", a == (rhs >= -tau), tuple.margin, rhs, (tuple.margin - rhs).abs(), tau, &[]),
        Conclusion::new(
            "equal_norm_form",
            a == (some_orth >= -tau),
            tuple.margin,
            some_orth,
            (tuple.margin - some_orth).abs(),
            tau,
            &["equal_norms"],
        ),
    ];
    let witnesses = tuple.certificate.iter().flat_map(|c| c.entries.iter().map(|e| e.x.clone())).collect();
    let notes = vec![certificate_note(&tuple)];
    Ok(CheckReport::build(TheoremId::BjInfty, inst, hypotheses, conclusions, witnesses, notes))
}

/// Functional tuples into ℓ_∞^d: the kernel formula against the generic
/// distance, and orthogonality through vanishing of `g_i` at the maximizer
/// of `f_i`.
///
/// "Vanishes" means `|g_i(x_i)| ≤ √τ_bj ‖g_i‖`: the distance deficit is
/// quadratic in `g_i(x_i)`, so this matches the `τ_bj` decision threshold.
pub fn check_kernel_distance_corollary(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, true)?;
    let (t, s) = (&inst.t, &inst.s);
    let domain = t.domain();
    if domain.p.is_one() || domain.p.is_infinite() {
        return Err(Error::ShapeMismatch("the kernel formula needs a strictly convex domain".into()));
    }
    let kernel = kernel_distance_functional_tuple(t, s, cfg)?;
    let generic = cfg.generic();
    let bj = bj_orthogonal(t, s, &generic)?;
    let q = domain.p.dual();
    let zero_tol = cfg.tau_bj.sqrt();
    let mut rows = Vec::with_capacity(t.d());
    for (a, b) in t.components().iter().zip(s.components()) {
        let f = a.matrix().row(0);
        let g = b.matrix().row(0);
        let nf = lp_norm_slice(q, f);
        let ng = lp_norm_slice(q, g);
        let vanish = if nf == 0.0 {
            0.0
        } else {
            let x = functional_maximizer(f, domain)?;
            if ng == 0.0 {
                0.0
            } else {
                pair(g, &x).norm() / ng
            }
        };
        rows.push((nf, vanish));
    }
    let top = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let equal = rows.iter().all(|r| (r.0 - top).abs() <= cfg.tau_tie * top.max(1.0));
    let orth = bj.margin >= -cfg.tau_bj;
    let hypotheses = vec![
        Hypothesis { name: "nonzero".into(), satisfied: top > 0.0, margin: top },
        flag("equal_norms", equal),
    ];
    let top_vanish = rows
        .iter()
        .filter(|r| r.0 >= top - cfg.tau_tie * top.max(1.0))
        .map(|r| r.1)
        .fold(f64::INFINITY, f64::min);
    let any_vanish = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let conclusions = vec![
        Conclusion::equality("kernel_formula", kernel, bj.distance.value, settings.tol(DIST_TOL), &[]),
        Conclusion::new("orthogonal_implies_vanishing", !orth || top_vanish <= zero_tol, bj.margin, top_vanish, top_vanish, zero_tol, &["nonzero"]),
        Conclusion::new("equal_norm_biconditional", orth == (any_vanish <= zero_tol), bj.margin, any_vanish, any_vanish, zero_tol, &["equal_norms"]),
    ];
    let witnesses = bj.certificate.iter().flat_map(|c| c.entries.iter().map(|e| e.x.clone())).collect();
    let notes = vec![certificate_note(&bj)];
    Ok(CheckReport::build(TheoremId::KernelDistance, inst, hypotheses, conclusions, witnesses, notes))
}

fn gateaux_invariants(name: &str, g: &GateauxPair, out: &mut Vec<Conclusion>) {
    out.push(invariant(&format!("{name}_ordered"), g.ordered()));
    out.push(invariant(&format!("{name}_quotient_monotone"), g.monotone));
}

/// Finite outer exponent with a common maximizer:
/// `Σ ρ−(T_i,S_i) ≤ ρ−(𝒯,𝒮) ≤ ρ+(𝒯,𝒮) ≤ Σ ρ+(T_i,S_i)`.
///
/// The bracket with Hölder weights `(‖T_i‖/‖𝒯‖)^{p−1}` on the component terms
/// is reported alongside as informational.
pub fn check_rho_sandwich(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, false)?;
    let (t, s) = (&inst.t, &inst.s);
    let p = outer_p(t);
    let joint = joint_attainment_check(t, cfg);
    let hypotheses = vec![joint_hypothesis(JOINT, &joint)];
    let tuple = rho_operator(t, s, cfg)?;
    let norm = tuple_norm(t, cfg).value;
    let (mut lo, mut hi, mut wlo, mut whi) = (0.0, 0.0, 0.0, 0.0);
    let mut conclusions = Vec::new();
    for i in 0..t.d() {
        let (ti, si) = (single(t, i), single(s, i));
        let n = operator_norm(t.component(i), cfg).value;
        let (rm, rp) = if ti.is_zero() {
            let ns = operator_norm(s.component(i), cfg).value;
            (-ns, ns)
        } else {
            let r = rho_operator(&ti, &si, cfg)?;
            gateaux_invariants(&format!("component_{i}"), &r, &mut conclusions);
            (r.rho_minus, r.rho_plus)
        };
        let w = if p == 1.0 { 1.0 } else { (n / norm).powf(p - 1.0) };
        lo += rm;
        hi += rp;
        wlo += w * rm;
        whi += w * rp;
    }
    let tol = settings.tol(RHO_TOL);
    gateaux_invariants("tuple", &tuple, &mut conclusions);
    conclusions.push(Conclusion::at_most("lower_bound", lo, tuple.rho_minus, tol, &[JOINT]));
    conclusions.push(Conclusion::at_most("upper_bound", tuple.rho_plus, hi, tol, &[JOINT]));
    conclusions.push(Conclusion::at_most("weighted_lower_bound", wlo, tuple.rho_minus, tol, &[JOINT]).informational());
    conclusions.push(Conclusion::at_most("weighted_upper_bound", tuple.rho_plus, whi, tol, &[JOINT]).informational());
    let notes = vec![format!("rho = ({:.9}, {:.9}), sums = ({lo:.9}, {hi:.9})", tuple.rho_minus, tuple.rho_plus)];
    Ok(CheckReport::build(TheoremId::RhoSandwich, inst, hypotheses, conclusions, joint.witness.into_iter().collect(), notes))
}

/// Sup-norm tuples: the component formula for `ρ±` against difference
/// quotients of the generic norm.
pub fn check_rho_infty(inst: &Instance, cfg: &Config, settings: &CheckSettings) -> Result<CheckReport> {
    require_sup(inst, true)?;
    let (t, s) = (&inst.t, &inst.s);
    let formula = rho_tuple_infty_formula(t, s, cfg)?;
    let quotient = rho_operator(t, s, &cfg.generic())?;
    let tol = settings.tol(RHO_TOL);
    let mut conclusions = vec![
        Conclusion::equality("rho_plus", quotient.rho_plus, formula.rho_plus, tol, &[]),
        Conclusion::equality("rho_minus", quotient.rho_minus, formula.rho_minus, tol, &[]),
    ];
    gateaux_invariants("tuple", &quotient, &mut conclusions);
    gateaux_invariants("formula", &formula, &mut conclusions);
    let notes = vec![format!("components at the top norm: {:?}", formula.components)];
    Ok(CheckReport::build(TheoremId::RhoInfty, inst, Vec::new(), conclusions, Vec::new(), notes))
}

/// Finite outer exponent with a common maximizer: smooth components make a
/// smooth tuple. The converse is reported informationally.
pub fn check_smoothness_sufficiency_report(
    inst: &Instance,
    cfg: &Config,
    _settings: &CheckSettings,
) -> Result<CheckReport> {
    require_sup(inst, false)?;
    let t = &inst.t;
    let joint = joint_attainment_check(t, cfg);
    let comps = (0..t.d()).map(|i| smoothness_of_operator(&single(t, i), cfg)).collect::<Result<Vec<_>>>()?;
    let all = comps.iter().all(|r| r.smooth);
    let tuple = smoothness_of_operator(t, cfg)?;
    let hypotheses = vec![joint_hypothesis(JOINT, &joint), flag("components_smooth", all)];
    let conclusions = vec![
        invariant("tuple_smooth", tuple.smooth).with_requires(&[JOINT, "components_smooth"]),
        invariant("converse", !tuple.smooth || all).informational(),
    ];
    let orbits: Vec<usize> = comps.iter().map(|r| r.attainment_orbits).collect();
    let notes = vec![format!("component orbits {orbits:?}, tuple orbits {}", tuple.attainment_orbits)];
    let witnesses: Vec<Vector> = tuple.witness.into_iter().collect();
    Ok(CheckReport::build(TheoremId::SmoothSufficiency, inst, hypotheses, conclusions, witnesses, notes))
}

impl Conclusion {
    fn with_requires(mut self, requires: &[&str]) -> Self {
        self.requires = requires.iter().map(|s| s.to_string()).collect();
        self
    }
}
