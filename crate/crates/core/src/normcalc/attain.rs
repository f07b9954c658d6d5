//! Phase-orbit clustering of maximizers, attainment sets and joint
//! attainment.

use super::power::SearchOptions;
use super::{stacked_norm, tuple_norm, NormResult};
use crate::config::Config;
use crate::linops::{Operator, OperatorTuple, StackedOperator};
use crate::spaces::{lp_norm_slice, max_modulus, sgn, Exponent, Field, LpSpace, Vector, C64};

#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub value: f64,
    pub x: Vec<C64>,
    pub hits: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Orbit {
    pub value: f64,
    pub x: Vec<C64>,
    pub hits: usize,
}

/// Rotate `x` so that its first maximal-modulus entry is real and positive.
pub(crate) fn normalize_phase(x: &[C64]) -> Vec<C64> {
    let m = max_modulus(x);
    let Some(k) = x.iter().position(|z| z.norm() >= m * (1.0 - 1e-9)) else {
        return x.to_vec();
    };
    let s = sgn(x[k]).conj();
    x.iter()
        .enumerate()
        .map(|(i, z)| if i == k { C64::new(z.norm(), 0.0) } else { z * s })
        .collect()
}

/// `min_{|α|=1} ‖x − αy‖`, with `α` chosen by the Euclidean alignment of the
/// two vectors (exact over ℝ, where both signs are tried).
pub(crate) fn orbit_distance(space: LpSpace, x: &[C64], y: &[C64]) -> f64 {
    let diff = |a: C64| -> f64 {
        let d: Vec<C64> = x.iter().zip(y).map(|(u, v)| u - a * v).collect();
        lp_norm_slice(space.p, &d)
    };
    match space.field {
        Field::Real => diff(C64::new(1.0, 0.0)).min(diff(C64::new(-1.0, 0.0))),
        Field::Complex => {
            let inner: C64 = x.iter().zip(y).map(|(u, v)| u * v.conj()).sum();
            let a = if inner.norm() == 0.0 { C64::new(1.0, 0.0) } else { sgn(inner) };
            diff(a)
        }
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (u, v) in a.iter().zip(b) {
        let o = u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Group candidates with value at least `floor` into phase orbits, best
/// value first, ties broken lexicographically.
pub(crate) fn cluster_orbits(
    space: LpSpace,
    cands: Vec<Candidate>,
    floor: f64,
    delta: f64,
    cap: usize,
) -> Vec<Orbit> {
    let mut cands: Vec<Candidate> = cands
        .into_iter()
        .filter(|c| c.value >= floor)
        .map(|c| Candidate { x: normalize_phase(&c.x), ..c })
        .collect();
    cands.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| lex_cmp(&a.x, &b.x)));
    let mut orbits: Vec<Orbit> = Vec::new();
    for c in cands {
        if let Some(o) = orbits.iter_mut().find(|o| orbit_distance(space, &o.x, &c.x) <= delta) {
            o.hits += c.hits;
        } else if orbits.len() < cap {
            orbits.push(Orbit { value: c.value, x: c.x, hits: c.hits });
        }
    }
    orbits
}

/// Sup-norm outer exponent: `‖𝒯‖ = max ‖T_i‖`, maximizers taken from the
/// components attaining it.
pub(crate) fn infty_tuple_norm(t: &OperatorTuple, cfg: &Config, opts: &SearchOptions) -> NormResult {
    let results: Vec<NormResult> = t
        .components()
        .iter()
        .map(|c| stacked_norm(&StackedOperator::from_operator(c), cfg, opts))
        .collect();
    let best = results.iter().map(|r| r.value).fold(0.0, f64::max);
    let stacked = t.stacked();
    let mut cands = Vec::new();
    let mut complete = true;
    let mut method = results[0].method;
    let mut starts = 0;
    for r in &results {
        starts += r.starts_used;
        if r.value >= best - cfg.tau_tie {
            complete &= r.complete;
            method = if cands.is_empty() { r.method } else { method };
            for w in &r.witnesses {
                let value = stacked.image_norm(w.entries());
                cands.push(Candidate { value, x: w.entries().to_vec(), hits: 1 });
            }
        }
    }
    let orbits = cluster_orbits(t.domain(), cands, best - cfg.tau_attain, cfg.delta_sep, 64);
    let residual = orbits.iter().map(|o| best - o.value).fold(0.0, f64::max);
    NormResult {
        value: best,
        witnesses: orbits.into_iter().map(|o| Vector::from_parts(t.domain(), o.x)).collect(),
        method,
        residual,
        starts_used: starts,
        complete,
    }
}

/// Representatives of the phase orbits of `M_𝒯`.
#[derive(Clone, Debug)]
pub struct AttainmentSet {
    pub norm: f64,
    pub representatives: Vec<Vector>,
    /// Heuristic only; never used as a hypothesis.
    pub complete_flag: bool,
}

impl AttainmentSet {
    pub fn orbits(&self) -> usize {
        self.representatives.len()
    }

    pub fn from_result(r: &NormResult) -> Self {
        Self { norm: r.value, representatives: r.witnesses.clone(), complete_flag: r.complete }
    }
}

/// Attainment set of a tuple (use [`OperatorTuple::single`] for one operator).
pub fn attainment_set(t: &OperatorTuple, cfg: &Config) -> AttainmentSet {
    AttainmentSet::from_result(&tuple_norm(t, cfg))
}

/// Outcome of the search for a common maximizer of all components.
#[derive(Clone, Debug)]
pub struct JointAttainment {
    pub nonempty: bool,
    pub witness: Option<Vector>,
    /// `max_x min_i (‖T_i x‖ − ‖T_i‖) / max(1, ‖T_i‖)` over the candidates tried.
    pub margin: f64,
    /// Tolerance applied to `margin`.
    pub epsilon: f64,
    pub component_norms: Vec<f64>,
}

/// Search for `x ∈ ∩ M_{T_i}` up to `cfg.tau_attain`.
pub fn joint_attainment_check(t: &OperatorTuple, cfg: &Config) -> JointAttainment {
    let comp: Vec<NormResult> =
        t.components().iter().map(|c| tuple_norm(&OperatorTuple::single(c.clone()), cfg)).collect();
    let norms: Vec<f64> = comp.iter().map(|r| r.value).collect();
    let mut candidates: Vec<Vec<C64>> = comp.iter().flat_map(|r| r.witness_entries()).collect();

    // maximize Σ ‖T_i x‖² / ‖T_i‖², which reaches d exactly on the intersection
    let scaled: Vec<Operator> = t
        .components()
        .iter()
        .zip(&norms)
        .filter(|(_, &n)| n > 0.0)
        .map(|(c, &n)| c.scaled(C64::new(1.0 / n, 0.0)))
        .collect();
    if !scaled.is_empty() {
        let normalized = OperatorTuple::new(scaled, Exponent::TWO).expect("shared domain");
        let opts = SearchOptions { hints: candidates.clone(), ..Default::default() };
        let joint = stacked_norm(&normalized.stacked(), cfg, &opts);
        let mut all = joint.witness_entries();
        all.extend(candidates);
        candidates = all;
    }
    let mut best: Option<(f64, Vec<C64>)> = None;
    for x in candidates {
        let m = t
            .components()
            .iter()
            .zip(&norms)
            .map(|(c, &n)| (c.image_norm(&x) - n) / n.max(1.0))
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
            best = Some((m, x));
        }
    }
    let (margin, x) = best.expect("at least one candidate");
    let nonempty = margin >= -cfg.tau_attain;
    JointAttainment {
        nonempty,
        witness: nonempty.then(|| Vector::from_parts(t.domain(), x)),
        margin,
        epsilon: cfg.tau_attain,
        component_norms: norms,
    }
}
