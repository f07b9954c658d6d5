//! Best approximation from `𝔽S` and from diagonal subspaces `𝔽^d𝒮`,
//! Birkhoff-James orthogonality and Singer certificates.

mod kernel;
pub(crate) mod search;
mod singer;

pub use kernel::{kernel_distance_functional_tuple, restricted_functional_norm};
pub use singer::{build_singer_certificate, CertificateCheck, CertificateEntry, SingerCertificate};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linops::{DiagonalAction, Operator, OperatorTuple};
use crate::normcalc::{operator_norm, orbit_distance, tuple_norm, tuple_norm_with, NormResult, SearchOptions};
use crate::spaces::{pair, Field, C64, ONE, ZERO};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use search::{golden_section, pattern_search, PatternOptions};

/// A computed distance and where it is attained.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub value: f64,
    pub minimizer_z: DiagonalAction,
    /// Norm computation of the residual `𝒯 − z𝒮` at the minimizer.
    pub inner_norm: NormResult,
    /// Largest midpoint-convexity violation seen along the search path.
    pub convexity_gap: f64,
    /// Certified lower bound from the supporting minorants collected on the way.
    pub lower_bound: f64,
    pub evaluations: usize,
}

/// Outcome of a Birkhoff-James orthogonality test.
#[derive(Clone, Debug)]
pub struct BJDecision {
    pub orthogonal: bool,
    /// `dist − ‖𝒯‖`; never positive beyond search error.
    pub margin: f64,
    pub distance: DistanceResult,
    pub norm: f64,
    pub certificate: Option<SingerCertificate>,
    /// Why no certificate is attached to an orthogonal decision.
    pub certificate_error: Option<String>,
}

const POOL_CAP: usize = 14;
const WARM_RANDOM_STARTS: usize = 4;

/// `z ↦ ‖𝒯 − z𝒮‖` over the real coordinates of the active components,
/// with warm-started norm evaluations.
struct Objective<'a> {
    t: &'a OperatorTuple,
    s: &'a OperatorTuple,
    cfg: &'a Config,
    active: Vec<usize>,
    field: Field,
    pool: Vec<Vec<C64>>,
    base: Vec<Vec<C64>>,
    evals: usize,
    path: Vec<(Vec<f64>, f64)>,
    best: Option<(f64, Vec<f64>, Vec<C64>)>,
    /// Affine minorants `a + g·v` of the objective.
    cuts: Vec<(f64, Vec<f64>)>,
}

impl<'a> Objective<'a> {
    fn new(t: &'a OperatorTuple, s: &'a OperatorTuple, cfg: &'a Config, active: Vec<usize>, seed: &NormResult) -> Self {
        let n = t.domain().dim;
        let mut base = seed.witness_entries();
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            base.push(e);
        }
        Self { t, s, cfg, active, field: t.field(), pool: Vec::new(), base, evals: 0, path: Vec::new(), best: None, cuts: Vec::new() }
    }

    fn vars(&self) -> usize {
        self.active.len() * self.field.real_dim()
    }

    fn z(&self, v: &[f64]) -> DiagonalAction {
        let mut z = DiagonalAction::zeros(self.t.d());
        for (k, &j) in self.active.iter().enumerate() {
            z.z[j] = match self.field {
                Field::Real => C64::new(v[k], 0.0),
                Field::Complex => C64::new(v[2 * k], v[2 * k + 1]),
            };
        }
        z
    }

    fn residual(&self, v: &[f64]) -> OperatorTuple {
        self.t.affine(self.s, &self.z(v)).expect("shapes checked")
    }

    fn remember(&mut self, x: &[C64]) {
        let space = self.t.domain();
        if self.pool.iter().any(|p| orbit_distance(space, p, x) <= self.cfg.delta_sep) {
            return;
        }
        self.pool.insert(0, x.to_vec());
        self.pool.truncate(POOL_CAP);
    }

    fn warm(&mut self, v: &[f64]) -> NormResult {
        let mut hints = self.pool.clone();
        hints.extend(self.base.iter().cloned());
        let opts = SearchOptions { hints, random_starts: Some(WARM_RANDOM_STARTS), hints_only: true };
        tuple_norm_with(&self.residual(v), self.cfg, &opts)
    }

    fn eval(&mut self, v: &[f64]) -> f64 {
        let r = self.warm(v);
        self.evals += 1;
        let x = r.best_witness().entries().to_vec();
        for w in &r.witnesses {
            if let Some(c) = self.minorant(v, w.entries()) {
                self.cuts.push(c);
            }
        }
        self.remember(&x);
        if self.path.len() < 4096 {
            self.path.push((v.to_vec(), r.value));
        }
        if self.best.as_ref().is_none_or(|(b, _, _)| r.value < *b) {
            self.best = Some((r.value, v.to_vec(), x));
        }
        r.value
    }

    fn cold(&mut self, v: &[f64]) -> NormResult {
        self.evals += 1;
        tuple_norm(&self.residual(v), self.cfg)
    }

    /// The minorant `z ↦ Re f((𝒯 − z𝒮)x)` for a unit `x` and the norming
    /// functional `f` of `(𝒯 − z𝒮)x` at `v`. Valid for every `z`.
    fn minorant(&self, v: &[f64], x: &[C64]) -> Option<(f64, Vec<f64>)> {
        let r = self.residual(v).stacked();
        let y = r.matrix.mul_vec(x);
        let f = r.codomain.norming(&y, self.cfg.tau_cluster).ok()?.canonical();
        let mut a = 0.0;
        let mut g = Vec::with_capacity(self.vars());
        for j in 0..self.t.d() {
            let fj = r.codomain.block(&f, j);
            a += pair(fj, &self.t.component(j).matrix().mul_vec(x)).re;
            if !self.active.contains(&j) {
                continue;
            }
            let c = pair(fj, &self.s.component(j).matrix().mul_vec(x));
            match self.field {
                Field::Real => g.push(-c.re),
                Field::Complex => {
                    g.push(-c.re);
                    g.push(c.im);
                }
            }
        }
        Some((a, g))
    }

    /// Descent direction from the supporting functional at the best point.
    fn subgradient_direction(&self, v: &[f64], scale: &[f64]) -> Option<Vec<f64>> {
        let (_, bv, x) = self.best.as_ref()?;
        if bv.as_slice() != v {
            return None;
        }
        let (_, g) = self.minorant(v, x)?;
        let m = g.iter().zip(scale).map(|(a, s)| (a * s).abs()).fold(0.0, f64::max);
        (m > 0.0).then(|| g.iter().zip(scale).map(|(a, s)| -a * s / m).collect())
    }
}

/// Minimum of the cutting-plane model over the box, with its minimizer.
fn model_minimum(cuts: &[(f64, Vec<f64>)], bounds: &[f64]) -> Option<(f64, Vec<f64>)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let s = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let vs: Vec<_> = bounds.iter().map(|&r| lp.add_var(0.0, (-r, r))).collect();
    for (a, g) in cuts {
        let mut row: Vec<_> = vs.iter().zip(g).map(|(&v, &c)| (v, c)).collect();
        row.push((s, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, -a);
    }
    let sol = lp.solve().ok()?;
    Some((sol[s], vs.iter().map(|&v| sol[v]).collect()))
}

/// The point of `{model ≤ level}` nearest to `center` in the sup norm.
fn level_projection(cuts: &[(f64, Vec<f64>)], bounds: &[f64], center: &[f64], level: f64) -> Option<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let e = lp.add_var(1.0, (0.0, f64::INFINITY));
    let vs: Vec<_> = bounds.iter().map(|&r| lp.add_var(0.0, (-r, r))).collect();
    for (a, g) in cuts {
        let row: Vec<_> = vs.iter().zip(g).map(|(&v, &c)| (v, c)).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, level - a);
    }
    for (&v, &c) in vs.iter().zip(center) {
        lp.add_constraint([(v, 1.0), (e, -1.0)], ComparisonOp::Le, c);
        lp.add_constraint([(v, 1.0), (e, 1.0)], ComparisonOp::Ge, c);
    }
    let sol = lp.solve().ok()?;
    Some(vs.iter().map(|&v| sol[v]).collect())
}

/// Level-bundle method on the minorants: each step evaluates the point of the
/// level set `{model ≤ lower + λ(upper − lower)}` closest to the incumbent.
/// Returns the incumbent and the certified lower bound.
fn bundle(obj: &mut Objective, start: Vec<f64>, bounds: &[f64], max_steps: usize) -> (Vec<f64>, f64, f64) {
    const LAMBDA: f64 = 0.3;
    let mut best_v = start;
    let mut best = obj.eval(&best_v);
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..max_steps {
        let Some((m, argmin)) = model_minimum(&obj.cuts, bounds) else { break };
        lower = lower.max(m);
        let gap = best - lower;
        if gap <= 1e-11 * best.max(1.0) {
            break;
        }
        let level = lower + LAMBDA * gap;
        let next = level_projection(&obj.cuts, bounds, &best_v, level).unwrap_or(argmin);
        let before = obj.cuts.len();
        let f = obj.eval(&next);
        if f < best {
            best = f;
            best_v = next;
        } else if obj.cuts.len() == before {
            break;
        }
    }
    (best_v, best, lower)
}

/// `dist(T, 𝔽S) = min_z ‖T − zS‖`.
pub fn distance_to_line(t: &Operator, s: &Operator, cfg: &Config) -> DistanceResult {
    let t = OperatorTuple::single(t.clone());
    let s = OperatorTuple::single(s.clone());
    minimize(&t, &s, cfg)
}

/// `dist(𝒯, 𝔽^d𝒮) = min_z ‖𝒯 − z𝒮‖`.
pub fn distance_to_diagonal_subspace(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<DistanceResult> {
    if t.d() != s.d() {
        return Err(Error::DimensionMismatch { expected: t.d(), found: s.d() });
    }
    for (i, (a, b)) in t.components().iter().zip(s.components()).enumerate() {
        if a.domain() != b.domain() || a.codomain() != b.codomain() {
            return Err(Error::ShapeMismatch(format!("T[{i}] and S[{i}] act between different spaces")));
        }
    }
    if t.d() > 1 && t.outer().is_infinite() && cfg.infty_fast_path {
        let parts: Vec<DistanceResult> = t
            .components()
            .iter()
            .zip(s.components())
            .map(|(a, b)| distance_to_line(a, b, cfg))
            .collect();
        let z = DiagonalAction { z: parts.iter().map(|p| p.minimizer_z.z[0]).collect() };
        let inner = tuple_norm(&t.affine(s, &z)?, cfg);
        return Ok(DistanceResult {
            value: inner.value,
            minimizer_z: z,
            inner_norm: inner,
            convexity_gap: parts.iter().map(|p| p.convexity_gap).fold(f64::NEG_INFINITY, f64::max),
            lower_bound: parts.iter().map(|p| p.lower_bound).fold(0.0, f64::max),
            evaluations: parts.iter().map(|p| p.evaluations).sum(),
        });
    }
    Ok(minimize(t, s, cfg))
}

fn minimize(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> DistanceResult {
    let base = tuple_norm(t, cfg);
    let active: Vec<usize> = (0..s.d()).filter(|&j| !s.component(j).is_zero()).collect();
    if active.is_empty() || base.value == 0.0 {
        return DistanceResult {
            value: base.value,
            minimizer_z: DiagonalAction::zeros(t.d()),
            inner_norm: base,
            convexity_gap: 0.0,
            lower_bound: 0.0,
            evaluations: 1,
        };
    }
    let field = t.field();
    let per = field.real_dim();
    let mut bounds = Vec::new();
    for &j in &active {
        let r = 2.0 * base.value / operator_norm(s.component(j), cfg).value;
        bounds.extend(std::iter::repeat_n(r, per));
    }
    let mut obj = Objective::new(t, s, cfg, active, &base);
    let n = obj.vars();
    let mut v = vec![0.0; n];
    let mut cold = base.clone();
    let mut lower: f64 = 0.0;
    for _round in 0..4 {
        let (start, fs, lo) = bundle(&mut obj, v.clone(), &bounds, 40 + 30 * n);
        lower = lower.max(lo);
        // a closed gap already certifies the incumbent
        let (nv, warm) = if fs - lower <= 1e-10 * fs.max(1.0) { (start, fs) } else { search(&mut obj, start, &bounds) };
        v = nv;
        cold = obj.cold(&v);
        if cold.value <= warm + cfg.tau_norm {
            break;
        }
        // the warm pool missed a maximizer; teach it and search again
        for w in cold.witness_entries() {
            obj.remember(&w);
            obj.base.push(w);
        }
    }
    let (value, z, inner) = if cold.value > base.value {
        (base.value, DiagonalAction::zeros(t.d()), base)
    } else {
        (cold.value, obj.z(&v), cold)
    };
    let convexity_gap = convexity_audit(&mut obj);
    let lower_bound = lower.min(value);
    DistanceResult { value, minimizer_z: z, inner_norm: inner, convexity_gap, lower_bound, evaluations: obj.evals }
}

fn search(obj: &mut Objective, start: Vec<f64>, bounds: &[f64]) -> (Vec<f64>, f64) {
    let n = start.len();
    if n == 1 {
        let r = bounds[0];
        let (x, fx) = golden_section(&mut |z| obj.eval(&[z]), -r, r, 1e-10 * r);
        // golden section never samples the box center; keep it when it wins
        let f0 = obj.eval(&start);
        return if f0 <= fx { (start, f0) } else { (vec![x], fx) };
    }
    let mut v = start;
    if n == 2 && obj.active.len() == 1 {
        // complex line: cyclic golden sections, then a compass polish
        let mut fv = obj.eval(&v);
        for _ in 0..30 {
            let before = fv;
            for k in 0..2 {
                let r = bounds[k];
                let mut w = v.clone();
                let (x, fx) = golden_section(
                    &mut |c| {
                        w[k] = c;
                        obj.eval(&w)
                    },
                    -r,
                    r,
                    1e-10 * r,
                );
                if fx < fv {
                    v[k] = x;
                    fv = fx;
                }
            }
            if before - fv <= 1e-14 * fv.max(1.0) {
                break;
            }
        }
        let opts = PatternOptions {
            scale: bounds.iter().map(|r| r * 1e-3).collect(),
            bounds: Some(bounds.to_vec()),
            min_step: 1e-7,
            max_evals: 4000,
        };
        return polish(obj, v, &opts);
    }
    let opts = PatternOptions {
        scale: bounds.iter().map(|r| r / 4.0).collect(),
        bounds: Some(bounds.to_vec()),
        min_step: 1e-9,
        max_evals: 20_000,
    };
    polish(obj, v, &opts)
}

fn polish(obj: &mut Objective, start: Vec<f64>, opts: &PatternOptions) -> (Vec<f64>, f64) {
    let scale = opts.scale.clone();
    let cell = std::cell::RefCell::new(obj);
    let mut f = |v: &[f64]| cell.borrow_mut().eval(v);
    let mut hint = |v: &[f64]| cell.borrow().subgradient_direction(v, &scale);
    pattern_search(&mut f, &mut hint, start, opts)
}

/// Midpoint convexity on pairs of evaluated points.
fn convexity_audit(obj: &mut Objective) -> f64 {
    let pts = obj.path.clone();
    if pts.len() < 2 {
        return 0.0;
    }
    let last = pts.len() - 1;
    let mut gap = f64::NEG_INFINITY;
    for k in 0..6usize {
        let i = k * last / 6;
        let j = last - k * last / 12;
        if i >= j {
            continue;
        }
        let (a, fa) = &pts[i];
        let (b, fb) = &pts[j];
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let fm = obj.eval(&mid);
        gap = gap.max(fm - 0.5 * (fa + fb));
    }
    if gap.is_finite() {
        gap
    } else {
        0.0
    }
}

/// `𝒯 ⊥_B 𝔽^d𝒮` iff `dist(𝒯, 𝔽^d𝒮) ≥ ‖𝒯‖ − τ_bj`; an orthogonal decision
/// carries a Singer certificate at `z = 0` when one is found.
pub fn bj_orthogonal(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<BJDecision> {
    let norm = tuple_norm(t, cfg).value;
    let distance = distance_to_diagonal_subspace(t, s, cfg)?;
    let margin = distance.value - norm;
    let orthogonal = margin >= -cfg.tau_bj;
    let (certificate, certificate_error) = if orthogonal {
        match build_singer_certificate(t, s, &DiagonalAction::zeros(t.d()), cfg) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    Ok(BJDecision { orthogonal, margin, distance, norm, certificate, certificate_error })
}
