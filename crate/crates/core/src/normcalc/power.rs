//! The norm engine: exact formulas where they exist, otherwise a
//! multi-start nonlinear power iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::attain::{cluster_orbits, Candidate};
use super::{NormMethod, NormResult};
use crate::config::Config;
use crate::linops::{odometer, StackedOperator};
use crate::spaces::{
    duality_map_slice, lp_norm_slice, max_modulus, Exponent, Field, LpSpace, Vector, C64, ONE,
    ZERO,
};

/// Tuning for a single norm evaluation.
#[derive(Clone, Debug, Default)]
pub(crate) struct SearchOptions {
    /// Extra starting points, tried before anything else.
    pub hints: Vec<Vec<C64>>,
    /// Override for the number of random starts.
    pub random_starts: Option<usize>,
    /// Skip the coordinate, sign-pattern and singular-vector starts.
    pub hints_only: bool,
}

const CANDIDATE_CAP: usize = 8;
const MAX_WITNESSES: usize = 64;

pub(crate) fn stacked_norm(a: &StackedOperator, cfg: &Config, opts: &SearchOptions) -> NormResult {
    let n = a.domain.dim;
    if a.matrix.is_zero() {
        let mut e = vec![ZERO; n];
        e[0] = ONE;
        return NormResult {
            value: 0.0,
            witnesses: vec![Vector::from_parts(a.domain, e)],
            method: method_for(a),
            residual: 0.0,
            starts_used: 0,
            complete: n == 1,
        };
    }
    match method_for(a) {
        NormMethod::ExactP1 => exact_p1(a, cfg),
        NormMethod::ExactRowDual => exact_row_dual(a, cfg),
        NormMethod::ExactSpectral => exact_spectral(a, cfg),
        _ => power_iteration(a, cfg, opts),
    }
}

fn method_for(a: &StackedOperator) -> NormMethod {
    if a.domain.p.is_one() {
        NormMethod::ExactP1
    } else if a.codomain.is_all_infinity() {
        NormMethod::ExactRowDual
    } else if a.domain.p.is_two() && a.codomain.is_all_two() {
        NormMethod::ExactSpectral
    } else {
        NormMethod::PowerIteration
    }
}

fn unit(p: Exponent, x: &[C64]) -> Option<Vec<C64>> {
    let n = lp_norm_slice(p, x);
    (n > 0.0 && n.is_finite()).then(|| x.iter().map(|z| z / n).collect())
}

fn finish(
    a: &StackedOperator,
    cfg: &Config,
    cands: Vec<Candidate>,
    method: NormMethod,
    starts_used: usize,
    complete: impl FnOnce(&[super::attain::Orbit]) -> bool,
) -> NormResult {
    let best = cands.iter().map(|c| c.value).fold(0.0, f64::max);
    let orbits = cluster_orbits(a.domain, cands, best - cfg.tau_attain, cfg.delta_sep, MAX_WITNESSES);
    let complete = complete(&orbits);
    let residual = orbits.iter().map(|o| best - o.value).fold(0.0, f64::max);
    NormResult {
        value: best,
        witnesses: orbits.into_iter().map(|o| Vector::from_parts(a.domain, o.x)).collect(),
        method,
        residual,
        starts_used,
        complete,
    }
}

fn exact_p1(a: &StackedOperator, cfg: &Config) -> NormResult {
    let n = a.domain.dim;
    let cols: Vec<f64> = (0..n).map(|j| a.codomain.norm(&a.matrix.column(j))).collect();
    let best = cols.iter().copied().fold(0.0, f64::max);
    let attaining: Vec<usize> = (0..n).filter(|&j| cols[j] >= best - cfg.tau_attain).collect();
    let cands = attaining
        .iter()
        .map(|&j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            Candidate { value: cols[j], x: e, hits: 1 }
        })
        .collect();
    let phases: Vec<C64> = match a.domain.field {
        Field::Real => vec![ONE, -ONE],
        Field::Complex => vec![ONE, C64::new(0.0, 1.0), -ONE, C64::new(0.0, -1.0)],
    };
    // An edge between two attaining vertices attains iff its midpoint does.
    let mut flat_edge = false;
    for (i, &j) in attaining.iter().enumerate() {
        for &k in &attaining[i + 1..] {
            for &ph in &phases {
                let mut x = vec![ZERO; n];
                x[j] = C64::new(0.5, 0.0);
                x[k] = ph * 0.5;
                if a.image_norm(&x) >= best - cfg.tau_attain {
                    flat_edge = true;
                }
            }
        }
    }
    finish(a, cfg, cands, NormMethod::ExactP1, n, |_| !flat_edge)
}

fn exact_row_dual(a: &StackedOperator, cfg: &Config) -> NormResult {
    let q = a.domain.p.dual();
    let rows: Vec<f64> = (0..a.matrix.rows()).map(|i| lp_norm_slice(q, a.matrix.row(i))).collect();
    let best = rows.iter().copied().fold(0.0, f64::max);
    let mut cands = Vec::new();
    let mut singleton = true;
    let mut attaining = 0;
    for (i, &r) in rows.iter().enumerate() {
        if r < best - cfg.tau_attain || r == 0.0 {
            continue;
        }
        attaining += 1;
        let set = duality_map_slice(q, a.domain.field, a.matrix.row(i), cfg.tau_cluster)
            .expect("row is nonzero");
        singleton &= set.is_singleton();
        for x in set.extreme_points(CANDIDATE_CAP) {
            let value = a.image_norm(&x);
            cands.push(Candidate { value, x, hits: 1 });
        }
    }
    let starts = cands.len();
    finish(a, cfg, cands, NormMethod::ExactRowDual, starts, |orbits| {
        singleton && (attaining == 1 || orbits.len() == 1)
    })
}

fn exact_spectral(a: &StackedOperator, cfg: &Config) -> NormResult {
    let (sv, vecs) = right_singular(a);
    let best = sv[0];
    let gap_tol = cfg.tau_attain * best.max(1.0);
    let mut cands = Vec::new();
    for (s, v) in sv.iter().zip(&vecs) {
        if *s >= best - gap_tol {
            cands.push(Candidate { value: a.image_norm(v), x: v.clone(), hits: 1 });
        }
    }
    let simple = cands.len() == 1;
    // A repeated top singular value means a whole subspace of maximizers;
    // the basis vectors alone would undersell it.
    if !simple {
        let k = cands.len();
        let mut extra = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let x: Vec<C64> = cands[i].x.iter().zip(&cands[j].x).map(|(u, v)| u + v).collect();
                if let Some(x) = unit(a.domain.p, &x) {
                    extra.push(Candidate { value: a.image_norm(&x), x, hits: 1 });
                }
            }
        }
        cands.extend(extra);
    }
    let starts = cands.len();
    finish(a, cfg, cands, NormMethod::ExactSpectral, starts, |_| simple)
}

/// Singular values (descending) and the matching unit right singular vectors.
fn right_singular(a: &StackedOperator) -> (Vec<f64>, Vec<Vec<C64>>) {
    let m = a.matrix.to_nalgebra();
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let vals = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| vt.row(i).iter().map(|z| z.conj()).collect())
        .collect();
    (vals, vecs)
}

fn canonical_starts(a: &StackedOperator) -> Vec<Vec<C64>> {
    let n = a.domain.dim;
    let mut starts = Vec::new();
    for j in 0..n {
        let mut e = vec![ZERO; n];
        e[j] = ONE;
        starts.push(e);
    }
    // sign patterns with a fixed leading +1; includes the all-ones vector
    let free = (n - 1).min(5);
    for idx in odometer(&vec![2; free], 1 << free) {
        let mut x = vec![ONE; n];
        for (k, &b) in idx.iter().enumerate() {
            if b == 1 {
                x[k + 1] = -ONE;
            }
        }
        starts.push(x);
    }
    let (_, vecs) = right_singular(a);
    starts.extend(vecs.into_iter().take(2));
    starts
}

pub(crate) fn random_point(rng: &mut ChaCha8Rng, field: Field, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| match field {
            Field::Real => C64::new(rng.gen_range(-1.0..1.0), 0.0),
            Field::Complex => C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        })
        .collect()
}

fn power_iteration(a: &StackedOperator, cfg: &Config, opts: &SearchOptions) -> NormResult {
    let n = a.domain.dim;
    let mut starts: Vec<Vec<C64>> = opts.hints.clone();
    if !opts.hints_only {
        starts.extend(canonical_starts(a));
    }
    let random = opts.random_starts.unwrap_or_else(|| cfg.starts_for_dim(n));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..random {
        starts.push(random_point(&mut rng, a.domain.field, n));
    }
    let mut cands = Vec::with_capacity(starts.len());
    for s in &starts {
        if let Some((value, x)) = ascend(a, s, cfg) {
            cands.push(Candidate { value, x, hits: 1 });
        }
    }
    let used = starts.len();
    if cands.is_empty() {
        let mut e = vec![ZERO; n];
        e[0] = ONE;
        cands.push(Candidate { value: a.image_norm(&e), x: e, hits: 1 });
    }
    finish(a, cfg, cands, NormMethod::PowerIteration, used, |orbits| {
        orbits.iter().all(|o| o.hits >= 2)
    })
}

/// Monotone ascent `x ← J_q(Aᵀ f)`, `f ∈ J_Y(Ax)`, from one start.
pub(crate) fn ascend(a: &StackedOperator, start: &[C64], cfg: &Config) -> Option<(f64, Vec<C64>)> {
    let p = a.domain.p;
    let q = p.dual();
    let field = a.domain.field;
    let mut x = unit(p, start)?;
    let mut y = a.matrix.mul_vec(&x);
    let mut val = a.codomain.norm(&y);
    let mut idle = 0;
    for _ in 0..cfg.max_iter {
        if val == 0.0 {
            break;
        }
        let Ok(jy) = a.codomain.norming(&y, cfg.tau_cluster) else { break };
        let fs = if jy.is_singleton() { vec![jy.canonical()] } else { jy.extreme_points(CANDIDATE_CAP) };
        let mut next: Option<(f64, Vec<C64>, Vec<C64>)> = None;
        for f in &fs {
            let g = a.matrix.tmul_vec(f);
            if max_modulus(&g) == 0.0 {
                continue;
            }
            let Ok(jg) = duality_map_slice(q, field, &g, cfg.tau_cluster) else { continue };
            let xs = if jg.is_singleton() { vec![jg.canonical()] } else { jg.extreme_points(CANDIDATE_CAP) };
            for xc in xs {
                let yc = a.matrix.mul_vec(&xc);
                let v = a.codomain.norm(&yc);
                if next.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                    next = Some((v, xc, yc));
                }
            }
        }
        let Some((v, xn, yn)) = next else { break };
        if v < val {
            break;
        }
        let dx = x.iter().zip(&xn).map(|(u, w)| (u - w).norm()).fold(0.0, f64::max);
        let gain = v - val;
        x = xn;
        y = yn;
        val = v;
        if dx <= 1e-13 {
            break;
        }
        if gain <= 1e-15 * val {
            idle += 1;
            if idle >= 3 || dx <= 1e-9 {
                break;
            }
        } else {
            idle = 0;
        }
    }
    Some((val, x))
}

/// Uniformly random unit vector of `space` (not uniform on the sphere).
#[allow(dead_code)]
pub(crate) fn random_unit(rng: &mut ChaCha8Rng, space: LpSpace) -> Vec<C64> {
    loop {
        if let Some(x) = unit(space.p, &random_point(rng, space.field, space.dim)) {
            return x;
        }
    }
}
