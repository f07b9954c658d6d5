//! Singer certificates: convex combinations of extreme norming functionals
//! `f ⊗ x` of the residual that annihilate the diagonal subspace.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linops::{DiagonalAction, OperatorTuple};
use crate::normcalc::{tuple_norm, NormResult};
use crate::spaces::{is_extreme_slice, lp_norm_slice, pair, Field, Vector, C64};

const EXTREME_CAP: usize = 16;
const ROUNDS: usize = 10;

/// One pair `(x, f)` with its convex weight.
#[derive(Clone, Debug)]
pub struct CertificateEntry {
    pub x: Vector,
    /// Functional on the concatenated tuple codomain.
    pub f: Vec<C64>,
    pub t: f64,
}

#[derive(Clone, Debug)]
pub struct SingerCertificate {
    pub entries: Vec<CertificateEntry>,
    pub h: usize,
    pub z: DiagonalAction,
    /// `‖𝒯 − z𝒮‖`.
    pub value: f64,
    /// `max_j |Σ_i t_i f_i(S_j x_i)|`, real and imaginary parts separately.
    pub annihilation_residual: f64,
    pub weight_sum_error: f64,
}

/// Result of re-checking every certificate invariant from scratch.
#[derive(Clone, Debug)]
pub struct CertificateCheck {
    pub valid: bool,
    pub failures: Vec<String>,
    pub annihilation_residual: f64,
    pub weight_sum_error: f64,
    /// `min_i Re f_i((𝒯 − z𝒮)x_i) − value`.
    pub norming_margin: f64,
}

struct Pair {
    x: Vec<C64>,
    f: Vec<C64>,
    a: Vec<f64>,
}

fn annihilation_vector(s: &OperatorTuple, field: Field, x: &[C64], f: &[C64]) -> Vec<f64> {
    let cod = s.codomain();
    let mut a = Vec::with_capacity(s.d() * field.real_dim());
    for j in 0..s.d() {
        let c = pair(cod.block(f, j), &s.component(j).matrix().mul_vec(x));
        a.push(c.re);
        if field == Field::Complex {
            a.push(c.im);
        }
    }
    a
}

fn collect_pairs(
    r: &OperatorTuple,
    s: &OperatorTuple,
    xs: &[Vec<C64>],
    value: f64,
    cfg: &Config,
    out: &mut Vec<Pair>,
) {
    let stacked = r.stacked();
    let p = r.domain().p;
    for x in xs {
        if !is_extreme_slice(p, x, cfg.tau_cluster) {
            continue;
        }
        let y = stacked.matrix.mul_vec(x);
        if stacked.codomain.norm(&y) < value - cfg.tau_cert {
            continue;
        }
        let Ok(j) = stacked.codomain.norming(&y, cfg.tau_cluster) else { continue };
        for f in j.extreme_points(EXTREME_CAP) {
            if pair(&f, &y).re < value - cfg.tau_cert || !stacked.codomain.is_dual_extreme(&f, cfg.tau_cluster) {
                continue;
            }
            let a = annihilation_vector(s, r.field(), x, &f);
            if out.iter().any(|q| q.a == a && q.x == *x) {
                continue;
            }
            out.push(Pair { x: x.clone(), f, a });
        }
    }
}

/// `min s` subject to `|Σ t_i a_i|_∞ ≤ s`, `Σ t = 1`, `t ≥ 0`.
fn feasibility(pairs: &[Pair], m: usize) -> Option<(f64, Vec<f64>)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let s = lp.add_var(1.0, (0.0, f64::INFINITY));
    let ts: Vec<_> = pairs.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for k in 0..m {
        let mut row: Vec<_> = ts.iter().zip(pairs).map(|(&t, p)| (t, p.a[k])).collect();
        row.push((s, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
        let mut row: Vec<_> = ts.iter().zip(pairs).map(|(&t, p)| (t, p.a[k])).collect();
        row.push((s, 1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let sum: Vec<_> = ts.iter().map(|&t| (t, 1.0)).collect();
    lp.add_constraint(sum.as_slice(), ComparisonOp::Eq, 1.0);
    let sol = lp.solve().ok()?;
    Some((sol[s], ts.iter().map(|&t| sol[t].max(0.0)).collect()))
}

/// `max u` subject to `w·a_i ≥ u`, `|w|_∞ ≤ 1`: a direction along which every
/// known pair predicts descent.
fn separation(pairs: &[Pair], m: usize) -> Option<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let u = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let ws: Vec<_> = (0..m).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    for p in pairs {
        let mut row: Vec<_> = ws.iter().zip(&p.a).map(|(&w, &a)| (w, a)).collect();
        row.push((u, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().ok()?;
    (sol[u] > 0.0).then(|| ws.iter().map(|&w| sol[w]).collect())
}

/// Drop pairs until at most `m + 1` remain, keeping `A t = 0`, `Σ t = 1`.
fn caratheodory(pairs: &[Pair], mut support: Vec<usize>, mut t: Vec<f64>, m: usize) -> (Vec<usize>, Vec<f64>) {
    while support.len() > m + 1 {
        let h = support.len();
        let mut mat = DMatrix::<f64>::zeros(h, h);
        for (c, &i) in support.iter().enumerate() {
            for k in 0..m {
                mat[(k, c)] = pairs[i].a[k];
            }
            mat[(m, c)] = 1.0;
        }
        let svd = mat.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let k = (0..h)
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .expect("nonempty");
        let mut v: Vec<f64> = vt.row(k).iter().copied().collect();
        if v.iter().all(|&x| x <= 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let (drop, theta) = v
            .iter()
            .enumerate()
            .filter(|(_, &vi)| vi > 1e-14)
            .map(|(c, &vi)| (c, t[c] / vi))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("null vector has a positive entry");
        for (tc, vc) in t.iter_mut().zip(&v) {
            *tc = (*tc - theta * vc).max(0.0);
        }
        support.remove(drop);
        t.remove(drop);
    }
    (support, t)
}

/// Least-squares weights on a fixed support; kept only if nonnegative.
fn refine(pairs: &[Pair], support: &[usize], t: Vec<f64>, m: usize) -> Vec<f64> {
    let h = support.len();
    let rows = (m + 1).max(h);
    let mut mat = DMatrix::<f64>::zeros(rows, h);
    for (c, &i) in support.iter().enumerate() {
        for k in 0..m {
            mat[(k, c)] = pairs[i].a[k];
        }
        mat[(m, c)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(rows);
    rhs[m] = 1.0;
    let Ok(sol) = mat.clone().svd(true, true).solve(&rhs, 1e-14) else { return t };
    let cand: Vec<f64> = sol.iter().copied().collect();
    let resid = |w: &[f64]| -> f64 {
        let r = &mat * DVector::from_column_slice(w) - &rhs;
        r.amax()
    };
    if cand.iter().all(|&w| w > 0.0) && resid(&cand) <= resid(&t) {
        cand
    } else {
        t
    }
}

/// Certify that `z` is a best approximation of `𝒯` from `𝔽^d𝒮`.
pub fn build_singer_certificate(
    t: &OperatorTuple,
    s: &OperatorTuple,
    z: &DiagonalAction,
    cfg: &Config,
) -> Result<SingerCertificate> {
    let r = t.affine(s, z)?;
    let field = t.field();
    let m = s.d() * field.real_dim();
    let norm: NormResult = tuple_norm(&r, cfg);
    let value = norm.value;
    if value == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let mut pairs = Vec::new();
    collect_pairs(&r, s, &norm.witness_entries(), value, cfg, &mut pairs);
    let scale = pairs.iter().flat_map(|p| p.a.iter()).fold(1.0_f64, |acc, a| acc.max(a.abs()));
    let mut best = f64::INFINITY;
    for round in 0..=ROUNDS {
        if pairs.is_empty() {
            break;
        }
        let Some((s_opt, weights)) = feasibility(&pairs, m) else { break };
        best = best.min(s_opt);
        if s_opt <= 1e-11 * scale {
            let support: Vec<usize> = (0..pairs.len()).filter(|&i| weights[i] > 1e-13).collect();
            let ws: Vec<f64> = support.iter().map(|&i| weights[i]).collect();
            let (support, ws) = caratheodory(&pairs, support, ws, m);
            let ws = refine(&pairs, &support, ws, m);
            return Ok(assemble(&pairs, &support, &ws, t, z, value, m));
        }
        if round == ROUNDS {
            break;
        }
        let Some(w) = separation(&pairs, m) else { break };
        // pairs minimizing w·a maximize ‖R − τ (w ⊙ 𝒮)‖ for small τ
        let dir = DiagonalAction {
            z: (0..s.d())
                .map(|j| match field {
                    Field::Real => C64::new(w[j], 0.0),
                    Field::Complex => C64::new(w[2 * j], -w[2 * j + 1]),
                })
                .collect(),
        };
        let push = s.diag_scaled(&dir)?;
        let push_norm = tuple_norm(&push, cfg).value.max(f64::MIN_POSITIVE);
        let before = pairs.len();
        for rel in [1e-8, 1e-6, 1e-4] {
            let tau = rel * value / push_norm;
            let perturbed = r.affine(&push, &DiagonalAction { z: vec![C64::new(tau, 0.0); s.d()] })?;
            let pn = tuple_norm(&perturbed, cfg);
            collect_pairs(&r, s, &pn.witness_entries(), value, cfg, &mut pairs);
        }
        if pairs.len() == before {
            break;
        }
    }
    Err(Error::CertificateNotFound { residual: best })
}

fn assemble(
    pairs: &[Pair],
    support: &[usize],
    ws: &[f64],
    t: &OperatorTuple,
    z: &DiagonalAction,
    value: f64,
    m: usize,
) -> SingerCertificate {
    let domain = t.domain();
    let entries: Vec<CertificateEntry> = support
        .iter()
        .zip(ws)
        .map(|(&i, &w)| CertificateEntry { x: Vector::from_parts(domain, pairs[i].x.clone()), f: pairs[i].f.clone(), t: w })
        .collect();
    let mut resid = 0.0_f64;
    for k in 0..m {
        let v: f64 = support.iter().zip(ws).map(|(&i, &w)| w * pairs[i].a[k]).sum();
        resid = resid.max(v.abs());
    }
    let sum: f64 = ws.iter().sum();
    SingerCertificate {
        h: entries.len(),
        entries,
        z: z.clone(),
        value,
        annihilation_residual: resid,
        weight_sum_error: (sum - 1.0).abs(),
    }
}

impl SingerCertificate {
    /// Re-derive every invariant from the instance.
    pub fn verify(&self, t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> CertificateCheck {
        let mut failures = Vec::new();
        let field = t.field();
        let m = s.d() * field.real_dim();
        let Ok(r) = t.affine(s, &self.z) else {
            return CertificateCheck {
                valid: false,
                failures: vec!["shape mismatch".into()],
                annihilation_residual: f64::INFINITY,
                weight_sum_error: f64::INFINITY,
                norming_margin: f64::NEG_INFINITY,
            };
        };
        let stacked = r.stacked();
        let cod = &stacked.codomain;
        let sum: f64 = self.entries.iter().map(|e| e.t).sum();
        let weight_sum_error = (sum - 1.0).abs();
        if weight_sum_error > 1e-9 {
            failures.push(format!("weights sum to {sum}"));
        }
        if self.h != self.entries.len() || self.h > m + 1 {
            failures.push(format!("h = {} exceeds {}", self.h, m + 1));
        }
        let mut norming_margin = f64::INFINITY;
        let mut acc = vec![0.0; m];
        for (i, e) in self.entries.iter().enumerate() {
            if !(e.t > 0.0 && e.t <= 1.0 + 1e-12) {
                failures.push(format!("entry {i}: weight {} outside (0, 1]", e.t));
            }
            let x = e.x.entries();
            let xn = lp_norm_slice(t.domain().p, x);
            if (xn - 1.0).abs() > cfg.tau_dual {
                failures.push(format!("entry {i}: ‖x‖ = {xn}"));
            }
            if !is_extreme_slice(t.domain().p, x, cfg.tau_cluster) {
                failures.push(format!("entry {i}: x is not extreme"));
            }
            if !cod.is_dual_extreme(&e.f, cfg.tau_cluster) {
                failures.push(format!("entry {i}: f is not extreme"));
            }
            let fnorm = dual_norm(cod, &e.f);
            if (fnorm - 1.0).abs() > cfg.tau_dual {
                failures.push(format!("entry {i}: ‖f‖ = {fnorm}"));
            }
            let val = pair(&e.f, &stacked.matrix.mul_vec(x)).re;
            norming_margin = norming_margin.min(val - self.value);
            if val < self.value - cfg.tau_cert {
                failures.push(format!("entry {i}: f((𝒯−z𝒮)x) = {val} below {}", self.value));
            }
            let a = annihilation_vector(s, field, x, &e.f);
            for (k, ak) in a.iter().enumerate() {
                acc[k] += e.t * ak;
            }
        }
        let annihilation_residual = acc.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if annihilation_residual > cfg.tau_cert {
            failures.push(format!("annihilation residual {annihilation_residual:.3e}"));
        }
        CertificateCheck {
            valid: failures.is_empty(),
            failures,
            annihilation_residual,
            weight_sum_error,
            norming_margin,
        }
    }
}

/// Norm of `f` in the dual of the nested codomain.
fn dual_norm(cod: &crate::linops::Codomain, f: &[C64]) -> f64 {
    let b: Vec<C64> = cod
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, sp)| C64::new(lp_norm_slice(sp.p.dual(), cod.block(f, k)), 0.0))
        .collect();
    if b.len() == 1 {
        return b[0].re;
    }
    lp_norm_slice(cod.outer().dual(), &b)
}
