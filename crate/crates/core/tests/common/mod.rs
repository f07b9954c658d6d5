//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's solvers; only plain data accessors are used.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tuplenorm::approx::SingerCertificate;
use tuplenorm::normcalc::brute_force_norm;
use tuplenorm::{DiagonalAction, Exponent, Field, LpSpace, Matrix, Operator, OperatorTuple, C64};

pub fn lp(p: Exponent, x: &[C64]) -> f64 {
    match p {
        Exponent::Infinity => x.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Exponent::One => x.iter().map(|z| z.norm()).sum(),
        p => {
            let p = p.value();
            x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

pub fn matvec(m: &Matrix, x: &[C64]) -> Vec<C64> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j) * x[j]).sum()).collect()
}

/// Residuals of a certificate recomputed with plain loops:
/// `(annihilation, weight sum error, norming error, unit error, min weight)`.
pub struct CertificateResiduals {
    pub annihilation: f64,
    pub weight_sum: f64,
    pub norming: f64,
    pub units: f64,
    pub min_weight: f64,
}

pub fn certificate_residuals(c: &SingerCertificate, t: &OperatorTuple, s: &OperatorTuple) -> CertificateResiduals {
    let d = t.d();
    let mut offsets = vec![0];
    for op in t.components() {
        offsets.push(offsets.last().unwrap() + op.codomain().dim);
    }
    let mut sums = vec![C64::new(0.0, 0.0); d];
    let mut norming: f64 = 0.0;
    let mut units: f64 = 0.0;
    for e in &c.entries {
        let x = e.x.entries();
        units = units.max((lp(t.domain().p, x) - 1.0).abs());
        let mut image = C64::new(0.0, 0.0);
        let mut block_norms = Vec::with_capacity(d);
        for j in 0..d {
            let f = &e.f[offsets[j]..offsets[j + 1]];
            let sx = matvec(s.component(j).matrix(), x);
            let tx = matvec(t.component(j).matrix(), x);
            let fs: C64 = f.iter().zip(&sx).map(|(a, b)| a * b).sum();
            let ft: C64 = f.iter().zip(&tx).map(|(a, b)| a * b).sum();
            sums[j] += e.t * fs;
            image += ft - c.z.z[j] * fs;
            block_norms.push(C64::new(lp(t.component(j).codomain().p.dual(), f), 0.0));
        }
        units = units.max((lp(t.outer().dual(), &block_norms) - 1.0).abs());
        norming = norming.max((image.re - c.value).abs());
    }
    CertificateResiduals {
        annihilation: sums.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max),
        weight_sum: (c.entries.iter().map(|e| e.t).sum::<f64>() - 1.0).abs(),
        norming,
        units,
        min_weight: c.entries.iter().map(|e| e.t).fold(f64::INFINITY, f64::min),
    }
}

/// Grid density giving the brute-force norm about 1e-9 relative accuracy
/// after polishing on the small domains used here.
pub fn density(dim: usize) -> usize {
    if dim <= 2 {
        720
    } else {
        36
    }
}

pub fn brute_norm(t: &OperatorTuple) -> f64 {
    brute_force_norm(t, density(t.domain().dim)).expect("small domain").value
}

/// Norming functional of a real `y` in ℓ_q: `‖g‖_{q'} ≤ 1`, `g·y = ‖y‖_q`.
pub fn norming_real(q: Exponent, y: &[f64]) -> Vec<f64> {
    let n = lp(q, &y.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    if n == 0.0 {
        return vec![0.0; y.len()];
    }
    match q {
        Exponent::One => y.iter().map(|&v| if v == 0.0 { 0.0 } else { v.signum() }).collect(),
        Exponent::Infinity => {
            let k = (0..y.len()).max_by(|&a, &b| y[a].abs().total_cmp(&y[b].abs())).unwrap();
            (0..y.len()).map(|i| if i == k { y[k].signum() } else { 0.0 }).collect()
        }
        q => {
            let q = q.value();
            y.iter().map(|&v| v.signum() * (v.abs() / n).powf(q - 1.0)).collect()
        }
    }
}

/// The affine minorant `z ↦ f((𝒯 − z𝒮)x)` of `‖𝒯 − z𝒮‖` built from a unit
/// `x` and the norming functional of `(𝒯 − z𝒮)x` at `z`: `(a, g)` with value
/// `a + g·z`. Valid for every `z`.
fn minorant(t: &OperatorTuple, s: &OperatorTuple, z: &[f64], x: &[C64]) -> (f64, Vec<f64>) {
    let x: Vec<C64> = {
        let n = lp(t.domain().p, x);
        x.iter().map(|v| v / n).collect()
    };
    let d = t.d();
    let tx: Vec<Vec<f64>> = (0..d).map(|j| matvec(t.component(j).matrix(), &x).iter().map(|v| v.re).collect()).collect();
    let sx: Vec<Vec<f64>> = (0..d).map(|j| matvec(s.component(j).matrix(), &x).iter().map(|v| v.re).collect()).collect();
    let ys: Vec<Vec<f64>> = (0..d).map(|j| tx[j].iter().zip(&sx[j]).map(|(a, b)| a - z[j] * b).collect()).collect();
    let blocks: Vec<f64> = (0..d)
        .map(|j| lp(t.component(j).codomain().p, &ys[j].iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>()))
        .collect();
    let w = norming_real(t.outer(), &blocks);
    let mut a = 0.0;
    let mut g = vec![0.0; d];
    for j in 0..d {
        let f: Vec<f64> = norming_real(t.component(j).codomain().p, &ys[j]).iter().map(|v| v * w[j]).collect();
        a += f.iter().zip(&tx[j]).map(|(p, q)| p * q).sum::<f64>();
        g[j] = -f.iter().zip(&sx[j]).map(|(p, q)| p * q).sum::<f64>();
    }
    (a, g)
}

fn lp_model(cuts: &[(f64, Vec<f64>)], bounds: &[f64], center: Option<(&[f64], f64)>) -> Option<(f64, Vec<f64>)> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let e = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let zs: Vec<_> = bounds.iter().map(|&r| lp.add_var(0.0, (-r, r))).collect();
    for (a, g) in cuts {
        let mut row: Vec<_> = zs.iter().zip(g).map(|(&v, &c)| (v, c)).collect();
        match center {
            // minimize the model
            None => {
                row.push((e, -1.0));
                lp.add_constraint(row.as_slice(), ComparisonOp::Le, -a);
            }
            // nearest point of the level set in the sup norm
            Some((_, level)) => lp.add_constraint(row.as_slice(), ComparisonOp::Le, level - a),
        }
    }
    if let Some((c, _)) = center {
        for (&v, &ci) in zs.iter().zip(c) {
            lp.add_constraint([(v, 1.0), (e, -1.0)], ComparisonOp::Le, ci);
            lp.add_constraint([(v, 1.0), (e, 1.0)], ComparisonOp::Ge, ci);
        }
    }
    let sol = lp.solve().ok()?;
    Some((sol[e], zs.iter().map(|&v| sol[v]).collect()))
}

/// Certified lower bound on `min_z ‖𝒯 − z𝒮‖` (real scalars): a level-bundle
/// method over minorants from brute-force maximizers, stopped once the bound
/// is within `slack` of `target` or after `steps` evaluations. `hint` seeds
/// the first cuts.
pub fn distance_lower_bound(t: &OperatorTuple, s: &OperatorTuple, hint: &[f64], target: f64, slack: f64, steps: usize) -> f64 {
    assert_eq!(t.field(), Field::Real);
    let d = t.d();
    let norm_t = brute_norm(t);
    // every minimizer has |z_j|·‖S_j‖ ≤ 2‖𝒯‖; the brute force norms can only
    // be low, so the margin keeps the box honest
    let bounds: Vec<f64> = (0..d)
        .map(|j| {
            let sj = brute_norm(&OperatorTuple::single(s.component(j).clone()));
            if sj == 0.0 {
                0.0
            } else {
                2.5 * norm_t / sj
            }
        })
        .collect();
    let mut cuts = Vec::new();
    let eval = |z: &[f64], cuts: &mut Vec<(f64, Vec<f64>)>| {
        let zz = DiagonalAction { z: z.iter().map(|&v| C64::new(v, 0.0)).collect() };
        let r = brute_force_norm(&t.affine(s, &zz).unwrap(), density(t.domain().dim)).unwrap();
        for w in &r.witnesses {
            cuts.push(minorant(t, s, z, w.entries()));
        }
        r.value
    };
    let mut best_z: Vec<f64> = hint.iter().zip(&bounds).map(|(v, r)| v.clamp(-r, *r)).collect();
    let mut best = eval(&best_z, &mut cuts);
    let h = 1e-4 * (1.0 + best_z.iter().fold(0.0f64, |m, a| m.max(a.abs())));
    for j in 0..d {
        for sgn in [1.0, -1.0] {
            let mut z = best_z.clone();
            z[j] += sgn * h;
            eval(&z, &mut cuts);
        }
    }
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..steps {
        let Some((m, argmin)) = lp_model(&cuts, &bounds, None) else { break };
        lower = lower.max(m);
        if target - lower <= slack {
            break;
        }
        let level = lower + 0.3 * (best - lower);
        let next = lp_model(&cuts, &bounds, Some((&best_z, level))).map_or(argmin, |(_, z)| z);
        let v = eval(&next, &mut cuts);
        if v < best {
            best = v;
            best_z = next;
        }
    }
    lower
}

pub fn random_real_operator(rng: &mut ChaCha8Rng, rows: usize, domain: LpSpace, codomain_p: f64) -> Operator {
    let data: Vec<C64> = (0..rows * domain.dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
    let codomain = LpSpace::real(rows, codomain_p).unwrap();
    Operator::new(Matrix::new(rows, domain.dim, data).unwrap(), domain, codomain).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Brute-force `‖𝒯 − z𝒮‖` for real `z`.
pub fn brute_at(t: &OperatorTuple, s: &OperatorTuple, z: &[f64]) -> f64 {
    let zz = DiagonalAction { z: z.iter().map(|&v| C64::new(v, 0.0)).collect() };
    brute_norm(&t.affine(s, &zz).unwrap())
}
