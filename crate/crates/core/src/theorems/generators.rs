//! Instance generators: the constructive examples, the golden counterexample
//! and random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linops::{Matrix, Operator, OperatorTuple};
use crate::normcalc::operator_norm;
use crate::spaces::{duality_map_slice, lp_norm_slice, pair, Exponent, Field, LpSpace, C64};

/// Exponents, outer norm and field for the constructive generators.
#[derive(Clone, Debug)]
pub struct GenOptions {
    pub domain_p: f64,
    pub codomain_p: f64,
    pub outer: Exponent,
    pub field: Field,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self { domain_p: 2.0, codomain_p: 2.0, outer: Exponent::TWO, field: Field::Real }
    }
}

fn space(dim: usize, p: f64, field: Field) -> Result<LpSpace> {
    LpSpace::new(dim, Exponent::new(p)?, field)
}

fn scalar(rng: &mut ChaCha8Rng, field: Field, range: f64) -> C64 {
    match field {
        Field::Real => C64::new(rng.gen_range(-range..range), 0.0),
        Field::Complex => C64::new(rng.gen_range(-range..range), rng.gen_range(-range..range)),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, field: Field) -> Matrix {
    let data = (0..rows * cols).map(|_| scalar(rng, field, 1.0)).collect();
    Matrix::new(rows, cols, data).expect("sizes agree")
}

/// Rank-one matrix `u vᵀ` acting as `x ↦ v(x) u`.
fn outer_product(u: &[C64], v: &[C64]) -> Matrix {
    let data = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    Matrix::new(u.len(), v.len(), data).expect("sizes agree")
}

/// `T_j(αx + h) = αAx + Ah/(j+1)` and `S_j(αx + h) = B_j h` with `x ∈ M_A`
/// and `x ⊥_B H`, `H = ker f` for the norming functional `f` of `x`.
pub fn gen_example_a(dim: usize, d: usize, seed: u64) -> Result<Instance> {
    gen_example_a_with(dim, d, seed, &GenOptions::default())
}

pub fn gen_example_a_with(dim: usize, d: usize, seed: u64, opts: &GenOptions) -> Result<Instance> {
    if dim < 2 {
        return Err(Error::ShapeMismatch("the common-maximizer family needs dimension at least 2".into()));
    }
    if d == 0 {
        return Err(Error::EmptyTuple);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_space = space(dim, opts.domain_p, opts.field)?;
    let y_space = space(dim, opts.codomain_p, opts.field)?;
    let a = Operator::new(random_matrix(&mut rng, dim, dim, opts.field), x_space, y_space)?;
    let na = operator_norm(&a, &Config::with_seed(seed));
    let x = na.best_witness().entries().to_vec();
    // x ⊥_B ker f because ‖x + h‖ ≥ |f(x + h)| = 1
    let f = duality_map_slice(x_space.p, opts.field, &x, 1e-12)?.canonical();
    let ax = a.matrix().mul_vec(&x);
    let mut ts = Vec::with_capacity(d);
    let mut ss = Vec::with_capacity(d);
    for j in 1..=d {
        let c = 1.0 / (j as f64 + 1.0);
        // T_j = cA + (1 − c)(Ax) f
        let rank_one = outer_product(&ax, &f);
        let tj = a.matrix().scaled(C64::new(c, 0.0)).sub_scaled(C64::new(c - 1.0, 0.0), &rank_one)?;
        // S_j = B_j − (B_j x) f
        let b = random_matrix(&mut rng, dim, dim, opts.field);
        let bx = b.mul_vec(&x);
        let sj = b.sub_scaled(C64::new(1.0, 0.0), &outer_product(&bx, &f))?;
        ts.push(Operator::new(tj, x_space, y_space)?);
        ss.push(Operator::new(sj, x_space, y_space)?);
    }
    let mut inst = Instance::new(OperatorTuple::new(ts, opts.outer)?, OperatorTuple::new(ss, opts.outer)?)?;
    inst.meta.generator = "example_a".into();
    inst.meta.seed = Some(seed);
    inst.meta.flags.push(("common_maximizer_by_construction".into(), true));
    inst.meta.common_maximizer = Some(x);
    Ok(inst)
}

/// Truncated diagonal `T_j = diag(1, λ_j2, …)` and `S_j = diag(0, λ_j2, …)`
/// with `|λ_jk| < 1` on `ℓ_m`.
pub fn gen_example_b(dim: usize, d: usize, seed: u64) -> Result<Instance> {
    gen_example_b_with(dim, d, seed, &GenOptions { domain_p: 3.0, codomain_p: 3.0, ..GenOptions::default() })
}

/// `opts.domain_p` is the exponent `m` of both domain and codomain.
pub fn gen_example_b_with(dim: usize, d: usize, seed: u64, opts: &GenOptions) -> Result<Instance> {
    if dim < 2 {
        return Err(Error::ShapeMismatch("the diagonal family needs dimension at least 2".into()));
    }
    if d == 0 {
        return Err(Error::EmptyTuple);
    }
    let m = opts.domain_p;
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::InvalidExponent(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sp = space(dim, m, opts.field)?;
    let mut ts = Vec::with_capacity(d);
    let mut ss = Vec::with_capacity(d);
    for _ in 0..d {
        let mut lambda: Vec<C64> = (1..dim)
            .map(|_| {
                let r = rng.gen_range(0.05..0.9);
                match opts.field {
                    Field::Real => C64::new(if rng.gen_bool(0.5) { r } else { -r }, 0.0),
                    Field::Complex => C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)),
                }
            })
            .collect();
        let mut td = vec![C64::new(1.0, 0.0)];
        td.append(&mut lambda.clone());
        let mut sd = vec![C64::new(0.0, 0.0)];
        sd.append(&mut lambda);
        ts.push(Operator::new(Matrix::diagonal(&td), sp, sp)?);
        ss.push(Operator::new(Matrix::diagonal(&sd), sp, sp)?);
    }
    let mut inst = Instance::new(OperatorTuple::new(ts, opts.outer)?, OperatorTuple::new(ss, opts.outer)?)?;
    inst.meta.generator = "example_b".into();
    inst.meta.seed = Some(seed);
    inst.meta.flags.push(("common_maximizer_by_construction".into(), true));
    let mut e1 = vec![C64::new(0.0, 0.0); dim];
    e1[0] = C64::new(1.0, 0.0);
    inst.meta.common_maximizer = Some(e1);
    Ok(inst)
}

/// `T₁(a,b) = (a/2, b)`, `T₂(a,b) = (a, b/2)`, `S₁ = −S₂ = ½(a−b, a−b)` on
/// real ℓ_2², outer exponent 2.
pub fn golden_counterexample() -> Instance {
    let l2 = LpSpace::real(2, 2.0).expect("valid");
    let t1 = Operator::real(&[&[0.5, 0.0], &[0.0, 1.0]], l2, l2).expect("valid");
    let t2 = Operator::real(&[&[1.0, 0.0], &[0.0, 0.5]], l2, l2).expect("valid");
    let s1 = Operator::real(&[&[0.5, -0.5], &[0.5, -0.5]], l2, l2).expect("valid");
    let s2 = s1.scaled(C64::new(-1.0, 0.0));
    let mut inst = Instance::new(
        OperatorTuple::new(vec![t1, t2], Exponent::TWO).expect("valid"),
        OperatorTuple::new(vec![s1, s2], Exponent::TWO).expect("valid"),
    )
    .expect("valid");
    inst.meta.generator = "golden".into();
    inst
}

/// `T_n = diag(1, 1/(n+1), …, 1, …, 1/(n+1))` on `ℓ_m^d` with the second
/// 1 in position `n`; outer exponent 2 and `𝒮 = 0`.
pub fn diagonal_smoothness_example(m: f64, d: usize) -> Result<Instance> {
    if d < 2 {
        return Err(Error::ShapeMismatch("the diagonal example needs d at least 2".into()));
    }
    let sp = space(d, m, Field::Real)?;
    let mut ts = Vec::with_capacity(d);
    for n in 1..=d {
        let small = 1.0 / (n as f64 + 1.0);
        let diag: Vec<C64> =
            (1..=d).map(|k| C64::new(if k == 1 || k == n { 1.0 } else { small }, 0.0)).collect();
        ts.push(Operator::new(Matrix::diagonal(&diag), sp, sp)?);
    }
    let t = OperatorTuple::new(ts, Exponent::TWO)?;
    let s = t.scaled(C64::new(0.0, 0.0));
    let mut inst = Instance::new(t, s)?;
    inst.meta.generator = "diagonal_smoothness".into();
    Ok(inst)
}

/// Maximizer of `|f|` on the unit sphere of ℓ_p (`1 < p < ∞`).
pub(crate) fn functional_maximizer(f: &[C64], domain: LpSpace) -> Result<Vec<C64>> {
    Ok(duality_map_slice(domain.p.dual(), domain.field, f, 1e-12)?.canonical())
}

/// Tuples of functionals `T = (f_1, …, f_d)`, `S = (g_1, …, g_d)` with scalar
/// codomains and outer exponent ∞.
///
/// With `equal_norms` every `‖f_i‖ = 1`, and on odd seeds one `g_i` is made
/// to vanish at the maximizer of `f_i`. Remaining `g_i` stay at least 5% of
/// `‖g_i‖` away from vanishing there.
pub fn gen_functionals(dim: usize, d: usize, p: f64, seed: u64, equal_norms: bool) -> Result<Instance> {
    if d == 0 {
        return Err(Error::EmptyTuple);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = space(dim, p, Field::Real)?;
    let scalar_space = LpSpace::new(1, Exponent::Infinity, Field::Real)?;
    let q = domain.p.dual();
    let vanishing = if equal_norms && seed % 2 == 1 { Some(rng.gen_range(0..d)) } else { None };
    let mut ts = Vec::with_capacity(d);
    let mut ss = Vec::with_capacity(d);
    for i in 0..d {
        let mut f: Vec<C64> = (0..dim).map(|_| scalar(&mut rng, Field::Real, 1.0)).collect();
        let nf = lp_norm_slice(q, &f);
        let target = if equal_norms { 1.0 } else { rng.gen_range(0.5..1.5) };
        f.iter_mut().for_each(|v| *v *= target / nf);
        let x = functional_maximizer(&f, domain)?;
        let fx = pair(&f, &x);
        let g = loop {
            let mut g: Vec<C64> = (0..dim).map(|_| scalar(&mut rng, Field::Real, 1.0)).collect();
            if vanishing == Some(i) {
                let c = pair(&g, &x) / fx;
                g.iter_mut().zip(&f).for_each(|(a, b)| *a -= c * b);
                break g;
            }
            let ng = lp_norm_slice(q, &g);
            if pair(&g, &x).norm() >= 0.05 * ng {
                break g;
            }
        };
        ts.push(Operator::new(Matrix::new(1, dim, f)?, domain, scalar_space)?);
        ss.push(Operator::new(Matrix::new(1, dim, g)?, domain, scalar_space)?);
    }
    let mut inst =
        Instance::new(OperatorTuple::new(ts, Exponent::Infinity)?, OperatorTuple::new(ss, Exponent::Infinity)?)?;
    inst.meta.generator = "functionals".into();
    inst.meta.seed = Some(seed);
    inst.meta.flags.push(("equal_norms".into(), equal_norms));
    Ok(inst)
}

/// Random tuple with heterogeneous codomains `ℓ_q^k` (`k ≤ 3`,
/// `q ∈ {1, 2, 3, ∞}`) and the given outer exponent.
pub fn gen_random(dim: usize, d: usize, domain_p: f64, outer: Exponent, field: Field, seed: u64) -> Result<Instance> {
    if d == 0 {
        return Err(Error::EmptyTuple);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = space(dim, domain_p, field)?;
    let qs = [1.0, 2.0, 3.0, f64::INFINITY];
    let mut ts = Vec::with_capacity(d);
    let mut ss = Vec::with_capacity(d);
    for _ in 0..d {
        let k = rng.gen_range(1..=3);
        let q = qs[rng.gen_range(0..qs.len())];
        let cod = space(k, q, field)?;
        ts.push(Operator::new(random_matrix(&mut rng, k, dim, field), domain, cod)?);
        ss.push(Operator::new(random_matrix(&mut rng, k, dim, field), domain, cod)?);
    }
    let mut inst = Instance::new(OperatorTuple::new(ts, outer)?, OperatorTuple::new(ss, outer)?)?;
    inst.meta.generator = "random".into();
    inst.meta.seed = Some(seed);
    Ok(inst)
}
