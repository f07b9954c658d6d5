//! Norms of functionals restricted to the kernel of another functional.

use nalgebra::{DMatrix, DVector};

use super::search::{pattern_search, PatternOptions};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linops::OperatorTuple;
use crate::spaces::{lp_norm_slice, max_modulus, Field, LpSpace, C64};

/// Particular solution and null-space basis of the system `rows · x = rhs`.
fn affine_solutions(rows: &[&[C64]], rhs: &[C64], field: Field) -> Option<(Vec<C64>, Vec<Vec<C64>>)> {
    let n = rows[0].len();
    let size = n.max(rows.len());
    match field {
        Field::Real => {
            let mut a = DMatrix::<f64>::zeros(size, n);
            for (i, r) in rows.iter().enumerate() {
                for (j, z) in r.iter().enumerate() {
                    a[(i, j)] = z.re;
                }
            }
            let mut b = DVector::<f64>::zeros(size);
            for (i, z) in rhs.iter().enumerate() {
                b[i] = z.re;
            }
            let svd = a.svd(true, true);
            let smax = svd.singular_values.max();
            let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * smax).count();
            if rank < rows.len() {
                return None;
            }
            let x0 = svd.solve(&b, 1e-12 * smax).ok()?;
            let vt = svd.v_t.as_ref()?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
            let basis = order[rank..]
                .iter()
                .map(|&k| vt.row(k).iter().map(|&v| C64::new(v, 0.0)).collect())
                .collect();
            Some((x0.iter().map(|&v| C64::new(v, 0.0)).collect(), basis))
        }
        Field::Complex => {
            let mut a = DMatrix::<C64>::zeros(size, n);
            for (i, r) in rows.iter().enumerate() {
                for (j, z) in r.iter().enumerate() {
                    a[(i, j)] = *z;
                }
            }
            let mut b = DVector::<C64>::zeros(size);
            for (i, z) in rhs.iter().enumerate() {
                b[i] = *z;
            }
            let svd = a.svd(true, true);
            let smax = svd.singular_values.max();
            let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * smax).count();
            if rank < rows.len() {
                return None;
            }
            let x0 = svd.solve(&b, 1e-12 * smax).ok()?;
            let vt = svd.v_t.as_ref()?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
            let basis = order[rank..].iter().map(|&k| vt.row(k).iter().map(|v| v.conj()).collect()).collect();
            Some((x0.iter().copied().collect(), basis))
        }
    }
}

/// `‖f|_{ker g}‖ = max { |f(x)| : ‖x‖_p = 1, g(x) = 0 }`, computed as the
/// reciprocal of `min { ‖x‖_p : f(x) = 1, g(x) = 0 }`.
pub fn restricted_functional_norm(f: &[C64], g: &[C64], domain: LpSpace, cfg: &Config) -> f64 {
    let _ = cfg;
    if max_modulus(f) == 0.0 {
        return 0.0;
    }
    if max_modulus(g) == 0.0 {
        return lp_norm_slice(domain.p.dual(), f);
    }
    if domain.p.is_two() {
        // f(x) = ⟨x, conj f⟩ and ker g = conj(g)^⊥
        let gn: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        let c: C64 = f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<C64>() / gn;
        let proj: Vec<C64> = f.iter().zip(g).map(|(a, b)| a.conj() - c * b.conj()).collect();
        return lp_norm_slice(domain.p, &proj);
    }
    let one = C64::new(1.0, 0.0);
    let Some((x0, basis)) = affine_solutions(&[f, g], &[one, C64::new(0.0, 0.0)], domain.field) else {
        return 0.0;
    };
    let point = |c: &[f64]| -> Vec<C64> {
        let mut x = x0.clone();
        for (k, b) in basis.iter().enumerate() {
            let coef = match domain.field {
                Field::Real => C64::new(c[k], 0.0),
                Field::Complex => C64::new(c[2 * k], c[2 * k + 1]),
            };
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += coef * bi;
            }
        }
        x
    };
    let vars = basis.len() * domain.field.real_dim();
    let min = if vars == 0 {
        lp_norm_slice(domain.p, &x0)
    } else {
        let scale = lp_norm_slice(domain.p, &x0).max(1e-12);
        let opts = PatternOptions { scale: vec![scale; vars], bounds: None, min_step: 1e-11, max_evals: 40_000 };
        let mut obj = |c: &[f64]| lp_norm_slice(domain.p, &point(c));
        pattern_search(&mut obj, &mut |_| None, vec![0.0; vars], &opts).1
    };
    1.0 / min
}

/// `max_i ‖f_i|_{ker g_i}‖` for tuples of functionals (one-dimensional
/// codomains) under the sup-norm outer exponent.
pub fn kernel_distance_functional_tuple(t: &OperatorTuple, s: &OperatorTuple, cfg: &Config) -> Result<f64> {
    if !t.outer().is_infinite() && t.d() > 1 {
        return Err(Error::ShapeMismatch("kernel formula needs the sup-norm outer exponent".into()));
    }
    if t.d() != s.d() {
        return Err(Error::DimensionMismatch { expected: t.d(), found: s.d() });
    }
    let mut best = 0.0_f64;
    for (i, (a, b)) in t.components().iter().zip(s.components()).enumerate() {
        if a.codomain().dim != 1 || b.codomain().dim != 1 {
            return Err(Error::ShapeMismatch(format!("component {i} is not a functional")));
        }
        let v = restricted_functional_norm(a.matrix().row(0), b.matrix().row(0), t.domain(), cfg);
        best = best.max(v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn euclidean_examples() {
        let cfg = Config::default();
        let l2 = LpSpace::real(2, 2.0).unwrap();
        assert!((restricted_functional_norm(&r(&[1.0, 0.0]), &r(&[0.0, 1.0]), l2, &cfg) - 1.0).abs() < 1e-15);
        assert!(restricted_functional_norm(&r(&[1.0, 0.0]), &r(&[1.0, 0.0]), l2, &cfg).abs() < 1e-15);
        let v = restricted_functional_norm(&r(&[1.0, 1.0]), &r(&[1.0, -1.0]), l2, &cfg);
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(restricted_functional_norm(&r(&[3.0, 4.0]), &r(&[0.0, 0.0]), l2, &cfg), 5.0);
    }

    #[test]
    fn general_exponent_matches_projection_at_two() {
        let cfg = Config::default();
        // evaluate the general route at p = 2 through a non-Euclidean label
        let l2 = LpSpace::real(3, 2.0).unwrap();
        let f = r(&[1.0, -2.0, 0.5]);
        let g = r(&[0.3, 1.0, -1.0]);
        let exact = restricted_functional_norm(&f, &g, l2, &cfg);
        let (x0, basis) = affine_solutions(&[&f, &g], &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], Field::Real).unwrap();
        assert_eq!(basis.len(), 1);
        let mut obj = |c: &[f64]| {
            let x: Vec<C64> = x0.iter().zip(&basis[0]).map(|(a, b)| a + b * c[0]).collect();
            lp_norm_slice(l2.p, &x)
        };
        let opts = PatternOptions { scale: vec![1.0], bounds: None, min_step: 1e-12, max_evals: 10_000 };
        let (_, m) = pattern_search(&mut obj, &mut |_| None, vec![0.0], &opts);
        assert!((1.0 / m - exact).abs() < 1e-9);
    }

    #[test]
    fn dependent_functionals_vanish() {
        let cfg = Config::default();
        let l3 = LpSpace::real(3, 3.0).unwrap();
        let g = r(&[1.0, 2.0, -1.0]);
        let f: Vec<C64> = g.iter().map(|z| z * 2.5).collect();
        assert_eq!(restricted_functional_norm(&f, &g, l3, &cfg), 0.0);
    }
}
