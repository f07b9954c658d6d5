//! Induced operator norms, joint tuple norms and norm attainment sets.

mod attain;
mod brute;
mod power;

use serde::Serialize;

use crate::config::Config;
use crate::linops::{Operator, OperatorTuple, StackedOperator};
use crate::spaces::{Vector, C64};

pub use attain::{attainment_set, joint_attainment_check, AttainmentSet, JointAttainment};
pub use brute::brute_force_norm;
pub(crate) use attain::orbit_distance;
pub(crate) use power::{stacked_norm, SearchOptions};

/// How a norm value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Maximum column norm over an ℓ_1 domain.
    ExactP1,
    /// Maximum dual row norm into a sup-norm codomain.
    ExactRowDual,
    /// Largest singular value.
    ExactSpectral,
    /// Multi-start nonlinear power iteration.
    PowerIteration,
    /// Dense sphere grid with local polish.
    BruteForce,
}

impl std::fmt::Display for NormMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NormMethod::ExactP1 => "exact_p1",
            NormMethod::ExactRowDual => "exact_row_dual",
            NormMethod::ExactSpectral => "exact_spectral",
            NormMethod::PowerIteration => "power_iteration",
            NormMethod::BruteForce => "brute_force",
        };
        f.write_str(s)
    }
}

/// A computed norm with its maximizers.
#[derive(Clone, Debug)]
pub struct NormResult {
    pub value: f64,
    /// Phase-normalized unit maximizers, one per orbit, best first.
    pub witnesses: Vec<Vector>,
    pub method: NormMethod,
    /// Largest `value - ‖Tx‖` over the witnesses.
    pub residual: f64,
    pub starts_used: usize,
    /// Heuristic: the witnesses describe every maximizing orbit.
    pub complete: bool,
}

impl NormResult {
    pub fn best_witness(&self) -> &Vector {
        &self.witnesses[0]
    }

    pub(crate) fn witness_entries(&self) -> Vec<Vec<C64>> {
        self.witnesses.iter().map(|w| w.entries().to_vec()).collect()
    }
}

/// `‖T‖` for a single operator.
pub fn operator_norm(t: &Operator, cfg: &Config) -> NormResult {
    stacked_norm(&StackedOperator::from_operator(t), cfg, &SearchOptions::default())
}

/// `‖𝒯‖` for the joint norm of a tuple.
pub fn tuple_norm(t: &OperatorTuple, cfg: &Config) -> NormResult {
    tuple_norm_with(t, cfg, &SearchOptions::default())
}

pub(crate) fn tuple_norm_with(t: &OperatorTuple, cfg: &Config, opts: &SearchOptions) -> NormResult {
    if t.d() > 1 && t.outer().is_infinite() && cfg.infty_fast_path {
        return attain::infty_tuple_norm(t, cfg, opts);
    }
    stacked_norm(&t.stacked(), cfg, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Exponent, LpSpace};
    use rand::{Rng, SeedableRng};

    fn l2() -> LpSpace {
        LpSpace::real(2, 2.0).unwrap()
    }

    fn golden() -> OperatorTuple {
        let t1 = Operator::real(&[&[0.5, 0.0], &[0.0, 1.0]], l2(), l2()).unwrap();
        let t2 = Operator::real(&[&[1.0, 0.0], &[0.0, 0.5]], l2(), l2()).unwrap();
        OperatorTuple::new(vec![t1, t2], Exponent::TWO).unwrap()
    }

    fn random_op(rng: &mut rand_chacha::ChaCha8Rng, n: usize, k: usize, p: f64, q: f64) -> Operator {
        let rows: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        Operator::real(&refs, LpSpace::real(n, p).unwrap(), LpSpace::real(k, q).unwrap()).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        let cfg = Config::default();
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let space = LpSpace::real(3, p).unwrap();
            let r = operator_norm(&Operator::identity(space), &cfg);
            assert!((r.value - 1.0).abs() < 1e-12, "p = {p}: {}", r.value);
            assert!(r.witnesses.iter().any(|w| (w.entries()[0].re - 1.0).abs() < 1e-9), "p = {p}");
        }
    }

    #[test]
    fn golden_components_and_tuple() {
        let cfg = Config::default();
        let g = golden();
        let r1 = operator_norm(g.component(0), &cfg);
        assert_eq!(r1.method, NormMethod::ExactSpectral);
        assert!((r1.value - 1.0).abs() < 1e-14);
        assert_eq!(r1.witnesses.len(), 1);
        assert!((r1.witnesses[0].entries()[1].re - 1.0).abs() < 1e-12);
        assert!(r1.complete);
        let r = tuple_norm(&g, &cfg);
        assert!((r.value - 1.25f64.sqrt()).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = [C64::new(h, 0.0), C64::new(h, 0.0)];
        assert!((g.stacked().image_norm(&x) - r.value).abs() < 1e-12);
        let j = joint_attainment_check(&g, &cfg);
        assert!(!j.nonempty, "{j:?}");
        assert!(j.margin < -0.2);
        let single = joint_attainment_check(&OperatorTuple::single(g.component(0).clone()), &cfg);
        assert!(single.nonempty);
    }

    #[test]
    fn sup_outer_takes_the_largest_component() {
        let cfg = Config::default();
        let comps = [1.0, 0.5, 0.25]
            .iter()
            .map(|&s| Operator::identity(l2()).scaled(C64::new(s, 0.0)))
            .collect();
        let t = OperatorTuple::new(comps, Exponent::Infinity).unwrap();
        assert!((tuple_norm(&t, &cfg).value - 1.0).abs() < 1e-14);
        assert!((tuple_norm(&t, &cfg.generic()).value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_identity_has_a_continuum_of_maximizers() {
        let set = attainment_set(&OperatorTuple::single(Operator::identity(l2())), &Config::default());
        assert!(!set.complete_flag);
        assert!(set.orbits() >= 2);
    }

    #[test]
    fn power_iteration_matches_the_oracle() {
        let cfg = Config::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let t = random_op(&mut rng, 2, 2, 3.0, 1.5);
            let r = operator_norm(&t, &cfg);
            assert_eq!(r.method, NormMethod::PowerIteration);
            let b = brute_force_norm(&OperatorTuple::single(t), 400).unwrap();
            assert!((r.value - b.value).abs() < 1e-5, "{} vs {}", r.value, b.value);
        }
        for _ in 0..10 {
            let t = random_op(&mut rng, 2, 2, 2.0, 2.0);
            let r = operator_norm(&t, &cfg);
            let b = brute_force_norm(&OperatorTuple::single(t), 400).unwrap();
            assert!((r.value - b.value).abs() < 1e-8, "{} vs {}", r.value, b.value);
        }
    }

    #[test]
    fn adjoint_has_the_same_norm() {
        let cfg = Config::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (p, q) in [(3.0, 1.5), (1.0, 4.0), (f64::INFINITY, 2.0), (1.5, 1.5)] {
            let t = random_op(&mut rng, 2, 2, p, q);
            let a = operator_norm(&t, &cfg).value;
            let b = operator_norm(&t.adjoint(), &cfg).value;
            assert!((a - b).abs() < 1e-7, "p={p} q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn too_large_for_the_oracle() {
        let t = OperatorTuple::single(Operator::identity(LpSpace::real(4, 2.0).unwrap()));
        assert!(matches!(brute_force_norm(&t, 10), Err(crate::Error::DimensionTooLarge { dim: 4 })));
    }
}
