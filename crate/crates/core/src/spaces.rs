//! Finite-dimensional ℓ_p spaces over ℝ or ℂ.
//!
//! Functionals act bilinearly, `f(x) = Σ f_i x_i`, so the norming functional of
//! `x` in ℓ_p carries the conjugated phases of `x`. With that convention the
//! dual of ℓ_p is ℓ_q with the same coordinates and no conjugation anywhere
//! else in the crate.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Default relative tolerance for argmax ties and vanishing coordinates.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;
/// Default tolerance for unit-norm checks.
pub const DEFAULT_DUAL_TOL: f64 = 1e-9;

/// Scalar field of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Real dimension of one scalar.
    pub fn real_dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

/// A finite exponent strictly between 1 and ∞ together with its conjugate.
///
/// Both values are stored so that taking the dual twice returns the original
/// bits.
#[derive(Clone, Copy, Debug)]
pub struct FiniteExponent {
    p: f64,
    q: f64,
}

impl FiniteExponent {
    pub fn p(self) -> f64 {
        self.p
    }

    pub fn conjugate(self) -> f64 {
        self.q
    }
}

/// Hölder exponent in `[1, ∞]`. The endpoints are distinct variants so the
/// nonsmooth branches never depend on floating-point comparisons.
#[derive(Clone, Copy, Debug)]
pub enum Exponent {
    One,
    Finite(FiniteExponent),
    Infinity,
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Exponent::One, Exponent::One) | (Exponent::Infinity, Exponent::Infinity) => true,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.p == b.p,
            _ => false,
        }
    }
}

impl Exponent {
    pub const TWO: Exponent = Exponent::Finite(FiniteExponent { p: 2.0, q: 2.0 });

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(if p == 1.0 {
            Exponent::One
        } else if p.is_infinite() {
            Exponent::Infinity
        } else {
            Exponent::Finite(FiniteExponent { p, q: p / (p - 1.0) })
        })
    }

    /// The exponent as a float, `f64::INFINITY` for ∞.
    pub fn value(self) -> f64 {
        match self {
            Exponent::One => 1.0,
            Exponent::Finite(e) => e.p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Hölder conjugate.
    pub fn dual(self) -> Self {
        match self {
            Exponent::One => Exponent::Infinity,
            Exponent::Infinity => Exponent::One,
            Exponent::Finite(e) => Exponent::Finite(FiniteExponent { p: e.q, q: e.p }),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn is_one(self) -> bool {
        matches!(self, Exponent::One)
    }

    pub fn is_two(self) -> bool {
        matches!(self, Exponent::Finite(e) if e.p == 2.0)
    }
}

/// Hölder conjugate of `p`.
pub fn dual_exponent(p: Exponent) -> Exponent {
    p.dual()
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::One => f.write_str("1"),
            Exponent::Infinity => f.write_str("inf"),
            Exponent::Finite(e) => write!(f, "{}", e.p),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinity => s.serialize_str("inf"),
            other => s.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "Inf" | "infinity" => Ok(Exponent::Infinity),
                    other => Err(E::custom(format!("unknown exponent string {other:?}"))),
                }
            }
        }

        d.deserialize_any(ExponentVisitor)
    }
}

/// ℓ_p^n over a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSpace {
    pub dim: usize,
    pub p: Exponent,
    pub field: Field,
}

impl LpSpace {
    pub fn new(dim: usize, p: Exponent, field: Field) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self { dim, p, field })
    }

    pub fn real(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, Exponent::new(p)?, Field::Real)
    }

    pub fn complex(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, Exponent::new(p)?, Field::Complex)
    }

    /// The dual space ℓ_q^n.
    pub fn dual(self) -> Self {
        Self { p: self.p.dual(), ..self }
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        lp_norm_slice(self.p, x)
    }
}

/// An element of an [`LpSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    entries: Vec<C64>,
    space: LpSpace,
}

impl Vector {
    pub fn new(space: LpSpace, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != space.dim {
            return Err(Error::DimensionMismatch { expected: space.dim, found: entries.len() });
        }
        if space.field == Field::Real && entries.iter().any(|z| z.im != 0.0) {
            return Err(Error::FieldMismatch("complex entry in a real vector".into()));
        }
        Ok(Self { entries, space })
    }

    pub fn from_real(space: LpSpace, entries: &[f64]) -> Result<Self> {
        Self::new(space, entries.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub(crate) fn from_parts(space: LpSpace, entries: Vec<C64>) -> Self {
        debug_assert_eq!(entries.len(), space.dim);
        Self { entries, space }
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn space(&self) -> LpSpace {
        self.space
    }

    pub fn norm(&self) -> f64 {
        lp_norm(self)
    }

    /// Real parts; meaningful for real vectors.
    pub fn re(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.norm_sqr() == 0.0)
    }
}

/// Unimodular sign `z / |z|`, zero at zero.
pub fn sgn(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ZERO
    } else {
        z / r
    }
}

pub(crate) fn max_modulus(x: &[C64]) -> f64 {
    x.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// ℓ_p norm of a coordinate slice, scaled to avoid overflow.
pub fn lp_norm_slice(p: Exponent, x: &[C64]) -> f64 {
    match p {
        Exponent::One => x.iter().map(|z| z.norm()).sum(),
        Exponent::Infinity => max_modulus(x),
        Exponent::Finite(e) if e.p == 2.0 => {
            let m = max_modulus(x);
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            let s: f64 = x.iter().map(|z| (z / m).norm_sqr()).sum();
            m * s.sqrt()
        }
        Exponent::Finite(e) => {
            let m = max_modulus(x);
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            let s: f64 = x.iter().map(|z| (z.norm() / m).powf(e.p)).sum();
            m * s.powf(1.0 / e.p)
        }
    }
}

/// The ℓ_p norm of `v` in its own space.
pub fn lp_norm(v: &Vector) -> f64 {
    lp_norm_slice(v.space.p, &v.entries)
}

/// Description of the norming set `J(x)` of a nonzero vector.
#[derive(Clone, Debug, PartialEq)]
pub enum NormingFunctionalSet {
    /// `1 < p < ∞`: the single functional.
    Unique(Vec<C64>),
    /// `p = 1`: the phases `conj(sgn x_i)` on the support are fixed, the
    /// remaining coordinates (`None`) range freely over the closed unit disc;
    /// extreme points put a unimodular value there.
    SignPattern { signs: Vec<Option<C64>>, field: Field },
    /// `p = ∞`: extreme points are `conj(sgn x_k) e_k` over the argmax set.
    Selectors { dim: usize, selectors: Vec<(usize, C64)> },
}

/// Representative unimodular phases tried at free complex coordinates.
const FREE_PHASES: [C64; 4] =
    [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];

impl NormingFunctionalSet {
    pub fn is_singleton(&self) -> bool {
        match self {
            NormingFunctionalSet::Unique(_) => true,
            NormingFunctionalSet::SignPattern { signs, .. } => signs.iter().all(Option::is_some),
            NormingFunctionalSet::Selectors { selectors, .. } => selectors.len() == 1,
        }
    }

    /// The first extreme point in enumeration order.
    pub fn canonical(&self) -> Vec<C64> {
        match self {
            NormingFunctionalSet::Unique(f) => f.clone(),
            NormingFunctionalSet::SignPattern { signs, .. } => {
                signs.iter().map(|s| s.unwrap_or(ONE)).collect()
            }
            NormingFunctionalSet::Selectors { dim, selectors } => {
                let mut f = vec![ZERO; *dim];
                let (k, s) = selectors[0];
                f[k] = s;
                f
            }
        }
    }

    /// Extreme points of `J(x)`, at most `limit` of them, in lexicographic
    /// order of the free choices. Real sets are enumerated completely when
    /// they fit; complex free coordinates are sampled at four phases.
    pub fn extreme_points(&self, limit: usize) -> Vec<Vec<C64>> {
        let limit = limit.max(1);
        match self {
            NormingFunctionalSet::Unique(f) => vec![f.clone()],
            NormingFunctionalSet::Selectors { dim, selectors } => selectors
                .iter()
                .take(limit)
                .map(|&(k, s)| {
                    let mut f = vec![ZERO; *dim];
                    f[k] = s;
                    f
                })
                .collect(),
            NormingFunctionalSet::SignPattern { signs, field } => {
                let real_phases = [ONE, -ONE];
                let phases: &[C64] = match field {
                    Field::Real => &real_phases,
                    Field::Complex => &FREE_PHASES,
                };
                let free: Vec<usize> =
                    signs.iter().enumerate().filter(|(_, s)| s.is_none()).map(|(i, _)| i).collect();
                let mut out = Vec::new();
                let mut counter = vec![0usize; free.len()];
                loop {
                    let mut f: Vec<C64> = signs.iter().map(|s| s.unwrap_or(ZERO)).collect();
                    for (slot, &i) in free.iter().enumerate() {
                        f[i] = phases[counter[slot]];
                    }
                    out.push(f);
                    if out.len() >= limit {
                        break;
                    }
                    // odometer, last free coordinate fastest
                    let mut pos = free.len();
                    loop {
                        if pos == 0 {
                            return out;
                        }
                        pos -= 1;
                        counter[pos] += 1;
                        if counter[pos] < phases.len() {
                            break;
                        }
                        counter[pos] = 0;
                    }
                }
                out
            }
        }
    }

    /// `sup { Re f(y) : f ∈ J(x) }`.
    pub fn sup_re(&self, y: &[C64]) -> f64 {
        match self {
            NormingFunctionalSet::Unique(f) => pair(f, y).re,
            NormingFunctionalSet::SignPattern { signs, .. } => signs
                .iter()
                .zip(y)
                .map(|(s, yi)| match s {
                    Some(s) => (s * yi).re,
                    None => yi.norm(),
                })
                .sum(),
            NormingFunctionalSet::Selectors { selectors, .. } => selectors
                .iter()
                .map(|&(k, s)| (s * y[k]).re)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// `inf { Re f(y) : f ∈ J(x) }`.
    pub fn inf_re(&self, y: &[C64]) -> f64 {
        match self {
            NormingFunctionalSet::Unique(f) => pair(f, y).re,
            NormingFunctionalSet::SignPattern { signs, .. } => signs
                .iter()
                .zip(y)
                .map(|(s, yi)| match s {
                    Some(s) => (s * yi).re,
                    None => -yi.norm(),
                })
                .sum(),
            NormingFunctionalSet::Selectors { selectors, .. } => selectors
                .iter()
                .map(|&(k, s)| (s * y[k]).re)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Bilinear pairing `Σ f_i y_i`.
pub fn pair(f: &[C64], y: &[C64]) -> C64 {
    f.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Norming set of `x` in ℓ_p; `cluster` is the relative tolerance that decides
/// argmax ties and vanishing coordinates.
pub fn duality_map_slice(
    p: Exponent,
    field: Field,
    x: &[C64],
    cluster: f64,
) -> Result<NormingFunctionalSet> {
    let m = max_modulus(x);
    if m == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(match p {
        Exponent::Finite(e) => {
            let n = lp_norm_slice(p, x);
            let f = x
                .iter()
                .map(|z| {
                    let r = z.norm() / n;
                    if r == 0.0 {
                        ZERO
                    } else {
                        sgn(*z).conj() * r.powf(e.p - 1.0)
                    }
                })
                .collect();
            NormingFunctionalSet::Unique(f)
        }
        Exponent::One => NormingFunctionalSet::SignPattern {
            signs: x
                .iter()
                .map(|z| if z.norm() <= cluster * m { None } else { Some(sgn(*z).conj()) })
                .collect(),
            field,
        },
        Exponent::Infinity => NormingFunctionalSet::Selectors {
            dim: x.len(),
            selectors: x
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() >= m * (1.0 - cluster))
                .map(|(k, z)| (k, sgn(*z).conj()))
                .collect(),
        },
    })
}

/// Norming set `J(x)` of a nonzero vector.
pub fn duality_map(x: &Vector) -> Result<NormingFunctionalSet> {
    duality_map_slice(x.space.p, x.space.field, &x.entries, DEFAULT_CLUSTER_TOL)
}

/// `J(x)` is a singleton.
pub fn is_smooth_point(x: &Vector) -> Result<bool> {
    Ok(duality_map(x)?.is_singleton())
}

pub(crate) fn is_extreme_slice(p: Exponent, x: &[C64], cluster: f64) -> bool {
    match p {
        Exponent::Finite(_) => true,
        Exponent::One => {
            let m = max_modulus(x);
            x.iter().filter(|z| z.norm() > cluster * m).count() == 1
        }
        Exponent::Infinity => x.iter().all(|z| (z.norm() - 1.0).abs() <= cluster),
    }
}

/// Some real extreme points of the unit ball of ℓ_p^dim: signed coordinate
/// vectors, or sign vectors for p = ∞.
pub(crate) fn unit_ball_extremes(p: Exponent, dim: usize, limit: usize) -> Vec<Vec<C64>> {
    let mut out = Vec::new();
    if p.is_infinite() {
        for idx in crate::linops::odometer(&vec![2; dim], limit.max(1)) {
            out.push(idx.iter().map(|&b| if b == 0 { ONE } else { -ONE }).collect());
        }
    } else {
        for i in 0..dim {
            for s in [ONE, -ONE] {
                let mut e = vec![ZERO; dim];
                e[i] = s;
                out.push(e);
            }
        }
        out.truncate(limit.max(1));
    }
    out
}

/// Extreme point test for a unit vector of the closed unit ball.
pub fn is_extreme_point(x: &Vector) -> Result<bool> {
    let n = x.norm();
    if (n - 1.0).abs() > DEFAULT_DUAL_TOL {
        return Err(Error::NotUnitVector(n));
    }
    Ok(is_extreme_slice(x.space.p, &x.entries, DEFAULT_CLUSTER_TOL))
}

/// One-sided Gâteaux derivatives `(ρ₋, ρ₊)` of the norm at `x` in direction `y`,
/// in closed form over the extreme points of `J(x)`.
pub fn rho_vector(x: &Vector, y: &Vector) -> Result<(f64, f64)> {
    if x.space.dim != y.space.dim {
        return Err(Error::DimensionMismatch { expected: x.space.dim, found: y.space.dim });
    }
    rho_slice(x.space.p, x.space.field, &x.entries, &y.entries, DEFAULT_CLUSTER_TOL)
}

pub(crate) fn rho_slice(
    p: Exponent,
    field: Field,
    x: &[C64],
    y: &[C64],
    cluster: f64,
) -> Result<(f64, f64)> {
    let j = duality_map_slice(p, field, x, cluster)?;
    Ok((j.inf_re(y), j.sup_re(y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(space: LpSpace, v: &[f64]) -> Vector {
        Vector::from_real(space, v).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(real(LpSpace::real(2, 2.0).unwrap(), &[3.0, 4.0]).norm(), 5.0);
        assert_eq!(real(LpSpace::real(3, f64::INFINITY).unwrap(), &[1.0, -2.0, 3.0]).norm(), 3.0);
        let v = real(LpSpace::real(2, 1.5).unwrap(), &[1.0, 1.0]);
        assert!((v.norm() - 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn dual_exponents() {
        assert_eq!(Exponent::new(2.0).unwrap().dual(), Exponent::TWO);
        assert_eq!(Exponent::One.dual(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.dual(), Exponent::One);
        let q = Exponent::new(4.0).unwrap().dual();
        assert!((q.value() - 4.0 / 3.0).abs() < 1e-15);
        for p in [1.1, 1.7, 3.0, 4.0, 7.3, 123.456] {
            let e = Exponent::new(p).unwrap();
            assert_eq!(e.dual().dual().value().to_bits(), p.to_bits());
        }
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }

    #[test]
    fn exponent_serde() {
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(e, Exponent::Infinity);
        let e: Exponent = serde_json::from_str("3").unwrap();
        assert_eq!(e.value(), 3.0);
        assert_eq!(serde_json::to_string(&Exponent::Infinity).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Exponent::One).unwrap(), "1.0");
    }

    #[test]
    fn duality_map_examples() {
        let l2 = LpSpace::real(2, 2.0).unwrap();
        assert_eq!(duality_map(&real(l2, &[0.0, 1.0])).unwrap().canonical(), vec![ZERO, ONE]);

        let linf = LpSpace::real(2, f64::INFINITY).unwrap();
        let set = duality_map(&real(linf, &[1.0, 1.0])).unwrap();
        let ext = set.extreme_points(16);
        assert_eq!(ext, vec![vec![ONE, ZERO], vec![ZERO, ONE]]);

        let l1 = LpSpace::real(2, 1.0).unwrap();
        let set = duality_map(&real(l1, &[1.0, 0.0])).unwrap();
        assert_eq!(set.extreme_points(16), vec![vec![ONE, ONE], vec![ONE, -ONE]]);
    }

    #[test]
    fn zero_vector_is_an_error() {
        let l2 = LpSpace::real(2, 2.0).unwrap();
        let z = real(l2, &[0.0, 0.0]);
        assert_eq!(duality_map(&z), Err(Error::ZeroVector));
        assert_eq!(is_smooth_point(&z), Err(Error::ZeroVector));
        assert_eq!(rho_vector(&z, &z), Err(Error::ZeroVector));
    }

    #[test]
    fn smooth_and_extreme_points() {
        let l1 = LpSpace::real(2, 1.0).unwrap();
        let linf = LpSpace::real(2, f64::INFINITY).unwrap();
        let l2 = LpSpace::real(2, 2.0).unwrap();
        assert!(is_smooth_point(&real(l1, &[1.0, 2.0])).unwrap());
        assert!(!is_smooth_point(&real(linf, &[1.0, 1.0])).unwrap());
        assert!(!is_smooth_point(&real(l1, &[1.0, 0.0])).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(is_extreme_point(&real(l2, &[h, h])).unwrap());
        assert!(!is_extreme_point(&real(linf, &[1.0, 0.0])).unwrap());
        assert!(is_extreme_point(&real(linf, &[1.0, -1.0])).unwrap());
        assert_eq!(
            is_extreme_point(&real(l2, &[1.0, 1.0])),
            Err(Error::NotUnitVector(2f64.sqrt()))
        );
    }

    #[test]
    fn rho_examples() {
        let l1 = LpSpace::real(2, 1.0).unwrap();
        let linf = LpSpace::real(2, f64::INFINITY).unwrap();
        let l3 = LpSpace::real(3, 3.0).unwrap();
        let x = real(l3, &[1.0, -2.0, 0.5]);
        let (lo, hi) = rho_vector(&x, &x).unwrap();
        assert!((lo - x.norm()).abs() < 1e-12 && (hi - x.norm()).abs() < 1e-12);
        assert_eq!(
            rho_vector(&real(l1, &[1.0, 0.0]), &real(l1, &[0.0, 1.0])).unwrap(),
            (-1.0, 1.0)
        );
        assert_eq!(
            rho_vector(&real(linf, &[1.0, 1.0]), &real(linf, &[1.0, -1.0])).unwrap(),
            (-1.0, 1.0)
        );
    }

    #[test]
    fn complex_norming_functional() {
        let sp = LpSpace::complex(2, 3.0).unwrap();
        let x = Vector::new(sp, vec![C64::new(1.0, 1.0), C64::new(0.0, -2.0)]).unwrap();
        let f = duality_map(&x).unwrap().canonical();
        assert!((pair(&f, x.entries()) - C64::new(x.norm(), 0.0)).norm() < 1e-12);
        assert!((lp_norm_slice(sp.p.dual(), &f) - 1.0).abs() < 1e-12);
    }
}
