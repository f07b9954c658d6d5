//! Dense operators between ℓ_p spaces, operator tuples and the nested
//! `ℓ_p^d(Y_k)` codomain norm.

use crate::error::{Error, Result};
use crate::spaces::{
    duality_map_slice, is_extreme_slice, lp_norm_slice, max_modulus, rho_slice, unit_ball_extremes,
    Exponent, Field, LpSpace, NormingFunctionalSet, Vector, C64, ZERO,
};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (yi, row) in y.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Transpose action `g_j = Σ_i a_ij f_i`: pulls a codomain functional back
    /// to the domain under the bilinear pairing.
    pub fn tmul_vec(&self, f: &[C64]) -> Vec<C64> {
        let mut g = vec![ZERO; self.cols];
        for (fi, row) in f.iter().zip(self.data.chunks_exact(self.cols.max(1))) {
            if fi.norm_sqr() == 0.0 {
                continue;
            }
            for (gj, a) in g.iter_mut().zip(row) {
                *gj += a * fi;
            }
        }
        g
    }

    pub fn conj_transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        Self { data: self.data.iter().map(|a| a * alpha).collect(), ..self.clone() }
    }

    /// `self - alpha * other`.
    pub fn sub_scaled(&self, alpha: C64, other: &Matrix) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - alpha * b).collect(),
            ..self.clone()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.norm_sqr() == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|a| a.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        max_modulus(&self.data)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Stack matrices with equal column counts.
    pub fn vstack(parts: &[&Matrix]) -> Result<Self> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::ShapeMismatch("vstack of matrices with different widths".into()));
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        let data = parts.iter().flat_map(|m| m.data.iter().copied()).collect();
        Ok(Self { rows, cols, data })
    }
}

/// A linear map `ℓ_p^n → ℓ_r^k` given by a dense `k × n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: Matrix,
    domain: LpSpace,
    codomain: LpSpace,
}

impl Operator {
    pub fn new(matrix: Matrix, domain: LpSpace, codomain: LpSpace) -> Result<Self> {
        if matrix.cols != domain.dim {
            return Err(Error::DimensionMismatch { expected: domain.dim, found: matrix.cols });
        }
        if matrix.rows != codomain.dim {
            return Err(Error::DimensionMismatch { expected: codomain.dim, found: matrix.rows });
        }
        if domain.field != codomain.field {
            return Err(Error::FieldMismatch("domain and codomain fields differ".into()));
        }
        if domain.field == Field::Real && !matrix.is_real() {
            return Err(Error::FieldMismatch("complex entry in a real operator".into()));
        }
        Ok(Self { matrix, domain, codomain })
    }

    /// Real operator from rows.
    pub fn real(rows: &[&[f64]], domain: LpSpace, codomain: LpSpace) -> Result<Self> {
        Self::new(Matrix::from_real_rows(rows)?, domain, codomain)
    }

    pub fn identity(space: LpSpace) -> Self {
        Self { matrix: Matrix::identity(space.dim), domain: space, codomain: space }
    }

    pub fn zero(domain: LpSpace, codomain: LpSpace) -> Self {
        Self { matrix: Matrix::zeros(codomain.dim, domain.dim), domain, codomain }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn domain(&self) -> LpSpace {
        self.domain
    }

    pub fn codomain(&self) -> LpSpace {
        self.codomain
    }

    pub fn field(&self) -> Field {
        self.domain.field
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.space().dim != self.domain.dim {
            return Err(Error::DimensionMismatch { expected: self.domain.dim, found: x.space().dim });
        }
        Ok(Vector::from_parts(self.codomain, self.matrix.mul_vec(x.entries())))
    }

    /// `‖Tx‖` for raw coordinates.
    pub fn image_norm(&self, x: &[C64]) -> f64 {
        lp_norm_slice(self.codomain.p, &self.matrix.mul_vec(x))
    }

    /// Conjugate transpose acting `ℓ_{r*}^k → ℓ_{p*}^n`.
    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: self.matrix.conj_transpose(),
            domain: self.codomain.dual(),
            codomain: self.domain.dual(),
        }
    }

    pub fn scaled(&self, alpha: C64) -> Operator {
        Operator { matrix: self.matrix.scaled(alpha), ..self.clone() }
    }

    /// `self - alpha * other`.
    pub fn sub_scaled(&self, alpha: C64, other: &Operator) -> Result<Operator> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::ShapeMismatch("operators act between different spaces".into()));
        }
        Ok(Operator { matrix: self.matrix.sub_scaled(alpha, &other.matrix)?, ..self.clone() })
    }
}

/// Free-function form of [`Operator::apply`].
pub fn apply(t: &Operator, x: &Vector) -> Result<Vector> {
    t.apply(x)
}

/// Free-function form of [`Operator::adjoint`].
pub fn adjoint(t: &Operator) -> Operator {
    t.adjoint()
}

/// Scalars `z` acting on a tuple as `z𝒮 = (z_1 S_1, …, z_d S_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalAction {
    pub z: Vec<C64>,
}

impl DiagonalAction {
    pub fn zeros(d: usize) -> Self {
        Self { z: vec![ZERO; d] }
    }

    pub fn real(z: &[f64]) -> Self {
        Self { z: z.iter().map(|&v| C64::new(v, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn norm_inf(&self) -> f64 {
        max_modulus(&self.z)
    }
}

/// `d` operators on a common domain with the joint norm
/// `‖𝒯x‖ = ‖(‖T_1x‖, …, ‖T_dx‖)‖_outer`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    components: Vec<Operator>,
    outer: Exponent,
}

impl OperatorTuple {
    pub fn new(components: Vec<Operator>, outer: Exponent) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyTuple)?;
        for (i, c) in components.iter().enumerate().skip(1) {
            if c.domain != first.domain {
                return Err(Error::ShapeMismatch(format!(
                    "component {i} has a different domain than component 0"
                )));
            }
        }
        Ok(Self { components, outer })
    }

    /// A one-component tuple; the outer exponent is immaterial for `d = 1`.
    pub fn single(op: Operator) -> Self {
        Self { components: vec![op], outer: Exponent::TWO }
    }

    pub fn components(&self) -> &[Operator] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Operator {
        &self.components[i]
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    pub fn outer(&self) -> Exponent {
        self.outer
    }

    pub fn with_outer(&self, outer: Exponent) -> Self {
        Self { components: self.components.clone(), outer }
    }

    pub fn domain(&self) -> LpSpace {
        self.components[0].domain
    }

    pub fn field(&self) -> Field {
        self.domain().field
    }

    pub fn codomain(&self) -> Codomain {
        Codomain::new(self.components.iter().map(|c| c.codomain).collect(), self.outer)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Operator::is_zero)
    }

    pub fn apply(&self, x: &Vector) -> Result<Vec<Vector>> {
        self.components.iter().map(|c| c.apply(x)).collect()
    }

    /// Block operator with the components stacked on top of each other.
    pub fn stacked(&self) -> StackedOperator {
        let parts: Vec<&Matrix> = self.components.iter().map(|c| &c.matrix).collect();
        StackedOperator {
            matrix: Matrix::vstack(&parts).expect("components share the domain"),
            domain: self.domain(),
            codomain: self.codomain(),
        }
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        Self { components: self.components.iter().map(|c| c.scaled(alpha)).collect(), outer: self.outer }
    }

    /// Componentwise `T_i - z_i S_i`.
    pub fn affine(&self, s: &OperatorTuple, z: &DiagonalAction) -> Result<Self> {
        if s.d() != self.d() || z.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: s.d().min(z.len()) });
        }
        let components = self
            .components
            .iter()
            .zip(&s.components)
            .zip(&z.z)
            .map(|((t, s), &zi)| t.sub_scaled(zi, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components, outer: self.outer })
    }

    /// `z𝒮 = (z_1 S_1, …, z_d S_d)`.
    pub fn diag_scaled(&self, z: &DiagonalAction) -> Result<Self> {
        if z.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: z.len() });
        }
        let components = self.components.iter().zip(&z.z).map(|(c, &zi)| c.scaled(zi)).collect();
        Ok(Self { components, outer: self.outer })
    }

    /// `𝒯 + t𝒮` for a scalar `t`.
    pub fn plus_scaled(&self, t: f64, s: &OperatorTuple) -> Result<Self> {
        self.affine(s, &DiagonalAction { z: vec![C64::new(-t, 0.0); self.d()] })
    }
}

/// `𝒯 − z𝒮`.
pub fn affine_tuple(t: &OperatorTuple, s: &OperatorTuple, z: &DiagonalAction) -> Result<OperatorTuple> {
    t.affine(s, z)
}

/// Componentwise application.
pub fn tuple_apply(t: &OperatorTuple, x: &Vector) -> Result<Vec<Vector>> {
    t.apply(x)
}

/// Outer ℓ_p norm of the component norms.
pub fn tuple_codomain_norm(values: &[Vector], outer: Exponent) -> f64 {
    let norms: Vec<C64> = values.iter().map(|v| C64::new(v.norm(), 0.0)).collect();
    lp_norm_slice(outer, &norms)
}

/// The direct sum `ℓ_outer^d(Y_1, …, Y_d)` on concatenated coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Codomain {
    blocks: Vec<LpSpace>,
    offsets: Vec<usize>,
    outer: Exponent,
}

/// `J(y)` in the nested space: outer weights combined with blockwise sets.
#[derive(Clone, Debug)]
pub struct NestedNorming {
    outer: NormingFunctionalSet,
    spaces: Vec<LpSpace>,
    blocks: Vec<Option<NormingFunctionalSet>>,
    weights: Vec<f64>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Codomain {
    pub fn new(blocks: Vec<LpSpace>, outer: Exponent) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for b in &blocks {
            acc += b.dim;
            offsets.push(acc);
        }
        Self { blocks, offsets, outer }
    }

    pub fn single(space: LpSpace) -> Self {
        Self::new(vec![space], Exponent::TWO)
    }

    pub fn blocks(&self) -> &[LpSpace] {
        &self.blocks
    }

    pub fn outer(&self) -> Exponent {
        self.outer
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn block<'a>(&self, y: &'a [C64], k: usize) -> &'a [C64] {
        &y[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn block_norms(&self, y: &[C64]) -> Vec<f64> {
        self.blocks.iter().enumerate().map(|(k, b)| lp_norm_slice(b.p, self.block(y, k))).collect()
    }

    pub fn norm(&self, y: &[C64]) -> f64 {
        if self.blocks.len() == 1 {
            return lp_norm_slice(self.blocks[0].p, y);
        }
        let a: Vec<C64> = self.block_norms(y).into_iter().map(|v| C64::new(v, 0.0)).collect();
        lp_norm_slice(self.outer, &a)
    }

    /// Every block, and the outer combination, use the sup norm.
    pub fn is_all_infinity(&self) -> bool {
        (self.blocks.len() == 1 || self.outer.is_infinite())
            && self.blocks.iter().all(|b| b.p.is_infinite())
    }

    /// Every block, and the outer combination, use the Euclidean norm.
    pub fn is_all_two(&self) -> bool {
        (self.blocks.len() == 1 || self.outer.is_two()) && self.blocks.iter().all(|b| b.p.is_two())
    }

    /// Norming set of a nonzero `y`.
    pub fn norming(&self, y: &[C64], cluster: f64) -> Result<NestedNorming> {
        let a = self.block_norms(y);
        let ac: Vec<C64> = a.iter().map(|&v| C64::new(v, 0.0)).collect();
        let outer_p = if self.blocks.len() == 1 { Exponent::TWO } else { self.outer };
        let outer = duality_map_slice(outer_p, Field::Real, &ac, cluster)?;
        // Zero blocks get weight zero; under an outer ℓ_1 this picks a
        // non-extreme member of J(y), which the closed-form derivatives avoid.
        let weights: Vec<f64> = outer.canonical().iter().zip(&a).map(|(w, &ak)| if ak > 0.0 { w.re } else { 0.0 }).collect();
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let yk = self.block(y, k);
                if a[k] == 0.0 {
                    None
                } else {
                    duality_map_slice(b.p, b.field, yk, cluster).ok()
                }
            })
            .collect();
        Ok(NestedNorming {
            outer,
            spaces: self.blocks.clone(),
            blocks,
            weights,
            offsets: self.offsets.clone(),
            dim: self.dim(),
        })
    }

    /// One-sided derivatives of the nested norm at `y` in direction `s`.
    pub fn rho(&self, y: &[C64], s: &[C64], cluster: f64) -> Result<(f64, f64)> {
        let a = self.block_norms(y);
        if a.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroVector);
        }
        let mut lo = Vec::with_capacity(a.len());
        let mut hi = Vec::with_capacity(a.len());
        for (k, b) in self.blocks.iter().enumerate() {
            let sk = self.block(s, k);
            if a[k] == 0.0 {
                let r = lp_norm_slice(b.p, sk);
                lo.push(C64::new(-r, 0.0));
                hi.push(C64::new(r, 0.0));
            } else {
                let (l, h) = rho_slice(b.p, b.field, self.block(y, k), sk, cluster)?;
                lo.push(C64::new(l, 0.0));
                hi.push(C64::new(h, 0.0));
            }
        }
        let ac: Vec<C64> = a.iter().map(|&v| C64::new(v, 0.0)).collect();
        let outer_p = if self.blocks.len() == 1 { Exponent::TWO } else { self.outer };
        let outer = duality_map_slice(outer_p, Field::Real, &ac, cluster)?;
        Ok((outer.inf_re(&lo), outer.sup_re(&hi)))
    }

    /// `f` is an extreme point of the unit ball of the dual
    /// `ℓ_{outer*}(Y_1*, …, Y_d*)`.
    pub fn is_dual_extreme(&self, f: &[C64], cluster: f64) -> bool {
        let b: Vec<f64> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, sp)| lp_norm_slice(sp.p.dual(), self.block(f, k)))
            .collect();
        let m = b.iter().copied().fold(0.0, f64::max);
        if m == 0.0 {
            return false;
        }
        let blocks_ok = self.blocks.iter().enumerate().all(|(k, sp)| {
            if b[k] <= cluster * m {
                return true;
            }
            let g: Vec<C64> = self.block(f, k).iter().map(|z| z / b[k]).collect();
            is_extreme_slice(sp.p.dual(), &g, cluster)
        });
        let outer_dual = if self.blocks.len() == 1 { Exponent::TWO } else { self.outer.dual() };
        let bc: Vec<C64> = b.iter().map(|&v| C64::new(v, 0.0)).collect();
        blocks_ok && is_extreme_slice(outer_dual, &bc, cluster)
    }

    pub fn is_smooth_point(&self, y: &[C64], cluster: f64) -> Result<bool> {
        let j = self.norming(y, cluster)?;
        Ok(j.is_singleton())
    }
}

impl NestedNorming {
    pub fn is_singleton(&self) -> bool {
        if !self.outer.is_singleton() {
            return false;
        }
        self.blocks
            .iter()
            .zip(&self.weights)
            .all(|(b, &w)| w == 0.0 || b.as_ref().is_some_and(NormingFunctionalSet::is_singleton))
    }

    fn assemble(&self, weights: &[f64], picks: &[Option<Vec<C64>>]) -> Vec<C64> {
        let mut f = vec![ZERO; self.dim];
        for (k, pick) in picks.iter().enumerate() {
            if let Some(g) = pick {
                let w = weights[k];
                for (slot, gi) in f[self.offsets[k]..self.offsets[k + 1]].iter_mut().zip(g) {
                    *slot = gi * w;
                }
            }
        }
        f
    }

    pub fn canonical(&self) -> Vec<C64> {
        let picks: Vec<Option<Vec<C64>>> = self
            .blocks
            .iter()
            .zip(&self.weights)
            .map(|(b, &w)| if w == 0.0 { None } else { b.as_ref().map(NormingFunctionalSet::canonical) })
            .collect();
        self.assemble(&self.weights, &picks)
    }

    /// Extreme norming functionals, at most `limit`.
    pub fn extreme_points(&self, limit: usize) -> Vec<Vec<C64>> {
        let limit = limit.max(1);
        let mut out: Vec<Vec<C64>> = Vec::new();
        for w in self.outer.extreme_points(limit) {
            let weights: Vec<f64> = w.iter().map(|wk| wk.re).collect();
            // a zero block under a free outer weight takes any extreme point
            // of its dual ball
            let choices: Vec<Vec<Option<Vec<C64>>>> = self
                .blocks
                .iter()
                .zip(&weights)
                .zip(&self.spaces)
                .map(|((b, &wk), sp)| match b {
                    _ if wk == 0.0 => vec![None],
                    Some(set) => set.extreme_points(limit).into_iter().map(Some).collect(),
                    None => unit_ball_extremes(sp.dual().p, sp.dim, limit).into_iter().map(Some).collect(),
                })
                .collect();
            let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
            for idx in odometer(&sizes, limit) {
                let picks: Vec<Option<Vec<C64>>> =
                    idx.iter().zip(&choices).map(|(&c, ch)| ch[c].clone()).collect();
                let f = self.assemble(&weights, &picks);
                if !out.contains(&f) {
                    out.push(f);
                }
                if out.len() >= limit {
                    return out;
                }
            }
        }
        out
    }
}

/// Mixed-radix counting over `sizes`, last position fastest, at most `limit`
/// tuples.
pub(crate) fn odometer(sizes: &[usize], limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if sizes.contains(&0) {
        return out;
    }
    let mut counter = vec![0usize; sizes.len()];
    loop {
        out.push(counter.clone());
        if out.len() >= limit {
            return out;
        }
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            counter[pos] += 1;
            if counter[pos] < sizes[pos] {
                break;
            }
            counter[pos] = 0;
        }
    }
}

/// A tuple flattened into one matrix with the nested codomain norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StackedOperator {
    pub matrix: Matrix,
    pub domain: LpSpace,
    pub codomain: Codomain,
}

impl StackedOperator {
    pub fn from_operator(op: &Operator) -> Self {
        Self { matrix: op.matrix.clone(), domain: op.domain, codomain: Codomain::single(op.codomain) }
    }

    /// `‖A x‖` in the nested codomain.
    pub fn image_norm(&self, x: &[C64]) -> f64 {
        self.codomain.norm(&self.matrix.mul_vec(x))
    }

    pub fn field(&self) -> Field {
        self.domain.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_t() -> (Operator, Operator) {
        let l2 = LpSpace::real(2, 2.0).unwrap();
        (
            Operator::real(&[&[0.5, 0.0], &[0.0, 1.0]], l2, l2).unwrap(),
            Operator::real(&[&[1.0, 0.0], &[0.0, 0.5]], l2, l2).unwrap(),
        )
    }

    #[test]
    fn apply_examples() {
        let l2 = LpSpace::real(2, 2.0).unwrap();
        let x = Vector::from_real(l2, &[1.0, 2.0]).unwrap();
        assert_eq!(Operator::identity(l2).apply(&x).unwrap(), x);
        let (t1, _) = golden_t();
        let y = t1.apply(&Vector::from_real(l2, &[2.0, 3.0]).unwrap()).unwrap();
        assert_eq!(y.re(), vec![1.0, 3.0]);
        assert!(Operator::zero(l2, l2).apply(&x).unwrap().is_zero());
        let l3 = LpSpace::real(3, 2.0).unwrap();
        let bad = Vector::from_real(l3, &[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(t1.apply(&bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tuple_apply_and_norm() {
        let (t1, t2) = golden_t();
        let tuple = OperatorTuple::new(vec![t1, t2], Exponent::TWO).unwrap();
        let l2 = tuple.domain();
        let vals = tuple.apply(&Vector::from_real(l2, &[1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(vals[0].re(), vec![0.5, 1.0]);
        assert_eq!(vals[1].re(), vec![1.0, 0.5]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let vals = tuple.apply(&Vector::from_real(l2, &[h, h]).unwrap()).unwrap();
        let n = tuple_codomain_norm(&vals, Exponent::TWO);
        assert!((n - 5f64.sqrt() / 2.0).abs() < 1e-15);
        // same arithmetic path through the stacked operator
        let stacked = tuple.stacked();
        assert!((stacked.image_norm(&[C64::new(h, 0.0), C64::new(h, 0.0)]) - n).abs() < 1e-15);
        let zero = Vector::from_real(l2, &[0.0, 0.0]).unwrap();
        assert_eq!(tuple_codomain_norm(&tuple.apply(&zero).unwrap(), Exponent::TWO), 0.0);
    }

    #[test]
    fn affine_examples() {
        let (t1, t2) = golden_t();
        let tuple = OperatorTuple::new(vec![t1.clone(), t2], Exponent::TWO).unwrap();
        assert_eq!(tuple.affine(&tuple, &DiagonalAction::zeros(2)).unwrap(), tuple);
        assert!(tuple.affine(&tuple, &DiagonalAction::real(&[1.0, 1.0])).unwrap().is_zero());
        let s = OperatorTuple::single(t1.clone());
        assert!(tuple.affine(&s, &DiagonalAction::zeros(2)).is_err());
    }

    #[test]
    fn adjoint_involution() {
        let l3 = LpSpace::complex(2, 3.0).unwrap();
        let l1 = LpSpace::complex(2, 1.0).unwrap();
        let m = Matrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(0.5, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let t = Operator::new(m, l3, l1).unwrap();
        let a = t.adjoint();
        assert_eq!(a.domain().p, Exponent::Infinity);
        assert_eq!(a.adjoint(), t);
        let r2 = LpSpace::real(2, 2.0).unwrap();
        let sym = Operator::real(&[&[1.0, 2.0], &[2.0, -1.0]], r2, r2).unwrap();
        assert_eq!(sym.adjoint(), sym);
        let bad = Matrix::from_rows(&[vec![C64::new(0.0, 1.0)]]).unwrap();
        let r1 = LpSpace::real(1, 2.0).unwrap();
        assert!(matches!(Operator::new(bad, r1, r1), Err(Error::FieldMismatch(_))));
    }

    #[test]
    fn nested_norming_functional() {
        let l1 = LpSpace::real(2, 1.0).unwrap();
        let linf = LpSpace::real(1, f64::INFINITY).unwrap();
        let cod = Codomain::new(vec![l1, linf], Exponent::new(3.0).unwrap());
        let y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-2.0, 0.0)];
        let j = cod.norming(&y, 1e-7).unwrap();
        for f in j.extreme_points(16) {
            let val = crate::spaces::pair(&f, &y).re;
            assert!((val - cod.norm(&y)).abs() < 1e-12);
        }
        assert!(!j.is_singleton());
        assert_eq!(j.extreme_points(16).len(), 2);
    }
}
