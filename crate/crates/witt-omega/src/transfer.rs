//! Polynomial laws over a finite field `k = F_q` and the transfers built from
//! them: exterior powers in one variable, the one-variable determinant, the
//! exterior transfer, the transfer law `T_(W,V)`, its divided-power version,
//! and the symbol-defined transfers between small Omega powers.
//!
//! Vector spaces are `k^d` with the standard basis. Subspaces are stored by a
//! reduced row echelon basis, and a subspace `W` is identified with `k^dim W`
//! through the pivot coordinates.

use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::Serialize;
use thiserror::Error;

use crate::chainring::{FieldSpec, GaloisRing, Gr};
use crate::gamma::{self, GammaError, GammaModule};
use crate::omega::{medium_frobenius, medium_verschiebung, OmegaError, SmallOmega};
use crate::poly::Poly;
use crate::wmodule::{ModuleError, ModuleMap, TorsionModule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("law of degree {degree} is above the degree guard {guard}")]
    DegreeGuard { degree: u64, guard: u64 },
    #[error("W must be a proper subspace")]
    NotProper,
    #[error("the exterior transfer needs m >= c, got m = {m}, c = {c}")]
    ExteriorDegree { m: usize, c: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not exactly divisible: {0}")]
    NotDivisible(String),
    #[error("the symbol formula is not linear: relation {relation:?} maps to a nonzero element")]
    Inconsistent { relation: Vec<(Vec<u64>, Vec<u64>)> },
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `|Gr_q(a, b)|`, the number of `a`-dimensional subspaces of `F_q^b`.
pub fn gaussian_binomial(q: u64, a: usize, b: usize) -> u64 {
    if a > b {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..a {
        num *= (q as u128).pow((b - i) as u32) - 1;
        den *= (q as u128).pow((i + 1) as u32) - 1;
    }
    (num / den) as u64
}

/// Increasing `m`-subsets of `0..d`, in lexicographic order.
pub fn subsets(d: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, m, &mut Vec::new(), &mut out);
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (perm, odd) in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            // moving the new element from the end to `pos` takes n-1-pos swaps
            out.push((p, odd ^ ((n - 1 - pos) % 2 == 1)));
        }
    }
    out
}

fn det_poly(ring: &GaloisRing, m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    let mut acc = Poly::zero(nvars);
    for (perm, odd) in permutations(n) {
        let mut t = Poly::constant(ring, ring.one(), nvars);
        for (i, &j) in perm.iter().enumerate() {
            t = t.mul(ring, &m[i][j]);
        }
        acc = if odd { acc.sub(ring, &t) } else { acc.add(ring, &t) };
    }
    acc
}

fn det_field(k: &GaloisRing, m: &[Vec<Gr>]) -> Gr {
    let n = m.len();
    let mut acc = Gr::ZERO;
    for (perm, odd) in permutations(n) {
        let t = perm.iter().enumerate().fold(k.one(), |t, (i, &j)| k.mul(t, m[i][j]));
        acc = if odd { k.sub(acc, t) } else { k.add(acc, t) };
    }
    acc
}

/// Reduced row echelon form; returns the nonzero rows and their pivots.
fn rref(k: &GaloisRing, rows: &[Vec<Gr>], cols: usize) -> (Vec<Vec<Gr>>, Vec<usize>) {
    let mut m: Vec<Vec<Gr>> = rows.iter().map(|r| r.iter().map(|&x| k.reduce(x)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, pr);
        let inv = k.inv(m[row][col]).expect("field");
        m[row] = m[row].iter().map(|&x| k.mul(x, inv)).collect();
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let c = m[i][col];
                let pivot_row = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = k.sub(*x, k.mul(c, *y));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

/// Inverse of a square matrix over the field.
fn inverse(k: &GaloisRing, m: &[Vec<Gr>]) -> Option<Vec<Vec<Gr>>> {
    let n = m.len();
    let aug: Vec<Vec<Gr>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { k.one() } else { Gr::ZERO }));
            row
        })
        .collect();
    let (red, piv) = rref(k, &aug, 2 * n);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A subspace of `k^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    pub field: FieldSpec,
    pub ambient: usize,
    /// Reduced row echelon basis.
    pub basis: Vec<Vec<Gr>>,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: FieldSpec, ambient: usize, gens: &[Vec<Gr>]) -> Self {
        let (basis, pivots) = rref(&field.field(), gens, ambient);
        Subspace { field, ambient, basis, pivots }
    }

    pub fn whole(field: FieldSpec, d: usize) -> Self {
        let k = field.field();
        let gens: Vec<Vec<Gr>> = (0..d).map(|i| unit_vector(&k, d, i)).collect();
        Self::new(field, d, &gens)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn contains(&self, v: &[Gr]) -> bool {
        let k = self.field.field();
        let mut rest: Vec<Gr> = v.iter().map(|&x| k.reduce(x)).collect();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = rest[p];
            if !c.is_zero() {
                for (x, y) in rest.iter_mut().zip(row) {
                    *x = k.sub(*x, k.mul(c, *y));
                }
            }
        }
        rest.iter().all(Gr::is_zero)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` (assumed inside) in the echelon basis.
    pub fn coords(&self, v: &[Gr]) -> Vec<Gr> {
        self.pivots.iter().map(|&p| v[p]).collect()
    }

    pub fn from_coords(&self, c: &[Gr]) -> Vec<Gr> {
        let k = self.field.field();
        let mut v = vec![Gr::ZERO; self.ambient];
        for (row, &a) in self.basis.iter().zip(c) {
            for (x, y) in v.iter_mut().zip(row) {
                *x = k.add(*x, k.mul(a, *y));
            }
        }
        v
    }

    pub fn points(&self) -> Vec<Vec<Gr>> {
        TorsionModule::vector_space(self.field, self.dim()).elements().iter().map(|c| self.from_coords(c)).collect()
    }

    /// Columns without a pivot; the unit vectors there span a complement.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Basis of the linear forms vanishing on the subspace.
    pub fn annihilator(&self) -> Vec<Vec<Gr>> {
        let k = self.field.field();
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut phi = vec![Gr::ZERO; self.ambient];
                phi[f] = k.one();
                for (row, &p) in self.basis.iter().zip(&self.pivots) {
                    phi[p] = k.neg(row[f]);
                }
                phi
            })
            .collect()
    }

    /// The inclusion `k^dim -> k^ambient`.
    pub fn inclusion(&self) -> LinearMap {
        let matrix = (0..self.ambient).map(|i| self.basis.iter().map(|b| b[i]).collect()).collect();
        LinearMap { field: self.field, source: self.dim(), target: self.ambient, matrix }
    }

    /// The projection `k^ambient -> k^ambient / W = k^codim`, in the
    /// coordinates of the complement spanned by the free columns.
    pub fn quotient(&self) -> LinearMap {
        let k = self.field.field();
        let free = self.free_columns();
        let matrix = free
            .iter()
            .map(|&f| {
                let mut row = vec![Gr::ZERO; self.ambient];
                row[f] = k.one();
                for (b, &p) in self.basis.iter().zip(&self.pivots) {
                    row[p] = k.sub(row[p], b[f]);
                }
                row
            })
            .collect();
        LinearMap { field: self.field, source: self.ambient, target: free.len(), matrix }
    }
}

fn unit_vector(k: &GaloisRing, d: usize, i: usize) -> Vec<Gr> {
    let mut v = vec![Gr::ZERO; d];
    v[i] = k.one();
    v
}

/// All `dim`-dimensional subspaces of `k^d`.
pub fn subspaces(field: FieldSpec, d: usize, dim: usize) -> Vec<Subspace> {
    let elems = field.elements();
    let k = field.field();
    let mut out = Vec::new();
    for piv in subsets(d, dim) {
        let slots: Vec<(usize, usize)> =
            piv.iter().enumerate().flat_map(|(i, &p)| ((p + 1)..d).filter(|c| !piv.contains(c)).map(move |c| (i, c))).collect();
        let total = (elems.len() as u64).pow(slots.len() as u32);
        for mut idx in 0..total {
            let mut basis: Vec<Vec<Gr>> = piv.iter().map(|&p| unit_vector(&k, d, p)).collect();
            for &(i, c) in &slots {
                basis[i][c] = elems[(idx % elems.len() as u64) as usize];
                idx /= elems.len() as u64;
            }
            out.push(Subspace { field, ambient: d, basis, pivots: piv.clone() });
        }
    }
    out
}

/// A `k`-linear map `k^source -> k^target`, stored as a `target x source`
/// matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub field: FieldSpec,
    pub source: usize,
    pub target: usize,
    pub matrix: Vec<Vec<Gr>>,
}

impl LinearMap {
    pub fn new(field: FieldSpec, source: usize, target: usize, matrix: Vec<Vec<Gr>>) -> Self {
        assert!(matrix.len() == target && matrix.iter().all(|r| r.len() == source));
        LinearMap { field, source, target, matrix }
    }

    pub fn identity(field: FieldSpec, d: usize) -> Self {
        let k = field.field();
        LinearMap::new(field, d, d, (0..d).map(|i| unit_vector(&k, d, i)).collect())
    }

    pub fn apply(&self, v: &[Gr]) -> Vec<Gr> {
        let k = self.field.field();
        self.matrix.iter().map(|row| row.iter().zip(v).fold(Gr::ZERO, |acc, (a, b)| k.add(acc, k.mul(*a, *b)))).collect()
    }

    /// `self o first`.
    pub fn compose(&self, first: &LinearMap) -> LinearMap {
        assert_eq!(first.target, self.source);
        let k = self.field.field();
        let matrix = (0..self.target)
            .map(|i| {
                (0..first.source)
                    .map(|j| (0..self.source).fold(Gr::ZERO, |acc, l| k.add(acc, k.mul(self.matrix[i][l], first.matrix[l][j]))))
                    .collect()
            })
            .collect();
        LinearMap::new(self.field, first.source, self.target, matrix)
    }

    pub fn kernel(&self) -> Subspace {
        let k = self.field.field();
        let (red, piv) = rref(&k, &self.matrix, self.source);
        let gens: Vec<Vec<Gr>> = (0..self.source)
            .filter(|c| !piv.contains(c))
            .map(|f| {
                let mut v = unit_vector(&k, self.source, f);
                for (row, &p) in red.iter().zip(&piv) {
                    v[p] = k.neg(row[f]);
                }
                v
            })
            .collect();
        Subspace::new(self.field, self.source, &gens)
    }

    pub fn image(&self) -> Subspace {
        let cols: Vec<Vec<Gr>> = (0..self.source).map(|j| self.matrix.iter().map(|r| r[j]).collect()).collect();
        Subspace::new(self.field, self.target, &cols)
    }

    pub fn rank(&self) -> usize {
        self.image().dim()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target
    }
}

/// A homogeneous polynomial law `k^source_dim -> k^coords.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyLaw {
    pub field: FieldSpec,
    pub source_dim: usize,
    pub degree: u64,
    pub coords: Vec<Poly>,
}

impl PolyLaw {
    pub fn new(field: FieldSpec, source_dim: usize, degree: u64, coords: Vec<Poly>) -> Result<Self, TransferError> {
        if coords.iter().any(|c| c.nvars != source_dim || !c.is_homogeneous(degree as u32)) {
            return Err(TransferError::Precondition(format!("coordinates are not homogeneous of degree {degree}")));
        }
        Ok(PolyLaw { field, source_dim, degree, coords })
    }

    pub fn target_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn linear(map: &LinearMap) -> Self {
        let k = map.field.field();
        let coords = map.matrix.iter().map(|row| Poly::linear(&k, row)).map(|p| pad(p, map.source)).collect();
        PolyLaw { field: map.field, source_dim: map.source, degree: 1, coords }
    }

    /// `v -> F^c(v)`, the `rc`-th power of the absolute Frobenius.
    pub fn frobenius(field: FieldSpec, d: usize, c: u32) -> Self {
        let k = field.field();
        let e = field.q().pow(c) as u32;
        let coords = (0..d)
            .map(|i| {
                let mut exp = vec![0; d];
                exp[i] = e;
                Poly::monomial(&k, exp, k.one())
            })
            .collect();
        PolyLaw { field, source_dim: d, degree: e as u64, coords }
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &PolyLaw) -> PolyLaw {
        let k = self.field.field();
        let coords = self.coords.iter().map(|c| pad(c.compose(&k, &inner.coords), inner.source_dim)).collect();
        PolyLaw { field: self.field, source_dim: inner.source_dim, degree: self.degree * inner.degree, coords }
    }

    pub fn add(&self, other: &PolyLaw) -> PolyLaw {
        let k = self.field.field();
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(&k, b)).collect();
        PolyLaw { field: self.field, source_dim: self.source_dim, degree: self.degree, coords }
    }

    /// Value at a point of `k'^source_dim` for an extension `k'` of `k`.
    pub fn eval(&self, ext: FieldSpec, point: &[Gr]) -> Result<Vec<Gr>, TransferError> {
        let embed = field_embedding(self.field, ext)?;
        let big = ext.field();
        Ok(self.coords.iter().map(|c| c.map_coeffs(&big, &embed).eval(&big, point)).collect())
    }
}

fn pad(mut p: Poly, nvars: usize) -> Poly {
    p.nvars = nvars;
    p
}

/// The embedding `F_q -> F_Q` sending the generator to a root of its
/// minimal polynomial.
pub fn field_embedding(small: FieldSpec, big: FieldSpec) -> Result<impl Fn(Gr) -> Gr, TransferError> {
    if small.p != big.p || !big.r.is_multiple_of(small.r) {
        return Err(TransferError::Precondition(format!("F_{} is not a subfield of F_{}", small.q(), big.q())));
    }
    let ks = small.field();
    let kb = big.field();
    let r = small.r;
    // x^r = sum c_i x^i in the small field
    let top = ks.coeffs(ks.pow(ks.gen(), r as u64));
    let alpha = big
        .elements()
        .into_iter()
        .find(|&a| {
            let rhs = (0..r).fold(Gr::ZERO, |acc, i| kb.add(acc, kb.mul(kb.from_int(top[i] as i64), kb.pow(a, i as u64))));
            kb.pow(a, r as u64) == rhs && (r == 1 || a != Gr::ZERO)
        })
        .expect("finite fields have all subfields");
    Ok(move |g: Gr| {
        let c = ks.coeffs(ks.reduce(g));
        (0..r).fold(Gr::ZERO, |acc, i| kb.add(acc, kb.mul(kb.from_int(c[i] as i64), kb.pow(alpha, i as u64))))
    })
}

/// Law constructions over one field, with a guard on the degree.
#[derive(Clone, Copy, Debug)]
pub struct Laws {
    pub field: FieldSpec,
    pub max_degree: u64,
}

impl Laws {
    /// The default guard rejects laws of degree above `q^3`.
    pub fn new(field: FieldSpec) -> Self {
        Laws { field, max_degree: field.q().pow(3) }
    }

    pub fn with_max_degree(self, max_degree: u64) -> Self {
        Laws { max_degree, ..self }
    }

    fn guard(&self, degree: u64) -> Result<(), TransferError> {
        if degree > self.max_degree {
            return Err(TransferError::DegreeGuard { degree, guard: self.max_degree });
        }
        Ok(())
    }

    fn k(&self) -> GaloisRing {
        self.field.field()
    }

    /// `v -> F^(s_0)(v) ^ ... ^ F^(s_(m-1))(v)` in `Lambda^m(k^d)`, with the
    /// basis `e_J` of increasing subsets in lexicographic order.
    pub fn lambda_one_var(&self, d: usize, s: &[u32]) -> Result<PolyLaw, TransferError> {
        if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&x| x as usize > d) {
            return Err(TransferError::Precondition("S must be an increasing subset of 0..=d".into()));
        }
        let q = self.field.q();
        let degree: u64 = s.iter().map(|&x| q.pow(x)).sum();
        self.guard(degree)?;
        let k = self.k();
        let coords = subsets(d, s.len())
            .into_iter()
            .map(|cols| {
                let m: Vec<Vec<Poly>> = s
                    .iter()
                    .map(|&si| {
                        cols.iter()
                            .map(|&j| {
                                let mut e = vec![0; d];
                                e[j] = q.pow(si) as u32;
                                Poly::monomial(&k, e, k.one())
                            })
                            .collect()
                    })
                    .collect();
                det_poly(&k, &m, d)
            })
            .collect();
        PolyLaw::new(self.field, d, degree, coords)
    }

    /// `det^1 = lambda^d`, into `Det(k^d) = k`.
    pub fn det_one(&self, d: usize) -> Result<PolyLaw, TransferError> {
        let s: Vec<u32> = (0..d as u32).collect();
        self.lambda_one_var(d, &s)
    }

    /// The product of one normalised linear form per rational hyperplane.
    pub fn product_of_forms(&self, d: usize) -> Poly {
        let k = self.k();
        let mut acc = Poly::constant(&k, k.one(), d);
        for h in subspaces(self.field, d, d - 1) {
            let phi = &h.annihilator()[0];
            acc = acc.mul(&k, &Poly::linear(&k, phi));
        }
        acc
    }

    /// The scalar `theta` with `det^1 = theta * product_of_forms`, found by
    /// exact division.
    pub fn det_one_scalar(&self, d: usize) -> Result<Gr, TransferError> {
        let k = self.k();
        let det = self.det_one(d)?;
        let q = det.coords[0]
            .div_exact(&k, &self.product_of_forms(d))
            .ok_or_else(|| TransferError::NotDivisible("det^1 by the product of forms".into()))?;
        match (q.degree(), q.terms.len()) {
            (Some(0), 1) => Ok(q.coeff(&vec![0; d])),
            _ => Err(TransferError::NotDivisible("quotient is not a constant".into())),
        }
    }

    /// Codimension-one transfer `H -> H'` in ambient coordinates:
    /// `v -> F(v) - pi(v)^(q-1) v` with `pi` vanishing on `H'` but not on `H`.
    fn hyperplane_step(&self, big: &Subspace, small: &Subspace) -> Vec<Poly> {
        let k = self.k();
        let d = big.ambient;
        let q = self.field.q();
        let phi =
            small.annihilator().into_iter().find(|phi| big.basis.iter().any(|b| !dot(&k, phi, b).is_zero())).expect("proper hyperplane");
        let pi = Poly::linear(&k, &phi);
        let scale = pi.pow(&k, q - 1);
        (0..d)
            .map(|i| {
                let mut e = vec![0; d];
                e[i] = q as u32;
                let f = Poly::monomial(&k, e, k.one());
                f.sub(&k, &scale.mul(&k, &Poly::var(&k, i, d)))
            })
            .collect()
    }

    /// All complete flags `k^d = H_0 > H_1 > ... > H_c = W`.
    pub fn flags(&self, w: &Subspace) -> Vec<Vec<Subspace>> {
        let d = w.ambient;
        let mut out = vec![vec![Subspace::whole(self.field, d)]];
        for step in 1..=w.codim() {
            let dim = d - step;
            let candidates: Vec<Subspace> = subspaces(self.field, d, dim).into_iter().filter(|h| h.contains_space(w)).collect();
            out = out
                .into_iter()
                .flat_map(|flag| {
                    let last = flag.last().unwrap().clone();
                    candidates
                        .iter()
                        .filter(move |h| last.contains_space(h))
                        .map(|h| {
                            let mut f = flag.clone();
                            f.push(h.clone());
                            f
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out
    }

    /// The transfer `k^d -> W` obtained by composing hyperplane transfers
    /// along the flag; values in the echelon coordinates of `W`.
    pub fn transfer_along(&self, flag: &[Subspace]) -> Result<PolyLaw, TransferError> {
        let w = flag.last().ok_or(TransferError::NotProper)?;
        let c = w.codim();
        if c == 0 {
            return Err(TransferError::NotProper);
        }
        let degree = self.field.q().pow(c as u32);
        self.guard(degree)?;
        let k = self.k();
        let d = w.ambient;
        let mut law: Vec<Poly> = (0..d).map(|i| Poly::var(&k, i, d)).collect();
        for pair in flag.windows(2) {
            let step = self.hyperplane_step(&pair[0], &pair[1]);
            law = step.iter().map(|s| pad(s.compose(&k, &law), d)).collect();
        }
        let coords = w.pivots.iter().map(|&p| law[p].clone()).collect();
        PolyLaw::new(self.field, d, degree, coords)
    }

    pub fn transfer_law(&self, w: &Subspace) -> Result<PolyLaw, TransferError> {
        let flag = self.flags(w).into_iter().next().ok_or(TransferError::NotProper)?;
        self.transfer_along(&flag)
    }

    /// Change of basis to `(u_1, .., u_c, w_1, .., w_(d-c))`, where
    /// `u_i = e_(f_i) + sum_j shift[i][j] w_j` for the free columns `f_i`.
    fn adapted_inverse(&self, w: &Subspace, shift: Option<&[Vec<Gr>]>) -> Vec<Vec<Gr>> {
        let k = self.k();
        let d = w.ambient;
        let free = w.free_columns();
        let mut cols: Vec<Vec<Gr>> = Vec::new();
        for (i, &f) in free.iter().enumerate() {
            let mut u = unit_vector(&k, d, f);
            if let Some(t) = shift {
                for (j, b) in w.basis.iter().enumerate() {
                    for (x, y) in u.iter_mut().zip(b) {
                        *x = k.add(*x, k.mul(t[i][j], *y));
                    }
                }
            }
            cols.push(u);
        }
        cols.extend(w.basis.iter().cloned());
        let m: Vec<Vec<Gr>> = (0..d).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        inverse(&k, &m).expect("adapted basis")
    }

    /// `lambda T^m: Lambda^m(k^d) -> Det(V/W) (x) Lambda^(m-c)(W)`, with
    /// `Det(V/W)` trivialised by the images of the free unit vectors. The
    /// optional `shift` changes the retraction onto `W`.
    pub fn exterior_transfer(&self, w: &Subspace, m: usize, shift: Option<&[Vec<Gr>]>) -> Result<LinearMap, TransferError> {
        let c = w.codim();
        if m < c {
            return Err(TransferError::ExteriorDegree { m, c });
        }
        let k = self.k();
        let d = w.ambient;
        let inv = self.adapted_inverse(w, shift);
        let src = subsets(d, m);
        let tgt = subsets(d - c, m - c);
        let mut matrix = vec![vec![Gr::ZERO; src.len()]; tgt.len()];
        for (col, jset) in src.iter().enumerate() {
            // coordinates of e_j in the adapted basis
            let vecs: Vec<Vec<Gr>> = jset.iter().map(|&j| inv.iter().map(|row| row[j]).collect()).collect();
            for iset in subsets(m, c) {
                let rest: Vec<usize> = (0..m).filter(|x| !iset.contains(x)).collect();
                let sign_odd = iset.iter().enumerate().map(|(t, &i)| i - t).sum::<usize>() % 2 == 1;
                let a: Vec<Vec<Gr>> = iset.iter().map(|&i| vecs[i][..c].to_vec()).collect();
                let da = det_field(&k, &a);
                if da.is_zero() {
                    continue;
                }
                for (row, kset) in tgt.iter().enumerate() {
                    let b: Vec<Vec<Gr>> = rest.iter().map(|&j| kset.iter().map(|&x| vecs[j][c + x]).collect()).collect();
                    let t = k.mul(da, det_field(&k, &b));
                    matrix[row][col] = if sign_odd { k.sub(matrix[row][col], t) } else { k.add(matrix[row][col], t) };
                }
            }
        }
        Ok(LinearMap::new(self.field, src.len(), tgt.len(), matrix))
    }

    /// The transfer from its defining identity
    /// `lambda T^(c+1) o lambda^(c+1) = (det^1 o pi) (x) T`, by exact division.
    pub fn transfer_by_division(&self, w: &Subspace) -> Result<PolyLaw, TransferError> {
        let c = w.codim();
        if c == 0 {
            return Err(TransferError::NotProper);
        }
        let k = self.k();
        let d = w.ambient;
        let s: Vec<u32> = (0..=c as u32).collect();
        let lam = self.lambda_one_var(d, &s)?;
        let ext = self.exterior_transfer(w, c + 1, None)?;
        let inv = self.adapted_inverse(w, None);
        let pi = LinearMap::new(self.field, d, c, inv[..c].to_vec());
        let divisor = self.det_one(c)?.compose(&PolyLaw::linear(&pi)).coords.remove(0);
        let mut coords = Vec::new();
        for row in &ext.matrix {
            let mut num = Poly::zero(d);
            for (a, p) in row.iter().zip(&lam.coords) {
                num = num.add(&k, &p.scale(&k, *a));
            }
            let quot = num.div_exact(&k, &divisor).ok_or_else(|| TransferError::NotDivisible("exterior transfer by det^1 o pi".into()))?;
            coords.push(pad(quot, d));
        }
        PolyLaw::new(self.field, d, self.field.q().pow(c as u32), coords)
    }

    /// `Gamma T^n: Gamma^(p^(n + rc))(V) -> Gamma^(p^n)(W)`, the linear map of
    /// the law `v -> [T(v)]_(p^n)`.
    pub fn gamma_transfer(&self, w: &Subspace, n: u32) -> Result<ModuleMap, TransferError> {
        let t = self.transfer_law(w)?;
        self.gamma_of_law(&t, n)
    }

    /// The linear map `Gamma^(deg p^n)(k^d) -> Gamma^(p^n)(k^e)` of
    /// `v -> [L(v)]_(p^n)`.
    pub fn gamma_of_law(&self, law: &PolyLaw, n: u32) -> Result<ModuleMap, TransferError> {
        let p = self.field.p;
        let degree = law.degree * p.pow(n);
        self.guard(degree)?;
        let src = GammaModule::new(&TorsionModule::vector_space(self.field, law.source_dim), degree as u32)?;
        let tgt = GammaModule::new(&TorsionModule::vector_space(self.field, law.target_dim()), p.pow(n) as u32)?;
        let coeffs = tgt.symbol_poly(&law.coords);
        Ok(gamma::law_coefficients(&src, &tgt.module, &coeffs)?)
    }
}

fn dot(k: &GaloisRing, a: &[Gr], b: &[Gr]) -> Gr {
    a.iter().zip(b).fold(Gr::ZERO, |acc, (x, y)| k.add(acc, k.mul(*x, *y)))
}

/// Report for the polynomial-law checks on one `(q, d, c)`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LawReport {
    pub q: u64,
    pub d: usize,
    pub c: usize,
    pub subspaces: usize,
    pub flag_independent: bool,
    pub division_agrees: bool,
    pub restriction_is_frobenius: bool,
    pub cocycle: bool,
    pub integral_formula: bool,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.flag_independent && self.division_agrees && self.restriction_is_frobenius && self.cocycle && self.integral_formula
    }
}

/// All law-level transfer identities for codimension `c` in `k^d`.
pub fn check_transfer_laws(laws: &Laws, d: usize, c: usize) -> Result<LawReport, TransferError> {
    if c == 0 || c >= d {
        return Err(TransferError::Precondition(format!("need 1 <= c <= d - 1, got c = {c}, d = {d}")));
    }
    let field = laws.field;
    let spaces = subspaces(field, d, d - c);
    let mut flag_independent = true;
    let mut division_agrees = true;
    let mut restriction_is_frobenius = true;
    let mut cocycle = true;
    let mut total: Option<PolyLaw> = None;
    for w in &spaces {
        let flags = laws.flags(w);
        let t = laws.transfer_along(&flags[0])?;
        for f in &flags[1..] {
            flag_independent &= laws.transfer_along(f)? == t;
        }
        division_agrees &= laws.transfer_by_division(w)? == t;
        let incl = PolyLaw::linear(&w.inclusion());
        restriction_is_frobenius &= t.compose(&incl) == PolyLaw::frobenius(field, d - c, c as u32);
        // T_(Z,W) o T_(W,V) = T_(Z,V) for every hyperplane Z of W
        if d - c >= 1 {
            for z_coords in subspaces(field, d - c, d - c - 1) {
                let z_in_w = z_coords.clone();
                let t_zw = laws.transfer_law(&z_in_w)?;
                let z_ambient = Subspace::new(field, d, &z_in_w.basis.iter().map(|b| w.from_coords(b)).collect::<Vec<_>>());
                if z_ambient.dim() == 0 {
                    continue;
                }
                let t_zv = laws.transfer_law(&z_ambient)?;
                // express Z_in_W coordinates in the echelon coordinates of Z
                let conv = LinearMap::new(
                    field,
                    z_in_w.dim(),
                    z_ambient.dim(),
                    (0..z_ambient.dim())
                        .map(|i| {
                            (0..z_in_w.dim())
                                .map(|j| {
                                    let amb = w.from_coords(&z_in_w.basis[j]);
                                    z_ambient.coords(&amb)[i]
                                })
                                .collect()
                        })
                        .collect(),
                );
                let lhs = PolyLaw::linear(&conv).compose(&t_zw).compose(&t);
                cocycle &= lhs.coords == t_zv.coords;
            }
        }
        let pushed = PolyLaw::linear(&w.inclusion()).compose(&t);
        total = Some(match total {
            None => pushed,
            Some(acc) => acc.add(&pushed),
        });
    }
    let integral_formula = total.is_some_and(|t| t.coords == PolyLaw::frobenius(field, d, c as u32).coords);
    Ok(LawReport {
        q: field.q(),
        d,
        c,
        subspaces: spaces.len(),
        flag_independent,
        division_agrees,
        restriction_is_frobenius,
        cocycle,
        integral_formula,
    })
}

/// Small Omega power of `k^d` together with its enumerated symbols.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    pub field: FieldSpec,
    pub dim: usize,
    pub exponent: u32,
    pub small: SmallOmega,
    pub points: Vec<Vec<Gr>>,
    pub symbols: Vec<Vec<Gr>>,
    index: HashMap<Vec<Gr>, usize>,
}

type TableKey = (FieldSpec, usize, u32);
static TABLES: Lazy<RwLock<HashMap<TableKey, Arc<SymbolTable>>>> = Lazy::new(|| RwLock::new(HashMap::new()));

impl SymbolTable {
    /// Cached.
    pub fn get(field: FieldSpec, dim: usize, exponent: u32) -> Result<Arc<SymbolTable>, TransferError> {
        if let Some(t) = TABLES.read().get(&(field, dim, exponent)) {
            return Ok(t.clone());
        }
        let base = TorsionModule::vector_space(field, dim);
        let small = SmallOmega::new(&base, exponent)?;
        let points = base.elements();
        let symbols: Vec<Vec<Gr>> = points.iter().map(|x| small.medium.symbol(x)).collect();
        let index = points.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        let t = Arc::new(SymbolTable { field, dim, exponent, small, points, symbols, index });
        TABLES.write().insert((field, dim, exponent), t.clone());
        Ok(t)
    }

    pub fn module(&self) -> &TorsionModule {
        &self.small.medium.module
    }

    pub fn ring(&self) -> GaloisRing {
        self.module().ring()
    }

    pub fn index_of(&self, v: &[Gr]) -> usize {
        let k = self.field.field();
        let key: Vec<Gr> = v.iter().map(|&x| k.reduce(x)).collect();
        self.index[&key]
    }

    pub fn combine(&self, terms: &[(usize, Gr)]) -> Vec<Gr> {
        let m = self.module();
        let ring = self.ring();
        let mut acc = m.zero();
        for &(i, c) in terms {
            acc = m.add(&acc, &m.scale(ring.reduce(c), &self.symbols[i]));
        }
        acc
    }
}

/// A linear map between small Omega powers, given by its values on the
/// symbols of the source points.
#[derive(Clone, Debug)]
pub struct SymbolMap {
    pub source: Arc<SymbolTable>,
    pub target: Arc<SymbolTable>,
    /// Values as combinations of target symbols, when known.
    pub combos: Option<Vec<Vec<(usize, Gr)>>>,
    /// Values in the coordinates of the medium power containing the target.
    pub images: Vec<Vec<Gr>>,
}

impl SymbolMap {
    /// Builds the map from a formula on symbols and certifies that it is
    /// well defined.
    pub fn from_formula(
        source: Arc<SymbolTable>,
        target: Arc<SymbolTable>,
        formula: impl Fn(&[Gr]) -> Vec<(usize, Gr)>,
    ) -> Result<Self, TransferError> {
        let combos: Vec<Vec<(usize, Gr)>> = source.points.iter().map(|x| formula(x)).collect();
        let images = combos.iter().map(|c| target.combine(c)).collect();
        let map = SymbolMap { source, target, combos: Some(combos), images };
        map.certify()?;
        Ok(map)
    }

    /// From a linear map on medium powers defined on the whole source.
    pub fn from_medium(source: Arc<SymbolTable>, target: Arc<SymbolTable>, f: &ModuleMap) -> Self {
        let images = source.symbols.iter().map(|s| f.apply(s)).collect();
        SymbolMap { source, target, combos: None, images }
    }

    /// Every relation between source symbols is sent to zero. Relations are
    /// computed over `W_L(k)` with `L` the larger of the two levels.
    pub fn certify(&self) -> Result<(), TransferError> {
        let src = self.source.module();
        let tgt = self.target.module();
        let level = src.m.max(tgt.m);
        let field = src.field;
        let n = self.images.len();
        let free = TorsionModule::free(field, level, n);
        let src_l = src.raised(level);
        let mut both_w = src_l.weights.clone();
        both_w.extend(tgt.raised(level).weights);
        let both = TorsionModule::new(field, level, both_w)?;
        let first = ModuleMap::new(free.clone(), src_l, self.source.symbols.clone())?;
        let joined: Vec<Vec<Gr>> =
            self.source.symbols.iter().zip(&self.images).map(|(a, b)| a.iter().chain(b).copied().collect()).collect();
        let whole = ModuleMap::new(free, both, joined)?;
        let k1 = first.kernel();
        let k2 = whole.kernel();
        if k1.log_card() == k2.log_card() {
            return Ok(());
        }
        let ring = field.ring(level);
        let witness = k1
            .generators()
            .into_iter()
            .find(|g| !k2.contains(g))
            .unwrap_or_default()
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let pt = self.source.points[i].iter().map(|x| field.field().index_of(*x)).collect();
                (pt, ring.coeffs(c))
            })
            .collect();
        Err(TransferError::Inconsistent { relation: witness })
    }

    /// `self o first`.
    pub fn compose(&self, first: &SymbolMap) -> SymbolMap {
        assert_eq!(first.target.exponent, self.source.exponent);
        assert_eq!(first.target.dim, self.source.dim);
        let ring = self.target.ring();
        match (&first.combos, &self.combos) {
            (Some(fc), Some(sc)) => {
                let combos: Vec<Vec<(usize, Gr)>> = fc
                    .iter()
                    .map(|terms| {
                        let mut out: Vec<(usize, Gr)> = Vec::new();
                        for &(y, c) in terms {
                            for &(z, d) in &sc[y] {
                                out.push((z, ring.mul(ring.reduce(c), ring.reduce(d))));
                            }
                        }
                        out
                    })
                    .collect();
                let images = combos.iter().map(|c| self.target.combine(c)).collect();
                SymbolMap { source: first.source.clone(), target: self.target.clone(), combos: Some(combos), images }
            }
            (Some(fc), None) => {
                // expand through the symbol images of self
                let m = self.target.module();
                let images = fc
                    .iter()
                    .map(|terms| terms.iter().fold(m.zero(), |acc, &(y, c)| m.add(&acc, &m.scale(ring.reduce(c), &self.images[y]))))
                    .collect();
                SymbolMap { source: first.source.clone(), target: self.target.clone(), combos: None, images }
            }
            _ => panic!("composition needs the first map as a symbol formula"),
        }
    }

    pub fn add(&self, other: &SymbolMap) -> SymbolMap {
        let m = self.target.module();
        let images = self.images.iter().zip(&other.images).map(|(a, b)| m.add(a, b)).collect();
        let combos = match (&self.combos, &other.combos) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x.iter().chain(y).copied().collect()).collect()),
            _ => None,
        };
        SymbolMap { source: self.source.clone(), target: self.target.clone(), combos, images }
    }

    pub fn scale(&self, c: Gr) -> SymbolMap {
        let m = self.target.module();
        let ring = self.target.ring();
        let images = self.images.iter().map(|x| m.scale(ring.reduce(c), x)).collect();
        let combos = self
            .combos
            .as_ref()
            .map(|cs| cs.iter().map(|t| t.iter().map(|&(i, d)| (i, ring.mul(ring.reduce(c), ring.reduce(d)))).collect()).collect());
        SymbolMap { source: self.source.clone(), target: self.target.clone(), combos, images }
    }

    /// Same values on every source symbol.
    pub fn same_as(&self, other: &SymbolMap) -> bool {
        let m = self.target.module();
        self.images.len() == other.images.len() && self.images.iter().zip(&other.images).all(|(a, b)| m.reduce(a) == m.reduce(b))
    }
}

fn delta(field: FieldSpec, dim: usize) -> u32 {
    (field.r * dim) as u32
}

/// `Omega_^s(f): (x)_s -> (f(x))_s`.
pub fn small_functor(f: &LinearMap, exponent: u32) -> Result<SymbolMap, TransferError> {
    let src = SymbolTable::get(f.field, f.source, exponent)?;
    let tgt = SymbolTable::get(f.field, f.target, exponent)?;
    let one = tgt.ring().one();
    let t2 = tgt.clone();
    SymbolMap::from_formula(src, tgt, |x| vec![(t2.index_of(&f.apply(x)), one)])
}

/// The transfer `T(f): Omega_^s(W) -> Omega_^(s + r(dim V - dim W))(V)` for
/// `f: V -> W`, `(w) -> -X_f + sum over f(v) = w of (v)`.
pub fn transfer_with(f: &LinearMap, source_exponent: u32) -> Result<SymbolMap, TransferError> {
    let shift = delta(f.field, f.source) as i64 - delta(f.field, f.target) as i64;
    let target_exponent = source_exponent as i64 + shift;
    if source_exponent < 1 || target_exponent < 1 {
        return Err(TransferError::Precondition("transfer exponents must be positive".into()));
    }
    let src = SymbolTable::get(f.field, f.target, source_exponent)?;
    let tgt = SymbolTable::get(f.field, f.source, target_exponent as u32)?;
    let ring = tgt.ring();
    let (one, minus_one) = (ring.one(), ring.neg(ring.one()));
    let mut fibres: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, v) in tgt.points.iter().enumerate() {
        fibres.entry(src.index_of(&f.apply(v))).or_default().push(i);
    }
    let kernel = fibres.get(&src.index_of(&vec![Gr::ZERO; f.target])).cloned().unwrap_or_default();
    let src2 = src.clone();
    SymbolMap::from_formula(src, tgt, move |w| {
        let mut terms: Vec<(usize, Gr)> = kernel.iter().map(|&v| (v, minus_one)).collect();
        if let Some(fib) = fibres.get(&src2.index_of(w)) {
            terms.extend(fib.iter().map(|&v| (v, one)));
        }
        terms
    })
}

/// `T(f)` with the exponents `n + r dim W -> n + r dim V`.
pub fn small_transfer(f: &LinearMap, n: u32) -> Result<SymbolMap, TransferError> {
    transfer_with(f, n + delta(f.field, f.target))
}

/// `X_f = sum over Ker f of (v)_s`, in the medium power of the source.
pub fn kernel_sum(f: &LinearMap, exponent: u32) -> Result<Vec<Gr>, TransferError> {
    let t = SymbolTable::get(f.field, f.source, exponent)?;
    let ker = f.kernel();
    let one = t.ring().one();
    let terms: Vec<(usize, Gr)> = ker.points().iter().map(|v| (t.index_of(v), one)).collect();
    Ok(t.combine(&terms))
}

/// `Frob^steps: Omega_^(n + steps)(k^d) -> Omega_^n(k^d)` through the medium
/// Frobenius; `k^d` is identified with its Frobenius twist.
pub fn small_frobenius_power(field: FieldSpec, d: usize, n: u32, steps: u32) -> Result<SymbolMap, TransferError> {
    let v = TorsionModule::vector_space(field, d);
    let src = SymbolTable::get(field, d, n + steps)?;
    let tgt = SymbolTable::get(field, d, n)?;
    let mut images = src.symbols.clone();
    for e in (n..n + steps).rev() {
        let f = medium_frobenius(&v, e)?;
        images = images.iter().map(|x| f.apply(x)).collect();
    }
    Ok(SymbolMap { source: src, target: tgt, combos: None, images })
}

/// `Ver^steps: Omega_^n(k^d) -> Omega_^(n + steps)(k^d)`.
pub fn small_verschiebung_power(field: FieldSpec, d: usize, n: u32, steps: u32) -> Result<SymbolMap, TransferError> {
    let v = TorsionModule::vector_space(field, d);
    let src = SymbolTable::get(field, d, n)?;
    let tgt = SymbolTable::get(field, d, n + steps)?;
    let mut images = src.symbols.clone();
    for e in n..n + steps {
        let f = medium_verschiebung(&v, e)?;
        images = images.iter().map(|x| f.apply(x)).collect();
    }
    Ok(SymbolMap { source: src, target: tgt, combos: None, images })
}

/// Identities for the transfer of small Omega powers along one map.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FunctorialityReport {
    pub injective_case: Option<bool>,
    pub surjective_case: Option<bool>,
    pub kernel_sum_vanishes: bool,
}

/// For injective `f`, `T(f) o Omega_(f) = Frob^(r(dim W - dim V))`; for
/// surjective `f`, `Omega_(f) o T(f) = Ver^(r(dim V - dim W))`.
pub fn check_transfer_composites(f: &LinearMap, n: u32) -> Result<FunctorialityReport, TransferError> {
    let field = f.field;
    let (dv, dw) = (delta(field, f.source), delta(field, f.target));
    let t = small_transfer(f, n)?;
    let mut report = FunctorialityReport { injective_case: None, surjective_case: None, kernel_sum_vanishes: false };
    if f.is_injective() {
        let omega_f = small_functor(f, n + dw)?;
        let lhs = t.compose(&omega_f);
        let rhs = small_frobenius_power(field, f.source, n + dv, dw - dv)?;
        report.injective_case = Some(lhs.same_as(&rhs));
    }
    if f.is_surjective() {
        let omega_f = small_functor(f, n + dv)?;
        let lhs = omega_f.compose(&t);
        let rhs = small_verschiebung_power(field, f.target, n + dw, dv - dw)?;
        report.surjective_case = Some(lhs.same_as(&rhs));
    }
    report.kernel_sum_vanishes = kernel_sum(f, n + dv)?.iter().all(Gr::is_zero);
    Ok(report)
}

/// The Frobenius and Verschiebung integral formulas on `Omega_` of `k^d`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IntegralReport {
    pub q: u64,
    pub d: usize,
    pub m: usize,
    pub n: u32,
    pub frobenius_normaliser: u64,
    pub verschiebung_normaliser: u64,
    pub frobenius_formula: bool,
    pub verschiebung_formula: bool,
}

impl IntegralReport {
    pub fn holds(&self) -> bool {
        self.frobenius_formula && self.verschiebung_formula
    }
}

pub fn integral_formulas(field: FieldSpec, d: usize, m: usize, n: u32) -> Result<IntegralReport, TransferError> {
    if m < 1 || m + 1 > d {
        return Err(TransferError::Precondition(format!("need 1 <= m <= dim V - 1, got m = {m}, dim V = {d}")));
    }
    if n < 1 {
        return Err(TransferError::Precondition("n must be positive".into()));
    }
    let q = field.q();
    let shift = (m * field.r) as u32;
    // Frobenius: average of i_W o T(i_W) over codimension-m subspaces
    let mut frob_sum: Option<SymbolMap> = None;
    for w in subspaces(field, d, d - m) {
        let incl = w.inclusion();
        let t = transfer_with(&incl, n + shift)?;
        let back = small_functor(&incl, n)?;
        let term = back.compose(&t);
        frob_sum = Some(match frob_sum {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    let fnorm = gaussian_binomial(q, m, d - 1);
    let frob_lhs = frob_sum.expect("subspaces exist");
    let ring = frob_lhs.target.ring();
    let frob_lhs = frob_lhs.scale(ring.inv(ring.from_int(fnorm as i64)).expect("unit"));
    let frob_rhs = small_frobenius_power(field, d, n, shift)?;
    // Verschiebung: average of T(pi_W) o pi_W over m-dimensional subspaces
    let mut ver_sum: Option<SymbolMap> = None;
    for w in subspaces(field, d, m) {
        let pi = w.quotient();
        let down = small_functor(&pi, n)?;
        let up = transfer_with(&pi, n)?;
        let term = up.compose(&down);
        ver_sum = Some(match ver_sum {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    let vnorm = gaussian_binomial(q, m, d - 1);
    let ver_lhs = ver_sum.expect("subspaces exist");
    let ring = ver_lhs.target.ring();
    let ver_lhs = ver_lhs.scale(ring.inv(ring.from_int(vnorm as i64)).expect("unit"));
    let ver_rhs = small_verschiebung_power(field, d, n, shift)?;
    Ok(IntegralReport {
        q,
        d,
        m,
        n,
        frobenius_normaliser: fnorm,
        verschiebung_normaliser: vnorm,
        frobenius_formula: frob_lhs.same_as(&frob_rhs),
        verschiebung_formula: ver_lhs.same_as(&ver_rhs),
    })
}

/// `sum over lines L of Omega_^n(L)/p^m -> Omega_^n(V)/p^m` and its inverse
/// built from the line transfers.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InducedReport {
    pub q: u64,
    pub d: usize,
    pub n: u32,
    pub m: u32,
    pub lines: usize,
    pub inverse_well_defined: bool,
    pub g_after_f_is_identity: bool,
    pub f_after_g_is_identity: bool,
    /// `log_p |Omega_^n(V) / p^m|`.
    pub log_quotient: u64,
    /// `r m` times the number of lines.
    pub expected_log: u64,
}

impl InducedReport {
    pub fn holds(&self) -> bool {
        self.inverse_well_defined && self.g_after_f_is_identity && self.f_after_g_is_identity && self.log_quotient == self.expected_log
    }
}

pub fn induced_decomposition(field: FieldSpec, d: usize, n: u32, m: u32) -> Result<InducedReport, TransferError> {
    let r = field.r as i64;
    if d < 2 || (n as i64 - m as i64) < r * (d as i64 - 1) - 1 || m < 1 {
        return Err(TransferError::Precondition(format!(
            "need dim V >= 2 and n - m >= r(dim V - 1) - 1; got dim V = {d}, n - m = {}, r(dim V - 1) - 1 = {}",
            n as i64 - m as i64,
            r * (d as i64 - 1) - 1
        )));
    }
    let table = SymbolTable::get(field, d, n)?;
    let module = table.module();
    let ring = table.ring();
    let lines = subspaces(field, d, 1);
    let line_of = |v: &[Gr]| lines.iter().position(|l| l.contains(v));
    // g: (v)_n -> tau(lambda)^(p^n) e_L, v = lambda * (generator of L)
    let low = field.ring(m);
    let g_value = |v: &[Gr]| -> Vec<Gr> {
        let mut out = vec![Gr::ZERO; lines.len()];
        if v.iter().all(Gr::is_zero) {
            return out;
        }
        let li = line_of(v).expect("nonzero vector lies on a line");
        let lambda = lines[li].coords(v)[0];
        let t = low.pow_p_power(low.teichmuller(low.reduce(lambda)), n);
        out[li] = t;
        out
    };
    // relations among symbols, and their images under g
    let count = table.points.len();
    let free = TorsionModule::free(field, module.m, count);
    let rel = ModuleMap::new(free, module.clone(), table.symbols.clone())?.kernel();
    let mut inverse_well_defined = true;
    for gen in rel.generators() {
        let mut acc = vec![Gr::ZERO; lines.len()];
        for (i, c) in gen.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (a, b) in acc.iter_mut().zip(g_value(&table.points[i])) {
                *a = low.add(*a, low.mul(low.reduce(*c), b));
            }
        }
        inverse_well_defined &= acc.iter().all(Gr::is_zero);
    }
    // g o f on the generators (e_L)_n
    let g_after_f_is_identity = lines.iter().enumerate().all(|(i, l)| {
        let v = g_value(&l.basis[0]);
        v.iter().enumerate().all(|(j, x)| if i == j { *x == low.one() } else { x.is_zero() })
    });
    // f o g on every symbol, modulo p^m Omega_
    let pm = ring.mul_p_pow(ring.one(), m);
    let p_m_span: Vec<Vec<Gr>> = table.small.generators().iter().map(|g| module.scale(pm, g)).collect();
    let p_m_sub = module.span(&p_m_span);
    let f_after_g_is_identity = table.points.iter().zip(&table.symbols).all(|(v, s)| {
        let gv = g_value(v);
        let mut back = module.zero();
        for (li, c) in gv.iter().enumerate() {
            let e = table.symbols[table.index_of(&lines[li].basis[0])].clone();
            back = module.add(&back, &module.scale(ring.reduce(*c), &e));
        }
        let diff: Vec<Gr> = module.add(s, &module.scale(ring.neg(ring.one()), &back));
        p_m_sub.contains(&diff)
    });
    let log_quotient = table.small.log_card() - p_m_sub.log_card();
    Ok(InducedReport {
        q: field.q(),
        d,
        n,
        m,
        lines: lines.len(),
        inverse_well_defined,
        g_after_f_is_identity,
        f_after_g_is_identity,
        log_quotient,
        expected_log: lines.len() as u64 * m as u64 * field.r as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2)
    }

    fn f4() -> FieldSpec {
        FieldSpec::new(2, 2).unwrap()
    }

    fn vecs(field: FieldSpec, rows: &[&[i64]]) -> Vec<Vec<Gr>> {
        let k = field.field();
        rows.iter().map(|r| r.iter().map(|&x| k.from_int(x)).collect()).collect()
    }

    #[test]
    fn counting() {
        assert_eq!(gaussian_binomial(2, 1, 2), 3);
        assert_eq!(gaussian_binomial(2, 1, 3), 7);
        assert_eq!(gaussian_binomial(3, 2, 3), 13);
        for (q, d) in [(2u64, 3usize), (3, 2), (4, 2)] {
            let field = if q == 4 { f4() } else { FieldSpec::prime(q) };
            for k in 0..=d {
                assert_eq!(subspaces(field, d, k).len() as u64, gaussian_binomial(q, k, d));
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let laws = Laws::new(f2());
        let l2 = laws.lambda_one_var(2, &[0, 1]).unwrap();
        let k = f2().field();
        let v = vecs(f2(), &[&[1, 1]]).remove(0);
        assert!(l2.eval(f2(), &v).unwrap()[0].is_zero());
        let e4 = f4().field();
        let w = vec![e4.gen(), e4.one()];
        assert_eq!(l2.eval(f4(), &w).unwrap()[0], e4.one());
        let l1 = laws.lambda_one_var(2, &[0]).unwrap();
        assert_eq!(l1, PolyLaw::linear(&LinearMap::identity(f2(), 2)));
        let _ = k;
    }

    #[test]
    fn det_one_is_product_of_forms() {
        for (field, d) in [(f2(), 2usize), (f2(), 3), (FieldSpec::prime(3), 2), (f4(), 2)] {
            let laws = Laws::new(field);
            let theta = laws.det_one_scalar(d).unwrap();
            assert!(!theta.is_zero());
            let det = laws.det_one(d).unwrap();
            assert_eq!(det.degree, (0..d as u32).map(|i| field.q().pow(i)).sum::<u64>());
            for h in subspaces(field, d, d - 1) {
                for v in h.points() {
                    assert!(det.eval(field, &v).unwrap()[0].is_zero());
                }
            }
        }
        let k = f2().field();
        let det = Laws::new(f2()).det_one(2).unwrap();
        // xy(x + y) = x^2 y + x y^2
        assert_eq!(det.coords[0].coeff(&[2, 1]), k.one());
        assert_eq!(det.coords[0].coeff(&[1, 2]), k.one());
        assert_eq!(det.coords[0].terms.len(), 2);
    }

    #[test]
    fn codimension_one_example() {
        let laws = Laws::new(f2());
        let h = Subspace::new(f2(), 2, &vecs(f2(), &[&[1, 0]]));
        let t = laws.transfer_law(&h).unwrap();
        let k = f2().field();
        assert_eq!(t.eval(f2(), &vecs(f2(), &[&[1, 0]])[0]).unwrap(), vec![k.one()]);
        assert_eq!(t.eval(f2(), &vecs(f2(), &[&[1, 1]])[0]).unwrap(), vec![Gr::ZERO]);
        let e4 = f4().field();
        assert_eq!(t.eval(f4(), &[e4.gen(), e4.one()]).unwrap(), vec![e4.one()]);
        assert_eq!(laws.transfer_by_division(&h).unwrap(), t);
    }

    #[test]
    fn exterior_transfer_examples() {
        let laws = Laws::new(f2());
        let k = f2().field();
        // plane, line W = <e_1>: e_0 ^ e_1 -> pi(e_0) e_1 - pi(e_1) e_0 = e_1
        let w = Subspace::new(f2(), 2, &vecs(f2(), &[&[0, 1]]));
        let e = laws.exterior_transfer(&w, 2, None).unwrap();
        assert_eq!(e.matrix, vec![vec![k.one()]]);
        assert!(laws.exterior_transfer(&w, 0, None).is_err());
        // W = 0: the identity onto Det(V)
        let zero = Subspace::new(f2(), 2, &[]);
        let e = laws.exterior_transfer(&zero, 2, None).unwrap();
        assert_eq!(e.matrix, vec![vec![k.one()]]);
        // independence of the retraction
        let f3 = FieldSpec::prime(3);
        let laws3 = Laws::new(f3);
        for w in subspaces(f3, 3, 2) {
            let base = laws3.exterior_transfer(&w, 2, None).unwrap();
            for t in f3.elements() {
                for s in f3.elements() {
                    let shift = vec![vec![t, s]];
                    assert_eq!(laws3.exterior_transfer(&w, 2, Some(&shift)).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn law_identities() {
        for (field, d, c) in [(f2(), 2usize, 1usize), (f2(), 3, 1), (f2(), 3, 2), (FieldSpec::prime(3), 2, 1), (f4(), 2, 1)] {
            let r = check_transfer_laws(&Laws::new(field), d, c).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn degree_guard() {
        let laws = Laws::new(FieldSpec::prime(5));
        assert!(matches!(laws.lambda_one_var(4, &[0, 1, 2, 3]), Err(TransferError::DegreeGuard { .. })));
        assert!(laws.with_max_degree(1000).lambda_one_var(2, &[0, 1]).is_ok());
    }

    #[test]
    fn gamma_transfer_on_symbols() {
        let laws = Laws::new(f2());
        let w = Subspace::new(f2(), 2, &vecs(f2(), &[&[1, 0]]));
        let t = laws.transfer_law(&w).unwrap();
        for n in 0..=1u32 {
            let map = laws.gamma_transfer(&w, n).unwrap();
            let src = GammaModule::new(&TorsionModule::vector_space(f2(), 2), 2u32.pow(n + 1)).unwrap();
            let tgt = GammaModule::new(&TorsionModule::vector_space(f2(), 1), 2u32.pow(n)).unwrap();
            for v in TorsionModule::vector_space(f2(), 2).elements() {
                let want = tgt.symbol(&t.eval(f2(), &v).unwrap());
                assert_eq!(map.apply(&src.symbol(&v)), want);
            }
            // restriction along the inclusion is Gamma(F)
            let incl = PolyLaw::linear(&w.inclusion());
            let lhs = laws.gamma_of_law(&t.compose(&incl), n).unwrap();
            let rhs = laws.gamma_of_law(&PolyLaw::frobenius(f2(), 1, 1), n).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn small_transfer_formulas() {
        let k = f2().field();
        // injective f: F_2 -> F_2^2 and surjective pi: F_2^2 -> F_2
        let incl = LinearMap::new(f2(), 1, 2, vec![vec![k.one()], vec![Gr::ZERO]]);
        let proj = LinearMap::new(f2(), 2, 1, vec![vec![k.one(), Gr::ZERO]]);
        for n in 1..=2 {
            let r = check_transfer_composites(&incl, n).unwrap();
            assert_eq!(r.injective_case, Some(true));
            let r = check_transfer_composites(&proj, n).unwrap();
            assert_eq!(r.surjective_case, Some(true));
            assert!(!r.kernel_sum_vanishes);
        }
        // X_f vanishes when k has at least three elements
        for field in [FieldSpec::prime(3), f4()] {
            let kk = field.field();
            let proj = LinearMap::new(field, 2, 1, vec![vec![kk.one(), Gr::ZERO]]);
            assert!(kernel_sum(&proj, 1).unwrap().iter().all(Gr::is_zero));
        }
        // descending transfer on symbols
        let dt = transfer_with(&incl, 2).unwrap();
        let src = &dt.source;
        for (i, v) in src.points.iter().enumerate() {
            let want = if v[1].is_zero() { dt.target.symbols[dt.target.index_of(&[v[0]])].clone() } else { dt.target.module().zero() };
            assert_eq!(dt.images[i], want);
        }
    }

    #[test]
    fn contravariant_functor() {
        let k = f2().field();
        let one = k.one();
        let f = LinearMap::new(f2(), 1, 2, vec![vec![one], vec![one]]);
        let g = LinearMap::new(f2(), 2, 1, vec![vec![one, Gr::ZERO]]);
        let gf = g.compose(&f);
        let n = 1;
        let tg = small_transfer(&g, n).unwrap();
        let tf = small_transfer(&f, n).unwrap();
        let tgf = small_transfer(&gf, n).unwrap();
        assert!(tf.compose(&tg).same_as(&tgf));
    }

    #[test]
    fn cartesian_squares() {
        let k = f2().field();
        let (o, z) = (k.one(), Gr::ZERO);
        // W_1 = W_2 = F_2^2, Z = F_2, g_1 = g_2 = first coordinate
        let g1 = LinearMap::new(f2(), 2, 1, vec![vec![o, z]]);
        let g2 = LinearMap::new(f2(), 2, 1, vec![vec![z, o]]);
        // V = {(y, x) : g_2(y) = g_1(x)} inside F_2^4, basis from the kernel
        let join = LinearMap::new(f2(), 4, 1, vec![vec![z, o, o, z]]);
        let v = join.kernel();
        let basis = v.inclusion();
        let f2_map = LinearMap::new(f2(), 4, 2, vec![vec![o, z, z, z], vec![z, o, z, z]]).compose(&basis);
        let f1_map = LinearMap::new(f2(), 4, 2, vec![vec![z, z, o, z], vec![z, z, z, o]]).compose(&basis);
        let n = 1;
        let lhs = small_functor(&f2_map, n + 3).unwrap().compose(&small_transfer(&f1_map, n).unwrap());
        let rhs = transfer_with(&g2, n + 2).unwrap().compose(&small_functor(&g1, n + 2).unwrap());
        assert!(lhs.same_as(&rhs));
    }

    #[test]
    fn integral_formula_examples() {
        for (field, d) in [(f2(), 2usize), (FieldSpec::prime(3), 2), (f2(), 3)] {
            for m in 1..d {
                for n in 1..=2 {
                    let r = integral_formulas(field, d, m, n).unwrap();
                    assert!(r.holds(), "{r:?}");
                }
            }
        }
        // both averages use |Gr(m, dim V - 1)|
        let r = integral_formulas(f2(), 3, 2, 1).unwrap();
        assert_eq!((r.frobenius_normaliser, r.verschiebung_normaliser), (1, 1));
        assert!(integral_formulas(f2(), 2, 2, 1).is_err());
    }

    #[test]
    fn induced_examples() {
        let r = induced_decomposition(f2(), 2, 1, 1).unwrap();
        assert_eq!(r.lines, 3);
        assert!(r.holds(), "{r:?}");
        let r = induced_decomposition(f2(), 3, 2, 1).unwrap();
        assert_eq!(r.lines, 7);
        assert!(r.holds(), "{r:?}");
        assert!(induced_decomposition(f2(), 3, 1, 1).is_err());
    }

    #[test]
    fn inconsistent_formula_is_rejected() {
        // (x)_1 -> (x)_1 for x != 0 only on one coordinate is not linear
        let src = SymbolTable::get(f2(), 2, 1).unwrap();
        let tgt = src.clone();
        let one = tgt.ring().one();
        let t2 = tgt.clone();
        let bad = SymbolMap::from_formula(src, tgt, |x| if x[0].is_zero() { vec![] } else { vec![(t2.index_of(x), one)] });
        assert!(matches!(bad, Err(TransferError::Inconsistent { .. })));
    }
}
