//! Finite `W_m(k)`-modules in invariant-factor form.
//!
//! A module `M = sum W_{m - w_i}(k) e_i` is stored by its ambient level `m` and
//! its weights. Elements are coordinate vectors, coordinate `i` reduced mod
//! `p^(m - w_i)`. Multiplying coordinate `i` by `p^(w_i)` embeds `M` into the
//! free module `W_m(k)^d`; spans and kernels are computed there.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chainring::{howell, ChainError, ChainMatrix, FieldSpec, GaloisRing, Gr, Span};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("weight {w} exceeds level {m}")]
    BadWeight { w: u32, m: u32 },
    #[error("column {col} is not annihilated by p^{order}")]
    NotWellDefined { col: usize, order: u32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionModule {
    pub field: FieldSpec,
    pub m: u32,
    pub weights: Vec<u32>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ModuleJson {
    pub p: u64,
    pub r: usize,
    pub m: u32,
    pub weights: Vec<u32>,
}

impl TorsionModule {
    pub fn new(field: FieldSpec, m: u32, weights: Vec<u32>) -> Result<Self, ModuleError> {
        if let Some(&w) = weights.iter().find(|&&w| w > m) {
            return Err(ModuleError::BadWeight { w, m });
        }
        Ok(TorsionModule { field, m, weights })
    }

    /// `W_m(k)^d`.
    pub fn free(field: FieldSpec, m: u32, d: usize) -> Self {
        TorsionModule { field, m, weights: vec![0; d] }
    }

    /// A `k`-vector space of dimension `d`.
    pub fn vector_space(field: FieldSpec, d: usize) -> Self {
        Self::free(field, 1, d)
    }

    /// The same module viewed over `W_level(k)`, for `level >= m`.
    pub fn raised(&self, level: u32) -> TorsionModule {
        assert!(level >= self.m);
        let weights = self.weights.iter().map(|&w| w + level - self.m).collect();
        TorsionModule { field: self.field, m: level, weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn ring(&self) -> GaloisRing {
        self.field.ring(self.m)
    }

    /// Order exponent of each generator: `e_i` has order `p^(m - w_i)`.
    pub fn orders(&self) -> Vec<u32> {
        self.weights.iter().map(|&w| self.m - w).collect()
    }

    pub fn is_free(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    /// `log_p |M|`.
    pub fn log_card(&self) -> u64 {
        self.orders().iter().map(|&e| e as u64 * self.field.r as u64).sum()
    }

    /// Sorted weights, dropping zero summands.
    pub fn signature(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.weights.iter().copied().filter(|&w| w < self.m).collect();
        w.sort_unstable();
        w
    }

    /// Sorted orders `p^e` of the nonzero cyclic summands.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.orders().into_iter().filter(|&e| e > 0).map(|e| self.field.p.pow(e * self.field.r as u32)).collect();
        v.sort_unstable();
        v
    }

    /// The dual `M^v`; same weights, paired by `<e_i, e_j^v> = p^(w_i) d_ij`.
    pub fn dual(&self) -> TorsionModule {
        self.clone()
    }

    pub fn zero(&self) -> Vec<Gr> {
        vec![Gr::ZERO; self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Gr> {
        let mut v = self.zero();
        if self.weights[i] < self.m {
            v[i] = self.ring().one();
        }
        v
    }

    pub fn reduce(&self, x: &[Gr]) -> Vec<Gr> {
        x.iter().zip(self.orders()).map(|(&a, e)| self.field.ring(e).reduce(a)).collect()
    }

    pub fn add(&self, x: &[Gr], y: &[Gr]) -> Vec<Gr> {
        let s: Vec<Gr> = x.iter().zip(y).map(|(&a, &b)| self.ring().add(a, b)).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, c: Gr, x: &[Gr]) -> Vec<Gr> {
        let s: Vec<Gr> = x.iter().map(|&a| self.ring().mul(c, a)).collect();
        self.reduce(&s)
    }

    /// Image in `W_m^d`.
    pub fn embed(&self, x: &[Gr]) -> Vec<Gr> {
        let ring = self.ring();
        x.iter().zip(&self.weights).map(|(&a, &w)| ring.mul_p_pow(a, w)).collect()
    }

    /// Inverse of [`embed`](Self::embed) on its image.
    pub fn unembed(&self, y: &[Gr]) -> Vec<Gr> {
        let ring = self.ring();
        let v: Vec<Gr> =
            y.iter().zip(&self.weights).map(|(&a, &w)| if w >= self.m { Gr::ZERO } else { ring.div_p_pow(ring.reduce(a), w) }).collect();
        self.reduce(&v)
    }

    /// `<x, phi>` for `x` in `M` and `phi` in `M^v`.
    pub fn pairing(&self, x: &[Gr], phi: &[Gr]) -> Gr {
        let ring = self.ring();
        let mut acc = Gr::ZERO;
        for i in 0..self.dim() {
            acc = ring.add(acc, ring.mul_p_pow(ring.mul(x[i], phi[i]), self.weights[i]));
        }
        acc
    }

    /// Every element, in a fixed order.
    pub fn elements(&self) -> Vec<Vec<Gr>> {
        let per: Vec<Vec<Gr>> = self
            .orders()
            .into_iter()
            .map(|e| {
                let ring = self.field.ring(e.max(1));
                let count = if e == 0 { 1 } else { ring.modulus_int.pow(self.field.r as u32) };
                (0..count).map(|i| residue_from_index(&ring, i, e)).collect()
            })
            .collect();
        let mut out = vec![Vec::new()];
        for choices in per.iter() {
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for prefix in &out {
                for &c in choices {
                    let mut v = prefix.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    pub fn span(&self, gens: &[Vec<Gr>]) -> Submodule {
        let rows = gens.iter().map(|g| self.embed(g)).collect();
        Submodule { module: self.clone(), span: howell(self.ring(), self.dim(), rows) }
    }

    pub fn whole(&self) -> Submodule {
        let gens: Vec<Vec<Gr>> = (0..self.dim()).map(|i| self.basis_vector(i)).collect();
        self.span(&gens)
    }

    pub fn to_json(&self) -> ModuleJson {
        ModuleJson { p: self.field.p, r: self.field.r, m: self.m, weights: self.weights.clone() }
    }

    pub fn from_json(j: &ModuleJson) -> Result<Self, ModuleError> {
        Self::new(FieldSpec::new(j.p, j.r)?, j.m, j.weights.clone())
    }
}

/// Residue with coefficients in `[0, p^e)` numbered by `i`.
pub fn residue_from_index(ring: &GaloisRing, mut i: u64, e: u32) -> Gr {
    let pe = ring.p().pow(e);
    let mut g = Gr::ZERO;
    for j in 0..ring.r() {
        g.0[j] = i % pe;
        i /= pe;
    }
    g
}

/// A submodule given by a Howell span of embedded generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submodule {
    pub module: TorsionModule,
    pub span: Span,
}

impl Submodule {
    pub fn log_card(&self) -> u64 {
        self.span.log_card()
    }

    pub fn contains(&self, x: &[Gr]) -> bool {
        self.span.contains(&self.module.embed(x))
    }

    /// Canonical generators, as module elements.
    pub fn generators(&self) -> Vec<Vec<Gr>> {
        self.span.rows.iter().map(|r| self.module.unembed(r)).collect()
    }

    /// Orders `p^e` (as exponents `e`) of the cyclic summands of the submodule.
    pub fn invariant_levels(&self) -> Vec<u32> {
        self.span.invariant_levels()
    }

    /// Cyclic levels of the quotient `M / S`.
    pub fn quotient_levels(&self) -> Vec<u32> {
        let m = &self.module;
        let ring = m.ring();
        let mut rows: Vec<Vec<Gr>> = self.generators();
        for (i, e) in m.orders().into_iter().enumerate() {
            let mut r = m.zero();
            r[i] = ring.mul_p_pow(ring.one(), e);
            if e < m.m {
                rows.push(r);
            }
        }
        let sm = ChainMatrix::from_rows(ring, m.dim(), rows).smith();
        // columns without a pivot are free summands
        let missing = m.dim() - sm.len();
        let mut v: Vec<u32> = sm.into_iter().filter(|&s| s > 0).collect();
        v.extend(std::iter::repeat_n(m.m, missing));
        v.sort_unstable();
        v
    }

    pub fn is_everything(&self) -> bool {
        self.log_card() == self.module.log_card()
    }
}

/// A linear map, stored by the images of the domain generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub domain: TorsionModule,
    pub codomain: TorsionModule,
    /// `images[j]` is the image of `e_j`.
    pub images: Vec<Vec<Gr>>,
}

impl ModuleMap {
    pub fn new(domain: TorsionModule, codomain: TorsionModule, images: Vec<Vec<Gr>>) -> Result<Self, ModuleError> {
        if images.len() != domain.dim() || images.iter().any(|c| c.len() != codomain.dim()) {
            return Err(ModuleError::Shape("image table does not match dimensions".into()));
        }
        if domain.field != codomain.field {
            return Err(ModuleError::Shape("modules over different residue fields".into()));
        }
        let ring = codomain.ring();
        let mut reduced = Vec::new();
        for (j, (img, order)) in images.iter().zip(domain.orders()).enumerate() {
            let img = codomain.reduce(img);
            let killed: Vec<Gr> = img.iter().map(|&a| ring.mul_p_pow(a, order)).collect();
            if !codomain.reduce(&killed).iter().all(|a| a.is_zero()) {
                return Err(ModuleError::NotWellDefined { col: j, order });
            }
            reduced.push(img);
        }
        Ok(ModuleMap { domain, codomain, images: reduced })
    }

    pub fn identity(m: &TorsionModule) -> Self {
        let images = (0..m.dim()).map(|i| m.basis_vector(i)).collect();
        ModuleMap { domain: m.clone(), codomain: m.clone(), images }
    }

    pub fn apply(&self, x: &[Gr]) -> Vec<Gr> {
        let ring = self.codomain.ring();
        let mut acc = self.codomain.zero();
        for (j, &c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = ring.reduce(c);
            for i in 0..acc.len() {
                acc[i] = ring.add(acc[i], ring.mul(c, self.images[j][i]));
            }
        }
        self.codomain.reduce(&acc)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        if first.codomain != self.domain {
            return Err(ModuleError::Shape("maps do not compose".into()));
        }
        let images = first.images.iter().map(|x| self.apply(x)).collect();
        ModuleMap::new(first.domain.clone(), self.codomain.clone(), images)
    }

    /// The transpose `N^v -> M^v` for the canonical pairings. Both modules
    /// must live at the same level.
    pub fn dual_map(&self) -> ModuleMap {
        assert_eq!(self.domain.m, self.codomain.m);
        let ring = self.domain.ring();
        let dom = self.codomain.dual();
        let cod = self.domain.dual();
        let mut images = Vec::new();
        for i in 0..dom.dim() {
            let mut img = cod.zero();
            for j in 0..cod.dim() {
                let v = ring.mul_p_pow(self.images[j][i], self.codomain.weights[i]);
                let wj = self.domain.weights[j];
                img[j] = if wj >= self.domain.m { Gr::ZERO } else { ring.div_p_pow(ring.reduce(v), wj) };
            }
            images.push(cod.reduce(&img));
        }
        ModuleMap { domain: dom, codomain: cod, images }
    }

    /// Kernel as a submodule of the domain.
    pub fn kernel(&self) -> Submodule {
        let level = self.domain.m.max(self.codomain.m);
        let (dom, cod) = (self.domain.raised(level), self.codomain.raised(level));
        let ring = dom.ring();
        let (dc, dd) = (cod.dim(), dom.dim());
        let mut rows = Vec::new();
        for j in 0..dd {
            let mut r = cod.embed(&self.images[j]);
            let mut right = dom.zero();
            right[j] = ring.mul_p_pow(ring.one(), dom.weights[j]);
            r.extend(right);
            rows.push(r);
        }
        let tail = howell(ring, dc + dd, rows).tail_after(dc);
        if level == self.domain.m {
            return Submodule { module: self.domain.clone(), span: tail };
        }
        let gens: Vec<Vec<Gr>> = tail.rows.iter().map(|r| dom.unembed(r)).collect();
        self.domain.span(&gens)
    }

    pub fn image(&self) -> Submodule {
        self.codomain.span(&self.images)
    }
}

/// True if the Gram matrix (rows indexed by generators of `A`, columns by
/// generators of `B`) defines a perfect pairing between modules of the given
/// sizes.
pub fn is_perfect(ring: GaloisRing, gram: Vec<Vec<Gr>>, cols: usize, log_a: u64, log_b: u64) -> bool {
    let s = howell(ring, cols, gram);
    log_a == log_b && s.log_card() == log_a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64) -> FieldSpec {
        FieldSpec::prime(p)
    }

    #[test]
    fn dual_pairing_examples() {
        let m = TorsionModule::free(z(2), 2, 1);
        let e = m.basis_vector(0);
        assert_eq!(m.pairing(&e, &e), m.ring().one());
        let m = TorsionModule::new(z(2), 2, vec![0, 1]).unwrap();
        let (e1, e2) = (m.basis_vector(0), m.basis_vector(1));
        assert_eq!(m.pairing(&e2, &e2), m.ring().from_int(2));
        assert!(m.pairing(&e1, &e2).is_zero());
        assert_eq!(m.dual().dual(), m);
    }

    #[test]
    fn span_examples() {
        let m = TorsionModule::free(z(2), 2, 1);
        assert_eq!(m.span(&[]).log_card(), 0);
        let two = vec![m.ring().from_int(2)];
        assert_eq!(m.span(&[two]).log_card(), 1);
    }

    #[test]
    fn map_validity() {
        let f = z(2);
        let small = TorsionModule::new(f, 2, vec![1]).unwrap();
        let big = TorsionModule::free(f, 2, 1);
        let r = big.ring();
        assert!(ModuleMap::new(small.clone(), big.clone(), vec![vec![r.from_int(2)]]).is_ok());
        assert!(ModuleMap::new(small.clone(), big.clone(), vec![vec![r.one()]]).is_err());
        let red = ModuleMap::new(big.clone(), small.clone(), vec![vec![r.one()]]).unwrap();
        let d = red.dual_map();
        assert_eq!(d.images, vec![vec![r.from_int(2)]]);
        for x in big.elements() {
            for phi in small.elements() {
                assert_eq!(small.pairing(&red.apply(&x), &phi), big.pairing(&x, &d.apply(&phi)));
            }
        }
    }

    #[test]
    fn kernel_and_quotient() {
        let f = z(2);
        let m = TorsionModule::free(f, 3, 1);
        let r = m.ring();
        let times4 = ModuleMap::new(m.clone(), m.clone(), vec![vec![r.from_int(4)]]).unwrap();
        let k = times4.kernel();
        assert_eq!(k.log_card(), 2);
        assert_eq!(k.quotient_levels(), vec![1]);
        assert_eq!(times4.image().log_card(), 1);
    }
}
