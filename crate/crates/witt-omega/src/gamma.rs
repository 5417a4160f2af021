//! Divided powers `Gamma^n(M)` of a finite torsion module `M`, in the basis of
//! products `[e]_A = [e_1]_{a_1} ... [e_d]_{a_d}` indexed by compositions `A`
//! of `n`.
//!
//! `[e]_A` generates a cyclic summand of order `p^(m + v_p(n) - W~(A, w))`
//! with `W~(A, w) = max_{a_i > 0} (v_p(n) - v_p(a_i) + w_i)`. A generator of
//! weight `m` is zero, and so is every `[e]_A` that uses it.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chainring::{multinomial, vp_u64, GaloisRing, Gr};
use crate::poly::Poly;
use crate::wmodule::{ModuleError, ModuleMap, TorsionModule};

/// Largest basis a divided power module may have.
pub const MAX_BASIS: usize = 60_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("Gamma^{degree} of a rank {dim} module has {count} basis elements, above the cap of {cap}")]
    TooLarge { degree: u32, dim: usize, count: u128, cap: usize },
    #[error("divided powers gamma_i are only defined in positive degree")]
    DegreeZero,
    #[error("degree {0} is not a power of p")]
    NotPPower(u32),
    #[error("the Frobenius and Verschiebung need a vector space over k")]
    NotVectorSpace,
    #[error("law is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("pairing does not descend to level {0}")]
    PairingLevel(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Number of compositions of `n` into `d` parts.
pub fn composition_count(n: u32, d: usize) -> u128 {
    if d == 0 {
        return u128::from(n == 0);
    }
    let (top, k) = (n as u128 + d as u128 - 1, d as u128 - 1);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

/// Compositions of `n` into `d` parts, lexicographically decreasing.
pub fn compositions(n: u32, d: usize) -> Vec<Vec<u32>> {
    fn go(rest: u32, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=rest).rev() {
            prefix.push(a);
            go(rest - a, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(n, d, &mut Vec::new(), &mut out);
    out
}

fn vp(p: u64, n: u32) -> u32 {
    vp_u64(p, n as u64)
}

/// `Gamma^n(M)` over `W(k)`; a module over `W_(m + v_p(n))(k)`.
#[derive(Clone, Debug)]
pub struct GammaModule {
    pub base: TorsionModule,
    pub degree: u32,
    pub basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// The underlying module in invariant-factor form, one generator per
    /// basis element.
    pub module: TorsionModule,
}

impl PartialEq for GammaModule {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.degree == other.degree
    }
}

impl GammaModule {
    pub fn new(base: &TorsionModule, degree: u32) -> Result<Self, GammaError> {
        let count = composition_count(degree, base.dim());
        if count > MAX_BASIS as u128 {
            return Err(GammaError::TooLarge { degree, dim: base.dim(), count, cap: MAX_BASIS });
        }
        let p = base.field.p;
        let m = base.m;
        let vn = if degree == 0 { 0 } else { vp(p, degree) };
        let level = m + vn;
        let basis = compositions(degree, base.dim());
        let weights = basis
            .iter()
            .map(|a| {
                let mut w = 0;
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    if base.weights[i] >= m {
                        return level;
                    }
                    w = w.max(vn + base.weights[i] - vp(p, ai).min(vn + base.weights[i]));
                }
                w.min(level)
            })
            .collect();
        let index = basis.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let module = TorsionModule::new(base.field, level, weights)?;
        Ok(GammaModule { base: base.clone(), degree, basis, index, module })
    }

    pub fn level(&self) -> u32 {
        self.module.m
    }

    pub fn ring(&self) -> GaloisRing {
        self.module.ring()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, a: &[u32]) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Order exponent of `[e]_A`.
    pub fn order_of(&self, a: &[u32]) -> Option<u32> {
        self.index_of(a).map(|i| self.module.orders()[i])
    }

    pub fn basis_element(&self, i: usize) -> Vec<Gr> {
        self.module.basis_vector(i)
    }

    pub fn zero(&self) -> Vec<Gr> {
        self.module.zero()
    }

    /// `[x]_n` for `x` in the base module.
    pub fn symbol(&self, x: &[Gr]) -> Vec<Gr> {
        let ring = self.ring();
        let mut powers: Vec<Vec<Gr>> = Vec::with_capacity(x.len());
        for &xi in x {
            let mut row = vec![ring.one()];
            for _ in 0..self.degree {
                let last = *row.last().unwrap();
                row.push(ring.mul(last, ring.reduce(xi)));
            }
            powers.push(row);
        }
        let coeffs: Vec<Gr> = self
            .basis
            .iter()
            .map(|a| a.iter().enumerate().fold(ring.one(), |acc, (i, &ai)| ring.mul(acc, powers[i][ai as usize])))
            .collect();
        self.module.reduce(&coeffs)
    }

    /// `[sum_i P_i e_i]_n` for polynomial coordinates `P_i`, as polynomial
    /// coefficients in the basis. Coefficients live at the level of `self`.
    pub fn symbol_poly(&self, coords: &[Poly]) -> Vec<Poly> {
        let ring = self.ring();
        let nvars = coords.first().map_or(0, |c| c.nvars);
        let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut power = |i: usize, a: u32| -> Poly {
            if let Some(q) = cache.get(&(i, a)) {
                return q.clone();
            }
            let q = coords[i].pow(&ring, a as u64);
            cache.insert((i, a), q.clone());
            q
        };
        self.basis
            .iter()
            .map(|a| {
                let mut acc = Poly::constant(&ring, ring.one(), nvars);
                for (i, &ai) in a.iter().enumerate() {
                    if ai > 0 {
                        acc = acc.mul(&ring, &power(i, ai));
                    }
                }
                acc
            })
            .collect()
    }

    /// Symbols at a generic point: `[sum X_i e_i]_n`, coefficient of `[e]_A`
    /// is `X^A`.
    pub fn generic_symbol(&self) -> Vec<Poly> {
        let ring = self.ring();
        self.basis.iter().map(|a| Poly::monomial(&ring, a.clone(), ring.one())).collect()
    }

    pub fn to_json(&self, x: &[Gr]) -> GammaVectorJson {
        let coeffs = self
            .basis
            .iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, &c)| GammaTermJson { a: a.clone(), c: self.ring().coeffs(c) })
            .collect();
        GammaVectorJson { degree: self.degree, coeffs }
    }

    pub fn from_json(&self, j: &GammaVectorJson) -> Result<Vec<Gr>, GammaError> {
        if j.degree != self.degree {
            return Err(GammaError::Shape(format!("expected degree {}, got {}", self.degree, j.degree)));
        }
        let ring = self.ring();
        let mut x = self.zero();
        for t in &j.coeffs {
            let i = self.index_of(&t.a).ok_or_else(|| GammaError::Shape(format!("{:?} is not a composition of {}", t.a, self.degree)))?;
            x[i] = ring.add(x[i], ring.from_coeffs(&t.c));
        }
        Ok(self.module.reduce(&x))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct GammaTermJson {
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    pub c: Vec<u64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct GammaVectorJson {
    pub degree: u32,
    pub coeffs: Vec<GammaTermJson>,
}

fn big_to_ring(ring: &GaloisRing, n: &BigUint) -> Gr {
    crate::chainring::ring_from_big(ring, n)
}

/// Product `X * Y` of `X` in `Gamma^i` and `Y` in `Gamma^j`, landing in
/// `target = Gamma^(i+j)`.
pub fn mul(target: &GammaModule, a: &GammaModule, x: &[Gr], b: &GammaModule, y: &[Gr]) -> Vec<Gr> {
    assert_eq!(target.degree, a.degree + b.degree);
    let ring = target.ring();
    let mut acc = target.zero();
    for (ia, ca) in a.basis.iter().zip(x) {
        if ca.is_zero() {
            continue;
        }
        for (ib, cb) in b.basis.iter().zip(y) {
            if cb.is_zero() {
                continue;
            }
            let sum: Vec<u32> = ia.iter().zip(ib).map(|(u, v)| u + v).collect();
            let mut coeff = ring.mul(ring.reduce(*ca), ring.reduce(*cb));
            for (u, v) in ia.iter().zip(ib) {
                if *u > 0 && *v > 0 {
                    let bin = multinomial(&[*u as u64, *v as u64]);
                    coeff = ring.mul(coeff, big_to_ring(&ring, &bin));
                }
            }
            let k = target.index_of(&sum).expect("sum of compositions");
            acc[k] = ring.add(acc[k], coeff);
        }
    }
    target.module.reduce(&acc)
}

/// `prod_t gamma_(j_t)([e]_(A_t))` as a multiple of a single basis element.
fn gamma_monomial(parts: &[(&[u32], u32)], d: usize) -> (Vec<u32>, BigUint) {
    let mut coeff = BigUint::one();
    let mut total = vec![0u32; d];
    for &(a, j) in parts {
        if j == 0 {
            continue;
        }
        let mut first = true;
        for (i, &ai) in a.iter().enumerate() {
            total[i] += j * ai;
            if ai == 0 {
                continue;
            }
            // ([e_i]_a)^j = (ja)!/(a!)^j [e_i]_(ja), and one factor keeps the 1/j!
            let mut c = multinomial(&vec![ai as u64; j as usize]);
            if first {
                c /= multinomial(&vec![1u64; j as usize]);
                first = false;
            }
            coeff *= c;
        }
    }
    // the product of the factors [e_i]_(j_t a_ti) over t
    for i in 0..d {
        let column: Vec<u64> = parts.iter().filter(|(_, j)| *j > 0).map(|&(a, j)| (j * a[i]) as u64).collect();
        coeff *= multinomial(&column);
    }
    (total, coeff)
}

/// Distributions of `i` into `t` nonnegative parts.
fn distributions(i: u32, t: usize) -> Vec<Vec<u32>> {
    compositions(i, t)
}

/// `gamma_i(X)` for `X` in `Gamma^N`, `N >= 1`, landing in `target = Gamma^(iN)`.
pub fn gamma_i(target: &GammaModule, source: &GammaModule, x: &[Gr], i: u32) -> Result<Vec<Gr>, GammaError> {
    if source.degree == 0 {
        return Err(GammaError::DegreeZero);
    }
    if target.degree != i * source.degree || target.base != source.base {
        return Err(GammaError::Shape("gamma_i target has the wrong degree".into()));
    }
    let ring = target.ring();
    let d = source.base.dim();
    let terms: Vec<(usize, Gr)> = x.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, &c)| (k, c)).collect();
    let mut acc = target.zero();
    if terms.is_empty() {
        if i == 0 {
            acc[0] = ring.one();
        }
        return Ok(target.module.reduce(&acc));
    }
    for dist in distributions(i, terms.len()) {
        let parts: Vec<(&[u32], u32)> = terms.iter().zip(&dist).map(|(&(k, _), &j)| (source.basis[k].as_slice(), j)).collect();
        let (exp, k) = gamma_monomial(&parts, d);
        let mut c = big_to_ring(&ring, &k);
        for (&(_, ct), &j) in terms.iter().zip(&dist) {
            if j > 0 {
                c = ring.mul(c, ring.pow(ring.reduce(ct), j as u64));
            }
        }
        let idx = target.index_of(&exp).expect("composition of iN");
        acc[idx] = ring.add(acc[idx], c);
    }
    Ok(target.module.reduce(&acc))
}

/// `p^(sum w_i a_i) * multinomial(N; A)`, the diagonal of the duality pairing
/// between `Gamma^N(M)` and `Gamma^N(M^v)`, reduced at `level`.
pub fn pairing_diagonal(base: &TorsionModule, a: &[u32], level: u32) -> Gr {
    let ring = base.field.ring(level);
    let parts: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let shift: u64 = a.iter().zip(&base.weights).map(|(&x, &w)| x as u64 * w as u64).sum();
    if shift >= level as u64 {
        return Gr::ZERO;
    }
    ring.mul_p_pow(big_to_ring(&ring, &multinomial(&parts)), shift as u32)
}

impl GammaModule {
    /// The pairing `Gamma^N(M) x Gamma^N(M^v) -> W_level(k)` given by the
    /// diagonal rule; rejected if it is not well defined at that level.
    pub fn pairing_at(&self, x: &[Gr], phi: &[Gr], level: u32) -> Result<Gr, GammaError> {
        let ring = self.base.field.ring(level);
        let mut acc = Gr::ZERO;
        for (k, (a, ord)) in self.basis.iter().zip(self.module.orders()).enumerate() {
            let g = pairing_diagonal(&self.base, a, level);
            if !ring.mul_p_pow(g, ord).is_zero() {
                return Err(GammaError::PairingLevel(level));
            }
            if x[k].is_zero() || phi[k].is_zero() {
                continue;
            }
            acc = ring.add(acc, ring.mul(g, ring.mul(ring.reduce(x[k]), ring.reduce(phi[k]))));
        }
        Ok(acc)
    }

    /// `n` with `degree = p^n`.
    pub fn p_exponent(&self) -> Result<u32, GammaError> {
        let p = self.base.field.p;
        let mut d = self.degree as u64;
        let mut n = 0;
        while d > 1 && d.is_multiple_of(p) {
            d /= p;
            n += 1;
        }
        if d == 1 {
            Ok(n)
        } else {
            Err(GammaError::NotPPower(self.degree))
        }
    }

    /// The duality pairing on `Gamma^(p^n)`, with values in `W_(m+n)(k)`.
    pub fn pairing(&self, x: &[Gr], phi: &[Gr]) -> Result<Gr, GammaError> {
        let n = self.p_exponent()?;
        self.pairing_at(x, phi, self.base.m + n)
    }
}

fn vector_space_check(base: &TorsionModule) -> Result<(), GammaError> {
    if base.m != 1 || !base.is_free() {
        return Err(GammaError::NotVectorSpace);
    }
    Ok(())
}

/// `Frob: Gamma^(np)(V) -> Gamma^n(V^(1))`; the twist `V^(1)` is identified
/// with `V` through the relabelled basis.
pub fn frobenius(source: &GammaModule) -> Result<(GammaModule, ModuleMap), GammaError> {
    vector_space_check(&source.base)?;
    let p = source.base.field.p as u32;
    if !source.degree.is_multiple_of(p) {
        return Err(GammaError::Shape("Frobenius needs a degree divisible by p".into()));
    }
    let target = GammaModule::new(&source.base, source.degree / p)?;
    let images = source
        .basis
        .iter()
        .map(|a| {
            let mut img = target.zero();
            if a.iter().all(|&x| x % p == 0) {
                let b: Vec<u32> = a.iter().map(|&x| x / p).collect();
                img[target.index_of(&b).unwrap()] = target.ring().one();
            }
            img
        })
        .collect();
    let map = ModuleMap::new(source.module.clone(), target.module.clone(), images)?;
    Ok((target, map))
}

/// `Ver: Gamma^n(V^(1)) -> Gamma^(np)(V)`, `[e]_A -> p [e]_(pA)`.
pub fn verschiebung(source: &GammaModule) -> Result<(GammaModule, ModuleMap), GammaError> {
    vector_space_check(&source.base)?;
    let p = source.base.field.p as u32;
    let target = GammaModule::new(&source.base, source.degree * p)?;
    let ring = target.ring();
    let images = source
        .basis
        .iter()
        .map(|a| {
            let mut img = target.zero();
            let b: Vec<u32> = a.iter().map(|&x| x * p).collect();
            img[target.index_of(&b).unwrap()] = ring.from_int(p as i64);
            img
        })
        .collect();
    let map = ModuleMap::new(source.module.clone(), target.module.clone(), images)?;
    Ok((target, map))
}

/// Coordinates of `x^(1)`: the Frobenius applied to each residue coordinate.
pub fn twist(base: &TorsionModule, x: &[Gr]) -> Vec<Gr> {
    let f = base.field.field();
    x.iter().map(|&c| f.pow(f.reduce(c), base.field.p)).collect()
}

/// The linear map `Gamma^N(M) -> T` induced by a homogeneous degree-`N` law
/// `M -> T`, given by the coordinate polynomials of its value at the generic
/// point `sum X_i e_i`.
pub fn law_coefficients(source: &GammaModule, target: &TorsionModule, law: &[Poly]) -> Result<ModuleMap, GammaError> {
    if law.len() != target.dim() {
        return Err(GammaError::Shape("law has the wrong number of coordinates".into()));
    }
    if law.iter().any(|q| !q.is_homogeneous(source.degree)) {
        return Err(GammaError::NotHomogeneous(source.degree));
    }
    let images = source.basis.iter().map(|a| law.iter().map(|q| q.coeff(a)).collect()).collect();
    Ok(ModuleMap::new(source.module.clone(), target.clone(), images)?)
}

/// `Gamma^N(f)` for a linear map `f`.
pub fn gamma_map(f: &ModuleMap, degree: u32) -> Result<(GammaModule, GammaModule, ModuleMap), GammaError> {
    let dom = GammaModule::new(&f.domain, degree)?;
    let cod = GammaModule::new(&f.codomain, degree)?;
    let ring = cod.ring();
    let nv = f.domain.dim();
    let coords: Vec<Poly> = (0..f.codomain.dim())
        .map(|i| {
            let mut q = Poly::zero(nv);
            for j in 0..nv {
                q = q.add(&ring, &Poly::var(&ring, j, nv).scale(&ring, f.images[j][i]));
            }
            q
        })
        .collect();
    let law = cod.symbol_poly(&coords);
    let map = law_coefficients(&dom, &cod.module, &law)?;
    Ok((dom, cod, map))
}

/// `alpha_p: Gamma^(p^(n+1))(M) -> Gamma^p(Gamma^(p^n)(M))`, the linear map of
/// the law `x -> [[x]_(p^n)]_p`. Returns the inner module `Gamma^(p^n)(M)`,
/// the outer module and the map.
pub fn alpha_p(base: &TorsionModule, n: u32) -> Result<(GammaModule, GammaModule, ModuleMap), GammaError> {
    let p = base.field.p as u32;
    let source = GammaModule::new(base, p.pow(n + 1))?;
    let inner = GammaModule::new(base, p.pow(n))?;
    let outer = GammaModule::new(&inner.module, p)?;
    let law = outer.symbol_poly(&inner.generic_symbol());
    let map = law_coefficients(&source, &outer.module, &law)?;
    Ok((inner, outer, map))
}

/// `gamma~_p: Gamma^p(Gamma^(p^n)(M)) -> Gamma^(p^(n+1))(M)`,
/// `[X]_p -> gamma_p(X)`.
pub fn gamma_tilde_p(base: &TorsionModule, n: u32) -> Result<(GammaModule, GammaModule, ModuleMap), GammaError> {
    let p = base.field.p as u32;
    let inner = GammaModule::new(base, p.pow(n))?;
    let outer = GammaModule::new(&inner.module, p)?;
    let target = GammaModule::new(base, p.pow(n + 1))?;
    let ring = target.ring();
    let images = outer
        .basis
        .iter()
        .map(|c| {
            let parts: Vec<(&[u32], u32)> =
                c.iter().enumerate().filter(|(_, &j)| j > 0).map(|(b, &j)| (inner.basis[b].as_slice(), j)).collect();
            let (exp, k) = gamma_monomial(&parts, base.dim());
            let mut img = target.zero();
            img[target.index_of(&exp).unwrap()] = big_to_ring(&ring, &k);
            img
        })
        .collect();
    let map = ModuleMap::new(outer.module.clone(), target.module.clone(), images)?;
    Ok((outer, target, map))
}

/// `Gamma^(n)(M) = Gamma^p(Gamma^p(... M))`, `n` times. `stages[0]` is `M`
/// itself viewed as `Gamma^1`.
pub fn iterated(base: &TorsionModule, n: u32) -> Result<Vec<GammaModule>, GammaError> {
    let p = base.field.p as u32;
    let mut stages = vec![GammaModule::new(base, 1)?];
    for _ in 0..n {
        let prev = stages.last().unwrap().module.clone();
        stages.push(GammaModule::new(&prev, p)?);
    }
    Ok(stages)
}

type MapCache = RwLock<HashMap<(TorsionModule, u32, bool), Arc<ModuleMap>>>;
static EMBEDDING_CACHE: Lazy<MapCache> = Lazy::new(|| RwLock::new(HashMap::new()));

fn cached(
    base: &TorsionModule,
    n: u32,
    is_g: bool,
    build: impl FnOnce() -> Result<ModuleMap, GammaError>,
) -> Result<Arc<ModuleMap>, GammaError> {
    let key = (base.clone(), n, is_g);
    if let Some(m) = EMBEDDING_CACHE.read().get(&key) {
        return Ok(m.clone());
    }
    let built = Arc::new(build()?);
    Ok(EMBEDDING_CACHE.write().entry(key).or_insert(built).clone())
}

/// `G_n: Gamma^(p^n)(M) -> Gamma^(n)(M)`.
pub fn g_map(base: &TorsionModule, n: u32) -> Result<Arc<ModuleMap>, GammaError> {
    cached(base, n, true, || {
        let p = base.field.p as u32;
        if n <= 1 {
            let g = GammaModule::new(base, p.pow(n))?;
            return Ok(ModuleMap::identity(&g.module));
        }
        let (_, _, alpha) = alpha_p(base, n - 1)?;
        let prev = g_map(base, n - 1)?;
        let (_, _, lifted) = gamma_map(&prev, p)?;
        Ok(lifted.compose(&alpha)?)
    })
}

/// `F_n: Gamma^(n)(M) -> Gamma^(p^n)(M)`.
pub fn f_map(base: &TorsionModule, n: u32) -> Result<Arc<ModuleMap>, GammaError> {
    cached(base, n, false, || {
        let p = base.field.p as u32;
        if n <= 1 {
            let g = GammaModule::new(base, p.pow(n))?;
            return Ok(ModuleMap::identity(&g.module));
        }
        let (_, _, tilde) = gamma_tilde_p(base, n - 1)?;
        let prev = f_map(base, n - 1)?;
        let (_, _, lifted) = gamma_map(&prev, p)?;
        Ok(tilde.compose(&lifted)?)
    })
}

/// A bilinear map `M x N -> L`, by the values on pairs of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bilinear {
    pub left: TorsionModule,
    pub right: TorsionModule,
    pub target: TorsionModule,
    /// `table[i][j] = B(e_i, f_j)`.
    pub table: Vec<Vec<Vec<Gr>>>,
}

impl Bilinear {
    pub fn new(left: TorsionModule, right: TorsionModule, target: TorsionModule, table: Vec<Vec<Vec<Gr>>>) -> Result<Self, GammaError> {
        let ring = target.ring();
        let (ol, or) = (left.orders(), right.orders());
        let mut reduced = Vec::new();
        for (i, row) in table.iter().enumerate() {
            let mut rrow = Vec::new();
            for (j, v) in row.iter().enumerate() {
                let v = target.reduce(v);
                let o = ol[i].min(or[j]);
                let killed: Vec<Gr> = v.iter().map(|&c| ring.mul_p_pow(c, o)).collect();
                if !target.reduce(&killed).iter().all(Gr::is_zero) {
                    return Err(ModuleError::NotWellDefined { col: i * right.dim() + j, order: o }.into());
                }
                rrow.push(v);
            }
            reduced.push(rrow);
        }
        Ok(Bilinear { left, right, target, table: reduced })
    }

    pub fn apply(&self, x: &[Gr], y: &[Gr]) -> Vec<Gr> {
        let ring = self.target.ring();
        let mut acc = self.target.zero();
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                if xi.is_zero() || yj.is_zero() {
                    continue;
                }
                let c = ring.mul(ring.reduce(xi), ring.reduce(yj));
                for (t, &v) in self.table[i][j].iter().enumerate() {
                    acc[t] = ring.add(acc[t], ring.mul(c, v));
                }
            }
        }
        self.target.reduce(&acc)
    }
}

/// `Gamma^N(B): Gamma^N(M) x Gamma^N(N) -> Gamma^N(L)`, determined by
/// `([x]_N, [y]_N) -> [B(x, y)]_N`.
pub fn gamma_bilinear(b: &Bilinear, degree: u32) -> Result<Bilinear, GammaError> {
    let gl = GammaModule::new(&b.left, degree)?;
    let gr = GammaModule::new(&b.right, degree)?;
    let gt = GammaModule::new(&b.target, degree)?;
    let ring = gt.ring();
    let (dl, dr) = (b.left.dim(), b.right.dim());
    let nv = dl + dr;
    let coords: Vec<Poly> = (0..b.target.dim())
        .map(|t| {
            let mut q = Poly::zero(nv);
            for i in 0..dl {
                for j in 0..dr {
                    let c = b.table[i][j][t];
                    if c.is_zero() {
                        continue;
                    }
                    let xy = Poly::var(&ring, i, nv).mul(&ring, &Poly::var(&ring, dl + j, nv));
                    q = q.add(&ring, &xy.scale(&ring, c));
                }
            }
            q
        })
        .collect();
    let law = gt.symbol_poly(&coords);
    let mut table = Vec::new();
    for a in &gl.basis {
        let mut row = Vec::new();
        for c in &gr.basis {
            let mut exp = a.clone();
            exp.extend(c);
            row.push(law.iter().map(|q| q.coeff(&exp)).collect());
        }
        table.push(row);
    }
    Bilinear::new(gl.module.clone(), gr.module.clone(), gt.module.clone(), table)
}

/// Span of the given symbols `[x]_n`.
pub fn symbol_span<'a>(g: &GammaModule, points: impl IntoIterator<Item = &'a Vec<Gr>>) -> crate::wmodule::Submodule {
    let gens: Vec<Vec<Gr>> = points.into_iter().map(|x| g.symbol(x)).collect();
    g.module.span(&gens)
}

/// Spans symbols of the points in order until the span is everything, testing
/// after each block. Returns the span and the number of symbols used.
pub fn symbol_span_until_full(g: &GammaModule, points: &[Vec<Gr>], block: usize) -> (crate::wmodule::Submodule, usize) {
    let full = g.module.log_card();
    let mut span = g.module.span(&[]);
    let mut used = 0;
    for chunk in points.chunks(block.max(1)) {
        let gens: Vec<Vec<Gr>> = chunk.iter().map(|x| g.module.embed(&g.symbol(x))).collect();
        span.span = span.span.extend(gens);
        used += chunk.len();
        if span.log_card() == full {
            break;
        }
    }
    (span, used)
}
