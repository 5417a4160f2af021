//! Deformations mod `p^2`: the divided-power presentation of truncated Witt
//! vectors over `F_p`, wrinkled algebras (an `F_p`-algebra with a `p`-th
//! divided power on the kernel of its Frobenius), their flat lifts over
//! `Z/p^2`, and the lifting criterion for the Frobenius.
//!
//! Finite algebras are given by structure constants on a basis, with
//! coefficients stored as integers `0 <= c < p^level`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chainring::{FieldSpec, Gr};
use crate::gamma::{self, Bilinear, GammaError, GammaModule};
use crate::poly::Poly;
use crate::wmodule::{ModuleError, TorsionModule};

/// Largest algebra whose elements are enumerated.
pub const MAX_ELEMENTS: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WrinkleError {
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error("wrinkle axiom fails: {0}")]
    Axiom(String),
    #[error("{count} elements to enumerate, above the cap of {cap}")]
    TooLarge { count: u128, cap: u64 },
    #[error("lift certification failed: {0:?}")]
    Certification(Box<LiftCertificate>),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    modpow(a % p, p - 2, p)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Commutative unital algebra over `Z/p^level`, free on the chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub p: u64,
    pub level: u32,
    /// `table[i][j]` is `e_i e_j` in the basis.
    pub table: Vec<Vec<Vec<u64>>>,
    pub unit: Vec<u64>,
}

impl StructureConstants {
    pub fn new(p: u64, level: u32, table: Vec<Vec<Vec<u64>>>, unit: Vec<u64>) -> Result<Self, WrinkleError> {
        let d = unit.len();
        if !crate::chainring::is_prime(p) {
            return Err(WrinkleError::Malformed(format!("{p} is not prime")));
        }
        if table.len() != d || table.iter().any(|row| row.len() != d || row.iter().any(|v| v.len() != d)) {
            return Err(WrinkleError::Malformed("structure constants do not match the dimension".into()));
        }
        let modulus = p.pow(level);
        let table = table.into_iter().map(|row| row.into_iter().map(|v| v.into_iter().map(|c| c % modulus).collect()).collect()).collect();
        let unit = unit.into_iter().map(|c| c % modulus).collect();
        let a = StructureConstants { p, level, table, unit };
        a.check_axioms()?;
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.level)
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        x.iter().zip(y).map(|(a, b)| (a + b) % m).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        x.iter().map(|a| (m - a % m) % m).collect()
    }

    pub fn scale(&self, c: u64, x: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        x.iter().map(|a| (c % m) * a % m).collect()
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        let mut acc = self.zero();
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let c = a * b % m;
                for (t, &s) in self.table[i][j].iter().enumerate() {
                    acc[t] = (acc[t] + c * s) % m;
                }
            }
        }
        acc
    }

    pub fn pow(&self, x: &[u64], e: u64) -> Vec<u64> {
        (0..e).fold(self.unit.clone(), |acc, _| self.mul(&acc, x))
    }

    pub fn check_axioms(&self) -> Result<(), WrinkleError> {
        let d = self.dim();
        let e: Vec<Vec<u64>> = (0..d).map(|i| self.basis_vector(i)).collect();
        for i in 0..d {
            if self.mul(&self.unit, &e[i]) != e[i] {
                return Err(WrinkleError::Malformed(format!("unit does not act trivially on e_{i}")));
            }
            for j in 0..d {
                if self.table[i][j] != self.table[j][i] {
                    return Err(WrinkleError::Malformed(format!("not commutative on (e_{i}, e_{j})")));
                }
                for k in 0..d {
                    if self.mul(&self.mul(&e[i], &e[j]), &e[k]) != self.mul(&e[i], &self.mul(&e[j], &e[k])) {
                        return Err(WrinkleError::Malformed(format!("not associative on (e_{i}, e_{j}, e_{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every element, digits in base `p^level`, first coordinate slowest.
    pub fn elements(&self) -> Result<Vec<Vec<u64>>, WrinkleError> {
        let m = self.modulus();
        let count = (m as u128).pow(self.dim() as u32);
        if count > MAX_ELEMENTS as u128 {
            return Err(WrinkleError::TooLarge { count, cap: MAX_ELEMENTS });
        }
        Ok((0..count as u64)
            .map(|mut i| {
                let mut v = vec![0; self.dim()];
                for slot in v.iter_mut().rev() {
                    *slot = i % m;
                    i /= m;
                }
                v
            })
            .collect())
    }

    /// Reduction to `Z/p`.
    pub fn reduce_mod_p(&self) -> StructureConstants {
        let p = self.p;
        StructureConstants {
            p,
            level: 1,
            table: self.table.iter().map(|r| r.iter().map(|v| v.iter().map(|c| c % p).collect()).collect()).collect(),
            unit: self.unit.iter().map(|c| c % p).collect(),
        }
    }

    /// Product of two algebras over the same ring.
    pub fn product(&self, other: &StructureConstants) -> StructureConstants {
        let (d1, d2) = (self.dim(), other.dim());
        let d = d1 + d2;
        let mut table = vec![vec![vec![0; d]; d]; d];
        for i in 0..d1 {
            for j in 0..d1 {
                table[i][j][..d1].copy_from_slice(&self.table[i][j]);
            }
        }
        for i in 0..d2 {
            for j in 0..d2 {
                table[d1 + i][d1 + j][d1..].copy_from_slice(&other.table[i][j]);
            }
        }
        let mut unit = self.unit.clone();
        unit.extend(&other.unit);
        StructureConstants { p: self.p, level: self.level, table, unit }
    }

    /// `W_level(F_q)` in the basis `1, g, .., g^(r-1)`.
    pub fn galois(field: FieldSpec, level: u32) -> StructureConstants {
        let ring = field.ring(level);
        let r = field.r;
        let basis: Vec<Gr> = (0..r).map(|i| ring.pow(ring.gen(), i as u64)).collect();
        let table = basis.iter().map(|&a| basis.iter().map(|&b| ring.coeffs(ring.mul(a, b))).collect()).collect();
        StructureConstants { p: field.p, level, table, unit: ring.coeffs(ring.one()) }
    }
}

/// A finite commutative `F_p`-algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpAlgebra(pub StructureConstants);

/// A finite commutative algebra, free over `Z/p^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatAlgebra(pub StructureConstants);

impl std::ops::Deref for FpAlgebra {
    type Target = StructureConstants;
    fn deref(&self) -> &StructureConstants {
        &self.0
    }
}

impl std::ops::Deref for FlatAlgebra {
    type Target = StructureConstants;
    fn deref(&self) -> &StructureConstants {
        &self.0
    }
}

impl FpAlgebra {
    pub fn new(p: u64, table: Vec<Vec<Vec<u64>>>, unit: Vec<u64>) -> Result<Self, WrinkleError> {
        Ok(FpAlgebra(StructureConstants::new(p, 1, table, unit)?))
    }

    pub fn field(field: FieldSpec) -> Self {
        FpAlgebra(StructureConstants::galois(field, 1))
    }

    pub fn product(&self, other: &FpAlgebra) -> Self {
        FpAlgebra(self.0.product(&other.0))
    }

    pub fn frobenius(&self, x: &[u64]) -> Vec<u64> {
        self.pow(x, self.p)
    }

    /// Matrix of the (linear) Frobenius, column `j` the image of `e_j`.
    pub fn frobenius_images(&self) -> Vec<Vec<u64>> {
        (0..self.dim()).map(|j| self.frobenius(&self.basis_vector(j))).collect()
    }

    pub fn frobenius_is_surjective(&self) -> Result<bool, WrinkleError> {
        let imgs: std::collections::HashSet<Vec<u64>> = self.elements()?.iter().map(|x| self.frobenius(x)).collect();
        Ok(imgs.len() as u64 == self.p.pow(self.dim() as u32))
    }

    /// Elements of the kernel of the Frobenius.
    pub fn frobenius_kernel(&self) -> Result<Vec<Vec<u64>>, WrinkleError> {
        Ok(self.elements()?.into_iter().filter(|x| self.frobenius(x).iter().all(|&c| c == 0)).collect())
    }

    fn frobenius_preimage(&self, y: &[u64]) -> Result<Option<Vec<u64>>, WrinkleError> {
        Ok(self.elements()?.into_iter().find(|x| self.frobenius(x) == y))
    }

    /// `sum_(0 < i < p) x^i y^(p-i) / (i! (p-i)!)`, the cross terms of
    /// `gamma_p(x + y)`.
    pub fn cross_terms(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut acc = self.zero();
        for i in 1..p {
            let c = inv_mod_p(factorial_mod(i, p) * factorial_mod(p - i, p) % p, p);
            let t = self.mul(&self.pow(x, i), &self.pow(y, p - i));
            acc = self.add(&acc, &self.scale(c, &t));
        }
        acc
    }

    /// `sum_(0 < i < p) C_i x^i y^(p-i)` with `C_i = binom(p, i) / p`: the
    /// carry of `(X + Y)^p` over `X^p + Y^p`.
    pub fn carry(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut acc = self.zero();
        for i in 1..p {
            let c = binomial(p, i) / p;
            let t = self.mul(&self.pow(x, i), &self.pow(y, p - i));
            acc = self.add(&acc, &self.scale(c, &t));
        }
        acc
    }

    pub fn as_bilinear(&self) -> Result<Bilinear, WrinkleError> {
        let field = FieldSpec::prime(self.p);
        let k = field.field();
        let v = TorsionModule::vector_space(field, self.dim());
        let table = self.table.iter().map(|row| row.iter().map(|c| c.iter().map(|&x| k.from_int(x as i64)).collect()).collect()).collect();
        Ok(Bilinear::new(v.clone(), v.clone(), v, table)?)
    }
}

fn factorial_mod(n: u64, p: u64) -> u64 {
    (1..=n).fold(1, |acc, i| acc * i % p)
}

impl FlatAlgebra {
    pub fn new(p: u64, table: Vec<Vec<Vec<u64>>>, unit: Vec<u64>) -> Result<Self, WrinkleError> {
        Ok(FlatAlgebra(StructureConstants::new(p, 2, table, unit)?))
    }

    /// `W_2(F_q)`.
    pub fn galois(field: FieldSpec) -> Self {
        FlatAlgebra(StructureConstants::galois(field, 2))
    }

    pub fn reduction(&self) -> FpAlgebra {
        FpAlgebra(self.reduce_mod_p())
    }
}

/// An `F_p`-algebra with a `p`-th divided power on the kernel of its
/// Frobenius, tabulated on every kernel element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WrinkledAlgebra {
    pub algebra: FpAlgebra,
    /// Kernel elements, in the enumeration order of the algebra.
    pub kernel: Vec<Vec<u64>>,
    pub gamma: Vec<Vec<u64>>,
    pub frobenius_surjective: bool,
}

impl WrinkledAlgebra {
    /// Extends `gamma_p` from values on a spanning set of the kernel by
    /// `gamma(a x) = a gamma(x)` for `a` in `F_p` and the sum rule, then checks
    /// the axioms on all of `A x I` and `I x I`.
    pub fn new(algebra: FpAlgebra, values: &[(Vec<u64>, Vec<u64>)]) -> Result<Self, WrinkleError> {
        let p = algebra.p;
        let kernel = algebra.frobenius_kernel()?;
        let mut table: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
        table.insert(algebra.zero(), algebra.zero());
        let mut queue: VecDeque<Vec<u64>> = VecDeque::from([algebra.zero()]);
        let gens: Vec<(Vec<u64>, Vec<u64>)> =
            values.iter().map(|(x, g)| (x.iter().map(|c| c % p).collect(), g.iter().map(|c| c % p).collect())).collect();
        for (x, _) in &gens {
            if !kernel.contains(x) {
                return Err(WrinkleError::Axiom(format!("{x:?} is not in the kernel of the Frobenius")));
            }
        }
        while let Some(x) = queue.pop_front() {
            for (y, gy) in &gens {
                for a in 1..p {
                    let ay = algebra.scale(a, y);
                    let g_ay = algebra.scale(a, gy);
                    let s = algebra.add(&x, &ay);
                    let gs = algebra.add(&algebra.add(&table[&x], &g_ay), &algebra.cross_terms(&x, &ay));
                    match table.get(&s) {
                        Some(old) if *old != gs => {
                            return Err(WrinkleError::Axiom(format!("the given values force two values at {s:?}")));
                        }
                        Some(_) => {}
                        None => {
                            table.insert(s.clone(), gs);
                            queue.push_back(s);
                        }
                    }
                }
            }
        }
        if table.len() != kernel.len() {
            return Err(WrinkleError::Axiom("the given elements do not span the kernel of the Frobenius".into()));
        }
        let gamma = kernel.iter().map(|x| table[x].clone()).collect();
        let w = WrinkledAlgebra { frobenius_surjective: algebra.frobenius_is_surjective()?, algebra, kernel, gamma };
        w.check_axioms()?;
        Ok(w)
    }

    /// The trivial divided power on a perfect algebra.
    pub fn perfect(algebra: FpAlgebra) -> Result<Self, WrinkleError> {
        Self::new(algebra, &[])
    }

    pub fn gamma_of(&self, x: &[u64]) -> Option<&Vec<u64>> {
        self.kernel.iter().position(|k| k == x).map(|i| &self.gamma[i])
    }

    pub fn check_axioms(&self) -> Result<(), WrinkleError> {
        let a = &self.algebra;
        let index: HashMap<&Vec<u64>, usize> = self.kernel.iter().enumerate().map(|(i, x)| (x, i)).collect();
        for (i, x) in self.kernel.iter().enumerate() {
            for b in a.elements()? {
                let bx = a.mul(&b, x);
                let want = a.mul(&a.frobenius(&b), &self.gamma[i]);
                if self.gamma[index[&bx]] != want {
                    return Err(WrinkleError::Axiom(format!("gamma(a x) != a^p gamma(x) at a = {b:?}, x = {x:?}")));
                }
            }
            for (j, y) in self.kernel.iter().enumerate() {
                let s = a.add(x, y);
                let want = a.add(&a.add(&self.gamma[i], &self.gamma[j]), &a.cross_terms(x, y));
                if self.gamma[index[&s]] != want {
                    return Err(WrinkleError::Axiom(format!("sum rule fails at x = {x:?}, y = {y:?}")));
                }
            }
        }
        Ok(())
    }

    /// `gamma_p(I)` inside `I`.
    pub fn values_in_kernel(&self) -> bool {
        self.gamma.iter().all(|g| self.kernel.contains(g))
    }
}

/// `R -> (R/p, gamma_p)` with `gamma_p(x) = -y` where `X^p = pY`.
pub fn psi2(r: &FlatAlgebra) -> Result<WrinkledAlgebra, WrinkleError> {
    let p = r.p;
    let a = r.reduction();
    let kernel = a.frobenius_kernel()?;
    let mut values = Vec::new();
    for x in &kernel {
        let xp = r.pow(x, p);
        if xp.iter().any(|c| c % p != 0) {
            return Err(WrinkleError::Invariant(format!("X^p is not divisible by p at x = {x:?}")));
        }
        let y: Vec<u64> = xp.iter().map(|c| (c / p) % p).collect();
        values.push((x.clone(), a.neg(&y)));
    }
    WrinkledAlgebra::new(a, &values)
}

/// Checks recorded while lifting a wrinkled algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftCertificate {
    pub rank: usize,
    pub log_gamma: u64,
    pub log_ideal: u64,
    pub ideal_generators: usize,
    /// Cyclic levels of `Gamma^p(A) / I`.
    pub quotient_levels: Vec<u32>,
    pub free_of_rank: bool,
    pub frobenius_surjective: bool,
    pub reduces_to_input: bool,
    pub round_trip: bool,
}

impl LiftCertificate {
    pub fn holds(&self) -> bool {
        self.free_of_rank && self.frobenius_surjective && self.reduces_to_input && self.round_trip
    }
}

/// The subgroup `I` of `Gamma^p(A)`: images of the formal sums
/// `[x_1]_p + .. + [x_m]_p` with `s = x_1 + .. + x_m` in the kernel of the
/// Frobenius and `-gamma_p(s)` equal to the carry of the sum.
///
/// Formal sums map to the group `A x A` with
/// `(s, t) + (s', t') = (s + s', t + t' + carry(s, s'))`, `[x] -> (x, 0)`, and
/// the condition is a subgroup of the image. The preimage is generated by
/// Schreier generators of the kernel and one word per admissible image.
fn lift_ideal(w: &WrinkledAlgebra, gm: &GammaModule) -> Result<Vec<Vec<Gr>>, WrinkleError> {
    let a = &w.algebra;
    let points = a.elements()?;
    let n = points.len();
    let modulus = a.p * a.p;
    let add = |u: &(Vec<u64>, Vec<u64>), v: &(Vec<u64>, Vec<u64>)| -> (Vec<u64>, Vec<u64>) {
        (a.add(&u.0, &v.0), a.add(&a.add(&u.1, &v.1), &a.carry(&u.0, &v.0)))
    };
    let origin = (a.zero(), a.zero());
    let mut words: HashMap<(Vec<u64>, Vec<u64>), Vec<u64>> = HashMap::new();
    words.insert(origin.clone(), vec![0; n]);
    let mut order = vec![origin.clone()];
    let mut queue = VecDeque::from([origin]);
    let mut relations: Vec<Vec<u64>> = Vec::new();
    while let Some(h) = queue.pop_front() {
        for (xi, x) in points.iter().enumerate() {
            let next = add(&h, &(x.clone(), a.zero()));
            let mut word = words[&h].clone();
            word[xi] = (word[xi] + 1) % modulus;
            match words.get(&next) {
                Some(old) => {
                    let rel: Vec<u64> = word.iter().zip(old).map(|(u, v)| (u + modulus - v) % modulus).collect();
                    if rel.iter().any(|&c| c != 0) {
                        relations.push(rel);
                    }
                }
                None => {
                    words.insert(next.clone(), word);
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    for h in &order {
        if let Some(g) = w.gamma_of(&h.0) {
            if a.add(&h.1, g).iter().all(|&c| c == 0) {
                relations.push(words[h].clone());
            }
        }
    }
    let ring = gm.ring();
    let symbols: Vec<Vec<Gr>> = points.iter().map(|x| gm.symbol(&x.iter().map(|&c| ring.from_int(c as i64)).collect::<Vec<_>>())).collect();
    let gens = relations
        .iter()
        .map(|word| {
            let mut acc = gm.zero();
            for (c, s) in word.iter().zip(&symbols) {
                if *c != 0 {
                    acc = gm.module.add(&acc, &gm.module.scale(ring.from_int(*c as i64), s));
                }
            }
            acc
        })
        .collect();
    Ok(gens)
}

/// The flat lift `Gamma^p_Z(A) / I` of a wrinkled algebra, with basis
/// `[x_i]_p` for `x_i^p = e_i`.
pub fn lift_2flat(w: &WrinkledAlgebra) -> Result<(FlatAlgebra, LiftCertificate), WrinkleError> {
    let a = &w.algebra;
    let p = a.p;
    let d = a.dim();
    let field = FieldSpec::prime(p);
    let base = TorsionModule::vector_space(field, d);
    let gm = GammaModule::new(&base, p as u32)?;
    let ring = gm.ring();
    let mult = gamma::gamma_bilinear(&a.as_bilinear()?, p as u32)?;
    let gens = lift_ideal(w, &gm)?;
    let ideal = gm.module.span(&gens);
    let quotient_levels = ideal.quotient_levels();
    let mut cert = LiftCertificate {
        rank: d,
        log_gamma: gm.module.log_card(),
        log_ideal: ideal.log_card(),
        ideal_generators: gens.len(),
        free_of_rank: quotient_levels == vec![2; d],
        quotient_levels,
        frobenius_surjective: w.frobenius_surjective,
        reduces_to_input: false,
        round_trip: false,
    };
    if !cert.free_of_rank || !cert.frobenius_surjective {
        return Err(WrinkleError::Certification(Box::new(cert)));
    }
    let to_gr = |x: &[u64]| -> Vec<Gr> { x.iter().map(|&c| ring.from_int(c as i64)).collect() };
    let roots: Vec<Vec<u64>> =
        (0..d).map(|i| a.frobenius_preimage(&a.basis_vector(i)).map(|r| r.expect("surjective"))).collect::<Result<_, _>>()?;
    let basis: Vec<Vec<Gr>> = roots.iter().map(|x| gm.symbol(&to_gr(x))).collect();
    // coordinates of a symbol [z]_p in the basis, modulo the ideal
    let express = |z: &[u64]| -> Option<Vec<u64>> {
        let target = gm.symbol(&to_gr(z));
        let low = a.frobenius(z);
        let tries = p.pow(d as u32);
        (0..tries).find_map(|mut t| {
            let coeffs: Vec<u64> = low
                .iter()
                .map(|&c| {
                    let c = c + p * (t % p);
                    t /= p;
                    c
                })
                .collect();
            let mut diff = target.clone();
            for (c, b) in coeffs.iter().zip(&basis) {
                diff = gm.module.add(&diff, &gm.module.scale(ring.neg(ring.from_int(*c as i64)), b));
            }
            ideal.contains(&diff).then_some(coeffs)
        })
    };
    let mut table = vec![vec![vec![0; d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            // [x_i]_p [x_j]_p = [x_i x_j]_p
            let prod = mult.apply(&basis[i], &basis[j]);
            debug_assert_eq!(prod, gm.symbol(&to_gr(&a.mul(&roots[i], &roots[j]))));
            table[i][j] = express(&a.mul(&roots[i], &roots[j]))
                .ok_or_else(|| WrinkleError::Invariant("product outside the span of the basis".into()))?;
        }
    }
    let unit = express(&a.unit).ok_or_else(|| WrinkleError::Invariant("unit outside the span of the basis".into()))?;
    let flat = FlatAlgebra::new(p, table, unit)?;
    cert.reduces_to_input = flat.reduction() == *a;
    cert.round_trip = cert.reduces_to_input && psi2(&flat).is_ok_and(|back| back == *w);
    if !cert.holds() {
        return Err(WrinkleError::Certification(Box::new(cert)));
    }
    Ok((flat, cert))
}

/// A ring isomorphism `W_2(F_q) -> R`, sending the generator to a root of its
/// minimal relation in `R`; returned as the images of `1, g, .., g^(r-1)`.
pub fn galois_isomorphism(field: FieldSpec, r: &FlatAlgebra) -> Result<Option<Vec<Vec<u64>>>, WrinkleError> {
    let gr = FlatAlgebra::galois(field);
    if gr.dim() != r.dim() || gr.p != r.p {
        return Ok(None);
    }
    let deg = field.r;
    let g = gr.basis_vector(if deg == 1 { 0 } else { 1 });
    let relation = gr.pow(&g, deg as u64);
    for z in r.elements()? {
        let powers: Vec<Vec<u64>> = (0..deg).map(|i| r.pow(&z, i as u64)).collect();
        let rhs = powers.iter().zip(&relation).fold(r.zero(), |acc, (v, &c)| r.add(&acc, &r.scale(c, v)));
        if r.pow(&z, deg as u64) != rhs || !invertible_mod_p(&powers, r.p) {
            continue;
        }
        let image = |x: &[u64]| x.iter().zip(&powers).fold(r.zero(), |acc, (&c, v)| r.add(&acc, &r.scale(c, v)));
        let ok = (0..deg)
            .all(|i| (0..deg).all(|j| image(&gr.mul(&gr.basis_vector(i), &gr.basis_vector(j))) == r.mul(&powers[i], &powers[j])))
            && image(&gr.unit) == r.unit;
        if ok {
            return Ok(Some(powers));
        }
    }
    Ok(None)
}

fn invertible_mod_p(cols: &[Vec<u64>], p: u64) -> bool {
    let n = cols.len();
    let mut m: Vec<Vec<u64>> = (0..n).map(|i| cols.iter().map(|c| c[i] % p).collect()).collect();
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| m[r][col] != 0) else { return false };
        m.swap(col, pr);
        let inv = inv_mod_p(m[col][col], p);
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let f = m[r][col] * inv % p;
                for c in 0..n {
                    m[r][c] = (m[r][c] + p * p - f * m[col][c] % p) % p;
                }
            }
        }
    }
    true
}

/// Outcome of the Frobenius lifting criterion on one flat algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusLiftReport {
    /// `gamma_p` takes values in the kernel of the Frobenius.
    pub criterion: bool,
    /// A ring endomorphism reducing to the Frobenius, by the images of the
    /// basis, if one exists.
    pub lift: Option<Vec<Vec<u64>>>,
    pub agrees: bool,
}

/// Searches all endomorphisms of `R` reducing to the Frobenius mod `p` and
/// compares with the criterion on `psi2(R)`.
pub fn frobenius_lift_criterion(r: &FlatAlgebra) -> Result<FrobeniusLiftReport, WrinkleError> {
    let w = psi2(r)?;
    let criterion = w.values_in_kernel();
    let a = &w.algebra;
    let p = r.p;
    let d = r.dim();
    let base: Vec<Vec<u64>> = (0..d).map(|j| a.frobenius(&a.basis_vector(j))).collect();
    let count = (p as u128).pow((d * d) as u32);
    if count > MAX_ELEMENTS as u128 * 16 {
        return Err(WrinkleError::TooLarge { count, cap: MAX_ELEMENTS * 16 });
    }
    let mut lift = None;
    for mut t in 0..count as u64 {
        let images: Vec<Vec<u64>> = base
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&c| {
                        let v = c + p * (t % p);
                        t /= p;
                        v
                    })
                    .collect()
            })
            .collect();
        let apply = |x: &[u64]| x.iter().zip(&images).fold(r.zero(), |acc, (&c, v)| r.add(&acc, &r.scale(c, v)));
        let hom = apply(&r.unit) == r.unit && (0..d).all(|i| (0..d).all(|j| apply(&r.table[i][j]) == r.mul(&images[i], &images[j])));
        if hom {
            lift = Some(images);
            break;
        }
    }
    Ok(FrobeniusLiftReport { agrees: criterion == lift.is_some(), criterion, lift })
}

/// The perfect algebras used for the round trip.
pub fn catalog() -> Vec<(String, FpAlgebra)> {
    let f = |p, r| FpAlgebra::field(FieldSpec::new(p, r).expect("tabulated field"));
    vec![
        ("F_2".into(), f(2, 1)),
        ("F_3".into(), f(3, 1)),
        ("F_4".into(), f(2, 2)),
        ("F_8".into(), f(2, 3)),
        ("F_2 x F_2".into(), f(2, 1).product(&f(2, 1))),
        ("F_2 x F_4".into(), f(2, 1).product(&f(2, 2))),
        ("F_9".into(), f(3, 2)),
    ]
}

/// Flat algebras over `Z/4` for `psi2` and the lifting criterion.
pub fn flat_examples() -> Vec<(String, FlatAlgebra)> {
    let z4 = FlatAlgebra::galois(FieldSpec::prime(2));
    // basis 1, x
    let dual = |c: u64| FlatAlgebra::new(2, vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![c, 0]]], vec![1, 0]).expect("valid");
    vec![
        ("Z/4".into(), z4.clone()),
        ("Z/4 x Z/4".into(), FlatAlgebra(z4.0.product(&z4.0))),
        ("Z/4[x]/(x^2 - 2)".into(), dual(2)),
        ("Z/4[x]/(x^2)".into(), dual(0)),
    ]
}

/// Round trip and comparison with `W_2(F_q)` on one perfect algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogReport {
    pub name: String,
    pub certificate: LiftCertificate,
    /// `Some(true)` when the algebra is a field and the lift is `W_2` of it.
    pub galois_isomorphic: Option<bool>,
}

pub fn catalog_report(name: &str, a: &FpAlgebra, field: Option<FieldSpec>) -> Result<CatalogReport, WrinkleError> {
    let w = WrinkledAlgebra::perfect(a.clone())?;
    let (flat, certificate) = lift_2flat(&w)?;
    let galois_isomorphic = match field {
        Some(f) => Some(galois_isomorphism(f, &flat)?.is_some()),
        None => None,
    };
    Ok(CatalogReport { name: name.into(), certificate, galois_isomorphic })
}

/// `Gamma^p_Z(Z/p^m)` modulo `[x]_1 [y]_(p-1) - [x y^(p-1)]_1 [1]_(p-1)`,
/// compared with `W_(m+1)(F_p) = Z/p^(m+1)` through `[x]_p -> x^p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WittPresentation {
    pub p: u64,
    pub m: u32,
    pub log_gamma: u64,
    pub log_relations: u64,
    /// Cyclic levels of the quotient.
    pub quotient_levels: Vec<u32>,
    pub unit_is_identity: bool,
    pub symbols_match: bool,
    pub teichmuller_compatible: bool,
}

impl WittPresentation {
    pub fn holds(&self) -> bool {
        self.quotient_levels == vec![self.m + 1] && self.unit_is_identity && self.symbols_match && self.teichmuller_compatible
    }
}

pub fn witt_from_divided_powers(m: u32, p: u64) -> Result<WittPresentation, WrinkleError> {
    let field = FieldSpec::prime(p);
    let base = TorsionModule::free(field, m, 1);
    let g1 = GammaModule::new(&base, 1)?;
    let gq = GammaModule::new(&base, p as u32 - 1)?;
    let gp = GammaModule::new(&base, p as u32)?;
    let low = field.ring(m);
    let high = field.ring(m + 1);
    let elems: Vec<Gr> = (0..p.pow(m)).map(|i| low.from_int(i as i64)).collect();
    let one = low.one();
    let mut rels = Vec::new();
    for &x in &elems {
        for &y in &elems {
            let lhs = gamma::mul(&gp, &g1, &g1.symbol(&[x]), &gq, &gq.symbol(&[y]));
            let z = low.mul(x, low.pow(y, p - 1));
            let rhs = gamma::mul(&gp, &g1, &g1.symbol(&[z]), &gq, &gq.symbol(&[one]));
            rels.push(gp.module.add(&lhs, &gp.module.scale(gp.ring().neg(gp.ring().one()), &rhs)));
        }
    }
    let span = gp.module.span(&rels);
    let quotient_levels = span.quotient_levels();
    // ring structure: [x]_p [y]_p = [x y]_p
    let b = Bilinear::new(base.clone(), base.clone(), base.clone(), vec![vec![vec![low.one()]]])?;
    let mult = gamma::gamma_bilinear(&b, p as u32)?;
    let unit = gp.symbol(&[one]);
    let unit_is_identity = mult.apply(&unit, &unit) == unit;
    // [x]_p = x^p [1]_p modulo the relations
    let ring = gp.ring();
    let lift_pow = |x: Gr| -> Gr { high.pow(high.from_int(low.coeffs(x)[0] as i64), p) };
    let symbols_match = elems.iter().all(|&x| {
        let c = lift_pow(x);
        let diff = gp.module.add(&gp.symbol(&[x]), &gp.module.scale(ring.neg(ring.from_int(high.coeffs(c)[0] as i64)), &unit));
        span.contains(&diff)
    });
    let teichmuller_compatible = (0..p).all(|x| {
        let t_low = low.teichmuller(low.from_int(x as i64));
        high.teichmuller(high.from_int(x as i64)) == lift_pow(t_low)
    });
    Ok(WittPresentation {
        p,
        m,
        log_gamma: gp.module.log_card(),
        log_relations: span.log_card(),
        quotient_levels,
        unit_is_identity,
        symbols_match,
        teichmuller_compatible,
    })
}

/// `c(x, y) = sum_(0 < i < p) (-1)^(i-1) / i  x^i y^(p-i)` in `S^p(V)`, for
/// `x, y` in `V = F_p^d`; symmetric powers are homogeneous polynomials.
pub fn frobenius_cocycle(p: u64, x: &[u64], y: &[u64]) -> Poly {
    let k = FieldSpec::prime(p).field();
    let d = x.len();
    let lx = Poly::linear(&k, &x.iter().map(|&c| k.from_int(c as i64)).collect::<Vec<_>>());
    let ly = Poly::linear(&k, &y.iter().map(|&c| k.from_int(c as i64)).collect::<Vec<_>>());
    let mut acc = Poly::zero(d);
    for i in 1..p {
        let sign = if i % 2 == 1 { 1 } else { p - 1 };
        let c = sign * inv_mod_p(i, p) % p;
        let t = lx.pow(&k, i).mul(&k, &ly.pow(&k, p - i)).scale(&k, k.from_int(c as i64));
        acc = acc.add(&k, &t);
    }
    acc.nvars = d;
    acc
}

/// Checks on the Frobenius cocycle for `V = F_p^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub p: u64,
    pub d: usize,
    /// The scalar identity in `F_p[X, Y, Z]`, which implies it in every
    /// symmetric algebra.
    pub identity_universal: bool,
    pub identity_exhaustive: Option<bool>,
    pub symmetric: bool,
    /// Cyclic levels of `V x_c S^p(V)` and of `Gamma^p(V)`.
    pub extension_levels: Vec<u32>,
    pub gamma_levels: Vec<u32>,
}

impl CocycleReport {
    pub fn holds(&self) -> bool {
        self.identity_universal && self.identity_exhaustive != Some(false) && self.symmetric && self.extension_levels == self.gamma_levels
    }
}

fn add_vec(p: u64, x: &[u64], y: &[u64]) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| (a + b) % p).collect()
}

pub fn cocycle_report(p: u64, d: usize) -> Result<CocycleReport, WrinkleError> {
    let field = FieldSpec::prime(p);
    let k = field.field();
    // universal identity with scalar variables
    let c3 = |a: &Poly, b: &Poly| -> Poly {
        let mut acc = Poly::zero(3);
        for i in 1..p {
            let sign = if i % 2 == 1 { 1 } else { p - 1 };
            let c = sign * inv_mod_p(i, p) % p;
            acc = acc.add(&k, &a.pow(&k, i).mul(&k, &b.pow(&k, p - i)).scale(&k, k.from_int(c as i64)));
        }
        acc
    };
    let (x, y, z) = (Poly::var(&k, 0, 3), Poly::var(&k, 1, 3), Poly::var(&k, 2, 3));
    let lhs = c3(&x, &y).add(&k, &c3(&x.add(&k, &y), &z));
    let rhs = c3(&y, &z).add(&k, &c3(&x, &y.add(&k, &z)));
    let identity_universal = lhs == rhs && c3(&x, &y) == c3(&y, &x);
    let points = TorsionModule::vector_space(field, d).elements();
    let vecs: Vec<Vec<u64>> = points.iter().map(|v| v.iter().map(|&c| k.coeffs(c)[0]).collect()).collect();
    let mut symmetric = true;
    for u in &vecs {
        for v in &vecs {
            symmetric &= frobenius_cocycle(p, u, v) == frobenius_cocycle(p, v, u);
        }
    }
    let identity_exhaustive = if vecs.len().pow(3) <= 20_000 {
        let mut ok = true;
        for u in &vecs {
            for v in &vecs {
                let cuv = frobenius_cocycle(p, u, v);
                for w in &vecs {
                    let l = cuv.add(&k, &frobenius_cocycle(p, &add_vec(p, u, v), w));
                    let r = frobenius_cocycle(p, v, w).add(&k, &frobenius_cocycle(p, u, &add_vec(p, v, w)));
                    ok &= l == r;
                }
            }
        }
        Some(ok)
    } else {
        None
    };
    // invariants of the extension: p (v, s) = (0, p s + sum of carries) and p s = 0
    let sym_dim = gamma::composition_count(p as u32, d) as u32;
    let mut killed_by_p = 0u32;
    for v in &vecs {
        let mut acc = Poly::zero(d);
        let mut partial = vec![0; d];
        for _ in 1..p {
            acc = acc.add(&k, &frobenius_cocycle(p, &partial, v));
            partial = add_vec(p, &partial, v);
        }
        acc = acc.add(&k, &frobenius_cocycle(p, &partial, v));
        if acc.is_zero() {
            killed_by_p += 1;
        }
    }
    // killed_by_p is a power of p; the elements of order p number p^(log + sym_dim)
    let log_torsion = (killed_by_p as f64).log(p as f64).round() as u32 + sym_dim;
    let log_total = d as u32 + sym_dim;
    let mut extension_levels = vec![1; (2 * log_torsion - log_total) as usize];
    extension_levels.extend(vec![2; (log_total - log_torsion) as usize]);
    let gm = GammaModule::new(&TorsionModule::vector_space(field, d), p as u32)?;
    let mut gamma_levels: Vec<u32> = gm.module.orders();
    gamma_levels.sort_unstable();
    Ok(CocycleReport { p, d, identity_universal, identity_exhaustive, symmetric, extension_levels, gamma_levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witt_presentation() {
        for (p, m) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let w = witt_from_divided_powers(m, p).unwrap();
            assert!(w.holds(), "{w:?}");
        }
        assert_eq!(witt_from_divided_powers(1, 2).unwrap().log_relations, 0);
    }

    #[test]
    fn psi2_examples() {
        let ex = flat_examples();
        let w = psi2(&ex[0].1).unwrap();
        assert_eq!(w.kernel, vec![vec![0]]);
        let w = psi2(&ex[1].1).unwrap();
        assert_eq!(w.kernel.len(), 1);
        assert!(w.frobenius_surjective);
        let w = psi2(&ex[2].1).unwrap();
        assert_eq!(w.kernel, vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(w.gamma_of(&[0, 1]), Some(&vec![1, 0]));
        assert!(!w.frobenius_surjective);
        assert!(!w.values_in_kernel());
        let w = psi2(&ex[3].1).unwrap();
        assert_eq!(w.gamma_of(&[0, 1]), Some(&vec![0, 0]));
        assert!(w.values_in_kernel());
    }

    #[test]
    fn lifting_criterion_matches_search() {
        let want = [true, true, false, true];
        for ((name, r), expected) in flat_examples().iter().zip(want) {
            let rep = frobenius_lift_criterion(r).unwrap();
            assert!(rep.agrees, "{name}: {rep:?}");
            assert_eq!(rep.criterion, expected, "{name}");
        }
    }

    #[test]
    fn round_trip_on_catalog() {
        let fields = [Some((2, 1)), Some((3, 1)), Some((2, 2)), Some((2, 3)), None, None, Some((3, 2))];
        for ((name, a), f) in catalog().iter().zip(fields) {
            let field = f.map(|(p, r)| FieldSpec::new(p, r).unwrap());
            let rep = catalog_report(name, a, field).unwrap();
            assert!(rep.certificate.holds(), "{name}: {rep:?}");
            assert_ne!(rep.galois_isomorphic, Some(false), "{name}");
        }
    }

    #[test]
    fn lift_of_f4_is_galois_ring() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        let (flat, _) = lift_2flat(&WrinkledAlgebra::perfect(FpAlgebra::field(f4)).unwrap()).unwrap();
        assert_eq!(flat.dim(), 2);
        assert!(galois_isomorphism(f4, &flat).unwrap().is_some());
        // F_2 x F_2 is not a field lift
        let split = FlatAlgebra(FlatAlgebra::galois(FieldSpec::prime(2)).0.product(&FlatAlgebra::galois(FieldSpec::prime(2)).0));
        assert!(galois_isomorphism(f4, &split).unwrap().is_none());
    }

    #[test]
    fn non_surjective_frobenius_is_reported() {
        let w = psi2(&flat_examples()[2].1).unwrap();
        match lift_2flat(&w) {
            Err(WrinkleError::Certification(c)) => assert!(!c.frobenius_surjective),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_gamma_is_rejected() {
        // A = F_2[x]/(x^2): 1 is outside the kernel, any value on x is allowed
        let a = flat_examples()[2].1.reduction();
        assert!(WrinkledAlgebra::new(a.clone(), &[(vec![1, 0], vec![0, 0])]).is_err());
        assert!(WrinkledAlgebra::new(a, &[(vec![0, 1], vec![1, 1])]).is_ok());
    }

    #[test]
    fn cocycle_examples() {
        let k = FieldSpec::prime(2).field();
        let c = frobenius_cocycle(2, &[1], &[1]);
        assert_eq!(c.coeff(&[2]), k.one());
        let c = frobenius_cocycle(3, &[1, 0], &[0, 1]);
        let k3 = FieldSpec::prime(3).field();
        assert_eq!(c.coeff(&[2, 1]), k3.one());
        assert_eq!(c.coeff(&[1, 2]), k3.one());
        assert!(frobenius_cocycle(3, &[1, 2], &[0, 0]).is_zero());
        for (p, d) in [(2u64, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)] {
            let r = cocycle_report(p, d).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }
}
