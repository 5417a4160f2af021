//! The tense product `M (x)_n N = (M (x) N) / Ker(Phi)` of `W_n(k)`-modules and
//! its numerical shadows.
//!
//! Modules here are [`TorsionModule`]s at level `n`. A summand of weight `n`
//! is a formal `W_0`; it is kept so that valuations stay additive.

use serde::{Deserialize, Serialize};

use crate::chainring::{howell, Gr};
use crate::wmodule::{ModuleError, ModuleMap, TorsionModule};

fn levels(m: &TorsionModule) -> Vec<u32> {
    m.orders()
}

/// `M (x)_n N` together with the quotient map from `M (x) N`.
pub fn tense_product(m: &TorsionModule, n_mod: &TorsionModule, n: u32) -> (TorsionModule, ModuleMap) {
    assert_eq!(m.m, n);
    assert_eq!(n_mod.m, n);
    let mut tensor_w = Vec::new();
    let mut tense_w = Vec::new();
    for &a in &levels(m) {
        for &b in &levels(n_mod) {
            tensor_w.push(n - a.min(b));
            tense_w.push(n - (a + b).saturating_sub(n));
        }
    }
    let tensor = TorsionModule { field: m.field, m: n, weights: tensor_w };
    let tense = TorsionModule { field: m.field, m: n, weights: tense_w };
    let images = (0..tensor.dim()).map(|i| tense.basis_vector(i)).collect();
    let q = ModuleMap::new(tensor, tense.clone(), images).expect("generator to generator is well defined");
    (tense, q)
}

/// Tense product computed from scratch: the span of the Gram matrix of
/// `M (x) N` against `M^v (x) N^v`, for arbitrary generating sets. Returns
/// the sorted levels of the cyclic summands.
pub fn tense_levels_by_gram(m: &TorsionModule, gens_m: &[Vec<Gr>], nm: &TorsionModule, gens_n: &[Vec<Gr>]) -> Vec<u32> {
    let ring = m.ring();
    let mut rows = Vec::new();
    for x in gens_m {
        for y in gens_n {
            let mut row = Vec::new();
            for i in 0..m.dim() {
                for j in 0..nm.dim() {
                    let a = m.pairing(x, &m.basis_vector(i));
                    let b = nm.pairing(y, &nm.basis_vector(j));
                    row.push(ring.mul(a, b));
                }
            }
            rows.push(row);
        }
    }
    howell(ring, m.dim() * nm.dim(), rows).invariant_levels()
}

/// `v_n(M)`, the largest `i` in `[-n, 0]` with `M / p^(n+i)` free.
pub fn valuation(m: &TorsionModule) -> i32 {
    match levels(m).into_iter().min() {
        None => 0,
        Some(a) => a as i32 - m.m as i32,
    }
}

/// Sum of valuations with everything at or below `-n` identified with `-n`.
pub fn clamp_add(a: i32, b: i32, n: u32) -> i32 {
    (a + b).max(-(n as i32))
}

/// Trace `M (x)_n M^v -> W_{n+v}(k)`, or the same formula at another target
/// level (rejected when it does not factor).
pub fn trace_at(m: &TorsionModule, target_level: u32) -> Result<ModuleMap, ModuleError> {
    let n = m.m;
    let (tense, _) = tense_product(m, &m.dual(), n);
    let target = TorsionModule::new(m.field, n, vec![n - target_level.min(n)])?;
    let ring = m.ring();
    let d = m.dim();
    let mut images = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let v = if i == j { ring.mul_p_pow(ring.one(), m.weights[i]) } else { Gr::ZERO };
            images.push(vec![v]);
        }
    }
    ModuleMap::new(tense, target, images)
}

/// Largest target level at which the evaluation map factors through the
/// tense quotient, found by trying every level.
pub fn max_factoring_level(m: &TorsionModule) -> u32 {
    (0..=m.m).rev().find(|&l| trace_at(m, l).is_ok()).unwrap_or(0)
}

pub fn trace(m: &TorsionModule) -> ModuleMap {
    let level = (m.m as i32 + valuation(m)) as u32;
    trace_at(m, level).expect("the trace factors at level n + v")
}

/// `Ch_n(M) = a_n + a_(n-1) X^-1 + ... + a_1 X^(-n+1)` with `a_i` the number of
/// summands `W_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernPoly {
    pub n: u32,
    /// `[a_n, ..., a_1]`
    pub coeffs: Vec<u64>,
}

impl ChernPoly {
    /// Exponent of the most negative term; `-n` for the zero polynomial.
    pub fn v_x(&self) -> i32 {
        match self.coeffs.iter().rposition(|&a| a != 0) {
            Some(j) => -(j as i32),
            None => -(self.n as i32),
        }
    }

    /// Product modulo `X^-n`.
    pub fn mul_trunc(&self, other: &ChernPoly) -> ChernPoly {
        let n = self.n as usize;
        let mut c = vec![0u64; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        ChernPoly { n: self.n, coeffs: c }
    }
}

pub fn chern(m: &TorsionModule) -> ChernPoly {
    let n = m.m;
    let mut coeffs = vec![0u64; n as usize];
    for a in levels(m) {
        if a >= 1 {
            coeffs[(n - a) as usize] += 1;
        }
    }
    ChernPoly { n, coeffs }
}

/// `M / p^k` as a module at level `k`.
pub fn reduce_level(m: &TorsionModule, k: u32) -> TorsionModule {
    let weights = levels(m).into_iter().map(|a| k - a.min(k)).collect();
    TorsionModule { field: m.field, m: k, weights }
}

/// The natural map `(M/p^n) (x)_n (N/p^n) -> (M (x)_{n+1} N) / p^n` on cyclic
/// generators, for `M = W_a`, `N = W_b` over `W_{n+1}`. Fails if generator to
/// generator is not well defined.
pub fn theta_map(field: crate::chainring::FieldSpec, a: u32, b: u32, n: u32) -> Result<ModuleMap, ModuleError> {
    let big = n + 1;
    let ma = TorsionModule::new(field, big, vec![big - a])?;
    let nb = TorsionModule::new(field, big, vec![big - b])?;
    let (lhs, _) = tense_product(&reduce_level(&ma, n), &reduce_level(&nb, n), n);
    let (t, _) = tense_product(&ma, &nb, big);
    let rhs = reduce_level(&t, n);
    let images = vec![rhs.basis_vector(0)];
    ModuleMap::new(lhs, rhs, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainring::FieldSpec;

    fn cyc(a: u32, n: u32) -> TorsionModule {
        TorsionModule::new(FieldSpec::prime(2), n, vec![n - a]).unwrap()
    }

    #[test]
    fn remark_examples() {
        let (t, _) = tense_product(&cyc(1, 2), &cyc(2, 2), 2);
        assert_eq!(t.orders(), vec![1]);
        let (t, _) = tense_product(&cyc(1, 2), &cyc(1, 2), 2);
        assert_eq!(t.log_card(), 0);
        let (t, _) = tense_product(&cyc(2, 2), &cyc(2, 2), 2);
        assert_eq!(t.orders(), vec![2]);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&cyc(2, 2)), 0);
        assert_eq!(valuation(&cyc(1, 2)), -1);
        let (t, _) = tense_product(&cyc(1, 2), &cyc(1, 2), 2);
        assert_eq!(valuation(&t), -2);
    }

    #[test]
    fn trace_examples() {
        let t = trace(&cyc(2, 2));
        assert_eq!(t.images, vec![vec![t.codomain.ring().one()]]);
        let t = trace(&cyc(1, 2));
        assert!(t.images[0][0].is_zero());
        for n in 1..=5 {
            for a in 1..=n {
                let m = cyc(a, n);
                let t = trace(&m);
                assert_eq!(!t.images[0][0].is_zero(), 2 * a > n);
                // the evaluation 1 -> p^(n-a) already vanishes at level n-a
                assert_eq!(max_factoring_level(&m), a.max(n - a));
                assert_eq!(max_factoring_level(&m) == a, 2 * a >= n);
            }
        }
    }

    #[test]
    fn chern_examples() {
        let f = FieldSpec::prime(2);
        let m = TorsionModule::new(f, 2, vec![0, 1]).unwrap();
        assert_eq!(chern(&m).coeffs, vec![1, 1]);
        assert_eq!(chern(&TorsionModule::free(f, 2, 0)).coeffs, vec![0, 0]);
        let prod = chern(&cyc(1, 2)).mul_trunc(&chern(&cyc(2, 2)));
        assert_eq!(prod.coeffs, vec![0, 1]);
        let (t, _) = tense_product(&cyc(1, 2), &cyc(2, 2), 2);
        assert_eq!(chern(&t), prod);
    }

    #[test]
    fn theta_exists_on_cyclic_pairs() {
        for n in 1..=5 {
            for a in 1..=n + 1 {
                for b in 1..=n + 1 {
                    assert!(theta_map(FieldSpec::prime(3), a, b, n).is_ok(), "{a} {b} {n}");
                }
            }
        }
    }

    #[test]
    fn commutative_and_associative_on_cyclic_triples() {
        for n in 1..=4 {
            for a in 0..=n {
                for b in 0..=n {
                    let (ab, _) = tense_product(&cyc(a, n), &cyc(b, n), n);
                    let (ba, _) = tense_product(&cyc(b, n), &cyc(a, n), n);
                    assert_eq!(ab.signature(), ba.signature());
                    for c in 0..=n {
                        let (l, _) = tense_product(&ab, &cyc(c, n), n);
                        let (bc, _) = tense_product(&cyc(b, n), &cyc(c, n), n);
                        let (r, _) = tense_product(&cyc(a, n), &bc, n);
                        assert_eq!(l.signature(), r.signature());
                    }
                }
            }
        }
    }
}
