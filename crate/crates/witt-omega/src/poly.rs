//! Sparse multivariate polynomials with coefficients in a Galois ring.
//!
//! The ring is passed to every operation; a polynomial only stores its
//! exponent vectors and coefficients.

use std::collections::BTreeMap;

use crate::chainring::{GaloisRing, Gr};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Gr>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: &GaloisRing, c: Gr, nvars: usize) -> Self {
        Self::monomial(ring, vec![0; nvars], c)
    }

    pub fn monomial(ring: &GaloisRing, exp: Vec<u32>, c: Gr) -> Self {
        let mut p = Self::zero(exp.len());
        let c = ring.reduce(c);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn var(ring: &GaloisRing, i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(ring, e, ring.one())
    }

    /// `sum_i c_i X_i`.
    pub fn linear(ring: &GaloisRing, coeffs: &[Gr]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            p = p.add(ring, &Self::var(ring, i, n).scale(ring, c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> Gr {
        self.terms.get(exp).copied().unwrap_or(Gr::ZERO)
    }

    fn add_term(&mut self, ring: &GaloisRing, exp: Vec<u32>, c: Gr) {
        let e = self.terms.entry(exp).or_insert(Gr::ZERO);
        *e = ring.add(*e, c);
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, ring: &GaloisRing, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(ring, e.clone(), c);
        }
        out
    }

    pub fn sub(&self, ring: &GaloisRing, other: &Poly) -> Poly {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg(&self, ring: &GaloisRing) -> Poly {
        self.scale(ring, ring.neg(ring.one()))
    }

    pub fn scale(&self, ring: &GaloisRing, c: Gr) -> Poly {
        let terms = self.terms.iter().map(|(e, &a)| (e.clone(), ring.mul(a, c))).filter(|(_, a)| !a.is_zero()).collect();
        Poly { nvars: self.nvars, terms }
    }

    pub fn mul(&self, ring: &GaloisRing, other: &Poly) -> Poly {
        let mut acc: BTreeMap<Vec<u32>, Gr> = BTreeMap::new();
        for (e1, &a) in &self.terms {
            for (e2, &b) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let slot = acc.entry(e).or_insert(Gr::ZERO);
                *slot = ring.add(*slot, ring.mul(a, b));
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Poly { nvars: self.nvars.max(other.nvars), terms: acc }
    }

    pub fn pow(&self, ring: &GaloisRing, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(ring, ring.one(), self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ring, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(ring, &base);
            }
        }
        acc
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == degree)
    }

    pub fn eval(&self, ring: &GaloisRing, point: &[Gr]) -> Gr {
        let mut acc = Gr::ZERO;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = ring.mul(t, ring.pow(point[i], k as u64));
                }
            }
            acc = ring.add(acc, t);
        }
        acc
    }

    /// Substitutes `subs[i]` for `X_i`.
    pub fn compose(&self, ring: &GaloisRing, subs: &[Poly]) -> Poly {
        let nv = subs.first().map_or(0, |s| s.nvars);
        let mut acc = Poly::zero(nv);
        for (e, &c) in &self.terms {
            let mut t = Poly::constant(ring, c, nv);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(ring, &subs[i].pow(ring, k as u64));
                }
            }
            acc = acc.add(ring, &t);
        }
        acc
    }

    /// Applies `f` to every coefficient (for example a ring automorphism).
    pub fn map_coeffs(&self, ring: &GaloisRing, f: impl Fn(Gr) -> Gr) -> Poly {
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), ring.reduce(f(c)))).filter(|(_, c)| !c.is_zero()).collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Lexicographically largest monomial.
    pub fn leading(&self) -> Option<(&Vec<u32>, &Gr)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor` over a field, or `None` if the division
    /// leaves a remainder.
    pub fn div_exact(&self, field: &GaloisRing, divisor: &Poly) -> Option<Poly> {
        let (lead_e, &lead_c) = divisor.leading()?;
        let lead_inv = field.inv(lead_c)?;
        let mut rest = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((e, &c)) = rest.leading() {
            if e.iter().zip(lead_e).any(|(a, b)| a < b) {
                return None;
            }
            let shift: Vec<u32> = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let t = Poly::monomial(field, shift, field.mul(c, lead_inv));
            rest = rest.sub(field, &t.mul(field, divisor));
            quot = quot.add(field, &t);
        }
        Some(quot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainring::FieldSpec;

    #[test]
    fn arithmetic() {
        let f = FieldSpec::prime(3).ring(2);
        let x = Poly::var(&f, 0, 2);
        let y = Poly::var(&f, 1, 2);
        let s = x.add(&f, &y);
        let sq = s.pow(&f, 2);
        assert_eq!(sq.coeff(&[1, 1]), f.from_int(2));
        assert!(sq.is_homogeneous(2));
        assert_eq!(sq.eval(&f, &[f.from_int(1), f.from_int(2)]), f.from_int(0));
        let c = sq.compose(&f, &[y.clone(), x.clone()]);
        assert_eq!(c, sq);
    }

    #[test]
    fn exact_division_over_a_field() {
        let f = FieldSpec::prime(2).field();
        let x = Poly::var(&f, 0, 2);
        let y = Poly::var(&f, 1, 2);
        let prod = x.mul(&f, &y).mul(&f, &x.add(&f, &y));
        let q = prod.div_exact(&f, &x.add(&f, &y)).unwrap();
        assert_eq!(q, x.mul(&f, &y));
        assert!(prod.add(&f, &x).div_exact(&f, &y).is_none());
    }
}
