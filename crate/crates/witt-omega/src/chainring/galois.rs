//! Finite fields and Galois rings `GR(p^n, r) = Z[x]/(p^n, F(x))`.
//!
//! Elements are plain coefficient arrays; every operation goes through a
//! [`GaloisRing`] context that knows the prime, the degree, the level and the
//! modulus. The same modulus is used at every level, so an element of a low
//! level can be read at a higher level by keeping its coefficients.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::ChainError;

pub const MAX_R: usize = 6;

static FIELD_TABLE: &str = include_str!("../../data/fields.txt");

/// Raw coefficients of an element, `c[0] + c[1] x + ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Gr(pub [u64; MAX_R]);

impl Gr {
    pub const ZERO: Gr = Gr([0; MAX_R]);

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// A finite field `F_{p^r}` given by a monic irreducible modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    pub p: u64,
    pub r: usize,
    /// Low coefficients of the monic modulus.
    pub modulus: [u64; MAX_R],
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldSpec {
    /// Looks up the tabulated modulus for `F_{p^r}`. Prime fields are
    /// available for every prime.
    pub fn new(p: u64, r: usize) -> Result<Self, ChainError> {
        if !is_prime(p) {
            return Err(ChainError::NotPrime(p));
        }
        if r == 0 || r > MAX_R {
            return Err(ChainError::UnsupportedField { p, r });
        }
        if r == 1 {
            return Ok(FieldSpec { p, r, modulus: [0; MAX_R] });
        }
        for line in FIELD_TABLE.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Vec<u64> = line.split_whitespace().map(|t| t.parse().expect("malformed field table")).collect();
            if nums[0] == p && nums[1] as usize == r {
                let mut modulus = [0; MAX_R];
                modulus[..r].copy_from_slice(&nums[2..2 + r]);
                return Ok(FieldSpec { p, r, modulus });
            }
        }
        Err(ChainError::UnsupportedField { p, r })
    }

    pub fn prime(p: u64) -> Self {
        Self::new(p, 1).expect("prime field")
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.r as u32)
    }

    pub fn ring(&self, level: u32) -> GaloisRing {
        GaloisRing::new(*self, level)
    }

    pub fn field(&self) -> GaloisRing {
        self.ring(1)
    }

    /// True when `x` generates the unit group of `F_p[x]/(F)`, which forces
    /// the modulus to be irreducible.
    pub fn modulus_is_primitive(&self) -> bool {
        if self.r == 1 {
            return true;
        }
        let k = self.field();
        let x = k.gen();
        let order = self.q() - 1;
        k.pow(x, order) == k.one() && prime_factors(order).into_iter().all(|l| k.pow(x, order / l) != k.one())
    }

    /// All field elements in a fixed order (integer digits base p).
    pub fn elements(&self) -> Vec<Gr> {
        let k = self.field();
        (0..self.q()).map(|i| k.from_index(i)).collect()
    }
}

/// Arithmetic context for `W_level(F_{p^r})`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GaloisRing {
    pub spec: FieldSpec,
    pub level: u32,
    /// `p^level`
    pub modulus_int: u64,
}

impl GaloisRing {
    pub fn new(spec: FieldSpec, level: u32) -> Self {
        let modulus_int =
            spec.p.checked_pow(level).filter(|&m| m < (1u64 << 62)).expect("Galois ring level too large for 64-bit arithmetic");
        GaloisRing { spec, level, modulus_int }
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn r(&self) -> usize {
        self.spec.r
    }

    pub fn at_level(&self, level: u32) -> GaloisRing {
        GaloisRing::new(self.spec, level)
    }

    pub fn zero(&self) -> Gr {
        Gr::ZERO
    }

    pub fn one(&self) -> Gr {
        self.from_int(1)
    }

    /// The class of `x`.
    pub fn gen(&self) -> Gr {
        if self.spec.r == 1 {
            // the modulus x + c0 makes x = -c0
            return self.from_int(-(self.spec.modulus[0] as i64));
        }
        let mut g = Gr::ZERO;
        g.0[1] = 1 % self.modulus_int;
        g
    }

    pub fn from_int(&self, n: i64) -> Gr {
        let mut g = Gr::ZERO;
        g.0[0] = n.rem_euclid(self.modulus_int as i64) as u64;
        g
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Gr {
        let mut g = Gr::ZERO;
        for (i, &v) in c.iter().enumerate().take(self.spec.r) {
            g.0[i] = v % self.modulus_int;
        }
        g
    }

    pub fn coeffs(&self, a: Gr) -> Vec<u64> {
        a.0[..self.spec.r].to_vec()
    }

    /// Element whose base-p digits (coefficients below p) spell `i`.
    pub fn from_index(&self, mut i: u64) -> Gr {
        let mut g = Gr::ZERO;
        for j in 0..self.spec.r {
            g.0[j] = i % self.spec.p;
            i /= self.spec.p;
        }
        g
    }

    /// Inverse of [`from_index`](Self::from_index) on residues (reads coefficients mod p).
    pub fn index_of(&self, a: Gr) -> u64 {
        let mut i = 0;
        for j in (0..self.spec.r).rev() {
            i = i * self.spec.p + a.0[j] % self.spec.p;
        }
        i
    }

    pub fn reduce(&self, a: Gr) -> Gr {
        let mut g = a;
        for c in g.0.iter_mut() {
            *c %= self.modulus_int;
        }
        g
    }

    pub fn add(&self, a: Gr, b: Gr) -> Gr {
        let m = self.modulus_int;
        let mut g = Gr::ZERO;
        for i in 0..self.spec.r {
            let s = a.0[i] + b.0[i];
            g.0[i] = if s >= m { s - m } else { s };
        }
        g
    }

    pub fn sub(&self, a: Gr, b: Gr) -> Gr {
        let m = self.modulus_int;
        let mut g = Gr::ZERO;
        for i in 0..self.spec.r {
            g.0[i] = if a.0[i] >= b.0[i] { a.0[i] - b.0[i] } else { a.0[i] + m - b.0[i] };
        }
        g
    }

    pub fn neg(&self, a: Gr) -> Gr {
        self.sub(Gr::ZERO, a)
    }

    pub fn mul(&self, a: Gr, b: Gr) -> Gr {
        let m = self.modulus_int as u128;
        let r = self.spec.r;
        if r == 1 {
            let mut g = Gr::ZERO;
            g.0[0] = ((a.0[0] as u128 * b.0[0] as u128) % m) as u64;
            return g;
        }
        let mut t = [0u128; 2 * MAX_R];
        for i in 0..r {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..r {
                t[i + j] = (t[i + j] + (a.0[i] as u128 * b.0[j] as u128) % m) % m;
            }
        }
        // x^r = -sum f_i x^i
        for k in (r..2 * r - 1).rev() {
            let top = t[k] % m;
            if top == 0 {
                continue;
            }
            t[k] = 0;
            for i in 0..r {
                let f = self.spec.modulus[i] as u128;
                if f != 0 {
                    let sub = (top * f) % m;
                    t[k - r + i] = (t[k - r + i] + m - sub) % m;
                }
            }
        }
        let mut g = Gr::ZERO;
        for i in 0..r {
            g.0[i] = (t[i] % m) as u64;
        }
        g
    }

    pub fn mul_int(&self, a: Gr, n: i64) -> Gr {
        self.mul(a, self.from_int(n))
    }

    pub fn pow(&self, a: Gr, mut e: u64) -> Gr {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^k)` by repeated p-th powers (exponents never overflow).
    pub fn pow_p_power(&self, a: Gr, k: u32) -> Gr {
        let mut x = a;
        for _ in 0..k {
            x = self.pow(x, self.spec.p);
        }
        x
    }

    /// `p`-adic valuation; `level` for zero.
    pub fn val(&self, a: Gr) -> u32 {
        let mut v = self.level;
        for i in 0..self.spec.r {
            let mut c = a.0[i] % self.modulus_int;
            if c == 0 {
                continue;
            }
            let mut k = 0;
            while c.is_multiple_of(self.spec.p) {
                c /= self.spec.p;
                k += 1;
            }
            v = v.min(k);
        }
        v
    }

    pub fn is_unit(&self, a: Gr) -> bool {
        self.level > 0 && self.val(a) == 0
    }

    pub fn inv(&self, a: Gr) -> Option<Gr> {
        if !self.is_unit(a) {
            return None;
        }
        let k = self.at_level(1);
        let mut x = k.pow(k.reduce(a), self.spec.q() - 2);
        let mut prec = 1;
        while prec < self.level {
            // Newton step x <- x (2 - a x)
            let ax = self.mul(a, x);
            x = self.mul(x, self.sub(self.from_int(2), ax));
            prec *= 2;
        }
        Some(x)
    }

    /// `p^v a`.
    pub fn mul_p_pow(&self, a: Gr, v: u32) -> Gr {
        if v >= self.level {
            return Gr::ZERO;
        }
        self.mul(a, self.from_int(self.spec.p.pow(v) as i64))
    }

    /// Exact division by `p^v` of the canonical coefficients. Callers make sure
    /// that `v <= val(a)`.
    pub fn div_p_pow(&self, a: Gr, v: u32) -> Gr {
        let d = self.spec.p.pow(v);
        let mut g = Gr::ZERO;
        for i in 0..self.spec.r {
            debug_assert!(a.0[i].is_multiple_of(d));
            g.0[i] = a.0[i] / d;
        }
        g
    }

    /// Splits `a = p^v q + rem` with the coefficients of `rem` in `[0, p^v)`.
    pub fn split_p_pow(&self, a: Gr, v: u32) -> (Gr, Gr) {
        let d = self.spec.p.pow(v);
        let mut q = Gr::ZERO;
        let mut rem = Gr::ZERO;
        for i in 0..self.spec.r {
            q.0[i] = a.0[i] / d;
            rem.0[i] = a.0[i] % d;
        }
        (q, rem)
    }

    /// Teichmüller representative of the residue of `x` (read mod p).
    pub fn teichmuller(&self, x: Gr) -> Gr {
        let k = self.at_level(1);
        let a = k.reduce(x);
        // a^(q^(n-1)) stabilises to the multiplicative section
        let mut t = a;
        for _ in 1..self.level {
            t = self.pow_p_power(t, self.spec.r as u32);
        }
        t
    }

    /// The Witt vector Frobenius, fixing Teichmüller lifts of `F_p` and acting
    /// by `x -> x^p` on residues.
    pub fn frob(&self, a: Gr) -> Gr {
        if self.spec.r == 1 {
            return self.reduce(a);
        }
        // frob is a ring map, so it is determined by the image of the generator,
        // the unique root of F lifting gen^p.
        let img = self.frob_of_gen();
        let mut acc = Gr::ZERO;
        let mut pw = self.one();
        for i in 0..self.spec.r {
            acc = self.add(acc, self.mul(self.from_int(a.0[i] as i64), pw));
            pw = self.mul(pw, img);
        }
        acc
    }

    fn frob_of_gen(&self) -> Gr {
        // Teichmüller lift of x^p, equal to frob(t(x)); with t(x)=x only when x
        // is Teichmüller, so recover frob(x) through the Hensel root of F.
        let k = self.at_level(1);
        let target_res = k.pow(k.gen(), self.spec.p);
        self.hensel_root(target_res)
    }

    /// Root of the modulus lifting a residue root.
    pub fn hensel_root(&self, res: Gr) -> Gr {
        let mut x = self.reduce(res);
        for _ in 0..self.level.max(1) {
            let fx = self.eval_modulus(x);
            let dfx = self.eval_modulus_deriv(x);
            let inv = self.inv(dfx).expect("separable modulus");
            x = self.sub(x, self.mul(fx, inv));
        }
        x
    }

    fn eval_modulus(&self, x: Gr) -> Gr {
        let r = self.spec.r;
        let mut acc = self.one();
        for i in (0..r).rev() {
            acc = self.add(self.mul(acc, x), self.from_int(self.spec.modulus[i] as i64));
        }
        acc
    }

    fn eval_modulus_deriv(&self, x: Gr) -> Gr {
        let r = self.spec.r;
        let mut acc = self.from_int(r as i64);
        for i in (1..r).rev() {
            acc = self.add(self.mul(acc, x), self.from_int((i as u64 * self.spec.modulus[i]) as i64));
        }
        acc
    }

    /// Trace from `F_{q}` down to `F_p`, at level 1.
    pub fn field_trace(&self, x: Gr) -> u64 {
        let k = self.at_level(1);
        let mut acc = Gr::ZERO;
        let mut y = k.reduce(x);
        for _ in 0..self.spec.r {
            acc = k.add(acc, y);
            y = k.pow(y, self.spec.p);
        }
        acc.0[0]
    }

    pub fn elem(&self, a: Gr) -> GaloisRingElem {
        GaloisRingElem { ring: *self, value: self.reduce(a) }
    }

    pub fn fmt_elem(&self, a: Gr) -> String {
        if self.spec.r == 1 {
            return format!("{}", a.0[0]);
        }
        format!("{:?}", &a.0[..self.spec.r])
    }
}

/// `x -> L^(p^n)` for any lift `L` of `x` from level `m` to level `m + n`.
pub fn tau_bar(spec: &FieldSpec, x: Gr, m: u32, n: u32) -> Gr {
    let hi = spec.ring(m + n);
    let lift = spec.ring(m).reduce(x);
    hi.pow_p_power(lift, n)
}

/// An element carrying its ring, for user-facing code and serialisation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GaloisRingElem {
    pub ring: GaloisRing,
    pub value: Gr,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct GaloisRingElemJson {
    pub p: u64,
    pub r: usize,
    pub n: u32,
    pub coeffs: Vec<u64>,
}

impl GaloisRingElem {
    pub fn new(ring: GaloisRing, coeffs: &[u64]) -> Self {
        GaloisRingElem { ring, value: ring.from_coeffs(coeffs) }
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.ring.coeffs(self.value)
    }

    pub fn val(&self) -> u32 {
        self.ring.val(self.value)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.ring.elem(self.ring.pow(self.value, e))
    }

    pub fn inv(&self) -> Option<Self> {
        self.ring.inv(self.value).map(|v| self.ring.elem(v))
    }

    pub fn frob(&self) -> Self {
        self.ring.elem(self.ring.frob(self.value))
    }

    pub fn to_json(&self) -> GaloisRingElemJson {
        GaloisRingElemJson { p: self.ring.p(), r: self.ring.r(), n: self.ring.level, coeffs: self.coeffs() }
    }

    pub fn from_json(j: &GaloisRingElemJson) -> Result<Self, ChainError> {
        let spec = FieldSpec::new(j.p, j.r)?;
        if j.coeffs.len() != j.r {
            return Err(ChainError::Shape(format!("expected {} coefficients", j.r)));
        }
        Ok(Self::new(spec.ring(j.n), &j.coeffs))
    }
}

impl std::ops::Add for GaloisRingElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.ring.elem(self.ring.add(self.value, o.value))
    }
}

impl std::ops::Sub for GaloisRingElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.ring.elem(self.ring.sub(self.value, o.value))
    }
}

impl std::ops::Mul for GaloisRingElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.ring.elem(self.ring.mul(self.value, o.value))
    }
}

impl std::ops::Neg for GaloisRingElem {
    type Output = Self;
    fn neg(self) -> Self {
        self.ring.elem(self.ring.neg(self.value))
    }
}

impl fmt::Display for GaloisRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ring.fmt_elem(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_moduli_are_irreducible() {
        for (p, r) in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
            assert!(FieldSpec::new(p, r).unwrap().modulus_is_primitive(), "{p} {r}");
        }
    }

    #[test]
    fn teichmuller_examples() {
        let f3 = FieldSpec::prime(3);
        let w2 = f3.ring(2);
        assert_eq!(w2.teichmuller(w2.from_int(2)), w2.from_int(8));
        assert_eq!(w2.teichmuller(w2.one()), w2.one());
        // omega in F_4 lifts to a root of X^2+X+1 mod 4
        let f4 = FieldSpec::new(2, 2).unwrap();
        let w = f4.ring(2);
        let t = w.teichmuller(w.gen());
        let val = w.add(w.add(w.mul(t, t), t), w.one());
        assert!(val.is_zero());
        assert_eq!(w.pow(t, 3), w.one());
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let spec = FieldSpec::new(p, r).unwrap();
            for lvl in 1..=4 {
                let w = spec.ring(lvl);
                let els = spec.elements();
                for &x in &els {
                    let tx = w.teichmuller(x);
                    assert_eq!(w.pow(tx, spec.q()), tx);
                    assert_eq!(spec.field().reduce(tx), x);
                    for &y in &els {
                        let xy = spec.field().mul(x, y);
                        assert_eq!(w.mul(tx, w.teichmuller(y)), w.teichmuller(xy));
                    }
                }
            }
        }
    }

    #[test]
    fn tau_bar_examples() {
        let f2 = FieldSpec::prime(2);
        assert_eq!(tau_bar(&f2, Gr([1, 0, 0, 0, 0, 0]), 1, 1), f2.ring(2).one());
        let r = f2.ring(3);
        assert_eq!(tau_bar(&f2, r.from_int(3), 2, 1), r.one());
        assert_eq!(r.pow(r.from_int(7), 2), r.one());
        let f3 = FieldSpec::prime(3);
        assert_eq!(tau_bar(&f3, f3.field().from_int(2), 1, 2), f3.ring(3).from_int(26));
    }

    #[test]
    fn tau_bar_lift_independent() {
        for (p, r) in [(2, 1), (2, 2), (3, 1)] {
            let spec = FieldSpec::new(p, r).unwrap();
            for m in 1..=2u32 {
                for n in 1..=2u32 {
                    let hi = spec.ring(m + n);
                    let lo = spec.ring(m);
                    let pm = spec.p.pow(m);
                    let count = lo.modulus_int.pow(r as u32);
                    for i in 0..count {
                        let mut x = Gr::ZERO;
                        let mut k = i;
                        for j in 0..r {
                            x.0[j] = k % pm;
                            k /= pm;
                        }
                        let base = tau_bar(&spec, x, m, n);
                        for shift in 1..spec.p.pow(n) {
                            let mut l = x;
                            l.0[0] += shift * pm;
                            assert_eq!(hi.pow_p_power(hi.reduce(l), n), base);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn frob_examples() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        let w = f4.ring(2);
        let k = f4.field();
        let omega = k.gen();
        let t = w.teichmuller(omega);
        assert_eq!(w.frob(t), w.teichmuller(k.mul(omega, omega)));
        for (p, r) in [(2, 2), (2, 3), (3, 2)] {
            let spec = FieldSpec::new(p, r).unwrap();
            let w = spec.ring(3);
            for i in 0..200u64 {
                let a = w.from_coeffs(&[i, i * 7 + 3, i * i, 5, 1, 2]);
                let b = w.from_coeffs(&[i * 3 + 1, 11, i, 2, 9, 4]);
                assert_eq!(w.frob(w.mul(a, b)), w.mul(w.frob(a), w.frob(b)));
                assert_eq!(w.frob(w.add(a, b)), w.add(w.frob(a), w.frob(b)));
                let mut x = a;
                for _ in 0..r {
                    x = w.frob(x);
                }
                assert_eq!(x, a);
                let kk = spec.field();
                assert_eq!(kk.reduce(w.frob(a)), kk.pow(kk.reduce(a), p));
            }
        }
        let f3 = FieldSpec::prime(3);
        let w = f3.ring(2);
        assert_eq!(w.frob(w.from_int(5)), w.from_int(5));
    }

    #[test]
    fn inverse_roundtrip() {
        let spec = FieldSpec::new(3, 2).unwrap();
        let w = spec.ring(5);
        for i in 0..300u64 {
            let a = w.from_coeffs(&[i * 13 + 1, i * 5]);
            match w.inv(a) {
                Some(b) => assert_eq!(w.mul(a, b), w.one()),
                None => assert!(w.val(a) > 0),
            }
        }
    }
}
