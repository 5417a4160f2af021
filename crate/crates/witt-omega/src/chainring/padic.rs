//! p-adic combinatorics: multinomial coefficients, the constants `c_i`, `C_n`
//! and the conductor of a field extension.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::galois::{FieldSpec, GaloisRing, Gr};
use super::ChainError;

pub fn vp_u64(p: u64, mut n: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn multinomial(parts: &[u64]) -> BigUint {
    let n: u64 = parts.iter().sum();
    let mut den = BigUint::one();
    for &a in parts {
        den *= factorial(a);
    }
    factorial(n) / den
}

fn vp_big(p: u64, n: &BigUint) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let mut v = 0;
    let mut x = n.clone();
    let pb = BigUint::from(p);
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

/// `v_p` of the multinomial coefficient of `parts`.
pub fn multinomial_val(p: u64, parts: &[u64]) -> u32 {
    // Legendre: v_p(n!) = (n - s_p(n)) / (p - 1)
    let digit_sum = |mut n: u64| {
        let mut s = 0;
        while n > 0 {
            s += n % p;
            n /= p;
        }
        s
    };
    let n: u64 = parts.iter().sum();
    let num = n - digit_sum(n);
    let den: u64 = parts.iter().map(|&a| a - digit_sum(a)).sum();
    ((num - den) / (p - 1)) as u32
}

/// Number of carries when adding the parts in base `p`.
pub fn carry_count(p: u64, parts: &[u64]) -> u32 {
    let mut acc = 0u64;
    let mut carries = 0u32;
    for &a in parts {
        let (mut x, mut y) = (acc, a);
        let mut carry = 0;
        while x > 0 || y > 0 || carry > 0 {
            let s = x % p + y % p + carry;
            carry = if s >= p { 1 } else { 0 };
            carries += carry as u32;
            x /= p;
            y /= p;
        }
        acc += a;
    }
    carries
}

/// Multinomial coefficient reduced mod `p^level`.
pub fn multinomial_mod(p: u64, parts: &[u64], level: u32) -> u64 {
    let m = BigUint::from(p).pow(level);
    (multinomial(parts) % m).to_u64().unwrap()
}

/// `(1/p!) binom(p^i; p^(i-1), ..., p^(i-1))` for `i >= 2`; `c_1 = 1`.
pub fn c_const(p: u64, i: u32) -> BigUint {
    if i <= 1 {
        return BigUint::one();
    }
    let part = p.pow(i - 1);
    multinomial(&vec![part; p as usize]) / factorial(p)
}

/// `C_n = c_n c_{n-1}^p ... c_2^(p^(n-2))`; `C_1 = 1`.
pub fn big_c_const(p: u64, n: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= c_const(p, i).pow(p.pow(n - i) as u32);
    }
    acc
}

/// `(c_1, ..., c_n)` and `C_n`, each reduced mod `p^level`.
pub fn constants(p: u64, n: u32, level: u32) -> (Vec<u64>, u64) {
    let m = BigUint::from(p).pow(level);
    let cs = (1..=n).map(|i| (c_const(p, i) % &m).to_u64().unwrap()).collect();
    (cs, (big_c_const(p, n) % &m).to_u64().unwrap())
}

pub fn is_p_adic_unit(p: u64, n: &BigUint) -> bool {
    vp_big(p, n) == 0
}

/// `C(k, k') = sum over z in k'* of t(z)^-1 t(tr z)` in `W_level(k')`, for
/// `k = F_p`. The result lies in `Z/p^level`.
pub fn conductor(small: &FieldSpec, big: &FieldSpec, level: u32) -> Result<Gr, ChainError> {
    if small.p != big.p || !big.r.is_multiple_of(small.r) {
        return Err(ChainError::NotAnExtension);
    }
    if small.r != 1 {
        return Err(ChainError::Unsupported("conductor over a non-prime base field".into()));
    }
    let w = big.ring(level);
    let k = big.field();
    let mut acc = Gr::ZERO;
    for z in big.elements().into_iter().skip(1) {
        let tz = w.teichmuller(z);
        let tr = k.field_trace(z);
        let ttr = w.teichmuller(w.from_int(tr as i64));
        acc = w.add(acc, w.mul(w.inv(tz).unwrap(), ttr));
    }
    Ok(acc)
}

/// Reconstruction of `t(x)` from the values `t(f(x))` of all `F_p`-linear
/// forms `f = tr(y .)`; returns the right-hand side for every `x`.
pub fn reconstruct_teichmuller(big: &FieldSpec, level: u32) -> Result<Vec<(Gr, Gr)>, ChainError> {
    let small = FieldSpec::prime(big.p);
    let w = big.ring(level);
    let k = big.field();
    let c = conductor(&small, big, level)?;
    let c_inv = w.inv(c).ok_or(ChainError::NotAnExtension)?;
    let mut out = Vec::new();
    for x in big.elements().into_iter().skip(1) {
        let mut acc = Gr::ZERO;
        for y in big.elements().into_iter().skip(1) {
            let coeff = w.mul(c_inv, w.inv(w.teichmuller(y)).unwrap());
            let fx = k.field_trace(k.mul(y, x));
            acc = w.add(acc, w.mul(coeff, w.teichmuller(w.from_int(fx as i64))));
        }
        out.push((w.teichmuller(x), acc));
    }
    Ok(out)
}

pub fn ring_from_big(ring: &GaloisRing, n: &BigUint) -> Gr {
    let m = BigUint::from(ring.modulus_int);
    ring.from_int((n % m).to_u64().unwrap() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&[2, 1, 1]), BigUint::from(12u32));
        assert_eq!(multinomial_val(2, &[2, 1, 1]), 2);
        assert_eq!(multinomial_val(3, &[3, 3, 3]), 1);
        assert_eq!(multinomial(&[3, 3, 3]), BigUint::from(1680u32));
        for p in [2u64, 3, 5, 7] {
            for i in 1..p {
                assert_eq!(multinomial_val(p, &[i, p - i]), 1);
            }
        }
    }

    #[test]
    fn valuation_matches_carries_and_factorials() {
        for p in [2u64, 3, 5] {
            for a in 0..=81u64 {
                for b in 0..=(81 - a) {
                    for c in 0..=(81 - a - b) {
                        let parts = [a, b, c];
                        let v = multinomial_val(p, &parts);
                        assert_eq!(v, carry_count(p, &parts));
                        if a + b + c <= 30 {
                            assert_eq!(v, vp_big(p, &multinomial(&parts)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn scaling_parts_by_p_keeps_valuation() {
        for p in [2u64, 3] {
            for a in 0..10u64 {
                for b in 0..10u64 {
                    assert_eq!(multinomial_val(p, &[p * a, p * b, p]), multinomial_val(p, &[a, b, 1]));
                }
            }
        }
    }

    #[test]
    fn constant_examples() {
        assert_eq!(c_const(2, 2), BigUint::from(3u32));
        assert_eq!(c_const(3, 2), BigUint::from(280u32));
        for p in [2u64, 3, 5] {
            for n in 1..=4 {
                assert!(is_p_adic_unit(p, &big_c_const(p, n)));
            }
        }
        assert_eq!(constants(2, 2, 5), (vec![1, 3], 3));
    }

    #[test]
    fn conductor_examples() {
        let f2 = FieldSpec::prime(2);
        let f4 = FieldSpec::new(2, 2).unwrap();
        let c = conductor(&f2, &f4, 2).unwrap();
        assert_eq!(c, f4.ring(2).from_int(3));
        for (p, r) in [(2u64, 2usize), (2, 3), (3, 2)] {
            let big = FieldSpec::new(p, r).unwrap();
            for lvl in 1..=4 {
                let c = conductor(&FieldSpec::prime(p), &big, lvl).unwrap();
                assert!(c.0[1..].iter().all(|&x| x == 0), "C lies in Z_p");
                assert_eq!(c.0[0] % p, p - 1);
            }
        }
    }

    #[test]
    fn teichmuller_reconstruction() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        for lvl in 1..=4 {
            for (lhs, rhs) in reconstruct_teichmuller(&f4, lvl).unwrap() {
                assert_eq!(lhs, rhs);
            }
        }
    }
}
