//! Number-theoretic primitives: trial-division factorization, the divisor
//! number function, p-adic valuations, multiplicative orders and the
//! `(-1)^e * 5^j` decomposition of units modulo powers of two.
//!
//! Everything here works on `u64` and assumes desk-scale inputs (trial
//! division is fine up to roughly `10^12`).

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A prime factorization `n = p_1^e_1 * ... * p_r^e_r`, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The exponent of `p`, or 0 when `p` does not divide the factored value.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.pairs
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// The prime powers `p^e`, in ascending order of `p`.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, e)| p.pow(e))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, e)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `nu_p(a)`, with `Infinite` reserved for `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    /// `min(self, k)`, which is always finite.
    pub fn truncate(self, k: u32) -> u32 {
        match self {
            Valuation::Finite(v) => v.min(k),
            Valuation::Infinite => k,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Factors `n >= 1` by trial division. `factorize(1)` is the empty product.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut rest = n;
    let mut pairs = Vec::new();
    let mut push = |rest: &mut u64, p: u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    };
    push(&mut rest, 2);
    let mut d = 3u64;
    while d.saturating_mul(d) <= rest {
        push(&mut rest, d);
        d += 2;
    }
    if rest > 1 {
        pairs.push((rest, 1));
    }
    Ok(Factorization { pairs })
}

/// Number of positive divisors of `n`.
pub fn tau(n: u64) -> Result<u64> {
    Ok(factorize(n)?
        .iter()
        .map(|(_, e)| u64::from(e) + 1)
        .product())
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    let mut out = vec![1u64];
    for (p, e) in f.iter() {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?
        .iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// Carmichael's function: the exponent of the unit group mod `n`.
pub fn carmichael(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.iter().fold(1u64, |acc, (p, e)| {
        let part = if p == 2 && e >= 3 {
            1u64 << (e - 2)
        } else {
            (p - 1) * p.pow(e - 1)
        };
        acc.lcm(&part)
    }))
}

pub fn p_adic_valuation(a: u64, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    if a == 0 {
        return Ok(Valuation::Infinite);
    }
    let mut a = a;
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    Ok(Valuation::Finite(v))
}

/// `min(nu_p(a), k)`: the p-adic valuation of `a` read modulo `p^k`.
pub fn truncated_valuation(a: u64, p: u64, k: u32) -> Result<u32> {
    Ok(p_adic_valuation(a, p)?.truncate(k))
}

/// Reduces a signed integer into `0..m`.
pub fn reduce(a: i64, m: u64) -> u64 {
    (i128::from(a).rem_euclid(i128::from(m))) as u64
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Least `e >= 1` with `a^e = 1 (mod m)`.
///
/// Starts from the Carmichael exponent of `m` and strips prime factors while
/// the power stays 1.
pub fn multiplicative_order(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Zero);
    }
    if m == 1 {
        return Ok(1);
    }
    let a = reduce(a, m);
    if a.gcd(&m) != 1 {
        return Err(Error::NotUnit { a: a as i64, m });
    }
    let mut order = carmichael(m)?;
    for (p, _) in factorize(order)?.iter() {
        while order % p == 0 && mod_pow(a, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Sign and 2-adic level of an odd residue modulo `2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitDecomposition {
    /// `epsilon`: 1 when the residue is `-5^j`, 0 when it is `5^j`.
    pub sign: u8,
    /// `min(nu_2(j), k - 2)`, with `j = 0` mapped to `k - 2`.
    pub level: u32,
}

/// Writes an odd `a` as `(-1)^sign * 5^j (mod 2^k)` and reports the sign and
/// the truncated 2-adic valuation of `j`.
///
/// The level is read off the multiplicative order of `(-1)^sign * a`, which
/// lies in the cyclic subgroup generated by 5 (of order `2^(k-2)`): a power
/// `5^j` has order `2^(k-2-nu_2(j))`, so no discrete logarithm is needed.
pub fn unit_decomposition_mod_2k(a: i64, k: u32) -> Result<UnitDecomposition> {
    if a.rem_euclid(2) == 0 {
        return Err(Error::EvenUnit(a));
    }
    if k < 3 {
        return Err(Error::ExponentTooSmall(k));
    }
    if k > 62 {
        return Err(Error::OutOfRange {
            value: u64::from(k),
            lo: 3,
            hi: 62,
        });
    }
    let modulus = 1u64 << k;
    let r = reduce(a, modulus);
    let sign = u8::from(r % 4 == 3);
    let positive = if sign == 1 { modulus - r } else { r };
    let order = multiplicative_order(positive as i64, modulus)?;
    let level = (k - 2) - order.trailing_zeros();
    Ok(UnitDecomposition { sign, level })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_order(a: i64, m: u64) -> u64 {
        let a = reduce(a, m);
        let mut x = a % m;
        let mut e = 1;
        while x != 1 % m {
            x = mod_mul(x, a, m);
            e += 1;
        }
        e
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(27).unwrap().pairs(), &[(3, 3)]);
        assert_eq!(factorize(0), Err(Error::Zero));
        assert_eq!(factorize(3600).unwrap().to_string(), "2^4 * 3^2 * 5^2");
    }

    #[test]
    fn factorize_invariants() {
        for n in 1..5000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.iter().all(|(p, e)| is_prime(p) && e > 0));
        }
    }

    #[test]
    fn tau_examples_and_scan() {
        assert_eq!(tau(1).unwrap(), 1);
        assert_eq!(tau(12).unwrap(), 6);
        assert_eq!(tau(4).unwrap(), 3);
        assert_eq!(tau(0), Err(Error::Zero));
        for n in 1..=10_000u64 {
            let scan = (1..=n).filter(|d| n % d == 0).count() as u64;
            assert_eq!(tau(n).unwrap(), scan, "n = {n}");
        }
    }

    #[test]
    fn divisors_match_tau() {
        for n in 1..500u64 {
            let d = divisors(n).unwrap();
            assert_eq!(d.len() as u64, tau(n).unwrap());
            assert!(d.iter().all(|x| n % x == 0));
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(0, 3).unwrap(), Valuation::Infinite);
        assert_eq!(p_adic_valuation(8, 2).unwrap(), Valuation::Finite(3));
        assert_eq!(p_adic_valuation(9, 2).unwrap(), Valuation::Finite(0));
        assert_eq!(p_adic_valuation(9, 4), Err(Error::NotPrime(4)));

        assert_eq!(truncated_valuation(0, 3, 2).unwrap(), 2);
        assert_eq!(truncated_valuation(8, 2, 2).unwrap(), 2);
        assert_eq!(truncated_valuation(6, 3, 4).unwrap(), 1);
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(1, 7).unwrap(), 1);
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(5, 8).unwrap(), 2);
        assert_eq!(multiplicative_order(3, 1).unwrap(), 1);
        assert_eq!(multiplicative_order(-1, 7).unwrap(), 2);
        assert!(matches!(
            multiplicative_order(4, 8),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn order_matches_brute_force() {
        for m in 1..=600u64 {
            for a in 0..m {
                if a.gcd(&m) != 1 {
                    continue;
                }
                let ord = multiplicative_order(a as i64, m).unwrap();
                assert_eq!(ord, naive_order(a as i64, m), "a={a} m={m}");
                assert_eq!(mod_pow(a, ord, m), 1 % m);
            }
        }
        for &m in &[1u64 << 16, 65521, 65535] {
            for a in [3i64, 5, 7, 17, 257, 65519] {
                if reduce(a, m).gcd(&m) == 1 {
                    assert_eq!(multiplicative_order(a, m).unwrap(), naive_order(a, m));
                }
            }
        }
    }

    #[test]
    fn unit_decomposition_examples() {
        let d = |a, k| unit_decomposition_mod_2k(a, k).unwrap();
        assert_eq!(d(5, 3), UnitDecomposition { sign: 0, level: 0 });
        assert_eq!(d(3, 3), UnitDecomposition { sign: 1, level: 0 });
        assert_eq!(d(7, 3), UnitDecomposition { sign: 1, level: 1 });
        assert_eq!(d(1, 5), UnitDecomposition { sign: 0, level: 3 });
        assert_eq!(unit_decomposition_mod_2k(4, 3), Err(Error::EvenUnit(4)));
        assert_eq!(
            unit_decomposition_mod_2k(3, 2),
            Err(Error::ExponentTooSmall(2))
        );
    }

    #[test]
    fn unit_decomposition_reconstructs() {
        for k in 3..=10u32 {
            let modulus = 1u64 << k;
            for a in (1..modulus).step_by(2) {
                let UnitDecomposition { sign, level } =
                    unit_decomposition_mod_2k(a as i64, k).unwrap();
                let hit = (1..modulus).step_by(2).any(|u| {
                    let j = u << level;
                    let pow = mod_pow(5, j, modulus);
                    let val = if sign == 1 {
                        (modulus - pow) % modulus
                    } else {
                        pow
                    };
                    val == a
                });
                assert!(hit, "a={a} k={k}");
            }
        }
    }

    #[test]
    fn order_formula_mod_powers_of_two() {
        for k in 3..=10u32 {
            for a in (1..(1u64 << k)).step_by(2) {
                let dec = unit_decomposition_mod_2k(a as i64, k).unwrap();
                for m in 2..=k {
                    let exp = i64::from(dec.sign).max(i64::from(m) - 2 - i64::from(dec.level));
                    let expected = 1u64 << exp;
                    assert_eq!(
                        multiplicative_order(a as i64, 1 << m).unwrap(),
                        expected,
                        "a={a} m={m} k={k}"
                    );
                }
            }
        }
    }
}
