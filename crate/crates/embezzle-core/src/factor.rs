//! Integer factorization by trial division with a Miller–Rabin check on the
//! cofactor. Failure to factor within the prime bound is an explicit error,
//! never a silent guess.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{CoreError, Result};

pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// Deterministic Miller–Rabin for n < 3.3·10²⁴ (the standard 13-base set);
/// for larger inputs the same bases give an overwhelming-confidence check.
pub fn is_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    const SMALL: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &p in &SMALL {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &SMALL {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigUint::from(n))
}

/// Factor `n` into primes. Trial-divides up to `bound`; a remaining cofactor
/// is accepted only if (Miller–Rabin) prime, otherwise this is a
/// [`CoreError::FactorBound`].
pub fn factorize(n: &BigUint, bound: u64) -> Result<BTreeMap<BigUint, u32>> {
    let mut out = BTreeMap::new();
    if n.is_zero() || n.is_one() {
        return Ok(out);
    }
    let mut m = n.clone();
    let mut p = 2u64;
    while p <= bound {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0u32;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.insert(bp, e);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if !m.is_one() {
        // m has no prime factor ≤ min(bound, √m); either it is prime or it
        // cannot be certified within the bound.
        if m.to_u64().map(|v| v <= bound.saturating_mul(bound)).unwrap_or(false) || is_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            return Err(CoreError::FactorBound {
                value: n.to_string(),
                cofactor: m.to_string(),
                bound,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primality() {
        let primes = [2u64, 3, 5, 7, 11, 13, 97, 7919, 1_000_003];
        for p in primes {
            assert!(is_prime_u64(p), "{p} should be prime");
        }
        let composites = [1u64, 4, 9, 91, 561, 1_000_001]; // 561 is a Carmichael number
        for c in composites {
            assert!(!is_prime_u64(c), "{c} should be composite");
        }
    }

    #[test]
    fn factorization_round_trip() {
        let n = BigUint::from(2u32 * 2 * 3 * 7 * 7 * 13);
        let f = factorize(&n, 1000).unwrap();
        let mut back = BigUint::one();
        for (p, e) in &f {
            back *= p.pow(*e);
        }
        assert_eq!(back, n);
        assert_eq!(f[&BigUint::from(7u32)], 2);
    }

    #[test]
    fn prime_cofactor_above_bound_is_accepted() {
        let big_prime = BigUint::from(1_000_003u64);
        let n = &big_prime * BigUint::from(6u32);
        let f = factorize(&n, 100).unwrap();
        assert_eq!(f[&big_prime], 1);
    }

    #[test]
    fn composite_cofactor_errors() {
        // product of two primes beyond the bound
        let n = BigUint::from(1009u64 * 1013);
        assert!(matches!(
            factorize(&n, 100),
            Err(CoreError::FactorBound { .. })
        ));
    }
}
