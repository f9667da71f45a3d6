use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

const TRIAL_LIMIT: usize = 1000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; TRIAL_LIMIT];
        let mut primes = Vec::new();
        for i in 2..TRIAL_LIMIT {
            if sieve[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < TRIAL_LIMIT {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        primes
    })
}

pub(crate) fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Splits `n = s^2 * t`. Square factors built from primes below the trial
/// limit, and a square cofactor, are always removed; `t` is never a perfect
/// square unless it is 1.
pub(crate) fn split_square(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    if let Some(r) = exact_sqrt(n) {
        return (r, BigUint::one());
    }
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let mut exponent = 0u32;
        loop {
            let (q, r) = num_integer::Integer::div_rem(&rest, &BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            exponent += 1;
        }
        if exponent > 0 {
            square *= BigUint::from(p).pow(exponent / 2);
            if exponent % 2 == 1 {
                free *= p;
            }
        }
    }
    match exact_sqrt(&rest) {
        Some(r) => square *= r,
        None => free *= rest,
    }
    (square, free)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(n: u64) -> (u64, u64) {
        let (s, t) = split_square(&BigUint::from(n));
        (s.try_into().unwrap(), t.try_into().unwrap())
    }

    #[test]
    fn small_values() {
        assert_eq!(split(8), (2, 2));
        assert_eq!(split(72), (6, 2));
        assert_eq!(split(49), (7, 1));
        assert_eq!(split(30), (1, 30));
        assert_eq!(split(1), (1, 1));
    }

    #[test]
    fn large_square_cofactor() {
        // 1009 is above the trial limit.
        assert_eq!(split(1009 * 1009 * 3), (1009, 3));
    }
}
