//! The Möbius function by trial division.

use crate::error::{Error, Result};

/// `μ(n)`: 0 if a squared prime divides `n`, otherwise `(−1)^{#prime factors}`.
///
/// Plain trial division; costs `O(√n)` in the worst case, which is fine for
/// the dilation indices this crate feeds it.
pub fn mobius(n: u64) -> Result<i32> {
    if n == 0 {
        return Err(Error::domain("mobius is undefined at 0"));
    }
    let mut m = n;
    let mut factors = 0u32;
    let mut p = 2u64;
    while p.checked_mul(p).map_or(false, |pp| pp <= m) {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return Ok(0);
            }
            factors += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors += 1;
    }
    Ok(if factors % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(2).unwrap(), -1);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
    }

    #[test]
    fn zero_rejected() {
        assert!(mobius(0).is_err());
    }

    #[test]
    fn multiplicative_on_coprime_pairs() {
        for m in 1..=60u64 {
            for n in 1..=60u64 {
                if gcd(m, n) == 1 {
                    assert_eq!(
                        mobius(m * n).unwrap(),
                        mobius(m).unwrap() * mobius(n).unwrap(),
                        "m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn divisor_sums_detect_one() {
        for n in 1..=2000u64 {
            let mut sum = 0i64;
            for d in 1..=n {
                if n % d == 0 {
                    sum += mobius(d).unwrap() as i64;
                }
            }
            assert_eq!(sum, if n == 1 { 1 } else { 0 }, "n={n}");
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
}
