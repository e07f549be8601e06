/// Trial-division primality test.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let n = n as u64;
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn pow_mod(mut base: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    r
}

/// `C(a, b) mod p` for `b <= a < p`.
fn small_binomial(a: u32, b: u32, p: u32) -> u32 {
    let b = b.min(a - b);
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..b {
        num = mul_mod(num, a - i, p);
        den = mul_mod(den, i + 1, p);
    }
    mul_mod(num, pow_mod(den, p - 2, p), p)
}

/// `C(n, k) mod p` via Lucas' theorem.
pub fn binomial_mod(mut n: u64, mut k: u64, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    if p == 2 {
        return u32::from(n & k == k);
    }
    let pp = p as u64;
    let mut r = 1u32;
    while k > 0 {
        let (nd, kd) = ((n % pp) as u32, (k % pp) as u32);
        if kd > nd {
            return 0;
        }
        r = mul_mod(r, small_binomial(nd, kd, p), p);
        n /= pp;
        k /= pp;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_exact(n: u64, k: u64) -> u128 {
        let mut r = 1u128;
        for i in 0..k {
            r = r * (n - i) as u128 / (i + 1) as u128;
        }
        r
    }

    #[test]
    fn primes() {
        let small: Vec<u32> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(65_521));
        assert!(!is_prime(65_535));
    }

    #[test]
    fn lucas_matches_exact_binomials() {
        for p in [2u32, 3, 5, 7] {
            for n in 0..40u64 {
                for k in 0..=n + 1 {
                    let exact = if k > n { 0 } else { binomial_exact(n, k) };
                    assert_eq!(
                        binomial_mod(n, k, p) as u128,
                        exact % p as u128,
                        "C({n},{k}) mod {p}"
                    );
                }
            }
        }
    }
}
