//! Cyclotomic polynomials and extraction of the cyclotomic part of a polynomial.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;

use super::matrix::Int;
use super::poly::{IntPoly, MAX_DEGREE};
use crate::error::{Error, Result};

/// Euler's totient by trial factorization.
pub fn euler_phi(mut k: u64) -> u64 {
    let mut result = k;
    let mut p = 2;
    while p * p <= k {
        if k.is_multiple_of(p) {
            while k.is_multiple_of(p) {
                k /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if k > 1 {
        result -= result / k;
    }
    result
}

pub fn divisors(k: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= k {
        if k.is_multiple_of(d) {
            small.push(d);
            if d * d != k {
                large.push(k / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// All `k` with `phi(k) <= n`, ascending. Uses `phi(k) >= sqrt(k/2)`.
pub fn conductors_up_to(n: usize) -> Vec<u64> {
    let bound = 2 * (n as u64).pow(2).max(1);
    (1..=bound).filter(|&k| euler_phi(k) <= n as u64).collect()
}

fn cache() -> &'static Mutex<HashMap<u64, IntPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cyclotomic_unchecked(k: u64) -> IntPoly {
    if let Some(p) = cache().lock().expect("cyclotomic cache").get(&k) {
        return p.clone();
    }
    // x^k - 1 divided by every Phi_d for proper divisors d of k.
    let mut c = vec![Int::from(0); k as usize + 1];
    c[0] = Int::from(-1);
    c[k as usize] = Int::one();
    let mut p = IntPoly::raw(c);
    for d in divisors(k) {
        if d == k {
            continue;
        }
        let phi_d = cyclotomic_unchecked(d);
        p = p
            .div_exact_monic(&phi_d)
            .expect("cyclotomic factor divides x^k - 1");
    }
    cache()
        .lock()
        .expect("cyclotomic cache")
        .insert(k, p.clone());
    p
}

/// The `k`-th cyclotomic polynomial, for `k >= 1` with `phi(k) <= 64`.
pub fn cyclotomic(k: u64) -> Result<IntPoly> {
    if k == 0 || euler_phi(k) > MAX_DEGREE as u64 {
        return Err(Error::CyclotomicIndexOutOfRange(k));
    }
    Ok(cyclotomic_unchecked(k))
}

/// Cyclotomic factors of `p` as `(k, multiplicity)`, ascending in `k`.
pub fn cyclotomic_factors(p: &IntPoly) -> Vec<(u64, u32)> {
    let n = p.deg();
    if n == 0 {
        return Vec::new();
    }
    let mut rest = p.clone();
    let mut out = Vec::new();
    for k in conductors_up_to(n) {
        let phi = cyclotomic_unchecked(k);
        let mut m = 0;
        while rest.deg() >= phi.deg() {
            match rest.div_exact_monic(&phi) {
                Some(q) => {
                    rest = q;
                    m += 1;
                }
                None => break,
            }
        }
        if m > 0 {
            out.push((k, m));
        }
    }
    out
}

/// Product with multiplicity of the cyclotomic factors of `p`; `1` if none.
pub fn cyclotomic_part(p: &IntPoly) -> IntPoly {
    cyclotomic_factors(p)
        .into_iter()
        .fold(IntPoly::one(), |acc, (k, m)| &acc * &cyclotomic_unchecked(k).pow(m))
}

/// Whether `p` is (up to sign) a product of cyclotomic polynomials.
pub fn is_cyclotomic_product(p: &IntPoly) -> bool {
    p.is_monic() && cyclotomic_part(p) == *p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c).unwrap()
    }

    #[test]
    fn table_values() {
        assert_eq!(cyclotomic(1).unwrap(), p(&[-1, 1]));
        assert_eq!(cyclotomic(4).unwrap(), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6).unwrap(), p(&[1, -1, 1]));
        assert!(cyclotomic(0).is_err());
    }

    #[test]
    fn phi6_by_division_oracle() {
        // x^6 - 1 = Phi_1 Phi_2 Phi_3 Phi_6
        let x6 = p(&[-1, 0, 0, 0, 0, 0, 1]);
        let d = &(&p(&[-1, 1]) * &p(&[1, 1])) * &p(&[1, 1, 1]);
        assert_eq!(x6.div_exact(&d).unwrap(), cyclotomic(6).unwrap());
    }

    #[test]
    fn large_index_within_degree_cap() {
        // phi(105) = 48; Phi_105 famously has a coefficient -2.
        let c = cyclotomic(105).unwrap();
        assert_eq!(c.deg(), 48);
        assert!(c.coeffs().iter().any(|x| *x == Int::from(-2)));
        // phi(67) = 66 > 64
        assert!(cyclotomic(67).is_err());
    }

    #[test]
    fn cyclotomic_part_examples() {
        assert_eq!(cyclotomic_part(&p(&[1, -3, 1])), IntPoly::one());
        let cube = p(&[-1, 1]).pow(3);
        assert_eq!(cyclotomic_part(&cube), cube);
        let mixed = &p(&[-1, 1]) * &p(&[1, -3, 1]);
        assert_eq!(cyclotomic_part(&mixed), p(&[-1, 1]));
    }

    #[test]
    fn totient_values() {
        let v: Vec<u64> = (1..=12).map(euler_phi).collect();
        assert_eq!(v, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
        assert_eq!(conductors_up_to(2), vec![1, 2, 3, 4, 6]);
    }

    proptest! {
        #[test]
        fn part_divides_and_quotient_has_no_cyclotomic_factor(
            ks in prop::collection::vec(1u64..=12, 0..3),
            extra in prop::collection::vec(-3i64..=3, 0..3),
        ) {
            // product of chosen cyclotomics times a monic random factor
            let mut poly = ks.iter().fold(IntPoly::one(), |a, &k| &a * &cyclotomic(k).unwrap());
            let mut c: Vec<i64> = extra.clone();
            c.push(1);
            poly = &poly * &p(&c);
            let part = cyclotomic_part(&poly);
            let rest = poly.div_exact(&part).unwrap();
            prop_assert!(cyclotomic_part(&rest).is_one());
            for &k in &ks {
                prop_assert!(cyclotomic(k).unwrap().divides(&part));
            }
        }
    }
}
