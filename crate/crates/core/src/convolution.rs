//! Exact products of polynomials with arbitrary-precision natural
//! coefficients.
//!
//! The fast path runs number-theoretic transforms modulo several primes of
//! the form `c * 2^24 + 1` and recombines residues with Garner's algorithm.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;

/// Largest supported transform length is `2^MAX_LOG`.
const MAX_LOG: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Ntt,
    Schoolbook,
}

impl std::str::FromStr for Backend {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Backend> {
        match s {
            "ntt" => Ok(Backend::Ntt),
            "schoolbook" => Ok(Backend::Schoolbook),
            _ => Err(crate::Error::Input(format!("unknown convolution backend {s:?}"))),
        }
    }
}

/// Backend choice plus the length below which the NTT path falls back to
/// schoolbook multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convolver {
    pub backend: Backend,
    pub threshold: usize,
}

impl Default for Convolver {
    fn default() -> Self {
        Convolver {
            backend: Backend::Ntt,
            threshold: 64,
        }
    }
}

impl Convolver {
    pub fn schoolbook() -> Convolver {
        Convolver {
            backend: Backend::Schoolbook,
            threshold: 0,
        }
    }

    /// NTT for every product, however short.
    pub fn ntt_always() -> Convolver {
        Convolver {
            backend: Backend::Ntt,
            threshold: 0,
        }
    }

    pub fn multiply(&self, a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
        match self.backend {
            Backend::Ntt if a.len().max(b.len()) >= self.threshold => multiply_ntt(a, b),
            _ => multiply_schoolbook(a, b),
        }
    }
}

pub fn multiply_schoolbook(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Prime {
    p: u64,
    // element of multiplicative order exactly 2^MAX_LOG
    root: u64,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn primes() -> &'static Mutex<(u64, Vec<Prime>)> {
    static CACHE: OnceLock<Mutex<(u64, Vec<Prime>)>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(((1u64 << 62) >> MAX_LOG, Vec::new())))
}

/// The first `count` primes `c * 2^24 + 1 < 2^62`, scanning `c` downwards.
fn take_primes(count: usize) -> Vec<Prime> {
    let mut guard = primes().lock().expect("prime cache poisoned");
    let (next_c, list) = &mut *guard;
    while list.len() < count {
        *next_c -= 1;
        let c = *next_c;
        assert!(c > 0, "ran out of NTT primes");
        let p = (c << MAX_LOG) + 1;
        if !is_prime(p) {
            continue;
        }
        let half = 1u64 << (MAX_LOG - 1);
        let root = (2u64..)
            .map(|a| pow_mod(a, c, p))
            .find(|&w| pow_mod(w, half, p) != 1)
            .expect("a generator exists");
        list.push(Prime { p, root });
    }
    list[..count].to_vec()
}

fn ntt(a: &mut [u64], invert: bool, pr: Prime) {
    let n = a.len();
    let p = pr.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(pr.root, (1u64 << MAX_LOG) / len as u64, p);
        if invert {
            w = pow_mod(w, p - 2, p);
        }
        for start in (0..n).step_by(len) {
            let mut wk = 1u64;
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = mul_mod(a[start + k + len / 2], wk, p);
                a[start + k] = if u + v >= p { u + v - p } else { u + v };
                a[start + k + len / 2] = if u >= v { u - v } else { u + p - v };
                wk = mul_mod(wk, w, p);
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = mul_mod(*x, inv_n, p);
        }
    }
}

fn residue(x: &BigUint, p: u64) -> u64 {
    let mut r: u128 = 0;
    for d in x.to_u64_digits().iter().rev() {
        r = ((r << 64) | *d as u128) % p as u128;
    }
    r as u64
}

pub fn multiply_ntt(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    assert!(size <= 1 << MAX_LOG, "convolution length {out_len} too large");
    let bits = |v: &[BigUint]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let (ba, bb) = (bits(a), bits(b));
    if ba == 0 || bb == 0 {
        return vec![BigUint::zero(); out_len];
    }
    let min_len = a.len().min(b.len()) as u64;
    // coefficients are below 2^bound
    let bound = ba + bb + (64 - min_len.leading_zeros() as u64) + 1;
    // each prime exceeds 2^61
    let count = (bound / 61 + 1) as usize;
    let ps = take_primes(count);

    let residues: Vec<Vec<u64>> = ps
        .iter()
        .map(|&pr| {
            let mut fa = vec![0u64; size];
            let mut fb = vec![0u64; size];
            for (k, x) in a.iter().enumerate() {
                fa[k] = residue(x, pr.p);
            }
            for (k, x) in b.iter().enumerate() {
                fb[k] = residue(x, pr.p);
            }
            ntt(&mut fa, false, pr);
            ntt(&mut fb, false, pr);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = mul_mod(*x, *y, pr.p);
            }
            ntt(&mut fa, true, pr);
            fa.truncate(out_len);
            fa
        })
        .collect();

    // Garner: x = d0 + d1 p0 + d2 p0 p1 + ...
    // prefix[i][j] = p0 * ... * p_{j-1} mod p_i, inv[i] = prefix[i][i]^{-1}
    let prefix: Vec<Vec<u64>> = ps
        .iter()
        .map(|pi| {
            let mut acc = 1u64;
            let mut row = vec![1u64];
            for pj in &ps {
                acc = mul_mod(acc, pj.p % pi.p, pi.p);
                row.push(acc);
            }
            row
        })
        .collect();
    let inv: Vec<u64> = ps
        .iter()
        .enumerate()
        .map(|(i, pi)| pow_mod(prefix[i][i], pi.p - 2, pi.p))
        .collect();
    let mut radix = vec![BigUint::from(1u32)];
    for pr in &ps[..count - 1] {
        let next = radix.last().expect("non-empty") * pr.p;
        radix.push(next);
    }

    (0..out_len)
        .map(|t| {
            let mut digits = Vec::with_capacity(count);
            for i in 0..count {
                let p = ps[i].p;
                let mut partial = 0u64;
                for (j, &d) in digits.iter().enumerate() {
                    partial = (partial + mul_mod(d, prefix[i][j], p)) % p;
                }
                let r = residues[i][t];
                let diff = if r >= partial { r - partial } else { r + p - partial };
                digits.push(mul_mod(diff, inv[i], p));
            }
            digits
                .iter()
                .zip(&radix)
                .filter(|(d, _)| **d != 0)
                .map(|(&d, r)| r * d)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn primes_have_full_two_adic_order() {
        for pr in take_primes(4) {
            assert!(pr.p < 1 << 62 && pr.p > 1 << 61);
            assert_eq!(pow_mod(pr.root, 1 << MAX_LOG, pr.p), 1);
            assert_ne!(pow_mod(pr.root, 1 << (MAX_LOG - 1), pr.p), 1);
        }
    }

    #[test]
    fn small_products() {
        let a = nat(&[1, 2, 3]);
        let b = nat(&[4, 5]);
        assert_eq!(multiply_ntt(&a, &b), nat(&[4, 13, 22, 15]));
        assert_eq!(multiply_schoolbook(&a, &b), nat(&[4, 13, 22, 15]));
        assert!(multiply_ntt(&a, &[]).is_empty());
        assert_eq!(multiply_ntt(&nat(&[0, 0]), &a), nat(&[0, 0, 0, 0]));
    }

    #[test]
    fn huge_coefficients_recombine() {
        let big = BigUint::from(1u32) << 700usize;
        let a = vec![big.clone() - 1u32, big.clone(), BigUint::from(3u32)];
        let b = vec![big.clone(), BigUint::zero(), big - 7u32];
        assert_eq!(multiply_ntt(&a, &b), multiply_schoolbook(&a, &b));
    }

    proptest! {
        #[test]
        fn ntt_matches_schoolbook(
            a in proptest::collection::vec(any::<u128>(), 1..80),
            b in proptest::collection::vec(any::<u128>(), 1..80),
            shift in 0usize..200,
        ) {
            let a: Vec<BigUint> = a.into_iter().map(|x| BigUint::from(x) << shift).collect();
            let b: Vec<BigUint> = b.into_iter().map(BigUint::from).collect();
            prop_assert_eq!(multiply_ntt(&a, &b), multiply_schoolbook(&a, &b));
        }
    }
}
